"""Average photon paths behind a double slit from weak velocity values.

Prints a coarse text histogram of where the trajectories land next to the
interference pattern they should reproduce.
"""
import numpy as np

from qmeas.scenarios import count_fringes, density_correlation, two_slit_trajectories

ts = two_slit_trajectories()
print(f"fringes: {count_fringes(ts)}, histogram/density correlation {density_correlation(ts):.4f}")
edges = np.linspace(-60, 60, 41)
hist, _ = np.histogram(ts.x[-1], bins=edges)
for lo, count in zip(edges[:-1], hist):
    print(f"{lo:7.1f} {'#' * int(count)}")
