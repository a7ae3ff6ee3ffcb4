"""How far can post-selection push a Gaussian pointer?

For a qubit measured with coupling g the largest post-selected pointer mean
is g / sqrt(1 - r^2), r being the overlap of the two displaced packets. In the
weak limit this saturates at the pointer width, not at infinity.
"""
import numpy as np

from qmeas.meters import GaussianPointer
from qmeas.weakpost import amplification_scan

alpha, beta = np.sqrt(0.4), np.sqrt(0.6) * np.exp(0.9j)
print(f"{'g':>8} {'max |fQ|':>12} {'bound':>12} {'prob(f)':>12}")
for g in (2.0, 1.0, 0.5, 0.1, 0.03, 0.01):
    res = amplification_scan(GaussianPointer.default(1.0, g), alpha, beta, n_random=500)
    print(f"{g:8.3g} {res.max_abs_fQ:12.6f} {res.bound:12.6f} {res.prob_at_max:12.3e}")
