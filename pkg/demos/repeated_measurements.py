"""Frequent measurement freezes a qubit; fixed-strength slicing instead
produces a Lindblad dephasing channel."""
import numpy as np

from qmeas.qcore import SIGMA_X, SIGMA_Z
from qmeas.scenarios import LindbladModel, lindblad_from_repeated, zeno_sweep

plus = np.full((2, 2), 0.5)
print("Zeno: deviation of |+> after n measurements of sigma_z in unit time")
for row in zeno_sweep(SIGMA_Z, plus, [1, 4, 16, 64, 256, 1024]):
    print(f"  n = {row.n:5d}: {row.deviation:.3e}")

model = LindbladModel(SIGMA_X, ((SIGMA_Z, 0.5),))
print("\nrepeated fresh ancillas against the integrated master equation")
for row in lindblad_from_repeated(model, plus, 1.0, [8, 16, 32, 64, 128]):
    print(f"  n = {row.n:4d}: error {row.error:.3e}")
