"""The second-order weak-measurement formulas against exact grid evolution.

Each error column should drop by at least three decades per decade of g.
"""
import numpy as np

from qmeas.qcore import SIGMA_Z
from qmeas.weakpost import WeakSetup, postselect_meter_2nd

s = np.array([np.cos(0.3), np.exp(0.7j) * np.sin(0.3)])
f = np.array([np.cos(1.1), np.exp(-0.4j) * np.sin(1.1)])
print(f"{'g':>8} {'prob err':>11} {'<Q> err':>11} {'<P> err':>11}")
for g in (1e-1, 1e-2, 1e-3):
    rep = postselect_meter_2nd(WeakSetup.create(s, SIGMA_Z, f, g))
    d = rep.exact_minus_formula
    print(f"{g:8.0e} {abs(d['prob']):11.2e} {abs(d['Q']):11.2e} {abs(d['P']):11.2e}")
print("weak value:", np.round(rep.weak_value, 6))
