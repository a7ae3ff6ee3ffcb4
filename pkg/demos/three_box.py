"""Three boxes: certain to be found in A, certain to be found in B, and a
weak pointer on C that moves the wrong way."""
import numpy as np

from qmeas.scenarios import three_box

rep = three_box()
print("post-selected state:", np.round(rep.post.real, 4))
for box in "ABC":
    print(f"box {box}: ABL probability {rep.abl[box]:.4f}   weak value {rep.weak[box].real:+.4f}")
print(f"sum of weak values: {rep.weak_sum.real:.4f}")
print(f"pointer momentum / g on box C: {rep.pointer_P_over_g:+.5f}")

print("\nweak value of box C as the post-selection angle turns:")
for theta in np.linspace(0.2, 2.8, 8):
    print(f"  theta = {theta:.2f}: {three_box(theta, n=256).weak['C'].real:+8.3f}")
