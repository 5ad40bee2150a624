"""How much white noise does it take to make a symmetric planar qubit
measurement classical?

A k-outcome measurement with effects fanned out evenly in the Bloch x-z plane
is classical for k = 3 and nonclassical from k = 4 on.  The critical noise
level eta admits the closed form 1/(2 cos(pi/k)), and the semidefinite
program, its dual, and the closed-form bound all agree on it.
"""

import numpy as np

from ncq import (
    add_white_noise_measurement,
    analytic_upper_bound_measurement,
    certify_measurement,
    make_planar_measurement,
    white_noise_robustness_measurement,
    white_noise_robustness_measurement_dual,
)

print("k   eta(SDP)     eta(dual)    closed-form  bound        verdict")
for k in range(3, 9):
    meas = make_planar_measurement(k)
    primal = white_noise_robustness_measurement(meas)
    dual = white_noise_robustness_measurement_dual(meas)
    bound = analytic_upper_bound_measurement(meas)
    exact = 1.0 if k == 3 else 1 / (2 * np.cos(np.pi / k))
    print(
        f"{k}   {primal.value:.8f}   {dual.value:.8f}   {exact:.8f}   "
        f"{bound:.8f}   {primal.verdict}"
    )

print()
print("Sweeping noise on the 5-outcome measurement (the classical/nonclassical")
print("transition sits exactly at (sqrt(5)-1)/2 = 0.6180...):")
for eta in (0.55, 0.60, 0.617, 0.619, 0.65, 1.0):
    noisy = add_white_noise_measurement(make_planar_measurement(5), eta)
    rep = certify_measurement(noisy)
    print(f"  eta={eta:5.3f}  mu={rep.value:+.6f}  {rep.verdict}")
