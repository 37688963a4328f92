"""The measure-count bound: how many ergodic ACIMs can live above a
Lyapunov threshold.

Run:  python3 demos/08_bound_calculator.py
"""

import math

from acim1d.cli import (
    bound_analytic, bound_calculator, bound_smooth, reparam_count_constant,
)
from acim1d.maps import estimate_norms, make_map

print("== (log||f'||_inf / delta)^((C_r log||f'||_(r-1)) / delta) ==")
norms = estimate_norms(make_map("logistic"))
log_sup = math.log(norms.sup_abs_deriv[1])        # log 4
log_r1 = math.log(norms.f_prime_r_minus_1)        # log 8 (sup|f''| = 8)
print(f"  logistic norms: log||f'|| = {log_sup:.4f}, "
      f"log||f'||_(r-1) = {log_r1:.4f}")
for delta in (1.0, 0.5, 0.25):
    val = bound_calculator(log_sup, log_r1, delta, C_r=10.0)
    print(f"  delta = {delta}: at most {val:.3g} measures with exponent "
          f"above log||f'||/r + delta")

print("\n== variants ==")
print(f"  analytic maps:  C^(1/delta^4) with C=2, delta=0.5 -> "
      f"{bound_analytic(2.0, 0.5):.3g}")
print(f"  smooth maps:    (||f'||_(C/delta))^(C/delta^3) with "
      f"norm=3, C=2, delta=1 -> {bound_smooth(3.0, 2.0, 1.0):.3g}")
print(f"  counting constant C r^(2r) at r=3: "
      f"{reparam_count_constant(3.0):.0f}")
