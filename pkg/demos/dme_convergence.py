"""Trotterized swap steps converge to exp(-i rho t) sigma exp(i rho t) at rate 1/N."""
import numpy as np

from qpca import dme, synthetic

rng = np.random.default_rng(7)
rho = synthetic.random_density(4, rng)
sigma = synthetic.random_density(4, rng)

print(f"{'steps':>6} {'trace-norm error':>18}")
errors = []
steps = [8, 16, 32, 64, 128, 256]
for n in steps:
    res = dme.exponentiate_density(rho, 0.5, n_steps=n, sigma=sigma)
    errors.append(res.empirical_error)
    print(f"{n:>6} {res.empirical_error:>18.3e}")

slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
print(f"log-log slope {slope:.3f} (expect -1)")
