"""Find the leading eigenpair of a density matrix with the quantum power method."""
import numpy as np

from qpca import linalg, power, synthetic

rng = np.random.default_rng(3)
rho = synthetic.density_from_spectrum(synthetic.planted_spectrum(16, 0.3, rng), rng)
truth = linalg.eigh(rho)

for eps in (1e-2, 1e-3, 1e-4):
    est = power.qpca_top(power.DensitySource(rho), eps)
    overlap = abs(np.vdot(truth.vector(0), est.vector))
    print(
        f"eps={eps:.0e}  value={est.value:.6f} (true {truth.eigenvalues[0]:.6f})  "
        f"overlap={overlap:.6f}  k={est.k}  copies={est.ledger.rho_copies:.3g}"
    )
