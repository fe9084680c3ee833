"""Where each method wins: uniform low-rank spectra versus gapped spectra with tiny weights."""
from qpca import baseline

print(f"{'regime':<9}{'convention':<11}{'R':>3}{'gamma':>7}{'r_min':>9}{'original':>12}{'new':>12}  winner")
points = [("uniform", {"R": R, "eps": 0.05, "gamma": 0.05, "r_min": 1 / R}) for R in (2, 4, 8)]
points += [("gapped", {"R": 2, "eps": 0.05, "gamma": 0.6, "r_min": r}) for r in (1e-4, 1e-6, 1e-8)]
for regime, p in points:
    for conv in baseline.CONVENTIONS:
        orig = baseline.cost_model("original", p, conv).copies
        new = baseline.cost_model("new", p, conv).copies
        print(f"{regime:<9}{conv:<11}{p['R']:>3}{p['gamma']:>7.2f}{p['r_min']:>9.0e}{orig:>12.3g}{new:>12.3g}  "
              f"{baseline.crossover(p, conv)}")

comps, report = baseline.sample_components([[0.9, 0], [0, 0.1]], 0.05, 1, seed=1)
print(f"\nsampled top eigenvalue {comps[0].value:.4f} after {report.extras['draws']} readings, {report.copies:.3g} copies")
