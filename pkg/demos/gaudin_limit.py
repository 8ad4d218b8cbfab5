"""The Gaudin model as the η -> 0 limit of the open chain.

Shows the η-expansion of 2λ t(λ) - Δ(λ), whose second coefficient contains
the Gaudin generating function τ(λ), then solves the Gaudin Bethe equations
and checks the resulting eigenvectors of τ(λ).
"""
import numpy as np

from openxxx.bethe import bethe_F, bethe_vector
from openxxx.expansion import leading_ratio_rate
from openxxx.gaudin import (
    GaudinConfig, chain_from_gaudin, chi_M, gaudin_bethe_vector, gaudin_f, gaudin_hamiltonians,
    quasiclassical_check, residue, solve_gaudin, tau,
)

gc = GaudinConfig([0.5, 1], [0.3 + 0.05j, 0.7 - 0.1j], xi=1.1 + 0.2j, nu=0.9 - 0.1j, psi=0.4 + 0.3j)

rep = quasiclassical_check(0.45 + 0.35j, gc)
print("expansion of 2λt - Δ in η")
for name, (value, tol) in rep.checks.items():
    print(f"  {name:<7} {value:9.2e}  (tolerance {tol:.0e})")

# residues of τ at ±α_m are the Hamiltonians (times 4)
H, Ht = gaudin_hamiltonians(gc)
for m, a in enumerate(gc.inhomogeneities):
    r_plus, r_minus = residue(a, gc), residue(-a, gc)
    print(f"site {m}: |Res τ - 4H| = {np.abs(r_plus - 4 * H[m].matrix).max():.1e}, "
          f"|Res τ - 4H~| = {np.abs(r_minus - 4 * Ht[m].matrix).max():.1e}")

# chain Bethe vectors and Bethe equations tend to their Gaudin counterparts
mus = [0.6 + 0.2j, 1.2 - 0.3j]
phi = gaudin_bethe_vector(mus, gc)
errs, rates = leading_ratio_rate(lambda e: bethe_vector(mus, *chain_from_gaudin(gc, e)), phi, 2)
print("\nΨ_2/η² -> φ_2: errors", ", ".join(f"{e:.1e}" for e in errs), "orders", ", ".join(f"{r:.2f}" for r in rates))
f = np.array([gaudin_f(i, mus, gc) for i in range(2)])
F = lambda e: np.array([bethe_F(i, mus, *chain_from_gaudin(gc, e)) for i in range(2)])
errs, rates = leading_ratio_rate(F, f, 1)
print("F/η -> f:     errors", ", ".join(f"{e:.1e}" for e in errs), "orders", ", ".join(f"{r:.2f}" for r in rates))

print("\nGaudin Bethe states, M = 1")
lam = 0.2 + 0.5j
for s in solve_gaudin(1, gc):
    if s.null:
        continue
    T, chi, v = tau(lam, gc).matrix, chi_M(lam, s.roots, gc), s.vector
    print(f"  μ = {s.roots[0]:.8f}   χ(λ) = {chi:.8f}   |τφ - χφ|/|φ| = "
          f"{np.abs(T @ v - chi * v).max() / np.abs(v).max():.1e}")
