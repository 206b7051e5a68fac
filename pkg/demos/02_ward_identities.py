"""Ward identities for the contour tau-function.

log tau is differentiated numerically in the harmonic-moment chart (each
perturbed moment vector is mapped back to a conformal map by Newton's method)
and compared with contour integrals and kernel quadratures.

Run: python3 demos/02_ward_identities.py   (about 15 s)
"""
import numpy as np

from tauward import ward
from tauward.contour import ExteriorMap

g = ExteriorMap(1.0, 0.0, (0.3,))

print("First order: d log tau / dt_n against the interior moments v_n")
_, checks = ward.ward_first_order(g, 3)
for c in checks:
    print(f"  {c.name:22s} residual {c.residual:.1e}")

print("\nSecond order, N = 3")
hb = ward.hessian_block(g, 3)
print("  holomorphic block (FD):\n", np.round(hb.holo.real, 6))
print("  Schiffer double quadrature:\n", np.round(ward.schiffer_matrix(g, 3).real, 6))
print("  mixed block (FD):\n", np.round(hb.mixed.real, 6))
print("  Bergman double quadrature:\n", np.round(ward.bergman_matrix(g, 3).real, 6))
print(f"  d2 log tau/dt0^2 = {hb.t0t0:.2e}, 2 log r = {2 * np.log(g.r):.2e}")

print("\nThe exterior map from second derivatives at z = 5:")
c = ward.reconstruct_check(g, 8, 5.0)
print(f"  log G(5) = {c.lhs.real:.10f}, series = {c.rhs.real:.10f}")

print("\nMetric h on contour space (pi h equals the mixed block):")
mg = ward.metric_gram(g, 4)
print("  eigenvalues", np.round(mg.eigenvalues, 6))
