"""log tau of a contour: two independent evaluations and a closed form.

Run: python3 demos/01_tau_of_a_contour.py
"""
import numpy as np

from tauward.contour import ExteriorMap, area
from tauward.energy import log_tau_boundary, log_tau_disk, log_tau_grid

print("Disk of radius R: boundary quadrature against the radial closed form")
for R in (0.6, 1.0, 1.7):
    b = log_tau_boundary(ExteriorMap(R)).log_tau
    print(f"  R = {R}: {b: .15f}  closed form {log_tau_disk(R): .15f}")

print("\nEllipses g(w) = r w + u/w: boundary value against t0^2 (log r - 3/4)")
for r, u in ((1.0, 0.3), (1.3, 0.4)):
    g = ExteriorMap(r, 0, (u,))
    t0 = area(g) / np.pi
    print(f"  r = {r}, u = {u}: {log_tau_boundary(g).log_tau: .12f}  {t0 * t0 * (np.log(r) - 0.75): .12f}")

g = ExteriorMap(1.0, 0.1, (0.2 + 0.1j, 0.05))
print("\nA generic map: the grid oracle converges at first order towards the boundary value")
b = log_tau_boundary(g).log_tau
for n in (100, 200, 400):
    gr = log_tau_grid(g, n).log_tau
    print(f"  grid_n = {n:3d}: {gr: .8f}  (difference {abs(gr - b):.1e})")
print(f"  boundary:      {b: .8f}")
print("\nSpectral convergence of the boundary rule:")
for M in (32, 64, 128):
    print(f"  M = {M:3d}: {abs(log_tau_boundary(g, M).log_tau - b):.1e}")
