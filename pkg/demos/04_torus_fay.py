"""Genus one: the torus Green's function and the Fay identity B = S + pi/Im tau.

Run: python3 demos/04_torus_fay.py
"""
from tauward import partition as P

for tau in (2j, 0.3 + 1.1j):
    print(f"tau = {tau}")
    print(f"  -d2G/dz dzbar = {P.torus_laplacian(0.3 + 0.4j, tau):.7f}  (-1/Im tau = {-1 / tau.imag:.7f})")
    f = P.fay_torus_check(tau, 0.5 + 0.6j, 0.2 + 0.2j)
    print(f"  B = {f['B']:.8f}")
    print(f"  S + pi/Im tau = {f['S'] + 3.141592653589793 / tau.imag:.8f}")
    print(f"  a-period of B = {f['a_period']:.1e}")
