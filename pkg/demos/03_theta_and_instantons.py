"""Theta functions, the instanton sum and genus-g Ward identities.

Run: python3 demos/03_theta_and_instantons.py
"""
import numpy as np

from tauward import partition as P
from tauward.theta import Characteristics, PeriodMatrix, theta

print(f"theta(0 | i) = {theta([0], [[1j]]).real:.16f}")

Om = PeriodMatrix([[1j + 0.1, 0.2 + 0.1j], [0.2 + 0.1j, 1.5j]])
inp = P.InstantonInput(Om, Characteristics([0.2, -0.1], [0.3, 0.05]))
print("\nGenus 2 instanton sum, three ways:")
print(f"  lattice of harmonic forms: {P.zinst_primitive(inp).real:.15f}")
print(f"  quadratic form in Z^4:     {P.zinst_qa(inp).real:.15f}")
print(f"  theta closed form:         {P.zinst_closed(inp).real:.15f}")

r = P.closed_form_readings(inp)
print("\nThe exponential prefactor must be read as a bilinear form:")
for k, v in r.items():
    print(f"  {k:10s} {v:.12f}")

Q, _ = P.qa_matrices(inp, literal=True)
print(f"\nRank of the quadratic form with block -conj(Omega) Y: {np.linalg.matrix_rank(Q)} of {Q.shape[0]}")

print("\nMixed second derivatives of log bold tau (constant in Z):")
for i, j in ((0, 0), (0, 1), (1, 1)):
    s = P.ward_genus_second(inp, i, j)
    print(f"  ({i},{j}): {np.mean(s['mixed_values']).real: .10f}  pi Y = {s['pi_Y']: .10f}  "
          f"spread {s['mixed_variance']:.1e}")
