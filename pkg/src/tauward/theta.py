"""Riemann theta functions of genus g <= 4 by truncated lattice sums.

theta(Z | Omega) = sum_{n in Z^g} exp(pi i (n.Omega n + 2 n.Z)).

Writing Omega = X + iT and Z = x + iy, the modulus of the n-th term is
exp(pi c.T c) exp(-pi (n + c).T (n + c)) with c = Y y, Y = T^{-1}. The sum is
truncated to the ellipsoid (n + c).T (n + c) <= R^2. Splitting
exp(-pi q) <= exp(-pi R^2/2) exp(-pi q/2) outside the ellipsoid and bounding
the full Gaussian sum coordinatewise gives

    tail <= exp(pi c.T c) exp(-pi R^2/2) (1 + sqrt(2/lambda_min))^g,

which fixes R(tol). Errors are therefore absolute relative to the Gaussian
peak exp(pi Im Z.Y.Im Z), which is 1 for real Z.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateImOmega, InvalidInput, VerificationError

DEFAULT_TOL = 1e-14
MAX_GENUS = 4


@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    """Symmetric g x g matrix with positive definite imaginary part."""

    Omega: np.ndarray

    def __post_init__(self):
        Om = np.array(self.Omega, dtype=complex)
        if Om.ndim == 0:
            Om = Om.reshape(1, 1)
        if Om.ndim != 2 or Om.shape[0] != Om.shape[1]:
            raise InvalidInput("PeriodMatrix must be a square matrix")
        if Om.shape[0] > MAX_GENUS:
            raise InvalidInput(f"genus {Om.shape[0]} exceeds the supported maximum {MAX_GENUS}")
        if np.abs(Om - Om.T).max() > 1e-14 * max(1.0, np.abs(Om).max()):
            raise InvalidInput("PeriodMatrix invariant violated: Omega must be symmetric")
        Om = 0.5 * (Om + Om.T)
        try:
            np.linalg.cholesky(Om.imag)
        except np.linalg.LinAlgError:
            raise InvalidInput("PeriodMatrix invariant violated: Im(Omega) must be positive definite") from None
        Om.setflags(write=False)
        object.__setattr__(self, "Omega", Om)

    @property
    def g(self) -> int:
        return self.Omega.shape[0]

    @cached_property
    def Y(self) -> np.ndarray:
        return np.linalg.inv(self.Omega.imag)

    @cached_property
    def lam_min(self) -> float:
        return float(np.linalg.eigvalsh(self.Omega.imag).min())

    def to_list(self):
        return [[[v.real, v.imag] for v in row] for row in self.Omega]

    @classmethod
    def from_list(cls, rows) -> "PeriodMatrix":
        try:
            return cls(np.array([[parse_complex(v) for v in row] for row in rows], dtype=complex))
        except (TypeError, ValueError, IndexError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"Omega must be a row-major matrix of [re, im] pairs: {exc}") from None


def parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InvalidInput(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise InvalidInput(f"cannot read a complex number from {v!r}")


@dataclass(frozen=True, eq=False)
class Characteristics:
    xi_a: np.ndarray
    xi_b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.xi_a, dtype=float))
        b = np.atleast_1d(np.asarray(self.xi_b, dtype=float))
        if a.shape != b.shape or a.ndim != 1:
            raise InvalidInput("characteristics xi_a and xi_b must be real vectors of equal length")
        object.__setattr__(self, "xi_a", a)
        object.__setattr__(self, "xi_b", b)

    @classmethod
    def zero(cls, g: int) -> "Characteristics":
        return cls(np.zeros(g), np.zeros(g))


def as_period_matrix(Omega) -> PeriodMatrix:
    return Omega if isinstance(Omega, PeriodMatrix) else PeriodMatrix(Omega)


def _as_vector(Z, g: int) -> np.ndarray:
    Z = np.atleast_1d(np.asarray(Z, dtype=complex))
    if Z.shape != (g,):
        raise InvalidInput(f"Z must be a complex vector of length g={g}")
    return Z


def truncation_radius(Om: PeriodMatrix, tol: float, degree: int = 0) -> float:
    """R with exp(-pi R^2/2) (1 + sqrt(2/lambda))^g (poly factor) <= tol."""
    if not tol > 0:
        raise InvalidInput("tol must be positive")
    lam = Om.lam_min
    if lam < 1e-8:
        raise DegenerateImOmega(f"lambda_min(Im Omega) = {lam:.3e} < 1e-8")
    log_c = Om.g * np.log1p(np.sqrt(2 / lam))
    R2 = 2 / np.pi * (log_c - np.log(tol))
    if degree:
        # term-wise derivatives carry |2 pi n|^degree; absorb it by iterating R
        for _ in range(5):
            R = np.sqrt(max(R2, 1.0))
            growth = degree * np.log(2 * np.pi * (R / np.sqrt(lam) + 1))
            R2 = 2 / np.pi * (log_c + growth - np.log(tol))
    return float(np.sqrt(max(R2, 1.0)))


def lattice_points(Om: PeriodMatrix, center: np.ndarray, R: float) -> np.ndarray:
    """Integer n with (n - center).T (n - center) <= R^2, T = Im Omega."""
    T = Om.Omega.imag
    half = R * np.sqrt(np.diag(Om.Y))
    lo = np.floor(center - half).astype(int)
    hi = np.ceil(center + half).astype(int)
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    n = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, Om.g)
    d = n - center
    q = np.einsum("ki,ij,kj->k", d, T, d)
    return n[q <= R * R]


def _shifted_sum(
    Om: PeriodMatrix, Z: np.ndarray, shift: np.ndarray, tol: float, alpha: tuple = (), radius_factor: float = 1.0
):
    """sum over m = n + shift of prod_k (2 pi i m_{alpha_k}) exp(pi i (m.Omega m + 2 m.Z))."""
    c = Om.Y @ Z.imag
    R = radius_factor * truncation_radius(Om, tol, len(alpha))
    n = lattice_points(Om, -c - shift, R).astype(float)
    m = n + shift
    expo = np.pi * 1j * (np.einsum("ki,ij,kj->k", m, Om.Omega, m) + 2 * m @ Z)
    w = np.exp(expo)
    for k in alpha:
        w = w * (2j * np.pi * m[:, k])
    return complex(np.sum(w))


def theta(Z, Omega, tol: float = DEFAULT_TOL, radius_factor: float = 1.0) -> complex:
    """theta(Z | Omega) with absolute error <= tol * exp(pi Im Z.Y.Im Z).

    radius_factor > 1 enlarges the truncation ellipsoid (used to test it).
    """
    Om = as_period_matrix(Omega)
    Z = _as_vector(Z, Om.g)
    return _shifted_sum(Om, Z, np.zeros(Om.g), tol, radius_factor=radius_factor)


def _multi_indices(g: int, order) -> tuple[list[tuple], tuple]:
    """Index tuples to evaluate and the output shape for an int order or one multi-index."""
    if isinstance(order, (int, np.integer)):
        k = int(order)
        if not 0 <= k <= 3:
            raise InvalidInput("derivative order must be 0..3")
        return list(itertools.product(range(g), repeat=k)), (g,) * k
    alpha = tuple(int(a) for a in order)
    if len(alpha) != g or min(alpha) < 0 or sum(alpha) > 3:
        raise InvalidInput("multi-index must have g nonnegative entries of total degree <= 3")
    idx = tuple(i for i, a in enumerate(alpha) for _ in range(a))
    return [idx], ()


def theta_derivs(Z, Omega, order=1, tol: float = DEFAULT_TOL, xi: Characteristics | None = None):
    """Term-wise derivatives of theta (or theta[xi]) in Z.

    `order` is either an integer k <= 3, returning the full tensor of k-th
    derivatives (shape (g,)*k), or a multi-index alpha with |alpha| <= 3,
    returning the single derivative d^alpha theta.
    """
    Om = as_period_matrix(Omega)
    Z = _as_vector(Z, Om.g)
    if xi is None:
        shift, Zs = np.zeros(Om.g), Z
    else:
        # d/dZ of the shifted sum equals d/dZ of theta[xi](Z)
        shift, Zs = xi.xi_a, Z + xi.xi_b
    idx, shape = _multi_indices(Om.g, order)
    cache: dict = {}
    out = np.empty(len(idx), dtype=complex)
    for k, a in enumerate(idx):
        key = tuple(sorted(a))
        if key not in cache:
            cache[key] = _shifted_sum(Om, Zs, shift, tol, key)
        out[k] = cache[key]
    return out.reshape(shape) if shape else complex(out[0])


def theta_char(xi: Characteristics, Z, Omega, tol: float = DEFAULT_TOL) -> complex:
    """theta[xi](Z | Omega) = exp(pi i (a.Omega a + 2 a.(Z + b))) theta(Z + Omega a + b | Omega).

    The shifted lattice sum over m = n + a is evaluated as a second route and
    must agree to 10*tol (relative to the Gaussian peak).

    Raises:
        VerificationError: the two routes disagree.
    """
    Om = as_period_matrix(Omega)
    Z = _as_vector(Z, Om.g)
    a, b = xi.xi_a, xi.xi_b
    if a.size != Om.g:
        raise InvalidInput("characteristics length must equal the genus")
    shifted = Z + Om.Omega @ a + b
    pref = np.exp(np.pi * 1j * (a @ Om.Omega @ a + 2 * a @ (Z + b)))
    v1 = complex(pref * theta(shifted, Om, tol))
    v2 = _shifted_sum(Om, Z + b, a, tol)
    c = Om.Y @ (Z + b).imag
    scale = max(1.0, float(np.exp(np.pi * (c @ Om.Omega.imag @ c))), abs(v1))
    if abs(v1 - v2) > 10 * tol * scale + 1e-15 * scale:
        raise VerificationError(f"theta_char routes disagree: |{v1} - {v2}| = {abs(v1 - v2):.3e}")
    return v1


def theta_char_shifted(xi: Characteristics, Z, Omega, tol: float = DEFAULT_TOL) -> complex:
    """The shifted-lattice route alone."""
    Om = as_period_matrix(Omega)
    Z = _as_vector(Z, Om.g)
    return _shifted_sum(Om, Z + xi.xi_b, xi.xi_a, tol)


def sqrt_det(A: np.ndarray) -> complex:
    """Principal branch of det(A)^{1/2}."""
    return complex(np.sqrt(complex(np.linalg.det(A))))


def modular_check(Z, Omega, tol: float = DEFAULT_TOL) -> float:
    """min over the sign of |theta(-Om^-1 Z | -Om^-1) -/+ det(Om/i)^{1/2} exp(pi i Z.Om^-1 Z) theta(Z | Om)|."""
    Om = as_period_matrix(Omega)
    Z = _as_vector(Z, Om.g)
    Oinv = np.linalg.inv(Om.Omega)
    dual = PeriodMatrix(-0.5 * (Oinv + Oinv.T))
    lhs = theta(-Oinv @ Z, dual, tol)
    rhs = sqrt_det(Om.Omega / 1j) * np.exp(np.pi * 1j * (Z @ Oinv @ Z)) * theta(Z, Om, tol)
    return float(min(abs(lhs - rhs), abs(lhs + rhs)))


def parity_residual(Z, Omega, tol: float = DEFAULT_TOL) -> float:
    Z = np.atleast_1d(np.asarray(Z, dtype=complex))
    return abs(theta(Z, Omega, tol) - theta(-Z, Omega, tol))


def periodicity_residual(Z, Omega, m, tol: float = DEFAULT_TOL) -> float:
    Z = np.atleast_1d(np.asarray(Z, dtype=complex))
    return abs(theta(Z + np.asarray(m, dtype=float), Omega, tol) - theta(Z, Omega, tol))


def quasi_periodicity_residual(Z, Omega, i: int = 0, tol: float = DEFAULT_TOL) -> float:
    """|theta(Z + Omega e_i) - exp(-pi i (Omega_ii + 2 Z_i)) theta(Z)|."""
    Om = as_period_matrix(Omega)
    Z = _as_vector(Z, Om.g)
    lhs = theta(Z + Om.Omega[:, i], Om, tol)
    rhs = np.exp(-np.pi * 1j * (Om.Omega[i, i] + 2 * Z[i])) * theta(Z, Om, tol)
    return float(abs(lhs - rhs))


def random_period_matrix(g: int, rng: np.random.Generator, spread: float = 0.5) -> PeriodMatrix:
    """Symmetric Omega with Im Omega = B B^T + 0.5 I (well conditioned)."""
    X = rng.uniform(-spread, spread, (g, g))
    B = rng.uniform(-spread, spread, (g, g))
    T = B @ B.T + 0.5 * np.eye(g)
    return PeriodMatrix(0.5 * (X + X.T) + 1j * T)


def load_theta_input(text: str):
    """Parse {"Omega": [[[re, im], ...], ...], "Z": [...], "xi_a": [...], "xi_b": [...]}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"theta input is not valid JSON: {exc}") from None
    if "Omega" not in data:
        raise InvalidInput("theta input must contain Omega")
    Om = PeriodMatrix.from_list(data["Omega"])
    g = Om.g
    Z = np.array([parse_complex(v) for v in data.get("Z", [0.0] * g)], dtype=complex)
    xi = None
    if "xi_a" in data or "xi_b" in data:
        xi = Characteristics(data.get("xi_a", [0.0] * g), data.get("xi_b", [0.0] * g))
    return Om, _as_vector(Z, g), xi


def theta_checks(Omega, Z, xi: Characteristics | None = None, tol: float = DEFAULT_TOL) -> list:
    """Parity, periodicity, modular formula, two-route theta[xi], derivatives vs FD, truncation."""
    from .report import check

    Om = as_period_matrix(Omega)
    Z = _as_vector(Z, Om.g)
    g = Om.g
    if xi is None:
        xi = Characteristics(np.full(g, 0.25), np.full(g, -0.15))
    peak = float(np.exp(np.pi * Z.imag @ Om.Y @ Z.imag))
    out = [
        check("theta parity", theta(Z, Om, tol), theta(-Z, Om, tol), 1e-12 * peak),
        check("theta integer periodicity", theta(Z + 1.0, Om, tol), theta(Z, Om, tol), 1e-12 * peak),
        check("theta quasi-periodicity", quasi_periodicity_residual(Z, Om, 0, tol), 0.0, 1e-10 * peak),
        check("modular transformation (min over sign)", modular_check(Z, Om, tol), 0.0,
              (1e-10 if g == 1 else 1e-8) * max(1.0, peak)),
        check("theta[xi] prefactor = shifted sum", theta_char(xi, Z, Om, tol),
              theta_char_shifted(xi, Z, Om, tol), 1e-10 * peak),
        check("theta truncation doubling", theta(Z, Om, 1e-8), theta(Z, Om, 1e-8, radius_factor=2.0), 1e-8 * peak),
    ]
    h = 1e-5
    grad = theta_derivs(Z, Om, 1, tol)
    for i in range(g):
        e = np.eye(g)[i]
        fd = (theta(Z + h * e, Om, tol) - theta(Z - h * e, Om, tol)) / (2 * h)
        out.append(check(f"dtheta/dz{i} vs FD (relative)", grad[i], fd, 1e-5,
                         abs(grad[i] - fd) / max(abs(fd), abs(theta(Z, Om, tol)))))
    d2 = theta_derivs(Z, Om, 2, tol)
    out.append(check("second-derivative tensor symmetric", d2, d2.T, 1e-12 * peak * max(1.0, np.abs(d2).max())))
    return out
