"""Instanton partition sum, the bold tau-function and genus-g Ward identities.

Conventions:

* lambda = -Omega l + m for (l, m) in Z^{2g}, and the Hermitian pairing
  <U, V> = sum_ij Y^{ij} u_i conj(v_j) with Y = (Im Omega)^{-1}.
* The instanton sum is
  sum exp(-(pi/2) <lambda, lambda> - pi (<Z, lambda> - <lambda, Z>) - pi i (l.m)).
* Poisson summation turns it into
  2^{g/2} det(Y)^{-1/2} exp(-2 pi Im Z.Y.Im Z) |theta(Z)|^2
  = 2^{g/2} det(Y)^{-1/2} |theta[xi](0)|^2,  Z = Omega xi_a + xi_b.
  The exponential factor is the bilinear form (pi/2)(Z - Zbar).Y.(Z - Zbar);
  read with the Hermitian pairing instead it has the opposite sign and the two
  closed forms no longer agree (see `closed_form_readings`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInput, LatticePoint, OnThetaDivisor, VerificationError, WindowTooSmall
from .report import Check, check
from .theta import (
    DEFAULT_TOL,
    Characteristics,
    PeriodMatrix,
    as_period_matrix,
    theta,
    theta_char,
    theta_derivs,
)

DIVISOR_TOL = 1e-12
HALF = Characteristics([0.5], [0.5])


@dataclass(frozen=True, eq=False)
class InstantonInput:
    Omega: PeriodMatrix
    xi: Characteristics

    def __post_init__(self):
        object.__setattr__(self, "Omega", as_period_matrix(self.Omega))
        if self.xi.xi_a.size != self.Omega.g:
            raise InvalidInput("characteristics length must equal the genus")

    @property
    def g(self) -> int:
        return self.Omega.g

    @property
    def Y(self) -> np.ndarray:
        return self.Omega.Y

    @cached_property
    def Z(self) -> np.ndarray:
        return self.Omega.Omega @ self.xi.xi_a + self.xi.xi_b

    @classmethod
    def from_Z(cls, Omega, Z) -> "InstantonInput":
        """Recover the real characteristics with Omega xi_a + xi_b = Z."""
        Om = as_period_matrix(Omega)
        Z = np.atleast_1d(np.asarray(Z, dtype=complex))
        a = Om.Y @ Z.imag
        b = Z.real - Om.Omega.real @ a
        return cls(Om, Characteristics(a, b))

    def negated(self) -> "InstantonInput":
        return InstantonInput(self.Omega, Characteristics(-self.xi.xi_a, -self.xi.xi_b))


def hermitian_pairing(Y: np.ndarray, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """<U, V> = U^T Y conj(V), broadcasting over leading axes of U and V."""
    return np.einsum("...i,ij,...j->...", U, Y, np.conj(V))


def real_form(inp: InstantonInput) -> np.ndarray:
    """Real symmetric Q_r with (Q_r n, n) = <lambda, lambda> for n = (l, m)."""
    Om, Y = inp.Omega.Omega, inp.Y
    top = np.hstack([(Om @ Y @ Om.conj()).real, -(Om @ Y).real])
    bot = np.hstack([-(Y @ Om).real, Y])
    Q = np.vstack([top, bot])
    return 0.5 * (Q + Q.T)


def required_window(inp: InstantonInput, tol: float = DEFAULT_TOL) -> int:
    """Smallest box radius containing the ellipsoid outside which the Gaussian tail is <= tol."""
    S = 0.5 * real_form(inp)  # terms are exp(-pi n.S n)
    mu = float(np.linalg.eigvalsh(S).min())
    log_c = 2 * inp.g * np.log1p(np.sqrt(2 / mu))
    R = np.sqrt(max(2 / np.pi * (log_c - np.log(tol)), 1.0))
    return int(np.ceil(R * np.sqrt(np.diag(np.linalg.inv(S)).max())))


def _box(g2: int, window: int):
    axis = np.arange(-window, window + 1)
    rest = np.stack(np.meshgrid(*([axis] * (g2 - 1)), indexing="ij"), axis=-1).reshape(-1, g2 - 1)
    for first in axis:
        yield np.column_stack([np.full(rest.shape[0], first), rest])


def _window(inp: InstantonInput, window: int | None, tol: float) -> int:
    need = required_window(inp, tol)
    if window is None:
        return need
    if window < need:
        raise WindowTooSmall(f"window {window} < {need} required for tail <= {tol:.1e}")
    return int(window)


def primitive_terms(inp: InstantonInput, n: np.ndarray) -> np.ndarray:
    """Instanton-sum terms for rows n = (l, m)."""
    g = inp.g
    l, m = n[:, :g], n[:, g:]
    lam = -l @ inp.Omega.Omega.T + m
    Z = inp.Z[None, :]
    Y = inp.Y
    action = 0.5 * np.pi * hermitian_pairing(Y, lam, lam).real
    top = np.pi * (hermitian_pairing(Y, Z, lam) - hermitian_pairing(Y, lam, Z))
    parity = np.pi * 1j * np.sum(l * m, axis=1)
    return np.exp(-action - top - parity)


def zinst_primitive(inp: InstantonInput, window: int | None = None, tol: float = DEFAULT_TOL) -> complex:
    """Direct lattice sum over harmonic forms with integer periods."""
    w = _window(inp, window, tol)
    return complex(sum(np.sum(primitive_terms(inp, n)) for n in _box(2 * inp.g, w)))


def qa_matrices(inp: InstantonInput, literal: bool = False):
    """(Q, A) of the quadratic-form series.

    literal=True gives the matrix with upper-right block -conj(Omega) Y, whose
    form (Q n, n) is the real <lambda, lambda> and leaves out the parity phase.
    The default symmetric Q has upper-right block -Omega Y; its form differs by
    -2 i (l.m), which supplies exp(pi i l.m) = exp(-pi i l.m).
    """
    Om, Y, Z = inp.Omega.Omega, inp.Y, inp.Z
    Ob = Om.conj()
    upper = -Ob @ Y if literal else -Om @ Y
    Q = np.block([[Ob @ Y @ Om, upper], [-Y @ Om, Y.astype(complex)]])
    A = np.concatenate([Om @ Y @ Z.conj() - Ob @ Y @ Z, Y @ (Z - Z.conj())])
    return Q, A


def qa_terms(inp: InstantonInput, n: np.ndarray, literal: bool = False) -> np.ndarray:
    Q, A = qa_matrices(inp, literal)
    nn = n.astype(float)
    return np.exp(-0.5 * np.pi * np.einsum("ki,ij,kj->k", nn, Q, nn) - np.pi * nn @ A)


def zinst_qa(inp: InstantonInput, window: int | None = None, tol: float = DEFAULT_TOL) -> complex:
    """sum exp(-(pi/2)(Q n, n) - pi (A, n)) with the symmetric Q."""
    w = _window(inp, window, tol)
    return complex(sum(np.sum(qa_terms(inp, n)) for n in _box(2 * inp.g, w)))


def displayed_q_inverse(Omega) -> np.ndarray:
    """(i/2) [[Omega^-1, I], [I, conj(Omega)]]."""
    Om = as_period_matrix(Omega).Omega
    g = Om.shape[0]
    I = np.eye(g)
    return 0.5j * np.block([[np.linalg.inv(Om), I], [I, Om.conj()]])


def _prefactor(inp: InstantonInput) -> float:
    return 2 ** (inp.g / 2) / np.sqrt(np.linalg.det(inp.Y))


def closed_form_readings(inp: InstantonInput, tol: float = DEFAULT_TOL) -> dict:
    """Both readings of the theta(Z) closed form and the theta[xi] form."""
    y = inp.Z.imag
    q = y @ inp.Y @ y
    th2 = abs(theta(inp.Z, inp.Omega, tol)) ** 2
    p = _prefactor(inp)
    return {
        "bilinear": p * np.exp(-2 * np.pi * q) * th2,
        "hermitian": p * np.exp(2 * np.pi * q) * th2,
        "theta_char": p * abs(theta_char(inp.xi, np.zeros(inp.g), inp.Omega, tol)) ** 2,
    }


def zinst_closed(inp: InstantonInput, tol: float = DEFAULT_TOL) -> complex:
    """Closed form 2^{g/2} det(Y)^{-1/2} |theta[xi](0)|^2, checked against the theta(Z) form.

    Raises:
        VerificationError: the two closed forms disagree beyond 10*tol.
    """
    r = closed_form_readings(inp, tol)
    p = _prefactor(inp)
    if abs(r["bilinear"] - r["theta_char"]) > max(10 * tol, 1e-12) * max(p, r["theta_char"]):
        raise VerificationError(
            f"closed forms disagree: {r['bilinear']!r} vs {r['theta_char']!r}"
        )
    return complex(r["theta_char"])


def log_bold_tau_Z(Z, Omega, tol: float = DEFAULT_TOL) -> float:
    """log of the bold tau-function as a function of Z (theta(Z) form)."""
    Om = as_period_matrix(Omega)
    Z = np.atleast_1d(np.asarray(Z, dtype=complex))
    y = Z.imag
    th = theta(Z, Om, tol)
    return float(
        0.5 * Om.g * np.log(2) - 0.5 * np.log(np.linalg.det(Om.Y)) - 2 * np.pi * (y @ Om.Y @ y)
        + np.log(abs(th) ** 2)
    )


def bold_tau(inp: InstantonInput, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(bold tau, log bold tau) = 2^{g/2} det(Y)^{-1/2} |theta[xi](0)|^2.

    Raises:
        OnThetaDivisor: |theta[xi](0)| < 1e-12.
    """
    tc = theta_char(inp.xi, np.zeros(inp.g), inp.Omega, tol)
    if abs(tc) < DIVISOR_TOL:
        raise OnThetaDivisor(f"|theta[xi](0)| = {abs(tc):.2e}: the line bundle is on the theta divisor")
    val = _prefactor(inp) * abs(tc) ** 2
    if not val > 0:
        raise VerificationError("bold tau must be positive")
    log = 0.5 * inp.g * np.log(2) - 0.5 * np.log(np.linalg.det(inp.Y)) + 2 * np.log(abs(tc))
    return float(val), float(log)


def _wirtinger_grad(f, Z: np.ndarray, i: int, h: float) -> complex:
    e = np.zeros(Z.size)
    e[i] = 1
    fx = (f(Z + h * e) - f(Z - h * e)) / (2 * h)
    fy = (f(Z + 1j * h * e) - f(Z - 1j * h * e)) / (2 * h)
    return 0.5 * (fx - 1j * fy)


_D1 = np.array([1, -8, 0, 8, -1]) / 12.0
_D2 = np.array([-1, 16, -30, 16, -1]) / 12.0
_OFF = np.arange(-2, 3)


def _real_second(f, Z: np.ndarray, u: np.ndarray, v: np.ndarray, h: float) -> float:
    """d2 f / du dv for real directions u, v in C^g (as R^{2g}), fourth order."""
    if np.array_equal(u, v):
        return float(sum(c * f(Z + a * h * u) for a, c in zip(_OFF, _D2)) / h**2)
    return float(
        sum(ca * cb * f(Z + a * h * u + b * h * v) for a, ca in zip(_OFF, _D1) for b, cb in zip(_OFF, _D1) if ca and cb)
        / h**2
    )


def wirtinger_second(f, Z: np.ndarray, i: int, j: int, h: float) -> tuple[complex, complex]:
    """(d2f/dz_i dz_j, d2f/dz_i dzbar_j) by central differences."""
    g = Z.size
    ex, ey = np.eye(g)[i], 1j * np.eye(g)[i]
    fx, fy = np.eye(g)[j], 1j * np.eye(g)[j]
    xx = _real_second(f, Z, ex, fx, h)
    yy = _real_second(f, Z, ey, fy, h)
    xy = _real_second(f, Z, ex, fy, h)
    yx = _real_second(f, Z, ey, fx, h)
    holo = 0.25 * (xx - yy - 1j * (xy + yx))
    mixed = 0.25 * (xx + yy + 1j * (xy - yx))
    return complex(holo), complex(mixed)


def ward_genus_first(inp: InstantonInput, i: int, fd_step: float = 1e-5, tol: float = DEFAULT_TOL):
    """Three routes to d log(bold tau)/dz_i.

    Returns (FD Wirtinger derivative, pi (Y(Z - Zbar))_i + dlog theta(Z)/dz_i,
    dlog theta[xi](U)/du_i at U = 0).
    """
    bold_tau(inp, tol)
    Om, Z = inp.Omega, inp.Z
    fd = _wirtinger_grad(lambda W: log_bold_tau_Z(W, Om, tol), Z, i, fd_step)
    grad = theta_derivs(Z, Om, 1, tol)
    middle = np.pi * (inp.Y @ (Z - Z.conj()))[i] + grad[i] / theta(Z, Om, tol)
    U0 = np.zeros(inp.g)
    char = theta_derivs(U0, Om, 1, tol, xi=inp.xi)[i] / theta_char(inp.xi, U0, Om, tol)
    return complex(fd), complex(middle), complex(char)


def ward_genus_second(
    inp: InstantonInput,
    i: int,
    j: int,
    fd_step: float = 1e-3,
    n_random: int = 5,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Second-order genus Ward identities.

    Holomorphic block: FD d2 log(bold tau)/dz_i dz_j against
    pi Y^{ij} + d2 log theta/dz_i dz_j. Mixed block: FD d2/dz_i dzbar_j at
    the input Z and at n_random random points; its spread, magnitude and sign
    are reported (the expected value is -pi Y^{ij}).
    """
    bold_tau(inp, tol)
    Om, Z = inp.Omega, inp.Z
    f = lambda W: log_bold_tau_Z(W, Om, tol)  # noqa: E731
    holo_fd, mixed_fd = wirtinger_second(f, Z, i, j, fd_step)
    th = theta(Z, Om, tol)
    d1 = theta_derivs(Z, Om, 1, tol)
    d2 = theta_derivs(Z, Om, 2, tol)
    holo_an = np.pi * inp.Y[i, j] + d2[i, j] / th - d1[i] * d1[j] / th**2

    rng = np.random.default_rng(seed)
    mixed = [mixed_fd]
    for _ in range(n_random):
        W = rng.uniform(-0.5, 0.5, inp.g) + 1j * (Om.Omega.imag @ rng.uniform(-0.5, 0.5, inp.g))
        # stay away from the theta divisor, where FD of log|theta|^2 degrades
        y = W.imag
        if abs(theta(W, Om, tol)) * np.exp(-np.pi * y @ inp.Y @ y) < 0.1:
            continue
        mixed.append(wirtinger_second(f, W, i, j, fd_step)[1])
    mixed = np.array(mixed)
    target = np.pi * inp.Y[i, j]
    # sign of the measured mixed derivative relative to +pi Y^{ij}
    sign = float(np.sign(np.mean(mixed).real / target)) if abs(target) > 0 else 0.0
    return {
        "holo_fd": holo_fd,
        "holo_analytic": complex(holo_an),
        "holo_residual": float(abs(holo_fd - holo_an)),
        "mixed_values": mixed,
        "mixed_variance": float(np.var(mixed)),
        "mixed_magnitude_residual": float(np.max(np.abs(np.abs(mixed) - abs(target)))),
        "mixed_sign": sign,
        "pi_Y": float(target),
    }


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]
        yield [[first]] + part


def _factorial(k: int) -> int:
    out = 1
    for v in range(2, k + 1):
        out *= v
    return out


@dataclass(frozen=True)
class CorrTensor:
    """d^{m+n} log|theta(U)|^2 / du^m dubar^n at U = 0; holomorphic indices first."""

    m: int
    n: int
    tensor: np.ndarray

    def symmetry_residual(self) -> float:
        t = self.tensor
        k = self.m + self.n
        worst = 0.0
        for perm in itertools.permutations(range(k)):
            if sorted(perm[: self.m]) == list(range(self.m)):
                worst = max(worst, float(np.abs(t - np.transpose(t, perm)).max()))
        return worst


def corr_tensor(Omega, m: int, n: int, tol: float = DEFAULT_TOL, mixed_tol: float = 1e-8) -> CorrTensor:
    """Cumulant expansion of log F, F = theta(U) conj(theta(U)), at U = 0.

    A derivative block with holomorphic indices H and antiholomorphic
    indices A acts on F as theta^{(H)}(0) conj(theta^{(A)}(0)); the
    log-derivative is the sum over set partitions of the index list with
    weights (-1)^{k-1}(k-1)! / F^k. Entries with m n > 0 must vanish.

    Raises:
        OnThetaDivisor: theta(0) = 0.
        VerificationError: a mixed entry exceeds mixed_tol.
    """
    Om = as_period_matrix(Omega)
    if m < 0 or n < 0 or m > 3 or n > 3 or m + n > 4 or m + n == 0:
        raise InvalidInput("corr_tensor needs counts m, n <= 3 with 1 <= m + n <= 4")
    g = Om.g
    U0 = np.zeros(g)
    th0 = theta(U0, Om, tol)
    if abs(th0) < DIVISOR_TOL:
        raise OnThetaDivisor("theta(0 | Omega) vanishes")
    dcache = {(): th0}

    def dtheta(idx: tuple) -> complex:
        key = tuple(sorted(idx))
        if key not in dcache:
            alpha = [0] * g
            for k in key:
                alpha[k] += 1
            dcache[key] = theta_derivs(U0, Om, tuple(alpha), tol)
        return dcache[key]

    F = th0 * np.conj(th0)
    k = m + n
    parts = list(_set_partitions(list(range(k))))
    T = np.empty((g,) * k, dtype=complex)
    for idx in itertools.product(range(g), repeat=k):
        total = 0j
        for part in parts:
            prod = 1.0 + 0j
            for block in part:
                H = tuple(idx[p] for p in block if p < m)
                A = tuple(idx[p] for p in block if p >= m)
                prod *= dtheta(H) * np.conj(dtheta(A))
            r = len(part)
            total += (-1) ** (r - 1) * _factorial(r - 1) * prod / F**r
        T[idx] = total
    if m * n > 0 and np.abs(T).max() > mixed_tol:
        raise VerificationError(f"mixed correlation entry {np.abs(T).max():.3e} does not vanish")
    return CorrTensor(m, n, T)


def _check_tau(tau: complex) -> complex:
    tau = complex(tau)
    if not tau.imag > 0:
        raise InvalidInput("torus modulus needs Im tau > 0")
    return tau


def _theta1(u: complex, tau: complex) -> complex:
    return theta_char(HALF, [u], [[tau]])


def _lattice_distance(z: complex, tau: complex) -> float:
    b = round(z.imag / tau.imag)
    w = z - b * tau
    a = round(w.real)
    return abs(w - a)


def torus_constant(tau: complex, P: int = 256) -> float:
    """c(tau) making the torus Green's function integrate to zero.

    The x-average L(y) of log|theta1(x + iy)|^2 is linear in y on (0, Im tau),
    so the fundamental-domain mean equals its value at y = Im tau/2.
    """
    tau = _check_tau(tau)
    T = tau.imag
    xs = np.arange(P) / P
    L = np.mean([np.log(abs(_theta1(x + 0.5j * T, tau)) ** 2) for x in xs])
    return float(L / np.pi - 2 * T / 3)


def torus_green(z: complex, tau: complex, c: float | None = None) -> float:
    """G(z) = -(1/pi) log|theta[1/2,1/2](z|tau)|^2 + (2/Im tau)(Im z)^2 + c(tau).

    Raises:
        LatticePoint: z is (numerically) a lattice point.
    """
    tau = _check_tau(tau)
    z = complex(z)
    if _lattice_distance(z, tau) < 1e-12:
        raise LatticePoint(f"z={z} is a lattice point of Z + tau Z")
    if c is None:
        c = torus_constant(tau)
    return float(-np.log(abs(_theta1(z, tau)) ** 2) / np.pi + 2 / tau.imag * z.imag**2 + c)


def torus_laplacian(z: complex, tau: complex, h: float = 1e-3) -> float:
    """-d2G/dz dzbar = -(1/4) Laplacian by the 5-point stencil."""
    c = torus_constant(tau)
    G = lambda w: torus_green(w, tau, c)  # noqa: E731
    lap = (G(z + h) + G(z - h) + G(z + 1j * h) + G(z - 1j * h) - 4 * G(z)) / h**2
    return -0.25 * lap


def torus_B(u: complex, tau: complex) -> complex:
    """B(u) = -(d2/du2) log theta[1/2,1/2](u|tau)."""
    th = _theta1(u, tau)
    d1 = theta_derivs([u], [[tau]], 1, xi=HALF)[0]
    d2 = theta_derivs([u], [[tau]], 2, xi=HALF)[0, 0]
    return complex(-(d2 / th - (d1 / th) ** 2))


def _green_ddu2(u: complex, tau: complex, h: float) -> complex:
    """(1/4)(G_xx - G_yy - 2i G_xy) with fourth-order stencils."""
    c = torus_constant(tau)
    off = np.arange(-2, 3)
    G = np.array([[torus_green(u + a * h + 1j * b * h, tau, c) for b in off] for a in off])
    Gxx = _D2 @ G[:, 2] / h**2
    Gyy = _D2 @ G[2, :] / h**2
    Gxy = _D1 @ G @ _D1 / h**2
    return complex(0.25 * (Gxx - Gyy - 2j * Gxy))


def fay_torus_check(tau: complex, z: complex, w: complex, h: float = 5e-3) -> dict:
    """Genus-1 Fay identity B = S + pi/Im tau with S = -pi d_z d_w G(z - w).

    Returns the residual, the a-period of B along Im u = Im tau/2 and the
    pieces of the identity.
    """
    tau = _check_tau(tau)
    u = complex(z) - complex(w)
    if _lattice_distance(u, tau) < 1e-12:
        raise LatticePoint("z and w coincide modulo the lattice")
    B = torus_B(u, tau)
    S = np.pi * _green_ddu2(u, tau, h)
    rhs = S + np.pi / tau.imag
    P = 128
    s = np.arange(P) / P
    a_period = np.mean([torus_B(x + 0.5j * tau.imag, tau) for x in s])
    return {"B": B, "S": complex(S), "residual": float(abs(B - rhs)), "a_period": float(abs(a_period))}


def instanton_checks(inp: InstantonInput, rel_tol: float = 1e-6, tol: float = DEFAULT_TOL) -> list[Check]:
    """Triple agreement, positivity and Z -> -Z symmetry for one input."""
    p = zinst_primitive(inp, tol=tol)
    q = zinst_qa(inp, tol=tol)
    c = zinst_closed(inp, tol)
    val, _ = bold_tau(inp, tol)
    neg, _ = bold_tau(inp.negated(), tol)
    scale = abs(c)
    return [
        check("Z_inst primitive = closed (relative)", p, c, rel_tol, abs(p - c) / scale),
        check("Z_inst quadratic form = closed (relative)", q, c, rel_tol, abs(q - c) / scale),
        Check("bold tau positive", val, 0.0, 0.0 if val > 0 else 1.0, 0.0),
        check("bold tau Z -> -Z", val, neg, 1e-10, abs(val - neg) / max(val, 1e-300)),
    ]


def genus_ward_checks(inp: InstantonInput, fd_step: float = 1e-5, tol: float = DEFAULT_TOL) -> list[Check]:
    """First/second order genus Ward identities and vanishing of mixed correlations."""
    out = []
    for i in range(inp.g):
        fd, mid, ch = ward_genus_first(inp, i, fd_step, tol)
        out.append(check(f"genus Ward first order i={i} (three routes)", [fd, mid], [mid, ch], 1e-5,
                         max(abs(fd - mid), abs(mid - ch), abs(fd - ch))))
    for i in range(inp.g):
        for j in range(i, inp.g):
            r = ward_genus_second(inp, i, j, tol=tol)
            out.append(check(f"genus Ward holomorphic ({i},{j})", r["holo_fd"], r["holo_analytic"], 1e-5))
            out.append(Check(f"mixed block constant ({i},{j})", r["mixed_values"], None, r["mixed_variance"], 1e-6))
            out.append(Check(f"|mixed| = pi Y ({i},{j}), sign {r['mixed_sign']:+.0f}", np.abs(r["mixed_values"]),
                             abs(r["pi_Y"]), r["mixed_magnitude_residual"], 1e-6))
    for m, n in ((1, 1), (2, 1), (1, 2), (2, 2), (3, 1)):
        T = corr_tensor(inp.Omega, m, n, tol, mixed_tol=np.inf).tensor
        out.append(check(f"correlation tensor ({m},{n}) vanishes", np.abs(T).max(), 0.0, 1e-8))
    return out


def torus_checks(tau: complex = 2j, z: complex = 0.5 + 0.6j, w: complex = 0.2 + 0.2j) -> list[Check]:
    tau = _check_tau(tau)
    fay = fay_torus_check(tau, z, w)
    shifted = fay_torus_check(tau, z + 0.37 + 0.11j, w + 0.37 + 0.11j)
    c = torus_constant(tau)
    u = complex(z) - complex(w)
    return [
        check("torus Green Laplacian = -1/Im tau", torus_laplacian(u, tau), -1 / tau.imag, 1e-4),
        check("torus Green periodic (z+1, z+tau)",
              [torus_green(u + 1, tau, c), torus_green(u + tau, tau, c)], [torus_green(u, tau, c)] * 2, 1e-8),
        check("Fay genus 1: B = S + pi/Im tau", fay["B"], fay["S"] + np.pi / tau.imag, 1e-5),
        check("B a-period", fay["a_period"], 0.0, 1e-8),
        check("Fay residual translation invariant", fay["residual"], shifted["residual"], 1e-10),
    ]
