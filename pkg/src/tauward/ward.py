"""Ward identities for log tau in harmonic-moment coordinates.

Derivatives in t0, t_n are taken by central differences in the real chart
x = (t0, Re t1, Im t1, ..., Re tK, Im tK): each perturbed moment vector is
mapped back to a contour by `map_from_moments` and log tau is recomputed.
With d/dt = (d/dx - i d/dy)/2 and d/dtbar = (d/dx + i d/dy)/2 the complex
first and second derivatives follow from the real ones.

The closed forms they are compared against are double contour integrals of
the Schiffer and Bergman kernels written in the parameter s of z = g(e^{is}),
where G(z(s)) = e^{is}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .contour import (
    ExteriorMap,
    G_prime,
    check_univalent,
    eval_G,
    sample,
    sample_circle,
)
from .energy import log_tau_boundary
from .errors import InvalidInput, TailTooLarge, UnivalenceLost
from .moments import MomentSet, exterior_moments, interior_moments, map_from_moments, moment_jacobian
from .report import Check, check

FD_STEP = 1e-4
RICHARDSON_GATE = 1e-3
PIPELINE_M = 512
QUAD_M = 1024


class MomentChart:
    """log tau as a function of the real moment vector near a base contour.

    The base map is padded to K - 1 coefficients so that t1 ... tK are free
    coordinates and all higher moments stay zero under perturbation.
    """

    def __init__(self, gmap: ExteriorMap, K: int, M: int = PIPELINE_M, M_moments: int = 256):
        K = max(K, gmap.N + 1)
        self.K = K
        self.base = gmap.padded(K - 1)
        self.M = M
        self.M_moments = M_moments
        self.x0 = exterior_moments(self.base, K, M_moments).as_real()
        self._J = moment_jacobian(self.base, M_moments)
        self._cache: dict = {}

    @property
    def dim(self) -> int:
        return self.x0.size

    def map_at(self, x: np.ndarray) -> ExteriorMap:
        if np.array_equal(x, self.x0):
            return self.base
        return map_from_moments(
            MomentSet.from_real(x), self.base, tol=1e-14, M=self.M_moments, jacobian=self._J
        )

    def log_tau(self, offsets: tuple) -> float:
        """log tau at x0 + sum of (index, multiple_of_h, h) offsets."""
        key = tuple(sorted(offsets))
        if key not in self._cache:
            x = self.x0.copy()
            for i, k, h in key:
                x[i] += k * h
            self._cache[key] = log_tau_boundary(self.map_at(x), self.M).log_tau
        return self._cache[key]

    def d1(self, i: int, h: float) -> float:
        return (self.log_tau(((i, 1, h),)) - self.log_tau(((i, -1, h),))) / (2 * h)

    def d2(self, i: int, j: int, h: float) -> float:
        f = self.log_tau
        if i == j:
            return (f(((i, 1, h),)) - 2 * f(()) + f(((i, -1, h),))) / (h * h)
        return (
            f(((i, 1, h), (j, 1, h)))
            - f(((i, 1, h), (j, -1, h)))
            - f(((i, -1, h), (j, 1, h)))
            + f(((i, -1, h), (j, -1, h)))
        ) / (4 * h * h)

    def grad_complex(self, n: int, h: float) -> complex:
        """d log tau / d t_n (n >= 1) or d/dt0 (n = 0)."""
        if n == 0:
            return complex(self.d1(0, h))
        return 0.5 * (self.d1(2 * n - 1, h) - 1j * self.d1(2 * n, h))

    def real_hessian(self, h: float) -> np.ndarray:
        D = self.dim
        H = np.empty((D, D))
        for i in range(D):
            for j in range(i, D):
                H[i, j] = H[j, i] = self.d2(i, j, h)
        return H


def _close(a, b, gate: float = RICHARDSON_GATE, floor: float = 1e-6) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return bool(np.all(np.abs(a - b) <= gate * np.maximum(np.abs(a), np.abs(b)) + floor))


@dataclass(frozen=True)
class HessianBlock:
    """Second derivatives of log tau in moment coordinates (indices 1..N).

    holo[m-1, n-1] = d2/dt_m dt_n, mixed[m-1, n-1] = d2/dt_m dtbar_n,
    t0_row[n-1] = d2/dt0 dt_n, t0t0 = d2/dt0^2.
    """

    N: int
    holo: np.ndarray
    mixed: np.ndarray
    t0_row: np.ndarray
    t0t0: float
    fd_step: float
    richardson_ok: bool = True
    real: np.ndarray = field(default=None, repr=False)

    def symmetry_residual(self) -> float:
        return float(np.abs(self.holo - self.holo.T).max())

    def hermitian_residual(self) -> float:
        return float(np.abs(self.mixed - self.mixed.conj().T).max())


def complex_blocks(H: np.ndarray, N: int):
    """Split a real Hessian in (t0, x1, y1, ...) into the complex blocks."""
    xs = [2 * n - 1 for n in range(1, N + 1)]
    ys = [2 * n for n in range(1, N + 1)]
    Hxx = H[np.ix_(xs, xs)]
    Hyy = H[np.ix_(ys, ys)]
    Hxy = H[np.ix_(xs, ys)]
    Hyx = H[np.ix_(ys, xs)]
    holo = 0.25 * (Hxx - Hyy - 1j * (Hxy + Hyx))
    mixed = 0.25 * (Hxx + Hyy + 1j * (Hxy - Hyx))
    t0_row = 0.5 * (H[0, xs] - 1j * H[0, ys])
    return holo, mixed, t0_row, float(H[0, 0])


@lru_cache(maxsize=32)
def hessian_block(gmap: ExteriorMap, N: int, fd_step: float = FD_STEP, M: int = PIPELINE_M) -> HessianBlock:
    """FD Hessian of log tau in t0, t1..tN, with a Richardson check at 2*fd_step."""
    chart = MomentChart(gmap, N, M)
    H = chart.real_hessian(fd_step)
    H2 = chart.real_hessian(2 * fd_step)
    Dn = 2 * N + 1
    H, H2 = H[:Dn, :Dn], H2[:Dn, :Dn]
    holo, mixed, t0_row, t0t0 = complex_blocks(H, N)
    return HessianBlock(N, holo, mixed, t0_row, t0t0, fd_step, _close(H, H2), H)


@lru_cache(maxsize=32)
def t0_derivatives(gmap: ExteriorMap, K: int, fd_step: float = FD_STEP, M: int = PIPELINE_M):
    """(d2/dt0^2, [d2/dt0 dt_n for n = 1..K]) without the full Hessian."""
    chart = MomentChart(gmap, K, M)
    row = np.array(
        [0.5 * (chart.d2(0, 2 * n - 1, fd_step) - 1j * chart.d2(0, 2 * n, fd_step)) for n in range(1, K + 1)]
    )
    return chart.d2(0, 0, fd_step), row


def ward_first_order(gmap: ExteriorMap, N: int, fd_step: float = FD_STEP, M: int = PIPELINE_M, tol: float = 1e-4):
    """d log tau / d t_n against v_n for n = 0..N.

    Returns (max mismatch, list of Check).
    """
    chart = MomentChart(gmap, N, M)
    vm = interior_moments(gmap, N, max(M, 1024))
    v = (vm.v0,) + vm.v
    checks = []
    for n in range(N + 1):
        fd = chart.grad_complex(n, fd_step)
        fd2 = chart.grad_complex(n, 2 * fd_step)
        c = check(f"dlogtau/dt{n} = v{n}", fd, v[n], tol)
        checks.append(c)
        if not _close(fd, fd2):
            checks.append(check(f"richardson dlogtau/dt{n}", fd, fd2, RICHARDSON_GATE * max(abs(fd), 1e-3)))
    return max(c.residual for c in checks if c.name.startswith("dlogtau")), checks


def ward_chain_rule(
    family: Callable[[float], ExteriorMap],
    s0: float,
    fd_step: float = FD_STEP,
    M: int = QUAD_M,
) -> float:
    """|d log tau(g_s)/ds - v0 dt0/ds - sum_n 2 Re(v_n dt_n/ds)| at s0."""
    g0 = family(s0)
    gp, gm = family(s0 + fd_step), family(s0 - fd_step)
    K = max(g0.N, gp.N, gm.N) + 1
    lhs = (log_tau_boundary(gp, M).log_tau - log_tau_boundary(gm, M).log_tau) / (2 * fd_step)
    tp = exterior_moments(gp, K, M)
    tm = exterior_moments(gm, K, M)
    dt0 = (tp.t0 - tm.t0) / (2 * fd_step)
    dt = (np.asarray(tp.t) - np.asarray(tm.t)) / (2 * fd_step)
    vm = interior_moments(g0, K, M)
    rhs = vm.v0 * dt0 + np.sum(2 * (np.asarray(vm.v) * dt).real)
    return float(abs(lhs - rhs))


def reconstruct_logG(
    gmap: ExteriorMap,
    K: int,
    z: complex,
    fd_step: float = FD_STEP,
    tail_tol: float = 1e-4,
    M: int = PIPELINE_M,
) -> complex:
    """log z - (1/2) d2/dt0^2 - sum_{n<=K} z^-n/n d2/dt0 dt_n from FD derivatives.

    Raises:
        TailTooLarge: one of the last two series terms exceeds tail_tol.
    """
    h00, row = t0_derivatives(gmap, K, fd_step, M)
    n = np.arange(1, K + 1)
    terms = z ** (-n.astype(float)) / n * row
    tail = np.abs(terms[-2:]).max()
    if tail > tail_tol:
        raise TailTooLarge(f"last term of the series is {tail:.2e} > {tail_tol:.1e}; increase |z| or K")
    return complex(np.log(z) - 0.5 * h00 - np.sum(terms))


def branch_residual(a: complex, b: complex) -> float:
    """|a - b| modulo 2 pi i."""
    d = a - b
    return float(abs(d - 2j * np.pi * np.round(d.imag / (2 * np.pi))))


def reconstruct_check(gmap: ExteriorMap, K: int, z: complex, tol: float = 1e-4, **kw) -> Check:
    rhs = reconstruct_logG(gmap, K, z, **kw)
    lhs = complex(np.log(eval_G(gmap, z)))
    return check(f"log G({z}) explicit formula, K={K}", lhs, rhs, tol, branch_residual(lhs, rhs))


def equilibrium_moments(gmap: ExteriorMap, N: int, rho_out: float | None = None, P: int = 512) -> np.ndarray:
    """M_0..M_N with G'/G = sum M_n z^{-n-1}, by the trapezoid rule on |z| = rho_out."""
    if rho_out is None:
        rho_out = 2.0 * np.abs(sample(gmap, 1024).z).max()
    z = rho_out * np.exp(2j * np.pi * np.arange(P) / P)
    Gz = eval_G(gmap, z)
    f = G_prime(gmap, Gz) / Gz
    return np.array([np.mean(f * z ** (n + 1)) for n in range(N + 1)])


def equilibrium_check(gmap: ExteriorMap, N: int, fd_step: float = FD_STEP, tol: float = 1e-4) -> list[Check]:
    Mn = equilibrium_moments(gmap, N)
    _, row = t0_derivatives(gmap, N, fd_step)
    out = [check("M_0 = 1", Mn[0], 1.0, 1e-10)]
    out += [check(f"M_{n} = d2logtau/dt0 dt{n}", Mn[n], row[n - 1], tol) for n in range(1, N + 1)]
    return out


@lru_cache(maxsize=32)
def schiffer_matrix(gmap: ExteriorMap, N: int, M: int = QUAD_M) -> np.ndarray:
    """Q[m-1, n-1] = (1/(2 pi i)^2) oint oint (S(z, w) - 1/(z - w)^2) z^m w^n dz dw.

    In the parameter s the Schiffer term is 1/(4 sin^2((s - t)/2)); the second
    grid is offset by half a step so no node lies on the removable diagonal.
    """
    h = 2 * np.pi / M
    z, dz = sample_circle(gmap, M, 1.0, 0.0)
    w, dw = sample_circle(gmap, M, 1.0, h / 2)
    s = np.arange(M) * h
    t = s + h / 2
    ker = 1.0 / (4 * np.sin((s[:, None] - t[None, :]) / 2) ** 2) - dz[:, None] * dw[None, :] / (
        z[:, None] - w[None, :]
    ) ** 2
    n = np.arange(1, N + 1)
    A = z[:, None] ** n[None, :]
    B = w[:, None] ** n[None, :]
    return -(h * h) / (4 * np.pi**2) * (A.T @ ker @ B)


@lru_cache(maxsize=64)
def bergman_matrix(gmap: ExteriorMap, N: int, rho: float = 1.5, M: int = QUAD_M) -> np.ndarray:
    """P[m-1, n-1] = -(1/(2 pi i)^2) oint oint G'(z) conj G'(w) / (1 - G(z) conj G(w))^2 z^m conj(w)^n dz dwbar.

    C+ is the image of |w| = rho, where G = rho e^{is}; the form part reduces
    to rho^2 e^{i(s-t)} / (1 - rho^2 e^{i(s-t)})^2 ds dt.

    Raises:
        UnivalenceLost: g is not univalent on |w| >= rho.
    """
    if not rho > 1:
        raise InvalidInput("C+ requires rho > 1")
    rep = check_univalent(gmap, 512, rho)
    if not rep:
        raise UnivalenceLost(f"map not univalent at rho={rho}: {rep.failure}")
    h = 2 * np.pi / M
    z, _ = sample_circle(gmap, M, rho)
    s = np.arange(M) * h
    e = rho**2 * np.exp(1j * (s[:, None] - s[None, :]))
    ker = e / (1 - e) ** 2
    n = np.arange(1, N + 1)
    A = z[:, None] ** n[None, :]
    return (h * h) / (4 * np.pi**2) * (A.T @ ker @ A.conj())


def hessian_vs_schiffer(gmap: ExteriorMap, m: int, n: int, M: int = QUAD_M, fd_step: float = FD_STEP):
    """(FD d2 log tau/dt_m dt_n, Schiffer double quadrature)."""
    if m < 1 or n < 1:
        raise InvalidInput("Schiffer identity needs m, n >= 1")
    K = max(m, n)
    hb = hessian_block(gmap, K, fd_step)
    return complex(hb.holo[m - 1, n - 1]), complex(schiffer_matrix(gmap, K, M)[m - 1, n - 1])


def hessian_vs_bergman(
    gmap: ExteriorMap, m: int, n: int, rho: float = 1.5, M: int = QUAD_M, fd_step: float = FD_STEP
):
    """(FD d2 log tau/dt_m dtbar_n, Bergman double quadrature over C+ at rho)."""
    if m < 1 or n < 1:
        raise InvalidInput("Bergman identity needs m, n >= 1")
    K = max(m, n)
    hb = hessian_block(gmap, K, fd_step)
    return complex(hb.mixed[m - 1, n - 1]), complex(bergman_matrix(gmap, K, rho, M)[m - 1, n - 1])


def rho_independence(gmap: ExteriorMap, N: int, rhos=(1.3, 1.5, 2.0), M: int = QUAD_M) -> float:
    mats = [bergman_matrix(gmap, N, r, M) for r in rhos]
    return float(max(np.abs(a - mats[0]).max() for a in mats[1:]))


@dataclass(frozen=True)
class MetricGram:
    """h^{m nbar} = -(1/(2 pi i)^2) oint oint z^m conj(w)^n K(z, wbar) with K including 1/pi."""

    N: int
    h: np.ndarray
    rho: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.h + self.h.conj().T))

    def hermitian_residual(self) -> float:
        return float(np.abs(self.h - self.h.conj().T).max())

    @property
    def positive_definite(self) -> bool:
        return bool(self.eigenvalues.min() > 0)


def metric_gram(gmap: ExteriorMap, N: int, rho: float = 1.5, M: int = QUAD_M) -> MetricGram:
    return MetricGram(N, bergman_matrix(gmap, N, rho, M) / np.pi, rho)


def metric_checks(gmap: ExteriorMap, N: int, rho: float = 1.5, fd_step: float = FD_STEP, tol: float = 1e-4):
    """Hermitian, positive definite, and pi h = FD mixed Hessian (Kahler potential log tau)."""
    mg = metric_gram(gmap, N, rho)
    hb = hessian_block(gmap, N, fd_step)
    return [
        check("metric Hermitian", mg.h, mg.h.conj().T, 1e-10),
        Check("metric min eigenvalue > 0", float(mg.eigenvalues.min()), 0.0,
              0.0 if mg.positive_definite else float(-mg.eigenvalues.min()), 0.0),
        check("pi * metric = mixed Hessian", np.pi * mg.h, hb.mixed, tol),
    ]


def robin_quadrature(gmap: ExteriorMap, M: int = QUAD_M) -> float:
    """d2 log tau/dt0^2 = -2 log b_-1 as (1/2 pi) int log|z(s)|^2 ds."""
    z, _ = sample_circle(gmap, M)
    return float(np.mean(np.log(np.abs(z) ** 2)))


def integrated_identities(
    gmap: ExteriorMap,
    z: complex,
    w: complex,
    K: int = 10,
    rho: float = 1.5,
    M: int = QUAD_M,
    tail_tol: float = 1e-5,
):
    """Residuals of the two integrated kernel identities, Hessians by quadrature.

    1. log((G(z) - G(w))/(z - w)) = -(1/2) H00 + sum z^-m w^-n/(mn) H_mn
       (log G'(z) at z = w);
    2. log(G(z)conj G(w) / (G(z)conj G(w) - 1)) = sum z^-m conj(w)^-n/(mn) Hbar_mn.

    Raises:
        TailTooLarge: the last row/column of either series exceeds tail_tol.
    """
    Gz, Gw = eval_G(gmap, np.array([z, w], dtype=complex))
    if abs(z - w) <= 1e-12 * max(1.0, abs(z)):
        lhs1 = np.log(G_prime(gmap, Gz))
    else:
        lhs1 = np.log((Gz - Gw) / (z - w))
    GG = Gz * np.conj(Gw)
    lhs2 = np.log(GG / (GG - 1))

    k = np.arange(1, K + 1)
    zm = z ** (-k.astype(float)) / k
    wn = w ** (-k.astype(float)) / k
    T1 = zm[:, None] * schiffer_matrix(gmap, K, M) * wn[None, :]
    T2 = zm[:, None] * bergman_matrix(gmap, K, rho, M) * wn.conj()[None, :]
    for T in (T1, T2):
        tail = max(np.abs(T[-1, :]).sum(), np.abs(T[:, -1]).sum())
        if tail > tail_tol:
            raise TailTooLarge(f"series tail {tail:.2e} > {tail_tol:.1e}; increase |z|, |w| or K")
    rhs1 = -0.5 * robin_quadrature(gmap, M) + T1.sum()
    rhs2 = T2.sum()
    return branch_residual(lhs1, rhs1), branch_residual(lhs2, rhs2)


def kernel_checks(gmap: ExteriorMap, N: int = 3, fd_step: float = FD_STEP, tol: float = 1e-4, M: int = QUAD_M):
    """Schiffer/Bergman quadratures against the FD Hessian, plus their symmetries."""
    hb = hessian_block(gmap, N, fd_step)
    Q = schiffer_matrix(gmap, N, M)
    P = bergman_matrix(gmap, N, 1.5, M)
    return [
        check("holomorphic Hessian = Schiffer quadrature", hb.holo, Q, tol),
        check("Schiffer quadrature symmetric", Q, Q.T, 1e-10),
        check("mixed Hessian = Bergman quadrature", hb.mixed, P, tol),
        check("Bergman quadrature Hermitian", P, P.conj().T, 1e-10),
        Check("Bergman quadrature rho-independent", None, None, rho_independence(gmap, N, M=M), 1e-8),
        check("d2logtau/dt0^2 = 2 log r", hb.t0t0, 2 * np.log(gmap.r), tol),
    ]



def identity_checks(gmap: ExteriorMap, z: complex, w: complex, K: int = 10, rho: float = 1.5, tol: float = 1e-5):
    r1, r2 = integrated_identities(gmap, z, w, K, rho)
    return [
        Check(f"Schiffer integrated identity z={z}, w={w}", None, None, r1, tol),
        Check(f"Bergman integrated identity z={z}, w={w}", None, None, r2, tol),
    ]
