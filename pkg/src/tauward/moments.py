"""Harmonic moments of a contour, the Cauchy pair S+/S-, and the inverse moment map."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .contour import (
    DEFAULT_M,
    ExteriorMap,
    Location,
    area,
    check_univalent,
    point_location,
    sample,
    winding_number,
)
from .errors import InvalidInput, NearBoundary, NonConvergence, OriginOutside, TauwardError, UnivalenceLost


@dataclass(frozen=True)
class MomentSet:
    """Exterior moments: t0 = A/pi and t_1 ... t_N."""

    t0: float
    t: tuple

    def __post_init__(self):
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "t", tuple(complex(x) for x in self.t))
        if not self.t0 > 0:
            raise InvalidInput(f"MomentSet invariant t0 > 0 violated (t0={self.t0})")

    @property
    def N(self) -> int:
        return len(self.t)

    def as_real(self) -> np.ndarray:
        """(t0, Re t1, Im t1, ..., Re tN, Im tN)."""
        t = np.asarray(self.t, dtype=complex)
        return np.concatenate([[self.t0], np.column_stack([t.real, t.imag]).ravel()])

    @classmethod
    def from_real(cls, x) -> "MomentSet":
        x = np.asarray(x, dtype=float)
        return cls(x[0], x[1::2] + 1j * x[2::2])

    def padded(self, N: int) -> "MomentSet":
        return MomentSet(self.t0, self.t + (0j,) * (N - self.N))

    def to_dict(self) -> dict:
        return {"t0": self.t0, "t": [[x.real, x.imag] for x in self.t]}

    @classmethod
    def from_json(cls, text: str) -> "MomentSet":
        try:
            data = json.loads(text)
            return cls(data["t0"], [complex(a, b) for a, b in data.get("t", [])])
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"MomentSet JSON malformed: {exc}") from None


@dataclass(frozen=True)
class InteriorMoments:
    v0: float
    v: tuple


def exterior_moments(gmap: ExteriorMap, N: int | None = None, M: int = DEFAULT_M) -> MomentSet:
    """t0 = area/pi and t_n = (1/2 pi i n) oint z^-n conj(z) dz, n = 1..N.

    N defaults to the chart size gmap.N + 1; moments beyond it vanish.
    """
    if N is None:
        N = gmap.N + 1
    c = sample(gmap, M)
    weight = c.z.conj() * c.dz * (c.h / (2j * np.pi))
    zinv = 1.0 / c.z
    p = np.ones(c.M, dtype=complex)
    t = []
    for n in range(1, N + 1):
        p = p * zinv
        t.append(np.sum(p * weight) / n)
    return MomentSet(area(gmap) / np.pi, t)


def log_integral(gmap: ExteriorMap, M: int = DEFAULT_M) -> float:
    """int_Omega log|z| d^2z via -(i/4) oint conj(z) (log|z|^2 - 1) dz."""
    c = sample(gmap, M)
    val = -0.25j * c.h * np.sum(c.z.conj() * (np.log(np.abs(c.z) ** 2) - 1) * c.dz)
    return float(val.real)


def _require_origin_inside(gmap: ExteriorMap, M: int):
    c = sample(gmap, M)
    if winding_number(c.z, 0.0)[0] != 1:
        raise OriginOutside("the origin must lie inside the contour")


def interior_moments(gmap: ExteriorMap, K: int = 4, M: int = DEFAULT_M) -> InteriorMoments:
    """v_n = (1/2 pi i) oint z^n conj(z) dz and v0 = (2/pi) int_Omega log|z| d^2z."""
    _require_origin_inside(gmap, M)
    c = sample(gmap, M)
    weight = c.z.conj() * c.dz * (c.h / (2j * np.pi))
    p = np.ones(c.M, dtype=complex)
    v = []
    for _ in range(K):
        p = p * c.z
        v.append(complex(np.sum(p * weight)))
    return InteriorMoments(2 / np.pi * log_integral(gmap, M), tuple(v))


def cauchy_pair(gmap: ExteriorMap, z: complex, side: Location, M: int = DEFAULT_M) -> complex:
    """S+(z) (interior) or S-(z) (exterior) = (1/2 pi i) oint conj(w) dw / (w - z)."""
    c = sample(gmap, M)
    loc = point_location(c, z)
    if loc == Location.NEAR_BOUNDARY:
        raise NearBoundary(f"z={z} is within one grid spacing of the contour")
    if loc != side:
        raise InvalidInput(f"z={z} lies in the {loc.value} domain, not {side.value}")
    return complex(np.sum(c.z.conj() * c.dz / (c.z - z)) * c.h / (2j * np.pi))


def _map_to_real(gmap: ExteriorMap) -> np.ndarray:
    b = np.asarray((gmap.b0,) + gmap.coeffs, dtype=complex)
    return np.concatenate([[gmap.r], np.column_stack([b.real, b.imag]).ravel()])


def _real_to_map(x: np.ndarray) -> ExteriorMap:
    b = x[1::2] + 1j * x[2::2]
    return ExteriorMap(x[0], b[0], b[1:])


def moment_residual(gmap: ExteriorMap, target: MomentSet, M: int = DEFAULT_M) -> np.ndarray:
    return exterior_moments(gmap, target.N, M).as_real() - target.as_real()


def _safe_map(x):
    try:
        return _real_to_map(x)
    except InvalidInput:
        return None


def _jacobian(F, x):
    cols = []
    for i in range(x.size):
        dh = 1e-6 * (1 + abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += dh
        xm[i] -= dh
        fp, fm = F(xp), F(xm)
        if fp is None or fm is None:
            raise UnivalenceLost("Jacobian stencil left the admissible set")
        cols.append((fp - fm) / (2 * dh))
    return np.column_stack(cols)


def moment_jacobian(gmap: ExteriorMap, M: int = DEFAULT_M) -> np.ndarray:
    """d(t0, Re t1, Im t1, ...)/d(r, Re b0, Im b0, ...) for the square chart of gmap."""
    N = gmap.N

    def F(xx):
        g = _safe_map(xx)
        return None if g is None else exterior_moments(g, N + 1, M).as_real()

    return _jacobian(F, _map_to_real(gmap))


def map_from_moments(
    target: MomentSet,
    seed: ExteriorMap,
    tol: float = 1e-13,
    M: int = DEFAULT_M,
    maxit: int = 40,
    univalence_M: int = 512,
    jacobian: np.ndarray | None = None,
) -> ExteriorMap:
    """Solve exterior_moments(g) = target for g with seed.N coefficients.

    Newton's method on the square real system (r, b0, ..., bN) -> (t0, t1, ...,
    t_{N+1}) with a central-difference Jacobian and up to 8 step halvings.
    A precomputed `jacobian` (see `moment_jacobian`) switches to the chord
    method, which is much cheaper for small perturbations of a known solution.

    Raises:
        NonConvergence: residual plateaus above tol.
        UnivalenceLost: an accepted iterate fails check_univalent.
    """
    N = seed.N
    if target.N > N + 1:
        raise InvalidInput(f"target has {target.N} moments but the chart of an {N}-coefficient map holds {N + 1}")
    target = target.padded(N + 1)
    x = _map_to_real(seed)

    def F(xx):
        g = _safe_map(xx)
        if g is None:
            return None
        try:
            return moment_residual(g, target, M)
        except TauwardError:
            return None

    f = F(x)
    if f is None:
        raise UnivalenceLost("seed map is not admissible")
    scale = max(1.0, target.t0)
    for _ in range(maxit):
        if np.abs(f).max() <= tol * scale:
            return _real_to_map(x)
        J = jacobian if jacobian is not None else _jacobian(F, x)
        step = np.linalg.solve(J, f)
        lam = 1.0
        for _ in range(9):
            xn = x - lam * step
            fn = F(xn)
            if fn is not None and np.linalg.norm(fn) < np.linalg.norm(f):
                break
            lam /= 2
        else:
            if np.abs(f).max() <= 1e3 * tol * scale:
                return _real_to_map(x)
            raise NonConvergence(f"moment residual plateaued at {np.abs(f).max():.3e}")
        gn = _real_to_map(xn)
        rep = check_univalent(gn, univalence_M)
        if not rep:
            raise UnivalenceLost(f"Newton iterate not univalent: {rep.failure}")
        x, f = xn, fn
    if np.abs(f).max() <= tol * scale:
        return _real_to_map(x)
    raise NonConvergence(f"no convergence in {maxit} iterations (residual {np.abs(f).max():.3e})")


def moment_checks(gmap: ExteriorMap, M: int = DEFAULT_M, K: int = 24) -> list:
    """Inverse-map round trip and the Laurent data of the Cauchy pair."""
    from .report import check

    target = exterior_moments(gmap, gmap.N + 1, M)
    seed = ExteriorMap(np.sqrt(target.t0), 0.0, [0.5 * c for c in gmap.coeffs])
    back = map_from_moments(target, seed, M=min(M, 1024))
    err = float(np.abs(_map_to_real(back) - _map_to_real(gmap)).max())
    c = sample(gmap, M)
    zfar = 3.0 * np.abs(c.z).max() * np.exp(0.3j)
    vm = interior_moments(gmap, K, M)
    v = np.array((target.t0,) + vm.v)
    series = -np.sum(v * zfar ** (-np.arange(1.0, K + 2)))
    t1 = target.t[0] if target.N else 0j
    return [
        check("map_from_moments round trip", err, 0.0, 1e-10),
        check("S+(0) = t1", cauchy_pair(gmap, 0.0, Location.INTERIOR, M), t1, 1e-12),
        check("S-(z) = -sum v_n z^(-n-1)", cauchy_pair(gmap, zfar, Location.EXTERIOR, M), series, 1e-8),
    ]
