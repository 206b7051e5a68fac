"""Contours given by truncated exterior conformal maps.

A contour C is the image of the unit circle under

    g(w) = r*w + b0 + sum_{k=1}^{N} b_k w^{-k},    |w| >= 1,

the inverse of the exterior map G, normalized by G(oo) = oo, G'(oo) = 1/r > 0.
Everything else in the package is built on the samples z(s) = g(e^{is}).
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
import shapely

from .errors import (
    CoincidentPoints,
    InteriorPoint,
    InvalidInput,
    NonConvergence,
    NonpositiveArea,
)

DEFAULT_M = 4096


@dataclass(frozen=True)
class ExteriorMap:
    """Truncated Laurent data of g = G^{-1}.

    Attributes:
        r: leading coefficient (r > 0); G'(oo) = 1/r.
        b0: constant term.
        coeffs: b_1 ... b_N, coefficients of w^-1 ... w^-N.
    """

    r: float
    b0: complex = 0j
    coeffs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        r = float(self.r)
        if not np.isfinite(r) or r <= 0:
            raise InvalidInput(f"ExteriorMap invariant r > 0 violated (r={self.r!r})")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "b0", complex(self.b0))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if not all(np.isfinite(c) for c in (self.b0,) + self.coeffs):
            raise InvalidInput("ExteriorMap coefficients must be finite")

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @property
    def b_minus1(self) -> float:
        """G'(oo) = 1/r."""
        return 1.0 / self.r

    def padded(self, N: int) -> "ExteriorMap":
        """Same map with the coefficient list padded by zeros to length N."""
        if N < self.N:
            raise InvalidInput(f"cannot pad {self.N} coefficients down to {N}")
        return ExteriorMap(self.r, self.b0, self.coeffs + (0j,) * (N - self.N))

    def scaled(self, lam: float) -> "ExteriorMap":
        """Map of the contour lam*C (lam > 0)."""
        return ExteriorMap(lam * self.r, lam * self.b0, [lam * c for c in self.coeffs])

    def laurent(self) -> np.ndarray:
        """Coefficients ordered by power, from w^-N up to w^1."""
        return np.array(self.coeffs[::-1] + (self.b0, self.r), dtype=complex)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = self.r * w + self.b0
        if self.coeffs:
            inv = 1.0 / w
            p = np.ones_like(w)
            for b in self.coeffs:
                p = p * inv
                out = out + b * p
        return out

    def derivative(self, w):
        """g'(w)."""
        w = np.asarray(w, dtype=complex)
        out = np.full_like(w, self.r)
        if self.coeffs:
            inv = 1.0 / w
            p = inv.copy()
            for k, b in enumerate(self.coeffs, start=1):
                p = p * inv
                out = out - k * b * p
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "r": self.r,
                "b0": [self.b0.real, self.b0.imag],
                "coeffs": [[c.real, c.imag] for c in self.coeffs],
            }
        )

    @classmethod
    def from_dict(cls, data: dict) -> "ExteriorMap":
        try:
            r = data["r"]
            b0 = _pair(data.get("b0", [0.0, 0.0]), "b0")
            coeffs = [_pair(c, f"coeffs[{i}]") for i, c in enumerate(data.get("coeffs", []))]
        except KeyError as exc:
            raise InvalidInput(f"contour JSON is missing field {exc}") from None
        if isinstance(r, bool) or not isinstance(r, (int, float)):
            raise InvalidInput("contour JSON field 'r' must be a number")
        return cls(r, b0, coeffs)

    @classmethod
    def from_json(cls, text: str) -> "ExteriorMap":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"contour file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidInput("contour JSON must be an object")
        return cls.from_dict(data)


def _pair(v, name) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        return complex(v[0], v[1])
    raise InvalidInput(f"contour JSON field {name} must be a [re, im] pair")


@dataclass(frozen=True)
class SampledContour:
    """Uniform boundary samples z(s_k) and z'(s_k), s_k = 2*pi*k/M."""

    z: np.ndarray
    dz: np.ndarray

    def __post_init__(self):
        if self.z.shape != self.dz.shape or self.z.ndim != 1:
            raise InvalidInput("SampledContour invariant: z and dz have identical length")

    @property
    def M(self) -> int:
        return self.z.size

    @property
    def h(self) -> float:
        return 2 * np.pi / self.M

    @property
    def sigma(self) -> np.ndarray:
        return np.arange(self.M) * self.h

    def integrate(self, f) -> complex:
        """Trapezoid value of oint f dz for samples f(z_k)."""
        return complex(np.sum(f * self.dz) * self.h)

    def spectral_derivative(self) -> np.ndarray:
        k = np.fft.fftfreq(self.M, 1.0 / self.M)
        if self.M % 2 == 0:
            k[self.M // 2] = 0
        return np.fft.ifft(1j * k * np.fft.fft(self.z))


@dataclass(frozen=True)
class FaberPolynomial:
    """F_n(w) = sum_j c_j w^j."""

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, w):
        return np.polynomial.polynomial.polyval(np.asarray(w, dtype=complex), self.coeffs)

    def derivative(self, w):
        d = np.polynomial.polynomial.polyder(self.coeffs)
        return np.polynomial.polynomial.polyval(np.asarray(w, dtype=complex), d)


class Location(enum.Enum):
    INTERIOR = "Interior"
    EXTERIOR = "Exterior"
    NEAR_BOUNDARY = "NearBoundary"


def _check_M(M: int, minimum: int = 4) -> int:
    M = int(M)
    if M < minimum or M & (M - 1):
        raise InvalidInput(f"sample count must be a power of two >= {minimum} (got {M})")
    return M


def eval_g(gmap: ExteriorMap, w):
    """g(w) for |w| >= 1."""
    wa = np.asarray(w, dtype=complex)
    if np.any(np.abs(wa) < 1 - 1e-14):
        raise InvalidInput("eval_g requires |w| >= 1")
    out = gmap(wa)
    return complex(out) if out.ndim == 0 else out


@lru_cache(maxsize=256)
def sample(gmap: ExteriorMap, M: int = DEFAULT_M) -> SampledContour:
    """Counterclockwise samples z_k = g(e^{is_k}), dz_k = i e^{is_k} g'(e^{is_k})."""
    M = _check_M(M)
    w = np.exp(2j * np.pi * np.arange(M) / M)
    z = gmap(w)
    dz = 1j * w * gmap.derivative(w)
    z.setflags(write=False)
    dz.setflags(write=False)
    return SampledContour(z, dz)


def sample_circle(gmap: ExteriorMap, M: int, rho: float = 1.0, offset: float = 0.0):
    """z and dz/ds on the image of |w| = rho, angles s_k + offset."""
    s = 2 * np.pi * np.arange(M) / M + offset
    w = rho * np.exp(1j * s)
    return gmap(w), 1j * w * gmap.derivative(w)


def winding_number(z_poly: np.ndarray, points) -> np.ndarray:
    """Winding number of the closed polygon z_poly about each point."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    out = np.empty(pts.shape, dtype=int)
    a = z_poly
    b = np.roll(z_poly, -1)
    chunk = max(1, 2_000_000 // max(1, a.size))
    flat = pts.ravel()
    res = out.ravel()
    for s in range(0, flat.size, chunk):
        p = flat[s : s + chunk, None]
        ay, by = a.imag - p.imag, b.imag - p.imag
        ax, bx = a.real - p.real, b.real - p.real
        cross = ax * by - bx * ay
        up = (ay <= 0) & (by > 0) & (cross > 0)
        down = (ay > 0) & (by <= 0) & (cross < 0)
        res[s : s + chunk] = up.sum(axis=1) - down.sum(axis=1)
    return out


def distance_to_polygon(z_poly: np.ndarray, points) -> np.ndarray:
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    a = z_poly
    d = np.roll(z_poly, -1) - a
    dd = np.abs(d) ** 2
    out = np.empty(pts.shape)
    flat = pts.ravel()
    res = out.ravel()
    chunk = max(1, 2_000_000 // max(1, a.size))
    for s in range(0, flat.size, chunk):
        p = flat[s : s + chunk, None]
        t = np.clip(((p - a) * d.conj()).real / dd, 0.0, 1.0)
        res[s : s + chunk] = np.abs(p - (a + t * d)).min(axis=1)
    return out


def point_location(contour: SampledContour, z):
    """Interior / Exterior / NearBoundary classification of z (scalar or array).

    NearBoundary wins when the distance to the sampled polygon is below
    2*pi*max|dz|/M, i.e. within one grid spacing of the curve.
    """
    scalar = np.ndim(z) == 0
    wn = winding_number(contour.z, z)
    spacing = contour.h * np.abs(contour.dz).max()
    near = distance_to_polygon(contour.z, z) < spacing
    labels = np.where(near, Location.NEAR_BOUNDARY, np.where(wn != 0, Location.INTERIOR, Location.EXTERIOR))
    return labels.item() if scalar else labels


@dataclass
class UnivalenceReport:
    ok: bool
    failure: str | None = None

    def __bool__(self):
        return self.ok


def _is_simple_polygon(z: np.ndarray) -> bool:
    """True when the closed polygon through z has no self-intersections (GEOS sweep)."""
    return bool(shapely.LinearRing(np.column_stack([z.real, z.imag])).is_simple)


def check_univalent(gmap: ExteriorMap, M: int = DEFAULT_M, rho: float = 1.0) -> UnivalenceReport:
    """Sampled univalence test of g on |w| >= rho.

    Criteria, checked in order: g' nonzero on the samples, the boundary
    polygon is simple (sweep-line test), winding about 0 equals +1.
    """
    M = _check_M(M)
    w = rho * np.exp(2j * np.pi * np.arange(M) / M)
    dg = gmap.derivative(w)
    z = gmap(w)
    scale = max(gmap.r * rho, np.abs(z).max())
    if np.abs(dg).min() <= 1e-12 * gmap.r:
        return UnivalenceReport(False, "derivative g' vanishes on the boundary circle")
    if not _is_simple_polygon(z):
        return UnivalenceReport(False, "boundary polygon self-intersects")
    wn = int(winding_number(z, 0.0)[0])
    if wn != 1:
        if np.abs(z).min() < 1e-12 * scale:
            return UnivalenceReport(False, "origin lies on the boundary")
        if wn == 0:
            return UnivalenceReport(False, "winding number of boundary about 0 is 0: origin outside")
        return UnivalenceReport(False, f"winding number of boundary about 0 is {wn}, not +1 (orientation reversed)")
    return UnivalenceReport(True)


def area(gmap: ExteriorMap) -> float:
    """A(Omega) = pi (r^2 - sum k |b_k|^2)."""
    k = np.arange(1, gmap.N + 1)
    a = np.pi * (gmap.r**2 - np.sum(k * np.abs(np.asarray(gmap.coeffs)) ** 2))
    if a <= 0:
        raise NonpositiveArea(f"area formula gives {a:.6g} <= 0; map is not univalent")
    return float(a)


def area_quadrature(contour: SampledContour) -> float:
    """(1/2i) oint conj(z) dz by the trapezoid rule."""
    return (contour.integrate(contour.z.conj()) / 2j).real


def _newton_G(gmap: ExteriorMap, z: np.ndarray, w: np.ndarray, tol: float, maxit: int):
    """Damped Newton for g(w) = z, vectorized; returns (w, converged mask)."""
    res = gmap(w) - z
    for _ in range(maxit):
        done = np.abs(res) <= tol
        if done.all():
            break
        step = res / gmap.derivative(w)
        lam = np.ones(w.shape)
        for _ in range(30):
            trial = w - lam[...] * step
            tres = gmap(trial) - z
            bad = (~done) & ((np.abs(trial) < 1) | (np.abs(tres) > np.abs(res)))
            bad &= ~(np.abs(tres) <= tol)
            if not bad.any():
                break
            lam = np.where(bad, lam / 2, lam)
        w = np.where(done, w, trial)
        res = np.where(done, res, tres)
    return w, np.abs(res) <= tol


def eval_G(gmap: ExteriorMap, z, tol: float = 1e-12, maxit: int = 50, check: bool = True, M: int = DEFAULT_M):
    """Exterior map G(z) by Newton's method on g(w) = z.

    Seeded at (z - b0)/r. Points not reached within `maxit` damped steps are
    retried by 200-step continuation along the segment from a far point.

    Raises:
        InteriorPoint: z is not in the exterior (with check=True).
        NonConvergence: residual stays above tol.
    """
    za = np.asarray(z, dtype=complex)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    if check:
        loc = point_location(sample(gmap, M), za)
        inside = loc == Location.INTERIOR
        if np.any(inside):
            raise InteriorPoint(f"point {za[inside][0]} is not in the exterior domain")
    w0 = (za - gmap.b0) / gmap.r
    small = np.abs(w0) <= 1
    w0 = np.where(small, np.where(w0 == 0, 1.5, w0 / np.abs(w0) * 1.5), w0)
    w, ok = _newton_G(gmap, za, w0, tol, maxit)
    if not ok.all():
        bad = ~ok
        zb = za[bad]
        R = 1e3 * (gmap.r + np.abs(gmap.b0) + sum(abs(c) for c in gmap.coeffs) + np.abs(zb))
        direction = np.where(zb - gmap.b0 == 0, 1.0, (zb - gmap.b0) / np.abs(zb - gmap.b0))
        zfar = gmap.b0 + R * direction
        wc, _ = _newton_G(gmap, zfar, (zfar - gmap.b0) / gmap.r, tol, maxit)
        for s in np.linspace(0, 1, 201)[1:]:
            wc, _ = _newton_G(gmap, zfar + s * (zb - zfar), wc, max(tol, 1e-10 * R), maxit)
        wc, okc = _newton_G(gmap, zb, wc, tol, maxit)
        w[bad] = wc
        ok[bad] = okc
        if not ok.all():
            zf = za[~ok][0]
            raise NonConvergence(f"Newton for G did not converge at z={zf} (too close to C?)")
    return complex(w[0]) if scalar else w


def G_prime(gmap: ExteriorMap, Gz):
    """G'(z) = 1/g'(G(z)), given G(z)."""
    return 1.0 / gmap.derivative(Gz)


def laurent_power(gmap: ExteriorMap, n: int) -> tuple[np.ndarray, int]:
    """Exact Laurent coefficients of g^n; returns (coefficients, lowest power)."""
    base = gmap.laurent()
    out = np.array([1.0 + 0j])
    for _ in range(n):
        out = np.convolve(out, base)
    return out, -gmap.N * n


def faber(gmap: ExteriorMap, n: int) -> FaberPolynomial:
    """F_n = polynomial part of g^n (exact Laurent arithmetic)."""
    if n < 0:
        raise InvalidInput("Faber degree must be >= 0")
    c, low = laurent_power(gmap, n)
    return FaberPolynomial(c[-low:].copy() if low else c.copy())


def deformation_form(gmap: ExteriorMap, n: int, contour: SampledContour) -> np.ndarray:
    """d(F_n o G)/ds along C (i for n = 0), using G(z(s)) = e^{is}."""
    w = np.exp(1j * contour.sigma)
    if n == 0:
        return np.full(contour.M, 1j)
    return faber(gmap, n).derivative(w) * 1j * w


def duality_matrix(gmap: ExteriorMap, nmax: int = 6, M: int = DEFAULT_M) -> np.ndarray:
    """D[m-1, n] = (1/2 pi i) oint (z^-m / m) omega_n for m = 1..nmax, n = 0..nmax."""
    c = sample(gmap, M)
    D = np.empty((nmax, nmax + 1), dtype=complex)
    forms = [deformation_form(gmap, n, c) for n in range(nmax + 1)]
    zinv = 1.0 / c.z
    p = np.ones(c.M, dtype=complex)
    for m in range(1, nmax + 1):
        p = p * zinv
        for n in range(nmax + 1):
            D[m - 1, n] = np.sum(p / m * forms[n]) * c.h / (2j * np.pi)
    return D


def schiffer_kernel_ext(gmap: ExteriorMap, z: complex, w: complex) -> complex:
    """S(z, w) = G'(z) G'(w) / (G(z) - G(w))^2."""
    if abs(z - w) <= 1e-14 * max(1.0, abs(z)):
        raise CoincidentPoints("Schiffer kernel is singular at z = w")
    Gz, Gw = eval_G(gmap, np.array([z, w]))
    return complex(G_prime(gmap, Gz) * G_prime(gmap, Gw) / (Gz - Gw) ** 2)


def bergman_kernel_ext(gmap: ExteriorMap, z: complex, w: complex) -> complex:
    """K(z, conj w) = G'(z) conj(G'(w)) / (pi (1 - G(z) conj(G(w)))^2)."""
    Gz, Gw = eval_G(gmap, np.array([z, w]))
    num = G_prime(gmap, Gz) * np.conj(G_prime(gmap, Gw))
    return complex(num / (np.pi * (1 - Gz * np.conj(Gw)) ** 2))


def bergman_series(gmap: ExteriorMap, z: complex, w: complex, terms: int = 40) -> complex:
    """Truncated orthonormal expansion sum_n u_n(z) conj(u_n(w))."""
    Gz, Gw = eval_G(gmap, np.array([z, w]))
    dGz, dGw = G_prime(gmap, Gz), G_prime(gmap, Gw)
    n = np.arange(1, terms + 1)
    uz = np.sqrt(n / np.pi) * Gz ** (-n - 1.0) * dGz
    uw = np.sqrt(n / np.pi) * Gw ** (-n - 1.0) * dGw
    return complex(np.sum(uz * np.conj(uw)))


def green_dbc(gmap: ExteriorMap, z: complex, w: complex) -> float:
    """Dirichlet Green's function (2/pi) log|(1 - G(z)conj G(w)) / (G(z) - G(w))|."""
    Gz, Gw = eval_G(gmap, np.array([z, w]))
    return float(2 / np.pi * np.log(abs((1 - Gz * np.conj(Gw)) / (Gz - Gw))))


def contour_checks(gmap: ExteriorMap, M: int = DEFAULT_M, nmax: int = 6) -> list:
    """Univalence, area formula vs quadrature, and the Faber duality D = I."""
    from .report import Check, check

    rep = check_univalent(gmap, min(M, 1024))
    A = area(gmap)
    D = duality_matrix(gmap, nmax, M)
    I = np.zeros_like(D)
    I[np.arange(nmax), np.arange(1, nmax + 1)] = 1.0
    return [
        Check("map univalent", rep.failure or "ok", "ok", 0.0 if rep.ok else 1.0, 0.0),
        check("area formula = boundary quadrature (relative)", A, area_quadrature(sample(gmap, M)), 1e-12,
              abs(A - area_quadrature(sample(gmap, M))) / A),
        check("Faber duality max|D - I|", D, I, 1e-10),
    ]
