"""log tau of a contour as the regularized energy of d^2z - A delta_0 on Omega.

Two independent evaluations are provided:

* `log_tau_boundary` reduces both area integrals to contour integrals by
  Stokes' theorem (applied twice for the self-energy) and evaluates them by
  the trapezoid rule, with a spectral (Kress) correction for the logarithmic
  diagonal singularity of the double integral.
* `log_tau_grid` is a first-order area quadrature on a uniform square grid.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, signal

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
from .errors import InteriorPoint, NearBoundary, OriginOutside, UnivalenceFailure
from .moments import log_integral

# int_{[0,1]^2} int_{[0,1]^2} log|p - q| d^2p d^2q
UNIT_SQUARE_SELF_ENERGY = math.log(2) / 3 + math.pi / 6 - 25 / 12


@dataclass(frozen=True)
class TauReport:
    log_tau: float
    method: str
    energy_E: float
    log_term_L: float
    area: float
    M: int | None = None
    grid_n: int | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def assemble_log_tau(E: float, A: float, L: float) -> float:
    return -(E - 2 * A * L) / np.pi**2


def _validate(gmap: ExteriorMap, M: int):
    rep = check_univalent(gmap, min(M, 1024))
    if not rep:
        if "origin" in (rep.failure or ""):
            raise OriginOutside(rep.failure)
        raise UnivalenceFailure(rep.failure)


def kress_symbol(M: int) -> np.ndarray:
    """Fourier multiplier of f -> int_0^{2pi} log(4 sin^2((s - t)/2)) f(t) dt."""
    k = np.abs(np.fft.fftfreq(M, 1.0 / M))
    lam = np.zeros(M)
    lam[1:] = -2 * np.pi / k[1:]
    return lam


def boundary_energy(gmap: ExteriorMap, M: int = DEFAULT_M, chunk: int = 256) -> float:
    """E = int_Omega int_Omega log|z - w| as (1/16) oint oint (conj w - conj z)^2 (log|w - z|^2 - 3/2) dz dw.

    log|z(s) - z(t)|^2 is split into log(4 sin^2((s-t)/2)) plus a smooth
    remainder; the smooth part is summed by the trapezoid rule and the
    singular part applied exactly to the trigonometric interpolant.
    """
    c = sample(gmap, M)
    z, dz, h = c.z, c.dz, c.h
    zb = z.conj()

    # singular part, using (conj zs - conj zt)^2 = zs^2 - 2 zs zt + zt^2 (conjugated)
    lam = kress_symbol(M)

    def conv(f):
        return np.fft.ifft(np.fft.fft(f) * lam)

    inner = zb**2 * conv(dz) - 2 * zb * conv(zb * dz) + conv(zb**2 * dz)
    singular = h * np.sum(dz * inner)

    # the smooth integrand is symmetric in (s, t) and the log-sine term depends
    # only on the index shift k = j - i, so sum over shifts 1..M/2 with weights
    smooth = 0.0 + 0.0j
    idx = np.arange(M)
    half = M // 2
    shifts = np.arange(1, half + 1)
    wk = np.where(shifts == half, 1.0, 2.0) if M % 2 == 0 else np.full(half, 2.0)
    logsin = np.log(4 * np.sin(np.pi * shifts / M) ** 2)
    for a in range(0, half, chunk):
        ks = shifts[a : a + chunk]
        j = (idx[None, :] + ks[:, None]) % M
        d = z[None, :] - z[j]
        q = d.real**2 + d.imag**2
        P = d.conj() ** 2 * (dz[None, :] * dz[j])
        row = np.sum(P * (np.log(q) - logsin[a : a + chunk, None] - 1.5), axis=1)
        smooth += np.dot(wk[a : a + chunk], row)
    smooth *= h * h
    return float(((smooth + singular) / 16).real)


def log_tau_boundary(gmap: ExteriorMap, M: int = DEFAULT_M) -> TauReport:
    """log tau = -(1/pi^2) (E - 2 A L) from boundary reductions of E and L."""
    _validate(gmap, M)
    A = area(gmap)
    E = boundary_energy(gmap, M)
    L = log_integral(gmap, M)
    return TauReport(assemble_log_tau(E, A, L), "BoundaryReduced", E, L, A, M=M)


def _cell_log_average(x0: float, y0: float, hc: float) -> float:
    """int over the square cell of log|z| d^2z."""
    val, _ = integrate.dblquad(
        lambda y, x: 0.5 * np.log(x * x + y * y) if (x or y) else 0.0,
        x0, x0 + hc, y0, y0 + hc, epsabs=1e-13, epsrel=1e-12,
    )
    return val


def log_tau_grid(gmap: ExteriorMap, grid_n: int = 200, M_classify: int = 1024) -> TauReport:
    """First-order area quadrature oracle for log tau.

    Cells of side h = (max extent)/grid_n are kept when their centers are
    Interior per point_location. The double sum uses midpoint values of
    log|z - w| off the diagonal and the exact self-energy of a square cell on
    it; the sum is a discrete convolution and is evaluated by FFT.
    """
    _validate(gmap, M_classify)
    c = sample(gmap, M_classify)
    x0, x1 = c.z.real.min(), c.z.real.max()
    y0, y1 = c.z.imag.min(), c.z.imag.max()
    hc = max(x1 - x0, y1 - y0) / grid_n
    nx = int(np.ceil((x1 - x0) / hc)) + 2
    ny = int(np.ceil((y1 - y0) / hc)) + 2
    xs = x0 - hc + (np.arange(nx) + 0.5) * hc
    ys = y0 - hc + (np.arange(ny) + 0.5) * hc
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Zc = X + 1j * Y
    wn = winding_number(c.z, Zc.ravel()).reshape(Zc.shape)
    chi = (wn != 0).astype(float)

    kx = np.arange(-(nx - 1), nx) * hc
    ky = np.arange(-(ny - 1), ny) * hc
    KX, KY = np.meshgrid(kx, ky, indexing="ij")
    with np.errstate(divide="ignore"):
        kern = 0.5 * np.log(KX**2 + KY**2)
    kern[nx - 1, ny - 1] = math.log(hc) + UNIT_SQUARE_SELF_ENERGY
    pot = signal.fftconvolve(chi, kern, mode="full")[nx - 1 : 2 * nx - 1, ny - 1 : 2 * ny - 1]
    E = float(np.sum(chi * pot) * hc**4)

    A = float(chi.sum() * hc**2)
    with np.errstate(divide="ignore"):
        logr = np.log(np.abs(Zc))
    i0 = int(np.floor((0 - xs[0]) / hc + 0.5))
    j0 = int(np.floor((0 - ys[0]) / hc + 0.5))
    mask = chi.copy()
    L = 0.0
    if 0 <= i0 < nx and 0 <= j0 < ny and chi[i0, j0]:
        mask[i0, j0] = 0.0
        L += _cell_log_average(xs[i0] - hc / 2, ys[j0] - hc / 2, hc)
    L += float(np.sum(np.where(mask > 0, logr, 0.0)) * hc**2)
    return TauReport(assemble_log_tau(E, A, L), "GridOracle", E, L, A, grid_n=grid_n)


def log_tau_disk(R: float) -> float:
    """Closed form for the disk |z| < R: (1/2) t0^2 log t0 - (3/4) t0^2, t0 = R^2."""
    t0 = R * R
    return 0.5 * t0 * t0 * math.log(t0) - 0.75 * t0 * t0


def _exterior_check(gmap: ExteriorMap, z: complex, M: int):
    loc = point_location(sample(gmap, M), z)
    if loc == Location.NEAR_BOUNDARY:
        raise NearBoundary(f"z={z} is within one grid spacing of the contour")
    if loc == Location.INTERIOR:
        raise InteriorPoint(f"z={z} is inside the contour; Phi is evaluated on the exterior only")


def potential_phi(gmap: ExteriorMap, z: complex, M: int = DEFAULT_M) -> float:
    """Phi(z) = (2A/pi) log|z| - (2/pi) int_Omega log|z - w| d^2w for exterior z."""
    _exterior_check(gmap, z, M)
    c = sample(gmap, M)
    d = c.z - z
    U = -0.25j * c.h * np.sum((d.conj()) * (np.log(np.abs(d) ** 2) - 1) * c.dz)
    return float(2 * area(gmap) / np.pi * np.log(abs(z)) - 2 / np.pi * U.real)


def current_1pt(gmap: ExteriorMap, z: complex, M: int = DEFAULT_M) -> complex:
    """d Phi / dz at exterior z from the differentiated boundary reduction.

    d/dz int_Omega log|z - w| d^2w = (i/4) oint (conj w - conj z)/(w - z) dw.
    """
    _exterior_check(gmap, z, M)
    c = sample(gmap, M)
    d = c.z - z
    dU = 0.25j * c.h * np.sum(d.conj() / d * c.dz)
    return complex(area(gmap) / (np.pi * z) - 2 / np.pi * dU)


def current_laurent(gmap: ExteriorMap, K: int, rho: float | None = None, P: int = 256, M: int = DEFAULT_M):
    """c_n = (1/2 pi i) oint_{|z|=rho} (dPhi/dz) z^n dz, n = 1..K (expected: -v_n)."""
    if rho is None:
        rho = 1.5 * np.abs(sample(gmap, M).z).max()
    zs = rho * np.exp(2j * np.pi * np.arange(P) / P)
    vals = np.array([current_1pt(gmap, zz, M) for zz in zs])
    dz = 1j * zs
    return np.array([np.mean(vals * zs**n * dz) / 1j for n in range(1, K + 1)])


def tau_agreement_check(b: TauReport, gr: TauReport):
    """Relative boundary/grid agreement; the first-order grid is held to 1e-3 from grid_n = 300."""
    from .report import check

    tol = 1e-3 if gr.grid_n >= 300 else 5e-3
    return check("log tau boundary vs grid (relative)", b.log_tau, gr.log_tau, tol,
                 abs(b.log_tau - gr.log_tau) / abs(gr.log_tau))


def energy_checks(gmap: ExteriorMap, M: int = DEFAULT_M, grid_n: int = 200, K: int = 4) -> list:
    """Boundary vs grid oracle, spectral convergence, and the one-point current."""
    from .moments import interior_moments
    from .report import check

    b = log_tau_boundary(gmap, M)
    half = log_tau_boundary(gmap, max(M // 2, 64))
    gr = log_tau_grid(gmap, grid_n)
    z = 2.0 * np.abs(sample(gmap, M).z).max() * np.exp(0.7j)
    h = 1e-5
    fd = 0.5 * (potential_phi(gmap, z + h, M) - potential_phi(gmap, z - h, M)) / (2 * h) - 0.5j * (
        potential_phi(gmap, z + 1j * h, M) - potential_phi(gmap, z - 1j * h, M)
    ) / (2 * h)
    c = current_laurent(gmap, K, M=min(M, 1024))
    v = np.array(interior_moments(gmap, K, M).v)
    return [
        tau_agreement_check(b, gr),
        check("log tau boundary M vs M/2", b.log_tau, half.log_tau, 1e-10),
        check("dPhi/dz = current (FD)", fd, current_1pt(gmap, z, M), 1e-6),
        check("current Laurent coefficients = -v_n", c, -v, 1e-8),
    ]
