"""Command-line front end.

Every command reads its input, runs the library computation and the matching
verification suite, and writes one JSON (or CSV) report to standard output.
Exit status: 0 when every check passes, 1 on a failed check, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import contour, energy, moments, partition, theta, ward
from .errors import InvalidInput, NonConvergence, TauwardError, UnivalenceFailure, VerificationError
from .report import Check, check, jsonable

DEFAULT_ELLIPSE = contour.ExteriorMap(1.0, 0.0, (0.3,))
DEFAULT_THETA = {
    "Omega": [[[0.1, 1.0], [0.2, 0.1]], [[0.2, 0.1], [0.0, 1.5]]],
    "Z": [[0.1, 0.05], [-0.2, 0.1]],
    "xi_a": [0.2, -0.1],
    "xi_b": [0.3, 0.05],
}
DEFAULT_THETA_G1 = {"Omega": [[[0.2, 1.3]]], "Z": [[0.3, 0.2]]}

# K used when --order is not given
ORDER_DEFAULTS = {"reconstruct-g": 8, "identities": 10}


@dataclass
class RunConfig:
    command: str
    inputs: list
    samples: int = 4096
    grid_n: int = 200
    fd_step: float = 1e-4
    order: int = 4
    rho: float = 1.5
    tol: float = 1e-8
    format: str = "json"
    svg: str | None = None
    z: complex | None = None
    w: complex | None = None
    tau: complex | None = None
    both: bool = False

    def validate(self):
        M = self.samples
        if M < 64 or M & (M - 1):
            raise InvalidInput(f"--samples must be a power of two >= 64 (got {M})")
        if not 1 < self.rho <= 4:
            raise InvalidInput(f"--rho must satisfy 1 < rho <= 4 (got {self.rho})")
        if not self.tol > 0:
            raise InvalidInput(f"--tol must be positive (got {self.tol})")
        if not self.fd_step > 0:
            raise InvalidInput(f"--fd-step must be positive (got {self.fd_step})")
        if self.order < 1:
            raise InvalidInput(f"--order must be >= 1 (got {self.order})")
        if self.grid_n < 16:
            raise InvalidInput(f"--grid must be >= 16 (got {self.grid_n})")


# ---------------------------------------------------------------- input


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None


def _load_map(cfg: RunConfig, required: bool = True) -> contour.ExteriorMap:
    if not cfg.inputs:
        if required:
            raise InvalidInput(f"{cfg.command} needs a contour JSON file")
        return DEFAULT_ELLIPSE
    return contour.ExteriorMap.from_json(_read(cfg.inputs[0]))


def _load_theta(cfg: RunConfig, default=None):
    if not cfg.inputs:
        if default is None:
            raise InvalidInput(f"{cfg.command} needs a theta JSON file")
        return theta.load_theta_input(json.dumps(default))
    return theta.load_theta_input(_read(cfg.inputs[0]))


def _instanton_input(Om, Z, xi) -> partition.InstantonInput:
    if xi is not None:
        return partition.InstantonInput(Om, xi)
    return partition.InstantonInput.from_Z(Om, Z)


def _require(value, flag: str):
    if value is None:
        raise InvalidInput(f"{flag} is required for this command")
    return value


# ---------------------------------------------------------------- commands


def _map_summary(gmap: contour.ExteriorMap, cfg: RunConfig) -> dict:
    return {"r": gmap.r, "b0": gmap.b0, "coeffs": list(gmap.coeffs)}


def cmd_info(cfg: RunConfig, gmap=None):
    gmap = gmap or _load_map(cfg)
    rep = contour.check_univalent(gmap, cfg.samples)
    if not rep:
        raise UnivalenceFailure(rep.failure)
    t = moments.exterior_moments(gmap, cfg.order, cfg.samples)
    v = moments.interior_moments(gmap, cfg.order, cfg.samples)
    result = {
        "map": _map_summary(gmap, cfg),
        "area": contour.area(gmap),
        "t0": t.t0,
        "t": list(t.t),
        "v0": v.v0,
        "v": list(v.v),
        "b_minus1": gmap.b_minus1,
    }
    return result, []


def cmd_tau(cfg: RunConfig):
    gmap = _load_map(cfg)
    b = energy.log_tau_boundary(gmap, cfg.samples)
    result = {"boundary": b.to_dict()}
    checks = []
    if cfg.both:
        gr = energy.log_tau_grid(gmap, cfg.grid_n)
        result["grid"] = gr.to_dict()
        checks.append(energy.tau_agreement_check(b, gr))
    result["log_tau"] = b.log_tau
    return result, checks


def cmd_moments(cfg: RunConfig):
    gmap = _load_map(cfg)
    t = moments.exterior_moments(gmap, cfg.order, cfg.samples)
    v = moments.interior_moments(gmap, cfg.order, cfg.samples)
    result = {"exterior": t.to_dict(), "interior": {"v0": v.v0, "v": list(v.v)}}
    return result, moments.moment_checks(gmap, cfg.samples)


def cmd_faber(cfg: RunConfig):
    gmap = _load_map(cfg)
    polys = {str(n): list(contour.faber(gmap, n).coeffs) for n in range(1, cfg.order + 1)}
    return {"faber": polys, "order": "ascending powers of z"}, contour.contour_checks(gmap, cfg.samples, cfg.order)


def cmd_invert(cfg: RunConfig):
    if not cfg.inputs:
        raise InvalidInput("invert-moments needs a MomentSet JSON file")
    target = moments.MomentSet.from_json(_read(cfg.inputs[0]))
    if len(cfg.inputs) > 1:
        seed = contour.ExteriorMap.from_json(_read(cfg.inputs[1]))
    else:
        seed = contour.ExteriorMap(np.sqrt(target.t0), 0.0, [0.0] * max(target.N - 1, 0))
    M = min(cfg.samples, 1024)
    g = moments.map_from_moments(target, seed, tol=cfg.tol, M=M)
    got = moments.exterior_moments(g, seed.N + 1, M)
    want = target.padded(seed.N + 1)
    res = float(np.abs(got.as_real() - want.as_real()).max())
    return {"map": _map_summary(g, cfg)}, [check("moments of solved map = target", res, 0.0, cfg.tol * max(1, target.t0))]


def cmd_ward1(cfg: RunConfig):
    gmap = _load_map(cfg)
    _, checks = ward.ward_first_order(gmap, cfg.order, cfg.fd_step)
    return {"N": cfg.order}, checks


def cmd_hessian(cfg: RunConfig):
    gmap = _load_map(cfg)
    hb = ward.hessian_block(gmap, cfg.order, cfg.fd_step)
    result = {
        "N": hb.N,
        "holo": hb.holo,
        "mixed": hb.mixed,
        "t0_row": hb.t0_row,
        "t0t0": hb.t0t0,
        "richardson_ok": hb.richardson_ok,
    }
    checks = ward.kernel_checks(gmap, cfg.order, cfg.fd_step)
    checks += ward.equilibrium_check(gmap, cfg.order, cfg.fd_step)
    return result, checks


def cmd_reconstruct(cfg: RunConfig):
    gmap = _load_map(cfg)
    z = _require(cfg.z, "--z")
    c = ward.reconstruct_check(gmap, cfg.order, z, fd_step=cfg.fd_step)
    return {"z": z, "K": cfg.order, "logG": c.lhs, "reconstructed": c.rhs}, [c]


def cmd_metric(cfg: RunConfig):
    gmap = _load_map(cfg)
    mg = ward.metric_gram(gmap, cfg.order, cfg.rho)
    result = {"N": mg.N, "rho": mg.rho, "h": mg.h, "eigenvalues": mg.eigenvalues}
    return result, ward.metric_checks(gmap, cfg.order, cfg.rho, cfg.fd_step)


def cmd_identities(cfg: RunConfig):
    gmap = _load_map(cfg)
    z = _require(cfg.z, "--z")
    w = cfg.w if cfg.w is not None else np.conj(z)
    checks = ward.identity_checks(gmap, z, w, cfg.order, cfg.rho)
    return {"z": z, "w": w, "K": cfg.order}, checks


def cmd_theta(cfg: RunConfig):
    Om, Z, xi = _load_theta(cfg)
    result = {
        "g": Om.g,
        "theta": theta.theta(Z, Om),
        "gradient": theta.theta_derivs(Z, Om, 1),
    }
    if xi is not None:
        result["theta_char"] = theta.theta_char(xi, Z, Om)
    return result, theta.theta_checks(Om, Z, xi)


def cmd_zinst(cfg: RunConfig):
    inp = _instanton_input(*_load_theta(cfg))
    val, log = partition.bold_tau(inp)
    result = {
        "primitive": partition.zinst_primitive(inp),
        "quadratic_form": partition.zinst_qa(inp),
        "closed": partition.zinst_closed(inp),
        "bold_tau": val,
        "log_bold_tau": log,
    }
    return result, partition.instanton_checks(inp)


def cmd_ward_genus(cfg: RunConfig):
    inp = _instanton_input(*_load_theta(cfg))
    signs = {}
    for i in range(inp.g):
        for j in range(i, inp.g):
            signs[f"{i},{j}"] = partition.ward_genus_second(inp, i, j)["mixed_sign"]
    return {"g": inp.g, "mixed_sign_vs_piY": signs}, partition.genus_ward_checks(inp)


def cmd_fay(cfg: RunConfig):
    tau = cfg.tau if cfg.tau is not None else 2j
    z = cfg.z if cfg.z is not None else 0.5 + 0.6j
    w = cfg.w if cfg.w is not None else 0.2 + 0.2j
    fay = partition.fay_torus_check(tau, z, w)
    return {"tau": tau, "z": z, "w": w, **fay}, partition.torus_checks(tau, z, w)


def cmd_verify_all(cfg: RunConfig):
    """Run every module's invariant suite on one contour and the default theta inputs."""
    gmap = _load_map(cfg, required=False)
    suites: dict[str, list[Check]] = {}
    suites["contour_geometry"] = contour.contour_checks(gmap, cfg.samples)
    suites["moments"] = moments.moment_checks(gmap, cfg.samples)
    suites["tau_energy"] = energy.energy_checks(gmap, cfg.samples, cfg.grid_n)
    _, w1 = ward.ward_first_order(gmap, cfg.order, cfg.fd_step)

    def family(s):
        c = list(gmap.coeffs) or [0j]
        c[0] = c[0] + s
        return contour.ExteriorMap(gmap.r, gmap.b0, c)

    w1.append(check("chain rule along b1 + s", ward.ward_chain_rule(family, 0.0, cfg.fd_step), 0.0, 1e-6))
    zfar = 5.0 * max(1.0, np.abs(contour.sample(gmap, 1024).z).max())
    w1.append(ward.reconstruct_check(gmap, ORDER_DEFAULTS["reconstruct-g"], zfar, fd_step=cfg.fd_step))
    w1 += ward.equilibrium_check(gmap, cfg.order, cfg.fd_step)
    w1 += ward.kernel_checks(gmap, 3, cfg.fd_step)
    w1 += ward.metric_checks(gmap, cfg.order, cfg.rho, cfg.fd_step)
    zid = 6.0 * max(1.0, np.abs(contour.sample(gmap, 1024).z).max())
    w1 += ward.identity_checks(gmap, zid, zid, ORDER_DEFAULTS["identities"], cfg.rho)
    suites["ward_suite"] = w1

    Om1, Z1, _ = theta.load_theta_input(json.dumps(DEFAULT_THETA_G1))
    Om2, Z2, xi2 = theta.load_theta_input(json.dumps(DEFAULT_THETA))
    suites["theta_core"] = theta.theta_checks(Om1, Z1) + theta.theta_checks(Om2, Z2, xi2)
    inp = partition.InstantonInput(Om2, xi2)
    suites["genus_partition"] = (
        partition.instanton_checks(inp) + partition.genus_ward_checks(inp) + partition.torus_checks()
    )
    checks = [Check(f"{mod}: {c.name}", c.lhs, c.rhs, c.residual, c.tolerance) for mod, cs in suites.items() for c in cs]
    per = {mod: {"passed": sum(c.passed for c in cs), "total": len(cs)} for mod, cs in suites.items()}
    return {"map": _map_summary(gmap, cfg), "suites": per}, checks


COMMANDS = {
    "info": cmd_info,
    "tau": cmd_tau,
    "moments": cmd_moments,
    "faber": cmd_faber,
    "invert-moments": cmd_invert,
    "ward1": cmd_ward1,
    "hessian": cmd_hessian,
    "reconstruct-g": cmd_reconstruct,
    "metric": cmd_metric,
    "identities": cmd_identities,
    "theta": cmd_theta,
    "zinst": cmd_zinst,
    "ward-genus": cmd_ward_genus,
    "fay-torus": cmd_fay,
    "verify-all": cmd_verify_all,
}
CONTOUR_COMMANDS = {"info", "tau", "moments", "faber", "ward1", "hessian", "reconstruct-g", "metric",
                    "identities", "verify-all"}


# ---------------------------------------------------------------- output


def emit_svg(c: contour.SampledContour, path) -> None:
    """Write the sampled contour as one closed path, fitted with a 10% margin.

    The y axis is flipped so that the picture has the usual orientation. The
    coordinate axes are drawn through the origin with ticks at +-1 when they
    fall inside the view.
    """
    x, y = c.z.real, -c.z.imag
    x0, x1, y0, y1 = x.min(), x.max(), y.min(), y.max()
    mx, my = 0.1 * (x1 - x0), 0.1 * (y1 - y0)
    vx, vy, vw, vh = x0 - mx, y0 - my, (x1 - x0) + 2 * mx, (y1 - y0) + 2 * my
    sw = 0.004 * max(vw, vh)
    fs = 0.04 * max(vw, vh)
    pts = " L ".join(f"{a:.6g} {b:.6g}" for a, b in zip(x, y))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx:.6g} {vy:.6g} {vw:.6g} {vh:.6g}">',
        f'<path d="M {pts} Z" fill="none" stroke="black" stroke-width="{sw:.4g}"/>',
    ]
    gray = f'stroke="gray" stroke-width="{sw / 2:.4g}"'
    if vy <= 0 <= vy + vh:
        out.append(f'<line x1="{vx:.6g}" y1="0" x2="{vx + vw:.6g}" y2="0" {gray}/>')
        out.append(f'<text x="{vx + vw - fs:.6g}" y="{-fs / 2:.6g}" font-size="{fs:.4g}">x</text>')
    if vx <= 0 <= vx + vw:
        out.append(f'<line x1="0" y1="{vy:.6g}" x2="0" y2="{vy + vh:.6g}" {gray}/>')
        out.append(f'<text x="{fs / 2:.6g}" y="{vy + fs:.6g}" font-size="{fs:.4g}">y</text>')
    for t in (-1, 1):
        if vx <= t <= vx + vw and vy <= 0 <= vy + vh:
            out.append(f'<line x1="{t}" y1="{-fs / 3:.4g}" x2="{t}" y2="{fs / 3:.4g}" {gray}/>')
            out.append(f'<text x="{t}" y="{fs:.4g}" font-size="{fs:.4g}">{t}</text>')
        if vy <= -t <= vy + vh and vx <= 0 <= vx + vw:
            out.append(f'<line x1="{-fs / 3:.4g}" y1="{-t}" x2="{fs / 3:.4g}" y2="{-t}" {gray}/>')
            out.append(f'<text x="{fs / 2:.4g}" y="{-t}" font-size="{fs:.4g}">{t}i</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def _config_dict(cfg: RunConfig) -> dict:
    return jsonable(asdict(cfg))


def build_report(cfg: RunConfig, result: dict, checks: list[Check]) -> dict:
    passed = sum(c.passed for c in checks)
    return {
        "command": cfg.command,
        "config": _config_dict(cfg),
        "result": jsonable(result),
        "checks": [c.to_dict() for c in checks],
        "summary": {"passed": passed, "failed": len(checks) - passed, "pass": passed == len(checks)},
    }


def _flatten(prefix: str, v, rows: list):
    if isinstance(v, dict):
        for k, x in v.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), x, rows)
    elif isinstance(v, list) and not (len(v) == 2 and all(isinstance(a, float) for a in v)):
        for i, x in enumerate(v):
            _flatten(f"{prefix}[{i}]", x, rows)
    else:
        rows.append((prefix, json.dumps(v)))


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report["checks"]:
        w.writerow(["name", "residual", "tolerance", "pass"])
        for c in report["checks"]:
            w.writerow([c["name"], repr(c["residual"]), repr(c["tolerance"]), c["pass"]])
    else:
        rows: list = []
        _flatten("", report["result"], rows)
        w.writerow(["key", "value"])
        w.writerows(rows)
    return buf.getvalue()


def _parse_complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tauward", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("inputs", nargs="*", help="input JSON file(s); invert-moments takes MOMENTS [SEED_MAP]")
    p.add_argument("--samples", type=int, default=4096, help="boundary samples M (power of two >= 64)")
    p.add_argument("--grid", dest="grid_n", type=int, default=200, help="grid oracle resolution")
    p.add_argument("--fd-step", type=float, default=1e-4)
    p.add_argument("--order", type=int, default=None, help="N or K (default 4; 8 for reconstruct-g, 10 for identities)")
    p.add_argument("--rho", type=float, default=1.5, help="Bergman contour radius, 1 < rho <= 4")
    p.add_argument("--tol", type=float, default=1e-8, help="tolerance for the moment inversion")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--svg", default=None, help="write the sampled contour as SVG")
    p.add_argument("--z", type=_parse_complex, default=None)
    p.add_argument("--w", type=_parse_complex, default=None)
    p.add_argument("--tau", type=_parse_complex, default=None)
    p.add_argument("--both", action="store_true", help="tau: also run the grid oracle")
    return p


def run(cfg: RunConfig, out=None) -> int:
    """Execute one configured command; return the exit status."""
    out = out or sys.stdout
    try:
        cfg.validate()
        result, checks = COMMANDS[cfg.command](cfg)
        if cfg.svg and cfg.command in CONTOUR_COMMANDS:
            emit_svg(contour.sample(_load_map(cfg, required=False), cfg.samples), cfg.svg)
    except (InvalidInput, UnivalenceFailure, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, VerificationError, TauwardError) as exc:
        print(f"verification failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    report = build_report(cfg, result, checks)
    out.write(render(report, cfg.format))
    if not report["summary"]["pass"]:
        print("failed checks:", file=sys.stderr)
        for c in report["checks"]:
            if not c["pass"]:
                print(f"  {c['name']}: residual {c['residual']:.3e} > {c['tolerance']:.1e}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    order = ns.order if ns.order is not None else ORDER_DEFAULTS.get(ns.command, 4)
    cfg = RunConfig(
        ns.command, ns.inputs, ns.samples, ns.grid_n, ns.fd_step, order, ns.rho, ns.tol, ns.format, ns.svg,
        ns.z, ns.w, ns.tau, ns.both,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
