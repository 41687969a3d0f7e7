"""Command-line driver: parameter parsing, check orchestration, reports.

Commands:
    check-qseries   theta quasi-periodicity/inversion and the xi shift identity
    check-rmatrix   R(1) = permutation, Yang-Baxter residual, weight conservation
    check-lemma     alternating sign-sum vanishing (add --lemma1 for the
                    residue-vs-quadrature cross check)
    check-theorem   sign-sum vanishing and weight-reduction equality
    check-qkz       difference-equation residuals for both solution forms
    eval            CSV of solution components

Configuration comes from an optional JSON file (--config, flags override)
with schema {"schema": 1, "command": ..., "q": ..., ...}. Reports are JSON:
{command, params, cases: [{inputs, residual, pass}], max_residual, pass};
identical config and seed give byte-identical report files (no timestamps).
Exit codes: 0 all checks pass, 1 check failure, 2 configuration error,
3 numeric abort (pole or contour failure).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import QKZError
from .freefield import (
    alternating_sign_sum,
    screening_sign_sum,
    screening_sign_sum_scale,
    u_integral_closed,
    u_kernel,
    weight_reduction,
    ScreenSignConfig,
)
from .contours import integrate, u_contour_plan
from .params import ParameterSet, unit_circle_points
from .qkz import check_solution, default_w
from .qseries import qpochhammer, rho, theta, xi
from .spinchain import (
    SpinConfig,
    SpinVector,
    index_to_bits,
    kappa_apply,
    permutation_apply,
    r_apply,
    sector_bits,
    bits_to_index,
)
from .tvweights import PointConfig
from .qkz import tv_solution, freefield_solution

COMMANDS = (
    "check-qseries",
    "check-rmatrix",
    "check-lemma",
    "check-theorem",
    "check-qkz",
    "eval",
)


class ConfigError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qkzint", description="difference-equation and integral-formula checks"
    )
    ap.add_argument("--config", type=Path, default=None, help="JSON config file")
    ap.add_argument("--command", choices=COMMANDS, default=None)
    ap.add_argument("--q", type=float, default=None)
    ap.add_argument("--k", type=float, default=None)
    ap.add_argument("--m", type=int, default=None)
    ap.add_argument("--n", type=int, default=None)
    ap.add_argument("--l", type=int, default=None)
    ap.add_argument("--nodes", type=int, default=None, help="quadrature nodes M")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", type=Path, default=None, help="report output path")
    ap.add_argument("--format", choices=("json", "csv"), default=None)
    ap.add_argument("--z", type=str, default=None,
                    help="'auto' or comma-separated re+imj complex values")
    ap.add_argument("--lemma1", action="store_true",
                    help="with check-lemma: also run the residue-vs-quadrature check")
    ap.add_argument("--solution", choices=("tv", "freefield"), default=None,
                    help="with eval: which solution form to tabulate")
    return ap


_DEFAULTS = {
    "command": None,
    "q": 0.6,
    "k": 1.0,
    "m": 0,
    "n": 2,
    "l": 1,
    "nodes": 256,
    "seed": 7,
    "out": None,
    "format": "json",
    "z": "auto",
    "lemma1": False,
    "solution": "tv",
}


def _load_config(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS)
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if raw.get("schema", 1) != 1:
            raise ConfigError(f"unsupported config schema {raw.get('schema')!r}")
        for key in cfg:
            if key in raw:
                cfg[key] = raw[key]
    for key in cfg:
        val = getattr(args, key if key != "format" else "format", None)
        if val not in (None, False):
            cfg[key] = val
    if cfg["command"] is None:
        raise ConfigError("no command given (use --command or the config file)")
    if cfg["command"] not in COMMANDS:
        raise ConfigError(f"unknown command {cfg['command']!r}")
    return cfg


def _params(cfg: dict, **overrides) -> ParameterSet:
    try:
        return ParameterSet(
            q=overrides.get("q", cfg["q"]),
            k=overrides.get("k", cfg["k"]),
            m=overrides.get("m", cfg["m"]),
            n=overrides.get("n", cfg["n"]),
            l=overrides.get("l", cfg["l"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _z_points(cfg: dict, ps: ParameterSet) -> np.ndarray:
    spec = cfg["z"]
    if spec == "auto":
        return unit_circle_points(ps.n, int(cfg["seed"]), min_gap=0.3)
    if isinstance(spec, str):
        try:
            vals = [complex(x) for x in spec.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad z specification {spec!r}") from exc
    else:
        vals = [complex(v[0], v[1]) for v in spec]
    if len(vals) != ps.n:
        raise ConfigError(f"z list has {len(vals)} entries, need n={ps.n}")
    return np.asarray(vals, dtype=complex)


def _case(inputs: dict, residual: float, tol: float) -> dict:
    return {
        "inputs": inputs,
        "residual": float(residual),
        "pass": bool(residual < tol),
    }


# ---------------------------------------------------------------------------
# Command implementations (each returns a list of case dicts)
# ---------------------------------------------------------------------------

def _run_check_qseries(cfg: dict) -> list:
    ps = _params(cfg)
    rng = np.random.default_rng(int(cfg["seed"]))
    npts = 200
    zs = (0.5 + 1.5 * rng.random(npts)) * np.exp(2j * np.pi * rng.random(npts))
    cases = []
    worst_qp = 0.0
    worst_inv = 0.0
    for z in zs:
        th = theta(z, ps.p)
        scale = max(1.0, abs(th))
        worst_qp = max(worst_qp, abs(theta(ps.p * z, ps.p) + th / z) / scale)
        worst_inv = max(worst_inv, abs(theta(1.0 / z, ps.p) + th / z) / scale)
    cases.append(_case({"identity": "theta quasi-periodicity", "points": npts}, worst_qp, 1e-12))
    cases.append(_case({"identity": "theta inversion", "points": npts}, worst_inv, 1e-12))
    worst_xi = 0.0
    for z in zs:
        lhs = xi(ps.p * z, ps) / xi(z, ps)
        rhs = rho(z, ps) / ps.q**0.5
        worst_xi = max(worst_xi, abs(lhs - rhs) / max(1.0, abs(rhs)))
    cases.append(_case({"identity": "xi shift", "points": npts}, worst_xi, 1e-12))
    return cases


def _run_check_rmatrix(cfg: dict) -> list:
    ps = _params(cfg)
    rng = np.random.default_rng(int(cfg["seed"]))
    cases = []
    # R(1) = permutation, exact
    worst = 0.0
    for idx in range(8):
        v = SpinVector.basis(index_to_bits(idx, 3))
        diff = r_apply(1.0, 1, 2, v, ps) - permutation_apply(1, 2, v)
        worst = max(worst, diff.norm_inf())
    cases.append(_case({"identity": "R(1) = permutation"}, worst, 1e-15))
    # Yang-Baxter on three legs
    worst = 0.0
    for _ in range(50):
        z, w = (0.3 + rng.random(2)) * np.exp(2j * np.pi * rng.random(2))
        for idx in range(8):
            v = SpinVector.basis(index_to_bits(idx, 3))
            lhs = r_apply(z, 1, 2, r_apply(z * w, 1, 3, r_apply(w, 2, 3, v, ps), ps), ps)
            rhs = r_apply(w, 2, 3, r_apply(z * w, 1, 3, r_apply(z, 1, 2, v, ps), ps), ps)
            worst = max(worst, (lhs - rhs).norm_inf())
    cases.append(_case({"identity": "Yang-Baxter", "draws": 50}, worst, 1e-12))
    # weight conservation
    worst = 0.0
    for _ in range(20):
        coeffs = rng.normal(size=8) + 1j * rng.normal(size=8)
        v = SpinVector(3, coeffs)
        out = r_apply(0.7 * np.exp(0.3j), 1, 3, v, ps)
        for ones in range(4):
            before = sum(
                abs(v.component(b)) ** 2 for b in sector_bits(3, ones)
            )
            after = sum(abs(out.component(b)) ** 2 for b in sector_bits(3, ones))
            if before < 1e-12 and after > 1e-12:
                worst = max(worst, after)
    cases.append(_case({"identity": "weight conservation"}, worst, 1e-15))
    return cases


def _run_check_lemma(cfg: dict) -> list:
    rng = np.random.default_rng(int(cfg["seed"]))
    ps = _params(cfg)
    cases = []
    n_max = int(cfg["n"]) if int(cfg["n"]) > 1 else 6
    for n in range(1, n_max + 1):
        worst = 0.0
        for _ in range(100):
            t = (0.3 + rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
            total, scale = alternating_sign_sum(t, ps.q)
            worst = max(worst, abs(total) / max(scale, 1e-300))
        cases.append(_case({"identity": "alternating sign sum", "N": n}, worst, 1e-12))
    if cfg.get("lemma1"):
        cases += _lemma1_cases(cfg, ps, rng)
    return cases


def _lemma1_cases(cfg: dict, ps: ParameterSet, rng) -> list:
    cases = []
    nodes = int(cfg["nodes"])
    for n in (1, 2):
        psc = ps.with_sector(n, 1)
        for bits in sector_bits(n, n - 1):
            nu = SpinConfig.from_zeros(tuple(1 - b for b in bits))
            if len(nu.support) != 1:
                continue
            for mu in (1, -1):
                for eps in (1, -1):
                    worst = 0.0
                    for rep in range(3):
                        z = unit_circle_points(n, int(cfg["seed"]) + 13 * rep)
                        t = np.array(
                            [
                                float(np.real(psc.q)) ** (psc.k + 2)
                                * (0.7 + 0.6 * rng.random())
                                * np.exp(2j * np.pi * rng.random())
                            ]
                        )
                        sc = ScreenSignConfig((eps,), (mu,))
                        pts = PointConfig(z=z, t=tuple(t), u=None)
                        closed = u_integral_closed(nu, sc, pts, psc)
                        plan = u_contour_plan(psc, z, t, mu, nodes=nodes)
                        quad = integrate(
                            plan,
                            lambda u: u_kernel(
                                nu, sc, PointConfig(z=z, t=tuple(t), u=u), psc
                            ),
                            measure="dt/t",
                        )
                        worst = max(
                            worst, abs(closed - quad) / max(1.0, abs(closed))
                        )
                    cases.append(
                        _case(
                            {"identity": "u-integral closed form", "n": n,
                             "support": nu.support, "mu": mu, "eps": eps},
                            worst,
                            1e-8,
                        )
                    )
    return cases


def _run_check_theorem(cfg: dict) -> list:
    ps0 = _params(cfg)
    rng = np.random.default_rng(int(cfg["seed"]))
    cases = []
    for n, l in ((1, 1), (2, 1), (2, 2), (3, 2)):
        ps = ps0.with_sector(n, l)
        for bits in sector_bits(n, l):
            nu = SpinConfig.from_zeros(tuple(1 - b for b in bits))
            worst_vanish = 0.0
            worst_equal = 0.0
            for rep in range(20):
                z = unit_circle_points(n, int(cfg["seed"]) + 101 * rep)
                t = tuple(
                    (0.3 + 1.2 * rng.random()) * np.exp(2j * np.pi * rng.random())
                    for _ in range(l)
                )
                pts = PointConfig(z=z, t=t)
                for mu in product((1, -1), repeat=l):
                    val = screening_sign_sum(nu, mu, pts, ps)
                    if all(x == -1 for x in mu):
                        expected = weight_reduction(nu, pts, ps)
                        worst_equal = max(
                            worst_equal, abs(val - expected) / abs(expected)
                        )
                    else:
                        scale = screening_sign_sum_scale(nu, mu, pts, ps)
                        worst_vanish = max(worst_vanish, abs(val) / max(scale, 1e-300))
            cases.append(
                _case({"identity": "sign-sum vanishing", "n": n, "l": l,
                       "nu": list(nu.bits)}, worst_vanish, 1e-10)
            )
            cases.append(
                _case({"identity": "weight reduction", "n": n, "l": l,
                       "nu": list(nu.bits)}, worst_equal, 1e-9)
            )
    return cases


def _run_check_qkz(cfg: dict) -> list:
    ps = _params(cfg)
    z = _z_points(cfg, ps)
    nodes = int(cfg["nodes"])
    cases = []
    for form in ("tv", "freefield"):
        reports = check_solution(ps, z, form=form, nodes=nodes)
        for rep in reports:
            cases.append(
                _case(
                    {"form": form, "j": rep.j, "trivial": rep.trivial,
                     "nodes": nodes},
                    rep.residual,
                    1e-6,
                )
            )
    return cases


def _run_eval(cfg: dict, out: Path | None) -> tuple:
    ps = _params(cfg)
    z = _z_points(cfg, ps)
    w = default_w(ps, nondegenerate=True)
    if cfg["solution"] == "tv":
        vec = tv_solution(w, z, ps, nodes=int(cfg["nodes"]))
    else:
        vec = freefield_solution(w, z, ps, nodes=int(cfg["nodes"]))
    rows = []
    for bits in sector_bits(ps.n, ps.l):
        val = vec.component(bits)
        rows.append(("".join(str(b) for b in bits), val.real, val.imag))
    return rows, ps


def _write_report(report: dict, out: Path | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out is not None:
        out.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    command = cfg["command"]
    out = Path(cfg["out"]) if cfg["out"] else None
    try:
        if command == "eval":
            rows, ps = _run_eval(cfg, out)
            if cfg["format"] == "csv" or cfg["format"] is None:
                target = out if out is not None else None
                stream = open(target, "w", newline="", encoding="utf-8") if target else sys.stdout
                try:
                    writer = csv.writer(stream)
                    writer.writerow(["component_bits", "real", "imag"])
                    for bits, re_, im_ in rows:
                        writer.writerow([bits, f"{re_:.17g}", f"{im_:.17g}"])
                finally:
                    if target:
                        stream.close()
            else:
                report = {
                    "schema": 1,
                    "command": command,
                    "params": ps.summary(),
                    "components": [
                        {"bits": b, "real": re_, "imag": im_} for b, re_, im_ in rows
                    ],
                }
                _write_report(report, out)
            return 0

        runner = {
            "check-qseries": _run_check_qseries,
            "check-rmatrix": _run_check_rmatrix,
            "check-lemma": _run_check_lemma,
            "check-theorem": _run_check_theorem,
            "check-qkz": _run_check_qkz,
        }[command]
        cases = runner(cfg)
    except QKZError as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return 3

    ps = _params(cfg)
    max_res = max((c["residual"] for c in cases), default=0.0)
    ok = all(c["pass"] for c in cases)
    report = {
        "schema": 1,
        "command": command,
        "version": __version__,
        "seed": int(cfg["seed"]),
        "params": ps.summary(),
        "cases": cases,
        "max_residual": max_res,
        "pass": ok,
    }
    _write_report(report, out)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
