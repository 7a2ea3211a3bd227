"""Command-line front end.

Every subcommand accepts ``--config FILE`` (JSON keyed by option names, with
dashes or underscores); explicit flags override config values, which override
defaults.  Each run writes a JSON record holding the resolved configuration
and the package version.  Exit codes: 0 success, 1 invalid input, 2 numerical
divergence.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from ._io import atomic_write_json, atomic_write_text, dumps, fmt
from .errors import DivergenceError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_DIVERGENCE = 0, 1, 2
# options whose values may start with '-' (ranges such as -20:20)
_RANGE_OPTS = ("--window", "--grid", "--gammas")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _parse_range(s: str, n_parts: int = 2) -> tuple:
    parts = str(s).split(":")
    if len(parts) != n_parts:
        raise ValidationError(f"expected {n_parts} ':'-separated numbers, got {s!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(f"bad range {s!r}") from exc


def _parse_floats(s) -> list:
    if isinstance(s, (list, tuple)):
        return [float(v) for v in s]
    try:
        return [float(v) for v in str(s).split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad number list {s!r}") from exc


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {path}: {exc}") from exc


def _sidecar(out: str) -> Path:
    p = Path(out)
    return p.with_suffix(".json") if p.suffix.lower() != ".json" else p.with_suffix(".meta.json")


DEFAULTS = {
    "design-filter": {"kind": "lp", "p": None, "q": None, "d": None, "alpha": 0.0,
                      "omega_max": None, "n": 65536, "out": "kernel.csv"},
    "apply-filter": {"filter": None, "signal": None, "window": "-20:20", "n": 4001,
                     "out": "y.csv"},
    "gap-test": {"signal": None, "omega": None, "inside": False, "centers": None,
                 "width": None, "d": 2, "plateau": 0.5, "T": None, "tol": 1e-3, "out": None},
    "parseval-check": {"signal": None, "center": None, "width": None, "d": 2,
                       "plateau": 0.5, "T": None, "out": None},
    "predict": {"a": 1.0, "omega_hat": 0.0, "gamma": 8.0, "r": 0.5, "c": 1.0, "alpha": 0.0,
                "signal": None, "window": "-10:10", "n": 2001, "convention": "printed",
                "omega_max": 256.0, "out": "pred.csv"},
    "vgamma-study": {"gammas": "1,2,4,8,16,32", "grid": "-8:8:4096", "a": 1.0,
                     "omega_hat": 0.0, "r": 0.5, "c": 1.0, "alpha": 0.25,
                     "conventions": "printed,proof", "omega_max": 256.0, "n": 65536,
                     "out": "study.json"},
    "selftest": {"only": None, "seed": 12},
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="unbounded-dsp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_, argument_default=None)
        p.add_argument("--config", help="JSON file with option values")
        return p

    p = cmd("design-filter", "synthesize a lowpass/highpass kernel")
    p.add_argument("--kind", choices=["lp", "hp", "lowpass", "highpass"])
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--d", type=int, help="transition smoothness (default: chosen from alpha)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--omega-max", type=float, help="frequency truncation (default 8 q)")
    p.add_argument("--n", type=int)
    p.add_argument("--out")

    p = cmd("apply-filter", "filter a symbolic signal and test the output's gap")
    p.add_argument("--filter", help="filter JSON {p,q,d,kind,alpha}")
    p.add_argument("--signal", help="signal JSON")
    p.add_argument("--window", help="lo:hi")
    p.add_argument("--n", type=int)
    p.add_argument("--out")

    p = cmd("gap-test", "pair a signal with probes supported in a spectral gap")
    p.add_argument("--signal")
    p.add_argument("--omega", type=float, help="gap edge")
    p.add_argument("--inside", action="store_const", const=True,
                   help="gap is (-omega, omega) instead of its complement")
    p.add_argument("--centers", help="comma-separated probe centers (default 1.5,2,3 x omega)")
    p.add_argument("--width", type=float, help="probe half-width (default 0.4 omega)")
    p.add_argument("--d", type=int)
    p.add_argument("--plateau", type=float)
    p.add_argument("--T", type=float, help="fixed time truncation (default adaptive)")
    p.add_argument("--tol", type=float)
    p.add_argument("--out")

    p = cmd("parseval-check", "compare both sides of the Parseval analog")
    p.add_argument("--signal")
    p.add_argument("--center", type=float)
    p.add_argument("--width", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--plateau", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--out")

    p = cmd("predict", "causal prediction of the anti-causal output")
    p.add_argument("--a", type=float)
    p.add_argument("--omega-hat", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--signal")
    p.add_argument("--window")
    p.add_argument("--n", type=int)
    p.add_argument("--convention", choices=["printed", "proof", "as_printed", "proof_variant"])
    p.add_argument("--omega-max", type=float)
    p.add_argument("--out")

    p = cmd("vgamma-study", "profile of the predictor deviation over gamma")
    p.add_argument("--gammas")
    p.add_argument("--grid", help="lo:hi:n")
    p.add_argument("--a", type=float)
    p.add_argument("--omega-hat", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--conventions")
    p.add_argument("--omega-max", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--out")

    p = cmd("selftest", "run the acceptance checks")
    p.add_argument("--only", help="comma-separated criterion ids")
    p.add_argument("--seed", type=int)
    return ap


def _resolve(ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[ns.command])
    if ns.config:
        raw = _load_json(ns.config)
        if not isinstance(raw, dict):
            raise ValidationError("config file must hold a JSON object")
        for k, v in raw.items():
            key = k.replace("-", "_")
            if key not in cfg:
                raise ValidationError(f"unknown config key {k!r} for {ns.command}")
            cfg[key] = v
    for k, v in vars(ns).items():
        if k in ("command", "config") or v is None:
            continue
        cfg[k] = v
    return cfg


def _require(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ValidationError("missing required option(s): " + ", ".join(
            "--" + k.replace("_", "-") for k in missing))


def _record(command: str, cfg: dict, **results) -> dict:
    return {"command": command, "version": __version__, "config": cfg, **results}


# ---------------------------------------------------------------------------
# commands


def _design_filter(cfg, out):
    from .filters import FilterSpec, design_filter, select_smoothness

    _require(cfg, "p", "q")
    d = cfg["d"] if cfg["d"] is not None else select_smoothness(float(cfg["alpha"]))[0]
    cfg["d"] = int(d)
    spec = FilterSpec(float(cfg["p"]), float(cfg["q"]), int(d), cfg["kind"], float(cfg["alpha"]))
    h = design_filter(spec, cfg["omega_max"], int(cfg["n"]))
    h.write_csv(cfg["out"])
    meta = {"p": spec.p, "q": spec.q, "d": spec.d, "kind": spec.kind, "alpha": spec.alpha,
            "rho_l1": h.meta["rho_l1"], "Omega_max": h.meta["omega_max"], "n": h.n,
            "delta": h.delta.real, "dt": h.dt}
    atomic_write_json(_sidecar(cfg["out"]), _record("design-filter", cfg, **meta))
    out.write(f"kernel written to {cfg['out']} (n={h.n}, rho_l1={fmt(meta['rho_l1'])})\n")


def _load_signal(path):
    from .signals import SymbolicSignal

    return SymbolicSignal.from_dict(_load_json(path))


def _apply_filter(cfg, out):
    from .filters import FilterSpec, apply_filter

    _require(cfg, "filter", "signal")
    spec = FilterSpec.from_dict(_load_json(cfg["filter"]))
    x = _load_signal(cfg["signal"])
    window = _parse_range(cfg["window"])
    res = apply_filter(spec, x, window, int(cfg["n"]))
    res.y.write_csv(cfg["out"])
    rep = res.gap_report
    gap = {"max_pairing": rep.max_pairing, "pass": rep.passed, "threshold": rep.threshold,
           "probes": [{"center": p["center"], "pairing_re": p["pairing"].real,
                       "pairing_im": p["pairing"].imag} for p in rep.probes]}
    atomic_write_json(_sidecar(cfg["out"]), _record("apply-filter", cfg, gap_report=gap))
    out.write(f"output written to {cfg['out']}; gap test {'pass' if rep.passed else 'FAIL'} "
              f"(max pairing {fmt(rep.max_pairing)})\n")


def _gap_test(cfg, out):
    from .spectral import gap_test, make_bump

    _require(cfg, "signal", "omega")
    x = _load_signal(cfg["signal"])
    om = float(cfg["omega"])
    inside = bool(cfg["inside"])
    if cfg["centers"] is not None:
        centers = _parse_floats(cfg["centers"])
    else:
        centers = [-0.5 * om, 0.0, 0.5 * om] if inside else [1.5 * om, 2.0 * om, 3.0 * om]
    width = float(cfg["width"]) if cfg["width"] is not None else 0.4 * om
    bank = [make_bump(c, width, int(cfg["d"]), float(cfg["plateau"])) for c in centers]
    rep = gap_test(x, (-om, om), bank, T=cfg["T"], tol=float(cfg["tol"]), inside=inside)
    result = {"probes": [{"center": p["center"], "pairing_re": p["pairing"].real,
                          "pairing_im": p["pairing"].imag} for p in rep.probes],
              "max_pairing": rep.max_pairing, "pass": rep.passed, "threshold": rep.threshold}
    _emit(cfg, out, _record("gap-test", cfg, **result))


def _parseval(cfg, out):
    from .spectral import make_bump, parseval_check

    _require(cfg, "signal", "center", "width")
    x = _load_signal(cfg["signal"])
    f = make_bump(float(cfg["center"]), float(cfg["width"]), int(cfg["d"]), float(cfg["plateau"]))
    res = parseval_check(x, f, T=cfg["T"])
    _emit(cfg, out, _record("parseval-check", cfg, lhs=res.lhs, rhs=res.rhs,
                            abs_err=res.abs_err))


def _emit(cfg, out, rec):
    if cfg.get("out"):
        atomic_write_json(cfg["out"], rec)
    else:
        out.write(dumps(rec))


def _predict(cfg, out):
    from .predictor import PredictorSpec, predict

    _require(cfg, "signal")
    spec = PredictorSpec(float(cfg["a"]), float(cfg["omega_hat"]), float(cfg["gamma"]),
                         float(cfg["r"]), float(cfg["c"]), cfg["convention"])
    x = _load_signal(cfg["signal"])
    window = _parse_range(cfg["window"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        p = predict(spec, x, window, int(cfg["n"]), alpha=float(cfg["alpha"]),
                    omega_max=float(cfg["omega_max"]))
    lines = ["t,true_re,true_im,hat_re,hat_im"]
    for t, a, b in zip(p.t, p.y_true, p.y_hat):
        lines.append(",".join(fmt(v) for v in (t, a.real, a.imag, b.real, b.imag)))
    atomic_write_text(cfg["out"], "\n".join(lines) + "\n")
    atomic_write_json(_sidecar(cfg["out"]), _record(
        "predict", cfg, convention=spec.convention, sup_err=p.sup_err,
        roundoff_floor=p.roundoff_floor, anticausal_mass_fraction=p.anticausal_mass_fraction,
        kernel_mass=p.kernel_mass, warnings=[str(w.message) for w in caught]))
    out.write(f"prediction written to {cfg['out']}; sup_err={fmt(p.sup_err)} "
              f"(round-off floor {fmt(p.roundoff_floor)})\n")


def _vgamma(cfg, out):
    from .predictor import PredictorSpec, vgamma_study

    lo, hi, m = _parse_range(cfg["grid"], 3)
    if m < 2 or m != int(m):
        raise ValidationError("grid size must be an integer >= 2")
    grid = np.linspace(lo, hi, int(m))
    convs = [c.strip() for c in str(cfg["conventions"]).split(",") if c.strip()]
    base = PredictorSpec(float(cfg["a"]), float(cfg["omega_hat"]), 1.0, float(cfg["r"]),
                         float(cfg["c"]))
    base_convs = [PredictorSpec(convention=c).convention for c in convs]
    rows = vgamma_study(_parse_floats(cfg["gammas"]), grid, base, base_convs,
                        alpha=float(cfg["alpha"]), omega_max=float(cfg["omega_max"]),
                        n=int(cfg["n"]))
    atomic_write_json(cfg["out"], _record("vgamma-study", cfg, rows=rows))
    out.write(f"study written to {cfg['out']} ({len(rows)} rows)\n")


def _selftest(cfg, out):
    from . import acceptance

    ids = list(acceptance.CRITERIA)
    if cfg["only"]:
        ids = [s.strip().upper() for s in str(cfg["only"]).split(",")]
        bad = [i for i in ids if i not in acceptance.CRITERIA]
        if bad:
            raise ValidationError(f"unknown criteria: {', '.join(bad)}")
    acceptance.SEED = int(cfg["seed"])
    results = [acceptance.run(i) for i in ids]
    for r in results:
        out.write(r.line() + "\n")
    npass = sum(r.passed for r in results)
    out.write(f"{npass}/{len(results)} criteria passed\n")
    return EXIT_OK if npass == len(results) else EXIT_INVALID


COMMANDS = {
    "design-filter": _design_filter,
    "apply-filter": _apply_filter,
    "gap-test": _gap_test,
    "parseval-check": _parseval,
    "predict": _predict,
    "vgamma-study": _vgamma,
    "selftest": _selftest,
}


def _normalise_argv(argv: Sequence[str]) -> list:
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        a = argv[i]
        if a in _RANGE_OPTS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    argv = sys.argv[1:] if argv is None else argv
    ns = build_parser().parse_args(_normalise_argv(argv))
    try:
        cfg = _resolve(ns)
        code = COMMANDS[ns.command](cfg, out)
        return EXIT_OK if code is None else code
    except DivergenceError as exc:
        sys.stderr.write(f"unbounded-dsp: divergence: {exc}\n")
        return EXIT_DIVERGENCE
    except (ValidationError, OSError) as exc:
        sys.stderr.write(f"unbounded-dsp: error: {exc}\n")
        return EXIT_INVALID


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:  # argparse exits
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
