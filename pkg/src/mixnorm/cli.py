"""Command-line driver: ``mixnorm simulate | analyze | witness``.

Every option can also come from a JSON file given with ``--config``; keys
mirror the long flag names with dashes replaced by underscores, and flags on
the command line win over the file.

Exit codes: 0 success, 2 usage, 3 input parse, 4 numerical or constraint
failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import classification, io, rates, witness
from .dynamics import SystemSpec, cos1, evolve
from .errors import MixnormError, ParseError
from .spectral import FULL_LATTICE, ONE_SIDED, WavenumberSet, make_field, sobolev_norm

logger = logging.getLogger("mixnorm")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_FAILURE = 0, 2, 3, 4

DEFAULTS = {
    "simulate": {
        "system": "baker", "steps": 20, "init": "cos1", "a": 0.8, "b": None, "kappa": 1e-3,
        "D": 1e-5, "N": 128, "n_sub": 8, "seed": 0, "seeds": None, "q": "0.5,1,2",
        "workers": None,
    },
    "norms": {"q": "0.5,1,2"},
    "classify": {"q": "1", "radii": None, "threshold": classification.DEFAULT_THRESHOLD,
                 "tail_fraction": classification.DEFAULT_TAIL},
    "rates": {"q": "0.5,1,2", "window": None, "tail_fraction": rates.DEFAULT_TAIL,
              "csv": None},
    "duality": {"q": 1.0, "t0": "0"},
    "signstate": {"q": 1.0, "modes": "1", "c": 0.1, "h": "mixnorm", "state_cap": witness.STATE_CAP},
    "transient": {"q": 1.0, "h": "pow:-1*geom", "delta": 0.25, "c_bound": 1.0},
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Option parsing helpers


def float_list(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def int_list(text) -> list[int]:
    vals = float_list(text)
    if any(v != int(v) for v in vals):
        raise UsageError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def q_list(text) -> list[float]:
    qs = float_list(text)
    if not qs or any(q <= 0 for q in qs):
        raise UsageError(f"q values must be > 0, got {text!r}")
    return qs


def _wavevector(text: str, dims: int) -> tuple[int, ...]:
    parts = text.split("/")
    if len(parts) != dims:
        raise UsageError(f"wavevector {text!r} needs {dims} component(s) separated by '/'")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"wavevector {text!r} is not integer") from None


def parse_init(desc: str, system: str):
    """``cos1`` or a mode list ``k:amp,...``; 2-D wavevectors are written
    ``k1/k2`` and amplitudes may be complex (``0.5+0.1j``).  For the sine
    flow missing conjugate partners are filled in so the field is real."""
    if desc == "cos1":
        return cos1(system)
    sine = system in ("sine_flow", "sineflow")
    dims = 2 if sine else 1
    entries: dict[tuple[int, ...], complex] = {}
    for item in desc.split(","):
        if not item.strip():
            continue
        k, sep, v = item.partition(":")
        if not sep:
            raise UsageError(f"mode {item!r} is not of the form k:amplitude")
        try:
            amp = complex(v.strip())
        except ValueError:
            raise UsageError(f"amplitude {v!r} is not a number") from None
        entries[_wavevector(k.strip(), dims)] = amp
    if not sine:
        return make_field(entries, dims=1, symmetry=ONE_SIDED)
    for k, v in list(entries.items()):
        entries.setdefault(tuple(-c for c in k), v.conjugate())
    return make_field(entries, dims=2, symmetry=FULL_LATTICE, real=True)


def parse_modes(desc: str, dims: int) -> WavenumberSet:
    """``1,2`` (1-D) or ``1/0,0/1`` (2-D) explicit mode set; ``ball:R`` for a
    ball of radius R."""
    if desc.startswith("ball:"):
        return WavenumberSet.ball(int(desc[5:]))
    return WavenumberSet.explicit([_wavevector(p.strip(), dims) for p in desc.split(",") if p.strip()])


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fp:
            cfg = json.load(fp)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path}: {exc.msg}", exc.lineno) from None
    if not isinstance(cfg, dict):
        raise ParseError(f"config {path} must hold a JSON object", 1)
    return {k.replace("-", "_"): v for k, v in cfg.items()}


@dataclass
class ExperimentConfig:
    """Merged options for one command: defaults < config file < flags."""

    command: str
    options: dict = field(default_factory=dict)

    @classmethod
    def merge(cls, command: str, defaults: dict, config: dict, flags: dict) -> ExperimentConfig:
        opts = dict(defaults)
        opts.update(config)
        opts.update({k: v for k, v in flags.items() if v is not None})
        return cls(command, opts)

    def __getitem__(self, key):
        return self.options.get(key)

    def require(self, *keys) -> None:
        missing = [k for k in keys if self.options.get(k) in (None, "")]
        if missing:
            flags = ", ".join("--" + k.replace("_", "-") for k in missing)
            raise UsageError(f"{self.command}: missing required option(s) {flags}")


# ---------------------------------------------------------------------------
# simulate


def system_spec(cfg: ExperimentConfig, seed: int) -> SystemSpec:
    return SystemSpec(
        kind=cfg["system"], a=float(cfg["a"]),
        b=None if cfg["b"] is None else float(cfg["b"]),
        kappa=float(cfg["kappa"]), D=float(cfg["D"]), N=int(cfg["N"]),
        n_sub=int(cfg["n_sub"]), rng_seed=int(seed),
    )


def _simulate_one(cfg: ExperimentConfig, seed: int, out: str) -> str:
    spec = system_spec(cfg, seed)
    f0 = parse_init(str(cfg["init"]), spec.kind)
    steps = int(cfg["periods"] if cfg["periods"] is not None else cfg["steps"])
    series = evolve(spec, f0, steps)
    d = os.path.dirname(os.path.abspath(out))
    os.makedirs(d, exist_ok=True)
    io.write_series(series, out)
    finals = ", ".join(
        f"q={q:g}: {sobolev_norm(series.fields[-1], -q):.6e}" for q in q_list(cfg["q"])
    )
    return f"{out}: {spec.kind}, {steps} steps, {len(series)} records; final mix-norms {finals}"


def cmd_simulate(cfg: ExperimentConfig) -> int:
    cfg.require("out")
    out = str(cfg["out"])
    if cfg["seeds"] is not None:
        seeds = int_list(cfg["seeds"])
        if len(seeds) > 1 and "{seed}" not in out:
            raise UsageError("a seed sweep needs '{seed}' in --out")
        jobs = [(s, out.replace("{seed}", str(s))) for s in seeds]
        with ThreadPoolExecutor(max_workers=cfg["workers"]) as pool:
            lines = list(pool.map(lambda job: _simulate_one(cfg, *job), jobs))
    else:
        lines = [_simulate_one(cfg, int(cfg["seed"]), out.replace("{seed}", str(cfg["seed"])))]
    for line in lines:
        print(line)
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze


def cmd_norms(cfg: ExperimentConfig) -> int:
    cfg.require("in")
    series = io.read_series(cfg["in"])
    qs = q_list(cfg["q"])
    cols = [rates.mixnorm_series(series, q).values for q in qs]
    rows = [[t] + [float(c[i]) for c in cols] for i, t in enumerate(series.times)]
    io.write_csv(rows, ["t"] + [f"q={q:g}" for q in qs], cfg["out"])
    return EXIT_OK


def cmd_classify(cfg: ExperimentConfig) -> int:
    cfg.require("in")
    series = io.read_series(cfg["in"])
    radii = classification.DEFAULT_RADII if cfg["radii"] is None else int_list(cfg["radii"])
    reports = [
        classification.classify_recurrence(
            series, q, radii, float(cfg["tail_fraction"]), float(cfg["threshold"])
        ).to_dict()
        for q in q_list(cfg["q"])
    ]
    if cfg["out"] not in (None, "-"):
        io.write_json(reports[0] if len(reports) == 1 else reports, cfg["out"])
    for r in reports:
        print(f"q={r['q']:g}: {r['verdict']}")
    return EXIT_OK


def cmd_rates(cfg: ExperimentConfig) -> int:
    cfg.require("in")
    series = io.read_series(cfg["in"])
    qs = sorted(q_list(cfg["q"]))
    window = None if cfg["window"] is None else tuple(float_list(cfg["window"]))
    if window is not None and len(window) != 2:
        raise UsageError("--window takes two numbers: start,end")
    tail = float(cfg["tail_fraction"])
    norms = {q: rates.mixnorm_series(series, q) for q in qs}
    fits = {q: rates.fit_decay_rate(norms[q], window) for q in qs}
    cross = [
        rates.cross_q_comparison(series, q, qp, tail).to_dict()
        for i, q in enumerate(qs)
        for qp in qs[i + 1:]
    ]
    lams = [fits[q].lambda_ for q in qs]
    spread = (max(lams) - min(lams)) / max(abs(x) for x in lams) if any(lams) else 0.0
    report = {
        "system": series.system,
        "fits": {f"{q:g}": fits[q].to_dict() for q in qs},
        "relative_spread": spread,
        "cross_q": cross,
    }
    io.write_json(report, cfg["out"])
    if cfg["csv"]:
        rows = [
            [t] + [float(norms[q].values[i]) for q in qs]
            + [math.exp(fits[q].intercept - fits[q].lambda_ * t) for q in qs]
            for i, t in enumerate(series.times)
        ]
        header = ["t"] + [f"q={q:g}" for q in qs] + [f"fit_q={q:g}" for q in qs]
        io.write_csv(rows, header, cfg["csv"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# witness


def _prefix(cfg: ExperimentConfig, mode: str) -> str:
    if cfg["out"]:
        return str(cfg["out"])
    stem = os.path.splitext(str(cfg["in"]))[0]
    return f"{stem}.{mode}"


def _emit_witness(series, w, prefix: str, h=None) -> witness.WitnessVerification:
    os.makedirs(os.path.dirname(os.path.abspath(prefix)), exist_ok=True)
    io.write_field(w.g, prefix + ".witness.ndjson", system=f"witness:{w.mode}")
    ver = witness.verify_witness(series, w, h=h)
    io.write_json({**w.metadata(), "verification": ver.to_dict()}, prefix + ".witness.json")
    io.write_csv(ver.rows, list(ver.header), prefix + ".verify.csv")
    status = "pass" if ver.passed else "FAIL"
    print(f"{prefix}: {w.mode} witness, {len(w.selected_times)} selected time(s), {status}")
    return ver


def cmd_duality(cfg: ExperimentConfig) -> int:
    cfg.require("in")
    series = io.read_series(cfg["in"])
    q = float(cfg["q"])
    t0s = float_list(cfg["t0"])
    prefix = _prefix(cfg, "duality")
    ok = True
    for t0 in t0s:
        w = witness.duality_witness_at(series, t0, q)
        p = prefix if len(t0s) == 1 else f"{prefix}.t0_{t0:g}"
        ok &= _emit_witness(series, w, p).passed
    if len(t0s) > 1:
        header, rows = witness.envelope_dataset(series, q, t0s)
        io.write_csv(rows, header, prefix + ".envelope.csv")
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_signstate(cfg: ExperimentConfig) -> int:
    cfg.require("in")
    series = io.read_series(cfg["in"])
    q = float(cfg["q"])
    h = rates.rate_from_descriptor(str(cfg["h"]), series, q)
    modes = parse_modes(str(cfg["modes"]), series.dims)
    w = witness.sign_state_witness(series, modes, q, h, float(cfg["c"]), int(cfg["state_cap"]))
    ver = _emit_witness(series, w, _prefix(cfg, "signstate"), h)
    return EXIT_OK if ver.passed else EXIT_FAILURE


def cmd_transient(cfg: ExperimentConfig) -> int:
    cfg.require("in")
    series = io.read_series(cfg["in"])
    q, delta = float(cfg["q"]), float(cfg["delta"])
    h = rates.rate_from_descriptor(str(cfg["h"]), series, q)
    shells = witness.shell_decomposition(series, q, h, delta, float(cfg["c_bound"]))
    w = witness.transient_witness(series, shells, q, h, delta)
    ver = _emit_witness(series, w, _prefix(cfg, "transient"), h)
    return EXIT_OK if ver.passed else EXIT_FAILURE


# ---------------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
    p.add_argument("--config", help="JSON file with option values (flags override it)")
    if needs_input:
        p.add_argument("--in", dest="in", help="input series (NDJSON)")
    p.add_argument("--out", help="output path ('-' for stdout where supported)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixnorm", description="Spectral mixing diagnostics.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sim = sub.add_parser("simulate", help="evolve a field and write an NDJSON series")
    _common(sim, needs_input=False)
    sim.add_argument("--system", choices=["baker", "altered_baker", "pulsed_diffusion", "sineflow", "sine_flow"])
    sim.add_argument("--steps", type=int)
    sim.add_argument("--periods", type=int, help="alias of --steps for the sine flow")
    sim.add_argument("--init", help="'cos1' or a mode list such as '1:1,3:0.5'")
    sim.add_argument("--a", type=float)
    sim.add_argument("--b", type=float)
    sim.add_argument("--kappa", type=float)
    sim.add_argument("--D", type=float)
    sim.add_argument("--N", type=int)
    sim.add_argument("--n-sub", dest="n_sub", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--seeds", help="comma-separated seed sweep; --out must contain {seed}")
    sim.add_argument("--workers", type=int)
    sim.add_argument("--q", help="q values for the printed summary")

    ana = sub.add_parser("analyze", help="norms, recurrence verdicts and decay rates")
    asub = ana.add_subparsers(dest="sub", parser_class=_Parser)
    p = asub.add_parser("norms", help="CSV of mix-norms per q")
    _common(p)
    p.add_argument("--q")
    p = asub.add_parser("classify", help="recurrence report (JSON)")
    _common(p)
    p.add_argument("--q")
    p.add_argument("--radii")
    p.add_argument("--threshold", type=float)
    p.add_argument("--tail-fraction", dest="tail_fraction", type=float)
    p = asub.add_parser("rates", help="decay fits and cross-q ratios (JSON, optional CSV)")
    _common(p)
    p.add_argument("--q")
    p.add_argument("--window", help="fit window start,end")
    p.add_argument("--tail-fraction", dest="tail_fraction", type=float)
    p.add_argument("--csv", help="also write norms and fitted curves as CSV")

    wit = sub.add_parser("witness", help="build and verify witness observables")
    wsub = wit.add_subparsers(dest="sub", parser_class=_Parser)
    p = wsub.add_parser("duality")
    _common(p)
    p.add_argument("--q", type=float)
    p.add_argument("--t0", help="comma-separated construction times")
    p = wsub.add_parser("signstate")
    _common(p)
    p.add_argument("--q", type=float)
    p.add_argument("--modes", help="mode set, e.g. '1' or '1/0,0/1' or 'ball:2'")
    p.add_argument("--c", type=float)
    p.add_argument("--h", help="rate descriptor")
    p.add_argument("--state-cap", dest="state_cap", type=int)
    p = wsub.add_parser("transient")
    _common(p)
    p.add_argument("--q", type=float)
    p.add_argument("--h", help="rate descriptor, e.g. 'pow:-1*geom'")
    p.add_argument("--delta", type=float)
    p.add_argument("--c-bound", dest="c_bound", type=float)
    return parser


COMMANDS = {
    ("simulate", None): ("simulate", cmd_simulate),
    ("analyze", "norms"): ("norms", cmd_norms),
    ("analyze", "classify"): ("classify", cmd_classify),
    ("analyze", "rates"): ("rates", cmd_rates),
    ("witness", "duality"): ("duality", cmd_duality),
    ("witness", "signstate"): ("signstate", cmd_signstate),
    ("witness", "transient"): ("transient", cmd_transient),
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        key = (ns.command, getattr(ns, "sub", None))
        if key not in COMMANDS:
            raise UsageError("missing command; see 'mixnorm --help'")
        name, func = COMMANDS[key]
        flags = {k: v for k, v in vars(ns).items() if k not in ("command", "sub", "verbose", "config")}
        cfg = ExperimentConfig.merge(name, DEFAULTS[name], load_config(ns.config), flags)
        logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING)
        return func(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_PARSE
    except witness.HorizonExhausted as exc:
        print(f"error: HorizonExhausted: {exc} ({len(exc.completed)} shell(s) built)", file=sys.stderr)
        return EXIT_FAILURE
    except (MixnormError, ValueError, ArithmeticError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
