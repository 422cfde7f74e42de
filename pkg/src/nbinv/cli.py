"""Command-line harness: ``nbinv {invert,radius,srp,symmetry,suite}``.

Exit codes: 0 when every property passes, 1 when any property fails (or an
engine precondition is violated), 2 on usage, config or parse errors.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TextIO

from .algebra import gelfand_radius
from .engine import METHODS
from .errors import ConfigInvalid, NBInvError, ParseError
from .matrix import loads
from .verify import (
    ExperimentOutcome,
    check_symmetric_lift,
    instance_label,
    outcomes_jsonl,
    run_trials,
    summarize,
    summary_csv,
    trial_seed,
    write_atomic,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_INSTANCES = [
    {"name": "scalar", "k": 2},
    {"name": "wiener", "degree": 32},
    {"name": "ht", "grid": 32},
    {"name": "swap"},
]

# per-suite defaults; "instances" lists names from the top-level instance table
DEFAULT_SUITES: dict[str, dict[str, Any]] = {
    "inverse_closed": {"trials": 1000, "sizes": [2, 3], "tol": 1e-6,
                       "instances": ["scalar", "wiener", "ht", "swap"]},
    "srp": {"trials": 50, "sizes": [2], "tol": 0.05, "n_max": 1024, "instances": ["wiener"]},
    "symmetric": {"trials": 100, "sizes": [1, 2, 3, 4], "tol": 1e-10, "instances": ["scalar"]},
    "symmetric_control": {"trials": 5, "sizes": [2], "tol": 1e-10, "instances": ["swap"]},
    "involution_bound": {"trials": 8, "sizes": [1], "tol": 1e-9, "samples": 20,
                         "instances": ["scalar", "wiener", "ht", "swap"]},
}

SUITE_KEYS = {
    "inverse_closed": {"trials", "sizes", "tol", "instances"},
    "srp": {"trials", "sizes", "tol", "n_max", "instances"},
    "symmetric": {"trials", "sizes", "tol", "instances"},
    "symmetric_control": {"trials", "sizes", "tol", "instances"},
    "involution_bound": {"trials", "sizes", "tol", "samples", "instances"},
}
INSTANCE_KEYS = {"scalar": {"k", "norm"}, "wiener": {"degree", "band"}, "ht": {"grid"}, "swap": set()}
TOP_KEYS = {"seed", "strict", "out", "format", "instances", "suites"}
FORMATS = ("json", "csv")


def _int(v, what, lo=1):
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise ConfigInvalid(f"{what} must be an integer >= {lo}, got {v!r}")
    return v


def _pos(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
        raise ConfigInvalid(f"{what} must be a positive number, got {v!r}")
    return float(v)


def _unknown(obj: dict, allowed: set, where: str):
    extra = set(obj) - allowed
    if extra:
        raise ConfigInvalid(f"unknown field(s) in {where}: {', '.join(sorted(extra))}")


@dataclass
class SuiteConfig:
    seed: int = 0
    strict: bool = False
    out: str = "nbinv-out"
    format: str = "csv"
    instances: list[dict] = field(default_factory=lambda: copy.deepcopy(DEFAULT_INSTANCES))
    suites: dict[str, dict] = field(default_factory=lambda: copy.deepcopy(DEFAULT_SUITES))

    @classmethod
    def from_json(cls, obj) -> "SuiteConfig":
        """Validate a config document; anything unknown or out of range raises ConfigInvalid."""
        if not isinstance(obj, dict):
            raise ConfigInvalid("config must be a JSON object")
        _unknown(obj, TOP_KEYS, "config")
        cfg = cls()
        if "seed" in obj:
            cfg.seed = _int(obj["seed"], "seed", 0)
        if "strict" in obj:
            if not isinstance(obj["strict"], bool):
                raise ConfigInvalid("strict must be true or false")
            cfg.strict = obj["strict"]
        if "out" in obj:
            if not isinstance(obj["out"], str) or not obj["out"]:
                raise ConfigInvalid("out must be a non-empty path")
            cfg.out = obj["out"]
        if "format" in obj:
            if obj["format"] not in FORMATS:
                raise ConfigInvalid(f"format must be one of {FORMATS}")
            cfg.format = obj["format"]
        if "instances" in obj:
            cfg.instances = [cls._instance(x) for x in _list(obj["instances"], "instances")]
        if "suites" in obj:
            if not isinstance(obj["suites"], dict):
                raise ConfigInvalid("suites must be an object")
            cfg.suites = {}
            for name, body in obj["suites"].items():
                if name not in SUITE_KEYS:
                    raise ConfigInvalid(f"unknown suite {name!r}")
                cfg.suites[name] = cls._suite(name, body)
        cfg.validate()
        return cfg

    @staticmethod
    def _instance(x) -> dict:
        if not isinstance(x, dict) or x.get("name") not in INSTANCE_KEYS:
            raise ConfigInvalid(f"instance needs a name from {sorted(INSTANCE_KEYS)}: {x!r}")
        _unknown(x, INSTANCE_KEYS[x["name"]] | {"name"}, f"instance {x['name']}")
        for key in ("k", "degree", "band", "grid"):
            if key in x:
                _int(x[key], f"{x['name']}.{key}")
        if "norm" in x and x["norm"] not in ("spectral", "sum", "linf"):
            raise ConfigInvalid(f"unknown norm {x['norm']!r}")
        return dict(x)

    @staticmethod
    def _suite(name, body) -> dict:
        if not isinstance(body, dict):
            raise ConfigInvalid(f"suite {name} must be an object")
        _unknown(body, SUITE_KEYS[name], f"suite {name}")
        out = copy.deepcopy(DEFAULT_SUITES[name])
        out.update(body)
        out["trials"] = _int(out["trials"], f"{name}.trials")
        out["sizes"] = [_int(s, f"{name}.sizes") for s in _list(out["sizes"], f"{name}.sizes")]
        out["tol"] = _pos(out["tol"], f"{name}.tol")
        if "n_max" in out:
            n = _int(out["n_max"], f"{name}.n_max", 4)
            if n & (n - 1):
                raise ConfigInvalid(f"{name}.n_max must be a power of two")
        if "samples" in out:
            _int(out["samples"], f"{name}.samples")
        out["instances"] = [str(s) for s in _list(out["instances"], f"{name}.instances")]
        return out

    def validate(self) -> None:
        if not self.suites:
            raise ConfigInvalid("empty suite selection: enable at least one suite")
        names = [x["name"] for x in self.instances]
        if len(set(names)) != len(names):
            raise ConfigInvalid("instance names must be unique")
        for sname, body in self.suites.items():
            for inst in body["instances"]:
                if inst not in names:
                    raise ConfigInvalid(f"suite {sname} refers to undeclared instance {inst!r}")

    def spec(self, name: str) -> dict:
        return next(x for x in self.instances if x["name"] == name)


def _list(v, what) -> list:
    if not isinstance(v, list) or not v:
        raise ConfigInvalid(f"{what} must be a non-empty list")
    return v


def load_config(path: str | None) -> SuiteConfig:
    if path is None:
        return SuiteConfig()
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    return SuiteConfig.from_json(obj)


# ---------------------------------------------------------------------------
# suite execution
# ---------------------------------------------------------------------------

@dataclass
class SuiteResult:
    exit_code: int
    outcomes: list[ExperimentOutcome]
    summary: list[dict]
    verdicts: dict[str, bool]


def _run_one(cfg: SuiteConfig, name: str, body: dict, master: int) -> list[ExperimentOutcome]:
    specs = [cfg.spec(s) for s in body["instances"]]
    if name == "symmetric_control":
        out = []
        for j, spec in enumerate(specs):
            for n in body["sizes"]:
                for o in check_symmetric_lift(spec, n, body["trials"], trial_seed(master, 10_000 + j * 100 + n),
                                              body["tol"]):
                    o.property = name
                    out.append(o)
        return out
    opts: dict[str, Any] = {"tol": body["tol"]}
    if name == "srp":
        opts["n_max"] = body["n_max"]
    if name == "involution_bound":
        opts["samples"] = body["samples"]
    return run_trials(name, specs, body["sizes"], body["trials"], master,
                      halt_on_failure=(name == "inverse_closed"), **opts)


def _verdict(name: str, outcomes: list[ExperimentOutcome], strict: bool) -> bool:
    if name == "symmetric_control" and not strict:
        # the control algebra is not symmetric: detection means at least one failure
        return any(not o.passed for o in outcomes)
    return all(o.passed for o in outcomes)


def _cert_name(o: ExperimentOutcome) -> str:
    stem = re.sub(r"[^A-Za-z0-9_.-]+", "_", f"{o.property}-{o.instance}-n{o.n}-{o.index}")
    return stem.strip("_") + ".json"


def run_suite(cfg: SuiteConfig, out_dir: str | Path | None = None, stream: TextIO | None = None,
              fmt: str | None = None) -> SuiteResult:
    """Run every enabled suite, write outcomes.jsonl, summary.csv and certificates/."""
    stream = stream or sys.stdout
    fmt = fmt or cfg.format
    out_dir = Path(out_dir or cfg.out)
    outcomes: list[ExperimentOutcome] = []
    verdicts = {}
    for k, (name, body) in enumerate(cfg.suites.items()):
        res = _run_one(cfg, name, body, cfg.seed)
        verdicts[name] = _verdict(name, res, cfg.strict)
        outcomes.extend(res)
        failed = [o for o in res if not o.passed]
        if name == "inverse_closed" and failed:
            o = failed[0]
            print(f"inverse_closed FAILURE on {o.instance} n={o.n}: replay with seed {o.seed} ({o.detail})",
                  file=sys.stderr)
    rows = summarize(outcomes)
    for r in rows:
        r["verdict"] = "pass" if verdicts[r["property"]] else "FAIL"
    write_atomic(out_dir / "outcomes.jsonl", outcomes_jsonl(outcomes))
    write_atomic(out_dir / "summary.csv", summary_csv(rows))
    seen = set()
    for o in outcomes:
        key = (o.property, o.instance, o.n)
        if o.certificate is not None and (key not in seen or not o.passed):
            seen.add(key)
            doc = {"outcome": o.to_json(), "certificate": o.certificate}
            write_atomic(out_dir / "certificates" / _cert_name(o), json.dumps(doc, indent=1, sort_keys=True))
        elif not o.passed and o.inputs is not None:
            write_atomic(out_dir / "certificates" / _cert_name(o), json.dumps(o.to_json(), indent=1, sort_keys=True))
    _report(rows, fmt, stream)
    code = EXIT_OK if all(verdicts.values()) else EXIT_FAIL
    return SuiteResult(code, outcomes, rows, verdicts)


def _report(rows: list[dict], fmt: str, stream: TextIO) -> None:
    if fmt == "json":
        stream.write(json.dumps(rows, indent=1, default=str) + "\n")
        return
    cols = ["property", "trials", "passes", "worst_residual", "seed_of_worst", "verdict"]
    stream.write(",".join(cols) + "\n")
    for r in rows:
        stream.write(",".join(str(r[c]) for c in cols) + "\n")


def _only(cfg: SuiteConfig, names: tuple[str, ...]) -> SuiteConfig:
    cfg = copy.deepcopy(cfg)
    cfg.suites = {k: v for k, v in cfg.suites.items() if k in names} or {
        k: copy.deepcopy(DEFAULT_SUITES[k]) for k in names}
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# single-matrix commands
# ---------------------------------------------------------------------------

def _read_matrix(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def invert_command(matrix_file: str, method: str = "thm6", tol: float | None = None,
                   out_dir: str | Path = "nbinv-out", stream: TextIO | None = None) -> int:
    """Invert the matrix in ``matrix_file`` and write ``certificate.json`` to ``out_dir``."""
    stream = stream or sys.stdout
    t = _read_matrix(matrix_file)
    try:
        cert = METHODS[method](t, tol)
    except NBInvError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    path = Path(out_dir) / "certificate.json"
    write_atomic(path, json.dumps(cert.to_json(), indent=1, sort_keys=True))
    print(f"method={cert.method} path={cert.path} residual_left={cert.residual_left:.3e} "
          f"residual_right={cert.residual_right:.3e} certificate={path}", file=stream)
    return EXIT_OK if cert.residual <= cert.tolerance else EXIT_FAIL


def radius_command(matrix_file: str, n_max: int = 1024, stream: TextIO | None = None) -> int:
    stream = stream or sys.stdout
    t = _read_matrix(matrix_file)
    rep = gelfand_radius(t, n_max, label=Path(matrix_file).name)
    out = rep.to_json()
    if t.algebra.ambient() is not None:
        rb = gelfand_radius(t.embed(), n_max)
        out["estimate_b"] = rb.estimate_a
        out["discrepancy"] = abs(rep.estimate_a - rb.estimate_a)
    stream.write(json.dumps(out, indent=1) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON suite config (default: built-in suite)")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="master seed; overrides the config and NBINV_SEED (default 0)")
    common.add_argument("--tol", type=float, metavar="REAL",
                        help="tolerance (default: the instance tolerance, 1e-6 for the scanner)")
    common.add_argument("--out", metavar="DIR", help="output directory (default nbinv-out)")
    common.add_argument("--format", choices=FORMATS, help="format of the printed summary (default csv)")

    p = argparse.ArgumentParser(prog="nbinv", description="Inversion of matrices over Banach algebras.")
    sub = p.add_subparsers(dest="command", required=True)
    inv = sub.add_parser("invert", parents=[common], help="invert one serialized matrix")
    inv.add_argument("matrix", help="matrix JSON file")
    inv.add_argument("--method", choices=sorted(METHODS), default="thm6", help="engine path (default thm6)")
    rad = sub.add_parser("radius", parents=[common], help="Gelfand spectral-radius estimate")
    rad.add_argument("matrix", help="matrix JSON file")
    rad.add_argument("--n-max", type=int, default=1024, help="largest power N (default 1024)")
    sub.add_parser("srp", parents=[common], help="spectral-radius preservation suite")
    sub.add_parser("symmetry", parents=[common], help="symmetric-lift suite with the non-symmetric control")
    sub.add_parser("suite", parents=[common], help="all configured suites")
    return p


def _seed(args, cfg: SuiteConfig) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NBINV_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigInvalid(f"NBINV_SEED must be an integer, got {env!r}") from None
    return cfg.seed


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "invert":
            return invert_command(args.matrix, args.method, args.tol, args.out or "nbinv-out")
        if args.command == "radius":
            return radius_command(args.matrix, args.n_max)
        cfg = load_config(args.config)
        cfg.seed = _seed(args, cfg)
        if args.command == "srp":
            cfg = _only(cfg, ("srp",))
        elif args.command == "symmetry":
            cfg = _only(cfg, ("symmetric", "symmetric_control"))
        if args.tol is not None and "inverse_closed" in cfg.suites:
            cfg.suites["inverse_closed"]["tol"] = _pos(args.tol, "--tol")
        return run_suite(cfg, args.out, fmt=args.format).exit_code
    except (ConfigInvalid, ParseError) as exc:
        print(f"nbinv: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
