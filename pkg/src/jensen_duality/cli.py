"""Batch front-end: JSON in, JSON (or CSV traces) out.

Every report carries the tool version, an echo of the run configuration and
input document, a provenance block (seeds, family sizes, truncations) and a
``determinism_hash``: the SHA-256 of the canonical JSON of the report with the
``timestamp`` and the hash itself removed.

Exit codes: 0 success (whatever the verdict), 2 input error, 3 invalid test
object, 4 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import platform
import sys
import tempfile
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
import scipy

from . import __version__
from .criteria import (blaschke_test, nontriviality_test, quotient_test, zero_set_dual_test,
                       zero_set_report_dict)
from .duality import (Cone, DualityInstance, build_grid, random_smooth_field, solve_instance)
from .errors import (ConfigurationError, InvalidTestObject, JensenDualityError, SolverError,
                     ValidationError)
from .families import DEFAULT_FAMILY_SIZE, random_pj_case, representing_family
from .functions import Polynomial, function_from_dict, nevanlinna_T
from .geometry import DomainSpec, Kernel, SigmaSpec
from .measures import DEFAULT_QUAD_NODES, measure_from_dict
from .potentials import poisson_jensen
from .sequences import decade_ladder, sequence_from_dict
from .weights import weight_from_dict

TOOL = "jensen-duality"
EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3, 4
DEFAULT_TRUNCATION = 10_000
DEFAULT_TOL = {"blaschke": 1e-3, "pj-verify": 1e-8, "duality": 1e-9, "nevanlinna": 1e-9,
               "quotient": 1e-9, "zero-set": 1e-8, "nontrivial": 1e-6}


@dataclass
class RunConfig:
    """Resolved settings of one command invocation."""

    command: str
    input: str | None = None
    output: str | None = None
    format: str = "json"
    tol: float | None = None
    quad_nodes: int = DEFAULT_QUAD_NODES
    grid_n: int | None = None
    truncate_N: int | None = None
    seed: int | None = None
    kernel: str = "circle"
    cone: str | None = None
    jensen_only: bool = False

    def __post_init__(self):
        if self.tol is None:
            self.tol = DEFAULT_TOL[self.command]
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ConfigurationError("--tol must be positive")
        if self.quad_nodes < 8:
            raise ConfigurationError("--quad-nodes must be at least 8")
        if self.grid_n is not None and self.grid_n < 2:
            raise ConfigurationError("--grid-n must be at least 2")
        if self.truncate_N is not None and self.truncate_N < 1:
            raise ConfigurationError("--truncate-N must be at least 1")
        if self.format not in ("json", "csv"):
            raise ConfigurationError("--format is json or csv")

    def require_seed(self, doc: dict, what: str) -> int:
        """The CLI flag wins over an input ``seed`` field; one of them is mandatory."""
        seed = self.seed if self.seed is not None else doc.get("seed")
        if seed is None:
            raise ConfigurationError(f"{what} is sampled: pass --seed (or a 'seed' input field)")
        return int(seed)

    def echo(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------------
# JSON plumbing


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become the strings ``inf``/``-inf``/``nan``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, complex):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):  # enums
        return obj.value
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True,
                      allow_nan=False)


def determinism_hash(report: dict) -> str:
    body = {k: v for k, v in report.items() if k not in ("timestamp", "determinism_hash")}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


def write_atomic(path: str, text: str) -> None:
    """Write to a temp file in the target directory, then rename over ``path``."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_input(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        if path == "-":
            doc = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read input {path!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"input {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("the input document must be a JSON object")
    return doc


def _need(doc: dict, key: str):
    if key not in doc:
        raise ValidationError(f"input is missing the {key!r} field")
    return doc[key]


# --------------------------------------------------------------------------
# commands: each returns (result, provenance, csv rows, csv header)


def _sequence(d: dict, cfg: RunConfig):
    d = dict(d)
    if "generator" in d and cfg.truncate_N is not None:
        d["N"] = cfg.truncate_N
    return sequence_from_dict(d, DEFAULT_TRUNCATION)


def cmd_blaschke(cfg: RunConfig, doc: dict):
    specs = doc["sequences"] if "sequences" in doc else [_need(doc, "sequence")]
    results, rows, truncations = [], [], []
    for i, spec in enumerate(specs):
        seq = _sequence(spec, cfg)
        rep = blaschke_test(seq, doc.get("r_grid"), tail_tol=cfg.tol)
        results.append({"sequence": seq.to_dict(), **rep.to_dict()})
        truncations.append(seq.truncation)
        rows.extend([i, n, s] for n, s in rep.partial_sums)
    agree = all(r["flags_agree"] for r in results)
    result = results[0] if len(results) == 1 else {"cases": results, "all_flags_agree": agree}
    return result, {"truncations": truncations}, rows, ["sequence", "n", "partial_sum"]


def _polynomial(d) -> Polynomial:
    d = dict(d)
    d.setdefault("kind", "polynomial")
    f = function_from_dict(d)
    if not isinstance(f, Polynomial):
        raise ValidationError("pj-verify needs a polynomial")
    return f


def cmd_pj_verify(cfg: RunConfig, doc: dict):
    prov = {}
    if "random" in doc:
        spec = doc["random"]
        seed = cfg.require_seed(doc, "the random Poisson-Jensen suite")
        rng = np.random.default_rng(seed)
        cases = [random_pj_case(rng, int(spec.get("degree", 5)))
                 for _ in range(int(spec.get("count", 20)))]
        prov = {"seed": seed, "count": len(cases), "degree": int(spec.get("degree", 5))}
    else:
        raw = doc["cases"] if "cases" in doc else [doc]
        cases = [(_polynomial(_need(c, "polynomial")), measure_from_dict(_need(c, "measure")))
                 for c in raw]
    out, rows = [], []
    for i, (p, mu) in enumerate(cases):
        rep = poisson_jensen(p, mu, cfg.quad_nodes, cfg.tol)
        out.append({"polynomial": p.to_dict(), "measure": mu.to_dict(), **rep.to_dict()})
        rows.append([i, rep.lhs, rep.rhs, rep.diff])
    max_diff = max(c["diff"] for c in out) if out else 0.0
    result = {"cases": out, "max_diff": max_diff, "pass": all(c["pass"] for c in out)}
    return result, prov, rows, ["case", "lhs", "rhs", "diff"]


def _field_from_spec(spec: dict, R: float, rng_for: Callable[[], np.random.Generator]):
    """Map an ``x`` spec to ``grid -> node values``."""
    preset = spec.get("preset")
    if "values" in spec:
        vals = np.array([math.inf if v == "inf" else float(v) for v in spec["values"]])
        return lambda grid: vals
    if preset == "constant":
        c = float(spec.get("c", 0.0))
        return lambda grid: np.full(grid.size, c)
    if preset == "log_abs":
        a = complex(*spec.get("a", [0.0, 0.0]))
        with np.errstate(divide="ignore"):
            return lambda grid: np.log(np.abs(grid.z - a))
    if preset == "neg_log_abs":
        cap = spec.get("cap")

        def f(grid):
            with np.errstate(divide="ignore"):
                v = -np.log(np.abs(grid.z))
            if cap is not None:
                v[grid.origin] = float(cap)
            return v
        return f
    if preset == "polynomial":
        terms = spec.get("terms", [])

        def f(grid):
            X, Y = grid.z.real / R, grid.z.imag / R
            return sum((float(c) * X ** int(i) * Y ** int(j) for i, j, c in terms),
                       np.zeros(grid.size))
        return f
    if preset == "random_smooth":
        deg = int(spec.get("degree", 4))
        return lambda grid: random_smooth_field(grid, rng_for(), deg)
    if preset == "majorant":
        fn = function_from_dict(_need(spec, "function"))
        M = weight_from_dict(spec.get("weight", {"preset": "zero"}))

        def f(grid):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.asarray(M(grid.z), dtype=float) - fn.log_abs(grid.z)
        return f
    raise ValidationError(f"unknown x preset {preset!r}")


def cmd_duality(cfg: RunConfig, doc: dict):
    g = doc.get("grid", {})
    R = float(g.get("R", 1.0))
    levels = g.get("n", 8)
    levels = [cfg.grid_n] if cfg.grid_n is not None else (
        [int(n) for n in levels] if isinstance(levels, list) else [int(levels)])
    cone = Cone.parse(cfg.cone or doc.get("cone", "subharmonic"))
    xspec = _need(doc, "x")
    prov = {"levels": levels, "cone": cone.value}
    rng_box = {}

    def rng_for():
        if "rng" not in rng_box:
            seed = cfg.require_seed(doc, "the random_smooth preset")
            prov["seed"] = seed
            rng_box["rng"] = np.random.default_rng(seed)
        return rng_box["rng"]

    field_of = _field_from_spec(xspec, R, rng_for)
    out, rows = [], []
    for n in levels:
        grid = build_grid(R, n)
        inst = DualityInstance(grid, cone, field_of(grid))
        res = solve_instance(inst, cfg.tol)
        s = res.summary()
        out.append({"n": n, "grid": grid.to_dict(), **s, "notes": inst.notes})
        rows.append([n, s["qn_primal"], s["qn_dual"], s["gap"]])
    q = [lv["qn_primal"] for lv in out]
    trend = "nonincreasing" if all(b <= a + 1e-9 for a, b in zip(q, q[1:])) else "mixed"
    result = {"cone": cone.value, "levels": out, "trend": trend,
              "max_gap": max(lv["gap"] for lv in out)}
    return result, prov, rows, ["n", "qn_primal", "qn_dual", "gap"]


def cmd_nevanlinna(cfg: RunConfig, doc: dict):
    f = function_from_dict(_need(doc, "function"))
    r = np.asarray(doc.get("r_grid", decade_ladder(6).tolist()), dtype=float)
    T = np.atleast_1d(nevanlinna_T(f, r, cfg.quad_nodes))
    result = {"function": f.to_dict(), "r": r, "T": T, "max_T": float(T.max()),
              "argmax_r": float(r[int(np.argmax(T))])}
    return result, {"quad_nodes": cfg.quad_nodes}, [[a, b] for a, b in zip(r, T)], ["r", "T"]


def _family(cfg: RunConfig, doc: dict, G: DomainSpec, ladder=None):
    fam = doc.get("family", {})
    seed = cfg.require_seed(fam if "seed" in fam else doc, "the measure family")
    size = int(fam.get("size", DEFAULT_FAMILY_SIZE))
    return representing_family(size, seed, G, ladder), seed, size


def _trace_rows(rep):
    return [[a, b] for a, b in rep.trace]


def cmd_quotient(cfg: RunConfig, doc: dict):
    f = function_from_dict(_need(doc, "function"))
    M = weight_from_dict(doc.get("weight", {"preset": "zero"}))
    fam, seed, size = _family(cfg, doc, DomainSpec.unit_disk())
    rep = quotient_test(f, M, fam, quad_nodes=cfg.quad_nodes, tol=cfg.tol)
    result = {"function": f.to_dict(), "weight": M.to_dict(), **rep.to_dict()}
    prov = {"seed": seed, "family_size": size, "retained": rep.family_size}
    return result, prov, _trace_rows(rep), ["r", "partial_sup"]


def cmd_zero_set(cfg: RunConfig, doc: dict):
    seq = _sequence(_need(doc, "sequence"), cfg)
    M = weight_from_dict(doc.get("weight", {"preset": "zero"}))
    ladder = doc.get("ladder")
    ladder = decade_ladder(5, seq.horizon) if ladder is None else np.asarray(ladder, dtype=float)
    if ladder.size == 0:
        raise ValidationError("radius ladder is empty (truncation horizon too small)")
    fam, seed, size = _family(cfg, doc, seq.domain, ladder)
    res = zero_set_dual_test(seq, M, fam, jensen_only=cfg.jensen_only, ladder=ladder,
                             quad_nodes=cfg.quad_nodes, tol=cfg.tol)
    result = {"sequence": seq.to_dict(), "weight": M.to_dict(), **zero_set_report_dict(res)}
    rows = [[a, "measure", b] for a, b in res["measure_arm"].trace]
    if res["potential_arm"] is not None:
        rows += [[a, "potential", b] for a, b in res["potential_arm"].trace]
    prov = {"seed": seed, "family_size": size, "truncation": seq.truncation,
            "jensen_only": cfg.jensen_only}
    return result, prov, rows, ["r", "arm", "partial_sup"]


def cmd_nontrivial(cfg: RunConfig, doc: dict):
    M = weight_from_dict(_need(doc, "weight"))
    G = DomainSpec.from_dict(doc.get("domain", {}))
    sigma = SigmaSpec.from_dict(doc["sigma"]) if "sigma" in doc else None
    fam, seed, size = _family(cfg, doc, G)
    rep = nontriviality_test(M, fam, G=G, kernel=Kernel.parse(cfg.kernel), sigma=sigma,
                             quad_nodes=cfg.quad_nodes, tol=cfg.tol)
    result = {"weight": M.to_dict(), **rep.to_dict()}
    prov = {"seed": seed, "family_size": size, "retained": rep.family_size}
    return result, prov, _trace_rows(rep), ["r", "partial_inf"]


COMMANDS = {
    "blaschke": (cmd_blaschke, "Blaschke sum, sup of the V_r sums and the zero-set verdict"),
    "pj-verify": (cmd_pj_verify, "both sides of the Poisson-Jensen identity for a polynomial"),
    "duality": (cmd_duality, "discrete q_n by both linear programs on a grid ladder"),
    "nevanlinna": (cmd_nevanlinna, "Nevanlinna characteristic T_f(r) on a radius grid"),
    "quotient": (cmd_quotient, "sup of int u_f - int M over a representing family"),
    "zero-set": (cmd_zero_set, "potential and measure arms of the zero-set criterion"),
    "nontrivial": (cmd_nontrivial, "inf of int M over a Jensen family"),
}


# --------------------------------------------------------------------------


def build_report(cfg: RunConfig, doc: dict, timestamp: str | None = None):
    """Run the command; returns ``(report dict, csv rows, csv header)``."""
    fn = COMMANDS[cfg.command][0]
    result, prov, rows, header = fn(cfg, doc)
    prov = {**prov, "quad_nodes": cfg.quad_nodes, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}
    report = to_jsonable({"tool": TOOL, "version": __version__, "command": cfg.command,
                          "config": cfg.echo(), "input": doc, "provenance": prov,
                          "result": result})
    report["timestamp"] = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat()
    report["determinism_hash"] = determinism_hash(report)
    return report, rows, header


def render(report: dict, rows, header, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# {TOOL} {report['version']} {report['command']}"
              f" determinism_hash={report['determinism_hash']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(to_jsonable(rows))
    return buf.getvalue()


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="input JSON document ('-' for stdin)")
    common.add_argument("--output", "-o", help="report path (written atomically); stdout if omitted")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="json report or csv trace (default json)")
    common.add_argument("--tol", type=float, default=None,
                        help="main tolerance of the command (per-command default)")
    common.add_argument("--quad-nodes", type=int, default=DEFAULT_QUAD_NODES,
                        help=f"quadrature nodes per circle (default {DEFAULT_QUAD_NODES})")
    common.add_argument("--grid-n", type=int, default=None,
                        help="grid nodes per radius; overrides the input grid ladder")
    common.add_argument("--truncate-N", type=int, default=None, dest="truncate_N",
                        help=f"terms of a generator sequence (default {DEFAULT_TRUNCATION})")
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed; mandatory for sampled families and random suites")
    common.add_argument("--kernel", choices=("circle", "disk"), default="circle",
                        help="smoothing kernel for nontrivial (default circle)")
    common.add_argument("--cone", choices=("subharmonic", "harmonic"), default=None,
                        help="cone for duality; overrides the input field")
    common.add_argument("--jensen-only", action="store_true",
                        help="zero-set: restrict the family to members passing the Jensen check")
    parser = argparse.ArgumentParser(prog="jensen-duality", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_, description=help_)
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(ns.command, ns.input, ns.output, ns.format, ns.tol, ns.quad_nodes,
                     ns.grid_n, ns.truncate_N, ns.seed, ns.kernel, ns.cone, ns.jensen_only)


def main(argv=None) -> int:
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        cfg = _config(ns)
        doc = load_input(cfg.input)
        report, rows, header = build_report(cfg, doc)
        text = render(report, rows, header, cfg.format)
        if cfg.output:
            write_atomic(cfg.output, text)
        else:
            sys.stdout.write(text)
    except InvalidTestObject as exc:
        print(f"error: invalid test object: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (JensenDualityError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
