"""Command-line front end.

Subcommands ``synth``, ``figure``, ``gram``, ``frame``, ``parseval`` and
``verify`` share the global flags ``--abs-tol``, ``--rel-tol``, ``--out``,
``--format`` and ``--config``.  A JSON config file may hold any flag under
its long name (dashes or underscores); flags given on the command line win.

Grids are comma-separated per-axis ``lo:hi:count`` specs with ``count >= 2``.
Numbers accept simple expressions such as ``2*pi`` or ``sqrt(pi)``.

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 numerical convergence failure.  Output files are replaced atomically, so a
failed run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import os
import re
import sys
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import (
    box_function,
    estimate_frame_bounds_1d,
    frame_sum,
    gaussian_function,
    gram_table,
    hermite_function,
    parseval_curve,
    random_gaussians,
    wavelet_gram_table,
)
from .errors import CatalogError, ConvergenceError, GaborLikeError
from .kernel import KERNEL_NAMES, catalog_kernel
from .quadrature import QuadSpec
from .synthesis import FactorizedState, synthesize_grid
from .verification import BOX_CORPUS, CRITERIA, DEFAULT_FIGURE_GRID, figure_field, format_table, run_criteria
from .windows import WINDOW_NAMES, LatticeSpec, make_window

__all__ = ["main", "build_parser", "RunConfig", "GridAxis", "parse_grid", "format_grid", "parse_number",
           "EXIT_OK", "EXIT_VERIFY", "EXIT_CONFIG", "EXIT_NUMERIC"]

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

FRAME_SLACK = 0.05


# -- small parsers --------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
           ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt}


def parse_number(text) -> float:
    """Float from a literal or a small arithmetic expression in ``pi``, ``e`` and ``sqrt``."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
                and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"cannot parse number {text!r}")

    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse number {text!r}") from None
    value = ev(tree)
    if not math.isfinite(value):
        raise ValueError(f"number {text!r} is not finite")
    return value


def _numbers(value) -> tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(parse_number(v) for v in value)
    return tuple(parse_number(v) for v in str(value).split(","))


def _ints(value) -> tuple[int, ...]:
    out = []
    for v in (value if isinstance(value, (list, tuple)) else str(value).split(",")):
        f = parse_number(v)
        if f != int(f):
            raise ValueError(f"expected an integer, got {v!r}")
        out.append(int(f))
    return tuple(out)


def _names(value) -> tuple[str, ...]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    return tuple(str(v).strip() for v in items if str(v).strip())


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid bounds must be finite")
        if self.count < 2:
            raise ValueError(f"grid count must be >= 2, got {self.count}")
        if not self.lo < self.hi:
            raise ValueError(f"grid axis needs lo < hi, got {self.lo:g}:{self.hi:g}")

    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


def parse_grid(text) -> tuple[GridAxis, ...]:
    """``"lo:hi:count,lo:hi:count"`` (or a list of triples) to grid axes."""
    if isinstance(text, (list, tuple)):
        parts = [p if isinstance(p, str) else ":".join(str(v) for v in p) for p in text]
    else:
        parts = str(text).split(",")
    axes = []
    for part in parts:
        fields = part.strip().split(":")
        if len(fields) != 3:
            raise ValueError(f"grid axis {part!r} is not of the form lo:hi:count")
        lo, hi = parse_number(fields[0]), parse_number(fields[1])
        try:
            count = int(fields[2])
        except ValueError:
            raise ValueError(f"grid count {fields[2]!r} is not an integer") from None
        axes.append(GridAxis(lo, hi, count))
    if not axes:
        raise ValueError("empty grid")
    return tuple(axes)


def format_grid(grid) -> str:
    """Inverse of :func:`parse_grid`; ``repr`` keeps floats exact."""
    return ",".join(f"{float(g.lo)!r}:{float(g.hi)!r}:{int(g.count)}" for g in grid)


# -- configuration -------------------------------------------------------------------

_GLOBAL_DEFAULTS = {"abs_tol": 1e-9, "rel_tol": 1e-9, "out": None, "format": "csv"}

_COMMAND_DEFAULTS = {
    "synth": {"kernel": None, "windows": None, "sigma": 1.0, "grid": None, "method": "auto", "truncate": None,
              "a": None, "b": None, "l": None, "k": None, "j": None},
    "figure": {"figure": None, "grid": None},
    "gram": {"windows": None, "kernel": "landau44", "sigma": 1.0, "a": "2*pi", "b": "1", "range": 2,
             "method": "factorized", "mode": "gabor"},
    "frame": {"windows": None, "sigma": 1.0, "a": "2*pi", "b": "1", "basis_size": 128, "truncation": 10,
              "sum_n": 8, "corpus": 10, "seed": 7, "allow_unconverged": False},
    "parseval": {"windows": None, "sigma": 1.0, "a": "2*pi", "b": "1", "n": 3, "function": "gaussian"},
    "verify": {"only": None},
}


@dataclass
class RunConfig:
    """Fully resolved options of one invocation.

    ``options`` holds the command-specific values after defaults, config
    file and flags have been merged (in that order of precedence).
    """

    command: str
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    out: str | None = None
    format: str = "csv"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        QuadSpec(abs_tol=self.abs_tol, rel_tol=self.rel_tol)

    @property
    def spec(self) -> QuadSpec:
        return QuadSpec(abs_tol=self.abs_tol, rel_tol=self.rel_tol)

    def get(self, key):
        return self.options.get(key)

    def require(self, key):
        value = self.options.get(key)
        if value is None:
            raise ValueError(f"{self.command} needs --{key.replace('_', '-')}")
        return value


def load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValueError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def resolve_config(command: str, flags: dict, file_values: dict | None = None) -> RunConfig:
    """Merge defaults, config-file values and explicit flags, then validate."""
    file_values = dict(file_values or {})
    file_values.pop("config", None)
    known = set(_GLOBAL_DEFAULTS) | set(_COMMAND_DEFAULTS[command])
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise ValueError(f"unknown config keys for {command}: {', '.join(unknown)}")
    merged = {**_GLOBAL_DEFAULTS, **_COMMAND_DEFAULTS[command], **file_values,
              **{k: v for k, v in flags.items() if k != "config"}}
    fmt = merged.pop("format")
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    cfg = RunConfig(command, parse_number(merged.pop("abs_tol")), parse_number(merged.pop("rel_tol")),
                    merged.pop("out"), fmt, merged)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    o = cfg.options
    if o.get("kernel") is not None and o["kernel"] not in KERNEL_NAMES:
        raise CatalogError("kernel", o["kernel"], KERNEL_NAMES)
    if o.get("windows") is not None:
        o["windows"] = _names(o["windows"])
        for w in o["windows"]:
            make_window(w)
    if o.get("grid") is not None:
        o["grid"] = parse_grid(o["grid"])
    for key in ("sigma", "truncate"):
        if o.get(key) is not None:
            o[key] = parse_number(o[key])
    for key in ("range", "basis_size", "truncation", "sum_n", "corpus", "seed", "n", "figure"):
        if o.get(key) is not None:
            (o[key],) = _ints(o[key])
    for key in ("a", "b"):
        if o.get(key) is not None:
            o[key] = _numbers(o[key])
    for key in ("l", "k", "j"):
        if o.get(key) is not None:
            o[key] = _ints(o[key])
    if o.get("only") is not None:
        o["only"] = _names(o["only"])


# -- output ------------------------------------------------------------------------------


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary sibling and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".part", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: RunConfig, text: str, stdout):
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        stdout.write(text if text.endswith("\n") else text + "\n")


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _table_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, (str, int)) else "%.17g" % v for v in row])
    return buf.getvalue()


def _per_dim(values, d, name):
    if len(values) == 1:
        return values * d
    if len(values) != d:
        raise ValueError(f"--{name} needs 1 or {d} values, got {len(values)}")
    return values


def _state(cfg) -> FactorizedState:
    return FactorizedState.of(*cfg.require("windows"), sigma=cfg.get("sigma") or 1.0)


def _lattice(cfg, d) -> LatticeSpec:
    return LatticeSpec.gabor(_per_dim(cfg.get("a"), d, "a"), _per_dim(cfg.get("b"), d, "b"))


# -- commands -------------------------------------------------------------------------------


def cmd_synth(cfg: RunConfig, stdout=sys.stdout) -> int:
    """Sample ``Psi_o`` (or one lattice element of it) on a grid."""
    kernel = catalog_kernel(cfg.require("kernel"))
    state = _state(cfg)
    grid = cfg.require("grid")
    d = state.dim
    if len(grid) != d:
        raise ValueError(f"grid has {len(grid)} axes but {d} windows were given")
    meta = {"grid": format_grid(grid)}
    if cfg.get("j") is not None:
        k = cfg.get("k") or (0,) * d
        state = state.wavelet_atoms(cfg.get("j"), k)
        meta.update(element="wavelet", j=list(cfg.get("j")), k=list(k))
    elif cfg.get("l") is not None or cfg.get("k") is not None:
        lattice = _lattice(cfg, d) if cfg.get("a") else LatticeSpec.gabor(2 * math.pi, 1.0, d)
        l, k = cfg.get("l") or (0,) * d, cfg.get("k") or (0,) * d
        state = state.gabor_atoms(lattice, l, k)
        meta.update(element="gabor", a=list(lattice.a), b=list(lattice.b), l=list(l), k=list(k))
    fld = synthesize_grid(kernel, state, [g.nodes() for g in grid], cfg.spec, cfg.get("method"),
                          cfg.get("truncate"))
    fld.meta.update(meta)
    _emit(cfg, fld.to_csv() if cfg.format == "csv" else fld.to_json() + "\n", stdout)
    return EXIT_OK


def cmd_figure(cfg: RunConfig, stdout=sys.stdout) -> int:
    """Data of figure 1..4 on its preset (or a user) grid."""
    n = cfg.require("figure")
    grid = cfg.get("grid")
    triples = DEFAULT_FIGURE_GRID if grid is None else tuple((g.lo, g.hi, g.count) for g in grid)
    if len(triples) != 2:
        raise ValueError("figures are two-dimensional")
    fld = figure_field(n, triples)
    _emit(cfg, fld.to_csv() if cfg.format == "csv" else fld.to_json() + "\n", stdout)
    return EXIT_OK


def cmd_gram(cfg: RunConfig, stdout=sys.stdout) -> int:
    """Gram table over ``max(|l|, |k|) <= range``; orthonormality is reported, not enforced."""
    state = _state(cfg)
    n, method, mode = cfg.get("range"), cfg.get("method"), cfg.get("mode")
    if n < 0:
        raise ValueError("--range must be >= 0")
    if mode == "wavelet":
        if method != "factorized":
            raise ValueError("wavelet mode has a single (exact piecewise) method; drop --method")
        results = {"exact": wavelet_gram_table(state, n, cfg.spec)}
    elif mode == "gabor":
        lattice = _lattice(cfg, state.dim)
        methods = {"factorized": ["factorized"], "direct": ["direct"], "both": ["factorized", "direct"]}.get(method)
        if methods is None:
            raise ValueError(f"--method must be factorized, direct or both, got {method!r}")
        kernel = catalog_kernel(cfg.get("kernel"))
        results = {m: gram_table(state, lattice, n, m, kernel, cfg.spec) for m in methods}
    else:
        raise ValueError(f"--mode must be gabor or wavelet, got {mode!r}")
    report = {"command": "gram", "mode": mode, "windows": list(state.labels), "range": n,
              "results": {m: g.to_dict() for m, g in results.items()},
              "max_deviation": {m: g.max_deviation for m, g in results.items()}}
    if len(results) == 2:
        report["max_discrepancy"] = float(np.max(np.abs(results["factorized"].values - results["direct"].values)))
    if cfg.format == "json":
        _emit(cfg, _json(report), stdout)
    else:
        d = state.dim
        first = "j" if mode == "wavelet" else "l"
        header = ["method"] + [f"{first}{i + 1}" for i in range(d)] + [f"k{i + 1}" for i in range(d)] + ["re", "im", "abs"]
        rows = []
        for m, g in results.items():
            for i, a in enumerate(g.first):
                for jj, b in enumerate(g.second):
                    v = complex(g.values[i, jj])
                    rows.append([m, *a, *b, v.real, v.imag, abs(v)])
        _emit(cfg, _table_csv(header, rows), stdout)
    return EXIT_OK


def _frame_corpus(d, count, seed):
    fns = random_gaussians(np.random.default_rng(seed), d, count)
    if d == 2:
        fns += [box_function(c, label=f"box#{i}") for i, c in enumerate(BOX_CORPUS)]
    return fns


def cmd_frame(cfg: RunConfig, stdout=sys.stdout, stderr=sys.stderr) -> int:
    """Per-dimension frame bounds, their products, and corpus frame sums against them.

    The report is always written; the exit code is 3 when a bound estimate
    is unconverged, unless ``allow_unconverged`` is set.
    """
    names = cfg.require("windows")
    d = len(names)
    a, b = _per_dim(cfg.get("a"), d, "a"), _per_dim(cfg.get("b"), d, "b")
    sigma = cfg.get("sigma") or 1.0
    dims, notes = [], []
    for j, name in enumerate(names):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            fb = estimate_frame_bounds_1d(make_window(name, sigma), a[j], b[j], cfg.get("basis_size"),
                                          cfg.get("truncation"), cfg.spec)
        for w in caught:
            msg = f"dimension {j + 1}: {w.message}"
            notes.append(msg)
            print(f"warning: {msg}", file=stderr)
        dims.append(fb)
    lower, upper = math.prod(f.lower for f in dims), math.prod(f.upper for f in dims)
    band = (lower - FRAME_SLACK, upper + FRAME_SLACK)
    state = FactorizedState.of(*names, sigma=sigma)
    lattice = LatticeSpec.gabor(a, b)
    sums = []
    for f in _frame_corpus(d, cfg.get("corpus"), cfg.get("seed")):
        s = frame_sum(f, state, lattice, cfg.get("sum_n"), cfg.spec, report=True)
        sums.append({"label": f.label, "value": s.value, "shell_fraction": s.shell_fraction,
                     "inside": band[0] <= s.value <= band[1]})
    converged = all(f.converged for f in dims)
    report = {
        "command": "frame",
        "windows": list(names),
        "per_dimension": [f.to_dict() for f in dims],
        "product_lower": lower,
        "product_upper": upper,
        "slack": FRAME_SLACK,
        "sum_truncation": cfg.get("sum_n"),
        "sums": sums,
        "all_inside": all(s["inside"] for s in sums),
        "converged": converged,
        "warnings": notes,
    }
    if cfg.format == "json":
        text = _json(report)
    else:
        text = _table_csv(["label", "value", "shell_fraction", "inside", "lower", "upper"],
                          [[s["label"], s["value"], s["shell_fraction"], str(s["inside"]).lower(), band[0], band[1]]
                           for s in sums])
    _emit(cfg, text, stdout)
    if not converged and not cfg.get("allow_unconverged"):
        print("error: frame-bound estimate did not converge (use --allow-unconverged to accept)", file=stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _parseval_function(name, d):
    if name == "gaussian":
        return gaussian_function(np.resize([0.2, -0.3], d), np.eye(d) + 0.2 * (1 - np.eye(d)),
                                 np.resize([0.5, -0.4], d))
    if name == "hermite":
        return hermite_function(np.resize([1, 2], d))
    if name.startswith("box") and name[3:].isdigit() and int(name[3:]) < len(BOX_CORPUS):
        if d != 2:
            raise ValueError("the box corpus functions are two-dimensional")
        return box_function(BOX_CORPUS[int(name[3:])], label=name)
    valid = ["gaussian", "hermite"] + [f"box{i}" for i in range(len(BOX_CORPUS))]
    raise CatalogError("test function", name, valid)


def cmd_parseval(cfg: RunConfig, stdout=sys.stdout) -> int:
    """Normalised partial Parseval sums for truncations ``0..n``."""
    state = _state(cfg)
    f = _parseval_function(cfg.get("function"), state.dim)
    n = cfg.get("n")
    if n < 0:
        raise ValueError("--n must be >= 0")
    curve = parseval_curve(f, state, _lattice(cfg, state.dim), n, cfg.spec)
    report = {"command": "parseval", "windows": list(state.labels), "function": cfg.get("function"),
              "curve": curve, "final": curve[-1],
              "monotone": all(y >= x - 1e-12 for x, y in zip(curve, curve[1:]))}
    text = _json(report) if cfg.format == "json" else _table_csv(["n", "value"], list(enumerate(curve)))
    _emit(cfg, text, stdout)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, stdout=sys.stdout) -> int:
    """Run the acceptance checks and print a pass/fail table."""
    results = run_criteria(cfg.get("only"), cfg.spec, echo=lambda s: print(s, file=stdout, flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed", file=stdout)
    if cfg.out:
        summary = [{"number": r.number, "name": r.name, "passed": r.passed, "note": r.note,
                    "subs": [{"label": s.label, "passed": s.passed, "value": s.value, "bound": s.bound}
                             for s in r.subs]} for r in results]
        write_atomic(cfg.out, _json({"command": "verify", "criteria": summary}) if cfg.format == "json"
                     else format_table(results) + "\n")
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "figure": cmd_figure,
    "gram": cmd_gram,
    "frame": cmd_frame,
    "parseval": cmd_parseval,
    "verify": cmd_verify,
}


# -- argument parsing ---------------------------------------------------------------------


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("global options")
    g.add_argument("--abs-tol", help="absolute quadrature tolerance (default 1e-9)")
    g.add_argument("--rel-tol", help="relative quadrature tolerance (default 1e-9)")
    g.add_argument("--out", help="output file (default: standard output)")
    g.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    g.add_argument("--config", help="JSON file with default values for any flag")
    return p


def _window_flags(p, lattice=True):
    p.add_argument("--windows", help=f"comma-separated windows, one per dimension ({', '.join(WINDOW_NAMES)})")
    p.add_argument("--sigma", help="Gaussian window width")
    if lattice:
        p.add_argument("--a", help="modulation step(s), e.g. 2*pi (default 2*pi)")
        p.add_argument("--b", help="translation step(s) (default 1)")


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="gaborlike", parents=[common],
                                     description="Gabor-like bases via linear canonical transformations.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    kw = {"parents": [common], "argument_default": argparse.SUPPRESS}

    p = sub.add_parser("synth", help="sample Psi_o on a grid", **kw)
    p.add_argument("--kernel", help=f"catalog kernel ({', '.join(KERNEL_NAMES)})")
    _window_flags(p)
    p.add_argument("--grid", help='per-axis "lo:hi:count", comma separated')
    p.add_argument("--method", choices=("auto", "quadrature"))
    p.add_argument("--truncate", help="radius for infinite window supports (quadrature method)")
    p.add_argument("--l", help="modulation indices of a Gabor-like element")
    p.add_argument("--k", help="translation indices of a lattice element")
    p.add_argument("--j", help="dilation indices of a wavelet-like element")

    p = sub.add_parser("figure", help="emit figure data (1-4)", **kw)
    p.add_argument("figure", nargs="?", help="figure number 1-4")
    p.add_argument("--grid", help='override the default "-8:8:161,-8:8:161"')

    p = sub.add_parser("gram", help="Gram table report", **kw)
    _window_flags(p)
    p.add_argument("--kernel", help="kernel used by the direct method (default landau44)")
    p.add_argument("--range", help="index range n: max(|l|,|k|) <= n (default 2)")
    p.add_argument("--method", choices=("factorized", "direct", "both"))
    p.add_argument("--mode", choices=("gabor", "wavelet"))

    p = sub.add_parser("frame", help="frame bounds and frame sums report", **kw)
    _window_flags(p)
    p.add_argument("--basis-size", help="Hermite basis size M (default 128)")
    p.add_argument("--truncation", help="lattice truncation N of the bound estimate (default 10)")
    p.add_argument("--sum-n", help="lattice truncation of the frame sums (default 8)")
    p.add_argument("--corpus", help="number of random Gaussian test functions (default 10)")
    p.add_argument("--seed", help="seed of the random test functions (default 7)")
    p.add_argument("--allow-unconverged", action="store_true", help="exit 0 even if bounds are unconverged")

    p = sub.add_parser("parseval", help="Parseval partial sums", **kw)
    _window_flags(p)
    p.add_argument("--n", help="largest truncation (default 3)")
    p.add_argument("--function", help="gaussian, hermite, box0, box1 or box2 (default gaussian)")

    p = sub.add_parser("verify", help="run the acceptance checks", **kw)
    p.add_argument("--only", action="append",
                   help=f"criteria to run (names or numbers, repeatable): {', '.join(CRITERIA)}")
    return parser


_NEGATIVE = re.compile(r"^-(\d|\.\d|pi\b|e\b|sqrt\()")
_FLAG_ACTIONS = {"--allow-unconverged", "-h", "--help"}


def _join_negative_values(argv):
    # argparse reads "-6:6:121" as an option; glue such values to their flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and tok not in _FLAG_ACTIONS and i + 1 < len(argv)
                and _NEGATIVE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    flags = vars(ns)
    command = flags.pop("command")
    if "only" in flags:
        flags["only"] = [t for item in flags["only"] for t in _names(item)]
    try:
        file_values = load_config_file(flags["config"]) if "config" in flags else {}
        cfg = resolve_config(command, flags, file_values)
        if command == "frame":
            return cmd_frame(cfg, stdout, stderr)
        return COMMANDS[command](cfg, stdout)
    except ConvergenceError as exc:
        print(f"gaborlike: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (GaborLikeError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"gaborlike: error: {msg}", file=stderr)
        return EXIT_CONFIG
