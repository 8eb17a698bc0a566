"""Command-line front end.

State files are JSON documents::

    {"dims": [2, 2], "kind": "density", "data": [[[re, im], ...], ...]}
    {"dims": [2, 2, 2], "kind": "pure", "data": [[re, im], ...]}

Density data is row-major. Floats are written with Python's shortest
round-trip repr, so reading a file back reproduces every bit.

Exit codes: 0 product / success, 1 non-product verdict, 2 usage or
validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import matcore, states
from .errors import NotProduct, NumericalError, QProductError
from .partitions import Partition, format_partition, parse_blocks
from .product import bipartite_view, factorize_bipartition, finest_product_partition, is_k_product, is_product_bipartition

EXIT_PRODUCT = 0
EXIT_NOT_PRODUCT = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

STATE_NAMES = ("example1", "example2", "w", "ghz", "bell", "zero", "mixed", "random", "random-pure", "random-product")


class UsageError(QProductError):
    pass


# --- state files ---------------------------------------------------------------


def _pairs(a: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in a]


def state_to_dict(state) -> dict:
    if isinstance(state, states.PureState):
        return {"dims": list(state.dims), "kind": "pure", "data": _pairs(state.amplitudes)}
    return {"dims": list(state.dims), "kind": "density", "data": [_pairs(row) for row in state.matrix]}


def _complex_array(data, shape_desc: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise states.ValidationError(f"{shape_desc} data must be numeric [re, im] pairs") from exc
    if arr.shape[-1:] != (2,):
        raise states.ValidationError(f"{shape_desc} entries must be [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise states.ValidationError(f"{shape_desc} data contains NaN or Inf")
    return arr[..., 0] + 1j * arr[..., 1]


def state_from_dict(doc: dict):
    """Build a PureState or DensityMatrix from a parsed state file."""
    try:
        dims, kind, data = doc["dims"], doc["kind"], doc["data"]
    except (KeyError, TypeError) as exc:
        raise states.ValidationError("state file needs 'dims', 'kind' and 'data'") from exc
    if kind == "pure":
        return states.PureState(dims, _complex_array(data, "pure"))
    if kind == "density":
        mat = _complex_array(data, "density")
        if mat.ndim != 2:
            raise states.ValidationError("density data must be a 2-D array of [re, im] pairs")
        return states.DensityMatrix(dims, mat)
    raise states.ValidationError(f"unknown state kind {kind!r}")


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_state(path, state) -> None:
    Path(path).write_text(dump_json(state_to_dict(state)), encoding="utf-8")


def read_state(path):
    """Read a state file; returns ``(state, sha256 hex digest of the raw bytes)``."""
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise states.ValidationError(f"{path}: not a JSON state file ({exc})") from exc
    return state_from_dict(doc), hashlib.sha256(raw).hexdigest()


def as_density(state) -> states.DensityMatrix:
    return states.density_from_pure(state) if isinstance(state, states.PureState) else state


# --- formatting ----------------------------------------------------------------


def _fmt_complex(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    if im == 0:
        return repr(re)
    sign = "-" if np.signbit(im) else "+"
    return f"{re!r}{sign}{abs(im)!r}j"


def format_matrix(a: np.ndarray) -> str:
    return "\n".join(" ".join(_fmt_complex(z) for z in row) for row in a)


def _floats(a) -> list:
    return [float(x) for x in a]


def _report_dict(report) -> dict:
    doc = {
        "partition": format_partition(report.partition_tested),
        "view": format_partition(report.blocks),
        "verdict": bool(report.is_product),
        "singular_values": _floats(report.singular_values),
        "rank": report.rank,
        "ratio": report.ratio,
    }
    if report.factors is not None:
        doc["reconstruction_error"] = report.reconstruction_error
        doc["factors"] = [
            {"block": format_partition([b]), **state_to_dict(f)} for b, f in zip(report.blocks, report.factors)
        ]
    return doc


# --- commands ------------------------------------------------------------------


def _input_path(args) -> str:
    path = args.input_opt or args.input
    if not path:
        raise UsageError("an input state file is required (positional or --input)")
    return path


def _split_arg(args, n: int) -> list:
    if not args.partition:
        raise UsageError("--partition is required")
    return parse_blocks(args.partition, n)


def _emit(args, doc: dict, text: str) -> None:
    if args.output:
        Path(args.output).write_text(dump_json(doc), encoding="utf-8")
    sys.stdout.write(dump_json(doc) if args.json else text + "\n")


def _parse_dims(text: str | None) -> list:
    if not text:
        raise UsageError("--dims is required for this state")
    try:
        return [int(d) for d in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad --dims {text!r}") from exc


def build_state(args):
    name = args.state
    if name == "example1":
        if args.p is None:
            raise UsageError("--p is required for example1")
        return states.gen_example1(args.p)
    if name == "example2":
        return states.example2_ket()
    if name in ("w", "ghz"):
        n = 3 if args.n is None else args.n
        return states.w_ket(n) if name == "w" else states.ghz_ket(n)
    if name == "bell":
        return states.bell_ket()
    if name == "zero":
        return states.basis_ket(_parse_dims(args.dims), 0)
    if name == "mixed":
        return states.gen_maximally_mixed(_parse_dims(args.dims))
    if name == "random":
        return states.gen_random_density(_parse_dims(args.dims), args.seed)
    if name == "random-pure":
        return states.gen_random_pure(_parse_dims(args.dims), args.seed)
    if name == "random-product":
        if not args.dims:
            raise UsageError("--dims is required for this state")
        groups = [_parse_dims(g) for g in args.dims.split("|")]
        return states.gen_random_product(groups, args.seed)
    raise UsageError(f"unknown state {name!r}; choose from {', '.join(STATE_NAMES)}")


def cmd_gen(args) -> int:
    state = build_state(args)
    text = dump_json(state_to_dict(state))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_PRODUCT


def cmd_realign(args) -> int:
    state, digest = read_state(_input_path(args))
    rho = as_density(state)
    blocks = _split_arg(args, rho.n_subsystems)
    if len(blocks) != 2:
        raise UsageError("realign needs a bipartition")
    z, m, n, _ = bipartite_view(rho, blocks)
    r = matcore.realign(z, m, n)
    doc = {
        "command": "realign",
        "input_digest": digest,
        "view": format_partition(blocks),
        "rows": r.shape[0],
        "cols": r.shape[1],
        "data": [_pairs(row) for row in r],
    }
    _emit(args, doc, format_matrix(r))
    return EXIT_PRODUCT


def cmd_svals(args) -> int:
    state, digest = read_state(_input_path(args))
    rho = as_density(state)
    blocks = _split_arg(args, rho.n_subsystems)
    if len(blocks) != 2:
        raise UsageError("svals needs a bipartition")
    rep = is_product_bipartition(rho, blocks, args.tol)
    doc = {"command": "svals", "input_digest": digest, "tol": args.tol, **_report_dict(rep)}
    _emit(args, doc, " ".join(repr(x) for x in doc["singular_values"]))
    return EXIT_PRODUCT


def _test_or_factorize(args, with_factors: bool) -> int:
    state, digest = read_state(_input_path(args))
    rho = as_density(state)
    blocks = _split_arg(args, rho.n_subsystems)
    command = "factorize" if with_factors else "test"
    doc = {"command": command, "input_digest": digest, "tol": args.tol}
    if len(blocks) == 2:
        if with_factors:
            try:
                rep = factorize_bipartition(rho, blocks, args.tol)
            except NotProduct as exc:
                rep = exc.report
        else:
            rep = is_product_bipartition(rho, blocks, args.tol)
        doc.update(_report_dict(rep))
        verdict = rep.is_product
    else:
        partition = Partition(blocks, rho.n_subsystems)
        res = is_k_product(rho, partition, args.tol)
        verdict = res.verdict
        doc.update(
            {
                "partition": format_partition(partition),
                "verdict": bool(verdict),
                "splits": [_report_dict(r) for r in res.reports],
            }
        )
        if with_factors and res.factors is not None:
            doc["factors"] = [
                {"block": format_partition([b]), **state_to_dict(f)} for b, f in zip(partition.blocks, res.factors)
            ]
    lines = [
        f"partition: {doc['partition']}",
        f"tolerance: {args.tol!r}",
    ]
    if "singular_values" in doc:
        lines.append("singular values: " + " ".join(repr(x) for x in doc["singular_values"]))
        lines.append(f"rank: {doc['rank']}")
        lines.append(f"ratio: {doc['ratio']!r}")
    else:
        for sub in doc["splits"]:
            lines.append(f"  {sub['partition']}: {'product' if sub['verdict'] else 'not product'} (ratio {sub['ratio']!r})")
    lines.append(f"verdict: {'product' if verdict else 'not product'}")
    for f in doc.get("factors", []):
        side = len(f["data"])
        mat = np.array([[complex(*z) for z in row] for row in f["data"]]).reshape(side, side)
        lines.append(f"factor on {f['block']}:")
        lines.append(format_matrix(mat))
    _emit(args, doc, "\n".join(lines))
    return EXIT_PRODUCT if verdict else EXIT_NOT_PRODUCT


def cmd_test(args) -> int:
    return _test_or_factorize(args, with_factors=False)


def cmd_factorize(args) -> int:
    return _test_or_factorize(args, with_factors=True)


def cmd_analyze(args) -> int:
    state, digest = read_state(_input_path(args))
    rho = as_density(state)
    tree = finest_product_partition(rho, args.tol)
    finest = format_partition(tree.partition)
    doc = {
        "command": "analyze",
        "input_digest": digest,
        "tol": args.tol,
        "finest_partition": finest,
        "factors": [
            {"block": format_partition([b]), **state_to_dict(f)} for b, f in zip(tree.partition.blocks, tree.factors)
        ],
        "splits": [
            {"labels": list(labels), **{k: v for k, v in _report_dict(rep).items() if k != "factors"}}
            for labels, rep in tree.splits
        ],
    }
    _emit(args, doc, finest)
    return EXIT_PRODUCT


# --- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qproduct", description="Product-state tests for density matrices via matrix realignment."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, partition=True):
        p.add_argument("input", nargs="?", help="state file (JSON)")
        p.add_argument("-i", "--input", dest="input_opt", metavar="PATH")
        p.add_argument("-o", "--output", metavar="PATH", help="also write the JSON report here")
        p.add_argument("--tol", type=float, default=matcore.DEFAULT_REL_TOL, help="relative rank tolerance")
        p.add_argument("--json", action="store_true", help="print the machine-readable report")
        if partition:
            p.add_argument("-P", "--partition", metavar="STRING", help='e.g. "1|2,3"')

    g = sub.add_parser("gen", help="write a named or random state")
    g.add_argument("--state", required=True, choices=STATE_NAMES)
    g.add_argument("--p", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--dims", metavar="LIST", help='"2,2,3"; for random-product group with "|", e.g. "2,2|3"')
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output", metavar="PATH")
    g.set_defaults(func=cmd_gen)

    for name, func, help_ in (
        ("realign", cmd_realign, "print the realigned matrix of a bipartite view"),
        ("svals", cmd_svals, "singular values of the realigned matrix"),
        ("test", cmd_test, "product test across a partition"),
        ("factorize", cmd_factorize, "product test plus factor extraction"),
    ):
        p = sub.add_parser(name, help=help_)
        common(p)
        p.set_defaults(func=func)

    a = sub.add_parser("analyze", help="finest product partition")
    common(a, partition=False)
    a.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "tol", None) is not None and not 0 < args.tol < 1:
        print("qproduct: error: --tol must lie in (0, 1)", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"qproduct: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (QProductError, OSError) as exc:
        print(f"qproduct: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
