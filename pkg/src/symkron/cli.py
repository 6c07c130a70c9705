"""Command line interface.

Exit codes: 0 ok, 1 check failure, 2 size cap, 3 parse error, 4 shape
mismatch, 5 parameter validation.
"""

import argparse
import csv
import io
import json
import sys
import time
import tracemalloc

import numpy as np

from . import multiindex as mi
from .checks import run_checks
from .errors import NotUnitaryError, ParamError, ShapeError, SizeCapError
from .hagedorn import (
    WavePacketBundle,
    harmonic_flow,
    plan_realignment,
    transform_bundle,
    validate_params,
)
from .jsonio import (
    ParseError,
    decode_matrix,
    dumps,
    encode_complex,
    encode_matrix,
    load_json,
    params_from_json,
    params_to_json,
    read_points_csv,
    symvec_from_json,
    symvec_to_json,
)
from .kron_oracle import symmetric_kron_dense
from .limits import MAX_EXPLICIT
from .product import SymKronOperator
from .sampling import make_rng, random_complex_matrix
from .symspace import build_P

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_CAP = 2
EXIT_PARSE = 3
EXIT_SHAPE = 4
EXIT_PARAMS = 5


class CheckFailed(Exception):
    pass


def _fmt(value):
    return format(value, ".17g")


def _emit(text, out=None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_enumerate(args):
    d, n = args.dim, args.order
    if args.redundant:
        if d**n > args.limit:
            raise SizeCapError(f"redundant listing of {d}**{n} = {d**n} entries exceeds --limit {args.limit}")
        entries = list(mi.redundant_enumerate(d, n))
    else:
        entries = mi.lex_enumerate(d, n)
    _emit(json.dumps([list(k) for k in entries]), args.out)


def cmd_basis(args):
    _emit(dumps(build_P(args.dim, args.order).to_json()), args.out)


def _load_params(args):
    p = params_from_json(load_json(args.params))
    return validate_params(p.A, p.B, p.hbar, tol=args.tol)


def cmd_apply(args):
    M = decode_matrix(load_json(args.matrix))
    y = symvec_from_json(load_json(args.vector))
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"matrix must be square, got {M.shape}")
    if y.dim != M.shape[0] or y.order != args.order:
        raise ShapeError(
            f"vector has dim {y.dim}, order {y.order}; matrix has dim {M.shape[0]}, --order {args.order}"
        )
    out = SymKronOperator(M, args.order).apply(y)
    doc = symvec_to_json(out, labels=args.labels)
    if args.check:
        if M.shape[0] ** args.order <= MAX_EXPLICIT:
            ref = symmetric_kron_dense(M, args.order) @ y.data
            scale = np.linalg.norm(ref) or 1.0
            doc["oracle_residual"] = float(np.linalg.norm(out.data - ref) / scale)
        else:
            doc["oracle_residual"] = None
            doc["oracle"] = "capped"
    _emit(dumps(doc), args.out)


def cmd_check(args):
    report = run_checks(args.dim, args.order, args.trials, args.seed, args.inject_nonunitary)
    _emit(dumps(report), args.out)
    if not report["passed"]:
        raise CheckFailed()


def _parse_range(text):
    for sep in (":", "-", ","):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return range(int(lo), int(hi) + 1)
    return range(int(text), int(text) + 1)


def cmd_bench(args):
    rng = make_rng(args.seed)
    d = args.dim
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["dim", "order", "rep", "L_n", "full_dim", "compressed_seconds", "oracle_seconds", "peak_aux_bytes"]
    )
    for n in _parse_range(args.order_range):
        size = mi.level_size(d, n)
        for rep in range(args.reps):
            M = random_complex_matrix(rng, d)
            y = random_complex_matrix(rng, size)[:, 0] if size > 1 else np.array([1.0 + 0j])
            start = time.perf_counter()
            op = SymKronOperator(M, n)
            op.apply(y)
            compressed = time.perf_counter() - start
            tracemalloc.start()
            op.apply(y)
            _, peak = tracemalloc.get_traced_memory()
            tracemalloc.stop()
            if d**n <= MAX_EXPLICIT:
                start = time.perf_counter()
                symmetric_kron_dense(M, n) @ y
                oracle = _fmt(time.perf_counter() - start)
            else:
                oracle = "capped"
            writer.writerow([d, n, rep, size, d**n, _fmt(compressed), oracle, peak])
    _emit(buf.getvalue(), args.out)


def cmd_wp_eval(args):
    p = _load_params(args)
    with open(args.points) as fh:
        x = read_points_csv(fh.read(), p.dim)
    bundle = WavePacketBundle(p, args.order)
    values = bundle.evaluate(x)
    if args.format == "json":
        doc = {
            "dim": p.dim,
            "order": args.order,
            "labels": [list(k) for k in bundle.labels],
            "points": x.tolist(),
            "values": [[encode_complex(z) for z in row] for row in values],
        }
        _emit(dumps(doc), args.out)
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    d = p.dim
    writer.writerow([f"k{j + 1}" for j in range(d)] + [f"x{j + 1}" for j in range(d)] + ["re", "im"])
    for k, row in zip(bundle.labels, values):
        for point, z in zip(x, row):
            writer.writerow(list(k) + [_fmt(v) for v in point] + [_fmt(z.real), _fmt(z.imag)])
    _emit(buf.getvalue(), args.out)


def cmd_wp_transform(args):
    p = _load_params(args)
    if args.unitary:
        U = decode_matrix(load_json(args.unitary))
    else:
        U = plan_realignment(p, args.realign).U
    if U.shape != (p.dim, p.dim):
        raise ShapeError(f"unitary has shape {U.shape}, parameters have dim {p.dim}")
    bundle = WavePacketBundle(p, args.order)
    T = transform_bundle(bundle, U)
    doc = {
        "order": args.order,
        "labels": [list(k) for k in bundle.labels],
        "U": encode_matrix(U),
        "T": encode_matrix(T.matrix),
        "phase": encode_complex(T.phase),
        "sign": T.sign,
        "params": params_to_json(T.params),
    }
    if args.points:
        with open(args.points) as fh:
            x = read_points_csv(fh.read(), p.dim)
        new = WavePacketBundle(T.params, args.order).evaluate(x)
        mapped = T.matrix @ bundle.evaluate(x)
        doc["pointwise_residual"] = float(np.abs(new - T.sign * mapped).max(initial=0.0))
    _emit(dumps(doc), args.out)


def cmd_wp_realign(args):
    p = _load_params(args)
    plan = plan_realignment(p, args.mode)
    doc = {
        "mode": plan.mode,
        "U": encode_matrix(plan.U),
        "A_new": encode_matrix(plan.A_new),
        "B_new": encode_matrix(plan.B_new),
        "phase": encode_complex(plan.phase),
        "sigma": plan.sigma.tolist(),
        "V": plan.V.tolist(),
        "W": encode_matrix(plan.W),
        "max_imag_A_new": float(np.abs(plan.A_new.imag).max()),
    }
    _emit(dumps(doc), args.out)


def cmd_wp_flow(args):
    p = _load_params(args)
    states = []
    for t in args.t:
        A, B = harmonic_flow(p.A, p.B, t)
        states.append({"t": t, "A": encode_matrix(A), "B": encode_matrix(B)})
    _emit(dumps({"dim": p.dim, "hbar": p.hbar, "states": states}), args.out)


def build_parser():
    parser = _Parser(prog="symkron", description="Symmetric Kronecker products and Hagedorn wave packets.")
    parser.add_argument("--config", help="JSON file of option defaults (keys are option names)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subparsers = {}

    def add(name, func, help_text, parent=sub, key=None):
        p = parent.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        subparsers[key or name] = p
        return p

    p = add("enumerate", cmd_enumerate, "list multi-indices of a given order")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--redundant", action="store_true", help="list the d**n redundant enumeration")
    p.add_argument("--limit", type=int, default=4096)
    p.add_argument("--out")

    p = add("basis", cmd_basis, "export the sparse basis matrix P_n as JSON triplets")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--out")

    p = add("apply", cmd_apply, "apply S_n(M) to a compressed vector")
    p.add_argument("--matrix", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--vector", required=True)
    p.add_argument("--check", action="store_true", help="append the dense-oracle residual")
    p.add_argument("--labels", action="store_true", help="include multi-index labels in the output")
    p.add_argument("--out")

    p = add("check", cmd_check, "run randomised invariant suites against the dense oracle")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-nonunitary", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--out")

    p = add("bench", cmd_bench, "time the compressed path against the dense oracle (CSV)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--order-range", required=True, help="e.g. 4:8")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    wp = add("wavepacket", None, "Hagedorn wave packet tools")
    wsub = wp.add_subparsers(dest="action", required=True, parser_class=_Parser)

    p = add("eval", cmd_wp_eval, "evaluate all packets of one order on a point set", wsub, "wavepacket.eval")
    p.add_argument("--params", required=True)
    p.add_argument("--tol", type=float, default=1e-10, help="tolerance for the parameter conditions")
    p.add_argument("--points", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")

    p = add("transform", cmd_wp_transform, "transformation matrix for (AU, BU)", wsub, "wavepacket.transform")
    p.add_argument("--params", required=True)
    p.add_argument("--tol", type=float, default=1e-10, help="tolerance for the parameter conditions")
    p.add_argument("--order", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--unitary")
    group.add_argument("--realign", choices=("polar", "svd"))
    p.add_argument("--points", help="CSV points for a pointwise cross-check")
    p.add_argument("--out")

    p = add("realign", cmd_wp_realign, "unitary realignment making A real", wsub, "wavepacket.realign")
    p.add_argument("--params", required=True)
    p.add_argument("--tol", type=float, default=1e-10, help="tolerance for the parameter conditions")
    p.add_argument("--mode", choices=("polar", "svd"), default="polar")
    p.add_argument("--out")

    p = add("flow", cmd_wp_flow, "harmonic oscillator parameter flow", wsub, "wavepacket.flow")
    p.add_argument("--params", required=True)
    p.add_argument("--tol", type=float, default=1e-10, help="tolerance for the parameter conditions")
    p.add_argument("--t", type=float, nargs="+", required=True)
    p.add_argument("--out")

    return parser, subparsers


class _Parser(argparse.ArgumentParser):
    # usage errors are parse errors (exit 3), not argparse's default 2
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def _parse(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    parser, subparsers = build_parser()
    if known.config:
        config = load_json(known.config)
        if not isinstance(config, dict):
            raise ParseError("config file must hold a JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
        for target in subparsers.values():
            dests = {a.dest for a in target._actions}
            defaults = {k: v for k, v in config.items() if k in dests}
            target.set_defaults(**defaults)
            for action in target._actions:
                if action.dest in defaults:
                    action.required = False
    return parser.parse_args(argv)


def main(argv=None):
    try:
        args = _parse(argv)
        args.func(args)
    except CheckFailed:
        return EXIT_CHECK
    except SizeCapError as exc:
        print(f"symkron: size cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ParseError, json.JSONDecodeError) as exc:
        print(f"symkron: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ShapeError as exc:
        print(f"symkron: shape mismatch: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (ParamError, NotUnitaryError) as exc:
        condition = getattr(exc, "condition", None)
        residual = getattr(exc, "residual", None)
        detail = json.dumps({"condition": condition, "residual": residual, "message": str(exc)})
        print(f"symkron: invalid parameters: {detail}", file=sys.stderr)
        return EXIT_PARAMS
    except OSError as exc:
        print(f"symkron: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
