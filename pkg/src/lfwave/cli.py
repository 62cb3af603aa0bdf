"""``lfwave`` command line.

Exit codes: 0 success, 1 usage error, 2 verification failure or rejected
operation, 3 schema error.  JSON goes to ``-o/--out`` when given and to
stdout otherwise.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import serialization as ser
from .algebra import block_code
from .characters import CosetAddress
from .errors import BasicStepError, MaskError, ParameterError, SchemaError, TreeStructureError
from .mra import MRAFamily, build_family, build_mask, default_assignment
from .reports import Report
from .spectral import elementary_from_tree, validate_elementary
from .transform import inverse_fourier
from .trees import basic_step, build_basic_tree, enumerate_windows, validate_tree
from .verification import DEFAULT_TOL, verify_family, verify_system
from .wavelets import WaveletSystem, build_system, verify_wavelets

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_SCHEMA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_tol() -> float:
    raw = os.environ.get("LFWAVE_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"LFWAVE_TOL is not a number: {raw!r}") from None
    if not tol > 0:
        raise UsageError("LFWAVE_TOL must be positive")
    return tol


def _tol(args) -> float:
    if args.tol is None:
        return default_tol()
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    return args.tol


def parse_levels(text: str) -> tuple[int, ...]:
    """``-1..1`` or ``-1,0,1``."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level range {text!r}") from None


def _emit_json(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit(kind: str, obj, out: str | None) -> None:
    _emit_json(ser.dumps(kind, obj), out)


def _emit_report(rep: Report, report_path: str | None) -> int:
    text = ser.dumps("report", rep)
    sys.stdout.write(text)
    if report_path:
        Path(report_path).write_text(text, encoding="utf-8")
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- tree ---------------------------------------------------------------------


def cmd_tree_basic(args) -> int:
    _emit("tree", build_basic_tree(args.p, args.s, args.N), args.out)
    return EXIT_OK


def cmd_tree_validate(args) -> int:
    rep = validate_tree(ser.load(args.tree, "tree"))
    _emit_json(json.dumps(rep.to_json(), sort_keys=True, indent=2) + "\n", None)
    return EXIT_OK if rep.valid else EXIT_FAIL


def cmd_tree_step(args) -> int:
    t = ser.load(args.tree, "tree")
    new = basic_step(t, args.node, args.target, require_leaf=not args.any_target)
    if not validate_tree(new).valid:
        sys.stderr.write("move produced an invalid tree\n")
        return EXIT_FAIL
    _emit("tree", new, args.out)
    return EXIT_OK


def cmd_tree_windows(args) -> int:
    t = ser.load(args.tree, "tree")
    k = t.N if args.k is None else args.k
    rows = [
        {"node": v, "depth": t.depths[v], "window": [list(b) for b in w]}
        for w, v in enumerate_windows(t, k)
        if t.depths[v] >= k - 1
    ]
    _emit_json(json.dumps({"k": k, "windows": rows}, sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK


# -- set / mask ---------------------------------------------------------------


def cmd_set_build(args) -> int:
    _emit("set", elementary_from_tree(ser.load(args.tree, "tree")), args.out)
    return EXIT_OK


def cmd_set_validate(args) -> int:
    E = ser.load(args.set, "set")
    M = E.M if args.M is None else args.M
    rep = validate_elementary(E, E.N, M)
    _emit_json(json.dumps(rep.to_json(), sort_keys=True, indent=2) + "\n", None)
    return EXIT_OK if rep.valid else EXIT_FAIL


def _read_assignment(path: str, p: int, s: int, N: int) -> dict[CosetAddress, complex]:
    """``{"values": [{"digits": {"-2": [1]}, "re": 0.8, "im": 0.0}, ...]}``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        out = {}
        for item in data["values"]:
            a = CosetAddress.from_mapping(p, s, N, item["digits"])
            out[a] = complex(float(item["re"]), float(item.get("im", 0.0)))
        return out
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"mask values file: {exc}") from None


def _make_mask(args):
    t = ser.load(args.tree, "tree")
    E = elementary_from_tree(t)
    if args.values:
        assign = _read_assignment(args.values, t.p, t.s, t.N)
        return t, build_mask(E, assign, args.A, args.B, tree_id=t.fingerprint())
    A = 0.5 if args.A is None else args.A
    B = 1.6 if args.B is None else args.B
    assign = default_assignment(E, A, B, seed=args.seed, phases=args.phases)
    return t, build_mask(E, assign, A, B, tree_id=t.fingerprint())


def cmd_mask_build(args) -> int:
    _emit("mask", _make_mask(args)[1], args.out)
    return EXIT_OK


# -- families and systems -----------------------------------------------------------


def cmd_mra_build(args) -> int:
    if args.mask:
        t = ser.load(args.tree, "tree")
        mask = ser.load(args.mask, "mask")
        if mask.tree_id is not None and mask.tree_id != t.fingerprint():
            raise MaskError("mask was built from a different tree")
    else:
        t, mask = _make_mask(args)
    _emit("family", build_family(t, mask, args.H), args.out)
    return EXIT_OK


def cmd_mra_verify(args) -> int:
    fam = ser.load(args.family, "family")
    return _emit_report(verify_family(fam, args.depth, _tol(args)), args.report)


def cmd_wavelets_build(args) -> int:
    _emit("system", build_system(ser.load(args.family, "family")), args.out)
    return EXIT_OK


def cmd_wavelets_verify(args) -> int:
    sys_ = ser.load(args.system, "system")
    return _emit_report(verify_wavelets(sys_, _tol(args)), args.report)


def cmd_verify_all(args) -> int:
    sys_ = ser.load(args.system, "system")
    return _emit_report(verify_system(sys_, args.depth, args.levels, _tol(args)), args.report)


def cmd_export_grid(args) -> int:
    obj = ser.load(args.input)
    if isinstance(obj, WaveletSystem):
        sys_, fam = obj, obj.family
    elif isinstance(obj, MRAFamily):
        sys_, fam = None, obj
    else:
        raise SchemaError("export grid needs a family or system document")
    funcs = [("phi", fam.phi_hat), ("dual_phi", fam.dual_phi_hat)]
    if sys_ is not None:
        for l in sorted(sys_.labels, key=lambda l: block_code(l, fam.p)):
            tag = "".join(str(d) for d in l)
            funcs += [(f"psi_{tag}", sys_.psi_hat[l]), (f"dual_psi_{tag}", sys_.dual_psi_hat[l])]
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["function", "lowest_index", "digits", "re", "im"])
        for name, f in funcs:
            F = inverse_fourier(f)
            for row in F.csv_rows(name):
                w.writerow([row[0], -F.rho, *row[1:]])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def _add_mask_flags(p):
    p.add_argument("--values", help="JSON file with per-coset mask values")
    p.add_argument("--A", type=float, help="Riesz floor (default: 0.5, or min |m|^2 with --values)")
    p.add_argument("--B", type=float, help="Riesz ceiling (default: 1.6, or max |m|^2 with --values)")
    p.add_argument("--seed", type=int, default=0, help="seed for generated mask values")
    p.add_argument("--phases", action="store_true", help="generate complex phases too")


def _add_verify_flags(p, levels: bool = False):
    p.add_argument("--depth", type=int, help="shift depth of the finite section (default N+1)")
    if levels:
        p.add_argument("--levels", type=parse_levels, default=(-1, 0, 1), help="dilation levels, e.g. -1..1")
    p.add_argument("--tol", type=float, help="tolerance (default 1e-9, or $LFWAVE_TOL)")
    p.add_argument("--report", help="also write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lfwave", description="Riesz MRAs and biorthogonal wavelets from N-valid trees.")
    sub = ap.add_subparsers(dest="group", required=True)

    tree = sub.add_parser("tree", help="build, validate and edit trees").add_subparsers(dest="cmd", required=True)
    p = tree.add_parser("basic", help="minimal-height N-valid tree")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_tree_basic)
    p = tree.add_parser("validate", help="check N-validity (exit 2 if invalid)")
    p.add_argument("tree")
    p.set_defaults(func=cmd_tree_validate)
    p = tree.add_parser("step", help="move a subtree under another node")
    p.add_argument("tree")
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--any-target", action="store_true", help="allow non-leaf targets (inverse moves)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_tree_step)
    p = tree.add_parser("windows", help="list the k-label windows ending at each node")
    p.add_argument("tree")
    p.add_argument("--k", type=int)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_tree_windows)

    st = sub.add_parser("set", help="elementary sets").add_subparsers(dest="cmd", required=True)
    p = st.add_parser("build", help="coset family generated by a tree")
    p.add_argument("--tree", required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_set_build)
    p = st.add_parser("validate", help="check the elementary-set conditions (exit 2 if not)")
    p.add_argument("set")
    p.add_argument("--M", type=int)
    p.set_defaults(func=cmd_set_validate)

    mk = sub.add_parser("mask", help="masks").add_subparsers(dest="cmd", required=True)
    p = mk.add_parser("build", help="mask on the set generated by a tree")
    p.add_argument("--tree", required=True)
    _add_mask_flags(p)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_mask_build)

    mra = sub.add_parser("mra", help="scaling pairs").add_subparsers(dest="cmd", required=True)
    p = mra.add_parser("build", help="scaling spectrum and its dual")
    p.add_argument("--tree", required=True)
    p.add_argument("--mask", help="mask document; generated from --seed when omitted")
    _add_mask_flags(p)
    p.add_argument("--H", type=int, help="height override (default: tree height)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_mra_build)
    p = mra.add_parser("verify", help="verify a family (exit 2 on failure)")
    p.add_argument("family")
    _add_verify_flags(p)
    p.set_defaults(func=cmd_mra_verify)

    wv = sub.add_parser("wavelets", help="wavelet systems").add_subparsers(dest="cmd", required=True)
    p = wv.add_parser("build", help="shifted masks and wavelet spectra")
    p.add_argument("family")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_wavelets_build)
    p = wv.add_parser("verify", help="mask identities, matrix condition, decay (exit 2 on failure)")
    p.add_argument("system")
    p.add_argument("--tol", type=float)
    p.add_argument("--report")
    p.set_defaults(func=cmd_wavelets_verify)

    vf = sub.add_parser("verify", help="full verification").add_subparsers(dest="cmd", required=True)
    p = vf.add_parser("all", help="every family and wavelet check (exit 2 on failure)")
    p.add_argument("system")
    _add_verify_flags(p, levels=True)
    p.set_defaults(func=cmd_verify_all)

    ex = sub.add_parser("export", help="spatial values").add_subparsers(dest="cmd", required=True)
    p = ex.add_parser("grid", help="CSV of spatial scaling and wavelet values")
    p.add_argument("input", help="family or system document")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_export_grid)
    return ap


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-1..1" as a flag; glue it to its option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--levels" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--levels={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_negative_values(argv))
    try:
        return args.func(args)
    except SchemaError as exc:
        sys.stderr.write(f"schema error: {exc}\n")
        return EXIT_SCHEMA
    except (UsageError, ParameterError, FileNotFoundError, IsADirectoryError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (BasicStepError, MaskError, TreeStructureError) as exc:
        sys.stderr.write(f"rejected: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
