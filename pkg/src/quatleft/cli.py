"""Command-line front end.

    quatleft solve MATRIX.json [--json|--text] [--tol T] [--starts N] [--seed S] [--max-iter K] [--timing]
    quatleft charpoly MATRIX.json [--full]
    quatleft verify MATRIX.json --lambda q0,q1,q2,q3 [--tol T]
    quatleft forms [--check] [--samples N]

Exit codes: 0 success / accepted, 1 input error, 2 solver found nothing it
could certify, 3 verify rejected the proposed eigenvalue.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction

import numpy as np

from .charpoly import build_char_system, full_generalized_charpoly
from .errors import NoConvergence
from .quaternion import Quaternion, QuaternionMatrix, format_quaternion
from .representation import (
    N_FORMS,
    check_conjugations,
    check_determinants,
    check_form,
    enumerate_forms,
)
from .solver import SolveConfig, left_spectrum_report, verify_left_eigenvalue

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2
EXIT_REJECT = 3


class InputError(Exception):
    pass


_ENTRIES = '"entries"'
_M_KEY = '"m"'


# -- input -----------------------------------------------------------------


def _line_of(text: str, needle: str) -> int:
    """Line of the first occurrence of needle, ignoring whitespace."""
    compact = needle.replace(" ", "")
    pattern = r"\s*".join(re.escape(ch) for ch in compact)
    m = re.search(pattern, text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def _scalar(x, text: str) -> Fraction:
    if isinstance(x, bool) or x is None:
        raise InputError(f"line {_line_of(text, json.dumps(x))}: {x!r} is not a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InputError(f"line {_line_of(text, repr(x))}: non-finite number")
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not re.fullmatch(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/[+-]?\d+)?", s):
            raise InputError(f"line {_line_of(text, json.dumps(x))}: bad rational string {x!r}")
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"line {_line_of(text, json.dumps(x))}: bad rational string {x!r}") from None
    raise InputError(f"line {_line_of(text, json.dumps(x))}: {x!r} is not a number")


def parse_matrix_text(text: str, square: bool = True) -> QuaternionMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"line {e.lineno}: malformed JSON: {e.msg}") from None
    if not isinstance(doc, dict) or "entries" not in doc:
        raise InputError("line 1: expected an object with an \"entries\" field")
    rows = doc["entries"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) and r for r in rows):
        raise InputError(f"line {_line_of(text, _ENTRIES)}: entries must be a nonempty list of nonempty rows")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise InputError(f"line {_line_of(text, _ENTRIES)}: ragged rows")
    if "m" in doc and doc["m"] != len(rows):
        raise InputError(f"line {_line_of(text, _M_KEY)}: m = {doc['m']} but {len(rows)} rows given")
    if square and n != len(rows):
        raise InputError(f"line {_line_of(text, _ENTRIES)}: matrix is {len(rows)}x{n}, expected square")
    out = []
    for row in rows:
        qs = []
        for q in row:
            if not isinstance(q, list) or len(q) != 4:
                raise InputError(f"line {_line_of(text, json.dumps(q))}: quaternion must be a 4-array, got {q!r}")
            qs.append(Quaternion(*(_scalar(x, text) for x in q)))
        out.append(qs)
    return QuaternionMatrix(out)


def read_matrix(path: str, square: bool = True) -> QuaternionMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return parse_matrix_text(text, square)


def write_matrix(A: QuaternionMatrix) -> str:
    doc = {"m": A.rows, "entries": [[[str(c) for c in q.coeffs] for q in row] for row in A.entries()]}
    return json.dumps(doc)


# -- output ----------------------------------------------------------------


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g") if x != 0 else "0.0"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str, np.floating, np.integer)) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _fmt(lam) -> str:
    """Six significant digits; components at rounding-noise level relative
    to |λ| print as zero."""
    x = np.array([float(c) for c in lam])
    x[np.abs(x) < 1e-12 * max(1.0, float(np.linalg.norm(x)))] = 0.0
    return format_quaternion(x, digits=6)


def report_text(rep: dict) -> str:
    lines = [f"matrix order m = {rep['input']['m']}", "equations:"]
    lines += [f"  {s}" for s in rep["char_system"]]
    lines.append(f"isolated left eigenvalues ({len(rep['isolated'])}):")
    for c in rep["isolated"]:
        lines.append(f"  {_fmt(c['lambda'])}   sigma_min={c['sigma_min']:.3g} rank={c['jacobian_rank']}")
    man = rep["manifold"]
    lines.append(f"manifold: {'yes' if man['flag'] else 'no'}")
    if man["flag"]:
        lines.append(f"  {len(man['points'])} sampled points, e.g. {_fmt(man['points'][0]['lambda'])}")
    b = rep["bounds"]
    lines.append(f"annulus: [{b['sigma_min']:.6g}, {b['sigma_max']:.6g}]  right-norm range: [{b['alpha']:.6g}, {b['beta']:.6g}]")
    lines.append(f"annulus check: {'pass' if rep['annulus_check'] else 'FAIL'}  domination: {'pass' if rep['domination'] else 'FAIL'}")
    if "runtime_ms" in rep:
        lines.append(f"runtime: {rep['runtime_ms']:.1f} ms")
    return "\n".join(lines)


# -- commands --------------------------------------------------------------


def cmd_solve(args, out) -> int:
    A = read_matrix(args.path)
    cfg = SolveConfig(
        tol_residual=args.tol,
        n_starts=args.starts,
        rng_seed=args.seed,
        max_iter=args.max_iter,
    )
    try:
        rep = left_spectrum_report(A, cfg, timing=args.timing)
    except NoConvergence as e:
        print(f"no convergence: {e.args[0]}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    out.write((report_text(rep) if args.text else to_json(rep)) + "\n")
    return EXIT_OK


def cmd_charpoly(args, out) -> int:
    A = read_matrix(args.path)
    cs = build_char_system(A)
    if cs.trivial is not None:
        out.write(f"trivial spectrum {{{cs.trivial}}}\n")
        return EXIT_OK
    for line in cs.lines():
        out.write(line + "\n")
    if args.full:
        out.write(f"det: {full_generalized_charpoly(cs.pencil).to_str()}\n")
    return EXIT_OK


def _parse_lambda(text: str) -> Quaternion:
    parts = text.split(",")
    if len(parts) != 4:
        raise InputError(f"--lambda needs four comma-separated components, got {text!r}")
    return Quaternion(*(_scalar(p, text) for p in parts))


def cmd_verify(args, out) -> int:
    A = read_matrix(args.path)
    lam = _parse_lambda(args.lam)
    cert = verify_left_eigenvalue(A, lam, args.tol)
    out.write(f"lambda: {lam}\n")
    out.write(f"sigma_min: {cert.pencil_sigma_min:.17g}\n")
    out.write(f"vector_residual: {cert.vector_residual:.17g}\n")
    out.write(f"threshold: {cert.tol * cert.scale:.17g}\n")
    out.write(("accept" if cert.accepted else "reject") + "\n")
    return EXIT_OK if cert.accepted else EXIT_REJECT


def _fmt_matrix(M) -> str:
    return "[" + ";".join(" ".join(f"{int(x):2d}" for x in row) for row in M) + "]"


def cmd_forms(args, out) -> int:
    forms = enumerate_forms()
    for f in forms:
        out.write(f"{f.index:2d}  H={_fmt_matrix(f.H)}  J={_fmt_matrix(f.J)}  K={_fmt_matrix(f.K)}\n")
    if not args.check:
        return EXIT_OK
    passed = 0
    for f in forms:
        ok = f.satisfies_hamiltonian() and check_form(f.index, args.samples) and check_determinants(f.index, max(1, args.samples // 10))
        passed += ok
        if not ok:
            out.write(f"form {f.index}: FAIL\n")
    conj_ok = check_conjugations(args.samples)
    out.write(f"{passed}/{N_FORMS} pass\n")
    out.write(f"conjugation identities (form 1): {'pass' if conj_ok else 'FAIL'}\n")
    return EXIT_OK if passed == N_FORMS and conj_ok else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quatleft", description="Left eigenvalues of quaternion matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="compute and certify the left spectrum")
    s.add_argument("path")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--json", action="store_true", help="JSON report (default)")
    mode.add_argument("--text", action="store_true", help="human-readable report")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--starts", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--timing", action="store_true", help="include runtime_ms in the report")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("charpoly", help="print the four polynomial equations")
    c.add_argument("path")
    c.add_argument("--full", action="store_true", help="also print the full generalized characteristic polynomial")
    c.set_defaults(func=cmd_charpoly)

    v = sub.add_parser("verify", help="certify one proposed left eigenvalue")
    v.add_argument("path")
    v.add_argument("--lambda", dest="lam", required=True, metavar="q0,q1,q2,q3")
    v.add_argument("--tol", type=float, default=1e-10)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("forms", help="list the 48 representation forms")
    f.add_argument("--check", action="store_true", help="run the exact homomorphism and conjugation checks")
    f.add_argument("--samples", type=int, default=1000)
    f.set_defaults(func=cmd_forms)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (InputError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
