"""Command line front end; every subcommand prints one JSON report on stdout.

Exit status: 0 when no check failed, 1 when some check failed, 2 on malformed
input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .addcat import CategoryPresentation, UnknownLabel, presentation_from_json, validate_presentation
from .exactlin import Field
from .report import Report

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _field(text: str) -> Field:
    try:
        return Field.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _builtin_presentation(ref: str) -> CategoryPresentation:
    """``dual_numbers[:FIELD]`` or ``cyclic:D[:FIELD]``."""
    from .examples import BadParameter, cyclic, dual_numbers

    name, _, rest = ref.partition(":")
    try:
        if name == "dual_numbers":
            return dual_numbers(_field(rest or "q"))
        if name == "cyclic":
            d, _, fld = rest.partition(":")
            return cyclic(int(d), _field(fld or "q"))
    except (ValueError, BadParameter) as exc:
        raise InputError(f"bad builtin presentation {ref!r}: {exc}") from exc
    raise InputError(f"unknown builtin presentation {ref!r}")


_PRES_CACHE: dict = {}


def _presentation(ref, base: Path) -> CategoryPresentation:
    """``ref`` is an inline presentation, a path relative to ``base``, or ``builtin:NAME``."""
    if isinstance(ref, dict):
        key = json.dumps(ref, sort_keys=True)
        if key not in _PRES_CACHE:
            _PRES_CACHE[key] = presentation_from_json(ref)
        return _PRES_CACHE[key]
    ref = str(ref)
    if ref.startswith("builtin:"):
        return _builtin_presentation(ref[len("builtin:"):])
    path = (base / ref).resolve()
    if path not in _PRES_CACHE:
        _PRES_CACHE[path] = presentation_from_json(_load_json(str(path)), name=path.stem)
    return _PRES_CACHE[path]


def load_complex(path: str):
    from .complexes import Complex

    doc = _load_json(path)
    try:
        pres = _presentation(doc["presentation"], Path(path).parent)
        comps = {int(n): ([c] if isinstance(c, str) else list(c)) for n, c in doc.get("components", {}).items()}
        diffs = {int(n): m for n, m in doc.get("differentials", {}).items()}
        return Complex(pres, comps, diffs, name=doc.get("name", Path(path).stem))
    except (KeyError, TypeError, ValueError, UnknownLabel) as exc:
        raise InputError(f"{path}: malformed complex ({exc})") from exc


# subcommands


def cmd_validate(args) -> Report:
    doc = _load_json(args.presentation)
    try:
        pres = presentation_from_json(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.presentation}: malformed presentation ({exc})") from exc
    rep = Report("validate", {"presentation": args.presentation, "field": str(pres.field)})
    for c in validate_presentation(pres).checks:
        rep.add(c.name, c.ok, computed=c.detail or None, citation="presentation axioms")
    return rep


def cmd_hom(args) -> Report:
    from .complexes import hom_kb, validate_complex

    x, y = load_complex(args.x), load_complex(args.y)
    if x.pres is not y.pres:
        raise InputError("both complexes must use the same presentation")
    rep = Report("hom", {"x": args.x, "y": args.y})
    for tag, c in (("X", x), ("Y", y)):
        for chk in validate_complex(c).checks:
            rep.add(f"{tag}: {chk.name}", chk.ok, citation="complex axioms")
    if not rep.ok:
        return rep
    h = hom_kb(x, y)
    rep.extra["dim"] = h.dim
    rep.extra["basis"] = [{str(n): m.to_json() for n, m in f.parts.items()} for f in h.reps]
    return rep


def cmd_verify(args) -> Report:
    from .examples import BadParameter, get_example, verify_fact_lemma, verify_triangles

    field = _field(args.field)
    if args.window < 0:
        raise InputError("--window must be nonnegative")
    try:
        ex = get_example(args.example, getattr(args, "d", None), field)
    except BadParameter as exc:
        raise InputError(str(exc)) from exc
    rep = Report("verify", ex.descriptor(args.window))
    rep.extend(verify_fact_lemma(ex, args.window))
    rep.extend(verify_triangles(ex, args.window))
    return rep


def cmd_center(args) -> Report:
    from .center import block_connectivity, kernel_nilpotency_check, res_ind_check, solve_center
    from .examples import BadParameter, get_example, make_window

    field = _field(args.field)
    try:
        ex = get_example(args.example, args.d, field)
    except BadParameter as exc:
        raise InputError(str(exc)) from exc
    if args.window < 0:
        raise InputError("--window must be nonnegative")
    w = make_window(ex, args.window)
    inputs = dict(ex.descriptor(args.window), triangle=args.triangle)
    if args.nilpotency is not None:
        inputs["nilpotency"] = args.nilpotency
    rep = Report("center", inputs)
    rep.extra["objects"] = len(w)
    rep.extra["center_dim"] = len(solve_center(w))
    ri = res_ind_check(w, ex.pres, triangle=args.triangle)
    if args.triangle:
        rep.extra["triangle_center_dim"] = ri.center_dim
    rep.extend(ri.report)
    if args.nilpotency is not None:
        if args.nilpotency < 1:
            raise InputError("--nilpotency must be positive")
        rep.extend(kernel_nilpotency_check(ri.kernel, args.nilpotency, w, ex.pres))
    conn = block_connectivity(w)
    rep.add("window is connected", conn.connected, expected=True, computed=len(conn.components),
            citation="block connectivity")
    rep.add("window is non-degenerate", conn.non_degenerate, expected=True, computed=conn.non_degenerate,
            citation="block connectivity")
    return rep


def _certify(system) -> Report:
    from .pseudoid import CertificateError, ConstraintViolated, ScalingTestFailed, constraint_check, trivialization_certificate

    rep = Report("pseudoid", {})
    rep.extend(constraint_check(system))
    if not rep.ok:
        return rep
    try:
        cert = trivialization_certificate(system)
    except (ConstraintViolated, ScalingTestFailed) as exc:
        rep.add("certificate issued", False, expected=True, computed=str(exc))
        return rep
    except CertificateError as exc:
        cert = exc.certificate
    rep.extend(cert.checks)
    F = system.field
    rep.extra["c"] = {str(k): F.format(v) for k, v in sorted(cert.c.items())}
    rep.extra["delta"] = {",".join(map(str, k)): F.format(v) for k, v in sorted(cert.delta.items())}
    if cert.f is not None:
        rep.extra["f"] = {f"{n},{m}": F.format(v) for (n, m), v in sorted(cert.f.items())}
    return rep


def cmd_pseudoid(args) -> Report:
    from .pseudoid import random_system_cyc, random_system_dn, system_from_json, system_to_json

    if args.action == "check":
        doc = _load_json(args.system)
        try:
            system = system_from_json(doc)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{args.system}: malformed system ({exc})") from exc
        inputs = {"system": args.system}
    else:
        field = _field(args.field)
        key = args.example.replace("-", "_")
        if args.window < 0:
            raise InputError("--window must be nonnegative")
        if key == "dual_numbers":
            system = random_system_dn(args.window, args.seed, field)
        elif key == "cyclic":
            if args.d is None or args.d < 2:
                raise InputError("the cyclic example needs --d >= 2")
            system = random_system_cyc(args.d, args.window, args.seed, field)
        else:
            raise InputError(f"unknown example {args.example!r}")
        inputs = {"seed": args.seed, "system": system_to_json(system)}
    rep = _certify(system)
    rep.command = f"pseudoid {args.action}"
    rep.inputs = dict(inputs, example=system.example, W=system.W, field=str(system.field))
    return rep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kbcat", description="Exact computations in bounded homotopy categories.")
    ap.add_argument("--table", action="store_true", help="also print a summary table to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a category presentation")
    p.add_argument("presentation")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("hom", help="Hom space between two complexes in K^b")
    p.add_argument("x")
    p.add_argument("y")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("verify", help="verify the structure of an example on a window")
    vs = p.add_subparsers(dest="example", required=True)
    for name in ("dual-numbers", "cyclic"):
        q = vs.add_parser(name)
        q.add_argument("--window", "-W", type=int, required=True)
        q.add_argument("--field", default="q")
        if name == "cyclic":
            q.add_argument("--d", type=int, required=True)
        q.set_defaults(func=cmd_verify)

    p = sub.add_parser("center", help="centers of a window and the restriction map")
    p.add_argument("--example", required=True)
    p.add_argument("--window", "-W", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--field", default="q")
    p.add_argument("--triangle", action="store_true")
    p.add_argument("--nilpotency", type=int)
    p.set_defaults(func=cmd_center)

    p = sub.add_parser("pseudoid", help="pseudo-identity scalar systems")
    ps = p.add_subparsers(dest="action", required=True)
    q = ps.add_parser("check")
    q.add_argument("--system", required=True)
    q.set_defaults(func=cmd_pseudoid)
    q = ps.add_parser("random")
    q.add_argument("--example", required=True)
    q.add_argument("--window", "-W", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--d", type=int)
    q.add_argument("--field", default="q")
    q.set_defaults(func=cmd_pseudoid)
    return ap


def _table(rep: Report) -> str:
    s = rep.summary
    lines = [f"{rep.command}: {s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped, {s['undetermined']} undetermined"]
    lines += [f"  FAIL {c.name}: expected {c.expected}, got {c.computed}" for c in rep.failures()]
    return "\n".join(lines) + "\n"


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rep = args.func(args)
    except InputError as exc:
        err.write(f"kbcat: error: {exc}\n")
        return EXIT_INPUT
    out.write(rep.dumps())
    if args.table:
        err.write(_table(rep))
    return EXIT_OK if rep.ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
