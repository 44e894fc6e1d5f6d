"""Acceptance suite: one line per criterion, PASS or FAIL, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed through the
capture) or directly with ``python tests/test_acceptance.py``.
"""

import subprocess
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kbcat.center import (  # noqa: E402
    block_connectivity,
    family_from_components,
    in_span,
    kernel_nilpotency_check,
    lemma_ric_family,
    res_ind_check,
    solve_center,
    solve_triangle_center,
)
from kbcat.complexes import hom_kb  # noqa: E402
from kbcat.examples import Cyclic, DualNumbers, build_cyc, build_dn, make_window, verify_fact_lemma, verify_triangles  # noqa: E402
from kbcat.exactlin import GF, QQ, EchelonSpan  # noqa: E402
from kbcat.pseudoid import ConstraintViolated, corrupt, random_system_dn, trivialization_certificate  # noqa: E402
from oracles import brute_hom_kb_dim  # noqa: E402

F2, F7 = GF(2), GF(7)
LINES = {}


def emit(capsys, n: int, ok: bool, text: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {text}"
    LINES[n] = line
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


_facts = {}


def facts(key):
    if key not in _facts:
        ex = DualNumbers() if key == "dn" else Cyclic(key)
        t0 = time.perf_counter()
        rep = verify_fact_lemma(ex, 3)
        _facts[key] = (rep, time.perf_counter() - t0)
    return _facts[key]


def dim_checks(rep):
    return [c for c in rep.checks if c.name.startswith("dim Hom") or c.name.startswith("named map")
            or c.name.startswith("all window Hom")]


def crit1(capsys=None):
    rep, dt = facts("dn")
    checks = dim_checks(rep)
    bad = [c.name for c in checks if c.status != "pass"]
    ok = not bad and dt < 60 and len(checks) > 0
    emit(capsys, 1, ok, f"dual numbers W=3: {len(checks) - len(bad)}/{len(checks)} Hom-dimension checks exact, "
                        f"{rep.summary['skipped']} boundary instances skipped, {dt:.1f} s (< 60 s)")
    return ok


def crit2(capsys=None):
    parts, ok = [], True
    for d in (2, 3):
        rep, dt = facts(d)
        checks = dim_checks(rep)
        bad = [c.name for c in checks if c.status != "pass"]
        ok &= not bad and rep.ok
        parts.append(f"d={d}: {len(checks) - len(bad)}/{len(checks)} in {dt:.1f} s")
    emit(capsys, 2, ok, "cyclic W=3 Hom dimensions exact; " + "; ".join(parts))
    return ok


def crit3(capsys=None):
    runs = [(DualNumbers(QQ), 2), (DualNumbers(F7), 3), (Cyclic(2, QQ), 2), (Cyclic(3, QQ), 2), (Cyclic(3, F7), 3)]
    ok, parts = True, []
    for ex, lam in runs:
        rep = verify_triangles(ex, 3, lam)
        exact = [c for c in rep.checks if c.name.endswith(" exact") and "scaled" not in c.name]
        scaled = [c for c in rep.checks if c.name.endswith("not exact")]
        good = rep.ok and len(exact) >= 20 and len(scaled) == len(exact)
        ok &= good
        tag = ex.name + (f" d={ex.d}" if hasattr(ex, "d") else "") + f" over {ex.field}"
        parts.append(f"{tag}: {len(exact)} exact, {len(scaled)} non-exact after scaling by {lam}")
    emit(capsys, 3, ok, "; ".join(parts))
    return ok


def crit4(capsys=None):
    rep, _ = facts("dn")
    av = [c for c in rep.checks if "almost vanishing" in c.name and c.name.startswith("Delta")]
    neg = [c for c in rep.checks if c.name.endswith("not almost vanishing")]
    kinds = {c.name.split(" ")[0] for c in neg}
    ok = all(c.status == "pass" for c in av + neg) and len(av) == 28 and kinds == {"Id", "i", "pi"}
    emit(capsys, 4, ok, f"W=3: Delta almost vanishing on {sum(c.status == 'pass' for c in av)}/{len(av)} objects; "
                        f"Id, i, pi rejected in {sum(c.status == 'pass' for c in neg)}/{len(neg)} cases (window-relative)")
    return ok


def small_pool():
    dn = [build_dn(n, m, F2) for n in range(-2, 3) for m in range(n, n + 3)]
    cy2 = [build_cyc(s, n, m, 2, F2) for s in range(2) for n in range(-1, 2) for m in range(n, n + 3)]
    cy3 = [build_cyc(s, n, m, 3, F2) for s in range(3) for n in range(-1, 2) for m in range(n, n + 3)]
    return [dn, cy2, cy3]


def crit5(capsys=None):
    total = agree = 0
    mismatches = []
    for group in small_pool():
        for x in group:
            for y in group:
                assert x.total_dim <= 6 and y.total_dim <= 6
                total += 1
                a, b = hom_kb(x, y).dim, brute_hom_kb_dim(x, y)
                if a == b:
                    agree += 1
                else:
                    mismatches.append((repr(x), repr(y), a, b))
    ok = total > 0 and agree == total
    emit(capsys, 5, ok, f"F2 brute force: {agree}/{total} pairs agree (complexes of realized dimension <= 6)")
    return ok


def crit6(capsys=None):
    ex = DualNumbers()
    w = make_window(ex, 2)
    z, zt = solve_center(w), solve_triangle_center(w)
    idxs = ex.indices(2)
    diags = sorted({m - n for n, m in idxs})
    r = res_ind_check(w, ex.pres)
    nil = kernel_nilpotency_check(r.kernel, 2, w, ex.pres)
    # oracle: Id plus single-object and per-diagonal Id + Delta families
    ident = family_from_components(w, {})
    singles = [lemma_ric_family(w, {k: (ex.delta(idx), 1)}) for k, idx in enumerate(idxs)]
    per_diag = [lemma_ric_family(w, {k: (ex.delta(idx), 1) for k, idx in enumerate(idxs) if idx[1] - idx[0] == dd})
                for dd in diags]

    def span_dim(fams):
        s = EchelonSpan(QQ, len(ident.vector()))
        for f in fams:
            s.add(f.vector())
        return len(s)

    oracle_ok = (all(in_span(z, f) for f in singles) and span_dim([ident] + singles) == len(z)
                 and all(in_span(zt, f) for f in per_diag) and span_dim([ident] + per_diag) == len(zt))
    dn_ok = (len(z) == 1 + len(w) and len(zt) == 1 + len(diags) and r.report.ok and r.surjective
             and len(r.kernel) > 0 and nil.ok and oracle_ok)
    cy = Cyclic(3)
    wc = make_window(cy, 2)
    ztc = solve_triangle_center(wc)
    rc = res_ind_check(wc, cy.pres)
    conn = block_connectivity(wc)
    cy_ok = len(ztc) == 1 and rc.report.ok and rc.surjective and rc.injective and conn.connected and conn.non_degenerate
    ok = dn_ok and cy_ok
    emit(capsys, 6, ok,
         f"dual numbers W=2: center {len(z)} = 1 + {len(w)}, triangle center {len(zt)} = 1 + {len(diags)}, "
         f"res surjective with kernel {len(r.kernel)}, length-2 products null ({nil.summary['pass']} checks), "
         f"oracle agrees={oracle_ok}; cyclic d=3 W=2: triangle center {len(ztc)}, res bijective={rc.injective and rc.surjective}")
    return ok


def crit7(capsys=None):
    issued = rejected = 0
    problems = []
    for field in (QQ, F7):
        for seed in range(100):
            sys_ = random_system_dn(3, seed, field)
            try:
                cert = trivialization_certificate(sys_)
                if cert.checks.summary["fail"] == 0:
                    issued += 1
                else:
                    problems.append(("issue", str(field), seed))
            except Exception as exc:  # noqa: BLE001 - any exception is a failure here
                problems.append(("issue", str(field), seed, repr(exc)))
            bad, idx = corrupt(sys_, seed + 1000)
            try:
                trivialization_certificate(bad)
                problems.append(("accepted", str(field), seed))
            except ConstraintViolated as exc:
                if exc.index == idx:
                    rejected += 1
                else:
                    problems.append(("wrong index", str(field), seed, exc.index, idx))
    ok = issued == 200 and rejected == 200
    emit(capsys, 7, ok, f"W=3 over Q and F7: {issued}/200 certificates issued with all checks passing, "
                        f"{rejected}/200 corrupted systems rejected naming the broken index")
    return ok


def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "kbcat.cli", *argv], capture_output=True, check=False)
    return proc.returncode, proc.stdout


def crit8(capsys=None):
    commands = [
        ("verify", "dual-numbers", "--window", "2"),
        ("verify", "cyclic", "--d", "2", "--window", "1", "--field", "fp:7"),
        ("center", "--example", "dual-numbers", "--window", "2", "--triangle", "--nilpotency", "2"),
        ("pseudoid", "random", "--example", "dual-numbers", "--window", "3", "--seed", "17"),
        ("pseudoid", "random", "--example", "cyclic", "--d", "3", "--window", "2", "--seed", "5", "--field", "fp:7"),
    ]
    same = 0
    for argv in commands:
        r1, r2 = _cli(*argv), _cli(*argv)
        if r1 == r2 and r1[0] == 0 and r1[1]:
            same += 1
    ok = same == len(commands)
    emit(capsys, 8, ok, f"{same}/{len(commands)} CLI reports byte-identical across separate runs (exit 0)")
    return ok


CRITERIA = [crit1, crit2, crit3, crit4, crit5, crit6, crit7, crit8]


@pytest.mark.parametrize("n", range(1, 9))
def test_criterion(n, capsys):
    assert CRITERIA[n - 1](capsys)


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
