"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import contextlib
import io
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import fixture_path  # noqa: E402

from k0silting.cli import main  # noqa: E402
from k0silting.exactmath import IntMatrix, format_scalar, parse_scalar, smith_normal_form  # noqa: E402
from k0silting.homotopycat import (  # noqa: E402
    ProjComplex,
    ProjMap,
    cone,
    minimal_reduce,
    random_chain_map,
    random_complex,
    shift,
)
from k0silting.pathalgebra import load_algebra  # noqa: E402
from k0silting.silting import (  # noqa: E402
    SiltingCollection,
    class_in_k0sp,
    compute_N_subgroup,
    extract_filtration,
    gamma,
    horseshoe_sample,
    jordan_holder_sample,
    stalk_collection,
    verify_hom_vanishing,
)


def report(capsys, number, passed, detail):
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return passed


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, json.loads(out.getvalue()) if out.getvalue().strip() else None


def _algebra():
    return load_algebra(fixture_path("a3.algebra.json"))


def _mutated(a3):
    beta = a3.path_element(["beta"])
    t = ProjComplex(a3, {-1: ["3"], 0: ["2"]}, {-1: ProjMap(a3, ["3"], ["2"], {(0, 0): beta})})
    m = SiltingCollection(a3, {"P1": ProjComplex.stalk(a3, "1"), "P2": ProjComplex.stalk(a3, "2"), "C": t})
    return verify_hom_vanishing(m).collection


def check_1(capsys=None):
    start = time.perf_counter()
    code, out = _cli("verify", "theorem-a", "--samples", "200", "--seed", "0")
    elapsed = time.perf_counter() - start
    r = out["report"]
    ok = (code == 0 and r["split_rank"] == 3 and r["rank"] == 3 and r["torsion"] == []
          and r["samples"] == 200 and r["additivity_failures"] == [] and elapsed <= 60)
    return report(capsys, 1, ok, f"rank {r['rank']}, torsion {r['torsion']}, "
                                 f"{200 - len(r['additivity_failures'])}/200 additive, {elapsed:.1f}s")


def check_2(capsys=None):
    m = stalk_collection(_algebra())
    rows = [jordan_holder_sample(m, 0, i) for i in range(100)]
    pairs = sum(len(r["gammas"]) * (len(r["gammas"]) - 1) // 2 for r in rows)
    routes = all({"minimal", "universal", "zero-extended"} <= set(r["gammas"]) for r in rows)
    padded = sum(any(k.startswith("padded") for k in r["gammas"]) for r in rows)
    ok = all(r["equal"] for r in rows) and routes and padded > 0
    return report(capsys, 2, ok, f"100 complexes, {pairs} filtration pairs compared, {padded} with padding")


def check_3(capsys=None):
    m = stalk_collection(_algebra())
    rows = [horseshoe_sample(m, 0, i) for i in range(50)]
    nontrivial = sum(1 for r in rows for c in r["checks"] if c["w"] != "zero")
    ok = all(r["passed"] for r in rows) and nontrivial > 0
    return report(capsys, 3, ok, f"50 pairs, {sum(len(r['checks']) for r in rows)} extensions "
                                 f"({nontrivial} with w != 0), all additive" if ok else "additivity failed")


def check_4(capsys=None):
    a3 = _algebra()
    m = stalk_collection(a3)
    rng = random.Random(0)
    sign = shift_free = 0
    for _ in range(100):
        x = random_complex(a3, rng, -2, 2)
        c = class_in_k0sp(x, m)
        sign += class_in_k0sp(shift(x, -1), m).value == -c.value
        shift_free += class_in_k0sp(x, m, start=c.shift + 1).value == c.value
    ok = sign == 100 and shift_free == 100
    return report(capsys, 4, ok, f"sign law {sign}/100, n vs n+1 {shift_free}/100")


def check_5(capsys=None):
    start = time.perf_counter()
    code, out = _cli("verify", "example-4-3")
    elapsed = time.perf_counter() - start
    checks = out["report"]["checks"]
    need = ("two_rigid", "presilting_fails_at_2", "X_not_in_F2", "cone_triangle_verified",
            "rotated_triangle_verified", "middle_term_is_X", "F2_not_extension_closed")
    ok = code == 0 and all(checks[k] for k in need) and out["report"]["membership"]["verdict"] == "non-member" \
        and elapsed <= 10
    return report(capsys, 5, ok, f"exit {code}, {sum(checks.values())}/{len(checks)} checks, {elapsed:.2f}s")


def check_6(capsys=None):
    a3 = _algebra()
    results = []
    for name, m in (("stalks", stalk_collection(a3)), ("mutated", _mutated(a3))):
        for d in (2, 3):
            n = compute_N_subgroup(m, d)
            results.append(all(g.is_zero() for g in n.generators)
                           and n.quotient.rank == len(m.labels) and not n.quotient.torsion)
    return report(capsys, 6, all(results), f"{sum(results)}/{len(results)} (collection, d) cases give N = 0")


def check_7(capsys=None):
    a3 = _algebra()
    m = stalk_collection(a3)
    rng = random.Random(0)
    objects = asserts = agree = 0
    for _ in range(100):
        x = random_complex(a3, rng)
        y = random_complex(a3, rng)
        t = cone(random_chain_map(x, y, rng))
        for obj in (x, y, t.Z):
            objects += 1
            obj.check_d_squared()
            r = minimal_reduce(obj)
            assert r.verify()
            assert minimal_reduce(r.minimal).minimal == r.minimal
            asserts += 2
        assert t.verify()
        asserts += 1
        fast = gamma(extract_filtration(x, m, method="truncation"))
        slow = gamma(extract_filtration(x, m, method="minimal"))
        agree += fast == slow
    density = asserts / objects
    ok = agree == 100 and density >= 1
    return report(capsys, 7, ok, f"{objects} complexes, {density:.2f} assertions each, fast vs approximation {agree}/100")


def check_8(capsys=None):
    rng = random.Random(0)
    ok = smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]])).diagonal == (1, 6)
    for _ in range(100):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        rows = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        snf = smith_normal_form(IntMatrix.from_rows(rows))
        ok &= all(b % a == 0 for a, b in zip(snf.diagonal, snf.diagonal[1:]))
        ok &= snf.U @ IntMatrix.from_rows(rows) @ snf.V == snf.diagonal_matrix()
        perm = rows[::-1]
        cols = list(range(c))
        rng.shuffle(cols)
        perm = [[row[j] for j in cols] for row in perm]
        ok &= smith_normal_form(IntMatrix.from_rows(perm)).diagonal == snf.diagonal
        q = Fraction(rng.randint(-10**12, 10**12), rng.randint(1, 10**12))
        ok &= parse_scalar(format_scalar(q)) == q
    return report(capsys, 8, bool(ok), "diag(2,3) -> (1,6); 100 random matrices: divisibility, U A V = D, "
                                       "permutation invariance; rational round trip")


def test_criterion_1_k0_isomorphism(capsys):
    assert check_1(capsys)


def test_criterion_2_jordan_holder(capsys):
    assert check_2(capsys)


def test_criterion_3_horseshoe(capsys):
    assert check_3(capsys)


def test_criterion_4_sign_law(capsys):
    assert check_4(capsys)


def test_criterion_5_worked_example(capsys):
    assert check_5(capsys)


def test_criterion_6_trivial_n(capsys):
    assert check_6(capsys)


def test_criterion_7_engine_consistency(capsys):
    assert check_7(capsys)


def test_criterion_8_exactmath(capsys):
    assert check_8(capsys)


if __name__ == "__main__":
    results = [check() for check in (check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8)]
    sys.exit(0 if all(results) else 1)
