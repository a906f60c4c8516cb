import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k0silting.exactmath import PrimeField
from k0silting.grothendieck import K0Element, SamplerConfig
from k0silting.homotopycat import ComplexMap, ProjComplex, cone, random_complex, shift
from k0silting.pathalgebra import load_algebra
from k0silting.silting import (
    NotInF,
    PreconditionError,
    SiltingCollection,
    _label_decompositions,
    class_in_k0sp,
    compute_N_subgroup,
    worked_example,
    extract_filtration,
    gamma,
    horseshoe_sample,
    jordan_holder_sample,
    load_collection,
    membership_in_Fm,
    approximation_hom_vanishing,
    silting_certificate,
    stalk_collection,
    truncation_gamma,
    verify_fd_extension_closure,
    verify_hom_vanishing,
    verify_k0_isomorphism,
)

from conftest import fixture_path

seeds = st.integers(0, 10_000)


def test_stalk_collection_is_presilting(stalks):
    assert stalks.labels == ["P1", "P2", "P3"]
    assert stalks.verified_presilting
    assert stalks.k_max() == 1
    assert silting_certificate(stalks).certified


def test_rigid2_flags(rigid2):
    assert rigid2.d == 2 and rigid2.verified_d_rigid and not rigid2.verified_presilting
    assert rigid2.k_max() == 2
    full = verify_hom_vanishing(rigid2, range(1, 3))
    assert not full.passed and full.first_failure == 2
    assert full.nonzero == [("S1", "S3", 2, 1)]
    # the certificate needs stalks in F_2; only P3 = S3 gets there
    assert silting_certificate(rigid2).shifts == {"1": None, "2": None, "3": 0}


def test_unverified_collection_is_refused(a3, x_example):
    raw = load_collection(a3, fixture_path("rigid2.json"))
    with pytest.raises(PreconditionError):
        extract_filtration(x_example, raw)
    with pytest.raises(PreconditionError):
        class_in_k0sp(x_example, raw)


def test_collection_validation(a3, s1):
    zero = cone(ComplexMap.identity(s1)).Z
    with pytest.raises(ValueError):
        SiltingCollection(a3, {"Z": zero})
    with pytest.raises(ValueError):
        SiltingCollection(a3, {"S1": s1}, d=1)
    m = SiltingCollection(a3, {"S1": s1}, d=3)
    again = SiltingCollection.from_json(a3, m.to_json())
    assert again.d == 3 and again.summands["S1"] == m.summands["S1"]


def test_gamma_of_example_complex(stalks, x_example):
    f = extract_filtration(x_example, stalks, method="minimal")
    assert f.verify(stalks)
    assert f.factors() == [["P2"], ["P1"]]
    assert gamma(f) == {"P2": 1, "P1": -1}
    assert truncation_gamma(x_example, stalks) == {"P2": 1, "P1": -1}
    assert approximation_hom_vanishing(f, stalks)


def test_gamma_of_summands_and_sign(stalks):
    for lab, t in stalks.summands.items():
        assert gamma(extract_filtration(t, stalks)) == K0Element.of(lab)
        res = class_in_k0sp(shift(t, 1), stalks)
        assert res.value == K0Element.of(lab, -1) and res.shift == 1 and res.sign == -1


def test_example_complex_not_in_f2(rigid2, x_example):
    with pytest.raises(NotInF):
        extract_filtration(x_example, rigid2, max_len=2)
    with pytest.raises(PreconditionError):
        extract_filtration(x_example, rigid2, max_len=3)
    verdict = membership_in_Fm(x_example, rigid2, 2)
    assert verdict.verdict == "non-member" and verdict.obstruction


def test_membership_positive_case(rigid2, s1, s3):
    both = shift(s1, -1)
    verdict = membership_in_Fm(both, rigid2, 2)
    assert verdict.verdict == "member"
    assert verdict.filtration.factors() == [[], ["S1"]]


def test_label_decomposition_search():
    a, b = Counter({(0, "1"): 1}), Counter({(0, "1"): 1, (1, "2"): 1})
    assert _label_decompositions(Counter({(0, "1"): 3, (1, "2"): 1}), [a, b], 4)
    assert not _label_decompositions(Counter({(1, "2"): 1}), [a, b], 4)
    assert not _label_decompositions(Counter({(0, "1"): 6}), [a], 4)


def test_worked_example(a3, s1, s3, x_example):
    rep = worked_example(a3, s1, s3, x_example)
    assert rep["passed"], rep["checks"]
    assert rep["closure"]["closed"] is False


def test_closure_and_n_for_presilting(stalks, mutated):
    for m in (stalks, mutated):
        for d in (2, 3):
            assert verify_fd_extension_closure(m, d).closed
            n = compute_N_subgroup(m, d)
            assert all(g.is_zero() for g in n.generators)
            assert n.quotient.rank == 3 and not n.quotient.torsion


def test_n_needs_closure(rigid2):
    with pytest.raises(PreconditionError):
        compute_N_subgroup(rigid2, 2)


def test_mutated_collection(a3, mutated):
    assert mutated.verified_presilting
    assert silting_certificate(mutated).certified
    p3 = ProjComplex.stalk(a3, "3")
    # P3 -> P2 -> C -> Sigma P3
    assert class_in_k0sp(p3, mutated).value == {"P2": 1, "C": -1}
    assert class_in_k0sp(mutated.summands["C"], mutated).value == {"C": 1}


def test_k0_isomorphism_on_mutated_collection(mutated):
    rep = verify_k0_isomorphism(mutated, SamplerConfig(samples=60))
    assert rep.passed, rep.checks


def test_k0_isomorphism_over_prime_field():
    alg = load_algebra(fixture_path("a3.algebra.json"), PrimeField(3))
    rep = verify_k0_isomorphism(stalk_collection(alg), SamplerConfig(samples=60))
    assert rep.passed and rep.sampled.invariants.rank == 3


def test_zero_extension_and_padding(stalks, x_example):
    base = extract_filtration(x_example, stalks, method="minimal")
    ext = base.extended(3)
    assert ext.length == base.length + 3 and ext.verify(stalks)
    padded = extract_filtration(x_example, stalks, padding={0: ["P3"]}, method="minimal")
    assert padded.verify(stalks)
    assert padded.factors()[0] == ["P2", "P3"]
    assert gamma(padded) == gamma(base) == gamma(ext)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_filtrations_agree(seed, stalks, mutated):
    for m in (stalks, mutated):
        row = jordan_holder_sample(m, seed, 0)
        assert row["equal"], row


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_horseshoe(seed, stalks, mutated):
    for m in (stalks, mutated):
        row = horseshoe_sample(m, seed, 0)
        assert row["passed"], row


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_class_sign_law_and_shift_independence(seed, stalks, mutated):
    rng = random.Random(seed)
    x = random_complex(stalks.algebra, rng, -2, 2)
    for m in (stalks, mutated):
        c = class_in_k0sp(x, m)
        assert class_in_k0sp(shift(x, -1), m).value == -c.value
        assert class_in_k0sp(x, m, start=c.shift + 1).value == c.value
        assert c.filtration.verify(m)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_minimal_route_matches_truncation(seed, stalks):
    x = random_complex(stalks.algebra, random.Random(seed))
    f = extract_filtration(x, stalks, method="minimal")
    assert f.verify(stalks)
    assert gamma(f) == truncation_gamma(x, stalks)
    assert gamma(f) == gamma(extract_filtration(x, stalks, method="truncation"))
