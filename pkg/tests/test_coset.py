"""GKO branching, extension constructions, and classification."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cftkit.errors import UsageError
from cftkit.coset import (
    ExtensionSpec,
    NamedVOA,
    Rejection,
    catalog_extensions,
    classify_preunitary,
    classify_sl2_extension,
    conformal_embedding_check,
    coset_commutant_extension,
    gko_decomposition,
    integral_weight_check,
    mirror_extension,
    solve_minimal_index,
    verify_gko,
)
from cftkit.minimal import KacLabel, kac_canonical, minimal_central_charge


def test_gko_decomposition_pairs():
    rule = gko_decomposition(1, 0, 0)
    assert [( (lab.r, lab.s), s) for lab, s in rule.pairs] == \
        [((1, 1), 0), ((1, 3), 2)]
    rule = gko_decomposition(1, 1, 0)
    assert [s for _, s in rule.pairs] == [1]
    # parity selects alternating level m+1 labels
    rule = gko_decomposition(3, 2, 1)
    assert [s for _, s in rule.pairs] == [1, 3]


def test_gko_decomposition_validates():
    with pytest.raises(UsageError):
        gko_decomposition(2, 3, 0)
    with pytest.raises(UsageError):
        gko_decomposition(2, 1, 2)


def test_verify_gko_small_cases():
    for m in (1, 2):
        for n in range(m + 1):
            for eps in (0, 1):
                rep = verify_gko(m, n, eps, 6)
                assert rep.passed, (m, n, eps, rep.mismatch)
                assert rep.order_verified == 6


def test_verify_gko_rejects_bad_order():
    with pytest.raises(UsageError):
        verify_gko(1, 0, 0, 0)


def test_integral_weight_check():
    good = ExtensionSpec(("sl2", 10), ((0, 1), (6, 1)))
    out = integral_weight_check(good)
    assert out["passed"]
    assert out["summands"][1]["weight"] == 1

    bad = ExtensionSpec(("sl2", 10), ((0, 1), (5, 1)))
    assert not integral_weight_check(bad)["passed"]

    minimal = ExtensionSpec(
        ("minimal", 9), ((kac_canonical(9, 1, 1), 1), (kac_canonical(9, 1, 7), 1)))
    out = integral_weight_check(minimal)
    assert out["passed"]
    assert out["summands"][1]["weight"] == 8


def test_coset_commutant_extension_m10():
    k_ext = ExtensionSpec(("sl2", 10), ((0, 1), (6, 1)), name="E6")
    ext = coset_commutant_extension(k_ext, 10)
    assert ext.base == ("minimal", 10)
    assert [(lab.r, lab.s) for lab, _ in ext.summands] == [(1, 1), (5, 12)]
    assert ext.unitary is True
    out = integral_weight_check(ext)
    assert out["passed"]
    assert out["summands"][1]["weight"] == 10


def test_coset_commutant_rejects_nonintegral():
    bad = ExtensionSpec(("sl2", 10), ((0, 1), (4, 1)))
    with pytest.raises(UsageError):
        coset_commutant_extension(bad, 10)
    mismatched = ExtensionSpec(("sl2", 10), ((0, 1), (6, 1)))
    with pytest.raises(UsageError):
        coset_commutant_extension(mismatched, 9)


def test_mirror_extension_m9():
    affine = ExtensionSpec(("sl2", 10), ((0, 1), (6, 1)), name="E6")
    ext = mirror_extension(9, affine)
    assert ext.base == ("minimal", 9)
    assert [(lab.r, lab.s) for lab, _ in ext.summands] == [(1, 1), (1, 7)]
    assert ext.unitary == "unknown"


def test_mirror_extension_m27():
    affine = ExtensionSpec(
        ("sl2", 28), ((0, 1), (10, 1), (18, 1), (28, 1)), name="E8")
    ext = mirror_extension(27, affine)
    assert [(lab.r, lab.s) for lab, _ in ext.summands] == \
        [(1, 1), (1, 11), (1, 19), (1, 29)]
    assert ext.unitary == "unknown"


def test_mirror_extension_rejects_odd_summand():
    affine = ExtensionSpec(("sl2", 4), ((0, 1), (3, 1)))
    with pytest.raises(UsageError):
        mirror_extension(3, affine)


def test_conformal_embeddings():
    so5 = {"name": "so(5)", "dim": 10, "dual_coxeter": 3}
    out = conformal_embedding_check(10, so5)
    assert out["passed"]
    assert out["central_charge"]["sl2"] == Fraction(5, 2)
    assert out["weight_one"]["count"] == 10

    g2 = {"name": "G2", "dim": 14, "dual_coxeter": 4}
    out = conformal_embedding_check(28, g2)
    assert out["passed"]
    assert out["central_charge"]["sl2"] == Fraction(14, 5)
    assert out["weight_one"]["count"] == 14

    # negative control: sl2 level 6 does not embed conformally in G2
    out = conformal_embedding_check(6, g2)
    assert not out["passed"]
    assert not out["central_charge"]["ok"]


def test_catalog_structure():
    assert len(catalog_extensions(("sl2", 4))) == 1
    assert len(catalog_extensions(("sl2", 10))) == 1
    assert len(catalog_extensions(("sl2", 28))) == 2
    assert catalog_extensions(("sl2", 5)) == []
    for spec in (("sl2", 28), ("minimal", 3), ("minimal", 10), ("minimal", 27)):
        for ext, dec, named in catalog_extensions(spec):
            # vacuum row first, every row nonempty
            assert dec.rows[0][0] >= 1
            assert all(any(row) for row in dec.rows)
            assert isinstance(named, NamedVOA)
            assert ext.summands[0][1] == 1


def test_catalog_unknown_family():
    with pytest.raises(UsageError):
        catalog_extensions(("sl3", 2))


@given(st.integers(0, 60))
@settings(max_examples=61, deadline=None)
def test_solve_minimal_index_roundtrip(m):
    assert solve_minimal_index(minimal_central_charge(m)) == m


def test_solve_minimal_index_rejects():
    assert solve_minimal_index(Fraction(3, 4)) is None
    assert solve_minimal_index(Fraction(1)) is None
    assert solve_minimal_index(Fraction(5, 6)) is None


def test_classify_preunitary():
    c10 = minimal_central_charge(10)
    got = classify_preunitary(
        c10, [KacLabel(10, 1, 1), KacLabel(10, 7, 1)])
    assert got == NamedVOA("minimal-E6-coset", 10)
    # non-canonical input labels are canonicalized before matching
    got = classify_preunitary(
        c10, [KacLabel(10, 1, 1), KacLabel(10, 5, 12)])
    assert got == NamedVOA("minimal-E6-coset", 10)

    got = classify_preunitary(
        Fraction(1, 2), [KacLabel(1, 1, 1)])
    assert got == NamedVOA("minimal-diagonal", 1)

    got = classify_preunitary(
        c10, [KacLabel(10, 1, 1), KacLabel(10, 5, 3)])
    assert isinstance(got, Rejection)

    with pytest.raises(UsageError):
        classify_preunitary(Fraction(3, 2), [])


def test_classify_sl2_extension():
    assert classify_sl2_extension(10, [0]) == NamedVOA("sl2-diagonal", 10)
    assert classify_sl2_extension(10, [0, 6]) == NamedVOA("sl2-E6", 10)
    assert classify_sl2_extension(4, [0, 4]) == NamedVOA("sl2-simple-current", 4)
    assert classify_sl2_extension(28, [0, 10, 18, 28]) == NamedVOA("sl2-E8", 28)
    assert isinstance(classify_sl2_extension(10, [0, 4]), Rejection)


def test_named_voa_validation():
    with pytest.raises(UsageError):
        NamedVOA("sl2-E6", 12)
    with pytest.raises(UsageError):
        NamedVOA("nonsense", 3)


def test_extension_spec_requires_vacuum_first():
    with pytest.raises(UsageError):
        ExtensionSpec(("sl2", 10), ((6, 1), (0, 1)))
    with pytest.raises(UsageError):
        ExtensionSpec(("sl2", 10), ((0, 2), (6, 1)))
