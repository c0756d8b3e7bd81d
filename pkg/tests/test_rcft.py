"""Generic modular-data operations: relations, Verlinde, simple currents."""

from fractions import Fraction

import pytest

from cftkit.errors import ConsistencyError
from cftkit.minimal import minimal_modular_data
from cftkit.rcft import (
    ModularData,
    check_modular_relations,
    quantum_dims,
    root_of_unity,
    simple_currents,
    verlinde_fusion,
)
from cftkit.sl2 import Sl2Label, sl2_modular_data


def _strip_monomials(data: ModularData) -> ModularData:
    return ModularData(
        theory_id=data.theory_id,
        labels=data.labels,
        central_charge=data.central_charge,
        weights=data.weights,
        s_scale=data.s_scale,
        s_order=data.s_order,
        s_matrix=data.s_dense(),
    )


def test_root_of_unity():
    assert root_of_unity(Fraction(1, 2)) == root_of_unity(Fraction(-1, 2))
    assert root_of_unity(Fraction(0)).is_rational


@pytest.mark.parametrize("build,param", [
    (sl2_modular_data, 4),
    (minimal_modular_data, 3),
])
def test_relations_pass_with_identity_conjugation(build, param):
    data = build(param)
    report = check_modular_relations(data)
    assert report.passed
    assert report.charge_conjugation == tuple(range(data.size))
    assert all(report.relations.values())


@pytest.mark.parametrize("build,param", [
    (sl2_modular_data, 3),
    (minimal_modular_data, 2),
])
def test_fast_and_generic_paths_agree(build, param):
    fast = check_modular_relations(build(param))
    generic = check_modular_relations(_strip_monomials(build(param)))
    assert fast.passed and generic.passed
    assert fast.charge_conjugation == generic.charge_conjugation
    assert fast.relations == generic.relations


@pytest.mark.parametrize("strip", [False, True])
def test_tampered_t_phase_fails(strip):
    data = minimal_modular_data(2)
    if strip:
        data = _strip_monomials(data)
    data.t_phases[1] += Fraction(1, 7)
    report = check_modular_relations(data)
    assert not report.passed
    assert report.relations["st_cubed_squared"] is False
    assert report.failures


@pytest.mark.parametrize("strip", [False, True])
def test_tampered_s_entry_fails(strip):
    data = minimal_modular_data(1)
    s = [list(row) for row in data.s_dense()]
    s[0][1], s[1][0] = s[0][0], s[0][0]  # symmetric but wrong
    broken = ModularData(
        theory_id=data.theory_id, labels=data.labels,
        central_charge=data.central_charge, weights=data.weights,
        s_scale=data.s_scale, s_order=data.s_order, s_matrix=s)
    report = check_modular_relations(broken)
    assert not report.passed
    assert report.relations["s_squared"] is False


def test_asymmetric_s_detected():
    data = minimal_modular_data(1)
    s = [list(row) for row in data.s_dense()]
    s[0][1] = s[0][1] + s[0][0]
    broken = ModularData(
        theory_id=data.theory_id, labels=data.labels,
        central_charge=data.central_charge, weights=data.weights,
        s_scale=data.s_scale, s_order=data.s_order, s_matrix=s)
    report = check_modular_relations(broken)
    assert report.relations["symmetry"] is False


def test_verlinde_ising_fusion():
    data = minimal_modular_data(1)
    labels = [(lab.r, lab.s) for lab in data.labels]
    one = labels.index((1, 1))
    sigma = labels.index((1, 2))
    eps = labels.index((1, 3)) if (1, 3) in labels else labels.index((2, 1))
    N = verlinde_fusion(data)
    # sigma x sigma = 1 + eps; sigma x eps = sigma; eps x eps = 1
    assert N[sigma][sigma][one] == 1 and N[sigma][sigma][eps] == 1
    assert N[sigma][sigma][sigma] == 0
    assert N[sigma][eps] == [1 if l == sigma else 0 for l in range(3)]
    assert N[eps][eps] == [1 if l == one else 0 for l in range(3)]


def test_verlinde_vacuum_row_is_identity():
    data = sl2_modular_data(5)
    N = verlinde_fusion(data)
    for j in range(data.size):
        assert N[0][j] == [1 if l == j else 0 for l in range(data.size)]


def test_quantum_dims_positive_for_unitary_theories():
    for data in (sl2_modular_data(6), minimal_modular_data(4)):
        for ratio, ball in quantum_dims(data):
            assert ball.midpoint.real > 0
            assert abs(ball.midpoint.imag) < 1e-20


def test_simple_currents():
    assert {lab.j for lab in simple_currents(sl2_modular_data(4))} == {0, 4}
    assert {lab.j for lab in simple_currents(sl2_modular_data(3))} == {0, 3}
    currents = simple_currents(minimal_modular_data(3))
    assert {(lab.r, lab.s) for lab in currents} == {(1, 1), (1, 5)}


def test_verlinde_requires_valid_relations():
    data = minimal_modular_data(1)
    s = [list(row) for row in data.s_dense()]
    s[0][0] = s[0][0] + s[0][0]
    broken = ModularData(
        theory_id=data.theory_id, labels=data.labels,
        central_charge=data.central_charge, weights=data.weights,
        s_scale=data.s_scale, s_order=data.s_order, s_matrix=s)
    with pytest.raises(ConsistencyError):
        verlinde_fusion(broken)
