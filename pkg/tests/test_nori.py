import pytest

from dgw import groups
from dgw.errors import (BadAlpha, BudgetExhausted, NotPrimitiveRoot, PreconditionFailed)
from dgw.fields import small_field
from dgw.funcfield import Poly
from dgw.module import check_existence_hypothesis
from dgw.nori import (SlInstance, build_D0, build_conjugator, build_g0, build_instance,
                      candidate_parameters, default_zeta, search_nori_parameters)

F5 = small_field(5)
F7 = small_field(7)


@pytest.fixture(scope="module")
def inst5():
    return build_instance(F5, 2, 2, 2, [1], [0], N=8)


def test_g0_and_companion(inst5):
    assert inst5.g0 == (2, 0, 0, 3)
    assert inst5.D0bar() == (0, 4, 1, 0)
    assert inst5.x == (1, 2, 1, 3)
    # f_1 = 4 s^2 + 2 s for (alpha_1, beta_1) = (1, 0)
    assert inst5.D0[0][0] == Poly(F5, [0, 2, 4])
    assert groups.det(F5, inst5.x) == 1


def test_conjugation_relation(inst5):
    F = F5
    xi = groups.inverse(F, inst5.x)
    assert groups.mul(F, groups.mul(F, xi, inst5.g0), inst5.x) == inst5.D0bar()


def test_module_reduces_to_d0_and_meets_hypothesis(inst5):
    rep = check_existence_hypothesis(inst5.module, inst5.place_q, 8)
    assert rep.ok
    assert all(v >= l for l, v in enumerate(rep.table))


def test_other_field():
    zeta = default_zeta(F7)
    assert zeta == 3
    inst = build_instance(F7, 2, zeta, 2, [1], [2], N=4)
    assert inst.g0 == (3, 0, 0, 5)
    back = SlInstance.from_json(inst.to_json(), N=4)
    assert back.x == inst.x and back.D0bar() == inst.D0bar()


def test_rank_three_instance():
    F = small_field(7)
    g0 = build_g0(F, 3, 3)
    assert groups.det(F, g0) == 1
    D0 = build_D0(F, 3, 2, [1, 0], [0, 1], g0)
    d0bar = tuple(f(2) for r in D0 for f in r)
    x = build_conjugator(F, g0, d0bar)
    assert groups.mul(F, g0, x) == groups.mul(F, x, d0bar)


def test_preconditions():
    with pytest.raises(PreconditionFailed):
        build_g0(small_field(3), 2, 2)
    with pytest.raises(NotPrimitiveRoot):
        build_g0(F5, 2, 4)
    with pytest.raises(BadAlpha):
        build_instance(F5, 2, 2, 1, [1], [0])
    with pytest.raises(BadAlpha):
        build_instance(F5, 2, 2, 0, [1], [0])
    with pytest.raises(ValueError):
        build_D0(F5, 2, 2, [1, 2], [0], build_g0(F5, 2, 2))


def test_candidate_order():
    cands = list(candidate_parameters(F5, 2))
    assert len(cands) == 25
    assert cands[:3] == [((0,), (0,)), ((0,), (1,)), ((0,), (2,))]


def test_search_reports_budget_exhaustion():
    with pytest.raises(BudgetExhausted) as info:
        search_nori_parameters(F5, 2, budget=1, d_max=1)
    assert len(info.value.reports) == 1
    params, report = info.value.reports[0]
    assert params == ((0,), (0,)) and report.verdict != "full"
    with pytest.raises(PreconditionFailed):
        search_nori_parameters(small_field(11), 2, budget=1)
