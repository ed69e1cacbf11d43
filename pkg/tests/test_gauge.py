import random
from fractions import Fraction

import pytest

from dyntwist import (
    AdtElement,
    CdybElement,
    HSeries,
    NotInvertible,
    NotMaurerCartan,
    ValuationViolated,
    adte_residual,
    cdyb_dgla,
    classical_find_gauge,
    classical_gauge_act,
    classical_gauge_infinitesimal,
    dte_residual,
    find_gauge,
    gauge_act_algebraic,
    gauge_act_formal,
    gauge_compose,
    gauge_to_algebraic,
    gauge_to_formal,
    j_to_k,
    reduce_classical,
    solve_adte,
    taylor_rescale,
)
from dyntwist.adt_dgla import invariant_adt_basis
from dyntwist.gauge import (
    adt_inverse,
    adt_mul,
    classical_chain_act,
    formal_inverse,
    rescale_generator,
)
from dyntwist.quantizer import FormalTwist

from conftest import ORDER

F = Fraction


def sparse_gauge(uea, seed, order=ORDER, picks=2, formal=False):
    """Random invariant group element 1 + O(hbar) with small support.

    With formal=True the order-n coefficient keeps leg degree <= n, the
    condition for the gauge to come from a formal one by substitution.
    """
    rng = random.Random(seed)
    pool = []
    for L in range(1, 3):
        pool.extend(invariant_adt_basis(uea, 1, L))
    Q = AdtElement.unit(uea, 1, order)
    for n in range(1, order + 1):
        for _ in range(picks):
            vec = pool[rng.randrange(len(pool))]
            if formal and any(len(key[-1]) > n for key in vec):
                continue
            Q = Q + AdtElement(uea, 1, dict(vec), order).scale(
                HSeries.hbar(order, n, F(rng.choice([-1, 1])))
            )
    return Q


# -- algebraic action -------------------------------------------------------


def test_identity_gauge(sl2_uea, sl2_pair):
    unit = AdtElement.unit(sl2_uea, 1, ORDER)
    assert gauge_act_algebraic(unit, sl2_pair.K) == sl2_pair.K


def test_inverse(sl2_uea):
    Q = sparse_gauge(sl2_uea, 7)
    unit = AdtElement.unit(sl2_uea, 1, ORDER)
    assert adt_mul(Q, adt_inverse(Q)) == unit
    assert adt_mul(adt_inverse(Q), Q) == unit


def test_inverse_requires_unit_head(sl2_uea):
    Q = AdtElement(
        sl2_uea, 1, {((0,), ()): HSeries.one(ORDER)}, ORDER
    )
    with pytest.raises(NotInvertible):
        adt_inverse(Q)


def test_action_preserves_equation(sl2_uea, sl2_pair):
    Q = sparse_gauge(sl2_uea, 7)
    K2 = gauge_act_algebraic(Q, sl2_pair.K)
    assert not (K2 == sl2_pair.K)
    assert adte_residual(K2).is_zero()


def test_action_group_law(sl2_uea, sl2_pair):
    K = sl2_pair.K
    Q1 = sparse_gauge(sl2_uea, 7)
    Q2 = sparse_gauge(sl2_uea, 11)
    lhs = gauge_act_algebraic(Q2, gauge_act_algebraic(Q1, K))
    rhs = gauge_act_algebraic(gauge_compose(Q2, Q1), K)
    assert lhs == rhs


def test_find_gauge_identity(sl2_uea, sl2_pair):
    r = find_gauge(sl2_pair.K, sl2_pair.K)
    assert r.equivalent and bool(r)
    assert r.gauge == AdtElement.unit(sl2_uea, 1, ORDER)


def test_find_gauge_recovers_constructed_equivalence(sl2_uea, sl2_pair):
    K = sl2_pair.K
    K2 = gauge_act_algebraic(sparse_gauge(sl2_uea, 13), K)
    r = find_gauge(K, K2)
    assert r.equivalent
    assert gauge_act_algebraic(r.gauge, K) == K2


# -- formal action ----------------------------------------------------------


def _exp_leg_gauge(uea, order):
    """T = exp(hbar h (x) lambda)-type gauge truncated at the order."""
    terms = {}
    c = F(1)
    for n in range(order + 1):
        terms[((1,) * n, (1,) * n)] = HSeries.hbar(order, n, c)
        c /= n + 1
    return FormalTwist(uea, 1, terms, order)


def test_formal_identity(sl2_uea, sl2_pair):
    T = FormalTwist.unit(sl2_uea, 1, ORDER)
    assert gauge_act_formal(T, sl2_pair.J) == sl2_pair.J.total_truncate(
        ORDER
    )


def test_formal_inverse(sl2_uea):
    T = _exp_leg_gauge(sl2_uea, ORDER)
    unit = FormalTwist.unit(sl2_uea, 1, ORDER)
    prod = (T * formal_inverse(T)).total_truncate(ORDER)
    assert prod == unit.total_truncate(ORDER)


def test_formal_inverse_requires_valuation(sl2_uea):
    T = FormalTwist.unit(sl2_uea, 1, ORDER) + FormalTwist(
        sl2_uea, 1, {((0,), ()): HSeries.one(ORDER)}, ORDER
    )
    with pytest.raises(NotInvertible):
        formal_inverse(T)


def test_formal_action_preserves_equation(sl2_uea, sl2_pair):
    T = _exp_leg_gauge(sl2_uea, ORDER)
    J2 = gauge_act_formal(T, sl2_pair.J)
    assert dte_residual(J2).total_truncate(ORDER).is_zero()


def test_formal_algebraic_consistency(sl2_uea, sl2_pair):
    # acting formally then substituting equals substituting then acting
    for T in (
        _exp_leg_gauge(sl2_uea, ORDER),
        gauge_to_formal(sl2_uea, sparse_gauge(sl2_uea, 17, formal=True)),
    ):
        J2 = gauge_act_formal(T, sl2_pair.J)
        lhs = j_to_k(J2)
        rhs = gauge_act_algebraic(gauge_to_algebraic(T), sl2_pair.K)
        assert lhs == rhs


def test_gauge_conversion_round_trip(sl2_uea):
    Q = sparse_gauge(sl2_uea, 19)
    assert gauge_to_algebraic(gauge_to_formal(sl2_uea, Q)) == Q


# -- classical action -------------------------------------------------------


def _inv_q(lie, order):
    # an invariant exterior-degree-1 flow generator: hbar h (x) lambda
    return CdybElement.monomial(
        (1,), (1,), HSeries.hbar(order, 1), order
    )


def test_classical_identity(sl2, sl2_rho):
    alpha = taylor_rescale(sl2_rho, ORDER)
    q = CdybElement.zero(ORDER)
    assert classical_gauge_act(sl2, q, alpha, form="mc") == alpha


def test_classical_infinitesimal_at_zero_is_differential(sl2):
    q = _inv_q(sl2, ORDER)
    zero = CdybElement.zero(ORDER)
    inf = classical_gauge_infinitesimal(sl2, q, zero, form="mc")
    assert inf == cdyb_dgla.differential(q)


def test_classical_flow_preserves_mc(sl2, sl2_rho):
    alpha = taylor_rescale(sl2_rho, ORDER)
    q = _inv_q(sl2, ORDER)
    beta = classical_gauge_act(sl2, q, alpha, form="mc")
    res = cdyb_dgla.cdybe_residual(sl2, beta, mode="dgla")
    assert res.is_zero()


def test_classical_valuation_guard(sl2, sl2_rho):
    alpha = taylor_rescale(sl2_rho, ORDER)
    q = CdybElement.monomial((1,), (1,), F(1), ORDER)
    with pytest.raises(ValuationViolated):
        classical_gauge_act(sl2, q, alpha, form="mc")


def test_form_intertwining(sl2, sl2_rho):
    # the two presentations of the action correspond under the rescaling
    # leg degree d -> extra factor hbar^d on the generator and
    # hbar^{d+1} on the target
    rho_body = sl2_rho.body
    q_r = CdybElement.monomial((1,), (1,), F(1), ORDER)
    inf_r = classical_gauge_infinitesimal(sl2, q_r, rho_body, form="r")
    alpha = taylor_rescale(sl2_rho, ORDER)
    q_mc = rescale_generator(q_r, ORDER).scale(HSeries.hbar(ORDER, 1))
    inf_mc = classical_gauge_infinitesimal(sl2, q_mc, alpha, form="mc")
    rescaled = rescale_generator(inf_r, ORDER).map_coeffs(
        lambda c: c.shift(1)
    )
    assert rescaled == inf_mc


def test_classical_find_gauge(sl2, sl2_rho):
    alpha = taylor_rescale(sl2_rho, ORDER)
    beta = classical_gauge_act(sl2, _inv_q(sl2, ORDER), alpha, form="mc")
    r = classical_find_gauge(sl2, alpha, beta)
    assert r.equivalent
    assert classical_chain_act(sl2, r.gauge, alpha) == beta


# -- classical reduction ----------------------------------------------------


def test_reduce_sl2(sl2, sl2_rho):
    alpha = taylor_rescale(sl2_rho, ORDER)
    red = reduce_classical(sl2, alpha)
    expected = CdybElement.monomial(
        (0, 2), (), HSeries.hbar(ORDER, 1), ORDER
    )
    assert red.pi == expected
    assert red.gauge.equivalent


def test_reduce_trivial_base(ab2, ab2_rho):
    alpha = taylor_rescale(ab2_rho, ORDER)
    red = reduce_classical(ab2, alpha)
    assert red.pi == alpha
    assert red.embedded == alpha


def test_reduce_abelian_base(aff, aff_rho):
    alpha = taylor_rescale(aff_rho, ORDER)
    red = reduce_classical(aff, alpha)
    expected = CdybElement.monomial(
        (0, 1), (), HSeries.hbar(ORDER, 1), ORDER
    )
    assert red.pi == expected
    assert red.gauge.equivalent


def test_reduce_rejects_non_mc(sl2):
    bad = CdybElement.monomial((0, 2), (), HSeries.hbar(ORDER, 1), ORDER)
    with pytest.raises(NotMaurerCartan):
        reduce_classical(sl2, bad)
