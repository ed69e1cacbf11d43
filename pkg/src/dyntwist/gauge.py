"""Gauge actions on twists and the classical reduction to bivectors.

Three incarnations of a gauge transformation are handled: the algebraic
form Q (a group factor with a universal-enveloping leg, Q = 1 + O(hbar)),
the formal form T (a group factor with a polynomial leg, invertible by
total degree), and the classical generator q (a vector-valued formal
function flowing Maurer-Cartan elements by affine transformations).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import cdyb_dgla, linalg
from .adt_dgla import AdtElement, adte_residual, invariant_adt_basis, kappa_solve
from .errors import (
    GradingMismatch,
    NoSolution,
    NotInvariant,
    NotInvertible,
    NotMaurerCartan,
    StraighteningStalled,
    ValuationViolated,
)
from .hseries import HSeries
from .lie_core import LieData, invariant_basis
from .linfinity import classical_contraction, invert_contraction, mc_transport
from .quantizer import FormalTwist, j_to_k, k_to_j, shift_argument
from .tensor_spaces import CdybElement, ad_cdyb_key, cdyb_monomials
from .uea import UEnvelope, coproduct_mono

_F0 = Fraction(0)
_F1 = Fraction(1)


class GaugeElement:
    """A gauge transformation in up to three equivalent forms.

    Q: algebraic form, element of the two-leg invariant space with
    Q = 1 + O(hbar); T: formal form with a polynomial leg; q: classical
    generator.  Any subset may be populated.
    """

    __slots__ = ("Q", "T", "q")

    def __init__(self, Q=None, T=None, q=None):
        self.Q = Q
        self.T = T
        self.q = q


def _as_algebraic(g) -> AdtElement:
    if isinstance(g, GaugeElement):
        g = g.Q
    if not isinstance(g, AdtElement):
        raise GradingMismatch("expected an algebraic gauge element")
    return g


def _as_formal(g) -> FormalTwist:
    if isinstance(g, GaugeElement):
        g = g.T
    if not isinstance(g, FormalTwist):
        raise GradingMismatch("expected a formal gauge element")
    return g


def _as_classical(g) -> CdybElement:
    if isinstance(g, GaugeElement):
        g = g.q
    if not isinstance(g, CdybElement):
        raise GradingMismatch("expected a classical gauge generator")
    return g


# -- products and inverses ---------------------------------------------------


def adt_mul(A: AdtElement, B: AdtElement) -> AdtElement:
    """Slotwise product on tensor factors and the leg alike."""
    if A.arity != B.arity:
        raise GradingMismatch("arity mismatch in product")
    uea = A.uea
    order = min(A.order, B.order)
    out: dict = {}
    for k1, c1 in A.terms.items():
        for k2, c2 in B.terms.items():
            c = c1 * c2
            exps = [
                uea.mul_mono(k1[i], k2[i]).items()
                for i in range(A.arity + 1)
            ]
            for combo in itertools.product(*exps):
                coeff = c
                for _, d in combo:
                    coeff = coeff * d
                key = tuple(m for m, _ in combo)
                nv = out.get(key, HSeries.zero(order)) + coeff
                if nv.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = nv
    return AdtElement(uea, A.arity, out, order)


def adt_inverse(A: AdtElement) -> AdtElement:
    """Inverse of a 1 + O(hbar) element by the truncated geometric series."""
    unit = AdtElement.unit(A.uea, A.arity, A.order)
    if A.hbar_component(0) != unit:
        raise NotInvertible("constant term is not the unit")
    R = unit - A
    acc = unit
    pw = unit
    for _ in range(A.order):
        pw = adt_mul(pw, R)
        if pw.is_zero():
            break
        acc = acc + pw
    return acc


def total_valuation(F: FormalTwist):
    """Minimal hbar order plus leg degree over all terms (None for zero)."""
    best = None
    for key, c in F.terms.items():
        v = c.valuation()
        if v is None:
            continue
        t = v + len(key[-1])
        if best is None or t < best:
            best = t
    return best


def formal_inverse(T: FormalTwist, bound=None) -> FormalTwist:
    """Inverse by the geometric series in the total-degree filtration.

    A legitimate gauge element differs from the unit by terms of total
    degree (hbar order plus leg degree) at least one, so the series
    terminates once truncated to the triangle.
    """
    if bound is None:
        bound = T.order
    unit = FormalTwist.unit(T.uea, T.slots, T.order)
    R = (unit - T).total_truncate(bound)
    tv = total_valuation(R)
    if tv is not None and tv < 1:
        raise NotInvertible("element is not unit plus total-degree >= 1")
    acc = unit
    pw = unit
    for _ in range(bound):
        pw = (pw * R).total_truncate(bound)
        if pw.is_zero():
            break
        acc = acc + pw
    return acc


# -- the algebraic gauge action ----------------------------------------------


def _embed_split_factor(Q: AdtElement) -> AdtElement:
    """Coproduct on the group factor: superscript (12,3)."""
    out: dict = {}
    order = Q.order
    for (m, leg), c in Q.terms.items():
        for parts, mult in coproduct_mono(m, 2).items():
            key = (parts[0], parts[1], leg)
            nv = out.get(key, HSeries.zero(order)) + c * mult
            if not nv.is_zero():
                out[key] = nv
            else:
                out.pop(key, None)
    return AdtElement(Q.uea, 2, out, order)


def _embed_pad_left(Q: AdtElement) -> AdtElement:
    """Unit in the first slot: superscript (2,3)."""
    out = {((),) + k: c for k, c in Q.terms.items()}
    return AdtElement(Q.uea, 2, out, Q.order)


def _embed_coact_leg(Q: AdtElement) -> AdtElement:
    """Coaction splitting of the leg: superscript (1,23)."""
    out: dict = {}
    order = Q.order
    for (m, leg), c in Q.terms.items():
        for parts, mult in coproduct_mono(leg, 2).items():
            key = (m, parts[0], parts[1])
            nv = out.get(key, HSeries.zero(order)) + c * mult
            if not nv.is_zero():
                out[key] = nv
            else:
                out.pop(key, None)
    return AdtElement(Q.uea, 2, out, order)


def gauge_act_algebraic(Q, K: AdtElement) -> AdtElement:
    """K' = Q^{12,3} K (Q^{2,3})^{-1} (Q^{1,23})^{-1}."""
    Q = _as_algebraic(Q)
    if Q.arity != 1 or K.arity != 2:
        raise GradingMismatch("gauge has one factor, twist has two")
    unit1 = AdtElement.unit(Q.uea, 1, Q.order)
    if Q.hbar_component(0) != unit1:
        raise NotInvertible("algebraic gauge element must be 1 + O(hbar)")
    out = adt_mul(_embed_split_factor(Q), K)
    out = adt_mul(out, adt_inverse(_embed_pad_left(Q)))
    out = adt_mul(out, adt_inverse(_embed_coact_leg(Q)))
    return out


def gauge_compose(Q2, Q1) -> AdtElement:
    """Composite gauge: plain slotwise product.

    Acting by Q1 then Q2 equals acting by the composite whenever the
    invariant group factors commute with the base subalgebra, which is
    automatic when the base is abelian (invariance then means each
    factor commutes with it elementwise).
    """
    return adt_mul(_as_algebraic(Q2), _as_algebraic(Q1))


# -- the formal gauge action -------------------------------------------------


def _t_split(T: FormalTwist) -> FormalTwist:
    """Coproduct on the single group factor: T^{12}."""
    out: dict = {}
    order = T.order
    for (m, leg), c in T.terms.items():
        for parts, mult in coproduct_mono(m, 2).items():
            key = (parts[0], parts[1], leg)
            nv = out.get(key, HSeries.zero(order)) + c * mult
            if not nv.is_zero():
                out[key] = nv
            else:
                out.pop(key, None)
    return FormalTwist(T.uea, 2, out, order)


def _t_pad_left(T: FormalTwist) -> FormalTwist:
    """Unit in the first slot: T^2."""
    out = {((),) + k: c for k, c in T.terms.items()}
    return FormalTwist(T.uea, 2, out, T.order)


def gauge_act_formal(T, J: FormalTwist) -> FormalTwist:
    """J' = T^{12} * J * (T^2)^{-1} * (T^1 at the shifted argument)^{-1}.

    Computed on the triangle (hbar order plus leg degree bounded by the
    truncation), where all four factors and their inverses are finite.
    """
    T = _as_formal(T)
    if T.slots != 1 or J.slots != 2:
        raise GradingMismatch("gauge has one factor, twist has two")
    bound = min(T.order, J.order)
    T = T.total_truncate(bound)
    J = J.total_truncate(bound)
    t12 = _t_split(T)
    t2_inv = formal_inverse(_t_pad_left(T), bound)
    t1s_inv = formal_inverse(shift_argument(T, form="coproduct"), bound)
    out = (t12 * J).total_truncate(bound)
    out = (out * t2_inv).total_truncate(bound)
    out = (out * t1s_inv).total_truncate(bound)
    return out


def gauge_to_formal(uea: UEnvelope, Q) -> FormalTwist:
    """Formal form of an algebraic gauge element (the inverse rescaling)."""
    return k_to_j(uea, _as_algebraic(Q), strict=False)


def gauge_to_algebraic(T) -> AdtElement:
    """Algebraic form of a formal gauge element (rescaled argument)."""
    return j_to_k(_as_formal(T))


# -- classical gauge flows ---------------------------------------------------


def _shift_affine(lie: LieData, q: CdybElement) -> CdybElement:
    """- sum_i h_i wedge (d q / d lambda^i)."""
    order = q.order
    out = CdybElement.zero(order)
    for (w, s), c in q.terms.items():
        x = w[0]
        for i in set(s):
            mult = s.count(i)
            pos = s.index(i)
            rest = s[:pos] + s[pos + 1 :]
            out = out + CdybElement.monomial((i, x), rest, c * (-mult), order)
    return out


def _sh_truncate(elt: CdybElement, bound: int) -> CdybElement:
    terms = {k: c for k, c in elt.terms.items() if len(k[1]) <= bound}
    return CdybElement(terms, elt.order)


def classical_gauge_infinitesimal(lie: LieData, q, target,
                                  form: str = "mc") -> CdybElement:
    """q . alpha = dq + [q, alpha], or the affine-shift variant for the
    unrescaled r-matrix form: -sum_i h_i wedge dq/dlambda^i + [q, rho]."""
    q = _as_classical(q)
    if form == "mc":
        affine = cdyb_dgla.differential(q)
    elif form == "r":
        affine = _shift_affine(lie, q)
    else:
        raise ValueError(f"unknown form {form!r}")
    return affine + cdyb_dgla.bracket(lie, q, target)


def classical_gauge_act(lie: LieData, q, target, form: str = "mc",
                        sh_bound=None) -> CdybElement:
    """Exponentiated affine action by the truncated flow.

    The result is exp(ad_q) target plus the affine series
    sum_k ad_q^k(affine term)/(k+1)!.  The mc form terminates by hbar
    valuation; the r form by growth of the leg degree, truncated at
    sh_bound (defaulting to the truncation order).
    """
    q = _as_classical(q)
    if q.is_zero():
        return target
    if q.exterior_degrees() != [1]:
        raise GradingMismatch("gauge generator must have exterior degree 1")
    if not q.is_invariant(lie):
        raise NotInvariant("gauge generator is not invariant")
    if form == "mc":
        val = min((c.valuation() for c in q.terms.values()), default=None)
        if val is None or val < 1:
            raise ValuationViolated(
                "mc-form generator must have hbar valuation >= 1"
            )
        affine = cdyb_dgla.differential(q)
        cut = None
    elif form == "r":
        if 0 in q.sh_degrees():
            raise ValuationViolated(
                "r-form generator must vanish at the origin"
            )
        affine = _shift_affine(lie, q)
        cut = target.order if sh_bound is None else sh_bound
    else:
        raise ValueError(f"unknown form {form!r}")
    out = target
    term = target
    k = 0
    while not term.is_zero():
        k += 1
        term = cdyb_dgla.bracket(lie, q, term).scale(Fraction(1, k))
        if cut is not None:
            term = _sh_truncate(term, cut)
        out = out + term
    term = affine
    if cut is not None:
        term = _sh_truncate(term, cut)
    out = out + term
    k = 1
    while not term.is_zero():
        k += 1
        term = cdyb_dgla.bracket(lie, q, term).scale(Fraction(1, k))
        if cut is not None:
            term = _sh_truncate(term, cut)
        out = out + term
    return out


def rescale_generator(q: CdybElement, order: int) -> CdybElement:
    """Substitute the rescaled argument: leg degree d gains hbar^d.

    Intertwines the two flow forms with the rescaling that turns an
    r-matrix into a Maurer-Cartan element.
    """
    terms = {}
    for (w, s), c in q.terms.items():
        shifted = c.truncate(order).shift(len(s))
        if not shifted.is_zero():
            terms[(w, s)] = shifted
    return CdybElement(terms, order)


# -- equivalence testing -----------------------------------------------------


class GaugeResult:
    """Outcome of an equivalence solve.

    equivalent is the verdict; gauge holds the transformation (algebraic
    element, or the list of classical flow generators applied in order);
    when inequivalent, obstruction carries the first unreachable residual
    layer and order its hbar order.
    """

    __slots__ = ("equivalent", "gauge", "obstruction", "order")

    def __init__(self, equivalent, gauge=None, obstruction=None, order=None):
        self.equivalent = equivalent
        self.gauge = gauge
        self.obstruction = obstruction
        self.order = order

    def __bool__(self):
        return self.equivalent


def find_gauge(K: AdtElement, K2: AdtElement) -> GaugeResult:
    """Solve the algebraic gauge relation for Q order by order.

    At each hbar order the linearized problem is a coboundary equation
    over the invariant basis (deterministic minimal solution); the full
    nonlinear action is recomputed before every order, so the final
    equality is exact, and an unsolvable layer is returned as a
    certified obstruction rather than raised.
    """
    if K.arity != 2 or K2.arity != 2:
        raise GradingMismatch("equivalence is between two-factor twists")
    uea = K.uea
    order = min(K.order, K2.order)
    Q = AdtElement.unit(uea, 1, order)
    for n in range(1, order + 1):
        cur = gauge_act_algebraic(Q, K)
        diff = (K2 - cur).hbar_component(n)
        if diff.is_zero():
            continue
        # the linearization of the action at order n is minus the
        # coboundary of the new gauge coefficient
        try:
            qn = kappa_solve(uea, -diff, max_filtration=n)
        except NoSolution:
            try:
                qn = kappa_solve(uea, -diff, max_filtration=None)
            except NoSolution as exc:
                return GaugeResult(
                    False, obstruction=exc.residual, order=n
                )
        Q = Q + qn.scale(HSeries.hbar(order, n))
    final = gauge_act_algebraic(Q, K)
    if not (K2 - final).is_zero():
        return GaugeResult(False, obstruction=K2 - final, order=None)
    return GaugeResult(True, gauge=Q)


def _invariant_cdyb_basis(lie: LieData, exterior: int, sh: int):
    keys = cdyb_monomials(lie, exterior, sh)
    return invariant_basis(lie, keys, lambda x, k: ad_cdyb_key(lie, x, k))


def classical_find_gauge(lie: LieData, alpha: CdybElement,
                         beta: CdybElement) -> GaugeResult:
    """Order-by-order classical equivalence via the affine flow.

    Returns the chain of flow generators (each already carrying its hbar
    power) whose successive mc-form flows carry alpha to beta exactly.
    """
    order = min(alpha.order, beta.order)
    cur = alpha
    chain = []
    for n in range(1, order + 1):
        diff = (beta - cur).hbar_component(n)
        if diff.is_zero():
            continue
        # at order n the flow moves cur by the differential of the new
        # generator (brackets with cur contribute at higher order)
        sh_max = max(diff.sh_degrees(), default=0) + 1
        basis = []
        for sh in range(sh_max + 1):
            basis.extend(_invariant_cdyb_basis(lie, 1, sh))
        imgs = [
            cdyb_dgla.differential(CdybElement(dict(v), order))
            for v in basis
        ]
        key_index: dict = {}
        rows: dict = {}
        for j, im in enumerate(imgs):
            for key, c in im.terms.items():
                idx = key_index.setdefault(key, len(key_index))
                rows.setdefault(idx, {})[j] = c.coeff(0)
        rhs = {}
        unreachable = False
        for key, c in diff.terms.items():
            if key not in key_index:
                unreachable = True
                break
            rhs[key_index[key]] = c.coeff(0)
        sol = None
        if not unreachable:
            row_list = [rows.get(i, {}) for i in range(len(key_index))]
            sol = linalg.solve(row_list, rhs, len(basis))
        if sol is None:
            return GaugeResult(False, obstruction=diff, order=n)
        q_terms: dict = {}
        for j, a in sol.items():
            for key, c in basis[j].items():
                nv = q_terms.get(key, HSeries.zero(order)) + HSeries.hbar(
                    order, n, a * c
                )
                if nv.is_zero():
                    q_terms.pop(key, None)
                else:
                    q_terms[key] = nv
        qn = CdybElement(q_terms, order)
        if qn.is_zero():
            return GaugeResult(False, obstruction=diff, order=n)
        cur = classical_gauge_act(lie, qn, cur, form="mc")
        chain.append(qn)
    if not (beta - cur).is_zero():
        return GaugeResult(False, obstruction=beta - cur, order=None)
    return GaugeResult(True, gauge=chain)


def classical_chain_act(lie: LieData, chain, alpha: CdybElement):
    """Replay a chain of mc-form flow generators."""
    cur = alpha
    for q in chain:
        cur = classical_gauge_act(lie, q, cur, form="mc")
    return cur


# -- classical reduction -----------------------------------------------------


class ReducedClassical:
    """Result of reducing a Maurer-Cartan element to an invariant bivector.

    pi is the reduced bivector (empty legs, complement factors only) with
    vanishing restricted square; embedded is its transport back into the
    full space; gauge certifies that embedded is equivalent to the input.
    """

    __slots__ = ("pi", "embedded", "gauge")

    def __init__(self, pi, embedded, gauge):
        self.pi = pi
        self.embedded = embedded
        self.gauge = gauge


def reduce_classical(lie: LieData, alpha: CdybElement,
                     arity_bound=None) -> ReducedClassical:
    """Reduce a Maurer-Cartan element to an invariant complement bivector.

    The reduction transports alpha along the homotopy tower onto the
    image of the projection, where the bracket restricted square must
    vanish; the inclusion tower carries the result back, and an
    order-by-order classical gauge solve certifies the round trip.
    """
    order = alpha.order
    res = cdyb_dgla.cdybe_residual(lie, alpha, mode="dgla")
    if not res.is_zero():
        raise NotMaurerCartan("input fails the Maurer-Cartan equation")
    val = min((c.valuation() for c in alpha.terms.values()), default=1)
    if val is not None and val < 1:
        raise NotMaurerCartan("input must have hbar valuation >= 1")
    if arity_bound is None:
        arity_bound = max(order, 1)
    C = classical_contraction(lie, order)
    Q, F, R = invert_contraction(C, arity_bound)
    pi = mc_transport(R, alpha, check=False)
    if not (C.proj(pi) - pi).is_zero():
        raise StraighteningStalled(
            "transported element left the projected subspace", residual=pi
        )
    square = cdyb_dgla.p1_project(lie, cdyb_dgla.bracket(lie, pi, pi))
    if not square.is_zero():
        raise StraighteningStalled(
            "restricted square of the reduced bivector is nonzero",
            residual=square,
        )
    embedded = mc_transport(Q, pi, check=True)
    cert = classical_find_gauge(lie, alpha, embedded)
    if not cert.equivalent:
        raise StraighteningStalled(
            "round-trip gauge certification failed",
            order=cert.order, residual=cert.obstruction,
        )
    return ReducedClassical(pi, embedded, cert)
