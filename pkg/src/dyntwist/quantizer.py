"""Order-by-order twist quantization of formal dynamical r-matrices.

The pipeline: validate an r-matrix, rescale it to a Maurer-Cartan element,
solve the algebraic twist equation order by order in hbar (with affine
obstruction repair), convert the algebraic twist K to the formal twist J,
and verify the dynamical twist equation with the PBW star product.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from . import cdyb_dgla, linalg
from .adt_dgla import (
    AdtElement,
    adte_residual,
    alt_embed,
    brace,
    differential_b,
    invariant_adt_basis,
    kappa_solve,
    tensor_embed,
)
from .errors import (
    GradingMismatch,
    NoSolution,
    NotInImage,
    NotInvariant,
    NotMaurerCartan,
    ObstructionNotRepaired,
    ValuationViolated,
)
from .hseries import HSeries
from .lie_core import LieData
from .tensor_spaces import CdybElement
from .uea import PbwElement, UEnvelope, coproduct_mono

_F0 = Fraction(0)
_F1 = Fraction(1)


def _add_series(acc: dict, key, val: HSeries, order: int):
    nv = acc.get(key, HSeries.zero(order)) + val
    if nv.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = nv


# -- validated r-matrix input ----------------------------------------------


class RMatrix:
    """An invariant bivector-valued formal function on the base dual.

    The body may carry hbar-dependent coefficients (hbar-dependent
    families are allowed).  The classical equation residual is computed
    on construction: components of leg degree below the truncation must
    vanish; the unverifiable tail (which involves truncated-away layers)
    is stored, never hidden.
    """

    def __init__(self, lie: LieData, body: CdybElement, truncation=None,
                 check: bool = True):
        self.lie = lie
        self.body = body
        self.mode = lie.mode
        degs = body.exterior_degrees()
        if degs and degs != [2]:
            raise GradingMismatch(
                f"r-matrix body must have exterior degree 2, got {degs}"
            )
        if not body.is_invariant(lie):
            raise NotInvariant("r-matrix body is not invariant")
        if truncation is None:
            truncation = max(body.sh_degrees(), default=0)
        self.truncation = truncation
        self.residual_head = None
        self.residual_tail = None
        if check:
            res = cdyb_dgla.cdybe_residual(lie, body, mode="dgla")
            head = CdybElement.zero(body.order)
            tail = CdybElement.zero(body.order)
            for d in res.sh_degrees():
                part = res.component(sh=d)
                if d <= truncation - 1:
                    head = head + part
                else:
                    tail = tail + part
            self.residual_head = head
            self.residual_tail = tail
            if not head.is_zero():
                raise NotMaurerCartan(
                    "classical dynamical equation residual nonzero below "
                    f"the truncation degree {truncation}: {head!r}"
                )

    def layer(self, n: int, order: int) -> CdybElement:
        """hbar-order-n coefficient of the rescaled family hbar rho(hbar l).

        The leg-degree-d part of the hbar^j layer of the body lands at
        order j + d + 1; this returns the order-n slice with constant
        coefficients.
        """
        terms = {}
        for (w, s), c in self.body.terms.items():
            j = n - 1 - len(s)
            if j < 0:
                continue
            a = c.coeff(j)
            if a != 0:
                terms[(w, s)] = HSeries.constant(a, order)
        return CdybElement(terms, order)


def taylor_rescale(rho: RMatrix, order: int) -> CdybElement:
    """Rescale: the leg-degree-d part acquires a factor hbar^{d+1}.

    The result must be Maurer-Cartan within the truncation order; the
    residual is recomputed, not assumed.
    """
    terms = {}
    for (w, s), c in rho.body.terms.items():
        shifted = c.truncate(order).shift(len(s) + 1)
        if not shifted.is_zero():
            terms[(w, s)] = shifted
    alpha = CdybElement(terms, order)
    res = cdyb_dgla.cdybe_residual(rho.lie, alpha, mode="dgla")
    if not res.is_zero():
        raise NotMaurerCartan(
            f"rescaled element fails Maurer-Cartan: residual {res!r}"
        )
    return alpha


# -- formal twists (group factors with a polynomial leg) --------------------


class FormalTwist:
    """Sparse element of (U g)^{(x) slots} (x) S h over HSeries.

    Keys are tuples of `slots` PBW monomials followed by one sorted leg
    monomial (a commutative word in the base indices).
    """

    __slots__ = ("uea", "slots", "terms", "order")

    def __init__(self, uea: UEnvelope, slots: int, terms: dict, order: int):
        self.uea = uea
        self.slots = slots
        self.order = order
        self.terms = {}
        for key, c in terms.items():
            if len(key) != slots + 1:
                raise GradingMismatch(
                    f"key {key} has {len(key) - 1} factors, expected {slots}"
                )
            if not isinstance(c, HSeries):
                c = HSeries.constant(c, order)
            if not c.is_zero():
                self.terms[tuple(tuple(m) for m in key)] = c

    @classmethod
    def zero(cls, uea, slots, order):
        return cls(uea, slots, {}, order)

    @classmethod
    def unit(cls, uea, slots, order):
        return cls(uea, slots, {((),) * (slots + 1): _F1}, order)

    def __add__(self, other: "FormalTwist") -> "FormalTwist":
        if other.slots != self.slots:
            raise GradingMismatch("slot count mismatch in sum")
        order = min(self.order, other.order)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            _add_series(terms, k, c, order)
        return FormalTwist(self.uea, self.slots, terms, order)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FormalTwist(
            self.uea, self.slots,
            {k: -c for k, c in self.terms.items()}, self.order,
        )

    def scale(self, c) -> "FormalTwist":
        if not isinstance(c, HSeries):
            c = HSeries.constant(c, self.order)
        return FormalTwist(
            self.uea, self.slots,
            {k: v * c for k, v in self.terms.items()}, self.order,
        )

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, FormalTwist):
            return NotImplemented
        return self.slots == other.slots and (self - other).is_zero()

    def __hash__(self):
        raise TypeError("FormalTwist is not hashable")

    def op(self) -> "FormalTwist":
        """Swap the two group factors (slots == 2 only)."""
        if self.slots != 2:
            raise GradingMismatch("op is defined for two factors")
        return FormalTwist(
            self.uea, 2,
            {(k[1], k[0], k[2]): c for k, c in self.terms.items()},
            self.order,
        )

    def hbar_component(self, n: int) -> "FormalTwist":
        terms = {}
        for k, c in self.terms.items():
            a = c.coeff(n)
            if a != 0:
                terms[k] = HSeries.constant(a, self.order)
        return FormalTwist(self.uea, self.slots, terms, self.order)

    def map_coeffs(self, f) -> "FormalTwist":
        return FormalTwist(
            self.uea, self.slots,
            {k: f(c) for k, c in self.terms.items()}, self.order,
        )

    def total_truncate(self, bound: int) -> "FormalTwist":
        """Drop layers with hbar order plus leg degree above the bound.

        A twist computed through hbar order N determines its formal
        counterpart exactly on this triangle (the order-m, leg-degree-d
        layer comes from the order-(m + d) coefficient), so residual
        checks on converted twists are meaningful only inside it.
        """
        terms = {}
        for key, c in self.terms.items():
            cap = bound - len(key[-1])
            if cap < 0:
                continue
            kept = HSeries(
                [c.coeff(m) for m in range(min(cap, self.order) + 1)],
                self.order,
            )
            if not kept.is_zero():
                terms[key] = kept
        return FormalTwist(self.uea, self.slots, terms, self.order)

    def __mul__(self, other: "FormalTwist") -> "FormalTwist":
        """Slotwise group products, star product on the legs."""
        if other.slots != self.slots:
            raise GradingMismatch("slot count mismatch in product")
        uea = self.uea
        order = min(self.order, other.order)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                c = c1 * c2
                slot_exps = [
                    uea.mul_mono(k1[i], k2[i]).items()
                    for i in range(self.slots)
                ]
                leg_exp = [
                    (m, _poly_to_series(p, order))
                    for m, p in _star_mono(uea, k1[-1], k2[-1]).items()
                ]
                for combo in itertools.product(*slot_exps, leg_exp):
                    coeff = c
                    for _, d in combo[:-1]:
                        coeff = coeff * d
                    leg_m, leg_c = combo[-1]
                    key = tuple(m for m, _ in combo[:-1]) + (leg_m,)
                    _add_series(out, key, coeff * leg_c, order)
        return FormalTwist(uea, self.slots, out, order)

    def __repr__(self):
        if not self.terms:
            return f"FormalTwist(0; slots={self.slots})"
        names = self.uea.lie.basis_names
        bits = []
        for key, c in sorted(self.terms.items()):
            ss = [".".join(names[i] for i in m) or "1" for m in key]
            bits.append(f"({c!r})*[" + " | ".join(ss) + "]")
        return "FormalTwist(" + " + ".join(bits) + ")"


# -- PBW star product -------------------------------------------------------
#
# f * g := syminv(sym(f) sym(g)) computed in the enveloping algebra with
# the bracket scaled by hbar, so each unit drop in word length costs one
# power of hbar.  Polynomials in hbar with Fraction coefficients are used
# internally so results cache independently of the truncation order.


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for a, c in p.items():
        for b, d in q.items():
            k = a + b
            nv = out.get(k, _F0) + c * d
            if nv == 0:
                out.pop(k, None)
            else:
                out[k] = nv
    return out


def _poly_add(acc: dict, key, p: dict):
    tgt = acc.setdefault(key, {})
    for a, c in p.items():
        nv = tgt.get(a, _F0) + c
        if nv == 0:
            tgt.pop(a, None)
        else:
            tgt[a] = nv
    if not tgt:
        acc.pop(key, None)


def _poly_to_series(p: dict, order: int) -> HSeries:
    out = HSeries.zero(order)
    for a, c in p.items():
        out = out + HSeries.hbar(order, a, c)
    return out


def _sym_poly(uea: UEnvelope, mono) -> dict:
    """Symmetrization in the hbar-scaled algebra as {mono: {power: Fraction}}."""
    n = len(mono)
    return {m: {n - len(m): c} for m, c in uea.sym_mono(mono).items()}


def _sym_poly_inverse(uea: UEnvelope, terms: dict) -> dict:
    """Invert the hbar-scaled symmetrization (unitriangular in length)."""
    work = {m: dict(p) for m, p in terms.items()}
    out: dict = {}
    while work:
        top = max(len(m) for m in work)
        # snapshot the layer: subtracting a monomial's own symmetrization
        # mutates work[m] in place
        layer = [(m, dict(p)) for m, p in work.items() if len(m) == top]
        for m, p in layer:
            _poly_add(out, m, p)
            for mm, q in _sym_poly(uea, m).items():
                _poly_add(work, mm, _poly_mul(p, {k: -c for k, c in q.items()}))
    return out


def _star_mono(uea: UEnvelope, s, t) -> dict:
    """Star product of two leg monomials: {leg monomial: hbar polynomial}."""
    cache = getattr(uea, "_star_cache", None)
    if cache is None:
        cache = {}
        uea._star_cache = cache
    key = (tuple(s), tuple(t))
    hit = cache.get(key)
    if hit is not None:
        return hit
    h_set = set(uea.lie.h_indices)
    for i in key[0] + key[1]:
        if i not in h_set:
            raise NotInImage(f"leg index {i} is not in the base subalgebra")
    prod: dict = {}
    for ma, pa in _sym_poly(uea, key[0]).items():
        for mb, pb in _sym_poly(uea, key[1]).items():
            pab = _poly_mul(pa, pb)
            n = len(ma) + len(mb)
            for m, c in uea.straighten(ma + mb).items():
                _poly_add(prod, m, _poly_mul(pab, {n - len(m): c}))
    out = _sym_poly_inverse(uea, prod)
    cache[key] = out
    return out


def pbw_star(uea: UEnvelope, f: dict, g: dict, order: int) -> dict:
    """Star product of leg polynomials {leg monomial: HSeries}."""
    out: dict = {}
    for s, cf in f.items():
        if not isinstance(cf, HSeries):
            cf = HSeries.constant(cf, order)
        for t, cg in g.items():
            if not isinstance(cg, HSeries):
                cg = HSeries.constant(cg, order)
            c = cf * cg
            for m, p in _star_mono(uea, s, t).items():
                _add_series(out, m, c * _poly_to_series(p, order), order)
    return out


# -- argument shift ---------------------------------------------------------


def _shift_coproduct(J: FormalTwist) -> FormalTwist:
    """Leg coaction form: each leg letter maps to hbar x (x) 1 + 1 (x) x.

    The letters sent to the new third group factor are symmetrized there.
    """
    uea = J.uea
    order = J.order
    out: dict = {}
    for key, c in J.terms.items():
        gfac = key[:-1]
        s = key[-1]
        for positions in itertools.product((0, 1), repeat=len(s)):
            chosen = tuple(s[i] for i in range(len(s)) if positions[i] == 0)
            rest = tuple(s[i] for i in range(len(s)) if positions[i] == 1)
            coeff = c * HSeries.hbar(order, len(chosen))
            for m, d in uea.sym_mono(chosen).items():
                _add_series(out, gfac + (m, rest), coeff * d, order)
    return FormalTwist(uea, J.slots + 1, out, order)


def _leg_derivative(s, i) -> tuple:
    """d/dx_i of a commutative leg monomial: (multiplicity, reduced monomial)."""
    mult = s.count(i)
    if mult == 0:
        return 0, ()
    pos = s.index(i)
    return mult, s[:pos] + s[pos + 1 :]


def _shift_taylor(J: FormalTwist) -> FormalTwist:
    """Taylor form: sum over hbar^k/k! times k-fold leg derivatives."""
    uea = J.uea
    order = J.order
    h_idx = uea.lie.h_indices
    out: dict = {}
    fact = 1
    for key, c in J.terms.items():
        gfac = key[:-1]
        s = key[-1]
        deg = len(s)
        fact = 1
        for k in range(deg + 1):
            if k:
                fact *= k
            coeff = c * HSeries.hbar(order, k, Fraction(1, fact))
            for word in itertools.product(h_idx, repeat=k):
                rest = s
                mult = 1
                for i in word:
                    m, rest = _leg_derivative(rest, i)
                    mult *= m
                    if mult == 0:
                        break
                if mult == 0:
                    continue
                for m, d in uea.straighten(word).items():
                    _add_series(
                        out, gfac + (m, rest), coeff * (mult * d), order
                    )
    return FormalTwist(uea, J.slots + 1, out, order)


def shift_argument(J: FormalTwist, form: str = "both") -> FormalTwist:
    """Append a group factor recording the shifted leg argument.

    Both defining forms (leg coaction and Taylor expansion) are computed
    and compared exactly unless one is selected.
    """
    if form == "coproduct":
        return _shift_coproduct(J)
    if form == "taylor":
        return _shift_taylor(J)
    if form != "both":
        raise ValueError(f"unknown form {form!r}")
    a = _shift_coproduct(J)
    b = _shift_taylor(J)
    if a != b:
        raise GradingMismatch(
            "the two argument-shift forms disagree: " + repr(a - b)
        )
    return a


# -- the twist equation on the formal side ----------------------------------


def _embed_split_first(J: FormalTwist) -> FormalTwist:
    """Coproduct on the first group factor, old second factor moves right."""
    out: dict = {}
    for (m1, m2, s), c in J.terms.items():
        for parts, mult in coproduct_mono(m1, 2).items():
            _add_series(out, (parts[0], parts[1], m2, s), c * mult, J.order)
    return FormalTwist(J.uea, 3, out, J.order)


def _embed_split_second(J: FormalTwist) -> FormalTwist:
    """Coproduct on the second group factor."""
    out: dict = {}
    for (m1, m2, s), c in J.terms.items():
        for parts, mult in coproduct_mono(m2, 2).items():
            _add_series(out, (m1, parts[0], parts[1], s), c * mult, J.order)
    return FormalTwist(J.uea, 3, out, J.order)


def _embed_last_two(J: FormalTwist) -> FormalTwist:
    """Pad with a unit in the first group factor."""
    out = {((),) + k: c for k, c in J.terms.items()}
    return FormalTwist(J.uea, 3, out, J.order)


def dte_residual(J: FormalTwist) -> FormalTwist:
    """Residual of the dynamical twist equation (trivial associator).

    Zero iff J is a formal dynamical twist within the truncation.
    """
    if J.slots != 2:
        raise GradingMismatch("twist equation requires two group factors")
    lhs = _embed_split_first(J) * shift_argument(J, form="coproduct")
    rhs = _embed_split_second(J) * _embed_last_two(J)
    return lhs - rhs


def semiclassical_check(J: FormalTwist, rho: RMatrix):
    """Compare (J - J^op)/hbar mod hbar against the embedded r-matrix.

    Returns (flag, residual).  For hbar-dependent families the comparison
    uses the constant layer of the body, matching the rescaling.
    """
    diff = (J - J.op()).hbar_component(1)
    expected: dict = {}
    for (w, s), c in rho.body.terms.items():
        a = c.coeff(0)
        if a == 0 or len(s) > J.order - 1:
            # leg degrees at the truncation order and beyond sit outside
            # the triangle the computed twist determines
            continue
        _add_series(expected, ((w[0],), (w[1],), s),
                    HSeries.constant(a, J.order), J.order)
        _add_series(expected, ((w[1],), (w[0],), s),
                    HSeries.constant(-a, J.order), J.order)
    residual = diff - FormalTwist(J.uea, 2, expected, J.order)
    return residual.is_zero(), residual


# -- conversion between the algebraic and formal pictures -------------------


def k_to_j(uea: UEnvelope, K: AdtElement, strict: bool = True) -> FormalTwist:
    """Recover the formal twist from an algebraic twist.

    The order-n coefficient of K is the symmetrized image of the
    leg-degree-d, order-(n-d) coefficients of J; inverting legwise is
    triangular in the leg degree.  A leg degree above n has no preimage
    and raises ValuationViolated.  With strict=True (twists, which are
    1 + O(hbar)) leg degree n at order n is also rejected; gauge
    elements may carry it (their formal form starts at exp of a leg
    polynomial) and convert with strict=False.
    """
    h_allowed = set(uea.lie.h_indices)
    order = K.order
    arity = K.arity
    unit_key = ((),) * (arity + 1)
    out: dict = {}
    for n in range(order + 1):
        Kn = K.hbar_component(n)
        by_front: dict = {}
        for key, c in Kn.terms.items():
            by_front.setdefault(key[:-1], {})[key[-1]] = c
        for front, legs in by_front.items():
            leg_elt = PbwElement(uea, legs, order)
            for smono, c in uea.sym_inverse(leg_elt, allowed=h_allowed).items():
                d = len(smono)
                m = n - d
                if m < 0 or (strict and m == 0
                             and front + (smono,) != unit_key):
                    raise ValuationViolated(
                        f"order-{n} coefficient has leg degree {d}; the "
                        "filtration certificate fails"
                    )
                _add_series(out, front + (smono,), c.shift(m), order)
    return FormalTwist(uea, arity, out, order)


def j_to_k(J: FormalTwist) -> AdtElement:
    """Substitute the rescaled argument and symmetrize the leg."""
    uea = J.uea
    order = J.order
    out: dict = {}
    for key, c in J.terms.items():
        s = key[-1]
        coeff = c.shift(len(s))
        if coeff.is_zero():
            continue
        for m, d in uea.sym_mono(s).items():
            _add_series(out, key[:-1] + (m,), coeff * d, order)
    return AdtElement(uea, J.slots, out, order)


# -- the order-by-order solver ----------------------------------------------


class TwistPair:
    """An algebraic twist together with its formal counterpart."""

    __slots__ = ("K", "J", "valuation_certificate")

    def __init__(self, K: AdtElement, J: FormalTwist, valuation_certificate):
        self.K = K
        self.J = J
        self.valuation_certificate = valuation_certificate


def _random_coboundary(uea: UEnvelope, rng, n: int, order: int) -> AdtElement:
    """Coboundary of a random invariant element, leg length <= n - 2.

    Added at order n it leaves the equation residual untouched through
    that order (the coboundary is closed, and its cross terms with the
    positive-order coefficients start at order n + 1) while moving the
    solver to a different representative of the same gauge class.
    """
    terms: dict = {}
    for L in range(1, 4):
        for vec in invariant_adt_basis(uea, 1, L):
            if any(len(key[-1]) > n - 2 for key in vec):
                continue
            a = rng.randint(-1, 1)
            if a:
                for key, c in vec.items():
                    nv = terms.get(key, _F0) + a * c
                    if nv == 0:
                        terms.pop(key, None)
                    else:
                        terms[key] = nv
    return differential_b(AdtElement(uea, 1, terms, order))


def solve_adte(rho: RMatrix, N: int, repair_depth: int = 2,
               uea: UEnvelope | None = None,
               perturb_seed=None) -> TwistPair:
    """Quantize an r-matrix to an algebraic dynamical twist mod hbar^{N+1}.

    At each order n the new coefficient is pinned to the antisymmetrized
    embedding of the order-n layer of the rescaled r-matrix plus an
    invariant correction of leg length at most n - 2, found by solving a
    coboundary equation against the order-n equation residual.  When that
    linear problem has no solution, lower orders are re-opened by an
    affine repair bounded by repair_depth.

    With perturb_seed set, a seeded random coboundary is mixed into each
    coefficient from order 2 on; different seeds give different but
    gauge-equivalent twists.
    """
    if uea is None:
        uea = UEnvelope(rho.lie)
    rng = random.Random(perturb_seed) if perturb_seed is not None else None
    order = N
    K = AdtElement.unit(uea, 2, order)
    for n in range(1, N + 1):
        pinned = alt_embed(uea, rho.layer(n, order))
        K = K + pinned.scale(HSeries.hbar(order, n))
        if rng is not None and n >= 2:
            pert = _random_coboundary(uea, rng, n, order)
            K = K + pert.scale(HSeries.hbar(order, n))
        target = adte_residual(K).hbar_component(n)
        if target.is_zero():
            continue
        try:
            corr = kappa_solve(uea, target, max_filtration=n - 2)
        except NoSolution:
            K = _affine_repair(uea, K, n, target, repair_depth)
            continue
        K = K + corr.scale(HSeries.hbar(order, n))
        if not adte_residual(K).hbar_component(n).is_zero():
            raise ObstructionNotRepaired(
                f"order-{n} correction did not close the equation",
                order=n, obstruction=target, depth_tried=0,
            )
    res = adte_residual(K)
    if not res.is_zero():
        raise ObstructionNotRepaired(
            "final residual nonzero after order-by-order solve",
            order=res.hbar_valuation(), obstruction=res, depth_tried=0,
        )
    certificate = [K.hbar_component(n).filtration_degree()
                   for n in range(N + 1)]
    for n, f in enumerate(certificate):
        if n >= 1 and f > n - 1:
            raise ValuationViolated(
                f"order-{n} coefficient has leg length {f} > {n - 1}"
            )
    J = k_to_j(uea, K)
    return TwistPair(K, J, certificate)


def _bracket_columns(K: AdtElement, vec_elt: AdtElement, m: int, n: int):
    """Order-p contributions of adding vec_elt at order m, for p <= n.

    The equation residual is linear minus coboundary plus a square; the
    derivative at the current K is -b at order m and braces against the
    known coefficients at higher orders.
    """
    out = {}
    bm = -differential_b(vec_elt)
    if not bm.is_zero():
        out[m] = bm
    for p in range(m + 1, n + 1):
        Ka = K.hbar_component(p - m)
        contrib = brace(vec_elt, [Ka]) + brace(Ka, [vec_elt])
        if not contrib.is_zero():
            out[p] = contrib
    return out


def _affine_repair(uea: UEnvelope, K: AdtElement, n: int,
                   target: AdtElement, repair_depth: int) -> AdtElement:
    """Re-open lower orders to make the order-n equation solvable.

    Unknowns are invariant corrections at orders n - depth .. n with the
    pinned filtration contract (leg length at most m - 2 at order m);
    the linearized equations at every touched order are solved jointly
    and the exact residual is recomputed afterwards.  Products of two
    corrections can fall inside the touched range at small n, in which
    case the linear solution may fail the exact check and the failure is
    reported, never hidden.
    """
    order = K.order
    lengths = target.total_lengths()
    lmax = max(lengths) if lengths else n + 1
    last_error = None
    for depth in range(1, repair_depth + 1):
        m_min = max(n - depth, 1)
        variables = []  # (order m, constant AdtElement)
        for m in range(m_min, n + 1):
            max_filt = m - 2
            if max_filt < 0:
                continue
            for L in range(lmax + 1):
                for vec in invariant_adt_basis(uea, 2, L):
                    if any(len(key[-1]) > max_filt for key in vec):
                        continue
                    elt = AdtElement(uea, 2, dict(vec), order)
                    variables.append((m, elt))
        if not variables:
            last_error = "no admissible correction variables"
            continue
        # rows indexed by (touched order, arity-3 key)
        col_entries = []
        row_index: dict = {}
        for m, elt in variables:
            entries = {}
            for p, contrib in _bracket_columns(K, elt, m, n).items():
                for key, c in contrib.terms.items():
                    idx = row_index.setdefault((p, key), len(row_index))
                    entries[idx] = entries.get(idx, _F0) + c.coeff(0)
            col_entries.append(entries)
        rhs = {}
        for key, c in target.terms.items():
            idx = row_index.setdefault((n, key), len(row_index))
            rhs[idx] = -c.coeff(0)
        rows: dict = {}
        for j, entries in enumerate(col_entries):
            for i, v in entries.items():
                rows.setdefault(i, {})[j] = v
        row_list = [rows.get(i, {}) for i in range(len(row_index))]
        sol = linalg.solve(row_list, rhs, len(variables))
        if sol is None:
            last_error = f"joint system inconsistent at depth {depth}"
            continue
        K2 = K
        for j, a in sol.items():
            m, elt = variables[j]
            K2 = K2 + elt.scale(HSeries.hbar(order, m, a))
        res = adte_residual(K2)
        ok = all(res.hbar_component(p).is_zero() for p in range(n + 1))
        if ok:
            return K2
        last_error = f"quadratic cross terms broke the depth-{depth} solution"
    raise ObstructionNotRepaired(
        f"order-{n} obstruction not repaired: {last_error}",
        order=n, obstruction=target, depth_tried=repair_depth,
    )


def semiclassical_embed(uea: UEnvelope, rho: RMatrix) -> AdtElement:
    """Tensor embedding of the constant layer, for direct comparisons."""
    return tensor_embed(uea, rho.body.hbar_component(0))
