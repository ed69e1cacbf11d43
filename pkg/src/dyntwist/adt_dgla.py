"""The twist-side dgla on T^*(U g) (x) U h.

Keys are tuples of k+1 PBW monomials: k tensor factors in U g followed by
one factor in U h (the leg).  The differential is the Hochschild-style
coboundary of Eq-free description: a unit is inserted on the left, the
coproduct is applied to each tensor factor in turn, and finally the leg
is split by the coaction (U g part first).  All of these preserve the
total PBW length, so every computation decomposes into finite slices.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import linalg
from .errors import GradingMismatch, NoSolution, NotInvariant, TruncationTooSmall
from .hseries import HSeries
from .lie_core import invariant_basis
from .tensor_spaces import CdybElement, wedge_sort
from .uea import (
    PbwElement,
    UEnvelope,
    UmSplitter,
    all_monomials,
    all_monomials_from,
    coproduct_mono,
)

_F0 = Fraction(0)
_F1 = Fraction(1)


def _series(c, order) -> HSeries:
    if isinstance(c, HSeries):
        return c
    return HSeries.constant(c, order)


def _add(acc: dict, key, val: HSeries, order: int):
    nv = acc.get(key, HSeries.zero(order)) + val
    if nv.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = nv


class AdtElement:
    """Sparse element of (U g)^{(x) k} (x) U h over HSeries."""

    __slots__ = ("uea", "arity", "terms", "order")

    def __init__(self, uea: UEnvelope, arity: int, terms: dict, order: int):
        self.uea = uea
        self.arity = arity
        self.order = order
        self.terms = {}
        for key, c in terms.items():
            if len(key) != arity + 1:
                raise GradingMismatch(
                    f"key {key} has {len(key) - 1} factors, expected {arity}"
                )
            c = _series(c, order)
            if not c.is_zero():
                self.terms[tuple(tuple(m) for m in key)] = c

    @classmethod
    def zero(cls, uea, arity, order):
        return cls(uea, arity, {}, order)

    @classmethod
    def unit(cls, uea, arity, order):
        """1 (x) ... (x) 1."""
        return cls(uea, arity, {((),) * (arity + 1): _F1}, order)

    def __add__(self, other: "AdtElement") -> "AdtElement":
        if other.arity != self.arity:
            # zero is compatible with every arity (degenerate compositions)
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise GradingMismatch("arity mismatch in sum")
        order = min(self.order, other.order)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            _add(terms, k, c, order)
        return AdtElement(self.uea, self.arity, terms, order)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return AdtElement(
            self.uea, self.arity, {k: -c for k, c in self.terms.items()}, self.order
        )

    def scale(self, c) -> "AdtElement":
        c = _series(c, self.order)
        return AdtElement(
            self.uea, self.arity, {k: v * c for k, v in self.terms.items()}, self.order
        )

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, AdtElement):
            return NotImplemented
        if other.arity != self.arity:
            return self.is_zero() and other.is_zero()
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("AdtElement is not hashable")

    # -- gradings and filtrations ------------------------------------------

    def total_lengths(self):
        return sorted({sum(len(m) for m in k) for k in self.terms})

    def length_component(self, length: int) -> "AdtElement":
        terms = {
            k: c
            for k, c in self.terms.items()
            if sum(len(m) for m in k) == length
        }
        return AdtElement(self.uea, self.arity, terms, self.order)

    def filtration_degree(self) -> int:
        """Largest leg length appearing (0 for the zero element)."""
        return max((len(k[-1]) for k in self.terms), default=0)

    def filtration_component(self, n: int) -> "AdtElement":
        terms = {k: c for k, c in self.terms.items() if len(k[-1]) == n}
        return AdtElement(self.uea, self.arity, terms, self.order)

    def hbar_component(self, n: int) -> "AdtElement":
        terms = {}
        for k, c in self.terms.items():
            a = c.coeff(n)
            if a != 0:
                terms[k] = HSeries.constant(a, self.order)
        return AdtElement(self.uea, self.arity, terms, self.order)

    def hbar_valuation(self):
        vals = [c.valuation() for c in self.terms.values()]
        vals = [v for v in vals if v is not None]
        return min(vals) if vals else None

    def map_coeffs(self, f) -> "AdtElement":
        return AdtElement(
            self.uea, self.arity, {k: f(c) for k, c in self.terms.items()}, self.order
        )

    # -- h action ----------------------------------------------------------

    def ad(self, x: int) -> "AdtElement":
        terms = {}
        for key, c in self.terms.items():
            for out_key, coeff in ad_adt_key(self.uea, x, key).items():
                _add(terms, out_key, c * coeff, self.order)
        return AdtElement(self.uea, self.arity, terms, self.order)

    def is_invariant(self) -> bool:
        return all(self.ad(x).is_zero() for x in self.uea.lie.h_indices)

    def __repr__(self):
        if not self.terms:
            return f"AdtElement(0; arity={self.arity})"
        names = self.uea.lie.basis_names
        bits = []
        for key, c in sorted(self.terms.items()):
            slot_strs = [
                ".".join(names[i] for i in m) or "1" for m in key
            ]
            bits.append(f"({c!r})*[" + " | ".join(slot_strs) + "]")
        return "AdtElement(" + " + ".join(bits) + ")"


def ad_adt_key(uea: UEnvelope, x: int, key) -> dict:
    """Derivation action of basis element x on all factors and the leg."""
    out = {}
    for slot in range(len(key)):
        for m, c in uea.ad_mono(x, key[slot]).items():
            k2 = key[:slot] + (m,) + key[slot + 1 :]
            nv = out.get(k2, _F0) + c
            if nv == 0:
                out.pop(k2, None)
            else:
                out[k2] = nv
    return out


# -- differential ----------------------------------------------------------


def differential_b(P: AdtElement) -> AdtElement:
    """Coboundary raising the arity by one; squares to zero.

    Terms: unit inserted in slot 1 (positive), then alternating coproducts
    on each U g factor, and finally the coaction splitting of the leg with
    its U g part becoming the new last tensor factor.
    """
    k = P.arity
    order = P.order
    terms: dict = {}
    for key, c in P.terms.items():
        gfac = key[:-1]
        leg = key[-1]
        # unit insertion on the left
        _add(terms, ((),) + gfac + (leg,), c, order)
        # coproduct on factor i (1-based), sign (-1)^i
        for i in range(1, k + 1):
            sgn = -1 if i % 2 else 1
            for parts, mult in coproduct_mono(gfac[i - 1], 2).items():
                new = gfac[: i - 1] + parts + gfac[i:] + (leg,)
                _add(terms, new, c * (sgn * mult), order)
        # coaction on the leg, sign (-1)^{k+1}
        sgn = -1 if (k + 1) % 2 else 1
        for parts, mult in coproduct_mono(leg, 2).items():
            new = gfac + parts
            _add(terms, new, c * (sgn * mult), order)
    return AdtElement(P.uea, k + 1, terms, order)


# -- cup product -----------------------------------------------------------


def cup(P: AdtElement, Q: AdtElement) -> AdtElement:
    """Associative product of arities k and l with arity k + l.

    P's factors occupy the first k slots; its leg is spread by the
    iterated coaction over the last l slots and the leg, multiplying in
    front of Q's content.
    """
    if P.uea is not Q.uea:
        raise GradingMismatch("cup of elements over different algebras")
    k, l = P.arity, Q.arity
    order = min(P.order, Q.order)
    terms: dict = {}
    for keyP, cP in P.terms.items():
        gP, legP = keyP[:-1], keyP[-1]
        for parts, mult in coproduct_mono(legP, l + 1).items():
            for keyQ, cQ in Q.terms.items():
                gQ, legQ = keyQ[:-1], keyQ[-1]
                slots = list(gP)
                ok = True
                for j in range(l):
                    slots.append(parts[j] + gQ[j])
                slots.append(parts[l] + legQ)
                _straight_key(P.uea, tuple(slots), terms, cP * cQ * mult, order)
    return AdtElement(P.uea, k + l, terms, order)


def _straight_key(uea, slots, acc, coeff, order):
    """Straighten every slot word and accumulate into `acc`."""
    expansions = [uea.straighten(w) for w in slots]
    partial = [((), _F1)]
    for exp in expansions:
        nxt = []
        for pref, c0 in partial:
            for m, c in exp.items():
                nxt.append((pref + (m,), c0 * c))
        partial = nxt
    for key, c in partial:
        _add(acc, key, coeff * c, order)
    return ()


# -- brace insertions ------------------------------------------------------


def brace(P: AdtElement, Qs) -> AdtElement:
    """Brace operation inserting Q_1, ..., Q_m into P's inputs in order.

    Sums over strictly increasing input positions of P.  The consumed
    factor of P is spread by the iterated coproduct across the inserted
    block (counit for arity-zero insertions); each inserted element's leg
    is spread by the iterated coaction over everything to its right.
    The sign of a placement is (-1)^{sum_s (arity(Q_s)-1) i_s} where i_s
    is the 0-based output slot at which the s-th block starts; this is
    the convention under which the brace relations hold exactly.  Note
    that it entails {1x1x1|P,Q} = (-1)^{(|Q|-1)|P|} P cup Q.
    """
    Qs = list(Qs)
    m = len(Qs)
    k = P.arity
    ks = [Q.arity for Q in Qs]
    n = k + sum(ks) - m
    if m > k or n < 0:
        return AdtElement.zero(P.uea, max(n, 0), P.order)
    order = min([P.order] + [Q.order for Q in Qs])
    out: dict = {}
    uea = P.uea
    for positions in itertools.combinations(range(1, k + 1), m):
        # sign exponent: sum_s (arity(Q_s)-1) * (0-based output start of block s)
        sgn = 1
        cursor = 0
        consumed = {j: s for s, j in enumerate(positions)}
        for t in range(1, k + 1):
            if t in consumed:
                s = consumed[t]
                e = (ks[s] - 1) * cursor
                if e % 2:
                    sgn = -sgn
                cursor += ks[s]
            else:
                cursor += 1
        _brace_placement(uea, P, Qs, positions, n, sgn, out, order)
    return AdtElement(uea, n, out, order)


def _brace_placement(uea, P, Qs, positions, n, sgn, out, order):
    m = len(Qs)
    ks = [Q.arity for Q in Qs]
    consumed = {j: s for s, j in enumerate(positions)}  # input -> insertion idx
    # slot layout: for each input of P, a block of width 1 or ks[s]
    starts = {}
    cursor = 0
    block_of = {}
    for t in range(1, P.arity + 1):
        if t in consumed:
            s = consumed[t]
            starts[s] = cursor
            for u in range(ks[s]):
                block_of[cursor + u] = s
            cursor += ks[s]
        else:
            cursor += 1
    assert cursor == n
    for keyP, cP in P.terms.items():
        gP, legP = keyP[:-1], keyP[-1]
        # distribute P's factors
        base: list = [[] for _ in range(n + 1)]
        coeffP = cP
        cursor = 0
        dead = False
        delta_choices = []  # (slot range, factor, width) needing coproduct
        for t in range(1, P.arity + 1):
            f = gP[t - 1]
            if t in consumed:
                s = consumed[t]
                w = ks[s]
                if w == 0:
                    if f != ():  # counit kills non-scalars
                        dead = True
                        break
                else:
                    delta_choices.append((cursor, f, w))
                cursor += w
            else:
                base[cursor].append(f)
                cursor += 1
        if dead:
            continue
        base[n].append(legP)
        # expand coproducts of consumed factors and Q contents recursively
        stack = [(base, coeffP, 0)]
        for start, f, w in delta_choices:
            nxt = []
            for slots, c0, _ in stack:
                for parts, mult in coproduct_mono(f, w).items():
                    s2 = [list(x) for x in slots]
                    for u in range(w):
                        s2[start + u].append(parts[u])
                    nxt.append((s2, c0 * mult, 0))
            stack = nxt
        # insert the Q_s contents, in order of s (legs spread to the right)
        for s, Q in enumerate(Qs):
            start = starts[s]
            w = ks[s]
            spread = n - (start + w)  # slots to the right of the block
            nxt = []
            for slots, c0, _ in stack:
                for keyQ, cQ in Q.terms.items():
                    gQ, legQ = keyQ[:-1], keyQ[-1]
                    for parts, mult in coproduct_mono(legQ, spread + 1).items():
                        s2 = [list(x) for x in slots]
                        for u in range(w):
                            s2[start + u].append(gQ[u])
                        for u in range(spread):
                            s2[start + w + u].append(parts[u])
                        s2[n].append(parts[spread])
                        nxt.append((s2, c0 * cQ * mult, 0))
            stack = nxt
        for slots, c0, _ in stack:
            words = tuple(
                tuple(itertools.chain.from_iterable(slot)) for slot in slots
            )
            _straight_key(uea, words, out, c0 * sgn, order)


def gerstenhaber_bracket(
    P: AdtElement, Q: AdtElement, check_invariance: bool = True
) -> AdtElement:
    """[P, Q] = {P|Q} - (-1)^{(|P|-1)(|Q|-1)} {Q|P}.

    A Lie bracket only on h-invariant elements; by default both arguments
    are checked and NotInvariant is raised otherwise.
    """
    if check_invariance:
        for name, E in (("first", P), ("second", Q)):
            if not E.is_invariant():
                raise NotInvariant(f"{name} bracket argument is not h-invariant")
    sgn = -1 if ((P.arity - 1) * (Q.arity - 1)) % 2 else 1
    return brace(P, [Q]) - brace(Q, [P]).scale(sgn)


# -- projections and embeddings --------------------------------------------


def p2_project(splitter: UmSplitter, P: AdtElement) -> AdtElement:
    """Factorwise projection onto sym(S m) tensor counit on the leg."""
    uea = splitter.uea
    order = P.order
    terms: dict = {}
    for key, c in P.terms.items():
        if key[-1] != ():  # counit on the leg
            continue
        expansions = []
        dead = False
        for mfac in key[:-1]:
            um = splitter.um_project(PbwElement(uea, {mfac: _F1}, order))
            if um.is_zero():
                dead = True
                break
            expansions.append(um.terms)
        if dead:
            continue
        partial = [((), HSeries.one(order))]
        for exp in expansions:
            nxt = []
            for pref, c0 in partial:
                for mono, cc in exp.items():
                    nxt.append((pref + (mono,), c0 * cc))
            partial = nxt
        for pref, c0 in partial:
            _add(terms, pref + ((),), c * c0, order)
    return AdtElement(uea, P.arity, terms, order)


def alt(P: AdtElement) -> CdybElement:
    """Project each factor to its primitive part, antisymmetrize to wedges.

    The leg is carried back to S h through the symmetrization inverse.
    """
    uea = P.uea
    order = P.order
    out = CdybElement.zero(order)
    # group terms by leg to invert sym legwise
    by_leg: dict = {}
    for key, c in P.terms.items():
        if any(len(m) != 1 for m in key[:-1]):
            continue
        by_leg.setdefault(key[-1], []).append((key[:-1], c))
    for leg, items in by_leg.items():
        leg_elt = PbwElement(uea, {leg: _F1}, order)
        s_coeffs = uea.sym_inverse(leg_elt, allowed=set(uea.lie.h_indices))
        for gkey, c in items:
            letters = tuple(m[0] for m in gkey)
            ws = wedge_sort(letters)
            if ws is None:
                continue
            sign, wedge = ws
            for smono, sc in s_coeffs.items():
                out = out + CdybElement(
                    {(wedge, smono): c * sc * sign}, order
                )
    return out


def alt_embed(uea: UEnvelope, elt: CdybElement) -> AdtElement:
    """Antisymmetrized tensor embedding with 1/k! so alt o alt_embed = id.

    All wedge monomials must share one exterior degree (the arity).
    """
    k = elt.exterior_degree()
    order = elt.order
    terms: dict = {}
    norm = Fraction(1, _factorial(k))
    for (w, s), c in elt.terms.items():
        leg = uea.sym_mono(s)
        for perm in itertools.permutations(range(k)):
            sign = _perm_sign(perm)
            gkey = tuple((w[p],) for p in perm)
            for mono, lc in leg.items():
                _add(terms, gkey + (mono,), c * (sign * norm * lc), order)
    return AdtElement(uea, k, terms, order)


def tensor_embed(uea: UEnvelope, elt: CdybElement) -> AdtElement:
    """x ^ y (x) s -> (x (x) y - y (x) x) (x) sym(s), without 1/2."""
    if elt.exterior_degree() != 2:
        raise GradingMismatch("tensor_embed expects exterior degree 2")
    order = elt.order
    terms: dict = {}
    for (w, s), c in elt.terms.items():
        for mono, lc in uea.sym_mono(s).items():
            _add(terms, ((w[0],), (w[1],), mono), c * lc, order)
            _add(terms, ((w[1],), (w[0],), mono), -(c * lc), order)
    return AdtElement(uea, 2, terms, order)


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _perm_sign(perm) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


# -- basis enumeration and exact solving -----------------------------------


def adt_monomials(uea: UEnvelope, arity: int, total_length: int):
    """All keys of the given arity whose factor lengths sum to the total."""
    lie = uea.lie
    keys = []
    for comp in _compositions(total_length, arity + 1):
        per_slot = []
        for slot in range(arity):
            per_slot.append(
                [
                    m
                    for m in all_monomials(lie.dim, comp[slot])
                    if len(m) == comp[slot]
                ]
            )
        per_slot.append(
            [
                m
                for m in all_monomials_from(lie.h_indices, comp[arity])
                if len(m) == comp[arity]
            ]
        )
        for combo in itertools.product(*per_slot):
            keys.append(tuple(combo))
    return keys


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


_invariant_caches: "weakref.WeakKeyDictionary" = None


def invariant_adt_basis(uea: UEnvelope, arity: int, total_length: int):
    global _invariant_caches
    if _invariant_caches is None:
        import weakref

        _invariant_caches = weakref.WeakKeyDictionary()
    cache = _invariant_caches.setdefault(uea, {})
    key = (arity, total_length)
    if key not in cache:
        keys = adt_monomials(uea, arity, total_length)
        cache[key] = invariant_basis(
            uea.lie, keys, lambda x, k: ad_adt_key(uea, x, k)
        )
    return cache[key]


def kappa_solve(
    uea: UEnvelope,
    target: AdtElement,
    max_filtration: int | None = None,
):
    """Solve b(u) = target with u invariant, slice by slice.

    Every total-length slice is solved independently by exact elimination
    over the invariant basis of the lower arity; an optional leg-length
    bound restricts the solution space.  Raises NoSolution with the
    unreachable residual when the target is not in the image.
    """
    if target.arity == 0:
        raise GradingMismatch("cannot lower arity below zero")
    order = target.order
    result = AdtElement.zero(uea, target.arity - 1, order)
    for L in target.total_lengths():
        slice_t = target.length_component(L)
        basis = invariant_adt_basis(uea, target.arity - 1, L)
        if max_filtration is not None:
            basis = [
                v
                for v in basis
                if all(len(key[-1]) <= max_filtration for key in v)
            ]
        imgs = []
        for vec in basis:
            u = AdtElement(uea, target.arity - 1, dict(vec), order)
            imgs.append(differential_b(u))
        tkeys = sorted(
            set(slice_t.terms) | {k for im in imgs for k in im.terms}
        )
        col = {k: i for i, k in enumerate(tkeys)}
        rows: dict = {}
        for j, im in enumerate(imgs):
            for key, c in im.terms.items():
                rows.setdefault(col[key], {})[j] = c.coeff(0)
        row_list = [rows.get(i, {}) for i in range(len(tkeys))]
        sol_terms: dict = {}
        for nlevel in range(order + 1):
            rhs = {}
            for key, c in slice_t.terms.items():
                a = c.coeff(nlevel)
                if a != 0:
                    rhs[col[key]] = a
            if not rhs:
                continue
            sol = linalg.solve(row_list, rhs, len(imgs))
            if sol is None:
                raise NoSolution(
                    f"target length-{L} slice not in the image of b",
                    residual=slice_t,
                )
            for j, a in sol.items():
                for key, c in basis[j].items():
                    _add(sol_terms, key, HSeries.hbar(order, nlevel, a * c), order)
        result = result + AdtElement(uea, target.arity - 1, sol_terms, order)
    return result


def cohomology_dims(uea: UEnvelope, max_k: int, max_length: int):
    """dim H^k of the invariant complex for k = 0..max_k.

    Total PBW length is preserved by the differential; each length slice
    is finite and solved exactly.  The two largest computed lengths must
    contribute nothing, else TruncationTooSmall.
    """
    if max_length < 2:
        raise TruncationTooSmall("need max_length >= 2")
    dims = []
    for k in range(max_k + 1):
        per_l = []
        for L in range(max_length + 1):
            per_l.append(_cohomology_dim_slice(uea, k, L))
        if per_l[-1] != 0 or per_l[-2] != 0:
            raise TruncationTooSmall(
                f"cohomology in arity {k} has not stabilized by total "
                f"length {max_length}: tail dims {per_l[-2:]}"
            )
        dims.append(sum(per_l))
    return dims


def _cohomology_dim_slice(uea: UEnvelope, k: int, L: int) -> int:
    basis_k = invariant_adt_basis(uea, k, L)
    n_k = len(basis_k)
    if n_k == 0:
        return 0
    rank_out = _b_rank(uea, k, basis_k)
    dim_ker = n_k - rank_out
    rank_in = 0
    if k >= 1:
        basis_prev = invariant_adt_basis(uea, k - 1, L)
        if basis_prev:
            rank_in = _b_rank(uea, k - 1, basis_prev)
    return dim_ker - rank_in


def _b_rank(uea: UEnvelope, k: int, basis) -> int:
    cols = []
    key_index: dict = {}
    for vec in basis:
        u = AdtElement(uea, k, dict(vec), 0)
        img = differential_b(u)
        col = {}
        for key, c in img.terms.items():
            idx = key_index.setdefault(key, len(key_index))
            col[idx] = c.coeff(0)
        cols.append(col)
    rows: dict = {}
    for j, col in enumerate(cols):
        for i, v in col.items():
            rows.setdefault(i, {})[j] = v
    return linalg.rank(list(rows.values()), len(cols))


# -- the twist equation residual -------------------------------------------


def adte_residual(K: AdtElement, mode: str = "direct") -> AdtElement:
    """Residual of the algebraic dynamical twist equation for arity-2 K.

    mode "direct" computes K^{12,3,4} K^{1,2,34} - K^{1,23,4} K^{2,3,4}
    with slotwise products; mode "mc" computes the Maurer-Cartan residual
    -b(K-1) + {K-1 | K-1} of K-1 for the dgla whose differential is the
    negative coboundary.  The two modes agree identically.
    """
    if K.arity != 2:
        raise GradingMismatch("twist residual requires arity 2")
    if mode == "mc":
        Kt = K - AdtElement.unit(K.uea, 2, K.order)
        return -differential_b(Kt) + brace(Kt, [Kt])
    if mode != "direct":
        raise ValueError(f"unknown mode {mode!r}")
    uea = K.uea
    order = K.order
    out: dict = {}
    items = list(K.terms.items())
    for (f1, f2, leg), c1 in items:
        for (g1, g2, legg), c2 in items:
            c = c1 * c2
            # K^{12,3,4} K^{1,2,34}
            for p1, m1 in coproduct_mono(f1, 2).items():
                for p2, m2 in coproduct_mono(legg, 2).items():
                    slots = (
                        p1[0] + g1,
                        p1[1] + g2,
                        f2 + p2[0],
                        leg + p2[1],
                    )
                    _straight_key(uea, slots, out, c * (m1 * m2), order)
            # - K^{1,23,4} K^{2,3,4}
            for p1, m1 in coproduct_mono(f2, 2).items():
                slots = (
                    f1,
                    p1[0] + g1,
                    p1[1] + g2,
                    leg + legg,
                )
                _straight_key(uea, slots, out, -(c * m1), order)
    return AdtElement(uea, 3, out, order)
