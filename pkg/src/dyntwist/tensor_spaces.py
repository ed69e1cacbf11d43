"""Sparse elements of wedge^* g (x) S h over the truncated hbar ring.

Monomial keys are pairs (wedge, sym): `wedge` a strictly increasing tuple
of g-basis indices, `sym` a weakly increasing tuple of h-basis indices.
Zero coefficients are pruned eagerly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import GradingMismatch, SpaceMismatch
from .hseries import HSeries
from .lie_core import LieData

_F0 = Fraction(0)
_F1 = Fraction(1)


def wedge_sort(indices):
    """Canonicalize a wedge word: (sign, sorted tuple) or None if repeated."""
    idx = list(indices)
    sign = 1
    # insertion sort; counts transpositions exactly
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None
    return sign, tuple(idx)


def sym_sort(indices):
    return tuple(sorted(indices))


def perm_sign(perm) -> int:
    """Sign of a permutation given as a tuple of distinct sortables."""
    sign = 1
    idx = list(perm)
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


class CdybElement:
    """Sparse element of wedge^* g (x) S h with HSeries coefficients."""

    __slots__ = ("terms", "order")

    def __init__(self, terms, order: int):
        self.order = order
        self.terms = {}
        for key, c in terms.items():
            if not isinstance(c, HSeries):
                c = HSeries.constant(c, order)
            if not c.is_zero():
                self.terms[key] = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "CdybElement":
        return cls({}, order)

    @classmethod
    def monomial(cls, wedge, sym, coeff, order: int) -> "CdybElement":
        ws = wedge_sort(wedge)
        if ws is None:
            return cls.zero(order)
        sign, wedge = ws
        return cls({(wedge, sym_sort(sym)): sign * _as_series(coeff, order)}, order)

    # -- ring structure ----------------------------------------------------

    def __add__(self, other: "CdybElement") -> "CdybElement":
        order = min(self.order, other.order)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, HSeries.zero(order)) + c
        return CdybElement(terms, order)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return CdybElement({k: -c for k, c in self.terms.items()}, self.order)

    def scale(self, c) -> "CdybElement":
        c = _as_series(c, self.order)
        return CdybElement({k: v * c for k, v in self.terms.items()}, self.order)

    def wedge(self, other: "CdybElement") -> "CdybElement":
        """Exterior product; S h legs multiply symmetrically."""
        order = min(self.order, other.order)
        terms = {}
        for (w1, s1), c1 in self.terms.items():
            for (w2, s2), c2 in other.terms.items():
                ws = wedge_sort(w1 + w2)
                if ws is None:
                    continue
                sign, w = ws
                key = (w, sym_sort(s1 + s2))
                c = c1 * c2 * sign
                terms[key] = terms.get(key, HSeries.zero(order)) + c
        return CdybElement(terms, order)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, CdybElement) and (self - other).is_zero()

    def __hash__(self):
        raise TypeError("CdybElement is not hashable")

    # -- gradings ----------------------------------------------------------

    def exterior_degrees(self):
        return sorted({len(w) for (w, _) in self.terms})

    def sh_degrees(self):
        return sorted({len(s) for (_, s) in self.terms})

    def is_homogeneous(self) -> bool:
        return len(self.exterior_degrees()) <= 1

    def exterior_degree(self) -> int:
        degs = self.exterior_degrees()
        if len(degs) > 1:
            raise GradingMismatch(f"mixed exterior degrees {degs}")
        return degs[0] if degs else 0

    def component(self, *, exterior=None, sh=None) -> "CdybElement":
        terms = {}
        for (w, s), c in self.terms.items():
            if exterior is not None and len(w) != exterior:
                continue
            if sh is not None and len(s) != sh:
                continue
            terms[(w, s)] = c
        return CdybElement(terms, self.order)

    def hbar_component(self, n: int) -> "CdybElement":
        """hbar^n layer, returned with constant coefficients."""
        terms = {}
        for key, c in self.terms.items():
            a = c.coeff(n)
            if a != 0:
                terms[key] = HSeries.constant(a, self.order)
        return CdybElement(terms, self.order)

    def map_coeffs(self, f) -> "CdybElement":
        return CdybElement({k: f(c) for k, c in self.terms.items()}, self.order)

    # -- h-action ----------------------------------------------------------

    def ad(self, lie: LieData, x: int) -> "CdybElement":
        terms = {}
        for key, c in self.terms.items():
            for out_key, coeff in ad_cdyb_key(lie, x, key).items():
                cc = c * coeff
                terms[out_key] = terms.get(out_key, HSeries.zero(self.order)) + cc
        return CdybElement(terms, self.order)

    def is_invariant(self, lie: LieData) -> bool:
        return all(self.ad(lie, x).is_zero() for x in lie.h_indices)

    # -- display -----------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "CdybElement(0)"
        bits = []
        for (w, s), c in sorted(self.terms.items()):
            mono = "^".join(str(i) for i in w) or "1"
            leg = "*".join(str(i) for i in s) or "1"
            bits.append(f"({c!r})*[{mono}|{leg}]")
        return "CdybElement(" + " + ".join(bits) + ")"

    def pretty(self, lie: LieData) -> str:
        bits = []
        for (w, s), c in sorted(self.terms.items()):
            mono = "^".join(lie.name_of(i) for i in w) or "1"
            leg = "*".join(lie.name_of(i) for i in s) or "1"
            bits.append(f"({c!r}) {mono} | {leg}")
        return " + ".join(bits) if bits else "0"


def _as_series(c, order) -> HSeries:
    if isinstance(c, HSeries):
        return c
    return HSeries.constant(c, order)


def ad_cdyb_key(lie: LieData, x: int, key) -> dict:
    """Action of basis element x on a (wedge, sym) monomial, by derivations.

    Returns {key: Fraction}.  The S h leg is only acted on when x is in h
    (the leg lives in S h, so the action must stay there).
    """
    wedge, sym = key
    out = {}
    for pos, y in enumerate(wedge):
        for z, c in lie.bracket_basis(x, y).items():
            new = wedge[:pos] + (z,) + wedge[pos + 1 :]
            ws = wedge_sort(new)
            if ws is None:
                continue
            sign, w = ws
            k2 = (w, sym)
            out[k2] = out.get(k2, _F0) + sign * c
            if out[k2] == 0:
                del out[k2]
    if sym:
        if not lie.is_h(x) and any(
            lie.bracket_basis(x, y) for y in set(sym)
        ):
            raise SpaceMismatch(
                "action of a non-h element does not preserve the S h leg"
            )
        for pos, y in enumerate(sym):
            for z, c in lie.bracket_basis(x, y).items():
                new = sym_sort(sym[:pos] + (z,) + sym[pos + 1 :])
                k2 = (wedge, new)
                out[k2] = out.get(k2, _F0) + c
                if out[k2] == 0:
                    del out[k2]
    return out


def cdyb_monomials(lie: LieData, exterior: int, sh: int):
    """All (wedge, sym) keys of the given bidegree, lexicographically."""
    wedges = itertools.combinations(range(lie.dim), exterior)
    syms = list(
        itertools.combinations_with_replacement(lie.h_indices, sh)
    )
    return [(w, s) for w in wedges for s in syms]


def from_coeff_dict(coeffs: dict, order: int) -> CdybElement:
    return CdybElement(dict(coeffs), order)


def grade_extract(x, grading: str, n: int):
    """Homogeneous component of x with respect to a named grading."""
    if isinstance(x, CdybElement):
        if grading == "exterior_degree":
            return x.component(exterior=n)
        if grading == "sh_degree":
            return x.component(sh=n)
        if grading == "hbar_order":
            return x.hbar_component(n)
        raise GradingMismatch(f"grading {grading!r} undefined on CdybElement")
    # AdtElement and friends implement their own component methods
    if grading == "arity":
        return x if x.arity == n else type(x).zero(x.uea, n, x.order)
    if grading == "hbar_order":
        return x.hbar_component(n)
    if grading == "uh_filtration":
        return x.filtration_component(n)
    raise GradingMismatch(f"grading {grading!r} undefined on {type(x).__name__}")
