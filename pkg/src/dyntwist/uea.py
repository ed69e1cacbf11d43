"""PBW arithmetic in the universal enveloping algebra.

Monomials are weakly increasing tuples of basis indices (declaration
order).  Straightening replaces x_j x_i (j > i) by x_i x_j + [x_j, x_i]
recursively; every result is cached per algebra.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from . import linalg
from .errors import DegreeOverflow, NoSolution, NotInImage
from .hseries import HSeries
from .lie_core import LieData

_F0 = Fraction(0)
_F1 = Fraction(1)


def _merge(acc: dict, key, val):
    nv = acc.get(key, _F0) + val
    if nv == 0:
        acc.pop(key, None)
    else:
        acc[key] = nv


class UEnvelope:
    """Straightening context for U(g) of a fixed Lie algebra."""

    def __init__(self, lie: LieData, degree_bound: int | None = None):
        self.lie = lie
        self.degree_bound = degree_bound
        self._straight_cache: dict = {(): {(): _F1}}
        self._sym_cache: dict = {}

    # -- straightening -----------------------------------------------------

    def straighten(self, word) -> dict:
        """Write an arbitrary word in the PBW basis: {monomial: Fraction}."""
        word = tuple(word)
        cached = self._straight_cache.get(word)
        if cached is not None:
            return cached
        out = self._straighten_uncached(word)
        self._straight_cache[word] = out
        return out

    def _straighten_uncached(self, word) -> dict:
        for pos in range(len(word) - 1):
            a, b = word[pos], word[pos + 1]
            if a > b:
                swapped = word[:pos] + (b, a) + word[pos + 2 :]
                out = dict(self.straighten(swapped))
                for k, c in self.lie.bracket_basis(a, b).items():
                    lower = word[:pos] + (k,) + word[pos + 2 :]
                    for mono, d in self.straighten(lower).items():
                        _merge(out, mono, c * d)
                return out
        return {word: _F1}

    def mul_mono(self, m1, m2) -> dict:
        if self.degree_bound is not None and len(m1) + len(m2) > self.degree_bound:
            raise DegreeOverflow(
                f"product degree {len(m1) + len(m2)} exceeds bound "
                f"{self.degree_bound}"
            )
        return self.straighten(m1 + m2)

    def ad_mono(self, x: int, mono) -> dict:
        """[x, mono] in PBW coordinates (a derivation of degree 0)."""
        out = {}
        for pos in range(len(mono)):
            for k, c in self.lie.bracket_basis(x, mono[pos]).items():
                for m, d in self.straighten(
                    mono[:pos] + (k,) + mono[pos + 1 :]
                ).items():
                    _merge(out, m, c * d)
        return out

    # -- symmetrization ----------------------------------------------------

    def sym_mono(self, mono) -> dict:
        """sym(x_1 ... x_k) = (1/k!) sum over orderings, straightened."""
        mono = tuple(sorted(mono))
        cached = self._sym_cache.get(mono)
        if cached is not None:
            return cached
        out = {}
        # each distinct word of the multiset arises from |stab| position
        # permutations, where |stab| is the product of letter multiplicities
        from collections import Counter

        stab = 1
        for v in Counter(mono).values():
            stab *= _factorial(v)
        norm = Fraction(stab, _factorial(len(mono)))
        for p in set(itertools.permutations(mono)):
            for m, c in self.straighten(p).items():
                _merge(out, m, c * norm)
        self._sym_cache[mono] = out
        return out

    def sym(self, coeffs: dict, order: int) -> "PbwElement":
        """Symmetrization of an S g element {sym-monomial: coeff}."""
        terms = {}
        for mono, c in coeffs.items():
            c = _series(c, order)
            for m, d in self.sym_mono(tuple(sorted(mono))).items():
                _add_series(terms, m, c * d, order)
        return PbwElement(self, terms, order)

    def sym_inverse(self, elt: "PbwElement", allowed=None) -> dict:
        """Preimage under sym as {sym-monomial: HSeries}.

        sym is unitriangular for the length filtration, so back-substitute
        from the top length down.  With `allowed` set, every monomial met
        along the way must use only those indices, else NotInImage.
        """
        work = dict(elt.terms)
        out = {}
        order = elt.order
        while work:
            top = max(len(m) for m in work)
            layer = {m: c for m, c in work.items() if len(m) == top}
            for m, c in layer.items():
                if allowed is not None and any(i not in allowed for i in m):
                    raise NotInImage(
                        f"monomial {m} uses indices outside the allowed set"
                    )
                out[m] = out.get(m, HSeries.zero(order)) + c
                for mm, d in self.sym_mono(m).items():
                    _add_series(work, mm, -(c * d), order)
        return {m: c for m, c in out.items() if not c.is_zero()}

    # -- hbar-scaled variants (for the PBW star product) -------------------

    def straighten_hbar(self, word, order: int) -> dict:
        """Straightening in U(g_hbar), bracket scaled by hbar.

        Each unit drop in length costs one commutator, hence one hbar.
        """
        n = len(word)
        out = {}
        for m, c in self.straighten(word).items():
            out[m] = HSeries.hbar(order, n - len(m), c)
        return out

    def sym_mono_hbar(self, mono, order: int) -> dict:
        n = len(mono)
        return {
            m: HSeries.hbar(order, n - len(m), c)
            for m, c in self.sym_mono(mono).items()
        }


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _series(c, order) -> HSeries:
    if isinstance(c, HSeries):
        return c
    return HSeries.constant(c, order)


def _add_series(acc: dict, key, val: HSeries, order: int):
    nv = acc.get(key, HSeries.zero(order)) + val
    if nv.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = nv


class PbwElement:
    """Sparse element of U(g) (or U(h), U(m)) over HSeries."""

    __slots__ = ("uea", "terms", "order")

    def __init__(self, uea: UEnvelope, terms: dict, order: int):
        self.uea = uea
        self.order = order
        self.terms = {}
        for m, c in terms.items():
            c = _series(c, order)
            if not c.is_zero():
                self.terms[tuple(m)] = c

    @classmethod
    def zero(cls, uea, order):
        return cls(uea, {}, order)

    @classmethod
    def unit(cls, uea, order):
        return cls(uea, {(): _F1}, order)

    @classmethod
    def generator(cls, uea, i, order):
        return cls(uea, {(i,): _F1}, order)

    def __add__(self, other):
        order = min(self.order, other.order)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            _add_series(terms, m, c, order)
        return PbwElement(self.uea, terms, order)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PbwElement(self.uea, {m: -c for m, c in self.terms.items()}, self.order)

    def scale(self, c):
        c = _series(c, self.order)
        return PbwElement(
            self.uea, {m: v * c for m, v in self.terms.items()}, self.order
        )

    def __mul__(self, other: "PbwElement") -> "PbwElement":
        order = min(self.order, other.order)
        terms = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                c = c1 * c2
                for m, d in self.uea.mul_mono(m1, m2).items():
                    _add_series(terms, m, c * d, order)
        return PbwElement(self.uea, terms, order)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, PbwElement) and (self - other).is_zero()

    def __hash__(self):
        raise TypeError("PbwElement is not hashable")

    def degree(self) -> int:
        """Maximum PBW monomial length (0 for the zero element)."""
        return max((len(m) for m in self.terms), default=0)

    def counit(self) -> HSeries:
        return self.terms.get((), HSeries.zero(self.order))

    def ad(self, x: int) -> "PbwElement":
        terms = {}
        for m, c in self.terms.items():
            for mm, d in self.uea.ad_mono(x, m).items():
                _add_series(terms, mm, c * d, self.order)
        return PbwElement(self.uea, terms, self.order)

    def __repr__(self):
        if not self.terms:
            return "PbwElement(0)"
        names = self.uea.lie.basis_names
        bits = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(names[i] for i in m) or "1"
            bits.append(f"({c!r})*{mono}")
        return "PbwElement(" + " + ".join(bits) + ")"


# -- coproduct and coaction ------------------------------------------------


@lru_cache(maxsize=None)
def split_positions(n: int, slots: int):
    """All assignments of n positions to `slots` slots, as index tuples."""
    return tuple(itertools.product(range(slots), repeat=n))


def coproduct_mono(mono, slots: int = 2) -> dict:
    """Iterated coproduct of a PBW monomial of primitives.

    Splitting a weakly increasing word keeps every part weakly increasing,
    so no straightening occurs.  Returns {tuple of monomials: multiplicity}.
    """
    out = {}
    for assignment in split_positions(len(mono), slots):
        parts = [[] for _ in range(slots)]
        for pos, s in enumerate(assignment):
            parts[s].append(mono[pos])
        key = tuple(tuple(p) for p in parts)
        out[key] = out.get(key, 0) + 1
    return out


def coproduct(elt: PbwElement, slots: int = 2) -> dict:
    """{tuple of monomials: HSeries} form of the iterated coproduct."""
    out = {}
    for m, c in elt.terms.items():
        for key, mult in coproduct_mono(m, slots).items():
            _add_series(out, key, c * mult, elt.order)
    return out


def uh_filtration_degree(elt: PbwElement) -> int:
    """Minimal n with elt in the n-th piece of the coalgebra filtration.

    For PBW monomials of primitives this is the monomial length; the
    agreement with the kernel definition is property-tested.
    """
    return elt.degree()


def in_filtration_kernel(elt: PbwElement, n: int) -> bool:
    """Check elt in ker (id - unit counit)^{(n+1)} circ Delta^{(n)} directly."""
    acc = {}
    for m, c in elt.terms.items():
        for key, mult in coproduct_mono(m, n + 1).items():
            if any(len(part) == 0 for part in key):
                continue
            _add_series(acc, key, c * mult, elt.order)
    return not acc


# -- the U g = U g . h  (+)  U m splitting ---------------------------------


class UmSplitter:
    """Solves the filtered splitting of U g into U g . h and sym(S m)."""

    def __init__(self, uea: UEnvelope):
        self.uea = uea
        self._cache: dict = {}

    def _slice(self, max_len: int):
        cached = self._cache.get(max_len)
        if cached is not None:
            return cached
        lie = self.uea.lie
        monos = all_monomials(lie.dim, max_len)
        col = {m: i for i, m in enumerate(monos)}
        generators = []  # (kind, payload, expansion dict)
        for w in all_monomials(lie.dim, max_len - 1):
            for h in lie.h_indices:
                exp = self.uea.straighten(w + (h,))
                if exp:
                    generators.append(("ideal", (w, h), exp))
        for s in all_monomials_from(lie.m_indices, max_len):
            generators.append(("um", s, self.uea.sym_mono(s)))
        rows = {}
        for j, (_, _, exp) in enumerate(generators):
            for m, c in exp.items():
                rows.setdefault(m, {})[j] = c
        matrix_rows = [rows.get(m, {}) for m in monos]
        cached = (monos, col, generators, matrix_rows)
        self._cache[max_len] = cached
        return cached

    def split(self, elt: PbwElement):
        """Return (ideal_part, um_part) with elt = ideal_part + um_part."""
        if elt.is_zero():
            z = PbwElement.zero(self.uea, elt.order)
            return z, z
        if not self.uea.lie.h_indices:
            return PbwElement.zero(self.uea, elt.order), elt
        max_len = elt.degree()
        monos, col, generators, matrix_rows = self._slice(max_len)
        order = elt.order
        ideal_terms: dict = {}
        um_terms: dict = {}
        # solve per hbar-order; the system is rational
        for n in range(order + 1):
            rhs = {}
            for m, c in elt.terms.items():
                a = c.coeff(n)
                if a != 0:
                    rhs[col[m]] = a
            if not rhs:
                continue
            sol = linalg.solve(matrix_rows, rhs, len(generators))
            if sol is None:
                raise NoSolution("splitting system inconsistent", residual=elt)
            for j, coeff in sol.items():
                kind, _, exp = generators[j]
                target = ideal_terms if kind == "ideal" else um_terms
                for m, c in exp.items():
                    _add_series(
                        target, m, HSeries.hbar(order, n, coeff * c), order
                    )
        return (
            PbwElement(self.uea, ideal_terms, order),
            PbwElement(self.uea, um_terms, order),
        )

    def um_project(self, elt: PbwElement) -> PbwElement:
        return self.split(elt)[1]


def all_monomials(dim: int, max_len: int):
    """All weakly increasing index tuples of length <= max_len."""
    return all_monomials_from(tuple(range(dim)), max_len)


@lru_cache(maxsize=None)
def all_monomials_from(indices, max_len: int):
    indices = tuple(indices)
    out = [()]
    for length in range(1, max_len + 1):
        out.extend(itertools.combinations_with_replacement(indices, length))
    return tuple(out)
