"""The classical dynamical graded Lie algebra on wedge^* g (x) S h.

The differential moves one factor of the symmetric leg into the wedge
part (with a global minus sign); the bracket extends the Lie bracket as a
biderivation of the wedge product, with the symmetric legs acting as
scalars.  The degree of an element is its exterior degree.
"""

from __future__ import annotations

import itertools
import weakref
from fractions import Fraction

from . import linalg
from .errors import GradingMismatch, TruncationTooSmall
from .hseries import HSeries
from .lie_core import LieData, invariant_basis
from .tensor_spaces import (
    CdybElement,
    ad_cdyb_key,
    cdyb_monomials,
    sym_sort,
    wedge_sort,
)

_F0 = Fraction(0)
_F1 = Fraction(1)

_bracket_caches: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def differential(elt: CdybElement) -> CdybElement:
    """d(w (x) h_1...h_l) = - sum_i h_i ^ w (x) h_1...(h_i dropped)...h_l."""
    terms = {}
    order = elt.order
    for (w, s), c in elt.terms.items():
        for pos in range(len(s)):
            ws = wedge_sort((s[pos],) + w)
            if ws is None:
                continue
            sign, new_w = ws
            key = (new_w, s[:pos] + s[pos + 1 :])
            add = c * (-sign)
            terms[key] = terms.get(key, HSeries.zero(order)) + add
    return CdybElement(terms, order)


def _wedge_cache(lie: LieData) -> dict:
    cache = _bracket_caches.get(lie)
    if cache is None:
        cache = {}
        _bracket_caches[lie] = cache
    return cache


def bracket_wedge(lie: LieData, w1, w2) -> dict:
    """Bracket of two wedge monomials: {wedge tuple: Fraction}.

    Degree-zero monomials are central; a single generator acts as a
    derivation of the wedge product; higher degrees reduce by graded
    antisymmetry, peeling the leading factor of the first argument.
    """
    cache = _wedge_cache(lie)
    key = (w1, w2)
    cached = cache.get(key)
    if cached is not None:
        return cached
    out = _bracket_wedge_uncached(lie, w1, w2)
    cache[key] = out
    return out


def _bracket_wedge_uncached(lie: LieData, w1, w2) -> dict:
    p, q = len(w1), len(w2)
    out: dict = {}
    if p == 0 or q == 0:
        return out
    if p == 1:
        x = w1[0]
        for pos in range(q):
            for z, c in lie.bracket_basis(x, w2[pos]).items():
                ws = wedge_sort(w2[:pos] + (z,) + w2[pos + 1 :])
                if ws is None:
                    continue
                sign, w = ws
                _acc(out, w, sign * c)
        return out
    # [P, Q] = -(-1)^{(p-1)(q-1)} [Q, P], then peel P = x ^ P'
    flip = -(_sign((p - 1) * (q - 1)))
    x = w1[0]
    rest = w1[1:]
    # [Q, x] ^ P'   with [Q, x] = -[x, Q]
    for w, c in bracket_wedge(lie, (x,), w2).items():
        ws = wedge_sort(w + rest)
        if ws is None:
            continue
        sign, ww = ws
        _acc(out, ww, flip * (-c) * sign)
    # (-1)^{q-1} x ^ [Q, P']
    inner = bracket_wedge(lie, w2, rest)
    for w, c in inner.items():
        ws = wedge_sort((x,) + w)
        if ws is None:
            continue
        sign, ww = ws
        _acc(out, ww, flip * _sign(q - 1) * c * sign)
    return out


def _acc(acc: dict, key, val):
    nv = acc.get(key, _F0) + val
    if nv == 0:
        acc.pop(key, None)
    else:
        acc[key] = nv


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def bracket(lie: LieData, a: CdybElement, b: CdybElement) -> CdybElement:
    """Graded bracket; symmetric legs multiply as scalars."""
    order = min(a.order, b.order)
    terms = {}
    for (w1, s1), c1 in a.terms.items():
        for (w2, s2), c2 in b.terms.items():
            c = c1 * c2
            leg = sym_sort(s1 + s2)
            for w, coeff in bracket_wedge(lie, w1, w2).items():
                key = (w, leg)
                terms[key] = terms.get(key, HSeries.zero(order)) + c * coeff
    return CdybElement(terms, order)


def cdybe_residual(lie: LieData, rho: CdybElement, mode: str = "dgla"):
    """Residual of the classical dynamical Yang-Baxter equation.

    mode "dgla" gives d(rho) + (1/2)[rho, rho] in wedge^3 g (x) S h;
    mode "literal" gives the tensor form CYB(rho) - Alt(d rho) as
    {((i, j, k), sym): HSeries} in g (x) g (x) g (x) S h.
    """
    if mode == "dgla":
        return differential(rho) + bracket(lie, rho, rho).scale(Fraction(1, 2))
    if mode != "literal":
        raise ValueError(f"unknown mode {mode!r}")
    order = rho.order
    t = _tensor2(rho)
    out: dict = {}
    _cyb_into(lie, t, out, order)
    _alt_d_into(lie, rho, out, order, negate=True)
    return {k: c for k, c in out.items() if not c.is_zero()}


def embed3(elt: CdybElement) -> dict:
    """Alternating embedding of the wedge-3 part into three tensor slots."""
    out: dict = {}
    for (w, s), c in elt.terms.items():
        if len(w) != 3:
            raise GradingMismatch("embed3 expects exterior degree 3")
        for perm in itertools.permutations(range(3)):
            sign = _perm_sign3(perm)
            key = ((w[perm[0]], w[perm[1]], w[perm[2]]), s)
            _acc_series(out, key, c * sign, elt.order)
    return {k: v for k, v in out.items() if not v.is_zero()}


def _perm_sign3(perm) -> int:
    sign = 1
    for i in range(3):
        for j in range(i + 1, 3):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _acc_series(acc: dict, key, val, order):
    nv = acc.get(key, HSeries.zero(order)) + val
    if nv.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = nv


def _tensor2(rho: CdybElement) -> dict:
    """x ^ y -> x (x) y - y (x) x, legs carried along."""
    out = {}
    for (w, s), c in rho.terms.items():
        if len(w) != 2:
            raise GradingMismatch("expected exterior degree 2")
        _acc_series(out, ((w[0], w[1]), s), c, rho.order)
        _acc_series(out, ((w[1], w[0]), s), -c, rho.order)
    return out


def _cyb_into(lie: LieData, t: dict, out: dict, order: int):
    """[r12, r13] + [r12, r23] + [r13, r23] accumulated into `out`."""
    # slot pairs: (shared slot of first factor, placements)
    items = list(t.items())
    for ((a1, a2), s1), c1 in items:
        for ((b1, b2), s2), c2 in items:
            c = c1 * c2
            leg = sym_sort(s1 + s2)
            # [r12, r13]: bracket in slot 1
            for k, f in lie.bracket_basis(a1, b1).items():
                _acc_series(out, ((k, a2, b2), leg), c * f, order)
            # [r12, r23]: bracket in slot 2
            for k, f in lie.bracket_basis(a2, b1).items():
                _acc_series(out, ((a1, k, b2), leg), c * f, order)
            # [r13, r23]: bracket in slot 3
            for k, f in lie.bracket_basis(a2, b2).items():
                _acc_series(out, ((a1, b1, k), leg), c * f, order)


def _alt_d_into(lie: LieData, rho: CdybElement, out: dict, order: int, negate):
    """sum_i (h_i^1 d_i rho^23 - h_i^2 d_i rho^13 + h_i^3 d_i rho^12)."""
    sgn = -1 if negate else 1
    for ((a1, a2), s), c in _tensor2(rho).items():
        for pos in range(len(s)):
            h = s[pos]
            rest = s[:pos] + s[pos + 1 :]
            _acc_series(out, ((h, a1, a2), rest), c * sgn, order)
            _acc_series(out, ((a1, h, a2), rest), c * (-sgn), order)
            _acc_series(out, ((a1, a2, h), rest), c * sgn, order)


def p1_project(lie: LieData, elt: CdybElement) -> CdybElement:
    """Projection onto wedge^* m (x) S^0: empty leg, wedge inside m only."""
    terms = {}
    for (w, s), c in elt.terms.items():
        if s:
            continue
        if any(lie.is_h(i) for i in w):
            continue
        terms[(w, s)] = c
    return CdybElement(terms, elt.order)


def delta_homotopy(lie: LieData, elt: CdybElement) -> CdybElement:
    """Contracting homotopy for the differential.

    Sort each wedge monomial into its m-part followed by its h-part (p and
    q factors, sign from the shuffle), with an S-leg of length l.  Terms
    with q + l = 0 map to zero; otherwise each h-factor of the wedge is
    moved back to the symmetric leg with weight 1/(q + l) and alternating
    signs, and a global factor -(-1)^p.
    """
    terms = {}
    order = elt.order
    for (w, s), c in elt.terms.items():
        m_part = tuple(i for i in w if not lie.is_h(i))
        h_part = tuple(i for i in w if lie.is_h(i))
        sign = _shuffle_sign(lie, w)
        p, q, l = len(m_part), len(h_part), len(s)
        if q + l == 0:
            continue
        outer = -_sign(p) * Fraction(1, q + l)
        for i in range(q):
            new_wedge = m_part + h_part[:i] + h_part[i + 1 :]
            ws = wedge_sort(new_wedge)
            if ws is None:
                continue
            s2, new_w = ws
            key = (new_w, sym_sort(s + (h_part[i],)))
            val = c * (sign * s2 * _sign(i) * outer)
            terms[key] = terms.get(key, HSeries.zero(order)) + val
    return CdybElement(terms, order)


def _shuffle_sign(lie: LieData, wedge) -> int:
    """Sign of sorting a wedge monomial into (m factors, h factors)."""
    flags = [lie.is_h(i) for i in wedge]
    sign = 1
    for i in range(len(flags)):
        for j in range(i + 1, len(flags)):
            if flags[i] and not flags[j]:
                sign = -sign
    return sign


# -- cohomology ------------------------------------------------------------


def _d_matrix(lie: LieData, basis_src, keys_dst):
    """Matrix rows of the differential on a list of invariant vectors."""
    col_dst = {k: i for i, k in enumerate(keys_dst)}
    cols = []
    for vec in basis_src:
        elt = CdybElement({k: c for k, c in vec.items()}, 0)
        img = differential(elt)
        col = {}
        for key, c in img.terms.items():
            col[col_dst[key]] = c.coeff(0)
        cols.append(col)
    rows: dict = {}
    for j, col in enumerate(cols):
        for i, v in col.items():
            rows.setdefault(i, {})[j] = v
    return list(rows.values()), len(cols)


def _invariant_slice(lie: LieData, exterior: int, sh: int):
    keys = cdyb_monomials(lie, exterior, sh)
    return invariant_basis(
        lie, keys, lambda x, key: ad_cdyb_key(lie, x, key)
    )


def cohomology_dim_weight(lie: LieData, k: int, weight: int) -> int:
    """dim H^k of the invariant complex in the given total weight."""
    sh = weight - k
    if sh < 0:
        return 0
    basis_k = _invariant_slice(lie, k, sh)
    n_k = len(basis_k)
    if n_k == 0:
        return 0
    keys_up = cdyb_monomials(lie, k + 1, sh - 1) if sh >= 1 else []
    rows, ncols = _d_matrix(lie, basis_k, keys_up)
    rank_out = linalg.rank(rows, ncols) if keys_up else 0
    dim_ker = n_k - rank_out
    rank_in = 0
    if k >= 1:
        basis_prev = _invariant_slice(lie, k - 1, sh + 1)
        if basis_prev:
            keys_k = cdyb_monomials(lie, k, sh)
            rows_in, ncols_in = _d_matrix(lie, basis_prev, keys_k)
            rank_in = linalg.rank(rows_in, ncols_in)
    return dim_ker - rank_in


def cohomology_dims(lie: LieData, max_k: int, shdeg: int):
    """dim H^k for k = 0..max_k, each summed over total weights.

    Weights k..k+shdeg-1 are computed exactly; the two highest computed
    weights must contribute zero, otherwise the truncation is too small
    to claim stabilization.
    """
    if shdeg < 3:
        raise TruncationTooSmall("need shdeg >= 3 to check stabilization")
    dims = []
    for k in range(max_k + 1):
        weights = list(range(k, k + shdeg))
        per_w = [cohomology_dim_weight(lie, k, w) for w in weights]
        if per_w[-1] != 0 or per_w[-2] != 0:
            raise TruncationTooSmall(
                f"cohomology in degree {k} has not stabilized by "
                f"symmetric degree {shdeg}: tail dims {per_w[-2:]}"
            )
        dims.append(sum(per_w))
    return dims
