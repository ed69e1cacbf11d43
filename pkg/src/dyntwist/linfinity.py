"""Truncated L-infinity machinery connecting the two dgla's.

Both sides are wrapped as honest dgla's with the standard axioms:

* the classical side keeps its differential and Schouten-type bracket;
* the twist side uses the negative coboundary together with the sign
  twist [P,Q]' = -(-1)^{deg P deg Q} [P,Q]_G, which is exactly the
  convention under which twist elements are Maurer-Cartan and the
  standard Leibniz rule holds.

Morphism towers are stored as explicit multilinear structure maps
F^n : Lambda^n(source) -> target, evaluated on demand.  Koszul signs are
computed in the double-shifted grading where Maurer-Cartan elements sit
in degree 0 (so transport of such elements needs no signs at all).
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from . import adt_dgla, cdyb_dgla
from .adt_dgla import AdtElement, gerstenhaber_bracket, invariant_adt_basis
from .errors import ContractFailure, GradingMismatch, MorphismUnsound
from .hseries import HSeries
from .lie_core import LieData, invariant_basis
from .linalg import kernel_basis, rref, solve
from .tensor_spaces import CdybElement, ad_cdyb_key, cdyb_monomials
from .uea import UEnvelope, UmSplitter

_F1 = Fraction(1)
_HALF = Fraction(1, 2)


# -- sign bookkeeping -------------------------------------------------------


def koszul_sign(degs, perm):
    """Koszul sign of reordering homogeneous slots into the order `perm`.

    `degs[i]` is the (shifted) degree of the i-th original slot; `perm`
    lists original positions in their new order.
    """
    s = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b] and degs[perm[a]] % 2 and degs[perm[b]] % 2:
                s = -s
    return s


def _subsets(n):
    """Proper nonempty subsets of range(n) containing 0, with complements."""
    rest = list(range(1, n))
    for r in range(0, n - 1):
        for extra in itertools.combinations(rest, r):
            A = (0,) + extra
            B = tuple(i for i in range(1, n) if i not in extra)
            yield A, B


def _set_partitions(items):
    """All set partitions; blocks ordered by minimum, sorted internally."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


# -- dgla wrappers ----------------------------------------------------------


class LinfAlgebra:
    """A dgla presented through its two structure operations.

    Subclasses provide q1 (the differential), bracket (a standard graded
    Lie bracket), a degree function, a filtration function, and sampling
    of homogeneous invariant elements for property checks.
    """

    order: int

    def q1(self, x):
        raise NotImplementedError

    def bracket(self, x, y):
        raise NotImplementedError

    def degree(self, x) -> int:
        raise NotImplementedError

    def s_degree(self, x) -> int:
        return self.degree(x) - 1

    def filtration(self, x) -> int:
        raise NotImplementedError

    def zero(self):
        raise NotImplementedError

    def sample_elements(self, rng, count):
        raise NotImplementedError

    def q2(self, x, y, sx):
        """Decalage bracket: the coderivation pairing on shifted slots."""
        out = self.bracket(x, y)
        return out.scale(-1) if sx % 2 else out

    def mc_residual(self, alpha):
        return self.q1(alpha) + self.bracket(alpha, alpha).scale(_HALF)


class CdybDgla(LinfAlgebra):
    """Classical side: wedge powers with polynomial leg."""

    def __init__(self, lie: LieData, order: int):
        self.lie = lie
        self.order = order

    def q1(self, x):
        return cdyb_dgla.differential(x)

    def bracket(self, x, y):
        return cdyb_dgla.bracket(self.lie, x, y)

    def degree(self, x):
        degs = x.exterior_degrees()
        if len(degs) > 1:
            raise GradingMismatch(f"mixed exterior degrees {degs}")
        return (degs[0] - 1) if degs else 0

    def filtration(self, x):
        degs = x.sh_degrees()
        return max(degs) if degs else 0

    def zero(self):
        return CdybElement.zero(self.order)

    def invariant_slice(self, exterior, sh):
        keys = cdyb_monomials(self.lie, exterior, sh)
        rows = invariant_basis(
            self.lie, keys, lambda h, key: ad_cdyb_key(self.lie, h, key)
        )
        return [CdybElement(dict(r), self.order) for r in rows]

    def sample_elements(self, rng, count):
        out = []
        guard = 0
        while len(out) < count and guard < 50 * count:
            guard += 1
            k = rng.randint(1, 3)
            l = rng.randint(0, 2)
            slice_elts = self.invariant_slice(k, l)
            if slice_elts:
                out.append(rng.choice(slice_elts))
        return out


class AdtDgla(LinfAlgebra):
    """Twist side: tensor powers of the enveloping algebra with a leg.

    The differential is the negative coboundary and the bracket carries
    the sign twist described in the module docstring; together they obey
    the standard dgla axioms and make twists Maurer-Cartan.
    """

    def __init__(self, uea: UEnvelope, order: int):
        self.uea = uea
        self.order = order

    def q1(self, x):
        return adt_dgla.differential_b(x).scale(-1)

    def bracket(self, x, y):
        raw = gerstenhaber_bracket(x, y, check_invariance=False)
        p, q = x.arity - 1, y.arity - 1
        return raw.scale(-1) if (p * q) % 2 == 0 else raw

    def degree(self, x):
        return x.arity - 1

    def filtration(self, x):
        return x.filtration_degree()

    def zero(self):
        return AdtElement.zero(self.uea, 1, self.order)

    def invariant_slice(self, arity, total_length):
        rows = invariant_adt_basis(self.uea, arity, total_length)
        return [
            AdtElement(self.uea, arity, dict(r), self.order) for r in rows
        ]

    def sample_elements(self, rng, count):
        # lengths are kept small: relation residuals at arity 3 touch
        # slices of three times the sampled length
        out = []
        guard = 0
        while len(out) < count and guard < 50 * count:
            guard += 1
            k = rng.randint(1, 2)
            L = rng.randint(0, 1)
            slice_elts = self.invariant_slice(k, L)
            if slice_elts:
                out.append(rng.choice(slice_elts))
        return out


class ProjectedDgla(LinfAlgebra):
    """The image of a contraction's projection, as a dgla of its own."""

    def __init__(self, contraction: "Contraction"):
        self.contraction = contraction
        self.ambient = contraction.dgla
        self.order = self.ambient.order

    def q1(self, x):
        return self.ambient.q1(x)

    def bracket(self, x, y):
        return self.contraction.proj(self.ambient.bracket(x, y))

    def degree(self, x):
        return self.ambient.degree(x)

    def filtration(self, x):
        return self.ambient.filtration(x)

    def zero(self):
        return self.ambient.zero()

    def sample_elements(self, rng, count):
        out = []
        for e in self.ambient.sample_elements(rng, 20 * count):
            pe = self.contraction.proj(e)
            if not pe.is_zero():
                out.append(pe)
            if len(out) == count:
                break
        return out


class SplitTargetDgla(LinfAlgebra):
    """Ambient space seen as image-plus-kernel with bracket on the image.

    The differential is unchanged (both summands are subcomplexes); the
    bracket keeps only the projected part of the projected arguments.
    """

    def __init__(self, contraction: "Contraction"):
        self.contraction = contraction
        self.ambient = contraction.dgla
        self.order = self.ambient.order

    def q1(self, x):
        return self.ambient.q1(x)

    def bracket(self, x, y):
        p = self.contraction.proj
        return p(self.ambient.bracket(p(x), p(y)))

    def degree(self, x):
        return self.ambient.degree(x)

    def filtration(self, x):
        return self.ambient.filtration(x)

    def zero(self):
        return self.ambient.zero()

    def sample_elements(self, rng, count):
        return self.ambient.sample_elements(rng, count)


# -- contractions -----------------------------------------------------------


class Contraction:
    """A chain projection with an explicit homotopy.

    proj is an idempotent chain endomorphism of the ambient space and h
    satisfies q1 h + h q1 = id - proj everywhere.
    """

    def __init__(self, dgla: LinfAlgebra, proj, h, label: str = ""):
        self.dgla = dgla
        self.proj = proj
        self.h = h
        self.label = label

    def check_identity(self, x) -> bool:
        g = self.dgla
        lhs = g.q1(self.h(x)) + self.h(g.q1(x))
        rhs = x - self.proj(x)
        return (lhs - rhs).is_zero()


def classical_contraction(lie: LieData, order: int) -> Contraction:
    g = CdybDgla(lie, order)
    return Contraction(
        g,
        lambda x: cdyb_dgla.p1_project(lie, x),
        lambda x: cdyb_dgla.delta_homotopy(lie, x),
        label="classical",
    )


class _QuantumHomotopy:
    """Slice-built homotopy for the twist-side contraction.

    For each total-length slice the kernel of the factorwise projection
    is an acyclic complex; a complement of the cocycles is chosen by
    exact elimination (preferring low leg length) and the homotopy sends
    each coboundary back to its chosen preimage.
    """

    def __init__(self, uea: UEnvelope, splitter: UmSplitter, order: int):
        self.uea = uea
        self.splitter = splitter
        self.order = order
        self.dgla = AdtDgla(uea, order)
        self._cols: dict = {}
        self._cache: dict = {}

    def _col(self, k: int, key):
        cols = self._cols.setdefault(k, {})
        if key not in cols:
            cols[key] = len(cols)
        return cols[key]

    def _coords(self, k: int, elt: AdtElement, order_n: int = 0):
        return {
            self._col(k, kk): c.coeff(order_n)
            for kk, c in elt.terms.items()
            if c.coeff(order_n) != 0
        }

    def _nbasis(self, k: int, L: int):
        """Kernel-of-projection basis on the invariant length <= L space."""
        key = ("N", k, L)
        if key in self._cache:
            return self._cache[key]
        nrows = []
        nelems = []
        for l in range(L + 1):
            for r in invariant_adt_basis(self.uea, k, l):
                e = AdtElement(self.uea, k, dict(r), self.order)
                ne = e - adt_dgla.p2_project(self.splitter, e)
                if not ne.is_zero():
                    nelems.append(ne)
                    nrows.append(self._coords(k, ne))
        cols = self._cols.setdefault(k, {})
        ncols = len(cols)
        nred, _ = rref(nrows, ncols)
        rev = {i: kk for kk, i in cols.items()}
        nbasis = []
        for r in nred:
            terms = {
                rev[c]: HSeries.constant(v, self.order) for c, v in r.items()
            }
            nbasis.append(AdtElement(self.uea, k, terms, self.order))
        self._cache[key] = nbasis
        return nbasis

    def _complement(self, k: int, L: int):
        """Nested complement of the cocycles in the kernel, up to length L.

        The choice at length bound L extends the choice at L - 1, which
        makes the homotopy a single well-defined linear map.
        """
        key = ("A", k, L)
        if key in self._cache:
            return self._cache[key]
        prev = self._complement(k, L - 1) if L > 0 else []
        nbasis = self._nbasis(k, L)
        if not nbasis:
            self._cache[key] = list(prev)
            return self._cache[key]
        # cocycles inside the kernel slice
        img_rows = [
            self._coords(k + 1, self.dgla.q1(ne)) for ne in nbasis
        ]
        trows: dict = {}
        for i, r in enumerate(img_rows):
            for j, v in r.items():
                trows.setdefault(j, {})[i] = v
        kern = kernel_basis(list(trows.values()), len(nbasis))
        ncols = len(self._cols.get(k, {}))
        span_rows = []
        for v in kern:
            row = {}
            for i, c in v.items():
                for j, w in self._coords(k, nbasis[i]).items():
                    row[j] = row.get(j, Fraction(0)) + c * w
            row = {j: w for j, w in row.items() if w != 0}
            if row:
                span_rows.append(row)
        for a in prev:
            span_rows.append(self._coords(k, a))
        A = list(prev)
        for cand in nbasis:
            crow = self._coords(k, cand)
            red, pivots = rref(span_rows + [crow], ncols)
            if len(red) > len(rref(span_rows, ncols)[0]):
                A.append(cand)
                span_rows.append(crow)
        self._cache[key] = A
        return A

    def _decompose(self, k: int, L: int, x: AdtElement):
        """Write the kernel element x as q1(a) + a' with a, a' in A."""
        A_lower = self._complement(k - 1, L) if k >= 1 else []
        A_here = self._complement(k, L)
        cols = [self.dgla.q1(a) for a in A_lower] + list(A_here)
        # the same rational system is solved once per hbar order
        mat: dict = {}
        for j, e in enumerate(cols):
            for r, v in self._coords(k, e).items():
                row = mat.setdefault(r, {})
                row[j] = row.get(j, Fraction(0)) + v
        ridx = sorted(mat.keys())
        rmap = {r: i for i, r in enumerate(ridx)}
        sys_rows = [dict(mat[r]) for r in ridx]
        lower = AdtElement.zero(self.uea, max(k - 1, 0), self.order)
        for n in range(self.order + 1):
            rhs_m = {}
            for r, v in self._coords(k, x, n).items():
                if r not in rmap:
                    raise ContractFailure(
                        "element leaves the recorded kernel slice"
                    )
                rhs_m[rmap[r]] = v
            if not rhs_m:
                continue
            sol = solve(sys_rows, rhs_m, len(cols))
            if sol is None:
                raise ContractFailure(
                    "homotopy decomposition failed on a kernel slice"
                )
            for j, v in sol.items():
                if j < len(A_lower) and v != 0:
                    lower = lower + A_lower[j].scale(
                        HSeries.hbar(self.order, n, v)
                    )
        return lower

    def __call__(self, x: AdtElement) -> AdtElement:
        xn = x - adt_dgla.p2_project(self.splitter, x)
        if xn.is_zero():
            return AdtElement.zero(self.uea, max(x.arity - 1, 0), x.order)
        L = max(xn.total_lengths())
        return self._decompose(xn.arity, L, xn)


def quantum_contraction(uea: UEnvelope, order: int) -> Contraction:
    splitter = UmSplitter(uea)
    g = AdtDgla(uea, order)
    h = _QuantumHomotopy(uea, splitter, order)
    return Contraction(
        g,
        lambda x: adt_dgla.p2_project(splitter, x),
        h,
        label="quantum",
    )


# -- morphism towers --------------------------------------------------------


class MorphismTower:
    """Structure maps F^1..F^A of a coalgebra morphism between dgla's."""

    def __init__(self, source, target, maps, arity_bound):
        self.source = source
        self.target = target
        self.maps = list(maps)
        self.arity_bound = arity_bound

    def apply(self, n, args):
        if n < 1 or n > self.arity_bound:
            return self.target.zero()
        return self.maps[n - 1](*args)


def strict_tower(f1, source, target, arity_bound) -> MorphismTower:
    maps = [f1] + [
        (lambda *args: target.zero()) for _ in range(arity_bound - 1)
    ]
    return MorphismTower(source, target, maps, arity_bound)


def identity_tower(g, arity_bound) -> MorphismTower:
    return strict_tower(lambda x: x, g, g, arity_bound)


def _bracket_defect(T: MorphismTower, args, degs):
    """The bracket terms of the morphism relation at arity len(args).

    This is the failure term the next structure map has to repair: the
    target-bracket pairings of lower maps minus the lower maps applied
    to source brackets.
    """
    n = len(args)
    src, tgt = T.source, T.target
    res = tgt.zero()
    for A, B in _subsets(n):
        perm = A + B
        sign = koszul_sign(degs, perm)
        u = T.apply(len(A), tuple(args[i] for i in A))
        v = T.apply(len(B), tuple(args[i] for i in B))
        su = sum(degs[i] for i in A)
        term = tgt.q2(u, v, su)
        if sign < 0:
            term = term.scale(-1)
        res = res + term
    for i, j in itertools.combinations(range(n), 2):
        rest = [x for x in range(n) if x not in (i, j)]
        perm = [i, j] + rest
        sign = koszul_sign(degs, perm)
        w = src.q2(args[i], args[j], degs[i])
        term = T.apply(n - 1, (w,) + tuple(args[x] for x in rest))
        if sign > 0:
            term = term.scale(-1)
        res = res + term
    return res


def morphism_residual(T: MorphismTower, args, degs=None):
    """Exact residual of the L-infinity morphism relation at this arity."""
    n = len(args)
    src, tgt = T.source, T.target
    if degs is None:
        degs = [src.s_degree(a) for a in args]
    res = tgt.q1(T.apply(n, args))
    for i in range(n):
        sign = (-1) ** (sum(degs[:i]) % 2)
        repl = tuple(
            src.q1(a) if j == i else a for j, a in enumerate(args)
        )
        term = T.apply(n, repl)
        if sign > 0:
            term = term.scale(-1)
        res = res + term
    return res + _bracket_defect(T, args, degs)


def check_morphism(T: MorphismTower, arity: int, samples: int, seed=0):
    """Evaluate the morphism relations on sampled invariant elements.

    Returns a report dict; `ok` means every sampled residual was exactly
    zero.
    """
    rng = random.Random(seed)
    report = {"ok": True, "failures": [], "checked": 0}
    for n in range(1, arity + 1):
        for _ in range(samples):
            args = tuple(T.source.sample_elements(rng, n))
            if len(args) < n:
                continue
            res = morphism_residual(T, args)
            report["checked"] += 1
            if not res.is_zero():
                report["ok"] = False
                report["failures"].append((n, args, res))
    return report


def compose_towers(G: MorphismTower, F: MorphismTower) -> MorphismTower:
    """Coalgebra composition G o F, truncated to the smaller bound."""
    bound = min(G.arity_bound, F.arity_bound)
    src, tgt = F.source, G.target

    def make(n):
        def mapped(*args):
            degs = [src.s_degree(a) for a in args]
            out = tgt.zero()
            for part in _set_partitions(list(range(n))):
                blocks = sorted(part, key=min)
                perm = [i for blk in blocks for i in sorted(blk)]
                sign = koszul_sign(degs, perm)
                inner = tuple(
                    F.apply(len(blk), tuple(args[i] for i in sorted(blk)))
                    for blk in blocks
                )
                term = G.apply(len(blocks), inner)
                if sign < 0:
                    term = term.scale(-1)
                out = out + term
            return out

        return mapped

    return MorphismTower(src, tgt, [make(n) for n in range(1, bound + 1)], bound)


def invert_tower(F: MorphismTower, f1_inverse=None) -> MorphismTower:
    """Inverse of a tower whose first map is a linear isomorphism."""
    inv1 = f1_inverse if f1_inverse is not None else (lambda x: x)
    src, tgt = F.target, F.source
    H = MorphismTower(src, tgt, [inv1], F.arity_bound)

    def make(n):
        def mapped(*args):
            degs = [src.s_degree(a) for a in args]
            out = tgt.zero()
            for part in _set_partitions(list(range(n))):
                if len(part) == 1:
                    continue
                blocks = sorted(part, key=min)
                perm = [i for blk in blocks for i in sorted(blk)]
                sign = koszul_sign(degs, perm)
                inner = tuple(
                    H.apply(len(blk), tuple(args[i] for i in sorted(blk)))
                    for blk in blocks
                )
                term = F.apply(len(blocks), inner)
                if sign < 0:
                    term = term.scale(-1)
                out = out + term
            return inv1(out.scale(-1))

        return mapped

    for n in range(2, F.arity_bound + 1):
        H.maps.append(make(n))
    return H


def invert_contraction(C: Contraction, arity_bound: int):
    """Build the inclusion tower of a contraction's image.

    Returns the tower Q with Q^1 the inclusion of the projected dgla
    into the ambient one, plus the straightening tower F and the
    reduction tower R = proj o F as attributes of the result tuple
    (Q, F, R).
    """
    ambient = C.dgla
    split = SplitTargetDgla(C)
    F = MorphismTower(ambient, split, [lambda x: x], arity_bound)

    def make(n):
        def mapped(*args):
            degs = [ambient.s_degree(a) for a in args]
            defect = _bracket_defect(F, args, degs)
            if not C.proj(defect).is_zero():
                raise ContractFailure(
                    "relation defect has a component outside the kernel"
                )
            return C.h(defect).scale(-1)

        return mapped

    for n in range(2, arity_bound + 1):
        F.maps.append(make(n))

    H = invert_tower(F)
    # re-type the endpoints of H: it maps the split target back
    sub = ProjectedDgla(C)
    incl = strict_tower(lambda x: x, sub, split, arity_bound)
    Q = compose_towers(H, incl)
    Q.source = sub
    Q.target = ambient
    proj_tower = strict_tower(C.proj, split, sub, arity_bound)
    R = compose_towers(proj_tower, F)
    R.source = ambient
    R.target = sub
    return Q, F, R


# -- homotopy twisting (arity <= 3) -----------------------------------------


def _pairs_add(acc, coeff, u, su, v, sv):
    if u.is_zero() or v.is_zero():
        return
    acc.append((coeff, u, su, v, sv))


def twist_by_homotopy(F: MorphismTower, V, arity_bound=None) -> MorphismTower:
    """Twist a morphism tower by a degree -1 map V: source -> target.

    The first structure map becomes F^1 + q1 V + V q1 and the higher
    maps are produced by the coderivation-style extension of V, written
    out explicitly up to arity 3.
    """
    if arity_bound is None:
        arity_bound = F.arity_bound
    if arity_bound > 3:
        raise GradingMismatch("homotopy twisting is implemented to arity 3")
    src, tgt = F.source, F.target

    def W1(x):
        return tgt.q1(V(x)) + V(src.q1(x))

    def psi1(x):
        return F.apply(1, (x,)) + W1(x)

    def v2_pairs(args, degs):
        """S^2-component of the extension on a length-2 word."""
        (x, y), (sx, sy) = args, degs
        acc = []
        orderings = [((x, sx), (y, sy), 1)]
        swap_sign = -1 if (sx % 2 and sy % 2) else 1
        orderings.append(((y, sy), (x, sx), swap_sign))
        for (a, sa), (b, sb), eps in orderings:
            sga = -1 if sa % 2 else 1
            _pairs_add(
                acc,
                Fraction(eps * sga, 2),
                F.apply(1, (a,)),
                sa,
                V(b),
                sb - 1,
            )
            _pairs_add(acc, Fraction(eps, 2), V(a), sa - 1, F.apply(1, (b,)), sb)
            _pairs_add(acc, Fraction(eps, 4), V(a), sa - 1, W1(b), sb)
            _pairs_add(acc, Fraction(eps * sga, 4), W1(a), sa, V(b), sb - 1)
        return acc

    def w2(args, degs):
        """Target-component of the extension's W on a length-2 word."""
        out = tgt.zero()
        for coeff, u, su, v, sv in v2_pairs(args, degs):
            out = out + tgt.q2(u, v, su).scale(coeff)
        out = out + V(src.q2(args[0], args[1], degs[0]))
        return out

    def psi2(x, y):
        degs = (src.s_degree(x), src.s_degree(y))
        return F.apply(2, (x, y)) + w2((x, y), degs)

    def v2_pairs3(args, degs):
        """S^2-component of the extension on a length-3 word."""
        acc = []
        idx = (0, 1, 2)
        for A in itertools.combinations(idx, 2):
            b = [i for i in idx if i not in A][0]
            perm = list(A) + [b]
            eps = koszul_sign(degs, perm)
            sA = degs[A[0]] + degs[A[1]]
            sga = -1 if sA % 2 else 1
            argsA = (args[A[0]], args[A[1]])
            degsA = (degs[A[0]], degs[A[1]])
            _pairs_add(
                acc,
                Fraction(eps * sga, 2),
                F.apply(2, argsA),
                sA,
                V(args[b]),
                degs[b] - 1,
            )
            _pairs_add(
                acc,
                Fraction(eps * sga, 4),
                w2(argsA, degsA),
                sA,
                V(args[b]),
                degs[b] - 1,
            )
        for a in idx:
            B = tuple(i for i in idx if i != a)
            perm = [a] + list(B)
            eps = koszul_sign(degs, perm)
            argsB = (args[B[0]], args[B[1]])
            degsB = (degs[B[0]], degs[B[1]])
            sB = degsB[0] + degsB[1]
            _pairs_add(
                acc,
                Fraction(eps, 2),
                V(args[a]),
                degs[a] - 1,
                F.apply(2, argsB),
                sB,
            )
            _pairs_add(
                acc,
                Fraction(eps, 4),
                V(args[a]),
                degs[a] - 1,
                w2(argsB, degsB),
                sB,
            )
        return acc

    def psi3(x, y, z):
        args = (x, y, z)
        degs = tuple(src.s_degree(a) for a in args)
        out = F.apply(3, args)
        for coeff, u, su, v, sv in v2_pairs3(args, degs):
            out = out + tgt.q2(u, v, su).scale(coeff)
        return out

    maps = [psi1, psi2, psi3][:arity_bound]
    return MorphismTower(src, tgt, maps, arity_bound)


# -- Maurer-Cartan transport ------------------------------------------------


def mc_transport(T: MorphismTower, alpha, check: bool = True):
    """Push a Maurer-Cartan element through a morphism tower.

    alpha must have degree-0 shifted parity (bivector-type) so that no
    Koszul signs appear in the symmetric powers.
    """
    out = T.target.zero()
    fact = 1
    for n in range(1, T.arity_bound + 1):
        fact *= n
        term = T.apply(n, (alpha,) * n)
        out = out + term.scale(Fraction(1, fact))
    if check:
        res = T.target.mc_residual(out)
        if not res.is_zero():
            raise MorphismUnsound(
                "transported element fails the Maurer-Cartan equation"
            )
    return out
