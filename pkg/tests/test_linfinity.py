import random
from fractions import Fraction

from dyntwist import (
    HSeries,
    check_morphism,
    classical_contraction,
    invert_contraction,
    mc_transport,
    quantum_contraction,
    taylor_rescale,
    twist_by_homotopy,
)
from dyntwist.cdyb_dgla import delta_homotopy
from dyntwist.linfinity import identity_tower, morphism_residual

from conftest import ORDER

SAMPLES = 6


def test_classical_contraction_identity(sl2, aff):
    for lie in (sl2, aff):
        C = classical_contraction(lie, ORDER)
        rng = random.Random(1)
        for x in C.dgla.sample_elements(rng, 12):
            assert C.check_identity(x)


def test_quantum_contraction_identity(sl2_uea, nonab_uea):
    for uea in (sl2_uea, nonab_uea):
        C = quantum_contraction(uea, ORDER)
        rng = random.Random(2)
        for x in C.dgla.sample_elements(rng, 8):
            assert C.check_identity(x)


def test_classical_towers_are_morphisms(sl2):
    C = classical_contraction(sl2, ORDER)
    Q, F, R = invert_contraction(C, 3)
    for tower in (Q, F, R):
        report = check_morphism(tower, 3, SAMPLES, seed=3)
        assert report["ok"], report["failures"][:1]
        assert report["checked"] > 0


def test_quantum_towers_are_morphisms(ab2_uea):
    C = quantum_contraction(ab2_uea, ORDER)
    Q, F, R = invert_contraction(C, 3)
    for tower in (Q, F, R):
        report = check_morphism(tower, 3, SAMPLES, seed=4)
        assert report["ok"], report["failures"][:1]


def test_twist_by_homotopy_identity_tower(sl2):
    C = classical_contraction(sl2, ORDER)
    g = C.dgla
    T = identity_tower(g, 3)
    psi = twist_by_homotopy(T, lambda x: delta_homotopy(sl2, x))
    report = check_morphism(psi, 3, SAMPLES, seed=5)
    assert report["ok"], report["failures"][:1]


def test_twist_by_zero_is_identity(sl2):
    C = classical_contraction(sl2, ORDER)
    g = C.dgla
    T = identity_tower(g, 3)
    psi = twist_by_homotopy(T, lambda x: g.zero())
    rng = random.Random(6)
    for x in g.sample_elements(rng, 10):
        assert psi.apply(1, (x,)) == x


def test_twisted_tower_filtration_bound(sl2):
    # when the arity-n maps land in filtration <= n - 1 and the twisting
    # map raises filtration by at most one, the twisted maps land in
    # filtration <= n + k - 1 for inputs of filtration <= k
    C = classical_contraction(sl2, ORDER)
    g = C.dgla
    Q, F, R = invert_contraction(C, 3)
    psi = twist_by_homotopy(Q, lambda x: delta_homotopy(sl2, x))
    report = check_morphism(psi, 3, SAMPLES, seed=11)
    assert report["ok"], report["failures"][:1]
    rng = random.Random(7)
    for n in range(1, 4):
        for _ in range(SAMPLES):
            args = tuple(Q.source.sample_elements(rng, n))
            if len(args) < n:
                continue
            k = max(g.filtration(a) for a in args)
            for tower in (Q, psi):
                out = tower.apply(n, args)
                if not out.is_zero():
                    assert g.filtration(out) <= n + k - 1


def test_mc_transport_classical_reduction(sl2, sl2_rho):
    alpha = taylor_rescale(sl2_rho, ORDER)
    C = classical_contraction(sl2, ORDER)
    Q, F, R = invert_contraction(C, 3)
    # reduction transports alpha onto the image of the projection
    pi = mc_transport(R, alpha, check=False)
    assert C.proj(pi) == pi
    # the inclusion tower transports it back to a Maurer-Cartan element
    back = mc_transport(Q, pi, check=True)
    assert not back.is_zero()


def test_morphism_residual_detects_fake_tower(sl2):
    # dropping the correction maps of the straightening tower must break
    # the relation at arity 2
    C = classical_contraction(sl2, ORDER)
    Q, F, R = invert_contraction(C, 3)
    broken = type(F)(F.source, F.target, [F.maps[0]] + [
        lambda *a: F.target.zero() for _ in range(2)
    ], 3)
    rng = random.Random(8)
    bad = 0
    for _ in range(20):
        args = tuple(F.source.sample_elements(rng, 2))
        if len(args) < 2:
            continue
        if not morphism_residual(broken, args).is_zero():
            bad += 1
    assert bad > 0
