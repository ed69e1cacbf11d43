import pathlib
from fractions import Fraction

import pytest

from dyntwist import CdybElement, LieData, RMatrix, UEnvelope

ORDER = 3
CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def sl2_data() -> LieData:
    # [h,e] = 2e, [h,f] = -2f, [e,f] = h; base = Cartan line
    return LieData(
        ["e", "h", "f"],
        {(0, 1): {0: -2}, (1, 2): {2: -2}, (0, 2): {1: 1}},
        [1],
    )


def ab2_data() -> LieData:
    return LieData(["a", "b"], {}, [])


def aff_data() -> LieData:
    # aff(1) ([x,y] = y) times a central two-dimensional base
    return LieData(
        ["x", "y", "h1", "h2"], {(0, 1): {1: 1}}, [2, 3],
        mode="abelian_base",
    )


def nonab_data() -> LieData:
    # abelian complement, nonabelian base [a,b] = b
    return LieData(["u", "v", "a", "b"], {(2, 3): {3: 1}}, [2, 3])


def geometric_body(wedge, leg_index, order, max_deg=None) -> CdybElement:
    """sum_d lambda^d on one wedge with a single-letter leg variable."""
    if max_deg is None:
        max_deg = order
    body = CdybElement.zero(order)
    for d in range(max_deg + 1):
        body = body + CdybElement.monomial(
            wedge, (leg_index,) * d, Fraction(1), order
        )
    return body


@pytest.fixture(scope="session")
def sl2():
    return sl2_data()


@pytest.fixture(scope="session")
def sl2_uea(sl2):
    return UEnvelope(sl2)


@pytest.fixture(scope="session")
def sl2_rho(sl2):
    return RMatrix(sl2, geometric_body((0, 2), 1, ORDER))


@pytest.fixture(scope="session")
def ab2():
    return ab2_data()


@pytest.fixture(scope="session")
def ab2_uea(ab2):
    return UEnvelope(ab2)


@pytest.fixture(scope="session")
def ab2_rho(ab2):
    return RMatrix(
        ab2, CdybElement.monomial((0, 1), (), Fraction(1), ORDER)
    )


@pytest.fixture(scope="session")
def aff():
    return aff_data()


@pytest.fixture(scope="session")
def aff_uea(aff):
    return UEnvelope(aff)


@pytest.fixture(scope="session")
def aff_rho(aff):
    body = CdybElement.monomial((0, 1), (), Fraction(1), ORDER)
    body = body + geometric_body((2, 3), 2, ORDER)
    return RMatrix(aff, body)


@pytest.fixture(scope="session")
def nonab():
    return nonab_data()


@pytest.fixture(scope="session")
def nonab_uea(nonab):
    return UEnvelope(nonab)


@pytest.fixture(scope="session")
def sl2_pair(sl2_rho, sl2_uea):
    from dyntwist import solve_adte

    return solve_adte(sl2_rho, ORDER, uea=sl2_uea)


@pytest.fixture(scope="session")
def ab2_pair(ab2_rho, ab2_uea):
    from dyntwist import solve_adte

    return solve_adte(ab2_rho, ORDER, uea=ab2_uea)


@pytest.fixture(scope="session")
def aff_pair(aff_rho, aff_uea):
    from dyntwist import solve_adte

    return solve_adte(aff_rho, ORDER, uea=aff_uea)
