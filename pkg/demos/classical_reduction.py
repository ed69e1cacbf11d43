"""Reduce a classical solution to its invariant bivector.

The rescaled r-matrix hbar rho(hbar lambda) is a Maurer-Cartan element
of the classical complex; transporting it along the homotopy-inverse
tower of the projection lands on an invariant bivector pi with empty
leg whose restricted bracket square vanishes.  The round trip back is
certified by an order-by-order classical gauge solve.
"""

from fractions import Fraction

from dyntwist import (
    LieData,
    CdybElement,
    RMatrix,
    UEnvelope,
    reduce_classical,
    taylor_rescale,
)

N = 3

sl2 = LieData(
    ["e", "h", "f"],
    {(0, 1): {0: -2}, (1, 2): {2: -2}, (0, 2): {1: 1}},
    [1],
)
body = CdybElement.zero(N)
for d in range(N + 1):
    body = body + CdybElement.monomial((0, 2), (1,) * d, Fraction(1), N)
rho = RMatrix(sl2, body)

alpha = taylor_rescale(rho, N)
red = reduce_classical(sl2, alpha)
print("reduced bivector:", red.pi.pretty(sl2))
print("round trip certified:", red.gauge.equivalent)
print("flow generators in the certificate:", len(red.gauge.gauge))
