"""Scalar invariants of mu-symmetric matrices.

For n = 2 a single determinant analog D decides perfect squares.  For
n = 3 six minor analogs D1..D6 decide perfect squares, and two determinant
analogs decide factorability: D7 (a polynomial, used when the z_1^2
coefficient vanishes) and D8 (involving square roots X, Y, used otherwise,
quantified over the four sign choices).  `sextic` is the degree-six
polynomial obtained by clearing the radicals from D8 = 0; it is evaluated
numerically, never manipulated symbolically.

Matrices are read as [[a, d, e], [mu21 d, b, f], [mu31 e, mu32 f, c]]
(n = 3) and [[a, b], [mu21 b, c]] (n = 2).
"""

from __future__ import annotations

from dataclasses import dataclass

from .correspond import MuSymmetricMatrix
from .ring import InputError, is_twist_of_polynomial_ring, snapped_sqrt

SIGN_PAIRS: tuple[tuple[int, int], ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class RadicalPair:
    """A concrete choice of the radicals X, Y entering D8.

    X^2 = d^2 - mu_12 a b and Y^2 = e^2 - mu_13 a c for the matrix that
    produced the pair; (sx, sy) records which of the four sign choices of
    the principal roots this is.
    """

    x: complex
    y: complex
    sx: int
    sy: int


def _require_n(M: MuSymmetricMatrix, n: int, what: str) -> None:
    if M.n != n:
        raise InputError(f"{what} requires n = {n}, got n = {M.n}")


def _abc_2(M: MuSymmetricMatrix) -> tuple[complex, complex, complex]:
    return M.entry(1, 1), M.entry(1, 2), M.entry(2, 2)


def _abcdef_3(M: MuSymmetricMatrix) -> tuple[complex, ...]:
    return (
        M.entry(1, 1),
        M.entry(2, 2),
        M.entry(3, 3),
        M.entry(1, 2),
        M.entry(1, 3),
        M.entry(2, 3),
    )


def mu_det_2(M: MuSymmetricMatrix) -> complex:
    """D(M) = 4b^2 - (1 + mu_12)^2 ac; equals -4 det(M) when mu_12 = 1."""
    _require_n(M, 2, "mu_det_2")
    a, b, c = _abc_2(M)
    m12 = M.mu[1, 2]
    return 4 * b**2 - (1 + m12) ** 2 * a * c


def mu_minors_3(M: MuSymmetricMatrix) -> tuple[complex, complex, complex, complex, complex, complex]:
    """The six 2x2 minor analogs D1..D6; all vanish iff the form is a square."""
    _require_n(M, 3, "mu_minors_3")
    a, b, c, d, e, f = _abcdef_3(M)
    mu = M.mu
    m12, m13, m23 = mu[1, 2], mu[1, 3], mu[2, 3]
    d1 = 4 * d**2 - (1 + m12) ** 2 * a * b
    d2 = 4 * e**2 - (1 + m13) ** 2 * a * c
    d3 = 4 * f**2 - (1 + m23) ** 2 * b * c
    d4 = 2 * (1 + m23) * d * e - (1 + m12) * (1 + m13) * a * f
    d5 = 2 * (1 + m12) * e * f - (1 + m13) * (1 + m23) * c * d
    d6 = 2 * (1 + m13) * d * f - (1 + m12) * (1 + m23) * b * e
    return d1, d2, d3, d4, d5, d6


def mu_det_d7(M: MuSymmetricMatrix) -> complex:
    """D7(M) = (mu_23 c d^2 - 2 d e f + b e^2)
    (mu_13 mu_21 c d^2 - 2 d e f + mu_12 mu_23 mu_31 b e^2)."""
    _require_n(M, 3, "mu_det_d7")
    a, b, c, d, e, f = _abcdef_3(M)
    mu = M.mu
    m12, m13, m23 = mu[1, 2], mu[1, 3], mu[2, 3]
    m21, m31 = mu[2, 1], mu[3, 1]
    first = m23 * c * d**2 - 2 * d * e * f + b * e**2
    second = m13 * m21 * c * d**2 - 2 * d * e * f + m12 * m23 * m31 * b * e**2
    return first * second


def radicals(M: MuSymmetricMatrix, signs: tuple[int, int] = (1, 1)) -> RadicalPair:
    """The pair (X, Y) with X^2 = d^2 - mu_12 ab, Y^2 = e^2 - mu_13 ac.

    Principal roots scaled by the requested signs; radicands within
    tolerance of zero are snapped to give X = 0 (resp. Y = 0), so the four
    sign choices collapse deterministically at the boundary.
    """
    _require_n(M, 3, "radicals")
    sx, sy = signs
    if sx not in (1, -1) or sy not in (1, -1):
        raise InputError(f"signs must be +/-1 pairs, got {signs!r}")
    a, b, c, d, e, f = _abcdef_3(M)
    mu = M.mu
    s2 = max(1.0, M.max_entry()) ** 2 * max(1.0, mu.scale())
    x = sx * snapped_sqrt(d**2 - mu[1, 2] * a * b, mu.tol, s2)
    y = sy * snapped_sqrt(e**2 - mu[1, 3] * a * c, mu.tol, s2)
    return RadicalPair(x=x, y=y, sx=sx, sy=sy)


def mu_det_d8(M: MuSymmetricMatrix, signs: tuple[int, int] = (1, 1)) -> tuple[complex, RadicalPair]:
    """D8(M) = mu_21 (d + X)(e - Y) + mu_23 mu_31 (d - X)(e + Y) - 2af
    for the given sign choice of the radicals."""
    _require_n(M, 3, "mu_det_d8")
    a, b, c, d, e, f = _abcdef_3(M)
    mu = M.mu
    pair = radicals(M, signs)
    x, y = pair.x, pair.y
    value = mu[2, 1] * (d + x) * (e - y) + mu[2, 3] * mu[3, 1] * (d - x) * (e + y) - 2 * a * f
    return value, pair


def mu_det_d8_any_sign(M: MuSymmetricMatrix) -> tuple[complex, RadicalPair]:
    """The D8 value of minimum magnitude over the four sign pairs.

    Makes the existential quantifier over X and Y operational: the form
    factors iff the returned value is within tolerance of zero.
    """
    best: tuple[complex, RadicalPair] | None = None
    for signs in SIGN_PAIRS:
        value, pair = mu_det_d8(M, signs)
        if best is None or abs(value) < abs(best[0]):
            best = (value, pair)
    assert best is not None
    return best


def sextic(M: MuSymmetricMatrix) -> complex:
    """The degree-six polynomial equivalent of clearing radicals in D8 = 0."""
    _require_n(M, 3, "sextic")
    a, b, c, d, e, f = _abcdef_3(M)
    mu = M.mu
    m12, m13, m23 = mu[1, 2], mu[1, 3], mu[2, 3]
    p = m13 + m12 * m23
    return (
        p**4 * a**2 * b**2 * c**2
        + 64 * m12 * m13 * m23 * d**2 * e**2 * f**2
        + 16 * (m12**2 * m13**2 * a**2 * f**4 + m12**2 * m23**2 * b**2 * e**4 + m13**2 * m23**2 * c**2 * d**4)
        + 16 * (m13**2 + m12**2 * m23**2) * (m12 * a * b * e**2 * f**2 + m13 * a * c * d**2 * f**2 + m23 * b * c * d**2 * e**2)
        - 32 * p * (m12 * m13 * a * d * e * f**3 + m12 * m23 * b * d * e**3 * f + m13 * m23 * c * d**3 * e * f)
        - 8 * p**2 * (m12 * m13 * a**2 * b * c * f**2 + m12 * m23 * a * b**2 * c * e**2 + m13 * m23 * a * b * c**2 * d**2)
        - 8 * (m13**3 - 5 * m12 * m13**2 * m23 - 5 * m12**2 * m13 * m23**2 + m12**3 * m23**3) * a * b * c * d * e * f
    )


def twist_simplified_d7(M: MuSymmetricMatrix) -> complex:
    """D7 in the twist case mu_13 = mu_12 mu_23: (mu_23 c d^2 - 2def + b e^2)^2."""
    _require_n(M, 3, "twist_simplified_d7")
    if not is_twist_of_polynomial_ring(M.mu):
        raise InputError("not a twist: mu_13 != mu_12 * mu_23")
    a, b, c, d, e, f = _abcdef_3(M)
    first = M.mu[2, 3] * c * d**2 - 2 * d * e * f + b * e**2
    return first**2


def twist_simplified_d8(M: MuSymmetricMatrix, signs: tuple[int, int] = (1, 1)) -> complex:
    """D8 in the twist case mu_13 = mu_12 mu_23: 2[mu_21 (de - XY) - af]."""
    _require_n(M, 3, "twist_simplified_d8")
    if not is_twist_of_polynomial_ring(M.mu):
        raise InputError("not a twist: mu_13 != mu_12 * mu_23")
    a, b, c, d, e, f = _abcdef_3(M)
    pair = radicals(M, signs)
    return 2 * (M.mu[2, 1] * (d * e - pair.x * pair.y) - a * f)
