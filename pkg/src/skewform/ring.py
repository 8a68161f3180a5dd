"""Arithmetic in quantum affine space.

Generators z_1, ..., z_n satisfy the relations z_j z_i = mu_ij z_i z_j for
i < j, where the mu_ij are nonzero scalars with mu_ii = 1 and
mu_ij mu_ji = 1.  Setting every mu_ij = 1 recovers the ordinary commutative
polynomial ring.

A monomial is represented by its exponent tuple (e_1, ..., e_n), standing
for the normally ordered word z_1^{e_1} ... z_n^{e_n}.  `normal_form` maps
arbitrary words onto this basis by adjacent transpositions, and `multiply`
concatenates words and renormalizes; everything downstream (the matrix
correspondence, the rank invariants, every factorization witness) is
verified by re-expansion through this module.

All values are immutable after construction and safe to share freely.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_TOL = 1e-9


class SkewformError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SkewformError):
    """Invalid input: bad indices, malformed matrices, mismatched contexts."""


class VerificationError(SkewformError):
    """A constructed witness failed re-expansion.  Signals an internal bug."""


def _as_scalar(x) -> complex:
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"non-finite scalar {x!r}")
    return z


def approx_zero(x: complex, tol: float = DEFAULT_TOL, scale: float = 1.0) -> bool:
    """|x| <= tol * max(1, scale)."""
    return abs(x) <= tol * max(1.0, scale)


def approx_eq(x: complex, y: complex, tol: float = DEFAULT_TOL, scale: float = 1.0) -> bool:
    """|x - y| <= tol * max(1, scale)."""
    return abs(x - y) <= tol * max(1.0, scale)


def principal_sqrt(x: complex) -> complex:
    """Square root with nonnegative real part (positive imaginary part on the cut)."""
    return cmath.sqrt(complex(x))


def snapped_sqrt(radicand: complex, tol: float = DEFAULT_TOL, scale: float = 1.0) -> complex:
    """Principal square root, with radicands within tolerance of zero snapped to 0."""
    r = complex(radicand)
    if approx_zero(r, tol, scale):
        return 0j
    return cmath.sqrt(r)


class MuMatrix:
    """The n x n scalar matrix mu defining the ring relations.

    Validates mu_ii = 1, mu_ij mu_ji = 1 and mu_ij != 0 on construction
    (within `tol`), then snaps the diagonal to exactly 1 and the lower
    triangle to the exact reciprocal of the upper triangle so that later
    identities hold to machine precision.  Entries are addressed with
    1-based index pairs, matching the generator numbering: ``mu[1, 2]``.

    The comparison tolerance for the whole computation rides along here so
    that every derived value shares one configuration.
    """

    __slots__ = ("n", "tol", "_rows")

    def __init__(self, entries: Sequence[Sequence[complex]], tol: float = DEFAULT_TOL):
        if not (isinstance(tol, (int, float)) and math.isfinite(tol) and tol > 0):
            raise InputError(f"tolerance must be a positive finite number, got {tol!r}")
        rows = [[_as_scalar(x) for x in row] for row in entries]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise InputError("mu must be a nonempty square matrix")
        scale = max(abs(x) for row in rows for x in row)
        for i in range(n):
            if not approx_eq(rows[i][i], 1.0, tol, scale):
                raise InputError(f"mu_{i + 1}{i + 1} must equal 1, got {rows[i][i]!r}")
            rows[i][i] = 1 + 0j
        for i in range(n):
            for j in range(i + 1, n):
                if approx_zero(rows[i][j], tol) or approx_zero(rows[j][i], tol):
                    raise InputError(f"mu_{i + 1}{j + 1} and mu_{j + 1}{i + 1} must be nonzero")
                if not approx_eq(rows[i][j] * rows[j][i], 1.0, tol, scale * scale):
                    raise InputError(
                        f"mu_{i + 1}{j + 1} * mu_{j + 1}{i + 1} must equal 1, "
                        f"got {rows[i][j] * rows[j][i]!r}"
                    )
                rows[j][i] = 1 / rows[i][j]
        self.n = n
        self.tol = float(tol)
        self._rows = tuple(tuple(r) for r in rows)

    @classmethod
    def commutative(cls, n: int, tol: float = DEFAULT_TOL) -> "MuMatrix":
        """The mu = 1 context: the ordinary polynomial ring on n generators."""
        if n < 1:
            raise InputError("n must be positive")
        return cls([[1.0] * n for _ in range(n)], tol=tol)

    def __getitem__(self, ij: tuple[int, int]) -> complex:
        i, j = ij
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise InputError(f"mu index ({i}, {j}) out of range 1..{self.n}")
        return self._rows[i - 1][j - 1]

    @property
    def entries(self) -> tuple[tuple[complex, ...], ...]:
        return self._rows

    def scale(self) -> float:
        return max(abs(x) for row in self._rows for x in row)

    def compatible(self, other: "MuMatrix") -> bool:
        if self.n != other.n:
            return False
        tol = min(self.tol, other.tol)
        s = max(self.scale(), other.scale())
        return all(
            approx_eq(a, b, tol, s)
            for ra, rb in zip(self._rows, other._rows)
            for a, b in zip(ra, rb)
        )

    def with_tol(self, tol: float) -> "MuMatrix":
        return MuMatrix(self._rows, tol=tol)

    def permuted(self, perm: Sequence[int]) -> "MuMatrix":
        """Context for the relabeled generators y_i = z_{perm[i-1]}.

        perm is a permutation of 1..n; the relabeled relations use
        mu'_ij = mu_{perm(i) perm(j)}.
        """
        if sorted(perm) != list(range(1, self.n + 1)):
            raise InputError(f"{perm!r} is not a permutation of 1..{self.n}")
        return MuMatrix(
            [[self[perm[i], perm[j]] for j in range(self.n)] for i in range(self.n)],
            tol=self.tol,
        )

    def __repr__(self) -> str:
        return f"MuMatrix(n={self.n}, entries={self._rows!r})"


def is_twist_of_polynomial_ring(mu: MuMatrix) -> bool:
    """True iff mu_ik = mu_ij mu_jk for all triples (i, j, k).

    Exactly the condition under which the ring is the twist of the
    commutative polynomial ring by a degree-zero automorphism; automatic
    for n = 2.
    """
    s = max(1.0, mu.scale()) ** 2
    for i in range(1, mu.n + 1):
        for j in range(1, mu.n + 1):
            for k in range(1, mu.n + 1):
                if not approx_eq(mu[i, k], mu[i, j] * mu[j, k], mu.tol, s):
                    return False
    return True


def _word_of(exponents: tuple[int, ...]) -> list[int]:
    word: list[int] = []
    for g, e in enumerate(exponents, start=1):
        word.extend([g] * e)
    return word


def _normalize_word(coeff: complex, word: Sequence[int], mu: MuMatrix) -> tuple[complex, tuple[int, ...]]:
    """Bubble an arbitrary word into normal order, accumulating mu factors.

    Each adjacent out-of-order pair z_p z_q (p > q) is replaced by
    mu_qp z_q z_p.  The rewriting system is confluent, so the result does
    not depend on the swap order.
    """
    w = list(word)
    c = coeff
    moved = True
    while moved:
        moved = False
        for k in range(len(w) - 1):
            if w[k] > w[k + 1]:
                c *= mu[w[k + 1], w[k]]
                w[k], w[k + 1] = w[k + 1], w[k]
                moved = True
    exponents = [0] * mu.n
    for g in w:
        exponents[g - 1] += 1
    return c, tuple(exponents)


class SkewPoly:
    """A ring element in normal form: exponent tuple -> coefficient.

    Coefficients within tolerance of zero (relative to the largest
    coefficient present) are never stored.  Use `from_terms` / `zero` /
    `monomial`; instances are immutable.
    """

    __slots__ = ("mu", "_terms")

    def __init__(self, mu: MuMatrix, terms: Mapping[tuple[int, ...], complex], _trusted: bool = False):
        if not _trusted:
            cleaned: dict[tuple[int, ...], complex] = {}
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != mu.n or any(x < 0 for x in e):
                    raise InputError(f"bad exponent tuple {e!r} for n={mu.n}")
                cleaned[e] = cleaned.get(e, 0j) + _as_scalar(c)
            terms = _drop_small(cleaned, mu.tol)
        self.mu = mu
        self._terms = dict(terms)

    @classmethod
    def zero(cls, mu: MuMatrix) -> "SkewPoly":
        return cls(mu, {}, _trusted=True)

    @classmethod
    def monomial(cls, mu: MuMatrix, exponents: Sequence[int], coeff: complex = 1.0) -> "SkewPoly":
        return cls(mu, {tuple(exponents): coeff})

    @classmethod
    def from_terms(cls, mu: MuMatrix, items: Iterable[tuple[tuple[int, ...], complex]]) -> "SkewPoly":
        acc: dict[tuple[int, ...], complex] = {}
        for e, c in items:
            acc[tuple(e)] = acc.get(tuple(e), 0j) + c
        return cls(mu, acc)

    def terms(self) -> list[tuple[tuple[int, ...], complex]]:
        """Terms sorted by exponent tuple, descending (the canonical print order)."""
        return sorted(self._terms.items(), key=lambda t: t[0], reverse=True)

    def coeff(self, exponents: Sequence[int]) -> complex:
        return self._terms.get(tuple(exponents), 0j)

    def degree(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=0)

    def max_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_homogeneous(self, degree: int) -> bool:
        return all(sum(e) == degree for e in self._terms)

    def residual(self, other: "SkewPoly") -> float:
        """Max absolute coefficient difference against `other`."""
        keys = set(self._terms) | set(other._terms)
        return max((abs(self._terms.get(k, 0j) - other._terms.get(k, 0j)) for k in keys), default=0.0)

    def __add__(self, other: "SkewPoly") -> "SkewPoly":
        if not self.mu.compatible(other.mu):
            raise InputError("mismatched mu contexts in addition")
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0j) + c
        return SkewPoly(self.mu, acc)

    def __sub__(self, other: "SkewPoly") -> "SkewPoly":
        return self + (-other)

    def __neg__(self) -> "SkewPoly":
        return SkewPoly(self.mu, {e: -c for e, c in self._terms.items()}, _trusted=True)

    def scaled(self, s: complex) -> "SkewPoly":
        return SkewPoly(self.mu, {e: c * s for e, c in self._terms.items()})

    def __mul__(self, other: "SkewPoly") -> "SkewPoly":
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"SkewPoly({self._terms!r})"


def _drop_small(terms: dict[tuple[int, ...], complex], tol: float) -> dict[tuple[int, ...], complex]:
    if not terms:
        return {}
    scale = max(abs(c) for c in terms.values())
    cut = tol * max(1.0, scale)
    return {e: c for e, c in terms.items() if abs(c) > cut}


def normal_form(raw: Iterable[tuple[complex, Sequence[int]]], mu: MuMatrix) -> SkewPoly:
    """Normalize a sum of coefficient/word pairs onto the ordered basis.

    Words are sequences of 1-based generator indices, e.g. [2, 1] for
    z_2 z_1.  Like terms are combined and coefficients within tolerance of
    zero are dropped.
    """
    acc: dict[tuple[int, ...], complex] = {}
    for coeff, word in raw:
        word = [int(g) for g in word]
        for g in word:
            if not (1 <= g <= mu.n):
                raise InputError(f"generator index {g} out of range 1..{mu.n}")
        c, e = _normalize_word(_as_scalar(coeff), word, mu)
        acc[e] = acc.get(e, 0j) + c
    return SkewPoly(mu, acc)


def multiply(p: SkewPoly, q: SkewPoly) -> SkewPoly:
    """Product in the skew ring: concatenate words, then normal-order."""
    if not p.mu.compatible(q.mu):
        raise InputError("mismatched mu contexts in multiplication")
    mu = p.mu
    acc: dict[tuple[int, ...], complex] = {}
    for e1, c1 in p._terms.items():
        w1 = _word_of(e1)
        for e2, c2 in q._terms.items():
            c, e = _normalize_word(c1 * c2, w1 + _word_of(e2), mu)
            acc[e] = acc.get(e, 0j) + c
    return SkewPoly(mu, acc)


class LinearForm:
    """A degree-one element sum_i coeffs[i-1] * z_i."""

    __slots__ = ("mu", "coeffs")

    def __init__(self, mu: MuMatrix, coeffs: Sequence[complex]):
        cs = tuple(_as_scalar(c) for c in coeffs)
        if len(cs) != mu.n:
            raise InputError(f"linear form needs {mu.n} coefficients, got {len(cs)}")
        self.mu = mu
        self.coeffs = cs

    @classmethod
    def zero(cls, mu: MuMatrix) -> "LinearForm":
        return cls(mu, [0.0] * mu.n)

    @classmethod
    def unit(cls, mu: MuMatrix, i: int, coeff: complex = 1.0) -> "LinearForm":
        """coeff * z_i."""
        cs = [0j] * mu.n
        cs[i - 1] = coeff
        return cls(mu, cs)

    def to_poly(self) -> SkewPoly:
        items = []
        for i, c in enumerate(self.coeffs):
            e = [0] * self.mu.n
            e[i] = 1
            items.append((tuple(e), c))
        return SkewPoly.from_terms(self.mu, items)

    def max_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def is_zero(self) -> bool:
        s = self.max_coeff()
        return all(approx_zero(c, self.mu.tol, s) for c in self.coeffs)

    def scaled(self, s: complex) -> "LinearForm":
        return LinearForm(self.mu, [c * s for c in self.coeffs])

    def __add__(self, other: "LinearForm") -> "LinearForm":
        if not self.mu.compatible(other.mu):
            raise InputError("mismatched mu contexts")
        return LinearForm(self.mu, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "LinearForm":
        return LinearForm(self.mu, [-c for c in self.coeffs])

    def first_nonzero(self) -> int | None:
        """1-based index of the first coefficient not within tolerance of zero."""
        s = self.max_coeff()
        for i, c in enumerate(self.coeffs, start=1):
            if not approx_zero(c, self.mu.tol, s):
                return i
        return None

    def normalized(self) -> tuple["LinearForm", complex]:
        """Scale so the first nonzero coefficient is 1; returns (form, leading).

        The original equals leading * form.  The zero form returns itself
        with leading 1.
        """
        k = self.first_nonzero()
        if k is None:
            return self, 1.0
        lead = self.coeffs[k - 1]
        return self.scaled(1 / lead), lead

    def canonical_sign(self) -> "LinearForm":
        """Flip the global sign so the first nonzero coefficient has positive
        real part (positive imaginary part when the real part vanishes)."""
        k = self.first_nonzero()
        if k is None:
            return self
        c = self.coeffs[k - 1]
        if c.real < 0 or (c.real == 0 and c.imag < 0):
            return -self
        return self

    def approx_eq(self, other: "LinearForm") -> bool:
        s = max(self.max_coeff(), other.max_coeff())
        return all(
            approx_eq(a, b, self.mu.tol, s) for a, b in zip(self.coeffs, other.coeffs)
        )

    def __repr__(self) -> str:
        return f"LinearForm({self.coeffs!r})"


class QuadraticForm:
    """A degree-two element, stored as upper-triangular coefficients.

    alpha maps index pairs (i, j) with i <= j to the coefficient of
    z_i z_j in normal form.  For n = 3 the conventional names are
    a = alpha_11, b = alpha_22, c = alpha_33 and 2d = alpha_12,
    2e = alpha_13, 2f = alpha_23; for n = 2 they are a = alpha_11,
    2b = alpha_12, c = alpha_22.  `abc` / `abcdef` surface these so the
    rank formulas read exactly as written.
    """

    __slots__ = ("mu", "_alpha")

    def __init__(self, mu: MuMatrix, alpha: Mapping[tuple[int, int], complex]):
        cleaned: dict[tuple[int, int], complex] = {}
        for (i, j), c in alpha.items():
            i, j = int(i), int(j)
            if not (1 <= i <= j <= mu.n):
                raise InputError(f"coefficient index ({i}, {j}) must satisfy 1 <= i <= j <= {mu.n}")
            cleaned[(i, j)] = cleaned.get((i, j), 0j) + _as_scalar(c)
        self.mu = mu
        self._alpha = cleaned

    @classmethod
    def zero(cls, mu: MuMatrix) -> "QuadraticForm":
        return cls(mu, {})

    @property
    def n(self) -> int:
        return self.mu.n

    def coeff(self, i: int, j: int) -> complex:
        if not (1 <= i <= j <= self.n):
            raise InputError(f"coefficient index ({i}, {j}) out of range")
        return self._alpha.get((i, j), 0j)

    def coefficients(self) -> dict[tuple[int, int], complex]:
        return dict(self._alpha)

    def abc(self) -> tuple[complex, complex, complex]:
        """(a, b, c) with a = alpha_11, 2b = alpha_12, c = alpha_22 (n = 2)."""
        if self.n != 2:
            raise InputError("abc() requires n = 2")
        return self.coeff(1, 1), self.coeff(1, 2) / 2, self.coeff(2, 2)

    def abcdef(self) -> tuple[complex, complex, complex, complex, complex, complex]:
        """(a, b, c, d, e, f) with 2d = alpha_12, 2e = alpha_13, 2f = alpha_23 (n = 3)."""
        if self.n != 3:
            raise InputError("abcdef() requires n = 3")
        return (
            self.coeff(1, 1),
            self.coeff(2, 2),
            self.coeff(3, 3),
            self.coeff(1, 2) / 2,
            self.coeff(1, 3) / 2,
            self.coeff(2, 3) / 2,
        )

    def to_poly(self) -> SkewPoly:
        items = []
        for (i, j), c in self._alpha.items():
            e = [0] * self.n
            e[i - 1] += 1
            e[j - 1] += 1
            items.append((tuple(e), c))
        return SkewPoly.from_terms(self.mu, items)

    def max_coeff(self) -> float:
        return max((abs(c) for c in self._alpha.values()), default=0.0)

    def is_zero(self) -> bool:
        s = self.max_coeff()
        return all(approx_zero(c, self.mu.tol, s) for c in self._alpha.values())

    def scaled(self, s: complex) -> "QuadraticForm":
        return QuadraticForm(self.mu, {ij: c * s for ij, c in self._alpha.items()})

    def approx_eq(self, other: "QuadraticForm") -> bool:
        if self.n != other.n:
            return False
        s = max(self.max_coeff(), other.max_coeff())
        keys = set(self._alpha) | set(other._alpha)
        return all(
            approx_eq(self._alpha.get(k, 0j), other._alpha.get(k, 0j), self.mu.tol, s)
            for k in keys
        )

    def __repr__(self) -> str:
        return f"QuadraticForm({self._alpha!r})"


def square_linear(L: LinearForm) -> QuadraticForm:
    """The quadratic form L * L, by the closed coefficient formulas.

    Diagonal coefficients are alpha_i^2 and the z_i z_j coefficient is
    (1 + mu_ij) alpha_i alpha_j for i < j; agrees with `multiply(L, L)`.
    """
    mu = L.mu
    alpha: dict[tuple[int, int], complex] = {}
    for i in range(1, mu.n + 1):
        alpha[(i, i)] = L.coeffs[i - 1] ** 2
    for i in range(1, mu.n + 1):
        for j in range(i + 1, mu.n + 1):
            alpha[(i, j)] = (1 + mu[i, j]) * L.coeffs[i - 1] * L.coeffs[j - 1]
    return QuadraticForm(mu, alpha)


def product_linear(L1: LinearForm, L2: LinearForm) -> QuadraticForm:
    """The quadratic form L1 * L2; agrees with `multiply(L1, L2)`."""
    if not L1.mu.compatible(L2.mu):
        raise InputError("mismatched mu contexts in product")
    mu = L1.mu
    a, b = L1.coeffs, L2.coeffs
    alpha: dict[tuple[int, int], complex] = {}
    for i in range(1, mu.n + 1):
        alpha[(i, i)] = a[i - 1] * b[i - 1]
    for i in range(1, mu.n + 1):
        for j in range(i + 1, mu.n + 1):
            alpha[(i, j)] = a[i - 1] * b[j - 1] + mu[i, j] * a[j - 1] * b[i - 1]
    return QuadraticForm(mu, alpha)


def tau_star_product(r1: LinearForm, r2: LinearForm) -> QuadraticForm:
    """For n = 2: the product computed through the commutative twist.

    Multiplies r1 by tau(r2) in the ordinary polynomial ring, where
    tau(z_1) = mu_12 z_1 and tau(z_2) = z_2, then reads the result back as
    an element of the skew ring (the skew basis monomial z_1^2 corresponds
    to mu_12 z_1^2 commutatively).  Must coincide with
    `product_linear(r1, r2)`; this is a deliberately independent code path
    for exercising the twist identity.
    """
    if r1.mu.n != 2:
        raise InputError("tau_star_product requires n = 2")
    if not r1.mu.compatible(r2.mu):
        raise InputError("mismatched mu contexts in product")
    mu = r1.mu
    m12 = mu[1, 2]
    flat = MuMatrix.commutative(2, tol=mu.tol)
    p1 = LinearForm(flat, r1.coeffs).to_poly()
    p2 = LinearForm(flat, [m12 * r2.coeffs[0], r2.coeffs[1]]).to_poly()
    prod = multiply(p1, p2)
    return QuadraticForm(
        mu,
        {
            (1, 1): prod.coeff((2, 0)) / m12,
            (1, 2): prod.coeff((1, 1)),
            (2, 2): prod.coeff((0, 2)),
        },
    )


def permute_linear(L: LinearForm, perm: Sequence[int], mu_new: MuMatrix | None = None) -> LinearForm:
    """Relabel generators: the image of L under z_{perm[i-1]} -> y_i."""
    mu_new = mu_new if mu_new is not None else L.mu.permuted(perm)
    return LinearForm(mu_new, [L.coeffs[perm[i] - 1] for i in range(L.mu.n)])


def permute_form(Q: QuadraticForm, perm: Sequence[int], mu_new: MuMatrix | None = None) -> QuadraticForm:
    """Relabel generators of a quadratic form, renormalizing in the new ring.

    perm[i-1] is the old index written in position i; the relabeling is a
    ring isomorphism, so products and squares are carried along exactly.
    """
    mu_new = mu_new if mu_new is not None else Q.mu.permuted(perm)
    inv = [0] * (Q.n + 1)
    for new_i, old_i in enumerate(perm, start=1):
        inv[old_i] = new_i
    raw = []
    for (i, j), c in Q.coefficients().items():
        raw.append((c, [inv[i], inv[j]]))
    p = normal_form(raw, mu_new)
    alpha: dict[tuple[int, int], complex] = {}
    for e, c in p.terms():
        idx = [g for g, k in enumerate(e, start=1) for _ in range(k)]
        alpha[(idx[0], idx[1])] = c
    return QuadraticForm(mu_new, alpha)


def invert_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for pos, old in enumerate(perm, start=1):
        inv[old - 1] = pos
    return inv
