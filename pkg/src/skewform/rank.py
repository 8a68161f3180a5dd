"""mu-rank classification and constructive factorization witnesses.

Ranks: 0 for the zero form, 1 for perfect squares, 2 for products of
linear forms, 3 otherwise (n = 3).  Every classification is backed by a
witness construction, and every witness returned by this module has been
re-expanded through the skew ring and checked against the input; a failed
check raises `VerificationError` rather than returning a wrong answer.

Wherever the underlying criteria say "for some" root (H, X, Y, the w_i,
delta, epsilon), the finitely many sign choices are enumerated in a fixed
order (+ before -) and the first verified candidate wins, so all outputs
are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .correspond import form_to_matrix
from .invariants import (
    SIGN_PAIRS,
    RadicalPair,
    mu_det_2,
    mu_det_d7,
    mu_det_d8,
    mu_minors_3,
    sextic,
)
from .ring import (
    InputError,
    LinearForm,
    MuMatrix,
    QuadraticForm,
    SkewPoly,
    VerificationError,
    invert_permutation,
    multiply,
    permute_form,
    permute_linear,
    principal_sqrt,
    snapped_sqrt,
)

# Re-expansion residuals are accepted up to this multiple of the context
# tolerance (scaled by the input's coefficient magnitude).
_GATE = 10.0

ZERO = "zero"
SQUARE = "square"
PRODUCT = "product"
SUM_OF_PRODUCTS = "sum_of_products"


@dataclass(frozen=True)
class Factorization:
    """A tagged factorization witness, always re-verifiable by expansion.

    kind "zero":            the zero form
    kind "square":          l1 * l1
    kind "product":         l1 * l2
    kind "sum_of_products": l1 * l2 + l3 * l3

    `radicals` and `h` record the root choices that produced a product
    witness, when one was involved.
    """

    mu: MuMatrix
    kind: str
    l1: LinearForm | None = None
    l2: LinearForm | None = None
    l3: LinearForm | None = None
    radicals: RadicalPair | None = None
    h: complex | None = None

    @classmethod
    def zero(cls, mu: MuMatrix) -> "Factorization":
        return cls(mu, ZERO)

    @classmethod
    def square(cls, L: LinearForm) -> "Factorization":
        return cls(L.mu, SQUARE, l1=L)

    @classmethod
    def product(
        cls,
        L1: LinearForm,
        L2: LinearForm,
        radicals: RadicalPair | None = None,
        h: complex | None = None,
    ) -> "Factorization":
        return cls(L1.mu, PRODUCT, l1=L1, l2=L2, radicals=radicals, h=h)

    @classmethod
    def sum_of_products(cls, L1: LinearForm, L2: LinearForm, L3: LinearForm) -> "Factorization":
        return cls(L1.mu, SUM_OF_PRODUCTS, l1=L1, l2=L2, l3=L3)

    def linear_forms(self) -> list[LinearForm]:
        return [L for L in (self.l1, self.l2, self.l3) if L is not None]

    def expand(self) -> SkewPoly:
        """Re-expansion through skew-ring multiplication only."""
        if self.kind == ZERO:
            return SkewPoly.zero(self.mu)
        if self.kind == SQUARE:
            p = self.l1.to_poly()
            return multiply(p, p)
        if self.kind == PRODUCT:
            return multiply(self.l1.to_poly(), self.l2.to_poly())
        if self.kind == SUM_OF_PRODUCTS:
            p3 = self.l3.to_poly()
            return multiply(self.l1.to_poly(), self.l2.to_poly()) + multiply(p3, p3)
        raise InputError(f"unknown factorization kind {self.kind!r}")


@dataclass(frozen=True)
class MuRank:
    """A rank value together with the invariant values that decided it."""

    value: int
    diagnostics: dict


def _scaled_residual(F: Factorization, Q: QuadraticForm) -> float:
    return F.expand().residual(Q.to_poly()) / max(1.0, Q.max_coeff())


def _checked(F: Factorization, Q: QuadraticForm, context: str) -> Factorization:
    r = _scaled_residual(F, Q)
    if r > _GATE * Q.mu.tol:
        raise VerificationError(f"{context}: witness residual {r:.3e} exceeds gate")
    return F


def _inv_zero(value: complex, Q: QuadraticForm, degree: int) -> bool:
    """Zero test for an invariant that is degree-homogeneous in the coefficients."""
    s = max(1.0, Q.max_coeff()) * max(1.0, Q.mu.scale())
    return abs(value) <= Q.mu.tol * s**degree


def _rescale_a1(Q: QuadraticForm, a: complex) -> QuadraticForm:
    alpha = {ij: c / a for ij, c in Q.coefficients().items()}
    alpha[(1, 1)] = 1.0
    return QuadraticForm(Q.mu, alpha)


def _snap_a0(Q: QuadraticForm) -> QuadraticForm:
    alpha = {ij: c for ij, c in Q.coefficients().items() if ij != (1, 1)}
    return QuadraticForm(Q.mu, alpha)


def _pairs_2(
    a: complex, b: complex, c: complex, m12: complex, tol: float
) -> list[tuple[tuple[complex, complex], tuple[complex, complex]]]:
    """Candidate factor pairs for the two-generator form a x^2 + 2b xy + c y^2.

    Returns coefficient pairs ((p1, p2), (q1, q2)) on the two generators,
    one per factorization class, in a deterministic order.  Such a form
    always factors; degenerate coefficient patterns get explicit pairs and
    the generic case enumerates H = +/- sqrt(b^2 - m12 ac).
    """
    s = max(abs(a), abs(b), abs(c))
    th = tol * max(1.0, s)
    if s <= tol:
        return [((0j, 0j), (0j, 0j))]
    if abs(a) <= th and abs(c) <= th:
        return [((1, 0), (0, 2 * b)), ((0, 1), (2 * b / m12, 0))]
    if abs(a) <= th:
        if abs(b) <= th:
            return [((0, c), (0, 1))]
        return [((2 * b, c), (0, 1)), ((0, 1), (2 * b / m12, c))]
    if abs(c) <= th:
        if abs(b) <= th:
            return [((a, 0), (1, 0))]
        return [((1, 0), (a, 2 * b)), ((a, 2 * b / m12), (1, 0))]
    h0 = snapped_sqrt(b * b - m12 * a * c, tol, max(1.0, s) ** 2 * max(1.0, abs(m12)))
    hs = [h0, -h0] if h0 != 0 else [h0]
    return [((1, c / (b + h)), (a, b + h)) for h in hs]


def _square_2_coeffs(
    a: complex, b: complex, c: complex, m12: complex, tol: float, mu_scale: float
) -> tuple[complex, complex] | None:
    """Coefficients (a1, a2) with (a1 x + a2 y)^2 = a x^2 + 2b xy + c y^2,
    or None when the n = 2 determinant analog does not vanish."""
    s = max(abs(a), abs(b), abs(c))
    s2 = max(1.0, s) * max(1.0, mu_scale)
    D = 4 * b * b - (1 + m12) ** 2 * a * c
    if abs(D) > tol * s2**2:
        return None
    th = tol * max(1.0, s)
    if abs(a) <= th and abs(c) <= th:
        return None
    if abs(a) <= th:
        return 0j, principal_sqrt(c)
    if abs(c) <= th:
        return principal_sqrt(a), 0j
    a1 = principal_sqrt(a)
    if abs(1 + m12) > tol * max(1.0, mu_scale):
        return a1, (2 * b / (1 + m12)) / a1
    return a1, principal_sqrt(c)


def _embed_pair(
    mu: MuMatrix,
    idx: tuple[int, int],
    pair: tuple[tuple[complex, complex], tuple[complex, complex]],
) -> tuple[LinearForm, LinearForm]:
    i, j = idx
    (p1, p2), (q1, q2) = pair
    c1 = [0j] * mu.n
    c2 = [0j] * mu.n
    c1[i - 1], c1[j - 1] = p1, p2
    c2[i - 1], c2[j - 1] = q1, q2
    return LinearForm(mu, c1), LinearForm(mu, c2)


def _canonicalize_pair(L1: LinearForm, L2: LinearForm) -> Factorization:
    """Normalize a product witness: leading coefficient of L1 becomes 1 with
    the scalar absorbed into L2; proportional factors collapse to a square."""
    L1n, lead = L1.normalized()
    L2s = L2.scaled(lead)
    k = L1n.first_nonzero()
    if k is not None:
        gamma = L2s.coeffs[k - 1]
        if L2s.approx_eq(L1n.scaled(gamma)):
            return Factorization.square(L1n.scaled(principal_sqrt(gamma)).canonical_sign())
    return Factorization.product(L1n, L2s)


def _same_class(F: Factorization, G: Factorization) -> bool:
    if F.kind != G.kind:
        return False
    if F.kind == SQUARE:
        return F.l1.approx_eq(G.l1)
    return F.l1.approx_eq(G.l1) and F.l2.approx_eq(G.l2)


# ---------------------------------------------------------------------------
# Two generators


def mu_rank_2(Q: QuadraticForm) -> MuRank:
    """0 for the zero form, 1 when the determinant analog vanishes, else 2."""
    if Q.n != 2:
        raise InputError("mu_rank_2 requires n = 2")
    if Q.is_zero():
        return MuRank(0, {"n": 2})
    D = mu_det_2(form_to_matrix(Q))
    rank = 1 if _inv_zero(D, Q, 2) else 2
    return MuRank(rank, {"n": 2, "D": D})


def square_2(Q: QuadraticForm) -> LinearForm | None:
    """A linear form L with L^2 = Q, or None when no such form exists."""
    if Q.n != 2:
        raise InputError("square_2 requires n = 2")
    if Q.is_zero():
        raise InputError("square_2 requires a nonzero form")
    a, b, c = Q.abc()
    coeffs = _square_2_coeffs(a, b, c, Q.mu[1, 2], Q.mu.tol, Q.mu.scale())
    if coeffs is None:
        return None
    L = LinearForm(Q.mu, coeffs)
    _checked(Factorization.square(L), Q, "square_2")
    return L.canonical_sign()


def factor_2(Q: QuadraticForm) -> list[Factorization]:
    """All factorization classes of a nonzero two-generator form.

    Always at least one and at most two classes; the class containing a
    perfect square is reported as a Square witness.  Every class has been
    verified by re-expansion.
    """
    if Q.n != 2:
        raise InputError("factor_2 requires n = 2")
    if Q.is_zero():
        raise InputError("factor_2 requires a nonzero form; the zero form has rank 0")
    a, b, c = Q.abc()
    mu = Q.mu
    classes: list[Factorization] = []
    for pair in _pairs_2(a, b, c, mu[1, 2], mu.tol):
        L1, L2 = _embed_pair(mu, (1, 2), pair)
        F = _canonicalize_pair(L1, L2)
        if not any(_same_class(F, G) for G in classes):
            classes.append(_checked(F, Q, "factor_2"))
    return classes


def unique_factor_2(Q: QuadraticForm) -> bool:
    """True iff Q factors uniquely up to scalars, i.e. b^2 = mu_12 ac."""
    if Q.n != 2:
        raise InputError("unique_factor_2 requires n = 2")
    if Q.is_zero():
        raise InputError("unique_factor_2 requires a nonzero form")
    a, b, c = Q.abc()
    return _inv_zero(b * b - Q.mu[1, 2] * a * c, Q, 2)


# ---------------------------------------------------------------------------
# Three generators

_SWAP12 = (2, 1, 3)
_SWAP13 = (3, 2, 1)
_SWAP23 = (1, 3, 2)


def _quadratic_roots(A: complex, B: complex, C: complex, tol: float) -> list[complex]:
    """Roots of A x^2 + B x + C, falling back to the linear (then trivial)
    solution as leading coefficients degenerate.  Deterministic order."""
    s = max(abs(A), abs(B), abs(C), 1.0)
    if abs(A) <= tol * s:
        if abs(B) <= tol * s:
            return [0j]
        return [-C / B]
    disc = principal_sqrt(B * B - 4 * A * C)
    return [(-B + disc) / (2 * A), (-B - disc) / (2 * A)]


def _unpermuted_sop(F: Factorization, perm: tuple[int, ...], mu_orig: MuMatrix) -> Factorization:
    inv = invert_permutation(perm)
    return Factorization.sum_of_products(
        permute_linear(F.l1, inv, mu_orig),
        permute_linear(F.l2, inv, mu_orig),
        permute_linear(F.l3, inv, mu_orig),
    )


def decompose_3(Q: QuadraticForm) -> Factorization:
    """Write any three-generator form as L1 L2 + L3^2, constructively.

    Follows the full case analysis: vanishing diagonal handled directly or
    by relabeling generators, then (after scaling the z_1^2 coefficient to
    one) completion of the square when mu_12 != -1 != mu_13, with explicit
    root-solving in the mu_12 = -1 and/or mu_13 = -1 cases.  The returned
    witness is verified by re-expansion.
    """
    if Q.n != 3:
        raise InputError("decompose_3 requires n = 3")
    return _checked(_decompose_3(Q), Q, "decompose_3")


def _decompose_3(Q: QuadraticForm) -> Factorization:
    mu = Q.mu
    tol = mu.tol
    a, b, c, d, e, f = Q.abcdef()
    th = tol * max(1.0, Q.max_coeff())
    if Q.is_zero():
        z = LinearForm.zero(mu)
        return Factorization.sum_of_products(z, z, z)
    if abs(a) <= th:
        if abs(b) > th:
            inner = _decompose_3(permute_form(Q, _SWAP12))
            return _unpermuted_sop(inner, _SWAP12, mu)
        if abs(c) > th:
            inner = _decompose_3(permute_form(Q, _SWAP13))
            return _unpermuted_sop(inner, _SWAP13, mu)
        if abs(e) <= th:
            # 2d z1 z2 + 2f z2 z3 = (2d z1 + 2 mu_32 f z3) z2
            L1 = LinearForm(mu, [2 * d, 0, 2 * mu[3, 2] * f])
            return Factorization.sum_of_products(L1, LinearForm.unit(mu, 2), LinearForm.zero(mu))
        # 2(z1 + (f/e) z2)(d z2 + e z3) reproduces everything but -2(f/e)d z2^2
        alpha = f / e
        L1 = LinearForm(mu, [2, 2 * alpha, 0])
        L2 = LinearForm(mu, [0, d, e])
        L3 = LinearForm(mu, [0, principal_sqrt(-2 * alpha * d), 0])
        return Factorization.sum_of_products(L1, L2, L3)
    Fn = _decompose_3_a1(_rescale_a1(Q, a))
    return Factorization.sum_of_products(
        Fn.l1.scaled(a), Fn.l2, Fn.l3.scaled(principal_sqrt(a))
    )


def _decompose_3_a1(Q: QuadraticForm) -> Factorization:
    mu = Q.mu
    tol = mu.tol
    ms = max(1.0, mu.scale())
    m12, m13 = mu[1, 2], mu[1, 3]
    minus1_12 = abs(1 + m12) <= tol * ms
    minus1_13 = abs(1 + m13) <= tol * ms
    if not minus1_12 and not minus1_13:
        return _decompose_complete_square(Q)
    if minus1_12 and not minus1_13:
        return _decompose_m12(Q)
    if not minus1_12 and minus1_13:
        inner = _decompose_3_a1(permute_form(Q, _SWAP23))
        return _unpermuted_sop(inner, _SWAP23, mu)
    return _decompose_m12_m13(Q)


def _decompose_complete_square(Q: QuadraticForm) -> Factorization:
    # mu_12 != -1 != mu_13: peel off (z1 + 2d/(1+mu_12) z2 + 2e/(1+mu_13) z3)^2
    # and factor the residual two-generator form in (z2, z3).
    mu = Q.mu
    _, b, c, d, e, f = Q.abcdef()
    m12, m13, m23 = mu[1, 2], mu[1, 3], mu[2, 3]
    w = 2 * d / (1 + m12)
    v = 2 * e / (1 + m13)
    L3 = LinearForm(mu, [1, w, v])
    rb = b - w * w
    rc = c - v * v
    rbf = f - (1 + m23) * w * v / 2
    pair = _pairs_2(rb, rbf, rc, m23, mu.tol)[0]
    L1, L2 = _embed_pair(mu, (2, 3), pair)
    return Factorization.sum_of_products(L1, L2, L3)


def _decompose_m12(Q: QuadraticForm) -> Factorization:
    # mu_12 = -1 != mu_13, z1^2 coefficient 1.
    mu = Q.mu
    tol = mu.tol
    _, b, c, d, e, f = Q.abcdef()
    th = tol * max(1.0, Q.max_coeff())
    m13, m23 = mu[1, 3], mu[2, 3]
    if abs(c) <= th and abs(e) <= th:
        # (z1 + eps z2)^2 - 2 z2 (d z1 - f z3), eps^2 = b
        L3 = LinearForm(mu, [1, principal_sqrt(b), 0])
        L1 = LinearForm(mu, [0, -2, 0])
        L2 = LinearForm(mu, [d, 0, -f])
        return Factorization.sum_of_products(L1, L2, L3)
    # Pick delta with delta^2 = c and beta = 2e - (1+mu_13) delta nonzero,
    # then solve the quadratic for gamma and recover alpha.
    deltas = [0j] if abs(c) <= th else [principal_sqrt(c), -principal_sqrt(c)]
    best: tuple[float, Factorization] | None = None
    for delta in deltas:
        beta = 2 * e - (1 + m13) * delta
        if abs(beta) <= th:
            continue
        for gamma in _quadratic_roots(beta, -2 * d * (1 + m23) * delta, 4 * d * f - b * beta, tol):
            alpha = (2 * f - (1 + m23) * gamma * delta) / beta
            F = Factorization.sum_of_products(
                LinearForm(mu, [1, alpha, 0]),
                LinearForm(mu, [0, 2 * d, beta]),
                LinearForm(mu, [1, gamma, delta]),
            )
            r = _scaled_residual(F, Q)
            if r <= _GATE * tol:
                return F
            if best is None or r < best[0]:
                best = (r, F)
    if best is not None:
        return best[1]
    raise VerificationError("decompose_3: no admissible root choice (mu_12 = -1 case)")


def _decompose_m12_m13(Q: QuadraticForm) -> Factorization:
    # mu_12 = mu_13 = -1, z1^2 coefficient 1.
    mu = Q.mu
    tol = mu.tol
    _, b, c, d, e, f = Q.abcdef()
    th = tol * max(1.0, Q.max_coeff())
    m23 = mu[2, 3]
    if abs(e) <= th:
        # (z1 + delta z3)^2 + (2d z1 + b z2 + 2 mu_32 f z3) z2, delta^2 = c
        L3 = LinearForm(mu, [1, 0, principal_sqrt(c)])
        L1 = LinearForm(mu, [2 * d, b, 2 * mu[3, 2] * f])
        return Factorization.sum_of_products(L1, LinearForm.unit(mu, 2), L3)
    # beta^2 = c; solve the quadratic for alpha, then gamma follows.
    betas = [0j] if abs(c) <= th else [principal_sqrt(c), -principal_sqrt(c)]
    best: tuple[float, Factorization] | None = None
    for beta in betas:
        for alpha in _quadratic_roots(e, -d * (1 + m23) * beta, 2 * d * f - b * e, tol):
            gamma = (2 * f - (1 + m23) * alpha * beta) / (2 * e)
            F = Factorization.sum_of_products(
                LinearForm(mu, [2, 2 * gamma, 0]),
                LinearForm(mu, [0, d, e]),
                LinearForm(mu, [1, alpha, beta]),
            )
            r = _scaled_residual(F, Q)
            if r <= _GATE * tol:
                return F
            if best is None or r < best[0]:
                best = (r, F)
    if best is not None:
        return best[1]
    raise VerificationError("decompose_3: no admissible root choice (mu_12 = mu_13 = -1 case)")


def square_3(Q: QuadraticForm) -> LinearForm | None:
    """A linear form L with L^2 = Q, or None when some minor analog is nonzero.

    When all six minor analogs vanish the witness is built from roots
    w_i of the diagonal products, with both signs tried wherever a
    mu_1j = -1 leaves the choice free.
    """
    if Q.n != 3:
        raise InputError("square_3 requires n = 3")
    if Q.is_zero():
        raise InputError("square_3 requires a nonzero form")
    if any(not _inv_zero(v, Q, 2) for v in mu_minors_3(form_to_matrix(Q))):
        return None
    mu = Q.mu
    tol = mu.tol
    ms = max(1.0, mu.scale())
    a, b, c, d, e, f = Q.abcdef()
    th = tol * max(1.0, Q.max_coeff())
    if abs(a) <= th:
        # Vanishing minors force d = e = 0 here, so the form lives in (z2, z3).
        coeffs = _square_2_coeffs(b, f, c, mu[2, 3], tol, ms)
        if coeffs is None:
            return None
        candidates = [LinearForm(mu, [0, coeffs[0], coeffs[1]])]
    else:
        m12, m13 = mu[1, 2], mu[1, 3]
        ra = principal_sqrt(a)
        if abs(1 + m12) > tol * ms:
            w1s = [2 * d / (1 + m12)]
        else:
            w1s = [principal_sqrt(a * b), -principal_sqrt(a * b)]
        if abs(1 + m13) > tol * ms:
            w2s = [2 * e / (1 + m13)]
        else:
            w2s = [principal_sqrt(a * c), -principal_sqrt(a * c)]
        candidates = [
            LinearForm(mu, [ra, w1 / ra, w2 / ra]) for w1, w2 in itertools.product(w1s, w2s)
        ]
    best = None
    for L in candidates:
        r = _scaled_residual(Factorization.square(L), Q)
        if r <= _GATE * tol:
            return L.canonical_sign()
        if best is None or r < best[0]:
            best = (r, L)
    raise VerificationError(
        f"square_3: minor analogs vanish but no square witness verified "
        f"(best residual {best[0]:.3e})"
    )


def factor_3(Q: QuadraticForm) -> Factorization | None:
    """A verified Product witness for a three-generator form, or None.

    The form is normalized so its z_1^2 coefficient is 0 or 1.  With 0 the
    decision is the vanishing of the polynomial determinant analog (each
    factor of it selects one of two explicit candidate factorizations);
    with 1 the four sign choices of the radical determinant analog are
    enumerated and any vanishing one yields the two linear factors.
    """
    if Q.n != 3:
        raise InputError("factor_3 requires n = 3")
    if Q.is_zero():
        raise InputError("factor_3 requires a nonzero form; the zero form has rank 0")
    a = Q.coeff(1, 1)
    if abs(a) <= Q.mu.tol * max(1.0, Q.max_coeff()):
        F = _factor_3_a0(_snap_a0(Q))
    else:
        Fn = _factor_3_a1(_rescale_a1(Q, a))
        F = (
            Factorization.product(Fn.l1.scaled(a), Fn.l2, radicals=Fn.radicals)
            if Fn is not None
            else None
        )
    if F is None:
        return None
    return _checked(F, Q, "factor_3")


def _factor_3_a0(Q: QuadraticForm) -> Factorization | None:
    mu = Q.mu
    tol = mu.tol
    _, b, c, d, e, f = Q.abcdef()
    th = tol * max(1.0, Q.max_coeff())
    if abs(d) <= th and abs(e) <= th:
        # Two-generator form in (z2, z3): always factors.
        pair = _pairs_2(b, f, c, mu[2, 3], tol)[0]
        L1, L2 = _embed_pair(mu, (2, 3), pair)
        return _canonicalize_pair(L1, L2)
    if abs(d) <= th:
        # e != 0: factors iff b = 0, as (2e z1 + 2f z2 + c z3) z3.
        if abs(b) > th:
            return None
        return _canonicalize_pair(
            LinearForm(mu, [2 * e, 2 * f, c]), LinearForm.unit(mu, 3)
        )
    if abs(e) <= th:
        # d != 0: factors iff c = 0, as (2d z1 + b z2 + 2 mu_32 f z3) z2.
        if abs(c) > th:
            return None
        return _canonicalize_pair(
            LinearForm(mu, [2 * d, b, 2 * mu[3, 2] * f]), LinearForm.unit(mu, 2)
        )
    # d, e both nonzero: the two candidate factorizations fix every
    # coefficient except that of z2 z3; each vanishing factor of the
    # polynomial determinant analog certifies the matching candidate.
    first = mu[2, 3] * c * d**2 - 2 * d * e * f + b * e**2
    second = (
        mu[1, 3] * mu[2, 1] * c * d**2
        - 2 * d * e * f
        + mu[1, 2] * mu[2, 3] * mu[3, 1] * b * e**2
    )
    candidates: list[tuple[LinearForm, LinearForm]] = []
    if _inv_zero(first, Q, 3):
        candidates.append(
            (
                LinearForm(mu, [1, b / (2 * d), c / (2 * e)]),
                LinearForm(mu, [0, 2 * d, 2 * e]),
            )
        )
    if _inv_zero(second, Q, 3):
        candidates.append(
            (
                LinearForm(mu, [0, 2 * d * mu[2, 1], 2 * e * mu[3, 1]]),
                LinearForm(mu, [1, b * mu[1, 2] / (2 * d), c * mu[1, 3] / (2 * e)]),
            )
        )
    best = None
    for L1, L2 in candidates:
        F = _canonicalize_pair(L1, L2)
        r = _scaled_residual(F, Q)
        if r <= _GATE * tol:
            return F
        if best is None or r < best[0]:
            best = (r, F)
    if candidates:
        raise VerificationError(
            f"factor_3: determinant analog vanishes but no candidate verified "
            f"(best residual {best[0]:.3e})"
        )
    return None


def _factor_3_a1(Q: QuadraticForm) -> Factorization | None:
    mu = Q.mu
    M = form_to_matrix(Q)
    _, b, c, d, e, f = Q.abcdef()
    viable: list[RadicalPair] = []
    for signs in SIGN_PAIRS:
        value, pair = mu_det_d8(M, signs)
        if _inv_zero(value, Q, 2):
            viable.append(pair)
    best = None
    for pair in viable:
        L1 = LinearForm(mu, [1, mu[2, 1] * (d + pair.x), mu[3, 1] * (e + pair.y)])
        L2 = LinearForm(mu, [1, d - pair.x, e - pair.y])
        F = Factorization.product(L1, L2, radicals=pair)
        r = _scaled_residual(F, Q)
        if r <= _GATE * mu.tol:
            return F
        if best is None or r < best[0]:
            best = (r, F)
    if viable:
        raise VerificationError(
            f"factor_3: radical determinant analog vanishes but no candidate "
            f"verified (best residual {best[0]:.3e})"
        )
    return None


def mu_rank_3(Q: QuadraticForm) -> MuRank:
    """Rank of a three-generator form, with full diagnostics.

    The form is first normalized so its z_1^2 coefficient a is 0 (snapped
    when within tolerance) or 1 (divided out).  Rank 1 when all six minor
    analogs vanish; otherwise rank 2 exactly when the determinant analog
    for the normalized a vanishes (the polynomial one at a = 0, some sign
    choice of the radical one at a = 1); rank 3 otherwise.
    """
    if Q.n != 3:
        raise InputError("mu_rank_3 requires n = 3")
    if Q.is_zero():
        return MuRank(0, {"n": 3})
    a = Q.coeff(1, 1)
    if abs(a) > Q.mu.tol * max(1.0, Q.max_coeff()):
        Qn = _rescale_a1(Q, a)
        a_norm = 1
        normalizer = a
    else:
        Qn = _snap_a0(Q)
        a_norm = 0
        normalizer = None
    M = form_to_matrix(Qn)
    minors = mu_minors_3(M)
    d7 = mu_det_d7(M)
    d8 = [(signs,) + mu_det_d8(M, signs) for signs in SIGN_PAIRS]
    diag = {
        "n": 3,
        "a": a_norm,
        "normalizer": normalizer,
        "minors": {f"D{i}": v for i, v in enumerate(minors, start=1)},
        "D7": d7,
        "D8": [
            {"signs": signs, "X": pair.x, "Y": pair.y, "value": value}
            for signs, value, pair in d8
        ],
        "min_abs_D8": min(abs(value) for _, value, _ in d8),
        "sextic": sextic(M),
    }
    if all(_inv_zero(v, Qn, 2) for v in minors):
        return MuRank(1, diag)
    if a_norm == 0:
        rank = 2 if _inv_zero(d7, Qn, 6) else 3
    else:
        rank = 2 if any(_inv_zero(value, Qn, 2) for _, value, _ in d8) else 3
    return MuRank(rank, diag)


# ---------------------------------------------------------------------------
# Any number of generators


def square_general(Q: QuadraticForm) -> LinearForm | None:
    """Perfect-square test for any n, by sign enumeration.

    Diagonal coefficients fix the candidate coefficients up to sign (the
    global sign is fixed on the first nonzero diagonal); coefficients over
    a vanishing diagonal are recovered from a cross term against an anchor
    generator.  Every candidate is verified by expansion.
    """
    mu = Q.mu
    tol = mu.tol
    n = mu.n
    if Q.is_zero():
        raise InputError("square_general requires a nonzero form")
    s = Q.max_coeff()
    th = tol * max(1.0, s)
    ms = max(1.0, mu.scale())
    anchors = [i for i in range(1, n + 1) if abs(Q.coeff(i, i)) > th]
    if not anchors:
        return None
    roots = {i: principal_sqrt(Q.coeff(i, i)) for i in anchors}
    target = Q.to_poly()
    base = anchors[0]
    for signs in itertools.product((1, -1), repeat=len(anchors) - 1):
        alpha = [0j] * n
        alpha[base - 1] = roots[base]
        for sg, i in zip(signs, anchors[1:]):
            alpha[i - 1] = sg * roots[i]
        for i in range(1, n + 1):
            if i in anchors:
                continue
            for j in anchors:
                lo, hi = min(i, j), max(i, j)
                denom = (1 + mu[lo, hi]) * alpha[j - 1]
                if abs(denom) > tol * ms * max(1.0, abs(alpha[j - 1])):
                    alpha[i - 1] = Q.coeff(lo, hi) / denom
                    break
        L = LinearForm(mu, alpha)
        p = L.to_poly()
        if multiply(p, p).residual(target) <= _GATE * tol * max(1.0, s):
            return L.canonical_sign()
    return None


def mu_rank_general(Q: QuadraticForm) -> int | str:
    """Rank for any n: exact for n <= 3; for larger n, 0, 1 (perfect
    square) or the string ">=2" (product detection is out of scope)."""
    if Q.is_zero():
        return 0
    if Q.n == 2:
        return mu_rank_2(Q).value
    if Q.n == 3:
        return mu_rank_3(Q).value
    return 1 if square_general(Q) is not None else ">=2"
