import random

import numpy as np
import pytest

from skewform import (
    InputError,
    LinearForm,
    MuMatrix,
    MuSymmetricMatrix,
    SIGN_PAIRS,
    form_to_matrix,
    mu_det_2,
    mu_det_d7,
    mu_det_d8,
    mu_det_d8_any_sign,
    mu_minors_3,
    multiply,
    parse,
    sextic,
    to_quadratic_form,
    twist_simplified_d7,
    twist_simplified_d8,
)
from skewform.oracle import sample_mu, _sample_quadratic


def form(text, mu):
    return to_quadratic_form(parse(text, mu))


def mu2(m12):
    return MuMatrix([[1, m12], [1 / m12, 1]])


def mu3(m12, m13, m23):
    return MuMatrix([[1, m12, m13], [1 / m12, 1, m23], [1 / m13, 1 / m23, 1]])


def matrix_of(text, mu):
    return form_to_matrix(form(text, mu))


def test_mu_det_2_vanishes_on_the_square_example():
    M = matrix_of("z1^2 + 6 z1 z2 + 4 z2^2", mu2(2))
    assert mu_det_2(M) == 0


def test_mu_det_2_is_minus_four_det_at_mu_1():
    rng = random.Random(3)
    flat = MuMatrix.commutative(2)
    for _ in range(200):
        M = form_to_matrix(_sample_quadratic(rng, flat, 0.25, 2.0))
        det = M.entry(1, 1) * M.entry(2, 2) - M.entry(1, 2) * M.entry(2, 1)
        assert abs(mu_det_2(M) + 4 * det) <= 1e-10 * max(1.0, M.max_entry()) ** 2


def test_mu_det_2_with_mu_minus_one():
    M = matrix_of("z1^2 + 2 z1 z2 + 7 z2^2", mu2(-1))
    assert mu_det_2(M) == 4  # the ac term is annihilated


def test_mu_det_2_requires_n2():
    with pytest.raises(InputError):
        mu_det_2(matrix_of("z1^2", MuMatrix.commutative(3)))


def test_minors_vanish_on_planted_squares():
    rng = random.Random(7)
    for _ in range(50):
        q = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        m23 = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        mu = mu3(q, q, m23)
        L = LinearForm(mu, [2, 1, 8]).to_poly()
        M = form_to_matrix(to_quadratic_form(multiply(L, L)))
        scale = max(1.0, M.max_entry() * max(1.0, mu.scale())) ** 2
        assert all(abs(v) <= 1e-9 * scale for v in mu_minors_3(M))


def test_minors_golden_unit_diagonal():
    M = matrix_of("z1^2 + z2^2 + z3^2", MuMatrix.commutative(3))
    assert mu_minors_3(M) == (-4, -4, -4, 0, 0, 0)


def test_minors_reduce_to_classical_at_mu_1():
    rng = random.Random(11)
    flat = MuMatrix.commutative(3)
    for _ in range(200):
        M = form_to_matrix(_sample_quadratic(rng, flat, 0.25, 2.0))
        a, b, c = M.entry(1, 1), M.entry(2, 2), M.entry(3, 3)
        d, e, f = M.entry(1, 2), M.entry(1, 3), M.entry(2, 3)
        got = mu_minors_3(M)
        want = (
            -4 * (a * b - d * d),
            -4 * (a * c - e * e),
            -4 * (b * c - f * f),
            -4 * (a * f - d * e),
            -4 * (c * d - e * f),
            -4 * (b * e - d * f),
        )
        worst = max(abs(g - w) for g, w in zip(got, want))
        assert worst <= 1e-10 * max(1.0, M.max_entry()) ** 2


def test_d7_degenerate_branch_reduces_to_be():
    rng = random.Random(13)
    for _ in range(100):
        mu = sample_mu(rng, 3)
        b = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
        c = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
        e = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
        f = complex(rng.uniform(0.3, 2), rng.uniform(-1, 1))
        from skewform import QuadraticForm

        Q = QuadraticForm(mu, {(2, 2): b, (3, 3): c, (1, 3): 2 * e, (2, 3): 2 * f})
        M = form_to_matrix(Q)
        got = mu_det_d7(M)
        want = mu[1, 2] * mu[2, 3] * mu[3, 1] * b**2 * e**4
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))
        # vanishes exactly when b e does
        Qz = QuadraticForm(mu, {(3, 3): c, (1, 3): 2 * e, (2, 3): 2 * f})
        assert abs(mu_det_d7(form_to_matrix(Qz))) <= 1e-12


def test_d7_vanishes_on_planted_zero_a_product():
    # (z2 + z3)(2 z1 + z2 + z3) at mu = 1 has coefficients b=c=d=e=f=1, a=0.
    flat = MuMatrix.commutative(3)
    Q = to_quadratic_form(
        multiply(parse("z2 + z3", flat), parse("2 z1 + z2 + z3", flat))
    )
    assert Q.coeff(1, 1) == 0
    assert (Q.coeff(2, 2), Q.coeff(3, 3)) == (1, 1)
    assert (Q.coeff(1, 2), Q.coeff(1, 3), Q.coeff(2, 3)) == (2, 2, 2)
    assert abs(mu_det_d7(form_to_matrix(Q))) <= 1e-12


def test_d7_twist_case_is_a_perfect_square():
    rng = random.Random(17)
    for _ in range(100):
        mu = sample_mu(rng, 3, "twist")
        M = form_to_matrix(_sample_quadratic(rng, mu, 0.25, 2.0))
        got = mu_det_d7(M)
        want = twist_simplified_d7(M)
        assert abs(got - want) <= 1e-10 * max(1.0, abs(got), abs(want))


def test_d8_planted_product_vanishes_for_both_y_signs():
    flat = MuMatrix.commutative(3)
    Q = to_quadratic_form(
        multiply(parse("z1 + z2 + z3", flat), parse("z1 + z2 + 2 z3", flat))
    )
    assert (Q.coeff(1, 1), Q.coeff(2, 2), Q.coeff(3, 3)) == (1, 1, 2)
    assert (Q.coeff(1, 2), Q.coeff(1, 3), Q.coeff(2, 3)) == (2, 3, 3)
    M = form_to_matrix(Q)
    for signs in SIGN_PAIRS:
        value, pair = mu_det_d8(M, signs)
        assert pair.x == 0  # d^2 = ab, radicand snapped
        assert abs(abs(pair.y) - 0.5) < 1e-12
        assert abs(value) <= 1e-12


def test_d8_unit_diagonal_never_vanishes():
    M = matrix_of("z1^2 + z2^2 + z3^2", MuMatrix.commutative(3))
    values = set()
    for signs in SIGN_PAIRS:
        value, pair = mu_det_d8(M, signs)
        assert abs(pair.x**2 + 1) < 1e-12 and abs(pair.y**2 + 1) < 1e-12
        values.add(complex(round(value.real, 9), round(value.imag, 9)))
    assert values == {2, -2}
    best, _ = mu_det_d8_any_sign(M)
    assert abs(best) == 2


def test_d8_all_off_terms_zero():
    from skewform import QuadraticForm

    mu = mu3(2, 3, 4)
    M = form_to_matrix(QuadraticForm(mu, {(1, 1): 5}))
    value, pair = mu_det_d8(M, (1, 1))
    assert (pair.x, pair.y, value) == (0, 0, 0)


def test_sextic_golden_unit_diagonal():
    M = matrix_of("z1^2 + z2^2 + z3^2", MuMatrix.commutative(3))
    assert sextic(M) == 16
    prod = 1
    for signs in SIGN_PAIRS:
        v, _ = mu_det_d8(M, signs)
        prod *= v
    assert abs(prod - 16) < 1e-12


def test_sextic_zero_matrix():
    mu = mu3(2, 3, 4)
    M = MuSymmetricMatrix(mu, [[0, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert sextic(M) == 0


def test_sextic_vanishes_on_factorable_forms():
    rng = random.Random(19)
    for _ in range(200):
        mu = sample_mu(rng, 3)
        L1 = LinearForm(mu, [1, rng.uniform(0.3, 2), rng.uniform(0.3, 2)])
        L2 = LinearForm(mu, [1, rng.uniform(0.3, 2), rng.uniform(0.3, 2)])
        Q = to_quadratic_form(multiply(L1.to_poly(), L2.to_poly()))
        M = form_to_matrix(Q)
        scale = max(1.0, M.max_entry() * max(1.0, mu.scale())) ** 6
        assert abs(sextic(M)) <= 1e-8 * scale


def test_sextic_equals_mu_scaled_product_of_d8_values():
    # Empirically exact: sextic = mu_12^2 mu_13^2 * product of the four
    # sign values of D8 (at any normalization).
    rng = random.Random(23)
    for _ in range(300):
        mu = sample_mu(rng, 3)
        Q = _sample_quadratic(rng, mu, 0.25, 2.0)
        a = Q.coeff(1, 1)
        from skewform import QuadraticForm

        Qn = QuadraticForm(mu, {ij: v / a for ij, v in Q.coefficients().items()})
        M = form_to_matrix(Qn)
        prod = 1
        for signs in SIGN_PAIRS:
            v, _ = mu_det_d8(M, signs)
            prod *= v
        sx = sextic(M)
        scale = max(abs(sx), abs(prod), 1.0)
        assert abs(sx - mu[1, 2] ** 2 * mu[1, 3] ** 2 * prod) <= 1e-8 * scale


def test_twist_simplified_d8_matches_general():
    rng = random.Random(29)
    for _ in range(100):
        mu = sample_mu(rng, 3, "twist")
        M = form_to_matrix(_sample_quadratic(rng, mu, 0.25, 2.0))
        for signs in SIGN_PAIRS:
            full, _ = mu_det_d8(M, signs)
            simple = twist_simplified_d8(M, signs)
            assert abs(full - simple) <= 1e-10 * max(1.0, abs(full), abs(simple))


def test_twist_simplified_requires_twist():
    M = matrix_of("z1^2", mu3(1, 2, 1))
    with pytest.raises(InputError, match="twist"):
        twist_simplified_d8(M, (1, 1))


def test_homogeneity():
    rng = random.Random(31)
    for _ in range(100):
        mu = sample_mu(rng, 3)
        M = form_to_matrix(_sample_quadratic(rng, mu, 0.25, 2.0))
        lam = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        Ms = M.scaled(lam)
        scale = (max(1.0, M.max_entry()) * max(1.0, abs(lam)) * max(1.0, mu.scale())) ** 6
        for got, base in zip(mu_minors_3(Ms), mu_minors_3(M)):
            assert abs(got - lam**2 * base) <= 1e-10 * scale
        assert abs(mu_det_d7(Ms) - lam**6 * mu_det_d7(M)) <= 1e-10 * scale


def test_d8_vanishing_matches_classical_det_at_mu_1():
    rng = random.Random(37)
    flat = MuMatrix.commutative(3)
    from skewform import QuadraticForm

    for k in range(200):
        if k % 2 == 0:
            L1 = LinearForm(flat, [1, rng.uniform(0.3, 2), rng.uniform(0.3, 2)])
            L2 = LinearForm(flat, [1, rng.uniform(0.3, 2), rng.uniform(0.3, 2)])
            Q = to_quadratic_form(multiply(L1.to_poly(), L2.to_poly()))
        else:
            Q = _sample_quadratic(rng, flat, 0.25, 2.0)
        a = Q.coeff(1, 1)
        if abs(a) <= 1e-9:
            continue
        Qn = QuadraticForm(flat, {ij: v / a for ij, v in Q.coefficients().items()})
        M = form_to_matrix(Qn)
        det = np.linalg.det(np.array(M.rows, dtype=complex))
        value, _ = mu_det_d8_any_sign(M)
        s = max(1.0, M.max_entry())
        assert (abs(value) <= 1e-7 * s * s) == (abs(det) <= 1e-7 * s**3)
