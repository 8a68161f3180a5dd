import random

import pytest

from skewform import (
    InputError,
    LinearForm,
    MuMatrix,
    SkewPoly,
    is_twist_of_polynomial_ring,
    multiply,
    normal_form,
    parse,
    permute_form,
    permute_linear,
    product_linear,
    square_linear,
    tau_star_product,
    to_quadratic_form,
)
from skewform.oracle import sample_mu, _sample_linear, _sample_poly


def mu2(m12, tol=1e-9):
    return MuMatrix([[1, m12], [1 / m12, 1]], tol=tol)


def mu3(m12, m13, m23, tol=1e-9):
    return MuMatrix([[1, m12, m13], [1 / m12, 1, m23], [1 / m13, 1 / m23, 1]], tol=tol)


def brute_force_rewrites(coeff, word, mu):
    """Apply the defining relations in every possible order; returns the map
    final-word -> list of accumulated coefficients."""
    results = {}
    stack = [(complex(coeff), tuple(word))]
    while stack:
        c, w = stack.pop()
        bad = [k for k in range(len(w) - 1) if w[k] > w[k + 1]]
        if not bad:
            results.setdefault(w, []).append(c)
            continue
        for k in bad:
            c2 = c * mu[w[k + 1], w[k]]
            stack.append((c2, w[:k] + (w[k + 1], w[k]) + w[k + 2:]))
    return results


def test_normal_form_single_relation():
    mu = mu2(2)
    p = normal_form([(1.0, [2, 1])], mu)
    assert p.coeff((1, 1)) == 2.0
    assert len(p.terms()) == 1


def test_normal_form_combines_like_terms():
    mu = mu2(2)
    p = normal_form([(1.0, [1, 2]), (1.0, [2, 1])], mu)
    assert p.coeff((1, 1)) == 3.0


def test_normal_form_degree_three_word_matches_brute_force():
    mu = mu3(1.7, -0.6, 2.5)
    results = brute_force_rewrites(1.0, [3, 2, 1], mu)
    assert set(results) == {(1, 2, 3)}
    coeffs = results[(1, 2, 3)]
    expected = mu[1, 3] * mu[2, 3] * mu[1, 2]
    assert all(abs(c - expected) < 1e-12 for c in coeffs)
    p = normal_form([(1.0, [3, 2, 1])], mu)
    assert abs(p.coeff((1, 1, 1)) - expected) < 1e-12


def test_normal_form_rejects_bad_index():
    mu = mu2(2)
    with pytest.raises(InputError):
        normal_form([(1.0, [1, 3])], mu)
    with pytest.raises(InputError):
        normal_form([(1.0, [0])], mu)


def test_multiply_example_nonunique_factorization():
    mu = mu2(2)
    sq = multiply(parse("z1 + 2 z2", mu), parse("z1 + 2 z2", mu))
    prod = multiply(parse("z1 + z2", mu), parse("z1 + 4 z2", mu))
    expected = parse("z1^2 + 6 z1 z2 + 4 z2^2", mu)
    assert sq.residual(expected) == 0.0
    assert prod.residual(expected) == 0.0


def test_multiply_identity():
    mu = mu3(2, 3, 0.5)
    one = SkewPoly.monomial(mu, (0, 0, 0), 1.0)
    p = parse("z1 z2 + 4 z3^2 - z1", mu)
    assert multiply(one, p).residual(p) == 0.0
    assert multiply(p, one).residual(p) == 0.0


def test_multiply_rejects_mismatched_contexts():
    p = parse("z1", mu2(2))
    q = parse("z1", mu2(3))
    with pytest.raises(InputError):
        multiply(p, q)


def test_multiply_degree_additivity():
    rng = random.Random(11)
    for _ in range(50):
        mu = sample_mu(rng, 3)
        p = _sample_poly(rng, mu, 2, 2)
        q = _sample_poly(rng, mu, 2, 2)
        if p.is_zero() or q.is_zero():
            continue
        assert multiply(p, q).degree() == p.degree() + q.degree()


def test_rewrite_confluence_random_orders():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.choice((2, 3, 4))
        mu = sample_mu(rng, n)
        word = [rng.randint(1, n) for _ in range(rng.randint(0, 4))]
        engine = normal_form([(1.0, word)], mu)
        results = brute_force_rewrites(1.0, word, mu)
        assert len(results) == 1
        (final_word, coeffs), = results.items()
        scale = max(1.0, max(abs(c) for c in coeffs))
        assert max(abs(a - b) for a in coeffs for b in coeffs) <= 1e-10 * scale
        assert abs(engine.coeff(_exps(final_word, n)) - coeffs[0]) <= 1e-10 * scale


def _exps(word, n):
    e = [0] * n
    for g in word:
        e[g - 1] += 1
    return tuple(e)


def test_associativity_random():
    rng = random.Random(17)
    for _ in range(100):
        mu = sample_mu(rng, rng.choice((2, 3)))
        p = _sample_poly(rng, mu, 2, 3)
        q = _sample_poly(rng, mu, 2, 3)
        r = _sample_poly(rng, mu, 2, 3)
        left = multiply(multiply(p, q), r)
        right = multiply(p, multiply(q, r))
        assert left.residual(right) <= 1e-9 * max(1.0, left.max_coeff())


def test_defining_relation_all_pairs():
    rng = random.Random(23)
    for _ in range(50):
        n = rng.choice((2, 3, 4))
        mu = sample_mu(rng, n)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                lhs = normal_form([(1.0, [j, i])], mu)
                rhs = normal_form([(mu[i, j], [i, j])], mu)
                assert lhs.residual(rhs) == 0.0


def test_commutative_reduction_matches_convolution():
    rng = random.Random(29)
    for _ in range(100):
        mu = MuMatrix.commutative(rng.choice((2, 3)))
        p = _sample_poly(rng, mu, 2, 4)
        q = _sample_poly(rng, mu, 2, 4)
        acc = {}
        for e1, c1 in p.terms():
            for e2, c2 in q.terms():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0j) + c1 * c2
        want = SkewPoly(mu, acc)
        got = multiply(p, q)
        assert got.residual(want) <= 1e-10 * max(1.0, want.max_coeff())


def test_square_linear_golden_three_generators():
    q = complex(1.25, 0.5)
    m23 = -1.75
    mu = mu3(q, q, m23)
    L = LinearForm(mu, [2, 1, 8])
    Q = square_linear(L)
    assert Q.coeff(1, 1) == 4
    assert Q.coeff(2, 2) == 1
    assert Q.coeff(3, 3) == 64
    assert abs(Q.coeff(1, 2) - 2 * (1 + q)) < 1e-12
    assert abs(Q.coeff(1, 3) - 16 * (1 + q)) < 1e-12
    assert abs(Q.coeff(2, 3) - 8 * (1 + m23)) < 1e-12


def test_square_linear_single_generator():
    mu = mu3(2, 3, 4)
    Q = square_linear(LinearForm(mu, [1, 0, 0]))
    assert Q.coeff(1, 1) == 1
    assert all(
        Q.coeff(i, j) == 0 for i in range(1, 4) for j in range(i, 4) if (i, j) != (1, 1)
    )


def test_square_and_product_linear_match_multiplication():
    rng = random.Random(31)
    for _ in range(200):
        mu = sample_mu(rng, rng.choice((2, 3, 4)))
        L = _sample_linear(rng, mu, 0.25, 2.0, zero_p=0.2)
        L1 = _sample_linear(rng, mu, 0.25, 2.0, zero_p=0.2)
        L2 = _sample_linear(rng, mu, 0.25, 2.0, zero_p=0.2)
        s = max(1.0, L.max_coeff() ** 2)
        assert square_linear(L).to_poly().residual(multiply(L.to_poly(), L.to_poly())) <= 1e-10 * s
        s2 = max(1.0, L1.max_coeff() * L2.max_coeff())
        assert (
            product_linear(L1, L2).to_poly().residual(multiply(L1.to_poly(), L2.to_poly()))
            <= 1e-10 * s2
        )


def test_product_linear_golden_and_zero():
    mu = mu2(2)
    Q = product_linear(LinearForm(mu, [1, 1]), LinearForm(mu, [1, 4]))
    assert (Q.coeff(1, 1), Q.coeff(1, 2), Q.coeff(2, 2)) == (1, 6, 4)
    Z = product_linear(LinearForm(mu, [1, 1]), LinearForm.zero(mu))
    assert Z.is_zero()


def test_tau_star_product_golden():
    mu = mu2(2)
    r = LinearForm(mu, [1, 2])
    Q = tau_star_product(r, r)
    assert (Q.coeff(1, 1), Q.coeff(1, 2), Q.coeff(2, 2)) == (1, 6, 4)


def test_tau_star_product_trivial_tau_on_z2():
    mu = mu2(3)
    r1 = LinearForm(mu, [1, 1])
    z2 = LinearForm(mu, [0, 1])
    Q = tau_star_product(r1, z2)
    # tau(z2) = z2, so this is the plain commutative product (z1 + z2) z2.
    assert (Q.coeff(1, 1), Q.coeff(1, 2), Q.coeff(2, 2)) == (0, 1, 1)


def test_tau_star_product_matches_skew_product():
    rng = random.Random(37)
    for _ in range(200):
        mu = sample_mu(rng, 2)
        r1 = _sample_linear(rng, mu, 0.25, 2.0, zero_p=0.2)
        r2 = _sample_linear(rng, mu, 0.25, 2.0, zero_p=0.2)
        got = tau_star_product(r1, r2).to_poly()
        want = product_linear(r1, r2).to_poly()
        assert got.residual(want) <= 1e-10 * max(1.0, want.max_coeff())


def test_tau_star_product_requires_two_generators():
    mu = mu3(2, 3, 4)
    with pytest.raises(InputError):
        tau_star_product(LinearForm(mu, [1, 0, 0]), LinearForm(mu, [0, 1, 0]))


def test_twist_detection():
    rng = random.Random(41)
    for _ in range(20):
        assert is_twist_of_polynomial_ring(sample_mu(rng, 2))
    assert is_twist_of_polynomial_ring(MuMatrix.commutative(3))
    assert not is_twist_of_polynomial_ring(mu3(1, 2, 1))
    for _ in range(20):
        assert is_twist_of_polynomial_ring(sample_mu(rng, 3, "twist"))


def test_mu_matrix_validation():
    with pytest.raises(InputError):
        MuMatrix([[1, 2]])
    with pytest.raises(InputError):
        MuMatrix([[2, 1], [1, 1]])
    with pytest.raises(InputError):
        MuMatrix([[1, 2], [2, 1]])
    with pytest.raises(InputError):
        MuMatrix([[1, 0], [0, 1]])
    with pytest.raises(InputError):
        MuMatrix([[1, float("nan")], [1, 1]])
    with pytest.raises(InputError):
        MuMatrix([[1, 2], [0.5, 1]], tol=-1)


def test_mu_matrix_snaps_reciprocals():
    mu = MuMatrix([[1, 3], [0.33333333340, 1]], tol=1e-8)
    assert mu[2, 1] == 1 / mu[1, 2]
    assert mu[1, 1] == 1


def test_linear_form_normalization_and_sign():
    mu = mu2(2)
    L = LinearForm(mu, [0, -2])
    Ln, lead = L.normalized()
    assert lead == -2 and Ln.coeffs == (0, 1)
    assert LinearForm(mu, [-1, 2]).canonical_sign().coeffs == (1, -2)


def test_permutation_round_trip_and_isomorphism():
    rng = random.Random(43)
    from skewform.ring import invert_permutation
    from skewform.oracle import _sample_quadratic

    for _ in range(50):
        mu = sample_mu(rng, 3)
        Q = _sample_quadratic(rng, mu, 0.25, 2.0)
        perm = tuple(rng.sample([1, 2, 3], 3))
        Qp = permute_form(Q, perm)
        back = permute_form(Qp, tuple(invert_permutation(perm)), mu)
        assert back.to_poly().residual(Q.to_poly()) <= 1e-10 * max(1.0, Q.max_coeff())
        # relabeling is a ring isomorphism: permuted product = product of permuted
        L1 = _sample_linear(rng, mu, 0.25, 2.0)
        L2 = _sample_linear(rng, mu, 0.25, 2.0)
        P = to_quadratic_form(multiply(L1.to_poly(), L2.to_poly()))
        mu_p = mu.permuted(perm)
        lhs = permute_form(P, perm, mu_p).to_poly()
        rhs = multiply(
            permute_linear(L1, perm, mu_p).to_poly(), permute_linear(L2, perm, mu_p).to_poly()
        )
        assert lhs.residual(rhs) <= 1e-9 * max(1.0, P.max_coeff())
