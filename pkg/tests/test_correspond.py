import random

import pytest

from skewform import (
    InputError,
    MuMatrix,
    MuSymmetricMatrix,
    QuadraticForm,
    form_to_matrix,
    matrix_to_form,
    normal_form,
    parse,
    to_quadratic_form,
)
from skewform.oracle import sample_mu, _sample_quadratic


def form(text, mu):
    return to_quadratic_form(parse(text, mu))


def mu2(m12):
    return MuMatrix([[1, m12], [1 / m12, 1]])


def test_form_to_matrix_golden():
    mu = mu2(2)
    M = form_to_matrix(form("z1^2 + 6 z1 z2 + 4 z2^2", mu))
    assert M.entry(1, 1) == 1
    assert M.entry(1, 2) == 3
    assert M.entry(2, 1) == 1.5
    assert M.entry(2, 2) == 4
    assert M.entry(1, 2) == mu[1, 2] * M.entry(2, 1)


def test_matrix_to_form_golden():
    mu = mu2(2)
    M = MuSymmetricMatrix(mu, [[1, 3], [1.5, 4]])
    Q = matrix_to_form(M)
    assert Q.coeff(1, 1) == 1
    assert Q.coeff(1, 2) == 3 + 2 * 1.5
    assert Q.coeff(2, 2) == 4


def test_zero_and_identity():
    mu = mu2(2)
    assert all(x == 0 for row in form_to_matrix(QuadraticForm.zero(mu)).rows for x in row)
    flat = MuMatrix.commutative(3)
    Q = matrix_to_form(MuSymmetricMatrix(flat, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert Q.to_poly().residual(parse("z1^2 + z2^2 + z3^2", flat)) == 0.0


def test_round_trips_random():
    rng = random.Random(3)
    for n in (2, 3):
        for _ in range(1000):
            mu = sample_mu(rng, n)
            Q = _sample_quadratic(rng, mu, 0.25, 2.0)
            back = matrix_to_form(form_to_matrix(Q))
            assert back.to_poly().residual(Q.to_poly()) <= 1e-10 * max(1.0, Q.max_coeff())
            rows = [[0j] * n for _ in range(n)]
            for i in range(n):
                rows[i][i] = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                for j in range(i + 1, n):
                    rows[i][j] = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                    rows[j][i] = mu[j + 1, i + 1] * rows[i][j]
            M = MuSymmetricMatrix(mu, rows)
            M2 = form_to_matrix(matrix_to_form(M))
            assert M.approx_eq(M2)


def test_commutative_reduction_is_symmetric_and_classical():
    rng = random.Random(9)
    flat = MuMatrix.commutative(3)
    for _ in range(100):
        Q = _sample_quadratic(rng, flat, 0.25, 2.0)
        M = form_to_matrix(Q)
        for i in range(1, 4):
            for j in range(1, 4):
                assert M.entry(i, j) == M.entry(j, i)
        # classical z^T M z expansion reproduces the form
        raw = [(M.entry(i, j), [i, j]) for i in range(1, 4) for j in range(1, 4)]
        assert normal_form(raw, flat).residual(Q.to_poly()) <= 1e-12 * max(1.0, Q.max_coeff())


def test_linearity():
    rng = random.Random(13)
    for _ in range(100):
        mu = sample_mu(rng, 3)
        Q1 = _sample_quadratic(rng, mu, 0.25, 2.0)
        Q2 = _sample_quadratic(rng, mu, 0.25, 2.0)
        lam = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        combo = QuadraticForm(
            mu,
            {
                ij: lam * Q1.coefficients().get(ij, 0j) + Q2.coefficients().get(ij, 0j)
                for ij in set(Q1.coefficients()) | set(Q2.coefficients())
            },
        )
        Ma, M1, M2 = form_to_matrix(combo), form_to_matrix(Q1), form_to_matrix(Q2)
        worst = max(
            abs(Ma.entry(i, j) - (lam * M1.entry(i, j) + M2.entry(i, j)))
            for i in range(1, 4)
            for j in range(1, 4)
        )
        assert worst <= 1e-10 * max(1.0, combo.max_coeff())


def test_rejects_non_mu_symmetric_naming_entry():
    mu = mu2(2)
    with pytest.raises(InputError, match=r"\(1, 2\)"):
        MuSymmetricMatrix(mu, [[1, 3], [3, 4]])


def test_accepts_within_tolerance():
    mu = MuMatrix([[1, 2], [0.5, 1]], tol=1e-6)
    M = MuSymmetricMatrix(mu, [[1, 3.0000001], [1.5, 4]])
    Q = matrix_to_form(M)
    assert abs(Q.coeff(1, 2) - 6) < 1e-5
