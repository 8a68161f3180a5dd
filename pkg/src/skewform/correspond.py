"""The bijection between quadratic forms and mu-symmetric matrices.

A matrix M is mu-symmetric when M_ij = mu_ij M_ji for all i, j; such
matrices are in one-to-one correspondence with quadratic forms.  Reading a
form off a matrix sends z^T M z to its normal form, so the z_j z_i entry
contributes mu_ij M_ji to the z_i z_j coefficient.
"""

from __future__ import annotations

from typing import Sequence

from .ring import (
    InputError,
    MuMatrix,
    QuadraticForm,
    _as_scalar,
    approx_eq,
)


class MuSymmetricMatrix:
    """An n x n matrix satisfying M_ij = mu_ij M_ji within tolerance.

    Construction validates the mu-symmetry entrywise and rejects beyond
    tolerance, naming the offending index pair.  Entries are addressed
    1-based: ``M.entry(1, 2)``.
    """

    __slots__ = ("mu", "_rows")

    def __init__(self, mu: MuMatrix, entries: Sequence[Sequence[complex]]):
        rows = [tuple(_as_scalar(x) for x in row) for row in entries]
        if len(rows) != mu.n or any(len(r) != mu.n for r in rows):
            raise InputError(f"matrix must be {mu.n} x {mu.n}")
        scale = max((abs(x) for row in rows for x in row), default=0.0)
        scale *= max(1.0, mu.scale())
        for i in range(mu.n):
            for j in range(mu.n):
                expected = mu[i + 1, j + 1] * rows[j][i]
                if not approx_eq(rows[i][j], expected, mu.tol, scale):
                    raise InputError(
                        f"matrix is not mu-symmetric at ({i + 1}, {j + 1}): "
                        f"M_{i + 1}{j + 1}={rows[i][j]!r} but mu_{i + 1}{j + 1} * "
                        f"M_{j + 1}{i + 1}={expected!r}"
                    )
        self.mu = mu
        self._rows = tuple(rows)

    @property
    def n(self) -> int:
        return self.mu.n

    @property
    def rows(self) -> tuple[tuple[complex, ...], ...]:
        return self._rows

    def entry(self, i: int, j: int) -> complex:
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise InputError(f"matrix index ({i}, {j}) out of range 1..{self.n}")
        return self._rows[i - 1][j - 1]

    def max_entry(self) -> float:
        return max((abs(x) for row in self._rows for x in row), default=0.0)

    def scaled(self, s: complex) -> "MuSymmetricMatrix":
        return MuSymmetricMatrix(self.mu, [[x * s for x in row] for row in self._rows])

    def approx_eq(self, other: "MuSymmetricMatrix") -> bool:
        scale = max(self.max_entry(), other.max_entry())
        return all(
            approx_eq(a, b, self.mu.tol, scale)
            for ra, rb in zip(self._rows, other._rows)
            for a, b in zip(ra, rb)
        )

    def __repr__(self) -> str:
        return f"MuSymmetricMatrix({self._rows!r})"


def form_to_matrix(Q: QuadraticForm) -> MuSymmetricMatrix:
    """Matrix of a form: M_kk = alpha_kk, M_ij = alpha_ij / 2 and
    M_ji = mu_ji alpha_ij / 2 for i < j.  Mu-symmetric by construction."""
    mu = Q.mu
    n = mu.n
    rows = [[0j] * n for _ in range(n)]
    for i in range(1, n + 1):
        rows[i - 1][i - 1] = Q.coeff(i, i)
        for j in range(i + 1, n + 1):
            half = Q.coeff(i, j) / 2
            rows[i - 1][j - 1] = half
            rows[j - 1][i - 1] = mu[j, i] * half
    return MuSymmetricMatrix(mu, rows)


def matrix_to_form(M: MuSymmetricMatrix) -> QuadraticForm:
    """Form of a matrix: alpha_kk = M_kk and alpha_ij = M_ij + mu_ij M_ji.

    This reads off the normal form of z^T M z; off-pairs that are
    mu-symmetric only within tolerance are implicitly symmetrized, since
    only the combination M_ij + mu_ij M_ji enters.
    """
    mu = M.mu
    alpha: dict[tuple[int, int], complex] = {}
    for i in range(1, mu.n + 1):
        alpha[(i, i)] = M.entry(i, i)
        for j in range(i + 1, mu.n + 1):
            alpha[(i, j)] = M.entry(i, j) + mu[i, j] * M.entry(j, i)
    return QuadraticForm(mu, alpha)
