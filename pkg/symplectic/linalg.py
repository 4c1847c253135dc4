"""
Exact linear algebra over the rationals

Matrices are numpy object arrays holding fractions.Fraction entries, so every
elimination step is exact. Nothing here ever touches a float.
"""

from fractions import Fraction
from typing import Sequence

import numpy as np

from symplectic.errors import DegeneratePairingError


def fraction_matrix(rows: Sequence[Sequence]) -> np.ndarray:
    return np.array([[Fraction(x) for x in row] for row in rows], dtype=object).reshape(
        len(rows), len(rows[0]) if rows else 0
    )


def fraction_vector(values: Sequence) -> np.ndarray:
    return np.array([Fraction(x) for x in values], dtype=object)


def identity_matrix(n: int) -> np.ndarray:
    return np.array(
        [[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object
    ).reshape(n, n)


def determinant(matrix: np.ndarray) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination with row pivoting"""
    X = np.array(matrix, dtype=object, copy=True)
    n = X.shape[0]
    det = Fraction(1)
    for i in range(n):
        pivot = next((r for r in range(i, n) if X[r, i] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != i:
            X[[i, pivot]] = X[[pivot, i]]
            det = -det
        det *= X[i, i]
        for r in range(i + 1, n):
            if X[r, i] != 0:
                X[r, :] = X[r, :] - (X[r, i] / X[i, i]) * X[i, :]
    return det


def inverse_matrix(matrix: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse; raises DegeneratePairingError on a singular input"""
    X = np.array(matrix, dtype=object, copy=True)
    n = X.shape[0]
    assert X.shape == (n, n)
    Y = identity_matrix(n)

    # downward elimination: zero the lower triangle, unit diagonal
    for i in range(n):
        pivot = next((r for r in range(i, n) if X[r, i] != 0), None)
        if pivot is None:
            raise DegeneratePairingError("matrix is not invertible over the rationals")
        if pivot != i:
            X[[i, pivot]] = X[[pivot, i]]
            Y[[i, pivot]] = Y[[pivot, i]]

        scale = X[i, i]
        Y[i, :] = Y[i, :] / scale
        X[i, :] = X[i, :] / scale

        for r in range(i + 1, n):
            factor = X[r, i]
            if factor != 0:
                Y[r, :] = Y[r, :] - factor * Y[i, :]
                X[r, :] = X[r, :] - factor * X[i, :]

    # upward elimination
    for j in range(n - 2, -1, -1):
        for i in range(j + 1, n):
            factor = X[j, i]
            if factor != 0:
                Y[j, :] = Y[j, :] - factor * Y[i, :]
                X[j, :] = X[j, :] - factor * X[i, :]

    return Y


def inertia(matrix: np.ndarray) -> tuple:
    """
    Signature (n_plus, n_minus, n_zero) of a symmetric matrix

    Congruence diagonalization with symmetric pivoting (Sylvester's law of
    inertia). A zero diagonal with a nonzero off-diagonal entry a_ij is fixed
    by adding row/column j to row/column i, which makes the new diagonal
    entry 2*a_ij.
    """
    A = np.array(matrix, dtype=object, copy=True)
    n = A.shape[0]
    plus = minus = zero = 0
    active = list(range(n))

    while active:
        k = next((i for i in active if A[i, i] != 0), None)
        if k is None:
            pair = next(
                ((i, j) for i in active for j in active if i != j and A[i, j] != 0),
                None,
            )
            if pair is None:
                # remaining block is identically zero
                zero += len(active)
                break
            i, j = pair
            A[i, :] = A[i, :] + A[j, :]
            A[:, i] = A[:, i] + A[:, j]
            k = i

        pivot = A[k, k]
        if pivot > 0:
            plus += 1
        else:
            minus += 1
        active.remove(k)
        for r in active:
            if A[r, k] != 0:
                factor = A[r, k] / pivot
                A[r, :] = A[r, :] - factor * A[k, :]
                A[:, r] = A[:, r] - factor * A[:, k]

    return plus, minus, zero
