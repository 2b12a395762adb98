"""Singular values, the spectral norm, and identities around s2.

For doubly regular matrices (all row and column sums equal to d) the second
singular value satisfies s2(A) = ||A - (d/n) 11^t||, which this module
exposes both as a computation and as a checkable identity.
"""

from dataclasses import dataclass

import numpy as np

from .core import CornerMatrix, SquareMatrix, column_sums, row_sums
from .rng import stream

__all__ = [
    "SingularSpectrum",
    "ConvergenceError",
    "singular_values",
    "spectral_norm",
    "second_singular",
    "top_two_singular",
    "s2_via_centering",
    "centered_offdiag",
    "perron_check",
    "spectral_radius",
]

# Full decomposition below this size; top-2 orthogonal iteration above.
FULL_SVD_MAX_N = 512


class ConvergenceError(RuntimeError):
    """Iterative solver did not converge; .partial holds the last iterate."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class SingularSpectrum:
    values: np.ndarray  # nonincreasing, >= 0
    tol: float


def _ent(M) -> np.ndarray:
    return M.entries if hasattr(M, "entries") else np.asarray(M, dtype=np.float64)


def singular_values(M, tol: float = 1e-10) -> SingularSpectrum:
    """All singular values in nonincreasing order."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(_ent(M), compute_uv=False)
    s = np.clip(s, 0.0, None)
    return SingularSpectrum(values=s, tol=tol)


def top_two_singular(M, tol: float = 1e-10, max_iter: int = 10_000) -> tuple[float, float]:
    """(s1, s2) by orthogonal iteration on a 2-dimensional subspace.

    Used for n > FULL_SVD_MAX_N where the tail harness only needs the top
    pair. Deterministic start (fixed internal seed).
    """
    A = _ent(M)
    n = A.shape[0]
    if n < 2:
        s = singular_values(A, tol).values
        return float(s[0]), 0.0
    Q, _ = np.linalg.qr(stream(0x5EC7, n).standard_normal((A.shape[1], 2)))
    prev = None
    for _ in range(max_iter):
        Z = A.T @ (A @ Q)
        Q, _ = np.linalg.qr(Z)
        s = np.linalg.svd(A @ Q, compute_uv=False)
        if prev is not None and abs(s[0] - prev[0]) <= tol * max(1.0, s[0]) and abs(
            s[1] - prev[1]
        ) <= tol * max(1.0, s[0]):
            return float(s[0]), float(s[1])
        prev = s
    raise ConvergenceError(
        f"orthogonal iteration did not converge in {max_iter} iterations",
        partial=(float(prev[0]), float(prev[1])),
    )


def spectral_norm(M, tol: float = 1e-10) -> float:
    A = _ent(M)
    if A.shape[0] > FULL_SVD_MAX_N:
        return top_two_singular(A, tol)[0]
    return float(singular_values(A, tol).values[0])


def second_singular(M, tol: float = 1e-10) -> float:
    A = _ent(M)
    if A.shape[0] <= 1:
        return 0.0
    if A.shape[0] > FULL_SVD_MAX_N:
        return top_two_singular(A, tol)[1]
    return float(singular_values(A, tol).values[1])


def s2_via_centering(A, d: float, tol: float = 1e-8) -> float:
    """s2 of a doubly regular matrix as ||A - (d/n) 11^t||.

    Requires all row and column sums to equal d (within tol * max(1, d));
    raises naming the first offending row or column otherwise.
    """
    E = _ent(A)
    n = E.shape[0]
    atol = tol * max(1.0, abs(d))
    u = column_sums(E)
    v = row_sums(E)
    bad_v = np.nonzero(np.abs(v - d) > atol)[0]
    if bad_v.size:
        raise ValueError(f"row {bad_v[0] + 1} has sum {v[bad_v[0]]!r}, expected {d!r}")
    bad_u = np.nonzero(np.abs(u - d) > atol)[0]
    if bad_u.size:
        raise ValueError(f"column {bad_u[0] + 1} has sum {u[bad_u[0]]!r}, expected {d!r}")
    return spectral_norm(E - (d / n) * np.ones((n, n)))


def centered_offdiag(A, d: float) -> SquareMatrix:
    """B = A - (d/n) 11^t minus its own diagonal; always zero-diagonal."""
    E = _ent(A)
    n = E.shape[0]
    B = E - (d / n) * np.ones((n, n))
    np.fill_diagonal(B, 0.0)
    return SquareMatrix(B, zero_diagonal=True)


def spectral_radius(M) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(_ent(M)))))


def perron_check(M, x, tol: float = 1e-8) -> dict:
    """Positive-eigenvector check: for nonnegative M, an eigenvector with
    strictly positive coordinates must carry the spectral radius.

    rho is estimated as the median of the componentwise ratios (Mx)_i/x_i,
    robust to one noisy coordinate; the residual test is authoritative.
    """
    E = _ent(M)
    x = np.asarray(x, dtype=np.float64)
    if np.any(E < 0):
        raise ValueError("matrix must be entrywise nonnegative")
    if x.ndim != 1 or x.size != E.shape[0]:
        raise ValueError("x must be a vector matching the matrix dimension")
    if np.any(x <= 0):
        raise ValueError("x must have strictly positive coordinates")
    Mx = E @ x
    rho = float(np.median(Mx / x))
    is_eigen = bool(np.linalg.norm(Mx - rho * x) <= tol * np.linalg.norm(x))
    matches_radius = False
    if is_eigen:
        matches_radius = bool(abs(rho - spectral_radius(E)) <= tol * max(1.0, abs(rho)))
    return {"rho": rho, "is_eigen": is_eigen, "matches_radius": matches_radius}
