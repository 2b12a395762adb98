"""Dense square-matrix and permutation primitives.

Conventions: internally everything is 0-based numpy; error messages use
1-based indices. Entries are float64, including 0/1 adjacency matrices.
All objects are immutable after construction and safe to share.
"""

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SquareMatrix",
    "Permutation",
    "CornerMatrix",
    "apply_permutation",
    "top_right_corner",
    "block_decompose",
    "column_sums",
    "row_sums",
    "matrix_to_json",
    "matrix_from_json",
    "matrix_to_csv",
    "matrix_from_csv",
]


def _as_float_matrix(entries) -> np.ndarray:
    a = np.asarray(entries, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("entries must be a 2-d array")
    a = a.copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SquareMatrix:
    """Real n x n matrix, optionally tagged as having zero diagonal."""

    entries: np.ndarray
    zero_diagonal: bool = False

    def __post_init__(self):
        a = _as_float_matrix(self.entries)
        if a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix with n >= 1, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        if self.zero_diagonal and np.any(np.diag(a) != 0.0):
            i = int(np.nonzero(np.diag(a))[0][0])
            raise ValueError(f"zero-diagonal tag but entry ({i + 1},{i + 1}) is nonzero")
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Permutation:
    """Bijection on {1..n}, stored 0-based."""

    map: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.map, dtype=np.int64).copy()
        if m.ndim != 1 or m.size < 1:
            raise ValueError("permutation map must be a nonempty 1-d array")
        n = m.size
        if not np.array_equal(np.sort(m), np.arange(n)):
            raise ValueError(f"map is not a bijection on 1..{n}")
        m.setflags(write=False)
        object.__setattr__(self, "map", m)

    @property
    def n(self) -> int:
        return self.map.size

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(np.arange(n))

    def inverse(self) -> "Permutation":
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.map] = np.arange(self.n)
        return Permutation(inv)


@dataclass(frozen=True)
class CornerMatrix:
    """Square floor(n/2) x floor(n/2) top-right corner of a parent matrix."""

    entries: np.ndarray
    parent_n: int = field(default=0)

    def __post_init__(self):
        a = _as_float_matrix(self.entries)
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"corner must be square, got shape {a.shape}")
        object.__setattr__(self, "entries", a)

    @property
    def m(self) -> int:
        return self.entries.shape[0]


def apply_permutation(M: SquareMatrix, sigma: Permutation) -> SquareMatrix:
    """Simultaneous relabeling: result[i][j] = M[sigma(i)][sigma(j)]."""
    if sigma.n != M.n:
        raise ValueError(f"dimension mismatch: matrix is {M.n}, permutation is {sigma.n}")
    out = M.entries[np.ix_(sigma.map, sigma.map)]
    return SquareMatrix(out, zero_diagonal=M.zero_diagonal)


def top_right_corner(M: SquareMatrix) -> CornerMatrix:
    """Rows 1..floor(n/2), last floor(n/2) columns (1-based)."""
    n = M.n
    if n < 2:
        raise ValueError("top-right corner requires n >= 2")
    m = n // 2
    return CornerMatrix(M.entries[:m, n - m:], parent_n=n)


def block_decompose(M: SquareMatrix):
    """Four blocks (M11, M12, M21, M22) split at floor(n/2).

    For even n all blocks are square and M12 equals the top-right corner.
    For odd n the row/column split is floor(n/2) then ceil(n/2), so M12 is
    floor(n/2) x ceil(n/2); the square corner is always obtained from
    top_right_corner instead.
    """
    n = M.n
    if n < 2:
        raise ValueError("block decomposition requires n >= 2")
    m = n // 2
    a = M.entries
    return a[:m, :m], a[:m, m:], a[m:, :m], a[m:, m:]


def _entries(M) -> np.ndarray:
    return M.entries if hasattr(M, "entries") else np.asarray(M, dtype=np.float64)


def column_sums(M) -> np.ndarray:
    """u_i = l1 norm of column i (plain sum for nonnegative matrices)."""
    return np.abs(_entries(M)).sum(axis=0)


def row_sums(M) -> np.ndarray:
    """v_i = l1 norm of row i."""
    return np.abs(_entries(M)).sum(axis=1)


# --- serialization -------------------------------------------------------
#
# JSON uses Python's shortest round-trip float repr, so dump -> load is
# bit-exact. CSV is one row per line, same float formatting.

def matrix_to_json(M: SquareMatrix) -> str:
    return json.dumps(
        {"n": M.n, "zero_diagonal": M.zero_diagonal, "entries": M.entries.tolist()}
    )


def matrix_from_json(text: str) -> SquareMatrix:
    obj = json.loads(text)
    M = SquareMatrix(obj["entries"], zero_diagonal=bool(obj.get("zero_diagonal", False)))
    if M.n != int(obj["n"]):
        raise ValueError(f"declared n={obj['n']} but entries are {M.n}x{M.n}")
    return M


def matrix_to_csv(M: SquareMatrix) -> str:
    lines = [",".join(repr(float(x)) for x in row) for row in M.entries]
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str, zero_diagonal: bool = False) -> SquareMatrix:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as e:
            raise ValueError(f"parse error at line {lineno}: {e}") from None
    if not rows:
        raise ValueError("empty matrix file")
    width = len(rows[0])
    for lineno, r in enumerate(rows, start=1):
        if len(r) != width:
            raise ValueError(f"parse error at line {lineno}: expected {width} values, got {len(r)}")
    return SquareMatrix(np.array(rows), zero_diagonal=zero_diagonal)
