"""Seeded generators for the matrix models the comparisons quantify over.

All generators are pure in (spec.seed, index): sampling the same index
twice gives the same matrix, and trials can be generated in parallel with
no shared state.

Kinds:
  permuted_base            sigma(B) for a fixed base B and uniform sigma
                           (jointly exchangeable by construction)
  separately_exchangeable  base relabeled by independent row and column
                           permutations
  perm_sum_regular         sum of d independent uniform permutation
                           matrices (derangements when zero-diagonal);
                           exact row and column sums d
  regular_digraph          0/1 adjacency with all margins d and zero
                           diagonal, by derangement superposition with
                           rejection of repeated edges, then a uniform
                           relabeling to make the law exchangeable
"""

import json
from dataclasses import dataclass

import numpy as np

from .core import Permutation, SquareMatrix, matrix_from_json, matrix_to_json
from .rng import stream

__all__ = [
    "EnsembleSpec",
    "KINDS",
    "sample",
    "uniform_permutation",
    "random_derangement",
    "permutation_matrix",
]

KINDS = ("permuted_base", "separately_exchangeable", "perm_sum_regular", "regular_digraph")
_REGULAR_KINDS = ("perm_sum_regular", "regular_digraph")
_REJECTION_CAP = 1000


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n: int
    d: int = 0
    zero_diagonal: bool = False
    seed: int = 0
    base: SquareMatrix | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; choose from {KINDS}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind in _REGULAR_KINDS and not 1 <= self.d < self.n:
            raise ValueError(f"regular ensembles need 1 <= d < n, got d={self.d}, n={self.n}")
        if self.kind in ("permuted_base", "separately_exchangeable"):
            if self.base is None:
                raise ValueError(f"{self.kind} requires a base matrix")
            if self.base.n != self.n:
                raise ValueError("base matrix dimension does not match n")

    def to_json(self) -> str:
        obj = {
            "kind": self.kind,
            "n": self.n,
            "d": self.d,
            "zero_diagonal": self.zero_diagonal,
            "seed": self.seed,
            "base": None if self.base is None else json.loads(matrix_to_json(self.base)),
        }
        return json.dumps(obj)

    @staticmethod
    def from_json(text: str) -> "EnsembleSpec":
        obj = json.loads(text)
        base = None
        if obj.get("base") is not None:
            base = matrix_from_json(json.dumps(obj["base"]))
        return EnsembleSpec(
            kind=obj["kind"],
            n=int(obj["n"]),
            d=int(obj.get("d", 0)),
            zero_diagonal=bool(obj.get("zero_diagonal", False)),
            seed=int(obj.get("seed", 0)),
            base=base,
        )


def uniform_permutation(n: int, seed: int, index: int) -> Permutation:
    """Uniform permutation of {1..n}, deterministic in (seed, index)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Permutation(stream(seed, index).permutation(n))


def random_derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    """Fixed-point-free permutation by rejection (acceptance ~ 1/e)."""
    if n < 2:
        raise ValueError("derangements require n >= 2")
    while True:
        p = rng.permutation(n)
        if not np.any(p == np.arange(n)):
            return p


def permutation_matrix(p: np.ndarray) -> np.ndarray:
    n = p.size
    P = np.zeros((n, n))
    P[np.arange(n), p] = 1.0
    return P


def _perm_sum(n: int, d: int, zero_diagonal: bool, rng: np.random.Generator) -> np.ndarray:
    A = np.zeros((n, n))
    for _ in range(d):
        p = random_derangement(n, rng) if zero_diagonal else rng.permutation(n)
        A[np.arange(n), p] += 1.0
    return A


def _regular_digraph(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    # Place derangements one at a time, redrawing any that reuses an edge.
    # Rejecting the whole d-tuple at once has acceptance ~ e^{-d(d-1)/2},
    # hopeless already at moderate d; per-derangement rejection costs ~ e^{d}
    # draws for the last one and the final uniform relabeling restores joint
    # exchangeability either way.
    A = np.zeros((n, n))
    for _ in range(d):
        for _ in range(_REJECTION_CAP):
            p = random_derangement(n, rng)
            if not np.any(A[np.arange(n), p]):
                A[np.arange(n), p] = 1.0
                break
        else:
            raise RuntimeError(
                f"could not place {d} disjoint derangements on n={n} in "
                f"{_REJECTION_CAP} attempts each; increase the n/d gap"
            )
    s = rng.permutation(n)
    return A[np.ix_(s, s)]


def sample(spec: EnsembleSpec, index: int) -> SquareMatrix:
    """Draw sample ``index`` of the ensemble; pure in (spec.seed, index)."""
    rng = stream(spec.seed, index)
    if spec.kind == "permuted_base":
        s = rng.permutation(spec.n)
        out = spec.base.entries[np.ix_(s, s)]
        return SquareMatrix(out, zero_diagonal=spec.base.zero_diagonal)
    if spec.kind == "separately_exchangeable":
        s = rng.permutation(spec.n)
        p = rng.permutation(spec.n)
        return SquareMatrix(spec.base.entries[np.ix_(s, p)])
    if spec.kind == "perm_sum_regular":
        A = _perm_sum(spec.n, spec.d, spec.zero_diagonal, rng)
        return SquareMatrix(A, zero_diagonal=spec.zero_diagonal)
    if spec.kind == "regular_digraph":
        return SquareMatrix(_regular_digraph(spec.n, spec.d, rng), zero_diagonal=True)
    raise AssertionError(spec.kind)
