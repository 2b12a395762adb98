"""Degree-profile regularity: the Deg_m(d, delta) membership test and the
near-constant-corner-degree event.

Both tests share one kernel: for a vector w, a target value and a deviation
scale delta, require |{i : |w_i - target| > k*delta}| <= scale * e^{-k^2}
for every natural k. The membership test uses scale = m and target = d; the
corner event uses scale = n (the parent dimension) and target = d/2. The
quantifier over all k is truncated at the first k with scale * e^{-k^2} < 1,
where the condition degenerates to "no exceedances at all" and stays
satisfied for every larger k because the exceedance sets shrink.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import CornerMatrix, column_sums, row_sums

__all__ = [
    "RegularityParams",
    "DegreeProfile",
    "deg_membership",
    "corner_degree_event",
    "exceedance_profile_ok",
]


@dataclass(frozen=True)
class RegularityParams:
    """Target sum d and deviation scale delta (both > 0)."""

    d: float
    delta: float

    def __post_init__(self):
        if not (self.d > 0 and self.delta > 0):
            raise ValueError("d and delta must be positive")

    def ratio_hypothesis_ok(self, n: int, C: float) -> bool:
        """d / sqrt(ln n) >= C * delta, the sparsity hypothesis of the
        second-singular-value comparison."""
        if n < 3:
            return True
        return self.d / math.sqrt(math.log(n)) >= C * self.delta


@dataclass(frozen=True)
class DegreeProfile:
    u: np.ndarray  # column sums
    v: np.ndarray  # row sums

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64).copy()
        v = np.asarray(self.v, dtype=np.float64).copy()
        if u.ndim != 1 or v.ndim != 1:
            raise ValueError("u and v must be vectors")
        if u.size != v.size:
            raise ValueError(f"length mismatch: |u|={u.size}, |v|={v.size}")
        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def m(self) -> int:
        return self.u.size


def exceedance_profile_ok(w: np.ndarray, target: float, delta: float, scale: float):
    """Returns (ok, worst_k, k_max) for the truncated all-k exceedance test."""
    dev = np.abs(np.asarray(w, dtype=np.float64) - target)
    k = 1
    while True:
        threshold = scale * math.exp(-k * k)
        if np.count_nonzero(dev > k * delta) > threshold:
            return False, k, k
        if threshold < 1.0:
            return True, 0, k
        k += 1


def deg_membership(profile: DegreeProfile, params: RegularityParams) -> dict:
    """Membership in the set of profiles with near-constant sums.

    Requires ||u||_1 = ||v||_1 (relative tolerance, profiles come from
    floating-point matrices) and the exceedance condition on both u and v.
    """
    m = profile.m
    l1_u = float(np.sum(np.abs(profile.u)))
    l1_v = float(np.sum(np.abs(profile.v)))
    l1_gap = abs(l1_u - l1_v)
    l1_tol = 1e-8 * m * max(1.0, params.d)

    ok_u, worst_u, kmax_u = exceedance_profile_ok(profile.u, params.d, params.delta, m)
    ok_v, worst_v, kmax_v = exceedance_profile_ok(profile.v, params.d, params.delta, m)
    k_max = max(kmax_u, kmax_v)

    if l1_gap > l1_tol:
        return {"member": False, "worst_k": 0, "l1_gap": l1_gap, "k_max": k_max}
    member = ok_u and ok_v
    worst_k = 0 if member else min(k for k in (worst_u, worst_v) if k > 0)
    return {"member": member, "worst_k": worst_k, "l1_gap": l1_gap, "k_max": k_max}


def corner_degree_event(T: CornerMatrix, params: RegularityParams, n_parent: int) -> bool:
    """Near-constant corner degrees: both u(T) and v(T) deviate from d/2 by
    more than k*delta for at most n_parent * e^{-k^2} indices, all k.

    Note the asymmetry with deg_membership: the threshold scale is the
    parent dimension n and the target is d/2.
    """
    u = column_sums(T)
    v = row_sums(T)
    ok_u, _, _ = exceedance_profile_ok(u, params.d / 2.0, params.delta, n_parent)
    ok_v, _, _ = exceedance_profile_ok(v, params.d / 2.0, params.delta, n_parent)
    return ok_u and ok_v
