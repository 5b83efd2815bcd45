"""Zero-sum rearrangement and single-vector sign balancing.

Two elementary facts drive this module.  First, if every vector in a
sequence has nonpositive inner product with the preceding partial sum, the
partial sums obey ||w_i||^2 <= ||v_1||^2 + ... + ||v_i||^2.  Second, any
finite family summing to zero can be reordered greedily so that hypothesis
holds: the remaining vectors always sum to -w, so one of them has
nonpositive inner product with w.

Applied to a unit vector v in the range of a projection p: split p into the
rank-one part p1 along v and the rest p2, slice p(v) by coordinates into
x_i + y_i with x_i = alpha_i^2 v parallel to v and y_i perpendicular
(sum x_i = v, sum y_i = 0), reorder the y_i greedily, and cut the order at
the smallest prefix k with |1/2 - sum_1^k alpha_i^2| <= delta_p/2 (one
exists because each alpha_i^2 <= delta_p and the total is 1).  Giving the
prefix +1 and the rest -1 yields a diagonal symmetry s with

    ||p s p (v)||^2 <= delta_p^2 + 2*delta_p + 2*delta_p^2
                     = 2*delta_p + 3*delta_p^2.

So for any single vector, sign cancellation down to ~sqrt(2*delta_p) is
always achievable; lower bounds above that scale need the test vector to
vary with the symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .linalg import Projection, Symmetry, Vector, apply_psp

PREFIX_TOL = 1e-10      # slack for "nonpositive" inner products, times scale
SUM_BOUND_TOL = 1e-9    # slack in the partial-sum bound check
PREFIX_CUT_TOL = 1e-12  # slack in the |1/2 - prefix| <= delta/2 cut
DEGENERATE_TOL = 1e-10  # ||p(v)|| below this is a degenerate input


class ZeroSumFamily:
    """A finite family of same-dimension vectors required to sum to zero.

    ``sum_tolerance`` defaults to 1e-9 times the total vector length mass;
    construction fails if ||sum v_i|| exceeds it.
    """

    __slots__ = ("vectors", "sum_tolerance")

    def __init__(self, vectors, sum_tolerance: float | None = None):
        a = np.array(vectors, dtype=float)
        if a.size == 0:
            a = a.reshape(0, 0 if a.ndim < 2 else a.shape[-1])
        if a.ndim != 2:
            raise ValueError("expected a sequence of equal-length vectors")
        norms = np.linalg.norm(a, axis=1) if len(a) else np.zeros(0)
        if sum_tolerance is None:
            sum_tolerance = 1e-9 * float(norms.sum())
        resid = float(np.linalg.norm(a.sum(axis=0))) if len(a) else 0.0
        if resid > sum_tolerance:
            raise ValueError(
                "family does not sum to zero: ||sum|| = %g > tolerance %g"
                % (resid, sum_tolerance)
            )
        a.setflags(write=False)
        object.__setattr__(self, "vectors", a)
        object.__setattr__(self, "sum_tolerance", float(sum_tolerance))

    def __setattr__(self, name, value):
        raise AttributeError("ZeroSumFamily is immutable")

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def scale(self) -> float:
        """Max squared vector norm; the reference scale for inner-product slack."""
        if len(self) == 0:
            return 0.0
        return float((self.vectors ** 2).sum(axis=1).max())


def _check_order(family: ZeroSumFamily, order) -> list[int]:
    order = [int(i) for i in order]
    if sorted(order) != list(range(len(family))):
        raise ValueError("order is not a permutation of range(%d)" % len(family))
    return order


def check_prefix_property(family: ZeroSumFamily, order) -> bool:
    """True iff each reordered vector has inner product <= slack with the
    partial sum of its predecessors."""
    order = _check_order(family, order)
    tol = PREFIX_TOL * family.scale()
    v = family.vectors
    w = np.zeros(family.dim)
    for step, idx in enumerate(order):
        if step > 0 and float(v[idx] @ w) > tol:
            return False
        w = w + v[idx]
    return True


def partial_sum_bound_holds(family: ZeroSumFamily, order) -> bool:
    """True iff every partial sum satisfies ||w_i||^2 <= sum_{j<=i} ||v_j||^2
    (plus slack).  Guaranteed whenever check_prefix_property holds."""
    order = _check_order(family, order)
    v = family.vectors
    w = np.zeros(family.dim)
    budget = 0.0
    for idx in order:
        w = w + v[idx]
        budget += float(v[idx] @ v[idx])
        if float(w @ w) > budget + SUM_BOUND_TOL:
            return False
    return True


def greedy_rearrange(family: ZeroSumFamily) -> list[int]:
    """Reorder a zero-sum family so every vector meets the running partial
    sum at a nonpositive angle.

    Index 0 opens the order; each following slot takes the remaining vector
    with the most negative inner product against the current partial sum,
    ties broken by smallest index.  Such a vector always exists (the
    remaining vectors sum to -w), so a positive best inner product beyond
    slack means the family did not actually sum to zero.
    """
    k = len(family)
    if k == 0:
        return []
    v = family.vectors
    base_tol = PREFIX_TOL * family.scale()
    order = [0]
    remaining = list(range(1, k))
    w = v[0].copy()
    while remaining:
        dots = v[remaining] @ w
        pick = int(np.argmin(dots))  # first minimum = smallest index on ties
        # The remaining vectors sum to rho - w with ||rho|| <= sum_tolerance,
        # so the best inner product is at most ||rho||*||w|| above zero; the
        # slack must admit that much.
        tol = base_tol + family.sum_tolerance * float(np.linalg.norm(w))
        if float(dots[pick]) > tol:
            raise ValueError(
                "no remaining vector has nonpositive inner product "
                "(best %g > slack %g); zero-sum precondition violated"
                % (float(dots[pick]), tol)
            )
        idx = remaining.pop(pick)
        order.append(idx)
        w += v[idx]
    return order


@dataclass(frozen=True)
class SingleVectorResult:
    """A symmetry cancelling one vector down to sqrt(2*delta_p + 3*delta_p^2).

    ``permutation`` is the greedy order of the perpendicular slices y_i;
    ``alpha_sq`` lists the parallel masses alpha_i^2 in that order, so the
    chosen prefix is alpha_sq[:k].  ``unit_target`` is the normalized
    projected input the guarantee refers to.
    """

    signs: Symmetry
    achieved_norm: float
    bound: float
    delta_p: float
    k: int
    permutation: list[int]
    alpha_sq: list[float]
    unit_target: Vector

    def to_json_dict(self) -> dict:
        return {
            "signs": [int(s) for s in self.signs.signs],
            "achieved_norm": self.achieved_norm,
            "bound": self.bound,
            "delta_p": self.delta_p,
            "k": self.k,
            "permutation": list(self.permutation),
        }


def single_vector_symmetry(p: Projection, v: Vector) -> SingleVectorResult:
    """Construct a diagonal symmetry s with ||psp(v)|| <= sqrt(2d + 3d^2),
    d = delta_p, for the (normalized, projected) vector v.

    Steps: project and renormalize v; form the perpendicular coordinate
    slices y_i = v_i (P e_i - v_i v); greedily reorder them; cut at the
    smallest prefix k with |1/2 - sum alpha^2| <= delta_p/2; s is +1 on the
    prefix coordinates and -1 elsewhere.
    """
    v = np.asarray(v, dtype=float)
    pv = p.apply(v)
    nrm = float(np.linalg.norm(pv))
    if nrm <= DEGENERATE_TOL:
        raise ValueError("p(v) vanishes; no direction to cancel")
    unit = pv / nrm

    n = p.n
    diag = p.diagonal()
    delta = float(diag.max())
    alpha_sq = unit**2

    f = p.frame.rows
    # Columns of P = F^T F, then y_i = unit_i * (P e_i - unit_i * unit).
    pmat = f.T @ f
    y = pmat * unit[None, :] - np.outer(unit, alpha_sq)
    family = ZeroSumFamily(
        y.T, sum_tolerance=max(1e-9 * float(np.linalg.norm(y, axis=0).sum()), 1e-12)
    )
    perm = greedy_rearrange(family)

    ordered = alpha_sq[perm]
    prefix = 0.0
    k = -1
    for kk in range(n + 1):
        if abs(0.5 - prefix) <= delta / 2.0 + PREFIX_CUT_TOL:
            k = kk
            break
        if kk < n:
            prefix += float(ordered[kk])
    if k < 0:
        raise RuntimeError(
            "no prefix lands within delta_p/2 of 1/2; "
            "input is numerically inconsistent"
        )

    signs = -np.ones(n, dtype=np.int64)
    signs[perm[:k]] = 1
    s = Symmetry(signs)
    achieved = float(np.linalg.norm(apply_psp(p, s, unit)))
    bound = math.sqrt(2.0 * delta + 3.0 * delta * delta)
    if achieved > bound + 1e-9:
        raise RuntimeError(
            "constructed symmetry misses its guarantee: %.17g > %.17g"
            % (achieved, bound)
        )
    return SingleVectorResult(
        signs=s,
        achieved_norm=achieved,
        bound=bound,
        delta_p=delta,
        k=k,
        permutation=perm,
        alpha_sq=[float(x) for x in ordered],
        unit_target=unit,
    )
