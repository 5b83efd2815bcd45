"""Exact construction of a structured projection that defeats diagonal sign
cancellation, with an exhaustive certificate.

For an integer parameter m >= 2 the ambient space carries an orthonormal
basis in four groups,

    a_i      1 <= i <= m^2
    b_i      1 <= i <= 2m+1
    c_{ij}   1 <= i < j <= 2m+1
    d_{ij}   1 <= i <= 2m+1,  1 <= j <= (m+1)^2

for a total dimension of 2m^3 + 8m^2 + 7m + 2.  The projection p has rank
2m+2, spanned by the orthonormal vectors

    v_0 = sum_i 1/(m+1) a_i + sum_i 1/(m+1) b_i

and, for 1 <= i <= 2m+1,

    v_i = sum_j -1/(m^2(m+1)) a_j + 1/(m+1) b_i
          + sum_{j<i} 1/(m(m+1)) c_{ji} - sum_{j>i} 1/(m(m+1)) c_{ij}
          + sum_j (1/m) sqrt((m-1)/(m+1)) d_{ij}.

Every entry is rational except on the d block, where entries live in
Q(sqrt((m-1)/(m+1))); every pairwise inner product is rational, so
orthonormality is verified exactly.  The largest diagonal entry of p is
delta_p = 2/(m+1)^2 (the b-block value) for m >= 6.

For a diagonal symmetry s write eps_i = s(a_i), eps'_i = s(b_i).  Expanding
p s p (v_0) in the frame basis gives coefficients

    c_0 = (S + T) / (m+1)^2          on v_0,
    c_i = (-S/m^2 + eps'_i) / (m+1)^2   on v_i,

where S = sum eps_i = 2*alpha - m^2 and T = sum eps'_i = 2*beta - (2m+1)
count the +1 signs on the a and b blocks.  ||psp(v_0)||^2 therefore depends
on s only through (alpha, beta), which collapses the 2^n symmetry search to
an exact scan of at most (m^2+1)(2m+2) lattice cells.  The scanned minimum
exceeds (2*delta_p)^2 exactly once m >= 8: no diagonal symmetry gets within
2*delta_p of cancelling p, refuting the "||psp|| <= 2 delta_p" paving
conjecture (Conjecture A).  Signs on the c and d blocks never matter because
v_0 is supported on a and b alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exact import QuadExt, rational_to_str
from .linalg import OrthonormalFrame, Projection, Symmetry

FALSIFIES_A = "FALSIFIES_A"
INCONCLUSIVE = "INCONCLUSIVE"

# The analytic per-alpha bound (branch_lower_bound) is only claimed for
# m >= 6; the construction itself is well-formed from m = 2 on.
MIN_M = 2
ANALYTIC_MIN_M = 6


def _check_m(m: int) -> None:
    if not isinstance(m, int) or isinstance(m, bool) or m < MIN_M:
        raise ValueError("m must be an integer >= %d, got %r" % (MIN_M, m))


def dimension(m: int) -> int:
    """Ambient dimension 2m^3 + 8m^2 + 7m + 2 (= sum of the block sizes)."""
    _check_m(m)
    return 2 * m**3 + 8 * m**2 + 7 * m + 2


def block_sizes(m: int) -> dict[str, int]:
    """Sizes of the a, b, c, d coordinate blocks."""
    _check_m(m)
    return {
        "a": m * m,
        "b": 2 * m + 1,
        "c": m * (2 * m + 1),
        "d": (2 * m + 1) * (m + 1) ** 2,
    }


def block_slices(m: int) -> dict[str, slice]:
    """Slices of the four blocks inside the canonical a|b|c|d coordinate order."""
    sizes = block_sizes(m)
    out: dict[str, slice] = {}
    start = 0
    for name in ("a", "b", "c", "d"):
        out[name] = slice(start, start + sizes[name])
        start += sizes[name]
    return out


def _pair_rank(m: int, i: int, j: int) -> int:
    # Lexicographic rank of the pair (i, j), 1 <= i < j <= 2m+1.
    w = 2 * m + 1
    return (i - 1) * w - i * (i - 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class BasisIndex:
    """A coordinate of the ambient space: block 'a'/'b'/'c'/'d' plus indices.

    The canonical order (a block, b block, c block lexicographic, d block
    lexicographic) makes ``offset`` a bijection onto {0, ..., dim-1}.
    """

    block: str
    i: int
    j: int | None = None

    @classmethod
    def a(cls, i: int) -> "BasisIndex":
        return cls("a", i)

    @classmethod
    def b(cls, i: int) -> "BasisIndex":
        return cls("b", i)

    @classmethod
    def c(cls, i: int, j: int) -> "BasisIndex":
        return cls("c", i, j)

    @classmethod
    def d(cls, i: int, j: int) -> "BasisIndex":
        return cls("d", i, j)

    def validate(self, m: int) -> None:
        _check_m(m)
        ok = False
        if self.block == "a":
            ok = self.j is None and 1 <= self.i <= m * m
        elif self.block == "b":
            ok = self.j is None and 1 <= self.i <= 2 * m + 1
        elif self.block == "c":
            ok = self.j is not None and 1 <= self.i < self.j <= 2 * m + 1
        elif self.block == "d":
            ok = (
                self.j is not None
                and 1 <= self.i <= 2 * m + 1
                and 1 <= self.j <= (m + 1) ** 2
            )
        if not ok:
            raise ValueError("index %r out of bounds for m=%d" % (self, m))

    def offset(self, m: int) -> int:
        """Position of this coordinate in the canonical total order."""
        self.validate(m)
        sl = block_slices(m)
        if self.block == "a":
            return self.i - 1
        if self.block == "b":
            return sl["b"].start + self.i - 1
        if self.block == "c":
            return sl["c"].start + _pair_rank(m, self.i, self.j)
        return sl["d"].start + (self.i - 1) * (m + 1) ** 2 + (self.j - 1)


def all_indices(m: int):
    """Every BasisIndex in canonical order."""
    _check_m(m)
    w = 2 * m + 1
    for i in range(1, m * m + 1):
        yield BasisIndex.a(i)
    for i in range(1, w + 1):
        yield BasisIndex.b(i)
    for i in range(1, w + 1):
        for j in range(i + 1, w + 1):
            yield BasisIndex.c(i, j)
    for i in range(1, w + 1):
        for j in range(1, (m + 1) ** 2 + 1):
            yield BasisIndex.d(i, j)


@dataclass
class ExactFrame:
    """The 2m+2 frame vectors with exact entries, stored sparsely.

    ``rows[k]`` maps a coordinate offset to its (nonzero) QuadExt entry; all
    entries share the radicand rho = (m-1)/(m+1).  Treat instances as
    immutable; they may be shared through a cache.
    """

    m: int
    rho: Fraction
    rows: list[dict[int, QuadExt]]

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return dimension(self.m)

    def entry(self, k: int, offset: int) -> QuadExt:
        return self.rows[k].get(offset, QuadExt(0, 0, self.rho))


def build_frame(m: int) -> ExactFrame:
    """Construct the 2m+2 exact frame vectors spanning the projection."""
    _check_m(m)
    rho = Fraction(m - 1, m + 1)
    # Entries repeat massively; sharing the immutable values keeps the build
    # at one object per distinct coefficient.
    inv_m1 = QuadExt(Fraction(1, m + 1), 0, rho)
    neg_a = QuadExt(Fraction(-1, m * m * (m + 1)), 0, rho)
    c_plus = QuadExt(Fraction(1, m * (m + 1)), 0, rho)
    c_minus = -c_plus
    d_coef = QuadExt(0, Fraction(1, m), rho)

    w = 2 * m + 1
    off_b = m * m
    off_c = off_b + w
    off_d = off_c + m * w
    d_width = (m + 1) ** 2

    rows: list[dict[int, QuadExt]] = []
    v0: dict[int, QuadExt] = {}
    for t in range(m * m):
        v0[t] = inv_m1
    for t in range(w):
        v0[off_b + t] = inv_m1
    rows.append(v0)

    for i in range(1, w + 1):
        row: dict[int, QuadExt] = {}
        for t in range(m * m):
            row[t] = neg_a
        row[off_b + i - 1] = inv_m1
        for j in range(1, i):
            row[off_c + _pair_rank(m, j, i)] = c_plus
        for j in range(i + 1, w + 1):
            row[off_c + _pair_rank(m, i, j)] = c_minus
        base = off_d + (i - 1) * d_width
        for j in range(d_width):
            row[base + j] = d_coef
        rows.append(row)
    return ExactFrame(m=m, rho=rho, rows=rows)


@lru_cache(maxsize=8)
def _cached_frame(m: int) -> ExactFrame:
    return build_frame(m)


def _dot(u: dict[int, QuadExt], w: dict[int, QuadExt], zero: QuadExt) -> QuadExt:
    if len(w) < len(u):
        u, w = w, u
    acc = zero
    for k, x in u.items():
        y = w.get(k)
        if y is not None:
            acc = acc + x * y
    return acc


def verify_orthonormal(f: ExactFrame) -> bool:
    """Exact check that the frame's Gram matrix is the identity.

    Every pairwise inner product is computed in Q(sqrt(rho)); each one comes
    out rational because the radical appears squared or not at all.
    """
    zero = QuadExt(0, 0, f.rho)
    one = QuadExt(1, 0, f.rho)
    r = f.rank
    for i in range(r):
        for k in range(i, r):
            g = _dot(f.rows[i], f.rows[k], zero)
            if g != (one if i == k else zero):
                return False
    return True


def row_norm_sq(m: int, index: BasisIndex) -> Fraction:
    """Exact squared row norm ||p(e_x)||^2 = sum_k <e_x, v_k>^2.

    This is the diagonal entry of p at the coordinate x; by construction it
    only depends on x through its block:

        a: 1/(m+1)^2 + (2m+1)/(m^4 (m+1)^2)
        b: 2/(m+1)^2
        c: 2/(m^2 (m+1)^2)
        d: (m-1)/(m^2 (m+1))
    """
    index.validate(m)
    f = _cached_frame(m)
    pos = index.offset(m)
    acc = Fraction(0)
    for row in f.rows:
        e = row.get(pos)
        if e is not None:
            acc += (e * e).as_rational()
    return acc


def delta_p_exact(m: int) -> Fraction:
    """Exact delta_p: the largest diagonal entry of p.

    Computed as the maximum of the four block values (one representative per
    block suffices).  Equals 2/(m+1)^2 for every m >= 6.
    """
    _check_m(m)
    reps = [BasisIndex.a(1), BasisIndex.b(1), BasisIndex.c(1, 2), BasisIndex.d(1, 1)]
    return max(row_norm_sq(m, ix) for ix in reps)


@dataclass(frozen=True)
class SignProfile:
    """Signs of a diagonal symmetry on the a block (eps) and b block (eps_prime).

    The c and d signs are irrelevant to psp(v_0) and are not recorded.
    ``alpha`` and ``beta`` are the +1 counts, which are all the norm of
    psp(v_0) depends on.
    """

    eps: tuple[int, ...]
    eps_prime: tuple[int, ...]

    def __post_init__(self):
        if any(e not in (-1, 1) for e in self.eps) or any(
            e not in (-1, 1) for e in self.eps_prime
        ):
            raise ValueError("profile entries must be +1 or -1")

    @property
    def alpha(self) -> int:
        return sum(1 for e in self.eps if e == 1)

    @property
    def beta(self) -> int:
        return sum(1 for e in self.eps_prime if e == 1)

    def validate(self, m: int) -> None:
        _check_m(m)
        if len(self.eps) != m * m or len(self.eps_prime) != 2 * m + 1:
            raise ValueError(
                "profile lengths (%d, %d) do not match m=%d"
                % (len(self.eps), len(self.eps_prime), m)
            )


def psp_v0_coeffs(m: int, prof: SignProfile) -> tuple[Fraction, list[Fraction]]:
    """Coefficients of p s p (v_0) in the frame basis, exactly.

    Returns (c_0, [c_1, ..., c_{2m+1}]) with c_0 = (S+T)/(m+1)^2 and
    c_i = (-S/m^2 + eps'_i)/(m+1)^2, S and T the signed sums over the a and
    b blocks.
    """
    prof.validate(m)
    s = sum(prof.eps)
    t = sum(prof.eps_prime)
    denom0 = (m + 1) ** 2
    c0 = Fraction(s + t, denom0)
    denom = m * m * denom0
    coeffs = [Fraction(-s + e * m * m, denom) for e in prof.eps_prime]
    return c0, coeffs


def _norm_sq_units(m: int, alpha: int, beta: int) -> int:
    # ||psp(v_0)||^2 in units of 1/(m^4 (m+1)^4); pure integer arithmetic so
    # the lattice scan stays fast and exact.
    s = 2 * alpha - m * m
    t = 2 * beta - (2 * m + 1)
    m2 = m * m
    return (
        m2 * m2 * (s + t) ** 2
        + beta * (m2 - s) ** 2
        + (2 * m + 1 - beta) * (m2 + s) ** 2
    )


def psp_v0_norm_sq(m: int, alpha: int, beta: int) -> Fraction:
    """Exact ||psp(v_0)||^2 for any symmetry with +1 counts (alpha, beta).

    The value is c_0^2 + sum_i c_i^2 where the c_i take just two values
    (eps'_i = +1 or -1); it depends on the profile only through the counts.
    """
    _check_m(m)
    if not 0 <= alpha <= m * m:
        raise ValueError("alpha must lie in [0, m^2], got %d" % alpha)
    if not 0 <= beta <= 2 * m + 1:
        raise ValueError("beta must lie in [0, 2m+1], got %d" % beta)
    return Fraction(_norm_sq_units(m, alpha, beta), m**4 * (m + 1) ** 4)


def branch_lower_bound(m: int, alpha: int) -> float:
    """Analytic lower bound on ||psp(v_0)|| as a function of alpha alone.

    Valid for m >= 6 under the normalization alpha <= m^2/2 (replace s by -s
    otherwise).  For alpha below m^2/4 the v_0 component of psp(v_0) is
    bounded below by (m^2-4m-2)/4 * delta_p; from m^2/4 on, the component in
    span(v_1..v_{2m+1}) is bounded below by sqrt(2m+1) * 2*alpha/(m^2(m+1)^2).
    Returns a float (the second branch is irrational); certificate
    comparisons never use it.
    """
    if m < ANALYTIC_MIN_M:
        raise ValueError("the analytic bound assumes m >= %d" % ANALYTIC_MIN_M)
    if not 0 <= 2 * alpha <= m * m:
        raise ValueError("alpha=%d outside the normalized range [0, m^2/2]" % alpha)
    delta = 2.0 / (m + 1) ** 2
    if 4 * alpha < m * m:
        return (m * m - 4 * m - 2) / 4.0 * delta
    return math.sqrt(2 * m + 1) * 2.0 * alpha / (m * m * float(m + 1) ** 2)


def branch_bound_overall(m: int) -> float:
    """The alpha-independent form of the analytic bound:
    (delta_p/4) * min(m^2 - 4m - 2, sqrt(2m+1))."""
    if m < ANALYTIC_MIN_M:
        raise ValueError("the analytic bound assumes m >= %d" % ANALYTIC_MIN_M)
    delta = 2.0 / (m + 1) ** 2
    return delta / 4.0 * min(float(m * m - 4 * m - 2), math.sqrt(2 * m + 1))


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of the exhaustive (alpha, beta) scan for one m.

    ``verdict`` is FALSIFIES_A exactly when min_norm_sq > (2*delta_p)^2 as
    rationals: the exact minimum of ||psp(v_0)|| over all diagonal
    symmetries beats the conjectured 2*delta_p ceiling.  ``branch_bound`` is
    the weaker analytic bound for reference (None below m=6, where it is not
    claimed).  ``argmin`` is the lexicographically smallest minimizing cell.
    """

    m: int
    delta_p: Fraction
    two_delta_p: Fraction
    min_norm_sq: Fraction
    argmin: tuple[int, int]
    branch_bound: float | None
    verdict: str

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "delta_p": rational_to_str(self.delta_p),
            "delta_p_decimal": float(self.delta_p),
            "two_delta_p": rational_to_str(self.two_delta_p),
            "two_delta_p_decimal": float(self.two_delta_p),
            "min_norm_sq": rational_to_str(self.min_norm_sq),
            "min_norm_sq_decimal": float(self.min_norm_sq),
            "min_norm_decimal": math.sqrt(float(self.min_norm_sq)),
            "argmin_alpha": self.argmin[0],
            "argmin_beta": self.argmin[1],
            "branch_bound": self.branch_bound,
            "verdict": self.verdict,
        }


def _lattice_min(m: int, alpha_lo: int, alpha_hi: int) -> tuple[int, int, int]:
    """Minimum of the integer norm units over alpha in [alpha_lo, alpha_hi).

    Returns (units, alpha, beta); tuple order gives the value-then-lex
    minimum, so reduction over chunks is associative and deterministic.
    """
    best: tuple[int, int, int] | None = None
    for alpha in range(alpha_lo, alpha_hi):
        for beta in range(0, 2 * m + 2):
            cell = (_norm_sq_units(m, alpha, beta), alpha, beta)
            if best is None or cell < best:
                best = cell
    if best is None:
        raise ValueError("empty alpha range [%d, %d)" % (alpha_lo, alpha_hi))
    return best


def min_over_symmetries_v0(m: int, workers: int = 1) -> CertificateReport:
    """Exact minimum of ||psp(v_0)||^2 over every diagonal symmetry.

    Scans the full (alpha, beta) lattice -- an exhaustive certificate over
    all 2^n symmetries, since the norm depends on s only through the counts
    and the c/d signs are irrelevant.  Ties resolve to the lexicographically
    smallest (alpha, beta).  With workers > 1 the alpha range is partitioned
    across processes; the min-reduce is associative, so the report is
    independent of the partitioning.
    """
    _check_m(m)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    n_alpha = m * m + 1
    if workers == 1 or n_alpha < 2 * workers:
        best = _lattice_min(m, 0, n_alpha)
    else:
        bounds = [round(i * n_alpha / workers) for i in range(workers + 1)]
        chunks = [(m, lo, hi) for lo, hi in zip(bounds, bounds[1:]) if lo < hi]
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            best = min(pool.map(_lattice_min_star, chunks))

    units, alpha, beta = best
    min_norm_sq = Fraction(units, m**4 * (m + 1) ** 4)
    delta = delta_p_exact(m)
    verdict = FALSIFIES_A if min_norm_sq > 4 * delta * delta else INCONCLUSIVE
    return CertificateReport(
        m=m,
        delta_p=delta,
        two_delta_p=2 * delta,
        min_norm_sq=min_norm_sq,
        argmin=(alpha, beta),
        branch_bound=branch_bound_overall(m) if m >= ANALYTIC_MIN_M else None,
        verdict=verdict,
    )


def _lattice_min_star(args: tuple[int, int, int]) -> tuple[int, int, int]:
    return _lattice_min(*args)


# -- bridges to the floating-point side ----------------------------------------


def float_frame(m: int) -> OrthonormalFrame:
    """The exact frame rounded to floats, as a dense (2m+2) x dim frame."""
    f = _cached_frame(m)
    rows = np.zeros((f.rank, f.n))
    for k, row in enumerate(f.rows):
        for pos, val in row.items():
            rows[k, pos] = float(val)
    return OrthonormalFrame(rows)


def float_projection(m: int) -> Projection:
    """The construction as a floating-point Projection."""
    return Projection(float_frame(m))


def profile_symmetry(m: int, prof: SignProfile, cd_signs=None) -> Symmetry:
    """Extend a SignProfile to a full diagonal symmetry.

    ``cd_signs`` fills the c and d blocks (defaults to all +1; psp(v_0) does
    not depend on it).
    """
    prof.validate(m)
    sizes = block_sizes(m)
    tail = sizes["c"] + sizes["d"]
    if cd_signs is None:
        cd = np.ones(tail, dtype=np.int64)
    else:
        cd = np.asarray(cd_signs, dtype=np.int64)
        if cd.shape != (tail,):
            raise ValueError("cd_signs must have length %d" % tail)
    signs = np.concatenate(
        [np.asarray(prof.eps, dtype=np.int64), np.asarray(prof.eps_prime, dtype=np.int64), cd]
    )
    return Symmetry(signs)
