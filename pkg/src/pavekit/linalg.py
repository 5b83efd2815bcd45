"""Dense real vectors, symmetric matrices, frames, projections, diagonal
symmetries, and the symmetric operator norm.

A projection is represented by an orthonormal frame of its range (rows of an
r x n matrix F), so p = F^T F.  Compressions p s p are evaluated as the small
r x r matrix F S F^T, which has the same operator norm because F^T restricted
to the coordinate space is an isometry onto range(p).  The eigensolver is a
cyclic Jacobi iteration (deterministic, no tuning) with a power-iteration
fallback for large matrices.

All types are immutable after construction and all operations are pure
functions, so values can be shared freely between threads or worker
processes.
"""

from __future__ import annotations

import math

import numpy as np

# 1-d float ndarray; the length is fixed when the array is created.
Vector = np.ndarray

SYMMETRY_TOL = 1e-12        # relative asymmetry accepted at construction
FRAME_GRAM_TOL = 1e-10      # max |<v_i, v_j> - delta_ij| accepted for a frame
JACOBI_MAX_DIM = 256        # Jacobi below this size, power iteration above
JACOBI_FLAT_DIM = 48        # below this, scalar rotations beat numpy overhead
JACOBI_OFF_TOL = 1e-13      # off-diagonal Frobenius target, relative to ||M||_F
JACOBI_MAX_SWEEPS = 60
POWER_RTOL = 1e-12          # relative Rayleigh-quotient tolerance
POWER_MAX_ITER = 100_000


class OperatorNormError(RuntimeError):
    """Eigensolve failed to converge; ``estimate`` carries the last iterate."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


class SymmetricMatrix:
    """Dense real symmetric matrix, symmetrized and validated at construction."""

    __slots__ = ("mat",)

    def __init__(self, mat):
        a = np.array(mat, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix, got shape %s" % (a.shape,))
        if a.size:
            scale = float(np.abs(a).max())
            if scale and float(np.abs(a - a.T).max()) > SYMMETRY_TOL * scale:
                raise ValueError("matrix is not symmetric within tolerance")
        a = (a + a.T) / 2.0
        a.setflags(write=False)
        object.__setattr__(self, "mat", a)

    def __setattr__(self, name, value):
        raise AttributeError("SymmetricMatrix is immutable")

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def to_json_dict(self) -> dict:
        """JSON layout: {"n": n, "entries": n row-major float arrays}."""
        return {"n": self.n, "entries": [list(map(float, r)) for r in self.mat]}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SymmetricMatrix":
        return cls(np.array(doc["entries"], dtype=float).reshape(doc["n"], doc["n"]))

    def __repr__(self) -> str:
        return "SymmetricMatrix(n=%d)" % self.n


class OrthonormalFrame:
    """r orthonormal rows spanning an r-dimensional subspace of R^n."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        a = np.array(rows, dtype=float)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array of rows, got shape %s" % (a.shape,))
        r = a.shape[0]
        if r:
            g = a @ a.T
            if float(np.abs(g - np.eye(r)).max()) > FRAME_GRAM_TOL:
                raise ValueError("rows are not orthonormal within %g" % FRAME_GRAM_TOL)
        a.setflags(write=False)
        object.__setattr__(self, "rows", a)

    def __setattr__(self, name, value):
        raise AttributeError("OrthonormalFrame is immutable")

    @property
    def rank(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def to_json_dict(self) -> dict:
        """JSON layout: {"rank": r, "n": n, "rows": r row-major float arrays}."""
        return {"rank": self.rank, "n": self.n, "rows": [list(map(float, r)) for r in self.rows]}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "OrthonormalFrame":
        rows = np.array(doc["rows"], dtype=float).reshape(doc["rank"], doc["n"])
        return cls(rows)

    def __repr__(self) -> str:
        return "OrthonormalFrame(rank=%d, n=%d)" % (self.rank, self.n)


class Projection:
    """Orthogonal projection given by an orthonormal frame of its range.

    The materialized matrix P = F^T F is automatically symmetric and, because
    the frame Gram matrix is within FRAME_GRAM_TOL of the identity, satisfies
    ||P^2 - P|| <= ||F F^T - I|| at the same tolerance; no separate check is
    needed at construction.
    """

    __slots__ = ("frame",)

    def __init__(self, frame: OrthonormalFrame):
        if not isinstance(frame, OrthonormalFrame):
            raise TypeError("Projection expects an OrthonormalFrame")
        object.__setattr__(self, "frame", frame)

    def __setattr__(self, name, value):
        raise AttributeError("Projection is immutable")

    @property
    def n(self) -> int:
        return self.frame.n

    @property
    def rank(self) -> int:
        return self.frame.rank

    def apply(self, v: Vector) -> Vector:
        """p(v) = F^T (F v)."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError("dimension mismatch: vector %s vs n=%d" % (v.shape, self.n))
        f = self.frame.rows
        return f.T @ (f @ v)

    def diagonal(self) -> Vector:
        """The diagonal <p e_i, e_i>, i.e. squared column norms of the frame."""
        return (self.frame.rows ** 2).sum(axis=0)

    def __repr__(self) -> str:
        return "Projection(rank=%d, n=%d)" % (self.rank, self.n)


class Symmetry:
    """A diagonal +-1 sign vector; the self-adjoint unitary s = q - q_perp."""

    __slots__ = ("signs",)

    def __init__(self, signs):
        a = np.array(signs, dtype=np.int64)
        if a.ndim != 1:
            raise ValueError("signs must be a 1-d sequence")
        if a.size and not np.all(np.abs(a) == 1):
            raise ValueError("every sign must be exactly +1 or -1")
        a.setflags(write=False)
        object.__setattr__(self, "signs", a)

    def __setattr__(self, name, value):
        raise AttributeError("Symmetry is immutable")

    @classmethod
    def identity(cls, n: int) -> "Symmetry":
        return cls(np.ones(n, dtype=np.int64))

    @classmethod
    def from_plus_positions(cls, n: int, positions) -> "Symmetry":
        signs = -np.ones(n, dtype=np.int64)
        signs[list(positions)] = 1
        return cls(signs)

    @property
    def n(self) -> int:
        return self.signs.shape[0]

    def __neg__(self) -> "Symmetry":
        return Symmetry(-self.signs)

    def plus_positions(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.signs > 0)]

    def __repr__(self) -> str:
        return "Symmetry(%s)" % "".join("+" if s > 0 else "-" for s in self.signs)


# -- operations ---------------------------------------------------------------


def gram(frame: OrthonormalFrame) -> SymmetricMatrix:
    """r x r matrix of pairwise inner products of the frame rows."""
    return SymmetricMatrix(frame.rows @ frame.rows.T)


def materialize(p: Projection) -> SymmetricMatrix:
    """The dense n x n matrix P = sum_k v_k v_k^T = F^T F."""
    f = p.frame.rows
    return SymmetricMatrix(f.T @ f)


def compress_psp(p: Projection, s: Symmetry) -> SymmetricMatrix:
    """The r x r compression M = F S F^T with S = diag(signs).

    ||M|| equals ||p s p|| because F^T is an isometry from coordinate space
    onto range(p): p s p = F^T (F S F^T) F.
    """
    if s.n != p.n:
        raise ValueError("dimension mismatch: symmetry n=%d vs projection n=%d" % (s.n, p.n))
    f = p.frame.rows
    return SymmetricMatrix((f * s.signs) @ f.T)


def apply_psp(p: Projection, s: Symmetry, v: Vector) -> Vector:
    """The vector p(s(p(v)))."""
    if s.n != p.n:
        raise ValueError("dimension mismatch: symmetry n=%d vs projection n=%d" % (s.n, p.n))
    return p.apply(s.signs * p.apply(v))


def operator_norm(m: SymmetricMatrix) -> float:
    """Largest absolute eigenvalue of a symmetric matrix.

    Cyclic Jacobi rotations up to JACOBI_MAX_DIM (run until the off-diagonal
    Frobenius mass drops below JACOBI_OFF_TOL * ||M||_F), power iteration on
    M^2 beyond that.  Raises OperatorNormError on non-convergence, carrying
    the last iterate's estimate.
    """
    a = m.mat
    if a.shape[0] == 0:
        return 0.0
    if a.shape[0] == 1:
        return abs(float(a[0, 0]))
    if a.shape[0] <= JACOBI_FLAT_DIM:
        return _jacobi_flat(a)
    if a.shape[0] <= JACOBI_MAX_DIM:
        return _jacobi_spectral_radius(np.array(a))
    return _power_spectral_radius(a)


def _jacobi_flat(mat: np.ndarray) -> float:
    # Same cyclic Jacobi as _jacobi_spectral_radius, on a flat Python list:
    # scalar rotations outrun numpy's per-call overhead on small matrices,
    # which matters inside the 2^(n-1)-step brute-force walk.
    n = mat.shape[0]
    a = [float(x) for x in mat.ravel()]
    fsq = 0.0
    for x in a:
        fsq += x * x
    if fsq == 0.0:
        return 0.0
    target_sq = (JACOBI_OFF_TOL * JACOBI_OFF_TOL) * fsq
    skip_sq = target_sq / float(n**4)
    for _sweep in range(JACOBI_MAX_SWEEPS):
        off_sq = 0.0
        for p in range(n - 1):
            base = p * n
            for q in range(p + 1, n):
                x = a[base + q]
                off_sq += 2.0 * x * x
        if off_sq <= target_sq:
            return max(abs(a[p * n + p]) for p in range(n))
        for p in range(n - 1):
            pn = p * n
            for q in range(p + 1, n):
                apq = a[pn + q]
                if apq * apq <= skip_sq:
                    continue
                qn = q * n
                theta = (a[qn + q] - a[pn + p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    rp = a[pn + k]
                    rq = a[qn + k]
                    a[pn + k] = c * rp - s * rq
                    a[qn + k] = s * rp + c * rq
                for k in range(n):
                    kp = k * n + p
                    kq = k * n + q
                    cp = a[kp]
                    cq = a[kq]
                    a[kp] = c * cp - s * cq
                    a[kq] = s * cp + c * cq
                a[pn + q] = 0.0
                a[qn + p] = 0.0
    raise OperatorNormError(
        "cyclic Jacobi did not converge in %d sweeps" % JACOBI_MAX_SWEEPS,
        max(abs(a[p * n + p]) for p in range(n)),
    )


def _jacobi_spectral_radius(a: np.ndarray) -> float:
    n = a.shape[0]
    fnorm = float(np.linalg.norm(a))
    if fnorm == 0.0:
        return 0.0
    target = JACOBI_OFF_TOL * fnorm
    skip = target / (n * n)
    for _sweep in range(JACOBI_MAX_SWEEPS):
        # Measure the off-diagonal mass directly; subtracting the diagonal
        # mass from the total cancels catastrophically near convergence.
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        off_sq = float((off * off).sum())
        if off_sq <= target * target:
            return float(np.abs(np.diag(a)).max())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = 0.0
                a[q, p] = 0.0
    raise OperatorNormError(
        "cyclic Jacobi did not converge in %d sweeps" % JACOBI_MAX_SWEEPS,
        float(np.abs(np.diag(a)).max()),
    )


def _power_spectral_radius(a: np.ndarray) -> float:
    # Power iteration on M^2 so the dominant eigenvalue is nonnegative even
    # when the extreme eigenvalue of M is negative.  Fixed internal seed: the
    # start vector must not vary between runs.
    rng = np.random.Generator(np.random.PCG64(0x9E3779B9))
    x = rng.standard_normal(a.shape[0])
    x /= np.linalg.norm(x)
    lam = float(np.dot(a @ x, a @ x))
    for _ in range(POWER_MAX_ITER):
        y = a @ (a @ x)
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            return 0.0
        x = y / ny
        lam_new = float(np.dot(a @ x, a @ x))
        if abs(lam_new - lam) <= POWER_RTOL * max(lam_new, 1e-300):
            return math.sqrt(lam_new)
        lam = lam_new
    raise OperatorNormError(
        "power iteration did not converge in %d iterations" % POWER_MAX_ITER,
        math.sqrt(max(lam, 0.0)),
    )


def random_projection(n: int, r: int, seed: int) -> Projection:
    """Random rank-r projection of R^n from a pinned deterministic generator.

    Draws an (r, n) block of standard Gaussians from
    ``numpy.random.Generator(PCG64(seed)).standard_normal`` and orthonormalizes
    the rows by modified Gram-Schmidt with one reorthogonalization pass.  Same
    seed, numpy version, and platform give a bitwise-identical frame.  A
    rank-deficient draw (probability ~0) is retried on the continuation of
    the same stream.
    """
    if not 0 <= r <= n:
        raise ValueError("need 0 <= rank <= n, got rank=%d, n=%d" % (r, n))
    if r == 0:
        return Projection(OrthonormalFrame(np.zeros((0, n))))
    rng = np.random.Generator(np.random.PCG64(seed))
    for _attempt in range(32):
        x = rng.standard_normal((r, n))
        q = _orthonormalize_rows(x)
        if q is not None:
            return Projection(OrthonormalFrame(q))
    raise RuntimeError("could not draw a rank-%d frame in 32 attempts" % r)


def _orthonormalize_rows(x: np.ndarray) -> np.ndarray | None:
    r = x.shape[0]
    q = np.array(x, dtype=float)
    for i in range(r):
        v = q[i]
        for _pass in range(2):
            for j in range(i):
                v -= (q[j] @ v) * q[j]
        nv = float(np.linalg.norm(v))
        if nv <= 1e-8 * float(np.linalg.norm(x[i])):
            return None
        q[i] = v / nv
    return q
