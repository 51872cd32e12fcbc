"""Core undistillability functionals over rank-constrained matrices.

Everything here revolves around the subset-sum functional

    q(X, beta) = sum_S beta^|S| * ||Tr_S(X)||_F^2

over matrices with an N-fold composite index structure, its bilinear
polarization, the rank-two reduction to the scalar triple (P, Q, R), and the
direct operator-sandwich evaluator used as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionLimitError, ShapeError
from .linalg import (
    DEFAULT_DIM_CAP,
    ComplexMatrix,
    MultipartiteState,
    SubsystemPermutation,
    kron,
    partial_trace,
    permute_subsystems,
)
from .states import WernerParams, werner_partial_transpose

# Subset enumeration is exponential in the number of copy slots.
MAX_SUBSET_SLOTS = 12


@dataclass(frozen=True)
class SubsystemSet:
    """Subset of copy slots {0..n-1} stored as a bitmask (bit i = slot i)."""

    mask: int
    n: int

    def __post_init__(self):
        mask = int(self.mask)
        n = int(self.n)
        if not 0 < n <= 20:
            raise ShapeError(f"slot count must lie in 1..20, got {n}")
        if not 0 <= mask < (1 << n):
            raise ShapeError(f"mask {mask} out of range for {n} slots")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "n", n)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def slots(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def __iter__(self):
        return iter(self.slots())


@dataclass(frozen=True)
class RankTwoFactors:
    """Singular-value parameterization of a unit-norm rank-<=2 matrix.

    The matrix is ``sigma1 * outer(u1, conj(v1)) + sigma2 * outer(u2, conj(v2))``
    with sigma1^2 + sigma2^2 == 1, unit-norm vectors, and <u1,u2> = <v1,v2> = 0.
    """

    sigma1: float
    sigma2: float
    u1: np.ndarray
    v1: np.ndarray
    u2: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        s1 = float(self.sigma1)
        s2 = float(self.sigma2)
        vecs = {}
        length = None
        for name in ("u1", "v1", "u2", "v2"):
            vec = np.array(getattr(self, name), dtype=np.complex128, copy=True).reshape(-1)
            if length is None:
                length = vec.size
            elif vec.size != length:
                raise ShapeError("all four factor vectors must share one length")
            vec.setflags(write=False)
            vecs[name] = vec
        if s1 < 0 or s2 < 0:
            raise ShapeError(f"singular values must be nonnegative, got {s1}, {s2}")
        if abs(s1 * s1 + s2 * s2 - 1.0) > 1e-12:
            raise ShapeError(f"sigma1^2 + sigma2^2 must be 1 within 1e-12, got {s1 * s1 + s2 * s2!r}")
        for name, vec in vecs.items():
            nrm = float(np.linalg.norm(vec))
            if abs(nrm - 1.0) > 1e-12:
                raise ShapeError(f"{name} must be unit norm within 1e-12, got {nrm!r}")
        if abs(np.vdot(vecs["u1"], vecs["u2"])) > 1e-10:
            raise ShapeError("u1 and u2 must be orthogonal within 1e-10")
        if abs(np.vdot(vecs["v1"], vecs["v2"])) > 1e-10:
            raise ShapeError("v1 and v2 must be orthogonal within 1e-10")
        object.__setattr__(self, "sigma1", s1)
        object.__setattr__(self, "sigma2", s2)
        for name, vec in vecs.items():
            object.__setattr__(self, name, vec)

    @property
    def dim(self) -> int:
        return self.u1.size

    def assemble(self) -> np.ndarray:
        """Dense matrix sigma1*u1 v1^dag + sigma2*u2 v2^dag."""
        return self.sigma1 * np.outer(self.u1, self.v1.conj()) + self.sigma2 * np.outer(
            self.u2, self.v2.conj()
        )

    def to_matrix(self, dims) -> ComplexMatrix:
        dims = tuple(int(d) for d in dims)
        if math.prod(dims) != self.dim:
            raise ShapeError(f"dims {dims} do not multiply to vector length {self.dim}")
        return ComplexMatrix(self.assemble(), dims, dims)

    @staticmethod
    def from_matrix(x: np.ndarray) -> "RankTwoFactors":
        """Canonical factors of a unit-Frobenius rank-<=2 matrix via SVD."""
        u, s, vh = np.linalg.svd(np.asarray(x, dtype=np.complex128))
        if s.size > 2 and s[2] > 1e-10 * s[0]:
            raise ShapeError(f"matrix rank exceeds 2 (third singular value {s[2]:.3e})")
        if s.size < 2:
            raise ShapeError("matrix must be at least 2x2")
        return RankTwoFactors(
            sigma1=float(s[0]),
            sigma2=float(s[1]),
            u1=u[:, 0],
            v1=vh[0].conj(),
            u2=u[:, 1],
            v2=vh[1].conj(),
        )


def random_rank_two(
    rng: np.random.Generator, dim: int, ensemble: str = "haar-frames"
) -> RankTwoFactors:
    """Sample unit-norm rank-<=2 factors.

    ``haar-frames``: orthonormal pairs from QR of complex Gaussians plus a
    uniform singular angle.  ``gaussian``: assemble two raw Gaussian outer
    products, normalize, and refactor via SVD; this ensemble weights the
    singular spectrum differently.  Both are offered because no canonical
    search measure exists for counterexample hunting.
    """
    dim = int(dim)
    if ensemble == "haar-frames":
        qu = np.linalg.qr(_complex_normal(rng, (dim, 2)))[0]
        qv = np.linalg.qr(_complex_normal(rng, (dim, 2)))[0]
        angle = rng.uniform(0.0, math.pi / 2.0)
        return RankTwoFactors(
            sigma1=math.cos(angle),
            sigma2=math.sin(angle),
            u1=qu[:, 0],
            v1=qv[:, 0],
            u2=qu[:, 1],
            v2=qv[:, 1],
        )
    if ensemble == "gaussian":
        x = np.outer(_complex_normal(rng, (dim,)), _complex_normal(rng, (dim,)).conj())
        x = x + np.outer(_complex_normal(rng, (dim,)), _complex_normal(rng, (dim,)).conj())
        return RankTwoFactors.from_matrix(x / np.linalg.norm(x))
    raise ValueError(f"unknown ensemble {ensemble!r}")


def q_functional(x: ComplexMatrix, beta: float) -> float:
    """Subset sum ``sum_S beta^|S| ||Tr_S(x)||_F^2`` over all 2^N slot subsets.

    The empty subset contributes ``||x||_F^2``; the full subset ``|tr x|^2``.
    Subsets are enumerated in increasing bitmask order, and each multi-slot
    trace is taken as iterated single-slot partial traces in ascending order.
    """
    _require_square_slots(x)
    n = len(x.row_dims)
    beta = float(beta)
    total = 0.0
    for mask in range(1 << n):
        sub = SubsystemSet(mask, n)
        traced = _trace_slots(x, sub.slots())
        total += beta**sub.size * float(np.vdot(traced.data, traced.data).real)
    return total


def q_functional_unnormalized(x: ComplexMatrix, beta: float) -> float:
    """Scale-free variant dividing by ``||x||_F^2``.

    Every subset term is quadratic in the entries of ``x`` (a partial trace
    is linear and the Frobenius norm squares it), so the functional is
    homogeneous of degree two and this single division undoes any scaling;
    in particular the full-trace term ``|tr x|^2`` needs no separate
    bookkeeping.
    """
    nrm2 = float(np.vdot(x.data, x.data).real)
    if nrm2 == 0.0:
        raise ShapeError("cannot normalize the zero matrix")
    return q_functional(x, beta) / nrm2


def f_bilinear(x: ComplexMatrix, y: ComplexMatrix, beta: float) -> complex:
    """Polarized form ``sum_S beta^|S| tr[Tr_S(x)^dag Tr_S(y)]``.

    Conjugate-symmetric and antilinear in the first argument;
    ``f_bilinear(x, x, beta) == q_functional(x, beta)``.
    """
    _require_square_slots(x)
    _require_square_slots(y)
    if x.row_dims != y.row_dims:
        raise ShapeError(f"operands carry different slot dims: {x.row_dims} vs {y.row_dims}")
    n = len(x.row_dims)
    beta = float(beta)
    total = 0.0 + 0.0j
    for mask in range(1 << n):
        sub = SubsystemSet(mask, n)
        tx = _trace_slots(x, sub.slots())
        ty = _trace_slots(y, sub.slots())
        total += beta**sub.size * np.vdot(tx.data, ty.data)
    return complex(total)


def pqr(rt: RankTwoFactors, d: int) -> tuple[float, float, float]:
    """Scalar reduction of the two-slot functional at the rank-two point.

    With U_i, V_i the d x d coefficient matrices of the factor vectors,

        P = tr(U1' V1 V1' U1) + tr(V1 U1' U1 V1') - |tr(U1 V1')|^2 / 2

    (primes denoting conjugate transpose), Q the same with index 2, and R the
    real cross term.  The quadratic form sigma1^2 P + sigma2^2 Q +
    sigma1 sigma2 R reproduces ||Tr_1(X)||^2 + ||Tr_2(X)||^2 - |tr X|^2/2 for
    the assembled matrix X.
    """
    d = int(d)
    if rt.dim != d * d:
        raise ShapeError(f"factor vectors of length {rt.dim} do not reshape to {d}x{d}")
    u1 = rt.u1.reshape(d, d)
    v1 = rt.v1.reshape(d, d)
    u2 = rt.u2.reshape(d, d)
    v2 = rt.v2.reshape(d, d)

    def diag_part(u, v):
        a = np.trace(u.conj().T @ v @ v.conj().T @ u).real
        b = np.trace(v @ u.conj().T @ u @ v.conj().T).real
        t = np.trace(u @ v.conj().T)
        return float(a + b - abs(t) ** 2 / 2.0)

    p = diag_part(u1, v1)
    q = diag_part(u2, v2)
    cross = (
        np.trace(v1 @ u1.conj().T @ u2 @ v2.conj().T)
        + np.trace(u1.conj().T @ v1 @ v2.conj().T @ u2)
        - np.conj(np.trace(u1 @ v1.conj().T)) * np.trace(u2 @ v2.conj().T) / 2.0
    )
    r = float(2.0 * cross.real)
    return p, q, r


def check_rank2_inequality(
    rt: RankTwoFactors, d: int, beta: float = -0.5
) -> tuple[bool, float]:
    """Evaluate the discriminant condition R^2 <= 4(2-P)(2-Q) at one point.

    Returns ``(holds, slack)`` with ``slack = R^2 - 4(2-P)(2-Q)``; negative
    slack means the quadratic form stays below its ceiling for every singular
    angle, equivalently the functional is nonnegative on the whole rank-two
    circle through the factors.  At the default beta the scalars come from
    the explicit trace formulas; for other beta they are derived from the
    polarized functional, which reduces to the same triple at -1/2.
    """
    beta = float(beta)
    if beta == -0.5:
        p, q, r = pqr(rt, d)
    else:
        d = int(d)
        if rt.dim != d * d:
            raise ShapeError(f"factor vectors of length {rt.dim} do not reshape to {d}x{d}")
        dims = (d, d)
        x1 = ComplexMatrix(np.outer(rt.u1, rt.v1.conj()), dims, dims)
        x2 = ComplexMatrix(np.outer(rt.u2, rt.v2.conj()), dims, dims)
        f11 = f_bilinear(x1, x1, beta).real
        f22 = f_bilinear(x2, x2, beta).real
        f12 = f_bilinear(x1, x2, beta).real
        p = 2.0 * (1.0 - f11)
        q = 2.0 * (1.0 - f22)
        r = -4.0 * f12
    slack = r * r - 4.0 * (2.0 - p) * (2.0 - q)
    return slack <= 0.0, float(slack)


def m_n_permutation(n: int) -> tuple[int, ...]:
    """Slot relabeling A1 B1 ... An Bn -> A1 ... An B1 ... Bn (scatter form)."""
    n = int(n)
    if n < 1:
        raise ShapeError(f"copy count must be >= 1, got {n}")
    perm = [0] * (2 * n)
    for j in range(n):
        perm[2 * j] = j
        perm[2 * j + 1] = n + j
    return tuple(perm)


def merge_operator(params: WernerParams, n: int, dim_cap: int = DEFAULT_DIM_CAP) -> ComplexMatrix:
    """The n-fold partial-transposed Werner tensor power, conjugated by the
    copy-merging permutation so A slots precede B slots."""
    n = int(n)
    d = params.d
    if d ** (2 * n) > dim_cap:
        raise DimensionLimitError(
            f"operator side {d ** (2 * n)} exceeds per-side cap {dim_cap}"
        )
    single = werner_partial_transpose(params)
    op = single
    for _ in range(n - 1):
        op = kron(op, single, dim_cap=dim_cap)
    perm = SubsystemPermutation(m_n_permutation(n), (d,) * (2 * n))
    return permute_subsystems(op, perm)


def sandwich_evaluator(
    psi: MultipartiteState,
    params: WernerParams,
    n: int,
    dim_cap: int = DEFAULT_DIM_CAP,
) -> float:
    """Quadratic form of the merged Werner tensor power on a 2n-part state.

    For a state whose coefficient matrix is X this equals
    ``q_functional(X, beta) / (d^2 + beta*d)^n``.
    """
    n = int(n)
    d = params.d
    if psi.dims != (d,) * (2 * n):
        raise ShapeError(f"state dims {psi.dims} do not match {2 * n} slots of dim {d}")
    op = merge_operator(params, n, dim_cap=dim_cap)
    vec = psi.amplitudes
    return float(np.vdot(vec, op.data @ vec).real)


def _require_square_slots(x: ComplexMatrix):
    if not x.is_square_composite():
        raise ShapeError(
            f"expected row_dims == col_dims, got {x.row_dims} vs {x.col_dims}"
        )
    if len(x.row_dims) > MAX_SUBSET_SLOTS:
        raise DimensionLimitError(
            f"{len(x.row_dims)} slots exceed the subset-enumeration cap {MAX_SUBSET_SLOTS}"
        )


def _trace_slots(x: ComplexMatrix, slots: tuple[int, ...]) -> ComplexMatrix:
    out = x
    for removed, slot in enumerate(sorted(slots)):
        out = partial_trace(out, [slot - removed])
    return out


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
