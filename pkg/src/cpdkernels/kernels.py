"""Operator-valued kernels on a finite labeled set and their positivity tests.

A kernel assigns an algebra element to every ordered pair of labels.  Positive
definiteness is decided by assembling, per summand, the big block matrix
``G[(i,j)] = K(s_i, s_j)`` and eigen-testing it; conditional positive
definiteness restricts the quadratic form to coefficient tuples summing to
zero and is decided by compressing ``G`` with the difference basis
``T = [(e_1 - e_n) (x) I_d | ... | (e_{n-1} - e_n) (x) I_d]``.

Reduction from algebra coefficients to vectors (why the compression decides
the algebra-level condition): if ``T* G T`` is positive semidefinite then for
any algebra coefficients ``a_i`` with ``sum a_i = 0``, eliminating
``a_n = -(a_1 + ... + a_{n-1})`` turns ``sum a_i* G_ij a_j`` into the same
quadratic form over the shifted matrix, which is nonnegative because a
positive block matrix ``B`` satisfies ``sum b_i* B_ij b_j >= 0`` for all
algebra coefficients.  Conversely, given column vectors ``x_i`` with
``sum x_i = 0`` and a unit vector ``xi``, the rank-one coefficients
``a_i = x_i xi*`` sum to zero and give
``sum a_i* G_ij a_j = (x* G x) xi xi*``, so nonnegativity over algebra
coefficients forces ``x* G x >= 0`` for every zero-sum vector tuple, i.e.
``T* G T >= 0``.  The two conditions are therefore equivalent.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraDescriptor,
    AlgebraElement,
    DimensionMismatch,
    ToleranceConfig,
    adjoint,
    _spec_norm,
    leq,
    op_norm,
    re_part,
)

__all__ = [
    "IndexSet",
    "Kernel",
    "Verdict",
    "Witness",
    "NotHermitian",
    "UnknownLabel",
    "scalar_kernel",
    "kernel_norm",
    "assemble_gram",
    "is_positive_definite",
    "is_conditionally_positive_definite",
    "shift_transform",
    "recover_affine_part",
    "cond_positive_matrix_check",
    "two_by_two_check",
    "schur_product",
    "cauchy_schwarz_cpd_check",
    "cauchy_schwarz_pd_check",
]


class NotHermitian(ValueError):
    """Raised when a decision procedure receives a non-hermitian kernel."""


class UnknownLabel(ValueError):
    """Raised when a label is not a member of the kernel's index set."""


@dataclass(frozen=True)
class IndexSet:
    """Ordered finite set of distinct string labels."""

    labels: tuple[str, ...]

    def __init__(self, labels):
        labels = tuple(str(s) for s in labels)
        if not labels:
            raise ValueError("index set must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be pairwise distinct")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"label {label!r} not in index set") from None

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.labels


@dataclass(frozen=True, eq=False)
class Witness:
    """Certificate of a failed positivity test: a unit vector ``v`` with
    ``v* M v = eigenvalue`` below tolerance for the matrix ``M`` named by the
    operation (an assembled summand matrix, a compressed matrix, or a
    per-pair difference)."""

    summand: int
    eigenvalue: float
    vector: np.ndarray


@dataclass(frozen=True, eq=False)
class Verdict:
    """Outcome of a decision procedure, with a witness when it fails."""

    holds: bool
    witness: Witness | None = None
    context: str | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True, eq=False)
class Kernel:
    """An ``n x n`` table of algebra elements indexed by a labeled set.

    Construction does not enforce hermiticity; a table may be held raw (for
    instance the entrywise product of two kernels over noncommutative
    summands).  Decision procedures reject non-hermitian tables.
    """

    index_set: IndexSet
    descriptor: AlgebraDescriptor
    values: tuple[tuple[AlgebraElement, ...], ...]

    def __init__(self, index_set: IndexSet, descriptor: AlgebraDescriptor, values):
        n = index_set.n
        rows = tuple(tuple(row) for row in values)
        if len(rows) != n or any(len(row) != n for row in rows):
            raise DimensionMismatch(f"kernel table must be {n} x {n}")
        for row in rows:
            for v in row:
                if v.descriptor != descriptor:
                    raise DimensionMismatch("kernel entry has a foreign descriptor")
        object.__setattr__(self, "index_set", index_set)
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "values", rows)

    @property
    def n(self) -> int:
        return self.index_set.n

    def value(self, i: int, j: int) -> AlgebraElement:
        return self.values[i][j]

    def __getitem__(self, pair: tuple[str, str]) -> AlgebraElement:
        s, t = pair
        return self.values[self.index_set.index(s)][self.index_set.index(t)]

    def is_hermitian(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        scale = max(1.0, kernel_norm(self))
        for i in range(self.n):
            for j in range(i, self.n):
                diff = self.values[i][j] - adjoint(self.values[j][i])
                if op_norm(diff) > tol.tol_rel * scale:
                    return False
        return True

    @classmethod
    def zero(cls, index_set: IndexSet, descriptor: AlgebraDescriptor) -> Kernel:
        z = AlgebraElement.zero(descriptor)
        n = index_set.n
        return cls(index_set, descriptor, [[z] * n for _ in range(n)])

    def __add__(self, other: Kernel) -> Kernel:
        self._check_compatible(other)
        return Kernel(
            self.index_set,
            self.descriptor,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.values, other.values)
            ],
        )

    def __sub__(self, other: Kernel) -> Kernel:
        self._check_compatible(other)
        return Kernel(
            self.index_set,
            self.descriptor,
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.values, other.values)
            ],
        )

    def __mul__(self, scalar) -> Kernel:
        return Kernel(
            self.index_set,
            self.descriptor,
            [[scalar * v for v in row] for row in self.values],
        )

    __rmul__ = __mul__

    def _check_compatible(self, other: Kernel) -> None:
        if self.index_set != other.index_set or self.descriptor != other.descriptor:
            raise DimensionMismatch("kernels live on different sets or algebras")


def scalar_kernel(matrix, labels=None) -> Kernel:
    """Kernel over the one-dimensional algebra from a plain ``n x n`` array."""
    mat = np.asarray(matrix, dtype=np.complex128)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise DimensionMismatch("scalar kernel needs a square matrix")
    if labels is None:
        labels = [f"s{i + 1}" for i in range(n)]
    desc = AlgebraDescriptor([1])
    values = [
        [AlgebraElement(desc, [mat[i, j].reshape(1, 1)]) for j in range(n)]
        for i in range(n)
    ]
    return Kernel(IndexSet(labels), desc, values)


def kernel_norm(K: Kernel) -> float:
    """Largest entry C*-norm; the scale used by relative tolerances."""
    return max(op_norm(v) for row in K.values for v in row)


def _pmap(fn, items, threads: int = 1) -> list:
    """Order-preserving map, optionally over a thread pool.

    Reductions downstream consume the results in summand order, so the output
    is identical at any thread count.
    """
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _require_hermitian(K: Kernel, tol: ToleranceConfig) -> None:
    if not K.is_hermitian(tol):
        raise NotHermitian("kernel table is not hermitian at tolerance")


def assemble_gram(K: Kernel, tol: ToleranceConfig = DEFAULT_TOL) -> list[np.ndarray]:
    """Per-summand block matrix: entry block (i, j) is summand k of K(s_i, s_j)."""
    _require_hermitian(K, tol)
    return _assemble_raw(K)


def _assemble_raw(K: Kernel) -> list[np.ndarray]:
    n = K.n
    out = []
    for k, d in enumerate(K.descriptor.summand_dims):
        big = np.empty((n * d, n * d), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                big[i * d : (i + 1) * d, j * d : (j + 1) * d] = K.values[i][j].blocks[k]
        out.append(big)
    return out


def _psd_verdict(mats: list[np.ndarray], tol: ToleranceConfig, threads: int = 1) -> Verdict:
    """PSD test over a family of hermitian matrices, one per summand.

    Fails on the summand with the most negative relative margin, reporting
    that summand's bottom eigenpair.
    """

    def eig(mat):
        if mat.shape[0] == 0:
            return None
        herm = 0.5 * (mat + mat.conj().T)
        w, u = np.linalg.eigh(herm)
        return w, u

    worst = None  # (relative margin, summand, eigenvalue, vector)
    for k, res in enumerate(_pmap(eig, mats, threads)):
        if res is None:
            continue
        w, u = res
        scale = max(1.0, float(np.max(np.abs(w))))
        margin = w[0] / scale
        if worst is None or margin < worst[0]:
            worst = (margin, k, float(w[0]), u[:, 0].copy())
    if worst is not None and worst[0] < -tol.tol_rel:
        _, k, lam, vec = worst
        return Verdict(False, Witness(k, lam, vec))
    return Verdict(True)


def is_positive_definite(
    K: Kernel, tol: ToleranceConfig = DEFAULT_TOL, threads: int = 1
) -> Verdict:
    """Whether every assembled summand matrix is positive semidefinite.

    Equivalent to nonnegativity of ``sum_ij a_i* K(s_i, s_j) a_j`` over all
    algebra coefficient tuples.
    """
    return _psd_verdict(assemble_gram(K, tol), tol, threads)


def _difference_basis(n: int, d: int) -> np.ndarray:
    """Columns span the zero-sum coefficient subspace: group i is
    ``(e_i - e_n) (x) I_d``."""
    T = np.zeros((n * d, (n - 1) * d))
    for i in range(n - 1):
        T[i * d : (i + 1) * d, i * d : (i + 1) * d] = np.eye(d)
        T[(n - 1) * d :, i * d : (i + 1) * d] = -np.eye(d)
    return T


def compressed_gram(K: Kernel, tol: ToleranceConfig = DEFAULT_TOL) -> list[np.ndarray]:
    """Per-summand compression ``T* G T`` onto zero-sum coefficient tuples."""
    _require_hermitian(K, tol)
    n = K.n
    out = []
    for d, G in zip(K.descriptor.summand_dims, _assemble_raw(K)):
        T = _difference_basis(n, d)
        out.append(T.conj().T @ G @ T)
    return out


def is_conditionally_positive_definite(
    K: Kernel, tol: ToleranceConfig = DEFAULT_TOL, threads: int = 1
) -> Verdict:
    """Whether the quadratic form is nonnegative on zero-sum coefficient tuples.

    Decided by the compression ``T* G T`` per summand; the witness vector on
    failure lives in the compressed space.  Requires at least two labels.
    """
    if K.n < 2:
        raise ValueError("conditional positivity needs at least two labels")
    return _psd_verdict(compressed_gram(K, tol), tol, threads)


def shift_transform(K: Kernel, s0: str, tol: ToleranceConfig = DEFAULT_TOL) -> Kernel:
    """Base-point shift ``L(s,t) = (K(s,t) - K(s,s0) - K(s0,t) + K(s0,s0)) / 2``.

    Turns conditional positivity of ``K`` into plain positivity of ``L``;
    hermitian by construction when ``K`` is hermitian.
    """
    i0 = K.index_set.index(s0)
    n = K.n
    base = K.values[i0][i0]
    values = [
        [
            0.5 * (K.values[i][j] - K.values[i][i0] - K.values[i0][j] + base)
            for j in range(n)
        ]
        for i in range(n)
    ]
    return Kernel(K.index_set, K.descriptor, values)


def recover_affine_part(K: Kernel, s0: str) -> dict[str, AlgebraElement]:
    """Map ``h(s) = K(s, s0) - K(s0, s0) / 2``.

    When the shift transform of ``K`` at ``s0`` vanishes, ``K(s,t)`` equals
    ``h(s) + h(t)*``.
    """
    i0 = K.index_set.index(s0)
    half_base = 0.5 * K.values[i0][i0]
    return {
        s: K.values[i][i0] - half_base for i, s in enumerate(K.index_set.labels)
    }


def cond_positive_matrix_check(
    K: Kernel, m: int, tol: ToleranceConfig = DEFAULT_TOL
) -> Verdict:
    """Conditional positivity via the shifted table at row/column ``m``.

    Builds ``[K_ij - K_im - K_mj + K_mm]`` (1-based ``m``) and tests plain
    positive definiteness; the verdict is independent of ``m``.
    """
    if not 1 <= m <= K.n:
        raise ValueError(f"m must be in 1..{K.n}, got {m}")
    i0 = m - 1
    n = K.n
    base = K.values[i0][i0]
    shifted = Kernel(
        K.index_set,
        K.descriptor,
        [
            [
                K.values[i][j] - K.values[i][i0] - K.values[i0][j] + base
                for j in range(n)
            ]
            for i in range(n)
        ],
    )
    return is_positive_definite(shifted, tol)


def two_by_two_check(
    A: AlgebraElement,
    B: AlgebraElement,
    C: AlgebraElement,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    """Conditional positivity of the block matrix [[A, B], [B*, C]]:
    holds iff ``B + B* <= A + C``."""
    return leq(B + adjoint(B), A + C, tol)


def schur_product(K1: Kernel, K2: Kernel) -> Kernel:
    """Entrywise product kernel; each entry is the algebra product.

    The result is guaranteed hermitian only when all summands have size one
    or the entries commute, so the table may come out raw.
    """
    K1._check_compatible(K2)
    return Kernel(
        K1.index_set,
        K1.descriptor,
        [
            [a @ b for a, b in zip(ra, rb)]
            for ra, rb in zip(K1.values, K2.values)
        ],
    )


def _pair_positivity(
    diffs: dict[tuple[str, str], AlgebraElement], tol: ToleranceConfig
) -> Verdict:
    """Positivity of a family of per-pair differences, worst pair reported."""
    worst = None
    for (s, t), diff in diffs.items():
        for k, b in enumerate(diff.blocks):
            if b.shape[0] == 0:
                continue
            if _spec_norm(b - b.conj().T) > tol.tol_rel * max(1.0, _spec_norm(b)):
                return Verdict(
                    False, None, context=f"non-hermitian difference at ({s}, {t})"
                )
            w, u = np.linalg.eigh(0.5 * (b + b.conj().T))
            scale = max(1.0, float(np.max(np.abs(w))))
            margin = w[0] / scale
            if worst is None or margin < worst[0]:
                worst = (margin, k, float(w[0]), u[:, 0].copy(), s, t)
    if worst is not None and worst[0] < -tol.tol_rel:
        _, k, lam, vec, s, t = worst
        return Verdict(False, Witness(k, lam, vec), context=f"pair ({s}, {t})")
    return Verdict(True)


def cauchy_schwarz_cpd_check(K: Kernel, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Necessary inequality for conditional positivity:
    ``2 Re K(s,t) <= K(s,s) + K(t,t)`` for every ordered pair."""
    diffs = {}
    labels = K.index_set.labels
    for i, s in enumerate(labels):
        for j, t in enumerate(labels):
            diffs[(s, t)] = (
                K.values[i][i] + K.values[j][j] - 2.0 * re_part(K.values[i][j])
            )
    return _pair_positivity(diffs, tol)


def cauchy_schwarz_pd_check(L: Kernel, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Necessary inequality for positive definiteness:
    ``L(s,t) L(t,s) <= ||L(t,t)|| L(s,s)`` for every ordered pair."""
    diffs = {}
    labels = L.index_set.labels
    for i, s in enumerate(labels):
        for j, t in enumerate(labels):
            bound = op_norm(L.values[j][j]) * L.values[i][i]
            diffs[(s, t)] = bound - L.values[i][j] @ L.values[j][i]
    return _pair_positivity(diffs, tol)
