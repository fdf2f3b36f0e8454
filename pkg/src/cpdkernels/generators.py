"""Seeded random instances for every class the library reasons about.

Reproducibility contract: every draw comes from a PCG64 generator seeded with
``SeedSequence(entropy=cfg.seed, spawn_key=(purpose, detail...))``, where the
purpose is a module-level constant per generator and the detail indexes
elements, summands, or rejection attempts.  Identical configurations
therefore produce bit-identical output on any platform with the same
floating-point semantics, and drawing one class never shifts the stream of
another.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement, ModuleElement, adjoint
from .decomposition import decompose_cpd, majorized_kernel
from .embedding import CStarMetric, distance_matrix_from_points, scalar_metric
from .kernels import (
    IndexSet,
    Kernel,
    is_conditionally_positive_definite,
    kernel_norm,
    scalar_kernel,
)

__all__ = [
    "GenConfig",
    "FIXTURE_NAMES",
    "random_gram_kernel",
    "random_cpd_kernel",
    "random_hermitian_kernel",
    "random_non_cpd_kernel",
    "random_metric",
    "random_module_element",
    "random_positive_two_by_two",
    "random_majorized_pair",
    "fixture",
]

_GRAM = 1
_CPD_MIX = 2
_CPD_DIAG = 3
_HERMITIAN = 4
_METRIC_FRAME = 5
_METRIC_CORES = 6
_MODULE = 7
_LANCE = 8
_CONTRACTION = 9

_REJECTION_MARGIN = 1e-6
_MAX_ATTEMPTS = 64


@dataclass(frozen=True)
class GenConfig:
    """Deterministic description of a random instance.

    ``rank`` steers the factor width where a class has one (module element
    rows, family count of the diagonal-zero class); ``None`` means the
    summand dimension.  ``magnitude`` scales all Gaussian draws.
    """

    seed: int
    n: int
    descriptor: AlgebraDescriptor
    rank: int | None = None
    magnitude: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("set size must be at least 1")
        if self.rank is not None and self.rank < 1:
            raise ValueError("rank must be at least 1 when given")
        if not self.magnitude >= 0.0:
            raise ValueError("magnitude must be a nonnegative real")


def _rng(cfg: GenConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=cfg.seed, spawn_key=key)
    )


def _labels(n: int) -> list[str]:
    return [f"s{i + 1}" for i in range(n)]


def _complex_matrix(rng, rows: int, cols: int, magnitude: float) -> np.ndarray:
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return magnitude / np.sqrt(2.0) * (re + 1j * im)


def _random_element(rng, desc: AlgebraDescriptor, magnitude: float) -> AlgebraElement:
    return AlgebraElement(
        desc, [_complex_matrix(rng, d, d, magnitude) for d in desc.summand_dims]
    )


def random_module_element(cfg: GenConfig, index: int = 0) -> ModuleElement:
    """The ``index``-th module point of the configuration's stream; elements
    of the same configuration share ranks and can be combined."""
    rng = _rng(cfg, _MODULE, index)
    dims = cfg.descriptor.summand_dims
    ranks = [cfg.rank if cfg.rank is not None else d for d in dims]
    blocks = [
        _complex_matrix(rng, r, d, cfg.magnitude) for r, d in zip(ranks, dims)
    ]
    return ModuleElement(cfg.descriptor, ranks, blocks)


def random_gram_kernel(cfg: GenConfig) -> Kernel:
    """Kernel ``L(s,t) = g(s)* g(t)`` from random algebra elements ``g``;
    positive definite by construction."""
    rng = _rng(cfg, _GRAM)
    g = [_random_element(rng, cfg.descriptor, cfg.magnitude) for _ in range(cfg.n)]
    values = [[adjoint(gi) @ gj for gj in g] for gi in g]
    return Kernel(IndexSet(_labels(cfg.n)), cfg.descriptor, values)


def random_cpd_kernel(cfg: GenConfig, diagonal_zero: bool = False) -> Kernel:
    """A conditionally positive definite kernel.

    Default shape is ``alpha * g(s)*g(t) + c(s) + c(t)*`` with a random
    positive weight, a Gram part, and a random affine part.  With
    ``diagonal_zero`` the output is instead ``-sum_k |a_k(s) - a_k(t)|^2``
    over ``rank`` random self-adjoint families (default 2), which has
    self-adjoint entries and an exactly zero diagonal.

    The self-adjoint families are drawn from one commuting family per
    summand (a fixed random unitary conjugating real diagonals).  This is
    essential, not a convenience: for noncommuting ``a_k`` the squared
    difference table can fail conditional positivity outright (with
    ``a in {E_11, E_12, 0}`` over ``M_2`` the base-point shift is the swap
    operator plus a rank-one term, which has a unit negative eigenvalue),
    while for a commuting self-adjoint family the table scalarizes
    coordinatewise and conditional positivity is automatic.
    """
    labels = IndexSet(_labels(cfg.n))
    if diagonal_zero:
        rng = _rng(cfg, _CPD_DIAG)
        q = cfg.rank if cfg.rank is not None else 2
        dims = cfg.descriptor.summand_dims
        frames = [
            np.linalg.qr(_complex_matrix(rng, d, d, 1.0))[0] for d in dims
        ]
        fams = []
        for _ in range(q):
            fam = []
            for _ in range(cfg.n):
                blocks = [
                    p.conj().T
                    @ np.diag(cfg.magnitude * rng.standard_normal(d))
                    @ p
                    for d, p in zip(dims, frames)
                ]
                fam.append(AlgebraElement(cfg.descriptor, blocks))
            fams.append(fam)
        zero = AlgebraElement.zero(cfg.descriptor)
        values = []
        for i in range(cfg.n):
            row = []
            for j in range(cfg.n):
                acc = zero
                for fam in fams:
                    delta = fam[i] - fam[j]
                    acc = acc - adjoint(delta) @ delta
                row.append(acc)
            values.append(row)
        return Kernel(labels, cfg.descriptor, values)
    rng = _rng(cfg, _CPD_MIX)
    alpha = 0.5 + rng.uniform()
    g = [_random_element(rng, cfg.descriptor, cfg.magnitude) for _ in range(cfg.n)]
    c = [_random_element(rng, cfg.descriptor, cfg.magnitude) for _ in range(cfg.n)]
    values = [
        [alpha * (adjoint(g[i]) @ g[j]) + c[i] + adjoint(c[j]) for j in range(cfg.n)]
        for i in range(cfg.n)
    ]
    return Kernel(labels, cfg.descriptor, values)


def random_hermitian_kernel(cfg: GenConfig, detail: int = 0) -> Kernel:
    """A hermitian kernel with no positivity arranged; for ``n >= 2`` it is
    almost surely not conditionally positive definite."""
    rng = _rng(cfg, _HERMITIAN, detail)
    n = cfg.n
    table = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            x = _random_element(rng, cfg.descriptor, cfg.magnitude)
            if i == j:
                table[i][i] = 0.5 * (x + adjoint(x))
            else:
                table[i][j] = x
                table[j][i] = adjoint(x)
    return Kernel(IndexSet(_labels(n)), cfg.descriptor, table)


def random_non_cpd_kernel(cfg: GenConfig) -> Kernel:
    """A hermitian kernel certified to fail the conditional positivity check
    with a clear margin, found by rejection: hermitian perturbations are
    added until the check fails decisively."""
    if cfg.n < 2:
        raise ValueError("a non-CPD instance needs at least 2 labels")
    K = random_hermitian_kernel(cfg, 0)
    for attempt in range(1, _MAX_ATTEMPTS + 1):
        verdict = is_conditionally_positive_definite(K)
        if not verdict.holds and verdict.witness is not None:
            if verdict.witness.eigenvalue <= -_REJECTION_MARGIN * max(
                1.0, kernel_norm(K)
            ):
                return K
        K = K + random_hermitian_kernel(cfg, attempt)
    raise RuntimeError("rejection sampling failed to leave the CPD cone")


def random_metric(cfg: GenConfig) -> CStarMetric:
    """A valid, embeddable metric from random module points.

    Points are conjugated diagonals ``x_s = D_s P`` with a fixed random
    unitary frame ``P`` per summand and per-label diagonal cores ``D_s``;
    pairwise differences then lie in one commuting normal family, which
    makes the triangle inequality hold in the cone order and the squared
    metric conditionally negative coordinatewise.  Core draws are rejected
    until all points are separated.
    """
    if cfg.n < 2:
        raise ValueError("a metric needs at least 2 labels")
    if cfg.magnitude <= 0.0:
        raise ValueError("a metric draw needs a positive magnitude")
    dims = cfg.descriptor.summand_dims
    frame_rng = _rng(cfg, _METRIC_FRAME)
    frames = [np.linalg.qr(_complex_matrix(frame_rng, d, d, 1.0))[0] for d in dims]
    for attempt in range(_MAX_ATTEMPTS):
        rng = _rng(cfg, _METRIC_CORES, attempt)
        cores = [
            [
                cfg.magnitude
                / np.sqrt(2.0)
                * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
                for d in dims
            ]
            for _ in range(cfg.n)
        ]
        separated = all(
            max(
                np.max(np.abs(zi - zj))
                for zi, zj in zip(cores[i], cores[j])
            )
            > 1e-6 * cfg.magnitude
            for i in range(cfg.n)
            for j in range(i + 1, cfg.n)
        )
        if not separated:
            continue
        points = {
            label: ModuleElement(
                cfg.descriptor,
                dims,
                [np.diag(z) @ p for z, p in zip(cores[i], frames)],
            )
            for i, label in enumerate(_labels(cfg.n))
        }
        return distance_matrix_from_points(points)
    raise RuntimeError("rejection sampling failed to separate the points")


def random_positive_two_by_two(
    cfg: GenConfig, index: int = 0
) -> tuple[AlgebraElement, AlgebraElement, AlgebraElement]:
    """Blocks ``(P, T, Q)`` of a positive 2x2 block matrix ``[[P, T], [T*, Q]]``
    built as ``G* G`` from a random tall ``G`` and partitioned."""
    rng = _rng(cfg, _LANCE, index)
    dims = cfg.descriptor.summand_dims
    P, T, Q = [], [], []
    for d in dims:
        g = _complex_matrix(rng, 2 * d, 2 * d, cfg.magnitude)
        m = g.conj().T @ g
        P.append(m[:d, :d])
        T.append(m[:d, d:])
        Q.append(m[d:, d:])
    desc = cfg.descriptor
    return (
        AlgebraElement(desc, P),
        AlgebraElement(desc, T),
        AlgebraElement(desc, Q),
    )


def random_majorized_pair(cfg: GenConfig) -> tuple[Kernel, Kernel, str]:
    """A pair ``(K, Kp, s0)`` with ``Kp <= K`` by construction.

    ``K`` is a diagonal-zero kernel with self-adjoint entries, and ``Kp``
    is the image of its base-point factorization under a random strict
    contraction, evaluated through the majorization formula.
    """
    if cfg.n < 2:
        raise ValueError("a majorized pair needs at least 2 labels")
    K = random_cpd_kernel(cfg, diagonal_zero=True)
    s0 = K.index_set.labels[-1]
    fact = decompose_cpd(K, s0).factorization
    rng = _rng(cfg, _CONTRACTION)
    operator_blocks = []
    for r in fact.ranks:
        if r == 0:
            operator_blocks.append(np.zeros((0, 0), dtype=np.complex128))
            continue
        gain = rng.uniform(0.2, 0.95)
        m = _complex_matrix(rng, r, r, 1.0)
        c0 = (gain / np.linalg.norm(m, 2)) * m
        operator_blocks.append(c0.conj().T @ c0)
    return K, majorized_kernel(fact, operator_blocks), s0


FIXTURE_NAMES = ("schur-counterexample", "star-metric", "collinear-3", "two-point")


def fixture(name: str):
    """Named exact instances used across the tests and the demo command.

    ``schur-counterexample``
        The scalar kernel ``[[0, -1], [-1, 0]]``: conditionally positive
        definite, yet its entrywise square is not.
    ``star-metric``
        Four points, one center at distance 1 from three leaves that are
        pairwise 2 apart; a valid metric that is not embeddable.
    ``collinear-3``
        Three points on a line at distances (1, 1, 2); embeddable.
    ``two-point``
        Two points at distance 1; embeddable.
    """
    if name == "schur-counterexample":
        return scalar_kernel([[0.0, -1.0], [-1.0, 0.0]], ["s1", "s2"])
    if name == "star-metric":
        return scalar_metric(
            [
                [0.0, 1.0, 1.0, 1.0],
                [1.0, 0.0, 2.0, 2.0],
                [1.0, 2.0, 0.0, 2.0],
                [1.0, 2.0, 2.0, 0.0],
            ],
            ["c", "l1", "l2", "l3"],
        )
    if name == "collinear-3":
        return scalar_metric(
            [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
            ["p1", "p2", "p3"],
        )
    if name == "two-point":
        return scalar_metric([[0.0, 1.0], [1.0, 0.0]], ["p1", "p2"])
    raise ValueError(
        f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
    )
