"""Product tests and factor extraction for multipartite density matrices.

A state is a product across a bipartition exactly when the realignment of
its bipartite view has rank one. Numerically, "rank one" means
``sigma_2 <= rel_tol * sigma_1``; every report carries the raw singular
values and the ratio ``sigma_2 / sigma_1`` so callers can apply their own
threshold.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matcore
from .errors import DegenerateFactorError, InconsistencyError, NotProduct, NumericalError, PartitionError
from .matcore import DEFAULT_REL_TOL
from .partitions import Partition, coarse_grain_dims, enumerate_bipartitions, one_vs_rest_partitions
from .states import DensityMatrix, inverse_permutation, permute_subsystems, tensor

#: Largest anti-Hermitian / negative-eigenvalue residue silently removed from a factor.
FACTOR_PROJECTION_TOL = 1e-7
#: Below this modulus a factor's trace is treated as zero.
DEGENERATE_TRACE = 1e-12


@dataclass(frozen=True)
class ProductReport:
    """Outcome of a single bipartite product test.

    ``blocks`` is the split in the order it was viewed (first block leads);
    ``partition_tested`` is its canonical form. ``factors`` follow
    ``blocks`` order and are present only for a successful factorization.
    """

    partition_tested: Partition
    blocks: tuple
    is_product: bool
    singular_values: np.ndarray
    rank: int
    ratio: float
    rel_tol: float
    factors: list | None = None
    adjustment: float = 0.0
    reconstruction_error: float | None = None


@dataclass(frozen=True)
class MultipartiteReport:
    """Verdict of a semiproduct / fully-product / k-product test.

    ``reports`` holds the ``i | rest`` tests in terms of the original
    subsystem labels. ``peel_reports`` are the factorization steps that
    produced ``factors``; step ``j`` splits the last (composite) subsystem
    off the state left by step ``j - 1``, and its indices refer to that
    remaining state.
    """

    verdict: bool
    partition: Partition
    reports: list
    factors: list | None = None
    peel_reports: list = field(default_factory=list)


@dataclass(frozen=True)
class FactorizationTree:
    """Finest product partition of a state with one factor per block.

    ``splits`` lists ``(labels, report)`` pairs for every bipartition that
    was tested; the report's indices are positions within ``labels``.
    """

    partition: Partition
    factors: list
    splits: list

    def reconstruct(self) -> DensityMatrix:
        return reconstruct(self.factors, self.partition.blocks)


def _as_blocks(rho: DensityMatrix, split) -> list:
    n = rho.n_subsystems
    blocks = split.blocks if isinstance(split, Partition) else [tuple(int(i) for i in b) for b in split]
    if isinstance(split, Partition) and split.n_subsystems != n:
        raise PartitionError(f"partition is over {split.n_subsystems} subsystems, state has {n}")
    if len(blocks) != 2:
        raise PartitionError(f"expected a bipartition, got {len(blocks)} blocks")
    Partition(blocks, n)  # validates disjointness and coverage
    return [tuple(b) for b in blocks]


def bipartite_view(rho: DensityMatrix, split):
    """Reorder subsystems so the first block leads.

    Parameters
    ----------
    rho : DensityMatrix
    split : Partition or pair of index sequences
        A :class:`Partition` is used in canonical order (block with 1 first);
        a raw pair such as ``[(3,), (1, 2)]`` is used as written.

    Returns
    -------
    matrix : numpy.ndarray
        Density matrix of the reordered state.
    m, n : int
        Total dimensions of the first and second block.
    perm : list of int
        1-based permutation applied (see :func:`permute_subsystems`).
    """
    blocks = _as_blocks(rho, split)
    perm = list(blocks[0]) + list(blocks[1])
    m = math.prod(rho.dims[i - 1] for i in blocks[0])
    n = math.prod(rho.dims[i - 1] for i in blocks[1])
    if perm == sorted(perm):
        return rho.matrix, m, n, perm
    return permute_subsystems(rho, perm).matrix, m, n, perm


def _ratio(s: np.ndarray) -> float:
    if s.size < 2 or s[0] == 0:
        return 0.0
    return float(s[1] / s[0])


def is_product_bipartition(rho: DensityMatrix, split, rel_tol: float = DEFAULT_REL_TOL) -> ProductReport:
    """Decide whether ``rho`` is a product across ``split`` (no factors)."""
    blocks = _as_blocks(rho, split)
    z, m, n, _ = bipartite_view(rho, blocks)
    s = matcore.singular_values(matcore.realign(z, m, n))
    rank = matcore.numerical_rank(s, rel_tol)
    return ProductReport(
        partition_tested=Partition(blocks, rho.n_subsystems),
        blocks=tuple(blocks),
        is_product=rank == 1,
        singular_values=s,
        rank=rank,
        ratio=_ratio(s),
        rel_tol=rel_tol,
    )


def _normalize_factor(x: np.ndarray, dims) -> tuple:
    """Scale ``x`` to unit trace and project out rounding residue."""
    tr = np.trace(x)
    if abs(tr) < DEGENERATE_TRACE:
        raise DegenerateFactorError(f"factor trace {abs(tr):.3e} is numerically zero")
    f = x / tr
    h = matcore.hermitian_part(f)
    w, v = np.linalg.eigh(h)
    if w[0] < 0:
        h = (v * np.clip(w, 0, None)) @ v.conj().T
        h = h / np.trace(h).real
        h = matcore.hermitian_part(h)
    adjustment = matcore.frobenius_norm(h - f)
    if adjustment > FACTOR_PROJECTION_TOL:
        raise NumericalError(f"factor needed a correction of {adjustment:.3e} to become a valid state")
    return DensityMatrix(dims, h), adjustment


def reconstruct(factors: Sequence[DensityMatrix], blocks: Sequence[Sequence[int]]) -> DensityMatrix:
    """Tensor ``factors`` (one per block) and restore ascending subsystem order."""
    perm = [i for b in blocks for i in b]
    joined = tensor(*factors)
    if perm == sorted(perm):
        return joined
    return permute_subsystems(joined, inverse_permutation(perm))


def factorize_bipartition(rho: DensityMatrix, split, rel_tol: float = DEFAULT_REL_TOL) -> ProductReport:
    """Extract the two factor states of a product ``rho``.

    The rank-one term ``X ⊗ Y`` of the operator Schmidt decomposition is
    split into ``X / Tr X`` and ``Y / Tr Y``; dividing by the (complex)
    traces also removes the arbitrary phase the SVD puts on ``X`` and
    ``Y``.

    Raises
    ------
    NotProduct
        If the realigned matrix does not have rank one.
    DegenerateFactorError
        If the rank-one factor has numerically zero trace.
    """
    blocks = _as_blocks(rho, split)
    z, m, n, _ = bipartite_view(rho, blocks)
    res = matcore.svd(matcore.realign(z, m, n))
    s = res.singular_values
    rank = matcore.numerical_rank(s, rel_tol)
    report = ProductReport(
        partition_tested=Partition(blocks, rho.n_subsystems),
        blocks=tuple(blocks),
        is_product=rank == 1,
        singular_values=s,
        rank=rank,
        ratio=_ratio(s),
        rel_tol=rel_tol,
    )
    if rank != 1:
        raise NotProduct(report)
    root = np.sqrt(s[0])
    x = matcore.unvec(root * res.left_vectors[:, 0], m, m)
    y = matcore.unvec(root * res.right_vectors[:, 0].conj(), n, n)
    fa, adj_a = _normalize_factor(x, [rho.dims[i - 1] for i in blocks[0]])
    fb, adj_b = _normalize_factor(y, [rho.dims[i - 1] for i in blocks[1]])
    err = matcore.relative_error(reconstruct([fa, fb], blocks).matrix, rho.matrix)
    return dataclasses.replace(
        report, factors=[fa, fb], adjustment=max(adj_a, adj_b), reconstruction_error=err
    )


def is_semiproduct(rho: DensityMatrix, rel_tol: float = DEFAULT_REL_TOL) -> MultipartiteReport:
    """Product test across every ``i | rest`` split."""
    n = rho.n_subsystems
    reports = [is_product_bipartition(rho, p, rel_tol) for p in one_vs_rest_partitions(n)]
    return MultipartiteReport(
        verdict=all(r.is_product for r in reports),
        partition=Partition([[i] for i in range(1, n + 1)], n),
        reports=reports,
    )


def _peel(rho: DensityMatrix, rel_tol: float) -> tuple:
    """Split off the last subsystem repeatedly; returns (factors, reports)."""
    factors = []
    reports = []
    current = rho
    while current.n_subsystems > 1:
        k = current.n_subsystems
        try:
            rep = factorize_bipartition(current, [tuple(range(1, k)), (k,)], rel_tol)
        except NotProduct as exc:
            raise InconsistencyError(
                f"semiproduct test passed but peeling subsystem {k} failed (ratio {exc.report.ratio:.3e})"
            ) from exc
        reports.append(rep)
        current, last = rep.factors
        factors.append(last)
    factors.append(current)
    return factors[::-1], reports


def is_fully_product(rho: DensityMatrix, rel_tol: float = DEFAULT_REL_TOL) -> MultipartiteReport:
    """Fully-product test; on success also returns one factor per subsystem.

    The verdict comes from the semiproduct test. Factors are then peeled off
    one subsystem at a time, and a peeling failure at the same tolerance is
    reported as :class:`InconsistencyError`.
    """
    semi = is_semiproduct(rho, rel_tol)
    if not semi.verdict:
        return semi
    factors, peel_reports = _peel(rho, rel_tol)
    return dataclasses.replace(semi, factors=factors, peel_reports=peel_reports)


def _lift_report(report: ProductReport, partition: Partition) -> ProductReport:
    """Express a report over composite labels in terms of original labels."""
    def lift(block):
        return tuple(sorted(i for t in block for i in partition.blocks[t - 1]))

    blocks = tuple(lift(b) for b in report.blocks)
    return dataclasses.replace(report, blocks=blocks, partition_tested=Partition(blocks, partition.n_subsystems))


def is_k_product(rho: DensityMatrix, partition: Partition, rel_tol: float = DEFAULT_REL_TOL) -> MultipartiteReport:
    """Decide whether ``rho`` is a product of states on the blocks of ``partition``.

    Each block is merged into one composite subsystem and the semiproduct
    test is run on the resulting k-partite state. On success the factors
    (one per block, in block order) are returned with the block's original
    subsystem dims.
    """
    if partition.n_subsystems != rho.n_subsystems:
        raise PartitionError(f"partition is over {partition.n_subsystems} subsystems, state has {rho.n_subsystems}")
    if partition.k < 2:
        raise PartitionError("a k-product test needs at least two blocks")
    perm = [i for b in partition.blocks for i in b]
    permuted = permute_subsystems(rho, perm) if perm != sorted(perm) else rho
    coarse = DensityMatrix(coarse_grain_dims(rho.dims, partition), permuted.matrix)
    result = is_fully_product(coarse, rel_tol)
    factors = None
    if result.factors is not None:
        factors = [
            DensityMatrix([rho.dims[i - 1] for i in b], f.matrix) for b, f in zip(partition.blocks, result.factors)
        ]
    return MultipartiteReport(
        verdict=result.verdict,
        partition=partition,
        reports=[_lift_report(r, partition) for r in result.reports],
        factors=factors,
        peel_reports=result.peel_reports,
    )


def finest_product_partition(rho: DensityMatrix, rel_tol: float = DEFAULT_REL_TOL) -> FactorizationTree:
    """Split ``rho`` greedily into irreducible tensor factors.

    Bipartitions are tried in :func:`enumerate_bipartitions` order; the
    first product split is factorized and both halves are processed
    recursively. A state with no product bipartition is a single block.
    """
    splits: list = []
    leaves = _finest(rho, tuple(range(1, rho.n_subsystems + 1)), rel_tol, splits)
    leaves.sort(key=lambda leaf: leaf[0][0])
    partition = Partition([labels for labels, _ in leaves], rho.n_subsystems)
    return FactorizationTree(partition, [f for _, f in leaves], splits)


def _finest(state: DensityMatrix, labels: tuple, rel_tol: float, splits: list) -> list:
    if state.n_subsystems == 1:
        return [(labels, state)]
    for p in enumerate_bipartitions(state.n_subsystems):
        rep = is_product_bipartition(state, p, rel_tol)
        splits.append((labels, rep))
        if not rep.is_product:
            continue
        try:
            rep = factorize_bipartition(state, p, rel_tol)
        except NotProduct as exc:
            raise InconsistencyError(f"split {p} passed the rank test but failed to factorize") from exc
        splits[-1] = (labels, rep)
        out = []
        for block, factor in zip(p.blocks, rep.factors):
            out.extend(_finest(factor, tuple(labels[i - 1] for i in block), rel_tol, splits))
        return out
    return [(labels, state)]
