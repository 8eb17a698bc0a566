"""Density matrices and pure states over multipartite dimension lists.

Subsystems are labelled 1..N throughout, and the computational basis is
ordered with subsystem 1 most significant (``numpy.kron`` order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import matcore
from .errors import DimensionError, PartitionError, ValidationError

#: Generated and emitted states satisfy the invariants at this level.
ACCEPT_TOL = 1e-9
#: Inputs deviating by more than this are rejected.
REJECT_TOL = 1e-6


def _check_dims(dims) -> tuple:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"dims must be a non-empty list of positive integers, got {list(dims)}")
    return dims


def validate_density(matrix, tol: float = REJECT_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity of ``matrix``.

    Returns the matrix as a complex array; raises :class:`ValidationError`
    when any deviation exceeds ``tol``.
    """
    a = matcore.as_matrix(matrix, "density matrix")
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"density matrix must be square, got {a.shape}")
    herr = matcore.hermitian_error(a)
    if herr > tol:
        raise ValidationError(f"matrix is not Hermitian (max |A - A^†| = {herr:.3e})")
    tr = np.trace(a)
    if abs(tr - 1) > tol:
        raise ValidationError(f"trace is {tr.real:.12g}{tr.imag:+.3g}j, expected 1")
    lam = matcore.psd_min_eigenvalue(a)
    if lam < -tol:
        raise ValidationError(f"matrix is not positive semidefinite (min eigenvalue {lam:.3e})")
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix together with its subsystem dimensions."""

    dims: tuple
    matrix: np.ndarray

    def __init__(self, dims: Sequence[int], matrix, tol: float = REJECT_TOL):
        dims = _check_dims(dims)
        a = validate_density(matrix, tol)
        if a.shape[0] != math.prod(dims):
            raise DimensionError(f"matrix side {a.shape[0]} does not match dims {list(dims)}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", a)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"DensityMatrix(dims={list(self.dims)})"


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized state vector with subsystem dimensions."""

    dims: tuple
    amplitudes: np.ndarray

    def __init__(self, dims: Sequence[int], amplitudes, tol: float = REJECT_TOL):
        dims = _check_dims(dims)
        amp = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        if amp.size != math.prod(dims):
            raise DimensionError(f"{amp.size} amplitudes do not match dims {list(dims)}")
        if not np.all(np.isfinite(amp)):
            raise ValidationError("amplitudes contain NaN or Inf")
        norm = np.linalg.norm(amp)
        if abs(norm - 1) > tol:
            raise ValidationError(f"state vector has norm {norm:.12g}, expected 1")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amp)

    def __repr__(self):
        return f"PureState(dims={list(self.dims)})"


def density_from_pure(psi: PureState) -> DensityMatrix:
    """Projector ``|psi><psi|`` (rescaled to unit trace)."""
    a = psi.amplitudes
    return DensityMatrix(psi.dims, np.outer(a, a.conj()) / np.vdot(a, a).real)


def tensor(*states: DensityMatrix) -> DensityMatrix:
    """Tensor product of density matrices, concatenating their dims."""
    if not states:
        raise ValueError("tensor() needs at least one state")
    dims: list = []
    mat = np.ones((1, 1), dtype=np.complex128)
    for s in states:
        dims.extend(s.dims)
        mat = np.kron(mat, s.matrix)
    return DensityMatrix(dims, mat)


def _check_labels(labels: Iterable[int], n: int, what: str) -> list:
    labels = [int(i) for i in labels]
    if not labels:
        raise PartitionError(f"{what} must not be empty")
    bad = [i for i in labels if not 1 <= i <= n]
    if bad:
        raise PartitionError(f"{what} contains out-of-range subsystem indices {bad} (N={n})")
    if len(set(labels)) != len(labels):
        raise PartitionError(f"{what} contains duplicate indices")
    return labels


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep`` (1-based).

    Retained subsystems keep their original relative order.
    """
    n = rho.n_subsystems
    keep = sorted(_check_labels(keep, n, "keep"))
    t = rho.matrix.reshape(rho.dims * 2)
    # einsum: contract each traced row axis with its column axis
    row = list(range(n))
    col = [n + i for i in range(n)]
    for i in range(n):
        if i + 1 not in keep:
            col[i] = row[i]
    out = [row[i - 1] for i in keep] + [col[i - 1] for i in keep]
    reduced = np.einsum(t, row + col, out)
    kd = [rho.dims[i - 1] for i in keep]
    side = math.prod(kd)
    return DensityMatrix(kd, reduced.reshape(side, side))


def permute_subsystems(rho: DensityMatrix, perm: Sequence[int]) -> DensityMatrix:
    """Reorder subsystems so that new position ``k`` holds old subsystem ``perm[k]``.

    ``perm`` is 1-based; e.g. ``(3, 1, 2)`` moves subsystem 3 to the front.
    """
    n = rho.n_subsystems
    perm = _check_labels(perm, n, "perm")
    if len(perm) != n:
        raise PartitionError(f"perm must list all {n} subsystems, got {perm}")
    axes = [p - 1 for p in perm]
    t = rho.matrix.reshape(rho.dims * 2).transpose(axes + [n + a for a in axes])
    new_dims = [rho.dims[a] for a in axes]
    return DensityMatrix(new_dims, t.reshape(rho.side, rho.side))


def inverse_permutation(perm: Sequence[int]) -> list:
    inv = [0] * len(perm)
    for pos, p in enumerate(perm, start=1):
        inv[p - 1] = pos
    return inv


# --- named and random states -------------------------------------------------


def basis_ket(dims: Sequence[int], index: int = 0) -> PureState:
    dims = _check_dims(dims)
    amp = np.zeros(math.prod(dims), dtype=np.complex128)
    amp[index] = 1
    return PureState(dims, amp)


def bell_ket() -> PureState:
    """(|00> + |11>)/sqrt(2)."""
    return ghz_ket(2)


def ghz_ket(n: int) -> PureState:
    if n < 2:
        raise ValidationError(f"GHZ state needs n >= 2, got {n}")
    amp = np.zeros(2**n, dtype=np.complex128)
    amp[0] = amp[-1] = 1 / np.sqrt(2)
    return PureState([2] * n, amp)


def w_ket(n: int) -> PureState:
    """Equal superposition of the n single-excitation qubit basis states."""
    if n < 2:
        raise ValidationError(f"W state needs n >= 2, got {n}")
    amp = np.zeros(2**n, dtype=np.complex128)
    for k in range(n):
        amp[1 << k] = 1 / np.sqrt(n)
    return PureState([2] * n, amp)


def example2_ket() -> PureState:
    """(|000> + |110>)/sqrt(2): a Bell pair on qubits 1,2 with qubit 3 in |0>."""
    amp = np.zeros(8, dtype=np.complex128)
    amp[0b000] = amp[0b110] = 1 / np.sqrt(2)
    return PureState([2, 2, 2], amp)


def gen_bell() -> DensityMatrix:
    return density_from_pure(bell_ket())


def gen_ghz(n: int) -> DensityMatrix:
    return density_from_pure(ghz_ket(n))


def gen_w(n: int) -> DensityMatrix:
    return density_from_pure(w_ket(n))


def gen_example2() -> DensityMatrix:
    return density_from_pure(example2_ket())


def gen_example1(p: float) -> DensityMatrix:
    """Two-qubit mixture ``p (|00><00| + |11><11|)/2 + (1 - p) I/4``."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    proj = np.diag([1.0, 0.0, 0.0, 1.0]).astype(np.complex128)
    return DensityMatrix([2, 2], p * proj / 2 + (1 - p) * np.eye(4) / 4)


def gen_maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    dims = _check_dims(dims)
    d = math.prod(dims)
    return DensityMatrix(dims, np.eye(d, dtype=np.complex128) / d)


def _ginibre_density(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    w = g @ g.conj().T
    w = (w + w.conj().T) / 2
    return w / np.trace(w).real


def gen_random_density(dims: Sequence[int], seed=None) -> DensityMatrix:
    """Full-rank random state ``G G^† / Tr(G G^†)`` with complex Gaussian ``G``."""
    dims = _check_dims(dims)
    rng = np.random.default_rng(seed)
    return DensityMatrix(dims, _ginibre_density(math.prod(dims), rng))


def gen_random_pure(dims: Sequence[int], seed=None) -> PureState:
    dims = _check_dims(dims)
    rng = np.random.default_rng(seed)
    d = math.prod(dims)
    amp = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(dims, amp / np.linalg.norm(amp))


def gen_random_product(dims_partitioned: Sequence[Sequence[int]], seed=None) -> DensityMatrix:
    """Tensor product of independent random densities, one per group of dims.

    ``[[2, 2], [3]]`` gives ``rho_A ⊗ rho_B`` with ``rho_A`` a generic
    (entangled) two-qubit state and ``rho_B`` a qutrit state; the result
    has dims ``[2, 2, 3]``.
    """
    rng = np.random.default_rng(seed)
    parts = []
    for group in dims_partitioned:
        group = _check_dims(group)
        parts.append(DensityMatrix(group, _ginibre_density(math.prod(group), rng)))
    return tensor(*parts)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
