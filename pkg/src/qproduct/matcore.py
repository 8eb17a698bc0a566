"""Dense complex matrix primitives.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128`` and
shape ``(rows, cols)``, stored row-major (C order). Nothing in this module
relies on that layout: ``vec`` and ``realign`` are written in terms of the
index maps they implement, so a Fortran-ordered input gives the same
result.

Index conventions (0-based here, 1-based in the comments that quote
matrix positions):

* ``vec(X)[j*m + i] == X[i, j]`` for ``X`` of shape ``(m, n)``
  (column stacking).
* For ``Z`` of side ``m*n`` viewed as an ``m x m`` grid of ``n x n``
  blocks ``Z_ij``, row ``j*m + i`` of ``realign(Z, m, n)`` is
  ``vec(Z_ij)``. Blocks are thus enumerated column-major in ``(i, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DimensionError, NumericalError

#: Default relative threshold for numerical rank decisions.
DEFAULT_REL_TOL = 1e-8


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} contains NaN or Inf entries")
    return arr


def vec(x) -> np.ndarray:
    """Stack the columns of ``x`` into a 1-D vector of length ``rows*cols``.

    >>> vec([[1, 2], [3, 4]]).real
    array([1., 3., 2., 4.])
    """
    x = as_matrix(x)
    return x.T.reshape(-1).copy()


def unvec(v, m: int, n: int) -> np.ndarray:
    """Inverse of :func:`vec`: rebuild the ``m x n`` matrix from its columns."""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if m < 1 or n < 1 or v.size != m * n:
        raise DimensionError(f"cannot unvec a length-{v.size} vector into {m}x{n}")
    return v.reshape(n, m).T.copy()


def _check_split(z: np.ndarray, m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise DimensionError(f"split dimensions must be positive, got m={m}, n={n}")
    if z.shape != (m * n, m * n):
        raise DimensionError(f"expected a square matrix of side {m * n} for m={m}, n={n}, got {z.shape}")


def realign(z, m: int, n: int) -> np.ndarray:
    """Realignment of an ``mn x mn`` matrix into an ``m^2 x n^2`` matrix.

    Parameters
    ----------
    z : array_like
        Square matrix of side ``m*n``, read as an ``m x m`` grid of
        ``n x n`` blocks.
    m, n : int
        Outer (block grid) and inner (block) dimensions.

    Returns
    -------
    numpy.ndarray
        Matrix whose row ``j*m + i`` is ``vec`` of block ``(i, j)``.
        The entries are a permutation of those of ``z``, so the Frobenius
        norm is preserved.
    """
    z = as_matrix(z, "Z")
    _check_split(z, m, n)
    # z[i*n + a, j*n + b] -> out[j*m + i, b*n + a]
    return z.reshape(m, n, m, n).transpose(2, 0, 3, 1).reshape(m * m, n * n).copy()


def kron(x, y) -> np.ndarray:
    """Kronecker product ``x ⊗ y``."""
    return np.kron(as_matrix(x, "X"), as_matrix(y, "Y"))


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``A = sum_i s_i u_i v_i^†``.

    ``left_vectors`` and ``right_vectors`` hold ``u_i`` and ``v_i`` as
    columns; ``singular_values`` is nonincreasing and nonnegative.
    """

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T


def svd(a) -> SvdResult:
    """Thin singular value decomposition backed by LAPACK (``gesdd``)."""
    a = as_matrix(a, "A")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    return SvdResult(u, s, vh.conj().T)


def singular_values(a) -> np.ndarray:
    """Nonincreasing singular values of ``a``."""
    a = as_matrix(a, "A")
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc


def numerical_rank(sigmas, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Number of singular values strictly above ``rel_tol * sigmas[0]``.

    Returns 0 for an empty sequence or when the largest value is zero.
    """
    s = np.asarray(sigmas, dtype=float).reshape(-1)
    if not 0.0 < rel_tol < 1.0:
        raise ContractError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    if s.size == 0:
        return 0
    if np.any(np.diff(s) > 0):
        raise ContractError("singular values must be sorted nonincreasing")
    if np.any(s < 0):
        raise ContractError("singular values must be nonnegative")
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


@dataclass(frozen=True)
class SchmidtOperatorDecomposition:
    """Operator Schmidt decomposition ``Z = sum_i X_i ⊗ Y_i``.

    Each term is ``(sigma_i, X_i, Y_i)`` with ``vec(X_i) = sqrt(sigma_i) u_i``
    and ``vec(Y_i) = sqrt(sigma_i) conj(v_i)``.
    """

    m: int
    n: int
    terms: list = field(default_factory=list)

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([t[0] for t in self.terms], dtype=float)

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((self.m * self.n, self.m * self.n), dtype=np.complex128)
        for _, x, y in self.terms:
            out += np.kron(x, y)
        return out


def schmidt_operator_decomposition(z, m: int, n: int, rel_tol: float = DEFAULT_REL_TOL) -> SchmidtOperatorDecomposition:
    """Split ``z`` into a sum of Kronecker products via the SVD of its realignment.

    Only terms whose singular value passes :func:`numerical_rank` are kept,
    so the zero matrix yields an empty term list.
    """
    res = svd(realign(z, m, n))
    r = numerical_rank(res.singular_values, rel_tol)
    terms = []
    for i in range(r):
        root = np.sqrt(res.singular_values[i])
        x = unvec(root * res.left_vectors[:, i], m, m)
        y = unvec(root * res.right_vectors[:, i].conj(), n, n)
        terms.append((float(res.singular_values[i]), x, y))
    return SchmidtOperatorDecomposition(m, n, terms)


def hermitian_error(a) -> float:
    """Largest entrywise modulus of ``a - a^†``."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    return float(np.max(np.abs(a - a.conj().T)))


def hermitian_part(a) -> np.ndarray:
    a = as_matrix(a)
    return (a + a.conj().T) / 2


def psd_min_eigenvalue(a) -> float:
    """Smallest eigenvalue of the Hermitian part ``(a + a^†)/2``."""
    h = hermitian_part(a)
    try:
        return float(np.linalg.eigvalsh(h)[0])
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(as_matrix(a), "fro"))


def relative_error(approx, exact) -> float:
    """``||approx - exact||_F / ||exact||_F`` (absolute error if ``exact`` is zero)."""
    exact = as_matrix(exact)
    diff = frobenius_norm(as_matrix(approx) - exact)
    scale = frobenius_norm(exact)
    return diff / scale if scale > 0 else diff
