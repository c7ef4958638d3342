"""Dense matrix primitives shared by every other module."""

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple, Union

import numpy as np

from .support import InputError, get_settings

ArrayLike = Union[np.ndarray, Sequence[Sequence[complex]]]


def _as_square(entries: ArrayLike, what: str) -> np.ndarray:
    try:
        array = np.array(entries)
    except (TypeError, ValueError) as e:
        raise InputError(what, f"entries cannot be read as a matrix ({e})") from e
    if array.dtype == object or not np.issubdtype(array.dtype, np.number):
        raise InputError(what, "entries must be numbers")
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise InputError(what, f"expected a square matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InputError(what, "entries must be finite")
    return array


@dataclass(init=False, frozen=True, eq=False)
class ComplexMatrix:
    """
    Immutable dense n x n complex matrix.

    Parameters
    ----------
    entries : array_like
        Square array of finite numbers, n >= 1. The data is copied and stored
        read-only.

    Raises
    ------
    InputError
        If the entries are not a finite square array of dimension at least 1

    Examples
    --------
    >>> M = ComplexMatrix([[1, 2], [3, 4]])
    >>> M.n
    2
    >>> determinant(M)
    (-2+0j)
    """

    entries: np.ndarray

    def __init__(self, entries: ArrayLike):
        array = self._validate(entries)
        if array.shape[0] < 1:
            raise InputError(type(self).__name__, "dimension must be at least 1")
        array.setflags(write=False)
        object.__setattr__(self, "entries", array)

    def _validate(self, entries: ArrayLike) -> np.ndarray:
        return _as_square(entries, type(self).__name__).astype(complex)

    @classmethod
    def empty(cls) -> "ComplexMatrix":
        """The 0 x 0 matrix, the principal submatrix on the empty index set."""
        instance = object.__new__(ComplexMatrix)
        entries = np.zeros((0, 0), dtype=complex)
        entries.setflags(write=False)
        object.__setattr__(instance, "entries", entries)
        return instance

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.conj().T))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


class SymmetricMatrix(ComplexMatrix):
    """
    Immutable dense real symmetric matrix.

    The input is symmetrized by averaging it with its transpose, so
    ``entries[i, j] == entries[j, i]`` holds exactly. Inputs whose asymmetry
    exceeds ``Settings.symmetry_tolerance`` (relative to the largest entry) are
    rejected, as are inputs with a nonzero imaginary part.

    Examples
    --------
    >>> SymmetricMatrix([[1.0, 2.0], [2.0, 1.0]]).entries
    array([[1., 2.],
           [2., 1.]])
    """

    def _validate(self, entries: ArrayLike) -> np.ndarray:
        array = _as_square(entries, type(self).__name__)
        if np.iscomplexobj(array):
            if np.any(array.imag != 0):
                raise InputError(type(self).__name__, "entries must be real")
            array = array.real
        array = array.astype(float)
        scale = max(1.0, float(np.max(np.abs(array), initial=0.0)))
        asymmetry = float(np.max(np.abs(array - array.T), initial=0.0))
        if asymmetry > get_settings().symmetry_tolerance * scale:
            raise InputError(
                type(self).__name__,
                f"asymmetry {asymmetry:.3e} exceeds the symmetry tolerance",
            )
        return (array + array.T) / 2

    @property
    def is_hermitian(self) -> bool:
        return True


def as_matrix(matrix: Union[ComplexMatrix, ArrayLike]) -> ComplexMatrix:
    """
    Coerce an array to the matrix class it qualifies for.

    Real arrays that are exactly symmetric become SymmetricMatrix, everything
    else becomes ComplexMatrix. Matrix instances are returned unchanged.
    """
    if isinstance(matrix, ComplexMatrix):
        return matrix
    array = _as_square(matrix, "matrix")
    if np.isrealobj(array) and np.array_equal(array, array.T):
        return SymmetricMatrix(array)
    return ComplexMatrix(array)


@dataclass(init=False, frozen=True, eq=False)
class MatrixTuple:
    """
    Ordered, non-empty tuple of matrices of a common dimension n.

    Parameters
    ----------
    matrices : iterable
        ComplexMatrix / SymmetricMatrix instances or arrays (coerced with
        :func:`as_matrix`)

    Raises
    ------
    InputError
        If the tuple is empty or the dimensions differ
    """

    matrices: Tuple[ComplexMatrix, ...]

    def __init__(self, matrices: Iterable[Union[ComplexMatrix, ArrayLike]]):
        if isinstance(matrices, MatrixTuple):
            matrices = matrices.matrices
        items = tuple(as_matrix(matrix) for matrix in matrices)
        if not items:
            raise InputError("MatrixTuple", "at least one matrix is required")
        dimensions = [matrix.n for matrix in items]
        if len(set(dimensions)) != 1:
            raise InputError("MatrixTuple", f"matrix dimensions differ: {dimensions}")
        object.__setattr__(self, "matrices", items)

    @classmethod
    def symmetric(cls, matrices: Iterable[ArrayLike]) -> "MatrixTuple":
        """Build a tuple whose members are all SymmetricMatrix."""
        return cls(
            m if isinstance(m, SymmetricMatrix) else SymmetricMatrix(m) for m in matrices
        )

    @property
    def count(self) -> int:
        return len(self.matrices)

    @property
    def n(self) -> int:
        return self.matrices[0].n

    @property
    def all_symmetric(self) -> bool:
        return all(isinstance(matrix, SymmetricMatrix) for matrix in self.matrices)

    def stack(self) -> np.ndarray:
        """Writable (count, n, n) array of the entries, real when every member is symmetric."""
        dtype = float if self.all_symmetric else complex
        return np.array([matrix.entries for matrix in self.matrices], dtype=dtype)

    def __len__(self) -> int:
        return len(self.matrices)

    def __getitem__(self, index: int) -> ComplexMatrix:
        return self.matrices[index]

    def __iter__(self) -> Iterator[ComplexMatrix]:
        return iter(self.matrices)

    def __repr__(self) -> str:
        return f"MatrixTuple(count={self.count}, n={self.n})"


def as_tuple(matrices: Union[MatrixTuple, Iterable]) -> MatrixTuple:
    return matrices if isinstance(matrices, MatrixTuple) else MatrixTuple(matrices)


def entries_of(matrix: Union[ComplexMatrix, ArrayLike]) -> np.ndarray:
    """Validated square array for a matrix or array input (0 x 0 allowed)."""
    if isinstance(matrix, ComplexMatrix):
        return matrix.entries
    return _as_square(matrix, "matrix")


def operator_norm(matrix: Union[ComplexMatrix, ArrayLike]) -> float:
    """
    Operator (spectral) norm.

    For symmetric or Hermitian input this is the largest absolute eigenvalue.
    Otherwise it is the largest singular value, computed as the square root of
    the largest eigenvalue of ``M^* M``.

    Raises
    ------
    InputError
        If the entries are not finite

    Examples
    --------
    >>> operator_norm(SymmetricMatrix([[0.03, 0.0], [0.0, -0.04]]))
    0.04
    """
    array = entries_of(matrix)
    if array.size == 0:
        return 0.0
    hermitian = (
        matrix.is_hermitian
        if isinstance(matrix, ComplexMatrix)
        else bool(np.array_equal(array, array.conj().T))
    )
    if hermitian:
        return float(np.max(np.abs(np.linalg.eigvalsh(array))))
    gram = array.conj().T @ array
    return float(np.sqrt(max(float(np.max(np.linalg.eigvalsh(gram))), 0.0)))


def determinant(matrix: Union[ComplexMatrix, ArrayLike]) -> complex:
    """Determinant by pivoted LU elimination; the 0 x 0 matrix has determinant 1."""
    array = entries_of(matrix)
    if array.size == 0:
        return 1 + 0j
    return complex(np.linalg.det(array.astype(complex)))


def principal_submatrix(
    matrix: Union[ComplexMatrix, ArrayLike], indices: Iterable[int]
) -> ComplexMatrix:
    """
    Principal submatrix on an index set.

    Parameters
    ----------
    matrix : ComplexMatrix or array_like
        The n x n matrix
    indices : iterable of int
        0-based indices; duplicates are ignored and order is normalized to
        increasing

    Returns
    -------
    ComplexMatrix
        The |S| x |S| submatrix (a SymmetricMatrix for symmetric input), or the
        0 x 0 matrix for the empty set

    Raises
    ------
    InputError
        If an index is outside ``range(n)``
    """
    array = entries_of(matrix)
    n = array.shape[0]
    index = sorted({int(i) for i in indices})
    outside = [i for i in index if not 0 <= i < n]
    if outside:
        raise InputError("index set", f"indices {outside} outside range(0, {n})")
    if not index:
        return ComplexMatrix.empty()
    sub = array[np.ix_(index, index)]
    if isinstance(matrix, SymmetricMatrix):
        return SymmetricMatrix(sub)
    return ComplexMatrix(sub)


def outer_product(x: Sequence[float]) -> SymmetricMatrix:
    """
    The rank-one matrix ``x ⊗ x`` with entries ``x_i x_j``.

    Raises
    ------
    InputError
        If x is not a non-empty finite real vector
    """
    vector = np.asarray(x)
    if vector.ndim != 1 or vector.size == 0:
        raise InputError("vector", f"expected a non-empty 1-d vector, got shape {vector.shape}")
    if np.iscomplexobj(vector) or not np.issubdtype(vector.dtype, np.number):
        raise InputError("vector", "entries must be real numbers")
    if not np.all(np.isfinite(vector)):
        raise InputError("vector", "entries must be finite")
    vector = vector.astype(float)
    return SymmetricMatrix(np.outer(vector, vector))


def principal_minor_sums(stack: np.ndarray) -> np.ndarray:
    """
    Sums of principal minors of every size for a batch of matrices.

    For each matrix M in the (c, n, n) stack returns E_0(M), ..., E_n(M), where
    E_k(M) is the sum of the k x k principal minors (E_0 = 1). These are the
    coefficients of ``det(I + t M)``, recovered from its values at the (n+1)-th
    roots of unity with a discrete Fourier transform.

    Returns
    -------
    np.ndarray
        Complex array of shape (c, n + 1)
    """
    stack = np.asarray(stack, dtype=complex)
    count, n = stack.shape[0], stack.shape[1]
    points = np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    shifted = np.eye(n) + points[None, :, None, None] * stack[:, None, :, :]
    values = np.linalg.det(shifted).reshape(count, n + 1)
    return np.fft.fft(values, axis=1) / (n + 1)


def principal_minor_sum(matrix: Union[ComplexMatrix, ArrayLike], k: int) -> complex:
    """Sum of the k x k principal minors of a single matrix."""
    array = entries_of(matrix)
    n = array.shape[0]
    if not 0 <= k <= n:
        raise InputError("minor size", f"k = {k} outside [0, {n}]")
    if n == 0:
        return 1 + 0j
    return complex(principal_minor_sums(array[None])[0, k])
