"""
Exact (exponential-time) oracles: mixed discriminants, permanents, identity
padded mixed discriminants and principal-minor power sums.

Every subset enumeration runs in fixed-size chunks whose partial sums are
combined with exactly rounded summation, so results are bit-reproducible for
any thread count.
"""

import logging
import math
from itertools import combinations, permutations
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .matrices import ComplexMatrix, MatrixTuple, as_tuple, entries_of
from .support import (
    InputError,
    Settings,
    check_cap,
    compensated_sum,
    get_settings,
    ordered_map,
    polarization_signs,
    reduce_chunks,
    subset_masks,
)

logger = logging.getLogger(__name__)

METHODS = ("polarization", "permutation")


def polarization_sum(stack: np.ndarray, settings: Optional[Settings] = None) -> complex:
    """
    Mixed discriminant of a (k, k, k) stack by polarization.

    Evaluates ``sum over S of (-1)^(k - |S|) det(sum_{i in S} A_i)`` over all
    2^k subsets, in lexicographic mask order.
    """
    settings = settings or get_settings()
    k = stack.shape[0]
    if k == 0:
        return 1 + 0j
    masks = subset_masks(k)
    signs = polarization_signs(k)
    flat = np.asarray(stack, dtype=complex).reshape(k, -1)
    total = 2**k
    size = settings.chunk_size
    blocks = [(start, min(start + size, total)) for start in range(0, total, size)]

    def evaluate(block: Tuple[int, int]) -> complex:
        start, stop = block
        sums = (masks[start:stop] @ flat).reshape(-1, k, k)
        return compensated_sum(signs[start:stop] * np.linalg.det(sums))

    return compensated_sum(ordered_map(evaluate, blocks, settings.threads))


def _permutation_sign(permutation: Sequence[int]) -> int:
    seen = [False] * len(permutation)
    cycles = 0
    for start in range(len(permutation)):
        if not seen[start]:
            cycles += 1
            position = start
            while not seen[position]:
                seen[position] = True
                position = permutation[position]
    return -1 if (len(permutation) - cycles) % 2 else 1


def permutation_sum(stack: np.ndarray) -> complex:
    """
    Mixed discriminant as the double sum over permutations sigma, tau of
    ``sgn(sigma) * prod_i A_{tau(i)}[i, sigma(i)]``.
    """
    n = stack.shape[0]
    if n == 0:
        return 1 + 0j
    rows = np.arange(n)
    taus = np.array(list(permutations(range(n))))
    terms: List[complex] = []
    for sigma in permutations(range(n)):
        picked = stack[:, rows, list(sigma)]
        products = np.prod(picked[taus, rows], axis=1)
        terms.append(_permutation_sign(sigma) * compensated_sum(products))
    return compensated_sum(terms)


def mixed_discriminant_exact(
    matrices: Union[MatrixTuple, Iterable],
    method: str = "polarization",
    settings: Optional[Settings] = None,
) -> complex:
    """
    Exact mixed discriminant D(A_1, ..., A_n).

    Parameters
    ----------
    matrices : MatrixTuple or iterable of matrices
        n matrices of dimension n
    method : {"polarization", "permutation"}
        ``polarization`` sums 2^n determinants and is available up to
        ``Settings.exact_cap``. ``permutation`` evaluates the double
        permutation sum directly and is available up to
        ``Settings.permutation_cap``.

    Returns
    -------
    complex
        The mixed discriminant

    Raises
    ------
    InputError
        If the number of matrices differs from their dimension or the method
        is unknown
    ResourceLimitError
        If n exceeds the cap of the chosen method

    Examples
    --------
    >>> mixed_discriminant_exact([np.eye(2), np.eye(2)])
    (2+0j)
    >>> mixed_discriminant_exact([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])])
    (10+0j)
    """
    settings = settings or get_settings()
    matrices = as_tuple(matrices)
    if matrices.count != matrices.n:
        raise InputError(
            "MatrixTuple",
            f"a mixed discriminant needs n matrices of dimension n, "
            f"got {matrices.count} of dimension {matrices.n}",
        )
    stack = matrices.stack()
    if method == "polarization":
        check_cap("mixed discriminant dimension", matrices.n, settings.exact_cap)
        return polarization_sum(stack, settings)
    if method == "permutation":
        check_cap(
            "permutation-sum mixed discriminant dimension",
            matrices.n,
            settings.permutation_cap,
        )
        return permutation_sum(stack)
    raise InputError("method", f"{method!r} is not one of {METHODS}")


def permanent(
    matrix: Union[ComplexMatrix, np.ndarray], settings: Optional[Settings] = None
) -> complex:
    """
    Exact permanent by Ryser's formula with Gray-code row-sum updates.

    Raises
    ------
    ResourceLimitError
        If n exceeds ``Settings.permanent_cap``

    Examples
    --------
    >>> permanent(np.array([[1, 2], [3, 4]]))
    (10+0j)
    """
    settings = settings or get_settings()
    array = np.asarray(entries_of(matrix), dtype=complex)
    n = array.shape[0]
    check_cap("permanent dimension", n, settings.permanent_cap)
    if n == 0:
        return 1 + 0j
    row_sums = np.zeros(n, dtype=complex)
    terms = np.empty(2**n - 1, dtype=complex)
    subset = 0
    for step in range(1, 2**n):
        column = (step & -step).bit_length() - 1
        subset ^= 1 << column
        if subset >> column & 1:
            row_sums += array[:, column]
        else:
            row_sums -= array[:, column]
        terms[step - 1] = np.prod(row_sums)
    # the Gray code changes one column per step, so |S| has the parity of step
    signs = np.where(np.arange(1, 2**n) % 2 == 1, -1.0, 1.0)
    return (-1) ** n * compensated_sum(signs * terms)


def _padding_stack(
    matrices: Union[MatrixTuple, Sequence], n: Optional[int]
) -> Tuple[np.ndarray, int]:
    items = list(matrices.matrices if isinstance(matrices, MatrixTuple) else matrices)
    if not items:
        if n is None:
            raise InputError("dimension", "n is required when no matrices are given")
        return np.zeros((0, n, n), dtype=complex), int(n)
    stack = as_tuple(items).stack().astype(complex)
    if n is not None and int(n) != stack.shape[1]:
        raise InputError("dimension", f"n = {n} but the matrices have dimension {stack.shape[1]}")
    if stack.shape[0] > stack.shape[1]:
        raise InputError(
            "padded mixed discriminant",
            f"k = {stack.shape[0]} matrices exceed the dimension n = {stack.shape[1]}",
        )
    return stack, stack.shape[1]


def padded_core(stack: np.ndarray, settings: Optional[Settings] = None) -> complex:
    """
    ``sum over |W| = k of D_k(A_1[W], ..., A_k[W])`` for a (k, n, n) stack.

    This is ``D(I, ..., I, A_1, ..., A_k) / (n - k)!``, the padded mixed
    discriminant without its factorial.
    """
    settings = settings or get_settings()
    k, n = stack.shape[0], stack.shape[1]
    if k == 0:
        return 1 + 0j
    check_cap(
        "padded mixed discriminant evaluations",
        math.comb(n, k) * 2**k,
        settings.max_evaluations,
    )
    masks = subset_masks(k)
    signs = polarization_signs(k)

    def evaluate(block: List[Tuple[int, ...]]) -> complex:
        index = np.array(block)
        sub = stack[:, index[:, :, None], index[:, None, :]]
        sums = np.einsum("sj,jcab->csab", masks, sub)
        return compensated_sum(np.linalg.det(sums) @ signs)

    per_chunk = max(1, settings.chunk_size // 2**k)
    return reduce_chunks(evaluate, combinations(range(n), k), per_chunk, settings)


def padded_mixed_discriminant(
    matrices: Union[MatrixTuple, Sequence],
    n: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> complex:
    """
    Identity-padded mixed discriminant ``D(I, ..., I, A_1, ..., A_k)``.

    Computed as ``(n - k)! * sum over |W| = k of D_k(A_1[W], ..., A_k[W])``,
    where ``A_j[W]`` is the principal submatrix on W, at cost
    ``C(n, k) 2^k k^3``.

    Parameters
    ----------
    matrices : sequence of matrices
        The k matrices A_1, ..., A_k, all of dimension n (may be empty)
    n : int, optional
        The dimension, required only when no matrices are given

    Raises
    ------
    InputError
        If k > n or the dimensions disagree
    ResourceLimitError
        If the subset count exceeds ``Settings.max_evaluations``

    Examples
    --------
    >>> padded_mixed_discriminant([], n=3)
    (6+0j)
    >>> padded_mixed_discriminant([np.diag([1.0, 2.0])])
    (3+0j)
    """
    stack, n = _padding_stack(matrices, n)
    core = padded_core(stack, settings)
    return math.factorial(n - stack.shape[0]) * core


def minor_power_sum_by_size(
    array: np.ndarray, m: int, k: int, settings: Optional[Settings] = None
) -> complex:
    """``sum over |S| = k of det(B_S)^m``, enumerating the C(n, k) subsets."""
    settings = settings or get_settings()
    n = array.shape[0]
    if k == 0:
        return 1 + 0j
    array = np.asarray(array, dtype=complex)

    def evaluate(block: List[Tuple[int, ...]]) -> complex:
        index = np.array(block)
        minors = np.linalg.det(array[index[:, :, None], index[:, None, :]])
        return compensated_sum(minors**m)

    return reduce_chunks(evaluate, combinations(range(n), k), settings=settings)


def minor_power_sum_exact(
    matrix: Union[ComplexMatrix, np.ndarray],
    m: int,
    settings: Optional[Settings] = None,
) -> complex:
    """
    Exact principal-minor power sum ``sum over S of det(B_S)^m``.

    The empty set contributes 1.

    Raises
    ------
    InputError
        If m < 1
    ResourceLimitError
        If n exceeds ``Settings.minor_cap``

    Examples
    --------
    >>> minor_power_sum_exact(np.diag([0.5, 0.5]), 2)
    (1.5625+0j)
    """
    settings = settings or get_settings()
    array = entries_of(matrix)
    if int(m) != m or m < 1:
        raise InputError("power", f"m must be a positive integer, got {m}")
    n = array.shape[0]
    check_cap("minor power sum dimension", n, settings.minor_cap)
    totals = [minor_power_sum_by_size(array, int(m), k, settings) for k in range(n + 1)]
    logger.debug("minor power sum over %d subsets", 2**n)
    return compensated_sum(totals)
