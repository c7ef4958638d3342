"""
Principal-minor power sums sum_S det(B_S)^m: derivatives of the generating
polynomial, the interpolation approximation for ||B|| < rho < 1, and the
rank-2 Gram reduction.
"""

import logging
import math
from typing import Optional, Sequence, Union

import numpy as np

from .approx import ZeroFreeReport, ZeroFreeTracker
from .charpoly import Poly
from .exact import minor_power_sum_by_size
from .matrices import ComplexMatrix, MatrixTuple, SymmetricMatrix, entries_of, operator_norm
from .parameters import open_unit, positive_integer
from .support import (
    DomainError,
    InputError,
    Settings,
    check_cap,
    get_settings,
)
from .taylor import ApproxResult, DerivativeSequence, degree_for_accuracy, taylor_log_at_one

logger = logging.getLogger(__name__)


def phi_derivatives(
    matrix: Union[ComplexMatrix, np.ndarray],
    m: int,
    up_to: int,
    settings: Optional[Settings] = None,
) -> DerivativeSequence:
    """
    Normalized derivatives of phi(z) = sum_S det(B_S)^m z^|S| at 0.

    Entry k-1 is ``sum over |S| = k of det(B_S)^m``; phi(0) = 1.

    Raises
    ------
    InputError
        If up_to exceeds n
    ResourceLimitError
        If the subset count exceeds ``Settings.max_evaluations``

    Examples
    --------
    >>> phi_derivatives(np.array([[1.0, 2.0], [3.0, 4.0]]), 1, 2).normalized_derivs
    ((5+0j), (-2+0j))
    """
    settings = settings or get_settings()
    array = entries_of(matrix)
    m = positive_integer("m", m)
    n = array.shape[0]
    if not 0 <= up_to <= n:
        raise InputError("derivative order", f"up_to = {up_to} outside [0, {n}]")
    check_cap(
        "principal minor evaluations",
        sum(math.comb(n, k) for k in range(1, up_to + 1)),
        settings.max_evaluations,
    )
    derivatives = [minor_power_sum_by_size(array, m, k, settings) for k in range(1, up_to + 1)]
    return DerivativeSequence(1.0, derivatives)


def phi_polynomial(
    matrix: Union[ComplexMatrix, np.ndarray],
    m: int,
    settings: Optional[Settings] = None,
) -> Poly:
    """
    All coefficients of phi(z) = sum_S det(B_S)^m z^|S|.

    Raises
    ------
    ResourceLimitError
        If n exceeds ``Settings.minor_cap``
    """
    settings = settings or get_settings()
    n = entries_of(matrix).shape[0]
    check_cap("minor power sum dimension", n, settings.minor_cap)
    sequence = phi_derivatives(matrix, m, n, settings)
    return Poly((1 + 0j,) + sequence.normalized_derivs)


def approx_log_minor_power_sum(
    matrix: Union[ComplexMatrix, np.ndarray],
    m: int,
    rho: float,
    eps: float,
    settings: Optional[Settings] = None,
) -> ApproxResult:
    """
    Approximate ln sum_S det(B_S)^m for ||B|| < rho < 1.

    phi(z) has no zeros for |z| <= rho^(-m), so the Taylor polynomial of
    ln phi at 0 of degree ``degree_for_accuracy(n, rho^(-m), eps)`` gives
    ln phi(1) within eps. Only orders up to n need subset enumeration.

    Parameters
    ----------
    matrix : ComplexMatrix or array_like
        The n x n matrix B (real or complex)
    m : int
        The power, m >= 1
    rho : float
        Norm bound in (0, 1), strictly above ||B||
    eps : float
        Target additive accuracy in (0, 1)

    Raises
    ------
    DomainError
        If ||B|| >= rho
    ResourceLimitError
        If the degree exceeds ``Settings.max_degree``

    Examples
    --------
    >>> result = approx_log_minor_power_sum(np.diag([0.5, 0.5]), 2, 0.6, 1e-4)
    >>> abs(result.log_value - np.log(1.5625)) <= 1e-4
    True
    """
    settings = settings or get_settings()
    array = entries_of(matrix)
    m = positive_integer("m", m)
    rho = open_unit("rho", rho)
    eps = open_unit("eps", eps)
    norm = operator_norm(matrix if isinstance(matrix, ComplexMatrix) else array)
    if not norm < rho:
        raise DomainError("operator norm of B", message=f"||B|| = {norm:.6g} must be below rho = {rho}")
    n = array.shape[0]
    beta = rho ** (-m)
    degree = degree_for_accuracy(n, beta, eps)
    check_cap("Taylor degree", degree, settings.max_degree)
    orders = min(degree, n)
    logger.debug("n = %d, m = %d, beta = %.6g: degree %d", n, m, beta, degree)
    sequence = phi_derivatives(array, m, orders, settings).extended(degree)
    result = taylor_log_at_one(sequence, n, beta)
    return result.shifted(0.0, norm=norm, derivative_orders=orders)


def _vectors(x: Union[Sequence[Sequence[float]], np.ndarray]) -> np.ndarray:
    vectors = np.asarray(x)
    if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1] or vectors.size == 0:
        raise InputError(
            "vectors", f"expected n real vectors of dimension n, got shape {vectors.shape}"
        )
    if np.iscomplexobj(vectors) or not np.all(np.isfinite(vectors)):
        raise InputError("vectors", "entries must be finite real numbers")
    return vectors.astype(float)


def gram_from_rank2(x: Union[Sequence[Sequence[float]], np.ndarray]) -> SymmetricMatrix:
    """
    Gram matrix b_ij = <x_i, x_j> of n vectors of dimension n.

    Satisfies D(e_1 e_1' + x_1 x_1', ..., e_n e_n' + x_n x_n') = sum_S det(B_S)^2.

    Raises
    ------
    InputError
        If the vectors are not n real vectors of dimension n
    """
    vectors = _vectors(x)
    return SymmetricMatrix(vectors @ vectors.T)


def rank2_tuple(x: Union[Sequence[Sequence[float]], np.ndarray]) -> MatrixTuple:
    """The tuple (e_k e_k' + x_k x_k')_k whose mixed discriminant the Gram reduction computes."""
    vectors = _vectors(x)
    n = vectors.shape[0]
    basis = np.eye(n)
    return MatrixTuple.symmetric(
        np.outer(basis[k], basis[k]) + np.outer(vectors[k], vectors[k]) for k in range(n)
    )


def verify_zero_free_minors(
    n: int,
    m: int,
    samples: int,
    grid: int,
    seed: int,
    norm_bound: float = 1 - 1e-9,
    settings: Optional[Settings] = None,
) -> ZeroFreeReport:
    """
    Sample phi(z) = sum_S det(B_S)^m z^|S| for random complex B with
    ||B|| <= norm_bound < 1 and z on a polar grid of the closed unit disc.

    Ratios are |phi(z)| (phi(0) = 1).
    """
    # On demand import because the generators depend on the scaling module
    from .generators import gen_bounded_matrix

    settings = settings or get_settings()
    norm_bound = open_unit("norm_bound", norm_bound)
    radii = np.arange(1, grid + 1) / grid
    angles = 2 * np.pi * np.arange(grid) / grid
    points = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    tracker = ZeroFreeTracker("closed unit disc", n)
    for sample in range(samples):
        matrix = gen_bounded_matrix(n, norm_bound, seed=[seed, sample], complex_entries=True)
        values = phi_polynomial(matrix, m, settings)(points)
        for z, value in zip(points, values):
            tracker.record(sample, float(abs(value)), complex(z))
    return tracker.report()
