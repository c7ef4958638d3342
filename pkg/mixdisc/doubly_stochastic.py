"""
Doubly stochastic tuples: validation, scaling of positive definite tuples,
approximation of ln D(I + z Q_1, ..., I + z Q_n) for |z| < alpha0 n / 4 and
evaluation on the contracted core of the doubly stochastic body.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from .approx import ZeroFreeTracker, ZeroFreeReport, interpolate_log_discriminant
from .exact import mixed_discriminant_exact
from .matrices import MatrixTuple, SymmetricMatrix, as_tuple, operator_norm
from .parameters import IntegerParameter, IntervalParameter, open_unit, parse_complex, positive
from .support import (
    STABILITY,
    ConvergenceError,
    DomainError,
    InputError,
    Settings,
    check_cap,
    get_settings,
)
from .taylor import ApproxResult

logger = logging.getLogger(__name__)

RADIUS_SAFETY = 1 - 1e-12


@dataclass(frozen=True)
class DoublyStochasticReport:
    """
    Validation report for the conditions Q_k PSD, tr Q_k = 1 and sum Q_k = I.

    Truthy exactly when every condition holds within ``tolerance``.
    """

    min_eigenvalues: Tuple[float, ...]
    traces: Tuple[float, ...]
    sum_deviation: float
    tolerance: float
    shape_ok: bool = True

    @property
    def psd_violations(self) -> Tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.min_eigenvalues) if e < -self.tolerance)

    @property
    def trace_violations(self) -> Tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.traces) if abs(t - 1) > self.tolerance)

    @property
    def sum_violation(self) -> bool:
        return self.sum_deviation > self.tolerance

    @property
    def passed(self) -> bool:
        return (
            self.shape_ok
            and not self.psd_violations
            and not self.trace_violations
            and not self.sum_violation
        )

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        problems = []
        if not self.shape_ok:
            problems.append("the tuple must hold n matrices of dimension n")
        if self.psd_violations:
            problems.append(f"not PSD at {list(self.psd_violations)}")
        if self.trace_violations:
            problems.append(f"trace differs from 1 at {list(self.trace_violations)}")
        if self.sum_violation:
            problems.append(f"||sum Q_k - I|| = {self.sum_deviation:.3e}")
        return "; ".join(problems) if problems else "doubly stochastic"

    def raise_if_failed(self) -> None:
        if not self.passed:
            indices = sorted(set(self.psd_violations) | set(self.trace_violations))
            raise DomainError("doubly stochastic tuple", indices, self.summary())

    def as_dict(self) -> Dict[str, Any]:
        return {
            "min_eigenvalues": list(self.min_eigenvalues),
            "traces": list(self.traces),
            "sum_deviation": self.sum_deviation,
            "tolerance": self.tolerance,
            "psd_violations": list(self.psd_violations),
            "trace_violations": list(self.trace_violations),
            "passed": self.passed,
        }


def _hermitian_stack(matrices: MatrixTuple) -> np.ndarray:
    stack = matrices.stack()
    return (stack + np.conj(stack.transpose(0, 2, 1))) / 2


def is_doubly_stochastic(
    matrices: Union[MatrixTuple, Iterable], tol: Optional[float] = None
) -> DoublyStochasticReport:
    """
    Check that a tuple is doubly stochastic within ``tol``.

    Parameters
    ----------
    matrices : MatrixTuple or iterable of arrays
        n Hermitian matrices of dimension n
    tol : float, optional
        Tolerance on the smallest eigenvalue, the traces and the operator norm
        of ``sum Q_k - I`` (default ``Settings.ds_tolerance``)

    Returns
    -------
    DoublyStochasticReport
        Truthy when the tuple is doubly stochastic

    Examples
    --------
    >>> bool(is_doubly_stochastic([np.eye(3) / 3] * 3))
    True
    """
    tol = get_settings().ds_tolerance if tol is None else positive("tol", tol)
    matrices = as_tuple(matrices)
    stack = _hermitian_stack(matrices)
    n = matrices.n
    total = stack.sum(axis=0)
    return DoublyStochasticReport(
        min_eigenvalues=tuple(float(e) for e in np.linalg.eigvalsh(stack)[:, 0]),
        traces=tuple(float(t) for t in np.trace(stack, axis1=1, axis2=2).real),
        sum_deviation=operator_norm(total - np.eye(n)),
        tolerance=tol,
        shape_ok=matrices.count == n,
    )


def _residual(stack: np.ndarray) -> float:
    traces = np.trace(stack, axis1=1, axis2=2)
    total = stack.sum(axis=0)
    trace_error = float(np.max(np.abs(traces - 1)))
    sum_error = float(np.max(np.abs(np.linalg.eigvalsh(total - np.eye(stack.shape[1])))))
    return max(trace_error, sum_error)


@dataclass(frozen=True)
class ScalingResult:
    """
    Factorization A_k = xi_k T Q_k T of a positive definite tuple.

    Attributes
    ----------
    transform : SymmetricMatrix
        The symmetric positive definite T
    scales : tuple of float
        The xi_k
    ds_tuple : MatrixTuple
        The doubly stochastic Q_k
    residual : float
        max(|tr Q_k - 1|, ||sum Q_k - I||) after the last iteration
    iterations : int
        Number of trace and sum normalization rounds
    """

    transform: SymmetricMatrix
    scales: Tuple[float, ...]
    ds_tuple: MatrixTuple
    residual: float
    iterations: int

    @property
    def log_scale_factor(self) -> float:
        """ln(xi_1 ... xi_n (det T)^2), so that ln D(A) = this + ln D(Q)."""
        _, log_det = np.linalg.slogdet(self.transform.entries)
        return float(np.sum(np.log(self.scales)) + 2 * log_det)

    def reconstruct(self) -> MatrixTuple:
        """The tuple xi_k T Q_k T."""
        t = self.transform.entries
        return MatrixTuple.symmetric(
            xi * (t @ q.entries @ t) for xi, q in zip(self.scales, self.ds_tuple)
        )

    def reconstruction_error(self, matrices: Union[MatrixTuple, Iterable]) -> float:
        """max_k ||A_k - xi_k T Q_k T|| / ||A_k||."""
        return max(
            operator_norm(a.entries - b.entries) / operator_norm(a)
            for a, b in zip(as_tuple(matrices), self.reconstruct())
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "transform": self.transform.entries.tolist(),
            "scales": list(self.scales),
            "ds_tuple": [q.entries.tolist() for q in self.ds_tuple],
            "residual": self.residual,
            "iterations": self.iterations,
            "log_scale_factor": self.log_scale_factor,
        }


def scale_to_doubly_stochastic(
    matrices: Union[MatrixTuple, Iterable],
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> ScalingResult:
    """
    Scale a positive definite tuple to a doubly stochastic one.

    Alternates trace normalization ``Q_k <- Q_k / tr Q_k`` and sum
    normalization ``Q_k <- S^(-1/2) Q_k S^(-1/2)`` with ``S = sum Q_k``,
    accumulating the factors so that ``A_k = xi_k T0' Q_k T0`` throughout. On
    convergence the accumulated T0 is replaced by the symmetric factor of its
    polar decomposition (the orthogonal factor is absorbed into the Q_k), so
    ``A_k = xi_k T Q_k T`` with T symmetric positive definite and
    ``D(A) = xi_1 ... xi_n (det T)^2 D(Q)``.

    Parameters
    ----------
    matrices : MatrixTuple or iterable of arrays
        n real symmetric positive definite matrices of dimension n
    tol : float
        Residual tolerance (default 1e-10)
    max_iter : int
        Iteration cap (default 10000)

    Raises
    ------
    DomainError
        If some A_k has smallest eigenvalue at or below 1e-10 ||A_k||
    ConvergenceError
        If the residual is still above ``tol`` after ``max_iter`` rounds

    Examples
    --------
    >>> result = scale_to_doubly_stochastic([np.eye(2) / 2] * 2)
    >>> result.iterations, result.scales
    (1, (1.0, 1.0))
    """
    tol = positive("tol", tol)
    max_iter = IntegerParameter("max_iter", max_iter, min=1).value
    matrices = MatrixTuple.symmetric(matrices)
    if matrices.count != matrices.n:
        raise InputError("MatrixTuple", "scaling needs n matrices of dimension n")
    n = matrices.n
    stack = matrices.stack()
    spectra = np.linalg.eigvalsh(stack)
    norms = np.max(np.abs(spectra), axis=1)
    indefinite = np.flatnonzero(spectra[:, 0] <= 1e-10 * norms)
    if indefinite.size:
        raise DomainError(
            "positive definiteness",
            indefinite,
            "scaling needs strictly positive definite matrices",
        )

    scales = np.ones(n)
    transform = np.eye(n)
    residual = math.inf
    iteration = 0
    while iteration < max_iter:
        iteration += 1
        traces = np.trace(stack, axis1=1, axis2=2)
        stack = stack / traces[:, None, None]
        scales = scales * traces
        eigenvalues, vectors = linalg.eigh(stack.sum(axis=0))
        root = (vectors * np.sqrt(eigenvalues)) @ vectors.T
        inverse_root = (vectors / np.sqrt(eigenvalues)) @ vectors.T
        stack = inverse_root @ stack @ inverse_root
        stack = (stack + stack.transpose(0, 2, 1)) / 2
        transform = root @ transform
        residual = _residual(stack)
        if residual <= tol:
            break
    else:
        raise ConvergenceError(iteration, residual, tol)
    logger.debug("scaling converged in %d iterations, residual %.3e", iteration, residual)

    orthogonal, symmetric = linalg.polar(transform)
    stack = orthogonal.T @ stack @ orthogonal
    stack = (stack + stack.transpose(0, 2, 1)) / 2
    return ScalingResult(
        transform=SymmetricMatrix((symmetric + symmetric.T) / 2),
        scales=tuple(float(xi) for xi in scales),
        ds_tuple=MatrixTuple.symmetric(list(stack)),
        residual=_residual(stack),
        iterations=iteration,
    )


def _validated_ds_tuple(
    matrices: Union[MatrixTuple, Iterable], settings: Settings
) -> MatrixTuple:
    matrices = as_tuple(matrices)
    is_doubly_stochastic(matrices, settings.ds_tolerance).raise_if_failed()
    return matrices


def approx_log_mixed_disc_ds(
    matrices: Union[MatrixTuple, Iterable],
    z: Any,
    eps: float,
    rho: Optional[float] = None,
    method: str = "padded",
    settings: Optional[Settings] = None,
) -> ApproxResult:
    """
    Approximate ln D(I + z Q_1, ..., I + z Q_n) for a doubly stochastic tuple.

    The polynomial t -> D(I + t z Q_1, ...) has no zeros for
    |t| < alpha0 n / (4 |z|), which is used (shrunk by 1e-12) as the radius
    beta of the Taylor interpolation.

    Parameters
    ----------
    matrices : MatrixTuple or iterable of arrays
        Doubly stochastic tuple (validated at ``Settings.ds_tolerance``)
    z : complex
        Evaluation point, |z| < alpha0 n / 4
    eps : float
        Target additive accuracy in (0, 1)
    rho : float, optional
        If given, additionally require rho < alpha0 / 4 and |z| <= rho n

    Raises
    ------
    DomainError
        If the tuple is not doubly stochastic or z lies outside the radius

    Examples
    --------
    >>> result = approx_log_mixed_disc_ds([np.eye(2) / 2] * 2, 0.0, 1e-3)
    >>> result.log_value
    (0.6931471805599453+0j)
    """
    settings = settings or get_settings()
    matrices = _validated_ds_tuple(matrices, settings)
    eps = open_unit("eps", eps)
    z = parse_complex(z)
    n = matrices.n
    radius = STABILITY.ds_rho_limit * n
    if rho is not None:
        rho = IntervalParameter("rho", rho, low=0.0, high=STABILITY.ds_rho_limit).value
        if abs(z) > rho * n * (1 + settings.norm_tolerance):
            raise DomainError("|z|", message=f"|z| = {abs(z):.6g} exceeds rho n = {rho * n:.6g}")
    if abs(z) >= radius:
        raise DomainError(
            "|z|", message=f"|z| = {abs(z):.6g} must be below alpha0 n / 4 = {radius:.6g}"
        )
    if z == 0:
        return ApproxResult(
            log_value=complex(math.lgamma(n + 1)),
            degree=0,
            truncation_bound=0.0,
            beta=math.inf,
            n=n,
            details={"method": method, "derivative_orders": 0},
        )
    beta = radius / abs(z) * RADIUS_SAFETY
    stack = z * matrices.stack().astype(complex)
    return interpolate_log_discriminant(stack, beta, eps, method, settings)


def approx_log_contracted(
    matrices: Union[MatrixTuple, Iterable],
    gamma: float,
    eps: float,
    method: str = "padded",
    settings: Optional[Settings] = None,
) -> ApproxResult:
    """
    Approximate ln D((1 - gamma) C + gamma X) for a doubly stochastic X,
    where C = (I/n, ..., I/n) is the center of the doubly stochastic body.

    Uses ``D((1 - gamma) I/n + gamma Q_k) = ((1 - gamma)/n)^n D(I + z Q_k)``
    with ``z = gamma n / (1 - gamma)``.

    Raises
    ------
    DomainError
        If gamma / (1 - gamma) >= alpha0 / 4
    """
    gamma = open_unit("gamma", gamma)
    matrices = as_tuple(matrices)
    n = matrices.n
    ratio = gamma / (1 - gamma)
    if ratio >= STABILITY.ds_rho_limit:
        raise DomainError(
            "contraction",
            message=f"gamma / (1 - gamma) = {ratio:.6g} must be below alpha0 / 4 = "
            f"{STABILITY.ds_rho_limit:.6g}",
        )
    inner = approx_log_mixed_disc_ds(matrices, ratio * n, eps, method=method, settings=settings)
    offset = n * math.log((1 - gamma) / n)
    return inner.shifted(offset, z=ratio * n, gamma=gamma)


def verify_zero_free_ds(
    n: int,
    samples: int,
    grid: int,
    seed: int,
    settings: Optional[Settings] = None,
) -> ZeroFreeReport:
    """
    Sample D(I + z Q_1, ..., I + z Q_n) for random doubly stochastic tuples and
    z on a polar grid of the open disc |z| < alpha0 n / 4.

    Each sample evaluates ``grid`` radii times ``grid`` angles; ratios are
    |D| / n!.
    """
    # On demand import because the generators depend on the scaling module
    from .generators import gen_ds_tuple

    settings = settings or get_settings()
    check_cap("mixed discriminant dimension", n, settings.exact_cap)
    radius = STABILITY.ds_rho_limit * n * RADIUS_SAFETY
    radii = radius * np.arange(1, grid + 1) / grid
    angles = 2 * np.pi * np.arange(grid) / grid
    identity = np.eye(n)
    tracker = ZeroFreeTracker("doubly stochastic disc", n)
    for sample in range(samples):
        stack = gen_ds_tuple(n, seed=[seed, sample]).stack()
        for r in radii:
            for angle in angles:
                z = complex(r * np.cos(angle), r * np.sin(angle))
                value = mixed_discriminant_exact(identity + z * stack, settings=settings)
                tracker.record(sample, abs(value) / math.factorial(n), z)
    return tracker.report()
