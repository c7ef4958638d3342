"""
Quasi-polynomial approximation of ln D(I + z_1 Q_1, ..., I + z_n Q_n) inside
the zero-free polydisc ||Q_k|| <= gamma0, |z_k| <= rho < 1.
"""

import logging
import math
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exact import mixed_discriminant_exact, padded_core
from .matrices import MatrixTuple, operator_norm, principal_minor_sums
from .parameters import ComplexListParameter, open_unit
from .support import (
    STABILITY,
    DomainError,
    InputError,
    Settings,
    check_cap,
    chunked,
    compensated_column_sums,
    compensated_sum,
    get_settings,
    ordered_map,
    warn_domain_boundary,
)
from .taylor import ApproxResult, DerivativeSequence, degree_for_accuracy, taylor_log_at_one

logger = logging.getLogger(__name__)

DERIVATIVE_METHODS = ("padded", "minor_sums")


@dataclass(frozen=True)
class PolydiscInstance:
    """
    An instance of the polydisc approximation problem.

    Parameters
    ----------
    matrices : MatrixTuple or iterable of arrays
        The real symmetric Q_1, ..., Q_n, each of dimension n
    points : sequence of complex
        The z_1, ..., z_n
    rho : float
        Radius bound on |z_k|, in (0, 1)
    eps : float
        Target additive accuracy of the logarithm, in (0, 1)

    Raises
    ------
    InputError
        If the shapes disagree or a matrix is not symmetric
    ParameterError
        If rho or eps lies outside (0, 1)
    """

    matrices: MatrixTuple
    points: Tuple[complex, ...]
    rho: float
    eps: float

    def __post_init__(self):
        matrices = MatrixTuple.symmetric(self.matrices)
        if matrices.count != matrices.n:
            raise InputError(
                "PolydiscInstance",
                f"expected n matrices of dimension n, got {matrices.count} of dimension {matrices.n}",
            )
        points = ComplexListParameter("points", self.points, length=matrices.n).value
        object.__setattr__(self, "matrices", matrices)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "rho", open_unit("rho", self.rho))
        object.__setattr__(self, "eps", open_unit("eps", self.eps))

    @property
    def n(self) -> int:
        return self.matrices.n

    def scaled_stack(self) -> np.ndarray:
        """The (n, n, n) stack of A_k = z_k Q_k."""
        return np.asarray(self.points)[:, None, None] * self.matrices.stack()


@dataclass(frozen=True)
class DomainReport:
    """Per-matrix norms and per-point moduli against the polydisc bounds."""

    norms: Tuple[float, ...]
    moduli: Tuple[float, ...]
    gamma0: float
    rho: float
    tolerance: float

    @property
    def norm_violations(self) -> Tuple[int, ...]:
        limit = self.gamma0 + self.tolerance
        return tuple(i for i, norm in enumerate(self.norms) if norm > limit)

    @property
    def point_violations(self) -> Tuple[int, ...]:
        limit = self.rho + self.tolerance
        return tuple(i for i, modulus in enumerate(self.moduli) if modulus > limit)

    @property
    def passed(self) -> bool:
        return not self.norm_violations and not self.point_violations

    def __bool__(self) -> bool:
        return self.passed

    def raise_if_failed(self) -> None:
        """Raise DomainError naming the offending matrices or points."""
        if self.norm_violations:
            worst = max(self.norms[i] for i in self.norm_violations)
            raise DomainError(
                "operator norm of Q_k",
                self.norm_violations,
                f"largest norm {worst:.6g} exceeds gamma0 = {self.gamma0}",
            )
        if self.point_violations:
            worst = max(self.moduli[i] for i in self.point_violations)
            raise DomainError(
                "point modulus |z_k|",
                self.point_violations,
                f"largest modulus {worst:.6g} exceeds rho = {self.rho}",
            )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "norms": list(self.norms),
            "moduli": list(self.moduli),
            "gamma0": self.gamma0,
            "rho": self.rho,
            "norm_violations": list(self.norm_violations),
            "point_violations": list(self.point_violations),
            "passed": self.passed,
        }


def check_domain(
    instance: PolydiscInstance, settings: Optional[Settings] = None
) -> DomainReport:
    """
    Check ||Q_k|| <= gamma0 and |z_k| <= rho for every k.

    Values within ``Settings.norm_tolerance`` above a bound are accepted with a
    DomainBoundaryWarning. Failures are reported, not raised.

    Examples
    --------
    >>> instance = PolydiscInstance([0.045 * np.eye(2)] * 2, [0.9, 0.9], 0.9, 1e-3)
    >>> check_domain(instance).passed
    True
    """
    settings = settings or get_settings()
    report = DomainReport(
        norms=tuple(operator_norm(q) for q in instance.matrices),
        moduli=tuple(abs(z) for z in instance.points),
        gamma0=STABILITY.gamma0,
        rho=instance.rho,
        tolerance=settings.norm_tolerance,
    )
    for i, norm in enumerate(report.norms):
        if report.gamma0 < norm <= report.gamma0 + report.tolerance:
            warn_domain_boundary("operator norm of Q_k", f"index {i}, norm {norm!r}")
    for i, modulus in enumerate(report.moduli):
        if report.rho < modulus <= report.rho + report.tolerance:
            warn_domain_boundary("point modulus |z_k|", f"index {i}, modulus {modulus!r}")
    return report


def _padded_derivatives(
    stack: np.ndarray, up_to: int, settings: Settings
) -> List[complex]:
    count, n = stack.shape[0], stack.shape[1]
    check_cap(
        "derivative subset evaluations",
        sum(math.comb(count, k) * math.comb(n, k) * 2**k for k in range(1, up_to + 1)),
        settings.max_evaluations,
    )
    serial = replace(settings, threads=1)

    def evaluate(block: List[Tuple[int, ...]]) -> complex:
        return compensated_sum([padded_core(stack[list(J)], serial) for J in block])

    derivatives = []
    for k in range(1, up_to + 1):
        per_chunk = max(1, settings.chunk_size // (math.comb(n, k) * 2**k))
        blocks = chunked(combinations(range(count), k), per_chunk)
        total = compensated_sum(ordered_map(evaluate, blocks, settings.threads))
        derivatives.append(total / math.perm(n, k))
        logger.debug("derivative order %d from %d subsets", k, math.comb(count, k))
    return derivatives


def _minor_sum_derivatives(
    stack: np.ndarray, up_to: int, settings: Settings
) -> List[complex]:
    count, n = stack.shape[0], stack.shape[1]
    if count != n:
        raise InputError("minor_sums derivatives", "require n matrices of dimension n")
    check_cap(
        "derivative subset evaluations",
        sum(math.comb(n, s) * (n + 1) for s in range(1, up_to + 1)),
        settings.max_evaluations,
    )

    def evaluate(block: List[Tuple[int, ...]]) -> np.ndarray:
        index = np.array(block)
        sums = stack[index].sum(axis=1)
        minors = principal_minor_sums(sums)[:, : up_to + 1]
        return compensated_column_sums(list(minors))

    contributions: List[List[complex]] = [[] for _ in range(up_to + 1)]
    per_chunk = max(1, settings.chunk_size // (n + 1))
    for size in range(1, up_to + 1):
        blocks = chunked(combinations(range(n), size), per_chunk)
        partials = ordered_map(evaluate, blocks, settings.threads)
        by_order = compensated_column_sums(partials)
        for k in range(size, up_to + 1):
            weight = (-1) ** (k - size) * math.comb(n - size, k - size)
            contributions[k].append(weight * by_order[k])
    return [compensated_sum(contributions[k]) / math.perm(n, k) for k in range(1, up_to + 1)]


def normalized_derivatives(
    stack: np.ndarray,
    up_to: int,
    method: str = "padded",
    settings: Optional[Settings] = None,
) -> List[complex]:
    """
    Normalized derivatives of g(t) = D(I + t A_1, ..., I + t A_n) at 0.

    Entry k-1 is ``g^(k)(0) / (k! n!) = (1/n!) sum over |J| = k of
    D(I, ..., I, A_j : j in J)``.

    Parameters
    ----------
    stack : np.ndarray
        The (n, n, n) stack of the A_k
    up_to : int
        Highest order, at most n (higher derivatives vanish)
    method : {"padded", "minor_sums"}
        ``padded`` sums identity-padded mixed discriminants over the
        C(n, k) subsets J (cost C(n, k)^2 2^k k^3 per order). ``minor_sums``
        uses inclusion-exclusion over sums of principal minors
        ``E_k(sum_{j in S} A_j)`` for |S| <= k, at the cost of one batched
        determinant evaluation per subset S.

    Raises
    ------
    InputError
        If up_to exceeds n or the method is unknown
    ResourceLimitError
        If the subset count exceeds ``Settings.max_evaluations``
    """
    settings = settings or get_settings()
    stack = np.asarray(stack, dtype=complex)
    n = stack.shape[1]
    if not 0 <= up_to <= n:
        raise InputError("derivative order", f"up_to = {up_to} outside [0, {n}]")
    if up_to == 0:
        return []
    if method == "padded":
        return _padded_derivatives(stack, up_to, settings)
    if method == "minor_sums":
        return _minor_sum_derivatives(stack, up_to, settings)
    raise InputError("method", f"{method!r} is not one of {DERIVATIVE_METHODS}")


def interpolate_log_discriminant(
    stack: np.ndarray,
    beta: float,
    eps: float,
    method: str = "padded",
    settings: Optional[Settings] = None,
) -> ApproxResult:
    """
    Approximate ln D(I + A_1, ..., I + A_n) given that
    t -> D(I + t A_1, ..., I + t A_n) has no zeros in the disc |t| < beta.

    Raises
    ------
    ResourceLimitError
        If the Taylor degree needed for eps exceeds ``Settings.max_degree``
        (``required`` carries the degree)
    """
    settings = settings or get_settings()
    n = stack.shape[1]
    degree = degree_for_accuracy(n, beta, eps)
    check_cap("Taylor degree", degree, settings.max_degree)
    orders = min(degree, n)
    logger.debug("n = %d, beta = %.6g, eps = %.3g: degree %d", n, beta, eps, degree)
    derivatives = normalized_derivatives(stack, orders, method, settings)
    sequence = DerivativeSequence.from_log(math.lgamma(n + 1), derivatives).extended(degree)
    result = taylor_log_at_one(sequence, n, beta)
    return replace(result, details={"method": method, "derivative_orders": orders})


def approx_log_mixed_discriminant(
    instance: PolydiscInstance,
    method: str = "padded",
    settings: Optional[Settings] = None,
) -> ApproxResult:
    """
    Approximate ln D(I + z_1 Q_1, ..., I + z_n Q_n) within ``instance.eps``.

    The polynomial g(t) = D(I + t z_1 Q_1, ..., I + t z_n Q_n) has no zeros
    for |t| < 1/rho, so its logarithm at t = 1 is the Taylor polynomial of
    degree ``degree_for_accuracy(n, 1/rho, eps)`` up to the reported bound.

    Parameters
    ----------
    instance : PolydiscInstance
        Must pass :func:`check_domain`
    method : {"padded", "minor_sums"}
        Derivative path, see :func:`normalized_derivatives`

    Raises
    ------
    DomainError
        If the instance fails the domain check
    ResourceLimitError
        If the required Taylor degree exceeds ``Settings.max_degree``

    Examples
    --------
    >>> instance = PolydiscInstance([0.045 * np.eye(2)] * 2, [0.9, 0.9], 0.9, 1e-4)
    >>> result = approx_log_mixed_discriminant(instance)
    >>> bool(abs(result.log_value.real - np.log(2 * 1.0405**2)) <= 1e-4)
    True
    """
    settings = settings or get_settings()
    check_domain(instance, settings).raise_if_failed()
    return interpolate_log_discriminant(
        instance.scaled_stack(), 1 / instance.rho, instance.eps, method, settings
    )


def approx_log_mixed_discriminant_pd(
    matrices: Union[MatrixTuple, Iterable],
    eps: float,
    method: str = "padded",
    settings: Optional[Settings] = None,
) -> ApproxResult:
    """
    Approximate ln D(A_1, ..., A_n) for positive definite A_k close to
    multiples of the identity.

    Each A_k is written as c_k (I + R_k) with c_k the midpoint of its spectrum,
    so ||R_k|| is the spread (l_max - l_min) / (l_max + l_min). With
    rho = max spread / gamma0 < 1 the value is
    ``sum ln c_k + ln D(I + rho Q_1, ..., I + rho Q_n)`` for Q_k = R_k / rho,
    approximated in the polydisc.

    Raises
    ------
    DomainError
        If some A_k is not positive definite, or its eigenvalue ratio is at
        least (1 + gamma0) / (1 - gamma0)
    """
    settings = settings or get_settings()
    matrices = MatrixTuple.symmetric(matrices)
    eps = open_unit("eps", eps)
    if matrices.count != matrices.n:
        raise InputError("MatrixTuple", "expected n matrices of dimension n")
    n = matrices.n
    stack = matrices.stack()
    spectra = np.linalg.eigvalsh(stack)
    low, high = spectra[:, 0], spectra[:, -1]
    not_definite = np.flatnonzero(low <= 0)
    if not_definite.size:
        raise DomainError("positive definiteness", not_definite)
    centers = (high + low) / 2
    spreads = (high - low) / (high + low)
    ratio = float(np.max(spreads)) / STABILITY.gamma0
    safety = 1 - 1e-12
    if ratio >= safety:
        raise DomainError(
            "eigenvalue spread",
            np.flatnonzero(spreads / STABILITY.gamma0 >= safety),
            f"spread must stay below gamma0 = {STABILITY.gamma0}",
        )
    offset = float(np.sum(np.log(centers)))
    if ratio == 0:
        return ApproxResult(
            log_value=complex(math.lgamma(n + 1) + offset),
            degree=0,
            truncation_bound=0.0,
            beta=math.inf,
            n=n,
            details={"method": method, "derivative_orders": 0, "log_scale": offset},
        )
    rho = ratio / safety
    residuals = stack / centers[:, None, None] - np.eye(n)
    residuals = (residuals + residuals.transpose(0, 2, 1)) / 2
    instance = PolydiscInstance(list(residuals * (safety / ratio)), [rho] * n, rho, eps)
    result = approx_log_mixed_discriminant(instance, method, settings)
    return result.shifted(offset, log_scale=offset, rho=rho)


@dataclass(frozen=True)
class ZeroFreeReport:
    """
    Outcome of a sampled zero-free check.

    ``min_ratio`` is the smallest |value| / normalization seen, and
    ``zeros`` lists the samples whose ratio is at or below ``tolerance``.
    """

    region: str
    n: int
    samples: int
    evaluations: int
    min_ratio: float
    worst_sample: int
    worst_point: complex
    zeros: Tuple[int, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return not self.zeros

    def as_dict(self) -> Dict[str, Any]:
        return {
            "region": self.region,
            "n": self.n,
            "samples": self.samples,
            "evaluations": self.evaluations,
            "min_ratio": self.min_ratio,
            "worst_sample": self.worst_sample,
            "worst_point": self.worst_point,
            "zeros": list(self.zeros),
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


class ZeroFreeTracker:
    """Accumulates sampled moduli into a ZeroFreeReport."""

    def __init__(self, region: str, n: int, tolerance: float = 1e-12):
        self.region = region
        self.n = n
        self.tolerance = tolerance
        self.evaluations = 0
        self.samples = 0
        self.min_ratio = math.inf
        self.worst_sample = -1
        self.worst_point = 0j
        self.zeros: List[int] = []

    def record(self, sample: int, ratio: float, point: complex = 0j) -> None:
        self.evaluations += 1
        self.samples = max(self.samples, sample + 1)
        if ratio < self.min_ratio:
            self.min_ratio, self.worst_sample, self.worst_point = ratio, sample, point
        if ratio <= self.tolerance and (not self.zeros or self.zeros[-1] != sample):
            self.zeros.append(sample)

    def report(self) -> ZeroFreeReport:
        if self.zeros:
            logger.warning(
                "%s: %d samples with a value at or below %.1e",
                self.region,
                len(self.zeros),
                self.tolerance,
            )
        return ZeroFreeReport(
            region=self.region,
            n=self.n,
            samples=self.samples,
            evaluations=self.evaluations,
            min_ratio=self.min_ratio,
            worst_sample=self.worst_sample,
            worst_point=self.worst_point,
            zeros=tuple(self.zeros),
            tolerance=self.tolerance,
        )


def verify_zero_free_polydisc(
    n: int,
    samples: int,
    grid: int,
    seed: int,
    boundary: bool = False,
    settings: Optional[Settings] = None,
) -> ZeroFreeReport:
    """
    Sample the polydisc region: random Q_k with ||Q_k|| <= gamma0 and points
    |z_k| <= 1 on a polar grid, evaluating D(I + z_1 Q_1, ...) exactly.

    Parameters
    ----------
    n : int
        Dimension, at most ``Settings.exact_cap``
    samples : int
        Number of random instances
    grid : int
        Number of angles (and, for interior points, radii) of the polar grid
    seed : int
        Base seed; sample i uses the seed sequence (seed, i)
    boundary : bool
        Place every point on the unit circle

    Returns
    -------
    ZeroFreeReport
        Ratios are |D| / n!; a ratio at or below 1e-12 counts as a zero
    """
    # On demand import because the generators depend on the scaling module
    from .generators import gen_points, gen_symmetric_tuple

    settings = settings or get_settings()
    check_cap("mixed discriminant dimension", n, settings.exact_cap)
    tracker = ZeroFreeTracker("polydisc", n)
    identity = np.eye(n)
    for sample in range(samples):
        matrices = gen_symmetric_tuple(n, STABILITY.gamma0, seed=[seed, sample])
        points = gen_points(n, 1.0, seed=[seed, sample, 1], grid=grid, boundary=boundary)
        shifted = [identity + z * q.entries for z, q in zip(points, matrices)]
        value = mixed_discriminant_exact(shifted, settings=settings)
        worst = max(points, key=abs)
        tracker.record(sample, abs(value) / math.factorial(n), worst)
    return tracker.report()
