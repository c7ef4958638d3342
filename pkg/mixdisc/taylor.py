"""
Taylor interpolation of the logarithm of a polynomial that does not vanish on
a disc of radius beta > 1 around the origin.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

from .support import (
    DomainError,
    InputError,
    ResourceLimitError,
    compensated_sum,
    warn_unvalidated,
)

logger = logging.getLogger(__name__)

MACHINE_EPSILON = 2.0**-52
DEGREE_SEARCH_LIMIT = 10_000_000


def _finite(value: complex) -> bool:
    return math.isfinite(value.real) and math.isfinite(value.imag)


@dataclass(frozen=True)
class DerivativeSequence:
    """
    Value and normalized derivatives of a polynomial g at 0.

    Parameters
    ----------
    g0 : complex
        g(0), nonzero. May be ``inf`` when g(0) overflows double precision, in
        which case ``log_g0`` must be given.
    normalized_derivs : sequence of complex
        Entry k-1 holds ``g^(k)(0) / (k! g(0))`` for k = 1..m
    log_g0 : complex, optional
        ln g(0) on the principal branch. Computed from g0 when omitted.

    Raises
    ------
    DomainError
        If g(0) = 0
    InputError
        If a derivative is not finite
    """

    g0: complex
    normalized_derivs: Sequence[complex] = ()
    log_g0: Optional[complex] = None

    def __post_init__(self):
        object.__setattr__(self, "g0", complex(self.g0))
        object.__setattr__(
            self, "normalized_derivs", tuple(complex(d) for d in self.normalized_derivs)
        )
        if self.g0 == 0:
            raise DomainError("g(0)", message="the value at the expansion point is zero")
        if not all(_finite(d) for d in self.normalized_derivs):
            raise InputError("derivative sequence", "derivatives must be finite")
        if self.log_g0 is None:
            if not _finite(self.g0):
                raise InputError("derivative sequence", "log_g0 is required when g0 overflows")
            object.__setattr__(self, "log_g0", cmath.log(self.g0))
        else:
            object.__setattr__(self, "log_g0", complex(self.log_g0))

    @classmethod
    def from_log(cls, log_g0: complex, normalized_derivs: Sequence[complex]):
        """Build a sequence from ln g(0), without requiring g(0) to fit a double."""
        try:
            g0 = cmath.exp(log_g0)
        except OverflowError:
            g0 = complex(math.inf)
        return cls(g0, normalized_derivs, log_g0)

    @classmethod
    def from_raw(cls, g0: complex, raw_derivs: Sequence[complex]):
        """Build a sequence from g(0) and the raw derivatives g^(k)(0)."""
        g0 = complex(g0)
        if g0 == 0:
            raise DomainError("g(0)", message="the value at the expansion point is zero")
        return cls(
            g0,
            [d / (math.factorial(k) * g0) for k, d in enumerate(raw_derivs, start=1)],
        )

    @property
    def degree(self) -> int:
        return len(self.normalized_derivs)

    def extended(self, degree: int) -> "DerivativeSequence":
        """Pad with zero derivatives (exact for orders above the degree of g)."""
        missing = max(0, degree - self.degree)
        return replace(self, normalized_derivs=self.normalized_derivs + (0j,) * missing)

    def raw_derivatives(self) -> List[complex]:
        """g^(k)(0) for k = 1..m."""
        return [
            math.factorial(k) * self.g0 * d
            for k, d in enumerate(self.normalized_derivs, start=1)
        ]


@dataclass(frozen=True)
class ApproxResult:
    """
    Approximate logarithm with its certified truncation bound.

    Attributes
    ----------
    log_value : complex
        Approximation of ln g(1); the imaginary part carries the winding of the
        Taylor coefficients (the branch is fixed at 0, not at 1)
    degree : int
        Taylor degree m
    truncation_bound : float
        ``n / (beta^m (beta - 1) (m + 1))``, or ``inf`` for an unvalidated
        evaluation
    beta : float
        Certified zero-free radius (``inf`` when g is constant)
    n : int
        Number of roots of g counted by the bound
    rounding_estimate : float
        Floating-point error diagnostic of the Taylor sum, reported separately
        from the truncation bound
    """

    log_value: complex
    degree: int
    truncation_bound: float
    beta: float
    n: int
    rounding_estimate: float = 0.0
    details: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def relative_error_bound(self) -> float:
        """Bound on the relative error of ``value()``: e^bound - 1."""
        return math.expm1(self.truncation_bound)

    def value(self) -> complex:
        """exp(log_value); may overflow to infinity for large instances."""
        try:
            return cmath.exp(self.log_value)
        except OverflowError:
            return complex(math.inf)

    def shifted(self, offset: complex, **details: Any) -> "ApproxResult":
        """Same result for ``ln(c g)``, with ``offset = ln c``."""
        merged = {**self.details, **details}
        return replace(self, log_value=self.log_value + offset, details=merged)


def truncation_bound(n: int, beta: float, degree: int) -> float:
    """Error bound n / (beta^m (beta - 1) (m + 1)) of the degree-m Taylor polynomial."""
    if math.isinf(beta):
        return 0.0
    if not beta > 1:
        return math.inf
    log_bound = (
        math.log(n)
        - degree * math.log(beta)
        - math.log(beta - 1)
        - math.log(degree + 1)
    )
    return math.exp(log_bound)


def degree_for_accuracy(n: int, beta: float, eps: float) -> int:
    """
    Smallest Taylor degree whose truncation bound is at most eps.

    Parameters
    ----------
    n : int
        Degree of the polynomial (number of roots), n >= 1
    beta : float
        Zero-free radius, beta > 1 (``inf`` gives degree 0)
    eps : float
        Target additive accuracy in (0, 1)

    Raises
    ------
    DomainError
        If beta <= 1
    InputError
        If n < 1 or eps is outside (0, 1)

    Examples
    --------
    >>> degree_for_accuracy(1, 11.0, 0.2)
    0
    >>> degree_for_accuracy(2, 2.0, 0.011)
    5
    """
    if not beta > 1:
        raise DomainError("beta", message=f"zero-free radius {beta} must exceed 1")
    if int(n) != n or n < 1:
        raise InputError("n", f"must be a positive integer, got {n}")
    if not 0 < eps < 1:
        raise InputError("eps", f"must lie in (0, 1), got {eps}")
    if math.isinf(beta):
        return 0
    # truncation_bound(n, beta, upper) <= eps up to rounding
    upper = max(0, math.ceil(math.log(n / (eps * (beta - 1))) / math.log(beta)))
    while truncation_bound(n, beta, upper) > eps:
        upper += 1
    if upper > DEGREE_SEARCH_LIMIT:
        if truncation_bound(n, beta, DEGREE_SEARCH_LIMIT) > eps:
            raise ResourceLimitError("Taylor degree", upper, DEGREE_SEARCH_LIMIT)
        upper = DEGREE_SEARCH_LIMIT
    lower = -1
    while upper - lower > 1:
        middle = (lower + upper) // 2
        if truncation_bound(n, beta, middle) <= eps:
            upper = middle
        else:
            lower = middle
    return upper


def log_derivatives(sequence: DerivativeSequence) -> List[complex]:
    """
    Taylor coefficients f^(k)(0)/k! of f = ln g for k = 1..m.

    Solves the triangular system relating the derivatives of g and ln g by
    forward substitution, in normalized form:
    ``f_k = g_k - (1/k) sum_{j<k} j f_j g_{k-j}``.

    Examples
    --------
    >>> log_derivatives(DerivativeSequence(1.0, [1, 0, 0]))
    [(1+0j), (-0.5+0j), (0.3333333333333333+0j)]
    """
    g = (1 + 0j,) + sequence.normalized_derivs
    f = [0j] * len(g)
    for k in range(1, len(g)):
        coupling = compensated_sum([j * f[j] * g[k - j] for j in range(1, k)])
        f[k] = g[k] - coupling / k
    return f[1:]


def taylor_log_at_one(
    sequence: DerivativeSequence,
    n: int,
    beta: float,
    validate: bool = True,
) -> ApproxResult:
    """
    Evaluate the degree-m Taylor polynomial of ln g at 1.

    Parameters
    ----------
    sequence : DerivativeSequence
        g(0) and the normalized derivatives up to order m
    n : int
        Degree of g
    beta : float
        Certified zero-free radius, beta > 1
    validate : bool
        When False, beta <= 1 is accepted: the sum is evaluated, an
        UnvalidatedEvaluationWarning is emitted and the bound is ``inf``

    Raises
    ------
    DomainError
        If beta <= 1 and ``validate`` is True

    Examples
    --------
    >>> result = taylor_log_at_one(DerivativeSequence(1.0, [-1.0, 0.25, 0, 0, 0]), 2, 2.0)
    >>> round(result.log_value.real, 5), round(result.truncation_bound, 5)
    (-1.37708, 0.01042)
    """
    if not beta > 1:
        if validate:
            raise DomainError("beta", message=f"zero-free radius {beta} must exceed 1")
        warn_unvalidated(
            f"Taylor sum evaluated with beta = {beta}, no truncation bound applies"
        )
    coefficients = log_derivatives(sequence)
    log_value = sequence.log_g0 + compensated_sum(coefficients)
    degree = sequence.degree
    bound = truncation_bound(n, beta, degree)
    magnitude = abs(sequence.log_g0) + sum(abs(c) for c in coefficients)
    rounding = MACHINE_EPSILON * (degree + 1) * magnitude
    logger.debug(
        "Taylor degree %d, beta %.6g, truncation bound %.3e, rounding %.3e",
        degree,
        beta,
        bound,
        rounding,
    )
    return ApproxResult(
        log_value=log_value,
        degree=degree,
        truncation_bound=bound,
        beta=beta,
        n=n,
        rounding_estimate=rounding,
    )
