import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from itertools import islice
from typing import Any, Callable, Iterable, Iterator, List, Optional, Sequence, TypeVar
from warnings import warn

import numpy as np
from scipy.optimize import bisect

logger = logging.getLogger(__name__)

W = TypeVar("W")
R = TypeVar("R")


class MixdiscError(Exception):
    """Base class for every error raised by mixdisc.

    The ``exit_code`` class attribute is the process exit status used by the
    command line front end when the error escapes a subcommand.
    """

    exit_code: int = 1


class InputError(MixdiscError, ValueError):
    """
    Exception raised when an input is malformed (wrong shape, non-finite entries,
    mismatched dimensions, out-of-range indices).

    Parameters
    ----------
    what : str
        Short description of the offending input
    message : str, optional
        Additional error details
    """

    def __init__(self, what: str, message: Optional[str] = None):
        self.what = what
        self.message = message
        super().__init__(f"Invalid {what}" + (f": {message}" if message else ""))


class ParameterError(InputError):
    """
    Exception raised when a scalar parameter fails validation.

    Parameters
    ----------
    parameter_name : str
        Name of the parameter that failed validation
    parameter_type : str
        Type of the parameter that failed validation
    message : str, optional
        Additional error details
    """

    def __init__(self, parameter_name: str, parameter_type: str, message: str = None):
        self.parameter_name = parameter_name
        self.parameter_type = parameter_type
        MixdiscError.__init__(
            self,
            f"Invalid {parameter_type} parameter '{parameter_name}'"
            + (f": {message}" if message else ""),
        )
        self.what = parameter_name
        self.message = message


class DomainError(MixdiscError, ValueError):
    """
    Exception raised when an instance lies outside the region where a result is
    certified (a norm above the stability constant, a point outside the disc,
    a tuple that is not doubly stochastic, ...).

    Parameters
    ----------
    quantity : str
        The quantity that violates its domain
    indices : sequence of int, optional
        Indices of the offending matrices or points (0-based)
    message : str, optional
        Additional error details
    """

    def __init__(
        self,
        quantity: str,
        indices: Sequence[int] = (),
        message: Optional[str] = None,
    ):
        self.quantity = quantity
        self.indices = tuple(int(i) for i in indices)
        self.message = message
        text = f"{quantity} outside the certified domain"
        if self.indices:
            text += f" at indices {list(self.indices)}"
        super().__init__(text + (f": {message}" if message else ""))


class ResourceLimitError(MixdiscError, RuntimeError):
    """
    Exception raised when a computation would exceed a configured cap.

    Parameters
    ----------
    what : str
        Name of the capped quantity (dimension, Taylor degree, evaluations, ...)
    required : int
        Value the computation needs
    cap : int
        The configured cap
    """

    exit_code = 2

    def __init__(self, what: str, required: int, cap: int):
        self.what = what
        self.required = required
        self.cap = cap
        super().__init__(
            f"{what} requires {required}, above the configured cap of {cap}"
        )


class ConvergenceError(MixdiscError, RuntimeError):
    """
    Exception raised when an iteration stops before reaching its tolerance.

    Parameters
    ----------
    iterations : int
        Number of iterations performed
    residual : float
        Residual after the final iteration
    tol : float
        The requested tolerance
    """

    exit_code = 2

    def __init__(self, iterations: int, residual: float, tol: float):
        self.iterations = iterations
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"No convergence after {iterations} iterations: "
            f"residual {residual:.3e} > tolerance {tol:.3e}"
        )


class InstanceFileError(MixdiscError, OSError):
    """
    Exception raised when an instance file cannot be read, parsed or written.

    Parameters
    ----------
    path : str
        The file involved
    message : str, optional
        Additional error details
    """

    exit_code = 3

    def __init__(self, path: str, message: Optional[str] = None):
        self.path = path
        self.message = message
        super().__init__(
            f"Cannot use instance file '{path}'" + (f": {message}" if message else "")
        )


class MixdiscWarning(Warning):
    """Base class for non-critical conditions reported by mixdisc."""


class DomainBoundaryWarning(MixdiscWarning):
    """
    Warning raised when an input is accepted only because it lies within the
    numerical tolerance of a closed domain boundary.

    Parameters
    ----------
    quantity : str
        The quantity at the boundary
    message : str, optional
        Additional warning details
    """

    def __init__(self, quantity: str, message: str = None):
        self.quantity = quantity
        super().__init__(
            f"{quantity} accepted within tolerance of the domain boundary"
            + (f": {message}" if message else "")
        )


class UnvalidatedEvaluationWarning(MixdiscWarning):
    """Warning raised when a Taylor sum is evaluated without a certified radius."""


class SettingsWarning(MixdiscWarning):
    """Warning raised when a setting had to be adjusted."""


def warn_domain_boundary(quantity: str, message: str = None):
    """
    Warn the user that an input sits on the tolerance band of a closed boundary.
    """
    warn(DomainBoundaryWarning(quantity, message), stacklevel=3)


def warn_unvalidated(message: str):
    warn(UnvalidatedEvaluationWarning(message), stacklevel=3)


def warn_settings(name: str, message: str):
    warn(SettingsWarning(f"Setting '{name}': {message}"), stacklevel=3)


def _solve_alpha0() -> float:
    return bisect(lambda a: a * math.exp(1.0 + a) - 1.0, 0.0, 1.0, xtol=1e-14)


@dataclass(frozen=True)
class StabilityConstants:
    """
    Absolute constants of the zero-free regions.

    Parameters
    ----------
    gamma0 : float
        Operator norm bound on Q_k for the polydisc region (default 0.045)
    delta, tau : float
        The pair used to certify gamma0 (defaults 0.045 and 0.4)
    alpha0 : float
        Positive root of alpha * exp(1 + alpha) = 1 (about 0.2784), found by
        bisection at import time

    Raises
    ------
    ValueError
        If the constants are not mutually consistent
    """

    gamma0: float = 0.045
    delta: float = 0.045
    tau: float = 0.4
    alpha0: float = field(default_factory=_solve_alpha0)

    def __post_init__(self):
        if not self.delta + self.tau + self.delta * self.tau < 1:
            raise ValueError("delta + tau + delta * tau must be below 1")
        consistency = 4 * self.delta / self.mu + 8 * self.delta**2 / self.mu**2
        if consistency > self.tau:
            raise ValueError(
                f"4 delta/mu + 8 delta^2/mu^2 = {consistency:.6f} exceeds tau = {self.tau}"
            )
        if abs(self.alpha0 * math.exp(1 + self.alpha0) - 1) > 1e-12:
            raise ValueError(f"alpha0 = {self.alpha0!r} does not solve a e^(1+a) = 1")

    @property
    def mu(self) -> float:
        return 1 - self.delta - self.tau - self.delta * self.tau

    @property
    def ds_rho_limit(self) -> float:
        """Supremum of admissible rho in the doubly stochastic regime, alpha0 / 4."""
        return self.alpha0 / 4


STABILITY = StabilityConstants()


def _default_threads() -> int:
    configured = os.environ.get("MIXDISC_THREADS")
    if configured:
        try:
            return int(configured)
        except ValueError:
            warn_settings("threads", f"MIXDISC_THREADS={configured!r} is not an integer")
    return os.cpu_count() or 1


@dataclass
class Settings:
    """
    Process-wide configuration: oracle caps, cost caps, tolerances and parallelism.

    Parameters
    ----------
    exact_cap : int
        Largest n for the polarization mixed discriminant oracle (default 14)
    permutation_cap : int
        Largest n for the direct double-permutation oracle (default 5)
    permanent_cap : int
        Largest n for the Ryser permanent (default 20)
    minor_cap : int
        Largest n for exact principal-minor power sums (default 20)
    max_degree : int
        Largest Taylor degree an approximation may request (default 500)
    max_evaluations : int
        Largest number of subset evaluations one derivative computation may
        perform (default 50 million)
    chunk_size : int
        Size of the fixed work units subsets are summed in. Results depend on
        this value but never on ``threads``.
    threads : int
        Worker threads for chunk evaluation (default ``MIXDISC_THREADS`` or the
        number of cores)
    norm_tolerance : float
        Slack accepted on closed norm and modulus bounds (default 1e-9)
    ds_tolerance : float
        Tolerance of the doubly stochastic validation (default 1e-9)
    symmetry_tolerance : float
        Largest asymmetry accepted by SymmetricMatrix (default 1e-12)
    """

    exact_cap: int = 14
    permutation_cap: int = 5
    permanent_cap: int = 20
    minor_cap: int = 20
    max_degree: int = 500
    max_evaluations: int = 50_000_000
    chunk_size: int = 2048
    threads: int = field(default_factory=_default_threads)
    norm_tolerance: float = 1e-9
    ds_tolerance: float = 1e-9
    symmetry_tolerance: float = 1e-12

    def __post_init__(self):
        for name in (
            "exact_cap",
            "permutation_cap",
            "permanent_cap",
            "minor_cap",
            "max_degree",
            "max_evaluations",
            "chunk_size",
        ):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"Setting {name} must be a positive integer")
        for name in ("norm_tolerance", "ds_tolerance", "symmetry_tolerance"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"Setting {name} must be non-negative")
        if self.threads < 1:
            warn_settings("threads", f"{self.threads} is below 1, using 1")
            self.threads = 1


_settings = Settings()


def get_settings() -> Settings:
    """Return the active process-wide settings."""
    return _settings


def configure(**changes: Any) -> Settings:
    """
    Replace fields of the process-wide settings.

    Examples
    --------
    >>> configure(threads=4, exact_cap=12)
    """
    global _settings
    _settings = replace(_settings, **changes)
    return _settings


@contextmanager
def override_settings(**changes: Any):
    """Temporarily replace fields of the process-wide settings."""
    global _settings
    previous = _settings
    _settings = replace(previous, **changes)
    try:
        yield _settings
    finally:
        _settings = previous


def check_cap(what: str, required: int, cap: int) -> None:
    """Raise ResourceLimitError if ``required`` exceeds ``cap``."""
    if required > cap:
        raise ResourceLimitError(what, required, cap)


def compensated_sum(values: Any) -> complex:
    """
    Sum complex values with exactly rounded (error-free) accumulation.

    The real and imaginary parts are summed separately by ``math.fsum`` so the
    result does not depend on the order of the terms.
    """
    values = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(values.real), math.fsum(values.imag))


def compensated_column_sums(rows: Sequence[np.ndarray]) -> np.ndarray:
    """Column-wise compensated sums of a list of equal-length complex vectors."""
    if not rows:
        return np.zeros(0, dtype=complex)
    table = np.asarray(rows, dtype=complex)
    return np.array([compensated_sum(table[:, j]) for j in range(table.shape[1])])


def chunked(items: Iterable[W], size: int) -> Iterator[List[W]]:
    """Split ``items`` into consecutive lists of ``size`` elements (the last may be shorter)."""
    iterator = iter(items)
    while True:
        block = list(islice(iterator, size))
        if not block:
            return
        yield block


def ordered_map(
    func: Callable[[W], R], work: Iterable[W], threads: Optional[int] = None
) -> List[R]:
    """
    Apply ``func`` to every work unit, returning results in input order.

    Work units run on a thread pool when more than one thread is configured.
    The ordering of the results (and therefore any reduction over them) is the
    same for every thread count.
    """
    work = list(work)
    threads = threads or get_settings().threads
    if threads <= 1 or len(work) <= 1:
        return [func(unit) for unit in work]
    with ThreadPoolExecutor(max_workers=min(threads, len(work))) as pool:
        return list(pool.map(func, work))


def reduce_chunks(
    func: Callable[[List[W]], complex],
    items: Iterable[W],
    chunk_size: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> complex:
    """
    Evaluate ``func`` on fixed-size chunks of ``items`` and sum the partial results.

    Chunk boundaries depend only on ``chunk_size``, and partial results are
    combined with ``compensated_sum``, so the value is reproducible bit for bit
    across thread counts.
    """
    settings = settings or get_settings()
    size = chunk_size or settings.chunk_size
    partials = ordered_map(func, chunked(items, size), settings.threads)
    return compensated_sum(partials)


def subset_masks(k: int) -> np.ndarray:
    """
    Indicator rows of all subsets of ``range(k)`` in lexicographic mask order.

    Row ``s`` has a one in column ``i`` exactly when bit ``i`` of ``s`` is set.
    """
    codes = np.arange(2**k, dtype=np.int64)[:, None]
    return ((codes >> np.arange(k, dtype=np.int64)) & 1).astype(float)


def polarization_signs(k: int) -> np.ndarray:
    """Signs (-1)^(k - |S|) matching the rows of ``subset_masks(k)``."""
    sizes = subset_masks(k).sum(axis=1).astype(int)
    return np.where((k - sizes) % 2 == 0, 1.0, -1.0)
