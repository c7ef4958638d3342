"""
Mixed characteristic polynomials, the coefficient-wise star product, the
truncated exponential and the root-bound check for PSD decompositions of I.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, Iterable, Sequence, Tuple, Union, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .exact import padded_core
from .matrices import MatrixTuple, as_tuple, operator_norm
from .parameters import positive
from .support import (
    DomainError,
    InputError,
    Settings,
    check_cap,
    compensated_sum,
    get_settings,
)

logger = logging.getLogger(__name__)

REALNESS_TOLERANCE = 1e-6


@dataclass(init=False, frozen=True, eq=False)
class Poly:
    """
    Univariate polynomial with complex coefficients, lowest degree first.

    Trailing zero coefficients are dropped, so the leading coefficient is
    nonzero. The zero polynomial has no coefficients and degree -1.

    Examples
    --------
    >>> p = Poly([1, -2, 1])
    >>> p.degree, p(1.0)
    (2, 0j)
    """

    coeffs: Tuple[complex, ...]

    def __init__(self, coeffs: Iterable[complex]):
        values = [complex(c) for c in coeffs]
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in values):
            raise InputError("polynomial", "coefficients must be finite")
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0) -> "Poly":
        """The polynomial ``leading * prod (z - r)``."""
        return cls(complex(leading) * np.asarray(P.polyfromroots(list(roots)), dtype=complex))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> complex:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0j

    def padded(self, n: int) -> np.ndarray:
        """Coefficients 0..n as an array, zero padded."""
        if self.degree > n:
            raise InputError("polynomial", f"degree {self.degree} exceeds {n}")
        out = np.zeros(n + 1, dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def __call__(self, z: Any) -> Any:
        if not self.coeffs:
            return 0j * np.asarray(z)
        return P.polyval(z, np.asarray(self.coeffs))

    def reversed(self, n: int) -> "Poly":
        """z^n p(1/z), for degree at most n."""
        return Poly(self.padded(n)[::-1])

    def roots(self) -> np.ndarray:
        """All roots, as eigenvalues of the (balanced) companion matrix."""
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return np.asarray(P.polyroots(np.asarray(self.coeffs)), dtype=complex)

    def min_root_modulus(self) -> float:
        roots = self.roots()
        return float(np.min(np.abs(roots))) if roots.size else math.inf

    def allclose(self, other: "Poly", rtol: float = 1e-9, atol: float = 1e-12) -> bool:
        n = max(self.degree, other.degree, 0)
        return bool(np.allclose(self.padded(n), other.padded(n), rtol=rtol, atol=atol))

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)})"


def mixed_char_poly_coeffs(
    matrices: Union[MatrixTuple, Iterable], settings: Optional[Settings] = None
) -> Poly:
    """
    Mixed characteristic polynomial of m matrices of dimension n.

    The coefficient of x^k is
    ``(-1)^(n+k) sum over |J| = n-k of D(I, ..., I, A_j : j in J) / k!``,
    each padded discriminant evaluated by principal-submatrix decomposition;
    orders with n - k > m vanish.

    Raises
    ------
    ResourceLimitError
        If the total subset count exceeds ``Settings.max_evaluations``

    Examples
    --------
    >>> mixed_char_poly_coeffs([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    Poly([(1+0j), (-2+0j), (1+0j)])
    """
    settings = settings or get_settings()
    matrices = as_tuple(matrices)
    m, n = matrices.count, matrices.n
    check_cap(
        "characteristic polynomial subset evaluations",
        sum(math.comb(m, j) * math.comb(n, j) * 2**j for j in range(min(m, n) + 1)),
        settings.max_evaluations,
    )
    stack = matrices.stack().astype(complex)
    coeffs = []
    for k in range(n + 1):
        size = n - k
        if size > m:
            coeffs.append(0j)
            continue
        total = compensated_sum(
            [padded_core(stack[list(J)], settings) for J in combinations(range(m), size)]
        )
        coeffs.append((-1) ** (n + k) * total)
    return Poly(coeffs)


def star_product(q: Poly, r: Poly, n: int) -> Poly:
    """
    Coefficient-wise product s_k = q_k r_k / C(n, k), k = 0..n.

    If q has no zeros in |z| < lam and r none in |z| < mu, s has none in
    |z| < lam * mu.

    Raises
    ------
    InputError
        If either polynomial has degree above n
    """
    binomials = np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)
    return Poly(q.padded(n) * r.padded(n) / binomials)


def exp_partial_sum(n: int) -> Poly:
    """The truncated exponential sum_{k <= n} z^k / k!."""
    if int(n) != n or n < 0:
        raise InputError("degree", f"n must be a non-negative integer, got {n}")
    return Poly([1 / math.factorial(k) for k in range(int(n) + 1)])


def ds_stability_polynomial(
    matrices: Union[MatrixTuple, Iterable], settings: Optional[Settings] = None
) -> Poly:
    """
    The polynomial z -> D(I - z Q_1, ..., I - z Q_n) / n!, built as the star
    product of the reversed mixed characteristic polynomial with the degree-n
    truncated exponential.

    For a doubly stochastic tuple its roots lie outside |z| < alpha0 n / 4.
    """
    matrices = as_tuple(matrices)
    if matrices.count != matrices.n:
        raise InputError("MatrixTuple", "expected n matrices of dimension n")
    n = matrices.n
    reversed_poly = mixed_char_poly_coeffs(matrices, settings).reversed(n)
    return star_product(reversed_poly, exp_partial_sum(n), n)


@dataclass(frozen=True)
class MSSReport:
    """Roots of a mixed characteristic polynomial against the (1 + sqrt(eps))^2 bound."""

    polynomial: Poly
    roots: Tuple[complex, ...]
    max_imag: float
    min_real: float
    max_real: float
    bound: float
    eps_trace: float

    @property
    def passed(self) -> bool:
        return (
            self.max_imag <= REALNESS_TOLERANCE
            and self.min_real >= -REALNESS_TOLERANCE
            and self.max_real <= self.bound + REALNESS_TOLERANCE
        )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "coefficients": list(self.polynomial.coeffs),
            "roots": list(self.roots),
            "max_imag": self.max_imag,
            "min_real": self.min_real,
            "max_real": self.max_real,
            "bound": self.bound,
            "eps_trace": self.eps_trace,
            "passed": self.passed,
        }


def mss_root_check(
    matrices: Union[MatrixTuple, Iterable],
    eps_trace: float,
    settings: Optional[Settings] = None,
) -> MSSReport:
    """
    Check that the mixed characteristic polynomial of a PSD decomposition of
    the identity has real roots in [0, (1 + sqrt(eps_trace))^2].

    Parameters
    ----------
    matrices : MatrixTuple or iterable of arrays
        Hermitian PSD A_1, ..., A_m with sum A_k = I
    eps_trace : float
        Upper bound on every trace tr A_k

    Raises
    ------
    DomainError
        If some A_k is not Hermitian PSD, the sum differs from I by more than
        1e-9, or a trace exceeds eps_trace

    Examples
    --------
    >>> report = mss_root_check([np.eye(2) / 2] * 2, 1.0)
    >>> report.passed, report.bound
    (True, 4.0)
    """
    settings = settings or get_settings()
    eps_trace = positive("eps_trace", eps_trace)
    matrices = as_tuple(matrices)
    tolerance = settings.norm_tolerance
    stack = matrices.stack()
    not_hermitian = [k for k, a in enumerate(matrices) if not a.is_hermitian]
    if not_hermitian:
        raise DomainError("Hermitian symmetry", not_hermitian)
    low = np.linalg.eigvalsh(stack)[:, 0]
    not_psd = np.flatnonzero(low < -tolerance)
    if not_psd.size:
        raise DomainError("positive semidefiniteness", not_psd)
    deviation = operator_norm(stack.sum(axis=0) - np.eye(matrices.n))
    if deviation > tolerance:
        raise DomainError("decomposition of I", message=f"||sum A_k - I|| = {deviation:.3e}")
    traces = np.trace(stack, axis1=1, axis2=2).real
    too_large = np.flatnonzero(traces > eps_trace + tolerance)
    if too_large.size:
        raise DomainError("trace bound", too_large, f"traces exceed eps_trace = {eps_trace}")

    polynomial = mixed_char_poly_coeffs(matrices, settings)
    roots = polynomial.roots()
    logger.debug("mixed characteristic polynomial roots: %s", roots)
    return MSSReport(
        polynomial=polynomial,
        roots=tuple(complex(r) for r in roots),
        max_imag=float(np.max(np.abs(roots.imag))) if roots.size else 0.0,
        min_real=float(np.min(roots.real)) if roots.size else 0.0,
        max_real=float(np.max(roots.real)) if roots.size else 0.0,
        bound=(1 + math.sqrt(eps_trace)) ** 2,
        eps_trace=eps_trace,
    )
