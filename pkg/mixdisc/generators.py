"""
Seeded instance generators.

Every generator draws from a Philox counter-based bit generator keyed by
``numpy.random.SeedSequence(seed)``, so outputs are pure functions of the
parameters and the seed. A seed may be an int or a sequence of ints; callers
derive independent streams by appending indices (``[seed, sample]``).
"""

from typing import Optional, Sequence, Union

import numpy as np

from .doubly_stochastic import scale_to_doubly_stochastic
from .matrices import ComplexMatrix, MatrixTuple, SymmetricMatrix, operator_norm
from .parameters import IntegerParameter, positive, positive_integer
from .support import InputError

Seed = Union[int, Sequence[int]]


def _seed_list(seed: Seed) -> list:
    if isinstance(seed, (int, np.integer)):
        return [IntegerParameter("seed", seed, min=0).value]
    return [IntegerParameter("seed", s, min=0).value for s in seed]


def make_rng(seed: Seed) -> np.random.Generator:
    """Philox generator for a seed or seed sequence."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_seed_list(seed))))


def _bounded_scale(rng: np.random.Generator, norm: float, norm_bound: float) -> float:
    # u is uniform in (0, 1]
    u = 1.0 - rng.random()
    return norm_bound * u / norm if norm > 0 else 0.0


def gen_symmetric_bounded(n: int, norm_bound: float, seed: Seed) -> SymmetricMatrix:
    """
    Random real symmetric matrix with operator norm ``norm_bound * u``, u
    uniform in (0, 1].

    Examples
    --------
    >>> q = gen_symmetric_bounded(4, 0.045, seed=7)
    >>> operator_norm(q) <= 0.045 + 1e-12
    True
    """
    n = positive_integer("n", n)
    norm_bound = positive("norm_bound", norm_bound)
    rng = make_rng(seed)
    gaussian = rng.standard_normal((n, n))
    symmetric = (gaussian + gaussian.T) / 2
    scale = _bounded_scale(rng, operator_norm(SymmetricMatrix(symmetric)), norm_bound)
    return SymmetricMatrix(symmetric * scale)


def gen_symmetric_tuple(n: int, norm_bound: float, seed: Seed) -> MatrixTuple:
    """n bounded symmetric matrices of dimension n; member k uses seed (*seed, k)."""
    base = _seed_list(seed)
    return MatrixTuple(gen_symmetric_bounded(n, norm_bound, base + [k]) for k in range(n))


def gen_points(
    n: int,
    radius: float,
    seed: Seed,
    grid: Optional[int] = None,
    boundary: bool = False,
) -> np.ndarray:
    """
    n complex points with modulus at most ``radius``.

    Without a grid, angles are uniform and moduli are ``radius * sqrt(u)``
    (uniform on the disc). With a grid, angles are multiples of 2 pi / grid
    and moduli multiples of radius / grid. ``boundary`` puts every point on
    the circle of the given radius.
    """
    n = positive_integer("n", n)
    radius = positive("radius", radius)
    rng = make_rng(seed)
    if grid is None:
        angles = 2 * np.pi * rng.random(n)
        moduli = radius * np.sqrt(1.0 - rng.random(n))
    else:
        grid = positive_integer("grid", grid)
        angles = 2 * np.pi * rng.integers(0, grid, size=n) / grid
        moduli = radius * rng.integers(1, grid + 1, size=n) / grid
    if boundary:
        moduli = np.full(n, radius)
    return moduli * np.exp(1j * angles)


def gen_pd_tuple(n: int, seed: Seed, count: Optional[int] = None) -> MatrixTuple:
    """Random well-conditioned positive definite matrices G G' / n + I / 10."""
    n = positive_integer("n", n)
    count = n if count is None else positive_integer("count", count)
    rng = make_rng(seed)
    matrices = []
    for _ in range(count):
        gaussian = rng.standard_normal((n, n))
        matrices.append(SymmetricMatrix(gaussian @ gaussian.T / n + np.eye(n) / 10))
    return MatrixTuple(matrices)


def gen_ds_tuple(n: int, seed: Seed) -> MatrixTuple:
    """
    Random doubly stochastic tuple: a positive definite tuple scaled by
    :func:`~mixdisc.doubly_stochastic.scale_to_doubly_stochastic`.

    Raises
    ------
    ConvergenceError
        Propagated from the scaling iteration
    """
    return scale_to_doubly_stochastic(gen_pd_tuple(n, seed), tol=1e-12).ds_tuple


def gen_bounded_matrix(
    n: int, norm_bound: float, seed: Seed, complex_entries: bool = False
) -> ComplexMatrix:
    """Random (real or complex) matrix with operator norm ``norm_bound * u``, u in (0, 1]."""
    n = positive_integer("n", n)
    norm_bound = positive("norm_bound", norm_bound)
    rng = make_rng(seed)
    entries = rng.standard_normal((n, n))
    if complex_entries:
        entries = entries + 1j * rng.standard_normal((n, n))
    scale = _bounded_scale(rng, operator_norm(entries), norm_bound)
    return ComplexMatrix(entries * scale)


def gen_psd_decomposition(
    n: int, seed: Seed, count: Optional[int] = None, rank: Optional[int] = None
) -> MatrixTuple:
    """
    Random PSD matrices A_1, ..., A_count summing to the identity.

    Draws P_k = G_k G_k' with G_k of shape (n, rank) and normalizes
    A_k = S^(-1/2) P_k S^(-1/2) with S = sum P_k. The traces sum to n.
    """
    n = positive_integer("n", n)
    count = n if count is None else positive_integer("count", count)
    rank = n if rank is None else positive_integer("rank", rank)
    if count * rank < n:
        raise InputError("decomposition", f"count * rank = {count * rank} cannot span dimension {n}")
    rng = make_rng(seed)
    factors = rng.standard_normal((count, n, rank))
    pieces = factors @ factors.transpose(0, 2, 1)
    eigenvalues, vectors = np.linalg.eigh(pieces.sum(axis=0))
    inverse_root = (vectors / np.sqrt(eigenvalues)) @ vectors.T
    pieces = inverse_root @ pieces @ inverse_root
    return MatrixTuple.symmetric(list((pieces + pieces.transpose(0, 2, 1)) / 2))


def gen_rank2_vectors(n: int, seed: Seed, scale: Optional[float] = None) -> np.ndarray:
    """n random vectors of dimension n (rows), entries of standard deviation ``scale``."""
    n = positive_integer("n", n)
    scale = 1 / np.sqrt(n) if scale is None else positive("scale", scale)
    return scale * make_rng(seed).standard_normal((n, n))
