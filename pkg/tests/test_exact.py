import math
from itertools import combinations, permutations, product

import numpy as np
import pytest

from mixdisc.exact import (
    minor_power_sum_exact,
    mixed_discriminant_exact,
    padded_mixed_discriminant,
    permanent,
)
from mixdisc.generators import make_rng
from mixdisc.matrices import outer_product
from mixdisc.support import InputError, ResourceLimitError, override_settings
from tests.support import brute_minor_power_sum, brute_mixed_discriminant, values_for_threads

MIXED_CONFIGS = {
    "identity pair": {"matrices": [np.eye(2), np.eye(2)], "expected": 2},
    "diagonal": {"matrices": [np.diag([1.0, 2.0]), np.diag([3.0, 4.0])], "expected": 10},
    "rank one": {
        "matrices": [outer_product([1.0, 1.0]).entries, outer_product([0.0, 1.0]).entries],
        "expected": 1,
    },
    "identity triple": {"matrices": [np.eye(3)] * 3, "expected": 6},
}

PERMANENT_CONFIGS = {
    "identity": {"matrix": np.eye(4), "expected": 1},
    "two by two": {"matrix": np.array([[1.0, 2.0], [3.0, 4.0]]), "expected": 10},
    "all ones": {"matrix": np.ones((3, 3)), "expected": 6},
    "all ones five": {"matrix": np.ones((5, 5)), "expected": 120},
}


def random_tuple(n, seed, complex_entries=False):
    rng = make_rng(seed)
    matrices = []
    for _ in range(n):
        gaussian = rng.standard_normal((n, n))
        if complex_entries:
            matrices.append(gaussian + 1j * rng.standard_normal((n, n)))
        else:
            matrices.append((gaussian + gaussian.T) / 2)
    return matrices


@pytest.mark.parametrize("name", MIXED_CONFIGS.keys())
@pytest.mark.parametrize("method", ["polarization", "permutation"])
def test_mixed_discriminant_examples(name, method):
    config = MIXED_CONFIGS[name]
    value = mixed_discriminant_exact(config["matrices"], method=method)
    assert value == pytest.approx(config["expected"], abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("complex_entries", [False, True])
def test_methods_agree(n, complex_entries):
    matrices = random_tuple(n, [n, 11], complex_entries)
    polarization = mixed_discriminant_exact(matrices)
    permutation = mixed_discriminant_exact(matrices, method="permutation")
    brute = brute_mixed_discriminant(matrices)
    assert polarization == pytest.approx(brute, rel=1e-10, abs=1e-12)
    assert permutation == pytest.approx(brute, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_permutation_symmetry(seed):
    matrices = random_tuple(4, seed)
    reference = mixed_discriminant_exact(matrices)
    for order in list(permutations(range(4)))[::5]:
        value = mixed_discriminant_exact([matrices[i] for i in order])
        assert value == pytest.approx(reference, rel=1e-10)


@pytest.mark.parametrize("seed", [0, 1])
def test_multilinearity(seed):
    matrices = random_tuple(3, seed)
    other = random_tuple(3, seed + 100)[0]
    left = mixed_discriminant_exact([2.5 * matrices[0] - other, matrices[1], matrices[2]])
    right = 2.5 * mixed_discriminant_exact(matrices) - mixed_discriminant_exact(
        [other, matrices[1], matrices[2]]
    )
    assert left == pytest.approx(right, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1])
def test_repeated_matrix_gives_determinant(seed):
    a = random_tuple(4, seed)[0]
    value = mixed_discriminant_exact([a] * 4)
    assert value == pytest.approx(math.factorial(4) * np.linalg.det(a), rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_rank_one_tuple_gives_squared_determinant(n):
    vectors = make_rng([n, 23]).standard_normal((n, n))
    matrices = [outer_product(x).entries for x in vectors]
    expected = np.linalg.det(vectors) ** 2
    assert mixed_discriminant_exact(matrices) == pytest.approx(expected, rel=1e-9, abs=1e-12)
    if n <= 4:
        value = mixed_discriminant_exact(matrices, method="permutation")
        assert value == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_diagonal_tuple_reduces_to_permanent():
    rng = make_rng(5)
    table = rng.random((5, 5))
    diagonal = [np.diag(table[:, j]) for j in range(5)]
    assert mixed_discriminant_exact(diagonal) == pytest.approx(permanent(table), rel=1e-12)


def test_mixed_discriminant_errors():
    with pytest.raises(InputError):
        mixed_discriminant_exact([np.eye(3), np.eye(3)])
    with pytest.raises(InputError):
        mixed_discriminant_exact([np.eye(2)] * 2, method="ryser")
    with override_settings(exact_cap=3):
        with pytest.raises(ResourceLimitError):
            mixed_discriminant_exact([np.eye(4)] * 4)
    with pytest.raises(ResourceLimitError):
        mixed_discriminant_exact([np.eye(6)] * 6, method="permutation")


def test_mixed_discriminant_thread_independent():
    matrices = random_tuple(8, 3, complex_entries=True)
    with override_settings(chunk_size=16):
        values = values_for_threads(lambda: mixed_discriminant_exact(matrices))
    assert len(set(values)) == 1


@pytest.mark.parametrize("name", PERMANENT_CONFIGS.keys())
def test_permanent_examples(name):
    config = PERMANENT_CONFIGS[name]
    assert permanent(config["matrix"]) == pytest.approx(config["expected"], abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_permanent_against_definition(n):
    rng = make_rng([n, 3])
    matrix = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    brute = sum(np.prod([matrix[i, s[i]] for i in range(n)]) for s in permutations(range(n)))
    assert permanent(matrix) == pytest.approx(brute, rel=1e-10, abs=1e-12)


def test_permanent_cap():
    with override_settings(permanent_cap=4):
        with pytest.raises(ResourceLimitError):
            permanent(np.ones((5, 5)))


PADDED_CONFIGS = {
    "empty": {"matrices": [], "n": 3, "expected": 6},
    "one diagonal": {"matrices": [np.diag([1.0, 2.0])], "n": None, "expected": 3},
    "full": {"matrices": [np.diag([1.0, 2.0]), np.diag([3.0, 4.0])], "n": None, "expected": 10},
}


@pytest.mark.parametrize("name", PADDED_CONFIGS.keys())
def test_padded_examples(name):
    config = PADDED_CONFIGS[name]
    value = padded_mixed_discriminant(config["matrices"], n=config["n"])
    assert value == pytest.approx(config["expected"], abs=1e-12)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 5])
def test_padded_matches_identity_padding(k):
    matrices = random_tuple(5, [k, 7], complex_entries=True)[:k]
    padded = padded_mixed_discriminant(matrices, n=5)
    filled = mixed_discriminant_exact([np.eye(5)] * (5 - k) + list(matrices))
    assert padded == pytest.approx(filled, rel=1e-10, abs=1e-12)


def test_padded_errors():
    with pytest.raises(InputError):
        padded_mixed_discriminant([np.eye(2)] * 3)
    with pytest.raises(InputError):
        padded_mixed_discriminant([])
    with pytest.raises(InputError):
        padded_mixed_discriminant([np.eye(2)], n=3)
    with override_settings(max_evaluations=10):
        with pytest.raises(ResourceLimitError):
            padded_mixed_discriminant([np.eye(6)] * 3)


MINOR_CONFIGS = {
    "zero": {"matrix": np.zeros((4, 4)), "m": 3, "expected": 1},
    "diagonal": {"matrix": np.diag([0.5, 0.5]), "m": 2, "expected": 1.5625},
    "scalar": {"matrix": np.array([[-0.5]]), "m": 3, "expected": 0.875},
}


@pytest.mark.parametrize("name", MINOR_CONFIGS.keys())
def test_minor_power_sum_examples(name):
    config = MINOR_CONFIGS[name]
    value = minor_power_sum_exact(config["matrix"], config["m"])
    assert value == pytest.approx(config["expected"], abs=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_minor_power_sum_against_enumeration(m):
    rng = make_rng([m, 9])
    matrix = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert minor_power_sum_exact(matrix, m) == pytest.approx(
        brute_minor_power_sum(matrix, m), rel=1e-10
    )


def test_minor_power_sum_errors():
    with pytest.raises(InputError):
        minor_power_sum_exact(np.eye(2), 0)
    with override_settings(minor_cap=3):
        with pytest.raises(ResourceLimitError):
            minor_power_sum_exact(np.eye(4), 2)


def count_rainbow_spanning_trees(n, edges, colours):
    count = 0
    groups = [[e for e, c in zip(edges, colours) if c == colour] for colour in range(n - 1)]
    for choice in product(*groups):
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                i = parent[i]
            return i

        joined = 0
        for i, j in choice:
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
                joined += 1
        count += joined == n - 1
    return count


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_coloured_laplacians_count_rainbow_spanning_trees(seed):
    n = 4
    edges = list(combinations(range(n), 2))
    colours = make_rng([seed, 30]).integers(0, n - 1, size=len(edges))
    laplacians = []
    for colour in range(n - 1):
        piece = np.zeros((n, n))
        for (i, j), c in zip(edges, colours):
            if c == colour:
                x = np.zeros(n)
                x[i], x[j] = 1.0, -1.0
                piece += outer_product(x).entries.real
        laplacians.append(piece[:-1, :-1])
    expected = count_rainbow_spanning_trees(n, edges, colours)
    assert mixed_discriminant_exact(laplacians) == pytest.approx(expected, abs=1e-9)
