from itertools import combinations

import numpy as np
import pytest

from mixdisc.matrices import (
    ComplexMatrix,
    MatrixTuple,
    SymmetricMatrix,
    as_matrix,
    determinant,
    operator_norm,
    outer_product,
    principal_minor_sum,
    principal_minor_sums,
    principal_submatrix,
)
from mixdisc.support import InputError, override_settings

NORM_CONFIGS = {
    "diagonal": {"matrix": np.diag([0.03, -0.04]), "expected": 0.04},
    "swap": {"matrix": np.array([[0.0, 1.0], [1.0, 0.0]]), "expected": 1.0},
    "nilpotent": {"matrix": np.array([[0.0, 2.0], [0.0, 0.0]]), "expected": 2.0},
    "hermitian": {"matrix": np.array([[1.0, 1j], [-1j, 1.0]]), "expected": 2.0},
}

DET_CONFIGS = {
    "identity": {"matrix": np.eye(3), "expected": 1.0},
    "cofactor": {"matrix": np.array([[1.0, 2.0], [3.0, 4.0]]), "expected": -2.0},
    "triangular": {"matrix": np.triu(np.ones((3, 3))) + np.diag([1.0, 2.0, 4.0]), "expected": 30.0},
}


@pytest.mark.parametrize("name", NORM_CONFIGS.keys())
def test_operator_norm(name):
    config = NORM_CONFIGS[name]
    assert operator_norm(config["matrix"]) == pytest.approx(config["expected"], abs=1e-14)
    assert operator_norm(as_matrix(config["matrix"])) == pytest.approx(config["expected"], abs=1e-14)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_operator_norm_against_roots(seed):
    rng = np.random.default_rng(seed)
    gaussian = rng.standard_normal((5, 5))
    symmetric = (gaussian + gaussian.T) / 2
    roots = np.roots(np.poly(symmetric))
    assert operator_norm(symmetric) == pytest.approx(np.max(np.abs(roots)), rel=1e-8)
    assert operator_norm(-2.5 * symmetric) == pytest.approx(2.5 * operator_norm(symmetric), rel=1e-12)


@pytest.mark.parametrize("name", DET_CONFIGS.keys())
def test_determinant(name):
    config = DET_CONFIGS[name]
    assert determinant(config["matrix"]) == pytest.approx(config["expected"], abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_determinant_is_product_of_eigenvalues(n):
    rng = np.random.default_rng([n, 5])
    gaussian = rng.standard_normal((n, n))
    symmetric = SymmetricMatrix((gaussian + gaussian.T) / 2)
    eigenvalues = np.linalg.eigvalsh(symmetric.entries)
    assert complex(determinant(symmetric)) == pytest.approx(np.prod(eigenvalues), rel=1e-10, abs=1e-12)


def test_determinant_of_empty_matrix():
    assert determinant(ComplexMatrix.empty()) == 1


def test_complex_matrix_is_immutable():
    source = np.array([[1.0, 2.0], [3.0, 4.0]])
    matrix = ComplexMatrix(source)
    source[0, 0] = 100.0
    assert matrix.entries[0, 0] == 1.0
    with pytest.raises(ValueError):
        matrix.entries[0, 0] = 5.0


@pytest.mark.parametrize(
    "entries",
    [[[1.0, 2.0, 3.0]], [[np.nan]], [["a"]], [], np.zeros((2, 2, 2))],
)
def test_complex_matrix_rejects_bad_entries(entries):
    with pytest.raises(InputError):
        ComplexMatrix(entries)


def test_symmetric_matrix_symmetrizes():
    matrix = SymmetricMatrix([[1.0, 2.0], [2.0 + 1e-15, 1.0]])
    assert np.array_equal(matrix.entries, matrix.entries.T)
    assert matrix.is_hermitian


@pytest.mark.parametrize(
    "entries",
    [[[1.0, 2.0], [2.1, 1.0]], [[1.0, 1j], [-1j, 1.0]]],
)
def test_symmetric_matrix_rejects(entries):
    with pytest.raises(InputError):
        SymmetricMatrix(entries)


def test_symmetry_tolerance_setting():
    with override_settings(symmetry_tolerance=0.2):
        assert SymmetricMatrix([[1.0, 2.0], [2.1, 1.0]]).entries[0, 1] == pytest.approx(2.05)


def test_as_matrix():
    assert isinstance(as_matrix(np.eye(2)), SymmetricMatrix)
    assert type(as_matrix(np.array([[1.0, 2.0], [3.0, 4.0]]))) is ComplexMatrix
    assert type(as_matrix(np.eye(2) * 1j)) is ComplexMatrix


def test_matrix_tuple():
    matrices = MatrixTuple([np.eye(2), np.array([[0.0, 1.0], [2.0, 0.0]])])
    assert (matrices.count, matrices.n, len(matrices)) == (2, 2, 2)
    assert not matrices.all_symmetric
    assert matrices.stack().dtype == complex
    assert MatrixTuple.symmetric([np.eye(2)] * 3).stack().dtype == float
    with pytest.raises(InputError):
        MatrixTuple([np.eye(2), np.eye(3)])
    with pytest.raises(InputError):
        MatrixTuple([])


def test_principal_submatrix():
    matrix = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert principal_submatrix(matrix, []).n == 0
    assert determinant(principal_submatrix(matrix, [])) == 1
    assert np.array_equal(principal_submatrix(matrix, [1, 0]).entries, matrix)
    assert principal_submatrix(matrix, {1}).entries.tolist() == [[4.0]]
    assert isinstance(principal_submatrix(SymmetricMatrix(np.eye(3)), [0, 2]), SymmetricMatrix)
    with pytest.raises(InputError):
        principal_submatrix(matrix, [2])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_principal_submatrix_composes(seed):
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    for outer in combinations(range(6), 4):
        inner_matrix = principal_submatrix(matrix, outer)
        for inner in combinations(range(4), 2):
            composed = principal_submatrix(inner_matrix, inner)
            direct = principal_submatrix(matrix, [outer[i] for i in inner])
            assert np.array_equal(composed.entries, direct.entries)


OUTER_CONFIGS = {
    "basis": {"x": [1.0, 0.0], "expected": np.diag([1.0, 0.0])},
    "zero": {"x": [0.0, 0.0], "expected": np.zeros((2, 2))},
    "ones": {"x": [1.0, 1.0], "expected": np.ones((2, 2))},
}


@pytest.mark.parametrize("name", OUTER_CONFIGS.keys())
def test_outer_product(name):
    config = OUTER_CONFIGS[name]
    product = outer_product(config["x"])
    assert isinstance(product, SymmetricMatrix)
    assert np.array_equal(product.entries, config["expected"])


@pytest.mark.parametrize("n", [1, 3, 6])
def test_outer_product_trace_and_rank(n):
    rng = np.random.default_rng(n)
    x = rng.standard_normal(n)
    product = outer_product(x)
    assert np.trace(product.entries) == pytest.approx(np.dot(x, x), rel=1e-12)
    assert np.linalg.matrix_rank(product.entries) <= 1
    assert np.linalg.matrix_rank(outer_product(np.zeros(n)).entries) == 0


@pytest.mark.parametrize("x", [[], [[1.0]], [1j, 0.0], [np.inf]])
def test_outer_product_rejects(x):
    with pytest.raises(InputError):
        outer_product(x)


@pytest.mark.parametrize("seed", [0, 1])
def test_principal_minor_sums(seed):
    rng = np.random.default_rng(seed)
    stack = rng.standard_normal((3, 4, 4)) + 1j * rng.standard_normal((3, 4, 4))
    sums = principal_minor_sums(stack)
    assert sums.shape == (3, 5)
    for c in range(3):
        for k in range(5):
            brute = sum(
                np.linalg.det(stack[c][np.ix_(s, s)]) if s else 1.0
                for s in map(list, combinations(range(4), k))
            )
            assert sums[c, k] == pytest.approx(brute, abs=1e-10)
    assert principal_minor_sum(stack[0], 2) == pytest.approx(sums[0, 2], abs=1e-12)
