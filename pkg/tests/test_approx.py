import cmath
import math
from itertools import combinations

import numpy as np
import pytest

from mixdisc.approx import (
    PolydiscInstance,
    ZeroFreeTracker,
    approx_log_mixed_discriminant,
    approx_log_mixed_discriminant_pd,
    check_domain,
    interpolate_log_discriminant,
    normalized_derivatives,
    verify_zero_free_polydisc,
)
from mixdisc.exact import mixed_discriminant_exact, padded_mixed_discriminant
from mixdisc.generators import gen_points, gen_symmetric_tuple, make_rng
from mixdisc.support import (
    STABILITY,
    DomainBoundaryWarning,
    DomainError,
    InputError,
    ParameterError,
    ResourceLimitError,
    override_settings,
)
from tests.support import unwound_distance, values_for_threads

GAMMA0 = STABILITY.gamma0

DOMAIN_CONFIGS = {
    "norms at gamma0": {
        "matrices": [GAMMA0 * np.eye(2)] * 2,
        "points": [0.9, 0.9],
        "norm_violations": (),
        "point_violations": (),
    },
    "first norm too large": {
        "matrices": [0.05 * np.eye(2), GAMMA0 * np.eye(2)],
        "points": [0.9, 0.9],
        "norm_violations": (0,),
        "point_violations": (),
    },
    "point on the unit circle": {
        "matrices": [0.01 * np.eye(2)] * 2,
        "points": [0.5, 1j],
        "norm_violations": (),
        "point_violations": (1,),
    },
}


def exact_log(instance):
    identity = np.eye(instance.n)
    shifted = [identity + z * q.entries for z, q in zip(instance.points, instance.matrices)]
    return cmath.log(mixed_discriminant_exact(shifted))


def random_instance(n, seed, rho=0.9, eps=1e-3):
    return PolydiscInstance(
        gen_symmetric_tuple(n, GAMMA0, seed), gen_points(n, rho, [seed, 1]), rho, eps
    )


@pytest.mark.parametrize("name", DOMAIN_CONFIGS.keys())
def test_check_domain(name):
    config = DOMAIN_CONFIGS[name]
    report = check_domain(PolydiscInstance(config["matrices"], config["points"], 0.9, 1e-3))
    assert report.norm_violations == config["norm_violations"]
    assert report.point_violations == config["point_violations"]
    assert report.passed == (not config["norm_violations"] and not config["point_violations"])
    assert bool(report) == report.passed
    if not report.passed:
        with pytest.raises(DomainError) as info:
            report.raise_if_failed()
        assert info.value.indices == (config["norm_violations"] or config["point_violations"])


def test_domain_failure_names_index():
    instance = PolydiscInstance([0.05 * np.eye(2), GAMMA0 * np.eye(2)], [0.9, 0.9], 0.9, 1e-3)
    with pytest.raises(DomainError) as info:
        approx_log_mixed_discriminant(instance)
    assert info.value.indices == (0,)
    assert "[0]" in str(info.value)


def test_boundary_values_warn():
    matrices = [(GAMMA0 + 1e-11) * np.eye(2), GAMMA0 * np.eye(2)]
    with pytest.warns(DomainBoundaryWarning):
        report = check_domain(PolydiscInstance(matrices, [0.9, 0.9], 0.9, 1e-3))
    assert report.passed


def test_instance_validation():
    with pytest.raises(InputError):
        PolydiscInstance([np.eye(2)] * 3, [0.1] * 3, 0.9, 1e-3)
    with pytest.raises(ParameterError):
        PolydiscInstance([np.eye(2)] * 2, [0.1], 0.9, 1e-3)
    with pytest.raises(ParameterError):
        PolydiscInstance([np.eye(2)] * 2, [0.1, 0.1], 1.0, 1e-3)
    with pytest.raises(ParameterError):
        PolydiscInstance([np.eye(2)] * 2, [0.1, 0.1], 0.9, 0.0)
    with pytest.raises(InputError):
        PolydiscInstance([np.array([[0.0, 0.01], [0.0, 0.0]])] * 2, [0.1, 0.1], 0.9, 1e-3)


@pytest.mark.parametrize("method", ["padded", "minor_sums"])
def test_zero_points_give_log_factorial(method):
    instance = random_instance(4, 3)
    instance = PolydiscInstance(instance.matrices, [0.0] * 4, 0.9, 1e-3)
    result = approx_log_mixed_discriminant(instance, method)
    assert result.log_value == pytest.approx(math.lgamma(5), abs=1e-12)


@pytest.mark.parametrize("method", ["padded", "minor_sums"])
def test_closed_form_at_gamma0(method):
    instance = PolydiscInstance([GAMMA0 * np.eye(2)] * 2, [0.9, 0.9], 0.9, 1e-4)
    result = approx_log_mixed_discriminant(instance, method)
    expected = math.log(2) + 2 * math.log(1 + GAMMA0 * 0.9)
    assert abs(result.log_value - expected) <= 1e-4
    assert result.truncation_bound <= 1e-4
    assert result.details == {"method": method, "derivative_orders": 2}


@pytest.mark.parametrize("n", [1, 2, 4, 6])
@pytest.mark.parametrize("seed", [0, 1])
@pytest.mark.parametrize("method", ["padded", "minor_sums"])
def test_matches_exact_oracle(n, seed, method):
    instance = random_instance(n, [n, seed])
    result = approx_log_mixed_discriminant(instance, method)
    assert unwound_distance(result.log_value, exact_log(instance)) <= instance.eps
    assert result.truncation_bound <= instance.eps


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("eps", [1e-2, 1e-4])
def test_value_within_relative_error(n, eps):
    instance = random_instance(n, [n, 9], eps=eps)
    result = approx_log_mixed_discriminant(instance)
    identity = np.eye(n)
    exact = mixed_discriminant_exact(
        [identity + z * q.entries for z, q in zip(instance.points, instance.matrices)]
    )
    assert result.relative_error_bound <= math.expm1(eps)
    assert abs(result.value() / exact - 1) <= math.expm1(eps) + 1e-12


@pytest.mark.parametrize("method", ["padded", "minor_sums"])
@pytest.mark.parametrize("n", [1, 3, 5])
def test_first_derivative_is_mean_trace(method, n):
    rng = make_rng([n, 13])
    stack = rng.standard_normal((n, n, n)) + 1j * rng.standard_normal((n, n, n))
    first = normalized_derivatives(stack, 1, method)[0]
    assert first == pytest.approx(np.trace(stack, axis1=1, axis2=2).sum() / n, rel=1e-10)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_derivative_paths_agree(seed):
    rng = make_rng([seed, 4])
    n = 5
    stack = 0.3 * (rng.standard_normal((n, n, n)) + 1j * rng.standard_normal((n, n, n)))
    padded = normalized_derivatives(stack, n, "padded")
    minor_sums = normalized_derivatives(stack, n, "minor_sums")
    assert padded == pytest.approx(minor_sums, rel=1e-9, abs=1e-12)


def test_derivatives_are_padded_discriminants():
    rng = make_rng(8)
    stack = rng.standard_normal((3, 3, 3))
    derivatives = normalized_derivatives(stack, 3)
    for k in range(1, 4):
        expected = sum(
            padded_mixed_discriminant([stack[j] for j in subset])
            for subset in combinations(range(3), k)
        ) / math.factorial(3)
        assert derivatives[k - 1] == pytest.approx(expected, abs=1e-12)


def test_normalized_derivatives_errors():
    stack = np.zeros((3, 3, 3))
    assert normalized_derivatives(stack, 0) == []
    with pytest.raises(InputError):
        normalized_derivatives(stack, 4)
    with pytest.raises(InputError):
        normalized_derivatives(stack, 2, method="newton")
    with override_settings(max_evaluations=5):
        with pytest.raises(ResourceLimitError):
            normalized_derivatives(stack, 3)


def test_degree_cap():
    instance = random_instance(3, 5, eps=1e-6)
    with override_settings(max_degree=10):
        with pytest.raises(ResourceLimitError) as info:
            approx_log_mixed_discriminant(instance)
    assert info.value.required > 10


def test_interpolation_thread_independent():
    instance = random_instance(6, 12)
    for method in ("padded", "minor_sums"):
        with override_settings(chunk_size=8):
            values = values_for_threads(
                lambda: interpolate_log_discriminant(
                    instance.scaled_stack(), 1 / instance.rho, instance.eps, method
                ).log_value
            )
        assert len(set(values)) == 1


def near_identity_tuple(n, seed, spread):
    rng = make_rng(seed)
    matrices = []
    for k in range(n):
        basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
        eigenvalues = 1 + spread * rng.uniform(-1, 1, n)
        matrices.append((k + 1) * (basis * eigenvalues) @ basis.T)
    return [(m + m.T) / 2 for m in matrices]


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("method", ["padded", "minor_sums"])
def test_positive_definite_path(n, method):
    matrices = near_identity_tuple(n, [n, 2], 0.03)
    result = approx_log_mixed_discriminant_pd(matrices, 1e-3, method)
    exact = math.log(mixed_discriminant_exact(matrices).real)
    assert abs(result.log_value.real - exact) <= 1e-3
    assert result.details["rho"] < 1
    assert "log_scale" in result.details


def test_positive_definite_multiples_of_identity_are_exact():
    matrices = [c * np.eye(3) for c in (1.0, 2.0, 5.0)]
    result = approx_log_mixed_discriminant_pd(matrices, 1e-3)
    assert result.degree == 0
    assert result.log_value.real == pytest.approx(math.log(6 * 10), abs=1e-12)


def test_positive_definite_path_rejects():
    with pytest.raises(DomainError) as info:
        approx_log_mixed_discriminant_pd([np.eye(2), np.diag([1.0, 2.0])], 1e-3)
    assert info.value.indices == (1,)
    with pytest.raises(DomainError):
        approx_log_mixed_discriminant_pd([np.eye(2), np.diag([1.0, -1.0])], 1e-3)


def test_zero_free_tracker():
    tracker = ZeroFreeTracker("disc", 2)
    tracker.record(0, 0.5, 0.1j)
    tracker.record(1, 0.25, 0.2)
    tracker.record(2, 0.0, 1.0)
    report = tracker.report()
    assert report.samples == 3 and report.evaluations == 3
    assert report.min_ratio == 0.0 and report.worst_sample == 2
    assert report.zeros == (2,)
    assert not report.passed
    assert report.as_dict()["passed"] is False


def test_verify_polydisc_small():
    report = verify_zero_free_polydisc(1, 25, 8, seed=4)
    assert report.passed
    assert report.min_ratio >= 1 - GAMMA0 - 1e-12


@pytest.mark.parametrize("boundary", [False, True])
def test_verify_polydisc(boundary):
    report = verify_zero_free_polydisc(3, 40, 8, seed=0, boundary=boundary)
    assert report.passed
    assert report.zeros == ()
    assert report.samples == 40
    assert report.min_ratio > (1 - GAMMA0) ** 3 * 0.5


def test_verify_is_reproducible():
    first = verify_zero_free_polydisc(2, 5, 6, seed=9)
    second = verify_zero_free_polydisc(2, 5, 6, seed=9)
    assert first == second
