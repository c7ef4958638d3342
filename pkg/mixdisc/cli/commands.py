"""
One handler per subcommand. Each takes the parsed arguments and returns a
:class:`CommandOutput`; ``main.run`` wraps it into the output document.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from ..approx import (
    PolydiscInstance,
    approx_log_mixed_discriminant,
    approx_log_mixed_discriminant_pd,
    check_domain,
    verify_zero_free_polydisc,
)
from ..charpoly import ds_stability_polynomial, mixed_char_poly_coeffs, mss_root_check
from ..doubly_stochastic import (
    approx_log_contracted,
    approx_log_mixed_disc_ds,
    is_doubly_stochastic,
    scale_to_doubly_stochastic,
    verify_zero_free_ds,
)
from ..exact import (
    minor_power_sum_exact,
    mixed_discriminant_exact,
    padded_mixed_discriminant,
    permanent,
)
from ..generators import (
    gen_bounded_matrix,
    gen_ds_tuple,
    gen_pd_tuple,
    gen_points,
    gen_psd_decomposition,
    gen_rank2_vectors,
    gen_symmetric_tuple,
)
from ..minors import approx_log_minor_power_sum, gram_from_rank2, rank2_tuple, verify_zero_free_minors
from ..parameters import ComplexListParameter, parse_complex
from ..support import STABILITY, InputError
from .instances import InstanceFile, approx_result_dict, finite_or_none

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-3
DEFAULT_RHO = 0.9
DERIVATIVE_METHODS = {"padded": "padded", "minor-sums": "minor_sums"}


@dataclass
class CommandOutput:
    inputs: Dict[str, Any]
    result: Dict[str, Any]
    timing: Dict[str, Any] = field(default_factory=dict)


def _log_abs(value: complex) -> Any:
    return math.log(abs(value)) if value != 0 else None


def _with_exact(result: Dict[str, Any], exact_value: complex) -> Dict[str, Any]:
    exact_log = _log_abs(exact_value)
    result["exact_value"] = exact_value
    result["exact_log_abs"] = exact_log
    if exact_log is not None:
        result["log_abs_error"] = abs(result["log_value"].real - exact_log)
    return result


def exact(args) -> CommandOutput:
    """Mixed discriminant, padded mixed discriminant, permanent or minor power sum."""
    instance = InstanceFile.load(args.tuple or args.matrix)
    quantity = args.quantity or ("mixed-discriminant" if args.tuple else "permanent")
    options: Dict[str, Any] = {"quantity": quantity}
    if quantity == "mixed-discriminant":
        options["method"] = args.method
        value = mixed_discriminant_exact(instance.matrix_tuple(), method=args.method)
    elif quantity == "padded":
        value = padded_mixed_discriminant(instance.matrix_tuple())
    elif quantity == "permanent":
        value = permanent(instance.single_matrix())
    else:
        m = instance.option("m", args.m, 2)
        options["m"] = m
        instance = instance.with_values(m=m)
        value = minor_power_sum_exact(instance.single_matrix(), m)
    inputs = {"instance": instance.to_dict(), "options": options}
    return CommandOutput(inputs, {"quantity": quantity, "value": value, "log_abs": _log_abs(value)})


def approx(args) -> CommandOutput:
    """Polydisc approximation, or the positive definite path with ``--pd``."""
    instance = InstanceFile.load(args.tuple)
    eps = instance.option("eps", args.eps, DEFAULT_EPS)
    method = DERIVATIVE_METHODS[args.method]
    if args.pd:
        instance = instance.with_values(eps=eps)
        result = approx_log_mixed_discriminant_pd(instance.matrix_tuple(), eps, method)
        output = {"approximation": approx_result_dict(result)}
        stack = instance.matrices
    else:
        rho = instance.option("rho", args.rho, DEFAULT_RHO)
        points = args.points if args.points is not None else instance.points
        if points is None:
            raise InputError("points", "give --points or a 'points' field in the instance file")
        points = ComplexListParameter("points", list(points)).value
        instance = instance.with_values(eps=eps, rho=rho, points=points)
        problem = PolydiscInstance(instance.matrices, points, rho, eps)
        report = check_domain(problem)
        report.raise_if_failed()
        result = approx_log_mixed_discriminant(problem, method)
        output = {"approximation": approx_result_dict(result), "domain": report.as_dict()}
        identity = np.eye(problem.n)
        stack = [identity + z * q.entries for z, q in zip(problem.points, problem.matrices)]
    if args.check_exact:
        output["approximation"] = _with_exact(
            output["approximation"], mixed_discriminant_exact(stack)
        )
    inputs = {
        "instance": instance.to_dict(),
        "options": {"pd": args.pd, "method": args.method, "check_exact": args.check_exact},
    }
    return CommandOutput(inputs, output)


def ds(args) -> CommandOutput:
    """Doubly stochastic tuples: validate, scale, approximate, contract."""
    instance = InstanceFile.load(args.tuple)
    matrices = instance.matrix_tuple()
    options: Dict[str, Any] = {"action": args.action}
    if args.action == "validate":
        options["tol"] = args.tol
        result = {"report": is_doubly_stochastic(matrices, args.tol).as_dict()}
    elif args.action == "scale":
        tol = 1e-10 if args.tol is None else args.tol
        options.update(tol=tol, max_iter=args.max_iter)
        scaling = scale_to_doubly_stochastic(matrices, tol=tol, max_iter=args.max_iter)
        result = scaling.as_dict()
        result["reconstruction_error"] = scaling.reconstruction_error(matrices)
    elif args.action == "approx":
        z = instance.option("z", args.z)
        if z is None:
            raise InputError("z", "give --z or a 'z' field in the instance file")
        z = parse_complex(z)
        eps = instance.option("eps", args.eps, DEFAULT_EPS)
        instance = instance.with_values(eps=eps, z=[z.real, z.imag], rho=args.rho)
        options.update(method=args.method)
        approximation = approx_log_mixed_disc_ds(
            matrices, z, eps, rho=args.rho, method=DERIVATIVE_METHODS[args.method]
        )
        result = {"approximation": approx_result_dict(approximation)}
        if args.check_exact:
            identity = np.eye(matrices.n)
            value = mixed_discriminant_exact([identity + z * q.entries for q in matrices])
            result["approximation"] = _with_exact(result["approximation"], value)
    else:
        gamma = instance.option("gamma", args.gamma)
        if gamma is None:
            raise InputError("gamma", "give --gamma or a 'gamma' field in the instance file")
        eps = instance.option("eps", args.eps, DEFAULT_EPS)
        instance = instance.with_values(eps=eps, gamma=gamma)
        options.update(method=args.method)
        approximation = approx_log_contracted(
            matrices, gamma, eps, method=DERIVATIVE_METHODS[args.method]
        )
        result = {"approximation": approx_result_dict(approximation)}
        if args.check_exact:
            center = np.eye(matrices.n) / matrices.n
            value = mixed_discriminant_exact(
                [(1 - gamma) * center + gamma * q.entries for q in matrices]
            )
            result["approximation"] = _with_exact(result["approximation"], value)
    return CommandOutput({"instance": instance.to_dict(), "options": options}, result)


def charpoly(args) -> CommandOutput:
    """Mixed characteristic polynomial with optional root and stability checks."""
    instance = InstanceFile.load(args.tuple)
    matrices = instance.matrix_tuple()
    polynomial = mixed_char_poly_coeffs(matrices)
    result: Dict[str, Any] = {
        "coefficients": list(polynomial.coeffs),
        "roots": list(polynomial.roots()),
    }
    if args.mss:
        traces = [float(np.trace(a.entries).real) for a in matrices]
        eps_trace = instance.option("eps_trace", args.eps_trace, max(traces))
        instance = instance.with_values(eps_trace=eps_trace)
        result["mss"] = mss_root_check(matrices, eps_trace).as_dict()
    if args.stability:
        stability = ds_stability_polynomial(matrices)
        result["stability"] = {
            "coefficients": list(stability.coeffs),
            "min_root_modulus": finite_or_none(stability.min_root_modulus()),
            "zero_free_radius": STABILITY.ds_rho_limit * matrices.n,
        }
    options = {"mss": args.mss, "stability": args.stability}
    return CommandOutput({"instance": instance.to_dict(), "options": options}, result)


def minors(args) -> CommandOutput:
    """Approximate sum_S det(B_S)^m, from a matrix or from rank-2 vectors."""
    instance = InstanceFile.load(args.matrix)
    if args.from_vectors:
        vectors = instance.single_matrix().entries.real
        matrix = gram_from_rank2(vectors)
    else:
        matrix = instance.single_matrix()
    m = instance.option("m", args.m, 2)
    rho = instance.option("rho", args.rho, DEFAULT_RHO)
    eps = instance.option("eps", args.eps, DEFAULT_EPS)
    instance = instance.with_values(m=m, rho=rho, eps=eps)
    result = {"approximation": approx_result_dict(approx_log_minor_power_sum(matrix, m, rho, eps))}
    if args.check_exact:
        result["approximation"] = _with_exact(
            result["approximation"], minor_power_sum_exact(matrix, m)
        )
        if args.from_vectors:
            result["mixed_discriminant"] = mixed_discriminant_exact(rank2_tuple(vectors))
    options = {"from_vectors": args.from_vectors, "check_exact": args.check_exact}
    return CommandOutput({"instance": instance.to_dict(), "options": options}, result)


def verify(args) -> CommandOutput:
    """Sampled zero-free checks."""
    options = {key: getattr(args, key) for key in ("region", "n", "samples", "grid", "seed")}
    if args.region == "polydisc":
        options["boundary"] = args.boundary
        report = verify_zero_free_polydisc(args.n, args.samples, args.grid, args.seed, args.boundary)
    elif args.region == "ds":
        report = verify_zero_free_ds(args.n, args.samples, args.grid, args.seed)
    else:
        options["m"] = args.m
        report = verify_zero_free_minors(args.n, args.m, args.samples, args.grid, args.seed)
    if not report.passed:
        logger.warning("zero-free check failed: min ratio %.3e", report.min_ratio)
    return CommandOutput({"options": options}, {"report": report.as_dict()})


def gen(args) -> CommandOutput:
    """Generate a seeded instance file."""
    n, seed = args.n, args.seed
    fields: Dict[str, Any] = {"seed": seed}
    if args.kind == "symmetric":
        norm_bound = args.norm_bound if args.norm_bound is not None else STABILITY.gamma0
        matrices = gen_symmetric_tuple(n, norm_bound, seed)
        radius = args.radius if args.radius is not None else DEFAULT_RHO
        fields.update(
            points=tuple(gen_points(n, radius, [seed, n], grid=args.grid)),
            rho=radius,
            eps=args.eps if args.eps is not None else DEFAULT_EPS,
        )
    elif args.kind == "ds":
        matrices = gen_ds_tuple(n, seed)
    elif args.kind == "pd":
        matrices = gen_pd_tuple(n, seed, args.count)
    elif args.kind == "matrix":
        norm_bound = args.norm_bound if args.norm_bound is not None else 0.5
        matrices = [gen_bounded_matrix(n, norm_bound, seed, args.complex)]
    elif args.kind == "psd-decomposition":
        matrices = gen_psd_decomposition(n, seed, args.count, args.rank)
    else:
        matrices = [gen_rank2_vectors(n, seed)]
    instance = InstanceFile.from_matrices(matrices, **fields)
    options = {key: getattr(args, key) for key in ("kind", "n", "seed")}
    return CommandOutput({"options": options}, {"instance": instance.to_dict()})


def bench(args) -> CommandOutput:
    from .bench import run_bench

    return run_bench(args)
