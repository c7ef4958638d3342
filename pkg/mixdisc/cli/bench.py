"""
Timing sweeps for the polydisc approximation over dimensions and accuracies.

Instances come from :func:`~mixdisc.generators.gen_symmetric_tuple` and
:func:`~mixdisc.generators.gen_points`, so a sweep is reproducible from its
seed. Wall-clock times go to the ``timing`` section only.
"""

import logging
import math
import time
from typing import Any, Dict, List

import numpy as np

from ..approx import PolydiscInstance, approx_log_mixed_discriminant
from ..generators import gen_points, gen_symmetric_tuple
from ..support import STABILITY, InputError
from .commands import DERIVATIVE_METHODS, CommandOutput

logger = logging.getLogger(__name__)

DEFAULT_NS = (4, 8, 16)
DEFAULT_EPS = (1e-2,)
DEFAULT_RHO = 0.5


def degree_fit(ns: List[int], degrees: List[int]) -> Dict[str, Any]:
    """Least squares fit degree ~ slope * ln n + intercept."""
    if len(set(ns)) < 2:
        return {"slope": None, "intercept": None}
    slope, intercept = np.polyfit(np.log(ns), np.asarray(degrees, dtype=float), 1)
    return {"slope": float(slope), "intercept": float(intercept)}


def plot_sweep(rows: List[Dict[str, Any]], seconds: List[float], path: str) -> None:
    import matplotlib as mpl

    mpl.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(1, 2, figsize=(9, 3.5), layout="constrained")
    for eps in sorted({row["eps"] for row in rows}):
        picked = [(row["n"], row["degree"], t) for row, t in zip(rows, seconds) if row["eps"] == eps]
        ns, degrees, times = zip(*picked)
        ax[0].plot(ns, degrees, marker="o", label=f"eps = {eps:g}")
        ax[1].plot(ns, times, marker="o", label=f"eps = {eps:g}")
    ax[0].set_xscale("log")
    ax[0].set_xlabel("n")
    ax[0].set_ylabel("Taylor degree")
    ax[1].set_xscale("log")
    ax[1].set_yscale("log")
    ax[1].set_xlabel("n")
    ax[1].set_ylabel("seconds")
    ax[0].legend()
    fig.savefig(path)
    plt.close(fig)


def run_bench(args) -> CommandOutput:
    ns = list(args.ns or DEFAULT_NS)
    eps_values = list(args.eps or DEFAULT_EPS)
    rho = args.rho if args.rho is not None else DEFAULT_RHO
    if not ns or not eps_values:
        raise InputError("bench", "need at least one n and one eps")
    method = DERIVATIVE_METHODS[args.method]

    rows, seconds = [], []
    for n in ns:
        matrices = gen_symmetric_tuple(n, STABILITY.gamma0, [args.seed, n])
        points = gen_points(n, rho, [args.seed, n, 1])
        for eps in eps_values:
            instance = PolydiscInstance(matrices, points, rho, eps)
            start = time.perf_counter()
            result = approx_log_mixed_discriminant(instance, method)
            elapsed = time.perf_counter() - start
            logger.info("n = %d, eps = %g: degree %d in %.3fs", n, eps, result.degree, elapsed)
            rows.append(
                {
                    "n": n,
                    "eps": eps,
                    "degree": result.degree,
                    "log_value": result.log_value,
                    "truncation_bound": result.truncation_bound,
                    "log_n_factorial": math.lgamma(n + 1),
                }
            )
            seconds.append(elapsed)

    fits = {}
    for eps in eps_values:
        picked = [row for row in rows if row["eps"] == eps]
        fits[repr(eps)] = degree_fit([row["n"] for row in picked], [row["degree"] for row in picked])
    if args.plot:
        plot_sweep(rows, seconds, args.plot)

    options = {
        "ns": ns,
        "eps": eps_values,
        "rho": rho,
        "seed": args.seed,
        "method": args.method,
        "plot": args.plot,
    }
    timing = {"runs": [{"n": r["n"], "eps": r["eps"], "seconds": t} for r, t in zip(rows, seconds)]}
    return CommandOutput({"options": options}, {"runs": rows, "degree_fit": fits}, timing)
