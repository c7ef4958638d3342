import json
import math
from contextlib import contextmanager
from dataclasses import asdict
from itertools import permutations

import numpy as np

from mixdisc.support import get_settings, override_settings
from mixdisc.cli import run


@contextmanager
def check_no_change(parameter):
    """Fail if a block changes any attribute of a parameter (e.g. a rejected assignment)."""
    before = {key: value for key, value in vars(parameter).items()}
    try:
        yield
    finally:
        changed = {key for key, value in vars(parameter).items() if before.get(key) != value}
        if changed:
            raise AttributeError(f"Block changed the following attributes: {changed}")


@contextmanager
def check_settings_restored():
    before = asdict(get_settings())
    try:
        yield
    finally:
        after = asdict(get_settings())
        if before != after:
            raise AssertionError(f"Settings changed: {before} -> {after}")


def values_for_threads(compute, threads=(1, 2, 4)):
    """Results of ``compute()`` under each thread count."""
    values = []
    for count in threads:
        with override_settings(threads=count):
            values.append(compute())
    return values


def brute_mixed_discriminant(matrices):
    """Double permutation sum, written out with explicit loops."""
    n = len(matrices)
    total = 0j
    for sigma in permutations(range(n)):
        sign = np.linalg.det(np.eye(n)[list(sigma)])
        for tau in permutations(range(n)):
            term = complex(sign)
            for i in range(n):
                term *= matrices[tau[i]][i][sigma[i]]
            total += term
    return total


def brute_minor_power_sum(matrix, m):
    n = len(matrix)
    matrix = np.asarray(matrix, dtype=complex)
    total = 0j
    for mask in range(2**n):
        subset = [i for i in range(n) if mask >> i & 1]
        minor = np.linalg.det(matrix[np.ix_(subset, subset)]) if subset else 1.0
        total += minor**m
    return total


def unwound_distance(a: complex, b: complex) -> float:
    """|a - b| after moving the imaginary parts to the same branch."""
    difference = complex(a) - complex(b)
    turns = round(difference.imag / (2 * math.pi))
    return abs(difference - 2j * math.pi * turns)


def write_instance(path, matrices, **fields):
    data = {"matrices": [np.asarray(m, dtype=float).tolist() for m in matrices], **fields}
    path.write_text(json.dumps(data))
    return str(path)


def reject_constant(token):
    raise ValueError(f"non-standard JSON constant {token!r} in output")


def run_cli(capsys, *argv):
    """Run the command line in-process; returns (exit code, parsed document or None, stderr).

    The document is parsed strictly, so NaN and Infinity tokens fail the test.
    """
    code = run([str(arg) for arg in argv])
    captured = capsys.readouterr()
    document = (
        json.loads(captured.out, parse_constant=reject_constant)
        if code == 0 and captured.out
        else None
    )
    return code, document, captured.err
