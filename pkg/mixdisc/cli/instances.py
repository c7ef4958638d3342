"""
Instance files and output documents.

An instance file is a JSON object::

    {
      "n": 2,
      "matrices": [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]],
      "points": [[0.9, 0.0], [0.9, 0.0]],
      "eps": 0.001,
      "rho": 0.9,
      "seed": 0
    }

Matrices are row-major; each entry is a number or an ``[re, im]`` pair. Points
are ``[re, im]`` pairs (plain numbers are accepted). Any other key (``m``,
``z``, ``gamma``, ``eps_trace``, ...) is kept in ``extra``.

Every command writes one output document with the keys ``command``,
``version``, ``inputs``, ``result`` and ``timing``. An output document can be
used wherever an instance file is expected: the loader takes the generated
instance from ``result.instance`` or the echoed one from ``inputs.instance``.
"""

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, IO, List, Optional, Tuple

import numpy as np

from ..matrices import ComplexMatrix, MatrixTuple, as_matrix
from ..parameters import ComplexListParameter, IntegerParameter, parse_complex
from ..support import InputError, InstanceFileError

CORE_KEYS = ("n", "matrices", "points", "eps", "rho", "seed")


def encode_complex(value: complex) -> List[float]:
    value = complex(value)
    return [value.real, value.imag]


def encode_matrix(matrix: Any) -> List[List[Any]]:
    """Nested lists of floats, or of [re, im] pairs when an entry is non-real."""
    array = np.asarray(matrix)
    if np.iscomplexobj(array) and np.any(array.imag != 0):
        return [[encode_complex(entry) for entry in row] for row in array]
    return np.real(array).astype(float).tolist()


def decode_matrix(rows: Any) -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        raise ValueError("a matrix must be a list of rows")
    entries = []
    pairs = False
    for row in rows:
        decoded = []
        for entry in row:
            if isinstance(entry, list):
                pairs = True
            elif isinstance(entry, bool) or not isinstance(entry, (int, float)):
                raise ValueError(f"matrix entry {entry!r} is not a number or [re, im] pair")
            decoded.append(parse_complex(entry))
        entries.append(decoded)
    if len({len(row) for row in entries}) > 1:
        raise ValueError("matrix rows have different lengths")
    array = np.array(entries, dtype=complex)
    return array if pairs else array.real.copy()


def to_jsonable(value: Any) -> Any:
    """
    Convert results to JSON types.

    Complex numbers become [re, im] pairs and non-finite floats become None,
    so every document is strict JSON.
    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return finite_or_none(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return [finite_or_none(part) for part in encode_complex(value)]
    return value


def _instance_section(data: Any) -> Any:
    if isinstance(data, dict):
        result = data.get("result")
        if isinstance(result, dict) and isinstance(result.get("instance"), dict):
            return result["instance"]
        inputs = data.get("inputs")
        if isinstance(inputs, dict) and isinstance(inputs.get("instance"), dict):
            return inputs["instance"]
    return data


@dataclass
class InstanceFile:
    """
    Parsed instance file.

    Parameters
    ----------
    matrices : list of np.ndarray
        The matrices, in file order
    points, eps, rho, seed : optional
        The optional core fields
    extra : dict
        Any other fields
    path : str
        Source file, used in error messages
    """

    matrices: List[np.ndarray]
    points: Optional[Tuple[complex, ...]] = None
    eps: Optional[float] = None
    rho: Optional[float] = None
    seed: Optional[int] = None
    extra: Dict[str, Any] = field(default_factory=dict)
    path: str = "<memory>"

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0] if self.matrices else 0

    @classmethod
    def from_dict(cls, data: Any, path: str = "<memory>") -> "InstanceFile":
        """
        Build an instance from a decoded JSON document.

        Raises
        ------
        InstanceFileError
            If a field is missing or malformed
        """
        data = _instance_section(data)
        if not isinstance(data, dict):
            raise InstanceFileError(path, "the document must be a JSON object")
        if not isinstance(data.get("matrices"), list) or not data["matrices"]:
            raise InstanceFileError(path, "'matrices' must be a non-empty list")
        try:
            matrices = [decode_matrix(rows) for rows in data["matrices"]]
            points = None
            if data.get("points") is not None:
                points = ComplexListParameter("points", data["points"]).value
            eps = None if data.get("eps") is None else float(data["eps"])
            rho = None if data.get("rho") is None else float(data["rho"])
            seed = None
            if data.get("seed") is not None:
                seed = IntegerParameter("seed", data["seed"], min=0).value
        except (TypeError, ValueError) as e:
            raise InstanceFileError(path, str(e)) from e
        if data.get("n") is not None:
            shapes = {m.shape for m in matrices}
            if shapes != {(data["n"], data["n"])}:
                raise InstanceFileError(
                    path, f"declared n = {data['n']} but the matrices have shapes {sorted(shapes)}"
                )
        extra = {key: value for key, value in data.items() if key not in CORE_KEYS}
        return cls(matrices, points, eps, rho, seed, extra, path)

    @classmethod
    def load(cls, path: str) -> "InstanceFile":
        """
        Read an instance file or an output document.

        Raises
        ------
        InstanceFileError
            If the file cannot be read or parsed
        """
        try:
            with open(path, "r", encoding="utf-8") as stream:
                data = json.load(stream)
        except OSError as e:
            raise InstanceFileError(path, e.strerror or str(e)) from e
        except json.JSONDecodeError as e:
            raise InstanceFileError(path, f"invalid JSON ({e})") from e
        return cls.from_dict(data, path)

    @classmethod
    def from_matrices(cls, matrices: Any, **fields: Any) -> "InstanceFile":
        arrays = [np.array(getattr(m, "entries", m)) for m in matrices]
        return cls(arrays, **fields)

    def with_values(self, **changes: Any) -> "InstanceFile":
        """Copy with core fields replaced and extra fields merged (None values skipped)."""
        core = {k: v for k, v in changes.items() if k in CORE_KEYS and v is not None}
        extra = {k: v for k, v in changes.items() if k not in CORE_KEYS and v is not None}
        if "points" in core:
            core["points"] = tuple(complex(z) for z in core["points"])
        return replace(self, extra={**self.extra, **extra}, **core)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "n": self.n,
            "matrices": [encode_matrix(m) for m in self.matrices],
        }
        if self.points is not None:
            data["points"] = [encode_complex(z) for z in self.points]
        for key in ("eps", "rho", "seed"):
            if getattr(self, key) is not None:
                data[key] = getattr(self, key)
        data.update(to_jsonable(self.extra))
        return data

    def matrix_tuple(self) -> MatrixTuple:
        return MatrixTuple(self.matrices)

    def single_matrix(self) -> ComplexMatrix:
        if len(self.matrices) != 1:
            raise InputError(
                "instance", f"expected exactly one matrix, '{self.path}' holds {len(self.matrices)}"
            )
        return as_matrix(self.matrices[0])

    def option(self, name: str, value: Any = None, default: Any = None) -> Any:
        """A command-line value, else the file value, else the default."""
        if value is not None:
            return value
        stored = getattr(self, name, None) if name in CORE_KEYS else self.extra.get(name)
        return default if stored is None else stored


def output_document(
    command: str, inputs: Dict[str, Any], result: Dict[str, Any], timing: Dict[str, Any]
) -> Dict[str, Any]:
    from .. import __version__

    return {
        "command": command,
        "version": __version__,
        "inputs": to_jsonable(inputs),
        "result": to_jsonable(result),
        "timing": to_jsonable(timing),
    }


def write_document(document: Dict[str, Any], stream: IO[str]) -> None:
    """Write a document as sorted, indented JSON; floats keep their shortest exact repr."""
    json.dump(document, stream, indent=2, sort_keys=True, allow_nan=False)
    stream.write("\n")


def approx_result_dict(result: Any) -> Dict[str, Any]:
    """Flatten an ApproxResult for output."""
    data = {
        "log_value": result.log_value,
        "value": result.value(),
        "degree": result.degree,
        "truncation_bound": finite_or_none(result.truncation_bound),
        "relative_error_bound": finite_or_none(result.relative_error_bound),
        "beta": finite_or_none(result.beta),
        "n": result.n,
        "rounding_estimate": result.rounding_estimate,
    }
    data.update(result.details)
    return data


def finite_or_none(value: float) -> Optional[float]:
    """The value, or None where JSON has no number for it."""
    return value if math.isfinite(value) else None
