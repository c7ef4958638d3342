import math

import numpy as np
import pytest

from mixdisc.parameters import (
    ComplexListParameter,
    IntegerParameter,
    IntervalParameter,
    open_unit,
    parse_complex,
    positive,
    positive_integer,
)
from mixdisc.support import InputError, ParameterError
from tests.support import check_no_change

# Test configurations for each parameter class
PARAM_CONFIGS = {
    IntervalParameter: {
        "kwargs": {"low": 0.0, "high": 1.0},
        "basic_value": 0.5,
        "updated_value": 0.25,
        "convert_values": [("0.125", 0.125), (1, None)],
        "bad_values": [0.0, 1.0, -3, math.inf, math.nan, "abc", None],
    },
    IntegerParameter: {
        "kwargs": {"min": 1, "max": 10},
        "basic_value": 2,
        "updated_value": 3,
        "convert_values": [("5", 5), (4.0, 4), (np.int64(7), 7)],
        "bad_values": [0, 11, 2.5, True, "two", None],
    },
    ComplexListParameter: {
        "kwargs": {"length": 2},
        "basic_value": (0.9 + 0j, 0.5j),
        "updated_value": (0j, 1 + 0j),
        "convert_values": [([[0.9, 0.0], "0.5j"], (0.9 + 0j, 0.5j))],
        "bad_values": ["0.9", [0.9], [0.9, "x"], None],
    },
}


@pytest.mark.parametrize("param_class", PARAM_CONFIGS.keys())
def test_basic_value(param_class):
    config = PARAM_CONFIGS[param_class]
    param = param_class("p", config["basic_value"], **config["kwargs"])
    assert param.name == "p"
    assert param.value == config["basic_value"]


@pytest.mark.parametrize("param_class", PARAM_CONFIGS.keys())
def test_value_conversion(param_class):
    config = PARAM_CONFIGS[param_class]
    for raw, expected in config["convert_values"]:
        if expected is None:
            with pytest.raises(ParameterError):
                param_class("p", raw, **config["kwargs"])
        else:
            assert param_class("p", raw, **config["kwargs"]).value == expected


@pytest.mark.parametrize("param_class", PARAM_CONFIGS.keys())
def test_bad_values_rejected(param_class):
    config = PARAM_CONFIGS[param_class]
    for bad in config["bad_values"]:
        with pytest.raises(ParameterError):
            param_class("p", bad, **config["kwargs"])


@pytest.mark.parametrize("param_class", PARAM_CONFIGS.keys())
def test_setter_validates(param_class):
    config = PARAM_CONFIGS[param_class]
    param = param_class("p", config["basic_value"], **config["kwargs"])
    param.value = config["updated_value"]
    assert param.value == config["updated_value"]
    for bad in config["bad_values"]:
        with check_no_change(param):
            with pytest.raises(ParameterError):
                param.value = bad


def test_interval_closed_ends():
    param = IntervalParameter("norm", 0.045, low=0.0, high=0.045, include_high=True)
    assert param.value == 0.045
    assert param.describe_range() == "(0.0, 0.045]"
    with pytest.raises(ParameterError):
        IntervalParameter("rho", 0.5, low=0.8, high=0.6)


def test_integer_bounds():
    degree = IntegerParameter("degree", 0, min=0, max=10)
    assert degree.value == 0
    with pytest.raises(ParameterError):
        IntegerParameter("degree", 5, min=6, max=2)


def test_parameter_error_is_input_error():
    with pytest.raises(InputError) as info:
        open_unit("eps", 1.5)
    assert info.value.parameter_name == "eps"
    assert "eps" in str(info.value)


def test_helpers():
    assert open_unit("eps", "1e-3") == 1e-3
    assert positive("scale", 3) == 3.0
    assert positive_integer("n", "4") == 4
    with pytest.raises(ParameterError):
        positive("scale", 0)
    with pytest.raises(ParameterError):
        positive_integer("n", 0)


def test_parse_complex():
    assert parse_complex(" 1 - 2i ") == 1 - 2j
    assert parse_complex("0.1-0.2j") == 0.1 - 0.2j
    assert parse_complex([0.25, 0.5]) == 0.25 + 0.5j
    assert parse_complex(3) == 3 + 0j
    assert parse_complex(np.float64(0.5)) == 0.5 + 0j
    assert parse_complex(np.array([1.0, -1.0])) == 1 - 1j
    for bad in ["z", [1, 2, 3], complex(math.inf, 0), {"re": 1}, [math.nan, 0.0]]:
        with pytest.raises(ValueError):
            parse_complex(bad)


def test_complex_list_without_length():
    points = ComplexListParameter("points", [0.1, "0.2j", [0.3, 0.4]])
    assert points.value == (0.1 + 0j, 0.2j, 0.3 + 0.4j)
    assert ComplexListParameter("points", []).value == ()
