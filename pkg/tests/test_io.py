import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deglab.generators import gen_random
from deglab.io import MalformedInput, dumps_function, format_float, loads_function, read_function, write_function
from deglab.plfn import PhaseFunction, PLFunction


def test_format_float_sentinels():
    assert format_float(float("inf")) == "inf"
    assert format_float(float("-inf")) == "-inf"
    assert format_float(float("nan")) == "nan"
    assert format_float(0.1) == "0.1"


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["json", "csv"]))
def test_round_trip_is_bit_exact(seed, fmt):
    g = gen_random(seed, 20, 7, 0.01)
    assert loads_function(dumps_function(g, fmt), fmt) == g


def test_phase_flag_round_trip(tmp_path):
    phi = PhaseFunction(PLFunction((0.0, 0.5, 1.0), (0.0, 0.7, 1.0)))
    path = tmp_path / "phi.json"
    write_function(phi, str(path))
    back = read_function(str(path))
    assert isinstance(back, PhaseFunction) and back.base == phi.base
    assert isinstance(read_function(str(path), phase=False), PLFunction)


@pytest.mark.parametrize(
    "text,fmt",
    [
        ("not json", "json"),
        ('{"points": []}', "json"),
        ('{"breakpoints": [[0, 0], [1, 1]], "extra": 1}', "json"),
        ('{"breakpoints": [[0, 0], [0, 1]]}', "json"),
        ('{"breakpoints": [[0, 0]]}', "json"),
        ("a,b\n0,0\n1,1\n", "csv"),
        ("x,y\n0,0,3\n1,1\n", "csv"),
        ("x,y\n0,zero\n1,1\n", "csv"),
    ],
)
def test_malformed_inputs(text, fmt):
    with pytest.raises(MalformedInput):
        loads_function(text, fmt)


def test_missing_file():
    with pytest.raises(MalformedInput):
        read_function("/nonexistent/function.json")
