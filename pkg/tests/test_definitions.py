from importlib import resources

import numpy as np
import pytest

from akfronts.definitions import (
    FrontInstance,
    LoopSpec,
    MorinMapInstance,
    check_front_condition,
    format_definition,
    parse_definition,
    parse_front,
    parse_loop,
)
from akfronts.errors import DimensionMismatch, ParseError

DATA = resources.files("akfronts") / "data"
SHIPPED = sorted(p.name for p in DATA.iterdir() if p.name.endswith((".front", ".loop")))


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_definitions_round_trip(name):
    obj = parse_definition((DATA / name).read_text())
    again = parse_definition(format_definition(obj))
    assert again == obj
    assert format_definition(again) == format_definition(obj)


@pytest.mark.parametrize("name", [n for n in SHIPPED if n.endswith(".front")])
def test_shipped_fronts_satisfy_front_condition(name):
    front = parse_front((DATA / name).read_text())
    radius = 0.9 if front.n > 1 else 3.0
    assert check_front_condition(front, radius=radius) <= 1e-9


def test_front_sections():
    front = parse_front("""
        # comment line
        front demo
        dim 2
        vars a, b
        map (a, b, a*b)
        normal (-b, -a, 1)
        field complex
    """)
    assert isinstance(front, FrontInstance)
    assert front.variables == ("a", "b") and front.field == "complex" and front.n == 2


def test_morin_and_loop_sections():
    m = parse_definition("morin m vars u, v map (u*v + v^3, u)")
    assert isinstance(m, MorinMapInstance) and m.n == 2
    loop = parse_loop("loop l param s map (cos(2*pi*s), sin(2*pi*s)) samples 512 sign -1 "
                      "metric (2, 0, 0, 1)")
    assert isinstance(loop, LoopSpec)
    assert loop.samples == 512 and loop.sign == -1
    np.testing.assert_array_equal(loop.gram(2), [[2, 0], [0, 1]])


@pytest.mark.parametrize("text, error", [
    ("front f vars x map (x)", DimensionMismatch),
    ("front f vars x map (x, x^2) normal (1)", DimensionMismatch),
    ("front f dim 2 vars x map (x, x^2)", DimensionMismatch),
    ("front f vars x", DimensionMismatch),
    ("surface f vars x map (x, x)", ParseError),
    ("front f vars x map (x, x) colour red", ParseError),
    ("front f vars x map (x, x) map (x, x)", ParseError),
    ("front f vars x, x map (x, x, x)", ParseError),
    ("front f vars x map (x, x", ParseError),
    ("loop l map (s) sign 2", ParseError),
    ("front f vars x map (x, q)", ParseError),
])
def test_malformed_definitions(text, error):
    with pytest.raises(error):
        parse_definition(text)


def test_non_positive_metric_is_rejected():
    loop = parse_loop("loop l map (s, s) metric (1, 2, 2, 1)")
    with pytest.raises(ValueError):
        loop.gram(2)


def test_front_condition_detects_a_wrong_normal():
    front = parse_front("front f vars x, y map (x, y, x*y) normal (y, x, 1)")
    with pytest.raises(ValueError):
        check_front_condition(front)
