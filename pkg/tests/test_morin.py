import numpy as np
import pytest

from akfronts.classify import (
    a_class,
    classify_lambda_route,
    corank_too_high,
    degenerate,
    regular,
)
from akfronts.definitions import format_definition, parse_morin
from akfronts.errors import NumericFailure
from akfronts.expr import diff, evaluate
from akfronts.front import LocalJets
from akfronts.jet import monomials
from akfronts.morin import (
    classify_morin,
    front_class_matches_morin,
    morin_normal_form,
    project_and_classify,
    restrict_morin_to_front,
    singular_chart,
)
from akfronts.oracle import ak_front_normal_form

CASES = [(k, n) for n in range(1, 5) for k in range(1, n + 1)]


def test_normal_form_text():
    text = format_definition(morin_normal_form(2, 2))
    assert "map (z1*z2 + z2^3, z1)" in text
    assert "map (z1*z3 + z2*z3^2 + z3^4, z1, z2)" in format_definition(morin_normal_form(3, 3))


def test_invalid_parameters():
    with pytest.raises(ValueError):
        morin_normal_form(3, 2)
    with pytest.raises(ValueError):
        morin_normal_form(0, 2)


@pytest.mark.parametrize("k, n", CASES)
def test_normal_forms_are_ak_morin(k, n):
    rep = classify_morin(morin_normal_form(k, n), np.zeros(n))
    assert rep.label == f"A{k}"
    assert rep.route == "morin"


def test_fold_away_from_the_cusp_and_regular_points():
    fmap = morin_normal_form(2, 2)
    # lambda = z1 + 3 z2^2; (-3*0.09, 0.3) is a fold point
    assert classify_morin(fmap, [-0.27, 0.3]).label == "A1"
    assert classify_morin(fmap, [0.4, 0.1]).label == "Regular"


def test_whitney_umbrella_like_corank_two():
    fmap = parse_morin("morin m vars x, y map (x^2, y^2)")
    assert classify_morin(fmap, [0.0, 0.0]).cls == corank_too_high()


@pytest.mark.parametrize("k, n", [(k, n) for k, n in CASES if n <= 3])
def test_restriction_matches_morin_class(k, n):
    fmap = morin_normal_form(k, n)
    morin = classify_morin(fmap, np.zeros(n)).cls
    front = restrict_morin_to_front(fmap, np.zeros(n))
    got = classify_lambda_route(front, np.zeros(n - 1), jet_order=None).cls
    assert front_class_matches_morin(morin, got)


def test_restriction_requires_corank_one():
    fmap = parse_morin("morin m vars x, y map (x^2, y^2)")
    with pytest.raises(NumericFailure):
        restrict_morin_to_front(fmap, [0.0, 0.0])


def test_singular_chart_stays_on_the_singular_set():
    fmap = morin_normal_form(3, 3)
    p = np.array([0.1, -0.2, 0.0])
    p[0] = -(2 * p[1] * p[2] + 4 * p[2] ** 3)  # lambda = z1 + 2 z2 z3 + 4 z3^3 = 0
    loc = LocalJets(fmap, p, 6)
    chart = singular_chart(loc.lam, 5, loc.tol)
    assert chart.residual < 1e-12
    for s in (1e-2, 2e-2):
        x = np.array([float(evaluate_jet(c, [s, -s])) for c in chart.x])
        assert abs(lambda_at(fmap, x)) < 1e-8


def evaluate_jet(jet, s):
    out = 0.0
    for c, alpha in zip(jet.coeffs, monomials(jet.nvars, jet.order)):
        out += c * np.prod([si ** a for si, a in zip(s, alpha)])
    return out


def lambda_at(fmap, x):
    jac = np.array([[evaluate(diff(e, i), x) for i in range(fmap.n)] for e in fmap.map],
                   dtype=float)
    return np.linalg.det(jac)


def test_projection_of_the_swallowtail():
    front = ak_front_normal_form(2, 2)
    assert project_and_classify(front, [0.0, 0.0], [1.0, 0.0, 0.0]).label == "A2"
    # a point of the cuspidal edge (x = -6 t^2) projects to a regular point
    t = 0.2
    rep = project_and_classify(front, [t, -6 * t * t], [1.0, t, t * t])
    assert rep.label == "Regular"
    assert rep.route == "projection"


def test_projection_direction_must_leave_the_tangent_space():
    front = ak_front_normal_form(2, 2)
    with pytest.raises(ValueError):
        project_and_classify(front, [0.0, 0.0], [0.0, 1.0, 0.0])


def test_correspondence_table():
    assert front_class_matches_morin(a_class(1), regular())
    assert not front_class_matches_morin(a_class(1), a_class(2))
    assert front_class_matches_morin(a_class(3), a_class(3))
    assert front_class_matches_morin(degenerate(2), degenerate(2))
    assert not front_class_matches_morin(a_class(2), a_class(3))
