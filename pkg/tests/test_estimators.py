import doctest
from importlib import resources

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

import akfronts.estimators
from akfronts import FrontClassifier, MorinClassifier, ZigzagAnalyzer
from akfronts._validation import (
    check_box,
    check_grid,
    check_jet_order,
    check_point,
    check_points,
    check_route,
    check_tolerance,
)
from akfronts.definitions import parse_front, parse_loop
from akfronts.morin import morin_normal_form
from akfronts.oracle import ak_front_normal_form

DATA = resources.files("akfronts") / "data"


def test_docstring_example():
    result = doctest.testmod(akfronts.estimators)
    assert result.attempted >= 1 and result.failed == 0


def test_params_round_trip_and_clone():
    clf = FrontClassifier(route="both", k_max=3, jet_order=8)
    params = clf.get_params()
    assert params == {"route": "both", "k_max": 3, "tol_zero": clf.tol_zero,
                      "tol_rank": clf.tol_rank, "jet_order": 8}
    other = clone(clf)
    assert other.get_params() == params and other is not clf
    clf.set_params(route="mu")
    assert clf.route == "mu"


def test_not_fitted():
    with pytest.raises(NotFittedError):
        FrontClassifier().predict([[0.0, 0.0]])
    with pytest.raises(NotFittedError):
        MorinClassifier().predict([[0.0]])
    with pytest.raises(NotFittedError):
        ZigzagAnalyzer().predict([])


def test_front_classifier_predict_and_scan():
    clf = FrontClassifier().fit(ak_front_normal_form(2, 2))
    assert clf.n_features_in_ == 2
    labels = clf.predict([[0.0, 0.0], [0.2, -0.24], [0.3, 0.1]])
    assert labels.tolist() == ["A3", "A2", "Regular"]
    assert clf.predict([0.0, 0.0]).tolist() == ["A3"]
    res = clf.scan([(-0.5, 0.5)] * 2, 9)
    assert "A3" in {r.label for r in res}


def test_front_classifier_validation():
    front = ak_front_normal_form(1, 1)
    with pytest.raises(ValueError):
        FrontClassifier(route="mu").fit(front)
    with pytest.raises(ValueError):
        FrontClassifier(tol_zero=-1).fit(front)
    with pytest.raises(ValueError):
        FrontClassifier(jet_order=2).fit(front)
    with pytest.raises(TypeError):
        FrontClassifier().fit(morin_normal_form(1, 1))
    clf = FrontClassifier().fit(ak_front_normal_form(2, 2))
    with pytest.raises(ValueError):
        clf.predict([[0.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        clf.predict([[np.nan, 0.0]])


def test_morin_classifier():
    clf = MorinClassifier().fit(morin_normal_form(2, 2))
    assert clf.predict([[0.0, 0.0], [-0.27, 0.3], [0.4, 0.1]]).tolist() == \
        ["A2", "A1", "Regular"]
    with pytest.raises(TypeError):
        MorinClassifier().fit(ak_front_normal_form(1, 1))


def test_zigzag_analyzer():
    loop = parse_loop((DATA / "full_turn.loop").read_text())
    ana = ZigzagAnalyzer().fit(parse_front((DATA / "four_cusps_two_zigs.front").read_text()))
    assert ana.predict([loop]).tolist() == [2]
    ana = ZigzagAnalyzer().fit(parse_front((DATA / "deltoid.front").read_text()))
    assert ana.predict([loop]).tolist() == [-1]
    with pytest.raises(ValueError):
        ZigzagAnalyzer(samples=4).fit(ak_front_normal_form(1, 1))


def test_validation_helpers():
    assert check_point([1, 2], 2).tolist() == [1.0, 2.0]
    assert check_points([1, 2], 2).shape == (1, 2)
    assert check_box([-1, 1], 3).shape == (3, 2)
    assert check_box([0, 1, 2, 3], 2).tolist() == [[0, 1], [2, 3]]
    assert check_jet_order(None) is None
    for bad in (lambda: check_point([1], 2), lambda: check_tolerance(0, "tol"),
                lambda: check_jet_order(3), lambda: check_route("mu", 1),
                lambda: check_route("sideways", 2), lambda: check_box([1, 0], 1),
                lambda: check_box([0, 1, 2], 2), lambda: check_grid(0, 2)):
        with pytest.raises(ValueError):
            bad()
