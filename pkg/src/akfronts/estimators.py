"""scikit-learn style wrappers.

``fit`` binds a front (or map), ``predict`` labels points or loops.  The
hyperparameters are plain constructor arguments, so ``get_params`` and
``set_params`` come from :class:`~sklearn.base.BaseEstimator`.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_jet_order, check_points, check_route, check_tolerance
from .classify import classify, scan_singular_set
from .definitions import FrontInstance, MorinMapInstance
from .front import DEFAULT_JET_ORDER, TOL_RANK, TOL_ZERO
from .morin import classify_morin
from .zigzag import zigzag_report

__all__ = ["FrontClassifier", "MorinClassifier", "ZigzagAnalyzer"]


def _require(est, attr):
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


class FrontClassifier(BaseEstimator):
    """Label points of a front as Regular, A_k, ... via the chosen route.

    >>> from akfronts.oracle import ak_front_normal_form
    >>> clf = FrontClassifier(route="both").fit(ak_front_normal_form(2, 2))
    >>> clf.predict([[0.0, 0.0], [0.3, 0.1]]).tolist()
    ['A3', 'Regular']
    """

    def __init__(self, route="lambda", k_max=None, tol_zero=TOL_ZERO, tol_rank=TOL_RANK,
                 jet_order=DEFAULT_JET_ORDER):
        self.route = route
        self.k_max = k_max
        self.tol_zero = tol_zero
        self.tol_rank = tol_rank
        self.jet_order = jet_order

    def _kw(self):
        return {"k_max": self.k_max, "tol_zero": self.tol_zero, "tol_rank": self.tol_rank,
                "jet_order": self.jet_order}

    def fit(self, front, y=None):
        if not isinstance(front, FrontInstance):
            raise TypeError(f"expected a FrontInstance, got {type(front).__name__}")
        check_route(self.route, front.n)
        check_tolerance(self.tol_zero, "tol_zero")
        check_tolerance(self.tol_rank, "tol_rank")
        check_jet_order(self.jet_order)
        self.front_ = front
        self.n_features_in_ = front.n
        return self

    def reports(self, X):
        _require(self, "front_")
        X = check_points(X, self.n_features_in_, self.front_.dtype)
        return [classify(self.front_, x, route=self.route, **self._kw()) for x in X]

    def predict(self, X):
        return np.array([r.label for r in self.reports(X)], dtype=object)

    def scan(self, box, grid):
        _require(self, "front_")
        return scan_singular_set(self.front_, box, grid, route=self.route, **self._kw())


class MorinClassifier(BaseEstimator):
    """A_k-Morin labels of an equidimensional map (Regular is A0)."""

    def __init__(self, k_max=None, tol_zero=TOL_ZERO, tol_rank=TOL_RANK,
                 jet_order=DEFAULT_JET_ORDER):
        self.k_max = k_max
        self.tol_zero = tol_zero
        self.tol_rank = tol_rank
        self.jet_order = jet_order

    def fit(self, fmap, y=None):
        if not isinstance(fmap, MorinMapInstance):
            raise TypeError(f"expected a MorinMapInstance, got {type(fmap).__name__}")
        check_tolerance(self.tol_zero, "tol_zero")
        check_tolerance(self.tol_rank, "tol_rank")
        check_jet_order(self.jet_order)
        self.map_ = fmap
        self.n_features_in_ = fmap.n
        return self

    def reports(self, X):
        _require(self, "map_")
        X = check_points(X, self.n_features_in_, self.map_.dtype)
        return [classify_morin(self.map_, x, k_max=self.k_max, tol_zero=self.tol_zero,
                               tol_rank=self.tol_rank, jet_order=self.jet_order) for x in X]

    def predict(self, X):
        return np.array([r.label for r in self.reports(X)], dtype=object)


class ZigzagAnalyzer(BaseEstimator):
    """Zig-zag numbers of loops on a fixed plane or higher front.

    ``predict`` returns ``z`` per loop, or -1 where the loop is not
    co-orientable.
    """

    def __init__(self, samples=None):
        self.samples = samples

    def fit(self, front, y=None):
        if not isinstance(front, FrontInstance):
            raise TypeError(f"expected a FrontInstance, got {type(front).__name__}")
        if front.field != "real":
            raise ValueError("zig-zag numbers are defined for real fronts")
        if self.samples is not None and int(self.samples) < 8:
            raise ValueError("samples must be at least 8")
        self.front_ = front
        self.n_features_in_ = front.n
        return self

    def reports(self, loops):
        _require(self, "front_")
        return [zigzag_report(self.front_, loop, self.samples) for loop in loops]

    def predict(self, loops):
        return np.array([-1 if r.z is None else r.z for r in self.reports(loops)])
