"""Argument checks shared by the estimators and the command line."""

import numpy as np

ROUTES = ("lambda", "mu", "both")
FIELDS = ("real", "complex")
MIN_JET_ORDER = 4


def check_point(p, n, dtype=float):
    """A single finite point of dimension ``n`` as a 1-d array."""
    p = np.asarray(p, dtype=dtype)
    if p.ndim != 1 or p.shape[0] != n:
        raise ValueError(f"expected a point with {n} coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    return p


def check_points(X, n, dtype=float):
    """Rows of ``X`` as points of dimension ``n``; a single point is promoted."""
    X = np.asarray(X, dtype=dtype)
    if X.ndim == 1 and n == X.shape[0]:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n:
        raise ValueError(f"expected an array of shape (m, {n}), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("points have non-finite coordinates")
    return X


def check_tolerance(value, name):
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def check_jet_order(order):
    if order is None:
        return None
    if int(order) != order or order < MIN_JET_ORDER:
        raise ValueError(f"jet order must be an integer >= {MIN_JET_ORDER}, got {order}")
    return int(order)


def check_route(route, n=None):
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}, got {route!r}")
    if route == "mu" and n is not None and n < 2:
        raise ValueError("the mu route needs a front with n >= 2")
    return route


def check_field(field):
    if field not in FIELDS:
        raise ValueError(f"field must be one of {FIELDS}, got {field!r}")
    return field


def check_box(box, n):
    """``n`` (lo, hi) pairs; a single pair is used for every axis."""
    box = np.asarray(box, dtype=float).ravel()
    if box.size == 2:
        box = np.tile(box, n)
    if box.size != 2 * n:
        raise ValueError(f"box needs 2 or {2 * n} numbers, got {box.size}")
    box = box.reshape(n, 2)
    if not np.all(np.isfinite(box)) or np.any(box[:, 1] <= box[:, 0]):
        raise ValueError("box bounds must be finite with lo < hi")
    return box


def check_grid(grid, n):
    g = np.broadcast_to(np.asarray(grid), (n,))
    if np.any(g != np.round(g)) or np.any(g < 1):
        raise ValueError(f"grid must be positive integers, got {grid}")
    return g.astype(int)
