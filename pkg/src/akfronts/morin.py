"""Morin singularities of equidimensional maps and their fronts.

The singular set of a corank-one map (or front) is parametrised by a graph
chart over ker d lambda, solved to full jet order by a chord Newton
iteration carried out on jets.  Restricting a Morin map to that chart, or
projecting a front along a direction, yields a front one dimension lower
whose class is then computed by the ordinary lambda route.
"""

from dataclasses import dataclass

import numpy as np

from .classify import (
    _kernel,
    a_class,
    classify_lambda_route,
)
from .definitions import MorinMapInstance
from .errors import NumericFailure
from .expr import parse_expr
from .front import TOL_RANK, TOL_ZERO, LocalFront, LocalJets, jet_det
from .jet import Jet, directional_derivative

__all__ = [
    "morin_normal_form",
    "classify_morin",
    "restrict_morin_to_front",
    "project_and_classify",
    "SingularChart",
    "singular_chart",
    "front_class_matches_morin",
]


def morin_normal_form(k, n):
    """``(z1*zn + ... + z_{k-1}*zn^(k-1) + zn^(k+1), z1, ..., z_{n-1})``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"need k <= n, got k={k}, n={n}")
    names = [f"z{i}" for i in range(1, n + 1)]
    last = names[-1]
    terms = [f"{names[i - 1]}*{last}" + (f"^{i}" if i > 1 else "") for i in range(1, k)]
    terms.append(f"{last}^{k + 1}")
    lookup = {v: i for i, v in enumerate(names)}
    first = parse_expr(" + ".join(terms), lookup)
    rest = [parse_expr(v, lookup) for v in names[:-1]]
    return MorinMapInstance(f"morin_a{k}_n{n}", tuple(names), (first, *rest))


def classify_morin(fmap, p, k_max=None, **kw):
    """A_k-Morin class of ``fmap`` at ``p`` (Regular is A_0)."""
    rep = classify_lambda_route(fmap, p, k_max=k_max, **kw)
    cls = rep.cls
    if cls.kind == "A":
        cls = a_class(cls.index - 1)
    rep.cls = cls
    rep.route = "morin"
    return rep


@dataclass
class SingularChart:
    """``x(s) = p + W s + h(s) n_hat`` with ``lambda(x(s)) = 0`` to jet order."""

    point: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    x: list
    residual: float


def singular_chart(lam, order, tol):
    """Graph chart of ``{lambda = 0}`` over ker d lambda at the base point.

    ``lam`` is the jet of lambda at ``p`` (order at least ``order``).
    """
    p = np.asarray(lam.point)
    n = p.shape[-1]
    grad = lam.gradient()
    gnorm = np.linalg.norm(grad)
    if gnorm <= 10 * tol:
        raise NumericFailure("d lambda vanishes: chart of the singular set undefined")
    if abs(lam.value) > tol:
        raise NumericFailure("base point is not on the singular set")
    nhat = np.real_if_close(grad / gnorm)
    w = _kernel(grad[None, :], TOL_RANK, 0.0)
    m = n - 1
    s0 = np.zeros(m)
    svars = [Jet.variable(i, s0, order) for i in range(m)]
    zero = Jet.constant(0.0, s0, order)
    h = zero
    lam = lam.truncate(order)
    c = grad @ nhat

    def chart(h):
        out = []
        for a in range(n):
            comp = h * nhat[a] + p[a]
            for i in range(m):
                comp = comp + svars[i] * w[a, i]
            out.append(comp)
        return out

    for _ in range(order + 2):
        x = chart(h)
        res = lam.compose(x)
        h = h - res * (1.0 / c)
        h.coeffs[..., 0] = 0.0
    x = chart(h)
    residual = float(np.max(np.abs(lam.compose(x).coeffs)))
    return SingularChart(p, w, nhat, x, residual)


def _compose_all(jets, x, order):
    return [g.truncate(order).compose(x) for g in jets]


def restrict_morin_to_front(fmap, p, tol_zero=TOL_ZERO, order=None):
    """Local front ``f`` restricted to its singular set, as a LocalFront.

    The normal is the row of adj(df) of largest norm at ``p``, which
    annihilates the image of df along the singular set.
    """
    n = fmap.n
    order = n + 2 if order is None else order
    loc = LocalJets(fmap, p, order + 1, tol_zero)
    jp = loc.jac_value.reshape(n, n)
    s = np.linalg.svd(jp, compute_uv=False)
    if n >= 2 and (s[-2] <= loc.tol or s[-2] < 10 * s[-1]):
        raise NumericFailure("normal direction is numerically ambiguous")
    adj = []
    for i in range(n):
        row = []
        for j in range(n):
            # adj[i][j] = (-1)^(i+j) det(J without row j and column i)
            minor = [[loc.jac[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            d = jet_det(minor) if minor else Jet.constant(1.0, loc.point, loc.jac[0][0].order)
            row.append(-d if (i + j) % 2 else d)
        adj.append(row)
    best = int(np.argmax([np.linalg.norm([e.value for e in row]) for row in adj]))
    if n == 1:
        x = [Jet.constant(np.asarray(p, dtype=float)[0], np.zeros(0), order)]
    else:
        x = singular_chart(loc.lam, order, loc.tol).x
    g = _compose_all(loc.f, x, order)
    nu = _compose_all(adj[best], x, order)
    return LocalFront(fmap.name + "_restricted", n - 1, g, nu, fmap.field)


def project_and_classify(front, p, direction, tol_zero=TOL_ZERO, order=None, **kw):
    """Classify the projection of the singular set along ``direction``.

    The singular set is projected orthogonally onto ``direction``'s
    complement; its normal is ``<nu', d> nu - <nu, d> nu'`` (``nu'`` the
    derivative along the null field), which annihilates the image.
    """
    n = front.n
    order = n + 2 if order is None else order
    loc = LocalJets(front, p, order + 2, tol_zero)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    nu0 = np.array([v.value for v in loc.nu], dtype=float)
    cosang = abs(nu0 @ d) / np.linalg.norm(nu0)
    if cosang < 0.1:
        raise ValueError(f"direction too close to the tangent space (|cos| = {cosang:.3g})")
    eta = loc.eta
    nu1 = [directional_derivative(v, eta) for v in loc.nu]
    nu = [v.truncate(order) for v in loc.nu]
    nud = sum(v * d[a] for a, v in enumerate(nu))
    nu1d = sum(v * d[a] for a, v in enumerate(nu1))
    m = [nu1d * nu[a] - nud * nu1[a] for a in range(n + 1)]
    full = np.linalg.svd(d[None, :])[2]
    basis = full[1:].T  # columns span d-perp
    if n == 1:
        x = [Jet.constant(np.asarray(p, dtype=float)[0], np.zeros(0), order)]
    else:
        x = singular_chart(loc.lam, order, loc.tol).x
    fx = _compose_all(loc.f, x, order)
    mx = _compose_all(m, x, order)
    g = [sum(fx[a] * basis[a, i] for a in range(n + 1)) for i in range(n)]
    nug = [sum(mx[a] * basis[a, i] for a in range(n + 1)) for i in range(n)]
    proj = LocalFront(front.name + "_projected", n - 1, g, nug, front.field)
    s0 = np.zeros(n - 1)
    rep = classify_lambda_route(proj, s0, tol_zero=tol_zero, jet_order=None, **kw)
    rep.route = "projection"
    return rep


def front_class_matches_morin(morin_cls, front_cls):
    """Morin A_k corresponds to front A_k, where front A_1 means Regular."""
    if morin_cls.kind != "A":
        return morin_cls == front_cls
    if morin_cls.index == 1:
        return front_cls.kind == "regular"
    return front_cls == morin_cls
