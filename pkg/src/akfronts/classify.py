"""Recognition of A_{k+1} front singularities.

Two independent routes are offered: the rank of the lambda chain, and the
function ``mu`` on the singular set.  ``scan_singular_set`` locates singular
points by Newton iteration and classifies each of them.
"""

import time
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .definitions import FrontInstance
from .errors import CorankTooHigh, NumericFailure, OrderExhausted
from .expr import add, as_expr, const, eval_jets, mul, substitute
from .front import (
    DEFAULT_JET_ORDER,
    TOL_RANK,
    TOL_ZERO,
    LocalJets,
    _chain_from,
    _plain,
    jet_det,
    numerical_rank,
)
from .jet import Jet, directional_derivative

__all__ = [
    "SingularityClass",
    "ClassificationReport",
    "MuChain",
    "ScanResult",
    "regular",
    "a_class",
    "degenerate",
    "corank_too_high",
    "inconclusive",
    "classify",
    "classify_lambda_route",
    "classify_mu_route",
    "singular_tangent_frame",
    "scan_singular_set",
    "conjugate_front",
]

MARGIN = 10.0


@dataclass(frozen=True)
class SingularityClass:
    """``kind`` is one of regular, A, degenerate, corank, inconclusive.

    ``index`` is the subscript of A_index, or the order j of
    DegenerateAtOrder(j).
    """

    kind: str
    index: int = 0
    reason: str = field(default="", compare=False)

    def __str__(self):
        if self.kind == "regular":
            return "Regular"
        if self.kind == "A":
            return f"A{self.index}"
        if self.kind == "degenerate":
            return f"DegenerateAtOrder({self.index})"
        if self.kind == "corank":
            return "CorankTooHigh"
        return f"Inconclusive({self.reason})"

    @property
    def definite(self):
        return self.kind != "inconclusive"


def regular():
    return SingularityClass("regular")


def a_class(k):
    return SingularityClass("A", k)


def degenerate(j, reason=""):
    return SingularityClass("degenerate", j, reason)


def corank_too_high(reason=""):
    return SingularityClass("corank", 0, reason)


def inconclusive(reason):
    return SingularityClass("inconclusive", 0, reason)


@dataclass
class MuChain:
    point: np.ndarray
    frame: np.ndarray
    values: list
    jacobian: np.ndarray
    rank: object = None

    def to_dict(self):
        return {
            "frame": _plain(self.frame),
            "values": [_plain(v) for v in self.values],
            "rank": None if self.rank is None else self.rank.to_dict(),
        }


@dataclass
class ClassificationReport:
    point: np.ndarray
    cls: SingularityClass
    route: str
    chain: object = None
    rank: object = None
    mu: object = None
    tolerances: dict = field(default_factory=dict)
    elapsed: float = 0.0
    subreports: tuple = ()

    @property
    def label(self):
        return str(self.cls)

    def to_dict(self):
        """Deterministic content; wall time is kept out on purpose."""
        out = {
            "point": _plain(self.point),
            "class": self.label,
            "route": self.route,
            "lambda_chain": None if self.chain is None else self.chain.to_dict(),
            "rank": None if self.rank is None else self.rank.to_dict(),
            "mu_chain": None if self.mu is None else self.mu.to_dict(),
            "tolerances": dict(self.tolerances),
        }
        if self.subreports:
            out["routes_agree"] = len({r.label for r in self.subreports}) == 1
            out["subreports"] = [r.to_dict() for r in self.subreports]
        return out


def _tolerances(loc, tol_zero, tol_rank, order):
    return {"tol_zero": tol_zero, "tol_rank": tol_rank, "scale": loc.scale,
            "tol_effective": loc.tol, "jet_order": order}


def _band(value, tol):
    """0 if it vanishes, 1 if clearly nonzero, None in between."""
    a = abs(value)
    if a <= tol:
        return 0
    if a >= MARGIN * tol:
        return 1
    return None


def _prefix_rank_failure(rows, tol_rank, tol_abs):
    """Smallest m such that the first m rows are rank deficient, else None."""
    for m in range(1, len(rows) + 1):
        if numerical_rank(rows[:m], tol_rank, tol_abs).rank < m:
            return m
    return None


def _local(front, p, k_max, tol_zero, jet_order):
    need = k_max + 2
    if jet_order is not None and jet_order < need:
        raise OrderExhausted(f"classification to A{k_max + 1} needs jet order {need}, "
                             f"configured {jet_order}")
    return LocalJets(front, p, need, tol_zero)


def classify_lambda_route(front, p, k_max=None, tol_zero=TOL_ZERO, tol_rank=TOL_RANK,
                          jet_order=DEFAULT_JET_ORDER):
    """Class of ``p`` from the lambda chain and the rank of its Jacobian."""
    t0 = time.perf_counter()
    k_max = front.n if k_max is None else k_max
    p = np.asarray(p, dtype=getattr(front, "dtype", float))
    loc = _local(front, p, k_max, tol_zero, jet_order)
    tols = _tolerances(loc, tol_zero, tol_rank, k_max + 2)

    def report(cls, chain=None, rank=None):
        return ClassificationReport(p, cls, "lambda", chain, rank, None, tols,
                                    time.perf_counter() - t0)

    lam0 = _band(loc.lam.value, loc.tol)
    if lam0 == 1:
        return report(regular())
    if lam0 is None:
        return report(inconclusive("|lambda| inside the tolerance band"))
    try:
        _ = loc.eta  # building eta is where corank >= 2 shows up
    except CorankTooHigh as exc:
        return report(corank_too_high(str(exc)))
    chain = _chain_from(loc, k_max)
    k = None
    for i, v in enumerate(chain.values):
        b = _band(v, loc.tol)
        if b is None:
            return report(inconclusive(f"|lambda^({i})| inside the tolerance band"), chain)
        if b == 1:
            k = i
            break
    if k is None:
        rank = numerical_rank(chain.jacobian, tol_rank, loc.tol)
        m = _prefix_rank_failure(chain.jacobian, tol_rank, loc.tol)
        if m is not None:
            return report(degenerate(m, "lambda chain Jacobian is rank deficient"), chain, rank)
        return report(degenerate(k_max + 1, "lambda chain vanishes to the maximal order"),
                      chain, rank)
    rows = chain.jacobian[:k]
    rank = numerical_rank(rows, tol_rank, loc.tol)
    m = _prefix_rank_failure(rows, tol_rank, loc.tol)
    if m is not None:
        return report(degenerate(m, "lambda chain Jacobian is rank deficient"), chain, rank)
    return report(a_class(k + 1), chain, rank)


def _kernel(rows, tol_rank, tol_abs):
    """Orthonormal basis (columns) of the null space of ``rows``."""
    rows = np.atleast_2d(rows)
    n = rows.shape[1]
    r = numerical_rank(rows, tol_rank, tol_abs).rank
    _, _, vh = np.linalg.svd(rows)
    return vh[r:].conj().T.reshape(n, n - r)


def _frame_from_loc(loc, tol_rank):
    grad = loc.lam.gradient()
    if np.linalg.norm(grad) < MARGIN * loc.tol:
        raise NumericFailure("d lambda vanishes at p: not 1-nondegenerate")
    return _kernel(grad[None, :], tol_rank, loc.tol)


def singular_tangent_frame(front, p, tol_zero=TOL_ZERO, tol_rank=TOL_RANK):
    """Orthonormal basis (columns) of ker d lambda at ``p``."""
    if front.n == 1:
        return np.zeros((1, 0))
    loc = LocalJets(front, p, 2, tol_zero)
    return _frame_from_loc(loc, tol_rank)


def _dot(a, b):
    out = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        out = out + x * y
    return out


def _extended_frame(loc, basis):
    """Project constant vectors onto ker d lambda(x) and orthonormalise, in jets."""
    n = loc.n
    g = [loc.lam.deriv(i) for i in range(n)]
    gg = _dot(g, g)
    order = g[0].order
    point = g[0].point
    frame = []
    for c in range(basis.shape[1]):
        b = [Jet.constant(basis[i, c], point, order) for i in range(n)]
        coef = _dot(b, g) / gg
        v = [b[i] - coef * g[i] for i in range(n)]
        for u in frame:
            proj = _dot(v, u)
            v = [v[i] - proj * u[i] for i in range(n)]
        norm = _dot(v, v).apply("sqrt")
        frame.append([vi / norm for vi in v])
    return frame


def classify_mu_route(front, p, k_max=None, tol_zero=TOL_ZERO, tol_rank=TOL_RANK,
                      jet_order=DEFAULT_JET_ORDER, frame=None):
    """Class of ``p`` from ``mu = det(v_1, ..., v_{n-1}, eta)`` on the singular set.

    ``frame`` optionally replaces the orthonormal basis of ker d lambda_p used
    to seed the frame extension (any basis of that kernel is admissible).
    """
    if front.n < 2:
        raise ValueError("the mu route needs n >= 2")
    t0 = time.perf_counter()
    k_max = front.n if k_max is None else k_max
    p = np.asarray(p, dtype=getattr(front, "dtype", float))
    loc = _local(front, p, k_max, tol_zero, jet_order)
    tols = _tolerances(loc, tol_zero, tol_rank, k_max + 2)

    def report(cls, mu=None, rank=None):
        return ClassificationReport(p, cls, "mu", None, rank, mu, tols,
                                    time.perf_counter() - t0)

    lam0 = _band(loc.lam.value, loc.tol)
    if lam0 == 1:
        return report(regular())
    if lam0 is None:
        return report(inconclusive("|lambda| inside the tolerance band"))
    try:
        eta = loc.eta
    except CorankTooHigh as exc:
        return report(corank_too_high(str(exc)))
    try:
        base = _frame_from_loc(loc, tol_rank)
    except NumericFailure:
        return report(degenerate(1, "d lambda vanishes"))
    if frame is not None:
        base = np.asarray(frame).reshape(base.shape)
        grad = loc.lam.gradient()
        if np.linalg.norm(grad @ base) > 1e-8 * np.linalg.norm(grad) * np.linalg.norm(base):
            raise ValueError("supplied frame is not tangent to the singular set")
    vs = _extended_frame(loc, base)
    n = loc.n
    eta = [e.truncate(vs[0][0].order) for e in eta] if vs else eta
    cols = [[vs[c][i] for c in range(n - 1)] + [eta[i]] for i in range(n)]
    mu = [jet_det(cols)]
    for _ in range(k_max - 1):
        mu.append(directional_derivative(mu[-1], eta))
    values = [m.value for m in mu]
    grads = np.array([m.gradient() for m in mu]).reshape(len(mu), n)
    witness = MuChain(p, base, values, np.zeros((0, n)))

    b = _band(values[0], loc.tol)
    if b is None:
        return report(inconclusive("|mu| inside the tolerance band"), witness)
    if b == 1:
        return report(a_class(2), witness)
    # 2-nondegeneracy: d mu does not vanish on ker d lambda_p
    dmu_t = grads[0] @ base
    if np.linalg.norm(dmu_t) < MARGIN * loc.tol:
        return report(degenerate(2, "d mu vanishes on the singular set"), witness)
    k = None
    for j in range(1, len(values)):
        b = _band(values[j], loc.tol)
        if b is None:
            return report(inconclusive(f"|mu^({j})| inside the tolerance band"), witness)
        if b == 1:
            k = j + 1
            break
    lam1 = directional_derivative(loc.lam, eta)
    ts2 = _kernel(np.vstack([loc.lam.gradient(), lam1.gradient()]), tol_rank, loc.tol)
    top = (k if k is not None else k_max + 1) - 2
    phi = grads[1:top + 1] @ ts2 if top > 0 else np.zeros((0, ts2.shape[1]))
    witness.jacobian = phi
    rank = numerical_rank(phi, tol_rank, loc.tol) if top > 0 else None
    witness.rank = rank
    m = _prefix_rank_failure(phi, tol_rank, loc.tol) if top > 0 else None
    if m is not None:
        return report(degenerate(m + 2, "mu chain Jacobian on S_2 is rank deficient"),
                      witness, rank)
    if k is None:
        return report(degenerate(k_max + 1, "mu chain vanishes to the maximal order"),
                      witness, rank)
    return report(a_class(k + 1), witness, rank)


def classify(front, p, route="lambda", **kw):
    """Dispatch on ``route`` (lambda, mu or both)."""
    if route == "lambda":
        return classify_lambda_route(front, p, **kw)
    if route == "mu":
        return classify_mu_route(front, p, **kw)
    if route != "both":
        raise ValueError(f"unknown route {route!r}")
    a = classify_lambda_route(front, p, **kw)
    if front.n < 2:
        return a
    b = classify_mu_route(front, p, **kw)
    cls = a.cls if a.cls == b.cls else inconclusive(f"routes disagree: {a.cls} vs {b.cls}")
    return ClassificationReport(a.point, cls, "both", a.chain, a.rank, b.mu, a.tolerances,
                                a.elapsed + b.elapsed, (a, b))


@dataclass
class ScanResult:
    reports: list
    n_seeds: int
    n_dropped: int
    n_converged: int

    def __iter__(self):
        return iter(self.reports)

    def __len__(self):
        return len(self.reports)


def _lambda_value_grad(front, pts):
    """Batched lambda and its gradient at ``pts`` (shape (N, n))."""
    loc = LocalJets(front, pts, 2)
    lam = loc.lam
    jac = np.stack([np.stack([j.value for j in row], axis=-1) for row in loc.jac], axis=-2)
    scale = np.maximum(1.0, np.max(np.abs(jac), axis=(-1, -2)))
    return lam.value, lam.gradient(), scale


def scan_singular_set(front, box, grid, route="lambda", max_iter=25, **kw):
    """Locate and classify singular points inside ``box`` from grid seeds.

    ``box`` is a sequence of (lo, hi) pairs; ``grid`` an int or one int per
    axis.  Newton steps follow the gradient of lambda.
    """
    if getattr(front, "field", "real") != "real":
        raise ValueError("scanning is implemented for real fronts only")
    if isinstance(front, FrontInstance) and front.normal is None:
        raise NumericFailure("scanning needs an explicit normal field")
    n = front.n
    box = np.asarray(box, dtype=float).reshape(n, 2)
    grid = np.broadcast_to(np.asarray(grid, dtype=int), (n,))
    axes = [np.linspace(lo, hi, g) for (lo, hi), g in zip(box, grid)]
    x = np.array(list(product(*axes)), dtype=float)
    n_seeds = len(x)
    lo, hi = box[:, 0], box[:, 1]
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    active = np.ones(n_seeds, dtype=bool)
    done = np.zeros(n_seeds, dtype=bool)
    for _ in range(max_iter + 1):
        idx = np.flatnonzero(active & ~done)
        if idx.size == 0:
            break
        with np.errstate(all="ignore"):
            try:
                lam, grad, scale = _lambda_value_grad(front, x[idx])
            except NumericFailure:
                lam, grad, scale = _pointwise(front, x[idx])
        ok = np.isfinite(lam) & np.all(np.isfinite(grad), axis=-1)
        conv = ok & (np.abs(lam) <= 1e-12 * scale)
        done[idx[conv]] = True
        g2 = np.sum(grad * grad, axis=-1)
        step_ok = ok & ~conv & (g2 > 1e-300)
        active[idx[~ok | (~conv & ~step_ok)]] = False
        move = idx[step_ok]
        with np.errstate(all="ignore"):
            x[move] -= (lam[step_ok] / g2[step_ok])[:, None] * grad[step_ok]
        outside = np.any(np.abs(x[move] - mid) > 2 * half + 1e-15, axis=1)
        active[move[outside]] = False
    found = x[done & active]
    inside = np.all((found >= lo - 1e-9) & (found <= hi + 1e-9), axis=1)
    found = found[inside]
    cell = (hi - lo) / np.maximum(grid - 1, 1)
    radius = 0.5 * np.linalg.norm(cell)
    k_max = kw.get("k_max") or n
    strata = [_dedup(found, radius)]
    for k in range(2, k_max + 1):
        deeper = [q for q in (_refine_stratum(front, q0, k, max_iter) for q0 in strata[-1])
                  if q is not None and np.all((q >= lo - 1e-9) & (q <= hi + 1e-9))]
        if not deeper:
            break
        strata.append(_dedup(np.array(deeper), radius))
    kept = []
    for level in reversed(strata):
        for q in level:
            if all(np.linalg.norm(q - r) > radius for r in kept):
                kept.append(q)
    kept.sort(key=tuple)
    reports = [classify(front, q, route=route, **kw) for q in kept]
    return ScanResult(reports, n_seeds, n_seeds - int(np.sum(done & active)), len(found))


def _dedup(points, radius):
    kept = []
    if len(points) == 0:
        return kept
    for q in points[np.lexsort(points.T[::-1])]:
        if all(np.linalg.norm(q - r) > radius for r in kept):
            kept.append(q)
    return kept


def _refine_stratum(front, q, k, max_iter):
    """Gauss-Newton on (lambda, ..., lambda^(k-1)) = 0 starting at ``q``.

    Returns the converged point of S_k, or None.
    """
    q = np.array(q, dtype=float)
    for _ in range(max_iter):
        try:
            loc = LocalJets(front, q, k + 1)
            chain = _chain_from(loc, k - 1)
        except NumericFailure:
            return None
        vals = np.array([np.real(v) for v in chain.values], dtype=float)
        jac = np.vstack([chain.jacobian, chain.jets[-1].gradient()[None, :]]).real
        if not np.all(np.isfinite(vals)) or not np.all(np.isfinite(jac)):
            return None
        if np.max(np.abs(vals)) <= 1e-12 * loc.scale * max(1.0, np.linalg.norm(jac)):
            return q
        step = np.linalg.lstsq(jac, vals, rcond=None)[0]
        q = q - step
    return None


def _pointwise(front, pts):
    lam, grad, scale = [], [], []
    for q in pts:
        try:
            a, b, c = _lambda_value_grad(front, q[None, :])
            lam.append(a[0]), grad.append(b[0]), scale.append(c[0])
        except NumericFailure:
            lam.append(np.nan), grad.append(np.full(len(q), np.nan)), scale.append(1.0)
    return np.array(lam), np.array(grad), np.array(scale)


def conjugate_front(front, source_diffeo=None, target_matrix=None, target_shift=None,
                    normal_scale=None, base_point=None, name=None):
    """Front ``A f(psi(x)) + b`` with normal ``(A^{-T} nu)(psi(x)) * scale(x)``.

    ``source_diffeo`` and ``normal_scale`` are expressions (or numbers) in
    the front's variables.
    """
    n = front.n
    if front.normal is None:
        raise NumericFailure("conjugation needs an explicit normal field")
    psi = [as_expr(e) for e in source_diffeo] if source_diffeo is not None else None
    a = np.eye(n + 1) if target_matrix is None else np.asarray(target_matrix, dtype=float)
    b = np.zeros(n + 1) if target_shift is None else np.asarray(target_shift, dtype=float)
    if a.shape != (n + 1, n + 1):
        raise ValueError("target matrix has the wrong shape")
    if abs(np.linalg.det(a)) < 1e-12 * max(1.0, np.max(np.abs(a))) ** (n + 1):
        raise ValueError("target matrix is singular")
    base = np.zeros(n) if base_point is None else np.asarray(base_point, dtype=float)
    if psi is not None:
        if len(psi) != n:
            raise ValueError("source diffeomorphism needs one expression per variable")
        jets = eval_jets(psi, base, 1)
        jac = np.array([j.gradient() for j in jets])
        if abs(np.linalg.det(jac)) < 1e-10:
            raise NumericFailure("source diffeomorphism has singular Jacobian at the base point")
    ainv_t = np.linalg.inv(a).T
    fmap = [substitute(e, psi) if psi is not None else e for e in front.map]
    nu = [substitute(e, psi) if psi is not None else e for e in front.normal]

    def lin(m, vec, shift=None):
        out = []
        for r in range(n + 1):
            acc = const(shift[r]) if shift is not None else const(0.0)
            for c in range(n + 1):
                if m[r, c] != 0:
                    acc = add(acc, mul(const(float(m[r, c])), vec[c]))
            out.append(acc)
        return out

    new_map = lin(a, fmap, b)
    new_nu = lin(ainv_t, nu)
    if normal_scale is not None:
        s = as_expr(normal_scale)
        sval = complex(eval_jets([s], base, 0)[0].value)
        if abs(sval) < 1e-12:
            raise NumericFailure("normal scale vanishes at the base point")
        new_nu = [mul(s, e) for e in new_nu]
    return FrontInstance(name or front.name + "_conj", front.variables, tuple(new_map),
                         tuple(new_nu), front.field)
