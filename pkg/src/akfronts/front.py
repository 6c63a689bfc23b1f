"""Signed area function, extended null vector field and derivative chains.

Everything is computed from jets at a single point, so every derivative of
``lambda`` along the null field is exact up to rounding.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .definitions import MorinMapInstance
from .errors import CorankTooHigh, NumericFailure, OrderExhausted
from .expr import eval_jets
from .jet import Jet, directional_derivative

__all__ = [
    "DEFAULT_JET_ORDER",
    "TOL_ZERO",
    "TOL_RANK",
    "LocalFront",
    "LambdaChain",
    "RankReport",
    "LocalJets",
    "front_jets",
    "jet_det",
    "lambda_jet",
    "extended_null_field",
    "lambda_chain",
    "numerical_rank",
    "derive_plane_normal",
]

DEFAULT_JET_ORDER = 10
TOL_ZERO = 1e-8
TOL_RANK = 1e-6


@dataclass
class LocalFront:
    """A front known only through its jets at one base point.

    Produced by chart constructions (restrictions and projections), where no
    closed-form expressions exist.
    """

    name: str
    n: int
    f_jets: list
    nu_jets: list
    field: str = "real"

    @property
    def base_point(self):
        return np.asarray(self.f_jets[0].point)

    @property
    def order(self):
        return self.f_jets[0].order


@dataclass
class RankReport:
    shape: tuple
    singular_values: np.ndarray
    rank: int
    tol_rank: float
    tol_abs: float = 0.0

    def to_dict(self):
        return {
            "shape": list(self.shape),
            "singular_values": [float(s) for s in self.singular_values],
            "rank": self.rank,
            "tol_rank": self.tol_rank,
            "tol_abs": self.tol_abs,
        }


@dataclass
class LambdaChain:
    point: np.ndarray
    values: list
    eta: np.ndarray
    jacobian: np.ndarray
    rows: tuple
    scale: float
    jets: list = field(default=None, repr=False)

    def to_dict(self):
        return {
            "point": _plain(self.point),
            "values": [_plain(v) for v in self.values],
            "eta": _plain(self.eta),
            "rows": list(self.rows),
            "scale": float(self.scale),
        }


def _plain(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        if x.ndim == 0:
            return [float(x.real), float(x.imag)]
        return [_plain(v) for v in x]
    if x.ndim == 0:
        return float(x)
    return [_plain(v) for v in x]


def numerical_rank(m, tol_rank=TOL_RANK, tol_abs=0.0):
    """Rank as the number of singular values above ``tol_rank * s_max``.

    ``tol_abs`` adds an absolute floor, so that a tiny but nonzero matrix
    does not count as full rank.
    """
    m = np.atleast_2d(np.asarray(m))
    if not np.all(np.isfinite(m)):
        raise NumericFailure("matrix has non-finite entries")
    if m.size == 0:
        return RankReport(m.shape, np.zeros(0), 0, tol_rank, tol_abs)
    s = np.linalg.svd(m, compute_uv=False)
    smax = s[0] if s.size else 0.0
    cut = max(tol_rank * smax, tol_abs)
    rank = int(np.sum(s > cut)) if smax > 0 else 0
    return RankReport(m.shape, s, rank, tol_rank, tol_abs)


def jet_det(rows, unit=None):
    """Determinant of a square matrix of jets by cofactor expansion."""
    n = len(rows)
    if n == 0:
        if unit is None:
            raise ValueError("need a unit jet for an empty determinant")
        return unit
    memo = {}

    def minor(r, cols):
        if r == n - 1:
            return rows[r][cols[0]]
        key = (r, cols)
        if key in memo:
            return memo[key]
        total = None
        for j, c in enumerate(cols):
            term = rows[r][c] * minor(r + 1, cols[:j] + cols[j + 1:])
            if j % 2:
                term = -term
            total = term if total is None else total + term
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))


def _unit_like(jet):
    return Jet.constant(np.ones_like(jet.value), jet.point, jet.order)


def derive_plane_normal(f_jets, tol):
    """Normal of a plane curve from its velocity jet.

    The velocity is divided by its common vanishing order at the base point
    and rotated by +90 degrees, which extends the unit normal across cusps.
    Returns the normal jets and the vanishing order removed.
    """
    vel = [g.deriv(0) for g in f_jets]
    d = vel[0].order
    for m in range(d + 1):
        if max(np.max(np.abs(v.coeffs[..., m])) for v in vel) > tol:
            break
    else:
        raise NumericFailure("velocity vanishes to every available order")
    shifted = []
    for v in vel:
        c = v.coeffs[..., m:]
        shifted.append(Jet(v.point, d - m, c))
    return [-shifted[1], shifted[0]], m


def front_jets(front, p, order):
    """Jets of ``f`` at order ``order`` and of the normal at ``order - 1``."""
    if isinstance(front, LocalFront):
        if not np.allclose(np.asarray(p, dtype=float), front.base_point.real, atol=1e-12):
            raise ValueError("a LocalFront can only be evaluated at its base point")
        if front.order < order:
            raise OrderExhausted(f"local front carries order {front.order} < {order}")
        f = [g.truncate(order) for g in front.f_jets]
        nu = [g.truncate(min(g.order, order)) for g in front.nu_jets]
        if nu[0].order < order - 1:
            raise OrderExhausted("normal jets are too short")
        return f, [g.truncate(order - 1) for g in nu]
    p = np.asarray(p, dtype=front.dtype)
    if p.shape[-1] != front.n:
        raise ValueError(f"point has dimension {p.shape[-1]}, front needs {front.n}")
    if front.normal is not None:
        jets = eval_jets(front.map + front.normal, p, order, front.field)
        f, nu = jets[: front.n + 1], jets[front.n + 1:]
        return f, [g.truncate(max(order - 1, 0)) for g in nu]
    if front.n != 1:
        raise NumericFailure(f"front {front.name!r} has no normal field")
    if p.ndim > 1:
        raise NumericFailure("derived plane normals need one point at a time")
    extra = 1
    while True:
        f = eval_jets(front.map, p, order + extra, front.field)
        scale = max(1.0, float(np.max(np.abs([g.coeffs[..., 1] for g in f]))))
        nu, m = derive_plane_normal(f, TOL_ZERO * scale)
        if m < extra:
            return [g.truncate(order) for g in f], [g.truncate(order - 1) for g in nu]
        if m >= order + extra:
            raise NumericFailure("velocity vanishes to every available order")
        extra = m + 1


class LocalJets:
    """Jets of ``f``, ``nu``, ``df`` and ``lambda`` at a point.

    For an equidimensional map there is no normal and ``lambda = det df``.

    ``order`` is the truncation order of ``f``; ``lambda`` is available to
    ``order - 1``.
    """

    def __init__(self, front, p, order, tol_zero=TOL_ZERO):
        self.front = front
        self.n = front.n
        self.field = front.field
        self.point = np.asarray(p)
        self.order = order
        if isinstance(front, MorinMapInstance):
            self.f = eval_jets(front.map, np.asarray(p, dtype=front.dtype), order, front.field)
            self.nu = None
        else:
            self.f, self.nu = front_jets(front, p, order)
        self.jac = [[g.deriv(i) for i in range(self.n)] for g in self.f]
        self.jac_value = np.array([[j.value for j in row] for row in self.jac])
        self.scale = max(1.0, float(np.max(np.abs(self.jac_value)))) if self.n else 1.0
        self.tol = tol_zero * self.scale
        if self.nu is None:
            self.lam = jet_det(self.jac)
        else:
            cols = [[self.jac[a][i] for i in range(self.n)] + [self.nu[a]]
                    for a in range(self.n + 1)]
            self.lam = jet_det(cols)
        self._eta = None
        self.rows = None

    @property
    def eta(self):
        if self._eta is None:
            self._eta, self.rows = _null_field(self.jac, self.jac_value, self.tol)
        return self._eta

    def chain(self, k_max):
        """lambda, lambda', ..., lambda^(k_max) as jets."""
        if k_max > self.lam.order:
            raise OrderExhausted(
                f"lambda^({k_max}) needs jet order {k_max + 1}, have {self.order}")
        out = [self.lam]
        for _ in range(k_max):
            out.append(directional_derivative(out[-1], self.eta))
        return out


def _null_field(jac, jac_value, tol):
    """Extended null vector field from (n-1)-minors of the Jacobian."""
    R, n = jac_value.shape
    if n == 0:
        return [], ()
    if n == 1:
        unit = _unit_like(jac[0][0])
        return [unit], ()
    best, best_rows = -1.0, None
    for rows in combinations(range(R), n - 1):
        a = jac_value[list(rows), :]
        score = max(abs(np.linalg.det(np.delete(a, j, axis=1))) for j in range(n))
        if score > best * (1 + 1e-12):
            best, best_rows = score, rows
    if best <= tol:
        raise CorankTooHigh("all (n-1)-minors of df vanish: corank >= 2")
    sub = [jac[r] for r in best_rows]
    eta = []
    for j in range(n):
        m = [[row[c] for c in range(n) if c != j] for row in sub]
        d = jet_det(m)
        eta.append(-d if j % 2 else d)
    return eta, best_rows


def lambda_jet(front, p, d):
    """Jet of det(f_x1, ..., f_xn, nu) at ``p`` to order ``d``."""
    return LocalJets(front, p, d + 1).lam


def extended_null_field(front, p, d, tol_zero=TOL_ZERO):
    """Jets (order ``d``) of the extended null vector field at ``p``."""
    loc = LocalJets(front, p, d + 1, tol_zero)
    return loc.eta


def lambda_chain(front, p, k_max, order=None, tol_zero=TOL_ZERO):
    """Values of lambda^(0..k_max) at ``p`` and the Jacobian of the chain.

    ``order`` (default ``k_max + 2``) is the jet order of ``f``; it must be
    at least ``k_max + 2`` so that the last member still has a gradient.
    """
    need = k_max + 2
    order = need if order is None else order
    if order < need:
        raise OrderExhausted(f"lambda chain to order {k_max} needs jet order {need}")
    loc = LocalJets(front, p, need, tol_zero)
    return _chain_from(loc, k_max)


def _chain_from(loc, k_max):
    jets = loc.chain(k_max)
    values = [j.value for j in jets]
    jac = np.array([j.gradient() for j in jets[:k_max]]).reshape(k_max, loc.n)
    eta = np.array([e.value for e in loc.eta])
    return LambdaChain(loc.point, values, eta, jac, loc.rows, loc.scale, jets)
