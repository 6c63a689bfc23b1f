"""Ground-truth fixtures and discriminant membership.

The A_{k+1} normal form is the discriminant of the versal unfolding
``F(t, u) = t^(k+2) + u_k t^k + ... + u_1 t + u_0``; in the coordinates used
here its image is exactly ``{F = F_t = 0}`` with ``u = (f1, f2, x_2, ...)``.
"""

from dataclasses import dataclass

import numpy as np

from .definitions import FrontInstance, check_front_condition, format_definition
from .expr import add, as_expr, diff, eval_jets, evaluate, mul, neg, parse_expr, sub
from .morin import morin_normal_form

__all__ = [
    "UnfoldingInstance",
    "MembershipVerdict",
    "ak_front_normal_form",
    "versal_membership",
    "phi_unfolding",
    "phi_membership",
    "tangent_developable_fixture",
    "fixture_text",
]


@dataclass(frozen=True)
class UnfoldingInstance:
    """``F(t, u) = t^(k+2) + u_k t^k + ... + u_1 t + u_0``."""

    k: int
    u: tuple

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")

    def coefficients(self):
        """Polynomial coefficients of F in t, highest degree first."""
        c = np.zeros(self.k + 3)
        c[0] = 1.0
        for j, uj in enumerate(self.u[: self.k + 1]):
            c[self.k + 2 - j] = uj
        return c

    def __call__(self, t):
        return np.polyval(self.coefficients(), t)

    def dt(self, t):
        return np.polyval(np.polyder(self.coefficients()), t)


@dataclass
class MembershipVerdict:
    inside: bool
    witness: float
    residual: float
    residual_t: float
    tol: float


def ak_front_normal_form(k, n):
    """The A_{k+1} front in variables (t, x2, ..., xn) with its normal.

    The normal ``(1, t, t^2, ..., t^k, 0, ..., 0)`` is checked against the
    front condition at random points.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"need k <= n, got k={k}, n={n}")
    names = ["t"] + [f"x{j}" for j in range(2, n + 1)]
    lookup = {v: i for i, v in enumerate(names)}
    first = [f"{k + 1}*t^{k + 2}"]
    second = [f"-{k + 2}*t^{k + 1}"]
    for j in range(2, k + 1):
        first.append(f"{j - 1}*t^{j}*x{j}" if j > 2 else "t^2*x2")
        second.append(f"{j}*t^{j - 1}*x{j}" if j > 2 else "2*t*x2")
    f1 = " + ".join(first)
    f2 = " - ".join(second)
    comps = [f1, f2] + names[1:]
    normal = ["1", "t"] + [f"t^{j}" if j <= k else "0" for j in range(2, n + 1)]
    front = FrontInstance(
        f"a{k + 1}_front_n{n}",
        tuple(names),
        tuple(parse_expr(c, lookup) for c in comps),
        tuple(parse_expr(c, lookup) for c in normal),
    )
    check_front_condition(front)
    return front


def _polish(coeffs, roots, steps=2):
    d1 = np.polyder(coeffs)
    for _ in range(steps):
        with np.errstate(all="ignore"):
            step = np.polyval(coeffs, roots) / np.polyval(d1, roots)
        roots = np.where(np.isfinite(step), roots - step, roots)
    return roots


def versal_membership(k, u, tol=1e-9):
    """Is ``u`` on the discriminant ``{F = F_t = 0}`` (real witnesses)?

    Roots of F_t come from the companion matrix and are polished by two
    Newton steps.
    """
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("coefficients must be finite")
    F = UnfoldingInstance(k, tuple(u))
    c = F.coefficients()
    dc = np.polyder(c)
    roots = np.roots(dc)
    scale = max(1.0, float(np.max(np.abs(u))) if u.size else 1.0)
    real = roots[np.abs(roots.imag) <= 1e-6 * (1 + np.abs(roots))].real
    if real.size == 0:  # odd-degree F_t always has a real root; guard anyway
        real = roots.real
    real = _polish(dc, real)
    res = np.abs(F(real))
    i = int(np.argmin(res))
    return MembershipVerdict(bool(res[i] <= tol * scale), float(real[i]), float(res[i]),
                             float(abs(F.dt(real[i]))), tol * scale)


def _check_chart_shape(front, rng=None, n_points=5):
    """Target coordinates 3.. must repeat the source coordinates 2..."""
    rng = np.random.default_rng(0) if rng is None else rng
    pts = rng.uniform(-1, 1, size=(n_points, front.n))
    for i in range(1, front.n):
        vals = evaluate(front.map[i + 1], pts.T)
        if not np.allclose(vals, pts[:, i], atol=1e-12):
            raise ValueError("front is not in normal-form chart shape")


def phi_unfolding(front, X, Y, t):
    """``Phi = <nu(t, Y), f(t, Y) - X>`` and its derivative in ``t``.

    ``X`` is a target point, ``Y`` the non-null source coordinates and ``t``
    the null coordinate (first variable).
    """
    if front.normal is None:
        raise ValueError("phi needs an explicit normal field")
    src = np.concatenate([[t], np.asarray(Y, dtype=float)])
    jets = eval_jets(front.map + front.normal, src, 2)
    f, nu = jets[: front.n + 1], jets[front.n + 1:]
    X = np.asarray(X, dtype=float)
    phi = sum(nu[a] * (f[a] - X[a]) for a in range(front.n + 1))
    # coefficient of t is d/dt, of t^2 is half the second derivative
    return float(phi.value), float(phi.coefficient((1,) + (0,) * (front.n - 1)))


def _phi_t_and_tt(front, X, Y, t):
    src = np.concatenate([[t], np.asarray(Y, dtype=float)])
    jets = eval_jets(front.map + front.normal, src, 2)
    f, nu = jets[: front.n + 1], jets[front.n + 1:]
    phi = sum(nu[a] * (f[a] - X[a]) for a in range(front.n + 1))
    e1 = (1,) + (0,) * (front.n - 1)
    e2 = (2,) + (0,) * (front.n - 1)
    return float(phi.value), float(phi.coefficient(e1)), 2.0 * float(phi.coefficient(e2))


def phi_membership(front, X, tol=1e-6, t_range=(-2.0, 2.0), seeds=41):
    """Is ``X`` in the image, judged by common zeros of Phi and Phi_t?

    ``Y`` is fixed to the last target coordinates of ``X`` (chart shape),
    so the search runs over ``t`` only: Newton on Phi_t = 0 from grid seeds.
    """
    _check_chart_shape(front)
    X = np.asarray(X, dtype=float)
    Y = X[2:]
    best = None
    for t in np.linspace(*t_range, seeds):
        for _ in range(30):
            _, d1, d2 = _phi_t_and_tt(front, X, Y, t)
            if d2 == 0 or not np.isfinite(d1 / d2):
                break
            step = d1 / d2
            t -= step
            if abs(step) < 1e-15 * (1 + abs(t)) or abs(t) > 10 * max(map(abs, t_range)):
                break
        v, d1, _ = _phi_t_and_tt(front, X, Y, t)
        cand = (max(abs(v), abs(d1)), t, abs(v), abs(d1))
        if np.isfinite(cand[0]) and (best is None or cand[0] < best[0]):
            best = cand
    if best is None:
        return MembershipVerdict(False, float("nan"), float("inf"), float("inf"), tol)
    return MembershipVerdict(bool(best[0] <= tol), float(best[1]), float(best[2]),
                             float(best[3]), tol)


def _expr_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    out = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = mul(m[0][j], _expr_det(minor))
        if out is None:
            out = term
        else:
            out = sub(out, term) if j % 2 else add(out, term)
    return out


def tangent_developable_fixture(gamma, name="tangent_developable", rng=None):
    """``f(z, u, v) = gamma + u gamma' + v gamma''`` with normal ``gamma' ^ gamma'' ^ gamma'''``.

    ``gamma`` holds four expressions in ``z`` (text or expression trees).
    The normal is the cofactor vector of the fourth column of
    ``[gamma' gamma'' gamma''' x]``.
    """
    g = [parse_expr(e, {"z": 0}) if isinstance(e, str) else as_expr(e) for e in gamma]
    if len(g) != 4:
        raise ValueError("gamma needs four components")
    d1 = [diff(e, 0) for e in g]
    d2 = [diff(e, 0) for e in d1]
    d3 = [diff(e, 0) for e in d2]
    d4 = [diff(e, 0) for e in d3]
    rng = np.random.default_rng(0) if rng is None else rng
    zs = rng.uniform(-1, 1, 20)
    cols = [d1, d2, d3, d4]
    mats = np.array([[np.broadcast_to(evaluate(c[a], [zs]), zs.shape) for c in cols]
                     for a in range(4)])
    dets = np.linalg.det(np.moveaxis(mats, -1, 0))
    if np.min(np.abs(dets)) < 1e-8:
        raise ValueError("gamma', gamma'', gamma''', gamma'''' are not independent")
    u = parse_expr("u", {"u": 1})
    v = parse_expr("v", {"v": 2})
    fmap = tuple(add(add(g[a], mul(u, d1[a])), mul(v, d2[a])) for a in range(4))
    nu = []
    for a in range(4):
        rows = [[d1[r], d2[r], d3[r]] for r in range(4) if r != a]
        c = _expr_det(rows)
        nu.append(c if (a + 3) % 2 == 0 else neg(c))
    return FrontInstance(name, ("z", "u", "v"), fmap, tuple(nu))


def fixture_text(kind, k=None, n=None, gamma=None):
    """Definition text of a generated fixture."""
    if kind == "ak-front":
        return format_definition(ak_front_normal_form(k, n))
    if kind == "morin":
        return format_definition(morin_normal_form(k, n))
    if kind == "tangent-developable":
        gamma = gamma or ("z", "z^2", "z^3", "z^4")
        return format_definition(tangent_developable_fixture(gamma))
    raise ValueError(f"unknown fixture kind {kind!r}")
