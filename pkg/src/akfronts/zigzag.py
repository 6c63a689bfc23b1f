"""Zig-zag numbers and Maslov indices of loops on real fronts.

A loop is sampled on a uniform grid in its parameter.  Everything needed at
a sample (the image curve, the normal and their derivatives) is carried as
a univariate jet, so cusps are handled by factoring out common vanishing
orders instead of by limits.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .classify import classify_lambda_route
from .errors import AkError, DegenerateCrossing, NotCoorientable, NumericFailure
from .expr import eval_jets, evaluate
from .front import LocalJets
from .jet import Jet, directional_derivative

__all__ = [
    "NormalTransport",
    "CrossingRecord",
    "SignSequence",
    "ZigzagReport",
    "transport_normal",
    "detect_crossings",
    "normalize_signs",
    "sign_sequence",
    "normal_curvature_map",
    "maslov_index",
    "zigzag_report",
]

JET_ORDER = 4
MAX_SAMPLES = 1 << 17


@dataclass
class NormalTransport:
    s: np.ndarray
    normals: np.ndarray
    coorientable: bool

    @property
    def rho(self):
        return 0 if self.coorientable else 1

    def __iter__(self):
        return iter((self.normals, self.coorientable))


@dataclass
class CrossingRecord:
    t: float
    point: np.ndarray
    cls: str
    s_minus: int
    s_plus: int
    second: np.ndarray
    slope: float = 0.0


@dataclass
class SignSequence:
    raw: tuple
    normalized: tuple

    @property
    def z(self):
        return sum(1 for e in self.normalized if e < 0)

    @staticmethod
    def text(seq):
        return "".join("+" if e > 0 else "-" for e in seq)


@dataclass
class ZigzagReport:
    coorientable: bool
    rho: int
    signs: SignSequence = None
    crossings: list = field(default_factory=list)
    maslov: int = None
    angle_s: np.ndarray = field(default=None, repr=False)
    angle: np.ndarray = field(default=None, repr=False)
    samples: int = 0

    @property
    def z(self):
        return None if self.signs is None else self.signs.z

    @property
    def consistent(self):
        if self.signs is None or self.maslov is None:
            return None
        return abs(self.maslov) == self.signs.z

    def to_dict(self):
        out = {
            "coorientable": self.coorientable,
            "rho": self.rho,
            "samples": self.samples,
            "crossings": [
                {"t": c.t, "point": [float(v) for v in c.point], "class": c.cls,
                 "s_minus": c.s_minus, "s_plus": c.s_plus}
                for c in self.crossings
            ],
        }
        if self.signs is not None:
            out["raw"] = SignSequence.text(self.signs.raw)
            out["normalized"] = SignSequence.text(self.signs.normalized)
            out["z"] = self.signs.z
        out["maslov"] = self.maslov
        out["consistent"] = self.consistent
        return out


def _as_jet(v, like):
    if isinstance(v, Jet):
        return v
    return Jet.constant(np.broadcast_to(np.asarray(v, dtype=float), like.value.shape),
                        like.point, like.order)


def _gdot(a, b, g):
    out = None
    for i in range(len(a)):
        for j in range(len(b)):
            if g[i, j] == 0:
                continue
            term = a[i] * b[j] * float(g[i, j])
            out = term if out is None else out + term
    return out


def _shift(jets, m):
    """Divide univariate jets by s^m per sample (m an int array)."""
    order = jets[0].order
    top = int(np.max(m))
    out = []
    for jet in jets:
        c = np.zeros(jet.coeffs.shape[:-1] + (order - top + 1,), jet.coeffs.dtype)
        for k in range(order - top + 1):
            idx = np.clip(m + k, 0, order)
            c[..., k] = np.take_along_axis(jet.coeffs, idx[..., None], axis=-1)[..., 0]
        out.append(Jet(jet.point, order - top, c))
    return out


def _lowest_order(jets, tol):
    """Per-sample lowest degree at which some jet has a nonzero coefficient."""
    order = jets[0].order
    mags = np.max(np.abs(np.stack([j.coeffs for j in jets])), axis=0)
    nz = mags > tol[..., None]
    m = np.argmax(nz, axis=-1)
    m[~np.any(nz, axis=-1)] = order + 1
    return m


class _Sampler:
    """Jets of the loop, the image curve and the unit normal at all samples."""

    def __init__(self, front, loop, N, order=JET_ORDER):
        if getattr(front, "field", "real") != "real":
            raise ValueError("zig-zag computations are defined over the reals only")
        if len(loop.map) != front.n:
            raise ValueError(f"loop has {len(loop.map)} components, front needs {front.n}")
        self.front, self.loop, self.N = front, loop, N
        self.G = loop.gram(front.n + 1)
        self.Ginv = np.linalg.inv(self.G)
        s = np.linspace(0.0, 1.0, N + 1)
        self.s = s
        S = Jet.variable(0, s[:, None], order + 2)
        gam = [_as_jet(evaluate(e, [S]), S) for e in loop.map]
        self.gamma = gam
        self.points = np.stack([g.value for g in gam], axis=-1)
        fg = [_as_jet(evaluate(e, gam), S) for e in front.map]
        self.curve = fg
        if front.normal is not None:
            nu = [_as_jet(evaluate(e, gam), S).truncate(order + 1) for e in front.normal]
        else:
            if front.n != 1:
                raise NumericFailure("loops on fronts with n >= 2 need an explicit normal")
            vel = [c.deriv(0) for c in fg]
            scale = max(1.0, float(np.max(np.abs([v.value for v in vel]))))
            m = _lowest_order(vel, np.full(len(s), 1e-9 * scale))
            if np.any(m > 2):
                raise NumericFailure("velocity of the loop image vanishes to high order")
            v = _shift(vel, m)
            nu = [-v[1], v[0]]
            nu = [x.truncate(min(x.order, order + 1)) for x in nu]
        nu = [sum(_as_jet(float(self.Ginv[a, b]), nu[0]) * nu[b] for b in range(len(nu)))
              for a in range(len(nu))]
        norm = _gdot(nu, nu, self.G).apply("sqrt")
        unit = [x / norm for x in nu]
        vals = np.stack([u.value for u in unit], axis=-1)
        sign = np.ones(len(s))
        for i in range(1, len(s)):
            c = vals[i] @ self.G @ vals[i - 1] * sign[i - 1]
            if abs(c) < 0.5:
                raise NumericFailure("adjacent normals differ by more than 60 degrees: "
                                     "sampling too coarse")
            sign[i] = np.sign(c)
        sign *= float(loop.sign)
        self.sign = sign
        self.nu = [Jet(u.point, u.order, u.coeffs * sign[:, None]) for u in unit]
        self.nu_values = vals * sign[:, None]
        self.coorientable = bool(self.nu_values[-1] @ self.G @ self.nu_values[0] > 0)

    def check_closed(self, tol=1e-9):
        f0 = np.array([c.coeffs[0, :2] for c in self.curve])
        f1 = np.array([c.coeffs[-1, :2] for c in self.curve])
        if np.max(np.abs(f0 - f1)) > tol * max(1.0, np.max(np.abs(f0))):
            raise ValueError("loop image is not closed (values or first derivatives differ)")

    def lam(self):
        """lambda along the loop with the transported unit normal."""
        jets = eval_jets(self.front.map, self.points, 1)
        jac = np.stack([j.gradient() for j in jets], axis=-2)  # (N+1, n+1, n)
        mats = np.concatenate([jac, self.nu_values[:, :, None]], axis=-1)
        scale = np.maximum(1.0, np.max(np.abs(jac), axis=(-1, -2)))
        return np.linalg.det(mats), scale


def transport_normal(front, loop, samples=None):
    """Continuous unit normal along the loop and the co-orientability flag."""
    smp = _Sampler(front, loop, samples or loop.samples)
    return NormalTransport(smp.s, smp.nu_values, smp.coorientable)


def _lam_at(s, front, loop, nu_ref):
    pt = np.array([float(np.asarray(evaluate(e, [s]))) for e in loop.map])
    jets = eval_jets(front.map, pt, 1)
    jac = np.array([j.gradient() for j in jets])
    if front.normal is not None:
        nu = np.array([float(np.asarray(evaluate(e, pt))) for e in front.normal])
        nu = nu * np.sign(nu @ nu_ref)
    else:
        nu = nu_ref
    return float(np.linalg.det(np.column_stack([jac, nu])))


def _refine(front, loop, a, b, nu_ref):
    ga = _lam_at(a, front, loop, nu_ref)
    gb = _lam_at(b, front, loop, nu_ref)
    if ga == 0:
        return a
    if gb == 0 or np.sign(ga) == np.sign(gb):
        return b if gb == 0 else 0.5 * (a + b)
    return brentq(_lam_at, a, b, args=(front, loop, nu_ref), xtol=1e-15,
                  rtol=4 * np.finfo(float).eps)


def _inward_signs(front, loop, s, nu_dir):
    """(s_minus, s_plus, f'' along eta, slope) at the crossing parameter ``s``.

    psi = <nu, f''> with f'' the second derivative along the null field
    vanishes on the singular set; the inward normal makes psi negative.
    """
    S = Jet.variable(0, np.array([s]), 1)
    gam = [_as_jet(evaluate(e, [S]), S) for e in loop.map]
    q = np.array([g.value for g in gam], dtype=float)
    dq = np.array([g.coefficient((1,)) for g in gam], dtype=float)
    loc = LocalJets(front, q, 5)
    eta = loc.eta
    f1 = [directional_derivative(f, eta) for f in loc.f]
    f2 = [directional_derivative(f, [e.truncate(f.order - 1) for e in eta]) for f in f1]
    order = f2[0].order
    nu = [v.truncate(order) for v in loc.nu]
    psi = sum(nu[a] * f2[a] for a in range(len(nu)))
    orient = np.sign(np.array([v.value for v in nu], dtype=float) @ nu_dir)
    slope = float(orient * (psi.gradient() @ dq))
    scale = max(1.0, float(np.max(np.abs(loc.jac_value))))
    if abs(slope) <= 1e-8 * scale ** 2:
        raise DegenerateCrossing(f"near-tangential crossing at s = {s:.6g}")
    s_minus = 1 if slope > 0 else -1
    second = np.array([v.value for v in f2], dtype=float)
    return s_minus, -s_minus, second, slope


def _crossings(smp):
    front, loop = smp.front, smp.loop
    lam, scale = smp.lam()
    sgn = np.sign(lam)
    idx = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
    tiny = np.abs(lam) <= 1e-8 * scale
    near = np.zeros(len(lam), dtype=bool)
    near[idx] = near[idx + 1] = True
    exact = np.flatnonzero(sgn == 0)
    bad = np.flatnonzero(tiny & ~near)
    for i in bad:
        if i in exact and 0 < i < len(lam) - 1 and sgn[i - 1] * sgn[i + 1] < 0:
            continue
        raise DegenerateCrossing(f"lambda nearly vanishes without a sign change at s = "
                                 f"{smp.s[i]:.6g}; perturb the loop")
    brackets = [(smp.s[i], smp.s[i + 1], i) for i in idx]
    brackets += [(smp.s[i - 1], smp.s[i + 1], i - 1) for i in exact
                 if 0 < i < len(lam) - 1 and sgn[i - 1] * sgn[i + 1] < 0]
    brackets.sort()
    out = []
    for a, b, i in brackets:
        t = _refine(front, loop, a, b, smp.nu_values[i])
        pt = np.array([float(np.asarray(evaluate(e, [t]))) for e in loop.map])
        rep = classify_lambda_route(front, pt, k_max=min(2, front.n), jet_order=None)
        if rep.cls.kind != "A" or rep.cls.index != 2:
            raise DegenerateCrossing(f"crossing at s = {t:.6g} is {rep.label}, not A2")
        s_minus, s_plus, second, slope = _inward_signs(front, loop, t, smp.nu_values[i])
        out.append(CrossingRecord(float(t), pt, rep.label, s_minus, s_plus, second, slope))
    return out, idx


def _adaptive(front, loop, samples=None):
    N = samples or loop.samples
    while True:
        smp = _Sampler(front, loop, N)
        lam, _ = smp.lam()
        sgn = np.sign(lam)
        idx = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
        isolated = len(idx) < 2 or np.min(np.diff(idx)) >= 4
        theta = _angles(smp)
        smooth = np.max(np.abs(np.diff(theta))) < np.pi / 8 if len(theta) > 1 else True
        if (isolated and smooth) or 2 * N > MAX_SAMPLES:
            return smp, theta
        N *= 2


def detect_crossings(front, loop, samples=None):
    """Transversal crossings of the loop with the singular set."""
    smp, _ = _adaptive(front, loop, samples)
    return _crossings(smp)[0]


def normalize_signs(raw):
    """Cancel adjacent equal pairs until the sequence alternates."""
    stack = []
    for e in raw:
        if stack and stack[-1] == e:
            stack.pop()
        else:
            stack.append(e)
    return tuple(stack)


def _raw_sequence(crossings):
    """epsilon_0 .. epsilon_{m+1} from the inward signs on entry.

    Between crossings the normal restarts from the inward choice, so with a
    continuously transported normal epsilon_j = (-1)^(j+1) s_j^- and
    epsilon_{m+1} = (-1)^m.
    """
    raw = [1]
    carry = 1  # +1 while the restarted normal agrees with the transported one
    for c in crossings:
        raw.append(raw[-1] * carry * c.s_minus)
        carry = c.s_plus
    raw.append(raw[-1] * carry)
    return tuple(raw)


def sign_sequence(front, loop, samples=None, crossings=None):
    """Raw and normalized sign sequence of a co-orientable loop."""
    if crossings is None:
        smp, _ = _adaptive(front, loop, samples)
        if not smp.coorientable:
            raise NotCoorientable("loop is not co-orientable; signs are undefined")
        crossings = _crossings(smp)[0]
    raw = _raw_sequence(crossings)
    if raw[-1] != 1:
        raise AkError("sign sequence does not close with +1 on a co-orientable loop")
    return SignSequence(raw, normalize_signs(raw))


def _angles(smp):
    """Unwrapped P^1 angle of [g(c', c') : g(nu', c')] at every sample."""
    c1 = [c.deriv(0) for c in smp.curve]
    order = min(c1[0].order, smp.nu[0].order - 1)
    c1 = [c.truncate(order) for c in c1]
    n1 = [v.deriv(0).truncate(order) for v in smp.nu]
    a = _gdot(c1, c1, smp.G)
    b = _gdot(n1, c1, smp.G)
    scale = np.maximum(1.0, np.abs(a.coeffs[..., 0]).max())
    m = _lowest_order([a, b], np.full(len(smp.s), 1e-12 * scale))
    if np.any(m > order):
        raise NumericFailure("normal curvature map cannot be extended across a sample")
    a, b = _shift([a, b], m)
    theta = np.arctan2(b.value, a.value)
    return np.unwrap(theta, period=np.pi)


def normal_curvature_map(front, loop, samples=None):
    """(s, theta) with theta the continuous angle of C_gamma in R / pi Z."""
    smp, theta = _adaptive(front, loop, samples)
    if not smp.coorientable:
        raise NotCoorientable("the normal curvature map needs a co-orientable loop")
    return smp.s, theta


def _maslov(theta):
    """Net change of theta in units of 2 pi.

    theta lives in R / pi Z, yet for a co-orientable loop it always turns by
    an even multiple of pi; counting in 2 pi units makes |mu| equal the
    zig-zag number.
    """
    half_turns = (theta[-1] - theta[0]) / np.pi
    r = int(np.rint(half_turns))
    if abs(half_turns - r) >= 0.25:
        raise NumericFailure(f"rotation of C_gamma is not close to an integer ({half_turns:.3f})")
    if r % 2:
        raise NumericFailure("C_gamma turned by an odd multiple of pi")
    return r // 2


def maslov_index(front, loop, samples=None):
    """Signed rotation index of the normal curvature map."""
    _, theta = normal_curvature_map(front, loop, samples)
    return _maslov(theta)


def zigzag_report(front, loop, samples=None):
    """Co-orientability, sign sequence, zig-zag number and Maslov index."""
    smp, theta = _adaptive(front, loop, samples)
    smp.check_closed()
    rep = ZigzagReport(smp.coorientable, 0 if smp.coorientable else 1, samples=smp.N)
    lam, scale = smp.lam()
    if abs(lam[0]) <= 1e-8 * scale[0]:
        raise ValueError("loop must start at a regular point of the front")
    if not smp.coorientable:
        return rep
    crossings = _crossings(smp)[0]
    rep.crossings = crossings
    rep.signs = sign_sequence(front, loop, crossings=crossings)
    rep.maslov = _maslov(theta)
    rep.angle_s, rep.angle = smp.s, theta
    return rep
