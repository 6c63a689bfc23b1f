"""Truncated multivariate Taylor expansions ("jets").

A :class:`Jet` stores the Taylor coefficients ``d^alpha g(p) / alpha!`` of a
scalar function ``g`` at a base point ``p`` for all multi-indices with
``|alpha| <= order``.  Coefficients live in a dense table ordered by total
degree, so truncating to a lower order is a prefix slice.  Leading axes of
the coefficient array are batch axes: one ``Jet`` can carry the expansions
of the same function at many base points.
"""

from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial

import numpy as np

from .errors import DomainError, OrderExhausted

__all__ = [
    "Jet",
    "directional_derivative",
    "monomials",
    "n_monomials",
]


def n_monomials(n, d):
    return comb(n + d, n)


@lru_cache(maxsize=None)
def monomials(n, d):
    """Multi-indices of ``n`` variables with total degree ``<= d``, graded."""
    rows = []
    for deg in range(d + 1):
        for combo in combinations_with_replacement(range(n), deg):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            rows.append(tuple(alpha))
    return tuple(rows)


@lru_cache(maxsize=None)
def _lookup(n, d):
    return {alpha: k for k, alpha in enumerate(monomials(n, d))}


@lru_cache(maxsize=None)
def _mul_table(n, d):
    mons = monomials(n, d)
    look = _lookup(n, d)
    ia, ib, ic = [], [], []
    for a, alpha in enumerate(mons):
        da = sum(alpha)
        for b, beta in enumerate(mons):
            if da + sum(beta) > d:
                # graded order: every later beta has degree >= this one
                if sum(beta) > d - da:
                    break
                continue
            ia.append(a)
            ib.append(b)
            ic.append(look[tuple(x + y for x, y in zip(alpha, beta))])
    ia, ib, ic = (np.asarray(v, dtype=np.intp) for v in (ia, ib, ic))
    perm = np.argsort(ic, kind="stable")
    ia, ib, ic = ia[perm], ib[perm], ic[perm]
    starts = np.flatnonzero(np.r_[True, ic[1:] != ic[:-1]])
    return ia, ib, starts


@lru_cache(maxsize=None)
def _deriv_table(n, d, i):
    """Source indices and factors for d/dx_i, mapping order d to d - 1."""
    look = _lookup(n, d)
    src, fac = [], []
    for beta in monomials(n, d - 1):
        up = list(beta)
        up[i] += 1
        src.append(look[tuple(up)])
        fac.append(beta[i] + 1)
    return np.asarray(src, dtype=np.intp), np.asarray(fac, dtype=float)


@lru_cache(maxsize=None)
def _degree_one(n, d):
    if d < 1:
        return None
    look = _lookup(n, d)
    return np.asarray(
        [look[tuple(int(j == i) for j in range(n))] for i in range(n)], dtype=np.intp
    )


def _series_coeffs(name, a0, d):
    """Scaled derivatives g^(m)(a0)/m! for m = 0..d of an elementary function."""
    out = []
    if name == "exp":
        e = np.exp(a0)
        out = [e / factorial(m) for m in range(d + 1)]
    elif name == "sin":
        out = [_exact_trig(name, a0, m) for m in range(d + 1)]
    elif name == "cos":
        out = [_exact_trig(name, a0, m) for m in range(d + 1)]
    elif name == "log":
        out = [np.log(a0)] + [(-1.0) ** (m + 1) / (m * a0**m) for m in range(1, d + 1)]
    elif name == "recip":
        out = [(-1.0) ** m / a0 ** (m + 1) for m in range(d + 1)]
    elif name == "sqrt":
        s = np.sqrt(a0)
        out = [s]
        c = 1.0
        for m in range(1, d + 1):
            c *= (0.5 - (m - 1)) / m
            out.append(c * s / a0**m)
    else:
        raise ValueError(f"unknown function {name!r}")
    return out


def _exact_trig(name, a0, m):
    # cycle sin, cos, -sin, -cos instead of phase shifts, which round
    s, c = np.sin(a0), np.cos(a0)
    if name == "sin":
        cyc = (s, c, -s, -c)
    else:
        cyc = (c, -s, -c, s)
    return cyc[m % 4] / factorial(m)


class Jet:
    """Truncated Taylor expansion of a scalar function at a point.

    Parameters
    ----------
    point : array_like, shape (..., n)
        Base point (batched along leading axes).
    order : int
        Truncation order.
    coeffs : array_like, shape (..., n_monomials(n, order))
        Scaled Taylor coefficients in graded order.
    """

    __slots__ = ("point", "order", "coeffs")
    __array_priority__ = 100

    def __init__(self, point, order, coeffs):
        self.point = np.asarray(point)
        self.order = int(order)
        self.coeffs = np.asarray(coeffs)
        if self.coeffs.shape[-1] != n_monomials(self.nvars, self.order):
            raise ValueError("coefficient table does not match (n, order)")

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, point, order, dtype=None):
        point = np.asarray(point)
        n = point.shape[-1]
        value = np.asarray(value, dtype=dtype)
        dtype = np.result_type(value, float)
        shape = np.broadcast_shapes(point.shape[:-1], value.shape)
        c = np.zeros(shape + (n_monomials(n, order),), dtype)
        c[..., 0] = value
        return cls(point, order, c)

    @classmethod
    def variable(cls, i, point, order, dtype=float):
        point = np.asarray(point)
        n = point.shape[-1]
        c = np.zeros(point.shape[:-1] + (n_monomials(n, order),), dtype=dtype)
        c[..., 0] = point[..., i]
        if order >= 1:
            c[..., _degree_one(n, order)[i]] = 1.0
        return cls(point, order, c)

    def _like(self, coeffs, order=None):
        return Jet(self.point, self.order if order is None else order, coeffs)

    # -- properties ---------------------------------------------------
    @property
    def nvars(self):
        return self.point.shape[-1]

    @property
    def field(self):
        return "complex" if np.iscomplexobj(self.coeffs) else "real"

    @property
    def value(self):
        return self.coeffs[..., 0]

    def gradient(self):
        """First partial derivatives at the base point, shape (..., n)."""
        if self.order < 1:
            raise OrderExhausted("gradient needs a jet of order >= 1")
        return self.coeffs[..., _degree_one(self.nvars, self.order)]

    def coefficient(self, alpha):
        alpha = tuple(alpha)
        if sum(alpha) > self.order:
            raise OrderExhausted(f"multi-index {alpha} exceeds order {self.order}")
        return self.coeffs[..., _lookup(self.nvars, self.order)[alpha]]

    def partial(self, alpha):
        """Exact mixed partial d^alpha at the base point."""
        scale = 1
        for a in alpha:
            scale *= factorial(a)
        return self.coefficient(alpha) * scale

    def truncate(self, order):
        if order > self.order:
            raise OrderExhausted(f"cannot raise order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.point, order, self.coeffs[..., : n_monomials(self.nvars, order)])

    def deriv(self, i):
        """Jet of d/dx_i, one order lower."""
        if self.order < 1:
            raise OrderExhausted("jet order exhausted")
        src, fac = _deriv_table(self.nvars, self.order, i)
        return Jet(self.point, self.order - 1, self.coeffs[..., src] * fac)

    # -- arithmetic ---------------------------------------------------
    def _check(self, other):
        if self.order != other.order:
            raise ValueError(f"jet orders differ ({self.order} vs {other.order})")
        if self.field != other.field:
            raise ValueError("jet field tags differ")
        if self.point is not other.point and not np.array_equal(self.point, other.point):
            raise ValueError("jets have different base points")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return self._like(self.coeffs + other.coeffs)
        c = self.coeffs.astype(np.result_type(self.coeffs, other), copy=True)
        c[..., 0] = c[..., 0] + other
        return self._like(c)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            ia, ib, starts = _mul_table(self.nvars, self.order)
            prod = self.coeffs[..., ia] * other.coeffs[..., ib]
            return self._like(np.add.reduceat(prod, starts, axis=-1))
        other = np.asarray(other)
        return self._like(self.coeffs * other[..., None])

    __rmul__ = __mul__

    def reciprocal(self, pos=None):
        a0 = self.value
        if np.any(a0 == 0):
            raise DomainError("division by zero", pos)
        return self._apply_series("recip", a0)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = np.asarray(other)
        if np.any(other == 0):
            raise DomainError("division by zero")
        return self._like(self.coeffs / other[..., None])

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return self.reciprocal() ** (-k)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        if result is None:
            return Jet.constant(np.ones_like(self.value), self.point, self.order)
        return result

    def _apply_series(self, name, a0):
        coeffs = _series_coeffs(name, a0, self.order)
        h = self.coeffs.copy()
        h[..., 0] = 0
        h = self._like(h)
        r = Jet(self.point, self.order, np.zeros(h.coeffs.shape, np.result_type(h.coeffs, *coeffs)))
        r.coeffs[..., 0] = coeffs[-1]
        for m in range(self.order - 1, -1, -1):
            r = r * h
            r.coeffs[..., 0] += coeffs[m]
        return r

    def apply(self, name, pos=None):
        """Elementary function (sin, cos, exp, log, sqrt) applied to the jet."""
        a0 = self.value
        if name in ("log", "sqrt"):
            if np.any(a0 == 0):
                raise DomainError(f"{name} of zero", pos)
            if not np.iscomplexobj(a0) and np.any(a0 < 0):
                raise DomainError(f"{name} of a negative real number", pos)
        return self._apply_series(name, a0)

    def compose(self, inner):
        """Substitute jets ``inner[i]`` (in new variables) for the variables.

        ``inner[i]`` must expand around ``self.point[i]``.  Exact up to the
        order of the inner jets provided that order does not exceed
        ``self.order``.
        """
        if len(inner) != self.nvars or not inner:
            raise ValueError("need one inner jet per variable")
        ref = inner[0]
        d = ref.order
        if d > self.order:
            raise OrderExhausted("outer jet order is lower than inner order")
        shifted = []
        for i, g in enumerate(inner):
            c = g.coeffs.astype(np.result_type(g.coeffs, float), copy=True)
            off = c[..., 0] - self.point[..., i]
            if np.any(np.abs(off) > 1e-9 * (1.0 + np.abs(self.point[..., i]))):
                raise ValueError("inner jets must expand around the outer base point")
            c[..., 0] = 0
            shifted.append(Jet(g.point, d, c))
        dtype = np.result_type(self.coeffs, *(g.coeffs for g in shifted))
        out = np.zeros(ref.coeffs.shape[:-1] + (n_monomials(ref.nvars, d),), dtype)
        out[..., 0] = self.coeffs[..., 0]
        terms = {}
        for k, alpha in enumerate(monomials(self.nvars, d)):
            if k == 0:
                continue
            j = max(i for i, a in enumerate(alpha) if a)
            lower = list(alpha)
            lower[j] -= 1
            lower = tuple(lower)
            term = shifted[j] if not any(lower) else terms[lower] * shifted[j]
            terms[alpha] = term
            out = out + term.coeffs * self.coeffs[..., k][..., None]
        return Jet(ref.point, d, out)

    def __repr__(self):
        return f"Jet(n={self.nvars}, order={self.order}, value={self.value!r})"


def directional_derivative(j, v):
    """Jet of ``sum_i v[i] * d j / dx_i``, one order lower than ``j``.

    ``v`` holds jets (of order at least ``j.order - 1``) or plain scalars.
    """
    if j.order < 1:
        raise OrderExhausted("directional derivative of an order-0 jet")
    out = None
    for i, vi in enumerate(v):
        term = j.deriv(i)
        if isinstance(vi, Jet):
            term = term * vi.truncate(j.order - 1)
        else:
            term = term * vi
        out = term if out is None else out + term
    if out is None:
        return Jet.constant(np.zeros_like(j.value), j.point, j.order - 1)
    return out
