"""Shared builders for the test-suite."""

import numpy as np

from akfronts.classify import conjugate_front
from akfronts.expr import add, call, const, mul, power, var


def random_conjugation(front, p, rng, size=0.1):
    """Random source diffeo fixing ``p``, target affine map and normal rescaling.

    psi(x) = x + L (x - p) + quadratic and cubic terms in (x - p), all
    coefficients at most ``size`` in magnitude.
    """
    n = front.n
    names = front.variables
    d = [add(var(i, names[i]), const(-float(p[i]))) for i in range(n)]
    psi = []
    for i in range(n):
        e = var(i, names[i])
        for j in range(n):
            e = add(e, mul(const(rng.uniform(-size, size)), d[j]))
            for k in range(j, n):
                e = add(e, mul(const(rng.uniform(-size, size)), mul(d[j], d[k])))
            e = add(e, mul(const(rng.uniform(-size, size)), power(d[j], 3)))
        psi.append(e)
    while True:
        a = rng.normal(size=(n + 1, n + 1))
        if np.linalg.cond(a) < 50:
            break
    b = rng.normal(size=n + 1)
    lin = const(0.0)
    for i in range(n):
        lin = add(lin, mul(const(rng.uniform(-1, 1)), var(i, names[i])))
    scale = call("exp", lin)
    return conjugate_front(front, psi, a, b, scale, base_point=p)
