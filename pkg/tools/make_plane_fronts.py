"""Generate closed plane fronts with prescribed cusp signs.

Each front is (x(t), z(t)) with x = sin(k t), z' = p x' and normal (-p, 1),
so the cusps sit at the zeros of x' and the inward sign on entry at the
j-th cusp equals sign(x'' p') there.  ``p`` is a trigonometric polynomial
fitted so that these signs match a requested pattern; z is integrated
exactly with sympy.

Usage: python3 tools/make_plane_fronts.py [output-dir]
"""

import sys
from pathlib import Path

import numpy as np
import sympy as sp

T = sp.Symbol("t")

# name -> (k, inward-on-entry signs at the 2k cusps)
DESIGNS = {
    # raw sequence +-+-+--+--++ (ten cusps)
    "twelve_signs": (5, [-1, -1, -1, -1, -1, 1, 1, 1, -1, -1]),
    "two_cusps_one_zig": (1, [-1, -1]),
    "four_cusps_two_zigs": (2, [-1, -1, -1, -1]),
    "six_cusps_one_zig": (3, [-1, -1, 1, -1, 1, -1]),
    "eight_cusps_three_zigs": (4, [-1, -1, -1, -1, -1, -1, 1, -1]),
}


def design(k, sigma, digits=2):
    tj = (np.pi / 2 + np.pi * np.arange(2 * k)) / k
    target = np.asarray(sigma) * (-1.0) ** np.arange(1, 2 * k + 1)
    freqs = [q for q in range(1, 3 * k + 2) if q != k]
    # columns: d/dt cos(q t) = -q sin(q t), d/dt sin(q t) = q cos(q t)
    cols = []
    for q in freqs:
        cols.append(-q * np.sin(q * tj))
        cols.append(q * np.cos(q * tj))
    a = np.column_stack(cols)
    coef = np.linalg.lstsq(a, target, rcond=None)[0]
    coef = np.round(coef / np.max(np.abs(coef)), digits)
    p = 0
    for i, q in enumerate(freqs):
        p += (sp.Rational(str(coef[2 * i])) * sp.cos(q * T)
              + sp.Rational(str(coef[2 * i + 1])) * sp.sin(q * T))
    dp = sp.lambdify(T, sp.diff(p, T))(tj)
    if not np.all(np.sign(dp) == target) or np.min(np.abs(dp)) < 0.05:
        raise RuntimeError("rounded design lost the sign pattern")
    x = sp.sin(k * T)
    z = sp.integrate(sp.expand(p * sp.diff(x, T)), (T, 0, T))
    z = sp.expand(sp.simplify(z))
    period = sp.simplify(z.subs(T, 2 * sp.pi) - z.subs(T, 0))
    if period != 0:
        raise RuntimeError("z is not periodic")
    return x, z, p


def dsl(e):
    return str(e).replace("**", "^")


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for name, (k, sigma) in DESIGNS.items():
        x, z, p = design(k, sigma)
        text = (f"# generated by tools/make_plane_fronts.py\n"
                f"front {name}\nvars t\nmap ({dsl(x)}, {dsl(z)})\n"
                f"normal ({dsl(-p)}, 1)\n")
        (out / f"{name}.front").write_text(text)
        print(name, "ok")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/akfronts/data")
