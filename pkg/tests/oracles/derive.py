"""Regenerate the frozen oracle values in ``tests/frozen.py``.

Independent of the package: symbolic metric, Christoffel symbols and
normal from sympy; 1-D integrals from mpmath.  Run with
``python3 tests/oracles/derive.py`` and paste the output into frozen.py.
"""

import json

import mpmath as mp
import sympy as sp

# sample angles are 2 pi k / 16, so they are nodes of every grid with 16 | n
ANGLES = (1, 3, 6, 11)


def graph_mean_curvature(rho, h, sigma, u, xs, t):
    """``-trace(A)/m`` of the graph ``t = u(x)`` toward the future unit normal."""
    m = len(xs)
    X = [t] + list(xs)
    G = sp.zeros(m + 1, m + 1)
    G[0, 0] = -h**2
    for i in range(m):
        for j in range(m):
            G[i + 1, j + 1] = rho**2 * sigma[i, j]
    Gi = G.inv()
    Gam = [[[sum(Gi[a, d] * (sp.diff(G[d, b], X[c]) + sp.diff(G[d, c], X[b]) - sp.diff(G[b, c], X[d]))
                 for d in range(m + 1)) / 2 for c in range(m + 1)] for b in range(m + 1)] for a in range(m + 1)]
    on = {t: u}
    du = [sp.diff(u, x) for x in xs]
    E = [sp.Matrix([du[i]] + [1 if k == i else 0 for k in range(m)]) for i in range(m)]
    # gbar^{-1} d(u - t) has positive t-component: the future normal
    n = sp.Matrix([-1] + list(du))
    N = Gi.subs(on) * n
    N = N / sp.sqrt(-(N.T * G.subs(on) * N)[0])
    g = sp.Matrix(m, m, lambda i, j: (E[i].T * G.subs(on) * E[j])[0])
    b = sp.zeros(m, m)
    for i in range(m):
        for j in range(m):
            nab = sp.Matrix([sum(Gam[a][bb][c].subs(on) * E[i][bb] * E[j][c] for bb in range(m + 1)
                                 for c in range(m + 1)) for a in range(m + 1)])
            nab[0] += sp.diff(u, xs[i], xs[j])
            b[i, j] = (nab.T * G.subs(on) * N)[0]
    return -(g.inv() * b).trace() / m


def main():
    t, p, q = sp.symbols("t phi psi", real=True)
    out = {}
    # m = 1 graphs u = 0.3 sin(phi)
    u1 = sp.Rational(3, 10) * sp.sin(p)
    cfgs = {
        "CFG-A": (sp.Integer(1), sp.Integer(1)),
        "CFG-B": (sp.exp(t), sp.Integer(1) + 0 * p),
        "CFG-C": (sp.exp(t), 2 + sp.cos(p)),
    }
    for name, (rho, h) in cfgs.items():
        centre = 1 if name == "CFG-B" else 0
        H = graph_mean_curvature(rho, h, sp.Matrix([[1]]), u1 + centre, [p], t)
        out[name] = {str(k): float(H.subs(p, 2 * sp.pi * k / 16).evalf(30)) for k in ANGLES}
    # closed form for CFG-A, u'' / (1 - u'^2)^(3/2)
    closed = sp.diff(u1, p, 2) / (1 - sp.diff(u1, p) ** 2) ** sp.Rational(3, 2)
    out["CFG-A-closed"] = {str(k): float(closed.subs(p, 2 * sp.pi * k / 16).evalf(30)) for k in ANGLES}
    # m = 2: CFG-D, u = 0.2 sin(phi) sin(psi)
    u2 = sp.Rational(1, 5) * sp.sin(p) * sp.sin(q)
    H2 = graph_mean_curvature(sp.Integer(1), 2 + sp.cos(p), sp.eye(2), u2, [p, q], t)
    out["CFG-D"] = {f"{a},{b}": float(H2.subs({p: 2 * sp.pi * a / 16, q: 2 * sp.pi * b / 16}).evalf(30))
                    for a, b in ((1, 2), (5, 12), (8, 3))}
    # boundary-integral criterion partial integrals from 1 to R
    mp.mp.dps = 30
    out["parab_exp"] = {str(R): float(mp.quad(lambda r: mp.e ** (-2 * r) / (2 * mp.pi * r), [1, R]))
                        for R in (10, 20, 40)}
    out["parab_power"] = {str(R): float((mp.asinh(1) - mp.asinh(mp.mpf(1) / R)) / (2 * mp.pi)) for R in (10, 20, 40)}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
