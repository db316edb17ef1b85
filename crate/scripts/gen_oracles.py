#!/usr/bin/env python3
"""Generate the frozen oracle values used by the Rust test suites.

Every value here is computed by a route that is independent of the Rust
implementation: closed forms evaluated in extended precision, adaptive
quadrature, brute-force summation, root bracketing, or shooting seeded
by a dense tau discretization solved with LAPACK.

Usage: python3 scripts/gen_oracles.py  (rewrites crates/core/tests/fixtures/oracles.json)
"""

import json
import os

import mpmath as mp
import numpy as np
import scipy.linalg as sl
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from numpy.polynomial import chebyshev as C

mp.mp.dps = 40
OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "fixtures", "oracles.json")


def cplx(z):
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------- filters
def halfplane_integral(lam, a):
    """Oriented half-plane projector value, by adaptive quadrature over the imaginary axis."""
    lam = mp.mpc(lam)
    f = lambda y: 1 / ((1j * y + a) * (1j * y - lam))
    val = mp.quad(f, [-mp.inf, -10, 0, 10, mp.inf]) / (2 * mp.pi)
    # counterclockwise orientation of the half-disk boundary traverses the axis downwards
    return -val


def disk_sum(center, radius, ell, lam):
    center = mp.mpc(center)
    lam = mp.mpc(lam)
    s = mp.mpc(0)
    for k in range(ell):
        node = center + radius * mp.expjpi(mp.mpf(2 * k) / ell)
        s += (node - center) / ell / (node - lam)
    return s


filters = {
    "halfplane": [
        {"a": 1.0, "lambda": cplx(l), "value": cplx(halfplane_integral(l, 1.0))}
        for l in [1.0, -1.0, 0.5, 3.0 + 2.0j, -2.0 + 0.5j, -0.3 - 4.0j]
    ],
    "disk_on_circle": [],
}
for theta in [0.1, 0.37, 1.0]:
    lam = 2.5 + 2.0 * complex(mp.expj(theta))
    filters["disk_on_circle"].append(
        {"center": [2.5, 0.0], "radius": 2.0, "ell": 16, "lambda": cplx(lam),
         "value": cplx(disk_sum(2.5, 2.0, 16, lam))}
    )
filters["disk_far"] = {
    "center": [2.5, 0.0], "radius": 2.0, "ell": 16,
    "value_at_2r": float(1 / (1 - mp.mpf(2) ** 16)),
}

# ---------------------------------------------------------------- dense eig
rng = np.random.default_rng(20240611)
A = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
H = (A + A.conj().T) / 2
coeffs = np.poly(H)  # characteristic polynomial (real coefficients for Hermitian input)
roots = mp.polyroots([mp.mpf(float(np.real(c))) for c in coeffs], maxsteps=200, extraprec=200)
dense = {
    "hermitian8_re": H.real.tolist(),
    "hermitian8_im": H.imag.tolist(),
    "eigenvalues": sorted(float(mp.re(r)) for r in roots),
}

# ---------------------------------------------------------------- beam roots
def beam_g(b):
    return mp.cosh(b) * mp.cos(b) + 1


beam_roots = []
for n in range(1, 5):
    lo = (n - 0.75) * mp.pi
    hi = (n - 0.25) * mp.pi
    for _ in range(200):
        mid = (lo + hi) / 2
        if beam_g(lo) * beam_g(mid) <= 0:
            hi = mid
        else:
            lo = mid
    beam_roots.append(float((lo + hi) / 2))

# ---------------------------------------------------------------- tau references
def tau_eigs(n, op_cols, mass_cols, bc_rows):
    """Generalized eigenvalues of a dense Chebyshev tau discretization (LAPACK QZ)."""
    A = op_cols
    B = mass_cols
    k = len(bc_rows)
    A = np.vstack([A[: n + 1 - k], bc_rows])
    B = np.vstack([B[: n + 1 - k], np.zeros((k, n + 1))])
    w = sl.eig(A, B, right=False)
    w = w[np.isfinite(w)]
    w = np.sort(w.real[np.abs(w.imag) < 1e-8 * np.abs(w)])
    return w


def cheb_der_matrix(n, k, scale=1.0):
    M = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        c = np.zeros(n + 1)
        c[j] = 1
        d = C.chebder(c, k) if k > 0 else c
        M[: len(d), j] = d
    return M * scale**k


def cheb_mult_matrix(n, p):
    M = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        c = np.zeros(n + 1)
        c[j] = 1
        q = C.chebmul(c, p)[: n + 1]
        M[: len(q), j] = q
    return M


def bc_row(n, k, end, scale=1.0):
    r = np.zeros(n + 1)
    for j in range(n + 1):
        c = np.zeros(n + 1)
        c[j] = 1
        d = C.chebder(c, k) if k > 0 else c
        r[j] = C.chebval(end, d) * scale**k
    return r


# regular SLEP: -u'' + x^2 u = lambda cosh(x) u, Dirichlet
N = 700
cosh_c = C.chebinterpolate(np.cosh, 30)
w_reg = tau_eigs(N, -cheb_der_matrix(N, 2) + cheb_mult_matrix(N, [0.5, 0, 0.5]),
                 cheb_mult_matrix(N, cosh_c), [bc_row(N, 0, 1), bc_row(N, 0, -1)])
w_reg = w_reg[w_reg > 0]
denominator = mp.quad(lambda x: mp.sqrt(mp.cosh(x)), [-1, 0, 1])


def shoot_refine(rhs, guess, spacing):
    """Refine a tau estimate by shooting from x=-1 with u(-1)=0, u'(-1)=1 and bracketing u(1)=0."""

    def end_value(lam):
        sol = solve_ivp(lambda x, y: [y[1], rhs(x, lam) * y[0]], (-1.0, 1.0), [0.0, 1.0],
                        method="DOP853", rtol=1e-13, atol=1e-15)
        return sol.y[0, -1]

    lo, hi = guess - 0.25 * spacing, guess + 0.25 * spacing
    return brentq(end_value, lo, hi, xtol=1e-14 * abs(guess), rtol=1e-15, maxiter=200)


def refine_all(values, rhs, spectrum):
    out = {}
    for n, v in values.items():
        spacing = min(abs(v - w) for w in spectrum if w != v)
        out[n] = float(shoot_refine(rhs, v, spacing))
    return out


reg_rhs = lambda x, lam: x * x - lam * np.cosh(x)
regular = {
    "denominator": float(denominator),
    "eigenvalues": refine_all({str(n): float(w_reg[n - 1]) for n in [1, 2, 3, 10, 25, 50, 100, 200]},
                              reg_rhs, list(w_reg[:260])),
}

# indefinite SLEP: -u'' = lambda x^3 u, Dirichlet (positive branch)
N = 1100
w_ind = tau_eigs(N, -cheb_der_matrix(N, 2), cheb_mult_matrix(N, [0, 0.75, 0, 0.25]),
                 [bc_row(N, 0, 1), bc_row(N, 0, -1)])
pos = w_ind[w_ind > 0]
ind_rhs = lambda x, lam: -lam * x ** 3
indefinite = {"positive": refine_all({str(n): float(pos[n - 1]) for n in [1, 2, 3, 10, 150]},
                                     ind_rhs, list(pos[:200]))}

# tapered cantilever d2((1+x) u'') = lambda u on [0, 1], by high-precision shooting.
# With u(0)=u'(0)=0 the solutions are spanned by the ones starting from u''(0)=1 and
# u'''(0)=1; at an eigenvalue the 2x2 matrix of their (u''(1), u'''(1)) is singular.
def beam_det(lam):
    F = lambda x, y: [y[1], y[2], y[3], (lam * y[0] - 2 * y[3]) / (1 + x)]
    a = mp.odefun(F, 0, [0, 0, 1, 0])(1)
    b = mp.odefun(F, 0, [0, 0, 0, 1])(1)
    return a[2] * b[3] - a[3] * b[2]


mp.mp.dps = 30
beam_vals = [float(mp.findroot(beam_det, g)) for g in [14.5, 668.0, 5458.0, 21178.0]]
mp.mp.dps = 40
beam = {"length": 1.0, "eigenvalues": beam_vals, "roots_betaL": beam_roots}

# ---------------------------------------------------------------- closed forms
closed = {
    "exp_0_3": float(mp.e ** mp.mpf("0.3")),
    "thin_film_delta1_x1": float(mp.sqrt(2) * mp.tanh(1 / mp.sqrt(2))),
    "shifted_z1_samples": [[x, float(1 - mp.cos(x) / mp.cos(1))] for x in [-0.9, -0.3, 0.0, 0.45, 0.8]],
    "two_sinh1": float(2 * mp.sinh(1)),
}

# fixed 8-point Gauss-Legendre panel for independent composite quadrature in tests
x8, w8 = np.polynomial.legendre.leggauss(8)
panel = {"nodes": x8.tolist(), "weights": w8.tolist()}

data = {
    "filters": filters,
    "dense_eig": dense,
    "regular_slep": regular,
    "indefinite_slep": indefinite,
    "beam": beam,
    "closed_forms": closed,
    "gl8_panel": panel,
}
with open(OUT, "w") as fh:
    json.dump(data, fh, indent=1)
print("wrote", os.path.normpath(OUT))
