"""Conserved charges acting on delta-Bose-gas wavefunctions.

The commuting family is organized in two ladders:

* power-sum charges H1..H4 with eigenvalues i*p1, p2, i^3*p3, p4 of the
  rapidities (H2 carries an overall minus on its Laplacian free part);
* elementary-symmetric charges J2..J4 with eigenvalues -e2, i^3*e3, e4,
  which are the irreducible building blocks of H3 and H4:

      H3 = H1^3 - 3 H1 J2 + 3 J3
      H4 = H1^4 + 2 J2^2 - 4 H1^2 J2 + 4 H1 J3 - 4 J4

Away from coincident coordinates every charge acts through its free
differential part only; the delta-supported layers are equivalent to
boundary conditions on the hyperplanes x_j = x_{j+1}.  All of those are
verified here as exact cancellations of plane-wave sums:

  pair bracket      [c f + (d_j - d_{j+1}) f]              = 0,
  triple bracket    (sum_{l != j,j+1} d_l) [pair bracket]  = 0,
  quadruple bracket sum_{j>k>=3} (d_j d_k + c delta_jk) [pair bracket] = 0,

each evaluated in the one-sided limit x_{j+1} -> x_j from the ordered
region.  The ill-defined "naive" fourth charge differs from H4 by a
squared-delta term; its divergence is demonstrated numerically with
Gaussian-regularized deltas in ``g4_defect_scan``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import QuadratureError
from .exact import ExactComplex, as_scalar, exact
from .planewaves import BetheWavefunction, ExpPoly, RapiditySet

QUAD_RTOL = 1e-8


# ----------------------------------------------------------------------
# Charge registry and eigenvalues
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class FreeChargeSpec:
    """Free differential part of a charge: sign * (symmetric polynomial
    of the per-variable derivatives), plus the number of delta layers."""

    name: str
    kind: str          # "power" or "elementary"
    degree: int
    sign: int
    delta_rank: int

    def min_particles(self) -> int:
        return self.degree if self.kind == "elementary" else 1


CHARGES = {
    "H1": FreeChargeSpec("H1", "power", 1, +1, 0),
    "H2": FreeChargeSpec("H2", "power", 2, -1, 1),
    "J2": FreeChargeSpec("J2", "elementary", 2, +1, 1),
    "J3": FreeChargeSpec("J3", "elementary", 3, +1, 1),
    "J4": FreeChargeSpec("J4", "elementary", 4, +1, 2),
    "H3": FreeChargeSpec("H3", "power", 3, +1, 1),
    "H4": FreeChargeSpec("H4", "power", 4, +1, 2),
}

FORMULA_IDS = {
    "H1": "i*p1", "H2": "p2", "J2": "-e2", "J3": "i^3*e3",
    "J4": "e4", "H3": "i^3*p3", "H4": "p4",
}


@dataclass(frozen=True)
class ChargeEigenvalue:
    value: object       # ExactComplex in exact mode, complex otherwise
    formula_id: str


def power_sum(values: Sequence, m: int):
    total = values[0] * 0
    for v in values:
        total = total + v ** m
    return total


def elementary_symmetric(values: Sequence, m: int):
    one = values[0] * 0 + 1 if values else 1
    # e_k via the expansion of prod (1 + v t)
    coeffs = [one] + [values[0] * 0] * m
    for v in values:
        for k in range(min(m, len(values)), 0, -1):
            coeffs[k] = coeffs[k] + v * coeffs[k - 1]
    return coeffs[m]


def _i_times(rapidities: RapiditySet):
    if rapidities.exact:
        return [exact(0, v) for v in rapidities.values]
    return [1j * v for v in rapidities.values]


def charge_eigenvalue(name: str, rapidities: RapiditySet) -> ChargeEigenvalue:
    """Exact eigenvalue of the named charge on the Bethe state with the
    given rapidities: the registered symmetric polynomial evaluated at
    i * rapidities, times the registered sign."""
    spec = CHARGES[name]
    vals = _i_times(rapidities)
    if spec.kind == "power":
        value = power_sum(vals, spec.degree)
    else:
        value = elementary_symmetric(vals, spec.degree)
    return ChargeEigenvalue(value * spec.sign, FORMULA_IDS[name])


# ----------------------------------------------------------------------
# Interior (free-part) action
# ----------------------------------------------------------------------

def apply_free_part(spec: FreeChargeSpec, w: BetheWavefunction) -> ExpPoly:
    """Apply the free differential part on the ordered region.

    A plane wave with frequency vector omega is an eigenvector of every
    constant-coefficient operator; the free part multiplies its
    coefficient by sign * sym(i*omega).
    """
    poly = w.canonical
    i_unit = exact(0, 1) if poly.exact else 1j

    def weight(freq):
        vals = [i_unit * f for f in freq]
        if spec.kind == "power":
            s = power_sum(vals, spec.degree)
        else:
            s = elementary_symmetric(vals, spec.degree)
        return s * spec.sign

    return poly.weighted(weight)


def interior_eigen_residual(name: str, w: BetheWavefunction) -> ExpPoly:
    """Free part applied minus eigenvalue times the wavefunction; must be
    the empty sum on the ordered region."""
    spec = CHARGES[name]
    applied = apply_free_part(spec, w)
    ev = charge_eigenvalue(name, w.rapidities).value
    return applied - w.canonical.scale(ev)


# ----------------------------------------------------------------------
# Boundary conditions
# ----------------------------------------------------------------------

def pair_bracket(poly: ExpPoly, coupling, j: int) -> ExpPoly:
    """c f + (d_j - d_{j+1}) f  as a plane-wave sum (not yet restricted)."""
    i_unit = exact(0, 1) if poly.exact else 1j
    c = as_scalar(coupling, poly.exact)

    def weight(freq):
        return c + i_unit * (freq[j - 1] - freq[j])

    return poly.weighted(weight)


def boundary_residual_h2_generic(poly: ExpPoly, coupling, j: int) -> ExpPoly:
    """Pair bracket restricted to x_{j+1} = x_j + 0 for an arbitrary
    plane-wave sum; empty exactly for functions in the interacting
    domain, nonempty for generic controls."""
    return pair_bracket(poly, coupling, j).restrict_to_boundary(j)


def boundary_residual_h2(w: BetheWavefunction, j: int) -> ExpPoly:
    return boundary_residual_h2_generic(w.canonical, w.coupling.c, j)


def boundary_residual_j3_generic(poly: ExpPoly, coupling, j: int) -> ExpPoly:
    """(sum_{l != j, j+1} d_l) applied to the pair bracket, restricted to
    x_{j+1} = x_j + 0.  The extra derivatives are tangential to the
    boundary, so vanishing of the pair bracket forces this to vanish."""
    n = poly.num_vars
    if n < 3:
        raise ValueError("triple bracket needs at least three particles")
    bracket = pair_bracket(poly, coupling, j)
    i_unit = exact(0, 1) if poly.exact else 1j

    def weight(freq):
        total = freq[0] * 0
        for l in range(n):
            if l not in (j - 1, j):
                total = total + freq[l]
        return i_unit * total

    return bracket.weighted(weight).restrict_to_boundary(j)


def boundary_residual_j3(w: BetheWavefunction, j: int) -> ExpPoly:
    return boundary_residual_j3_generic(w.canonical, w.coupling.c, j)


def boundary_residual_j4_generic(poly: ExpPoly, coupling) -> list[ExpPoly]:
    """Quadruple-layer boundary condition at x_2 = x_1 + 0.

    Returns two residual components, both required empty:
      [0] the tangential-derivative part sum_{j>k>=3} d_j d_k [bracket],
          restricted to x_2 = x_1;
      [1] the delta layer, evaluated by a second restriction x_j = x_k of
          the already-restricted bracket, summed over j > k >= 3.
    """
    n = poly.num_vars
    if n < 4:
        raise ValueError("quadruple bracket needs at least four particles")
    c = as_scalar(coupling, poly.exact)
    bracket = pair_bracket(poly, coupling, 1)
    i_unit = exact(0, 1) if poly.exact else 1j

    deriv_total = ExpPoly.zero(n - 1, poly.exact)
    restricted = bracket.restrict_to_boundary(1)
    delta_total = ExpPoly.zero(n - 2, poly.exact)
    for k_lo, j_hi in itertools.combinations(range(3, n + 1), 2):
        deriv = bracket.weighted(
            lambda freq, a=j_hi, b=k_lo:
                (i_unit * freq[a - 1]) * (i_unit * freq[b - 1]))
        deriv_total = deriv_total + deriv.restrict_to_boundary(1)
        # after restricting x_2 := x_1, old variable v >= 3 sits at v - 1
        delta_total = delta_total + restricted.substitute_equal(
            j_hi - 1, k_lo - 1).scale(c)
    return [deriv_total, delta_total]


def boundary_residual_j4(w: BetheWavefunction) -> list[ExpPoly]:
    return boundary_residual_j4_generic(w.canonical, w.coupling.c)


def all_boundary_residuals(w: BetheWavefunction) -> dict:
    """Every applicable boundary residual for the state; keys name the
    bracket and the hyperplane index."""
    out = {}
    n = w.n
    for j in range(1, n):
        out[f"pair[j={j}]"] = boundary_residual_h2(w, j)
    if n >= 3:
        for j in range(1, n):
            out[f"triple[j={j}]"] = boundary_residual_j3(w, j)
    if n >= 4:
        for idx, res in enumerate(boundary_residual_j4(w)):
            out[f"quadruple[part={idx}]"] = res
    return out


# ----------------------------------------------------------------------
# Composition identities at eigenvalue level
# ----------------------------------------------------------------------

def composition_identity_check(rapidities: RapiditySet) -> dict:
    """Verify the ladder compositions and the underlying Newton
    identities exactly at eigenvalue level."""
    ev = {name: charge_eigenvalue(name, rapidities).value for name in CHARGES}
    n = len(rapidities)

    h3_combo = ev["H1"] ** 3 - 3 * ev["H1"] * ev["J2"] + 3 * ev["J3"]
    h4_combo = (ev["H1"] ** 4 + 2 * ev["J2"] ** 2 - 4 * ev["H1"] ** 2 * ev["J2"]
                + 4 * ev["H1"] * ev["J3"] - 4 * ev["J4"])

    vals = list(rapidities.values)
    p = {m: power_sum(vals, m) for m in (1, 2, 3, 4)} if n else {}
    e = {m: elementary_symmetric(vals, m) for m in (1, 2, 3, 4)}
    newton3 = p[3] == e[1] ** 3 - 3 * e[1] * e[2] + 3 * e[3]
    newton4 = p[4] == (e[1] ** 4 - 4 * e[1] ** 2 * e[2] + 2 * e[2] ** 2
                       + 4 * e[1] * e[3] - 4 * e[4])

    report = {
        "n": n,
        "h3_composition": ev["H3"] == h3_combo,
        "h4_composition": ev["H4"] == h4_combo,
        "newton_p3": bool(newton3),
        "newton_p4": bool(newton4),
    }
    report["ok"] = all(v for k, v in report.items() if k != "n")
    return report


# ----------------------------------------------------------------------
# Regularized squared-delta defect (the ill-defined fourth charge)
# ----------------------------------------------------------------------

def _gauss_nodes(a: float, b: float, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def _diag_profile(w: BetheWavefunction):
    """|chi(s, s+u)|^2 as a function of u only.

    Every term of a Bethe sum carries the same total frequency p1, so
    the modulus is invariant under the rigid shift s; the two-particle
    density profile is one dimensional.
    """
    if w.n != 2:
        raise ValueError("two-particle profile requested for N != 2")
    coeffs = np.array([complex(c) for c, _ in w.canonical.terms])
    freqs = np.array([complex(f[1]) for _, f in w.canonical.terms])

    def h(u):
        u = np.asarray(u, dtype=float)
        vals = np.exp(1j * np.multiply.outer(u, freqs)) @ coeffs
        return np.abs(vals) ** 2

    return h


def _quad(fn, a: float, b: float, rtol: float = QUAD_RTOL) -> float:
    val, err = integrate.quad(fn, a, b, epsabs=0.0, epsrel=rtol, limit=400)
    if not np.isfinite(val):
        raise QuadratureError(f"quadrature failed on [{a}, {b}]")
    return val


def _pair_delta_sq_expectation(w: BetheWavefunction, L: float, eps: float) -> float:
    """<chi| delta_eps(x_1-x_2)^2 |chi> over the box, unnormalized.

    delta_eps(u) = exp(-u^2/eps^2) / (eps sqrt(pi)); its square integrates
    to 1/(eps sqrt(2 pi)), which drives the 1/eps divergence.
    """
    if w.n == 2:
        h = _diag_profile(w)

        def integrand(u):
            return float((L - u) * h(u) * math.exp(-2.0 * u * u / (eps * eps)))

        scale = 1.0 / (eps * eps * math.pi)
        split = min(L, 30.0 * eps)
        total = _quad(integrand, 0.0, split)
        if split < L:
            total += _quad(integrand, split, L)
        return 2.0 * scale * total
    if w.n == 3:
        g_of_u = _pair_profile_three(w, L)

        def integrand(u):
            return float(g_of_u(u) * math.exp(-2.0 * u * u / (eps * eps)))

        scale = 1.0 / (eps * eps * math.pi)
        split = min(L, 30.0 * eps)
        total = _quad(integrand, 0.0, split, rtol=1e-7)
        if split < L:
            total += _quad(integrand, split, L, rtol=1e-7)
        return 2.0 * scale * total
    raise ValueError("defect scan supports N in {2, 3}")


def _pair_profile_three(w: BetheWavefunction, L: float, order: int = 48):
    """G(u) = integral ds dx3 |chi(s, s+u, x3)|^2 for the N=3 box."""

    def G(u):
        u = float(u)
        knots = sorted({-L, min(u - L, 0.0), 0.0, min(u, L), L})
        total = 0.0
        for a, b in zip(knots, knots[1:]):
            if b - a <= 0:
                continue
            t, wt = _gauss_nodes(a, b, order)
            measure = np.maximum(
                L - np.maximum(np.maximum(0.0, u), t)
                + np.minimum(np.minimum(0.0, u), t), 0.0)
            pts = np.column_stack([np.zeros_like(t), np.full_like(t, u), t])
            q = np.abs(w.evaluate_many(pts)) ** 2
            total += float(np.sum(wt * measure * q))
        return total

    return G


def _cross_delta_expectation(w: BetheWavefunction, L: float, eps: float,
                             order: int = 48) -> float:
    """<chi| delta_eps(x_1-x_2) delta_eps(x_2-x_3) |chi>, N = 3.

    Reduced to offsets (u, v) = (x_1-x_2, x_3-x_2); the rigid-shift
    measure is m(u,v) = L - max(0,u,v) + min(0,u,v).
    """
    W = min(L, 10.0 * eps)

    def g1(x):
        return np.exp(-x * x / (eps * eps)) / (eps * math.sqrt(math.pi))

    def fn(u, v):
        pts = np.column_stack([u, np.zeros_like(u), v])
        q = np.abs(w.evaluate_many(pts)) ** 2
        measure = np.maximum(
            L - np.maximum(np.maximum(0.0, u), v)
            + np.minimum(np.minimum(0.0, u), v), 0.0)
        return g1(u) * g1(v) * measure * q

    return _integrate_square_sectors(fn, W, order)


def _integrate_square_sectors(fn, W: float, order: int) -> float:
    """Integrate fn(u, v) over [-W, W]^2, splitting along u=0, v=0 and
    u=v where symmetric-extension kinks live."""
    x, wt = np.polynomial.legendre.leggauss(order)
    x01 = 0.5 * (x + 1.0)
    w01 = 0.5 * wt
    total = 0.0

    # rectangles u<0<v and v<0<u
    for flip in (False, True):
        u = -W + W * x01
        v = W * x01
        uu, vv = np.meshgrid(u, v, indexing="ij")
        ww = np.multiply.outer(W * w01, W * w01)
        if flip:
            uu, vv = vv.copy(), uu.copy()
        total += float(np.sum(ww * fn(uu.ravel(), vv.ravel()).reshape(uu.shape)))

    # triangles 0<v<u<W and 0<u<v<W via scaling v = u * eta
    for flip in (False, True):
        u = W * x01
        eta = x01
        uu, ee = np.meshgrid(u, eta, indexing="ij")
        vv = uu * ee
        jac = uu
        ww = np.multiply.outer(W * w01, w01) * jac
        a, b = (uu, vv) if not flip else (vv, uu)
        total += float(np.sum(ww * fn(a.ravel(), b.ravel()).reshape(uu.shape)))

    # triangles -W<u<v<0 and -W<v<u<0 via v = u * (1 - eta)
    for flip in (False, True):
        u = -W * x01
        eta = x01
        uu, ee = np.meshgrid(u, eta, indexing="ij")
        vv = uu * (1.0 - ee)
        jac = np.abs(uu)
        ww = np.multiply.outer(W * w01, w01) * jac
        a, b = (uu, vv) if not flip else (vv, uu)
        total += float(np.sum(ww * fn(a.ravel(), b.ravel()).reshape(uu.shape)))

    return total


def g4_defect_scan(w: BetheWavefunction, epsilons: Sequence[float],
                   box_length: float) -> list[tuple[float, float]]:
    """|<chi| (naive fourth charge - H4) |chi>| with every delta replaced
    by a Gaussian of width eps, for each eps in the scan.

    For N=2 the difference operator is -2 c^2 delta^2(x_1-x_2); for N=3
    it gains +6 c^2 delta(x_1-x_2) delta(x_2-x_3), whose regularized
    expectation stays finite while the squared-delta part diverges
    like 1/eps.
    """
    if w.n not in (2, 3):
        raise ValueError("defect scan supports N in {2, 3}")
    c = float(w.coupling.c)
    out = []
    for eps in epsilons:
        pair_term = _pair_delta_sq_expectation(w, box_length, float(eps))
        if w.n == 2:
            defect = abs(-2.0 * c * c * pair_term)
        else:
            cross = _cross_delta_expectation(w, box_length, float(eps))
            defect = abs(-2.0 * c * c * 3.0 * pair_term + 6.0 * c * c * cross)
        out.append((float(eps), defect))
    return out


def fit_loglog_slope(scan: Sequence[tuple[float, float]]) -> float:
    eps = np.log([p[0] for p in scan])
    val = np.log([p[1] for p in scan])
    return float(np.polyfit(eps, val, 1)[0])


def one_over_eps_remainders(scan: Sequence[tuple[float, float]],
                            n_fit: int = 4) -> tuple[float, list[float]]:
    """Fit A/eps on the smallest widths and return (A, remainders)."""
    pts = sorted(scan, key=lambda p: p[0])
    fit_pts = pts[:n_fit]
    num = sum(v / e for e, v in fit_pts)
    den = sum(1.0 / (e * e) for e, _ in fit_pts)
    A = num / den
    remainders = [v - A / e for e, v in pts]
    return A, remainders


# ----------------------------------------------------------------------
# Pair-delta overlaps (sector action of the pair-contact operator)
# ----------------------------------------------------------------------

def integrate_box_1d(poly: ExpPoly, L: float) -> complex:
    """Integral of a one-variable plane-wave sum over [0, L]."""
    if poly.num_vars != 1:
        raise ValueError("one-variable sum expected")
    total = 0.0 + 0.0j
    for coeff, (freq,) in poly.terms:
        wv = complex(freq)
        cv = complex(coeff)
        z = 1j * wv * L
        if abs(z) < 1e-8:
            total += cv * L * (1.0 + z / 2.0 + z * z / 6.0)
        else:
            total += cv * (np.exp(z) - 1.0) / (1j * wv)
    return total


def pair_delta_overlap(f: BetheWavefunction, g: BetheWavefunction,
                       L: float) -> complex:
    """<f| sum_{j<k} delta(x_j - x_k) |g> over the box [0, L]^N.

    The delta layers are evaluated by exact restriction to the diagonal;
    the remaining coordinates are integrated (closed form for N=2,
    panel quadrature for N=3).  Nonzero off-diagonal elements between
    distinct Bethe states are what expels the naively ordered quartic
    expansion coefficient from the commuting family.
    """
    if f.n != g.n:
        raise ValueError("states must live in the same particle sector")
    if f.n == 2:
        df = f.canonical.restrict_to_boundary(1).to_float()
        dg = g.canonical.restrict_to_boundary(1).to_float()
        return integrate_box_1d(df.conj().mul(dg), L)
    if f.n == 3:
        # three equal pair contributions by exchange symmetry
        order = 64
        xs, wx = _gauss_nodes(0.0, L, order)
        total = 0.0 + 0.0j
        for x, wgt in zip(xs, wx):
            for a, b in ((0.0, x), (x, L)):
                if b - a <= 0:
                    continue
                ts, wt = _gauss_nodes(a, b, order // 2)
                pts = np.column_stack(
                    [np.full_like(ts, x), np.full_like(ts, x), ts])
                vals = np.conj(f.evaluate_many(pts)) * g.evaluate_many(pts)
                total += wgt * np.sum(wt * vals)
        return 3.0 * complex(total)
    raise ValueError("pair-delta overlap supports N in {2, 3}")


def norm_sq(f: BetheWavefunction, L: float) -> float:
    """Squared box norm of the (unnormalized) wavefunction."""
    if f.n == 2:
        h = _diag_profile(f)
        u, wu = _gauss_nodes(0.0, L, 256)
        return float(2.0 * np.sum(wu * (L - u) * h(u)))
    if f.n == 3:
        def fn(u, v):
            pts = np.column_stack([np.zeros_like(u), u, v])
            q = np.abs(f.evaluate_many(pts)) ** 2
            measure = np.maximum(
                L - np.maximum(np.maximum(0.0, u), v)
                + np.minimum(np.minimum(0.0, u), v), 0.0)
            return measure * q

        return _integrate_square_sectors(fn, L, 96)
    raise ValueError("norm supported for N in {2, 3}")


def normalized_pair_delta_overlap(f: BetheWavefunction, g: BetheWavefunction,
                                  L: float) -> complex:
    return pair_delta_overlap(f, g, L) / math.sqrt(norm_sq(f, L) * norm_sq(g, L))
