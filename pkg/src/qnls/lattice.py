"""Lattice regularization of the delta Bose gas on a truncated Fock space.

Each of M sites carries occupations 0..d-1 with lattice Bose operators
normalized to [psi, psi^dag] = 1/Delta (on the levels below the cutoff):

    psi |n> = sqrt(n/Delta) |n-1>,    psi^dag |n> = sqrt((n+1)/Delta) |n+1>.

The local building block is the 2x2 auxiliary-space matrix

    L(n|lam) = [ 1 - i lam Delta/2 + (c Delta^2/2) psi^dag psi ,
                 -i Delta sqrt(c) psi^dag rho ;
                 +i Delta sqrt(c) rho psi ,
                 1 + i lam Delta/2 + (c Delta^2/2) psi^dag psi ],
    rho = sqrt(1 + (c Delta^2/4) psi^dag psi),

the monodromy is the site-ordered product T(lam) = L(M) ... L(1), and
the transfer operator is its auxiliary trace tau(lam) = A + D.  The
commuting-family checks rely on the cutoff rule d >= N + 2: every
monodromy monomial touches each site exactly once, so one buffer level
above the sector occupation makes the restricted matrices exact, and a
second level keeps the diagonal rho factors inside their domain.

The 4x4 intertwiner R(lam, mu) with entries f(mu,lam) = (mu-lam+ic)/(mu-lam)
and g(mu,lam) = ic/(mu-lam) does not depend on Delta; the exchange
relation it encodes is verified numerically for both tensor-leg
orderings and the vanishing one is recorded (the convention is not fixed
a priori here).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CutoffTooSmall, RMatrixPole, SizeLimit
from .transfer import theta

DENSE_BUDGET = 20000


@dataclass(frozen=True)
class LatticeSpec:
    """M sites, per-site cutoff d (occupations 0..d-1), step Delta, coupling c."""

    sites: int
    cutoff: int
    step: float
    c: float

    def __post_init__(self):
        if self.sites < 1 or self.cutoff < 1 or self.step <= 0 or self.c <= 0:
            raise ValueError("need M >= 1, d >= 1, Delta > 0, c > 0")

    @property
    def length(self) -> float:
        return self.sites * self.step


# ----------------------------------------------------------------------
# Site operators
# ----------------------------------------------------------------------

def annihilator(d: int, step: float) -> np.ndarray:
    a = np.zeros((d, d), dtype=complex)
    for n in range(1, d):
        a[n - 1, n] = math.sqrt(n / step)
    return a


def creator(d: int, step: float) -> np.ndarray:
    return annihilator(d, step).conj().T


def density_sqrt(d: int, step: float, c: float) -> np.ndarray:
    """rho = sqrt(1 + (c Delta^2/4) psi^dag psi), diagonal in occupation."""
    diag = [math.sqrt(1.0 + c * step * n / 4.0) for n in range(d)]
    return np.diag(diag).astype(complex)


def density_sqrt_naive_ordered(d: int, step: float, c: float) -> np.ndarray:
    """The square root expanded and ordered by the classical rule.

    Each power (psi^dag psi)^j of the expansion is replaced by the
    daggers-left monomial psi^dag^j psi^j, whose diagonal value is the
    falling factorial n(n-1)...(n-j+1)/Delta^j.  The series terminates at
    j = n, so the truncated matrix is exact.  Differs from the true
    square root from occupation 1 upward at order (c Delta)^2.
    """
    diag = []
    x = c * step / 4.0
    for n in range(d):
        total = 0.0
        binom = 1.0  # binomial(1/2, j), iteratively
        falling = 1.0
        for j in range(n + 1):
            total += binom * (x ** j) * falling
            binom *= (0.5 - j) / (j + 1)
            falling *= (n - j)
        diag.append(total)
    return np.diag(diag).astype(complex)


def site_l_blocks(spec: LatticeSpec, lam: complex,
                  rho: np.ndarray | None = None) -> list[list[np.ndarray]]:
    """The 2x2 auxiliary matrix of d x d site operators."""
    d, step, c = spec.cutoff, spec.step, spec.c
    psi = annihilator(d, step)
    psid = creator(d, step)
    num = psid @ psi
    rho = density_sqrt(d, step, c) if rho is None else rho
    eye = np.eye(d, dtype=complex)
    a = (1.0 - 0.5j * lam * step) * eye + 0.5 * c * step * step * num
    dd = (1.0 + 0.5j * lam * step) * eye + 0.5 * c * step * step * num
    b = -1j * step * math.sqrt(c) * (psid @ rho)
    cc = 1j * step * math.sqrt(c) * (rho @ psi)
    return [[a, b], [cc, dd]]


# ----------------------------------------------------------------------
# Full-space monodromy (small M)
# ----------------------------------------------------------------------

def _embed(op: np.ndarray, site: int, spec: LatticeSpec) -> np.ndarray:
    """Kronecker embedding of a single-site operator at the given site
    (1-based; site 1 is the rightmost tensor factor)."""
    d, M = spec.cutoff, spec.sites
    out = np.eye(1, dtype=complex)
    for n in range(M, 0, -1):
        out = np.kron(out, op if n == site else np.eye(d, dtype=complex))
    return out


def monodromy(spec: LatticeSpec, lam: complex,
              rho_override=None) -> list[list[np.ndarray]]:
    """T(lam) = L(M) ... L(1) as a 2x2 block matrix of full-space operators."""
    dim = spec.cutoff ** spec.sites
    if dim > DENSE_BUDGET:
        raise SizeLimit(f"full space dimension {dim} exceeds {DENSE_BUDGET}")
    eye = np.eye(dim, dtype=complex)
    T = [[eye, np.zeros_like(eye)], [np.zeros_like(eye), eye]]
    for site in range(1, spec.sites + 1):
        blocks = site_l_blocks(spec, lam, rho=rho_override)
        L = [[_embed(blocks[r][s], site, spec) for s in range(2)]
             for r in range(2)]
        # left-multiply the running product by the new site: T <- L(site) T
        T = [[L[r][0] @ T[0][s] + L[r][1] @ T[1][s] for s in range(2)]
             for r in range(2)]
    return T


def transfer_operator(spec: LatticeSpec, lam: complex) -> np.ndarray:
    T = monodromy(spec, lam)
    return T[0][0] + T[1][1]


# ----------------------------------------------------------------------
# Occupation sectors
# ----------------------------------------------------------------------

def occupation_configs(spec: LatticeSpec, total: int) -> list[tuple[int, ...]]:
    """All site-occupation tuples with the given total, entries <= d-1."""
    configs = []
    for combo in itertools.product(range(spec.cutoff), repeat=spec.sites):
        if sum(combo) == total:
            configs.append(combo)
    return configs


def _config_index(config: Sequence[int], d: int) -> int:
    # site 1 is the rightmost (fastest) tensor index
    idx = 0
    for n in reversed(range(len(config))):
        idx = idx * d + config[n]
    return idx


def sector_block(op: np.ndarray, spec: LatticeSpec, total: int) -> np.ndarray:
    configs = occupation_configs(spec, total)
    idx = [_config_index(cfg, spec.cutoff) for cfg in configs]
    return op[np.ix_(idx, idx)]


def number_conservation_defect(spec: LatticeSpec, lam: complex) -> float:
    """Largest matrix element of tau(lam) connecting different sectors."""
    tau = transfer_operator(spec, lam)
    counts = np.array([sum(_index_config(i, spec)) for i in range(tau.shape[0])])
    mask = counts[:, None] != counts[None, :]
    return float(np.max(np.abs(tau[mask]))) if mask.any() else 0.0


def _index_config(index: int, spec: LatticeSpec) -> tuple[int, ...]:
    out = []
    for _ in range(spec.sites):
        out.append(index % spec.cutoff)
        index //= spec.cutoff
    return tuple(out)


# ----------------------------------------------------------------------
# Sector transfer matrix by auxiliary contraction (large M, small sectors)
# ----------------------------------------------------------------------

def tau_sector_matrix(spec: LatticeSpec, lam: complex,
                      configs: Sequence[Sequence[int]]) -> np.ndarray:
    """<c'| tau(lam) |c> for the listed occupation configs.

    Monodromy monomials are tensor products of one operator per site, so
    a matrix element is the trace of an ordered product of M scalar 2x2
    matrices M_site(n'_s, n_s); this needs no full-space construction
    and scales to long lattices.
    """
    d, step, c = spec.cutoff, spec.step, spec.c

    def site_matrix(np_, n):
        if np_ == n:
            diag = 1.0 - 0.5j * lam * step + 0.5 * c * step * n
            diag2 = 1.0 + 0.5j * lam * step + 0.5 * c * step * n
            return np.array([[diag, 0.0], [0.0, diag2]])
        if np_ == n + 1:
            val = -1j * step * math.sqrt(c) * math.sqrt((n + 1) / step) \
                * math.sqrt(1.0 + c * step * n / 4.0)
            return np.array([[0.0, val], [0.0, 0.0]])
        if np_ == n - 1:
            val = 1j * step * math.sqrt(c) \
                * math.sqrt(1.0 + c * step * (n - 1) / 4.0) \
                * math.sqrt(n / step)
            return np.array([[0.0, 0.0], [val, 0.0]])
        return None

    m = len(configs)
    out = np.zeros((m, m), dtype=complex)
    for i, cp in enumerate(configs):
        for j, cq in enumerate(configs):
            prod = np.eye(2, dtype=complex)
            ok = True
            # T = L(M) ... L(1): site M leftmost
            for site in reversed(range(spec.sites)):
                ms = site_matrix(cp[site], cq[site])
                if ms is None:
                    ok = False
                    break
                prod = prod @ ms
            if ok:
                out[i, j] = np.trace(prod)
    return out


# ----------------------------------------------------------------------
# R-matrix and exchange relation
# ----------------------------------------------------------------------

def r_matrix(lam: complex, mu: complex, c: float) -> np.ndarray:
    if abs(mu - lam) < 1e-12:
        raise RMatrixPole("coinciding spectral parameters")
    f = (mu - lam + 1j * c) / (mu - lam)
    g = 1j * c / (mu - lam)
    return np.array([
        [f, 0, 0, 0],
        [0, g, 1, 0],
        [0, 1, g, 0],
        [0, 0, 0, f],
    ], dtype=complex)


def _tensor_blocks(T1, T2):
    """(T1 (x) T2)_{(ab),(cd)} = T1_ac T2_bd with operator entries."""
    blocks = {}
    for a in range(2):
        for b in range(2):
            for cc in range(2):
                for dd in range(2):
                    blocks[(2 * a + b, 2 * cc + dd)] = T1[a][cc] @ T2[b][dd]
    return blocks


def _block_linear(R, X, side: str):
    """R acting on a 4x4 block matrix of operators, from the given side."""
    dim = X[(0, 0)].shape[0]
    out = {}
    for r in range(4):
        for s in range(4):
            acc = np.zeros((dim, dim), dtype=complex)
            for t in range(4):
                if side == "left":
                    if R[r, t] != 0:
                        acc = acc + R[r, t] * X[(t, s)]
                else:
                    if R[t, s] != 0:
                        acc = acc + X[(r, t)] * R[t, s]
            out[(r, s)] = acc
    return out


def _restricted_norm(blocks, spec: LatticeSpec, max_occ: int) -> float:
    keep = [i for i in range(spec.cutoff ** spec.sites)
            if max(_index_config(i, spec)) <= max_occ]
    if not keep:
        return 0.0
    worst = 0.0
    for blk in blocks.values():
        sub = blk[np.ix_(keep, keep)]
        worst = max(worst, float(np.linalg.norm(sub, 2)))
    return worst


def rtt_residual(lam: complex, mu: complex, spec: LatticeSpec) -> dict:
    """Exchange-relation defect for both tensor-leg orderings.

    Restricted to states with every occupation <= d-2, where truncation
    cannot clip the two-operator products.  Returns both residuals and
    the ordering that vanishes.
    """
    if abs(lam - mu) < 1e-12:
        raise RMatrixPole("coinciding spectral parameters")
    R = r_matrix(lam, mu, spec.c)
    Tl = monodromy(spec, lam)
    Tm = monodromy(spec, mu)
    lm = _tensor_blocks(Tl, Tm)
    ml = _tensor_blocks(Tm, Tl)
    max_occ = spec.cutoff - 2

    def defect(X, Y):
        lhs = _block_linear(R, X, "left")
        rhs = _block_linear(R, Y, "right")
        diff = {k: lhs[k] - rhs[k] for k in lhs}
        return _restricted_norm(diff, spec, max_occ)

    res_a = defect(lm, ml)   # R (T(lam) x T(mu)) = (T(mu) x T(lam)) R
    res_b = defect(ml, lm)
    return {
        "residual_lam_mu": res_a,
        "residual_mu_lam": res_b,
        "residual": min(res_a, res_b),
        "ordering": "lam_mu" if res_a <= res_b else "mu_lam",
    }


def tau_commutator_norm(lam: complex, mu: complex, spec: LatticeSpec,
                        n_sector: int, enforce_cutoff: bool = True) -> float:
    """|| [tau(lam), tau(mu)] || on the fixed-number sector block."""
    if enforce_cutoff and spec.cutoff < n_sector + 2:
        raise CutoffTooSmall(
            f"sector {n_sector} needs cutoff >= {n_sector + 2}, got {spec.cutoff}")
    configs = occupation_configs(spec, n_sector)
    if not configs:
        raise CutoffTooSmall("sector empty at this cutoff")
    ta = tau_sector_matrix(spec, lam, configs)
    tb = tau_sector_matrix(spec, mu, configs)
    return float(np.linalg.norm(ta @ tb - tb @ ta, 2))


def hermiticity_pairing_defect(spec: LatticeSpec, lam: float) -> float:
    """At real lam the diagonal monodromy entries are mutual adjoints."""
    T = monodromy(spec, float(lam))
    return float(np.linalg.norm(T[0][0].conj().T - T[1][1], 2))


# ----------------------------------------------------------------------
# Continuum limit
# ----------------------------------------------------------------------

def vacuum_eigenvalue(spec: LatticeSpec, lam: complex) -> complex:
    step = spec.step
    return ((1.0 - 0.5j * lam * step) ** spec.sites
            + (1.0 + 0.5j * lam * step) ** spec.sites)


def one_particle_eigenvalue(spec: LatticeSpec, lam: complex,
                            momentum_index: int) -> complex:
    """Transfer eigenvalue on the one-particle plane-wave state with
    lattice momentum 2 pi n / L.

    tau commutes with the cyclic shift, so Fourier modes diagonalize the
    one-particle block exactly; the eigenvalue is a Rayleigh quotient on
    the exact eigenvector.
    """
    M = spec.sites
    configs = [tuple(1 if s == m else 0 for s in range(M)) for m in range(M)]
    block = tau_sector_matrix(spec, lam, configs)
    vec = np.exp(2j * np.pi * momentum_index * np.arange(M) / M)
    val = (vec.conj() @ block @ vec) / (vec.conj() @ vec)
    # confirm vec is an eigenvector, not just a stationary direction
    resid = np.linalg.norm(block @ vec - val * vec) / np.linalg.norm(vec)
    if resid > 1e-8 * max(1.0, abs(val)):
        raise ArithmeticError(f"Fourier mode failed to diagonalize: {resid}")
    return complex(val)


def continuum_limit_rate(c: float, L: float, lam: complex,
                         site_counts: Sequence[int] = (8, 16, 32, 64),
                         momentum_index: int = 1,
                         cutoff: int = 3) -> dict:
    """Convergence of lattice transfer eigenvalues to the continuum ones.

    Vacuum sector: compares with 2 cos(lam L / 2).  One-particle sector:
    compares with the continuum eigenvalue at k = 2 pi n / L.  Both the
    raw eigenvalue error (first order in Delta, from the per-site modulus
    factor sqrt(1 + lam^2 Delta^2 / 4)) and the modulus-normalized error
    (second order) are fitted; the normalized order is the headline rate.
    """
    rows = []
    for M in site_counts:
        spec = LatticeSpec(M, cutoff, L / M, c)
        norm_factor = (1.0 + (lam * spec.step / 2.0) ** 2) ** (M / 2.0)
        vac = vacuum_eigenvalue(spec, lam)
        vac_target = theta(lam, [], c, L)
        one = one_particle_eigenvalue(spec, lam, momentum_index)
        k = 2.0 * np.pi * momentum_index / L
        one_target = theta(lam, [k], c, L)
        rows.append({
            "sites": M,
            "step": spec.step,
            "vacuum_error_raw": abs(vac - vac_target),
            "vacuum_error_normalized": abs(vac / norm_factor - vac_target),
            "one_particle_error_raw": abs(one - one_target),
            "one_particle_error_normalized": abs(one / norm_factor - one_target),
        })

    def fit(key):
        xs = np.log([r["step"] for r in rows])
        ys = np.log([max(r[key], 1e-300) for r in rows])
        return float(np.polyfit(xs, ys, 1)[0])

    return {
        "rows": rows,
        "order_vacuum_raw": fit("vacuum_error_raw"),
        "order_vacuum_normalized": fit("vacuum_error_normalized"),
        "order_one_particle_raw": fit("one_particle_error_raw"),
        "order_one_particle_normalized": fit("one_particle_error_normalized"),
    }


# ----------------------------------------------------------------------
# Ordering breakdown on the lattice
# ----------------------------------------------------------------------

def normal_ordering_breakdown(spec_two_sites: LatticeSpec, lam: complex) -> dict:
    """Compare the (1,1) monodromy entry of a two-site lattice against
    the version whose square-root density factors are expanded and
    ordered by the classical (commutator-dropping) rule.

    For a single site that entry contains only the already-ordered
    psi^dag psi, so the difference vanishes identically; for two sites
    the cross term (creator rho)(rho annihilator) picks up the ordering
    defect of rho, of relative size (c Delta)^2.
    """
    spec = spec_two_sites
    if spec.sites != 2:
        raise ValueError("the demonstration is defined on two sites")
    if spec.cutoff < 3:
        raise ValueError("need cutoff >= 3 so an occupation >= 2 exists")

    one_site = LatticeSpec(1, spec.cutoff, spec.step, spec.c)
    t1 = monodromy(one_site, lam)[0][0]
    t1_naive = monodromy(one_site, lam,
                         rho_override=density_sqrt_naive_ordered(
                             spec.cutoff, spec.step, spec.c))[0][0]
    m1_diff = float(np.linalg.norm(t1 - t1_naive, 2))

    exact_entry = monodromy(spec, lam)[0][0]
    naive_entry = monodromy(spec, lam,
                            rho_override=density_sqrt_naive_ordered(
                                spec.cutoff, spec.step, spec.c))[0][0]
    # scale of the ordering-sensitive cross term: B(2) C(1)
    blocks = site_l_blocks(spec, lam)
    cross = _embed(blocks[0][1], 2, spec) @ _embed(blocks[1][0], 1, spec)
    cross_scale = float(np.linalg.norm(cross, 2))
    diff = float(np.linalg.norm(exact_entry - naive_entry, 2))
    return {
        "one_site_difference": m1_diff,
        "two_site_difference": diff,
        "relative_difference": diff / cross_scale,
    }


def ordering_defect_rate(c: float, cutoff: int, steps: Sequence[float],
                         lam: complex) -> dict:
    """Fit of the relative ordering defect against the lattice step."""
    rows = []
    for step in steps:
        rep = normal_ordering_breakdown(LatticeSpec(2, cutoff, step, c), lam)
        rows.append((step, rep["relative_difference"]))
    xs = np.log([r[0] for r in rows])
    ys = np.log([r[1] for r in rows])
    return {"rows": rows, "order": float(np.polyfit(xs, ys, 1)[0])}
