"""Exact algebra of plane-wave sums on ordered regions.

The N-particle eigenfunctions of the delta-interacting Bose gas are, on
the fundamental region x_1 < ... < x_N, finite sums of plane waves

    chi(x) = sum_P (-1)^P  prod_{j>k} (l_{Pj} - l_{Pk} - i c)  exp(i sum_n x_n l_{Pn}),

where P runs over permutations of the rapidities l_1..l_N and the sign
inside the pair product is the one valid on the fundamental region.
Everywhere else the wavefunction is the symmetric extension (sort the
point, evaluate the canonical form).

``ExpPoly`` stores such sums exactly: a term is (coefficient, frequency
vector) meaning coeff * exp(i * sum_n freq_n * x_n).  With rational
rapidities and coupling every operation here (derivatives, boundary
restrictions, linear combinations) closes over complex-rational
coefficients, so eigenvalue and boundary identities are checked as exact
equalities with zero rather than against tolerances.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateRapidities, SizeLimit
from .exact import ExactComplex, as_scalar, exact, scalar_is_zero

MAX_PARTICLES_DEFAULT = 8

# Relative tolerance used to consolidate float-mode frequency vectors.
FLOAT_MERGE_RTOL = 1e-12


def _coerce_freq(value, exact_mode: bool):
    if exact_mode:
        return ExactComplex.coerce(value)
    if isinstance(value, ExactComplex):
        return complex(value)
    return complex(value)


@dataclass(frozen=True)
class ExpPoly:
    """Finite sum of complex plane waves over an ordered region.

    terms: tuple of (coeff, freq) with freq a tuple of per-variable
    frequencies; a term means  coeff * exp(i * freq . x).  Invariants:
    no two terms share a frequency vector and no coefficient is zero
    (exact mode) / exactly 0.0 (float mode).
    """

    num_vars: int
    terms: tuple
    exact: bool

    # -- construction --------------------------------------------------
    @staticmethod
    def from_terms(num_vars: int, terms: Iterable, exact_mode: bool) -> "ExpPoly":
        normalized = []
        for coeff, freq in terms:
            freq = tuple(_coerce_freq(f, exact_mode) for f in freq)
            if len(freq) != num_vars:
                raise ValueError("frequency vector length mismatch")
            normalized.append((as_scalar(coeff, exact_mode), freq))
        return ExpPoly(num_vars, (), exact_mode)._merged(normalized)

    @staticmethod
    def zero(num_vars: int, exact_mode: bool = True) -> "ExpPoly":
        return ExpPoly(num_vars, (), exact_mode)

    def _merged(self, raw_terms) -> "ExpPoly":
        """Combine terms with equal frequency vectors and drop zeros."""
        acc: dict = {}
        keys: dict = {}
        for coeff, freq in raw_terms:
            if freq in acc:
                acc[freq] = acc[freq] + coeff
            else:
                acc[freq] = coeff
                keys[freq] = freq
        if not self.exact:
            acc = self._consolidate_float(acc)
        return ExpPoly(self.num_vars, self._sorted_nonzero(acc), self.exact)

    def _sorted_nonzero(self, acc: dict) -> tuple:
        items = []
        for freq, coeff in acc.items():
            if scalar_is_zero(coeff):
                continue
            items.append((coeff, freq))
        items.sort(key=lambda t: _freq_sort_key(t[1]))
        return tuple(items)

    def _consolidate_float(self, acc: dict) -> dict:
        """Merge float frequency vectors that agree to relative 1e-12."""
        if len(acc) < 2:
            return acc
        entries = sorted(acc.items(), key=lambda kv: _freq_sort_key(kv[0]))
        scale = max(
            (max((abs(f) for f in freq), default=0.0) for freq, _ in entries),
            default=0.0,
        )
        tol = FLOAT_MERGE_RTOL * max(scale, 1.0)
        out: dict = {}
        cur_freq, cur_coeff = entries[0]
        for freq, coeff in entries[1:]:
            if all(abs(a - b) <= tol for a, b in zip(freq, cur_freq)):
                cur_coeff = cur_coeff + coeff
            else:
                out[cur_freq] = out.get(cur_freq, 0) + cur_coeff
                cur_freq, cur_coeff = freq, coeff
        out[cur_freq] = out.get(cur_freq, 0) + cur_coeff
        return out

    # -- basic algebra --------------------------------------------------
    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        self._check_compatible(other)
        return self._merged(list(self.terms) + list(other.terms))

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __neg__(self) -> "ExpPoly":
        return ExpPoly(self.num_vars,
                       tuple((-c, f) for c, f in self.terms), self.exact)

    def scale(self, factor) -> "ExpPoly":
        factor = as_scalar(factor, self.exact)
        if scalar_is_zero(factor):
            return ExpPoly.zero(self.num_vars, self.exact)
        return ExpPoly(self.num_vars,
                       tuple((c * factor, f) for c, f in self.terms), self.exact)

    def weighted(self, weight: Callable) -> "ExpPoly":
        """Multiply each term's coefficient by weight(freq).

        This realizes constant-coefficient differential operators: a
        symmetric polynomial p in the per-variable derivatives acts on a
        plane wave with frequency vector w as multiplication by p(i*w).
        """
        out = []
        for coeff, freq in self.terms:
            out.append((coeff * weight(freq), freq))
        return self._merged(out)

    def mul(self, other: "ExpPoly") -> "ExpPoly":
        """Pointwise product; frequency vectors add termwise."""
        self._check_compatible(other)
        out = []
        for c1, f1 in self.terms:
            for c2, f2 in other.terms:
                out.append((c1 * c2, tuple(a + b for a, b in zip(f1, f2))))
        return self._merged(out)

    def conj(self) -> "ExpPoly":
        """Complex conjugate; e^{i w x} maps to e^{-i conj(w) x}."""
        if self.exact:
            return ExpPoly(self.num_vars,
                           tuple((c.conjugate(), tuple(-f.conjugate() for f in freq))
                                 for c, freq in self.terms), True)
        return ExpPoly(self.num_vars,
                       tuple((np.conj(c), tuple(-np.conj(f) for f in freq))
                             for c, freq in self.terms), False)

    def _check_compatible(self, other: "ExpPoly"):
        if self.num_vars != other.num_vars or self.exact != other.exact:
            raise ValueError("incompatible plane-wave sums")

    # -- calculus -------------------------------------------------------
    def differentiate(self, multi_index: Sequence[int]) -> "ExpPoly":
        """Apply prod_n (d/dx_n)^{m_n}; multiplies each coeff by prod (i w_n)^{m_n}."""
        if len(multi_index) != self.num_vars:
            raise ValueError("multi-index length mismatch")
        i_unit = exact(0, 1) if self.exact else 1j
        out = []
        for coeff, freq in self.terms:
            for w, m in zip(freq, multi_index):
                for _ in range(m):
                    coeff = coeff * (i_unit * w)
            out.append((coeff, freq))
        return self._merged(out)

    def substitute_equal(self, i: int, j: int) -> "ExpPoly":
        """Set x_i := x_j (1-based, i != j); frequencies merge, variable i drops.

        Exact cancellations yield the empty sum, which is how every
        boundary-condition check in this package reports success.
        """
        if i == j or not (1 <= i <= self.num_vars) or not (1 <= j <= self.num_vars):
            raise ValueError("bad variable indices")
        ii, jj = i - 1, j - 1
        out = []
        for coeff, freq in self.terms:
            merged = list(freq)
            merged[jj] = merged[jj] + merged[ii]
            del merged[ii]
            out.append((coeff, tuple(merged)))
        return ExpPoly(self.num_vars - 1, (), self.exact)._merged(out)

    def restrict_to_boundary(self, j: int) -> "ExpPoly":
        """Substitute x_{j+1} := x_j (1 <= j < N), the one-sided limit
        taken from the fundamental region."""
        if not (1 <= j < self.num_vars):
            raise ValueError("boundary index out of range")
        return self.substitute_equal(j + 1, j)

    def permute_vars(self, perm: Sequence[int]) -> "ExpPoly":
        """Relabel variables: new variable r carries old frequency freq[perm[r]]."""
        if sorted(perm) != list(range(self.num_vars)):
            raise ValueError("not a permutation")
        out = [(c, tuple(freq[p] for p in perm)) for c, freq in self.terms]
        return self._merged(out)

    # -- predicates and evaluation ---------------------------------------
    def is_empty(self, abs_tol: float = 0.0) -> bool:
        if self.exact:
            return not self.terms
        return self.max_coeff() <= abs_tol

    def max_coeff(self) -> float:
        return max((abs(complex(c)) for c, _ in self.terms), default=0.0)

    def term_count(self) -> int:
        return len(self.terms)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the sum at one point or a batch of points (rows)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.num_vars:
            raise ValueError("point dimension mismatch")
        if not self.terms:
            vals = np.zeros(pts.shape[0], dtype=complex)
        else:
            freqs = np.array([[complex(w) for w in f] for _, f in self.terms],
                             dtype=complex)
            coeffs = np.array([complex(c) for c, _ in self.terms], dtype=complex)
            vals = np.exp(1j * pts @ freqs.T) @ coeffs
        if np.ndim(points) == 1:
            return vals[0]
        return vals

    def to_float(self) -> "ExpPoly":
        if not self.exact:
            return self
        return ExpPoly.from_terms(
            self.num_vars,
            [(complex(c), tuple(complex(w) for w in f)) for c, f in self.terms],
            exact_mode=False)

    # -- serialization ----------------------------------------------------
    def to_json_dict(self) -> dict:
        return {"n": self.num_vars,
                "terms": [{"re": _num_json(_re(c, self.exact)),
                           "im": _num_json(_im(c, self.exact)),
                           "freq": [_freq_json(w, self.exact) for w in f]}
                          for c, f in self.terms]}

    @staticmethod
    def from_json_dict(doc: dict, exact_mode: bool | None = None) -> "ExpPoly":
        terms = []
        saw_rational = False
        for t in doc["terms"]:
            re, r1 = _num_parse(t["re"])
            im, r2 = _num_parse(t["im"])
            freq = []
            rationals = [r1, r2]
            for w in t["freq"]:
                wv, r = _freq_parse(w)
                freq.append(wv)
                rationals.append(r)
            saw_rational = saw_rational or any(rationals)
            terms.append((re, im, tuple(freq)))
        if exact_mode is None:
            exact_mode = saw_rational
        built = []
        for re, im, freq in terms:
            coeff = exact(re, im) if exact_mode else complex(float(re), float(im))
            if exact_mode:
                freq = tuple(ExactComplex.coerce(w) if not isinstance(w, ExactComplex)
                             else w for w in freq)
            else:
                freq = tuple(complex(w) for w in freq)
            built.append((coeff, freq))
        return ExpPoly.from_terms(doc["n"], built, exact_mode)

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"ExpPoly(n={self.num_vars}, terms={len(self.terms)}, {mode})"


def _re(c, exact_mode):
    return c.re if exact_mode else complex(c).real


def _im(c, exact_mode):
    return c.im if exact_mode else complex(c).imag


def _num_json(v):
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    return float(v)


def _freq_json(w, exact_mode):
    if exact_mode:
        if w.im == 0:
            return _num_json(w.re)
        return {"re": _num_json(w.re), "im": _num_json(w.im)}
    wc = complex(w)
    if wc.imag == 0.0:
        return wc.real
    return {"re": wc.real, "im": wc.imag}


def _num_parse(v):
    if isinstance(v, dict):
        return Fraction(v["num"], v["den"]), True
    return v, False


def _freq_parse(w):
    if isinstance(w, dict):
        if "num" in w:
            return Fraction(w["num"], w["den"]), True
        re, r1 = _num_parse(w["re"])
        im, r2 = _num_parse(w["im"])
        if r1 or r2:
            return exact(re, im), True
        return complex(re, im), False
    return w, False


def _freq_sort_key(freq):
    key = []
    for w in freq:
        if isinstance(w, ExactComplex):
            key.append((float(w.re), float(w.im)))
        else:
            wc = complex(w)
            key.append((wc.real, wc.imag))
    return tuple(key)


# ----------------------------------------------------------------------
# Bethe wavefunctions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Coupling:
    """Repulsive contact-interaction strength, dimension 1/length."""

    c: Fraction | float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("coupling must be positive (repulsive regime only)")

    @property
    def exact(self) -> bool:
        return isinstance(self.c, (int, Fraction))


@dataclass(frozen=True)
class RapiditySet:
    """Sorted, pairwise-distinct rapidities."""

    values: tuple

    @staticmethod
    def of(values: Sequence, exact_mode: bool | None = None) -> "RapiditySet":
        vals = list(values)
        if exact_mode is None:
            exact_mode = all(isinstance(v, (int, Fraction)) for v in vals)
        vals = [Fraction(v) if exact_mode else float(v) for v in vals]
        vals.sort()
        if any(a == b for a, b in zip(vals, vals[1:])):
            raise DegenerateRapidities(f"coincident rapidities in {vals}")
        return RapiditySet(tuple(vals))

    def __len__(self):
        return len(self.values)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values)


@dataclass(frozen=True)
class BetheWavefunction:
    """Rapidities, coupling and the canonical-region plane-wave sum."""

    rapidities: RapiditySet
    coupling: Coupling
    canonical: ExpPoly

    @property
    def n(self) -> int:
        return len(self.rapidities)

    @property
    def exact(self) -> bool:
        return self.canonical.exact

    def evaluate(self, point: Sequence[float]) -> complex:
        """Symmetric extension: sort the point, evaluate the canonical
        form.  Coincident coordinates return the common one-sided limit."""
        pt = np.sort(np.asarray(point, dtype=float))
        return complex(self.canonical.evaluate(pt))

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        pts = np.sort(np.asarray(points, dtype=float), axis=1)
        return self.canonical.evaluate(pts)

    def region_form(self, perm: Sequence[int]) -> ExpPoly:
        """Plane-wave sum valid on the region x_{perm[0]} < ... < x_{perm[N-1]}.

        By symmetry of the wavefunction this is the canonical form with
        its variables relabelled through the sorting permutation.
        """
        n = self.n
        if sorted(perm) != list(range(n)):
            raise ValueError("not a permutation")
        rank = [0] * n
        for pos, var in enumerate(perm):
            rank[var] = pos
        # variable v of the extension carries the canonical frequency of
        # its rank in the ordering
        out = [(c, tuple(freq[rank[v]] for v in range(n)))
               for c, freq in self.canonical.terms]
        return ExpPoly(n, (), self.canonical.exact)._merged(out)

    def to_json_dict(self) -> dict:
        doc = self.canonical.to_json_dict()
        doc["rapidities"] = [_num_json(v) for v in self.rapidities.values]
        doc["coupling"] = _num_json(self.coupling.c)
        return doc


def build_bethe(rapidities: RapiditySet, coupling: Coupling,
                max_particles: int = MAX_PARTICLES_DEFAULT) -> BetheWavefunction:
    """Construct the canonical-region wavefunction for the given rapidities.

    On x_1 < ... < x_N each permutation P contributes
    (-1)^P prod_{j>k} (l_{Pj} - l_{Pk} - i c) exp(i sum_n x_n l_{Pn}).
    """
    n = len(rapidities)
    if n > max_particles:
        raise SizeLimit(f"N={n} exceeds the configured maximum {max_particles}")
    exact_mode = rapidities.exact and coupling.exact
    lam = list(rapidities.values)
    c = coupling.c
    if exact_mode:
        minus_ic = exact(0, -c)
    else:
        minus_ic = complex(0.0, -float(c))
    terms = []
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        coeff = as_scalar(sign, exact_mode)
        for j in range(n):
            for k in range(j):
                # sgn(x_j - x_k) = +1 on the fundamental region for j > k
                diff = lam[perm[j]] - lam[perm[k]]
                coeff = coeff * (as_scalar(diff, exact_mode) + minus_ic)
        freq = tuple(lam[perm[m]] for m in range(n))
        terms.append((coeff, freq))
    poly = ExpPoly.from_terms(n, terms, exact_mode)
    return BetheWavefunction(rapidities, coupling, poly)


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def symmetrized_plane_wave(rapidities: RapiditySet) -> ExpPoly:
    """Plain symmetrized plane wave (all coefficients 1).

    Continuous and symmetric but not an eigenfunction of the interacting
    charges; used as the negative control in boundary-condition tests.
    """
    n = len(rapidities)
    exact_mode = rapidities.exact
    lam = list(rapidities.values)
    terms = [(as_scalar(1, exact_mode), tuple(lam[p] for p in perm))
             for perm in itertools.permutations(range(n))]
    return ExpPoly.from_terms(n, terms, exact_mode)


def dumps(obj) -> str:
    """JSON text for ExpPoly / BetheWavefunction documents."""
    return json.dumps(obj.to_json_dict(), sort_keys=True)
