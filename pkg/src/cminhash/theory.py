"""Exact evaluation of the sketch-variance formulas.

Three layers:

* per-location-vector quantities: offset set counts, the joint collision
  probability ``theta``, and the location-dependent variance of the
  no-preshuffle circulant estimator;
* shuffle-averaged quantities: the joint pmf of the offset-1 set sizes
  under a random initial shuffle, its expectation ``e_tilde``, and the
  variance of the shuffled circulant estimator;
* derived diagnostics: the classical-estimator variance and the variance
  ratio with its built-in constancy self-check.

The shuffled variance sums pair terms over all shift offsets d = 1..K-1.
Offsets coprime to D are relabelings of offset 1, so their expected pair
term is exactly ``e_tilde``; offsets with gcd(d, D) = g > 1 split the
index circle into g cycles and need a separate expectation, computed
exactly by ``shift_class_collision_expectation``. Skipping that split and
using ``e_tilde`` everywhere is only an approximation for composite D
(wrong in the fourth decimal at D=8, detectable only below 1e-8 by
D=16); the enumeration oracles certify the corrected sum exactly.

Two numeric paths everywhere: LOG_SPACE (log-factorial tables, max-term
rescaling; fine up to D ~ 1e4 for the pmf machinery) and EXACT_RATIONAL
(big-integer numerators over a common denominator; meant for D <= 64,
used to certify the log path).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .core import (LocationVector, Scheme, SelfCheckError, SetSizes, Symbol,
                   ValidationError)

__all__ = [
    "Method", "VarianceReport", "PmfEntry", "STerm",
    "count_sets", "theta", "variance_mh", "variance_0pi",
    "joint_pmf", "e_tilde", "shift_class_collision_expectation",
    "variance_sigma_pi", "variance_ratio", "report_csv_row",
    "REPORT_CSV_HEADER",
]


class Method(enum.Enum):
    LOG_SPACE = "log"
    EXACT_RATIONAL = "exact"


def _as_method(method) -> Method:
    if isinstance(method, Method):
        return method
    try:
        return Method(method)
    except ValueError:
        raise ValidationError(f"unknown method {method!r}") from None


def comb0(n: int, k: int) -> int:
    """Binomial with zero-extension: 0 whenever k < 0, k > n, or n < 0."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True, slots=True)
class STerm:
    s: int
    n1: int
    n2: int
    n3: int
    n4: int
    probability: "Fraction | float"


@dataclass(frozen=True, slots=True)
class PmfEntry:
    l0: int
    l1: int
    l2: int
    g0: int
    g1: int
    probability: "Fraction | float"
    s_terms: "tuple[STerm, ...] | None" = None


@dataclass(frozen=True, slots=True)
class VarianceReport:
    scheme: Scheme
    dim: int
    union_size: int
    intersection: int
    k: int
    variance: float
    method: Method
    e_tilde: "float | None" = None
    theta_series: "tuple[float, ...] | None" = None
    variance_exact: "Fraction | None" = None


REPORT_CSV_HEADER = "scheme,D,f,a,K,variance,e_tilde,method"


def report_csv_row(r: VarianceReport) -> str:
    et = "" if r.e_tilde is None else repr(r.e_tilde)
    return (f"{r.scheme.value},{r.dim},{r.union_size},{r.intersection},"
            f"{r.k},{r.variance!r},{et},{r.method.value}")


# ---------------------------------------------------------------------------
# per-location-vector quantities
# ---------------------------------------------------------------------------

def count_sets(x: LocationVector, delta: int) -> SetSizes:
    """Classify the D circular pairs (i, i+delta) by their symbol pair."""
    D = x.dim
    if not 1 <= delta <= D - 1:
        raise ValidationError(f"delta must be in [1, {D - 1}]")
    c = [[0] * 3 for _ in range(3)]
    syms = x.symbols
    for i in range(D):
        c[syms[i]][syms[(i + delta) % D]] += 1
    return SetSizes(
        l0=c[Symbol.MATCH][Symbol.MATCH],
        l1=c[Symbol.MATCH][Symbol.MISMATCH],
        l2=c[Symbol.MATCH][Symbol.BOTH_ZERO],
        g0=c[Symbol.BOTH_ZERO][Symbol.MATCH],
        g1=c[Symbol.BOTH_ZERO][Symbol.MISMATCH],
        g2=c[Symbol.BOTH_ZERO][Symbol.BOTH_ZERO],
        h0=c[Symbol.MISMATCH][Symbol.MATCH],
        h1=c[Symbol.MISMATCH][Symbol.MISMATCH],
        h2=c[Symbol.MISMATCH][Symbol.BOTH_ZERO],
        delta=delta,
    )


def theta(sets: SetSizes, f: int, a: int) -> Fraction:
    """Joint collision probability of two hashes whose shifts differ by
    sets.delta: (l0 + (g0 + l2) J) / (f + g0 + g1) with J = a/f."""
    if f <= 0:
        raise ValidationError("theta needs f > 0")
    if sets.match_count != a or sets.match_count + sets.mismatch_count != f:
        raise ValidationError("set sizes are inconsistent with (f, a)")
    return Fraction(sets.l0 * f + (sets.g0 + sets.l2) * a,
                    f * (f + sets.g0 + sets.g1))


def variance_mh(j: float, k: int) -> float:
    """Classical estimator variance J(1-J)/K."""
    if not 0.0 <= j <= 1.0:
        raise ValidationError("J must lie in [0, 1]")
    if k < 1:
        raise ValidationError("K must be >= 1")
    return j * (1.0 - j) / k


def variance_0pi(x: LocationVector, k: int) -> VarianceReport:
    """Location-dependent variance of the no-preshuffle circulant
    estimator: J/K + (2/K^2) sum_{d=1}^{K-1} (K-d) Theta_d - J^2."""
    D = x.dim
    if not 1 <= k <= D:
        raise ValidationError(f"K must be in [1, {D}]")
    summary = x.summary()
    if not summary.jaccard_defined:
        raise ValidationError("degenerate pair: f = 0")
    f, a = summary.union_size, summary.intersection
    J = Fraction(a, f)
    series = [theta(count_sets(x, d), f, a) for d in range(1, k)]
    acc = sum(((k - d) * th for d, th in enumerate(series, start=1)),
              Fraction(0))
    var = J / k + 2 * acc / (k * k) - J * J
    return VarianceReport(
        scheme=Scheme.CMINHASH_0_PI, dim=D, union_size=f, intersection=a,
        k=k, variance=float(var), method=Method.EXACT_RATIONAL,
        theta_series=tuple(float(t) for t in series), variance_exact=var,
    )


# ---------------------------------------------------------------------------
# joint pmf of the offset-1 set sizes under a random shuffle
# ---------------------------------------------------------------------------

def _check_pmf_args(D: int, f: int, a: int) -> None:
    if not 0 < a < f <= D:
        raise ValidationError("need 0 < a < f <= D")


def _pmf_denominator(D: int, f: int, a: int) -> int:
    return comb0(D - 1, a) * comb0(D - a - 1, D - f - 1)


def _pmf_boxes_exact(D: int, f: int, a: int):
    """Yield (l0, l1, l2, g0, g1, numerator, s_terms) with the numerator an
    integer over the common denominator _pmf_denominator."""
    s_lo = max(0, D - 2 * f + a)
    for l0 in range(a + 1):
        for l2 in range(a - l0 + 1):
            l1 = a - l0 - l2
            c_place = comb0(a - 1, a - l1 - l2)
            for g0 in range(min(a, D - f) + 1):
                for g1 in range(min(f - a, D - f) + 1):
                    num = 0
                    terms = []
                    for s in range(s_lo, D - f):
                        n2 = D - f - s - g1
                        n1 = g0 - n2
                        n3 = l2 - g0 + n2
                        n4 = l1 - n2
                        t = (comb0(s, n1) * comb0(D - f - s, n2)
                             * comb0(D - f - s, n3)
                             * comb0(f - a - (D - f - s), n4)
                             * c_place
                             * comb0(D - f, s)
                             * comb0(f - a - 1, D - f - s - 1))
                        if t:
                            num += t
                            terms.append((s, n1, n2, n3, n4, t))
                    if num:
                        yield l0, l1, l2, g0, g1, num, terms


def _log_binom(lf: np.ndarray, n: np.ndarray, k: np.ndarray) -> np.ndarray:
    """log C(n, k) with -inf zero-extension."""
    valid = (k >= 0) & (n >= 0) & (k <= n)
    ns = np.where(valid, n, 0)
    ks = np.where(valid, k, 0)
    out = lf[ns] - lf[ks] - lf[ns - ks]
    return np.where(valid, out, -np.inf)


def _log_factorials(n: int) -> np.ndarray:
    return gammaln(np.arange(n + 1, dtype=np.float64) + 1.0)


def joint_pmf(D: int, f: int, a: int, method="log",
              with_s_terms: bool = False) -> list[PmfEntry]:
    """Joint distribution of (l0, l1, l2, g0, g1) at offset 1 under a
    uniform shuffle; zero-probability boxes are dropped."""
    method = _as_method(method)
    _check_pmf_args(D, f, a)
    if D == f:
        raise ValidationError("D = f has no both-zero symbols; "
                              "e_tilde handles it in closed form")
    if method is Method.EXACT_RATIONAL or with_s_terms:
        den = _pmf_denominator(D, f, a)
        exact = method is Method.EXACT_RATIONAL
        out = []
        for l0, l1, l2, g0, g1, num, terms in _pmf_boxes_exact(D, f, a):
            sterms = None
            if with_s_terms:
                sterms = tuple(
                    STerm(s, n1, n2, n3, n4,
                          Fraction(t, den) if exact else t / den)
                    for (s, n1, n2, n3, n4, t) in terms)
            p = Fraction(num, den) if exact else num / den
            out.append(PmfEntry(l0, l1, l2, g0, g1, p, sterms))
        return out
    probs = _pmf_grid_log(D, f, a)
    out = []
    for l0 in range(a + 1):
        for l2 in range(a - l0 + 1):
            for g0 in range(probs.shape[2]):
                for g1 in range(probs.shape[3]):
                    p = float(probs[l0, l2, g0, g1])
                    if p > 0.0:
                        out.append(PmfEntry(l0, a - l0 - l2, l2, g0, g1, p))
    return out


def _pmf_grid_log(D: int, f: int, a: int) -> np.ndarray:
    """Box probabilities as a (l0, l2, g0, g1) float array, log path."""
    lf = _log_factorials(D + 1)
    s_lo = max(0, D - 2 * f + a)
    s = np.arange(s_lo, D - f, dtype=np.int64)
    l0 = np.arange(a + 1, dtype=np.int64)
    l2 = np.arange(a + 1, dtype=np.int64)
    g1 = np.arange(min(f - a, D - f) + 1, dtype=np.int64)
    n_g0 = min(a, D - f) + 1
    log_den = (_log_binom(lf, np.int64(D - 1), np.int64(a))
               + _log_binom(lf, np.int64(D - a - 1), np.int64(D - f - 1)))
    out = np.zeros((a + 1, a + 1, n_g0, g1.size))
    L0 = l0[:, None, None, None]
    L2 = l2[None, :, None, None]
    G1 = g1[None, None, :, None]
    S = s[None, None, None, :]
    l1 = a - L0 - L2
    n2 = D - f - S - G1
    n4 = l1 - n2
    step1 = (_log_binom(lf, np.full_like(S, D - f), S)
             + _log_binom(lf, np.full_like(S, f - a - 1), D - f - S - 1))
    c_place = _log_binom(lf, np.full_like(l1, a - 1), a - l1 - L2)
    for g0 in range(n_g0):
        n1 = g0 - n2
        n3 = L2 - g0 + n2
        term = (step1 + c_place
                + _log_binom(lf, S, n1)
                + _log_binom(lf, D - f - S, n2)
                + _log_binom(lf, D - f - S, n3)
                + _log_binom(lf, f - a - (D - f - S), n4)
                - log_den)
        term = np.where(l1 >= 0, term, -np.inf)
        m = term.max()
        if m == -np.inf:
            continue
        box = np.exp(term - m).sum(axis=3) * math.exp(m)
        out[:, :, g0, :] = box
    return out


# ---------------------------------------------------------------------------
# e_tilde: shuffle-averaged pair-collision expectation at offset 1
# ---------------------------------------------------------------------------

def _e_tilde_closed_form_dim_eq_f(f: int, a: int) -> Fraction:
    return Fraction(a * (a - 1), f * (f - 1))


@lru_cache(maxsize=None)
def _e_tilde_exact(D: int, f: int, a: int) -> Fraction:
    if D == f:
        return _e_tilde_closed_form_dim_eq_f(f, a)
    den = _pmf_denominator(D, f, a)
    # group integer numerators by m = g0 + g1 so the weight denominator
    # f * (f + m) divides once per group
    groups: dict[int, int] = {}
    for l0, l1, l2, g0, g1, num, _ in _pmf_boxes_exact(D, f, a):
        w = l0 * f + a * (g0 + l2)
        if w:
            m = g0 + g1
            groups[m] = groups.get(m, 0) + num * w
    total = Fraction(0)
    for m, acc in groups.items():
        total += Fraction(acc, den * f * (f + m))
    return total


@lru_cache(maxsize=None)
def _e_tilde_log(D: int, f: int, a: int) -> float:
    if D == f:
        return a * (a - 1) / (f * (f - 1))
    # the l0 axis is collapsed by a weighted Vandermonde identity:
    #   sum_l0 C(a-1, l0) C(L, M-l0) (l0 f + a(g0+l2))
    #     = f (a-1) C(L+a-2, M-1) + a (g0+l2) C(L+a-1, M)
    # valid because s >= D-2f+a keeps L = f-a-(D-f-s) non-negative
    lf = _log_factorials(2 * D + 2)
    s_lo = max(0, D - 2 * f + a)
    s = np.arange(s_lo, D - f, dtype=np.int64)
    l2 = np.arange(a + 1, dtype=np.int64)
    g1 = np.arange(min(f - a, D - f) + 1, dtype=np.int64)
    log_den = (_log_binom(lf, np.int64(D - 1), np.int64(a))
               + _log_binom(lf, np.int64(D - a - 1), np.int64(D - f - 1)))
    L2 = l2[:, None, None]
    G1 = g1[None, :, None]
    S = s[None, None, :]
    u = D - f - S
    n2 = u - G1
    Lrow = f - a - u
    M = a - L2 - n2
    step1 = (_log_binom(lf, np.full_like(S, D - f), S)
             + _log_binom(lf, np.full_like(S, f - a - 1), u - 1))
    total = 0.0
    log_f = math.log(f)
    for g0 in range(min(a, D - f) + 1):
        n1 = g0 - n2
        n3 = L2 - g0 + n2
        base = (step1
                + _log_binom(lf, S, n1)
                + _log_binom(lf, u, n2)
                + _log_binom(lf, u, n3)
                - log_den)
        t1 = (_log_binom(lf, Lrow + a - 2, M - 1)
              + (math.log(f * (a - 1)) if a > 1 else -np.inf))
        coef2 = np.asarray(a * (g0 + L2), dtype=np.float64)
        with np.errstate(divide="ignore"):
            t2 = _log_binom(lf, Lrow + a - 1, M) + np.log(coef2)
        wlog = np.logaddexp(t1, t2)
        term = base + wlog - log_f - np.log(np.float64(f + g0 + G1))
        m = term.max()
        if m == -np.inf:
            continue
        total += math.exp(m) * float(np.exp(term - m).sum())
    return total


def e_tilde(D: int, f: int, a: int, method="log"):
    """Expected pair-collision probability at offset 1 under a random
    shuffle; strictly increasing in D toward J^2, equal to
    a(a-1)/(f(f-1)) when D = f."""
    method = _as_method(method)
    _check_pmf_args(D, f, a)
    if method is Method.EXACT_RATIONAL:
        return _e_tilde_exact(D, f, a)
    return _e_tilde_log(D, f, a)


# ---------------------------------------------------------------------------
# shift classes with gcd(d, D) = g > 1
# ---------------------------------------------------------------------------
#
# For an offset d, the circle splits into g = gcd(d, D) cycles of length
# L = D/g. theta = (l0 f + (g0+l2) a) / (f (D - g2)) and, conditioned on
# the both-zero pattern, the match placement contributes a(a-1)/(f(f-1))
# for a (non-zero, non-zero) marked pair and a/f for a mixed one.  So only
# the joint law of (marked-edge zero indicators, total zero-zero edge
# count) matters, a pure binary placement problem solved by run counting.

@lru_cache(maxsize=None)
def _cycle_table(L: int) -> tuple[tuple[int, int, int], ...]:
    """(z, j, count): ways to pick z zero-positions on an L-cycle with
    exactly j zero-zero edges."""
    if L == 2:
        return ((0, 0, 1), (1, 0, 2), (2, 2, 1))
    rows = [(0, 0, 1), (L, L, 1)]
    for z in range(1, L):
        for t in range(1, min(z, L - z) + 1):
            c = L * comb0(z - 1, t - 1) * comb0(L - z - 1, t - 1)
            rows.append((z, z - t, c // t))
    return tuple(rows)


@lru_cache(maxsize=None)
def _marked_cycle_table(L: int) -> tuple[tuple[int, int, int, int, int], ...]:
    """(e1, e2, z, j, count) for an L-cycle carrying one marked directed
    edge (u -> u'); e1, e2 are the zero-indicators of u, u'."""
    if L == 2:
        return tuple((e1, e2, e1 + e2, 2 * e1 * e2, 1)
                     for e1 in (0, 1) for e2 in (0, 1))
    n = L - 2
    # interior DP indexed by starting "last" value (= e2); cycle order is
    # u' -> y_1 -> ... -> y_n -> u
    finals = {}
    for start in (0, 1):
        dp = {(0, 0, start): 1}
        for _ in range(n):
            ndp = {}
            for (z, j, last), c in dp.items():
                for y in (0, 1):
                    key = (z + y, j + (last & y), y)
                    ndp[key] = ndp.get(key, 0) + c
            dp = ndp
        finals[start] = dp
    rows = []
    for e1 in (0, 1):
        for e2 in (0, 1):
            agg = {}
            for (z, j, last), c in finals[e2].items():
                key = (e1 + e2 + z, j + e1 * e2 + (last & e1))
                agg[key] = agg.get(key, 0) + c
            rows.extend((e1, e2, z, j, c) for (z, j), c in agg.items())
    return tuple(rows)


@lru_cache(maxsize=None)
def _unmarked_product_exact(L: int, g: int) -> tuple[tuple[int, int, int], ...]:
    """Counts over the g-1 unmarked cycles, convolved exactly."""
    acc = {(0, 0): 1}
    table = _cycle_table(L)
    for _ in range(g - 1):
        nxt: dict[tuple[int, int], int] = {}
        for (z1, j1), c1 in acc.items():
            for z2, j2, c2 in table:
                key = (z1 + z2, j1 + j2)
                nxt[key] = nxt.get(key, 0) + c1 * c2
        acc = nxt
    return tuple((z, j, c) for (z, j), c in acc.items())


@lru_cache(maxsize=None)
def _unmarked_product_float(L: int, g: int) -> np.ndarray:
    zmax = (g - 1) * L
    acc = np.zeros((zmax + 1, zmax + 1))
    acc[0, 0] = 1.0
    for _ in range(g - 1):
        nxt = np.zeros_like(acc)
        for z2, j2, c2 in _cycle_table(L):
            nxt[z2:, j2:] += c2 * acc[:acc.shape[0] - z2, :acc.shape[1] - j2]
        acc = nxt
    return acc


@lru_cache(maxsize=None)
def _edge_pattern_counts_exact(D: int, zeta: int, g: int):
    """dict (e1, e2) -> dict j -> count of zero-sets of size zeta with the
    marked-edge pattern (e1, e2) and j zero-zero edges in total."""
    L = D // g
    unmarked = _unmarked_product_exact(L, g)
    by_z: dict[int, list[tuple[int, int]]] = {}
    for z, j, c in unmarked:
        by_z.setdefault(z, []).append((j, c))
    out: dict[tuple[int, int], dict[int, int]] = {}
    for e1, e2, zc, jc, cm in _marked_cycle_table(L):
        rest = by_z.get(zeta - zc)
        if not rest:
            continue
        bucket = out.setdefault((e1, e2), {})
        for ju, cu in rest:
            bucket[jc + ju] = bucket.get(jc + ju, 0) + cm * cu
    return out


@lru_cache(maxsize=None)
def _edge_pattern_probs_float(D: int, zeta: int, g: int):
    """dict (e1, e2) -> length-(D+1) probability array over j."""
    L = D // g
    U = _unmarked_product_float(L, g)
    out = {(0, 0): np.zeros(D + 1), (0, 1): np.zeros(D + 1),
           (1, 0): np.zeros(D + 1), (1, 1): np.zeros(D + 1)}
    for e1, e2, zc, jc, cm in _marked_cycle_table(L):
        zu = zeta - zc
        if not 0 <= zu < U.shape[0]:
            continue
        row = U[zu]
        out[(e1, e2)][jc:jc + row.size] += cm * row[:D + 1 - jc]
    total = sum(arr.sum() for arr in out.values())
    for arr in out.values():
        arr /= total
    return out


def shift_class_collision_expectation(D: int, f: int, a: int, g: int,
                                      method="log"):
    """Expected pair-collision probability for shift offsets d with
    gcd(d, D) = g; reduces to e_tilde at g = 1 and to a(a-1)/(f(f-1))
    when there are no both-zero coordinates."""
    method = _as_method(method)
    _check_pmf_args(D, f, a)
    if D % g != 0 or not 1 <= g <= D // 2:
        raise ValidationError("g must divide D and lie in [1, D/2]")
    zeta = D - f
    if zeta == 0:
        ef = _e_tilde_closed_form_dim_eq_f(f, a)
        return ef if method is Method.EXACT_RATIONAL else float(ef)
    if g == 1:
        return e_tilde(D, f, a, method)
    if method is Method.EXACT_RATIONAL:
        counts = _edge_pattern_counts_exact(D, zeta, g)
        total = comb0(D, zeta)
        acc = Fraction(0)
        for (e1, e2), bucket in counts.items():
            if e1 == 1 and e2 == 1:
                continue
            w = (Fraction(a * (a - 1), f - 1) if (e1, e2) == (0, 0)
                 else Fraction(a * a, f))
            for j, c in bucket.items():
                acc += w * Fraction(c, total) / (D - j)
        return acc * D / f
    probs = _edge_pattern_probs_float(D, zeta, g)
    j = np.arange(D + 1)
    inv = np.zeros(D + 1)
    inv[:D] = 1.0 / (D - j[:D])
    acc = (a * (a - 1) / (f - 1)) * float((probs[(0, 0)] * inv).sum())
    acc += (a * a / f) * float(((probs[(0, 1)] + probs[(1, 0)]) * inv).sum())
    return acc * D / f


# ---------------------------------------------------------------------------
# shuffled-estimator variance and the ratio diagnostic
# ---------------------------------------------------------------------------

def variance_sigma_pi(D: int, f: int, a: int, k: int,
                      method="log") -> VarianceReport:
    """Variance of the shuffled circulant estimator.

    J/K + (2/K^2) sum_{d=1}^{K-1} (K-d) T_gcd(d,D) - J^2, where T_1 is
    e_tilde and T_g for g > 1 is the split-cycle expectation. With every
    offset coprime to D this is exactly J/K + (K-1) e_tilde / K - J^2.
    """
    method = _as_method(method)
    if not 0 <= a <= f <= D or f == 0:
        raise ValidationError("need 0 <= a <= f <= D with f > 0")
    if not 1 <= k <= D:
        raise ValidationError(f"K must be in [1, {D}]")
    exact = method is Method.EXACT_RATIONAL
    if a == 0 or a == f:
        var = Fraction(0)
        return VarianceReport(Scheme.CMINHASH_SIGMA_PI, D, f, a, k, 0.0,
                              method, variance_exact=var if exact else None)
    J = Fraction(a, f)
    if k == 1:
        var = J * (1 - J)
        return VarianceReport(Scheme.CMINHASH_SIGMA_PI, D, f, a, k,
                              float(var), method,
                              variance_exact=var if exact else None)
    ef = e_tilde(D, f, a, method)
    by_gcd = {1: ef}
    series = []
    for d in range(1, k):
        g = math.gcd(d, D)
        if g not in by_gcd:
            by_gcd[g] = shift_class_collision_expectation(D, f, a, g, method)
        series.append(by_gcd[g])
    if exact:
        acc = sum(((k - d) * t for d, t in enumerate(series, start=1)),
                  Fraction(0))
        var = J / k + 2 * acc / (k * k) - J * J
        return VarianceReport(Scheme.CMINHASH_SIGMA_PI, D, f, a, k,
                              float(var), method, e_tilde=float(ef),
                              theta_series=tuple(float(t) for t in series),
                              variance_exact=var)
    Jf = a / f
    acc_f = sum((k - d) * t for d, t in enumerate(series, start=1))
    var_f = Jf / k + 2.0 * acc_f / (k * k) - Jf * Jf
    return VarianceReport(Scheme.CMINHASH_SIGMA_PI, D, f, a, k,
                          max(var_f, 0.0), method, e_tilde=float(ef),
                          theta_series=tuple(float(t) for t in series))


def variance_ratio(D: int, f: int, K: int, method="log") -> float:
    """Var_MH / Var_sigma_pi at a = f//2, self-checked for constancy at
    a = 1 and a = f-1 (relative 1e-8); the three must agree or the theory
    engine is broken. Infinite ratios (variance exactly zero) must be
    infinite at all three points to agree."""
    if not 2 <= f <= D:
        raise ValidationError("need 2 <= f <= D")
    if not 1 <= K <= D:
        raise ValidationError(f"K must be in [1, {D}]")

    def one(a: int) -> float:
        vs = variance_sigma_pi(D, f, a, K, method)
        v = vs.variance_exact if vs.variance_exact is not None else vs.variance
        if v == 0:
            return math.inf
        return variance_mh(a / f, K) / float(v)

    probes = sorted({max(1, f // 2), 1, f - 1})
    ratios = [one(a) for a in probes]
    finite = [r for r in ratios if math.isfinite(r)]
    if finite and len(finite) != len(ratios):
        raise SelfCheckError(
            f"variance ratio mixes finite and infinite values at D={D}, "
            f"f={f}, K={K}: {ratios}")
    if finite:
        spread = (max(finite) - min(finite)) / max(finite)
        if spread > 1e-8:
            raise SelfCheckError(
                f"variance ratio not constant over a at D={D}, f={f}, "
                f"K={K}: {ratios} (relative spread {spread:.3e})")
    return ratios[probes.index(max(1, f // 2))]
