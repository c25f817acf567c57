"""Closed-form tail bounds for sample means drawn without replacement.

Every bound is evaluated on the standardized scale: ``evaluate(id, input,
lam)`` bounds P(sqrt(n) (mean - mu) >= lam), or P(|...| >= lam) for the two
two-sided bounds. Each entry declares which input it takes and a validity
predicate; an evaluation outside the hypotheses still reports the formula
value when it is finite, with ``domain_ok = False``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .core_types import (
    BinParams,
    BoundValue,
    DomainError,
    HGParams,
    Population,
    UsageError,
)
from .kernels import backend
from .majorization import FLOAT_TOL, unit_summary
from .proof_kernels import talagrand_constants

K = backend  # formula codes live on the backend module

DEFAULT_DELTA = 1e-7


class BoundId(str, Enum):
    serfling_general = "serfling_general"
    serfling_hg = "serfling_hg"
    hush_scovel = "hush_scovel"
    bm_hg = "bm_hg"
    bm_general = "bm_general"
    leon_perron_bin = "leon_perron_bin"
    talagrand_bin_iii = "talagrand_bin_iii"
    bennett_bin = "bennett_bin"
    lp_hyper = "lp_hyper"
    talagrand_hyper_i = "talagrand_hyper_i"
    talagrand_hyper_ii = "talagrand_hyper_ii"
    talagrand_hyper_iii = "talagrand_hyper_iii"
    bennett_hyper = "bennett_hyper"
    bernstein_hyper = "bernstein_hyper"
    chatterjee_general = "chatterjee_general"
    gi_matrix = "gi_matrix"
    gi_swor = "gi_swor"
    gi_hyper = "gi_hyper"
    kemperman_major = "kemperman_major"
    kemperman_submajor = "kemperman_submajor"


@dataclass(frozen=True)
class PopInput:
    pop: Population
    n: int
    delta: Optional[float] = None


@dataclass(frozen=True, eq=False)
class MatrixInput:
    """Scores a_ij of a permutation statistic sum_i a_{i, pi(i)}.

    ``n`` sets the standardization t = sqrt(n) * lam; keep n = 1 to work
    directly on the scale of the statistic. The scores are stored as a
    read-only float array.
    """

    scores: np.ndarray
    n: int = 1

    def __post_init__(self):
        a = np.array(self.scores, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "scores", a)


BoundInput = Union[HGParams, BinParams, PopInput, MatrixInput]

B = BoundId
INPUT_KIND = {
    B.serfling_general: PopInput,
    B.serfling_hg: HGParams,
    B.hush_scovel: HGParams,
    B.bm_hg: HGParams,
    B.bm_general: PopInput,
    B.leon_perron_bin: BinParams,
    B.talagrand_bin_iii: BinParams,
    B.bennett_bin: BinParams,
    B.lp_hyper: HGParams,
    B.talagrand_hyper_i: HGParams,
    B.talagrand_hyper_ii: HGParams,
    B.talagrand_hyper_iii: HGParams,
    B.bennett_hyper: HGParams,
    B.bernstein_hyper: HGParams,
    B.chatterjee_general: PopInput,
    B.gi_matrix: MatrixInput,
    B.gi_swor: PopInput,
    B.gi_hyper: HGParams,
    B.kemperman_major: PopInput,
    B.kemperman_submajor: PopInput,
}

TWO_SIDED = frozenset({B.gi_matrix, B.gi_swor})
# bounds with a pole at lam = sqrt(n)/2
POLE_BEARING = frozenset({B.leon_perron_bin, B.lp_hyper})
# bounds with a 1/lam prefactor
INVERSE_LAMBDA = frozenset({B.leon_perron_bin, B.lp_hyper, B.talagrand_bin_iii,
                            B.talagrand_hyper_ii, B.talagrand_hyper_iii})
# non-constructive constant: never treated as a guarantee
NOT_GUARANTEED = frozenset({B.talagrand_bin_iii})


@dataclass(frozen=True)
class Prepared:
    """Everything about a bound that does not depend on lambda."""

    code: int
    args: tuple
    factor: float = 1.0
    offset: float = 0.0
    constant: Optional[float] = None
    ok: bool = True
    msg: str = ""
    lam_lo: float = 0.0
    lo_open: bool = False
    lam_hi: float = math.inf
    hi_open: bool = False

    def lam_ok(self, lam: float) -> bool:
        if lam < self.lam_lo or (self.lo_open and lam == self.lam_lo):
            return False
        if lam > self.lam_hi or (self.hi_open and lam == self.lam_hi):
            return False
        return True

    def lam_msg(self) -> str:
        lo = "(" if self.lo_open else "["
        hi = ")" if self.hi_open else "]"
        return f"lambda must lie in {lo}{self.lam_lo:g}, {self.lam_hi:g}{hi}"


def _fail(msgs: list[str], cond: bool, msg: str) -> None:
    if not cond:
        msgs.append(msg)


def _f(x) -> float:
    return float(x)


# --- matrix helpers ---------------------------------------------------------

def _as_square(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError("score matrix must be square")
    if a.shape[0] < 2:
        raise UsageError("score matrix must be at least 2x2")
    return a


def sigma_A2(matrix) -> float:
    """(1/(N-1)) sum_ij (a_ij - a_i. - a_.j + a_..)^2."""
    a = _as_square(matrix)
    resid = a - a.mean(axis=1, keepdims=True) - a.mean(axis=0, keepdims=True) + a.mean()
    return float(np.sum(resid * resid) / (a.shape[0] - 1))


def sup_dev_matrix(matrix) -> float:
    """max_ij |a_ij - a_i.|."""
    a = _as_square(matrix)
    return float(np.max(np.abs(a - a.mean(axis=1, keepdims=True))))


def serfling_matrix(pop: Population, n: int) -> np.ndarray:
    """a_ij = 1[i <= n] c_j, whose permutation statistic is a sample sum."""
    c = np.array([float(v) for v in pop.values])
    a = np.zeros((pop.N, pop.N))
    a[:n, :] = c
    return a


def bm_c_n(sigma: float, b_minus_a: float, n: int, delta: float) -> float:
    """sigma (b - a) sqrt(2 log(1/delta) / n)."""
    if delta <= 0 or delta > 1:
        raise DomainError("need 0 < delta <= 1")
    if n < 1:
        raise DomainError("need n >= 1")
    return sigma * b_minus_a * math.sqrt(2.0 * math.log(1.0 / delta) / n)


# --- per-bound preparation -----------------------------------------------------

def _prep_pop_common(inp: PopInput, msgs: list[str]) -> tuple[Population, int, int]:
    pop, n = inp.pop, inp.n
    N = pop.N
    _fail(msgs, 1 <= n <= N, "need 1 <= n <= N")
    return pop, n, N


def prepare(bound: BoundId, inp: BoundInput, *, t: Optional[float] = None,
            K2: Optional[float] = None, mu0: Optional[float] = None,
            psi0: Optional[float] = None, b_minus_a: Optional[float] = None) -> Prepared:
    """Validate the lambda-free hypotheses and precompute formula constants."""
    bound = BoundId(bound)
    kind = INPUT_KIND[bound]
    if not isinstance(inp, kind):
        raise UsageError(f"{bound.value} takes {kind.__name__} input, got {type(inp).__name__}")
    msgs: list[str] = []
    fn = _PREPARERS[bound]
    prep = fn(inp, msgs, dict(t=t, K2=K2, mu0=mu0, psi0=psi0, b_minus_a=b_minus_a))
    if msgs:
        prep = _replace(prep, ok=False, msg="; ".join(msgs))
    return prep


def _replace(prep: Prepared, **kw) -> Prepared:
    d = prep.__dict__.copy()
    d.update(kw)
    return Prepared(**d)


def _span(pop: Population, opts) -> float:
    span = opts.get("b_minus_a")
    return float(pop.span) if span is None else float(span)


def _serfling_general(inp: PopInput, msgs, opts):
    pop, n, N = _prep_pop_common(inp, msgs)
    span = _span(pop, opts)
    if span == 0:
        raise DomainError("degenerate population: b - a = 0")
    f_star = (n - 1) / N
    return Prepared(K.GAUSS, (2.0 / ((1.0 - f_star) * span * span),))


def _serfling_hg(p: HGParams, msgs, opts):
    return Prepared(K.GAUSS, (2.0 / (1.0 - _f(p.f_star)),))


def _hush_scovel(p: HGParams, msgs, opts):
    n, D, N = p.n, p.D, p.N
    alpha = max(Fraction(1, n + 1) + Fraction(1, N - n + 1),
                Fraction(1, D + 1) + Fraction(1, N - D + 1))
    return Prepared(K.HUSH_SCOVEL, (float(n), _f(alpha)), lo_open=True)


def _bm_hg(p: HGParams, msgs, opts):
    if p.n == p.N:
        raise DomainError("need n < N (the formula divides by 1 - n/N)")
    coef = 2.0 / (_f(1 - Fraction(p.n, p.N)) * _f(1 + Fraction(1, p.n)))
    return Prepared(K.GAUSS, (coef,))


def _bm_general(inp: PopInput, msgs, opts):
    pop, n, N = _prep_pop_common(inp, msgs)
    delta = DEFAULT_DELTA if inp.delta is None else float(inp.delta)
    _fail(msgs, 0 <= delta <= 1, "need 0 <= delta <= 1")
    _fail(msgs, n < N, "need n < N")
    span = _span(pop, opts)
    sigma2 = _f(pop.sigma2_pop)
    f_star = (n - 1) / N
    if n >= 2 and f_star > 0:
        if delta <= 0:
            return Prepared(K.GAUSS, (0.0,), offset=delta, constant=1.0 + delta)
        c = bm_c_n(math.sqrt(sigma2), span, n - 1, min(delta, 1.0))
        gamma2 = (1 - f_star) * sigma2 + f_star * c
    else:
        gamma2 = sigma2
    if gamma2 == 0 and span == 0:
        raise DomainError("degenerate population: gamma^2 = 0 and b - a = 0")
    return Prepared(K.BERNSTEIN, (gamma2, 2.0 * span / 3.0, math.sqrt(n)), offset=delta)


def _check_p_open(p: BinParams, msgs):
    _fail(msgs, 0 < p.p < 1, "need 0 < p < 1")


def _leon_perron_bin(p: BinParams, msgs, opts):
    _check_p_open(p, msgs)
    return Prepared(K.LEON_PERRON, (float(p.n),), lo_open=True,
                    lam_hi=math.sqrt(p.n) / 2, hi_open=True)


def _talagrand_bin_iii(p: BinParams, msgs, opts):
    _check_p_open(p, msgs)
    k2 = 1.0 if opts.get("K2") is None else float(opts["K2"])
    return Prepared(K.TALAGRAND_TAIL, (-1.0, float(p.n), 0.0, k2), lo_open=True)


def _bennett_bin(p: BinParams, msgs, opts):
    _fail(msgs, 0 < p.p <= Fraction(1, 2), "need 0 < p <= 1/2")
    var = _f(p.p * (1 - p.p))
    if var == 0:
        raise DomainError("degenerate binomial: p(1-p) = 0")
    return Prepared(K.BENNETT, (var, var, math.sqrt(p.n)))


def _lp_hyper(p: HGParams, msgs, opts):
    n, D, N = p.n, p.D, p.N
    _fail(msgs, N > 4, "need N > 4")
    _fail(msgs, 2 <= n < D and 2 * D <= N, "need 2 <= n < D <= N/2")
    return Prepared(K.LP_HYPER, (float(n), float(N)), lo_open=True,
                    lam_hi=math.sqrt(n) / 2, hi_open=True)


def _talagrand_hyper(which: str):
    def prep(p: HGParams, msgs, opts):
        n, D, N = p.n, p.D, p.N
        mu = _f(p.mu)
        ratio = n / N
        m0 = min(mu, 1 - mu) if opts.get("mu0") is None else float(opts["mu0"])
        s0 = min(ratio, 1 - ratio) if opts.get("psi0") is None else float(opts["psi0"])
        _fail(msgs, 1 <= n < D <= N - 1, "need 1 <= n < D <= N-1")
        _fail(msgs, m0 <= mu <= 1 - m0, "need mu0 <= D/N <= 1 - mu0")
        _fail(msgs, s0 <= ratio <= 1 - s0, "need psi0 <= n/N <= 1 - psi0")
        if n == N:
            raise DomainError("need n < N (the formula divides by 1 - n/N)")
        consts = talagrand_constants(m0, s0)
        if which == "i":
            return Prepared(K.TALAGRAND_POINT, (float(n), ratio, consts.K1), lo_open=True)
        if which == "iii":
            return Prepared(K.TALAGRAND_TAIL, (-1.0, float(n), ratio, consts.K2), lo_open=True)
        t = opts.get("t")
        if t is None:
            raise UsageError("talagrand_hyper_ii needs the event level t (0 < t < lambda)")
        _fail(msgs, t > 0, "need t > 0")
        return Prepared(K.TALAGRAND_TAIL, (float(t), float(n), ratio, consts.K2),
                        lam_lo=max(float(t), 0.0), lo_open=True, lam_hi=math.sqrt(n))
    return prep


def _hyper_variance_term(p: HGParams) -> float:
    return _f(p.sigma2 * (1 - p.f_n))


def _bennett_hyper(p: HGParams, msgs, opts):
    _fail(msgs, 1 <= p.n <= min(p.D, p.N - p.D), "need 1 <= n <= min(D, N-D)")
    v = _hyper_variance_term(p)
    if v == 0:
        return Prepared(K.BENNETT, (0.0, 0.0, 1.0), constant=None, ok=False,
                        msg="degenerate: sigma^2 (1 - f_n) = 0")
    return Prepared(K.BENNETT, (v, v, math.sqrt(p.n)))


def _bernstein_hyper(p: HGParams, msgs, opts):
    _fail(msgs, 1 <= p.n <= min(p.D, p.N - p.D), "need 1 <= n <= min(D, N-D)")
    return Prepared(K.BERNSTEIN, (_hyper_variance_term(p), 1.0 / 3.0, math.sqrt(p.n)))


def _chatterjee(inp: PopInput, msgs, opts):
    pop, n, N = _prep_pop_common(inp, msgs)
    _fail(msgs, n < N, "need n < N")
    _fail(msgs, pop.a >= 0 and pop.b <= 1, "need all values in [0, 1]")
    return Prepared(K.BERNSTEIN, (4.0 * _f(pop.mean) / 2.0, 1.0, math.sqrt(n)), lo_open=True)


def _gi_matrix(inp: MatrixInput, msgs, opts):
    s2 = sigma_A2(inp.scores)
    norm = sup_dev_matrix(inp.scores)
    if s2 == 0 and norm == 0:
        raise DomainError("degenerate score matrix: sigma_A^2 = 0 and ||a|| = 0")
    _fail(msgs, inp.n >= 1, "need n >= 1")
    return Prepared(K.BERNSTEIN, (s2 / inp.n, 8.0 * norm, math.sqrt(inp.n)), factor=2.0)


def _gi_swor(inp: PopInput, msgs, opts):
    pop, n, N = _prep_pop_common(inp, msgs)
    _fail(msgs, n < N, "need n < N")
    f_n = (n - 1) / (N - 1) if N > 1 else 0.0
    v = _f(pop.sigma2_pop) * (1 - f_n)
    norm = _f(pop.sup_dev)
    if v == 0 and norm == 0:
        raise DomainError("degenerate population: sigma = 0")
    return Prepared(K.BERNSTEIN, (v, 8.0 * norm, math.sqrt(n)), factor=2.0)


def _gi_hyper(p: HGParams, msgs, opts):
    _fail(msgs, p.n < p.N, "need n < N")
    mu = _f(p.mu)
    return Prepared(K.BERNSTEIN, (_hyper_variance_term(p), 8.0 * max(mu, 1 - mu), math.sqrt(p.n)))


def _kemperman(sub: bool):
    def prep(inp: PopInput, msgs, opts):
        pop, n, N = _prep_pop_common(inp, msgs)
        if pop.span == 0:
            raise DomainError("degenerate population: b - a = 0")
        ones, alpha, d_sub, dbar = unit_summary(pop)
        if sub:
            room = (dbar + Fraction(1, N) <= Fraction(1, 2)) if pop.exact else (
                float(dbar) + 1 / N <= 0.5 + FLOAT_TOL)
            _fail(msgs, room, "need mean of (c-a)/(b-a) plus 1/N <= 1/2")
            D = d_sub
        else:
            binary = alpha == 0
            _fail(msgs, binary, "(c-a)/(b-a) is not majorized by a 0/1 population")
            _fail(msgs, 2 * ones <= N, "need D/N <= 1/2 for the majorizing population")
            D = ones
        _fail(msgs, 1 <= n <= min(D, N - D), "need 1 <= n <= min(D, N-D)")
        span = _span(pop, opts)
        mu = Fraction(D, N)
        f_n = Fraction(n - 1, N - 1) if N > 1 else Fraction(0)
        g2 = _f(mu * (1 - mu) * (1 - f_n))
        if g2 == 0:
            raise DomainError("degenerate majorizing population: sigma_N^2 (1 - f_n) = 0")
        v, s = span * span * g2, span * g2
        if sub:
            return Prepared(K.SUBMAJOR, (v, s, math.sqrt(n), n / N))
        return Prepared(K.BENNETT, (v, s, math.sqrt(n)))
    return prep


_PREPARERS = {
    B.serfling_general: _serfling_general,
    B.serfling_hg: _serfling_hg,
    B.hush_scovel: _hush_scovel,
    B.bm_hg: _bm_hg,
    B.bm_general: _bm_general,
    B.leon_perron_bin: _leon_perron_bin,
    B.talagrand_bin_iii: _talagrand_bin_iii,
    B.bennett_bin: _bennett_bin,
    B.lp_hyper: _lp_hyper,
    B.talagrand_hyper_i: _talagrand_hyper("i"),
    B.talagrand_hyper_ii: _talagrand_hyper("ii"),
    B.talagrand_hyper_iii: _talagrand_hyper("iii"),
    B.bennett_hyper: _bennett_hyper,
    B.bernstein_hyper: _bernstein_hyper,
    B.chatterjee_general: _chatterjee,
    B.gi_matrix: _gi_matrix,
    B.gi_swor: _gi_swor,
    B.gi_hyper: _gi_hyper,
    B.kemperman_major: _kemperman(False),
    B.kemperman_submajor: _kemperman(True),
}


# --- evaluation -----------------------------------------------------------------

def _point(prep: Prepared, lam: float) -> float:
    if prep.constant is not None:
        return prep.constant
    raw = backend.formula(prep.code, lam, *prep.args)
    return prep.factor * raw + prep.offset


def evaluate(bound: BoundId, inp: BoundInput, lam: float, **opts) -> BoundValue:
    """Evaluate one bound at one deviation level.

    Keyword options: ``t`` (event level for talagrand_hyper_ii), ``K2``
    (constant for talagrand_bin_iii), ``mu0``/``psi0`` (truncation levels
    for the hypergeometric Talagrand bounds) and ``b_minus_a`` (override of
    the population range for population bounds).
    """
    lam = float(lam)
    if not math.isfinite(lam):
        raise UsageError("lambda must be finite")
    prep = prepare(bound, inp, **opts)
    if lam == 0.0 and prep.code in (K.BENNETT, K.BERNSTEIN) and prep.constant is None:
        raw = prep.factor + prep.offset
    else:
        if prep.code == K.BENNETT and prep.args[0] == 0.0:
            raise DomainError(prep.msg or "degenerate variance")
        raw = _point(prep, lam)
    ok, msgs = prep.ok, [prep.msg] if prep.msg else []
    if not prep.lam_ok(lam):
        ok = False
        msgs.append(prep.lam_msg())
    return BoundValue.make(raw, ok, "; ".join(msgs))


def evaluate_grid(bound: BoundId, inp: BoundInput, lams: Sequence[float], **opts):
    """Vectorised evaluation; returns (raw array, domain_ok array, Prepared)."""
    prep = prepare(bound, inp, **opts)
    out, ok = evaluate_prepared(prep, lams)
    return out, ok, prep


def evaluate_prepared(prep: Prepared, lams: Sequence[float]):
    """(raw array, domain_ok array) for an already prepared bound."""
    lams = np.ascontiguousarray(lams, dtype=float)
    out = np.empty_like(lams)
    if prep.constant is not None:
        out.fill(prep.constant)
    else:
        if prep.code == K.BENNETT and prep.args[0] == 0.0:
            raise DomainError(prep.msg or "degenerate variance")
        backend.formula_grid(prep.code, lams, out, *prep.args)
        if prep.factor != 1.0:
            out *= prep.factor
        if prep.offset:
            out += prep.offset
    out[np.isnan(out)] = math.inf
    lo_ok = lams > prep.lam_lo if prep.lo_open else lams >= prep.lam_lo
    hi_ok = lams < prep.lam_hi if prep.hi_open else lams <= prep.lam_hi
    ok = lo_ok & hi_ok & prep.ok
    return out, ok


def conjectured_serfling(params: HGParams, lam: float) -> float:
    """exp(-2 lam^2 / (1 - f_n)): the conjectured sharpening of Serfling's
    factor. A comparison curve only; it is not a proven bound."""
    return math.exp(-2.0 * lam * lam / (1.0 - _f(params.f_n)))


def input_for(bound: BoundId, n: int, D: int, N: int, *, delta: Optional[float] = None,
              pop: Optional[Population] = None) -> BoundInput:
    """Build the input a bound expects from a hypergeometric description.

    Population bounds get the 0/1 population (or ``pop`` when given),
    binomial bounds get p = D/N and matrix bounds the sample-sum matrix.
    """
    kind = INPUT_KIND[BoundId(bound)]
    if kind is HGParams:
        return HGParams(n, D, N)
    if kind is BinParams:
        return BinParams(n, Fraction(D, N))
    population = pop if pop is not None else hypergeometric_population(D, N)
    if kind is PopInput:
        return PopInput(population, n, delta)
    return MatrixInput(serfling_matrix(population, n), n)


_HG_POP_CACHE: dict = {}


def hypergeometric_population(D: int, N: int) -> Population:
    key = (D, N)
    pop = _HG_POP_CACHE.get(key)
    if pop is None:
        if len(_HG_POP_CACHE) > 4096:
            _HG_POP_CACHE.clear()
        pop = _HG_POP_CACHE[key] = Population.hypergeometric(D, N)
    return pop
