"""Value types shared by every module: parameters, populations, deviations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

Number = Union[int, float, Fraction]


class BoundsError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BoundsError, ValueError):
    """An input lies outside the mathematical domain of a function."""


class SupportError(DomainError):
    """A count lies outside the support of the sampling distribution."""


class UsageError(BoundsError, ValueError):
    """A call was malformed (wrong input kind, length mismatch, ...)."""


class NumericError(BoundsError, ArithmeticError):
    """A numerical procedure failed to converge."""


@dataclass(frozen=True)
class HGParams:
    """Hypergeometric setting: draw ``n`` of ``N`` items, ``D`` of them marked."""

    n: int
    D: int
    N: int

    def __post_init__(self):
        for name in ("n", "D", "N"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise UsageError(f"{name} must be an integer, got {v!r}")
        if not 1 <= self.n <= self.N:
            raise DomainError(f"need 1 <= n <= N, got n={self.n}, N={self.N}")
        if not 0 <= self.D <= self.N:
            raise DomainError(f"need 0 <= D <= N, got D={self.D}, N={self.N}")

    @property
    def mu(self) -> Fraction:
        return Fraction(self.D, self.N)

    @property
    def f_n(self) -> Fraction:
        """Finite-population fraction (n-1)/(N-1); zero when N == 1."""
        if self.N == 1:
            return Fraction(0)
        return Fraction(self.n - 1, self.N - 1)

    @property
    def f_star(self) -> Fraction:
        return Fraction(self.n - 1, self.N)

    @property
    def sigma2(self) -> Fraction:
        mu = self.mu
        return mu * (1 - mu)

    @property
    def support(self) -> tuple[int, int]:
        return max(0, self.n - (self.N - self.D)), min(self.D, self.n)

    def population(self) -> "Population":
        return Population.hypergeometric(self.D, self.N)


@dataclass(frozen=True)
class BinParams:
    """Binomial setting with an exact success probability."""

    n: int
    p: Fraction

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        p = to_exact(self.p)
        if not 0 <= p <= 1:
            raise DomainError(f"p must lie in [0, 1], got {p}")
        object.__setattr__(self, "p", p)


def to_exact(x: Number) -> Fraction:
    """Convert an int, Fraction or float to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise UsageError("booleans are not numbers here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x!r}")
        return Fraction(x)
    raise UsageError(f"cannot interpret {x!r} as a number")


def parse_number(text: str) -> Number:
    """Parse ``"3"``, ``"p/q"`` (exact) or a decimal float literal."""
    s = text.strip()
    if not s:
        raise ValueError("empty number")
    if "/" in s:
        num, den = s.split("/", 1)
        return Fraction(int(num), int(den))
    try:
        return int(s)
    except ValueError:
        pass
    v = float(s)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {s!r}")
    return v


@dataclass(frozen=True, eq=True)
class Population:
    """A finite list of real scores with cached summary statistics.

    When every value is an int or Fraction the statistics are exact
    Fractions, otherwise they are floats accumulated left to right.
    """

    values: tuple
    exact: bool = field(init=False, compare=False)
    a: Number = field(init=False, compare=False)
    b: Number = field(init=False, compare=False)
    mean: Number = field(init=False, compare=False)
    sigma2_pop: Number = field(init=False, compare=False)
    sup_dev: Number = field(init=False, compare=False)

    def __init__(self, values: Iterable[Number]):
        vals = tuple(values)
        if not vals:
            raise DomainError("population must be non-empty")
        exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in vals)
        if exact:
            vals = tuple(Fraction(v) for v in vals)
        else:
            vals = tuple(float(v) for v in vals)
            if not all(math.isfinite(v) for v in vals):
                raise DomainError("population values must be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "exact", exact)
        N = len(vals)
        total = Fraction(0) if exact else 0.0
        for v in vals:
            total += v
        mean = total / N
        ss = Fraction(0) if exact else 0.0
        for v in vals:
            ss += (v - mean) ** 2
        object.__setattr__(self, "a", min(vals))
        object.__setattr__(self, "b", max(vals))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "sigma2_pop", ss / N)
        object.__setattr__(self, "sup_dev", max(abs(v - mean) for v in vals))
        object.__setattr__(self, "_hash", hash(vals))

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def N(self) -> int:
        return len(self.values)

    @property
    def total(self) -> Number:
        return self.mean * self.N

    @property
    def span(self) -> Number:
        return self.b - self.a

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2_pop)

    @classmethod
    def hypergeometric(cls, D: int, N: int) -> "Population":
        return cls([1] * D + [0] * (N - D))

    @classmethod
    def from_text(cls, text: str) -> "Population":
        """Parse one number per line; blank lines and ``#`` comments are skipped."""
        vals = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for tok in line.replace(",", " ").split():
                try:
                    vals.append(parse_number(tok))
                except (ValueError, ZeroDivisionError) as exc:
                    raise ValueError(f"line {lineno}: cannot parse {tok!r}") from exc
        return cls(vals)

    def shifted_unit(self) -> "Population":
        """Affine image (c - a)/(b - a) lying in [0, 1]."""
        if self.b == self.a:
            raise DomainError("degenerate population: b == a")
        span = self.b - self.a
        return Population([(v - self.a) / span for v in self.values])


@dataclass(frozen=True)
class Deviation:
    """A deviation level on the standardized scale sqrt(n)(mean - mu)."""

    lam: float

    def t_sum(self, n: int) -> float:
        """The same level on the scale of the sample sum."""
        return math.sqrt(n) * self.lam

    def k0(self, params: HGParams) -> int:
        return threshold_k0(params.n, params.mu, self.lam)


@dataclass(frozen=True)
class BoundValue:
    raw: float
    clamped: float
    domain_ok: bool
    domain_msg: str = ""

    @classmethod
    def make(cls, raw: float, domain_ok: bool = True, msg: str = "") -> "BoundValue":
        if math.isnan(raw):
            raw = math.inf
        return cls(raw, min(raw, 1.0), domain_ok, msg)


@dataclass(frozen=True)
class ExactProb:
    """An exact probability num/den in lowest terms with its float value."""

    num: int
    den: int
    float_shadow: float

    @classmethod
    def of(cls, value: Fraction) -> "ExactProb":
        value = Fraction(value)
        return cls(value.numerator, value.denominator, value.numerator / value.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __float__(self):
        return self.float_shadow


def threshold_k0(n: int, mu: Fraction, lam: float) -> int:
    """Smallest integer k with k >= n*mu + sqrt(n)*lam, decided exactly."""
    center = n * Fraction(mu)
    lam_q = Fraction(lam)
    guess = math.ceil(float(center) + math.sqrt(n) * lam)

    def reaches(k: int) -> bool:
        gap = k - center
        if lam_q <= 0:
            return gap >= 0 or gap * gap <= n * lam_q * lam_q
        return gap >= 0 and gap * gap >= n * lam_q * lam_q

    k = guess
    while reaches(k - 1):
        k -= 1
    while not reaches(k):
        k += 1
    return k


def standardize(params: HGParams, k: int) -> Deviation:
    """Map a count k to lam = (k - n*mu)/sqrt(n).

    The float is rounded so that it never exceeds the exact value, which
    keeps ``Deviation.k0`` equal to k for k >= n*mu.
    """
    lo, hi = params.support
    if not lo <= k <= hi:
        raise SupportError(f"k={k} outside support [{lo}, {hi}]")
    n = params.n
    gap = k - n * params.mu
    lam = float(gap) / math.sqrt(n)
    lam_q = Fraction(lam)
    # exact test of lam <= gap/sqrt(n)
    while _exceeds(lam_q, gap, n):
        lam = math.nextafter(lam, -math.inf)
        lam_q = Fraction(lam)
    return Deviation(lam)


def _exceeds(lam_q: Fraction, gap: Fraction, n: int) -> bool:
    if lam_q >= 0 and gap >= 0:
        return lam_q * lam_q * n > gap * gap
    if lam_q < 0 and gap < 0:
        return lam_q * lam_q * n < gap * gap
    return lam_q >= 0 > gap


def pairwise_sum(xs: Sequence[float]) -> float:
    if len(xs) <= 8:
        s = 0.0
        for x in xs:
            s += x
        return s
    mid = len(xs) // 2
    return pairwise_sum(xs[:mid]) + pairwise_sum(xs[mid:])
