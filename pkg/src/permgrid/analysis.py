"""Moments, exact distributions and singularity-analysis estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import PreconditionError, SeriesError
from .series import Series

_AXIS = {"t": 0, "l": 1}


def _marker_profile(F: Series, n: int, marker: str) -> list:
    """Coefficients of ``z^n`` by power of ``marker``, the other marker summed out."""
    if n > F.order:
        raise PreconditionError(f"n={n} exceeds the series order {F.order}")
    poly = F.coeff(n)
    prof = poly.sum(axis=1 - _AXIS[marker])
    return [int(x) if isinstance(x, int) or getattr(x, "denominator", 1) == 1 else x for x in prof]


def moments(F: Series, n: int, marker: str = "t", shifted: bool = False) -> tuple[Fraction, Fraction]:
    """Exact mean and variance of the marked statistic over objects of size ``n``.

    With ``shifted`` the marker axis of ``F`` holds ``u`` where the marker is
    ``1 + u`` (truncated at ``u^2``), so ``[u^1]`` is ``F_x(z, 1)`` and ``2 [u^2]`` is
    ``F_xx(z, 1)``.  Otherwise the marker is symbolic.

    The variance is ``F_xx / F + mean - mean^2`` evaluated at ``[z^n]``.
    """
    prof = _marker_profile(F, n, marker)
    if shifted:
        prof = prof + [0] * (3 - len(prof))
        total, d1, d2 = prof[0], prof[1], 2 * prof[2]
    else:
        total = sum(prof)
        d1 = sum(k * c for k, c in enumerate(prof))
        d2 = sum(k * (k - 1) * c for k, c in enumerate(prof))
    if total == 0:
        raise SeriesError(f"no objects of size {n}")
    mean = Fraction(d1, total)
    return mean, Fraction(d2, total) + mean - mean * mean


def distribution(F: Series, n: int, marker: str = "t") -> list[Fraction]:
    """``P(statistic = k)`` for ``k = 0, 1, ...`` at size ``n`` (trailing zeros dropped)."""
    prof = _marker_profile(F, n, marker)
    total = sum(prof)
    if total == 0:
        raise SeriesError(f"no objects of size {n}")
    while len(prof) > 1 and prof[-1] == 0:
        prof.pop()
    return [Fraction(c, total) for c in prof]


def kolmogorov_distance(probs: list, mean: float, sd: float) -> float:
    """``sup_x |F(x) - Phi((x - mean) / sd)|`` for a distribution on ``0, 1, 2, ...``.

    The step function only jumps at integers, so the supremum is approached at
    an integer from the left or attained at it.
    """
    def phi(x):
        return 0.5 * (1.0 + math.erf((x - mean) / (sd * math.sqrt(2.0))))

    cdf = Fraction(0)
    worst = phi(-0.0) if probs else 0.0
    for k, p in enumerate(probs):
        before = float(cdf)
        cdf += p
        at = phi(k)
        worst = max(worst, abs(before - at), abs(float(cdf) - at))
    return max(worst, abs(1.0 - phi(len(probs))))


# ---- singularity analysis -------------------------------------------------------

@dataclass(frozen=True)
class Surd:
    """The real number ``coef * sqrt(radicand)``."""

    coef: Fraction
    radicand: int = 1

    def value(self, dps: int = 64):
        with mpmath.workdps(dps):
            return mpmath.mpf(self.coef.numerator) / self.coef.denominator * mpmath.sqrt(self.radicand)


@dataclass(frozen=True)
class AsymptoticModel:
    """``F(z) ~ lam * (1 - z/rho)^alpha`` near the dominant singularity ``rho``."""

    lam: Surd | Fraction | int
    rho: Fraction
    alpha: Fraction
    corrections: tuple = field(default=(), compare=False)

    def __post_init__(self):
        a = Fraction(self.alpha)
        if a.denominator == 1 and a >= 0:
            raise PreconditionError("alpha must not be a non-negative integer")

    @classmethod
    def class_H(cls) -> "AsymptoticModel":
        return cls(Surd(Fraction(-5, 9), 5), Fraction(1, 5), Fraction(1, 2))

    @classmethod
    def class_D(cls) -> "AsymptoticModel":
        # (1 - 2z)(1 - z)^(3/2) / (1 - 10z + 24z^2 - 20z^3 + 4z^4) at z = 1/5 gives -120 sqrt(5) / 121
        return cls(Surd(Fraction(-120, 121), 5), Fraction(1, 5), Fraction(1, 2))

    def with_corrections(self, K: int) -> "AsymptoticModel":
        return AsymptoticModel(self.lam, self.rho, self.alpha, tuple(correction_terms(self.alpha, K)))


def lambda_table(K: int) -> dict[tuple[int, int], Fraction]:
    """``[v^k t^l] exp(t - (1 + 1/v) log(1 + v t))`` for ``k <= K``.

    The exponent is ``-v t - sum_{m>=2} (-1)^(m+1) (v^m + v^(m-1)) t^m / m``, which
    is divisible by ``v``, so ``exp`` truncates to ``sum_{j<=K} E^j / j!``.
    """
    tmax = 2 * K
    E: dict[tuple[int, int], Fraction] = {(1, 1): Fraction(-1)}
    for m in range(2, tmax + 1):
        c = Fraction((-1) ** m, m)
        for k in (m, m - 1):
            if k <= K:
                E[(k, m)] = E.get((k, m), 0) + c

    def mul(a, b):
        out: dict = {}
        for (k1, l1), c1 in a.items():
            for (k2, l2), c2 in b.items():
                if k1 + k2 <= K and l1 + l2 <= tmax:
                    key = (k1 + k2, l1 + l2)
                    out[key] = out.get(key, 0) + c1 * c2
        return out

    result: dict = {(0, 0): Fraction(1)}
    power: dict = {(0, 0): Fraction(1)}
    for j in range(1, K + 1):
        power = mul(power, E)
        for key, c in power.items():
            result[key] = result.get(key, 0) + c / math.factorial(j)
    return {k: v for k, v in result.items() if v != 0}


def correction_terms(alpha, K: int) -> list[Fraction]:
    """``e_1 .. e_K`` with ``e_k = sum_{l=k}^{2k} lambda_{k,l} prod_{j=1}^{l} (alpha + j)``."""
    alpha = Fraction(alpha)
    lam = lambda_table(K)
    out = []
    for k in range(1, K + 1):
        e = Fraction(0)
        for l in range(k, 2 * k + 1):
            prod = Fraction(1)
            for j in range(1, l + 1):
                prod *= alpha + j
            e += lam.get((k, l), 0) * prod
        out.append(e)
    return out


def gamma_neg(alpha, dps: int = 64):
    """``Gamma(-alpha)``; half-integers go through ``Gamma(1/2) = sqrt(pi)`` and the recurrence."""
    a = Fraction(alpha)
    x = -a
    with mpmath.workdps(dps):
        if x.denominator == 2:
            g = mpmath.sqrt(mpmath.pi)
            cur = Fraction(1, 2)
            while cur < x:
                g *= mpmath.mpf(cur.numerator) / cur.denominator
                cur += 1
            while cur > x:
                cur -= 1
                g /= mpmath.mpf(cur.numerator) / cur.denominator
            return g
        return mpmath.gamma(mpmath.mpf(x.numerator) / x.denominator)


def asymptotic_estimate(model: AsymptoticModel, n: int, K: int = 0, dps: int = 64):
    """``lam / Gamma(-alpha) * rho^(-n) * n^(-alpha-1) * (1 + sum_{k<=K} e_k / n^k)``."""
    if K < 0:
        raise PreconditionError("K must be non-negative")
    a = Fraction(model.alpha)
    if a.denominator == 1 and a >= 0:
        raise PreconditionError("alpha must not be a non-negative integer")
    es = list(model.corrections[:K]) if len(model.corrections) >= K else correction_terms(a, K)
    with mpmath.workdps(dps):
        lam = model.lam.value(dps) if isinstance(model.lam, Surd) else mpmath.mpf(Fraction(model.lam).numerator) / Fraction(model.lam).denominator
        rho = mpmath.mpf(model.rho.numerator) / model.rho.denominator
        N = mpmath.mpf(n)
        alpha = mpmath.mpf(a.numerator) / a.denominator
        tail = 1 + sum(mpmath.mpf(e.numerator) / e.denominator / N ** (k + 1) for k, e in enumerate(es))
        return lam / gamma_neg(a, dps) * rho ** (-n) * N ** (-alpha - 1) * tail
