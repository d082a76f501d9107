"""The ten acceptance checks, shared by ``permgrid verify`` and the test suite.

Each check returns a :class:`CheckResult`.  ``scale="fast"`` runs only the
exact checks, at reduced sizes, in a few seconds; the asymptotic checks (6, 7
and 9) have tolerances tied to their stated sizes and run only at full scale.
"""

from __future__ import annotations

import hashlib
import math
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from .analysis import AsymptoticModel, asymptotic_estimate, distribution, kolmogorov_distance, moments
from .grammars import closed_form_D, grammar_D, grammar_H, polysystem_D
from .perm import BASIS_D, BASIS_H, all_permutations, avoids_all, contains, enumerate_class, iterate_class
from .sampler import Sampler, make_rng
from .structure import all_griddings, canonical_gridding_D, gridding_avoids_2143, rebuild

H_COUNTS = [1, 2, 6, 21, 79, 311, 1265, 5275, 22431, 96900, 424068, 1876143]
D_COUNTS = [1, 2, 6, 22, 88, 366, 1556, 6720, 29396, 129996, 580276, 2611290]
RATIO = Fraction(121, 216)


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, title: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(number, title, ok, detail, time.perf_counter() - t0)


def check_sequences(scale: str = "full") -> tuple[bool, str]:
    h = grammar_H(12, "one").at_unity()[1:]
    d = grammar_D(12, "one", "one").at_unity()[1:]
    series_ok = h == H_COUNTS and d == D_COUNTS
    n_brute = 10 if scale == "full" else 8
    t0 = time.perf_counter()
    bh = enumerate_class(BASIS_H, n_brute).sequence()
    bd = enumerate_class(BASIS_D, n_brute).sequence()
    elapsed = time.perf_counter() - t0
    brute_ok = bh == H_COUNTS[:n_brute] and bd == D_COUNTS[:n_brute] and elapsed < 600
    return series_ok and brute_ok, f"series n<=12 {'ok' if series_ok else 'MISMATCH'}; brute n<={n_brute} " \
                                   f"{'ok' if brute_ok else 'MISMATCH'} in {elapsed:.1f}s"


def check_triple(scale: str = "full") -> tuple[bool, str]:
    N = 100 if scale == "full" else 30
    t0 = time.perf_counter()
    gt = grammar_D(N, "sym", "one")
    top = gt == closed_form_D(N, t="sym") == polysystem_D(N, "sym")
    left = grammar_D(N, "one", "sym") == closed_form_D(N, l="sym")
    uni = grammar_D(N, "one", "one") == closed_form_D(N) == polysystem_D(N, "one")
    elapsed = time.perf_counter() - t0
    ok = top and left and uni and elapsed < 60
    return ok, f"order {N}: D(z,t,1) {top}, D(z,1,l) {left}, D(z) {uni}; {elapsed:.1f}s (limit 60s)"


def canonical_census(n_max: int) -> Counter:
    """``(n, tops, lefts) -> count`` over the canonical griddings of ``D_n``."""
    census: Counter = Counter()
    for n in range(1, n_max + 1):
        for p in iterate_class(BASIS_D, n):
            cg = canonical_gridding_D(p)
            census[(n, cg.n_top, cg.n_left)] += 1
    return census


def check_census(scale: str = "full") -> tuple[bool, str]:
    n_max = 9 if scale == "full" else 7
    census = canonical_census(n_max)
    F = grammar_D(n_max)
    series = Counter()
    for n in range(1, n_max + 1):
        for (a, b), c in F.terms(n).items():
            series[(n, a, b)] = c
    ok = census == series
    return ok, f"{len(series)} monomials through n={n_max} {'agree' if ok else 'DISAGREE'}"


def check_splitting(scale: str = "full") -> tuple[bool, str]:
    n_max = 8 if scale == "full" else 6
    total = bad = 0
    for n in range(n_max + 1):
        for p in all_permutations(n):
            avoids = not contains(p, (2, 1, 4, 3))
            for g in all_griddings(p):
                total += 1
                bad += gridding_avoids_2143(g) != avoids
    return bad == 0, f"{total} griddings of permutations of length <= {n_max}, {bad} disagreements"


def check_round_trip(scale: str = "full") -> tuple[bool, str]:
    n_max = 9 if scale == "full" else 7
    total = bad = 0
    for n in range(1, n_max + 1):
        for p in iterate_class(BASIS_D, n):
            total += 1
            bad += rebuild(canonical_gridding_D(p)) != p
    return bad == 0, f"{total} members of D_n, n <= {n_max}, {bad} failures"


def check_ratio(scale: str = "full") -> tuple[bool, str]:
    N = 500 if scale == "full" else 120
    d = grammar_D(N, "one", "one").at_unity()
    h = grammar_H(N, "one").at_unity()
    x_half = Fraction(h[N // 2], d[N // 2])
    x_full = Fraction(h[N], d[N])
    err_half, err_full = abs(x_half - RATIO), abs(x_full - RATIO)
    rich = abs(2 * x_full - x_half - RATIO)
    ok = err_full < 0.02 and err_full < err_half and rich < 0.003
    return ok, (f"|H/D - 121/216| = {float(err_full):.5f} at n={N} vs {float(err_half):.5f} at n={N // 2}; "
                f"Richardson error {float(rich):.2e}")


def check_moments(scale: str = "full") -> tuple[bool, str]:
    N = 500 if scale == "full" else 120
    mt, _ = moments(grammar_D(N, "shift", "one"), N, "t", shifted=True)
    ml, vl = moments(grammar_D(N, "one", "shift"), N, "l", shifted=True)
    top_err = abs(float(mt) / N - 0.2)
    mean_rel = float(ml / Fraction(175, 132)) - 1
    sd_rel = math.sqrt(vl) / (math.sqrt(74795) / 132) - 1
    ok = top_err < 0.01 and abs(mean_rel) < 0.02 and abs(sd_rel) < 0.03
    return ok, (f"n={N}: |top mean/n - 1/5| = {top_err:.4f} (<0.01); left mean {float(ml):.4f}, "
                f"rel. error {mean_rel:+.4f} (tol 0.02); left sd {math.sqrt(vl):.4f}, rel. error {sd_rel:+.4f} (tol 0.03)")


def _half_binomial(n: int) -> Fraction:
    c = Fraction(1)
    for j in range(n):
        c *= (Fraction(1, 2) - j) / (j + 1)
    return c * (-1) ** n


def check_transfer(scale: str = "full") -> tuple[bool, str]:
    n = 1000
    exact = _half_binomial(n)
    with mpmath.workdps(64):
        est = asymptotic_estimate(AsymptoticModel(1, Fraction(1), Fraction(1, 2)), n, K=2)
        rel_binom = abs(est / (mpmath.mpf(exact.numerator) / exact.denominator) - 1)
        h = grammar_H(200, "one").at_unity()
        rel = {m: abs(asymptotic_estimate(AsymptoticModel.class_H(), m) / h[m] - 1) for m in (100, 200)}
    ok = rel_binom < 1e-4 and rel[100] < 0.05 and rel[200] < rel[100]
    return ok, (f"(1-z)^(1/2) K=2 rel. error {float(rel_binom):.2e} at n=1000; H K=0 rel. error "
                f"{float(rel[100]):.4f} at n=100, {float(rel[200]):.4f} at n=200")


def check_shape(scale: str = "full") -> tuple[bool, str]:
    n_top = 400 if scale == "full" else 100
    n_left = 200 if scale == "full" else 100
    probs = distribution(closed_form_D(n_top, t="sym"), n_top, "t")
    ks = kolmogorov_distance(probs, n_top / 5, 2 * math.sqrt(n_top) / 5)
    left = distribution(closed_form_D(n_left, l="sym"), n_left, "l")
    p0_err = abs(float(left[0] - RATIO))
    head = left[1:31]
    shape = left[0] == max(left) and all(a >= b for a, b in zip(head, head[1:])) and left[1] < left[0] / 2
    ok = ks < 0.05 and p0_err < 0.02 and shape
    return ok, (f"Kolmogorov distance {ks:.4f} at n={n_top} (limit 0.05); left P(0) - 121/216 = "
                f"{float(left[0] - RATIO):+.4f} at n={n_left} (tol 0.02); mode at 0 and decay {shape}")


def sample_lines(n: int, count: int, seed: int, cls: str = "D", sampler: Sampler | None = None) -> list[str]:
    s = sampler or Sampler(n, cls)
    rng = make_rng(seed)
    return [" ".join(map(str, s.sample(n, rng).values)) for _ in range(count)]


def chi_square_pvalue(observed: list[int], expected: float) -> tuple[float, float]:
    stat = sum((o - expected) ** 2 / expected for o in observed)
    dof = len(observed) - 1
    return stat, float(mpmath.gammainc(dof / 2, stat / 2, mpmath.inf, regularized=True))


def check_sampler(scale: str = "full", seed: int = 2024) -> tuple[bool, str]:
    draws = 50000 if scale == "full" else 5000
    s = Sampler(6, "D")
    lines = sample_lines(6, draws, seed, sampler=s)
    members = [" ".join(map(str, p.values)) for p in iterate_class(BASIS_D, 6)]
    freq = Counter(lines)
    stray = set(freq) - set(members)
    stat, p = chi_square_pvalue([freq[m] for m in members], draws / len(members))
    avoid = all(avoids_all(tuple(map(int, x.split())), BASIS_D) for x in freq)
    again = sample_lines(6, draws, seed, sampler=s)
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    same = digest == hashlib.sha256("\n".join(again).encode()).hexdigest()
    ok = p > 1e-3 and not stray and avoid and same
    return ok, (f"{draws} draws over {len(members)} members: chi2={stat:.1f}, p={p:.3f} (>1e-3); "
                f"all avoid basis {avoid}; reproducible {same}")


CHECKS = [
    (1, "sequence reproduction", check_sequences),
    (2, "triple-derivation agreement", check_triple),
    (3, "census agreement", check_census),
    (4, "splitting equivalence", check_splitting),
    (5, "round trip", check_round_trip),
    (6, "asymptotic constants", check_ratio),
    (7, "moments", check_moments),
    (8, "transfer theorem", check_transfer),
    (9, "distribution shape", check_shape),
    (10, "sampler correctness", check_sampler),
]


ASYMPTOTIC = {6, 7, 9}


def run(scale: str = "full", only: set[int] | None = None) -> list[CheckResult]:
    out = []
    for number, title, fn in CHECKS:
        if only and number not in only:
            continue
        if scale == "fast" and number in ASYMPTOTIC and not only:
            continue
        out.append(_timed(number, title, lambda: fn(scale)))
    return out
