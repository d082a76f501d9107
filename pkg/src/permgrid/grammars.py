"""Generating functions of the two classes, three ways.

* ``grammar_H`` / ``grammar_D`` follow the combinatorial specifications symbol by
  symbol (paths, trees, the upper tree ``U``, left paths ``L``, split trees ``Q``
  and ``S``).
* ``closed_form_H`` / ``closed_form_D`` expand the algebraic closed forms.
* ``polysystem_D`` solves the positive polynomial system in ``R1 .. R5, T, S, D``.

Marker modes
------------
Each marker (``t`` counts top points, ``l`` counts left points) is one of

``"sym"``    kept symbolic, degree cap ``N``;
``"one"``    set to 1 (the marker axis has cap 0);
``"shift"``  replaced by ``1 + u`` and truncated at ``u^2``, which is all the
             first two factorial moments need.

Every generating function here has constant term 0 (the empty permutation is
not counted).
"""

from __future__ import annotations

from functools import lru_cache

from .errors import SeriesError
from .series import Series, solve_tree

MODES = ("sym", "one", "shift")


def _cap(mode: str, N: int) -> int:
    if mode not in MODES:
        raise ValueError(f"marker mode must be one of {MODES}, got {mode!r}")
    return {"sym": N, "one": 0, "shift": 2}[mode]


class _Ring:
    """The variables ``z, t, l`` of one computation, sharing order and caps."""

    def __init__(self, N: int, t: str, l: str, slack: int = 0):
        if N < 1:
            raise SeriesError("order must be at least 1")
        self.N = N
        self.modes = (t, l)
        self.caps = (_cap(t, N + slack), _cap(l, N + slack))
        self.z = Series.z(N, self.caps)
        self.one = Series.constant(1, N, self.caps)
        self.t = self._marker("t", t)
        self.l = self._marker("l", l)

    def _marker(self, name: str, mode: str) -> Series:
        if mode == "one":
            return self.one
        m = Series.marker(name, self.N, self.caps)
        return m if mode == "sym" else self.one + m

    def poly(self, terms: dict) -> Series:
        """Polynomial from ``{(z_deg, t_deg, l_deg): coeff}`` in the ring's markers."""
        out = Series.zero(self.N, self.caps)
        for (n, a, b), c in terms.items():
            mono = self.z_power(n)
            for _ in range(a):
                mono = mono * self.t
            for _ in range(b):
                mono = mono * self.l
            out = out + mono * c
        return out

    def z_power(self, n: int) -> Series:
        return self.one.shift(n)


def _components(N: int, t: str, l: str, want_d: bool) -> dict[str, Series]:
    R = _Ring(N, t, l)
    z, tm, lm = R.z, R.t, R.l
    tz = tm * z
    P = z.seq_plus()                                   # non-empty path
    T = solve_tree(z * tz.seq())                       # trees with top points hanging off vertices
    seqT = T.seq()
    chain = T.seq_plus() * (z * seqT).seq()            # Seq+(T) x Seq(Z Seq(T))
    U = P + P * z * chain                              # the upper tree
    H = U * seqT
    out = {"P": P, "T": T, "U": U, "H": H}
    if not want_d:
        return out
    lz = lm * z
    seq_lz = lz.seq()
    L = z * (z * seq_lz).seq()                         # trees carrying left points
    Q = (L - P) * tz.seq()
    S = Q + Q * chain
    tail = (seq_lz * (T + S)).seq()
    D = H + H * S * tail * seq_lz
    out.update({"L": L, "Q": Q, "S": S, "D": D})
    return out


@lru_cache(maxsize=16)
def grammar_components(N: int, t: str = "sym", l: str = "sym", cls: str = "D") -> dict[str, Series]:
    """Every intermediate symbol of the grammar (``P, T, U, H`` and for D also ``L, Q, S, D``)."""
    return _components(N, t, l, cls == "D")


def grammar_H(N: int, t: str = "sym") -> Series:
    """``H(z, t)``, with ``t`` marking top points of the canonical gridding."""
    return grammar_components(N, t, "one", "H")["H"]


def grammar_D(N: int, t: str = "sym", l: str = "sym") -> Series:
    """``D(z, t, l)``, with ``t`` marking top points and ``l`` left points."""
    return grammar_components(N, t, l, "D")["D"]


# ---- closed forms ---------------------------------------------------------------------

def _radicand(R: _Ring) -> Series:
    # 1 - (2t + 4) z + t (t + 4) z^2
    t, z = R.t, R.z
    return 1 - (2 * t + 4) * z + t * (t + 4) * z * z


def closed_form_H(N: int, t: str = "sym") -> Series:
    """``[1 - (t+2)z + 2tz^2 - sqrt(1 - (2t+4)z + t(t+4)z^2)] / (2z(t + 1 - tz))``."""
    exact = t != "shift"
    R = _Ring(N + 1, t, "one", slack=4)
    tm, z = R.t, R.z
    num = 1 - (tm + 2) * z + 2 * tm * z * z - _radicand(R).sqrt()
    den = 2 * (tm + 1 - tm * z)
    return _finish(num.shift(-1).divide(den.truncate(N), exact=exact), N, t, "one")


def closed_form_D(N: int, t: str = "one", l: str = "one") -> Series:
    """Closed forms of ``D(z)``, ``D(z, t, 1)`` and ``D(z, 1, l)``.

    At most one marker may be kept; the trivariate closed form is not used.
    """
    if t != "one" and l != "one":
        raise SeriesError("closed forms exist for D(z), D(z,t,1) and D(z,1,l) only")
    if t != "one":
        return _closed_D_top(N, t)
    if l != "one":
        return _closed_D_left(N, l)
    R = _Ring(N, "one", "one")
    z = R.z
    sq = (1 - 6 * z + 5 * z * z).sqrt()
    num = (1 - 2 * z) * (-1 + 5 * z - 7 * z ** 2 + 2 * z ** 3 + (1 - z) * sq)
    den = 1 - 10 * z + 24 * z ** 2 - 20 * z ** 3 + 4 * z ** 4
    return num.divide(den)


def _closed_D_top(N: int, t: str) -> Series:
    R = _Ring(N, t, "one", slack=6)
    tm, z = R.t, R.z
    P3 = (1 - 2 * z) * (1 - tm * z) * ((1 + tm) * (1 - 3 * z) + 2 * tm * z * z)
    t2 = tm * tm
    P4 = (-1 + (7 + 3 * tm + t2) * z - (14 + 14 * tm + 6 * t2) * z ** 2 + (9 + 22 * tm + 13 * t2) * z ** 3
          - (12 * tm + 12 * t2) * z ** 4 + 4 * t2 * z ** 5)
    num = (1 - 2 * z) * (P3 - (1 - z) * (1 + tm - 2 * tm * z) * _radicand(R).sqrt())
    return _finish(num.divide(2 * P4, exact=t != "shift"), N, t, "one")


def _closed_D_left(N: int, l: str) -> Series:
    R = _Ring(N + 1, "one", l, slack=8)
    lm, z = R.l, R.z
    l2, l3, l4 = lm * lm, lm * lm * lm, lm * lm * lm * lm
    P1 = ((1 - lm) - z * (3 - 3 * lm - 2 * l2) + z ** 2 * (2 - 4 * lm - 7 * l2 - l3)
          + z ** 3 * (2 * lm + 9 * l2 + 3 * l3) - z ** 4 * (2 * l2 + 2 * l3))
    P2 = ((2 - 3 * lm) - z * (3 - 5 * lm - 8 * l2) + z ** 2 * (1 - 3 * lm - 15 * l2 - 7 * l3)
          + z ** 3 * (lm + 8 * l2 + 9 * l3 + 2 * l4) - z ** 4 * (l2 + 2 * l3 + l4))
    sq = (1 - 6 * z + 5 * z * z).sqrt()
    num = (1 - z - z * lm) * (P1 - (1 - z * lm) * (1 - lm + z * lm + z * l2) * sq)
    quotient = num.shift(-1).divide((2 * P2).truncate(N), exact=l != "shift")
    return _finish(quotient, N, "one", l)


def _finish(s: Series, N: int, t: str, l: str) -> Series:
    return s._reshape(N, (_cap(t, N), _cap(l, N)))


# ---- the positive polynomial system -----------------------------------------------------

POLYSYSTEM = ("R1", "R2", "T", "R3", "R4", "S", "R5", "D")


def _polysystem_rhs(R: _Ring) -> list:
    z, t = R.z, R.t
    z3 = R.z_power(3)

    def cut(x: Series, s) -> Series:
        return x.truncate(s["R1"].order)

    return [
        ("R1", lambda s: 1 + cut(z, s) * s["R1"]),
        ("R2", lambda s: 1 + cut(z * t, s) * s["R2"]),
        ("T", lambda s: cut(z, s) * s["R2"] + s["T"] * s["T"]),
        ("R3", lambda s: 1 + s["T"] * s["R3"]),
        ("R4", lambda s: 1 + cut(z, s) * s["R3"] * s["R4"]),
        ("S", lambda s: cut(z3, s) * s["R1"] * s["R1"] * s["R2"] * (1 + s["T"] * s["R3"] * s["R4"])
         + cut(z, s) * s["R1"] * s["S"]),
        ("R5", lambda s: 1 + s["R1"] * (s["T"] + s["S"]) * s["R5"]),
        ("D", lambda s: cut(z, s) * s["R1"] * s["R3"] * (1 + cut(z, s) * s["T"] * s["R3"] * s["R4"])
         * (1 + s["R1"] * s["S"] * s["R5"])),
    ]


def polysystem_components(N: int, t: str = "sym", method: str = "sweep") -> dict[str, Series]:
    """Solve the system for ``R1 .. R5, T, S, D``.

    The system is triangular in the listed order and every equation other than
    the one for ``T`` is linear in its own unknown.  ``method="sweep"`` solves each
    equation exactly in turn and then requires one literal pass of all eight
    equations to leave the solution unchanged.  ``method="fixed_point"`` runs the
    growing-precision Gauss-Seidel iteration instead (slow; for cross-checks).
    """
    from .series import solve_system

    R = _Ring(N, t, "one")
    eqs = _polysystem_rhs(R)
    if method == "fixed_point":
        return solve_system(eqs, N, R.caps)
    if method != "sweep":
        raise ValueError(f"unknown method {method!r}")
    z, tm = R.z, R.t
    s: dict[str, Series] = {}
    s["R1"] = (1 - z).invert()
    s["R2"] = (1 - z * tm).invert()
    s["T"] = solve_tree(z * s["R2"])
    s["R3"] = (1 - s["T"]).invert()
    s["R4"] = (1 - z * s["R3"]).invert()
    s["S"] = (R.z_power(3) * s["R1"] * s["R1"] * s["R2"] * (1 + s["T"] * s["R3"] * s["R4"])) * (1 - z * s["R1"]).invert()
    s["R5"] = (1 - s["R1"] * (s["T"] + s["S"])).invert()
    s["D"] = eqs[-1][1](s)
    for name, rhs in eqs:
        if rhs(s) != s[name]:
            raise SeriesError(f"polynomial system: equation for {name} not satisfied")
    return s


def polysystem_D(N: int, t: str = "sym") -> Series:
    """``D(z, t, 1)`` from the positive polynomial system."""
    return polysystem_components(N, t)["D"]
