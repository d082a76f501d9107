"""Truncated power series in ``z`` whose coefficients are polynomials in two markers.

Coefficients are exact (Python ``int`` or ``Fraction``) and stored densely in a
numpy object array of shape ``(order + 1, t_cap + 1, l_cap + 1)``: entry
``[n, a, b]`` is the coefficient of ``z^n t^a l^b``.  Products are truncated at
``order`` in ``z`` and at the marker caps.  Dense products go through Kronecker
substitution (one big-integer multiplication, done by GMP when gmpy2 is
importable); products with a short polynomial factor are done term by term.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Iterable

import numpy as np

from .errors import SeriesError

try:
    import gmpy2

    _mpz = gmpy2.mpz
    BIGINT = "gmpy2"
except ImportError:  # pragma: no cover
    _mpz = int
    BIGINT = "int"

MARKERS = ("t", "l")
_AXIS = {"t": 1, "l": 2}

# a factor with at most this many nonzero terms is multiplied term by term
SPARSE_TERMS = 48


def _zeros(shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(0)
    return arr


def _normalize(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


class Series:
    """Exact truncated series; immutable by convention."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: np.ndarray):
        if coeffs.ndim != 3:
            raise SeriesError("coefficient array must have shape (order+1, t_cap+1, l_cap+1)")
        self.coeffs = coeffs

    # ---- construction -------------------------------------------------
    @classmethod
    def zero(cls, order: int, caps: tuple[int, int] = (0, 0)) -> "Series":
        return cls(_zeros((order + 1, caps[0] + 1, caps[1] + 1)))

    @classmethod
    def constant(cls, value, order: int, caps: tuple[int, int] = (0, 0)) -> "Series":
        s = cls.zero(order, caps)
        s.coeffs[0, 0, 0] = _normalize(value)
        return s

    @classmethod
    def from_terms(cls, terms: dict, order: int, caps: tuple[int, int] = (0, 0)) -> "Series":
        """Build from ``{(n, a, b): coeff}``; terms beyond the truncation are dropped."""
        s = cls.zero(order, caps)
        for (n, a, b), c in terms.items():
            if n <= order and a <= caps[0] and b <= caps[1]:
                s.coeffs[n, a, b] += c
        return s

    @classmethod
    def from_list(cls, values: Iterable, order: int | None = None) -> "Series":
        vals = list(values)
        order = len(vals) - 1 if order is None else order
        return cls.from_terms({(n, 0, 0): v for n, v in enumerate(vals)}, order)

    @classmethod
    def z(cls, order: int, caps: tuple[int, int] = (0, 0)) -> "Series":
        return cls.from_terms({(1, 0, 0): 1}, order, caps)

    @classmethod
    def marker(cls, name: str, order: int, caps: tuple[int, int]) -> "Series":
        key = (0, 1, 0) if name == "t" else (0, 0, 1)
        return cls.from_terms({key: 1}, order, caps)

    # ---- shape ---------------------------------------------------------
    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def caps(self) -> tuple[int, int]:
        return self.coeffs.shape[1] - 1, self.coeffs.shape[2] - 1

    def _reshape(self, order: int, caps: tuple[int, int]) -> "Series":
        if (order, caps) == (self.order, self.caps):
            return self
        out = _zeros((order + 1, caps[0] + 1, caps[1] + 1))
        n = min(order, self.order) + 1
        a = min(caps[0], self.caps[0]) + 1
        b = min(caps[1], self.caps[1]) + 1
        out[:n, :a, :b] = self.coeffs[:n, :a, :b]
        return Series(out)

    def truncate(self, order: int) -> "Series":
        return self._reshape(order, self.caps)

    def with_caps(self, caps: tuple[int, int]) -> "Series":
        return self._reshape(self.order, caps)

    def _align(self, other) -> tuple["Series", "Series"]:
        if not isinstance(other, Series):
            other = Series.constant(other, self.order, self.caps)
        order = min(self.order, other.order)
        caps = (max(self.caps[0], other.caps[0]), max(self.caps[1], other.caps[1]))
        return self._reshape(order, caps), other._reshape(order, caps)

    # ---- inspection ----------------------------------------------------
    def coeff(self, n: int) -> np.ndarray:
        """Marker polynomial of ``z^n`` as a 2-d array indexed ``[t_degree, l_degree]``."""
        return self.coeffs[n]

    def terms(self, n: int) -> dict[tuple[int, int], object]:
        c = self.coeffs[n]
        return {(a, b): _normalize(c[a, b]) for a, b in zip(*np.nonzero(c != 0))}

    def at_unity(self) -> list:
        """Coefficients with every marker set to 1."""
        return [_normalize(x) for x in self.coeffs.sum(axis=(1, 2))]

    def marker_degree(self) -> tuple[int, int]:
        nz = np.argwhere(self.coeffs != 0)
        if len(nz) == 0:
            return (0, 0)
        return int(nz[:, 1].max()), int(nz[:, 2].max())

    def nnz(self) -> int:
        return int((self.coeffs != 0).sum())

    def __getitem__(self, key):
        return self.coeffs[key]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        a, b = self._align(other)
        return bool(np.all(a.coeffs == b.coeffs))

    def __repr__(self) -> str:
        head = ", ".join(str(x) for x in self.at_unity()[:8])
        return f"Series(order={self.order}, caps={self.caps}, at_unity=[{head}, ...])"

    # ---- ring operations ------------------------------------------------
    def __add__(self, other) -> "Series":
        a, b = self._align(other)
        return Series(a.coeffs + b.coeffs)

    __radd__ = __add__

    def __sub__(self, other) -> "Series":
        a, b = self._align(other)
        return Series(a.coeffs - b.coeffs)

    def __rsub__(self, other) -> "Series":
        a, b = self._align(other)
        return Series(b.coeffs - a.coeffs)

    def __neg__(self) -> "Series":
        return Series(-self.coeffs)

    def __mul__(self, other) -> "Series":
        if isinstance(other, (int, Rational)) and not isinstance(other, Series):
            return Series(self.coeffs * other)
        a, b = self._align(other)
        return _multiply(a, b)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Series":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Series.constant(1, self.order, self.caps)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "Series":
        """Multiply by ``z^k``; a negative ``k`` divides and needs the low coefficients to vanish."""
        out = _zeros(self.coeffs.shape)
        if k >= 0:
            if k <= self.order:
                out[k:] = self.coeffs[: self.order + 1 - k]
            return Series(out)
        k = -k
        if np.any(self.coeffs[:k] != 0):
            raise SeriesError(f"cannot divide by z^{k}: low-order coefficients are nonzero")
        # the top k coefficients are unknown after division; shrink the order instead
        return Series(self.coeffs[k:].copy())

    def invert(self) -> "Series":
        """Multiplicative inverse; the constant term must be a nonzero marker-free number."""
        c0 = self.coeffs[0]
        a0 = c0[0, 0]
        if a0 == 0 or np.any(c0.ravel()[1:] != 0):
            raise SeriesError("invert needs a nonzero constant term free of markers")
        y = Series.constant(Fraction(1) / a0 if not (a0 in (1, -1)) else a0, 0, self.caps)
        prec = 1
        while prec <= self.order:
            prec = min(2 * prec, self.order + 1)
            f = self.truncate(prec - 1)
            y = y.truncate(prec - 1)
            y = y * (2 - f * y)
        return y.truncate(self.order)

    def seq(self) -> "Series":
        """``1 / (1 - s)`` for ``s`` with zero constant term."""
        if np.any(self.coeffs[0] != 0):
            raise SeriesError("seq needs a zero constant term")
        return (1 - self).invert()

    def seq_plus(self) -> "Series":
        """``s / (1 - s)``."""
        return self * self.seq()

    def divide(self, other: "Series", exact: bool = True) -> "Series":
        """Quotient by a series whose constant term is a polynomial in at most one marker.

        With ``exact`` the quotient's marker coefficients must be polynomials that
        fit inside the caps, and an inexact division raises.  Without it the marker
        axis is treated as a truncated power series (as for shifted markers).
        """
        a, b = self._align(other)
        rows = [k for k in range(b.order + 1) if np.any(b.coeffs[k] != 0)]
        if not rows or rows[0] != 0:
            raise SeriesError("divisor needs a nonzero constant term")
        b0 = b.coeffs[0]
        out = _zeros(a.coeffs.shape)
        caps = a.caps
        for n in range(a.order + 1):
            acc = a.coeffs[n].copy()
            for k in rows[1:]:
                if k > n:
                    break
                acc = acc - _poly_mul(b.coeffs[k], out[n - k], caps)
            out[n] = _poly_exact_div(acc, b0, exact)
        return Series(out)

    def __truediv__(self, other) -> "Series":
        if isinstance(other, Series):
            return self.divide(other)
        return Series(np.vectorize(lambda x: _normalize(Fraction(x) / other), otypes=[object])(self.coeffs))

    def sqrt(self) -> "Series":
        """Square root with constant term 1.

        A radicand that is a polynomial of low degree in ``z`` uses the linear
        recurrence satisfied by its square root; anything else uses Newton
        iteration with precision doubling.
        """
        c0 = self.coeffs[0]
        if c0[0, 0] != 1 or np.any(c0.ravel()[1:] != 0):
            raise SeriesError("sqrt needs constant term 1")
        rows = [k for k in range(self.order + 1) if np.any(self.coeffs[k] != 0)]
        if rows[-1] <= 8:
            return self._sqrt_poly(rows[-1])
        return self.sqrt_newton()

    def sqrt_newton(self) -> "Series":
        y = Series.constant(1, 0, self.caps)
        prec = 1
        while prec <= self.order:
            prec = min(2 * prec, self.order + 1)
            f = self.truncate(prec - 1)
            y = y.truncate(prec - 1)
            y = (y + f * y.invert()) * Fraction(1, 2)
        return Series(np.vectorize(_normalize, otypes=[object])(y.coeffs)) if y.order == self.order else y.truncate(self.order)

    def _sqrt_poly(self, d: int) -> "Series":
        # f y' = f' y / 2 gives  2 m y_m = sum_k (3k - 2m) f_k y_{m-k}
        f = self.coeffs
        caps = self.caps
        out = _zeros(f.shape)
        out[0, 0, 0] = 1
        for m in range(1, self.order + 1):
            acc = _zeros(f.shape[1:])
            for k in range(1, min(d, m) + 1):
                if np.any(f[k] != 0):
                    acc = acc + _poly_mul(f[k], out[m - k], caps) * (3 * k - 2 * m)
            out[m] = _poly_exact_div(acc, _const_poly(2 * m, f.shape[1:]))
        return Series(out)

    def derivative(self, var: str = "z") -> "Series":
        c = self.coeffs
        if var == "z":
            out = _zeros(c.shape)
            for n in range(1, self.order + 1):
                out[n - 1] = c[n] * n
            return Series(out[: self.order]) if self.order > 0 else Series(out)
        axis = _AXIS[var]
        out = _zeros(c.shape)
        deg = c.shape[axis]
        for a in range(1, deg):
            if axis == 1:
                out[:, a - 1, :] = c[:, a, :] * a
            else:
                out[:, :, a - 1] = c[:, :, a] * a
        return Series(out)

    def substitute(self, **values) -> "Series":
        """Set markers to numbers, e.g. ``s.substitute(t=1)``; the marker's cap drops to 0."""
        c = self.coeffs
        for var, val in values.items():
            axis = _AXIS[var]
            powers = [val ** k for k in range(c.shape[axis])]
            shape = [1, 1, 1]
            shape[axis] = len(powers)
            w = np.array(powers, dtype=object).reshape(shape)
            c = (c * w).sum(axis=axis, keepdims=True)
        return Series(c)


def as_series(x, order: int, caps=(0, 0)) -> Series:
    return x if isinstance(x, Series) else Series.constant(x, order, caps)


# ---- marker polynomial helpers ------------------------------------------------

def _const_poly(c, shape) -> np.ndarray:
    p = _zeros(shape)
    p[0, 0] = c
    return p


def _poly_mul(p: np.ndarray, q: np.ndarray, caps: tuple[int, int]) -> np.ndarray:
    out = _zeros((caps[0] + 1, caps[1] + 1))
    nz_p = list(zip(*np.nonzero(p != 0)))
    nz_q = list(zip(*np.nonzero(q != 0)))
    if len(nz_p) > len(nz_q):
        p, q, nz_p = q, p, nz_q
    for a, b in nz_p:
        if a > caps[0] or b > caps[1]:
            continue
        ha = min(caps[0] + 1 - a, q.shape[0])
        hb = min(caps[1] + 1 - b, q.shape[1])
        out[a:a + ha, b:b + hb] += q[:ha, :hb] * p[a, b]
    return out


def _poly_exact_div(p: np.ndarray, d: np.ndarray, exact: bool = True) -> np.ndarray:
    nz = list(zip(*np.nonzero(d != 0)))
    if not nz:
        raise SeriesError("division by a zero polynomial")
    axes = {a for a, _ in nz}, {b for _, b in nz}
    if axes[0] == {0} and axes[1] == {0}:
        c = d[0, 0]
        return np.vectorize(lambda x: _exact(x, c), otypes=[object])(p)
    if axes[0] != {0} and axes[1] != {0}:
        raise SeriesError("exact division supports divisors in one marker only")
    axis = 0 if axes[0] != {0} else 1
    dv = d[:, 0] if axis == 0 else d[0, :]
    dvec = [dv[k] for k in range(len(dv))]
    while dvec and dvec[-1] == 0:
        dvec.pop()
    if dvec[0] == 0:
        raise SeriesError("divisor constant term in the marker must be nonzero")
    pp = p if axis == 0 else p.T
    length = pp.shape[0]
    q = _zeros(pp.shape)
    for i in range(length):
        acc = pp[i].copy()
        for j in range(1, min(len(dvec), i + 1)):
            if dvec[j] != 0:
                acc = acc - q[i - j] * dvec[j]
        q[i] = np.vectorize(lambda x: _exact(x, dvec[0]), otypes=[object])(acc)
    # the product must not spill past the cap, otherwise the quotient is not a polynomial
    for i in range(length, length + len(dvec) - 1 if exact else length):
        spill = _zeros(pp.shape[1:])
        for j in range(1, len(dvec)):
            if 0 <= i - j < length and dvec[j] != 0:
                spill = spill + q[i - j] * dvec[j]
        if np.any(spill != 0):
            raise SeriesError("inexact division: quotient is not a polynomial within the marker cap")
    return q if axis == 0 else q.T


def _exact(x, c):
    if isinstance(x, int) and isinstance(c, int):
        qv, rv = divmod(x, c)
        if rv == 0:
            return qv
    return _normalize(Fraction(x) / c)


# ---- multiplication -------------------------------------------------------------

def _multiply(a: Series, b: Series) -> Series:
    na, nb = a.nnz(), b.nnz()
    if na == 0 or nb == 0:
        return Series.zero(a.order, a.caps)
    if min(na, nb) <= SPARSE_TERMS:
        return _multiply_sparse(a, b) if na <= nb else _multiply_sparse(b, a)
    return _multiply_kronecker(a, b)


def _multiply_sparse(small: Series, dense: Series) -> Series:
    N = dense.order
    ta, la = dense.caps
    out = _zeros(dense.coeffs.shape)
    d = dense.coeffs
    for n, a, b in zip(*np.nonzero(small.coeffs != 0)):
        c = small.coeffs[n, a, b]
        out[n:, a:, b:] += d[: N + 1 - n, : ta + 1 - a, : la + 1 - b] * c
    return Series(out)


def _to_integers(lst: list) -> tuple[list, int]:
    """Scale a flat coefficient list to integers; returns the list and the scale."""
    kinds = set(map(type, lst))
    if kinds <= {int}:
        return lst, 1
    den = 1
    for x in lst:
        if type(x) is Fraction:
            den = lcm(den, x.denominator)
    return [int(x * den) for x in lst], den


def _pack(lst: list, nbytes: int):
    """``sum(c_i * 2^(8 * nbytes * i))`` for signed ``c_i`` of fewer than ``8 * nbytes - 1`` bits."""
    body = b"".join([x.to_bytes(nbytes, "little", signed=True) for x in lst])
    packed = _mpz(int.from_bytes(body, "little"))
    if min(lst) < 0:
        one = (1).to_bytes(nbytes, "little")
        zero = bytes(nbytes)
        borrow = int.from_bytes(b"".join([one if x < 0 else zero for x in lst]), "little")
        packed -= _mpz(borrow) << (8 * nbytes)
    return packed


def _multiply_kronecker(a: Series, b: Series) -> Series:
    N = a.order
    tcap, lcap = a.caps
    da, db = a.marker_degree(), b.marker_degree()
    # strides wide enough that no marker-degree sum spills into the next slot
    wt = da[0] + db[0] + 1
    wl = da[1] + db[1] + 1

    def laid_out(s: Series, deg):
        if (wt, wl) == (deg[0] + 1, deg[1] + 1) == s.coeffs.shape[1:]:
            lst = s.coeffs.ravel().tolist()
        else:
            grid = _zeros((N + 1, wt, wl))
            grid[:, : deg[0] + 1, : deg[1] + 1] = s.coeffs[:, : deg[0] + 1, : deg[1] + 1]
            lst = grid.ravel().tolist()
        return _to_integers(lst)

    fa, den_a = laid_out(a, da)
    fb, den_b = laid_out(b, db)
    bits = max(map(abs, fa)).bit_length() + max(map(abs, fb)).bit_length()
    terms = min(len(fa) - fa.count(0), len(fb) - fb.count(0))
    nbytes = (bits + terms.bit_length() + 2 + 7) // 8
    width = 8 * nbytes

    slots = len(fa)
    bias = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * slots, "little")
    prod = _pack(fa, nbytes) * _pack(fb, nbytes) + bias
    raw = memoryview(int(prod & ((_mpz(1) << (width * slots)) - 1)).to_bytes(slots * nbytes, "little"))
    half = 1 << (width - 1)
    frm = int.from_bytes
    vals = [frm(raw[i: i + nbytes], "little") - half for i in range(0, slots * nbytes, nbytes)]

    block = np.empty(slots, dtype=object)
    block[:] = vals
    block = block.reshape(N + 1, wt, wl)
    out = _zeros(a.coeffs.shape)
    rt, rl = min(wt - 1, tcap), min(wl - 1, lcap)
    out[:, : rt + 1, : rl + 1] = block[:, : rt + 1, : rl + 1]
    den = den_a * den_b
    if den != 1:
        out = np.vectorize(lambda x: _normalize(Fraction(x, den)), otypes=[object])(out)
    return Series(out)


# ---- fixed points --------------------------------------------------------------

def solve_system(equations, order: int, caps: tuple[int, int] = (0, 0), pass_cap: int | None = None) -> dict[str, Series]:
    """Joint fixed point of ``X_i = F_i(X)`` by Gauss-Seidel passes of growing precision.

    ``equations`` is an ordered list of ``(name, F)`` where ``F`` maps the current
    state (a dict of series) to the new value of ``name``.  Pass ``p`` works at
    precision ``p`` and fixes degree ``p`` of every unknown, provided each
    right-hand side involves its own unknown, and those later in the list, only
    through terms of positive valuation.  After the precision reaches ``order``,
    passes repeat until two consecutive ones agree.
    """
    cap = order + 2 if pass_cap is None else pass_cap
    state = {name: Series.zero(0, caps) for name, _ in equations}
    passes = 0
    prec = 0
    while True:
        passes += 1
        if passes > cap:
            raise SeriesError(f"fixed point did not settle within {cap} passes")
        trunc = {k: v._reshape(prec, caps) for k, v in state.items()}
        before = dict(trunc)
        for name, rhs in equations:
            trunc[name] = as_series(rhs(trunc), prec, caps)._reshape(prec, caps)
        state = trunc
        if prec == order:
            if all(state[k] == before[k] for k in state):
                return state
        else:
            prec += 1


def solve_tree(core: Series, method: str = "newton") -> Series:
    """The series ``T`` with ``T(0) = 0`` and ``T = core + T^2``.

    ``method="newton"`` doubles the precision at each step and then checks that
    one literal pass of ``T -> core + T^2`` leaves the result unchanged;
    ``method="fixed_point"`` runs the growing-precision iteration throughout.

    >>> solve_tree(Series.z(5)).at_unity()
    [0, 1, 1, 2, 5, 14]
    """
    if np.any(core.coeffs[0] != 0):
        raise SeriesError("tree core must have zero constant term")
    if method == "fixed_point":
        return solve_system([("T", lambda s: core.truncate(s["T"].order) + s["T"] * s["T"])],
                            core.order, core.caps)["T"]
    if method != "newton":
        raise ValueError(f"unknown method {method!r}")
    T = Series.zero(0, core.caps)
    prec = 1
    while prec <= core.order:
        prec = min(2 * prec, core.order + 1)
        c = core.truncate(prec - 1)
        T = T.truncate(prec - 1)
        T = T - (T - T * T - c) * (1 - 2 * T).invert()
    if core + T * T != T:
        raise SeriesError("tree equation not satisfied after Newton iteration")
    return T
