"""Closed-form constants, estimates and length-function bounds.

Everything is evaluated with mpmath at 50 significant digits; factorials and
binomials are exact integers and Bernoulli numbers exact fractions.  Values
are rounded only when a table is emitted.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath

DPS = 50
mpmath.mp.dps = DPS

ExactRational = Fraction

CASES = ("R3", "r_eq_R1", "r_eq_tR1_tge2")

TABLE1_R = (3, 4, 5, 6, 7, 8, 9, 10, 25, 50, 100, 125, 150)
TABLE2_R = (4, 5, 6, 7, 8, 9, 10, 25, 50, 100, 125, 150)


class HypothesisError(ValueError):
    """Raised when the counting bound's hypothesis C(wR, R-1) <= q+1 fails."""


def _check_R(R: int) -> None:
    if R < 3:
        raise ValueError(f"R >= 3 required (got R={R})")


def c_new(R: int) -> mpmath.mpf:
    """(R!/R^(R-2))^(1/R)."""
    _check_R(R)
    return mpmath.root(mpmath.mpf(factorial(R)) / mpmath.mpf(R) ** (R - 2), R)


def c_knw(R: int, case: str) -> mpmath.mpf:
    _check_R(R)
    if case == "R3":
        if R != 3:
            raise ValueError(f"case R3 applies only to R=3 (got R={R})")
        return mpmath.cbrt(18)
    if case == "r_eq_R1":
        return mpmath.mpf(R) / (R - 1) * mpmath.root(R * (R - 1) * factorial(R), R)
    if case == "r_eq_tR1_tge2":
        return mpmath.mpf("3.43") * R
    raise ValueError(f"unknown case {case!r}; expected one of {CASES}")


def ratio(R: int, case: str) -> mpmath.mpf:
    return c_knw(R, case) / c_new(R)


def ratio_closed_form(R: int) -> mpmath.mpf:
    """c_knw/c_new for r = R+1, simplified: R^2/(R-1) * ((R-1)/R)^(1/R)."""
    _check_R(R)
    return mpmath.mpf(R) ** 2 / (R - 1) * mpmath.root(mpmath.mpf(R - 1) / R, R)


def stirling_bounds(R: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    _check_R(R)
    lower = mpmath.root(2 * mpmath.pi * mpmath.mpf(R) ** 5, 2 * R) / mpmath.e
    upper = lower * mpmath.exp(mpmath.mpf(1) / (12 * R * R))
    return lower, upper


@lru_cache(maxsize=None)
def _bernoulli_all(n: int) -> tuple[Fraction, ...]:
    # sum_{k<m} C(m+1, k) B_k = -(m+1) B_m, with B_1 = -1/2
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return tuple(B)


def bernoulli(m: int) -> Fraction:
    if m < 2 or m % 2:
        raise ValueError(f"bernoulli() takes an even m >= 2 (got {m})")
    return _bernoulli_all(m)[m]


def _mpq(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def D_minus(w, q: int, R: int) -> mpmath.mpf:
    """Bernoulli-sum lower part: Faulhaber's formula for sum_{u<w} u^(R-1), over q+1."""
    v = mpmath.mpf(w) - 1
    s = v**R / (R * (q + 1)) + v ** (R - 1) / (2 * (q + 1))
    for j in range(1, -(-(R - 2) // 2) + 1):
        s += _mpq(bernoulli(2 * j) / (2 * j)) * comb(R - 1, 2 * j - 1) * v ** (R - 2 * j) / (q + 1)
    return s


def D_plus(w, q: int, R: int) -> mpmath.mpf:
    """Bernoulli-sum upper part: sum_{m<=w} m^(2R-2), over 2q^2."""
    v = mpmath.mpf(w)
    q2 = mpmath.mpf(q) ** 2
    s = v ** (2 * R - 1) / (2 * (2 * R - 1) * q2) + v ** (2 * R - 2) / (4 * q2)
    for j in range(1, R):
        s += _mpq(bernoulli(2 * j) / (2 * j)) * comb(2 * R - 2, 2 * j - 1) * v ** (2 * R - 2 * j - 1) / (2 * q2)
    return s


def D_plus_k_bound(k, q: int, R: int) -> mpmath.mpf:
    """Upper estimate of D_plus at w = (k q ln q)^(1/R) + 1, with (k+1) q ln q in place of w^R."""
    x = (mpmath.mpf(k) + 1) * q * mpmath.log(q)
    q2 = mpmath.mpf(q) ** 2
    s = x ** (2 - mpmath.mpf(1) / R) / (2 * (2 * R - 1) * q2) + x ** (2 - mpmath.mpf(2) / R) / (4 * q2)
    for j in range(1, R):
        s += _mpq(bernoulli(2 * j) / (2 * j)) * comb(2 * R - 2, 2 * j - 1) * x ** (2 - mpmath.mpf(2 * j - 1) / R) / (2 * q2)
    return s


def G_min_lower(w: int, q: int, R: int) -> mpmath.mpf:
    """q^(R-3) * B * (q + 1/2 - B/2) with B = C(wR, R-1); needs B <= q+1."""
    B = comb(w * R, R - 1)
    if B > q + 1:
        raise HypothesisError(f"B_(w,1) = C({w * R},{R - 1}) = {B} exceeds q+1 = {q + 1}")
    return mpmath.mpf(q) ** (R - 3) * B * (q + mpmath.mpf(1) / 2 - mpmath.mpf(B) / 2)


@dataclass
class Trajectory:
    values: list[float]
    truncated_at: int | None = None  # first w where the hypothesis fails


def U_upper_trajectory(q: int, R: int, w_max: int) -> Trajectory:
    """Upper bounds on #U_w for w = 0..w_max (the list stops early if the hypothesis fails)."""
    cur = mpmath.mpf(q) ** R
    out = [float(cur)]
    denom = mpmath.mpf(q) ** (R - 2) * (q + 1)
    for m in range(1, w_max + 1):
        try:
            g = G_min_lower(m, q, R)
        except HypothesisError:
            return Trajectory(out, truncated_at=m)
        cur *= 1 - g / denom
        out.append(float(cur))
    return Trajectory(out)


def f_w(q: int, R: int, w: int) -> mpmath.mpf:
    """Product of (1 - G_min_lower(m)/(q^(R-2)(q+1))) over m = 1..w."""
    denom = mpmath.mpf(q) ** (R - 2) * (q + 1)
    out = mpmath.mpf(1)
    for m in range(1, w + 1):
        out *= 1 - G_min_lower(m, q, R) / denom
    return out


def f_w_exp_bound(q: int, R: int, w: int) -> mpmath.mpf:
    a = mpmath.mpf(R) ** R / factorial(R)
    return mpmath.exp(a * (-D_minus(w, q, R) + a * D_plus(w, q, R)))


def sufficiency_margin(w, q: int, R: int) -> mpmath.mpf:
    """LHS - RHS of the sufficient-w inequality; >= 0 means w steps suffice."""
    a = mpmath.mpf(R) ** R / factorial(R)
    return D_minus(w, q, R) - a * D_plus(w, q, R) - mpmath.mpf(factorial(R)) / mpmath.mpf(R) ** (R - 1) * mpmath.log(q)


def w_sufficient(q: int, R: int) -> int:
    """ceil(c_new(R) * (q ln q)^(1/R) + 1)."""
    _check_R(R)
    if q < 2:
        raise ValueError("q >= 2 required")
    return int(mpmath.ceil(c_new(R) * mpmath.root(q * mpmath.log(q), R) + 1))


def solve_w(q: int, R: int, w_cap: int = 10**12) -> int | None:
    """Smallest integer w satisfying the sufficient-w inequality, or None.

    The margin is a polynomial in w that rises and then falls, so a
    geometric scan finds a feasible w and bisection finds the first one.
    """
    lo, w = 1, 1.0
    if sufficiency_margin(1, q, R) >= 0:
        return 1
    while w <= w_cap:
        w *= 1.05
        hi = int(w) + 1
        if sufficiency_margin(hi, q, R) >= 0:
            break
        lo = hi
    else:
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if sufficiency_margin(mid, q, R) >= 0:
            hi = mid
        else:
            lo = mid
    return hi


def smallest_feasible_k(q: int, R: int, grid=None) -> float | None:
    """Diagnostic: least k on a grid with w = (k q ln q)^(1/R) + 1 meeting the inequality."""
    grid = grid if grid is not None else [x / 100 for x in range(1, 2001)]
    lq = q * mpmath.log(q)
    for k in grid:
        if sufficiency_margin(mpmath.root(k * lq, R) + 1, q, R) >= 0:
            return float(k)
    return None


def length_bound(q: int, R: int, t: int = 1) -> mpmath.mpf:
    """Upper bound on the length of a covering code with r = tR + 1."""
    _check_R(R)
    if t < 1:
        raise ValueError("t >= 1 required")
    r = t * R + 1
    lq = mpmath.root(mpmath.log(q), R)
    e1 = mpmath.mpf(r - R) / R
    e2 = mpmath.mpf(r - R - 1) / R
    qq = mpmath.mpf(q)
    return c_new(R) * qq**e1 * lq + (1 + R) * qq**e2 + R * (qq**e2 - 1) / (q - 1)


@dataclass
class BoundReport:
    R: int
    c_new: float
    c_knw: dict[str, float]
    ratio: dict[str, float]
    stirling_lower: float
    stirling_upper: float
    per_qt: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def report(R: int, q: int | None = None, t: int | None = None) -> BoundReport:
    lo, hi = stirling_bounds(R)
    cases = [c for c in CASES if c != "R3" or R == 3]
    rep = BoundReport(
        R=R,
        c_new=float(c_new(R)),
        c_knw={c: float(c_knw(R, c)) for c in cases},
        ratio={c: float(ratio(R, c)) for c in cases},
        stirling_lower=float(lo),
        stirling_upper=float(hi),
    )
    if q is not None:
        ts = [t] if t is not None else [1]
        for tt in ts:
            rep.per_qt.append(
                {
                    "q": q,
                    "t": tt,
                    "r": tt * R + 1,
                    "w_sufficient": w_sufficient(q, R),
                    "length_bound": float(length_bound(q, R, tt)),
                    "length_bound_t1": float(length_bound(q, R, 1)),
                }
            )
    return rep


def _fixed(x, places: int) -> str:
    d = Decimal(mpmath.nstr(x, DPS - 5, strip_zeros=False))
    return str(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def table1_rows() -> list[dict[str, str]]:
    rows = []
    for R in TABLE1_R:
        lo, hi = stirling_bounds(R)
        c = c_new(R)
        rows.append(
            {
                "R": str(R),
                "stirling_lower": _fixed(lo, 8),
                "stirling_lower_per_R": _fixed(lo / R, 4),
                "c_new": _fixed(c, 8),
                "c_new_per_R": _fixed(c / R, 4),
                "stirling_upper": _fixed(hi, 8),
            }
        )
    return rows


def table2_rows() -> list[dict[str, str]]:
    rows = []
    for R in TABLE2_R:
        c = c_new(R)
        big = ratio(R, "r_eq_tR1_tge2")
        rows.append(
            {
                "R": str(R),
                "c_new": _fixed(c, 4),
                "A": _fixed(c_knw(R, "r_eq_R1"), 3),
                "B": _fixed(ratio_closed_form(R), 4),
                "ratio_t_ge_2": _fixed(big, 0).rstrip("."),
                "ratio_t_ge_2_per_R": _fixed(big / R, 2),
            }
        )
    return rows


def _csv(rows: list[dict[str, str]]) -> str:
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    wr.writeheader()
    wr.writerows(rows)
    return buf.getvalue()


def emit_table1() -> str:
    return _csv(table1_rows())


def emit_table2() -> str:
    return _csv(table2_rows())
