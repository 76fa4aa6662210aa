"""Truncated q-expansions over cyclotomic fields: theta, Siegel, Eisenstein.

Series live on a fixed exponent grid (1/L)Z with exact ``CycElt``
coefficients and an explicit exclusive truncation order; every ring
operation propagates the truncation (product order = min(t1 + lead2,
t2 + lead1), sums take the min).

The universal object behind everything is the Tate curve with parameter
t and invariant differential dt/t, so the weight-raising operator is
D = t d/dt before pullback.  The canonical theta function with divisor
c^2(0) - [c-torsion] has the product expansion

    q^{(c^2-1)/12} (-t)^{(c-c^2)/2} gamma(t)^{c^2} gamma(t^c)^{-1},
    gamma(t) = prod_{n>=0} (1 - q^n t) prod_{n>=1} (1 - q^n / t),

and pulls back along t = zeta_N^b q^{a/N}; the quasi-periodicity
gamma(q t) = -t^{-1} gamma(t) reduces arguments with q-exponent >= 1
into the fundamental annulus.  Log-derivatives are expanded through

    t d/dt log gamma(t) = -t/(1-t) - sum_{n,m>=1} q^{nm} (t^m - t^{-m}),

whose rational part is differentiated formally and evaluated exactly at
roots of unity when the pullback has no q-shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .arith import CycElt, cyc_embed


class QExpError(ValueError):
    pass


class GatedFeatureError(NotImplementedError):
    """Weight-2 variants needing the Weierstrass-p convention are gated."""


@dataclass(frozen=True)
class TorsionPoint:
    """(a/N, b/N) in (1/N Z / Z)^2, with 0 <= a, b < N."""

    a: int
    b: int
    level: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be >= 1")
        object.__setattr__(self, "a", self.a % self.level)
        object.__setattr__(self, "b", self.b % self.level)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def scaled(self, c: int) -> "TorsionPoint":
        return TorsionPoint(self.a * c, self.b * c, self.level)

    def __repr__(self):
        return f"({self.a}/{self.level}, {self.b}/{self.level})"


# ---------------------------------------------------------------------------
# Truncated series


class QSeries:
    """Truncated series sum coeffs[i] q^{(start+i)/grid}, trunc exclusive."""

    __slots__ = ("grid", "start", "coeffs", "trunc", "conductor")

    def __init__(self, grid: int, start: int, coeffs, trunc: int, conductor: int):
        coeffs = list(coeffs)
        while coeffs and coeffs[0].is_zero():
            coeffs.pop(0)
            start += 1
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            start = trunc
        if start + len(coeffs) > trunc:
            raise ValueError("coefficients extend past the truncation order")
        self.grid = grid
        self.start = start
        self.coeffs = coeffs
        self.trunc = trunc
        self.conductor = conductor

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(grid: int, trunc_exp, conductor: int = 1) -> "QSeries":
        t = _to_idx(trunc_exp, grid)
        return QSeries(grid, t, [], t, conductor)

    @staticmethod
    def one(grid: int, trunc_exp, conductor: int = 1) -> "QSeries":
        t = _to_idx(trunc_exp, grid)
        return QSeries(grid, 0, [CycElt.one(conductor)], t, conductor)

    @staticmethod
    def monomial(coeff: CycElt, exponent, grid: int, trunc_exp) -> "QSeries":
        t = _to_idx(trunc_exp, grid)
        s = _to_idx(exponent, grid)
        return QSeries(grid, s, [coeff], t, coeff.conductor)

    # -- structure ---------------------------------------------------------

    @property
    def lead_exponent(self) -> Fraction:
        return Fraction(self.start, self.grid)

    @property
    def trunc_exponent(self) -> Fraction:
        return Fraction(self.trunc, self.grid)

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead_coefficient(self) -> CycElt:
        if not self.coeffs:
            raise QExpError("zero series has no leading coefficient")
        return self.coeffs[0]

    def coefficient(self, exponent) -> CycElt:
        """Coefficient at a given exponent; exponent must be below truncation."""
        e = Fraction(exponent)
        idx_num = e * self.grid
        if e >= self.trunc_exponent:
            raise QExpError(f"exponent {e} is beyond the truncation order")
        if idx_num.denominator != 1:
            return CycElt.zero(self.conductor)
        i = int(idx_num) - self.start
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return CycElt.zero(self.conductor)

    def terms(self):
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                yield Fraction(self.start + i, self.grid), c

    # -- grid/conductor alignment ------------------------------------------

    def refine(self, grid2: int) -> "QSeries":
        if grid2 == self.grid:
            return self
        if grid2 % self.grid != 0:
            raise QExpError(f"grid {grid2} does not refine {self.grid}")
        f = grid2 // self.grid
        coeffs = []
        for c in self.coeffs:
            coeffs.append(c)
            coeffs.extend([CycElt.zero(self.conductor)] * (f - 1))
        if coeffs:
            del coeffs[len(coeffs) - (f - 1) :]
        return QSeries(grid2, self.start * f, coeffs, self.trunc * f, self.conductor)

    def embed(self, conductor2: int) -> "QSeries":
        if conductor2 == self.conductor:
            return self
        return QSeries(
            self.grid,
            self.start,
            [cyc_embed(c, conductor2) for c in self.coeffs],
            self.trunc,
            conductor2,
        )

    @staticmethod
    def _common(x: "QSeries", y: "QSeries"):
        g = lcm(x.grid, y.grid)
        f = lcm(x.conductor, y.conductor)
        return x.refine(g).embed(f), y.refine(g).embed(f)

    def truncate(self, trunc_exp) -> "QSeries":
        t = _to_idx(trunc_exp, self.grid)
        if t > self.trunc:
            raise QExpError("cannot extend a truncated series")
        n = max(0, t - self.start)
        return QSeries(self.grid, self.start, self.coeffs[:n], t, self.conductor)

    def shift(self, exponent) -> "QSeries":
        d = _to_idx(exponent, self.grid)
        return QSeries(
            self.grid, self.start + d, list(self.coeffs), self.trunc + d, self.conductor
        )

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        x, y = QSeries._common(self, other)
        t = min(x.trunc, y.trunc)
        s = min(x.start, y.start, t)
        coeffs = [CycElt.zero(x.conductor) for _ in range(t - s)]
        for src in (x, y):
            for i, c in enumerate(src.coeffs):
                j = src.start + i - s
                if 0 <= j < len(coeffs):
                    coeffs[j] = coeffs[j] + c
        return QSeries(x.grid, s, coeffs, t, x.conductor)

    def __neg__(self):
        return QSeries(
            self.grid, self.start, [-c for c in self.coeffs], self.trunc, self.conductor
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar) -> "QSeries":
        if isinstance(scalar, CycElt):
            f = lcm(self.conductor, scalar.conductor)
            s = cyc_embed(scalar, f)
            me = self.embed(f)
            if s.is_zero():
                return QSeries(me.grid, me.trunc, [], me.trunc, f)
            return QSeries(
                me.grid, me.start, [s * c for c in me.coeffs], me.trunc, f
            )
        if scalar == 0:
            return QSeries(self.grid, self.trunc, [], self.trunc, self.conductor)
        return QSeries(
            self.grid,
            self.start,
            [c * scalar for c in self.coeffs],
            self.trunc,
            self.conductor,
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycElt)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        x, y = QSeries._common(self, other)
        t = min(x.trunc + y.start, y.trunc + x.start)
        s = x.start + y.start
        if x.is_zero() or y.is_zero():
            return QSeries(x.grid, t, [], t, x.conductor)
        n = t - s
        coeffs = [CycElt.zero(x.conductor) for _ in range(max(0, n))]
        for i, a in enumerate(x.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(y.coeffs):
                if i + j >= n:
                    break
                if b.is_zero():
                    continue
                coeffs[i + j] = coeffs[i + j] + a * b
        return QSeries(x.grid, s, coeffs, t, x.conductor)

    __rmul__ = __mul__

    def mul_binomial(self, exp_idx: int, coeff: CycElt) -> "QSeries":
        """Multiply by (1 + coeff q^{exp_idx/grid}), preserving truncation."""
        f = lcm(self.conductor, coeff.conductor)
        me = self.embed(f)
        c = cyc_embed(coeff, f)
        n = me.trunc - me.start
        coeffs = list(me.coeffs) + [CycElt.zero(f)] * (n - len(me.coeffs))
        for i in range(n - 1, -1, -1):
            j = i - exp_idx
            if 0 <= j < len(me.coeffs):
                coeffs[i] = coeffs[i] + c * me.coeffs[j]
        return QSeries(me.grid, me.start, coeffs, me.trunc, f)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return QSeries.one(
                self.grid, Fraction(self.trunc - self.start, self.grid), self.conductor
            )
        out = None
        base = self
        while n:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def inverse(self) -> "QSeries":
        """Reciprocal series; the leading coefficient must be invertible."""
        if self.is_zero():
            raise QExpError("cannot invert a series that is zero to its precision")
        n = self.trunc - self.start
        a0_inv = self.coeffs[0].inverse()
        rel = [CycElt.zero(self.conductor) for _ in range(n)]
        rel[0] = a0_inv
        for i in range(1, n):
            acc = CycElt.zero(self.conductor)
            for j in range(1, i + 1):
                aj = self.coeffs[j] if j < len(self.coeffs) else None
                if aj is None or aj.is_zero():
                    continue
                acc = acc + aj * rel[i - j]
            rel[i] = -(a0_inv * acc)
        return QSeries(self.grid, -self.start, rel, n - self.start, self.conductor)

    # -- unit-series transcendentals -----------------------------------------

    def _require_unit_one(self):
        if self.is_zero() or self.start != 0 or not (
            self.coeffs[0] == CycElt.one(self.conductor)
        ):
            raise QExpError("operation requires a series with constant term 1")

    def log_unit(self) -> "QSeries":
        """log of a series with constant term 1 (antiderivative of u'/u)."""
        self._require_unit_one()
        du = self.theta_derivative()
        v = du * self.inverse()
        coeffs = [CycElt.zero(self.conductor) for _ in range(v.trunc)]
        for i, c in enumerate(v.coeffs):
            idx = v.start + i
            if idx == 0:
                if not c.is_zero():
                    raise AssertionError("u'/u of a unit series has no constant term")
                continue
            coeffs[idx] = c * Fraction(self.grid, idx)
        return QSeries(self.grid, 0, coeffs, v.trunc, self.conductor)

    def exp_positive(self) -> "QSeries":
        """exp of a series supported in strictly positive exponents."""
        if not self.is_zero() and self.start <= 0:
            raise QExpError("exp needs strictly positive exponents")
        n = self.trunc
        if n <= 0:
            raise QExpError("truncation too small for exp")
        f = [CycElt.zero(self.conductor) for _ in range(n)]
        f[0] = CycElt.one(self.conductor)
        v = [CycElt.zero(self.conductor) for _ in range(n)]
        for i, c in enumerate(self.coeffs):
            if self.start + i < n:
                v[self.start + i] = c
        for m in range(1, n):
            acc = CycElt.zero(self.conductor)
            for j in range(1, m + 1):
                if v[j].is_zero() or f[m - j].is_zero():
                    continue
                acc = acc + v[j] * f[m - j] * Fraction(j, 1)
            f[m] = acc * Fraction(1, m)
        return QSeries(self.grid, 0, f, n, self.conductor)

    def theta_derivative(self) -> "QSeries":
        """q d/dq: multiply the coefficient at exponent e by e."""
        return QSeries(
            self.grid,
            self.start,
            [
                c * Fraction(self.start + i, self.grid)
                for i, c in enumerate(self.coeffs)
            ],
            self.trunc,
            self.conductor,
        )

    # -- comparisons -----------------------------------------------------------

    def agreement(self, other: "QSeries"):
        """(holds, witness): compare up to the smaller truncation order."""
        x, y = QSeries._common(self, other)
        t = min(x.trunc, y.trunc)
        s = min(x.start, y.start, t)
        for idx in range(s, t):
            a = x.coeffs[idx - x.start] if 0 <= idx - x.start < len(x.coeffs) else None
            b = y.coeffs[idx - y.start] if 0 <= idx - y.start < len(y.coeffs) else None
            a = a if a is not None else CycElt.zero(x.conductor)
            b = b if b is not None else CycElt.zero(x.conductor)
            if not (a == b):
                return False, (Fraction(idx, x.grid), a, b)
        return True, None

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.agreement(other)[0]

    def __repr__(self):
        parts = []
        for e, c in list(self.terms())[:6]:
            parts.append(f"({c!r}) q^{e}")
        more = " + ..." if len(self.coeffs) > 6 else ""
        return (
            f"QSeries[{' + '.join(parts) or '0'}{more}; O(q^{self.trunc_exponent})]"
        )

    def serialized_rows(self):
        """(exponent, power-basis coordinates) rows for structured output."""
        return [
            (Fraction(self.start + i, self.grid), tuple(c.coords))
            for i, c in enumerate(self.coeffs)
        ]


def _to_idx(exponent, grid: int) -> int:
    e = Fraction(exponent) * grid
    if e.denominator != 1:
        raise QExpError(f"exponent {exponent} is not on the 1/{grid} grid")
    return int(e)


# ---------------------------------------------------------------------------
# Theta pullbacks


def _zeta(N: int, j: int) -> CycElt:
    return CycElt.zeta(N, j) if N > 1 else CycElt.one(1)


def _gamma_core(s: Fraction, b: int, N: int, grid: int, rel_steps: int) -> QSeries:
    """gamma(zeta_N^b q^s) for 0 <= s < 1, truncated rel_steps grid steps."""
    conductor = N if N > 1 else 1
    out = QSeries.one(grid, Fraction(rel_steps, grid), conductor)
    zb = _zeta(N, b)
    zbi = _zeta(N, -b)
    n = 0
    while True:
        e = _to_idx(s, grid) + n * grid
        if e >= rel_steps:
            break
        out = out.mul_binomial(e, -zb)
        n += 1
    n = 1
    while True:
        e = n * grid - _to_idx(s, grid)
        if e >= rel_steps:
            break
        out = out.mul_binomial(e, -zbi)
        n += 1
    return out


def _gamma_pullback(exp: Fraction, b: int, N: int, grid: int, trunc_exp: Fraction) -> QSeries:
    """gamma(zeta_N^b q^exp) for exp >= 0, reduced into the fundamental annulus.

    gamma(q^w u) = (-1)^w q^{-w(w-1)/2} u^{-w} gamma(u) peels off whole
    powers of q from the argument.
    """
    w = int(exp)  # floor; exp >= 0
    s = exp - w
    if s == 0 and b % N == 0:
        raise QExpError("gamma vanishes at t = 1: the point hits the c-torsion")
    shift = Fraction(-w * (w - 1), 2) - s * w
    rel_steps = _to_idx(trunc_exp - shift, grid)
    if rel_steps <= 0:
        return QSeries.zero(grid, trunc_exp, N if N > 1 else 1)
    core = _gamma_core(s, b, N, grid, rel_steps)
    sign = CycElt.rational(-1 if w % 2 else 1, N if N > 1 else 1)
    pref = sign * _zeta(N, -b * w)
    return core.scale(pref).shift(shift)


def _check_c(pt: TorsionPoint, c: int):
    if pt.is_zero():
        raise QExpError("the torsion point (0, 0) is excluded")
    if gcd(c, 6 * pt.level) != 1:
        raise QExpError(f"c = {c} must be prime to 6 N = {6 * pt.level}")


def _theta_gamma_shift(pt: TorsionPoint, c: int) -> Fraction:
    """The q-exponent peeled off gamma(t^c) by quasi-periodicity."""
    exp_tc = Fraction(pt.a * c, pt.level)
    w = int(exp_tc)
    s = exp_tc - w
    return Fraction(-w * (w - 1), 2) - s * w


def theta_lead_exponent(pt: TorsionPoint, c: int) -> Fraction:
    """Exact leading exponent of the c-theta pullback at pt."""
    N = pt.level
    e12 = (c * c - 1) // 12
    m_exp = (c - c * c) // 2
    return e12 + Fraction(pt.a * m_exp, N) - _theta_gamma_shift(pt, c)


def siegel_theta_qexp(pt: TorsionPoint, c: int, prec) -> QSeries:
    """Pullback of the canonical c-theta function along t = zeta^b q^{a/N}.

    ``prec`` is the absolute truncation order.  Exponents live on the
    1/N grid ((c^2-1)/12 and (c-c^2)/2 are integral because (c, 6) = 1);
    coefficients in Q(zeta_N).  Points with a = 0 produce integral
    exponents and use the unit grid.
    """
    _check_c(pt, c)
    N = pt.level
    prec = Fraction(prec)
    grid = 1 if pt.a == 0 and prec.denominator == 1 else N
    e12 = (c * c - 1) // 12
    m_exp = (c - c * c) // 2
    lead_shift = e12 + Fraction(pt.a * m_exp, N)
    b_shift = _theta_gamma_shift(pt, c)
    total_lead = lead_shift - b_shift
    rel = prec - total_lead
    if rel <= 0:
        return QSeries.zero(grid, prec, N if N > 1 else 1)
    part_a = _gamma_pullback(Fraction(pt.a, N), pt.b, N, grid, rel) ** (c * c)
    part_b = _gamma_pullback(Fraction(pt.a * c, N), pt.b * c, N, grid, rel + b_shift)
    sign = CycElt.rational(-1 if m_exp % 2 else 1, N if N > 1 else 1)
    pref = sign * _zeta(N, pt.b * m_exp)
    out = (part_a * part_b.inverse()).scale(pref).shift(lead_shift)
    return out.truncate(min(out.trunc_exponent, prec))


def siegel_theta_relative(pt: TorsionPoint, c: int, rel_prec) -> QSeries:
    """The c-theta pullback carrying rel_prec known steps past its lead."""
    return siegel_theta_qexp(pt, c, theta_lead_exponent(pt, c) + Fraction(rel_prec))


def siegel_unit_qexp(pt: TorsionPoint, c: int, prec) -> QSeries:
    """The Siegel unit: the theta pullback at the torsion section itself."""
    return siegel_theta_qexp(pt, c, prec)


# ---------------------------------------------------------------------------
# Rationalized Siegel units (c eliminated)


@dataclass
class RationalizedUnit:
    """g at a torsion point: unit-part series plus a formal leading monomial.

    The leading coefficient is the root_order-th root of lead_base, kept
    as a formal tag; no branch of the root is ever chosen.
    """

    lead_exponent: Fraction
    lead_base: CycElt
    root_order: int
    unit: QSeries


def rationalized_g_qexp(pt: TorsionPoint, prec, c: int) -> RationalizedUnit:
    """Extract the (c^2-1)-th root of the c-Siegel unit at pt.

    Requires c = 1 mod N, (c, 6) = 1, c != +-1, so that the c-unit equals
    g^{c^2-1}; the unit part is exp(log/(c^2-1)) and is independent of c.
    ``prec`` counts known unit-part steps past the leading monomial.
    """
    N = pt.level
    if c % N != 1 % N:
        raise QExpError(f"c = {c} must be 1 mod N = {N}")
    if gcd(c, 6) != 1 or c in (1, -1):
        raise QExpError("c must be prime to 6 and different from +-1")
    theta = siegel_theta_relative(pt, c, prec)
    lead = theta.lead_coefficient()
    unit = theta.shift(-theta.lead_exponent).scale(lead.inverse())
    log = unit.log_unit()
    root_log = log.scale(Fraction(1, c * c - 1))
    root_unit = root_log.exp_positive()
    return RationalizedUnit(
        lead_exponent=theta.lead_exponent / (c * c - 1),
        lead_base=lead,
        root_order=c * c - 1,
        unit=root_unit,
    )


@dataclass
class CRelationReport:
    point: TorsionPoint
    c: int
    d: int
    prec: Fraction
    holds: bool
    witness: tuple | None


def check_c_relation(pt: TorsionPoint, c: int, d: int, prec) -> CRelationReport:
    """The c,d-symmetric product relation between Siegel units, exactly.

    (d-unit at pt)^{c^2} / (d-unit at c pt) = (c-unit at pt)^{d^2} /
    (c-unit at d pt), as truncated series.
    """
    _check_c(pt, c)
    _check_c(pt, d)
    prec = Fraction(prec)  # relative: known steps past the (equal) leads
    lhs = siegel_theta_relative(pt, d, prec) ** (c * c) * siegel_theta_relative(
        pt.scaled(c), d, prec
    ).inverse()
    rhs = siegel_theta_relative(pt, c, prec) ** (d * d) * siegel_theta_relative(
        pt.scaled(d), c, prec
    ).inverse()
    holds, witness = lhs.agreement(rhs)
    return CRelationReport(pt, c, d, prec, holds, witness)


# ---------------------------------------------------------------------------
# Log-derivative Eisenstein series


def _rational_part_derivative(k: int, zeta_val: CycElt) -> CycElt:
    """Value of (t d/dt)^{k-1} [-t/(1-t)] at t = a root of unity != 1.

    The family P(t)/(1-t)^j is stable under t d/dt; differentiate
    formally and evaluate exactly.
    """
    num = [Fraction(0), Fraction(-1)]  # -t
    j = 1
    for _ in range(k - 1):
        # t d/dt [P/(1-t)^j] = (t P' (1-t) + j t P) / (1-t)^{j+1}
        tp = [Fraction(i) * ci for i, ci in enumerate(num)]  # t P'
        one_minus_t = [Fraction(1), Fraction(-1)]
        part1 = _poly_mul_fr(tp, one_minus_t)
        part2 = [Fraction(0)] + [Fraction(j) * ci for ci in num]
        num = _poly_add_fr(part1, part2)
        j += 1
    L = zeta_val.conductor
    value = CycElt.zero(L)
    power = CycElt.one(L)
    for ci in num:
        if ci:
            value = value + power * ci
        power = power * zeta_val
    denom = (CycElt.one(L) - zeta_val) ** j
    return value * denom.inverse()


def _poly_mul_fr(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                if b:
                    out[i + j] += a * b
    return out


def _poly_add_fr(p, q):
    n = max(len(p), len(q))
    return [
        (p[i] if i < len(p) else Fraction(0)) + (q[i] if i < len(q) else Fraction(0))
        for i in range(n)
    ]


def _dlog_gamma_pullback(k: int, pt: TorsionPoint, prec: Fraction, grid: int) -> QSeries:
    """(t d/dt)^{k-1} of t d/dt log gamma, pulled back at t = zeta^b q^{a/N}.

    The expansion -t/(1-t) - sum_{n,m>=1} q^{nm}(t^m - t^{-m}) picks up a
    factor (+-m)^{k-1} per term under D^{k-1}; the rational part is
    evaluated in the field when a = 0 and as a geometric q-series
    otherwise.
    """
    N = pt.level
    a, b = pt.a, pt.b
    conductor = N if N > 1 else 1
    t_idx = _to_idx(prec, grid)
    if t_idx <= 0:
        return QSeries.zero(grid, prec, conductor)
    acc: dict[int, CycElt] = {}

    def add(idx: int, coeff: CycElt):
        acc[idx] = acc[idx] + coeff if idx in acc else coeff

    step = grid // N
    if a == 0:
        add(0, _rational_part_derivative(k, _zeta(N, b)))
    else:
        m = 1
        while m * a * step < t_idx:
            add(m * a * step, _zeta(N, b * m) * Fraction(-(m ** (k - 1))))
            m += 1
    n = 1
    while n * grid - a * step < t_idx:  # smallest exponent contributed at this n
        base_plus = n * grid + a * step
        base_minus = n * grid - a * step
        m = 1
        while True:
            e_plus = m * base_plus
            e_minus = m * base_minus
            if e_minus >= t_idx and e_plus >= t_idx:
                break
            mk = m ** (k - 1)
            if e_plus < t_idx:
                add(e_plus, _zeta(N, b * m) * Fraction(-mk))
            if e_minus < t_idx:
                sign = mk if (k - 1) % 2 == 0 else -mk
                add(e_minus, _zeta(N, -b * m) * Fraction(sign))
            m += 1
        n += 1
    if not acc:
        return QSeries.zero(grid, prec, conductor)
    lo = min(acc)
    coeffs = [CycElt.zero(conductor) for _ in range(t_idx - lo)]
    for idx, cf in acc.items():
        coeffs[idx - lo] = cyc_embed(cf, conductor) if cf.conductor != conductor else cf
    return QSeries(grid, lo, coeffs, t_idx, conductor)


def dlog_d_eisenstein(pt: TorsionPoint, c: int, k: int, prec) -> QSeries:
    """The weight-k Eisenstein pullback of D^{k-1} dlog of the c-theta.

    Equals delta_{k,1} (c - c^2)/2 + c^2 G_k(pt) - c^k (G_k(c pt) -
    delta_{k,1} w), where G_k is the pulled-back (k-1)-fold D-derivative
    of dlog gamma at the representative in the fundamental annulus and
    w = floor(a c / N) counts the annulus reductions of the scaled
    point.  For k = 1, dlog gamma drops by 1 under t -> q t, hence the
    w term; for k >= 2 the derivatives are q-periodic and no correction
    arises.
    """
    _check_c(pt, c)
    if k < 1:
        raise QExpError("weight k must be >= 1")
    N = pt.level
    prec = Fraction(prec)
    grid = N
    g1 = _dlog_gamma_pullback(k, pt, prec, grid).scale(Fraction(c * c))
    g2 = _dlog_gamma_pullback(k, pt.scaled(c), prec, grid).scale(Fraction(c**k))
    out = g1 - g2
    if k == 1:
        w = (pt.a * c) // N
        const = Fraction(c - c * c, 2) + c * w
        if const:
            out = out + QSeries.monomial(
                CycElt.rational(const, out.conductor), 0, grid, prec
            )
    return out


# ---------------------------------------------------------------------------
# Two-variable Tate expansions (oracle machinery and D-composition checks)


class TateExpansion:
    """Laurent expansion in t over integer q-powers, truncated in q.

    Terms are stored as {(n, m): coeff} for coeff q^n t^m; products
    truncate at q^q_trunc.  D = t d/dt multiplies a term by m.
    """

    def __init__(self, terms: dict, q_trunc: int, conductor: int = 1):
        self.terms = {
            nm: c for nm, c in terms.items() if nm[0] < q_trunc and not c.is_zero()
        }
        self.q_trunc = q_trunc
        self.conductor = conductor

    @staticmethod
    def one(q_trunc: int, conductor: int = 1):
        return TateExpansion({(0, 0): CycElt.one(conductor)}, q_trunc, conductor)

    def __add__(self, other):
        assert self.q_trunc == other.q_trunc
        f = lcm(self.conductor, other.conductor)
        out = dict(self._embedded(f).terms)
        for nm, c in other._embedded(f).terms.items():
            out[nm] = out[nm] + c if nm in out else c
        return TateExpansion(out, self.q_trunc, f)

    def _embedded(self, f):
        if f == self.conductor:
            return self
        return TateExpansion(
            {nm: cyc_embed(c, f) for nm, c in self.terms.items()}, self.q_trunc, f
        )

    def __neg__(self):
        return TateExpansion(
            {nm: -c for nm, c in self.terms.items()}, self.q_trunc, self.conductor
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycElt)):
            return TateExpansion(
                {nm: c * other for nm, c in self.terms.items()},
                self.q_trunc,
                self.conductor
                if not isinstance(other, CycElt)
                else lcm(self.conductor, other.conductor),
            )
        assert self.q_trunc == other.q_trunc
        f = lcm(self.conductor, other.conductor)
        a, b = self._embedded(f), other._embedded(f)
        out: dict = {}
        for (n1, m1), c1 in a.terms.items():
            for (n2, m2), c2 in b.terms.items():
                if n1 + n2 >= self.q_trunc:
                    continue
                key = (n1 + n2, m1 + m2)
                v = c1 * c2
                out[key] = out[key] + v if key in out else v
        return TateExpansion(out, self.q_trunc, f)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        assert n >= 0
        out = TateExpansion.one(self.q_trunc, self.conductor)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def D(self) -> "TateExpansion":
        """t d/dt, term by term."""
        return TateExpansion(
            {nm: c * Fraction(nm[1]) for nm, c in self.terms.items()},
            self.q_trunc,
            self.conductor,
        )

    def evaluate_t_root_of_unity(self, b: int, N: int) -> QSeries:
        """Substitute t = zeta_N^b (a pure t-direction pullback)."""
        f = lcm(self.conductor, N if N > 1 else 1)
        acc: dict[int, CycElt] = {}
        for (n, m), c in self.terms.items():
            v = cyc_embed(c, f) * cyc_embed(_zeta(N, b * m), f)
            acc[n] = acc[n] + v if n in acc else v
        if not acc:
            return QSeries.zero(1, self.q_trunc, f)
        lo = min(acc)
        coeffs = [acc.get(i, CycElt.zero(f)) for i in range(lo, self.q_trunc)]
        return QSeries(1, lo, coeffs, self.q_trunc, f)

    def __eq__(self, other):
        if not isinstance(other, TateExpansion):
            return NotImplemented
        f = lcm(self.conductor, other.conductor)
        a, b = self._embedded(f), other._embedded(f)
        keys = set(a.terms) | set(b.terms)
        zero = CycElt.zero(f)
        return all(a.terms.get(k, zero) == b.terms.get(k, zero) for k in keys)


def gamma_tate(q_trunc: int, t_power: int = 1, conductor: int = 1) -> TateExpansion:
    """gamma(t^{t_power}) as a two-variable expansion truncated in q."""
    out = TateExpansion.one(q_trunc, conductor)
    one = CycElt.one(conductor)
    for n in range(0, q_trunc):
        out = out * TateExpansion(
            {(0, 0): one, (n, t_power): -one}, q_trunc, conductor
        )
    for n in range(1, q_trunc):
        out = out * TateExpansion(
            {(0, 0): one, (n, -t_power): -one}, q_trunc, conductor
        )
    return out


def theta_numerator_tate(c: int, q_trunc: int) -> TateExpansion:
    """(-t)^{(c-c^2)/2} gamma(t)^{c^2}: the Laurent-polynomial part of c-theta."""
    m_exp = (c - c * c) // 2
    mono = TateExpansion(
        {(0, m_exp): CycElt.rational(-1 if m_exp % 2 else 1)}, q_trunc, 1
    )
    return mono * gamma_tate(q_trunc) ** (c * c)


# ---------------------------------------------------------------------------
# Eisenstein assembly


def eisenstein_00(k: int, c: int, a: int, prec) -> QSeries:
    """The c-Eisenstein series at (0,0) via the auxiliary-a torsion sum.

    (a^k - 1)^{-1} sum of the c-Eisenstein pullbacks over the nonzero
    a-torsion points; the result is checked to have rational
    coefficients supported on integer exponents and is returned with
    conductor 1.
    """
    if a in (1, -1) or a == 0:
        raise QExpError("auxiliary a must satisfy |a| >= 2")
    if a < 0:
        a = -a
    if gcd(a, c) != 1:
        raise QExpError("(a, c) = 1 is required")
    if gcd(c, 6) != 1:
        raise QExpError("(c, 6) = 1 is required")
    prec = Fraction(prec)
    total = None
    for x in range(a):
        for y in range(a):
            if x == 0 and y == 0:
                continue
            e = dlog_d_eisenstein(TorsionPoint(x, y, a), c, k, prec)
            total = e if total is None else total + e
    total = total.scale(Fraction(1, a**k - 1))
    rows = {}
    for exp, cf in total.terms():
        if exp.denominator != 1 or not cf.is_rational():
            raise AssertionError(
                f"torsion sum failed to be rational at q^{exp}: {cf!r}"
            )
        rows[int(exp)] = cf.rational_value()
    te = total.trunc_exponent
    t_int = te.numerator // te.denominator + (0 if te.denominator == 1 else 1)
    lo = min(rows) if rows else t_int
    coeffs = [CycElt.rational(rows.get(i, 0)) for i in range(lo, t_int)]
    return QSeries(1, lo, coeffs, t_int, 1)


def _smallest_unit_scalar(N: int) -> int:
    """Smallest c > 1 with c = 1 mod N and (c, 6) = 1."""
    c = N + 1 if N > 1 else 2
    while gcd(c, 6) != 1 or c == 1:
        c += N if N > 1 else 1
    return c


def rationalized_eisenstein(pt: TorsionPoint, k: int, prec, c: int | None = None) -> QSeries:
    """E^(k) at a torsion point with the auxiliary c eliminated (k != 2).

    For c = 1 mod N the c-series equals (c^2 - c^k) E^(k), an exact
    rational multiple, so no root extraction is needed.
    """
    if k == 2:
        raise GatedFeatureError(
            "weight-2 rationalized Eisenstein series need the Weierstrass-p "
            "convention and are gated out"
        )
    prec = Fraction(prec)
    if pt.is_zero():
        cc = c if c is not None else 5
        aux = 2 if gcd(2, cc) == 1 else 3
        base = eisenstein_00(k, cc, aux, prec)
        return base.scale(Fraction(1, cc * cc - cc**k))
    if c is None:
        c = _smallest_unit_scalar(pt.level)
    if c % pt.level != 1 % pt.level:
        raise QExpError("c must be 1 mod the level to eliminate the c-twist")
    denom = c * c - c**k
    assert denom != 0
    return dlog_d_eisenstein(pt, c, k, prec).scale(Fraction(1, denom))


def f_series(k: int, pt: TorsionPoint, prec) -> QSeries:
    """The dual-lattice Eisenstein series: the finite Fourier transform
    N^{-k} sum_{x,y} E^(k)_{x/N,y/N} zeta^{b x - a y} (k != 2).
    """
    if k == 2:
        raise GatedFeatureError(
            "the weight-2 dual Eisenstein series needs the Weierstrass-p "
            "convention and is gated out"
        )
    if k < 1:
        raise QExpError("weight must be >= 1")
    N = pt.level
    prec = Fraction(prec)
    total = None
    for x in range(N):
        for y in range(N):
            e = rationalized_eisenstein(TorsionPoint(x, y, N), k, prec)
            term = e.scale(_zeta(N, pt.b * x - pt.a * y))
            total = term if total is None else total + term
    return total.scale(Fraction(1, N**k))


# ---------------------------------------------------------------------------
# Zeta modular forms


class ZetaParameterError(ValueError):
    def __init__(self, name: str, detail: str):
        self.name = name
        super().__init__(f"{name}: {detail}")


def validate_zeta_parameters(M: int, N: int, k: int, r: int, rp: int):
    """The side conditions on (k, r, r'), each violation named."""
    if not (1 <= r <= k - 1):
        raise ZetaParameterError("r-range", f"need 1 <= r <= k-1, got r={r}, k={k}")
    if not (1 <= rp <= k - 1):
        raise ZetaParameterError(
            "r'-range", f"need 1 <= r' <= k-1, got r'={rp}, k={k}"
        )
    if r != k - 1 and rp != k - 1:
        raise ZetaParameterError("one-of-them", "one of r, r' must equal k-1")
    if (r, rp) in ((2, k - 1), (k - 1, 2), (k - 1, k - 2)):
        # these pairs would need the undefined weight-2 E-factor, so the
        # exclusion is unconditional (for k = 4 it overlaps the M-bullet
        # below and wins)
        raise ZetaParameterError(
            "excluded-pair", f"(r, r') = ({r}, {rp}) is excluded"
        )
    if r == k - 2 and rp == k - 1 and M < 2:
        raise ZetaParameterError(
            "M-at-least-2", "(r, r') = (k-2, k-1) requires M >= 2"
        )


@dataclass
class ZetaModularForm:
    M: int
    N: int
    k: int
    r: int
    rp: int
    constant: Fraction
    branches: dict[str, QSeries]


def zeta_modular_form(
    M: int, N: int, k: int, r: int, rp: int, prec, constant=Fraction(1)
) -> ZetaModularForm:
    """The product of an F-type and E-type Eisenstein series, per branch.

    When both r = k-1 and r' = k-1 hold, both branch products are
    computed and reported separately.
    """
    validate_zeta_parameters(M, N, k, r, rp)
    prec = Fraction(prec)
    constant = Fraction(constant)
    branches = {}
    if rp == k - 1:
        f_part = f_series(k - r, TorsionPoint(1, 0, M), prec)
        e_part = rationalized_eisenstein(TorsionPoint(0, 1, N), r, prec)
        branches["r'=k-1"] = (f_part * e_part).scale(constant)
    if r == k - 1:
        e_left = rationalized_eisenstein(TorsionPoint(1, 0, M), k - rp, prec)
        e_right = rationalized_eisenstein(TorsionPoint(0, 1, N), rp, prec)
        branches["r=k-1"] = (e_left * e_right).scale(constant)
    return ZetaModularForm(M, N, k, r, rp, constant, branches)
