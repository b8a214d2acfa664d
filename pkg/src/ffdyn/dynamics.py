"""Endomorphisms of P^1 over F_p(t) as coprime pairs of binary forms.

A :class:`HomogMap` holds the d+1 coefficients of two degree-d forms F, G
(X-degree descending) with coefficients in F_p(t), together with a
*normalized model*: the same coefficients cleared to F_p[t], divided by
their joint gcd, and unit-scaled so the first nonzero coefficient in scan
order (F first, then G) is monic.  The homogeneous resultant of the
normalized model is computed at construction by fraction-free Gaussian
elimination of the Sylvester matrix; a zero resultant (forms sharing a
factor) is rejected.

Good reduction at a finite place pi means the resultant is a pi-unit,
equivalently that reducing the normalized model mod pi and cancelling any
common factor leaves a map of the same degree; both criteria are exposed
and tested against each other.

Evaluation maps canonical points to canonical points.  When the resultant
is a unit of F_p[t] the image coordinates of a coprime pair are
automatically coprime, so evaluation skips the gcd step entirely; this is
what makes large search campaigns cheap.
"""

from __future__ import annotations

import json
import re
from typing import Optional, Sequence

from .algebra import FpPoly, ResidueElem, _check_prime, factor, parse_poly
from .funcfield import Place, RatFunc, valuation
from .geometry import ProjPoint, ResiduePoint

__all__ = [
    "Mobius",
    "HomogMap",
    "ResidueMap",
    "sylvester_resultant",
    "compose_maps",
    "iterate_map",
    "from_rational_function",
    "parse_affine_map",
    "parse_map",
    "map_to_json",
]


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------

def _bareiss_det(M: list[list[FpPoly]], p: int) -> FpPoly:
    """Exact determinant over F_p[t] by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return FpPoly.one(p)
    sign = 1
    prev = FpPoly.one(p)
    for k in range(n - 1):
        pivot_row = next((i for i in range(k, n) if not M[i][k].is_zero()), None)
        if pivot_row is None:
            return FpPoly.zero(p)
        if pivot_row != k:
            M[k], M[pivot_row] = M[pivot_row], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            row_i = M[i]
            head = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - head * M[k][j]).exact_div(prev)
            row_i[k] = FpPoly.zero(p)
        prev = pivot
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det


def sylvester_resultant(f_coeffs: Sequence[FpPoly], g_coeffs: Sequence[FpPoly]) -> FpPoly:
    """Resultant of two binary forms given by descending coefficient lists
    (a form of degree m has m+1 entries, zero entries included)."""
    f = list(f_coeffs)
    g = list(g_coeffs)
    if not f or not g:
        raise ValueError("forms need at least one coefficient")
    p = f[0].p
    m = len(f) - 1
    n = len(g) - 1
    size = m + n
    if size == 0:
        return FpPoly.one(p)
    zero = FpPoly.zero(p)
    M = []
    for r in range(n):
        M.append([zero] * r + f + [zero] * (size - r - m - 1))
    for r in range(m):
        M.append([zero] * r + g + [zero] * (size - r - n - 1))
    return _bareiss_det(M, p)


# ---------------------------------------------------------------------------
# Mobius transformations over F_p[t] with unit determinant
# ---------------------------------------------------------------------------

class Mobius:
    """Matrix [[a, b], [c, d]] over F_p[t] whose determinant is in F_p*."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: FpPoly, b: FpPoly, c: FpPoly, d: FpPoly):
        if not (a.p == b.p == c.p == d.p):
            raise ValueError("mixed characteristics")
        det = a * d - b * c
        if det.is_zero() or not det.is_constant():
            raise ValueError("determinant must be a nonzero constant")
        self.a, self.b, self.c, self.d = a, b, c, d

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def det(self) -> FpPoly:
        return self.a * self.d - self.b * self.c

    @classmethod
    def identity(cls, p: int) -> "Mobius":
        one, zero = FpPoly.one(p), FpPoly.zero(p)
        return cls(one, zero, zero, one)

    @classmethod
    def translation(cls, b: FpPoly) -> "Mobius":
        """x -> x + b."""
        p = b.p
        return cls(FpPoly.one(p), b, FpPoly.zero(p), FpPoly.one(p))

    @classmethod
    def inversion(cls, p: int) -> "Mobius":
        """x -> 1/x."""
        one, zero = FpPoly.one(p), FpPoly.zero(p)
        return cls(zero, one, one, zero)

    @classmethod
    def scaling(cls, p: int, u: int) -> "Mobius":
        """x -> u*x for a unit u of F_p."""
        if u % p == 0:
            raise ValueError("scaling factor must be a unit")
        return cls(FpPoly.constant(p, u), FpPoly.zero(p), FpPoly.zero(p), FpPoly.one(p))

    def inverse(self) -> "Mobius":
        u = FpPoly.constant(self.p, pow(self.det.leading_coeff, self.p - 2, self.p))
        return Mobius(self.d * u, -self.b * u, -self.c * u, self.a * u)

    def compose(self, other: "Mobius") -> "Mobius":
        """Matrix product self @ other (apply `other` first)."""
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, P: ProjPoint) -> ProjPoint:
        return ProjPoint.from_coords(self.a * P.x + self.b * P.y,
                                     self.c * P.x + self.d * P.y)

    def __eq__(self, other):
        if not isinstance(other, Mobius):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __repr__(self):
        return f"Mobius({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def mobius_sending_to_origin(P: ProjPoint) -> Mobius:
    """A unit-determinant matrix N with N(P) = [0 : 1]."""
    g, u, v = P.x.xgcd(P.y)
    if not g.is_one():
        raise AssertionError("canonical coordinates are coprime")
    return Mobius(P.y, -P.x, u, v)


# ---------------------------------------------------------------------------
# univariate polynomials over k(pi), used for form gcd cancellation
# ---------------------------------------------------------------------------

def _rp_trim(cs: list[ResidueElem]) -> list[ResidueElem]:
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def _rp_divmod(a: list[ResidueElem], b: list[ResidueElem], modulus: FpPoly):
    if not b:
        raise ZeroDivisionError("division by zero polynomial over k(pi)")
    rem = list(a)
    if len(a) < len(b):
        return [], rem
    inv = b[-1].inverse()
    quo = [ResidueElem.zero(modulus)] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = rem[k + len(b) - 1]
        if not c.is_zero():
            c = c * inv
            quo[k] = c
            for j in range(len(b)):
                rem[k + j] = rem[k + j] - c * b[j]
    return quo, _rp_trim(rem[: len(b) - 1])


def _rp_gcd(a: list[ResidueElem], b: list[ResidueElem], modulus: FpPoly) -> list[ResidueElem]:
    a, b = list(a), list(b)
    while b:
        a, b = b, _rp_divmod(a, b, modulus)[1]
    if a and not a[-1].is_one():
        inv = a[-1].inverse()
        a = [c * inv for c in a]
    return a


class ResidueMap:
    """Reduction of an endomorphism modulo a finite place.

    Coefficients of the normalized model are reduced into k(pi) and any
    common homogeneous factor of the two reduced forms is cancelled; the
    remaining degree `reduced_degree` equals the original degree exactly
    when the map has good reduction at the place.
    """

    __slots__ = ("modulus", "degree", "reduced_degree", "f_coeffs", "g_coeffs")

    def __init__(self, modulus: FpPoly, degree: int,
                 f_coeffs: Sequence[ResidueElem], g_coeffs: Sequence[ResidueElem]):
        self.modulus = modulus
        self.degree = degree
        self.reduced_degree = len(f_coeffs) - 1
        self.f_coeffs = tuple(f_coeffs)
        self.g_coeffs = tuple(g_coeffs)

    @property
    def good_reduction(self) -> bool:
        return self.reduced_degree == self.degree

    def apply(self, point: ResiduePoint) -> ResiduePoint:
        if point.modulus != self.modulus:
            raise ValueError("modulus mismatch")
        d = self.reduced_degree
        xs = [ResidueElem.one(self.modulus)]
        ys = [ResidueElem.one(self.modulus)]
        for _ in range(d):
            xs.append(xs[-1] * point.x)
            ys.append(ys[-1] * point.y)
        fval = ResidueElem.zero(self.modulus)
        gval = ResidueElem.zero(self.modulus)
        for i in range(d + 1):
            mono = xs[d - i] * ys[i]
            fval = fval + self.f_coeffs[i] * mono
            gval = gval + self.g_coeffs[i] * mono
        return ResiduePoint.from_elems(fval, gval)

    def _form_str(self, coeffs) -> str:
        d = self.reduced_degree
        parts = []
        for i, c in enumerate(coeffs):
            if c.is_zero():
                continue
            xpow = d - i
            mono = []
            if xpow:
                mono.append("X" if xpow == 1 else f"X^{xpow}")
            if i:
                mono.append("Y" if i == 1 else f"Y^{i}")
            head = "*".join(mono) if mono else "1"
            if not c.is_one() or not mono:
                head = f"({c})*{head}" if mono else f"({c})"
            parts.append(head)
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return (f"[{self._form_str(self.f_coeffs)} : {self._form_str(self.g_coeffs)}]"
                f" mod {self.modulus} (degree {self.reduced_degree})")

    def __repr__(self):
        return (f"ResidueMap({self.modulus!r}, degree={self.degree}, "
                f"reduced_degree={self.reduced_degree})")


# ---------------------------------------------------------------------------
# the main map type
# ---------------------------------------------------------------------------

def _coerce_coeff(p: int, c) -> RatFunc:
    if isinstance(c, RatFunc):
        return c
    if isinstance(c, FpPoly):
        return RatFunc.from_poly(c)
    if isinstance(c, int):
        return RatFunc.constant(p, c)
    raise TypeError(f"cannot use {c!r} as a map coefficient")


def _poly_lcm(a: FpPoly, b: FpPoly) -> FpPoly:
    return (a * b).exact_div(a.gcd(b)).monic()


class HomogMap:
    """Endomorphism [F(X, Y) : G(X, Y)] of P^1 over F_p(t), degree >= 1."""

    __slots__ = ("p", "d", "F_coeffs", "G_coeffs", "nf", "ng",
                 "_resultant", "_unit_resultant", "_bad_places")

    def __init__(self, F_coeffs: Sequence, G_coeffs: Sequence, p: Optional[int] = None):
        coeffs = list(F_coeffs) + list(G_coeffs)
        if p is None:
            probe = next((c for c in coeffs if isinstance(c, (RatFunc, FpPoly))), None)
            if probe is None:
                raise ValueError("cannot infer the characteristic; pass p=")
            p = probe.p
        _check_prime(p)
        if len(F_coeffs) != len(G_coeffs) or len(F_coeffs) < 2:
            raise ValueError("need two coefficient lists of equal length d+1 >= 2")
        self.p = p
        self.d = len(F_coeffs) - 1
        self.F_coeffs = tuple(_coerce_coeff(p, c) for c in F_coeffs)
        self.G_coeffs = tuple(_coerce_coeff(p, c) for c in G_coeffs)
        self.nf, self.ng = self._normalized_model()
        res = sylvester_resultant(self.nf, self.ng)
        if res.is_zero():
            raise ValueError("the two forms share a common factor (zero resultant)")
        self._resultant = res
        self._unit_resultant = res.is_constant()
        self._bad_places = None

    def _normalized_model(self):
        p = self.p
        all_coeffs = self.F_coeffs + self.G_coeffs
        lcm = FpPoly.one(p)
        for c in all_coeffs:
            if not c.is_zero():
                lcm = _poly_lcm(lcm, c.den)
        polys = [c.num * lcm.exact_div(c.den) for c in all_coeffs]
        content = FpPoly.zero(p)
        for f in polys:
            content = content.gcd(f)
        if content.is_zero():
            raise ValueError("a map needs at least one nonzero coefficient")
        if not content.is_one():
            polys = [f.exact_div(content) for f in polys]
        first = next(f for f in polys if not f.is_zero())
        if first.leading_coeff != 1:
            u = FpPoly.constant(p, pow(first.leading_coeff, p - 2, p))
            polys = [f * u for f in polys]
        k = self.d + 1
        return tuple(polys[:k]), tuple(polys[k:])

    # -- basic queries -------------------------------------------------------

    def resultant(self) -> FpPoly:
        """Sylvester resultant of the normalized model (canonical up to F_p*)."""
        return self._resultant

    def bad_places(self) -> frozenset[Place]:
        """Finite places where the resultant of the normalized model vanishes."""
        if self._bad_places is None:
            _, factors = factor(self._resultant)
            self._bad_places = frozenset(Place.finite(pi) for pi in factors)
        return self._bad_places

    def has_good_reduction(self, place: Place) -> bool:
        if not place.is_finite:
            raise ValueError("good reduction is defined at finite places")
        if self._unit_resultant:
            return True
        return valuation(self._resultant, place) == 0

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, P: ProjPoint) -> ProjPoint:
        if P.p != self.p:
            raise ValueError("mixed characteristics")
        d = self.d
        xs = [FpPoly.one(self.p)]
        ys = [FpPoly.one(self.p)]
        for _ in range(d):
            xs.append(xs[-1] * P.x)
            ys.append(ys[-1] * P.y)
        fval = FpPoly.zero(self.p)
        gval = FpPoly.zero(self.p)
        for i in range(d + 1):
            mono = xs[d - i] * ys[i]
            fc = self.nf[i]
            gc = self.ng[i]
            if not fc.is_zero():
                fval = fval + fc * mono
            if not gc.is_zero():
                gval = gval + gc * mono
        if self._unit_resultant:
            # a unit resultant makes the image of a coprime pair coprime
            lead = gval.leading_coeff if not gval.is_zero() else fval.leading_coeff
            if lead != 1:
                inv = FpPoly.constant(self.p, pow(lead, self.p - 2, self.p))
                fval = fval * inv
                gval = gval * inv
            return ProjPoint._make(fval, gval)
        return ProjPoint.from_coords(fval, gval)

    # -- reduction -----------------------------------------------------------

    def reduce_map(self, place: Place) -> ResidueMap:
        """Reduce the normalized model mod pi and cancel the common factor."""
        if not place.is_finite:
            raise ValueError("maps reduce at finite places only")
        pi = place.pi
        fbar = [ResidueElem(pi, c % pi) for c in self.nf]
        gbar = [ResidueElem(pi, c % pi) for c in self.ng]
        d = self.d

        def split(coeffs):
            # descending list -> (ascending dehomogenization, Y-multiplicity)
            uni = _rp_trim(list(reversed(coeffs)))
            return uni, (d - (len(uni) - 1)) if uni else d + 1

        f_uni, f_ymult = split(fbar)
        g_uni, g_ymult = split(gbar)
        if not f_uni and not g_uni:
            raise AssertionError("normalized model cannot vanish identically mod pi")
        if not f_uni:
            # F reduces to zero: the common factor is all of G
            return ResidueMap(pi, d, [ResidueElem.zero(pi)], [ResidueElem.one(pi)])
        if not g_uni:
            return ResidueMap(pi, d, [ResidueElem.one(pi)], [ResidueElem.zero(pi)])
        h = _rp_gcd(f_uni, g_uni, pi)
        if len(h) > 1:
            f_uni = _rp_divmod(f_uni, h, pi)[0]
            g_uni = _rp_divmod(g_uni, h, pi)[0]
        y_common = min(f_ymult, g_ymult)
        d_red = d - (len(h) - 1) - y_common

        def rebuild(uni):
            # form = Y^(ymult - y_common) * homogenization of uni; the term
            # c*x^j lands at descending index d_red - j
            out = [ResidueElem.zero(pi)] * (d_red + 1)
            for j, c in enumerate(uni):
                out[d_red - j] = c
            return out

        return ResidueMap(pi, d, rebuild(f_uni), rebuild(g_uni))

    # -- multipliers ----------------------------------------------------------

    def _chart_step_coeffs(self, source_inf: bool, target_inf: bool):
        """Ascending-x numerator/denominator coefficient lists (over K) of the
        map written between the charts at the source and target points."""
        fc = [RatFunc.from_poly(c) for c in self.nf]
        gc = [RatFunc.from_poly(c) for c in self.ng]
        if source_inf:
            fc = fc[::-1]
            gc = gc[::-1]
        if target_inf:
            fc, gc = gc, fc
        num = fc[::-1]  # descending X-coefficients -> ascending in x
        den = gc[::-1]
        return num, den

    def multiplier(self, P: ProjPoint, n: int) -> RatFunc:
        """Chain-rule derivative of the n-th iterate along the orbit of P.

        Each orbit point is read in its own affine chart (the standard one,
        or 1/x at the point at infinity), so the product is always defined;
        for P periodic of period dividing n this is the cycle multiplier.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        p = self.p
        result = RatFunc.one(p)
        cur = P
        for _ in range(n):
            nxt = self.evaluate(cur)
            src_inf = cur.is_infinity()
            tgt_inf = nxt.is_infinity()
            num, den = self._chart_step_coeffs(src_inf, tgt_inf)
            x0 = RatFunc(cur.y, cur.x) if src_inf else RatFunc(cur.x, cur.y)
            a = _kpoly_eval(num, x0)
            b = _kpoly_eval(den, x0)
            da = _kpoly_eval(_kpoly_derivative(num), x0)
            db = _kpoly_eval(_kpoly_derivative(den), x0)
            if b.is_zero():
                raise AssertionError("chart choice prevents poles")
            result = result * (da * b - a * db) / (b * b)
            cur = nxt
        return result

    # -- conjugation -----------------------------------------------------------

    def conjugate(self, M: Mobius) -> HomogMap:
        """The map M^(-1) . phi . M; degree and bad places are preserved."""
        if M.p != self.p:
            raise ValueError("mixed characteristics")
        a = RatFunc.from_poly(M.a)
        b = RatFunc.from_poly(M.b)
        c = RatFunc.from_poly(M.c)
        d_ = RatFunc.from_poly(M.d)
        Fm = _compose_form(self.F_coeffs, a, b, c, d_)
        Gm = _compose_form(self.G_coeffs, a, b, c, d_)
        newF = [d_ * u - b * v for u, v in zip(Fm, Gm)]
        newG = [a * v - c * u for u, v in zip(Fm, Gm)]
        return HomogMap(newF, newG, p=self.p)

    # -- serialization -----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "d": self.d,
            "F": [str(c) for c in self.F_coeffs],
            "G": [str(c) for c in self.G_coeffs],
        }

    def __eq__(self, other):
        if not isinstance(other, HomogMap):
            return NotImplemented
        return self.p == other.p and self.nf == other.nf and self.ng == other.ng

    def __hash__(self):
        return hash((self.p, self.nf, self.ng))

    def __str__(self):
        def form(coeffs):
            d = self.d
            parts = []
            for i, c in enumerate(coeffs):
                if c.is_zero():
                    continue
                xpow = d - i
                mono = []
                if xpow:
                    mono.append("X" if xpow == 1 else f"X^{xpow}")
                if i:
                    mono.append("Y" if i == 1 else f"Y^{i}")
                head = "*".join(mono) if mono else "1"
                if not c.is_one() or not mono:
                    head = f"({c})*{head}" if mono else f"({c})"
                parts.append(head)
            return " + ".join(parts) if parts else "0"
        return f"[{form(self.nf)} : {form(self.ng)}]"

    def __repr__(self):
        return f"HomogMap(p={self.p}, d={self.d}, {self.to_json_dict()['F']}, {self.to_json_dict()['G']})"


# ---------------------------------------------------------------------------
# polynomials in one variable over K (coefficient lists, ascending)
# ---------------------------------------------------------------------------

def _kpoly_eval(coeffs: Sequence[RatFunc], x: RatFunc) -> RatFunc:
    acc = RatFunc.zero(x.p)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _kpoly_derivative(coeffs: Sequence[RatFunc]) -> list[RatFunc]:
    return [c * i for i, c in enumerate(coeffs)][1:]


def _kpoly_gcd_degree(num: Sequence[RatFunc], den: Sequence[RatFunc]) -> int:
    """Degree of gcd of two polynomials over K (ascending coefficient lists)."""
    def trim(cs):
        cs = list(cs)
        while cs and cs[-1].is_zero():
            cs.pop()
        return cs

    a, b = trim(num), trim(den)
    while b:
        # remainder of a by b
        inv = b[-1]
        r = list(a)
        while len(r) >= len(b) and r:
            c = r[-1] / inv
            shift = len(r) - len(b)
            for j in range(len(b)):
                r[shift + j] = r[shift + j] - c * b[j]
            r.pop()
            while r and r[-1].is_zero():
                r.pop()
        a, b = b, r
    return len(a) - 1


def _compose_form(coeffs: Sequence[RatFunc], a, b, c, d) -> list[RatFunc]:
    """Coefficients of F(aX + bY, cX + dY) for F given by descending coeffs."""
    deg = len(coeffs) - 1
    p = a.p

    def pow_list(u, v, k):
        # descending coefficients of (u X + v Y)**k
        out = [RatFunc.one(p)]
        for _ in range(k):
            nxt = [RatFunc.zero(p)] * (len(out) + 1)
            for i, w in enumerate(out):
                nxt[i] = nxt[i] + w * u
                nxt[i + 1] = nxt[i + 1] + w * v
            out = nxt
        return out

    first = [pow_list(a, b, k) for k in range(deg + 1)]
    second = [pow_list(c, d, k) for k in range(deg + 1)]
    acc = [RatFunc.zero(p)] * (deg + 1)
    for i, coef in enumerate(coeffs):
        if coef.is_zero():
            continue
        # term coef * (aX+bY)^(deg-i) * (cX+dY)^i
        u = first[deg - i]
        v = second[i]
        prod = [RatFunc.zero(p)] * (len(u) + len(v) - 1)
        for j, uj in enumerate(u):
            if uj.is_zero():
                continue
            for k, vk in enumerate(v):
                prod[j + k] = prod[j + k] + uj * vk
        for j, w in enumerate(prod):
            acc[j] = acc[j] + coef * w
    return acc


def _form_at_forms(coeffs: Sequence[RatFunc], u: list[list[RatFunc]],
                   v: list[list[RatFunc]], p: int) -> list[RatFunc]:
    # evaluate a degree-e form (descending coeffs) at the pair of forms whose
    # power tables u[k], v[k] hold descending coefficient lists of U^k, V^k
    e = len(coeffs) - 1
    deg_out = (len(u[1]) - 1) * e if e else 0
    acc = [RatFunc.zero(p)] * (deg_out + 1)
    for i, c in enumerate(coeffs):
        if c.is_zero():
            continue
        a = u[e - i]
        b = v[i]
        prod = [RatFunc.zero(p)] * (len(a) + len(b) - 1)
        for j, aj in enumerate(a):
            if aj.is_zero():
                continue
            for k, bk in enumerate(b):
                prod[j + k] = prod[j + k] + aj * bk
        for j, w in enumerate(prod):
            acc[j] = acc[j] + c * w
    return acc


def compose_maps(outer: HomogMap, inner: HomogMap) -> HomogMap:
    """The composite outer . inner, of degree deg(outer) * deg(inner)."""
    if outer.p != inner.p:
        raise ValueError("mixed characteristics")
    p = outer.p
    U = [RatFunc.from_poly(c) for c in inner.nf]
    V = [RatFunc.from_poly(c) for c in inner.ng]

    def powers(base):
        table = [[RatFunc.one(p)]]
        for _ in range(outer.d):
            prev = table[-1]
            nxt = [RatFunc.zero(p)] * (len(prev) + len(base) - 1)
            for j, aj in enumerate(prev):
                if aj.is_zero():
                    continue
                for k, bk in enumerate(base):
                    nxt[j + k] = nxt[j + k] + aj * bk
            table.append(nxt)
        return table

    u = powers(U)
    v = powers(V)
    F = _form_at_forms([RatFunc.from_poly(c) for c in outer.nf], u, v, p)
    G = _form_at_forms([RatFunc.from_poly(c) for c in outer.ng], u, v, p)
    return HomogMap(F, G, p=p)


def iterate_map(phi: HomogMap, k: int) -> HomogMap:
    """The k-th iterate of phi (k >= 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = phi
    for _ in range(k - 1):
        out = compose_maps(phi, out)
    return out


# ---------------------------------------------------------------------------
# construction from univariate rational functions, parsing
# ---------------------------------------------------------------------------

def from_rational_function(num_coeffs: Sequence, den_coeffs: Sequence,
                           p: Optional[int] = None) -> HomogMap:
    """Homogenize f(x) = num(x)/den(x) (ascending coefficient lists over K)
    to a degree-d pair of forms, d = max(deg num, deg den)."""
    probe = [c for c in list(num_coeffs) + list(den_coeffs)
             if isinstance(c, (RatFunc, FpPoly))]
    if p is None:
        if not probe:
            raise ValueError("cannot infer the characteristic; pass p=")
        p = probe[0].p
    num = [_coerce_coeff(p, c) for c in num_coeffs]
    den = [_coerce_coeff(p, c) for c in den_coeffs]
    while num and num[-1].is_zero():
        num.pop()
    while den and den[-1].is_zero():
        den.pop()
    if not den:
        raise ZeroDivisionError("zero denominator polynomial")
    if not num:
        raise ValueError("the zero map is not an endomorphism of P^1")
    if _kpoly_gcd_degree(num, den) > 0:
        raise ValueError("numerator and denominator must be coprime in x")
    d = max(len(num), len(den)) - 1
    if d < 1:
        raise ValueError("constant maps are not endomorphisms of degree >= 1")
    zero = RatFunc.zero(p)
    F = [zero] * (d + 1)
    G = [zero] * (d + 1)
    for i, c in enumerate(num):
        F[d - i] = c  # x^i -> X^i Y^(d-i), descending storage index d-i
    for i, c in enumerate(den):
        G[d - i] = c
    return HomogMap(F, G, p=p)


def parse_affine_map(p: int, text: str) -> HomogMap:
    """Parse the affine shorthand, e.g. ``x^2+t`` or ``(x^2+t)/x``.

    Coefficients are polynomials in t; a parenthesized coefficient may be a
    full polynomial, e.g. ``(t^2+1)*x^2+t*x+1``.
    """
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty map text")

    def split_top_slash(u: str):
        depth = 0
        for i, ch in enumerate(u):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "/" and depth == 0:
                return u[:i], u[i + 1:]
        return u, None

    num_s, den_s = split_top_slash(s)

    def strip_parens(u: str) -> str:
        if u.startswith("(") and u.endswith(")"):
            depth = 0
            for i, ch in enumerate(u):
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth == 0 and i != len(u) - 1:
                        return u
            return u[1:-1]
        return u

    def split_top_plus(u: str):
        parts, depth, start = [], 0, 0
        for i, ch in enumerate(u):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "+" and depth == 0:
                parts.append(u[start:i])
                start = i + 1
        parts.append(u[start:])
        return parts

    def parse_side(u: str) -> list[RatFunc]:
        u = strip_parens(u)
        coeffs: dict[int, RatFunc] = {}
        for term in split_top_plus(u):
            if not term:
                raise ValueError(f"empty term in {text!r}")
            if "x" in term:
                idx = term.index("x")
                before, after = term[:idx], term[idx + 1:]
                if after == "":
                    k = 1
                elif after.startswith("^") and after[1:].isdigit():
                    k = int(after[1:])
                else:
                    raise ValueError(f"bad term {term!r}")
                if before == "":
                    c = RatFunc.one(p)
                elif before.endswith("*"):
                    c = RatFunc.from_poly(parse_poly(p, strip_parens(before[:-1])))
                else:
                    raise ValueError(f"bad term {term!r}")
            else:
                k = 0
                c = RatFunc.from_poly(parse_poly(p, strip_parens(term)))
            coeffs[k] = coeffs.get(k, RatFunc.zero(p)) + c
        deg = max(coeffs) if coeffs else 0
        return [coeffs.get(i, RatFunc.zero(p)) for i in range(deg + 1)]

    num = parse_side(num_s)
    den = parse_side(den_s) if den_s is not None else [RatFunc.one(p)]
    return from_rational_function(num, den, p=p)


def parse_map(text: str, p: Optional[int] = None) -> HomogMap:
    """Parse a map from JSON (``{"p":..,"d":..,"F":[..],"G":[..]}``), from a
    ``@file`` reference to such JSON, or from the affine shorthand (which
    requires p)."""
    s = text.strip()
    if s.startswith("@"):
        with open(s[1:], "r", encoding="utf-8") as fh:
            s = fh.read().strip()
    if s.startswith("{"):
        data = json.loads(s)
        jp = int(data["p"])
        if p is not None and p != jp:
            raise ValueError(f"p mismatch: flag says {p}, JSON says {jp}")
        d = int(data["d"])
        F = [RatFunc.parse(jp, c) for c in data["F"]]
        G = [RatFunc.parse(jp, c) for c in data["G"]]
        if len(F) != d + 1 or len(G) != d + 1:
            raise ValueError("coefficient lists must have length d+1")
        return HomogMap(F, G, p=jp)
    if p is None:
        raise ValueError("affine map shorthand requires the characteristic p")
    return parse_affine_map(p, s)


def map_to_json(phi: HomogMap) -> str:
    return json.dumps(phi.to_json_dict(), sort_keys=False)
