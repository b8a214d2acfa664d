"""Orbits over F_p(t) and over residue fields, and executable checkers.

`iterate_orbit` walks a point forward with exact equality detection on
canonical coordinates, so the tail/cycle split of a finite orbit is exact;
orbits are abandoned when they leave a height box or exhaust a step budget.
`residue_dynamics` builds the full functional graph of the reduced map on
P^1(k(pi)).

The checkers turn the structural facts used by the bound arguments into
executable predicates:

* ``check_prop_51``: the logarithmic distance satisfies the ultrametric
  triangle comparison.
* ``check_prop_52``: a map with good reduction at a place does not decrease
  the logarithmic distance there.
* ``check_prop_61``: along a periodic cycle the distances are shift
  invariant, and pairs of iterates whose index gap is coprime to the period
  are all at the distance of the first step.
* ``check_lemma_pab``: along a tail falling into a fixed point, distances
  to the fixed point are monotone and pairwise distances equal the distance
  of the earlier point to the fixed point.
* ``check_lemma_equal_distances``: a family of points pairwise at one
  common distance at every finite place cannot be larger than p**2
  (for the base field with one exceptional place).
* ``verify_mst``: the minimal period n factors against the residue data as
  n = m, n = m*r, or n = p^e*m*r, where m is the period of the reduced
  point and r the multiplicative order of the reduced cycle multiplier
  (r = infinity when the reduced multiplier vanishes, which forces n = m).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .algebra import FpPoly, ResidueElem, _prime_factors_int, factor, mult_order
from .dynamics import HomogMap, ResidueMap, mobius_sending_to_origin
from .funcfield import Place, eta_bound
from .geometry import (
    ProjPoint,
    ResiduePoint,
    all_residue_points,
    enumerate_points,
    log_distance,
    reduce_point,
)

__all__ = [
    "OrbitStatus",
    "OrbitReport",
    "FunctionalGraph",
    "MstDecomposition",
    "iterate_orbit",
    "residue_dynamics",
    "residue_cycle_multiplier",
    "find_periodic_points",
    "verify_mst",
    "check_prop_51",
    "check_prop_52",
    "check_prop_61",
    "check_lemma_pab",
    "check_lemma_equal_distances",
    "cross_product_support",
    "default_max_steps",
    "default_max_height",
    "checker_record",
]


class OrbitStatus(enum.Enum):
    FINITE_ORBIT = "finite"
    HEIGHT_ESCAPE = "height_escape"
    STEP_LIMIT = "step_limit"


@dataclass(frozen=True)
class OrbitReport:
    """Result of iterating a point: the distinct visited points in order,
    plus the exact tail/cycle split when the orbit closed up."""

    start: ProjPoint
    status: OrbitStatus
    points: tuple[ProjPoint, ...]
    tail: Optional[int] = None
    cycle: Optional[int] = None

    @property
    def orbit_size(self) -> Optional[int]:
        if self.status is not OrbitStatus.FINITE_ORBIT:
            return None
        return self.tail + self.cycle

    def is_periodic_start(self) -> bool:
        return self.status is OrbitStatus.FINITE_ORBIT and self.tail == 0


def default_max_steps(p: int) -> int:
    """Step budget comfortably above every finite-orbit bound: 4*eta(p, 1, 1)."""
    return 4 * eta_bound(p, 1, 1)


def default_max_height(box_height: int) -> int:
    """Escape threshold for a search box of the given height: 8*(B+1)."""
    return 8 * (box_height + 1)


def iterate_orbit(phi: HomogMap, P: ProjPoint,
                  max_steps: Optional[int] = None,
                  max_height: Optional[int] = None) -> OrbitReport:
    """Iterate until the orbit revisits a point, leaves the height box, or
    runs out of steps.  Defaults: max_steps = 4*eta(p,1,1) and
    max_height = 8*(h(P)+1); pass max_height=None explicitly via a large
    value if no escape detection is wanted."""
    if max_steps is None:
        max_steps = default_max_steps(phi.p)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if max_height is None:
        max_height = default_max_height(P.height)
    seen = {P: 0}
    pts = [P]
    cur = P
    for _ in range(max_steps):
        nxt = phi.evaluate(cur)
        hit = seen.get(nxt)
        if hit is not None:
            return OrbitReport(P, OrbitStatus.FINITE_ORBIT, tuple(pts),
                               tail=hit, cycle=len(pts) - hit)
        if nxt.height > max_height:
            return OrbitReport(P, OrbitStatus.HEIGHT_ESCAPE, tuple(pts))
        seen[nxt] = len(pts)
        pts.append(nxt)
        cur = nxt
    return OrbitReport(P, OrbitStatus.STEP_LIMIT, tuple(pts))


@dataclass(frozen=True)
class FunctionalGraph:
    """Image, tail length and eventual cycle length for every point of
    P^1(k(pi)) under a reduced map."""

    modulus: FpPoly
    points: tuple[ResiduePoint, ...]
    image: tuple[int, ...]
    tail: tuple[int, ...]
    cycle_len: tuple[int, ...]

    def index(self, point: ResiduePoint) -> int:
        try:
            return self._index_map()[point]
        except KeyError:
            raise ValueError(f"{point} is not a point of this graph") from None

    def _index_map(self):
        # dataclass(frozen) caches via object.__setattr__ on first use
        cached = getattr(self, "_idx", None)
        if cached is None:
            cached = {pt: i for i, pt in enumerate(self.points)}
            object.__setattr__(self, "_idx", cached)
        return cached

    def image_of(self, point: ResiduePoint) -> ResiduePoint:
        return self.points[self.image[self.index(point)]]

    def period_of(self, point: ResiduePoint) -> int:
        """Cycle length of a periodic point (tail must be zero)."""
        i = self.index(point)
        if self.tail[i] != 0:
            raise ValueError(f"{point} is preperiodic, not periodic")
        return self.cycle_len[i]

    def cycle_lengths(self) -> list[int]:
        """Sorted distinct cycle lengths appearing in the graph."""
        return sorted({c for c, t in zip(self.cycle_len, self.tail) if t == 0})


@lru_cache(maxsize=256)
def _field_tables(pi: FpPoly):
    """Discrete-log multiplication tables for k(pi), elements encoded as
    little-endian base-p digit integers in [0, q)."""
    p = pi.p
    k = pi.degree
    q = p ** k
    pw = [p ** i for i in range(k)]
    digits = [tuple((n // pw[i]) % p for i in range(k)) for n in range(q)]

    def to_int(f: FpPoly) -> int:
        return sum(c * pw[i] for i, c in enumerate(f.coeffs))

    def poly_mul(a: int, b: int) -> int:
        fa = FpPoly(p, digits[a])
        fb = FpPoly(p, digits[b])
        return to_int((fa * fb) % pi)

    def pow_int(a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = poly_mul(r, a)
            a = poly_mul(a, a)
            e >>= 1
        return r

    order_factors = _prime_factors_int(q - 1) if q > 2 else []
    gen = 1
    for cand in range(1, q):
        if all(pow_int(cand, (q - 1) // f) != 1 for f in order_factors):
            gen = cand
            break
    exp = [1] * (2 * (q - 1) if q > 2 else 2)
    log = [0] * q
    cur = 1
    for i in range(q - 1):
        exp[i] = cur
        log[cur] = i
        cur = poly_mul(cur, gen)
    for i in range(q - 1, len(exp)):
        exp[i] = exp[i - (q - 1)]
    return p, k, q, pw, digits, exp, log


def _fast_image_table(phi: HomogMap, place: Place) -> tuple[list[int], int]:
    """Image indices for points encoded 0..q-1 (affine x) plus q (infinity)."""
    pi = place.pi
    p, k, q, pw, digits, exp, log = _field_tables(pi)
    red = phi.reduce_map(place)
    qm1 = q - 1

    def to_int_elem(e) -> int:
        return sum(c * pw[i] for i, c in enumerate(e.rep.coeffs))

    fc = [to_int_elem(c) for c in red.f_coeffs]
    gc = [to_int_elem(c) for c in red.g_coeffs]

    def mul(a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return exp[log[a] + log[b]]

    def add(a: int, b: int) -> int:
        if a == 0:
            return b
        if b == 0:
            return a
        da, db = digits[a], digits[b]
        return sum(((da[i] + db[i]) % p) * pw[i] for i in range(k))

    def image_of(x: int, at_infinity: bool) -> int:
        if at_infinity:
            fval, gval = fc[0], gc[0]
        else:
            fval, gval = fc[0], gc[0]
            for i in range(1, len(fc)):
                fval = add(mul(fval, x), fc[i])
                gval = add(mul(gval, x), gc[i])
        if gval == 0:
            return q
        if fval == 0:
            return 0
        return exp[(log[fval] - log[gval]) % qm1]

    image = [image_of(x, False) for x in range(q)]
    image.append(image_of(0, True))
    return image, q


def _analyze_functional_graph(image: Sequence[int]) -> tuple[list[int], list[int]]:
    """Tail length and eventual cycle length for every node of a functional
    graph given by its image array."""
    n = len(image)
    tail = [0] * n
    cycle_len = [0] * n
    state = [0] * n  # 0 unvisited, 1 on current path, 2 resolved
    for start in range(n):
        if state[start] != 0:
            continue
        path = []
        pos = {}
        v = start
        while state[v] == 0:
            state[v] = 1
            pos[v] = len(path)
            path.append(v)
            v = image[v]
        if state[v] == 1:
            k = pos[v]
            length = len(path) - k
            for u in path[k:]:
                tail[u] = 0
                cycle_len[u] = length
                state[u] = 2
            for i in range(k - 1, -1, -1):
                u = path[i]
                tail[u] = k - i
                cycle_len[u] = length
                state[u] = 2
        else:
            base_tail = tail[v]
            length = cycle_len[v]
            for i in range(len(path) - 1, -1, -1):
                u = path[i]
                tail[u] = base_tail + (len(path) - i)
                cycle_len[u] = length
                state[u] = 2
    return tail, cycle_len


@lru_cache(maxsize=4096)
def _residue_graph_cached(phi: HomogMap, place: Place, cap: int) -> FunctionalGraph:
    pi = place.pi
    q = phi.p ** pi.degree
    if q + 1 > cap:
        raise ValueError(f"residue field too large: {q + 1} points > cap {cap}")
    image_by_int, _ = _fast_image_table(phi, place)
    points = all_residue_points(pi)
    _, _, _, pw, _, _, _ = _field_tables(pi)
    # all_residue_points enumerates by coefficient tuples, not by encoded int
    int_of_position = [
        sum(c * pw[i] for i, c in enumerate(pt.x.rep.coeffs)) for pt in points[:-1]
    ]
    int_of_position.append(q)
    position_of_int = [0] * (q + 1)
    for pos, val in enumerate(int_of_position):
        position_of_int[val] = pos
    image = [position_of_int[image_by_int[val]] for val in int_of_position]
    tail, cycle_len = _analyze_functional_graph(image)
    return FunctionalGraph(pi, tuple(points), tuple(image), tuple(tail), tuple(cycle_len))


def residue_dynamics(phi: HomogMap, place: Place, cap: int = 10 ** 4) -> FunctionalGraph:
    """Full functional graph of the reduced map on P^1(k(pi)) by exhaustive
    evaluation; requires p**deg(pi) + 1 <= cap.  Results are cached, and the
    evaluation runs on discrete-log tables; `ResidueMap.apply` is the
    independent slow route the tests compare against."""
    if not place.is_finite:
        raise ValueError("residue dynamics requires a finite place")
    return _residue_graph_cached(phi, place, cap)


def find_periodic_points(phi: HomogMap, height_bound: int,
                         max_steps: Optional[int] = None) -> list[tuple[ProjPoint, int]]:
    """Scan every point of height <= height_bound and report those whose
    orbit returns to the start, with the exact minimal period.

    Detection runs under the standard caps (step budget and escape height
    8*(height_bound+1)), which every orbit relevant at desk scale respects.
    """
    if phi.d < 2:
        raise ValueError("periodic-point search expects degree >= 2")
    if max_steps is None:
        max_steps = default_max_steps(phi.p)
    cap = default_max_height(height_bound)
    out = []
    for P in enumerate_points(phi.p, height_bound):
        rep = iterate_orbit(phi, P, max_steps=max_steps, max_height=cap)
        if rep.is_periodic_start():
            out.append((P, rep.cycle))
    return out


# ---------------------------------------------------------------------------
# checkers
# ---------------------------------------------------------------------------

def _orbit_cycle(phi: HomogMap, P: ProjPoint, n: int) -> list[ProjPoint]:
    """The points P, phi(P), ..., phi^(n-1)(P); raises unless P is periodic
    with minimal period exactly n."""
    pts = [P]
    cur = P
    for _ in range(n - 1):
        cur = phi.evaluate(cur)
        if cur == P:
            raise ValueError(f"{P} has period smaller than {n}")
        pts.append(cur)
    if phi.evaluate(cur) != P:
        raise ValueError(f"{P} is not periodic of period {n}")
    if len(set(pts)) != n:
        raise ValueError(f"{P} has period smaller than {n}")
    return pts


@dataclass(frozen=True)
class MstDecomposition:
    """How a minimal period n relates to residue data at a place: the period
    m of the reduced point, the order r of the reduced multiplier (None
    encodes r = infinity, forcing the n = m case), and the exponent e in the
    n = p^e*m*r case."""

    place: Place
    n: int
    m: int
    r: Optional[int]
    e: Optional[int]
    case: str  # "i" | "ii" | "iii" | "violation"

    @property
    def is_violation(self) -> bool:
        return self.case == "violation"


def residue_cycle_multiplier(red: ResidueMap, point: ResiduePoint, m: int) -> ResidueElem:
    """Multiplier of a length-m cycle of the reduced map, computed inside
    k(pi) by the chain rule in per-point charts (1/x at infinity).

    This is the reduction of the m-th iterate's derivative; computing it on
    the residue side keeps it well defined even when a global orbit point
    reduces to infinity, where a fixed global affine chart degenerates.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    modulus = red.modulus

    def eval_poly(coeffs, x0):
        acc = ResidueElem.zero(modulus)
        for c in reversed(coeffs):
            acc = acc * x0 + c
        return acc

    def derivative(coeffs):
        return [ResidueElem._make(c.modulus, c.rep * i) for i, c in enumerate(coeffs)][1:]

    prod = ResidueElem.one(modulus)
    cur = point
    for _ in range(m):
        nxt = red.apply(cur)
        fc = list(red.f_coeffs)
        gc = list(red.g_coeffs)
        if cur.is_infinity():
            fc = fc[::-1]
            gc = gc[::-1]
        if nxt.is_infinity():
            fc, gc = gc, fc
        num = fc[::-1]  # ascending in the chart coordinate
        den = gc[::-1]
        x0 = ResidueElem.zero(modulus) if cur.is_infinity() else cur.x
        a = eval_poly(num, x0)
        b = eval_poly(den, x0)
        da = eval_poly(derivative(num), x0)
        db = eval_poly(derivative(den), x0)
        if b.is_zero():
            raise AssertionError("chart choice prevents poles")
        prod = prod * (da * b - a * db) / (b * b)
        cur = nxt
    return prod


def verify_mst(phi: HomogMap, P: ProjPoint, n: int, place: Place) -> MstDecomposition:
    """Match the minimal period of P against its residue data at a place of
    good reduction; see the module docstring for the three admissible cases.

    The reduced multiplier is computed on the residue side (the multiplier
    of the reduced cycle), which equals the reduction of the m-th iterate's
    derivative at P whenever that reduction is defined.
    """
    if phi.d < 2:
        raise ValueError("the period decomposition applies to degree >= 2")
    if not place.is_finite:
        raise ValueError("a finite place is required")
    if not phi.has_good_reduction(place):
        raise ValueError(f"bad reduction at {place}")
    _orbit_cycle(phi, P, n)
    graph = residue_dynamics(phi, place)
    reduced = reduce_point(P, place)
    m = graph.period_of(reduced)
    lam_bar = residue_cycle_multiplier(phi.reduce_map(place), reduced, m)
    p = phi.p
    if lam_bar.is_zero():
        r = None
        case = "i" if n == m else "violation"
        return MstDecomposition(place, n, m, r, None, case)
    r = mult_order(lam_bar)
    if n == m:
        return MstDecomposition(place, n, m, r, None, "i")
    if n == m * r:
        return MstDecomposition(place, n, m, r, None, "ii")
    q, rem = divmod(n, m * r)
    if rem == 0 and q > 1:
        e = 0
        while q % p == 0:
            q //= p
            e += 1
        if q == 1 and e >= 1:
            return MstDecomposition(place, n, m, r, e, "iii")
    return MstDecomposition(place, n, m, r, None, "violation")


def check_prop_51(P1: ProjPoint, P2: ProjPoint, P3: ProjPoint, place: Place) -> bool:
    """d(P1,P3) >= min(d(P1,P2), d(P2,P3)) for pairwise distinct points."""
    if P1 == P2 or P2 == P3 or P1 == P3:
        raise ValueError("points must be pairwise distinct")
    return log_distance(P1, P3, place) >= min(
        log_distance(P1, P2, place), log_distance(P2, P3, place)
    )


def check_prop_52(phi: HomogMap, P: ProjPoint, Q: ProjPoint, place: Place) -> bool:
    """d(phi(P), phi(Q)) >= d(P, Q) at a finite place of good reduction."""
    if not place.is_finite:
        raise ValueError("a finite place is required")
    if not phi.has_good_reduction(place):
        raise ValueError(f"bad reduction at {place} violates the precondition")
    if P == Q:
        raise ValueError("points must be distinct")
    fP, fQ = phi.evaluate(P), phi.evaluate(Q)
    if fP == fQ:
        raise ValueError("image points coincide; the distance is undefined")
    return log_distance(fP, fQ, place) >= log_distance(P, Q, place)


def cross_product_support(points: Sequence[ProjPoint]) -> list[Place]:
    """All finite places dividing some pairwise cross product x_i*y_j - x_j*y_i.

    Outside this (finite, computed) support every pairwise logarithmic
    distance vanishes, which makes place-quantified equalities decidable.
    """
    out: set[Place] = set()
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            cross = points[i].x * points[j].y - points[j].x * points[i].y
            if cross.is_zero():
                raise ValueError("points must be pairwise distinct")
            if not cross.is_constant():
                out.update(Place.finite(pi) for pi in factor(cross)[1])
    return sorted(out, key=Place.sort_key)


def check_prop_61(phi: HomogMap, P: ProjPoint, n: int) -> bool:
    """Shift invariance and the coprime-gap equality of cycle distances, at
    every finite place in the joint support of the cycle's cross products.

    Requires good reduction at every finite place; iterate indices are read
    modulo the period n.
    """
    if phi.bad_places():
        raise ValueError("good reduction at every finite place is required")
    pts = _orbit_cycle(phi, P, n)
    if n == 1:
        return True
    for place in cross_product_support(pts):
        dist = {}
        for i in range(n):
            for j in range(i + 1, n):
                dist[(i, j)] = log_distance(pts[i], pts[j], place)

        def dd(i, j):
            i %= n
            j %= n
            return dist[(i, j) if i < j else (j, i)]

        base = dd(1, 0)
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(1, n):
                    if dd(i + k, j + k) != dist[(i, j)]:
                        return False
                if _gcd_int(i - j, n) == 1 and dist[(i, j)] != base:
                    return False
    return True


def _gcd_int(a: int, b: int) -> int:
    a = abs(a)
    while b:
        a, b = b, a % b
    return a


def check_lemma_pab(phi: HomogMap, orbit: Sequence[ProjPoint], place: Place,
                    move_terminal_to_origin: bool = False) -> bool:
    """Tail-into-fixed-point distance laws at a finite place of good
    reduction.

    `orbit` lists consecutive iterates ending in a fixed point: the last
    entry T satisfies phi(T) = T and each entry maps to the next.  With
    ``move_terminal_to_origin`` the whole configuration is first conjugated
    by a unit-determinant matrix taking T to [0 : 1]; both paths agree.
    """
    if not place.is_finite:
        raise ValueError("a finite place is required")
    if not phi.has_good_reduction(place):
        raise ValueError(f"bad reduction at {place} violates the precondition")
    pts = list(orbit)
    if not pts:
        raise ValueError("empty orbit")
    for a, b in zip(pts, pts[1:]):
        if phi.evaluate(a) != b:
            raise ValueError("orbit is not consistent with the map")
    if phi.evaluate(pts[-1]) != pts[-1]:
        raise ValueError("the terminal point must be fixed")
    if len(set(pts)) != len(pts):
        raise ValueError("orbit points must be distinct")
    if move_terminal_to_origin:
        N = mobius_sending_to_origin(pts[-1])
        phi = phi.conjugate(N.inverse())
        pts = [N.apply(Q) for Q in pts]
    L = len(pts)
    terminal = pts[-1]

    def p_minus(j):  # P_{-j}
        return pts[L - 1 - j]

    for b in range(2, L):
        for a in range(1, b):
            if log_distance(p_minus(b), terminal, place) > \
               log_distance(p_minus(a), terminal, place):
                return False
            if log_distance(p_minus(b), p_minus(a), place) != \
               log_distance(p_minus(b), terminal, place):
                return False
    return True


def check_lemma_equal_distances(points: Sequence[ProjPoint], p: int) -> tuple[bool, bool]:
    """Equal-pairwise-distance hypothesis and the p**2 cardinality bound.

    Returns ``(hypothesis, bound_ok)``: `hypothesis` holds iff every pair of
    the given points is at the distance of the first pair at every finite
    place (checked on the computed joint support; elsewhere all distances
    vanish), and `bound_ok` is the implication hypothesis => len <= p**2.
    """
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise ValueError("points must be pairwise distinct")
    if any(q.p != p for q in pts):
        raise ValueError("points must live over F_p(t) for the given p")
    if len(pts) < 2:
        return True, True
    hypothesis = True
    for place in cross_product_support(pts):
        base = log_distance(pts[0], pts[1], place)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if log_distance(pts[i], pts[j], place) != base:
                    hypothesis = False
                    break
            if not hypothesis:
                break
        if not hypothesis:
            break
    bound_ok = (not hypothesis) or len(pts) <= p * p
    return hypothesis, bound_ok


def checker_record(checker: str, instance: str, result: bool,
                   witness: Optional[dict] = None) -> dict:
    """Uniform JSON shape for checker outcomes."""
    return {
        "instance": instance,
        "checker": checker,
        "result": bool(result),
        "witness": witness,
    }
