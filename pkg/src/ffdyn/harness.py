"""Seeded map generators, verification campaigns, and report emission.

Campaigns generate endomorphisms with good reduction at every finite place,
scan a height box of starting points, and compare every observed minimal
period and finite orbit size against the characteristic-dependent ceilings

    period:      3 (p=2),  72 (p=3),  (p^2-1)*p   (p>=5)
    orbit size:  9 (p=2), 288 (p=3),  (p+1)*(p^2-1)*p (p>=5).

Any orbit beyond its ceiling is recorded as a violation; a report with an
empty violation list maps to process exit code 0.  Reports are serialized
with stable field order, and a fixed master seed yields byte-identical
reports whether maps are scanned serially or by a worker pool.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from io import StringIO
from typing import Optional

from .algebra import FpPoly, _check_prime
from .dynamics import HomogMap, Mobius, iterate_map
from .funcfield import Place, finite_places_up_to
from .geometry import ProjPoint, enumerate_points
from .orbits import (
    OrbitStatus,
    check_lemma_equal_distances,
    check_lemma_pab,
    check_prop_51,
    check_prop_52,
    check_prop_61,
    checker_record,
    cross_product_support,
    default_max_height,
    default_max_steps,
    iterate_orbit,
    verify_mst,
)

__all__ = [
    "FAMILIES",
    "ALL_CHECKERS",
    "MapGenSpec",
    "CampaignConfig",
    "CampaignReport",
    "gen_maps",
    "run_bound_campaign",
    "run_property_campaign",
    "emit_report",
    "period_bound",
    "orbit_bound",
]

FAMILIES = ("MonicPoly", "ConjugatedMonicPoly", "RejectionRandom")
ALL_CHECKERS = ("prop51", "prop52", "prop61", "mst", "lemma_pab", "lemma_eq")

REJECTION_CAP_FACTOR = 200


def period_bound(p: int) -> int:
    """Ceiling for minimal periods of maps with good reduction everywhere."""
    if p == 2:
        return 3
    if p == 3:
        return 72
    return (p * p - 1) * p


def orbit_bound(p: int) -> int:
    """Ceiling for finite orbit sizes of maps with good reduction everywhere."""
    if p == 2:
        return 9
    if p == 3:
        return 288
    return (p + 1) * (p * p - 1) * p


@dataclass(frozen=True)
class MapGenSpec:
    """Deterministic generator settings for one family of maps."""

    family: str
    p: int
    d: int
    coeff_degree_bound: int
    conjugation_depth: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        _check_prime(self.p)
        if self.d < 2:
            raise ValueError("map degree must be >= 2")
        if self.coeff_degree_bound < 0:
            raise ValueError("coefficient degree bound must be >= 0")

    def echo(self) -> dict:
        return {
            "family": self.family,
            "p": self.p,
            "d": self.d,
            "coeff_degree_bound": self.coeff_degree_bound,
            "conjugation_depth": self.conjugation_depth,
            "seed": self.seed,
        }


def _random_poly(rng: random.Random, p: int, max_degree: int) -> FpPoly:
    return FpPoly(p, [rng.randrange(p) for _ in range(max_degree + 1)])


def _monic_map(rng: random.Random, spec: MapGenSpec) -> HomogMap:
    p, d = spec.p, spec.d
    F = [FpPoly.zero(p)] * (d + 1)
    F[0] = FpPoly.one(p)
    for i in range(d):  # coefficient of x^i, stored at descending index d-i
        F[d - i] = _random_poly(rng, p, spec.coeff_degree_bound)
    G = [FpPoly.zero(p)] * (d + 1)
    G[d] = FpPoly.one(p)
    return HomogMap(F, G, p=p)


def _random_mobius_word(rng: random.Random, spec: MapGenSpec) -> Mobius:
    p = spec.p
    M = Mobius.identity(p)
    for _ in range(max(1, spec.conjugation_depth)):
        kind = rng.randrange(3)
        if kind == 0:
            M = M.compose(Mobius.translation(_random_poly(rng, p, spec.coeff_degree_bound)))
        elif kind == 1:
            M = M.compose(Mobius.inversion(p))
        else:
            M = M.compose(Mobius.scaling(p, rng.randrange(1, p)))
    return M


def gen_maps(spec: MapGenSpec, count: int) -> list[HomogMap]:
    """Generate `count` maps; every returned map has bad_places() == {} by
    construction (asserted).  RejectionRandom may fall short when its
    attempt cap is exhausted; the shorter list reports the shortfall."""
    if count < 0:
        raise ValueError("count must be >= 0")
    out: list[HomogMap] = []
    if spec.family == "RejectionRandom":
        p, d = spec.p, spec.d
        attempts = 0
        i = 0
        while len(out) < count and attempts < REJECTION_CAP_FACTOR * count:
            rng = random.Random(f"{spec.seed}:{spec.family}:{p}:{d}:try{i}")
            i += 1
            attempts += 1
            F = [_random_poly(rng, p, spec.coeff_degree_bound) for _ in range(d + 1)]
            G = [_random_poly(rng, p, spec.coeff_degree_bound) for _ in range(d + 1)]
            try:
                phi = HomogMap(F, G, p=p)
            except ValueError:
                continue
            if phi.resultant().is_constant():
                out.append(phi)
        return out
    for i in range(count):
        rng = random.Random(f"{spec.seed}:{spec.family}:{spec.p}:{spec.d}:{i}")
        phi = _monic_map(rng, spec)
        if spec.family == "ConjugatedMonicPoly":
            phi = phi.conjugate(_random_mobius_word(rng, spec))
        assert not phi.bad_places(), "good-reduction family produced a bad place"
        out.append(phi)
    return out


@dataclass(frozen=True)
class CampaignConfig:
    """Settings for one campaign.  `generators` pairs each MapGenSpec with a
    requested map count; execution-only knobs (workers, output path) are kept
    out of the report's config echo so they cannot break byte determinism."""

    p: int
    generators: tuple[tuple[MapGenSpec, int], ...]
    height_bound: int = 3
    max_steps: Optional[int] = None
    max_height: Optional[int] = None
    checkers: tuple[str, ...] = ALL_CHECKERS
    seed: int = 0
    prop51_count: int = 1000
    prop52_count: int = 1000
    mst_place_degree: int = 3
    period_threshold_override: Optional[int] = None
    orbit_threshold_override: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        _check_prime(self.p)
        if self.height_bound < 0:
            raise ValueError("height bound must be >= 0")
        if not self.generators:
            raise ValueError("at least one generator entry is required")
        for spec, count in self.generators:
            if spec.p != self.p:
                raise ValueError("generator characteristic differs from campaign p")
            if count < 0:
                raise ValueError("map counts must be >= 0")
        for name in self.checkers:
            if name not in ALL_CHECKERS:
                raise ValueError(f"unknown checker {name!r}")

    def effective_max_steps(self) -> int:
        return self.max_steps if self.max_steps is not None else default_max_steps(self.p)

    def effective_max_height(self) -> int:
        if self.max_height is not None:
            return self.max_height
        return default_max_height(self.height_bound)

    def echo(self) -> dict:
        return {
            "p": self.p,
            "generators": [
                {"spec": spec.echo(), "count": count} for spec, count in self.generators
            ],
            "height_bound": self.height_bound,
            "max_steps": self.effective_max_steps(),
            "max_height": self.effective_max_height(),
            "checkers": list(self.checkers),
            "seed": self.seed,
            "prop51_count": self.prop51_count,
            "prop52_count": self.prop52_count,
            "mst_place_degree": self.mst_place_degree,
            "period_threshold_override": self.period_threshold_override,
            "orbit_threshold_override": self.orbit_threshold_override,
        }


@dataclass
class CampaignReport:
    """Aggregated campaign outcome; `violations` empty <=> exit code 0."""

    kind: str
    config: dict
    thresholds: dict
    maps_requested: int = 0
    maps_generated: int = 0
    points_per_map: int = 0
    status_counts: dict = field(default_factory=dict)
    periodic_points: int = 0
    finite_orbits: int = 0
    period_histogram: dict = field(default_factory=dict)
    orbit_size_histogram: dict = field(default_factory=dict)
    max_period: int = 0
    max_orbit_size: int = 0
    per_family: dict = field(default_factory=dict)
    orbit_rows: list = field(default_factory=list)
    periodic_instances: list = field(default_factory=list)
    checker_counts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if self.violations else 0

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "thresholds": self.thresholds,
            "maps_requested": self.maps_requested,
            "maps_generated": self.maps_generated,
            "points_per_map": self.points_per_map,
            "status_counts": dict(sorted(self.status_counts.items())),
            "periodic_points": self.periodic_points,
            "finite_orbits": self.finite_orbits,
            "period_histogram": {str(k): v for k, v in sorted(self.period_histogram.items())},
            "orbit_size_histogram": {str(k): v for k, v in sorted(self.orbit_size_histogram.items())},
            "max_period": self.max_period,
            "max_orbit_size": self.max_orbit_size,
            "per_family": {k: self.per_family[k] for k in sorted(self.per_family)},
            "checker_counts": {k: self.checker_counts[k] for k in sorted(self.checker_counts)},
            "orbit_rows": self.orbit_rows,
            "periodic_instances": self.periodic_instances,
            "violations": self.violations,
        }


# ---------------------------------------------------------------------------
# bound campaign
# ---------------------------------------------------------------------------

_SCAN_CTX: dict = {}


def _scan_init(points, max_steps, max_height):
    _SCAN_CTX["points"] = points
    _SCAN_CTX["max_steps"] = max_steps
    _SCAN_CTX["max_height"] = max_height


def _scan_one(phi: HomogMap) -> dict:
    """Scan every box point under one map; pure function of its arguments."""
    points = _SCAN_CTX["points"]
    max_steps = _SCAN_CTX["max_steps"]
    max_height = _SCAN_CTX["max_height"]
    statuses = {s.value: 0 for s in OrbitStatus}
    finite = []
    for P in points:
        rep = iterate_orbit(phi, P, max_steps=max_steps, max_height=max_height)
        statuses[rep.status.value] += 1
        if rep.status is OrbitStatus.FINITE_ORBIT:
            finite.append((str(P), rep.tail, rep.cycle, rep.orbit_size))
    return {"statuses": statuses, "finite": finite}


def run_bound_campaign(config: CampaignConfig) -> CampaignReport:
    """Generate maps, scan the height box under each, and compare every
    minimal period and finite orbit size against the p-dependent ceilings."""
    p = config.p
    pb = config.period_threshold_override
    ob = config.orbit_threshold_override
    pb = period_bound(p) if pb is None else pb
    ob = orbit_bound(p) if ob is None else ob
    report = CampaignReport(
        kind="bounds",
        config=config.echo(),
        thresholds={"period": pb, "orbit_size": ob},
    )
    maps: list[HomogMap] = []
    provenance: list[tuple[str, int]] = []  # (family, d)
    for spec, count in config.generators:
        generated = gen_maps(spec, count)
        report.maps_requested += count
        fam = report.per_family.setdefault(
            spec.family, {"maps_requested": 0, "maps_generated": 0,
                          "finite_orbits": 0, "periodic_points": 0}
        )
        fam["maps_requested"] += count
        fam["maps_generated"] += len(generated)
        maps.extend(generated)
        provenance.extend((spec.family, spec.d) for _ in generated)
    report.maps_generated = len(maps)

    points = enumerate_points(p, config.height_bound)
    report.points_per_map = len(points)
    max_steps = config.effective_max_steps()
    max_height = config.effective_max_height()

    if config.workers > 1:
        with ProcessPoolExecutor(
            max_workers=config.workers,
            initializer=_scan_init,
            initargs=(points, max_steps, max_height),
        ) as pool:
            results = list(pool.map(_scan_one, maps, chunksize=8))
    else:
        _scan_init(points, max_steps, max_height)
        results = [_scan_one(phi) for phi in maps]

    statuses = {s.value: 0 for s in OrbitStatus}
    for map_id, (res, (family, d)) in enumerate(zip(results, provenance)):
        for k, v in res["statuses"].items():
            statuses[k] += v
        for point_str, tail, cycle, size in res["finite"]:
            report.finite_orbits += 1
            report.per_family[family]["finite_orbits"] += 1
            report.period_histogram[cycle] = report.period_histogram.get(cycle, 0) + 1
            report.orbit_size_histogram[size] = report.orbit_size_histogram.get(size, 0) + 1
            report.max_period = max(report.max_period, cycle)
            report.max_orbit_size = max(report.max_orbit_size, size)
            ok = cycle <= pb and size <= ob
            report.orbit_rows.append({
                "map_id": map_id,
                "family": family,
                "d": d,
                "point": point_str,
                "tail": tail,
                "cycle": cycle,
                "orbit_size": size,
                "threshold": ob,
                "ok": ok,
            })
            if tail == 0:
                report.periodic_points += 1
                report.per_family[family]["periodic_points"] += 1
                report.periodic_instances.append({
                    "map_id": map_id,
                    "family": family,
                    "d": d,
                    "point": point_str,
                    "period": cycle,
                })
            if cycle > pb:
                report.violations.append(checker_record(
                    "period_bound", f"map {map_id} point {point_str}", False,
                    {"cycle": cycle, "threshold": pb}))
            if size > ob:
                report.violations.append(checker_record(
                    "orbit_bound", f"map {map_id} point {point_str}", False,
                    {"orbit_size": size, "threshold": ob}))
    report.status_counts = statuses
    return report


# ---------------------------------------------------------------------------
# property campaign
# ---------------------------------------------------------------------------

def _random_point(rng: random.Random, p: int, height: int) -> ProjPoint:
    while True:
        x = FpPoly(p, [rng.randrange(p) for _ in range(height + 1)])
        y = FpPoly(p, [rng.randrange(p) for _ in range(height + 1)])
        if not (x.is_zero() and y.is_zero()):
            return ProjPoint.from_coords(x, y)


def _distinct_points(rng, p, height, k):
    pts = []
    while len(pts) < k:
        q = _random_point(rng, p, height)
        if q not in pts:
            pts.append(q)
    return pts


def _tally(report: CampaignReport, name: str, passed: bool, instance: str,
           witness: Optional[dict] = None):
    counts = report.checker_counts.setdefault(name, {"run": 0, "passed": 0, "failed": 0})
    counts["run"] += 1
    if passed:
        counts["passed"] += 1
    else:
        counts["failed"] += 1
        report.violations.append(checker_record(name, instance, False, witness))


def run_property_campaign(config: CampaignConfig) -> CampaignReport:
    """Execute the selected structural checkers over seeded random instances
    plus every periodic and preperiodic instance found in the height box."""
    p = config.p
    report = CampaignReport(
        kind="properties",
        config=config.echo(),
        thresholds={"period": period_bound(p), "orbit_size": orbit_bound(p)},
    )
    maps: list[HomogMap] = []
    for spec, count in config.generators:
        generated = gen_maps(spec, count)
        report.maps_requested += count
        maps.extend(generated)
    report.maps_generated = len(maps)
    if not maps:
        raise ValueError("property campaign needs at least one map")
    rng = random.Random(f"props:{config.seed}:{p}")
    places12 = finite_places_up_to(p, 2)
    all_places_51 = places12 + [Place.infinity(p)]
    B = config.height_bound

    if "prop51" in config.checkers:
        for _ in range(config.prop51_count):
            P1, P2, P3 = _distinct_points(rng, p, B, 3)
            ok = all(check_prop_51(P1, P2, P3, v) for v in all_places_51)
            _tally(report, "prop51", ok, f"{P1} {P2} {P3}")

    if "prop52" in config.checkers:
        done = 0
        while done < config.prop52_count:
            phi = maps[rng.randrange(len(maps))]
            P, Q = _distinct_points(rng, p, B, 2)
            place = places12[rng.randrange(len(places12))]
            if not phi.has_good_reduction(place):
                continue
            if phi.evaluate(P) == phi.evaluate(Q):
                continue
            ok = check_prop_52(phi, P, Q, place)
            _tally(report, "prop52", ok, f"map {phi} {P} {Q} at {place}")
            done += 1

    need_orbits = {"prop61", "mst", "lemma_pab"} & set(config.checkers)
    if need_orbits:
        mst_places = finite_places_up_to(p, config.mst_place_degree)
        points = enumerate_points(p, B)
        max_steps = config.effective_max_steps()
        max_height = config.effective_max_height()
        for map_id, phi in enumerate(maps):
            for P in points:
                rep = iterate_orbit(phi, P, max_steps=max_steps, max_height=max_height)
                if rep.status is not OrbitStatus.FINITE_ORBIT:
                    continue
                if rep.tail == 0:
                    n = rep.cycle
                    if "prop61" in config.checkers and not phi.bad_places():
                        ok = check_prop_61(phi, P, n)
                        _tally(report, "prop61", ok, f"map {map_id} point {P} n={n}")
                    if "mst" in config.checkers:
                        for place in mst_places:
                            if not phi.has_good_reduction(place):
                                continue
                            dec = verify_mst(phi, P, n, place)
                            _tally(report, "mst", not dec.is_violation,
                                   f"map {map_id} point {P} n={n} at {place}",
                                   None if not dec.is_violation else
                                   {"m": dec.m, "r": dec.r, "n": n})
                elif "lemma_pab" in config.checkers:
                    psi = iterate_map(phi, rep.cycle) if rep.cycle > 1 else phi
                    chain = [P]
                    cur = P
                    for _ in range(rep.tail + rep.cycle + 1):
                        if psi.evaluate(cur) == cur:
                            break
                        cur = psi.evaluate(cur)
                        chain.append(cur)
                    if len(chain) < 2 or psi.evaluate(chain[-1]) != chain[-1]:
                        continue
                    check_places = cross_product_support(chain) or finite_places_up_to(p, 1)
                    ok = all(
                        check_lemma_pab(psi, chain, place) and
                        check_lemma_pab(psi, chain, place, move_terminal_to_origin=True)
                        for place in check_places
                    )
                    _tally(report, "lemma_pab", ok, f"map {map_id} tail from {P}")

    if "lemma_eq" in config.checkers:
        constants = [ProjPoint.of_constant(p, c) for c in range(p)]
        constants.append(ProjPoint.infinity(p))
        hyp, bound = check_lemma_equal_distances(constants, p)
        _tally(report, "lemma_eq", hyp and bound, f"{p + 1} constant points")
        for i in range(20):
            pts = _distinct_points(rng, p, B, min(p * p + 1, 6))
            hyp, bound = check_lemma_equal_distances(pts, p)
            _tally(report, "lemma_eq", bound, f"random configuration {i}")
    return report


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def emit_report(report: CampaignReport, fmt: str = "json") -> str:
    """Serialize with stable field order; identical campaigns yield
    identical bytes."""
    if fmt == "json":
        return json.dumps(report.to_json_dict(), indent=2) + "\n"
    if fmt == "csv":
        out = StringIO()
        if report.kind == "bounds":
            out.write("map_id,family,d,point,tail,cycle,orbit_size,threshold,ok\n")
            for row in report.orbit_rows:
                out.write(
                    f"{row['map_id']},{row['family']},{row['d']},\"{row['point']}\","
                    f"{row['tail']},{row['cycle']},{row['orbit_size']},"
                    f"{row['threshold']},{row['ok']}\n"
                )
        else:
            out.write("checker,run,passed,failed\n")
            for name in sorted(report.checker_counts):
                c = report.checker_counts[name]
                out.write(f"{name},{c['run']},{c['passed']},{c['failed']}\n")
        return out.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")
