"""Dynamical realization of a finitely ordered ball on the rational line.

The map t places ball elements on exact rationals by the midpoint/extend
induction; each group element then acts on the realized points by left
multiplication, interpolated piecewise-affinely in between and extended by
slope-one tails.  Two formal symbols stand for the compactifying endpoints
and are fixed by every map.  The classical construction also extends the
action to the closure of the realized set; a finite set is its own closure,
so that step is deliberately absent rather than missing.
"""

from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .matrices import GroupMatrix
from .ordering import Ball, OrderAssignment, OrderingError, format_word


class RealizeError(ValueError):
    pass


class _Endpoint:
    __slots__ = ("label",)

    def __init__(self, label: str):
        self.label = label

    def __repr__(self) -> str:
        return self.label


NEG_INF = _Endpoint("-inf")
POS_INF = _Endpoint("+inf")


@dataclass(eq=False)
class RealizationMap:
    """Order-compatible injection of the enumerated elements into Q."""

    elements: tuple[GroupMatrix, ...]          # enumeration order
    t: dict[GroupMatrix, Fraction]

    def value(self, g: GroupMatrix) -> Fraction:
        if g not in self.t:
            raise RealizeError("element not realized")
        return self.t[g]

    def __contains__(self, g: GroupMatrix) -> bool:
        return g in self.t

    def __len__(self) -> int:
        return len(self.elements)


def realize(enumeration: Sequence[GroupMatrix], order: OrderAssignment) -> RealizationMap:
    """Build t by induction: first element at 0, new extremes step by one,
    anything in between lands at the midpoint of its assigned neighbours."""
    if not enumeration:
        raise RealizeError("empty enumeration")
    if len(set(enumeration)) != len(enumeration):
        raise RealizeError("enumeration repeats an element")
    t: dict[GroupMatrix, Fraction] = {enumeration[0]: Fraction(0)}
    assigned: list[GroupMatrix] = [enumeration[0]]  # kept sorted ascending
    for g in enumeration[1:]:
        below = []
        above = []
        for h in assigned:
            s = order.sign(g, h)
            if s == 1:
                below.append(h)
            elif s == -1:
                above.append(h)
            else:
                raise OrderingError("order not total on the enumeration")
        k = len(below)
        # sanity: the elements below g must be exactly the first k assigned
        if below != assigned[:k]:
            raise OrderingError("order not total on the enumeration")
        if k == 0:
            val = t[assigned[0]] - 1
        elif k == len(assigned):
            val = t[assigned[-1]] + 1
        else:
            val = (t[assigned[k - 1]] + t[assigned[k]]) / 2
        t[g] = val
        assigned.insert(k, g)
    rm = RealizationMap(tuple(enumeration), t)
    # order-compatibility is an invariant of the construction; verify it
    for i, g in enumerate(rm.elements):
        for h in rm.elements[i + 1:]:
            if (order.sign(g, h) == 1) != (t[g] > t[h]):
                raise AssertionError("internal error: realization broke the order")
    return rm


@dataclass(frozen=True)
class PLHomeo:
    """Increasing piecewise-linear map given by exact rational breakpoints.

    Between breakpoints the map interpolates affinely; beyond the hull it
    continues with slope one, and the two formal endpoints map to themselves.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        pts = tuple(sorted((Fraction(x), Fraction(y)) for x, y in self.breakpoints))
        if not pts:
            raise RealizeError("at least one breakpoint required")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 == x1 or y0 >= y1:
                raise RealizeError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", pts)

    @property
    def lo(self) -> Fraction:
        return self.breakpoints[0][0]

    @property
    def hi(self) -> Fraction:
        return self.breakpoints[-1][0]

    def __call__(self, x):
        if x is NEG_INF or x is POS_INF:
            return x
        x = Fraction(x)
        pts = self.breakpoints
        if x <= pts[0][0]:
            return pts[0][1] + (x - pts[0][0])
        if x >= pts[-1][0]:
            return pts[-1][1] + (x - pts[-1][0])
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise AssertionError("unreachable")

    def inverse(self) -> "PLHomeo":
        return PLHomeo(tuple((y, x) for x, y in self.breakpoints))

    def __mul__(self, other: "PLHomeo") -> "PLHomeo":
        """Composition (self after other) on other's breakpoint inputs."""
        return PLHomeo(tuple((x, self(y)) for x, y in other.breakpoints))

    def is_identity_on_breakpoints(self) -> bool:
        return all(x == y for x, y in self.breakpoints)


@dataclass(frozen=True)
class GeneratorMap:
    """A realized group element acting on the realizable part of the ball."""

    element: GroupMatrix
    word: str
    homeo: PLHomeo
    domain: tuple[GroupMatrix, ...]   # the sub-ball actually realized


def generator_pl_map(
    rm: RealizationMap,
    g: GroupMatrix,
    closure: Ball | None = None,
    label: str | None = None,
) -> GeneratorMap:
    """PL action of g: breakpoints (t(x), t(g x)) over the largest valid sub-ball."""
    candidates = closure.elements if closure is not None else rm.elements
    if label is None:
        label = format_word(closure.word(g)) if closure is not None and g in closure else "g"
    domain = []
    pts = []
    for x in candidates:
        if x not in rm:
            continue
        gx = g * x
        if gx in rm:
            domain.append(x)
            pts.append((rm.value(x), rm.value(gx)))
    if not pts:
        raise RealizeError("empty realizable sub-ball")
    return GeneratorMap(g, label, PLHomeo(tuple(pts)), tuple(domain))


@dataclass(frozen=True)
class FixedSet:
    """Fixed locus of a PL map within its breakpoint hull.

    The formal endpoints are fixed by construction and are reported by the
    flag rather than listed.
    """

    points: tuple[Fraction, ...]
    intervals: tuple[tuple[Fraction, Fraction], ...]
    formal_endpoints_fixed: bool = True

    def is_empty_in_interior(self) -> bool:
        return not self.points and not self.intervals


def fixed_set(m: PLHomeo) -> FixedSet:
    """Exact description of {x : m(x) = x} inside the breakpoint hull."""
    pts = m.breakpoints
    points: list[Fraction] = []
    intervals: list[tuple[Fraction, Fraction]] = []

    def add_point(x: Fraction) -> None:
        if x not in points:
            points.append(x)

    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x0 == y0 and x1 == y1:
            intervals.append((x0, x1))
            continue
        slope = (y1 - y0) / (x1 - x0)
        if slope == 1:
            # parallel to the diagonal without touching it (x0 != y0 here)
            continue
        # solve y0 + slope*(x - x0) = x
        x_star = (y0 - slope * x0) / (1 - slope)
        if x0 <= x_star <= x1:
            add_point(x_star)
    if len(pts) == 1 and pts[0][0] == pts[0][1]:
        add_point(pts[0][0])
    # merge: absorb points lying inside or at the ends of intervals
    merged: list[tuple[Fraction, Fraction]] = []
    for a, b in sorted(intervals):
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
        else:
            merged.append((a, b))
    clean_points = tuple(
        sorted(x for x in points if not any(a <= x <= b for a, b in merged))
    )
    return FixedSet(clean_points, tuple(merged))


@dataclass(frozen=True)
class RealizationReport:
    passed: bool
    monotonicity_failures: tuple[str, ...]
    equivariance_failures: tuple[str, ...]
    composition_failures: tuple[str, ...]


def verify_realization(
    rm: RealizationMap,
    maps: Sequence[GeneratorMap],
    sample: Sequence[GroupMatrix] | None = None,
) -> RealizationReport:
    """Re-check monotonicity, equivariance and composition of realized maps."""
    mono: list[str] = []
    equiv: list[str] = []
    comp: list[str] = []
    for gm in maps:
        bps = gm.homeo.breakpoints
        for (x0, y0), (x1, y1) in zip(bps, bps[1:]):
            if not (x0 < x1 and y0 < y1):
                mono.append(f"{gm.word}: breakpoints out of order at {x0}")
        for x in gm.domain:
            gx = gm.element * x
            if gx in rm:
                if gm.homeo(rm.value(x)) != rm.value(gx):
                    equiv.append(f"{gm.word}: map(t(x)) != t(g*x) at t(x)={rm.value(x)}")
    by_element = {gm.element: gm for gm in maps}
    pool = sample if sample is not None else [gm.element for gm in maps]
    for g in pool:
        for h in pool:
            gh = g * h
            if g not in by_element or h not in by_element or gh not in by_element:
                continue
            mg, mh, mgh = by_element[g], by_element[h], by_element[gh]
            for x in mh.domain:
                hx = h * x
                if hx not in rm or g * hx not in rm or x not in rm:
                    continue
                lhs = mg.homeo(mh.homeo(rm.value(x)))
                rhs = mgh.homeo(rm.value(x))
                if lhs != rhs:
                    comp.append(f"compose mismatch at t={rm.value(x)}")
    return RealizationReport(not mono and not equiv and not comp,
                             tuple(mono), tuple(equiv), tuple(comp))


@dataclass(frozen=True)
class AlmostFreeReport:
    almost_free: bool
    witnesses: tuple[tuple[str, tuple[Fraction, Fraction]], ...]


def almost_free_report(
    maps: Sequence[GeneratorMap], identity: GroupMatrix | None = None
) -> AlmostFreeReport:
    """Flag any non-identity element whose map fixes a whole interval."""
    witnesses = []
    for gm in maps:
        if identity is not None and gm.element == identity:
            continue
        if identity is None and gm.element.is_identity():
            continue
        fs = fixed_set(gm.homeo)
        for a, b in fs.intervals:
            if a < b:
                witnesses.append((gm.word, (a, b)))
    return AlmostFreeReport(not witnesses, tuple(witnesses))


def order_from_realization(
    rm: RealizationMap, ball: Ball, probes: Sequence[Fraction] | None = None
) -> OrderAssignment:
    """Recover an order on the ball from the realized action on probe points.

    Probes default to all realized values in ascending order (away from the
    lower formal endpoint).  Each element acts partially: g moves t(x) to
    t(g x) when both are realized, and a probe where either side is missing
    is skipped for that comparison.
    """
    values = sorted(rm.t.values())
    if probes is None:
        probes = values
    by_value = {v: g for g, v in rm.t.items()}
    for p in probes:
        if p not in by_value:
            raise RealizeError("probe is not a realized point")

    def image(g: GroupMatrix, p: Fraction) -> Fraction | None:
        gx = g * by_value[p]
        return rm.t.get(gx)

    keys = {}
    for g in ball.elements:
        keys[g] = tuple(image(g, p) for p in probes)

    # lexicographic comparison skipping probes where either image is missing
    def compare(a: GroupMatrix, b: GroupMatrix) -> int:
        for va, vb in zip(keys[a], keys[b]):
            if va is None or vb is None:
                continue
            if va != vb:
                return 1 if va > vb else -1
        return 0

    elems = list(ball.elements)
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            if compare(elems[i], elems[j]) == 0:
                raise OrderingError(
                    "probes insufficient (action not almost free at this scale)"
                )
    ascending = sorted(elems, key=functools.cmp_to_key(compare))
    return OrderAssignment.from_total_order(ball, ascending)


# -- CSV / SVG exports ----------------------------------------------------------


def realization_to_csv(rm: RealizationMap, ball: Ball) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word", "t"])
    for g in rm.elements:
        frac = rm.value(g)
        w.writerow([format_word(ball.word(g)), f"{frac.numerator}/{frac.denominator}"])
    return buf.getvalue()


def plhomeo_to_csv(gm: GeneratorMap) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y"])
    for x, y in gm.homeo.breakpoints:
        w.writerow([f"{x.numerator}/{x.denominator}", f"{y.numerator}/{y.denominator}"])
    return buf.getvalue()


def plhomeo_to_svg(gm: GeneratorMap, size: int = 360) -> str:
    pts = gm.homeo.breakpoints
    lo = min(min(x for x, _ in pts), min(y for _, y in pts))
    hi = max(max(x for x, _ in pts), max(y for _, y in pts))
    span = hi - lo if hi != lo else Fraction(1)

    def sx(v: Fraction) -> float:
        return float((v - lo) / span) * (size - 40) + 20

    def sy(v: Fraction) -> float:
        return size - 20 - float((v - lo) / span) * (size - 40)

    path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
    diag = f"20,{size - 20} {size - 20},20"
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n'
        f'  <polyline points="{diag}" fill="none" stroke="#bbb" stroke-dasharray="4"/>\n'
        f'  <polyline points="{path}" fill="none" stroke="#d62728" stroke-width="2"/>\n'
        f"</svg>\n"
    )
