"""Affine planes and affine constellations on d^2 grid points.

Points live on a d x d grid in row-major order: grid cell (r, c) is point
r*d + c. An affine constellation is a family of line classes where lines
within a class are pairwise disjoint and lines from different classes meet
in exactly one point. A class of d-1 stored lines denotes a full foliation;
the d-th line is implied and can be materialized as the complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import (
    BadIndex,
    ConditionBViolated,
    MalformedLine,
    NotDisjoint,
    NotEnoughFoliations,
    OrderMismatch,
    WrongCount,
)
from .gf import field_for_order


@dataclass(frozen=True)
class Line:
    order: int
    points: tuple[int, ...]

    def __post_init__(self):
        d = self.order
        pts = self.points
        if d < 2:
            raise MalformedLine(f"order must be >= 2, got {d}")
        if len(pts) != d:
            raise MalformedLine(f"line must have {d} points, got {len(pts)}")
        if any(not 0 <= p < d * d for p in pts):
            raise MalformedLine(f"point index out of range in {pts}")
        if any(pts[i] >= pts[i + 1] for i in range(len(pts) - 1)):
            raise MalformedLine(f"points must be strictly increasing: {pts}")

    @property
    def point_set(self) -> frozenset[int]:
        return frozenset(self.points)


def make_line(order: int, points) -> Line:
    return Line(order, tuple(sorted(points)))


@dataclass(frozen=True)
class ParallelClass:
    order: int
    lines: tuple[Line, ...]

    def __post_init__(self):
        if not 1 <= len(self.lines) <= self.order:
            raise MalformedLine(
                f"a class must hold 1..{self.order} lines, got {len(self.lines)}"
            )
        if any(ln.order != self.order for ln in self.lines):
            raise OrderMismatch("line order differs from class order")

    @property
    def is_full_foliation(self) -> bool:
        return len(self.lines) == self.order


def make_class(order: int, lines, sort: bool = True) -> ParallelClass:
    lines = tuple(sorted(lines, key=lambda ln: ln.points) if sort else lines)
    return ParallelClass(order, lines)


@dataclass(frozen=True)
class AffineConstellation:
    order: int
    classes: tuple[ParallelClass, ...]

    def __post_init__(self):
        d = self.order
        if not 1 <= len(self.classes) <= d + 1:
            raise MalformedLine(
                f"a constellation of order {d} holds 1..{d + 1} classes"
            )
        if any(cl.order != d for cl in self.classes):
            raise OrderMismatch("class order differs from constellation order")

    def stored_sizes(self) -> tuple[int, ...]:
        return tuple(len(cl.lines) for cl in self.classes)


@dataclass(frozen=True)
class Signature:
    order: int
    sizes: tuple[int, ...]

    def __str__(self) -> str:
        # exponent-compressed form, e.g. <5^3,4>_6
        parts = []
        i = 0
        while i < len(self.sizes):
            j = i
            while j < len(self.sizes) and self.sizes[j] == self.sizes[i]:
                j += 1
            n = j - i
            parts.append(f"{self.sizes[i]}^{n}" if n > 1 else f"{self.sizes[i]}")
            i = j
        return "<" + ",".join(parts) + f">_{self.order}"


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    observed: int
    expected: int


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    violations: tuple[Violation, ...] = field(default_factory=tuple)


def signature_of(C: AffineConstellation) -> Signature:
    return Signature(C.order, tuple(sorted(C.stored_sizes(), reverse=True)))


def dominates(a: Signature, b: Signature) -> bool:
    """Componentwise >= after right-padding with zeros; existence of the
    larger signature implies existence of everything it dominates."""
    if a.order != b.order:
        raise OrderMismatch(f"orders differ: {a.order} vs {b.order}")
    n = max(len(a.sizes), len(b.sizes))
    pa = a.sizes + (0,) * (n - len(a.sizes))
    pb = b.sizes + (0,) * (n - len(b.sizes))
    return all(x >= y for x, y in zip(pa, pb))


def canonicalize_class(cl: ParallelClass) -> ParallelClass:
    """Drop the lexicographically largest line of a full foliation."""
    if not cl.is_full_foliation:
        return make_class(cl.order, cl.lines)
    kept = sorted(cl.lines, key=lambda ln: ln.points)[:-1]
    return make_class(cl.order, kept)


def complete_parallel_class(order: int, lines) -> Line:
    """The unique line parallel to d-1 pairwise-disjoint lines: the complement
    of their union."""
    lines = list(lines)
    if len(lines) != order - 1:
        raise WrongCount(f"need exactly {order - 1} lines, got {len(lines)}")
    seen: set[int] = set()
    for ln in lines:
        if ln.order != order:
            raise OrderMismatch("line order mismatch")
        if seen & ln.point_set:
            raise NotDisjoint(f"lines overlap at {sorted(seen & ln.point_set)}")
        seen |= ln.point_set
    rest = [p for p in range(order * order) if p not in seen]
    return make_line(order, rest)


def materialize_class(cl: ParallelClass) -> ParallelClass:
    """Add the implied line of a canonically stored foliation (d-1 lines)."""
    if len(cl.lines) == cl.order - 1:
        implied = complete_parallel_class(cl.order, cl.lines)
        return make_class(cl.order, cl.lines + (implied,))
    return cl


def materialize(C: AffineConstellation) -> AffineConstellation:
    return AffineConstellation(
        C.order, tuple(materialize_class(cl) for cl in C.classes)
    )


def verify_constellation(C: AffineConstellation) -> VerificationReport:
    """Check condition (a) within classes, condition (b) across classes, on
    stored lines only."""
    violations: list[Violation] = []
    for ci, cl in enumerate(C.classes):
        for (i, la), (j, lb) in combinations(enumerate(cl.lines), 2):
            n = len(la.point_set & lb.point_set)
            if n != 0:
                violations.append(Violation("within-class", (ci, i, ci, j), n, 0))
    for (ca, cla), (cb, clb) in combinations(enumerate(C.classes), 2):
        for i, la in enumerate(cla.lines):
            for j, lb in enumerate(clb.lines):
                n = len(la.point_set & lb.point_set)
                if n != 1:
                    violations.append(
                        Violation("cross-class", (ca, i, cb, j), n, 1)
                    )
    return VerificationReport(not violations, tuple(violations))


def verify_plane_axioms(C: AffineConstellation) -> VerificationReport:
    """Check the three affine-plane postulates over stored plus implied lines."""
    M = materialize(C)
    d = M.order
    npts = d * d
    lines = [ln for cl in M.classes for ln in cl.lines]
    violations: list[Violation] = []

    # (i) every point pair on exactly one line
    pair_count: dict[tuple[int, int], int] = {}
    for ln in lines:
        for a, b in combinations(ln.points, 2):
            pair_count[(a, b)] = pair_count.get((a, b), 0) + 1
    for a in range(npts):
        for b in range(a + 1, npts):
            n = pair_count.get((a, b), 0)
            if n != 1:
                violations.append(Violation("axiom-i", (a, b), n, 1))

    # (ii) unique parallel through an external point
    through: list[list[int]] = [[] for _ in range(npts)]
    for li, ln in enumerate(lines):
        for p in ln.points:
            through[p].append(li)
    for li, ln in enumerate(lines):
        pts = ln.point_set
        for p in range(npts):
            if p in pts:
                continue
            n = sum(1 for mi in through[p] if not (lines[mi].point_set & pts))
            if n != 1:
                violations.append(Violation("axiom-ii", (li, p), n, 1))

    # (iii) four points, no three collinear
    line_of_pair = {
        pair: li
        for li, ln in enumerate(lines)
        for pair in combinations(ln.points, 2)
    }

    def collinear(a: int, b: int, c: int) -> bool:
        key = tuple(sorted((a, b)))
        li = line_of_pair.get(key)
        return li is not None and c in lines[li].point_set

    found = False
    for a, b, c, e in combinations(range(npts), 4):
        if (
            not collinear(a, b, c)
            and not collinear(a, b, e)
            and not collinear(a, c, e)
            and not collinear(b, c, e)
        ):
            found = True
            break
    if not found:
        violations.append(Violation("axiom-iii", (), 0, 1))

    return VerificationReport(not violations, tuple(violations))


def make_plane(q: int) -> AffineConstellation:
    """The affine plane of order q from GF(q): one class per slope plus the
    vertical class, stored canonically (q-1 lines per class)."""
    F = field_for_order(q)
    classes = []
    for m in F.elements:
        lines = []
        for b in F.elements:
            pts = [x * q + F.add(F.mul(m, x), b) for x in F.elements]
            lines.append(make_line(q, pts))
        classes.append(canonicalize_class(make_class(q, lines)))
    vert = [make_line(q, [c * q + y for y in F.elements]) for c in F.elements]
    classes.append(canonicalize_class(make_class(q, vert)))
    return AffineConstellation(q, tuple(classes))


def complete_foliation_set(C: AffineConstellation) -> ParallelClass:
    """Given d full foliations of the d^2 points, construct the forced
    (d+1)-st: for each uncovered point P, the line through P is P plus the
    d-1 points missed by all d lines through P."""
    M = materialize(C)
    d = M.order
    full = [cl for cl in M.classes if cl.is_full_foliation]
    if len(full) < d or len(full) != len(M.classes):
        raise NotEnoughFoliations(
            f"need exactly {d} full foliations, got {len(full)} full classes "
            f"of {len(M.classes)}"
        )
    rep = verify_constellation(M)
    if not rep.valid:
        raise ConditionBViolated(
            f"input is not a valid foliation set: {rep.violations[0]}"
        )

    npts = d * d
    # line through each point, per foliation
    line_at: list[list[Line]] = [[None] * npts for _ in full]  # type: ignore
    for fi, cl in enumerate(full):
        for ln in cl.lines:
            for p in ln.points:
                line_at[fi][p] = ln

    new_lines: list[Line] = []
    covered: set[int] = set()
    for P in range(npts):
        if P in covered:
            continue
        on_lines: set[int] = set()
        for fi in range(len(full)):
            on_lines |= line_at[fi][P].point_set
        pts = [P] + [p for p in range(npts) if p not in on_lines]
        if len(pts) != d:
            raise ConditionBViolated(
                f"point {P} yields a candidate line of {len(pts)} points"
            )
        ln = make_line(d, pts)
        if covered & ln.point_set:
            raise ConditionBViolated(f"candidate lines overlap at point {P}")
        covered |= ln.point_set
        new_lines.append(ln)

    if len(new_lines) != d or len(covered) != npts:
        raise ConditionBViolated("candidate lines do not foliate the grid")
    for ln in new_lines:
        for cl in full:
            for old in cl.lines:
                if len(ln.point_set & old.point_set) != 1:
                    raise ConditionBViolated(
                        f"new line {ln.points} meets {old.points} "
                        f"{len(ln.point_set & old.point_set)} times"
                    )
    return make_class(d, new_lines)


def sub_constellation(C: AffineConstellation, keep) -> AffineConstellation:
    """Restrict to the given per-class line indices; empty classes drop out."""
    if len(keep) != len(C.classes):
        raise BadIndex(
            f"keep must list indices for all {len(C.classes)} classes"
        )
    classes = []
    for cl, idxs in zip(C.classes, keep):
        if any(not 0 <= i < len(cl.lines) for i in idxs):
            raise BadIndex(f"line index out of range in {idxs}")
        if len(set(idxs)) != len(idxs):
            raise BadIndex(f"duplicate line index in {idxs}")
        if idxs:
            classes.append(make_class(C.order, [cl.lines[i] for i in idxs]))
    if not classes:
        raise BadIndex("at least one line must be retained")
    return AffineConstellation(C.order, tuple(classes))


# Table 1 of the order-6 discussion: a 6x6 grid whose cells carry a first
# digit (a non-standard foliation) and, on 24 cells, a second digit (four
# further lines). 1-based digits; None marks an absent second digit.
TABLE1_CELLS: tuple[tuple[tuple[int, int | None], ...], ...] = (
    ((5, 4), (2, None), (3, None), (6, 3), (1, 1), (4, 2)),
    ((1, None), (5, 3), (6, 4), (4, None), (2, 2), (3, 1)),
    ((2, None), (6, 2), (5, 1), (3, None), (4, 4), (1, 3)),
    ((6, 1), (1, None), (4, None), (5, 2), (3, 3), (2, 4)),
    ((3, 2), (4, 1), (2, 3), (1, 4), (5, None), (6, None)),
    ((4, 3), (3, 4), (1, 2), (2, 1), (6, None), (5, None)),
)


def table1_constellation() -> AffineConstellation:
    """The maximal order-6 affine constellation <5^3,4>_6: rows, columns, the
    first-digit foliation, and the four second-digit lines."""
    d = 6
    rows = [make_line(d, range(r * d, r * d + d)) for r in range(d)]
    cols = [make_line(d, range(c, d * d, d)) for c in range(d)]
    first: dict[int, list[int]] = {s: [] for s in range(1, d + 1)}
    second: dict[int, list[int]] = {s: [] for s in range(1, 5)}
    for r, row in enumerate(TABLE1_CELLS):
        for c, (a, b) in enumerate(row):
            first[a].append(r * d + c)
            if b is not None:
                second[b].append(r * d + c)
    classes = (
        canonicalize_class(make_class(d, rows)),
        canonicalize_class(make_class(d, cols)),
        # digits 1..5 stored; the first-digit-6 line is the implied completion
        make_class(d, [make_line(d, first[s]) for s in range(1, d)]),
        make_class(d, [make_line(d, second[s]) for s in sorted(second)]),
    )
    return AffineConstellation(d, classes)


# -- JSON mapping (schema fixed by the cli module) --

def constellation_to_dict(C: AffineConstellation) -> dict:
    return {
        "order": C.order,
        "classes": [
            [list(ln.points) for ln in cl.lines] for cl in C.classes
        ],
    }


def constellation_from_dict(doc: dict) -> AffineConstellation:
    d = doc["order"]
    classes = tuple(
        make_class(d, [make_line(d, pts) for pts in cl], sort=False)
        for cl in doc["classes"]
    )
    return AffineConstellation(d, classes)
