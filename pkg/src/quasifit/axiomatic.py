"""Finite-instance computations for set-theoretic convexity.

Everything here is exhaustive and exact over a finite ground set: families
of subsets play the role of convexity structures, and tables of extended-
real-valued functions play the role of generating families of elementary
functions.  A function is "generated-convex" when it is the pointwise
supremum of table rows; the family of support sets of such functions is
always intersection-stable, every closure space arises that way from its
indicator lift, and sandwiching sets between strict and ordinary support
sets extends the family to a full convexity structure.  Hulls and
Caratheodory numbers are computed by brute force under explicit size
guards.

Subsets are frozensets of element indices; extended reals are floats with
math.inf for plus infinity and -math.inf as the bottom element produced by
empty suprema.  No arithmetic ever mixes the two infinities: only
comparisons and pointwise max occur.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

__all__ = [
    "GroundSet",
    "ConvexityFamily",
    "FunctionTable",
    "SizeGuardError",
    "is_closure_space",
    "is_convexity_structure",
    "hull",
    "support_set",
    "strict_support_set",
    "sup_of_rows",
    "l_convex_envelope",
    "indicator_lift",
    "sorted_members",
    "l_convex_sets",
    "convexity_extension",
    "caratheodory_number",
    "family_over_rows",
    "parse_family_text",
    "family_to_text",
    "parse_function_table_csv",
    "function_table_to_csv",
]

INF = math.inf


class SizeGuardError(ValueError):
    """Instance exceeds the exhaustive-enumeration size guard."""


@dataclass(frozen=True)
class GroundSet:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if len(labels) == 0:
            raise ValueError("ground set must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError("ground set labels must be distinct")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown element label {label!r}") from None

    def full(self) -> frozenset[int]:
        return frozenset(range(self.size))


@dataclass(frozen=True)
class ConvexityFamily:
    ground: GroundSet
    members: frozenset[frozenset[int]]

    def __post_init__(self):
        members = frozenset(frozenset(m) for m in self.members)
        full = self.ground.full()
        for m in members:
            if not m <= full:
                raise ValueError(f"member {sorted(m)} is not a subset of the ground set")
        object.__setattr__(self, "members", members)

    def member_labels(self) -> list[list[str]]:
        return [
            [self.ground.labels[i] for i in sorted(m)]
            for m in sorted(self.members, key=lambda s: (len(s), sorted(s)))
        ]


@dataclass(frozen=True)
class FunctionTable:
    """Rows are functions on the ground set with values in the extended reals."""

    ground: GroundSet
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.rows)
        for row in rows:
            if len(row) != self.ground.size:
                raise ValueError("row length must equal the ground set size")
            for v in row:
                if math.isnan(v):
                    raise ValueError("NaN is not an extended real value")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)


def is_closure_space(family: ConvexityFamily) -> bool:
    """Empty set and ground present, closed under pairwise intersection.

    Finite induction extends pairwise stability to arbitrary intersections.
    """
    members = family.members
    if frozenset() not in members or family.ground.full() not in members:
        return False
    mem_list = list(members)
    for i, a in enumerate(mem_list):
        for b in mem_list[i + 1 :]:
            if a & b not in members:
                return False
    return True


def is_convexity_structure(family: ConvexityFamily) -> bool:
    """Closure space plus stability of nested unions.

    A finite chain has a maximum, so its union is that maximum and the axiom
    holds automatically for any finite closure space; rather than assume the
    reduction silently, small instances re-verify it by enumerating every
    inclusion-chain of members.
    """
    result = is_closure_space(family)
    if result and len(family.members) <= 12:
        mem_list = list(family.members)
        k = len(mem_list)
        for mask in range(1, 1 << k):
            chain = [mem_list[i] for i in range(k) if mask >> i & 1]
            if all(a <= b or b <= a for a, b in combinations(chain, 2)):
                union = frozenset().union(*chain)
                if union not in family.members:  # unreachable for closure spaces
                    return False
    return result


def hull(family: ConvexityFamily, subset: Iterable[int]) -> frozenset[int]:
    """Intersection of all members containing the subset."""
    s = frozenset(subset)
    result: frozenset[int] | None = None
    for m in family.members:
        if s <= m:
            result = m if result is None else result & m
    if result is None:
        raise ValueError(f"no family member contains {sorted(s)}")
    return result


def sup_of_rows(table: FunctionTable, indices: Iterable[int]) -> tuple[float, ...]:
    """Pointwise supremum of selected rows; the empty supremum is the bottom row."""
    chosen = [table.rows[i] for i in indices]
    if not chosen:
        return tuple(-INF for _ in range(table.ground.size))
    return tuple(max(col) for col in zip(*chosen))


def support_set(table: FunctionTable, f: Sequence[float]) -> frozenset[int]:
    """Indices of rows lying pointwise at or below f."""
    f = tuple(float(v) for v in f)
    if len(f) != table.ground.size:
        raise ValueError("function length must equal the ground set size")
    return frozenset(
        i for i, row in enumerate(table.rows) if all(r <= v for r, v in zip(row, f))
    )


def strict_support_set(table: FunctionTable, f: Sequence[float]) -> frozenset[int]:
    """Rows strictly below f on the domain of f (where f is finite).

    A function that is plus infinity everywhere has empty domain, so the
    condition is vacuous and every row qualifies.
    """
    f = tuple(float(v) for v in f)
    if len(f) != table.ground.size:
        raise ValueError("function length must equal the ground set size")
    dom = [x for x, v in enumerate(f) if v < INF]
    return frozenset(
        i for i, row in enumerate(table.rows) if all(row[x] < f[x] for x in dom)
    )


def l_convex_envelope(table: FunctionTable, f: Sequence[float]) -> tuple[float, ...]:
    """Pointwise sup of the support rows of f; equals f exactly when f is generated-convex."""
    return sup_of_rows(table, support_set(table, f))


def sorted_members(family: ConvexityFamily) -> list[frozenset[int]]:
    """Canonical member order: by cardinality, then sorted index tuples."""
    return sorted(family.members, key=lambda s: (len(s), sorted(s)))


def indicator_lift(family: ConvexityFamily) -> FunctionTable:
    """One row per member in canonical order: 0 on the member, +inf off it."""
    n = family.ground.size
    rows = []
    for m in sorted_members(family):
        rows.append(tuple(0.0 if x in m else INF for x in range(n)))
    return FunctionTable(family.ground, tuple(rows))


def l_convex_sets(table: FunctionTable) -> frozenset[frozenset[int]]:
    """Support sets of every pointwise supremum of rows.

    Exhausts all row subsets, including the empty one whose supremum is the
    bottom row; runtime is exponential in the row count, hence the guard.
    """
    k = len(table)
    if k > 20:
        raise SizeGuardError(f"l_convex_sets is limited to 20 rows, got {k}")
    out = set()
    for mask in range(1 << k):
        f = sup_of_rows(table, [i for i in range(k) if mask >> i & 1])
        out.add(support_set(table, f))
    return frozenset(out)


def convexity_extension(table: FunctionTable) -> frozenset[frozenset[int]]:
    """Every set sandwiched between strict and ordinary support sets.

    Generators range over all pointwise suprema of row subsets, the
    generated-convex functions of a finite table.  The result always
    contains the support sets themselves and always forms a convexity
    structure.
    """
    k = len(table)
    if k > 12:
        raise SizeGuardError(f"convexity_extension is limited to 12 rows, got {k}")
    out = set()
    for mask in range(1 << k):
        f = sup_of_rows(table, [i for i in range(k) if mask >> i & 1])
        ss = strict_support_set(table, f)
        s = support_set(table, f)
        gap = sorted(s - ss)
        for sub_mask in range(1 << len(gap)):
            extra = frozenset(gap[i] for i in range(len(gap)) if sub_mask >> i & 1)
            out.add(ss | extra)
    return frozenset(out)


def family_over_rows(table: FunctionTable, members: Iterable[frozenset[int]]) -> ConvexityFamily:
    """Wrap a family of row-index sets as a ConvexityFamily over row labels."""
    ground = GroundSet(tuple(f"l{i}" for i in range(len(table))))
    return ConvexityFamily(ground, frozenset(frozenset(m) for m in members))


def _is_caratheodory_independent(
    family: ConvexityFamily, subset: frozenset[int], hull_cache: dict
) -> bool:
    def cached_hull(s: frozenset[int]) -> frozenset[int]:
        if s not in hull_cache:
            hull_cache[s] = hull(family, s)
        return hull_cache[s]

    if not subset:
        return False  # hull of nothing is covered by the empty union
    covered = frozenset().union(*(cached_hull(subset - {a}) for a in subset))
    return not cached_hull(subset) <= covered


def caratheodory_number(family: ConvexityFamily) -> int:
    """Largest cardinality of a Caratheodory independent subset of the ground set."""
    n = family.ground.size
    if n > 10:
        raise SizeGuardError(f"caratheodory_number is limited to ground size 10, got {n}")
    if not is_closure_space(family):
        raise ValueError("caratheodory_number requires a closure space")
    elements = list(range(n))
    hull_cache: dict = {}
    best = 0
    for size in range(1, n + 1):
        for combo in combinations(elements, size):
            if _is_caratheodory_independent(family, frozenset(combo), hull_cache):
                best = size
                break
    return best


# -- text formats -------------------------------------------------------------
#
# Family files: one member per line as comma-separated labels, "{}" for the
# empty set, optional "ground:" header, "#" comments.  Function tables: CSV
# with a label header row and the tokens inf / +inf / -inf allowed.


def parse_family_text(text: str) -> ConvexityFamily:
    ground_labels: list[str] | None = None
    member_label_sets: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("ground:"):
            ground_labels = [t.strip() for t in line[len("ground:") :].split(",") if t.strip()]
            continue
        if line == "{}":
            member_label_sets.append([])
            continue
        member_label_sets.append([t.strip() for t in line.split(",") if t.strip()])
    if ground_labels is None:
        seen = sorted({lbl for member in member_label_sets for lbl in member})
        if not seen:
            raise ValueError("family file declares no ground set and no members")
        ground_labels = seen
    ground = GroundSet(tuple(ground_labels))
    members = frozenset(
        frozenset(ground.index_of(lbl) for lbl in member) for member in member_label_sets
    )
    return ConvexityFamily(ground, members)


def family_to_text(family: ConvexityFamily) -> str:
    lines = ["ground: " + ",".join(family.ground.labels)]
    for member in sorted_members(family):
        if not member:
            lines.append("{}")
        else:
            lines.append(",".join(family.ground.labels[i] for i in sorted(member)))
    return "\n".join(lines) + "\n"


def _parse_extended(token: str) -> float:
    t = token.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return INF
    if t == "-inf":
        return -INF
    return float(token)


def parse_function_table_csv(text: str) -> FunctionTable:
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if len(rows) < 1:
        raise ValueError("function table needs a header row of element labels")
    ground = GroundSet(tuple(cell.strip() for cell in rows[0]))
    values = tuple(tuple(_parse_extended(cell) for cell in row) for row in rows[1:])
    return FunctionTable(ground, values)


def function_table_to_csv(table: FunctionTable) -> str:
    def fmt(v: float) -> str:
        if v == INF:
            return "inf"
        if v == -INF:
            return "-inf"
        return repr(v)

    lines = [",".join(table.ground.labels)]
    for row in table.rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"
