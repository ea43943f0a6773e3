"""Boost vectors, boost-weight grading and the lattice constraint ``d . b <= c``.

A boost vector ``b`` assigns weight ``b_i`` to ``v_i``. The coefficient of a
metric component can only contain a v-monomial ``v^d`` whose grading does not
exceed the component's target:

    A_ij (du_i du_j)  ->  b_i + b_j
    a_ij (du_i dv_j)  ->  b_i - b_j
    B_ia (du_i dx_a)  ->  b_i
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from idegen.errors import ZeroBoostEntry

BoostVector = tuple  # tuple[int, ...]; kept as a plain tuple for hashing and printing

MAX_K = 16


def as_boost(b: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(x) for x in b)
    if not out:
        raise ValueError("empty boost vector")
    if any(x < 0 for x in out):
        raise ValueError(f"boost entries must be non-negative: {out}")
    return out


def parse_boost(text: str) -> tuple[int, ...]:
    """``"1,2,4"`` (parentheses and spaces tolerated) -> ``(1, 2, 4)``."""
    body = text.strip().strip("()[]")
    try:
        return as_boost(int(p) for p in body.split(","))
    except ValueError as exc:
        raise ValueError(f"bad boost vector {text!r}: {exc}") from None


def format_boost(b: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in b) + ")"


def enumerate_boost_vectors(k: int) -> list[tuple[int, ...]]:
    """The ``2**k`` canonical boost vectors of length ``k``, sorted lexicographically.

    Starting entry is 0 or 1. After a 0 the next entry is 0 or 1; after a
    positive ``n`` it is ``n`` or ``2n``.
    """
    if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= MAX_K:
        raise ValueError(f"k must be an integer in 1..{MAX_K}, got {k!r}")
    out: list[tuple[int, ...]] = [(0,), (1,)]
    for _ in range(k - 1):
        nxt = []
        for b in out:
            last = b[-1]
            for n in ((0, 1) if last == 0 else (last, 2 * last)):
                nxt.append(b + (n,))
        out = nxt
    out.sort()
    return out


def is_canonical(b: Sequence[int]) -> bool:
    b = tuple(b)
    if not b or b[0] not in (0, 1):
        return False
    for prev, cur in zip(b, b[1:]):
        if prev == 0:
            if cur not in (0, 1):
                return False
        elif cur not in (prev, 2 * prev):
            return False
    return True


def leading_zeros(b: Sequence[int]) -> int:
    n = 0
    for x in b:
        if x:
            break
        n += 1
    return n


def _require_positive(b: Sequence[int]):
    if any(x <= 0 for x in b):
        raise ZeroBoostEntry(b)


@dataclass(frozen=True, order=True)
class ComponentKind:
    """A metric component ``a_ij``, ``A_ij`` or ``B_ia`` (1-based indices).

    For ``B`` only ``i`` matters for the target; ``j`` holds the transverse
    index ``a`` (0 when unspecified).
    """

    kind: str
    i: int
    j: int = 0

    def __post_init__(self):
        if self.kind not in ("a", "A", "B"):
            raise ValueError(f"unknown component kind {self.kind!r}")
        if self.i < 1 or (self.kind != "B" and self.j < 1):
            raise ValueError(f"indices are 1-based: {self}")
        if self.kind == "A" and self.j < self.i:
            # A is symmetric; keep the upper-triangular label
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)

    @property
    def label(self) -> str:
        if self.kind == "B":
            return f"B{self.i}" + (f",{self.j}" if self.j else "")
        return f"{self.kind}{self.i}{self.j}" if max(self.i, self.j) < 10 else f"{self.kind}{self.i},{self.j}"


def component_target(b: Sequence[int], comp: ComponentKind) -> int:
    b = tuple(b)
    _require_positive(b)
    if comp.i > len(b) or (comp.kind != "B" and comp.j > len(b)):
        raise IndexError(f"{comp.label} out of range for k={len(b)}")
    bi = b[comp.i - 1]
    if comp.kind == "A":
        return bi + b[comp.j - 1]
    if comp.kind == "a":
        return bi - b[comp.j - 1]
    return bi


def _solutions(b: tuple[int, ...], c: int) -> Iterator[tuple[int, ...]]:
    # digits chosen from the last variable down, each ascending, so the output
    # is sorted by (d_k, ..., d_1)
    k = len(b)
    d = [0] * k

    def rec(pos: int, rem: int):
        if pos == 0:
            if rem % b[0] == 0:
                d[0] = rem // b[0]
                yield tuple(d)
            return
        for e in range(rem // b[pos] + 1):
            d[pos] = e
            yield from rec(pos - 1, rem - e * b[pos])
        d[pos] = 0

    yield from rec(k - 1, c)


@dataclass(frozen=True)
class MonomialShapeSet:
    """Allowed v-monomials of one component: ``{d >= 0 : d . b <= target}``.

    ``generators`` are the solutions of ``d . b == target``; with ``b_1 = 1``
    they are exactly the maximal members. ``note`` carries table annotations
    such as ``"constant, absorbable"``.
    """

    boost: tuple[int, ...]
    target: int
    generators: tuple[tuple[int, ...], ...]
    note: str = ""

    def __contains__(self, d) -> bool:
        d = tuple(d)
        if len(d) != len(self.boost) or any(e < 0 for e in d):
            return False
        if not self.generators:
            return False
        return sum(e * w for e, w in zip(d, self.boost)) <= self.target

    def is_empty(self) -> bool:
        return not self.generators

    def members(self) -> list[tuple[int, ...]]:
        """Every monomial of the downward closure of the generators."""
        seen = set()
        for g in self.generators:
            _box(g, seen)
        return sorted(seen, key=lambda d: tuple(reversed(d)))

    def to_dict(self) -> dict:
        out = {"boost": list(self.boost), "target": self.target,
               "generators": [list(g) for g in self.generators]}
        if self.note:
            out["note"] = self.note
        return out


def _box(g: tuple[int, ...], acc: set):
    stack = [()]
    for e in g:
        stack = [p + (x,) for p in stack for x in range(e + 1)]
    acc.update(stack)


def solve_generators(b: Sequence[int], c: int) -> MonomialShapeSet:
    """All ``d >= 0`` with ``d . b == c``, sorted by ``(d_k, ..., d_1)``."""
    b = tuple(b)
    _require_positive(b)
    if c < 0:
        return MonomialShapeSet(b, c, ())
    return MonomialShapeSet(b, c, tuple(_solutions(b, c)))


def format_monomial_v(d: Sequence[int], var: str = "v") -> str:
    parts = []
    for i, e in enumerate(d, start=1):
        if e == 1:
            parts.append(f"{var}{i}")
        elif e:
            parts.append(f"{var}{i}^{e}")
    return "*".join(parts) if parts else "1"


def format_shape(s: MonomialShapeSet) -> str:
    if s.note == "unit" or s.generators == (tuple(0 for _ in s.boost),):
        return "1"
    if not s.generators:
        return "0"
    return "[" + ", ".join(format_monomial_v(g) for g in s.generators) + "]"


@dataclass(frozen=True)
class ShapeTables:
    boost: tuple[int, ...]
    a_raw: tuple[tuple[MonomialShapeSet, ...], ...]
    a: tuple[tuple[MonomialShapeSet, ...], ...]
    A: tuple[tuple[MonomialShapeSet, ...], ...]
    B: tuple[MonomialShapeSet, ...]
    canonical: bool = True

    @property
    def k(self) -> int:
        return len(self.boost)

    def to_records(self, normalized: bool = True) -> list[dict]:
        recs = []
        a = self.a if normalized else self.a_raw
        for kind, table in (("a", a), ("A", self.A)):
            for i in range(self.k):
                for j in range(self.k):
                    if kind == "A" and j < i:
                        continue
                    s = table[i][j]
                    rec = {"boost": list(self.boost), "component": kind, "i": i + 1, "j": j + 1,
                           "target": s.target, "generators": [list(g) for g in s.generators]}
                    if s.note:
                        rec["note"] = s.note
                    recs.append(rec)
        for i, s in enumerate(self.B):
            recs.append({"boost": list(self.boost), "component": "B", "i": i + 1,
                         "target": s.target, "generators": [list(g) for g in s.generators]})
        return recs

    def format_table(self, normalized: bool = True) -> str:
        a = self.a if normalized else self.a_raw
        k = self.k
        lines = [f"boost {format_boost(self.boost)}" + ("" if self.canonical else " (non-canonical)")]

        def block(title, cells):
            widths = [max(len(cells[i][j]) for i in range(len(cells))) for j in range(len(cells[0]))]
            lines.append(f"{title}:")
            for row in cells:
                lines.append("  " + "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())

        block("A", [[format_shape(self.A[i][j]) if j >= i else "." for j in range(k)] for i in range(k)])
        block("a" if normalized else "a (raw)", [[format_shape(a[i][j]) for j in range(k)] for i in range(k)])
        block("B", [[format_shape(s)] for s in self.B])
        notes = [f"a{i + 1}{j + 1}: {a[i][j].note}" for i in range(k) for j in range(k)
                 if a[i][j].note and a[i][j].note != "unit"]
        if notes:
            lines.append("notes: " + "; ".join(notes))
        return "\n".join(lines)


def _normalize_a_entry(raw: MonomialShapeSet, b, i: int, j: int) -> MonomialShapeSet:
    if i == j:
        return MonomialShapeSet(raw.boost, raw.target, raw.generators, "unit")
    if b[i] == b[j]:
        # target 0: a constant, removable by a linear change of the v's
        return MonomialShapeSet(raw.boost, raw.target, (), "constant, absorbable")
    if not raw.generators:
        return raw
    # a_ij(v_j) dv_j is exact, so v_i -> v_i + F(v_j) removes it; keep the rest
    keep = tuple(g for g in raw.generators if any(e for t, e in enumerate(g) if t != j))
    return MonomialShapeSet(raw.boost, raw.target, keep)


def shape_tables(b: Sequence[int]) -> ShapeTables:
    b = tuple(b)
    _require_positive(b)
    k = len(b)
    A = tuple(tuple(solve_generators(b, b[i] + b[j]) for j in range(k)) for i in range(k))
    a_raw = tuple(tuple(solve_generators(b, b[i] - b[j]) for j in range(k)) for i in range(k))
    a = tuple(tuple(_normalize_a_entry(a_raw[i][j], b, i, j) for j in range(k)) for i in range(k))
    B = tuple(solve_generators(b, b[i]) for i in range(k))
    return ShapeTables(b, a_raw, a, A, B, is_canonical(b))


# -- grading ---------------------------------------------------------------

_DIFF_KINDS = ("u", "v", "x")


@dataclass(frozen=True)
class GradedTerm:
    """A metric term ``coeff * u^du * v^dv * d(p) d(q)``.

    ``diff`` is a pair of ``(kind, index)`` with kind in ``u``/``v``/``x`` and
    1-based index, e.g. ``(("u", 3), ("u", 3))`` for ``du_3 du_3``.
    """

    v_exps: tuple[int, ...]
    u_exps: tuple[int, ...] = ()
    diff: tuple[tuple[str, int], tuple[str, int]] = (("u", 1), ("v", 1))

    def __post_init__(self):
        if any(e < 0 for e in self.v_exps) or any(e < 0 for e in self.u_exps):
            raise ValueError("exponents must be non-negative")
        for kind, idx in self.diff:
            if kind not in _DIFF_KINDS or idx < 1:
                raise ValueError(f"bad differential {kind}{idx}")


def diff_weight(diff, b: Sequence[int]) -> int:
    w = 0
    for kind, idx in diff:
        if kind == "u":
            w -= b[idx - 1]
        elif kind == "v":
            w += b[idx - 1]
    return w


def term_weight(t: GradedTerm, b: Sequence[int]) -> int:
    """Boost weight of a term; finite limits need weight <= 0, and the
    limit keeps exactly the weight-0 terms."""
    w = sum(e * x for e, x in zip(t.v_exps, b))
    w -= sum(e * x for e, x in zip(t.u_exps, b))
    return w + diff_weight(t.diff, b)


# -- appendix-style equality report ------------------------------------------

@dataclass(frozen=True)
class EqualityGroup:
    target: int
    components: tuple[ComponentKind, ...]


@dataclass(frozen=True)
class BoostReport:
    boost: tuple[int, ...]
    reduces_to: tuple[int, ...] | None  # the stripped vector, when leading zeros exist
    shift: int
    groups: tuple[EqualityGroup, ...]

    @property
    def degenerate(self) -> bool:
        return any(self.boost)


def _equality_lhs(b: Sequence[int]) -> str:
    parts = []
    for i, w in enumerate(b, start=1):
        if w == 0:
            continue
        parts.append(f"d{i}" if w == 1 else f"{w}d{i}")
    return " + ".join(parts)


def boost_report(b: Sequence[int]) -> BoostReport:
    b = as_boost(b)
    z = leading_zeros(b)
    if z == len(b):
        return BoostReport(b, None, 0, ())
    k = len(b)
    by_target: dict[int, list[ComponentKind]] = {}
    for i in range(z, k):
        for j in range(i, k):
            by_target.setdefault(b[i] + b[j], []).append(ComponentKind("A", i + 1, j + 1))
    groups = tuple(EqualityGroup(t, tuple(sorted(cs, key=lambda c: (c.i, c.j))))
                   for t, cs in sorted(by_target.items()))
    return BoostReport(b, b[z:] if z else None, z, groups)


def appendix_b_report(k: int) -> list[BoostReport]:
    if not isinstance(k, int) or not 1 <= k <= 4:
        raise ValueError(f"k must be in 1..4, got {k!r}")
    return [boost_report(b) for b in enumerate_boost_vectors(k)]


def format_boost_report(rep: BoostReport) -> list[str]:
    head = f"  {format_boost(rep.boost)}:"
    if not rep.degenerate:
        return [head + " non-degenerate"]
    lines = [head]
    if rep.reduces_to is not None:
        lines[0] += (f" reduces to k={len(rep.reduces_to)} case {format_boost(rep.reduces_to)},"
                     f" indices shifted by {rep.shift}")
    lhs = _equality_lhs(rep.boost)
    if len(rep.groups) == 1:
        lines.append(f"    all A_ij: {lhs} = {rep.groups[0].target}")
    else:
        for g in rep.groups:
            names = ", ".join(c.label for c in g.components)
            lines.append(f"    {names}: {lhs} = {g.target}")
    return lines


def format_appendix_b(kmax: int) -> str:
    """Text report for every k in ``1..kmax`` (newline terminated)."""
    lines = []
    for k in range(1, kmax + 1):
        lines.append(f"k = {k}")
        for rep in appendix_b_report(k):
            lines.extend(format_boost_report(rep))
    return "\n".join(lines) + "\n"


def appendix_b_records(kmax: int) -> list[dict]:
    recs = []
    for k in range(1, kmax + 1):
        for rep in appendix_b_report(k):
            base = {"k": k, "boost": list(rep.boost)}
            if not rep.degenerate:
                recs.append({**base, "non_degenerate": True})
                continue
            if rep.reduces_to is not None:
                base["reduces_to"] = list(rep.reduces_to)
                base["shift"] = rep.shift
            for g in rep.groups:
                for c in g.components:
                    recs.append({**base, "component": "A", "i": c.i, "j": c.j, "target": g.target})
    return recs


def appendix_b_json(kmax: int) -> str:
    return json.dumps(appendix_b_records(kmax), indent=1)
