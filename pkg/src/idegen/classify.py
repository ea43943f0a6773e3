"""Subclass types I-V of block metrics from coordinate criteria.

    I    the transverse metric does not depend on any v_i
    II   I, and every row of a is v-closed (a can be brought to the identity)
    III  II, and B does not depend on v (checked after normalizing a)
    IV   III, and sum_i d/dv_i A_ij = 0 for every j; cross-checked against
         nabla F = 0 for F = du^1 ^ ... ^ du^k
    V    no component depends on v; cross-checked with the Killing equation
         for every d/dv_i
"""

from __future__ import annotations

from dataclasses import dataclass, field

from idegen.algebra import Polynomial
from idegen.curvature import Geometry, killing_check, nabla_F, translation
from idegen.errors import IdegenError, NotClosed, NotTriangular
from idegen.metric import CanonicalMetric, a_is_closed, normalize_a


@dataclass
class TypeFlag:
    holds: bool
    witness: str = "holds"


@dataclass
class TypeReport:
    flags: dict[str, TypeFlag]
    walker: dict[int, Polynomial] | None = None
    walker_text: str = "none"
    nabla_F_constant: bool | None = None
    killing_yano: bool | None = None
    cross_checks: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def holds(self, t: str) -> bool:
        return self.flags[t].holds

    @property
    def types(self) -> list[str]:
        return [t for t, f in self.flags.items() if f.holds]

    @property
    def most_special(self) -> str | None:
        ts = self.types
        return ts[-1] if ts else None

    def to_dict(self) -> dict:
        return {
            "types": {t: {"holds": f.holds, "witness": f.witness} for t, f in self.flags.items()},
            "most_special": self.most_special,
            "walker": self.walker_text,
            "nabla_F_constant": self.nabla_F_constant,
            "killing_yano": self.killing_yano,
            "cross_checks": self.cross_checks,
            "notes": self.notes,
        }


def _first_v_dependent(cm: CanonicalMetric, mat, name: str) -> str | None:
    c = cm.coords
    vs = set(c.v_vars())
    for i in range(mat.rows):
        for j in range(mat.cols):
            p = mat[i, j]
            hit = sorted(vs & p.variables())
            if hit:
                return f"d/d{c.names[hit[0]]} {name}[{i + 1},{j + 1}] = {p.diff(hit[0])}"
    return None


def _fail_rest(flags, start: str, why: str):
    order = ["I", "II", "III", "IV", "V"]
    for t in order[order.index(start):]:
        flags[t] = TypeFlag(False, why)


def classify(cm: CanonicalMetric) -> TypeReport:
    c = cm.coords
    k = cm.k
    flags: dict[str, TypeFlag] = {}
    notes = ["the type-IV criterion reads the derivative as d/dv_i"]
    report = TypeReport(flags, notes=notes)

    bad = _first_v_dependent(cm, cm.g_trans, "g_trans")
    if bad:
        _fail_rest(flags, "I", bad)
        return report
    flags["I"] = TypeFlag(True)

    closed = a_is_closed(cm)
    if closed:
        row, (m, n) = closed
        _fail_rest(flags, "II", f"row {row} of a: d/dv{n} a[{row},{m}] != d/dv{m} a[{row},{n}]")
        return report
    flags["II"] = TypeFlag(True)

    work = cm
    if not cm.a.is_identity():
        try:
            work, _ = normalize_a(cm)
            notes.append("types III-V evaluated after bringing a to the identity")
        except (NotTriangular, NotClosed) as exc:
            _fail_rest(flags, "III", f"cannot normalize a: {exc}")
            return report

    bad = _first_v_dependent(work, work.B, "B")
    if bad:
        _fail_rest(flags, "III", bad)
    else:
        flags["III"] = TypeFlag(True)

    g = work.assemble()
    try:
        geo = Geometry(g)
        nf = nabla_F(geo, k)
    except IdegenError as exc:
        geo = None
        nf = None
        notes.append(f"tensorial checks skipped: {exc}")
    if nf is not None:
        report.nabla_F_constant = nf.constant
        report.killing_yano = nf.killing_yano
        if flags["III"].holds:
            report.walker = nf.walker
            report.walker_text = nf.walker_form(c)

    if flags["III"].holds:
        witness = None
        for j in range(k):
            s = Polynomial.zero(c)
            for i in range(k):
                s = s + work.A[i, j].diff(c.v(i + 1))
            if s:
                witness = f"sum_i d/dv_i A[i,{j + 1}] = {s}"
                break
        flags["IV"] = TypeFlag(witness is None, witness or "holds")
        if nf is not None:
            report.cross_checks["IV_vs_nabla_F"] = (witness is None) == nf.constant
            if witness is None and not nf.constant:
                notes.append("coordinate type-IV criterion disagrees with nabla F")
    else:
        flags["IV"] = TypeFlag(False, "type III fails")

    if flags["IV"].holds:
        bad = None
        for name, mat in (("a", work.a), ("A", work.A), ("B", work.B)):
            bad = _first_v_dependent(work, mat, name)
            if bad:
                break
        flags["V"] = TypeFlag(bad is None, bad or "holds")
        kill = all(killing_check(g, translation(c, c.names[c.v(i + 1)])) for i in range(k))
        report.cross_checks["V_vs_killing"] = kill == (bad is None)
    else:
        flags["V"] = TypeFlag(False, "type IV fails")
    return report
