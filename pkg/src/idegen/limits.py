"""Boost pullback limits, Theorem-3.3 style agreement checks and certificates.

Grading convention: about a base point ``p = (u0, x0, v = 0)`` write
``u = u0 + ubar``. A term ``c * ubar^e * v^d * dX dY`` has weight

    d.b - e.b + w(dX) + w(dY),   w(du_i) = -b_i, w(dv_i) = +b_i, w(dx) = 0.

The finite pullback with rational ``s`` multiplies every term by ``s**weight``
(it is the coordinate change ``ubar_i -> s^-b_i ubar_i``, ``v_i -> s^b_i v_i``).
As ``s -> oo`` weight-0 terms survive, negative weights die and any positive
weight diverges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from functools import reduce
from itertools import product
from typing import Mapping, Sequence

from idegen.algebra import PolyMatrix, Polynomial, format_rational, to_rational
from idegen.algebra.poly import unpack
from idegen.curvature import BASIS, Geometry, invariants, invariants_at
from idegen.errors import BlowUp, NonConstantDeterminant, NonZeroVBasePoint
from idegen.lattice import format_boost, is_canonical
from idegen.metric import FullMetric, entry_label, index_weight, v_grading

CONVERGED = "Converged"
BLOWUP = "BlowUp"
UNCHANGED = "Unchanged"


def normalize_point(coords, point: Mapping | None) -> dict[int, object]:
    """Variable index -> rational for every coordinate (missing ones are 0)."""
    out = {i: to_rational(0) for i in range(coords.n)}
    for key, val in (point or {}).items():
        idx = coords.index(key) if isinstance(key, str) else int(key)
        out[idx] = to_rational(val)
    return out


def _check_point(coords, point: dict):
    for i in coords.v_vars():
        if point[i]:
            raise NonZeroVBasePoint(
                f"base point must have v = 0, got {coords.names[i]} = {format_rational(point[i])}"
            )


def _u_shift(coords, b, point, sign=1) -> dict:
    # recentre only boosted u directions
    return {coords.u(i + 1): sign * point[coords.u(i + 1)]
            for i in range(coords.k) if b[i] and point[coords.u(i + 1)]}


def _check_boost(coords, b) -> tuple[int, ...]:
    b = tuple(int(x) for x in b)
    if len(b) != coords.k:
        raise ValueError(f"boost {b} has length {len(b)}, expected k={coords.k}")
    if any(x < 0 for x in b) or not any(b):
        raise ValueError(f"boost entries must be >= 0 and not all zero: {b}")
    return b


@dataclass
class DroppedTerm:
    component: str
    term: str
    weight: int


@dataclass
class LimitResult:
    outcome: str
    boost: tuple[int, ...]
    point: dict
    metric: FullMetric | None
    dropped: list[DroppedTerm] = field(default_factory=list)
    blowup: DroppedTerm | None = None

    @property
    def converged(self) -> bool:
        return self.outcome == CONVERGED

    def limit_metric(self) -> FullMetric:
        """The limit (the input itself when unchanged); raises :class:`BlowUp`."""
        if self.outcome == BLOWUP:
            b = self.blowup
            raise BlowUp(b.component, b.term, b.weight)
        return self.metric

    def to_dict(self) -> dict:
        from idegen.metric import metric_to_json

        out = {"outcome": self.outcome, "boost": list(self.boost),
               "canonical_boost": is_canonical(self.boost),
               "dropped": [{"component": d.component, "term": d.term, "weight": d.weight}
                           for d in self.dropped]}
        if self.metric is not None:
            out["metric"] = metric_to_json(self.metric)
            out["line_element"] = self.metric.line_element()
        if self.blowup is not None:
            out["blowup"] = {"component": self.blowup.component, "term": self.blowup.term,
                             "weight": self.blowup.weight}
        return out


def _term_text(g: FullMetric, key: int, coeff) -> str:
    p = Polynomial(g.coords, {key: coeff})
    return str(p)


def graded_terms(g: FullMetric, b: Sequence[int], point: Mapping | None = None):
    """Yield ``(mu, nu, key, coeff, weight)`` for the metric recentred at ``point``."""
    c = g.coords
    b = _check_boost(c, b)
    pt = normalize_point(c, point)
    _check_point(c, pt)
    shift = _u_shift(c, b, pt)
    for mu, nu, p in g.entries():
        q = p.shift(shift) if shift else p
        dw = index_weight(c, g.var_of[mu], b) + index_weight(c, g.var_of[nu], b)
        n = c.n
        for key in sorted(q.raw_terms, key=lambda t: tuple(-e for e in unpack(t, n))):
            yield mu, nu, key, q.raw_terms[key], v_grading(c, key, b, u_weight=True) + dw


def _rebuild(g: FullMetric, cells: dict, unshift: dict) -> FullMetric:
    c = g.coords
    n = g.n
    z = Polynomial.zero(c)
    rows = [[z] * n for _ in range(n)]
    for (mu, nu), terms in cells.items():
        p = Polynomial(c, terms)
        if unshift:
            p = p.shift(unshift)
        rows[mu][nu] = p
        rows[nu][mu] = p
    return FullMetric(c, PolyMatrix(c, rows), g.signature)


def pullback_limit(g: FullMetric, b: Sequence[int], point: Mapping | None = None) -> LimitResult:
    """Limit of the boost pullback about ``point`` (default: origin)."""
    c = g.coords
    b = _check_boost(c, b)
    pt = normalize_point(c, point)
    _check_point(c, pt)
    kept: dict = {}
    dropped = []

    def describe(mu, nu, key, coeff, w):
        label = entry_label(c, g.var_of[mu], g.var_of[nu])
        return DroppedTerm(label, _term_text(g, key, coeff), w)

    for mu, nu, key, coeff, w in graded_terms(g, b, pt):
        if w > 0:
            return LimitResult(BLOWUP, b, pt, None, dropped, describe(mu, nu, key, coeff, w))
        if w < 0:
            dropped.append(describe(mu, nu, key, coeff, w))
        else:
            kept.setdefault((mu, nu), {})[key] = coeff
    if not dropped:
        return LimitResult(UNCHANGED, b, pt, g)
    return LimitResult(CONVERGED, b, pt, _rebuild(g, kept, _u_shift(c, b, pt, -1)), dropped)


def finite_pullback(g: FullMetric, b: Sequence[int], s, point: Mapping | None = None) -> FullMetric:
    """Exact pullback by the finite boost with parameter ``s`` about ``point``.

    Implemented as a coordinate substitution plus rescaling of the
    differentials, independently of the term grading.
    """
    c = g.coords
    b = _check_boost(c, b)
    s = to_rational(s)
    if not s:
        raise ValueError("s must be nonzero")
    pt = normalize_point(c, point)
    _check_point(c, pt)
    shift = _u_shift(c, b, pt)
    factors = {}
    for i, bi in enumerate(b, start=1):
        if bi:
            factors[c.u(i)] = s ** (-bi)
            factors[c.v(i)] = s ** bi
    diff_scale = [factors.get(var, to_rational(1)) for var in g.var_of]
    unshift = _u_shift(c, b, pt, -1)

    def transform(mu, nu, p):
        if shift:
            p = p.shift(shift)
        p = p.scale_variables(factors) * (diff_scale[mu] * diff_scale[nu])
        return p.shift(unshift) if unshift else p

    n = g.n
    rows = [[transform(i, j, g[i, j]) if g[i, j] else g[i, j] for j in range(n)] for i in range(n)]
    return FullMetric(c, PolyMatrix(c, rows), g.signature)


def scale_by_weight(g: FullMetric, b: Sequence[int], s, point: Mapping | None = None) -> FullMetric:
    """Multiply each recentred term by ``s**weight`` (the graded form of the pullback)."""
    c = g.coords
    s = to_rational(s)
    pt = normalize_point(c, point)
    cells: dict = {}
    for mu, nu, key, coeff, w in graded_terms(g, b, pt):
        cells.setdefault((mu, nu), {})[key] = coeff * s ** w
    return _rebuild(g, cells, _u_shift(c, _check_boost(c, b), pt, -1))


# -- Theorem 3.3 ---------------------------------------------------------------

@dataclass
class AgreementReport:
    boost: tuple[int, ...]
    point: dict
    original: dict
    limit: dict
    limit_metric: FullMetric

    @property
    def agree(self) -> bool:
        return all(self.original[k] == self.limit[k] for k in self.original)

    def to_dict(self) -> dict:
        return {
            "boost": list(self.boost),
            "agree": self.agree,
            "invariants": {k: {"metric": format_rational(self.original[k]),
                               "limit": format_rational(self.limit[k])} for k in self.original},
        }


def invariant_agreement(g: FullMetric, b: Sequence[int], point: Mapping | None = None,
                        basis: Sequence[str] = BASIS) -> AgreementReport:
    """Basis invariants of ``g`` and of its boost limit, both evaluated at ``point``.

    Raises :class:`BlowUp` when the limit diverges.
    """
    res = pullback_limit(g, b, point)
    g0 = res.limit_metric()
    pt = res.point
    return AgreementReport(res.boost, pt, invariants_at(g, pt, basis), invariants_at(g0, pt, basis), g0)


def boost_generator_field(coords, b: Sequence[int], point: Mapping | None = None) -> dict:
    from idegen.curvature import boost_generator

    pt = normalize_point(coords, point)
    return boost_generator(coords, b, {coords.u(i + 1): pt[coords.u(i + 1)] for i in range(coords.k)})


# -- flatness and VSI search -----------------------------------------------------

def is_flat(g: FullMetric) -> bool:
    if g.is_constant():
        return True
    try:
        return Geometry(g).is_flat()
    except NonConstantDeterminant:
        return False


@dataclass
class VsiStep:
    boost: tuple[int, ...]
    metric: FullMetric


@dataclass
class VsiCertificate:
    start: FullMetric
    steps: list[VsiStep]
    point: dict
    flat: bool = True
    non_canonical: list[tuple[int, ...]] = field(default_factory=list)

    found = True

    def replay(self) -> bool:
        """Recompute every limit and the endpoint flatness from scratch."""
        g = self.start
        for step in self.steps:
            res = pullback_limit(g, step.boost, self.point)
            if not res.converged or res.metric != step.metric:
                return False
            g = res.metric
        return is_flat(g)

    def to_dict(self) -> dict:
        from idegen.metric import metric_to_json

        return {
            "steps": [{"boost": list(s.boost), "metric": metric_to_json(s.metric),
                       "line_element": s.metric.line_element()} for s in self.steps],
            "flat": self.flat,
            "non_canonical_boosts": [list(b) for b in self.non_canonical],
            "note": "boosts are general non-negative integer vectors; non-canonical ones are listed",
        }


@dataclass
class NotFound:
    max_depth: int
    max_entry: int
    explored: int

    found = False
    flat = False

    def to_dict(self) -> dict:
        return {"result": "NotFound", "max_depth": self.max_depth, "max_entry": self.max_entry,
                "explored": self.explored,
                "note": "bounded search exhausted; this does not show the metric is not VSI"}


def candidate_boosts(k: int, max_entry: int) -> list[tuple[int, ...]]:
    """Primitive non-negative vectors in ``[0, max_entry]^k``, lexicographic."""
    out = []
    for b in product(range(max_entry + 1), repeat=k):
        if any(b) and reduce(gcd, b) == 1:
            out.append(b)
    return out


def vsi_search(g: FullMetric, max_depth: int = 4, max_entry: int = 8,
               u0: Mapping | None = None, goal: str = "constant"):
    """Search for boosts ``g -> g1 -> ... -> flat``; returns a certificate or
    :class:`NotFound`.

    Iterative deepening over depth, so the first certificate found is a
    shortest one; within a depth, candidates are tried in lexicographic order.
    ``goal="constant"`` stops at metrics with constant components (flat by
    inspection); ``goal="riemann"`` also stops at any metric with vanishing
    Riemann tensor. Either way the endpoint is re-checked with the curvature.
    """
    if goal not in ("constant", "riemann"):
        raise ValueError("goal must be 'constant' or 'riemann'")
    if not 0 <= max_depth <= 6:
        raise ValueError("max_depth must be in 0..6")
    if not 0 <= max_entry <= 16:
        raise ValueError("max_entry must be in 0..16")
    c = g.coords
    point = normalize_point(c, u0)
    _check_point(c, point)
    cands = candidate_boosts(c.k, max_entry) if max_entry else []
    flat_cache: dict = {}
    limit_cache: dict = {}
    explored = 0

    def flat(m: FullMetric) -> bool:
        r = flat_cache.get(m)
        if r is None:
            r = m.is_constant() if goal == "constant" else is_flat(m)
            flat_cache[m] = r
        return r

    def children(m: FullMetric):
        kids = limit_cache.get(m)
        if kids is None:
            kids = []
            for b in cands:
                res = pullback_limit(m, b, point)
                if res.converged:
                    kids.append((b, res.metric))
            limit_cache[m] = kids
        return kids

    failed: dict = {}  # metric -> largest budget known to fail

    def dfs(m: FullMetric, budget: int):
        nonlocal explored
        explored += 1
        if flat(m):
            return []
        if budget == 0 or failed.get(m, -1) >= budget:
            return None
        for b, child in children(m):
            path = dfs(child, budget - 1)
            if path is not None:
                return [VsiStep(b, child)] + path
        failed[m] = max(failed.get(m, -1), budget)
        return None

    for depth in range(max_depth + 1):
        path = dfs(g, depth)
        if path is not None:
            end = path[-1].metric if path else g
            if not is_flat(end):
                raise AssertionError("search endpoint failed the curvature check")
            return VsiCertificate(g, path, point, True,
                                  [s.boost for s in path if not is_canonical(s.boost)])
    return NotFound(max_depth, max_entry, explored)


# -- CSI -----------------------------------------------------------------------

@dataclass
class CsiCertificate:
    values: dict
    constant: bool
    basis: tuple[str, ...] = BASIS
    label: str = "CSI certificate up to the configured basis"
    chain: list[VsiStep] = field(default_factory=list)

    @property
    def nonconstant(self) -> list[str]:
        return [k for k, v in self.values.items() if not v.is_constant()]

    def to_dict(self) -> dict:
        out = {"result": "Constant" if self.constant else "NotConstant",
               "invariants": {k: str(v) for k, v in self.values.items()},
               "zero": all(v.is_zero() for v in self.values.values()),
               "basis": list(self.basis)}
        if self.constant:
            out["label"] = self.label
        else:
            out["nonconstant"] = self.nonconstant
        return out


def csi_certificate(g: FullMetric, basis: Sequence[str] = BASIS) -> CsiCertificate:
    """Symbolic basis invariants; ``constant`` iff every one has degree 0."""
    vals = invariants(g, basis)
    return CsiCertificate(vals, all(v.is_constant() for v in vals.values()), tuple(basis))


def describe_limit(res: LimitResult) -> str:
    head = f"{res.outcome} under {format_boost(res.boost)}"
    if res.outcome == BLOWUP:
        return head + f": {res.blowup.component} term {res.blowup.term} has weight +{res.blowup.weight}"
    return head
