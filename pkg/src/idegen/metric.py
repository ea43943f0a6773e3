"""Block metrics, full metric matrices, class validation and templates.

The block form is

    ds^2 = 2 du^i (a_ij dv^j + A_ij du^j + B_ia dx^a) + g_ab dx^a dx^b

with ``A`` symmetric, so the full matrix (index order u, x, v) reads

    [[2A, B, a], [B^T, g_trans, 0], [a^T, 0, 0]].
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

from idegen.algebra import (
    CoordinateSystem,
    PolyMatrix,
    Polynomial,
    mat_inverse_constdet,
    parse_poly,
    to_rational,
)
from idegen.algebra.poly import EXP_BITS, EXP_MASK, unpack
from idegen.errors import (
    CoefficientOutsideShape,
    DimensionMismatch,
    NotClosed,
    NotTriangular,
)
from idegen.lattice import (
    format_boost,
    format_monomial_v,
    is_canonical,
    shape_tables,
)


def _blank(coords: CoordinateSystem, rows: int, cols: int) -> PolyMatrix:
    return PolyMatrix.zeros(coords, rows, cols)


@dataclass(frozen=True, eq=False)
class FullMetric:
    """Symmetric ``n x n`` metric matrix, indices ordered ``(u, x, v)``."""

    coords: CoordinateSystem
    matrix: PolyMatrix
    signature: tuple[int, int] | None = None

    def __post_init__(self):
        n = self.coords.n
        if self.matrix.shape != (n, n):
            raise DimensionMismatch(f"expected a {n}x{n} metric, got {self.matrix.shape}")
        if not self.matrix.is_symmetric():
            raise DimensionMismatch("metric matrix is not symmetric")

    @classmethod
    def from_line_element(cls, coords: CoordinateSystem, terms: Mapping, signature=None) -> "FullMetric":
        """Build from line-element coefficients ``{("u1", "v1"): 2, ...}``.

        The value attached to ``(X, Y)`` is the coefficient of ``dX dY`` in
        ``ds^2``; for ``X != Y`` it is split evenly over ``g_XY`` and ``g_YX``.
        """
        n = coords.n
        pos = {var: idx for idx, var in enumerate(coords.metric_order())}
        cells = [[Polynomial.zero(coords)] * n for _ in range(n)]
        for (x, y), val in terms.items():
            p = _as_poly(val, coords)
            i, j = pos[coords.index(x)], pos[coords.index(y)]
            if i == j:
                cells[i][i] = cells[i][i] + p
            else:
                half = p / 2
                cells[i][j] = cells[i][j] + half
                cells[j][i] = cells[j][i] + half
        return cls(coords, PolyMatrix(coords, cells), signature)

    @property
    def n(self) -> int:
        return self.coords.n

    @cached_property
    def var_of(self) -> tuple[int, ...]:
        """Polynomial variable index of each metric index."""
        return self.coords.metric_order()

    def __getitem__(self, ij) -> Polynomial:
        return self.matrix[ij]

    def __eq__(self, other):
        if not isinstance(other, FullMetric):
            return NotImplemented
        return self.coords == other.coords and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    @cached_property
    def det(self) -> Polynomial:
        return self.matrix.det()

    @cached_property
    def inverse(self) -> PolyMatrix:
        return mat_inverse_constdet(self.matrix)

    def index_label(self, mu: int) -> str:
        return self.coords.names[self.var_of[mu]]

    def entries(self) -> Iterator[tuple[int, int, Polynomial]]:
        """Nonzero upper-triangular entries ``(mu, nu, g_{mu nu})``."""
        for i in range(self.n):
            for j in range(i, self.n):
                p = self.matrix[i, j]
                if p:
                    yield i, j, p

    def term_set(self) -> frozenset:
        """Every (index pair, monomial) present; the progress measure in searches."""
        return frozenset((i, j, key) for i, j, p in self.entries() for key in p.raw_terms)

    def term_count(self) -> int:
        return sum(len(p) for _, _, p in self.entries())

    def is_constant(self) -> bool:
        return self.matrix.is_constant()

    def depends_on_v(self) -> bool:
        vs = set(self.coords.v_vars())
        return any(vs & p.variables() for _, _, p in self.entries())

    def map_entries(self, fn) -> "FullMetric":
        return FullMetric(self.coords, self.matrix.map(fn), self.signature)

    def to_canonical(self) -> "CanonicalMetric":
        """Split into blocks; raises if the ``v`` rows are not of block form."""
        k, m = self.coords.k, self.coords.m
        M = self.matrix
        for i in range(k + m, self.n):
            for j in range(k, self.n):
                if M[i, j]:
                    raise DimensionMismatch(
                        f"not of block form: g({self.index_label(i)},{self.index_label(j)}) = {M[i, j]}"
                    )
        c = self.coords
        a = PolyMatrix.build(c, k, k, lambda i, j: M[i, k + m + j])
        A = PolyMatrix.build(c, k, k, lambda i, j: M[i, j] / 2)
        B = PolyMatrix.build(c, k, m, lambda i, j: M[i, k + j])
        g = PolyMatrix.build(c, m, m, lambda i, j: M[k + i, k + j])
        sig = None
        if self.signature is not None:
            sig = (self.signature[0] - k, self.signature[1] - k)
        return CanonicalMetric(c, a, A, B, g, sig)

    def is_block_form(self) -> bool:
        try:
            self.to_canonical()
        except DimensionMismatch:
            return False
        return True

    def line_element(self) -> str:
        """Human-readable ``ds^2`` with one summand per nonzero entry pair."""
        parts = []
        for i, j, p in self.entries():
            coeff = p if i == j else p * 2
            di, dj = "d" + self.index_label(i), "d" + self.index_label(j)
            diff = f"{di}^2" if i == j else f"{di} {dj}"
            text = str(coeff)
            if len(coeff) > 1:
                text = f"({text})"
            elif text == "1":
                text = ""
            elif text == "-1":
                text = "-"
            parts.append(f"{text}{' ' if text and text != '-' else ''}{diff}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def to_json_dict(self) -> dict:
        if self.is_block_form():
            return self.to_canonical().to_json_dict()
        out = {"k": self.coords.k, "m": self.coords.m,
               "g": [[str(self.matrix[i, j]) for j in range(self.n)] for i in range(self.n)]}
        if self.signature is not None and self.coords.m:
            out["transverse_signature"] = [self.signature[0] - self.coords.k,
                                           self.signature[1] - self.coords.k]
        return out


def _as_poly(val, coords: CoordinateSystem) -> Polynomial:
    if isinstance(val, Polynomial):
        return val
    if isinstance(val, str):
        return parse_poly(val, coords)
    return Polynomial.constant(coords, val)


@dataclass(frozen=True, eq=False)
class CanonicalMetric:
    coords: CoordinateSystem
    a: PolyMatrix
    A: PolyMatrix
    B: PolyMatrix
    g_trans: PolyMatrix
    transverse_signature: tuple[int, int] | None = None

    def __post_init__(self):
        k, m = self.coords.k, self.coords.m
        for name, mat, shape in (("a", self.a, (k, k)), ("A", self.A, (k, k)),
                                 ("B", self.B, (k, m)), ("g_trans", self.g_trans, (m, m))):
            if mat.shape != shape and not (0 in shape and mat.rows == shape[0]):
                raise DimensionMismatch(f"{name} has shape {mat.shape}, expected {shape}")
        if not self.A.is_symmetric():
            raise DimensionMismatch("A must be symmetric")
        if not self.g_trans.is_symmetric():
            raise DimensionMismatch("g_trans must be symmetric")
        if self.transverse_signature is not None and sum(self.transverse_signature) != m:
            raise DimensionMismatch(
                f"transverse signature {self.transverse_signature} does not add up to m={m}"
            )

    @classmethod
    def build(cls, coords: CoordinateSystem, a=None, A=None, B=None, g_trans=None,
              transverse_signature=None) -> "CanonicalMetric":
        """Blocks from nested lists of polynomials/strings/rationals.

        Missing blocks default to ``a = I``, ``A = 0``, ``B = 0``, ``g_trans = I``.
        """
        k, m = coords.k, coords.m

        def mat(rows, nr, nc, default):
            if rows is None:
                return default
            if isinstance(rows, PolyMatrix):
                return rows
            if len(rows) != nr or any(len(r) != nc for r in rows):
                raise DimensionMismatch(f"expected a {nr}x{nc} block")
            return PolyMatrix(coords, [[_as_poly(e, coords) for e in r] for r in rows])

        return cls(
            coords,
            mat(a, k, k, PolyMatrix.identity(coords, k)),
            mat(A, k, k, _blank(coords, k, k)),
            mat(B, k, m, PolyMatrix(coords, [[]] * k) if m == 0 else _blank(coords, k, m)),
            mat(g_trans, m, m, PolyMatrix.identity(coords, m)),
            None if transverse_signature is None else tuple(transverse_signature),
        )

    @property
    def k(self) -> int:
        return self.coords.k

    @property
    def m(self) -> int:
        return self.coords.m

    def assemble(self) -> FullMetric:
        return assemble(self)

    def replace(self, **blocks) -> "CanonicalMetric":
        vals = {"a": self.a, "A": self.A, "B": self.B, "g_trans": self.g_trans,
                "transverse_signature": self.transverse_signature}
        vals.update(blocks)
        return CanonicalMetric(self.coords, **vals)

    def __eq__(self, other):
        if not isinstance(other, CanonicalMetric):
            return NotImplemented
        return (self.coords == other.coords and self.a == other.a and self.A == other.A
                and self.B == other.B and self.g_trans == other.g_trans)

    def __hash__(self):
        return hash((self.a, self.A, self.B, self.g_trans))

    def to_json_dict(self) -> dict:
        out: dict = {"k": self.k, "m": self.m}
        if self.transverse_signature is not None:
            out["transverse_signature"] = list(self.transverse_signature)
        out["a"] = _str_rows(self.a)
        out["A"] = _str_rows(self.A)
        if self.m:
            out["B"] = _str_rows(self.B)
            out["g_trans"] = _str_rows(self.g_trans)
        return out


def _str_rows(M: PolyMatrix) -> list[list[str]]:
    return [[str(e) for e in M.row(i)] for i in range(M.rows)]


def assemble(cm: CanonicalMetric) -> FullMetric:
    k, m = cm.k, cm.m
    c = cm.coords
    n = c.n
    z = Polynomial.zero(c)
    cells = [[z] * n for _ in range(n)]
    for i in range(k):
        for j in range(k):
            cells[i][j] = cm.A[i, j] * 2
            cells[i][k + m + j] = cm.a[i, j]
            cells[k + m + j][i] = cm.a[i, j]
        for b in range(m):
            cells[i][k + b] = cm.B[i, b]
            cells[k + b][i] = cm.B[i, b]
    for a_ in range(m):
        for b in range(m):
            cells[k + a_][k + b] = cm.g_trans[a_, b]
    sig = None
    if cm.transverse_signature is not None:
        p, q = cm.transverse_signature
        sig = (k + p, k + q)
    elif m == 0:
        sig = (k, k)
    return FullMetric(c, PolyMatrix(c, cells), sig)


# -- class validation --------------------------------------------------------

def entry_label(coords: CoordinateSystem, var_i: int, var_j: int) -> str:
    """Block name of the metric entry for two polynomial variables."""
    (ki, i), (kj, j) = sorted((coords.kind(var_i), coords.kind(var_j)),
                              key=lambda t: "uxv".index(t[0]))
    if ki == "u" and kj == "u":
        return f"A{min(i, j)}{max(i, j)}"
    if ki == "u" and kj == "v":
        return f"a{i}{j}"
    if ki == "u" and kj == "x":
        return f"B{i}{j}"
    if ki == "x" and kj == "x":
        return f"g_trans{min(i, j)}{max(i, j)}"
    return f"g({ki}{i},{kj}{j})"


def index_weight(coords: CoordinateSystem, var: int, b: Sequence[int]) -> int:
    kind, i = coords.kind(var)
    if kind == "u":
        return -b[i - 1]
    if kind == "v":
        return b[i - 1]
    return 0


def v_grading(coords: CoordinateSystem, key: int, b: Sequence[int], u_weight: bool = False) -> int:
    """``d . b`` for the v-exponents of a packed monomial; with ``u_weight``
    the u-exponents count ``-b_i`` each (recentred grading)."""
    w = 0
    k = coords.k
    for i in range(k):
        bi = b[i]
        if bi:
            w += bi * ((key >> (EXP_BITS * (k + i))) & EXP_MASK)
            if u_weight:
                w -= bi * ((key >> (EXP_BITS * i)) & EXP_MASK)
    return w


@dataclass(frozen=True)
class Violation:
    component: str
    monomial: str
    excess: int


@dataclass(frozen=True)
class ValidationReport:
    boost: tuple[int, ...]
    violations: tuple[Violation, ...]
    canonical_boost: bool = True

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "boost": list(self.boost),
            "canonical_boost": self.canonical_boost,
            "status": "PASS" if self.passed else "FAIL",
            "violations": [{"component": v.component, "monomial": v.monomial, "excess": v.excess}
                           for v in self.violations],
        }


def validate_class(metric, b: Sequence[int]) -> ValidationReport:
    """Check every v-monomial against the component's bound ``d . b <= target``.

    Accepts a :class:`CanonicalMetric` or a :class:`FullMetric`; the bound of
    entry ``g(X, Y)`` is ``-(w(X) + w(Y))`` with ``w(du_i) = -b_i``,
    ``w(dv_i) = b_i``, ``w(dx) = 0``. Never raises on bad metrics.
    """
    b = tuple(int(x) for x in b)
    g = metric.assemble() if isinstance(metric, CanonicalMetric) else metric
    c = g.coords
    if len(b) != c.k:
        return ValidationReport(b, (Violation("boost", f"length {len(b)} != k={c.k}", 0),), False)
    out = []
    n = c.n
    vv = tuple(c.v_vars())
    for i, j, p in g.entries():
        vi, vj = g.var_of[i], g.var_of[j]
        dw = index_weight(c, vi, b) + index_weight(c, vj, b)
        label = entry_label(c, vi, vj)
        for key in sorted(p.raw_terms, key=lambda t: unpack(t, n)):
            w = v_grading(c, key, b) + dw
            if w > 0:
                exps = unpack(key, n)
                out.append(Violation(label, format_monomial_v([exps[t] for t in vv]), w))
    return ValidationReport(b, tuple(out), is_canonical(b))


# -- templates ---------------------------------------------------------------

def _component_shape(tables, label: str):
    kind = label[0]
    idx = label[1:].replace(",", "")
    if kind == "B":
        i = int(idx[0])
        return tables.B[i - 1], (i, int(idx[1:]) if len(idx) > 1 else None)
    i, j = int(idx[0]), int(idx[1])
    if kind == "A":
        return tables.A[i - 1][j - 1], (i, j)
    if kind == "a":
        return tables.a_raw[i - 1][j - 1], (i, j)
    raise KeyError(label)


def instantiate_template(b: Sequence[int], coefficients: Mapping | None = None, *,
                         seed: int | None = None, m: int = 0, density: float = 0.5,
                         coeff_range: int = 3, u_terms: bool = False,
                         lower_a: str = "closed") -> CanonicalMetric:
    """Metric of the class of ``b`` with the given or random coefficients.

    ``coefficients`` maps a component label (``"A12"``, ``"a31"``, ``"B1"`` or
    ``"B12"`` for ``B_{1,2}``) to ``{monomial: coefficient}``, where the monomial
    is a pure-v product (``"v1^4"``, ``"1"``) and the coefficient a rational
    or a polynomial in u and x. Without coefficients a random metric is drawn
    from ``seed``: each member of each shape enters with probability ``density``
    and a nonzero integer coefficient in ``[-coeff_range, coeff_range]``
    (optionally times ``1 + c*u_j``). ``lower_a`` picks the random lower
    triangle of ``a``: ``"closed"`` (each row the v-gradient of a potential,
    so the metric is normalizable), ``"free"`` (independent entries) or
    ``"none"``.
    """
    if lower_a not in ("closed", "free", "none"):
        raise ValueError(f"lower_a must be closed, free or none, not {lower_a!r}")
    b = tuple(int(x) for x in b)
    tables = shape_tables(b)
    k = len(b)
    coords = CoordinateSystem(k, m)
    zero = Polynomial.zero(coords)
    A = [[zero] * k for _ in range(k)]
    a = [[Polynomial.constant(coords, 1 if i == j else 0) for j in range(k)] for i in range(k)]
    B = [[zero] * m for _ in range(k)]
    v_index = [coords.v(i + 1) for i in range(k)]

    def mono(d) -> Polynomial:
        exps = [0] * coords.n
        for t, e in enumerate(d):
            exps[v_index[t]] = e
        return Polynomial.monomial(coords, exps)

    if coefficients is not None:
        vset = set(coords.v_vars())
        for label, terms in coefficients.items():
            try:
                shape, (i, j) = _component_shape(tables, label)
            except (KeyError, ValueError, IndexError):
                raise CoefficientOutsideShape(f"unknown component {label!r}") from None
            if label[0] == "a" and i == j:
                raise CoefficientOutsideShape(f"{label} is fixed to 1")
            if label[0] == "B" and (m == 0 or j is None or not 1 <= j <= m):
                raise CoefficientOutsideShape(f"{label}: need B<i><a> with 1 <= a <= m={m}")
            total = zero
            for mtext, ctext in terms.items():
                mp = parse_poly(mtext, coords) if isinstance(mtext, str) else mono(mtext)
                if len(mp) != 1 or mp.raw_terms.get(next(iter(mp.raw_terms))) != 1:
                    raise CoefficientOutsideShape(f"{label}: {mtext!r} is not a bare monomial")
                if mp.variables() - vset:
                    raise CoefficientOutsideShape(f"{label}: {mtext!r} is not a pure v-monomial")
                (key,) = mp.raw_terms
                d = [unpack(key, coords.n)[t] for t in v_index]
                if tuple(d) not in shape:
                    raise CoefficientOutsideShape(f"{label}: {format_monomial_v(d)} lies outside the shape")
                cp = _as_poly(ctext, coords)
                if cp.variables() & vset:
                    raise CoefficientOutsideShape(f"{label}: coefficient {cp} depends on v")
                total = total + cp * mp
            kind = label[0]
            if kind == "A":
                A[i - 1][j - 1] = A[i - 1][j - 1] + total
                if i != j:
                    A[j - 1][i - 1] = A[j - 1][i - 1] + total
            elif kind == "a":
                a[i - 1][j - 1] = a[i - 1][j - 1] + total
            else:
                B[i - 1][j - 1] = B[i - 1][j - 1] + total
    else:
        rng = random.Random(seed)
        u_vars = list(coords.u_vars())

        def draw(members) -> Polynomial:
            acc = zero
            for d in members:
                if rng.random() >= density:
                    continue
                c = rng.choice([x for x in range(-coeff_range, coeff_range + 1) if x])
                term = mono(d) * c
                if u_terms and rng.random() < 0.5:
                    factor = Polynomial.constant(coords, 1) + Polynomial.variable(coords, rng.choice(u_vars)) * rng.choice((-1, 1, 2))
                    term = term * factor
                acc = acc + term
            return acc

        for i in range(k):
            for j in range(i, k):
                p = draw(tables.A[i][j].members())
                A[i][j] = p
                A[j][i] = p
            if lower_a == "free":
                for j in range(i):
                    if b[i] > b[j]:
                        a[i][j] = draw(tables.a[i][j].members())
            elif lower_a == "closed":
                low = [t for t in range(k) if b[t] < b[i]]
                if low:
                    # potential of weight <= b_i in the lighter v's
                    pot = [d for d in tables.B[i].members()
                           if all(e == 0 for t, e in enumerate(d) if t not in low)]
                    f = draw(pot)
                    for j in low:
                        a[i][j] = f.diff(v_index[j])
            for t in range(m):
                B[i][t] = draw(tables.B[i].members())
    g_trans = PolyMatrix.identity(coords, m)
    return CanonicalMetric(
        coords,
        PolyMatrix(coords, a),
        PolyMatrix(coords, A),
        PolyMatrix(coords, B) if m else PolyMatrix(coords, [[]] * k),
        g_trans,
        (m, 0) if m else None,
    )


# -- coordinate changes ------------------------------------------------------

def pullback(g: FullMetric, phi: Mapping[int, Polynomial]) -> FullMetric:
    """Metric in new coordinates given old coordinates as polynomials of the new.

    ``phi`` maps a variable index to its expression; absent variables are kept.
    Computes ``J^T g(phi) J`` exactly.
    """
    c = g.coords
    n = c.n
    order = g.var_of
    exprs = [phi.get(v, Polynomial.variable(c, v)) for v in order]
    # J[mu][alpha] = d old^mu / d new^alpha, both in metric order
    J = PolyMatrix(c, [[e.diff(order[al]) for al in range(n)] for e in exprs])
    gs = g.matrix.map(lambda p: p.substitute(phi))
    new = J.transpose() @ gs @ J
    return FullMetric(c, new, g.signature)


def _row_closed(cm: CanonicalMetric, i: int):
    c = cm.coords
    k = cm.k
    for m_ in range(k):
        for n_ in range(m_ + 1, k):
            if cm.a[i, m_].diff(c.v(n_ + 1)) != cm.a[i, n_].diff(c.v(m_ + 1)):
                return (m_ + 1, n_ + 1)
    return None


def a_is_closed(cm: CanonicalMetric) -> tuple[int, tuple[int, int]] | None:
    """``None`` if every row of ``a`` is v-closed, else ``(row, (m, n))`` 1-based."""
    for i in range(cm.k):
        bad = _row_closed(cm, i)
        if bad:
            return i + 1, bad
    return None


def _pivot_order(a: PolyMatrix) -> list[tuple[int, int]]:
    """Rows paired with pivot columns so that each row, restricted to the
    columns not yet used, is exactly the constant 1 at its pivot."""
    k = a.rows
    rows = set(range(k))
    cols = set(range(k))
    order = []
    while rows:
        for r in sorted(rows):
            live = [cidx for cidx in sorted(cols) if a[r, cidx]]
            if len(live) == 1 and a[r, live[0]] == 1:
                order.append((r, live[0]))
                rows.remove(r)
                cols.remove(live[0])
                break
        else:
            raise NotTriangular("a is not unit-triangular up to a permutation of rows")
    return order


def _integrate_row(cm: CanonicalMetric, i: int) -> Polynomial:
    """Potential ``f`` with ``df/dv_m = a_im`` (homotopy formula on a closed row)."""
    c = cm.coords
    k = cm.k
    vvars = [c.v(t + 1) for t in range(k)]
    total = Polynomial.zero(c)
    for m_ in range(k):
        p = cm.a[i, m_]
        if not p:
            continue
        vm = Polynomial.variable(c, vvars[m_])
        out = {}
        for key, coeff in p.raw_terms.items():
            dv = sum((key >> (EXP_BITS * v)) & EXP_MASK for v in vvars)
            out[key] = coeff / (dv + 1)
        total = total + Polynomial(c, out) * vm
    return total


def normalize_a(cm: CanonicalMetric) -> tuple[CanonicalMetric, dict]:
    """Change ``v`` coordinates so that ``a`` becomes the identity.

    Returns the new metric and the forward map ``{row i: f_i}`` with
    ``new v_i = f_i(u, x, v)`` (1-based rows).
    """
    bad = a_is_closed(cm)
    if bad:
        raise NotClosed(*bad)
    if cm.a.is_identity():
        return cm, {i + 1: Polynomial.variable(cm.coords, cm.coords.v(i + 1)) for i in range(cm.k)}
    order = _pivot_order(cm.a)
    c = cm.coords
    f = {r: _integrate_row(cm, r) for r in range(cm.k)}
    # new v_r = f_r = v_p + (terms in earlier pivots); invert in pivot order
    inv: dict[int, Polynomial] = {}
    for r, p in order:
        vp = Polynomial.variable(c, c.v(p + 1))
        rest = f[r] - vp
        expr = Polynomial.variable(c, c.v(r + 1)) - rest.substitute(inv)
        inv[c.v(p + 1)] = expr
    g = pullback(cm.assemble(), inv)
    new = g.to_canonical()
    if not new.a.is_identity():
        raise NotTriangular(f"normalization left a = {new.a}")
    new = new.replace(transverse_signature=cm.transverse_signature)
    return new, {r + 1: f[r] for r in range(cm.k)}


# -- JSON schema ---------------------------------------------------------------

_KEYS = {"k", "m", "transverse_signature", "a", "A", "B", "g_trans", "g", "boost", "point",
         "description"}


@dataclass
class MetricDocument:
    """A parsed metric file: the metric plus optional boost and base point."""

    metric: FullMetric
    canonical: CanonicalMetric | None = None
    boost: tuple[int, ...] | None = None
    point: dict[int, object] | None = None
    description: str = ""
    extra: dict = field(default_factory=dict)


def parse_point(data, coords: CoordinateSystem) -> dict[int, object]:
    """``{"u": [...], "v": [...], "x": [...]}`` -> ``{var index: rational}``.

    Missing groups default to zeros.
    """
    from idegen.errors import MetricFormatError

    if not isinstance(data, dict) or set(data) - {"u", "v", "x"}:
        raise MetricFormatError("point must be an object with keys among u, v, x")
    out = {}
    for kind, count, idx in (("u", coords.k, coords.u), ("v", coords.k, coords.v), ("x", coords.m, coords.x)):
        vals = data.get(kind, ["0"] * count)
        if not isinstance(vals, list) or len(vals) != count:
            raise MetricFormatError(f"point.{kind} must list {count} values")
        for t, val in enumerate(vals):
            try:
                out[idx(t + 1)] = to_rational(val if not isinstance(val, float) else str(val))
            except (TypeError, ValueError) as exc:
                raise MetricFormatError(f"point.{kind}[{t}]: {exc}") from None
    return out


def point_to_json(point: Mapping[int, object], coords: CoordinateSystem) -> dict:
    from idegen.algebra import format_rational

    def grab(idx, count):
        return [format_rational(point.get(idx(t + 1), 0)) for t in range(count)]

    return {"u": grab(coords.u, coords.k), "v": grab(coords.v, coords.k), "x": grab(coords.x, coords.m)}


def metric_from_json(data: dict) -> MetricDocument:
    from idegen.errors import MetricFormatError, PolySyntaxError

    if not isinstance(data, dict):
        raise MetricFormatError("metric document must be a JSON object")
    unknown = set(data) - _KEYS
    if unknown:
        raise MetricFormatError(f"unknown keys: {sorted(unknown)}")
    try:
        k = int(data["k"])
        m = int(data.get("m", 0))
        coords = CoordinateSystem(k, m)
    except (KeyError, TypeError, ValueError) as exc:
        raise MetricFormatError(f"bad k/m: {exc}") from None
    sig = data.get("transverse_signature")
    if sig is not None:
        if not (isinstance(sig, list) and len(sig) == 2 and all(isinstance(s, int) for s in sig)):
            raise MetricFormatError("transverse_signature must be [p, q]")
        if sum(sig) != m:
            raise MetricFormatError(f"transverse_signature {sig} must add up to m={m}")
        sig = tuple(sig)

    def grid(key, rows, cols):
        val = data[key]
        if not isinstance(val, list) or len(val) != rows or any(
                not isinstance(r, list) or len(r) != cols for r in val):
            raise MetricFormatError(f"{key} must be a {rows}x{cols} array of strings")
        out = []
        for i, r in enumerate(val):
            row = []
            for j, e in enumerate(r):
                if not isinstance(e, (str, int)) or isinstance(e, bool):
                    raise MetricFormatError(f"{key}[{i}][{j}] must be a string")
                try:
                    row.append(parse_poly(str(e), coords))
                except PolySyntaxError as exc:
                    raise MetricFormatError(f"{key}[{i}][{j}]: {exc}") from exc
            out.append(row)
        return out

    canonical = None
    try:
        if "g" in data:
            if set(data) & {"a", "A", "B", "g_trans"}:
                raise MetricFormatError("give either the full matrix g or the blocks, not both")
            n = coords.n
            full_sig = None if sig is None else (k + sig[0], k + sig[1])
            if sig is None and m == 0:
                full_sig = (k, k)
            metric = FullMetric(coords, PolyMatrix(coords, grid("g", n, n)), full_sig)
            if metric.is_block_form():
                canonical = metric.to_canonical()
        else:
            if "a" not in data or "A" not in data:
                raise MetricFormatError("blocks a and A are required")
            if m and ("B" not in data or "g_trans" not in data):
                raise MetricFormatError("B and g_trans are required when m > 0")
            if not m and ("B" in data or "g_trans" in data):
                raise MetricFormatError("omit B and g_trans when m = 0")
            canonical = CanonicalMetric.build(
                coords,
                a=grid("a", k, k),
                A=grid("A", k, k),
                B=grid("B", k, m) if m else None,
                g_trans=grid("g_trans", m, m) if m else None,
                transverse_signature=sig,
            )
            metric = canonical.assemble()
    except DimensionMismatch as exc:
        raise MetricFormatError(str(exc)) from exc
    boost = None
    if "boost" in data:
        b = data["boost"]
        if not (isinstance(b, list) and len(b) == k and all(isinstance(x, int) and x >= 0 for x in b)):
            raise MetricFormatError(f"boost must list {k} non-negative integers")
        boost = tuple(b)
    point = parse_point(data["point"], coords) if "point" in data else None
    desc = data.get("description", "")
    if not isinstance(desc, str):
        raise MetricFormatError("description must be a string")
    return MetricDocument(metric, canonical, boost, point, desc)


def metric_to_json(metric, boost=None, point=None) -> dict:
    out = metric.to_json_dict()
    coords = metric.coords
    if boost is not None:
        out["boost"] = list(boost)
    if point is not None:
        out["point"] = point_to_json(point, coords)
    return out


def load_metric(path) -> MetricDocument:
    import json

    from idegen.errors import MetricFormatError

    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MetricFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    try:
        return metric_from_json(data)
    except MetricFormatError as exc:
        raise MetricFormatError(f"{path}: {exc}") from exc


def describe_boost(b: Sequence[int]) -> str:
    return format_boost(b) + ("" if is_canonical(b) else " (non-canonical)")
