"""Exact Levi-Civita curvature of polynomial metrics.

Tensors are stored sparsely (index tuple -> nonzero Polynomial), indices in
the metric order ``(u, x, v)``. Conventions:

    Gamma^l_{mn}  = g^{ls} (d_m g_{sn} + d_n g_{sm} - d_s g_{mn}) / 2
    R^r_{smn}     = d_m Gamma^r_{ns} - d_n Gamma^r_{ms}
                    + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}
    R_{sn}        = R^r_{srn}

Covariant derivatives append the derivative index last: ``(nabla T)[..., t]``
is ``nabla_t T_{...}``.

A :class:`Geometry` can also work on a jet: a metric known only up to total
degree ``d`` around the origin. Each tensor then carries ``valid``, the degree
up to which its components are exact, and products are truncated there.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from idegen.algebra import PolyMatrix, Polynomial, mat_inverse_constdet, to_rational
from idegen.errors import SingularMatrix, SingularMetricAtPoint, WalkerInconsistent
from idegen.metric import FullMetric

BASIS = ("R", "RicSq", "RiemSq", "DRSq", "DRicSq", "DRiemSq")

BASIS_DESCRIPTIONS = {
    "R": "Ricci scalar R",
    "RicSq": "R_{ab} R^{ab}",
    "RiemSq": "R_{abcd} R^{abcd} (Kretschmann)",
    "DRSq": "R_{;a} R^{;a}",
    "DRicSq": "R_{ab;c} R^{ab;c}",
    "DRiemSq": "R_{abcd;e} R^{abcd;e}",
}


@dataclass
class TensorField:
    """Sparse tensor: ``variance`` has one ``'u'`` (up) or ``'d'`` (down) per index."""

    coords: object
    variance: str
    comps: dict = field(default_factory=dict)
    valid: int | None = None

    @property
    def rank(self) -> int:
        return len(self.variance)

    def __getitem__(self, idx) -> Polynomial:
        p = self.comps.get(tuple(idx))
        return p if p is not None else Polynomial.zero(self.coords)

    def items(self):
        return self.comps.items()

    def is_zero(self) -> bool:
        return not self.comps

    def __len__(self) -> int:
        return len(self.comps)

    def map(self, fn) -> "TensorField":
        out = {}
        for idx, p in self.comps.items():
            q = fn(p)
            if q:
                out[idx] = q
        return TensorField(self.coords, self.variance, out, self.valid)

    def evaluate(self, point) -> dict:
        return {idx: p.evaluate(point) for idx, p in self.comps.items()}

    def __eq__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        return self.variance == other.variance and self.comps == other.comps


def _acc(d: dict, key, val):
    if not val:
        return
    prev = d.get(key)
    if prev is None:
        d[key] = val
    else:
        s = prev + val
        if s:
            d[key] = s
        else:
            del d[key]


def _min_valid(*vals):
    vs = [v for v in vals if v is not None]
    return min(vs) if vs else None


class Geometry:
    """Curvature data of one metric, computed lazily and cached.

    ``order`` marks the metric as a jet valid to that total degree (use
    :meth:`at_point`); ``None`` means exact polynomials.
    """

    def __init__(self, g: FullMetric, ginv: PolyMatrix | None = None, order: int | None = None):
        self.metric = g
        self.coords = g.coords
        self.n = g.n
        self.var_of = g.var_of
        self.order = order
        if ginv is None:
            ginv = g.inverse
        self.ginv = ginv
        n = self.n
        self._g = {(i, j): g[i, j] for i in range(n) for j in range(n) if g[i, j]}
        self._gi = {(i, j): ginv[i, j] for i in range(n) for j in range(n) if ginv[i, j]}
        self._g_rows = [[(j, g[i, j]) for j in range(n) if g[i, j]] for i in range(n)]
        self._gi_rows = [[(j, ginv[i, j]) for j in range(n) if ginv[i, j]] for i in range(n)]
        self._cache: dict = {}

    # -- construction of jets -----------------------------------------------
    @classmethod
    def at_point(cls, g: FullMetric, point: Mapping, order: int = 3) -> "Geometry":
        """Jet of ``g`` at ``point``: shifted so the point is the origin and
        truncated to ``order``. Only needs ``g(point)`` invertible."""
        c = g.coords
        shift = {}
        for key, val in point.items():
            idx = c.index(key) if isinstance(key, str) else int(key)
            shift[idx] = to_rational(val)
        jet = g.map_entries(lambda p: p.shift(shift).truncate(order))
        g0 = jet.matrix.map(lambda p: Polynomial.constant(c, p.constant_term()))
        try:
            g0inv = mat_inverse_constdet(g0)
        except SingularMatrix:
            raise SingularMetricAtPoint(f"metric is degenerate at {point}") from None
        H = jet.matrix - g0
        # g^{-1} = sum_j (-G0^{-1} H)^j G0^{-1}, H has no constant part
        step = (g0inv @ H).scale(-1)
        term = g0inv
        total = g0inv
        for _ in range(order):
            term = (step @ term).map(lambda p: p.truncate(order))
            total = total + term
        return cls(jet, total, order)

    # -- helpers ---------------------------------------------------------------
    def _mul(self, a: Polynomial, b: Polynomial, valid: int | None) -> Polynomial:
        p = a * b
        return p if valid is None else p.truncate(valid)

    def _d(self, p: Polynomial, mu: int) -> Polynomial:
        return p.diff(self.var_of[mu])

    def _cached(self, key, fn):
        val = self._cache.get(key)
        if val is None:
            val = fn()
            self._cache[key] = val
        return val

    # -- connection ------------------------------------------------------------
    @property
    def christoffel_first(self) -> TensorField:
        """``Gamma_{s m n}`` (all indices down)."""
        return self._cached("gamma1", self._gamma1)

    def _gamma1(self) -> TensorField:
        n = self.n
        valid = None if self.order is None else self.order - 1
        dg = {}
        for (a, b), p in self._g.items():
            if a <= b:
                for mu in range(n):
                    q = self._d(p, mu)
                    if q:
                        dg[(a, b, mu)] = q
                        dg[(b, a, mu)] = q

        def D(a, b, mu):
            return dg.get((a, b, mu))

        out = {}
        for s in range(n):
            for m in range(n):
                for nn in range(m, n):
                    acc = Polynomial.zero(self.coords)
                    for t, sgn in ((D(s, nn, m), 1), (D(s, m, nn), 1), (D(m, nn, s), -1)):
                        if t is not None:
                            acc = acc + t if sgn > 0 else acc - t
                    if acc:
                        acc = acc / 2
                        out[(s, m, nn)] = acc
                        out[(s, nn, m)] = acc
        return TensorField(self.coords, "ddd", out, valid)

    @property
    def christoffel(self) -> TensorField:
        """``Gamma^l_{m n}``."""
        return self._cached("gamma", self._gamma2)

    def _gamma2(self) -> TensorField:
        g1 = self.christoffel_first
        valid = g1.valid
        by_s: dict[int, list] = {}
        for (s, m, nn), p in g1.items():
            if m <= nn:
                by_s.setdefault(s, []).append((m, nn, p))
        out: dict = {}
        for l in range(self.n):
            for s, gi in self._gi_rows[l]:
                for m, nn, p in by_s.get(s, ()):
                    _acc(out, (l, m, nn), self._mul(gi, p, valid))
        full = {}
        for (l, m, nn), p in out.items():
            full[(l, m, nn)] = p
            full[(l, nn, m)] = p
        return TensorField(self.coords, "udd", full, valid)

    @property
    def _gamma_tables(self):
        def build():
            G = self.christoffel
            by_up_low = {}   # (l, m) -> [(n, Gamma^l_{mn})]
            by_low2 = {}     # n -> [(l, m, Gamma^l_{mn})]
            by_up = {}       # l -> [(m, n, Gamma^l_{mn})]
            for (l, m, nn), p in G.items():
                by_up_low.setdefault((l, m), []).append((nn, p))
                by_low2.setdefault(nn, []).append((l, m, p))
                by_up.setdefault(l, []).append((m, nn, p))
            return by_up_low, by_low2, by_up
        return self._cached("gtables", build)

    # -- curvature -------------------------------------------------------------
    @property
    def riemann(self) -> TensorField:
        """``R^r_{s m n}``."""
        return self._cached("riem", self._riemann)

    def _riemann(self) -> TensorField:
        G = self.christoffel
        valid = None if G.valid is None else G.valid - 1
        by_up_low, _, _ = self._gamma_tables
        n = self.n
        z = Polynomial.zero(self.coords)
        dG = {}
        for (r, a, s), p in G.items():
            for mu in range(n):
                q = self._d(p, mu)
                if q:
                    dG[(r, a, s, mu)] = q
        out = {}
        for r in range(n):
            for s in range(n):
                for m in range(n):
                    for nn in range(m + 1, n):
                        acc = z
                        t = dG.get((r, nn, s, m))
                        if t is not None:
                            acc = acc + t
                        t = dG.get((r, m, s, nn))
                        if t is not None:
                            acc = acc - t
                        for l, p in by_up_low.get((r, m), ()):
                            q = G.comps.get((l, nn, s))
                            if q is not None:
                                acc = acc + self._mul(p, q, valid)
                        for l, p in by_up_low.get((r, nn), ()):
                            q = G.comps.get((l, m, s))
                            if q is not None:
                                acc = acc - self._mul(p, q, valid)
                        if valid is not None:
                            acc = acc.truncate(valid)
                        if acc:
                            out[(r, s, m, nn)] = acc
                            out[(r, s, nn, m)] = -acc
        return TensorField(self.coords, "uddd", out, valid)

    @property
    def riemann_down(self) -> TensorField:
        """``R_{a s m n} = g_{a r} R^r_{s m n}``."""
        return self._cached("riem_down", lambda: self.lower(self.riemann, 0))

    @property
    def ricci(self) -> TensorField:
        def build():
            R = self.riemann
            out = {}
            for (r, s, m, nn), p in R.items():
                if r == m:
                    _acc(out, (s, nn), p)
            return TensorField(self.coords, "dd", out, R.valid)
        return self._cached("ricci", build)

    @property
    def scalar(self) -> Polynomial:
        def build():
            Ric = self.ricci
            acc = Polynomial.zero(self.coords)
            for (s, nn), p in Ric.items():
                gi = self._gi.get((s, nn))
                if gi is not None:
                    acc = acc + self._mul(gi, p, Ric.valid)
            return acc
        return self._cached("scalar", build)

    def is_flat(self) -> bool:
        return self.riemann.is_zero()

    # -- index gymnastics ------------------------------------------------------
    def lower(self, T: TensorField, pos: int) -> TensorField:
        if T.variance[pos] != "u":
            raise ValueError(f"index {pos} is already down")
        return self._move(T, pos, self._g_rows, "d")

    def raise_index(self, T: TensorField, pos: int) -> TensorField:
        if T.variance[pos] != "d":
            raise ValueError(f"index {pos} is already up")
        return self._move(T, pos, self._gi_rows, "u")

    def _move(self, T, pos, rows, new) -> TensorField:
        valid = T.valid
        out: dict = {}
        for idx, p in T.items():
            c = idx[pos]
            for a, m in rows[c]:
                key = idx[:pos] + (a,) + idx[pos + 1:]
                _acc(out, key, self._mul(m, p, valid))
        var = T.variance[:pos] + new + T.variance[pos + 1:]
        return TensorField(self.coords, var, out, valid)

    def raise_all(self, T: TensorField) -> TensorField:
        for pos, v in enumerate(T.variance):
            if v == "d":
                T = self.raise_index(T, pos)
        return T

    def contract_full(self, T: TensorField) -> Polynomial:
        """``T_{...} T^{...}`` for an all-down tensor ``T``."""
        if set(T.variance) != {"d"}:
            raise ValueError("contract_full expects an all-down tensor")
        up = self.raise_all(T)
        valid = up.valid
        acc = Polynomial.zero(self.coords)
        for idx, p in T.items():
            q = up.comps.get(idx)
            if q is not None:
                acc = acc + self._mul(p, q, valid)
        return acc

    # -- covariant derivative -------------------------------------------------
    def cov_deriv(self, T: TensorField) -> TensorField:
        G = self.christoffel
        valid = None if T.valid is None else T.valid - 1
        valid = _min_valid(valid, G.valid)
        _, by_low2, by_up = self._gamma_tables
        n = self.n
        out: dict = {}
        for idx, p in T.items():
            for t in range(n):
                _acc(out, idx + (t,), self._d(p, t))
            for pos, kind in enumerate(T.variance):
                c = idx[pos]
                if kind == "d":
                    # - Gamma^c_{t a} T_{..c..} lands on index a
                    for tau, a, gam in by_up.get(c, ()):
                        key = idx[:pos] + (a,) + idx[pos + 1:] + (tau,)
                        _acc(out, key, -self._mul(gam, p, valid))
                else:
                    # + Gamma^a_{t c} T^{..c..}
                    for a, tau, gam in by_low2.get(c, ()):
                        key = idx[:pos] + (a,) + idx[pos + 1:] + (tau,)
                        _acc(out, key, self._mul(gam, p, valid))
        if valid is not None:
            out = {k: q for k, q in ((k, q.truncate(valid)) for k, q in out.items()) if q}
        return TensorField(self.coords, T.variance + "d", out, valid)

    def scalar_field(self, p: Polynomial, valid=None) -> TensorField:
        return TensorField(self.coords, "", {(): p} if p else {}, valid)

    def metric_tensor(self) -> TensorField:
        return TensorField(self.coords, "dd", dict(self._g), self.order)

    # -- invariants ------------------------------------------------------------
    def invariants(self, basis: Sequence[str] = BASIS) -> dict[str, Polynomial]:
        out = {}
        for name in basis:
            if name == "R":
                out[name] = self.scalar
            elif name == "RicSq":
                out[name] = self.contract_full(self.ricci)
            elif name == "RiemSq":
                out[name] = self.contract_full(self.riemann_down)
            elif name == "DRSq":
                R = self.scalar_field(self.scalar, self.ricci.valid)
                out[name] = self.contract_full(self.cov_deriv(R))
            elif name == "DRicSq":
                out[name] = self.contract_full(self.cov_deriv(self.ricci))
            elif name == "DRiemSq":
                out[name] = self.contract_full(self.cov_deriv(self.riemann_down))
            else:
                raise KeyError(f"unknown invariant {name!r}; basis is {BASIS}")
        return out


def geometry(g) -> Geometry:
    return g if isinstance(g, Geometry) else Geometry(g)


def christoffel(g) -> TensorField:
    return geometry(g).christoffel


def riemann(g) -> dict:
    """``{"riemann": R^r_{smn}, "ricci": R_{sn}, "scalar": R}``."""
    geo = geometry(g)
    return {"riemann": geo.riemann, "ricci": geo.ricci, "scalar": geo.scalar}


def cov_deriv(T: TensorField, g) -> TensorField:
    return geometry(g).cov_deriv(T)


def invariants(g, basis: Sequence[str] = BASIS) -> dict[str, Polynomial]:
    """Basis invariants as exact polynomials in the coordinates."""
    return geometry(g).invariants(basis)


def invariants_at(g: FullMetric, point: Mapping, basis: Sequence[str] = BASIS) -> dict:
    """Exact values of the basis invariants at ``point`` via a degree-3 jet.

    Missing coordinates in ``point`` are taken as 0.
    """
    geo = Geometry.at_point(g, point, order=3)
    return {k: v.constant_term() for k, v in geo.invariants(basis).items()}


# -- null forms, Walker and Killing checks --------------------------------------

def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


@dataclass(frozen=True)
class NullForm:
    """``F = du^1 ^ ... ^ du^k`` as a totally antisymmetric tensor."""

    k: int

    def components(self) -> dict[tuple[int, ...], int]:
        # u_i sit at metric indices 0..k-1
        out = {}
        for perm in itertools.permutations(range(self.k)):
            out[tuple(perm)] = _perm_sign(perm)
        return out

    def tensor(self, coords) -> TensorField:
        comps = {idx: Polynomial.constant(coords, s) for idx, s in self.components().items()}
        return TensorField(coords, "d" * self.k, comps)


@dataclass
class NablaFResult:
    nabla_F: TensorField
    constant: bool
    killing_yano: bool
    walker: dict[int, Polynomial] | None

    def walker_form(self, coords) -> str:
        if self.walker is None:
            return "none"
        return " + ".join(f"({p}) d{coords.names[coords.metric_order()[mu]]}"
                          for mu, p in sorted(self.walker.items())) or "0"


def nabla_F(g, k: int | None = None, strict: bool = False) -> NablaFResult:
    """Covariant derivative of the null k-form and the derived flags.

    ``walker`` is ``k_mu`` with ``nabla_mu F = k_mu F`` when such a 1-form
    exists, else ``None`` (or :class:`WalkerInconsistent` with ``strict``).
    """
    geo = geometry(g)
    k = geo.coords.k if k is None else k
    F = NullForm(k).tensor(geo.coords)
    DF = geo.cov_deriv(F)
    constant = DF.is_zero()
    ky = True
    for idx, p in DF.items():
        mu = idx[-1]
        nu = idx[0]
        swapped = (mu,) + idx[1:-1] + (nu,)
        if p + DF[swapped]:
            ky = False
            break
    base = tuple(range(k))
    walker: dict[int, Polynomial] | None = {
        mu: DF.comps[base + (mu,)] for mu in range(geo.n) if base + (mu,) in DF.comps
    }
    # nabla_mu F_I = k_mu F_I for every I; F_I = 0 forces a zero derivative
    if any(idx[:-1] not in F.comps for idx in DF.comps):
        walker = None
    else:
        for fidx, f in F.items():
            s = f.constant_value()
            for mu in range(geo.n):
                if DF[fidx + (mu,)] != walker.get(mu, 0) * s:
                    walker = None
                    break
            if walker is None:
                break
    if walker is None and strict:
        raise WalkerInconsistent("nabla F is not proportional to F")
    return NablaFResult(DF, constant, ky, walker)


def lie_derivative_metric(g: FullMetric, X: Mapping) -> PolyMatrix:
    """``(L_X g)_{mn} = X^a d_a g_{mn} + g_{an} d_m X^a + g_{ma} d_n X^a``.

    ``X`` maps a coordinate name or variable index to its component.
    """
    c = g.coords
    n = g.n
    pos = {var: mu for mu, var in enumerate(g.var_of)}
    comp = {}
    for key, val in X.items():
        var = c.index(key) if isinstance(key, str) else int(key)
        p = val if isinstance(val, Polynomial) else Polynomial.constant(c, val)
        if p:
            comp[pos[var]] = p
    z = Polynomial.zero(c)
    cells = [[z] * n for _ in range(n)]
    dX = {(a, mu): comp[a].diff(g.var_of[mu]) for a in comp for mu in range(n)}
    for m in range(n):
        for nn in range(m, n):
            acc = z
            for a, xa in comp.items():
                acc = acc + xa * g[m, nn].diff(g.var_of[a])
                t = dX[(a, m)]
                if t:
                    acc = acc + g[a, nn] * t
                t = dX[(a, nn)]
                if t:
                    acc = acc + g[m, a] * t
            cells[m][nn] = acc
            cells[nn][m] = acc
    return PolyMatrix(c, cells)


def killing_check(g, X: Mapping) -> bool:
    metric = g.metric if isinstance(g, Geometry) else g
    L = lie_derivative_metric(metric, X)
    return all(not L[i, j] for i in range(metric.n) for j in range(i, metric.n))


def boost_generator(coords, b: Sequence[int], u0: Mapping | None = None) -> dict:
    """``X = sum_i b_i ((u_i - u0_i) d/du_i - v_i d/dv_i)``."""
    X = {}
    for i, bi in enumerate(b, start=1):
        if not bi:
            continue
        u = Polynomial.variable(coords, coords.u(i))
        if u0:
            u = u - to_rational(u0.get(coords.u(i), 0))
        X[coords.u(i)] = u * bi
        X[coords.v(i)] = Polynomial.variable(coords, coords.v(i)) * (-bi)
    return X


def translation(coords, name: str) -> dict:
    return {name: Polynomial.constant(coords, 1)}


def residual_symmetries(geo: Geometry) -> dict[str, int]:
    """Count of nonzero residuals of the algebraic Riemann identities
    (first Bianchi, antisymmetries, pair symmetry) plus Ricci symmetry."""
    Rd = geo.riemann_down
    n = geo.n
    bad = {"antisym_12": 0, "antisym_34": 0, "pair": 0, "bianchi1": 0, "ricci_sym": 0}
    for (a, b, c, d), p in Rd.items():
        if p + Rd[(b, a, c, d)]:
            bad["antisym_12"] += 1
        if p + Rd[(a, b, d, c)]:
            bad["antisym_34"] += 1
        if p != Rd[(c, d, a, b)]:
            bad["pair"] += 1
    for a, b, c, d in itertools.product(range(n), repeat=4):
        if b < c < d and (Rd[(a, b, c, d)] + Rd[(a, c, d, b)] + Rd[(a, d, b, c)]):
            bad["bianchi1"] += 1
    Ric = geo.ricci
    for (a, b), p in Ric.items():
        if p != Ric[(b, a)]:
            bad["ricci_sym"] += 1
    return bad


def bianchi2_residual(geo: Geometry) -> int:
    """Number of nonzero ``R_{ab[cd;e]}`` components."""
    DR = geo.cov_deriv(geo.riemann_down)
    n = geo.n
    bad = 0
    keys = {(a, b) for (a, b, _c, _d, _e) in DR.comps}
    for a, b in keys:
        for c, d, e in itertools.combinations(range(n), 3):
            s = DR[(a, b, c, d, e)] + DR[(a, b, d, e, c)] + DR[(a, b, e, c, d)]
            if s:
                bad += 1
    return bad


def metric_compatibility_residual(geo: Geometry) -> int:
    """Number of nonzero components of ``nabla g``."""
    return len(geo.cov_deriv(geo.metric_tensor()))
