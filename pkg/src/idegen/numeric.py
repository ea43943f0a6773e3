"""Floating-point cross-check of the curvature invariants.

Only metric *values* are used: derivatives up to third order come from
composed fourth-order central differences of exact rational evaluations, and
the curvature algebra is redone with numpy arrays. Nothing here touches the
symbolic connection, so agreement with :mod:`idegen.curvature` is an
independent check.
"""

from __future__ import annotations

import itertools
from typing import Mapping

import numpy as np

from idegen.algebra import to_rational
from idegen.errors import SingularMetricAtPoint
from idegen.metric import FullMetric

# f'(0) ~ (-f(2h) + 8 f(h) - 8 f(-h) + f(-2h)) / (12 h)
_STENCIL = ((2, -1), (1, 8), (-1, -8), (-2, 1))

DEFAULT_STEP = to_rational("1/10000")


class _Sampler:
    def __init__(self, g: FullMetric, point: Mapping, h):
        c = g.coords
        self.g = g
        self.n = g.n
        self.h = to_rational(h)
        base = [to_rational(0)] * c.n
        for key, val in point.items():
            idx = c.index(key) if isinstance(key, str) else int(key)
            base[idx] = to_rational(val)
        self.base = base
        self._cache: dict = {}
        self._entries = [(i, j, p) for i, j, p in g.entries()]

    def values(self, offset: tuple[int, ...]):
        """Exact metric matrix at ``base + h * offset`` (offset per metric index)."""
        hit = self._cache.get(offset)
        if hit is not None:
            return hit
        pt = list(self.base)
        for mu, o in enumerate(offset):
            if o:
                pt[self.g.var_of[mu]] += o * self.h
        point = dict(enumerate(pt))
        M = {}
        for i, j, p in self._entries:
            M[(i, j)] = p.evaluate(point)
        self._cache[offset] = M
        return M

    def derivative(self, axes: tuple[int, ...]) -> np.ndarray:
        """``d_{axes} g`` as an ``n x n`` float array (exact until the final cast)."""
        n = self.n
        acc: dict = {}
        for combo in itertools.product(_STENCIL, repeat=len(axes)):
            offset = [0] * n
            w = 1
            for (step, weight), ax in zip(combo, axes):
                offset[ax] += step
                w *= weight
            for key, val in self.values(tuple(offset)).items():
                acc[key] = acc.get(key, 0) + w * val
        scale = (12 * self.h) ** len(axes)
        out = np.zeros((n, n))
        for (i, j), val in acc.items():
            x = float(val / scale)
            out[i, j] = x
            out[j, i] = x
        return out


def metric_jet(g: FullMetric, point: Mapping, h=DEFAULT_STEP):
    """``(g, dg, d2g, d3g)`` at ``point`` with derivative indices first."""
    s = _Sampler(g, point, h)
    n = s.n
    g0 = s.derivative(())
    dg = np.zeros((n, n, n))
    d2g = np.zeros((n, n, n, n))
    d3g = np.zeros((n, n, n, n, n))
    for a in range(n):
        dg[a] = s.derivative((a,))
    for a, b in itertools.combinations_with_replacement(range(n), 2):
        m = s.derivative((a, b))
        for p in set(itertools.permutations((a, b))):
            d2g[p] = m
    for a, b, c in itertools.combinations_with_replacement(range(n), 3):
        m = s.derivative((a, b, c))
        for p in set(itertools.permutations((a, b, c))):
            d3g[p] = m
    return g0, dg, d2g, d3g


def numeric_oracle(g: FullMetric, point: Mapping, h=DEFAULT_STEP) -> dict[str, float]:
    """The six basis invariants at ``point`` as floats."""
    g0, dg, d2g, d3g = metric_jet(g, point, h)
    if abs(np.linalg.det(g0)) < 1e-12:
        raise SingularMetricAtPoint(f"metric is degenerate at {dict(point)}")
    gi = np.linalg.inv(g0)
    # derivatives of the inverse metric: d_c gi, d_cd gi
    dgi = -np.einsum("ij,cjk,kl->cil", gi, dg, gi)
    d2gi = (-np.einsum("dij,cjk,kl->cdil", dgi, dg, gi)
            - np.einsum("ij,cdjk,kl->cdil", gi, d2g, gi)
            - np.einsum("ij,cjk,dkl->cdil", gi, dg, dgi))

    # first-kind symbols G1[s,m,n] and their derivatives (derivative axes first)
    def first_kind(D):
        # D[..., c, a, b] = d_c g_ab with leading extra derivative axes
        return 0.5 * (np.swapaxes(D, -3, -2)                      # d_m g_sn  -> [s,m,n]
                      + np.moveaxis(D, -3, -1)                    # d_n g_sm
                      - D)                                        # d_s g_mn

    G1 = first_kind(dg)
    dG1 = first_kind(d2g)
    d2G1 = first_kind(d3g)
    Gam = np.einsum("ls,smn->lmn", gi, G1)
    dGam = (np.einsum("cls,smn->clmn", dgi, G1)
            + np.einsum("ls,csmn->clmn", gi, dG1))
    d2Gam = (np.einsum("cdls,smn->cdlmn", d2gi, G1)
             + np.einsum("cls,dsmn->cdlmn", dgi, dG1)
             + np.einsum("dls,csmn->cdlmn", dgi, dG1)
             + np.einsum("ls,cdsmn->cdlmn", gi, d2G1))

    # R^r_{smn} = d_m G^r_{ns} - d_n G^r_{ms} + G^r_{ml} G^l_{ns} - G^r_{nl} G^l_{ms}
    def riem(Gm, dGm):
        t1 = np.einsum("mrns->rsmn", dGm)
        quad = np.einsum("rml,lns->rsmn", Gm, Gm)
        R = t1 + quad
        return R - np.swapaxes(R, 2, 3)

    R = riem(Gam, dGam)
    # d_c R^r_{smn}
    t1 = np.einsum("cmrns->crsmn", d2Gam)
    quad = (np.einsum("crml,lns->crsmn", dGam, Gam)
            + np.einsum("rml,clns->crsmn", Gam, dGam))
    dR = t1 + quad
    dR = dR - np.swapaxes(dR, 3, 4)

    Rd = np.einsum("ar,rsmn->asmn", g0, R)
    dRd = np.einsum("car,rsmn->casmn", dg, R) + np.einsum("ar,crsmn->casmn", g0, dR)
    Ric = np.einsum("rsrn->sn", R)
    dRic = np.einsum("crsrn->csn", dR)
    Rs = np.einsum("sn,sn->", gi, Ric)
    dRs = np.einsum("csn,sn->c", dgi, Ric) + np.einsum("sn,csn->c", gi, dRic)

    # covariant derivatives, derivative index last
    DRiem = np.moveaxis(dRd, 0, -1).copy()
    for pos in range(4):
        # - Gamma^f_{e a_pos} R_{..f..}
        R_f = np.moveaxis(Rd, pos, 0)                  # f first
        corr = np.einsum("fea,f...->a...e", Gam, R_f)  # a first, e last
        DRiem -= np.moveaxis(corr, 0, pos)
    dRic_c = np.moveaxis(dRic, 0, -1)
    DRic = (dRic_c
            - np.einsum("fca,fb->abc", Gam, Ric)
            - np.einsum("fcb,af->abc", Gam, Ric))
    DRs = dRs

    def square(T):
        up = T
        for pos in range(T.ndim):
            up = np.moveaxis(np.tensordot(gi, up, axes=([1], [pos])), 0, pos)
        return float(np.sum(T * up))

    return {
        "R": float(Rs),
        "RicSq": square(Ric),
        "RiemSq": square(Rd),
        "DRSq": square(DRs),
        "DRicSq": square(DRic),
        "DRiemSq": square(DRiem),
    }


def agrees(exact, approx: float, rel: float = 1e-6, abs_tol: float = 1e-8) -> bool:
    x = float(exact)
    return abs(x - approx) <= max(abs_tol, rel * max(abs(x), abs(approx)))
