"""The geometric character: push-forward of the transgression to the group.

All matrices are expressed in localized orthonormal bases: the fixed points
of x are listed in ascending order and the basis vector over i carries the
normalization 1/sqrt(k_i).  In these coordinates the push-forward action is a
permutation-phase matrix built from the transgression, the matrix elements of
a kernel are conjugated traces, and nothing depends on the metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .bundles import EquivBundle, Kernel, hom_dimension, make_bundle
from .errors import StructuralError, ValidationError
from .gerbes import Gerbe, same_gerbe, tensor_gerbes, trivial_gerbe
from .gsets import conjugation_gset, fixed_points
from .groups import FiniteGroup
from .transgression import FlatSection, check_flat, transgress

EQUIVARIANCE_TOL = 1e-9


@dataclass(eq=False)
class LocalizedBasis:
    """Ordered fixed points of x together with the 1/sqrt(k_i) scalings."""

    x: int
    points: list[int]
    norms: list[float]


def localized_basis(gerbe: Gerbe, x: int) -> LocalizedBasis:
    pts = fixed_points(gerbe.gset, x)
    return LocalizedBasis(
        x=x, points=pts, norms=[1.0 / sqrt(float(gerbe.metric[i])) for i in pts]
    )


def conjugation_gerbe(G: FiniteGroup) -> Gerbe:
    """The base gerbe of Hilb_G(G): conjugation action, metric 1, trivial cocycle."""
    return trivial_gerbe(conjugation_gset(G))


def push_forward(x: Gerbe) -> EquivBundle:
    """ch of the gerbe: fibers are sections over the fixed points, the action
    permutes fixed points with transgression phases."""
    G = x.group
    T = transgress(x)
    fixes = [fixed_points(x.gset, g) for g in range(G.order)]
    pos = [{p: n for n, p in enumerate(f)} for f in fixes]
    dims = tuple(len(f) for f in fixes)
    maps = {}
    for g in range(G.order):
        for xg in range(G.order):
            cxg = G.conj(g, xg)
            m = np.zeros((dims[cxg], dims[xg]), dtype=complex)
            for n, i in enumerate(fixes[xg]):
                gi = x.gset.apply(g, i)
                m[pos[cxg][gi], n] = T.phase(g, T.loops.index[(i, xg)])
            maps[(g, xg)] = m
    return make_bundle(conjugation_gerbe(G), dims, maps)


def two_character_action(x: Gerbe, g: int, xg: int, rng=None) -> np.ndarray:
    """The 2-character's equivariant map at (g, x) in localized coordinates,
    computed by conjugating loop arrows inside the gerbe.

    The conjugating arrow over g may be given a random phase (it cancels);
    pass a numpy Generator to exercise that independence.
    """
    G = x.group
    fix_src = fixed_points(x.gset, xg)
    cxg = G.conj(g, xg)
    fix_dst = fixed_points(x.gset, cxg)
    pos = {p: n for n, p in enumerate(fix_dst)}
    m = np.zeros((len(fix_dst), len(fix_src)), dtype=complex)
    for n, i in enumerate(fix_src):
        phase = 1.0 + 0.0j
        if rng is not None:
            phase = np.exp(2j * np.pi * rng.random())
        v = x.section_arrow(i, g, phase)
        u = x.section_arrow(i, xg)
        t = x.compose(v, x.compose(u, x.invert(v)))
        m[pos[x.gset.apply(g, i)], n] = t.phase
    return m


def ch_on_morphism(K: Kernel) -> dict[int, np.ndarray]:
    """Matrices of ch(E) for a kernel E: source -> target.

    At each x the entry (mu, i), for mu in Fix_{target}(x) and i in
    Fix_{source}(x), is conj(Tr E(x; (mu, i))).
    """
    G = K.target.group
    nsrc = K.source.gset.size
    out = {}
    for xg in range(G.order):
        fix_t = fixed_points(K.target.gset, xg)
        fix_s = fixed_points(K.source.gset, xg)
        m = np.zeros((len(fix_t), len(fix_s)), dtype=complex)
        for a, mu in enumerate(fix_t):
            for b, i in enumerate(fix_s):
                blk = K.bundle.maps[(xg, mu * nsrc + i)]
                if blk.shape[0] == blk.shape[1] and blk.size:
                    m[a, b] = np.trace(blk).conjugate()
        out[xg] = m
    return out


def hat_map(xi: FlatSection, target: Gerbe, source: Gerbe) -> dict[int, np.ndarray]:
    """Rearrange a flat section of the kernel gerbe's transgression into an
    equivariant family of matrices ch(target)_x <- ch(source)_x."""
    kg = tensor_gerbes(target, source)
    if not same_gerbe(xi.bundle.gerbe, kg):
        raise StructuralError("section does not live over the kernel gerbe")
    bad = check_flat(xi.bundle, xi.values)
    if bad is not None:
        g, loop, dev = bad
        raise ValidationError(
            f"section is not flat at (g={g}, loop={loop}), deviation {dev:.2e}",
            witness={"g": g, "loop": loop, "deviation": dev},
        )
    nsrc = source.gset.size
    idx = xi.bundle.loops.index
    G = target.group
    out = {}
    for xg in range(G.order):
        fix_t = fixed_points(target.gset, xg)
        fix_s = fixed_points(source.gset, xg)
        m = np.zeros((len(fix_t), len(fix_s)), dtype=complex)
        for a, mu in enumerate(fix_t):
            for b, i in enumerate(fix_s):
                m[a, b] = xi.values[idx[(mu * nsrc + i, xg)]]
        out[xg] = m
    return out


def end_count_formula(x: Gerbe) -> tuple[Fraction, complex]:
    """Plain and transgression-weighted endomorphism counts.

    plain    = (1/|G|) #{(i, j, g, h) : gh = hg, both fix i and j}
    weighted = (1/|G|) sum over the same tuples of tau_{X (x) conj X}(h; (i,j), g)

    The weighted sum equals the flat-section dimension of the kernel gerbe's
    transgression; the plain count drops the phases and agrees with it for
    trivial cocycles.
    """
    G = x.group
    n = x.gset.size
    kg = tensor_gerbes(x, x)
    T = transgress(kg)
    idx = T.loops.index
    phases = T.phases()
    fixes = [fixed_points(x.gset, g) for g in range(G.order)]
    count = 0
    weighted = 0.0 + 0.0j
    for g in range(G.order):
        for h in range(G.order):
            if G.op(g, h) != G.op(h, g):
                continue
            common = sorted(set(fixes[g]) & set(fixes[h]))
            count += len(common) ** 2
            for i in common:
                for j in common:
                    weighted += phases[h, idx[(i * n + j, g)]]
    return Fraction(count, G.order), complex(weighted / G.order)


def homG_dimension(A: EquivBundle, B: EquivBundle) -> int:
    """Intertwiner dimension in Hilb_G(G); delegates to the bundle hom solver."""
    for M in (A, B):
        if not M.gerbe.cocycle.is_trivial():
            raise StructuralError("group bundles must carry the trivial cocycle")
    return hom_dimension(A, B)
