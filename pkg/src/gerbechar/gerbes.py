"""Finite equivariant gerbes with metrics, in section coordinates.

A gerbe is stored as (G-set, invariant metric, normalized 2-cocycle); the
groupoid of arrows is never materialized.  Arrows are manipulated through the
twisted composition law carried by the cocycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .cocycles import (
    Cochain1,
    Cocycle2,
    coboundary_of,
    is_cohomologous,
    lift_to,
    pullback,
    tensor_conjugate,
    trivial_cocycle,
    validate_cocycle,
)
from .errors import ResourceError, StructuralError, ValidationError
from .groups import FiniteGroup, same_group
from .gsets import GSet, orbits_and_stabilizers, product_gset, same_gset

EQUIV_SEARCH_LIMIT = 10**6


@dataclass(frozen=True)
class GerbeArrow:
    """An arrow source -> label.source in section coordinates.

    ``phase`` multiplies the section arrow s(label; source); the target is
    always derived from the action, never stored.
    """

    source: int
    label: int
    phase: complex = 1.0 + 0.0j


@dataclass(eq=False)
class Gerbe:
    gset: GSet
    metric: tuple
    cocycle: Cocycle2

    @property
    def group(self) -> FiniteGroup:
        return self.gset.group

    @property
    def N(self) -> int:
        return self.cocycle.N

    def target(self, v: GerbeArrow) -> int:
        return int(self.gset.act[v.label, v.source])

    def identity_arrow(self, i: int) -> GerbeArrow:
        return GerbeArrow(source=i, label=0, phase=1.0 + 0.0j)

    def section_arrow(self, i: int, g: int, phase: complex = 1.0 + 0.0j) -> GerbeArrow:
        return GerbeArrow(source=i, label=g, phase=phase)

    def compose(self, v2: GerbeArrow, v1: GerbeArrow) -> GerbeArrow:
        """v2 after v1; picks up the cocycle phase phi_{v1.source}(g2, g1)."""
        if v2.source != self.target(v1):
            raise StructuralError(
                f"arrows do not compose: v2 starts at {v2.source}, "
                f"v1 ends at {self.target(v1)}"
            )
        phase = v2.phase * v1.phase * self.cocycle.phase(v1.source, v2.label, v1.label)
        return GerbeArrow(v1.source, int(self.group.mul[v2.label, v1.label]), phase)

    def invert(self, v: GerbeArrow) -> GerbeArrow:
        """Two-sided inverse for the twisted composition law."""
        ginv = self.group.inverse(v.label)
        phase = 1.0 / (v.phase * self.cocycle.phase(v.source, ginv, v.label))
        return GerbeArrow(self.target(v), ginv, phase)

    # exact exponent-form arrows (source, label, k) with phase zeta_N^k,
    # for code paths that must stay in integer arithmetic

    def compose_exp(self, v2: tuple[int, int, int], v1: tuple[int, int, int]) -> tuple[int, int, int]:
        s2, g2, k2 = v2
        s1, g1, k1 = v1
        if s2 != self.gset.apply(g1, s1):
            raise StructuralError("exponent arrows do not compose")
        k = (k2 + k1 + int(self.cocycle.exp[s1, g2, g1])) % self.N
        return (s1, int(self.group.mul[g2, g1]), k)

    def invert_exp(self, v: tuple[int, int, int]) -> tuple[int, int, int]:
        s, g, k = v
        ginv = self.group.inverse(g)
        kk = (-k - int(self.cocycle.exp[s, ginv, g])) % self.N
        return (self.gset.apply(g, s), ginv, kk)


def _normalize_metric(gset: GSet, metric) -> tuple:
    if metric is None:
        return tuple(Fraction(1) for _ in range(gset.size))
    if isinstance(metric, (int, Fraction)):
        return tuple(Fraction(metric) for _ in range(gset.size))
    if isinstance(metric, float):
        return tuple(float(metric) for _ in range(gset.size))
    out = []
    for k in metric:
        if isinstance(k, (int, Fraction)):
            out.append(Fraction(k))
        elif isinstance(k, float):
            out.append(k)
        else:
            raise StructuralError(f"metric entries must be numbers, got {k!r}")
    if len(out) != gset.size:
        raise StructuralError("metric length does not match the G-set")
    return tuple(out)


def validate_gerbe(x: Gerbe) -> None:
    for k in x.metric:
        if not k > 0:
            raise ValidationError("metric entries must be positive", witness={"k": str(k)})
    for g in range(x.group.order):
        for i in range(x.gset.size):
            j = x.gset.apply(g, i)
            if x.metric[j] != x.metric[i]:
                raise ValidationError(
                    f"metric not G-invariant at (g={g}, i={i})",
                    witness={"g": g, "i": i},
                )
    if not same_gset(x.cocycle.gset, x.gset):
        raise StructuralError("cocycle lives on a different G-set")
    validate_cocycle(x.cocycle)


def make_gerbe(gset: GSet, metric=None, cocycle: Cocycle2 | None = None) -> Gerbe:
    if cocycle is None:
        cocycle = trivial_cocycle(gset)
    x = Gerbe(gset=gset, metric=_normalize_metric(gset, metric), cocycle=cocycle)
    validate_gerbe(x)
    return x


def trivial_gerbe(gset: GSet, metric=None, N: int = 1) -> Gerbe:
    return make_gerbe(gset, metric, trivial_cocycle(gset, N))


def with_metric(x: Gerbe, metric) -> Gerbe:
    return make_gerbe(x.gset, metric, x.cocycle)


def twist_by(x: Gerbe, lam: Cochain1) -> Gerbe:
    """Re-section the gerbe: replace the cocycle by cocycle + delta(lambda)."""
    if not same_gset(lam.gset, x.gset):
        raise StructuralError("cochain lives on a different G-set")
    N = lcm(x.N, lam.N)
    d = coboundary_of(Cochain1(lam.gset, N, (lam.exp * (N // lam.N)) % N))
    phi = lift_to(x.cocycle, N)
    return make_gerbe(x.gset, x.metric, Cocycle2(x.gset, N, (phi.exp + d.exp) % N))


def conjugate_gerbe(x: Gerbe) -> Gerbe:
    """Same underlying groupoid with the conjugate U(1)-action: exponents negate."""
    return Gerbe(
        gset=x.gset,
        metric=x.metric,
        cocycle=Cocycle2(x.gset, x.N, (-x.cocycle.exp) % x.N),
    )


def tensor_gerbes(target: Gerbe, source: Gerbe) -> Gerbe:
    """The kernel gerbe target (x) conjugate(source) over the diagonal product.

    Point (mu, i) has index mu * |X_source| + i; the metric is the product
    metric and the cocycle exponent is exp_target[mu] - exp_source[i].
    """
    if not same_group(target.group, source.group):
        raise StructuralError("gerbes have different groups")
    prod = product_gset(target.gset, source.gset)
    phi = tensor_conjugate(target.cocycle, source.cocycle, prod)
    ns = source.gset.size
    metric = tuple(
        target.metric[p // ns] * source.metric[p % ns] for p in range(prod.size)
    )
    return make_gerbe(prod, metric, phi)


def restrict_gerbe(x: Gerbe, points) -> Gerbe:
    """Restriction to an action-closed subset of points (reindexed in order)."""
    points = sorted(int(p) for p in points)
    where = {p: n for n, p in enumerate(points)}
    act = np.zeros((x.group.order, len(points)), dtype=np.int64)
    for g in range(x.group.order):
        for n, p in enumerate(points):
            q = x.gset.apply(g, p)
            if q not in where:
                raise StructuralError(
                    f"point set is not closed under the action: {g}.{p} = {q}"
                )
            act[g, n] = where[q]
    sub = GSet(group=x.group, size=len(points), act=act)
    exp = x.cocycle.exp[points].copy()
    return make_gerbe(sub, tuple(x.metric[p] for p in points), Cocycle2(sub, x.N, exp))


def same_gerbe(a: Gerbe, b: Gerbe) -> bool:
    return a is b or (
        same_gset(a.gset, b.gset)
        and a.metric == b.metric
        and a.N == b.N
        and np.array_equal(a.cocycle.exp % a.N, b.cocycle.exp % b.N)
    )


def equivalence_check(a: Gerbe, b: Gerbe):
    """Search for (f, lambda) with f a metric-preserving G-set isomorphism
    and delta(lambda) = f*(phi_b) - phi_a; None if no pair exists.

    Candidate isomorphisms are enumerated orbit by orbit (orbits matched on
    exact stabilizer and metric), in canonical order, so the returned witness
    is deterministic.
    """
    if not same_group(a.group, b.group):
        raise StructuralError("gerbes have different groups")
    if a.gset.size != b.gset.size:
        return None
    orbits_a, stabs_a = orbits_and_stabilizers(a.gset)
    orbits_b, stabs_b = orbits_and_stabilizers(b.gset)
    if len(orbits_a) != len(orbits_b):
        return None

    # candidate image points for each orbit representative of a
    candidates: list[list[tuple[int, int]]] = []  # (orbit index in b, point)
    total = 1
    for orb, stab in zip(orbits_a, stabs_a):
        rep = orb[0]
        cand = []
        for ob, (orb_b, stab_b) in enumerate(zip(orbits_b, stabs_b)):
            if len(orb_b) != len(orb):
                continue
            for p in orb_b:
                if b.metric[p] != a.metric[rep]:
                    continue
                stab_p = [int(g) for g in np.nonzero(b.gset.act[:, p] == p)[0]]
                if stab_p == stab:
                    cand.append((ob, p))
        if not cand:
            return None
        candidates.append(cand)
        total *= len(cand)
        if total > EQUIV_SEARCH_LIMIT:
            raise ResourceError(
                f"equivalence search space exceeds {EQUIV_SEARCH_LIMIT} candidate maps; "
                "decompose into orbits first"
            )

    n_orbits = len(orbits_a)
    f = np.full(a.gset.size, -1, dtype=np.int64)

    def assemble(level: int, used: set[int]):
        if level == n_orbits:
            try:
                phi = pullback(b.cocycle, f, a.gset)
            except StructuralError:
                return None
            lam = is_cohomologous(a.cocycle, phi)
            if lam is not None:
                return (f.copy(), lam)
            return None
        rep = orbits_a[level][0]
        for ob, p in candidates[level]:
            if ob in used:
                continue
            for g in range(a.group.order):
                f[a.gset.apply(g, rep)] = b.gset.apply(g, p)
            found = assemble(level + 1, used | {ob})
            if found is not None:
                return found
        return None

    return assemble(0, set())


# --- ingestion from exact sequences with abelian kernel ---------------------


def _k_strides(factors: list[int]) -> list[int]:
    strides = [1] * len(factors)
    for j in range(len(factors) - 2, -1, -1):
        strides[j] = strides[j + 1] * factors[j + 1]
    return strides


def k_index(tup, factors: list[int]) -> int:
    strides = _k_strides(factors)
    return sum((int(t) % m) * s for t, m, s in zip(tup, factors, strides))


def k_tuple(idx: int, factors: list[int]) -> tuple[int, ...]:
    out = []
    for s, m in zip(_k_strides(factors), factors):
        out.append((idx // s) % m)
    return tuple(out)


def k_add(i: int, j: int, factors: list[int]) -> int:
    a, b = k_tuple(i, factors), k_tuple(j, factors)
    return k_index([x + y for x, y in zip(a, b)], factors)


def from_abelian_extension(G: FiniteGroup, cyclic_factors, action, phi_K) -> Gerbe:
    """Gerbe of the 2-representation carried by an extension K -> E -> G.

    K is abelian, given as a product of cyclic factors; ``action[g][k]`` is
    the (weak) action of G on K by indices; ``phi_K[g2][g1]`` is the K-valued
    extension 2-cocycle.  The result lives over the character set of K with
    the dual action, metric 1, and cocycle chi(phi_K(g1^-1, g2^-1)) at the
    point chi, with N the exponent of K.
    """
    factors = [int(m) for m in cyclic_factors]
    if not factors or any(m < 1 for m in factors):
        raise StructuralError("K must be a nonempty product of cyclic factors")
    sizeK = int(np.prod(factors))
    N = lcm(*factors)
    action = np.asarray(action, dtype=np.int64)
    phi_K = np.asarray(phi_K, dtype=np.int64)
    n = G.order
    if action.shape != (n, sizeK):
        raise StructuralError(f"action table must be |G| x |K|, got {action.shape}")
    if phi_K.shape != (n, n):
        raise StructuralError(f"phi_K must be |G| x |G|, got {phi_K.shape}")
    if action.min() < 0 or action.max() >= sizeK or phi_K.min() < 0 or phi_K.max() >= sizeK:
        raise StructuralError("extension table entries out of range")

    # each action row must be an additive automorphism, and the rows must
    # compose like G (the kernel is abelian, so the weak action is genuine)
    add = np.zeros((sizeK, sizeK), dtype=np.int64)
    for i in range(sizeK):
        for j in range(sizeK):
            add[i, j] = k_add(i, j, factors)
    if not np.array_equal(action[0], np.arange(sizeK)):
        raise ValidationError("identity must act trivially on K", witness={"g": 0})
    for g in range(n):
        row = action[g]
        if not np.array_equal(np.sort(row), np.arange(sizeK)):
            raise ValidationError(f"action of g={g} is not a bijection of K", witness={"g": g})
        if not np.array_equal(row[add], add[np.ix_(row, row)]):
            bad = np.nonzero(row[add] != add[np.ix_(row, row)])
            raise ValidationError(
                f"action of g={g} is not an automorphism of K",
                witness={"g": g, "k1": int(bad[0][0]), "k2": int(bad[1][0])},
            )
    comp = action[:, action]  # (g2, g1, k)
    if not np.array_equal(comp, action[G.mul]):
        g2, g1, k = (int(v[0]) for v in np.nonzero(comp != action[G.mul]))
        raise ValidationError(
            f"action rows do not compose like G at (g2={g2}, g1={g1}, k={k})",
            witness={"g2": g2, "g1": g1, "k": k},
        )

    if np.any(phi_K[0, :]) or np.any(phi_K[:, 0]):
        raise ValidationError("phi_K must be normalized: phi_K(e,.) = phi_K(.,e) = 0")
    # twisted cocycle identity: phi(a,b) + phi(ab,c) = a.phi(b,c) + phi(a,bc)
    for a in range(n):
        for bb in range(n):
            for c in range(n):
                left = k_add(int(phi_K[a, bb]), int(phi_K[G.op(a, bb), c]), factors)
                right = k_add(int(action[a, phi_K[bb, c]]), int(phi_K[a, G.op(bb, c)]), factors)
                if left != right:
                    raise ValidationError(
                        f"phi_K cocycle identity fails at (a={a}, b={bb}, c={c})",
                        witness={"a": a, "b": bb, "c": c},
                    )

    # characters of K, enumerated lexicographically by exponent tuple; the
    # character with exponents c evaluates on k as zeta_N^(sum c_j k_j N/m_j)
    weights = [N // m for m in factors]

    def chi_exp(c_idx: int, k_idx: int) -> int:
        c, k = k_tuple(c_idx, factors), k_tuple(k_idx, factors)
        return sum(cj * kj * w for cj, kj, w in zip(c, k, weights)) % N

    # dual action: (g.chi)(k) = chi(g^-1 . k)
    act_hat = np.zeros((n, sizeK), dtype=np.int64)
    strides = _k_strides(factors)
    for g in range(n):
        ginv = G.inverse(g)
        for c_idx in range(sizeK):
            cp = []
            for j, (m, s) in enumerate(zip(factors, strides)):
                basis = s  # index of the j-th basis vector e_j
                w = chi_exp(c_idx, int(action[ginv, basis]))
                if w % (N // m):
                    raise AssertionError("dual action left the character lattice")
                cp.append((w // (N // m)) % m)
            act_hat[g, c_idx] = k_index(cp, factors)
    dual = GSet(group=G, size=sizeK, act=act_hat)

    exp = np.zeros((sizeK, n, n), dtype=np.int64)
    for c_idx in range(sizeK):
        for g2 in range(n):
            for g1 in range(n):
                kk = int(phi_K[G.inverse(g1), G.inverse(g2)])
                exp[c_idx, g2, g1] = chi_exp(c_idx, kk)
    return make_gerbe(dual, None, Cocycle2(dual, N, exp))
