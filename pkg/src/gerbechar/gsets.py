"""Finite G-sets, their action groupoids and loop groupoids."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import StructuralError, ValidationError
from .groups import FiniteGroup, _split_args, build_group, same_group, subgroup_closure


@dataclass(eq=False)
class GSet:
    """A finite left G-set; ``act[g, i]`` is the point g.i."""

    group: FiniteGroup
    size: int
    act: np.ndarray

    def apply(self, g: int, i: int) -> int:
        return int(self.act[g, i])

    def __repr__(self) -> str:
        return f"GSet(|G|={self.group.order}, size={self.size})"


@dataclass(eq=False)
class LoopGroupoid:
    """Loops (i, x) with x.i = i, sorted lexicographically, plus the
    conjugation-translation action of G on them.

    ``action[g, l]`` is the index of the loop g.(i, x) = (g.i, g x g^-1).
    """

    base: GSet
    loops: list[tuple[int, int]]
    index: dict[tuple[int, int], int]
    action: np.ndarray

    def __len__(self) -> int:
        return len(self.loops)


def same_gset(a: GSet, b: GSet) -> bool:
    return a is b or (
        same_group(a.group, b.group) and a.size == b.size and np.array_equal(a.act, b.act)
    )


def _validated_gset(group: FiniteGroup, act: np.ndarray) -> GSet:
    act = np.asarray(act, dtype=np.int64)
    if act.ndim != 2 or act.shape[0] != group.order:
        raise StructuralError(f"action table must be |G| x size, got {act.shape}")
    size = act.shape[1]
    if size == 0:
        raise StructuralError("empty G-set")
    if act.min() < 0 or act.max() >= size:
        raise StructuralError("action entries out of range")
    if not np.array_equal(act[0], np.arange(size)):
        bad = int(np.nonzero(act[0] != np.arange(size))[0][0])
        raise ValidationError(
            "identity does not act trivially", witness={"axiom": "unit", "i": bad}
        )
    # act[g2, act[g1, i]] == act[g2*g1, i]
    comp = act[:, act]  # (g2, g1, i)
    expect = act[group.mul]  # (g2, g1, i)
    if not np.array_equal(comp, expect):
        g2, g1, i = (int(v[0]) for v in np.nonzero(comp != expect))
        raise ValidationError(
            f"action axiom fails at (g2={g2}, g1={g1}, i={i})",
            witness={"axiom": "compatibility", "g2": g2, "g1": g1, "i": i},
        )
    return GSet(group=group, size=size, act=act)


def trivial_gset(group: FiniteGroup, m: int = 1) -> GSet:
    if m < 1:
        raise StructuralError("trivial G-set needs at least one point")
    act = np.tile(np.arange(m), (group.order, 1))
    return _validated_gset(group, act)


def left_translation_gset(group: FiniteGroup) -> GSet:
    return _validated_gset(group, group.mul.copy())


def conjugation_gset(group: FiniteGroup) -> GSet:
    g = np.arange(group.order)
    act = group.mul[group.mul[g[:, None], g[None, :]], group.inv[g][:, None]]
    return _validated_gset(group, act)


def coset_gset(group: FiniteGroup, generators) -> GSet:
    """Left cosets of the subgroup generated by ``generators``.

    Cosets are ordered by their minimal element, so the identity coset H is
    point 0.
    """
    H = subgroup_closure(group, generators)
    seen: dict[int, int] = {}
    cosets: list[list[int]] = []
    for g in range(group.order):
        if g in seen:
            continue
        coset = sorted(int(group.mul[g, h]) for h in H)
        for c in coset:
            seen[c] = len(cosets)
        cosets.append(coset)
    size = len(cosets)
    act = np.zeros((group.order, size), dtype=np.int64)
    for g in range(group.order):
        for c, coset in enumerate(cosets):
            act[g, c] = seen[int(group.mul[g, coset[0]])]
    return _validated_gset(group, act)


def product_gset(x: GSet, y: GSet) -> GSet:
    """Diagonal action on X x Y; point (i, j) has index i * |Y| + j."""
    if not same_group(x.group, y.group):
        raise StructuralError("product G-set factors must share the group")
    i = np.arange(x.size * y.size) // y.size
    j = np.arange(x.size * y.size) % y.size
    act = x.act[:, i] * y.size + y.act[:, j]
    return _validated_gset(x.group, act)


def build_gset(spec, group: FiniteGroup | None = None) -> GSet:
    """Build a G-set from a spec.

    String specs: ``trivial(<group>, m)``, ``left_translation(<group>)``,
    ``coset(<group>, g1 g2 ...)``, ``conjugation(<group>)``,
    ``product(<gset>, <gset>)``.  Dict specs carry an explicit ``act`` table.
    """
    if isinstance(spec, GSet):
        return spec
    if isinstance(spec, dict):
        g = group if group is not None else build_group(spec["group"])
        return _validated_gset(g, np.asarray(spec["act"]))
    if not isinstance(spec, str):
        raise StructuralError(f"unrecognized gset spec: {spec!r}")
    m = re.fullmatch(r"\s*(\w+)\s*\((.*)\)\s*", spec, flags=re.DOTALL)
    if not m:
        raise StructuralError(f"cannot parse gset spec {spec!r}")
    head, body = m.group(1), m.group(2)
    args = _split_args(body)
    if head == "trivial":
        g = build_group(args[0])
        return trivial_gset(g, int(args[1]) if len(args) > 1 else 1)
    if head == "left_translation":
        return left_translation_gset(build_group(args[0]))
    if head == "conjugation":
        return conjugation_gset(build_group(args[0]))
    if head == "coset":
        g = build_group(args[0])
        gens = [int(t) for t in re.split(r"[\s;]+", args[1].strip()) if t]
        return coset_gset(g, gens)
    if head == "product":
        return product_gset(build_gset(args[0]), build_gset(args[1]))
    raise StructuralError(f"unknown gset constructor {head!r}")


def fixed_points(x: GSet, g: int) -> list[int]:
    """Points i with g.i = i, ascending."""
    return [int(i) for i in np.nonzero(x.act[g] == np.arange(x.size))[0]]


def loop_groupoid(x: GSet) -> LoopGroupoid:
    G = x.group
    loops = [(int(i), int(g)) for i in range(x.size) for g in range(G.order)
             if x.act[g, i] == i]
    index = {lp: n for n, lp in enumerate(loops)}
    action = np.zeros((G.order, len(loops)), dtype=np.int64)
    for n, (i, xg) in enumerate(loops):
        for g in range(G.order):
            action[g, n] = index[(int(x.act[g, i]), G.conj(g, xg))]
    return LoopGroupoid(base=x, loops=loops, index=index, action=action)


def orbits_and_stabilizers(x: GSet) -> tuple[list[list[int]], list[list[int]]]:
    """Orbit partition (ordered by minimal point) and, per orbit, the
    stabilizer of its minimal representative as a sorted element list."""
    orbits: list[list[int]] = []
    stabs: list[list[int]] = []
    seen = np.zeros(x.size, dtype=bool)
    for i in range(x.size):
        if seen[i]:
            continue
        orbit = np.unique(x.act[:, i])
        seen[orbit] = True
        orbits.append([int(p) for p in orbit])
        stabs.append([int(g) for g in np.nonzero(x.act[:, i] == i)[0]])
    return orbits, stabs
