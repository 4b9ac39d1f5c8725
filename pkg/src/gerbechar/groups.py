"""Finite groups as dense multiplication tables.

Elements are indices 0..order-1 with the identity pinned at index 0; all
downstream modules rely on that convention for O(1) lookups.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import StructuralError, ValidationError

# Above this order the associativity check samples random triples instead of
# enumerating all of them.
EXHAUSTIVE_ORDER_LIMIT = 64
ASSOCIATIVITY_SAMPLES = 10_000


@dataclass(eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``mul[a, b]`` is the index of the product a*b, ``inv[a]`` the inverse of
    a, and the identity sits at index 0.  Instances are immutable after
    construction and safe to share between threads.
    """

    order: int
    mul: np.ndarray
    inv: np.ndarray
    labels: tuple[str, ...] | None = None
    identity: int = field(default=0)

    def op(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return int(self.mul[self.mul[g, x], self.inv[g]])

    def elements(self) -> range:
        return range(self.order)

    def label(self, a: int) -> str:
        if self.labels is not None:
            return self.labels[a]
        return str(a)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


def same_group(a: FiniteGroup, b: FiniteGroup) -> bool:
    return a is b or (a.order == b.order and np.array_equal(a.mul, b.mul))


def _find_identity(mul: np.ndarray) -> int | None:
    n = mul.shape[0]
    for e in range(n):
        if np.array_equal(mul[e], np.arange(n)) and np.array_equal(mul[:, e], np.arange(n)):
            return e
    return None


def _validated(mul: np.ndarray, labels: tuple[str, ...] | None = None) -> FiniteGroup:
    """Check the group axioms and normalize the identity to index 0."""
    mul = np.asarray(mul, dtype=np.int64)
    n = mul.shape[0]
    if mul.ndim != 2 or mul.shape != (n, n):
        raise StructuralError(f"multiplication table must be square, got {mul.shape}")
    if n == 0:
        raise StructuralError("empty multiplication table")
    if mul.min() < 0 or mul.max() >= n:
        raise StructuralError("table entries out of range")

    e = _find_identity(mul)
    if e is None:
        raise ValidationError("no two-sided identity element", witness={"axiom": "identity"})
    if e != 0:
        # relabel so the identity becomes index 0
        perm = np.arange(n)
        perm[0], perm[e] = e, 0
        inv_perm = perm  # swaps are involutions
        mul = inv_perm[mul[np.ix_(perm, perm)]]
        if labels is not None:
            labels = tuple(labels[perm[i]] for i in range(n))

    inv = np.full(n, -1, dtype=np.int64)
    for g in range(n):
        hs = np.nonzero(mul[g] == 0)[0]
        if len(hs) != 1 or mul[hs[0], g] != 0:
            raise ValidationError(
                f"element {g} has no two-sided inverse",
                witness={"axiom": "inverse", "g": g},
            )
        inv[g] = hs[0]

    if n <= EXHAUSTIVE_ORDER_LIMIT:
        a, b, c = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        bad = np.nonzero(mul[mul[a, b], c] != mul[a, mul[b, c]])
        if bad[0].size:
            i, j, k = (int(x[0]) for x in bad)
            raise ValidationError(
                f"associativity fails at ({i}, {j}, {k})",
                witness={"axiom": "associativity", "triple": [i, j, k]},
            )
    else:
        rng = np.random.default_rng(12345)
        trip = rng.integers(0, n, size=(ASSOCIATIVITY_SAMPLES, 3))
        a, b, c = trip[:, 0], trip[:, 1], trip[:, 2]
        bad = np.nonzero(mul[mul[a, b], c] != mul[a, mul[b, c]])[0]
        if bad.size:
            k = int(bad[0])
            raise ValidationError(
                f"associativity fails at sampled triple {trip[k].tolist()}",
                witness={"axiom": "associativity", "triple": trip[k].tolist()},
            )

    return FiniteGroup(order=n, mul=mul, inv=inv, labels=labels)


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise StructuralError("cyclic order must be positive")
    idx = np.arange(n)
    mul = (idx[:, None] + idx[None, :]) % n
    return _validated(mul, tuple(str(i) for i in range(n)))


def dihedral_group(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; index a + n*b encodes r^a s^b."""
    if n < 1:
        raise StructuralError("dihedral parameter must be positive")
    order = 2 * n
    mul = np.zeros((order, order), dtype=np.int64)
    for a in range(n):
        for b in range(2):
            for a2 in range(n):
                for b2 in range(2):
                    # r^a s^b * r^a2 s^b2 = r^(a + (-1)^b a2) s^(b+b2)
                    ra = (a + (a2 if b == 0 else -a2)) % n
                    mul[a + n * b, a2 + n * b2] = ra + n * ((b + b2) % 2)
    labels = tuple(f"r{a}" for a in range(n)) + tuple(f"r{a}s" for a in range(n))
    return _validated(mul, labels)


def symmetric_group(n: int) -> FiniteGroup:
    """S_n for n <= 5, elements in lexicographic one-line order."""
    if not 1 <= n <= 5:
        raise StructuralError("symmetric(n) supports 1 <= n <= 5")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    order = len(perms)
    mul = np.zeros((order, order), dtype=np.int64)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            # left-action composition: (p*q)(x) = p(q(x))
            mul[i, j] = index[tuple(p[q[x]] for x in range(n))]
    labels = tuple("".join(map(str, p)) for p in perms)
    return _validated(mul, labels)


def product_group(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Direct product; index packs as ia * |B| + ib."""
    na, nb = a.order, b.order
    ia = np.arange(na * nb) // nb
    ib = np.arange(na * nb) % nb
    mul = a.mul[np.ix_(ia, ia)] * nb + b.mul[np.ix_(ib, ib)]
    labels = None
    if a.labels is not None and b.labels is not None:
        labels = tuple(f"({a.labels[int(i)]},{b.labels[int(j)]})" for i, j in zip(ia, ib))
    return _validated(mul, labels)


def table_group(rows, labels=None) -> FiniteGroup:
    return _validated(np.asarray(rows), tuple(labels) if labels else None)


def _split_args(s: str) -> list[str]:
    """Split a comma-separated argument list at depth zero."""
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur).strip())
    return parts


def build_group(spec) -> FiniteGroup:
    """Build a group from a spec.

    Accepted specs: ``cyclic(n)``, ``dihedral(n)``, ``symmetric(n)``,
    ``product(spec, spec)``, ``table(...)`` as a dict ``{"table": rows}``,
    or a raw list of rows.
    """
    if isinstance(spec, FiniteGroup):
        return spec
    if isinstance(spec, dict):
        if "table" in spec:
            return table_group(spec["table"], spec.get("labels"))
        if "mul" in spec:
            return table_group(spec["mul"], spec.get("labels"))
        raise StructuralError(f"unrecognized group spec keys: {sorted(spec)}")
    if isinstance(spec, (list, np.ndarray)):
        return table_group(spec)
    if not isinstance(spec, str):
        raise StructuralError(f"unrecognized group spec: {spec!r}")

    m = re.fullmatch(r"\s*(\w+)\s*\((.*)\)\s*", spec, flags=re.DOTALL)
    if not m:
        raise StructuralError(f"cannot parse group spec {spec!r}")
    head, body = m.group(1), m.group(2)
    if head == "cyclic":
        return cyclic_group(int(body))
    if head == "dihedral":
        return dihedral_group(int(body))
    if head == "symmetric":
        return symmetric_group(int(body))
    if head == "product":
        args = _split_args(body)
        if len(args) != 2:
            raise StructuralError("product(spec, spec) takes two arguments")
        return product_group(build_group(args[0]), build_group(args[1]))
    raise StructuralError(f"unknown group constructor {head!r}")


def conjugacy_data(G: FiniteGroup) -> tuple[list[list[int]], int]:
    """Conjugacy classes (each sorted, ordered by minimum) and the number of
    commuting ordered pairs, which equals |G| * #classes."""
    seen = np.zeros(G.order, dtype=bool)
    classes = []
    for g in range(G.order):
        if seen[g]:
            continue
        cls = np.unique(G.mul[G.mul[:, g], G.inv[np.arange(G.order)]])
        seen[cls] = True
        classes.append([int(x) for x in cls])
    commuting = int(np.count_nonzero(G.mul == G.mul.T))
    return classes, commuting


def subgroup_closure(G: FiniteGroup, generators) -> list[int]:
    """Smallest subgroup containing the generators, as a sorted element list."""
    members = {0}
    frontier = [0]
    gens = [int(g) for g in generators]
    for g in gens:
        if not 0 <= g < G.order:
            raise StructuralError(f"generator {g} out of range")
    members.update(gens)
    frontier = list(members)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(members):
                for c in (G.op(a, b), G.op(b, a)):
                    if c not in members:
                        members.add(c)
                        nxt.append(c)
        frontier = nxt
    return sorted(members)


def generating_set(G: FiniteGroup) -> list[int]:
    """A small (not necessarily minimal) generating set, found greedily."""
    gens: list[int] = []
    closure = {0}
    for g in range(1, G.order):
        if g not in closure:
            gens.append(g)
            closure = set(subgroup_closure(G, gens))
            if len(closure) == G.order:
                break
    return gens
