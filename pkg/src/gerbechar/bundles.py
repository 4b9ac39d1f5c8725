"""Twisted unitary equivariant vector bundles over gerbes.

A bundle assigns a fiber dimension to every point and a unitary to every
arrow of the action groupoid, composing up to the gerbe's cocycle phase.
Zero-dimensional fibers are first class: empty matrices compose as expected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceError, StructuralError, ValidationError
from .gerbes import Gerbe, same_gerbe, tensor_gerbes
from .groups import generating_set

UNITARITY_TOL = 1e-9
RANK_TOL = 1e-7
CENTER_SIZE_LIMIT = 4096


@dataclass(eq=False)
class EquivBundle:
    """maps[(g, i)] is the d_{g.i} x d_i unitary over the arrow i -> g.i."""

    gerbe: Gerbe
    dims: tuple[int, ...]
    maps: dict[tuple[int, int], np.ndarray]

    @property
    def group(self):
        return self.gerbe.group

    def map(self, g: int, i: int) -> np.ndarray:
        return self.maps[(g, i)]

    def total_rank(self) -> int:
        return sum(self.dims)


def _empty_maps(gerbe: Gerbe, dims) -> dict:
    maps = {}
    for g in range(gerbe.group.order):
        for i in range(gerbe.gset.size):
            j = gerbe.gset.apply(g, i)
            maps[(g, i)] = np.zeros((dims[j], dims[i]), dtype=complex)
    return maps


def make_bundle(gerbe: Gerbe, dims, maps) -> EquivBundle:
    dims = tuple(int(d) for d in dims)
    if len(dims) != gerbe.gset.size or any(d < 0 for d in dims):
        raise StructuralError("dims must list one nonnegative integer per point")
    full = {}
    for g in range(gerbe.group.order):
        for i in range(gerbe.gset.size):
            j = gerbe.gset.apply(g, i)
            m = maps.get((g, i))
            if m is None:
                if dims[i] == 0 or dims[j] == 0:
                    m = np.zeros((dims[j], dims[i]), dtype=complex)
                else:
                    raise StructuralError(f"missing map for arrow (g={g}, i={i})")
            m = np.asarray(m, dtype=complex)
            if m.shape != (dims[j], dims[i]):
                raise StructuralError(
                    f"map (g={g}, i={i}) has shape {m.shape}, expected {(dims[j], dims[i])}"
                )
            full[(g, i)] = m
    E = EquivBundle(gerbe=gerbe, dims=dims, maps=full)
    validate_bundle(E)
    return E


def validate_bundle(E: EquivBundle) -> None:
    """Unit, unitarity, and twisted functoriality, all within 1e-9.

    Raises ValidationError naming the first violated invariant, the arrow
    or triple where it fails, and the maximum deviation there.
    """
    x = E.gerbe
    G = x.group
    for i in range(x.gset.size):
        d = E.dims[i]
        dev = abs(E.maps[(0, i)] - np.eye(d)).max() if d else 0.0
        if dev > UNITARITY_TOL:
            raise ValidationError(
                f"unit map at point {i} is not the identity (deviation {dev:.2e})",
                witness={"invariant": "unit", "i": i, "deviation": dev},
            )
    for (g, i), m in E.maps.items():
        if 0 in m.shape:
            continue
        d = min(m.shape)
        dev = max(
            abs(m.conj().T @ m - np.eye(m.shape[1])).max(),
            abs(m @ m.conj().T - np.eye(m.shape[0])).max(),
        )
        if dev > UNITARITY_TOL:
            raise ValidationError(
                f"map (g={g}, i={i}) is not unitary (deviation {dev:.2e})",
                witness={"invariant": "unitarity", "g": g, "i": i, "deviation": dev},
            )
    for i in range(x.gset.size):
        for g1 in range(G.order):
            j = x.gset.apply(g1, i)
            for g2 in range(G.order):
                lhs = E.maps[(g2, j)] @ E.maps[(g1, i)]
                rhs = x.cocycle.phase(i, g2, g1) * E.maps[(int(G.mul[g2, g1]), i)]
                dev = abs(lhs - rhs).max() if lhs.size else 0.0
                if dev > UNITARITY_TOL:
                    raise ValidationError(
                        f"twisted functoriality fails at (i={i}, g1={g1}, g2={g2}) "
                        f"(deviation {dev:.2e})",
                        witness={
                            "invariant": "functoriality",
                            "i": i,
                            "g1": g1,
                            "g2": g2,
                            "deviation": dev,
                        },
                    )


def zero_bundle(gerbe: Gerbe) -> EquivBundle:
    dims = (0,) * gerbe.gset.size
    return EquivBundle(gerbe=gerbe, dims=dims, maps=_empty_maps(gerbe, dims))


def trivial_bundle(gerbe: Gerbe, rank: int = 1) -> EquivBundle:
    """Rank-r bundle with all maps the identity; needs the trivial cocycle."""
    if not gerbe.cocycle.is_trivial():
        raise StructuralError("trivial bundle requires the trivial cocycle")
    dims = (rank,) * gerbe.gset.size
    maps = {
        (g, i): np.eye(rank, dtype=complex)
        for g in range(gerbe.group.order)
        for i in range(gerbe.gset.size)
    }
    return make_bundle(gerbe, dims, maps)


def regular_bundle(gerbe: Gerbe) -> EquivBundle:
    """Twisted left translation on a |G|-dimensional fiber at every point.

    The basis vector h of the fiber at i stands for the section arrow
    s(h; h^-1.i); the action sends it to phi_{h^-1.i}(g, h) times basis g*h.
    """
    x = gerbe
    G = x.group
    n = G.order
    dims = (n,) * x.gset.size
    maps = {}
    for g in range(n):
        for i in range(x.gset.size):
            m = np.zeros((n, n), dtype=complex)
            for h in range(n):
                src = x.gset.apply(G.inverse(h), i)
                m[int(G.mul[g, h]), h] = x.cocycle.phase(src, g, h)
            maps[(g, i)] = m
    return make_bundle(x, dims, maps)


def pauli_bundle(gerbe: Gerbe) -> EquivBundle:
    """U(a, b) = sigma_x^a sigma_z^b over a 4-element-group point gerbe.

    Element index decodes as (a, b) = (idx // 2, idx % 2).  Validation will
    reject the result unless the gerbe carries the matching bilinear cocycle.
    """
    if gerbe.group.order != 4 or gerbe.gset.size != 1:
        raise StructuralError("Pauli bundle needs a point gerbe for a group of order 4")
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    maps = {}
    for g in range(4):
        a, b = divmod(g, 2)
        maps[(g, 0)] = np.linalg.matrix_power(sx, a) @ np.linalg.matrix_power(sz, b)
    return make_bundle(gerbe, (2,), maps)


def direct_sum(E: EquivBundle, F: EquivBundle) -> EquivBundle:
    if not same_gerbe(E.gerbe, F.gerbe):
        raise StructuralError("direct sum requires bundles over the same gerbe")
    dims = tuple(a + b for a, b in zip(E.dims, F.dims))
    maps = {}
    for key in E.maps:
        g, i = key
        j = E.gerbe.gset.apply(g, i)
        m = np.zeros((dims[j], dims[i]), dtype=complex)
        m[: E.dims[j], : E.dims[i]] = E.maps[key]
        m[E.dims[j]:, E.dims[i]:] = F.maps[key]
        maps[key] = m
    return EquivBundle(gerbe=E.gerbe, dims=dims, maps=maps)


def hom_dimension(E: EquivBundle, F: EquivBundle) -> int:
    """Dimension of the space of bundle morphisms E -> F.

    Stacks the naturality constraints theta_{g.i} E(g;i) = F(g;i) theta_i
    over a generating set of G and measures the nullspace by singular values
    (threshold 1e-7 relative).
    """
    if not same_gerbe(E.gerbe, F.gerbe):
        raise StructuralError("hom requires bundles over the same gerbe")
    x = E.gerbe
    npts = x.gset.size
    offs = np.zeros(npts + 1, dtype=np.int64)
    for i in range(npts):
        offs[i + 1] = offs[i] + F.dims[i] * E.dims[i]
    nunk = int(offs[-1])
    if nunk == 0:
        return 0
    gens = generating_set(x.group)
    blocks = []
    for g in gens:
        for i in range(npts):
            j = x.gset.apply(g, i)
            rows = F.dims[j] * E.dims[i]
            if rows == 0:
                continue
            block = np.zeros((rows, nunk), dtype=complex)
            # vec is column-major: vec(A X B) = (B^T kron A) vec X
            if F.dims[j] and E.dims[j]:
                block[:, offs[j]: offs[j + 1]] += np.kron(E.maps[(g, i)].T, np.eye(F.dims[j]))
            if F.dims[i] and E.dims[i]:
                block[:, offs[i]: offs[i + 1]] -= np.kron(np.eye(E.dims[i]), F.maps[(g, i)])
            blocks.append(block)
    if not blocks:
        return nunk
    M = np.vstack(blocks)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return nunk
    rank = int(np.count_nonzero(sv > RANK_TOL * sv[0]))
    return nunk - rank


# --- kernels: 1-morphisms between gerbes -------------------------------------


@dataclass(eq=False)
class Kernel:
    """A 1-morphism source -> target: a bundle over target (x) conj(source).

    Point (mu, i) of the kernel gerbe has index mu * |X_source| + i.
    """

    target: Gerbe
    source: Gerbe
    bundle: EquivBundle

    @property
    def gerbe(self) -> Gerbe:
        return self.bundle.gerbe

    def dim(self, mu: int, i: int) -> int:
        return self.bundle.dims[mu * self.source.gset.size + i]

    def map(self, g: int, mu: int, i: int) -> np.ndarray:
        return self.bundle.maps[(g, mu * self.source.gset.size + i)]


def make_kernel(target: Gerbe, source: Gerbe, dims, maps) -> Kernel:
    kg = tensor_gerbes(target, source)
    return Kernel(target=target, source=source, bundle=make_bundle(kg, dims, maps))


def identity_kernel(x: Gerbe) -> Kernel:
    """Fibers C on the diagonal, zero elsewhere; all phases 1 in section
    coordinates (the cocycle restricts trivially to the diagonal)."""
    kg = tensor_gerbes(x, x)
    n = x.gset.size
    dims = [0] * (n * n)
    maps = {}
    for i in range(n):
        dims[i * n + i] = 1
    for g in range(x.group.order):
        for i in range(n):
            maps[(g, i * n + i)] = np.ones((1, 1), dtype=complex)
    return Kernel(target=x, source=x, bundle=make_bundle(kg, dims, maps))


def kernel_from_bundle(E: EquivBundle, unit: Gerbe) -> Kernel:
    """View a bundle over X as a kernel unit -> X, where ``unit`` is a
    trivial-cocycle one-point gerbe for the same group.

    The kernel gerbe X (x) conj(unit) has the same points and cocycle as X,
    so the bundle data carries over verbatim.
    """
    if unit.gset.size != 1 or not unit.cocycle.is_trivial():
        raise StructuralError("unit gerbe must be a single point with trivial cocycle")
    kg = tensor_gerbes(E.gerbe, unit)
    bundle = make_bundle(kg, E.dims, dict(E.maps))
    return Kernel(target=E.gerbe, source=unit, bundle=bundle)


def kernel_compose(E2: Kernel, E1: Kernel) -> Kernel:
    """Composite of E1: X -> X' and E2: X' -> X''.

    Fiber at (kappa, i) is the direct sum over mu in X' of
    E2_{kappa,mu} (x) E1_{mu,i}; in the orthonormal coordinates used here
    (block basis vectors carry 1/sqrt(k_mu)) the maps are plain Kronecker
    blocks, with the middle section phase canceling between the factors.
    """
    if not same_gerbe(E2.source, E1.target):
        raise StructuralError("kernels do not compose: middle gerbes differ")
    mid = E1.target
    nmid = mid.gset.size
    nsrc = E1.source.gset.size
    ntgt = E2.target.gset.size
    kg = tensor_gerbes(E2.target, E1.source)

    dims = np.zeros(ntgt * nsrc, dtype=np.int64)
    offsets: dict[tuple[int, int], dict[int, int]] = {}
    for kappa in range(ntgt):
        for i in range(nsrc):
            off: dict[int, int] = {}
            total = 0
            for mu in range(nmid):
                block = E2.dim(kappa, mu) * E1.dim(mu, i)
                if block:
                    off[mu] = total
                    total += block
            offsets[(kappa, i)] = off
            dims[kappa * nsrc + i] = total

    maps = {}
    for g in range(kg.group.order):
        gm = mid.gset.act[g]
        for kappa in range(ntgt):
            kp = E2.target.gset.apply(g, kappa)
            for i in range(nsrc):
                ip = E1.source.gset.apply(g, i)
                m = np.zeros((dims[kp * nsrc + ip], dims[kappa * nsrc + i]), dtype=complex)
                src_off = offsets[(kappa, i)]
                dst_off = offsets[(kp, ip)]
                for mu, o in src_off.items():
                    mup = int(gm[mu])
                    blk = np.kron(E2.map(g, kappa, mu), E1.map(g, mu, i))
                    o2 = dst_off[mup]
                    m[o2: o2 + blk.shape[0], o: o + blk.shape[1]] = blk
                maps[(g, kappa * nsrc + i)] = m
    bundle = make_bundle(kg, dims, maps)
    return Kernel(target=E2.target, source=E1.source, bundle=bundle)


# --- twisted groupoid algebra -------------------------------------------------


def center_dimension(x: Gerbe) -> int:
    """Dimension of the center of the twisted groupoid algebra of the gerbe.

    The algebra has a basis arrow e_(i,g) = s(g; i) for every point i and
    group element g, with e_(i',g') e_(i,g) = [i' = g.i] phi_i(g', g)
    e_(i, g'g).  Central elements are the nullspace of the commutation
    constraints; commutation with the point idempotents e_(i,e) is imposed
    exactly (it confines the support to loop arrows), and the remaining
    constraints run over a generating set of G with one stacked nullspace
    restriction per generator.
    """
    G = x.group
    npts = x.gset.size
    n = npts * G.order
    if n > CENTER_SIZE_LIMIT:
        raise ResourceError(f"twisted algebra dimension {n} exceeds {CENTER_SIZE_LIMIT}")

    def flat(i: int, g: int) -> int:
        return i * G.order + g

    phases = x.cocycle.phases()
    # commuting with every e_(j,e) forces z e_j = e_j z, i.e. the coefficient
    # of any arrow whose source and target differ must vanish
    loop_arrows = [flat(i, g) for i in range(npts) for g in range(G.order)
                   if x.gset.apply(g, i) == i]
    basis = np.zeros((n, len(loop_arrows)), dtype=complex)
    for col, row in enumerate(loop_arrows):
        basis[row, col] = 1.0
    if basis.shape[1] == 0:
        return 0

    for h in generating_set(G):
        hinv = G.inverse(h)
        rows = []
        for j in range(npts):
            hj = x.gset.apply(h, j)
            # with z supported on loops, both z e_(j,h) and e_(j,h) z live on
            # arrows out of j:
            #   (z a)[j, m] = phi_j(m h^-1, h) c[h.j, m h^-1]
            #   (a z)[j, m] = phi_j(h, h^-1 m) c[j, h^-1 m]
            for m in range(G.order):
                mh = int(G.mul[m, hinv])
                hm = int(G.mul[hinv, m])
                row = phases[j, mh, h] * basis[flat(hj, mh)] \
                    - phases[j, h, hm] * basis[flat(j, hm)]
                rows.append(row)
        # genuine constraint rows have O(1) coefficients (products of unit
        # phases on orthonormal candidates); smaller rows are residue of the
        # previous restriction and must not be mistaken for constraints
        M = np.array([r for r in rows if np.abs(r).max() > 1e-9])
        if M.size == 0:
            continue
        sv, vh = np.linalg.svd(M)[1:]
        rank = int(np.count_nonzero(sv > RANK_TOL * sv[0])) if sv.size and sv[0] > 0 else 0
        basis = basis @ vh[rank:].conj().T
        if basis.shape[1] == 0:
            return 0
    return basis.shape[1]
