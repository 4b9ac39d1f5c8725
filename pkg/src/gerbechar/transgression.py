"""Transgression to the loop groupoid, flat sections, and twisted characters.

The transgressed bundle assigns to each loop (i, x) and group element g the
phase by which conjugation inside the gerbe carries the loop arrow s(x; i) to
s(g x g^-1; g.i).  It is computed by composing arrows with the gerbe's own
composition law, in exact exponent arithmetic; the closed form

    tau(g; i, x) = phi_{g.i}(g, x g^-1) + phi_{g.i}(x, g^-1) - phi_i(g^-1, g)

is cross-checked against it in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .gerbes import Gerbe
from .gsets import LoopGroupoid, loop_groupoid

FLATNESS_TOL = 1e-9


@dataclass(eq=False)
class TransgressedBundle:
    """tau_exp[g, l] is the transgression exponent (phase zeta_N^exp) for the
    arrow g acting on loop number l."""

    gerbe: Gerbe
    loops: LoopGroupoid
    N: int
    tau_exp: np.ndarray

    def phase(self, g: int, loop: int) -> complex:
        return np.exp(2j * np.pi * int(self.tau_exp[g, loop]) / self.N)

    def phases(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.tau_exp / self.N)


@dataclass(eq=False)
class FlatSection:
    """One complex value per loop, transforming by tau under the G-action."""

    bundle: TransgressedBundle
    values: np.ndarray


def transgress(x: Gerbe) -> TransgressedBundle:
    """Conjugate every loop arrow by every group arrow: v * u * v^-1 in the
    gerbe, with u = s(x; i) and v = s(g; i)."""
    loops = loop_groupoid(x.gset)
    G = x.group
    tau = np.zeros((G.order, len(loops)), dtype=np.int64)
    for n, (i, xg) in enumerate(loops.loops):
        u = (i, xg, 0)
        for g in range(G.order):
            v = (i, g, 0)
            t = x.compose_exp(v, x.compose_exp(u, x.invert_exp(v)))
            tau[g, n] = t[2]
    T = TransgressedBundle(gerbe=x, loops=loops, N=x.N, tau_exp=tau)
    _check_functorial(T)
    return T


def _check_functorial(T: TransgressedBundle) -> None:
    """tau(g2; g1.l) + tau(g1; l) == tau(g2 g1; l), exactly."""
    mul = T.gerbe.group.mul
    act = T.loops.action
    G = mul.shape[0]
    for g2 in range(G):
        t2 = T.tau_exp[g2][act]  # (g1, l): tau(g2; g1.l)
        total = (t2 + T.tau_exp) % T.N
        want = T.tau_exp[mul[g2]] % T.N
        if not np.array_equal(total, want):
            g1, loop = (int(v[0]) for v in np.nonzero(total != want))
            raise ValidationError(
                f"transgression functoriality fails at (g2={g2}, g1={g1}, loop={loop})",
                witness={"g2": g2, "g1": g1, "loop": loop},
            )


def flat_sections(T: TransgressedBundle):
    """Orthonormal basis of flat sections and its Gram matrix.

    One basis vector per loop orbit with trivial holonomy (tau of every
    loop-stabilizing element is 1, checked exactly in exponent form); the
    inner product is the groupoid-measure pairing
    <s, s'> = (1/|G|) sum_l conj(s(l)) s'(l).
    """
    loops = T.loops
    G = T.gerbe.group
    n = len(loops)
    seen = np.zeros(n, dtype=bool)
    basis: list[FlatSection] = []
    phases = T.phases()
    for rep in range(n):
        if seen[rep]:
            continue
        orbit = loops.action[:, rep]
        seen[np.unique(orbit)] = True
        stab = np.nonzero(orbit == rep)[0]
        if np.any(T.tau_exp[stab, rep] % T.N):
            continue  # nontrivial holonomy: no flat section on this orbit
        values = np.zeros(n, dtype=complex)
        for g in range(G.order):
            values[loops.action[g, rep]] = phases[g, rep]
        # normalize: the orbit has |G|/|stab| loops, each of unit modulus
        values *= np.sqrt(len(stab))
        basis.append(FlatSection(bundle=T, values=values))
    dim = len(basis)
    gram = np.zeros((dim, dim), dtype=complex)
    for a in range(dim):
        for b in range(dim):
            gram[a, b] = section_inner(basis[a], basis[b])
    return dim, basis, gram


def section_inner(s: FlatSection, t: FlatSection) -> complex:
    order = s.bundle.gerbe.group.order
    return complex(np.vdot(s.values, t.values) / order)


def check_flat(T: TransgressedBundle, values: np.ndarray, tol: float = FLATNESS_TOL):
    """Return the first (g, loop) where values fail flatness, or None."""
    phases = T.phases()
    for g in range(T.gerbe.group.order):
        moved = values[T.loops.action[g]]
        dev = np.abs(moved - phases[g] * values)
        bad = np.nonzero(dev > tol)[0]
        if bad.size:
            return (g, int(bad[0]), float(dev[bad[0]]))
    return None


def twisted_character(E) -> FlatSection:
    """chi_E(i, x) = conj(Tr U(x; i)), a flat section of the transgression."""
    T = transgress(E.gerbe)
    values = np.array(
        [np.trace(E.maps[(xg, i)]).conjugate() if E.dims[i] else 0.0
         for (i, xg) in T.loops.loops],
        dtype=complex,
    )
    bad = check_flat(T, values)
    if bad is not None:
        g, loop, dev = bad
        raise ValidationError(
            f"character is not flat at (g={g}, loop={loop}), deviation {dev:.2e}",
            witness={"g": g, "loop": loop, "deviation": dev},
        )
    return FlatSection(bundle=T, values=values)


def character_inner(E, F) -> complex:
    """<chi_E, chi_F> under the groupoid measure; by the twisted-character
    theorem this equals dim Hom(E, F) (asserted in the acceptance suite)."""
    from .gerbes import same_gerbe

    if not same_gerbe(E.gerbe, F.gerbe):
        raise ValidationError("character pairing requires bundles over the same gerbe")
    a = twisted_character(E)
    b = twisted_character(F)
    return complex(np.vdot(a.values, b.values) / E.gerbe.group.order)
