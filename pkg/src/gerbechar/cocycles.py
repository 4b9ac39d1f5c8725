"""Normalized U(1)-valued 2-cocycles on action groupoids.

Phases are stored as exponents in Z/N (phi = zeta_N^exp with
zeta_N = exp(2 pi i / N)), never as floats: whether a cocycle is a coboundary
is an exact question and is decided by exact arithmetic.  Conversion to unit
complex numbers is provided for the numerical linear-algebra layers.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from math import lcm

import numpy as np

from .errors import ResourceError, StructuralError, ValidationError
from .gsets import GSet, product_gset, same_gset
from .zlinalg import ModularSystem

# is_cohomologous refuses to lift beyond this root-of-unity order
MAX_LIFTED_N = 10**6


@dataclass(eq=False)
class Cocycle2:
    """exp[i, g2, g1] represents phi_i(g2, g1) = zeta_N^exp."""

    gset: GSet
    N: int
    exp: np.ndarray

    def phase(self, i: int, g2: int, g1: int) -> complex:
        return np.exp(2j * np.pi * int(self.exp[i, g2, g1]) / self.N)

    def phases(self) -> np.ndarray:
        """The whole table as unit complex numbers."""
        return np.exp(2j * np.pi * self.exp / self.N)

    def is_trivial(self) -> bool:
        return not np.any(self.exp % self.N)


@dataclass(eq=False)
class Cochain1:
    """exp[i, g] represents lambda_i(g) = zeta_N^exp, with lambda_i(e) = 1."""

    gset: GSet
    N: int
    exp: np.ndarray


def _check_shape(gset: GSet, N: int, exp: np.ndarray, arity: int) -> np.ndarray:
    exp = np.asarray(exp, dtype=np.int64)
    G = gset.group.order
    want = (gset.size,) + (G,) * arity
    if exp.shape != want:
        raise StructuralError(f"exponent table has shape {exp.shape}, expected {want}")
    if N < 1:
        raise StructuralError("root-of-unity order must be positive")
    return exp % N


def make_cocycle(gset: GSet, N: int, exp) -> Cocycle2:
    """Shape-check, reduce mod N, validate, and wrap."""
    phi = Cocycle2(gset=gset, N=int(N), exp=_check_shape(gset, N, exp, 2))
    validate_cocycle(phi)
    return phi


def make_cochain(gset: GSet, N: int, exp) -> Cochain1:
    lam = Cochain1(gset=gset, N=int(N), exp=_check_shape(gset, N, exp, 1))
    if np.any(lam.exp[:, 0]):
        i = int(np.nonzero(lam.exp[:, 0])[0][0])
        raise ValidationError(
            "cochain not normalized at the identity", witness={"i": i}
        )
    return lam


def trivial_cocycle(gset: GSet, N: int = 1) -> Cocycle2:
    G = gset.group.order
    return Cocycle2(gset=gset, N=int(N), exp=np.zeros((gset.size, G, G), dtype=np.int64))


def validate_cocycle(phi: Cocycle2) -> None:
    """Check normalization and the groupoid cocycle identity.

    The identity, for all i, g1, g2, g3:

        exp[i,g2,g1] + exp[i,g3,g2*g1] == exp[g1.i,g3,g2] + exp[i,g3*g2,g1]  (mod N)

    Raises ValidationError with the first violating (i, g1, g2, g3).
    """
    gset, N, E = phi.gset, phi.N, phi.exp
    mul = gset.group.mul
    if np.any(E[:, 0, :] % N) or np.any(E[:, :, 0] % N):
        axis = 1 if np.any(E[:, 0, :] % N) else 2
        where = np.nonzero(E[:, 0, :] % N) if axis == 1 else np.nonzero(E[:, :, 0] % N)
        raise ValidationError(
            "cocycle not normalized at the identity",
            witness={"i": int(where[0][0]), "g": int(where[1][0])},
        )
    act_t = gset.act.T  # (i, g)
    # axes of the 4-d arrays below: (i, g3, g2, g1)
    t_a = E[:, None, :, :]
    t_b = E[:, :, mul]
    t_c = np.transpose(E[act_t], (0, 2, 3, 1))
    t_d = E[:, mul, :]
    bad = np.nonzero((t_a + t_b - t_c - t_d) % N)
    if bad[0].size:
        i, g3, g2, g1 = (int(v[0]) for v in bad)
        raise ValidationError(
            f"cocycle identity fails at (i={i}, g1={g1}, g2={g2}, g3={g3})",
            witness={"i": i, "g1": g1, "g2": g2, "g3": g3},
        )


def coboundary_of(lam: Cochain1) -> Cocycle2:
    """(delta lambda)_i(g2, g1) = lambda_{g1.i}(g2) + lambda_i(g1) - lambda_i(g2 g1)."""
    gset, N, L = lam.gset, lam.N, lam.exp
    mul = gset.group.mul
    act_t = gset.act.T
    # axes (i, g2, g1)
    term1 = np.transpose(L[act_t], (0, 2, 1))  # lambda_{g1.i}(g2)
    term2 = np.broadcast_to(L[:, None, :], term1.shape)  # lambda_i(g1)
    term3 = L[:, mul]  # lambda_i(g2 g1)
    exp = (term1 + term2 - term3) % N
    return Cocycle2(gset=gset, N=N, exp=exp.astype(np.int64))


def lift_to(phi: Cocycle2, N: int) -> Cocycle2:
    """Re-express phi with root-of-unity order N (a multiple of phi.N)."""
    if N % phi.N:
        raise StructuralError(f"cannot lift N={phi.N} to non-multiple {N}")
    return Cocycle2(gset=phi.gset, N=N, exp=(phi.exp * (N // phi.N)) % N)


_system_cache: "weakref.WeakKeyDictionary[GSet, dict[int, tuple]]" = weakref.WeakKeyDictionary()


def coboundary_system(gset: GSet, N: int) -> tuple[ModularSystem, list[tuple[int, int, int]]]:
    """The linear system delta(lambda) = target over Z/N for this gset.

    Unknowns are lambda_i(g) for g != e; equations are indexed by
    (i, g2, g1) with g1, g2 != e (identity rows hold automatically).
    Cached per gset since the matrix is independent of the right-hand side.
    """
    per_gset = _system_cache.setdefault(gset, {})
    if N in per_gset:
        return per_gset[N]
    G = gset.group.order
    X = gset.size
    ncols = X * (G - 1)

    def col(i: int, g: int) -> int:
        return i * (G - 1) + (g - 1)

    rows: list[tuple[int, int, int]] = [
        (i, g2, g1) for i in range(X) for g2 in range(1, G) for g1 in range(1, G)
    ]
    A = np.zeros((len(rows), ncols), dtype=np.int64)
    mul = gset.group.mul
    for r, (i, g2, g1) in enumerate(rows):
        A[r, col(int(gset.act[g1, i]), g2)] += 1
        A[r, col(i, g1)] += 1
        g21 = int(mul[g2, g1])
        if g21 != 0:
            A[r, col(i, g21)] -= 1
    system = ModularSystem(A, N)
    per_gset[N] = (system, rows)
    return per_gset[N]


def is_cohomologous(phi: Cocycle2, psi: Cocycle2) -> Cochain1 | None:
    """A 1-cochain lambda with delta(lambda) = psi - phi, or None.

    Both cocycles must live on the same G-set; mixed root-of-unity orders are
    lifted to the lcm first.  A returned witness is re-substituted and checked
    exactly before being handed back.
    """
    if not same_gset(phi.gset, psi.gset):
        raise StructuralError("cocycles live on different G-sets")
    N = lcm(phi.N, psi.N)
    if N > MAX_LIFTED_N:
        raise ResourceError(f"lifted root-of-unity order {N} exceeds {MAX_LIFTED_N}")
    a, b = lift_to(phi, N), lift_to(psi, N)
    target = (b.exp - a.exp) % N
    system, rows = coboundary_system(phi.gset, N)
    rhs = np.array([target[i, g2, g1] for (i, g2, g1) in rows], dtype=np.int64)
    x = system.solve(rhs)
    if x is None:
        return None
    G = phi.gset.group.order
    lam_exp = np.zeros((phi.gset.size, G), dtype=np.int64)
    lam_exp[:, 1:] = x.reshape(phi.gset.size, G - 1)
    lam = Cochain1(gset=phi.gset, N=N, exp=lam_exp)
    if np.any((coboundary_of(lam).exp - target) % N):
        raise AssertionError("solver returned an invalid witness")  # pragma: no cover
    return lam


def pullback(phi: Cocycle2, f, domain: GSet) -> Cocycle2:
    """(f* phi)_i = phi_{f(i)} along an equivariant bijection f: domain -> phi.gset."""
    f = np.asarray(f, dtype=np.int64)
    cod = phi.gset
    if f.shape != (domain.size,) or domain.size != cod.size:
        raise StructuralError("f must be a bijection between equal-size G-sets")
    if not np.array_equal(np.sort(f), np.arange(cod.size)):
        raise StructuralError("f is not a bijection")
    if domain.group is not cod.group and not np.array_equal(domain.group.mul, cod.group.mul):
        raise StructuralError("G-sets have different groups")
    ok = f[domain.act] == cod.act[:, f]
    if not ok.all():
        g, i = (int(v[0]) for v in np.nonzero(~ok))
        raise StructuralError(
            f"f is not equivariant at (g={g}, i={i})", witness={"g": g, "i": i}
        )
    return Cocycle2(gset=domain, N=phi.N, exp=phi.exp[f].copy())


def tensor_conjugate(phi_p: Cocycle2, phi: Cocycle2, product: GSet | None = None) -> Cocycle2:
    """Cocycle of the product-with-conjugate: exponent at (mu, i) is
    phi'_mu - phi_i, on the diagonal G-set X' x X."""
    if not np.array_equal(phi_p.gset.group.mul, phi.gset.group.mul):
        raise StructuralError("cocycles have different groups")
    if product is None:
        product = product_gset(phi_p.gset, phi.gset)
    N = lcm(phi_p.N, phi.N)
    a, b = lift_to(phi_p, N), lift_to(phi, N)
    nx = phi.gset.size
    mu = np.arange(product.size) // nx
    i = np.arange(product.size) % nx
    exp = (a.exp[mu] - b.exp[i]) % N
    return Cocycle2(gset=product, N=N, exp=exp)
