import numpy as np
import pytest

from gerbechar import (
    Kernel,
    ResourceError,
    StructuralError,
    ValidationError,
    center_dimension,
    conjugacy_data,
    coset_gset,
    direct_sum,
    hom_dimension,
    identity_kernel,
    kernel_compose,
    kernel_from_bundle,
    left_translation_gset,
    make_bundle,
    make_cochain,
    make_kernel,
    pauli_bundle,
    regular_bundle,
    tensor_gerbes,
    trivial_bundle,
    trivial_gerbe,
    trivial_gset,
    twist_by,
    validate_bundle,
    zero_bundle,
)

from conftest import bilinear_point_gerbe


def rand_cochain(gset, N, rng):
    exp = np.zeros((gset.size, gset.group.order), dtype=np.int64)
    exp[:, 1:] = rng.integers(0, N, size=(gset.size, gset.group.order - 1))
    return make_cochain(gset, N, exp)


def test_trivial_bundle_validates(s3_point_gerbe):
    E = trivial_bundle(s3_point_gerbe)
    validate_bundle(E)
    assert E.dims == (1,)


def test_pauli_relations_numerically(bilinear_gerbe):
    E = pauli_bundle(bilinear_gerbe)
    validate_bundle(E)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    lhs = (np.linalg.matrix_power(sx, a) @ np.linalg.matrix_power(sz, b)
                           @ np.linalg.matrix_power(sx, c) @ np.linalg.matrix_power(sz, d))
                    rhs = ((-1) ** (b * c)
                           * np.linalg.matrix_power(sx, (a + c) % 2)
                           @ np.linalg.matrix_power(sz, (b + d) % 2))
                    assert np.allclose(lhs, rhs)


def test_pauli_over_trivial_cocycle_fails(Z22):
    triv = trivial_gerbe(trivial_gset(Z22, 1), N=2)
    with pytest.raises(ValidationError) as e:
        pauli_bundle(triv)
    assert e.value.witness["invariant"] == "functoriality"


def test_hom_dimensions(bilinear_gerbe, s3_point_gerbe):
    P = pauli_bundle(bilinear_gerbe)
    assert hom_dimension(P, P) == 1
    T = trivial_bundle(s3_point_gerbe)
    assert hom_dimension(T, T) == 1
    R = regular_bundle(s3_point_gerbe)
    assert hom_dimension(R, R) == 6
    # character-orthogonality oracle for point gerbes with trivial cocycle:
    # dim Hom(E, F) = (1/|G|) sum_x tr F(x) conj(tr E(x))
    G = s3_point_gerbe.group
    oracle = sum(
        np.trace(R.maps[(x, 0)]) * np.conj(np.trace(R.maps[(x, 0)]))
        for x in range(G.order)
    ) / G.order
    assert round(oracle.real) == 6


def test_hom_is_symmetric_and_additive(s3_point_gerbe, bilinear_gerbe):
    R = regular_bundle(s3_point_gerbe)
    T = trivial_bundle(s3_point_gerbe)
    assert hom_dimension(R, T) == hom_dimension(T, R) == 1
    S = direct_sum(R, T)
    assert hom_dimension(S, T) == hom_dimension(R, T) + hom_dimension(T, T)
    P = pauli_bundle(bilinear_gerbe)
    assert hom_dimension(direct_sum(P, P), P) == 2


def test_regular_bundle_end_dimension_bilinear(bilinear_gerbe):
    R = regular_bundle(bilinear_gerbe)
    assert R.dims == (4,)
    assert hom_dimension(R, R) == 4  # two copies of the unique 2-dim irrep


def test_regular_bundle_validates_on_twisted_instances(S3):
    rng = np.random.default_rng(41)
    base = trivial_gerbe(coset_gset(S3, [1]), N=6)
    for _ in range(5):
        x = twist_by(base, rand_cochain(base.gset, 6, rng))
        validate_bundle(regular_bundle(x))
        validate_bundle(identity_kernel(x).bundle)


def test_zero_bundle(s3_coset_gerbe):
    Z = zero_bundle(s3_coset_gerbe)
    validate_bundle(Z)
    assert hom_dimension(Z, Z) == 0


def test_identity_kernel_neutral_for_composition(s3_coset_gerbe):
    x = s3_coset_gerbe
    idk = identity_kernel(x)
    R = Kernel(target=x, source=x, bundle=regular_bundle(tensor_gerbes(x, x)))
    left = kernel_compose(idk, R)
    right = kernel_compose(R, idk)
    self_dim = hom_dimension(R.bundle, R.bundle)
    for C in (left, right):
        assert hom_dimension(C.bundle, R.bundle) == self_dim
        assert hom_dimension(R.bundle, C.bundle) == self_dim


def test_rank_one_kernels_multiply_phases(Z4):
    x = trivial_gerbe(trivial_gset(Z4, 1))

    def k(c):
        maps = {(g, 0): np.array([[np.exp(2j * np.pi * c * g / 4)]]) for g in range(4)}
        return make_kernel(x, x, (1,), maps)

    comp = kernel_compose(k(1), k(2))
    for g in range(4):
        want = np.exp(2j * np.pi * 3 * g / 4)
        assert comp.bundle.maps[(g, 0)][0, 0] == pytest.approx(want)


def test_zero_support_composition_is_zero(s3_coset_gerbe, S3):
    x = s3_coset_gerbe
    pt = trivial_gerbe(trivial_gset(S3, 1))
    kg = tensor_gerbes(x, pt)
    E1 = Kernel(target=x, source=pt, bundle=zero_bundle(kg))
    E2 = Kernel(target=pt, source=x, bundle=regular_bundle(tensor_gerbes(pt, x)))
    comp = kernel_compose(E2, E1)
    assert comp.bundle.total_rank() == 0


def test_kernel_composition_associative_up_to_iso(Z4):
    x = trivial_gerbe(trivial_gset(Z4, 1))
    kg = tensor_gerbes(x, x)
    R = Kernel(target=x, source=x, bundle=regular_bundle(kg))
    idk = identity_kernel(x)

    a = kernel_compose(kernel_compose(R, R), idk)
    b = kernel_compose(R, kernel_compose(R, idk))
    probes = [idk.bundle, R.bundle, a.bundle]
    fa = [hom_dimension(a.bundle, p) for p in probes]
    fb = [hom_dimension(b.bundle, p) for p in probes]
    assert fa == fb


def test_middle_resection_leaves_composition_unchanged(S3):
    """Re-sectioning the middle gerbe rescales both kernels by canceling
    phases, so the composite is exactly unchanged."""
    rng = np.random.default_rng(43)
    x = trivial_gerbe(coset_gset(S3, [1]), N=6)
    pt = trivial_gerbe(trivial_gset(S3, 1), N=6)
    lam = rand_cochain(x.gset, 6, rng)
    x_re = twist_by(x, lam)

    E1 = Kernel(target=x, source=pt, bundle=regular_bundle(tensor_gerbes(x, pt)))
    E2 = Kernel(target=pt, source=x, bundle=regular_bundle(tensor_gerbes(pt, x)))
    comp = kernel_compose(E2, E1)

    phase = np.exp(2j * np.pi * lam.exp / 6)
    maps1 = {}
    for (g, p), m in E1.bundle.maps.items():
        mu = p // 1  # source is a point: kernel point index is mu
        maps1[(g, p)] = phase[mu, g] * m
    E1_re = make_kernel(x_re, pt, E1.bundle.dims, maps1)
    maps2 = {}
    for (g, p), m in E2.bundle.maps.items():
        i = p % x.gset.size
        maps2[(g, p)] = np.conj(phase[i, g]) * m
    E2_re = make_kernel(pt, x_re, E2.bundle.dims, maps2)
    comp_re = kernel_compose(E2_re, E1_re)
    for key in comp.bundle.maps:
        assert np.allclose(comp.bundle.maps[key], comp_re.bundle.maps[key], atol=1e-12)


def test_kernel_compose_requires_matching_middle(S3, Z4):
    a = trivial_gerbe(trivial_gset(S3, 1))
    b = trivial_gerbe(coset_gset(S3, [1]))
    E1 = identity_kernel(a)
    E2 = identity_kernel(b)
    with pytest.raises(StructuralError):
        kernel_compose(E2, E1)


def test_kernel_from_bundle_matches_pauli(bilinear_gerbe, Z22):
    unit = trivial_gerbe(trivial_gset(Z22, 1))
    K = kernel_from_bundle(pauli_bundle(bilinear_gerbe), unit)
    assert K.dim(0, 0) == 2
    validate_bundle(K.bundle)


def test_center_dimensions(S3, bilinear_gerbe):
    from gerbechar import conjugation_gset

    assert center_dimension(trivial_gerbe(trivial_gset(S3, 1))) == 3
    assert center_dimension(bilinear_gerbe) == 1
    assert center_dimension(trivial_gerbe(left_translation_gset(S3))) == 1
    # conjugation gerbe: center = orbits of commuting pairs under simultaneous
    # conjugation (counted here by brute force)
    pairs = {(g, h) for g in range(6) for h in range(6) if S3.op(g, h) == S3.op(h, g)}
    orbits = set()
    for g, h in pairs:
        orbits.add(frozenset((S3.conj(a, g), S3.conj(a, h)) for a in range(6)))
    assert center_dimension(trivial_gerbe(conjugation_gset(S3))) == len(orbits)


def test_center_guard(D4):
    big = trivial_gerbe(trivial_gset(D4, 513))
    with pytest.raises(ResourceError):
        center_dimension(big)


def test_bundle_shape_errors(s3_point_gerbe):
    with pytest.raises(StructuralError):
        make_bundle(s3_point_gerbe, (1, 1), {})
    with pytest.raises(StructuralError):
        make_bundle(s3_point_gerbe, (1,), {(g, 0): np.eye(2) for g in range(6)})
