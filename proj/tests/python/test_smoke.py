import numpy as np
import pytest

import _deimkit as dk


def random_orthonormal(m, r, seed=0):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((m, r)))
    return q


def test_pod_roundtrip():
    rng = np.random.default_rng(1)
    y = rng.standard_normal((30, 12))
    u_hat, u_euclid, sigma, rank = dk.pod(y, rank=5)
    assert rank == 5
    assert u_hat.shape == (30, 5)
    np.testing.assert_allclose(u_hat, u_euclid)  # identity weight
    np.testing.assert_allclose(u_euclid.T @ u_euclid, np.eye(5), atol=1e-12)
    ref = np.linalg.svd(y, compute_uv=False)
    np.testing.assert_allclose(np.sort(sigma)[::-1][: len(ref)], ref, rtol=1e-10)


def test_select_and_projector():
    u = random_orthonormal(40, 6, seed=2)
    indices, kappa = dk.select(u, strategy="srrqr", eta=2.0)
    assert len(indices) == 6
    assert len(set(indices)) == 6
    assert kappa <= np.sqrt(1 + 4.0 * 6 * (40 - 6)) * (1 + 1e-10)

    proj = dk.build_deim(u, indices)
    assert proj.variant == "deim"
    assert proj.rank == 6
    assert proj.dim == 40
    assert proj.interpolation_holds and proj.projection_holds

    d = proj.assemble()
    np.testing.assert_allclose(d @ d, d, atol=1e-9)
    f = np.random.default_rng(3).standard_normal(40)
    df = proj.apply(f)
    np.testing.assert_allclose(d @ f, df, atol=1e-10)
    np.testing.assert_allclose(df[list(indices)], f[list(indices)], atol=1e-8)

    cs = proj.canonical()
    assert cs.ell + cs.p == 6
    assert cs.norm_d == pytest.approx(np.linalg.norm(d, 2), rel=1e-8)

    e = proj.error_decomposition(f)
    assert set(e) == {"orth_err", "oblique_excess", "kappa_prime", "total"}
    assert e["total"] ** 2 == pytest.approx(
        e["orth_err"] ** 2 + e["oblique_excess"] ** 2, rel=1e-8
    )


def test_weighted_variants():
    rng = np.random.default_rng(4)
    y = rng.standard_normal((25, 10))
    d = rng.uniform(0.5, 3.0, size=25)
    for builder in (
        dk.build_wdeim_generalized,
        dk.build_wdeim_pointwise,
        dk.build_wdeim_scaled,
    ):
        proj = builder(y, weight=d, rank=4)
        assert proj.rank == 4
        mat = proj.assemble()
        np.testing.assert_allclose(mat @ mat, mat, atol=1e-8)
        assert proj.error_constant >= 1.0

    b = rng.standard_normal((25, 25))
    w = b @ b.T + 0.5 * np.eye(25)
    proj = dk.build_wdeim_pointwise(y, weight=w, rank=4)
    f = rng.standard_normal(25)
    sampled = f[list(proj.indices)]
    np.testing.assert_allclose(proj.apply(f), proj.apply_sampled(sampled), atol=1e-10)


def test_srrqr_and_fem():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((20, 30))
    perm, swaps = dk.srrqr(a, 5)
    assert sorted(perm) == list(range(30))
    assert swaps >= 0

    mass, h1 = dk.fem_weights(8)
    assert mass.shape == (64, 64)
    np.testing.assert_allclose(mass, mass.T, atol=1e-14)
    assert mass.sum() == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(h1 - mass, (h1 - mass).T, atol=1e-12)


def test_exception_mapping():
    with pytest.raises(ValueError):
        dk.select(2.0 * random_orthonormal(10, 3), strategy="srrqr")
    with pytest.raises(ValueError):
        dk.select(random_orthonormal(10, 3), strategy="bogus")
    rng = np.random.default_rng(6)
    low_rank = np.outer(rng.standard_normal(15), rng.standard_normal(8))
    with pytest.raises(ArithmeticError):
        dk.pod(low_rank, rank=5)
