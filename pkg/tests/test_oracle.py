import numpy as np
import pytest

from symext import dps
from symext.oracle import (
    ENTANGLED,
    SEPARABLE,
    nearest_separable_estimate,
    ppt_exact_separability,
    uncompressed_extendibility,
)
from symext.states import DensityMatrix, isotropic, make_family, random_density, random_separable, werner

BELL = isotropic(1.0)


def test_ppt_exact_examples():
    r = ppt_exact_separability(BELL)
    assert r.verdict == ENTANGLED and r.margin == pytest.approx(-0.5)
    r = ppt_exact_separability(make_family("max_mixed", {"dims": (2, 2)}))
    assert r.verdict == SEPARABLE and r.margin == pytest.approx(0.25)
    for p in np.linspace(0, 1, 11):
        r = ppt_exact_separability(werner(p))
        assert r.margin == pytest.approx((1 - 3 * p) / 4, abs=1e-12)
        assert (r.verdict == ENTANGLED) == (p > 1 / 3 + 1e-12)


def test_ppt_exact_refuses_larger_dims():
    with pytest.raises(ValueError):
        ppt_exact_separability(isotropic(0.2, 3))
    ppt_exact_separability(random_density((3, 2), 0))


def test_uncompressed_examples():
    r = uncompressed_extendibility(BELL, (2, 1))
    assert r.margin == pytest.approx(1 / 3, abs=0.02)
    assert uncompressed_extendibility(make_family("product", {}), (2, 1)).margin <= 1e-6
    rho, _ = random_separable((2, 2), 4, seed=9)
    assert uncompressed_extendibility(rho, (3, 1)).margin <= 1e-6


def test_uncompressed_extension_is_bosonic():
    r = uncompressed_extendibility(random_density((2, 2), 4), (2, 1))
    x = r.details["extension"]
    # copies 0 and 1 belong to the first party
    swap = np.eye(8).reshape(2, 2, 2, 8).transpose(1, 0, 2, 3).reshape(8, 8)
    assert np.max(np.abs(swap @ x - x)) < 1e-6


def test_uncompressed_cap():
    with pytest.raises(ValueError):
        uncompressed_extendibility(BELL, (12, 1))


def test_verdicts_agree_with_compressed():
    spec = dps.ExtensionSpec((2, 1))
    for seed in range(200):
        rho = random_density((2, 2), seed)
        ref = uncompressed_extendibility(rho, (2, 1))
        v = dps.check_extendible(rho, spec)
        assert abs(v.lambda_star - ref.margin) <= 1e-5
        assert v.status == ref.verdict or dps.INCONCLUSIVE in (v.status, ref.verdict)


def test_ppt_separable_states_extend():
    rng = np.random.default_rng(2)
    states = [isotropic(f) for f in (0.2, 0.4, 0.5)]
    while len(states) < 8:
        rho = random_density((2, 2), int(rng.integers(1 << 30)))
        mixed = DensityMatrix((2, 2), 0.5 * rho.matrix + 0.5 * np.eye(4) / 4)
        if ppt_exact_separability(mixed).verdict == SEPARABLE:
            states.append(mixed)
    for rho in states:
        for k in (2, 3, 4):
            v = dps.check_extendible(rho, dps.ExtensionSpec((k, 1)))
            assert v.lambda_star <= 1e-5 + 1e-7, (k, v.lambda_star)


def test_nearest_separable_on_separable_input():
    rho, _ = random_separable((2, 2), 4, seed=0)
    r = nearest_separable_estimate(rho, gap_tol=1e-7)
    assert r.frobenius <= 1e-3
    assert all(b <= a for a, b in zip(r.history, r.history[1:]))


def test_nearest_separable_on_bell_respects_witness():
    v = dps.check_extendible(BELL, dps.ExtensionSpec((2, 1)))
    # tr(W σ) >= 0 on separable σ and ‖W‖∞ = 1, so ‖ρ - σ‖₁ >= -tr(W ρ)
    lower = -v.witness.value_on_state
    r = nearest_separable_estimate(BELL, gap_tol=1e-7)
    assert r.trace >= 0.4
    assert r.trace >= lower - 1e-9


def test_nearest_separable_is_deterministic():
    a = nearest_separable_estimate(BELL, seed=3, max_iter=20)
    b = nearest_separable_estimate(BELL, seed=3, max_iter=20)
    assert np.array_equal(a.sigma, b.sigma)
