import numpy as np
import pytest

from conftest import random_hermitian
from sdp_cases import kkt_residuals, max_offdiag, min_trace, negative_trace, random_feasible, unbounded
from symext import sdp


def test_svec_round_trip_and_inner_product(rng):
    a, b = rng.standard_normal((2, 4, 4))
    a, b = a + a.T, b + b.T
    assert np.allclose(sdp.smat(sdp.svec(a), 4), a)
    assert sdp.svec(a) @ sdp.svec(b) == pytest.approx(np.trace(a @ b))
    stack = np.stack([a, b])
    assert np.allclose(sdp.svec(stack)[1], sdp.svec(b))


def test_embed_examples(rng):
    h = rng.standard_normal((3, 3))
    h = h + h.T
    e = sdp.hermitian_embed(h)
    assert np.allclose(e, np.block([[h, np.zeros((3, 3))], [np.zeros((3, 3)), h]]))
    y = np.array([[0, -1j], [1j, 0]])
    assert np.allclose(np.linalg.eigvalsh(sdp.hermitian_embed(y)), [-1, -1, 1, 1])


def test_embed_spectrum(rng):
    h = random_hermitian(rng, 5)
    w = np.linalg.eigvalsh(h)
    we = np.linalg.eigvalsh(sdp.hermitian_embed(h))
    assert abs(we[0] - w[0]) < 1e-10
    assert np.allclose(we, np.repeat(w, 2), atol=1e-10)


def test_embed_rejects_non_hermitian():
    with pytest.raises(ValueError):
        sdp.hermitian_embed(np.array([[0, 1], [0, 0]]))


def test_coefficient_and_recovery(rng):
    g, h = random_hermitian(rng, 3), random_hermitian(rng, 3)
    e = sdp.hermitian_embed(h)
    assert np.sum(sdp.hermitian_coeff(g) * e) == pytest.approx(np.trace(g @ h).real)
    assert np.allclose(sdp.recover_hermitian(e), h)


def test_problem_validation():
    with pytest.raises(ValueError):
        sdp.SdpProblem([2], 0, c=[1, 0], A=[[1, 0]], b=[1])
    with pytest.raises(ValueError):
        sdp.SdpProblem([0], 0, c=[], A=np.zeros((1, 0)), b=[1])


def test_min_trace():
    sol = sdp.solve(min_trace())
    assert sol.status == sdp.OPTIMAL
    assert sol.primal_objective == pytest.approx(1.0, abs=1e-7)
    assert np.allclose(sol.x_blocks[0], np.diag([1.0, 0.0]), atol=1e-6)
    assert sol.max_residual <= 1e-8


def test_negative_trace_is_infeasible():
    p = negative_trace()
    sol = sdp.solve(p)
    assert sol.status == sdp.PRIMAL_INFEASIBLE
    assert sdp.verify_primal_certificate(p, sol.y)
    assert p.b @ sol.y > 0


def test_max_offdiagonal():
    sol = sdp.solve(max_offdiag())
    assert sol.status == sdp.OPTIMAL
    assert sol.x_scalar[0] == pytest.approx(1.0, abs=1e-6)


def test_dual_infeasible():
    p = unbounded()
    sol = sdp.solve(p)
    assert sol.status == sdp.DUAL_INFEASIBLE
    x = p.pack(sol.x_blocks, sol.x_scalar)
    assert sdp.verify_dual_certificate(p, x)


def test_inconsistent_dependent_rows():
    # X11 = 1 twice with different right-hand sides
    p = sdp.SdpProblem([2], 0, c=[1, 0, 1], A=[[1, 0, 0], [2, 0, 0]], b=[1, 3])
    sol = sdp.solve(p)
    assert sol.status == sdp.PRIMAL_INFEASIBLE
    assert sdp.verify_primal_certificate(p, sol.y)


def test_consistent_dependent_rows_are_dropped():
    p = sdp.SdpProblem([2], 0, c=[1, 0, 1], A=[[1, 0, 0], [2, 0, 0]], b=[1, 2])
    sol = sdp.solve(p)
    assert sol.status == sdp.OPTIMAL
    assert sol.info["rows_kept"] == 1
    assert sol.primal_objective == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_random_feasible(seed):
    p = random_feasible(seed)
    sol = sdp.solve(p)
    assert sol.status == sdp.OPTIMAL
    kkt, cone = kkt_residuals(p, sol)
    assert kkt <= 1e-6 and cone <= 1e-8
    # complementary slackness
    x = p.pack(sol.x_blocks, sol.x_scalar)
    s = p.pack(sol.s_blocks, sol.s_scalar)
    assert x @ s <= 1e-6 * (1 + abs(sol.primal_objective))


def test_deterministic():
    p = random_feasible(3)
    a, b = sdp.solve(p), sdp.solve(p)
    assert np.array_equal(a.y, b.y)
    assert all(np.array_equal(u, v) for u, v in zip(a.x_blocks, b.x_blocks))


def test_max_iter_is_a_status():
    sol = sdp.solve(random_feasible(0), sdp.SolverOptions(max_iter=2))
    assert sol.status == sdp.MAX_ITER
