import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpcg.mesh import FESpace, interval_mesh, rectangle_mesh
from dpcg.operators import (
    CompetingPair,
    DoublePhaseFlux,
    assemble_jacobian_D,
    assemble_residual_D,
    pairing_D,
)


def _pair(p, q, mu=0.5, alpha=0.0, eps=0.0):
    return CompetingPair(DoublePhaseFlux(p, q, mu, eps), DoublePhaseFlux(p - 0.4, q - 0.4, 0.5 * mu, eps), alpha)


def test_flux_value():
    f = DoublePhaseFlux(3, 2.5, 1.0)
    np.testing.assert_allclose(DoublePhaseFlux(3, 4, 1.0)([2.0, 0.0]), [4.0 + 8.0, 0.0])
    np.testing.assert_allclose(f(np.zeros(2)), [0.0, 0.0])


def test_flux_matches_hand_value():
    # |xi|^(p-2) xi + mu |xi|^(q-2) xi at xi = (2, 0), p = 3, q = 2: 2*2 + 1*2
    np.testing.assert_allclose(DoublePhaseFlux(3, 2, 1.0)(np.array([2.0, 0.0])), [6.0, 0.0])


def test_p2_pairing_is_dirichlet_energy():
    s = FESpace(interval_mesh(4))
    pair = _pair(2.0, 3.0, mu=0.0)
    u = s.interpolate("z1")
    assert pairing_D(u, 0 * u, pair, pair, s) == pytest.approx(1.0, rel=1e-14)


def test_hat_pairings():
    # hat of height 1 on a two-cell mesh of (0, 1), gradients +-2
    s = FESpace(interval_mesh(2))
    u = np.array([0.0, 1.0, 0.0])
    pair = CompetingPair(DoublePhaseFlux(2.0, 3.0, 0.0), DoublePhaseFlux(1.5, 2.5, 0.0), 0.0)
    assert pairing_D(u, 0 * u, pair, pair, s) == pytest.approx(4.0)
    comp = CompetingPair(DoublePhaseFlux(2.0, 3.0, 0.0), DoublePhaseFlux(1.5, 2.5, 0.0), 1.0)
    assert pairing_D(u, 0 * u, comp, pair, s) == pytest.approx(4.0 - 2**1.5)


def test_pair_requires_ordered_exponents():
    with pytest.raises(ValueError):
        CompetingPair(DoublePhaseFlux(2, 3), DoublePhaseFlux(2.5, 2.5))
    with pytest.raises(ValueError):
        DoublePhaseFlux(2, 3, 0.0, -1.0)


def _fd_check(space, pu, pv, rng, h=1e-6):
    n = space.dof_count
    x = rng.standard_normal(2 * n)
    J = assemble_jacobian_D(x[:n], x[n:], pu, pv, space).toarray()
    fd = np.empty_like(J)
    for k in range(2 * n):
        e = np.zeros(2 * n)
        e[k] = h
        rp = assemble_residual_D((x + e)[:n], (x + e)[n:], pu, pv, space)
        rm = assemble_residual_D((x - e)[:n], (x - e)[n:], pu, pv, space)
        fd[:, k] = (rp - rm) / (2 * h)
    return np.linalg.norm(J - fd) / np.linalg.norm(fd)


@pytest.mark.parametrize("p, q", [(2, 3), (1.5, 2.5), (3, 4)])
@pytest.mark.parametrize("mesh", [interval_mesh(5), rectangle_mesh(2, 2)])
def test_jacobian_matches_finite_differences(p, q, mesh):
    s = FESpace(mesh)
    rng = np.random.default_rng(7)
    pu = CompetingPair(DoublePhaseFlux(p, q, 0.7), DoublePhaseFlux(1.2, 1.3, 0.3), 0.25)
    pv = CompetingPair(DoublePhaseFlux(p, q, 0.2), DoublePhaseFlux(1.2, 1.3, 0.1), -0.5)
    assert _fd_check(s, pu, pv, rng) < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(1.2, 4.0), st.floats(0.1, 2.0), st.floats(0.0, 2.0), st.integers(0, 2**31))
def test_monotone_when_coefficient_nonpositive(p, dq, mu, seed):
    # <A(a) - A(b), a - b> >= 0 for the single double-phase operator
    s = FESpace(interval_mesh(6))
    rng = np.random.default_rng(seed)
    pair = CompetingPair(DoublePhaseFlux(p, p + dq, mu), DoublePhaseFlux(1.1, 1.1 + dq / 2, mu / 2), 0.0)
    a, b = rng.standard_normal((2, s.dof_count))
    zero = np.zeros(s.dof_count)
    ra = assemble_residual_D(a, zero, pair, pair, s)[: s.dof_count]
    rb = assemble_residual_D(b, zero, pair, pair, s)[: s.dof_count]
    assert (ra - rb) @ (a - b) >= -1e-10 * (1 + abs(ra @ a) + abs(rb @ b))


def test_regularized_jacobian_at_zero_gradient():
    s = FESpace(interval_mesh(3))
    pair = CompetingPair(DoublePhaseFlux(1.5, 2.5, 1.0, 1e-3), DoublePhaseFlux(1.2, 2.0, 0.5, 1e-3), 0.0)
    z = np.zeros(s.dof_count)
    J = assemble_jacobian_D(z, z, pair, pair, s).toarray()
    assert np.all(np.isfinite(J)) and np.all(np.linalg.eigvalsh(J) > 0)
