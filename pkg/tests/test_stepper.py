import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dde_steps.core import ConfigurationError, DdeProblem, FunctionRhs, PreconditionError
from dde_steps.models import build_problem
from dde_steps.stepper import OdeRhs, euler_solve_dde, euler_solve_ode, lag_offsets

from conftest import pure_delay_exact


@given(c=st.floats(-1e6, 1e6), N=st.integers(1, 32), n=st.integers(0, 4))
@settings(max_examples=30)
def test_zero_field_keeps_history(c, N, n):
    p = DdeProblem(FunctionRhs(lambda t, y, zs: np.zeros(1)), tau=1.5, eta=[c], n=n)
    traj = euler_solve_dde(p, N)
    assert np.all(traj.states == c)


def test_pure_delay_worked_example(pure_delay):
    traj = euler_solve_dde(pure_delay, 2)
    assert traj.states[:, 0].tolist() == [1.0, 1.5, 2.0, 2.5, 3.25]
    assert traj.times().tolist() == [0.0, 0.5, 1.0, 1.5, 2.0]
    err = np.abs(traj.states[:, 0] - pure_delay_exact(traj.times()))
    assert err.tolist() == [0.0, 0.0, 0.0, 0.125, 0.25]


def test_rhs_call_count_and_times():
    calls = []

    def f(t, y, zs):
        calls.append(t)
        return np.zeros(1)

    p = DdeProblem(FunctionRhs(f), tau=0.3, eta=[0.0], n=3)
    euler_solve_dde(p, 7)
    # the last node is never an evaluation point
    assert len(calls) == 4 * 7
    assert calls == [j * 0.3 + k * (0.3 / 7) for j in range(4) for k in range(7)]


def test_delayed_argument_is_previous_window():
    seen = []

    def f(t, y, zs):
        seen.append(float(zs[0][0]))
        return np.ones(1)

    p = DdeProblem(FunctionRhs(f), tau=1.0, eta=[0.0], n=1)
    traj = euler_solve_dde(p, 4)
    assert seen[:4] == [0.0] * 4
    assert seen[4:] == traj.states[:4, 0].tolist()


def test_multi_lag_offsets():
    p = build_problem("sir8")
    assert lag_offsets(p, 18) == [198, 270, 756, 486]
    assert lag_offsets(p, 2) == [22, 30, 84, 54]
    p = build_problem("sir8", tau=0.5)
    q = DdeProblem(p.rhs, tau=0.5, eta=p.eta, n=1, lags=(5.5, 7.5, 21.0, 13.3))
    with pytest.raises(ConfigurationError, match="method of steps"):
        lag_offsets(q, 2)


def test_misaligned_lag_rejected():
    p = DdeProblem(FunctionRhs(lambda t, y, zs: zs[0] + zs[1]), tau=1.0, eta=[1.0], n=1, lags=(1.0, 0.3))
    with pytest.raises(ConfigurationError):
        euler_solve_dde(p, 4)
    euler_solve_dde(p, 10)


def test_divergence_keeps_finite_prefix():
    # y' = y^2 from 1 with h = 1 squares its way past the float range in 11 steps
    p = DdeProblem(FunctionRhs(lambda t, y, zs: y * y), tau=1.0, eta=[1.0], n=20)
    with np.errstate(over="ignore"):
        traj = euler_solve_dde(p, 1)
    assert traj.diverged
    assert traj.diverged_at == 11
    assert np.all(np.isfinite(traj.states))
    assert len(traj.states) == traj.diverged_at


def test_determinism_bitwise():
    p = build_problem("metal1")
    a = euler_solve_dde(p, 160).to_csv().encode()
    b = euler_solve_dde(build_problem("metal1"), 160).to_csv().encode()
    assert a == b


def test_segment_chaining_matches_ode_solves():
    """The DDE solve equals n+1 chained ODE Euler solves fed by the previous window."""
    f = lambda t, y, zs: np.array([-0.5 * y[0] + np.sin(zs[0][0]) + t])
    tau, N, n = 1.0, 16, 4
    p = DdeProblem(FunctionRhs(f), tau=tau, eta=[0.3], n=n)
    traj = euler_solve_dde(p, N)

    prev = np.full((N + 1, 1), 0.3)
    start = p.eta
    h = tau / N
    for j in range(n + 1):
        # the ODE grid a + k h reproduces j tau + k h exactly for tau = 1 and dyadic h
        g = OdeRhs(lambda t, y, prev=prev: f(t, y, [prev[round((t - j * tau) / h)]]), j * tau, (j + 1) * tau)
        seg = euler_solve_ode(g, start, 0.0, start, N)
        assert seg.tobytes() == np.ascontiguousarray(traj.segment(j)).tobytes()
        prev, start = seg, seg[-1]


def test_ode_examples():
    const = OdeRhs(lambda t, y: np.zeros(1), 0.0, 1.0)
    assert np.all(euler_solve_ode(const, [2.0], 0.0, [2.0], 5) == 2.0)
    one = OdeRhs(lambda t, y: np.ones(1), 0.0, 1.0)
    assert euler_solve_ode(one, 0.0, 0.0, 0.0, 4)[:, 0].tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    decay = OdeRhs(lambda t, y: -y, 0.0, 1.0)
    final = euler_solve_ode(decay, 1.0, 0.1, 1.05, 100)[-1, 0]
    # 1.05 * 0.99**100 evaluated in exact rational arithmetic
    assert final == pytest.approx(0.38433395833689098, rel=1e-13)


def test_ode_start_outside_ball():
    g = OdeRhs(lambda t, y: -y, 0.0, 1.0)
    with pytest.raises(PreconditionError):
        euler_solve_ode(g, 1.0, 0.01, 1.05, 10)
    with pytest.raises(PreconditionError):
        OdeRhs(lambda t, y: y, 1.0, 1.0)


@pytest.mark.parametrize("k", range(1, 11))
def test_perturbation_contract_decay(k):
    """Two Euler runs of y' = -y never drift further apart than they started."""
    h = 2.0**-k
    g = OdeRhs(lambda t, y: -y, 0.0, 1.0)
    N = round(1.0 / h)
    xi, zeta = np.array([1.0]), np.array([1.37])
    a = euler_solve_ode(g, xi, 0.0, xi, N)
    b = euler_solve_ode(g, xi, 0.5, zeta, N)
    assert np.max(np.abs(a - b)) <= abs(xi - zeta)[0]


@given(c=st.floats(-100, 100), tau=st.sampled_from([0.25, 0.5, 1.0, 2.0, 4.0]), N=st.sampled_from([1, 2, 4, 8]))
def test_constant_field_exact_on_dyadic_mesh(c, tau, N):
    c = math.ldexp(round(c * 64), -6)
    p = DdeProblem(FunctionRhs(lambda t, y, zs: np.array([c])), tau=tau, eta=[0.0], n=0)
    traj = euler_solve_dde(p, N)
    assert np.all(traj.states[:, 0] == c * traj.times())


def test_mackey_glass_bounded_oscillation():
    traj = euler_solve_dde(build_problem("mackey_glass"), 20)
    x = traj.states[:, 0]
    assert not traj.diverged
    assert len(x) == 501 * 20 + 1
    assert 0.0 < x.min() and x.max() < 2.0
    late = x[len(x) // 2 :]
    assert late.max() - late.min() > 0.5
