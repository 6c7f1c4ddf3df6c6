import numpy as np
import pytest

from ddfc import ContractViolation, ControlSchedule, SimulationDivergence, \
    TimeGrid, euler_step, simulate_path, synthesize_observation
from ddfc.benchmarks import ArctanProblem, DubinsProblem, LQProblem, \
    build_arctan_problem, build_dubins_problem, build_lq_problem, \
    get_benchmark

from _oracles import rk4_linear_ode
from conftest import make_custom_problem


def make_gbm(mu, nu):
    return make_custom_problem(
        drift=lambda t, x, u: mu * np.asarray(x),
        diffusion=lambda t, x: nu * np.asarray(x)[..., None],
        drift_x=lambda t, x, u: np.full(np.shape(x)[:-1] + (1, 1), mu),
        diffusion_x=lambda t, x: np.full(np.shape(x)[:-1] + (1, 1, 1), nu))


class TestEulerStep:
    def test_zero_dynamics(self, rng):
        problem = make_custom_problem()
        x = rng.standard_normal(1)
        out = euler_step(problem, 0.0, x, np.zeros(1), 0.1, rng.standard_normal(1))
        assert np.array_equal(out, x)

    def test_deterministic_drift(self):
        problem = make_custom_problem(drift=lambda t, x, u: np.ones(np.shape(x)))
        out = euler_step(problem, 0.0, np.array([1.5]), np.zeros(1), 0.02,
                         np.array([3.0]))
        assert out[0] == pytest.approx(1.52)

    def test_requires_positive_dt(self):
        problem = make_custom_problem()
        with pytest.raises(ContractViolation):
            euler_step(problem, 0.0, np.zeros(1), np.zeros(1), 0.0, np.zeros(1))

    def test_divergence_raises(self):
        problem = make_custom_problem(
            drift=lambda t, x, u: np.full(np.shape(x), np.inf))
        with pytest.raises(SimulationDivergence):
            euler_step(problem, 0.0, np.zeros(1), np.zeros(1), 0.1, np.zeros(1))

    def test_step_moments(self, rng):
        # mean x + b dt, covariance dt * sigma sigma' over many draws
        sig = np.array([[0.3, 0.0], [0.1, 0.2]])
        problem = make_custom_problem(
            d=2, m=1,
            drift=lambda t, x, u: np.broadcast_to([1.0, -0.5], np.shape(x)),
            diffusion=lambda t, x: sig)
        n = 100_000
        dt = 0.05
        x = np.broadcast_to([0.2, 0.4], (n, 2))
        out = euler_step(problem, 0.0, x, np.zeros(1), dt,
                         rng.standard_normal((n, 2)))
        target_mean = np.array([0.2 + dt, 0.4 - 0.5 * dt])
        target_cov = dt * sig @ sig.T
        se_mean = np.sqrt(np.diag(target_cov) / n)
        assert np.all(np.abs(out.mean(axis=0) - target_mean) < 4 * se_mean)
        emp_cov = np.cov(out.T)
        se_cov = target_cov[0, 0] / np.sqrt(n)  # crude scale for all entries
        assert np.all(np.abs(emp_cov - target_cov) < 5 * max(se_cov, 1e-5))

    def test_gbm_strong_order_half(self, rng):
        # versus the exact solution x0 exp((mu - nu^2/2) t + nu W_t) on
        # shared Brownian increments; slope of log error in log dt near 1/2
        mu, nu, t_end = 0.5, 1.0, 1.0
        problem = make_gbm(mu, nu)
        n_paths = 4000
        n_fine = 128
        dw_fine = rng.standard_normal((n_paths, n_fine)) * np.sqrt(t_end / n_fine)
        errs, dts = [], []
        for factor in (4, 8, 16, 32):
            n_steps = n_fine // factor
            dt = t_end / n_steps
            dw = dw_fine.reshape(n_paths, n_steps, factor).sum(axis=2)
            x = np.ones(n_paths)
            for i in range(n_steps):
                x = x + mu * x * dt + nu * x * dw[:, i]
            w_t = dw_fine.sum(axis=1)
            exact = np.exp((mu - 0.5 * nu ** 2) * t_end + nu * w_t)
            errs.append(np.mean(np.abs(x - exact)))
            dts.append(dt)
        slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        assert 0.4 <= slope <= 0.6


class TestSimulatePath:
    def test_empty_horizon(self, rng):
        problem = make_custom_problem()
        grid = TimeGrid.uniform(0.0, 1.0, 5)
        sched = ControlSchedule.zeros(5, 0, 1)
        path = simulate_path(problem, grid, 5, np.array([2.0]), sched, rng)
        assert path.horizon == 0
        assert path.noises.shape == (0, 1)
        assert np.array_equal(path.states[0], [2.0])

    def test_deterministic_linear_matches_ode(self, rng):
        # sigma = 0, constant rates: compare against RK4 at a much finer step
        lq = LQProblem(a_coeffs=np.array([[0.0, 0.0, 1.2], [0.0, 0.0, -0.7]]),
                       b_mat=np.eye(2), c_mat=np.zeros((2, 2)),
                       q_mat=np.eye(2), r_mat=np.eye(2), f_mat=np.eye(2),
                       x0=np.array([1.0, -1.0]))
        problem = build_lq_problem(lq)
        n = 50
        grid = TimeGrid.uniform(0.0, 1.0, n)
        sched = ControlSchedule.zeros(0, n, 2)
        path = simulate_path(problem, grid, 0, lq.x0, sched, rng)
        exact = rk4_linear_ode(np.diag([1.2, -0.7]), lq.x0, 0.0, 1.0, 100 * n)
        assert np.linalg.norm(path.states[-1] - exact) < 5.0 / n

    def test_fixed_seed_reproducible(self):
        problem = get_benchmark("arctan1d").problem
        grid = TimeGrid.uniform(0.0, 1.0, 20)
        sched = ControlSchedule.zeros(0, 20, 1)
        p1 = simulate_path(problem, grid, 0, np.array([4.5]), sched,
                           np.random.default_rng(99))
        p2 = simulate_path(problem, grid, 0, np.array([4.5]), sched,
                           np.random.default_rng(99))
        assert np.array_equal(p1.states, p2.states)
        assert np.array_equal(p1.noises, p2.noises)

    def test_pre_drawn_noises_match_rng(self):
        problem = get_benchmark("arctan1d").problem
        grid = TimeGrid.uniform(0.0, 1.0, 10)
        sched = ControlSchedule.zeros(0, 10, 1)
        noises = np.random.default_rng(5).standard_normal((10, 1))
        p1 = simulate_path(problem, grid, 0, np.array([4.5]), sched,
                           np.random.default_rng(5))
        p2 = simulate_path(problem, grid, 0, np.array([4.5]), sched,
                           noises=noises)
        assert np.array_equal(p1.states, p2.states)

    def test_anchor_mismatch_rejected(self, rng):
        problem = make_custom_problem()
        grid = TimeGrid.uniform(0.0, 1.0, 5)
        with pytest.raises(ContractViolation):
            simulate_path(problem, grid, 2, np.zeros(1),
                          ControlSchedule.zeros(1, 4, 1), rng)

    def test_batched_paths(self, rng):
        problem = get_benchmark("arctan1d").problem
        grid = TimeGrid.uniform(0.0, 1.0, 10)
        sched = ControlSchedule.zeros(0, 10, 1)
        starts = rng.uniform(3.0, 6.0, size=(7, 1))
        path = simulate_path(problem, grid, 0, starts, sched, rng)
        assert path.states.shape == (11, 7, 1)
        assert np.all(np.isfinite(path.states))


class TestSynthesizeObservation:
    def test_noiseless_limit(self, rng):
        problem = make_custom_problem(obs_std=1e-15)
        rec = synthesize_observation(problem, 3, np.array([0.7]), rng)
        assert rec.index == 3
        assert rec.value[0] == pytest.approx(0.7, abs=1e-12)

    def test_sin_observation_mean(self, rng):
        # componentwise sin observation: mean at (pi/2, 0) is (1, 0)
        problem = get_benchmark("lq2d").problem
        x = np.array([np.pi / 2, 0.0])
        vals = np.array([synthesize_observation(problem, 0, x, rng).value
                         for _ in range(20_000)])
        se = 0.1 / np.sqrt(20_000)
        assert np.all(np.abs(vals.mean(axis=0) - [1.0, 0.0]) < 4 * se)

    def test_bearing_at_detector_vertical(self, rng):
        # robot straight below/above the first detector: zero bearing ratio
        problem = get_benchmark("dubins").problem
        obs = problem.observe(np.array([6.0, 2.0, 0.0]))
        assert obs[0] == pytest.approx(0.0)

    def test_noise_covariance(self, rng):
        cov = np.array([[0.04, 0.01], [0.01, 0.09]])
        problem = make_custom_problem(d=2, m=1, obs_cov=cov)
        n = 50_000
        x = np.zeros(2)
        vals = np.array([synthesize_observation(problem, 0, x, rng).value
                         for _ in range(n)])
        emp = np.cov(vals.T)
        se = cov.max() / np.sqrt(n)
        assert np.all(np.abs(emp - cov) < 5 * se)
