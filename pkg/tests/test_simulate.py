import json

import numpy as np
import pytest

from ftsindep import (
    DgpSpec,
    InvalidGrid,
    NonStationaryKernel,
    TestConfig,
    apply_psi,
    brownian_motion_path,
    compute_t_stat,
    far1_sample,
    iid_bm_sample,
    integrated_autocov,
    make_uniform_grid,
    psi_hs_norm,
    run_monte_carlo,
    simulate_sample,
)
from ftsindep.functional import FunctionalSample, Grid
from ftsindep.simulate import _stream_rng, mc_report_csv, mc_report_json_dict


GRID = make_uniform_grid(101)


def test_brownian_path_starts_at_zero():
    path = brownian_motion_path(GRID, _stream_rng(0, 0, 0))
    assert path[0] == 0.0
    assert path.shape == (101,)


def test_brownian_terminal_variance():
    spec = DgpSpec("iid_bm", n=10000, grid=GRID, seed=21)
    sample = iid_bm_sample(spec)
    var_end = sample.values[:, -1].var()
    assert var_end == pytest.approx(1.0, abs=0.05)


def test_brownian_covariance_is_min():
    spec = DgpSpec("iid_bm", n=10000, grid=GRID, seed=22)
    sample = iid_bm_sample(spec)
    i25 = np.argmin(np.abs(GRID.points - 0.25))
    i75 = np.argmin(np.abs(GRID.points - 0.75))
    cov = np.cov(sample.values[:, i25], sample.values[:, i75])[0, 1]
    assert cov == pytest.approx(0.25, abs=0.03)


def test_brownian_requires_uniform_grid():
    pts = np.array([0.0, 0.3, 1.0])
    irregular = Grid(pts, np.array([0.15, 0.5, 0.35]))
    with pytest.raises(InvalidGrid):
        brownian_motion_path(irregular, _stream_rng(0, 0, 0))


def test_apply_psi_zero_function():
    assert np.all(apply_psi(1.5, np.zeros(101), GRID) == 0.0)


def test_apply_psi_constant_function():
    grid = make_uniform_grid(100)
    got = apply_psi(2.0, np.ones(100), grid)
    t = grid.points
    expected = 2.0 * (t - t**2 / 2.0)
    assert np.max(np.abs(got - expected)) < 1e-3


def test_apply_psi_linearity():
    rng = np.random.default_rng(23)
    f, g = rng.standard_normal((2, 101))
    lhs = apply_psi(1.2, 2.0 * f + 3.0 * g, GRID)
    rhs = 2.0 * apply_psi(1.2, f, GRID) + 3.0 * apply_psi(1.2, g, GRID)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_psi_hs_norm_values():
    assert psi_hs_norm(0.0) == 0.0
    assert psi_hs_norm(1.0) == pytest.approx(1.0 / np.sqrt(6.0), abs=1e-6)
    assert psi_hs_norm(2.25) == pytest.approx(0.9186, abs=1e-4)
    assert psi_hs_norm(2.25) < 1.0


def test_far1_q_zero_matches_iid_bitwise():
    grid = make_uniform_grid(40)
    iid = iid_bm_sample(DgpSpec("iid_bm", n=60, grid=grid, seed=31))
    far = far1_sample(DgpSpec("far1", n=60, grid=grid, seed=31, q=0.0))
    assert np.array_equal(iid.values, far.values)


def test_far1_rejects_nonstationary_kernel():
    with pytest.raises(NonStationaryKernel):
        DgpSpec("far1", n=10, grid=GRID, seed=0, q=3.0)
    with pytest.raises(NonStationaryKernel):
        DgpSpec("far1", n=10, grid=GRID, seed=0, q=np.sqrt(6.0))


def test_far1_strong_dependence_stays_bounded():
    grid = make_uniform_grid(50)
    spec = DgpSpec("far1", n=300, grid=grid, seed=32, q=2.25)
    max_norm = 0.0
    for rep in range(100):
        s = far1_sample(spec, replication=rep)
        norms = ((s.values**2) * grid.weights).sum(axis=1)
        max_norm = max(max_norm, norms.max())
        assert integrated_autocov(s, 1) > 0.0
    assert max_norm < 200.0


def test_far1_autocovariance_decays_geometrically():
    grid = make_uniform_grid(50)
    wins = 0
    reps = 40
    for rep in range(reps):
        spec = DgpSpec("far1", n=2000, grid=grid, seed=33, q=0.75)
        s = far1_sample(spec, replication=rep)
        if integrated_autocov(s, 1) > integrated_autocov(s, 5):
            wins += 1
    assert wins >= int(0.95 * reps)


def test_reproducibility_bitwise():
    spec = DgpSpec("far1", n=25, grid=GRID, seed=34, q=1.5)
    a = simulate_sample(spec, replication=3, series=1)
    b = simulate_sample(spec, replication=3, series=1)
    assert np.array_equal(a.values, b.values)
    c = simulate_sample(spec, replication=4, series=1)
    assert not np.array_equal(a.values, c.values)


def test_reversing_both_samples_preserves_t():
    grid = make_uniform_grid(30)
    spec = DgpSpec("far1", n=50, grid=grid, seed=35, q=1.5)
    x = simulate_sample(spec, 0, 0)
    y = simulate_sample(spec, 0, 1)
    t, _ = compute_t_stat(x, y, 4)
    xr = FunctionalSample(x.values[::-1], grid)
    yr = FunctionalSample(y.values[::-1], grid)
    tr, _ = compute_t_stat(xr, yr, 4)
    assert tr == pytest.approx(t, rel=1e-10)


def test_monte_carlo_single_rep_rates_are_binary():
    grid = make_uniform_grid(20)
    spec = DgpSpec("iid_bm", n=40, grid=grid, seed=36)
    report = run_monte_carlo(spec, spec, reps=1, config=TestConfig(H=2))
    assert all(r in (0.0, 1.0) for r in report.rejection_rates.values())
    assert report.failures == 0


def test_monte_carlo_rates_ordered_and_report_shape():
    grid = make_uniform_grid(20)
    spec = DgpSpec("iid_bm", n=60, grid=grid, seed=37)
    report = run_monte_carlo(spec, spec, reps=40, config=TestConfig(H=3))
    r = report.rejection_rates
    assert r[0.10] >= r[0.05] >= r[0.01]
    assert all(0.0 <= v <= 1.0 for v in r.values())
    assert report.n == 60 and report.H == 3 and report.m == 20
    assert len(report.v_stats) == 40
    csv_text = mc_report_csv(report)
    assert csv_text.splitlines()[0].startswith("n,H,dgp")
    payload = mc_report_json_dict(report)
    assert payload["rejection_rates"].keys() == {"0.10", "0.05", "0.01"}


def test_monte_carlo_thread_count_invariance():
    grid = make_uniform_grid(20)
    spec = DgpSpec("far1", n=50, grid=grid, seed=38, q=1.5)
    cfg = TestConfig(H=3)
    a = run_monte_carlo(spec, spec, reps=12, config=cfg, threads=1)
    b = run_monte_carlo(spec, spec, reps=12, config=cfg, threads=3)
    assert json.dumps(mc_report_json_dict(a)) == json.dumps(mc_report_json_dict(b))


def test_monte_carlo_progress_callback():
    grid = make_uniform_grid(15)
    spec = DgpSpec("iid_bm", n=30, grid=grid, seed=40)
    calls = []
    run_monte_carlo(spec, spec, reps=7, config=TestConfig(H=2),
                    progress=lambda done, total: calls.append((done, total)))
    assert len(calls) == 7
    assert calls[-1] == (7, 7)


def test_monte_carlo_validates_inputs():
    grid = make_uniform_grid(20)
    spec = DgpSpec("iid_bm", n=40, grid=grid, seed=39)
    other = DgpSpec("iid_bm", n=41, grid=grid, seed=39)
    with pytest.raises(ValueError):
        run_monte_carlo(spec, other, reps=2)
    with pytest.raises(ValueError):
        run_monte_carlo(spec, spec, reps=0)


def test_dgp_spec_validation():
    with pytest.raises(ValueError):
        DgpSpec("white_noise", n=10, grid=GRID, seed=0)
    with pytest.raises(ValueError):
        DgpSpec("iid_bm", n=0, grid=GRID, seed=0)
    with pytest.raises(ValueError):
        DgpSpec("far1", n=10, grid=GRID, seed=0, q=-0.5)
    with pytest.raises(ValueError):
        DgpSpec("iid_bm", n=10, grid=GRID, seed=0, burn_in=-1)
