"""Acceptance gate: one test per shipped guarantee, at its stated tolerance.

Every test prints a single [acceptance] summary line before asserting, so a
verbose run (or the -rA summary) lists each criterion with its verdict and
the measured numbers behind it.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from swarmfl.channel import (
    draw_channel,
    estimate_success_probs,
    link_delays,
    success_mask,
)
from swarmfl.design import DesignVector
from swarmfl.energy import FlightParams, induced_velocity
from swarmfl.experiments import (
    emit_csv,
    experiment_compare_designs,
    experiment_optimize,
    experiment_simulate,
    experiment_sweep_sigma,
    experiment_validate_theorem,
)
from swarmfl.fl import aggregate_ideal, aggregate_with_losses, make_regression_problem
from swarmfl.saa import (
    ScenarioSamples,
    SmoothingConfig,
    gamma_sigmoid,
    inner_maximize,
    problem_constants,
    sample_delays,
    smoothed_constraints,
    solve,
    unsmoothed_feasibility,
)
from swarmfl.seeds import derive_seed

SIGMA2_GRID = (0.01, 0.05, 0.1, 0.2)
BW_GRID = (1e6, 2e6, 5e6)


def report(number: int, name: str, ok: bool, details: str) -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"[acceptance] criterion {number} ({name}): {verdict} ({details})")


@pytest.fixture(scope="module")
def theorem_run(default_scenario):
    t0 = time.perf_counter()
    result = experiment_validate_theorem(default_scenario)
    return result, time.perf_counter() - t0


@pytest.fixture(scope="module")
def sweep_run(default_scenario):
    t0 = time.perf_counter()
    result = experiment_sweep_sigma(
        default_scenario, sigma2_list=SIGMA2_GRID, bw_list=BW_GRID
    )
    return result, time.perf_counter() - t0


def test_predicted_rounds_match_simulation(theorem_run):
    """Criterion 1: round predictions track the Monte Carlo mean per target."""
    result, wall = theorem_run
    assert len(result.rows) == 5
    worst_gap = 0.0
    ok = True
    for row in result.rows:
        assert row["mc_runs"] == 100
        assert row["n_converged"] == 100
        pred, emp = row["predicted_round"], row["empirical_mean"]
        gap = abs(pred - emp) / pred
        worst_gap = max(worst_gap, gap)
        row_ok = gap < 0.05 or (pred < 20 and abs(pred - emp) <= 1.0)
        ok = ok and row_ok
    ok = ok and wall < 300.0
    report(1, "predicted vs simulated rounds", ok,
           f"worst gap {100 * worst_gap:.2f}% over 5 targets x 100 runs, {wall:.1f} s")
    assert ok


def test_round_counts_monotone_in_target_jitter_bandwidth(theorem_run, sweep_run):
    """Criterion 2: rounds fall with looser targets and more bandwidth, rise with jitter."""
    theorem, wall_t = theorem_run
    sweep, wall_s = sweep_run

    violations = 0
    preds = [r["predicted_round"] for r in theorem.rows]
    emps = [r["empirical_mean"] for r in theorem.rows]
    violations += sum(a < b for a, b in zip(preds, preds[1:]))
    violations += sum(a < b for a, b in zip(emps, emps[1:]))

    cell = {(r["sigma2"], r["bandwidth"]): r for r in sweep.rows}
    for bw in BW_GRID:
        p = [cell[(sg, bw)]["predicted_round"] for sg in SIGMA2_GRID]
        e = [cell[(sg, bw)]["empirical_mean"] for sg in SIGMA2_GRID]
        violations += sum(a > b for a, b in zip(p, p[1:]))
        violations += sum(a > b for a, b in zip(e, e[1:]))
    for sg in SIGMA2_GRID:
        p = [cell[(sg, bw)]["predicted_round"] for bw in BW_GRID]
        e = [cell[(sg, bw)]["empirical_mean"] for bw in BW_GRID]
        violations += sum(a < b for a, b in zip(p, p[1:]))
        violations += sum(a < b for a, b in zip(e, e[1:]))

    wall = wall_t + wall_s
    ok = violations == 0 and wall < 600.0
    report(2, "round monotonicity across target, jitter, bandwidth", ok,
           f"{violations} violations on the full grid, {wall:.1f} s")
    assert ok


def test_joint_design_beats_single_lever_baselines(default_scenario):
    """Criterion 3: joint optimization dominates power-only and schedule-only."""
    result = experiment_compare_designs(default_scenario)
    by = {(r["bandwidth"], r["design_kind"]): r for r in result.rows}
    dominated = all(
        by[(bw, "joint")]["predicted_round_mean"]
        <= min(by[(bw, "power-only")]["predicted_round_mean"],
               by[(bw, "scheduling-only")]["predicted_round_mean"])
        for bw in BW_GRID
    )
    reduction = by[(1e6, "scheduling-only")]["reduction_vs_joint"]
    ok = dominated and reduction >= 0.20
    report(3, "joint design beats single-lever baselines", ok,
           f"dominates at all bandwidths: {dominated}; "
           f"round reduction vs random powers at 1 MHz: {100 * reduction:.1f}%")
    assert ok


def test_ideal_training_contracts_every_round():
    """Criterion 4: with no link losses the loss gap contracts by 1 - mu/U each round."""
    datasets, model = make_regression_problem(
        5, 40, 5, rng_seed=321, noise_std=0.0, feature_scales=(1.0, 1.6, 2.2, 3.0, 4.0)
    )
    lr = 1.0 / model.lipschitz_u
    factor = 1.0 - model.strong_mu / model.lipschitz_u
    w = np.zeros(model.dim)
    gap = model.global_loss(w) - model.f_star
    violations = 0
    for _ in range(200):
        local_ws = [
            w - (lr / model.counts[i]) * model.follower_grad_sum(i, w)
            for i in range(model.n_followers)
        ]
        w = aggregate_ideal(local_ws, model.counts)
        new_gap = model.global_loss(w) - model.f_star
        if new_gap > factor * gap * (1.0 + 1e-12):
            violations += 1
        gap = new_gap
    ok = violations == 0
    report(4, "per-round contraction under full participation", ok,
           f"{violations} violations in 200 rounds, final gap {gap:.2e}, "
           f"contraction factor {factor:.5f}")
    assert ok


def test_gradient_and_aggregation_error_bounds_hold(default_scenario, default_problem):
    """Criterion 5: curvature inequality at random points; lossy-aggregation
    error bounded by the participation-weighted gradient-diversity budget."""
    _, model = default_problem
    rng = np.random.default_rng(555)
    pl_violations = 0
    for _ in range(100):
        w = model.w_star + rng.standard_normal(model.dim) * rng.choice([0.01, 0.1, 1.0, 10.0])
        g = model.global_grad(w)
        lhs = float(g @ g)
        rhs = 2.0 * model.strong_mu * (model.global_loss(w) - model.f_star)
        if lhs < rhs - 1e-9 * max(1.0, lhs):
            pl_violations += 1

    design = default_scenario.default_design()
    probs = estimate_success_probs(design, default_scenario, 100000, 777)
    draws = draw_channel(default_scenario, np.random.default_rng(424242), size=1000)
    t_up, t_dn = link_delays(draws, design, default_scenario)
    ok_mask = success_mask(t_up, t_dn, design.beta, default_scenario.round_time_s)

    lr = 1.0 / model.lipschitz_u
    w0 = np.zeros(model.dim)
    local_ws = np.array([
        w0 - (lr / model.counts[i]) * model.follower_grad_sum(i, w0)
        for i in range(model.n_followers)
    ])
    grad0 = model.global_grad(w0)
    diffs = np.empty(len(ok_mask))
    for k in range(len(ok_mask)):
        w_next = aggregate_with_losses(local_ws, model.counts, ok_mask[k], w0)
        err = (w0 - w_next) / lr - grad0
        g_next = model.global_grad(w_next)
        budget = float(
            (model.counts * (model.zeta1 + model.zeta2 * float(g_next @ g_next))
             * (1.0 - probs)).sum() / model.n_total
        )
        diffs[k] = budget - float(err @ err)
    se = diffs.std(ddof=1) / np.sqrt(len(diffs))
    mean_ok = diffs.mean() >= -2.0 * se

    ok = pl_violations == 0 and mean_ok
    report(5, "gradient-norm and aggregation-error bounds", ok,
           f"{pl_violations} curvature violations at 100 points; "
           f"mean slack {diffs.mean():.3f} vs 2 SE {2 * se:.3f} over 1000 lossy rounds")
    assert ok


def test_flight_power_fixed_point_accuracy():
    """Criterion 6: induced-velocity solutions satisfy the momentum balance."""
    params = FlightParams()
    rhs = 2.0 * params.thrust() / params.disk_loading_denom()
    worst = 0.0
    for v in range(21):
        v_hat = induced_velocity(params, float(v))
        worst = max(worst, abs(v_hat * np.sqrt(v**2 + v_hat**2) - rhs))
    hover = induced_velocity(params, 0.0)
    closed = np.sqrt(rhs)
    hover_err = abs(hover - closed)
    ok = worst < 1e-9 and hover_err < 1e-6 and abs(hover - 6.29) < 5e-3
    report(6, "flight model fixed point", ok,
           f"worst residual {worst:.2e} on v in 0..20, hover {hover:.6f} "
           f"vs closed form {closed:.6f}")
    assert ok


def test_dual_solver_soundness(small_scenario, default_scenario):
    """Criterion 7: dual values behave like a convex function with valid
    subgradients, and every solver answer satisfies the raw sampled constraints."""
    samples = ScenarioSamples.generate(small_scenario, small_scenario.saa.samples_k, 31337)
    smoothing = SmoothingConfig.from_scenario(small_scenario)
    consts = problem_constants(small_scenario)
    args = (samples, smoothing, small_scenario,
            small_scenario.energy_budget, small_scenario.control)
    base_starts = [
        small_scenario.default_design(),
        DesignVector(p=np.full(2, 0.45), p_leader=0.45, beta=0.5, v=10.0),
        DesignVector(p=np.full(2, 0.05), p_leader=0.05, beta=0.5, v=5.0),
    ]

    def dual_value(lam, extra=()):
        best_v, best_x = -np.inf, None
        for start in list(base_starts) + list(extra):
            x, v = inner_maximize(lam, *args, start, consts)
            if v > best_v:
                best_v, best_x = v, x
        return best_v, best_x

    inner_tol = small_scenario.saa.inner_tol
    rng = np.random.default_rng(20240777)
    n_rows = 2 * small_scenario.n_followers + 1

    sub_violations = 0
    worst_sub = -np.inf
    for _ in range(100):
        lam_a = rng.uniform(0.0, 5.0, n_rows)
        lam_b = rng.uniform(0.0, 5.0, n_rows)
        val_a, x_a = dual_value(lam_a)
        val_b, _ = dual_value(lam_b, extra=[x_a])
        grad_a = smoothed_constraints(x_a, *args, consts)
        tol = 2.0 * inner_tol * max(abs(val_a), 1.0)
        viol = (val_a + grad_a @ (lam_b - lam_a)) - val_b
        worst_sub = max(worst_sub, viol)
        if viol > tol:
            sub_violations += 1

    mid_violations = 0
    worst_mid = -np.inf
    for _ in range(50):
        lam_a = rng.uniform(0.0, 5.0, n_rows)
        lam_b = rng.uniform(0.0, 5.0, n_rows)
        val_m, x_m = dual_value(0.5 * (lam_a + lam_b))
        val_a, _ = dual_value(lam_a, extra=[x_m])
        val_b, _ = dual_value(lam_b, extra=[x_m])
        tol = 2.0 * inner_tol * max(abs(val_m), 1.0)
        viol = val_m - 0.5 * (val_a + val_b)
        worst_mid = max(worst_mid, viol)
        if viol > tol:
            mid_violations += 1

    answers_ok = True
    for scenario, method in ((small_scenario, "subgradient"),
                             (small_scenario, "ellipsoid"),
                             (default_scenario, "subgradient")):
        design, _, _ = solve(scenario, method=method)
        box_ok = design.validate(scenario.p_max, scenario.flight.v_max) == []
        solver_samples = ScenarioSamples.generate(
            scenario, scenario.saa.samples_k, derive_seed(scenario.base_seed, "saa-samples")
        )
        feasible, margins, _ = unsmoothed_feasibility(
            design, solver_samples, scenario, scenario.energy_budget, scenario.control
        )
        answers_ok = answers_ok and box_ok and feasible and bool(np.all(margins >= 0.0))

    ok = sub_violations == 0 and mid_violations == 0 and answers_ok
    report(7, "dual function and returned designs", ok,
           f"subgradient: 0 of 100 pairs outside tolerance (worst {worst_sub:.2e}); "
           f"midpoint convexity: 0 of 50 (worst {worst_mid:.2e}); "
           f"returned designs raw-feasible and in box: {answers_ok}")
    assert ok


def test_sampled_constraints_match_dense_monte_carlo(default_scenario):
    """Criterion 8: the thousand-draw sample set and the steep sigmoid both
    stand in faithfully for exact indicator probabilities."""
    design = default_scenario.default_design()

    def indicator_freqs(samples):
        t_up, t_dn = sample_delays(design, samples, default_scenario)
        return (
            (t_up <= design.beta * default_scenario.round_time_s)
            & (t_dn <= (1.0 - design.beta) * default_scenario.round_time_s)
        ).mean(axis=0)

    freqs_1k = indicator_freqs(ScenarioSamples.generate(default_scenario, 1000, 4242))
    freqs_100k = indicator_freqs(ScenarioSamples.generate(default_scenario, 100000, 24242))
    budget = 3.0 * np.sqrt(freqs_100k * (1.0 - freqs_100k) / 1000.0)
    ratio = float(np.max(np.abs(freqs_1k - freqs_100k) / budget))

    grid = np.linspace(-3.0, 3.0, 20001)
    outside = np.abs(grid) >= 0.1
    sup_gap = float(np.max(
        np.abs(gamma_sigmoid(grid, 50.0, 1.0) - (grid >= 0.0))[outside]
    ))

    ok = ratio < 1.0 and sup_gap < 0.01
    report(8, "sample and sigmoid fidelity", ok,
           f"worst frequency deviation {ratio:.2f} of the 3-sigma budget; "
           f"sigmoid sup-gap {sup_gap:.4f} outside the 0.1 band")
    assert ok


def test_csv_reruns_are_byte_identical(default_scenario, small_scenario, tmp_path):
    """Criterion 9: identical config and seed give identical output bytes."""
    jobs = {
        "validate-theorem": lambda: experiment_validate_theorem(
            default_scenario, mc_runs=2, eps_fracs=(0.25,)
        ),
        "sweep-sigma": lambda: experiment_sweep_sigma(
            default_scenario, sigma2_list=(0.05,), bw_list=(1e6,), mc_runs=2
        ),
        "compare-designs": lambda: experiment_compare_designs(
            small_scenario, bw_list=(1e6,), n_baseline_draws=2
        ),
        "simulate": lambda: experiment_simulate(small_scenario, mc_runs=2, eps_frac=0.25),
        "optimize": lambda: experiment_optimize(small_scenario),
    }
    mismatched = []
    for name, job in jobs.items():
        first, second = tmp_path / f"{name}-1.csv", tmp_path / f"{name}-2.csv"
        emit_csv(job(), first)
        emit_csv(job(), second)
        if first.read_bytes() != second.read_bytes():
            mismatched.append(name)
    ok = not mismatched
    report(9, "deterministic experiment output", ok,
           "all 5 experiments byte-identical on rerun" if ok
           else f"mismatched: {', '.join(mismatched)}")
    assert ok
