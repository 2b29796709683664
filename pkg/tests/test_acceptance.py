"""Acceptance gate: one test per criterion, one printed pass/fail line each.

Criteria run against the shipped scenario configs at their committed
seeds; statistical checks use fixed seed ranges so every run of this
module is deterministic.
"""

import dataclasses
import math
import time
from pathlib import Path

import numpy as np
import pytest

import seqconformal as sc
from seqconformal.martingale import initial_state, jumper_step

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
QUICK = {"n_pre": 2000, "n_post": 2000}


def report(num: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")


def load(name: str) -> sc.ScenarioConfig:
    return sc.ScenarioConfig.from_file(SCENARIOS / f"{name}.cfg")


@pytest.fixture(scope="module")
def noncryptic_full():
    cfg = load("non_cryptic")
    start = time.perf_counter()
    summary = sc.run_scenario(cfg, write_artifacts=False)
    return summary, time.perf_counter() - start


@pytest.fixture(scope="module")
def cryptic_full_20():
    cfg = load("cryptic")
    return [sc.run_scenario(cfg, seed=cfg.seed + i, write_artifacts=False)
            for i in range(20)]


def test_criterion_1_noncryptic_detection(noncryptic_full):
    full, elapsed = noncryptic_full
    quick = sc.run_scenario(dataclasses.replace(load("non_cryptic"), **QUICK),
                            write_artifacts=False)
    ok = (full.final_log10_capital > 100
          and quick.final_log10_capital > 20
          and elapsed < 30.0)
    report(1, ok, f"full final log10 S = {full.final_log10_capital:.1f} (> 100), "
                  f"quick = {quick.final_log10_capital:.1f} (> 20), "
                  f"runtime {elapsed:.1f}s (< 30s)")
    assert full.final_log10_capital > 100
    assert quick.final_log10_capital > 20
    assert elapsed < 30.0


def test_criterion_2_cryptic_blindness(cryptic_full_20):
    summaries = cryptic_full_20
    reject_fraction = np.mean([s.ks_all.reject for s in summaries])
    median_final = float(np.median([s.final_log10_capital for s in summaries]))
    low_max = sum(s.max_log10_capital < 2 for s in summaries)
    ok = reject_fraction <= 0.10 and median_final < 1 and low_max >= 18
    report(2, ok, f"KS reject fraction = {reject_fraction:.2f} (<= 0.10), "
                  f"median final log10 S = {median_final:.1f} (< 1), "
                  f"max log10 S < 2 in {low_max}/20 seeds (>= 18)")
    assert reject_fraction <= 0.10
    assert median_final < 1
    assert low_max >= 18


def test_criterion_3_cryptic_line_exactness():
    rng = np.random.default_rng(2024)
    worst_cond1 = worst_cond2 = 0.0
    for _ in range(100):
        sx, sy = rng.uniform(0.3, 3, 2)
        r = rng.uniform(-0.9, 0.9)
        q0 = sc.BivariateGaussian(rng.uniform(-5, 5), rng.uniform(-5, 5),
                                  sx, sy, r * sx * sy)
        pair = sc.cryptic_shift(q0, rng.uniform(-30, 30))
        rep = sc.verify_conditions(pair.q0, pair.q1)
        worst_cond1 = max(worst_cond1, rep.cond1_max_residual)
        worst_cond2 = max(worst_cond2, rep.cond2_residual)
    # off-line perturbation by delta must show up as exactly delta
    q0 = sc.BivariateGaussian(0, 0, 1, 1, 0.5)
    base = sc.cryptic_shift(q0, 20.0).q1
    delta_errors = []
    for delta in (0.1, 1.0):
        perturbed = dataclasses.replace(base, mu_y=base.mu_y + delta)
        rep = sc.verify_conditions(q0, perturbed)
        delta_errors.append(abs(rep.cond1_max_residual - delta))
    ok = worst_cond1 <= 1e-10 and worst_cond2 <= 1e-10 and max(delta_errors) <= 1e-10
    report(3, ok, f"construction residuals <= {max(worst_cond1, worst_cond2):.1e} "
                  f"(<= 1e-10), off-line delta error <= {max(delta_errors):.1e}")
    assert worst_cond1 <= 1e-10
    assert worst_cond2 <= 1e-10
    assert max(delta_errors) <= 1e-10


def test_criterion_4_score_distribution_invariance():
    q0 = sc.BivariateGaussian(0, 0, 1, 1, 0.5)
    pair = sc.cryptic_shift(q0, 20.0)
    rejections = 0
    for seed in range(100, 120):
        rng = sc.RandomStream(seed)
        a = [sc.oracle_score(q0, z) for z in sc.sample(q0, rng.substream(0), 10_000)]
        b = [sc.oracle_score(q0, z)
             for z in sc.sample(pair.q1, rng.substream(1), 10_000)]
        rejections += sc.two_sample_ks(a, b, alpha=0.01).reject
    ok = 20 - rejections >= 18
    report(4, ok, f"two-sample KS non-rejections: {20 - rejections}/20 (>= 18)")
    assert 20 - rejections >= 18


def test_criterion_5_validity_and_fairness():
    q0 = sc.BivariateGaussian(0, 0, 1, 1, 0.5)
    # (a) IID data: transducer p-values pass KS uniformity
    rejections = 0
    for seed in range(200, 220):
        rng = sc.RandomStream(seed)
        stream = sc.sample(q0, rng.substream(0), 10_000)
        pvals = [p.value for p in sc.run_transducer(sc.PredictiveOracle(q0),
                                                    stream, rng.substream(1))]
        rejections += sc.ks_uniform(pvals, alpha=0.01).reject
    uniform_ok = 20 - rejections >= 18

    # (b) martingale fairness: E[S_5] = 1 under uniform p-values
    cfg = sc.JumperConfig()
    ps = np.random.default_rng(123).random((100_000, 5))
    total = 0.0
    for row in ps:
        state = initial_state(cfg)
        for p in row:
            state = jumper_step(state, cfg, p)
        total += state.total
    mean_s5 = total / len(ps)
    fairness_ok = 0.98 <= mean_s5 <= 1.02

    # (c) Ville: P(max S >= 10) over 200 IID runs of length 1000
    exceed = 0
    for seed in range(200):
        p = np.random.default_rng(5000 + seed).random(1000)
        if max(v for _, v in sc.run_ctm(cfg, p)) >= 1.0:  # log10 scale
            exceed += 1
    ville_rate = exceed / 200
    ville_ok = ville_rate <= 0.16

    ok = uniform_ok and fairness_ok and ville_ok
    report(5, ok, f"KS uniform passes {20 - rejections}/20 (>= 18), "
                  f"mean S_5 = {mean_s5:.4f} (in [0.98, 1.02]), "
                  f"P(max S >= 10) = {ville_rate:.3f} (<= 0.16)")
    assert uniform_ok
    assert fairness_ok
    assert ville_ok


def test_criterion_6_efficiency_paradox(noncryptic_full, cryptic_full_20):
    cryptic = cryptic_full_20[0]  # shipped seed
    noncryptic, _ = noncryptic_full
    cryptic_ratio = cryptic.mean_width_post / cryptic.mean_width_pre
    pooled_steps = (cryptic.ks_all.n - 1)
    pooled_miss = 1.0 - (
        cryptic.coverage_pre * (load("cryptic").n_pre - 1)
        + cryptic.coverage_post * load("cryptic").n_post) / pooled_steps
    noncryptic_ratio = noncryptic.mean_width_post / noncryptic.mean_width_pre
    ok = (0.98 <= cryptic_ratio <= 1.02
          and pooled_miss <= 0.05 + 0.015
          and noncryptic_ratio > 1.2)
    report(6, ok, f"cryptic width ratio = {cryptic_ratio:.4f} (in [0.98, 1.02]), "
                  f"pooled miscoverage = {pooled_miss:.4f} (<= 0.065), "
                  f"non-cryptic width ratio = {noncryptic_ratio:.4f} (> 1.2)")
    assert 0.98 <= cryptic_ratio <= 1.02
    assert pooled_miss <= 0.05 + 0.015
    # Known shortfall: under the specified online protocol the non-cryptic
    # post/pre mean-width ratio concentrates near 1.185 +- 0.012 across seeds
    # (confirmed by an independent brute-force simulation), so the stated
    # threshold of 1.2 fails for typical seeds, including the shipped one.
    assert noncryptic_ratio > 1.2


def test_criterion_7_crypticity_breaking():
    cfg = dataclasses.replace(load("ensemble_cryptic"), **QUICK)
    summary = sc.run_scenario(cfg, write_artifacts=False)
    ok = summary.final_log10_capital > 10
    report(7, ok, f"ensemble quick final log10 S = "
                  f"{summary.final_log10_capital:.1f} (> 10)")
    assert summary.final_log10_capital > 10


def test_criterion_8_determinism(tmp_path):
    files = ("stream.csv", "pvalues.csv", "martingale.csv", "intervals.csv",
             "summary.json")
    all_ok = True
    for name in ("non_cryptic", "cryptic", "ensemble_cryptic"):
        cfg = load(name)
        out_a = tmp_path / name / "a"
        out_b = tmp_path / name / "b"
        sc.run_scenario(cfg, output_dir=out_a)
        sc.run_scenario(cfg, output_dir=out_b)
        for f in files:
            if (out_a / f).read_bytes() != (out_b / f).read_bytes():
                all_ok = False
    report(8, all_ok, "byte-identical artifacts for all three shipped configs"
                      if all_ok else "artifact mismatch between reruns")
    assert all_ok
