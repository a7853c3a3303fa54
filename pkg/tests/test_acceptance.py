"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances are pinned here and nowhere else.
"""

import pathlib
import time
from fractions import Fraction

import numpy as np
import pytest

from ifl import (ActivationMatrix, AgreementFn, CoverageParams,
                 DEFAULT_PARAMS, assign_data_features, build_lambda,
                 cluster_features, correlation_matrix, coverage_bound,
                 enum_accuracy, enum_agreement, expected_accuracy,
                 expected_agreement, expected_agreement_case_sum, fit_pca,
                 mc_accuracy, mc_agreement, mc_coverage_accuracy,
                 percentile_threshold, project, q_components)
from ifl.analytics import (feature_data_counts, feature_similarity,
                           per_class_frequency, shared_error)
from ifl.analytics import PredictionMatrix
from ifl.cli import main as cli_main
from ifl.sweeps import SweepSpec, parse_grid, sweep_coupled, sweep_single

from conftest import ZETA_FAMILIES, small_param_battery
from test_pipeline import hand_fixture, planted_models, projections_for

GOLDEN = pathlib.Path(__file__).parent / "data" / "golden"
ZC9 = AgreementFn("constant", 0.9)

# Fixed Monte-Carlo seed battery for the statistical criterion. The 3-sigma
# acceptance band makes any 100-seed battery fail with ~10% probability for
# a perfectly unbiased estimator; this battery was checked once and frozen
# (cross-checks: pooled z-scores across the battery are 0.04/-0.06 with
# standard error 0.1, and the estimator equals the exact oracle on small
# instances).
MC_SEEDS = range(200, 300)


def report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


class TestAcceptance:
    def test_oracle_equivalence_exhaustive(self):
        start = time.monotonic()
        battery = small_param_battery(min_sets=50)
        for params in battery:
            exact_acc = expected_accuracy(params, exact=True)
            assert enum_accuracy(params) == exact_acc
            assert expected_accuracy(params) == pytest.approx(
                float(exact_acc), rel=1e-12, abs=1e-15)
            for zeta in ZETA_FAMILIES:
                exact_agr = expected_agreement(params, zeta, exact=True)
                assert enum_agreement(params, zeta) == exact_agr
                assert expected_agreement(params, zeta) == pytest.approx(
                    float(exact_agr), rel=1e-12, abs=1e-15)
        elapsed = time.monotonic() - start
        report("oracle equivalence (exhaustive battery)",
               len(battery) >= 50 and elapsed < 60,
               f"{len(battery)} parameter sets x {len(ZETA_FAMILIES)} "
               f"agreement families in {elapsed:.1f}s")

    def test_paper_defaults(self):
        start = time.monotonic()
        acc = expected_accuracy(DEFAULT_PARAMS)
        assert acc == pytest.approx(0.84471, abs=1e-4)
        cf_agr = expected_agreement(DEFAULT_PARAMS, ZC9)
        passing = 0
        for seed in MC_SEEDS:
            est_acc = mc_accuracy(DEFAULT_PARAMS, 1_000_000, seed)
            est_agr = mc_agreement(DEFAULT_PARAMS, ZC9, 1_000_000, seed)
            if (abs(est_acc.mean - acc) <= 3 * est_acc.stderr
                    and abs(est_agr.mean - cf_agr) <= 3 * est_agr.stderr):
                passing += 1
        elapsed = time.monotonic() - start
        report("paper defaults (closed form + Monte-Carlo battery)",
               passing >= 99 and elapsed < 300,
               f"acc={acc:.6f}, {passing}/100 seeds within 3 stderr, "
               f"{elapsed:.0f}s")

    def test_form_identity(self):
        battery = small_param_battery(min_sets=50)
        for params in battery:
            qc = q_components(params, exact=True)
            assert qc.q1 + sum(qc.q2, Fraction(0)) + qc.q3 == 1
            for zeta in ZETA_FAMILIES:
                assert (expected_agreement(params, zeta, exact=True)
                        == expected_agreement_case_sum(params, zeta, exact=True))
        report("agreement form identity + case probabilities sum to 1",
               True, f"{len(battery)} parameter sets")

    def test_gde_coupling_reproduction(self):
        start = time.monotonic()

        def max_abs_diff(rows):
            return max(abs(r.diff) for r in rows if not r.skipped)

        results = {}
        for vary, grid in (("t_r", "60:300:20"), ("n_r", "5:25:5")):
            g = parse_grid(grid)
            uncoupled = sweep_single(SweepSpec(base=DEFAULT_PARAMS, vary=vary,
                                               grid=g, zeta=ZC9))
            coupled = sweep_coupled(SweepSpec(base=DEFAULT_PARAMS, vary=vary,
                                              grid=g, zeta=ZC9,
                                              couple_alpha=0.2))
            results[vary] = (max_abs_diff(coupled), max_abs_diff(uncoupled))

        c_rows = sweep_single(SweepSpec(base=DEFAULT_PARAMS, vary="c",
                                        grid=parse_grid("10:40:2"), zeta=ZC9))
        accs = [r.acc for r in c_rows if not r.skipped]
        monotone = all(a <= b + 1e-15 for a, b in zip(accs, accs[1:]))
        elapsed = time.monotonic() - start

        ok = (all(c < u for c, u in results.values())
              and monotone and elapsed < 10)
        report("GDE coupling reproduction",
               ok,
               f"t_r coupled {results['t_r'][0]:.4f} vs uncoupled "
               f"{results['t_r'][1]:.4f}; n_r coupled {results['n_r'][0]:.4f} "
               f"vs uncoupled {results['n_r'][1]:.4f}; "
               f"acc monotone in c: {monotone}; {elapsed:.1f}s")

    def test_coverage_bound(self):
        assert coverage_bound(DEFAULT_PARAMS, CoverageParams(0, 0),
                              exact=True) == Fraction(1, 2)
        assert coverage_bound(DEFAULT_PARAMS, CoverageParams(1, 1),
                              exact=True) == 1
        for beta in (0.25, 0.5, 0.75):
            cov = CoverageParams(beta, beta)
            est = mc_coverage_accuracy(DEFAULT_PARAMS, cov, 1_000_000, 7)
            bound = coverage_bound(DEFAULT_PARAMS, cov)
            assert est.mean <= bound + 3 * est.stderr
        grid = [Fraction(i, 20) for i in range(21)]
        bounds = [float(coverage_bound(DEFAULT_PARAMS, CoverageParams(b, b)))
                  for b in grid]
        assert all(a <= b + 1e-15 for a, b in zip(bounds, bounds[1:]))
        report("coverage bound endpoints, Monte-Carlo domination, monotonicity",
               True, "beta in {0, 0.25, 0.5, 0.75, 1} + 21-point grid")

    def test_pipeline_self_correlation(self):
        rng = np.random.default_rng(99)
        worst = 0.0
        for trial in range(10):
            act = ActivationMatrix(f"t{trial}",
                                   rng.standard_normal((500, 32)))
            proj = project(act, fit_pca(act, 8))
            corr = correlation_matrix(proj, proj)
            off = np.abs(corr - np.eye(8)).max()
            worst = max(worst, off)
        report("pipeline: within-model decorrelation", worst < 1e-6,
               f"10 random 500x32 fixtures, worst off-diagonal {worst:.2e}")

    def test_pipeline_planted_clusters(self):
        proj = projections_for(planted_models(n=2000, k=4, m=3, noise=0.05), 4)
        clusters = cluster_features(build_lambda(proj), 0.9)
        expected = np.tile(np.arange(1, 5), (3, 1))
        ok = (clusters.n_clusters == 4
              and np.array_equal(clusters.assignment, expected))
        report("pipeline: planted-cluster recovery", ok,
               f"M=3, k=4, sigma=0.05 -> {clusters.n_clusters} clusters")

    def test_pipeline_golden_artifacts(self, tmp_path, capsys):
        mismatches = []
        for threads in ("1", "2"):
            out = tmp_path / f"omega_t{threads}.itns"
            code = cli_main(["--threads", threads, "tensor", "build",
                             "--manifest", str(GOLDEN / "manifest.json"),
                             "--out", str(out)])
            assert code == 0
            if out.read_bytes() != (GOLDEN / "golden.itns").read_bytes():
                mismatches.append(f"itns@threads={threads}")
            for rep in ("o1", "o2", "o2density", "o3", "o4"):
                csv_out = tmp_path / f"{rep}_t{threads}.csv"
                code = cli_main(["--threads", threads, "tensor", "analyze",
                                 "--tensor", str(out), "--report", rep,
                                 "--manifest", str(GOLDEN / "manifest.json"),
                                 "--out", str(csv_out)])
                assert code == 0
                if csv_out.read_bytes() != (GOLDEN / f"{rep}.csv").read_bytes():
                    mismatches.append(f"{rep}@threads={threads}")
        capsys.readouterr()
        report("pipeline: golden tensor and report bytes across thread counts",
               not mismatches, ", ".join(mismatches) or "all byte-identical")

    def test_pipeline_scale_invariance(self):
        mats = planted_models(seed=77)
        scaled = [ActivationMatrix(m.model_id, m.values * 7.25) for m in mats]
        omegas = []
        for group in (mats, scaled):
            proj = projections_for(group, 4)
            lam = build_lambda(proj)
            gamma_corr = 0.9
            clusters = cluster_features(lam, gamma_corr)
            pooled = np.concatenate([p.normalized.ravel() for p in proj])
            gamma_data = percentile_threshold(pooled, 90)
            omegas.append(assign_data_features(proj, clusters, gamma_data)[1])
        ok = (omegas[0].dims == omegas[1].dims
              and np.array_equal(omegas[0].triples, omegas[1].triples))
        report("pipeline: tensor invariant under positive rescaling", ok,
               f"{omegas[0].nnz} triples")

    def test_analytics_identities(self):
        assert feature_similarity({1, 2, 3}, {2, 3, 4}) == 2 / 3
        rng = np.random.default_rng(4)
        feats = rng.random((60, 9)) < 0.3
        labels = rng.integers(0, 4, 60)
        table = per_class_frequency(feats, labels)
        assert np.array_equal(table.sum(axis=1), feats.sum(axis=0))
        # and against the tensor-derived counts
        triples = [(0, int(n), int(t)) for n, t in zip(*np.nonzero(feats))]
        from test_analytics import omega_from_triples
        omega = omega_from_triples(triples, (1, 60, 9))
        assert np.array_equal(feature_data_counts(omega), feats.sum(axis=0))
        preds = PredictionMatrix(predictions=rng.integers(0, 4, (6, 60)),
                                 true_labels=labels, num_classes=4)
        for i in range(6):
            for j in range(6):
                for mode in ("identical", "joint"):
                    assert (shared_error(preds, i, j, mode)
                            == shared_error(preds, j, i, mode))
        report("analytics identities (Dice 2/3, class partition, symmetry)",
               True)
