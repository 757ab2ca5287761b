import itertools
import math

import numpy as np
import pytest
from scipy import stats as sps

from diffbounds import (
    AmplitudeSpec,
    PointSet,
    SiteDistribution,
    clt_experiment,
    enumerate_exact,
    exact_variance,
    mc_tail,
    verify_laplace_gap,
    verify_ld_bound,
    verify_variance_growth,
)
from diffbounds.experiments import (
    EnumerationTooLarge,
    centered_samples,
    clopper_pearson,
    laplace_gap_exact,
)
from diffbounds.rates import OutOfRegimeError

from conftest import segment, two_point_dislocations


def brute_enumeration_oracle(ps, spec, obs):
    """Plain-python enumeration of X over every configuration."""
    import diffbounds.correlation as corr

    n = len(ps)
    dists = spec.site_distributions(n)
    pts = ps.points
    if spec.kind == "A":
        mean = corr.exact_mean_A(ps, spec, obs)
    else:
        mean = corr.exact_mean_B(ps, spec, obs)
    outcomes = []
    for combo in itertools.product(*(range(len(d.probs)) for d in dists)):
        p = 1.0
        for i, c in enumerate(combo):
            p *= float(dists[i].probs[c])
        if spec.kind == "A":
            eta = [complex(dists[i].values[c]) for i, c in enumerate(combo)]
            raw = sum(
                eta[i] * eta[j].conjugate() * complex(np.asarray(obs.eval_x(pts[i] - pts[j])))
                for i in range(n)
                for j in range(n)
            )
        else:
            w = [np.atleast_2d(dists[i].values)[c] for i, c in enumerate(combo)]
            raw = sum(
                complex(np.asarray(obs.eval_x(pts[i] - pts[j] + w[i] - w[j])))
                for i in range(n)
                for j in range(n)
            )
        outcomes.append((p, raw - n * mean))
    return outcomes


class TestEnumerateExact:
    def test_deterministic_single_outcome(self, gauss1, lattice9):
        spec = AmplitudeSpec(
            default=SiteDistribution(values=np.array([1.5 + 0j]), probs=np.array([1.0]))
        )
        dist = enumerate_exact(lattice9, spec, gauss1)
        assert dist.total_configs == 1
        assert dist.values[0] == pytest.approx(0.0, abs=1e-12)
        assert dist.probs[0] == 1.0

    def test_two_site_bernoulli_shape(self, gauss1, bernoulli):
        ps = PointSet(dim=1, points=np.array([[0.0], [1.0]]), min_dist=1.0)
        dist = enumerate_exact(ps, bernoulli, gauss1)
        assert dist.total_configs == 4
        vals = np.sort(np.asarray(dist.values, dtype=float))
        assert np.allclose(vals + vals[::-1], 0.0, atol=1e-12)  # symmetric about 0

    def test_matches_python_oracle_model_A(self, gauss1, bernoulli):
        ps = PointSet(dim=1, points=np.array([[0.0], [1.0], [2.6]]), min_dist=1.0)
        dist = enumerate_exact(ps, bernoulli, gauss1)
        oracle = brute_enumeration_oracle(ps, bernoulli, gauss1)
        got = sorted(zip(dist.probs, np.asarray(dist.values, float)))
        want = sorted((p, v.real) for p, v in oracle)
        for (pg, vg), (pw, vw) in zip(got, want):
            assert pg == pytest.approx(pw, rel=1e-12)
            assert vg == pytest.approx(vw, abs=1e-12)

    def test_matches_python_oracle_model_B(self, gauss1):
        ps = PointSet(dim=1, points=np.array([[0.0], [1.0], [2.2]]), min_dist=1.0)
        spec = two_point_dislocations(1, 0.2)
        dist = enumerate_exact(ps, spec, gauss1)
        oracle = brute_enumeration_oracle(ps, spec, gauss1)
        got = sorted(zip(dist.probs, np.asarray(dist.values, float)))
        want = sorted((p, v.real) for p, v in oracle)
        for (pg, vg), (pw, vw) in zip(got, want):
            assert vg == pytest.approx(vw, abs=1e-12)

    def test_second_moment_matches_exact_variance(self, gauss1, bernoulli):
        ps = PointSet(dim=1, points=np.array([[0.0], [1.0], [2.0], [3.3]]), min_dist=1.0)
        dist = enumerate_exact(ps, bernoulli, gauss1)
        st = exact_variance(ps, bernoulli, gauss1)
        assert complex(dist.second_moment()).real == pytest.approx(st.variance, abs=1e-12)

    def test_refuses_oversized(self, gauss1, bernoulli):
        ps = segment(24)
        with pytest.raises(EnumerationTooLarge):
            enumerate_exact(ps, bernoulli, gauss1, cap=2**20)

    def test_tail_ties_count_as_exceedance(self, gauss1, bernoulli):
        ps = PointSet(dim=1, points=np.array([[0.0], [1.0]]), min_dist=1.0)
        dist = enumerate_exact(ps, bernoulli, gauss1)
        top = float(np.max(np.abs(dist.values)))
        assert dist.tail(top) > 0.0
        assert dist.tail(np.nextafter(top, np.inf)) == 0.0


class TestClopperPearson:
    def test_edges(self):
        lo, hi = clopper_pearson(0, 100)
        assert lo == 0.0 and 0 < hi < 0.1
        lo, hi = clopper_pearson(100, 100)
        assert hi == 1.0 and 0.9 < lo < 1.0

    def test_contains_truth_for_binomial_draws(self):
        rng = np.random.default_rng(0)
        p = 0.3
        misses = 0
        for _ in range(200):
            k = rng.binomial(500, p)
            lo, hi = clopper_pearson(int(k), 500)
            misses += not (lo <= p <= hi)
        assert misses <= 4  # 99% interval, 200 trials


class TestMcTail:
    def test_epsilon_zero_full_mass(self, gauss1, bernoulli, lattice9):
        p, lo, hi = mc_tail(lattice9, bernoulli, gauss1, 0.0, 200, seed=0)
        assert p == 1.0 and hi == 1.0

    def test_requires_min_samples(self, gauss1, bernoulli, lattice9):
        with pytest.raises(ValueError):
            mc_tail(lattice9, bernoulli, gauss1, 0.1, 50, seed=0)

    def test_tail_within_exact_band(self, gauss1, bernoulli):
        # empirical frequencies must sit in the 99% binomial band of the
        # exact tail for every atom-aligned probe
        ps = PointSet(dim=1, points=np.array([[0.0], [1.0], [2.5]]), min_dist=1.0)
        dist = enumerate_exact(ps, bernoulli, gauss1)
        n_samples = 4000
        samples = centered_samples(ps, bernoulli, gauss1, n_samples, seed=13)
        atoms = np.unique(np.round(np.abs(np.asarray(dist.values, float)), 12))
        for atom in atoms[atoms > 0]:
            for probe in (atom * 0.999, atom * 1.001):
                p_exact = dist.tail(probe)
                k = int(np.sum(np.abs(samples) >= probe))
                lo = sps.binom.ppf(0.005, n_samples, p_exact)
                hi = sps.binom.ppf(0.995, n_samples, p_exact)
                assert lo <= k <= hi

    def test_ci_width_shrinks_with_samples(self, gauss1, bernoulli):
        ps = segment(8)
        st = exact_variance(ps, bernoulli, gauss1)
        eps = math.sqrt(st.variance) / len(ps)
        _, lo1, hi1 = mc_tail(ps, bernoulli, gauss1, eps, 2000, seed=1)
        _, lo2, hi2 = mc_tail(ps, bernoulli, gauss1, eps, 8000, seed=1)
        ratio = (hi1 - lo1) / (hi2 - lo2)
        assert 1.4 <= ratio <= 2.9  # roughly sqrt(4) = 2, asserted loosely


class TestVerifyLdBound:
    def test_exact_instance_all_pass(self, gauss1, bernoulli, lattice9):
        rep = verify_ld_bound(lattice9, bernoulli, gauss1, None, 0, "A-discrete", seed=0)
        assert rep.all_pass
        assert rep.config["mode"] == "exact-enumeration"
        assert "all_atoms" in rep.verdicts

    def test_exact_instance_sobolev_form(self, gauss1, bernoulli, lattice9):
        rep = verify_ld_bound(lattice9, bernoulli, gauss1, None, 0, "A-sobolev", seed=0)
        assert rep.all_pass

    def test_exact_model_B(self, gauss1, lattice9):
        spec = two_point_dislocations(1, 0.125)
        for which in ("B-discrete", "B-sobolev"):
            rep = verify_ld_bound(lattice9, spec, gauss1, None, 0, which, seed=0)
            assert rep.all_pass

    def test_mc_instance(self, gauss1, bernoulli):
        ps = segment(64)
        rep = verify_ld_bound(ps, bernoulli, gauss1, None, 2000, "A-discrete", seed=7)
        assert rep.all_pass
        assert rep.config["mode"] == "monte-carlo"
        assert "samples" in rep.arrays

    def test_sharp_below_simple_verdict_present(self, gauss1, bernoulli, lattice9):
        rep = verify_ld_bound(lattice9, bernoulli, gauss1, None, 0, "A-discrete", seed=0)
        assert rep.verdicts.get("sharp_below_simple") is True

    def test_mismatched_model_rejected(self, gauss1, bernoulli, lattice9):
        with pytest.raises(ValueError):
            verify_ld_bound(lattice9, bernoulli, gauss1, None, 0, "B-discrete", seed=0)

    def test_reproducible_reports(self, gauss1, bernoulli):
        ps = segment(32)
        a = verify_ld_bound(ps, bernoulli, gauss1, None, 1000, "A-discrete", seed=5)
        b = verify_ld_bound(ps, bernoulli, gauss1, None, 1000, "A-discrete", seed=5)
        assert a.to_dict(canonical=True) == b.to_dict(canonical=True)

    def test_threads_do_not_change_results(self, gauss1, bernoulli):
        ps = segment(32)
        a = verify_ld_bound(ps, bernoulli, gauss1, None, 1200, "A-discrete", seed=5, threads=1)
        b = verify_ld_bound(ps, bernoulli, gauss1, None, 1200, "A-discrete", seed=5, threads=4)
        assert a.to_dict(canonical=True) == b.to_dict(canonical=True)


class TestLaplaceGap:
    def test_stable_evaluator_zero(self):
        vals = np.array([-1.0, 1.0])
        probs = np.array([0.5, 0.5])
        assert laplace_gap_exact(vals, probs, 0.0) == 0.0

    def test_stable_evaluator_vs_naive(self):
        rng = np.random.default_rng(3)
        vals = rng.normal(size=16)
        vals -= vals.mean()
        probs = np.full(16, 1 / 16)
        for c in (0.3, 0.05):
            naive = math.log(np.sum(probs * np.exp(c * vals))) - 0.5 * c * c * np.sum(
                probs * vals**2
            )
            assert laplace_gap_exact(vals, probs, c) == pytest.approx(naive, rel=1e-9, abs=1e-13)

    def test_two_site_bernoulli_pass(self, gauss1, bernoulli):
        ps = PointSet(dim=1, points=np.array([[0.0], [1.0]]), min_dist=1.0)
        rep = verify_laplace_gap(ps, bernoulli, gauss1)
        assert rep.all_pass
        # the bound at full scale is ~ 2 D d^3
        key = [k for k in rep.theoretical if k.startswith("gap@scale=0.0525")][0]
        assert rep.theoretical[key]["bound"] == pytest.approx(2 * 4540 * 0.0525**3, rel=1e-12)

    def test_model_B_pass(self, gauss1, lattice9):
        spec = two_point_dislocations(1, 0.125)
        rep = verify_laplace_gap(lattice9, spec, gauss1)
        assert rep.all_pass

    def test_slope_at_least_cubic(self, gauss1, bernoulli, lattice9):
        rep = verify_laplace_gap(lattice9, bernoulli, gauss1)
        assert rep.empirical["cubic_order"]["slope"] >= 2.9

    def test_rejects_out_of_regime_targets(self, gauss1, bernoulli, lattice9):
        with pytest.raises(OutOfRegimeError):
            verify_laplace_gap(lattice9, bernoulli, gauss1, target_scales=[0.2])


class TestClt:
    def test_rejects_zero_variance(self, gauss1, lattice9):
        spec = AmplitudeSpec(
            default=SiteDistribution(values=np.array([1.0 + 0j]), probs=np.array([1.0]))
        )
        with pytest.raises(ValueError):
            clt_experiment(lattice9, spec, gauss1, 1000, seed=0)

    def test_small_run_sane(self, gauss1, bernoulli):
        ps = segment(64)
        rep = clt_experiment(ps, bernoulli, gauss1, 2000, seed=3, ks_threshold=0.05)
        assert rep.empirical["ks"]["value"] < 0.05
        assert abs(rep.empirical["moments"]["second"] - 1.0) < 0.1

    def test_ks_improves_with_volume(self, gauss1, bernoulli):
        ks = {}
        for n in (32, 512):
            rep = clt_experiment(segment(n), bernoulli, gauss1, 4000, seed=12, ks_threshold=1.0)
            ks[n] = rep.empirical["ks"]["value"]
        assert ks[512] <= ks[32] + 0.01


class TestVarianceGrowth:
    def test_lattice_ratio_increases(self, gauss1, bernoulli):
        reps = [segment(n) for n in (32, 64, 128)]
        rep = verify_variance_growth(reps, bernoulli, gauss1)
        assert rep.all_pass
        rows = rep.empirical["growth"]["rows"]
        assert rows[-1]["ratio"] > rows[0]["ratio"]

    def test_sr_roughly_constant_for_iid_lattice(self, gauss1, bernoulli):
        rows = verify_variance_growth(
            [segment(n) for n in (32, 64, 128)], bernoulli, gauss1
        ).empirical["growth"]["rows"]
        s = [r["normalized_variance"] for r in rows]
        assert max(s) - min(s) <= 0.1 * max(s)

    def test_deterministic_hypothesis_fails(self, gauss1):
        spec = AmplitudeSpec(
            default=SiteDistribution(values=np.array([1.0 + 0j]), probs=np.array([1.0]))
        )
        rep = verify_variance_growth([segment(8), segment(16)], spec, gauss1)
        assert not rep.all_pass  # ratio identically zero: hypothesis correctly fails
        rows = rep.empirical["growth"]["rows"]
        assert all(r["ratio"] == pytest.approx(0.0, abs=1e-12) for r in rows)
