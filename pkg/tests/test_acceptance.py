"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is fixed here, nothing is calibrated at runtime.
"""

import json
import math
import time

import numpy as np
import pytest

from diffbounds import (
    AmplitudeSpec,
    SiteDistribution,
    bounds_of,
    check_norm_domination,
    check_seminorm_domination,
    clt_experiment,
    exact_mean_A,
    exact_mean_B,
    exact_variance,
    gaussian,
    debye_waller_density,
    mean_density_B,
    worst_case_rate,
    tail_rate,
    recompute_constants,
    verify_laplace_gap,
    verify_ld_bound,
)
from diffbounds.battery import norm_battery, observables_for, small_enumeration_battery
from diffbounds.cli import main as cli_main
from diffbounds.correlation import autocorr_A_many, autocorr_B_many
from diffbounds.rates import RateParams, expansion_error_terms
from diffbounds.scatterers import sample_index_matrix, sample_values_many

from conftest import segment, two_point_dislocations

BERNOULLI = AmplitudeSpec(
    default=SiteDistribution(values=np.array([1.0, -1.0], dtype=complex), probs=np.array([0.5, 0.5]))
)


def report_line(num: int, text: str) -> None:
    print(f"\nACCEPTANCE {num:02d} PASS: {text}")


class TestCriterion01Constants:
    def test_constants_recomputation(self):
        t0 = time.perf_counter()
        rp = recompute_constants()
        d = rp.scale_cap
        assert 0.05257 <= d <= 0.05259
        comp_a = expansion_error_terms(2 * d, d, rp)
        comp_b = expansion_error_terms(2 * d, 0.0, rp)
        assert comp_a["total"] / d**3 <= 4540.0
        assert 4340.0 <= comp_a["leading"] / d**3 <= 4360.0
        assert comp_b["total"] / d**3 <= 4380.0
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0
        report_line(
            1,
            f"d={d:.6f}, D={comp_a['total'] / d**3:.1f}<=4540 "
            f"(leading {comp_a['leading'] / d**3:.1f}), "
            f"D~={comp_b['total'] / d**3:.1f}<=4380 [{elapsed:.2f}s]",
        )


class TestCriterion02RateIdentities:
    def test_rate_function_identities(self):
        t0 = time.perf_counter()
        params = RateParams.paper()
        d, D = params.scale_cap, params.cubic_amplitude

        grid = np.geomspace(1e-6, 300.0, 1000)
        worst_rel = 0.0
        for e in grid:
            J = worst_case_rate(float(e), params)
            j = tail_rate(float(e), 4.0, d, D)
            worst_rel = max(worst_rel, abs(J - j) / max(J, 1e-300))
        assert worst_rel <= 1e-12

        # closed form vs numeric supremum of the variational form
        t_grid = np.linspace(0.0, d, 100_000)
        worst_abs = 0.0
        for e in np.geomspace(1e-3, 100.0, 20):
            for s in (0.0, 1.0, 2.0, 3.0, 4.0):
                brute = float(np.max(e * t_grid - s * t_grid**2 / 2 - D * t_grid**3))
                worst_abs = max(worst_abs, abs(tail_rate(float(e), s, d, D) - brute))
        assert worst_abs <= 1e-9

        ratio = worst_case_rate(1e-8, params) / (1e-16 / 8.0)
        assert abs(ratio - 1.0) <= 1e-4

        worst_scale = 0.0
        for lam in (0.5, 2.0, 10.0):
            for s in (0.0, 2.0, 4.0):
                for e in np.geomspace(1e-4, 50.0, 10):
                    lhs = tail_rate(lam * float(e), lam**2 * s, d / lam, lam**3 * D)
                    rhs = tail_rate(float(e), s, d, D)
                    worst_scale = max(worst_scale, abs(lhs - rhs) / max(rhs, 1e-300))
        assert worst_scale <= 1e-10

        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0
        report_line(
            2,
            f"J=j(.;4) rel {worst_rel:.1e}, sup-gap {worst_abs:.1e}, "
            f"asymptotic ratio {ratio:.6f}, scaling rel {worst_scale:.1e} [{elapsed:.2f}s]",
        )


class TestCriterion03NormDomination:
    def test_norm_domination_battery(self):
        t0 = time.perf_counter()
        instances = norm_battery()
        assert len(instances) >= 50
        shared = observables_for(instances)
        dims = set()
        worst_violation = -math.inf
        for inst in instances:
            ps = inst["pointset"]
            dims.add(ps.dim)
            obs = shared[(ps.dim, inst["sigma"])]
            if inst["delta"] is None:
                rep = check_norm_domination(obs, ps, slack=1e-8)
            else:
                rep = check_seminorm_domination(obs, ps, inst["delta"], slack=1e-8)
            assert rep["pass"], (ps.label, inst)
            if not rep["vacuous"]:
                worst_violation = max(worst_violation, rep["lhs"] - rep["rhs"])
        assert dims == {1, 2}
        assert worst_violation <= 1e-8
        elapsed = time.perf_counter() - t0
        assert elapsed < 120.0
        report_line(
            3,
            f"{len(instances)} instances, worst lhs-rhs = {worst_violation:.3e} <= 1e-8 "
            f"[{elapsed:.1f}s]",
        )


class TestCriterion04LaplaceGap:
    def test_laplace_gap_battery(self):
        t0 = time.perf_counter()
        params = RateParams.paper()
        targets = [params.scale_cap, params.scale_cap / 2, params.scale_cap / 4, params.scale_cap / 8]
        n_checked = 0
        slopes = []
        for ps in small_enumeration_battery():
            assert len(ps) <= 12
            sigma = 1.0
            obs = gaussian(ps.dim, sigma)
            rep_a = verify_laplace_gap(ps, BERNOULLI, obs, target_scales=targets, params=params)
            assert rep_a.all_pass, (ps.label, rep_a.verdicts)
            slopes.append(rep_a.empirical["cubic_order"]["slope"])
            spec_b = two_point_dislocations(ps.dim, ps.min_dist / 8.0)
            rep_b = verify_laplace_gap(ps, spec_b, obs, target_scales=targets, params=params)
            assert rep_b.all_pass, (ps.label, rep_b.verdicts)
            slopes.append(rep_b.empirical["cubic_order"]["slope"])
            n_checked += 2
        assert bounds_of(BERNOULLI).K == 1.0
        assert min(slopes) >= 2.9
        elapsed = time.perf_counter() - t0
        assert elapsed < 120.0
        report_line(
            4,
            f"{n_checked} model runs over {len(targets)} scales each, "
            f"min slope {min(slopes):.3f} >= 2.9 [{elapsed:.1f}s]",
        )


class TestCriterion05LdBounds:
    def test_ld_bounds_battery(self):
        t0 = time.perf_counter()
        n_exact = n_mc = 0
        # exact: every enumerable battery set, both bound families
        for ps in small_enumeration_battery():
            rep = verify_ld_bound(ps, BERNOULLI, gaussian(ps.dim, 1.0), None, 0, "A-discrete", seed=0)
            assert rep.all_pass, (ps.label, rep.verdicts)
            assert rep.config["mode"] == "exact-enumeration"
            n_exact += 1
            if ps.dim == 1:
                spec_b = two_point_dislocations(1, ps.min_dist / 8.0)
                rep_b = verify_ld_bound(ps, spec_b, gaussian(1, 1.0), None, 0, "B-discrete", seed=0)
                assert rep_b.all_pass, (ps.label, rep_b.verdicts)
                n_exact += 1
        # Monte Carlo: 64 to 1024 sites, 1e4 samples each
        mc_runs = [
            (segment(64), BERNOULLI, "A-discrete", 31),
            (segment(64), BERNOULLI, "A-sobolev", 31),
            (segment(1024), BERNOULLI, "A-discrete", 32),
            (segment(64), two_point_dislocations(1, 1.0 / 8.0), "B-discrete", 33),
            (segment(64), two_point_dislocations(1, 1.0 / 8.0), "B-sobolev", 33),
            (segment(256), two_point_dislocations(1, 1.0 / 8.0), "B-discrete", 34),
        ]
        for ps, spec, which, seed in mc_runs:
            obs = gaussian(1, 1.0)
            rep = verify_ld_bound(ps, spec, obs, None, 10000, which, seed=seed)
            assert rep.all_pass, (ps.label, which, {k: v for k, v in rep.verdicts.items() if not v})
            assert rep.verdicts.get("sharp_below_simple", True)
            n_mc += 1
        elapsed = time.perf_counter() - t0
        assert elapsed < 300.0
        report_line(5, f"{n_exact} exact + {n_mc} MC instances, all tails below bounds [{elapsed:.1f}s]")


class TestCriterion06VarianceNormalization:
    def test_normalized_variance_below_4(self):
        t0 = time.perf_counter()
        values = []
        rng = np.random.default_rng(60)
        for ps in small_enumeration_battery():
            obs = gaussian(ps.dim, 1.0)
            st = exact_variance(ps, BERNOULLI, obs)
            en = exact_variance(ps, BERNOULLI, obs, method="enumeration")
            assert st.variance == pytest.approx(en.variance, rel=1e-10, abs=1e-10)
            values.append(("A", ps.label, st.s_or_q))
            spec_b = two_point_dislocations(ps.dim, ps.min_dist / 8.0)
            st_b = exact_variance(ps, spec_b, obs)
            en_b = exact_variance(ps, spec_b, obs, method="enumeration")
            assert st_b.variance == pytest.approx(en_b.variance, rel=1e-10, abs=1e-10)
            values.append(("B", ps.label, st_b.s_or_q))
        for n in (64, 256, 1024):
            values.append(("A", f"segment-{n}", exact_variance(segment(n), BERNOULLI, gaussian(1, 1.0)).s_or_q))
        for n in (64, 256):
            spec_b = two_point_dislocations(1, 1.0 / 8.0)
            values.append(("B", f"segment-{n}", exact_variance(segment(n), spec_b, gaussian(1, 1.0)).s_or_q))
        # non-identically distributed amplitudes as well
        for trial in range(3):
            def rand_dist():
                m = int(rng.integers(2, 4))
                vals = rng.normal(size=m) + 1j * rng.normal(size=m)
                p = rng.random(m)
                return SiteDistribution(values=vals, probs=p / p.sum())

            spec = AmplitudeSpec(default=rand_dist(), overrides={0: rand_dist(), 3: rand_dist()})
            values.append(("A", f"random-{trial}", exact_variance(segment(8), spec, gaussian(1, 1.0)).s_or_q))
        worst = max(v for _, _, v in values)
        assert worst <= 4.0, values
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0
        report_line(6, f"{len(values)} instances, max normalized variance {worst:.4f} <= 4 [{elapsed:.1f}s]")


class TestCriterion07Clt:
    def test_clt_model_A(self):
        t0 = time.perf_counter()
        rep = clt_experiment(segment(512), BERNOULLI, gaussian(1, 1.0), 10000, seed=4)
        assert rep.verdicts["ks"], rep.empirical["ks"]
        assert rep.verdicts["skewness"], rep.empirical["skewness"]
        assert rep.verdicts["kurtosis"], rep.empirical["kurtosis"]
        elapsed = time.perf_counter() - t0
        assert elapsed < 120.0
        report_line(
            7,
            f"model A: KS={rep.empirical['ks']['value']:.4f}<=0.02, "
            f"skew={rep.empirical['skewness']['value']:+.3f}, "
            f"kurt={rep.empirical['kurtosis']['value']:.3f} [{elapsed:.1f}s]",
        )

    def test_clt_model_B(self):
        t0 = time.perf_counter()
        spec = two_point_dislocations(1, 1.0 / 8.0)  # delta = a/8
        rep = clt_experiment(segment(512), spec, gaussian(1, 1.0), 10000, seed=4)
        assert rep.verdicts["ks"], rep.empirical["ks"]
        assert rep.verdicts["skewness"], rep.empirical["skewness"]
        assert rep.verdicts["kurtosis"], rep.empirical["kurtosis"]
        elapsed = time.perf_counter() - t0
        assert elapsed < 120.0
        report_line(
            7,
            f"model B: KS={rep.empirical['ks']['value']:.4f}<=0.02, "
            f"skew={rep.empirical['skewness']['value']:+.3f}, "
            f"kurt={rep.empirical['kurtosis']['value']:.3f} [{elapsed:.1f}s]",
        )


class TestCriterion08DisorderAverages:
    def test_mc_mean_matches_exact_and_debye_waller(self):
        t0 = time.perf_counter()
        ps = segment(32)
        obs = gaussian(1, 1.0)
        m = 100_000

        vals = sample_values_many(BERNOULLI, ps, seed=80, n_samples=m)
        gam_a = autocorr_A_many(ps, vals, obs).real
        se_a = gam_a.std(ddof=1) / math.sqrt(m)
        dev_a = abs(gam_a.mean() - exact_mean_A(ps, BERNOULLI, obs).real)
        assert dev_a <= 4 * se_a

        spec_b = two_point_dislocations(1, 1.0 / 8.0)
        idx = sample_index_matrix(spec_b, ps, seed=81, n_samples=m)
        gam_b = autocorr_B_many(ps, spec_b, idx, obs).real
        se_b = gam_b.std(ddof=1) / math.sqrt(m)
        dev_b = abs(gam_b.mean() - exact_mean_B(ps, spec_b, obs).real)
        assert dev_b <= 4 * se_b

        # i.i.scale_cap. k-space mean density: general pair expectation vs the
        # factorized reduction, 20 wave numbers
        worst = 0.0
        for k in np.linspace(-7.0, 7.0, 20):
            general = mean_density_B(ps, spec_b, [k])
            factorized = debye_waller_density(ps, spec_b, [k])
            worst = max(worst, abs(general - factorized) / max(abs(factorized), 1e-12))
        assert worst <= 1e-4

        # quadrature route: Int phi(k) density(k) dk = x-space pair-sum mean
        nodes, weights = np.polynomial.legendre.leggauss(2048)
        k, w = nodes * 9.0, weights * 9.0
        dens = np.array([mean_density_B(ps, spec_b, [kk]) for kk in k])
        phi = (2 * math.pi) ** -0.5 * np.exp(-(k**2) / 2)
        route_k = float(np.sum(w * phi * dens))
        route_x = exact_mean_B(ps, spec_b, obs).real
        assert abs(route_k - route_x) / abs(route_x) <= 1e-4

        elapsed = time.perf_counter() - t0
        assert elapsed < 180.0
        report_line(
            8,
            f"MC means within {dev_a / se_a:.2f} / {dev_b / se_b:.2f} SE; "
            f"DW pointwise rel {worst:.1e}; two-route rel "
            f"{abs(route_k - route_x) / abs(route_x):.1e} [{elapsed:.1f}s]",
        )


class TestCriterion09CrossRoute:
    def test_pair_sum_equals_intensity_integral(self):
        t0 = time.perf_counter()
        ps = segment(24)
        obs = gaussian(1, 1.0)
        nodes, weights = np.polynomial.legendre.leggauss(2048)
        k, w = nodes * 9.0, weights * 9.0
        phi = (2 * math.pi) ** -0.5 * np.exp(-(k**2) / 2)
        pts = ps.points.ravel()
        phase = np.exp(1j * np.outer(k, pts))
        vals = sample_values_many(BERNOULLI, ps, seed=90, n_samples=20)
        gammas = autocorr_A_many(ps, vals, obs).real
        worst = 0.0
        for i in range(20):
            amp = (vals[i][None, :] * phase).sum(axis=1)
            integral = float(np.sum(w * phi * np.abs(amp) ** 2) / len(ps))
            worst = max(worst, abs(integral - gammas[i]))
        assert worst <= 1e-6
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0
        report_line(9, f"20 samples, max |pair-sum - intensity integral| = {worst:.2e} [{elapsed:.1f}s]")


class TestCriterion10Determinism:
    def test_byte_identical_reports(self, tmp_path):
        config = {
            "pointset": {"generator": "lattice", "dim": 1, "spacing": 1.0, "radius": 15.5},
            "scatterers": {
                "kind": "A",
                "default": {"support": [[1, 0], [-1, 0]], "probs": [0.5, 0.5]},
            },
            "observable": {"type": "gaussian", "sigma": 1.0},
            "which": "A-discrete",
            "n_samples": 1000,
            "seed": 100,
        }
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps(config))
        blobs = []
        for tag in ("a", "b"):
            out = tmp_path / tag
            rc = cli_main(["run-ld", "--config", str(cfg), "--out", str(out), "--no-timestamp"])
            assert rc == 0
            blobs.append(
                ((out / "report.json").read_bytes(), (out / "samples.csv").read_bytes())
            )
        assert blobs[0] == blobs[1]

        clt_cfg = dict(config)
        del clt_cfg["which"]
        clt_cfg["n_samples"] = 800
        # loose thresholds: this criterion is about reproducibility, and the
        # tight defaults are sized for 512 sites / 1e4 samples
        clt_cfg["thresholds"] = {"ks": 0.2, "skewness": 0.5, "kurtosis": 1.0}
        cfg2 = tmp_path / "clt.json"
        cfg2.write_text(json.dumps(clt_cfg))
        clt_blobs = []
        for tag in ("c", "d"):
            out = tmp_path / tag
            rc = cli_main(["run-clt", "--config", str(cfg2), "--out", str(out), "--no-timestamp"])
            assert rc == 0
            clt_blobs.append((out / "report.json").read_bytes())
        assert clt_blobs[0] == clt_blobs[1]
        report_line(10, "canonical reports byte-identical across reruns (run-ld, run-clt)")
