//! Seeded Monte Carlo batteries. Every check is "within 4 standard errors";
//! seeds are fixed so outcomes are deterministic.

use yeh_core::funcspace::{norm_sq_lambda_rho, project_to_steps, BasisFamily, Integrand, StepFunction};
use yeh_core::integral::{integral_distribution, L2Integrator, RsIntegrator};
use yeh_core::process::{center, IncrementSampler, Grid, SeriesSampler, StreamPlan, YehSpec};
use yeh_core::series::Expansion;
use yeh_core::stats::{ks_test, mc_estimate, par_map_paths, McEstimate, RunningStats};
use yeh_core::stieltjes::{cantor_eval, Integrator, Interval, MeanFunction, VarianceFunction};

const K: f64 = 4.0;

fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

fn drift_t() -> YehSpec {
    YehSpec::new(MeanFunction::linear(unit(), 1.0, 0.0).unwrap(), VarianceFunction::identity(unit())).unwrap()
}

/// All paths as rows of grid values.
fn sample_all(sampler: &IncrementSampler, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let plan = StreamPlan::new(seed);
    par_map_paths(count, |k| {
        let mut v = vec![0.0; sampler.grid().len()];
        sampler.fill(&mut plan.stream(k), &mut v);
        v
    })
}

#[test]
fn terminal_mean_tracks_lambda() {
    let spec = drift_t();
    let grid = Grid::uniform(unit(), 17).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let e = mc_estimate(100_000, StreamPlan::new(1), |s| {
        let mut v = vec![0.0; grid.len()];
        sampler.fill(s, &mut v);
        v[16]
    })
    .unwrap();
    assert!(e.agrees_with(1.0, K, 0.0), "{e:?}");
}

#[test]
fn disjoint_increments_uncorrelated() {
    let spec = YehSpec::new(
        MeanFunction::cantor(unit()),
        VarianceFunction::power(unit(), 2.0).unwrap(),
    )
    .unwrap();
    let grid = Grid::uniform(unit(), 9).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let rows = sample_all(&sampler, 50_000, 2);
    let mu1 = spec.lambda().value(0.375) - spec.lambda().value(0.125);
    let mu2 = spec.lambda().value(1.0) - spec.lambda().value(0.5);
    let prods: Vec<f64> = rows.iter().map(|v| (v[3] - v[1] - mu1) * (v[8] - v[4] - mu2)).collect();
    let e = McEstimate::from_samples(&prods, Some(2)).unwrap();
    assert!(e.agrees_with(0.0, K, 0.0), "{e:?}");
}

#[test]
fn centered_paths_have_zero_mean() {
    let spec = YehSpec::new(
        MeanFunction::cantor(unit()),
        VarianceFunction::identity(unit()),
    )
    .unwrap();
    let grid = Grid::uniform(unit(), 9).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let rows = sample_all(&sampler, 20_000, 3);
    for (j, &t) in grid.points().iter().enumerate().skip(1) {
        let xs: Vec<f64> = rows.iter().map(|v| v[j] - spec.lambda().value(t)).collect();
        let e = McEstimate::from_samples(&xs, None).unwrap();
        assert!(e.agrees_with(0.0, K, 0.0), "t = {t}: {e:?}");
    }
}

#[test]
fn cantor_mean_tracks_cantor_function() {
    let spec = YehSpec::new(MeanFunction::cantor(unit()), VarianceFunction::identity(unit())).unwrap();
    let grid = Grid::uniform(unit(), 9).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let rows = sample_all(&sampler, 100_000, 4);
    for j in [2, 3, 5] {
        let t = grid.points()[j];
        let e = McEstimate::from_samples(&rows.iter().map(|v| v[j]).collect::<Vec<_>>(), None).unwrap();
        assert!(e.agrees_with(cantor_eval(t, 64).unwrap(), K, 0.0), "t = {t}: {e:?}");
    }
}

#[test]
fn marginals_are_gaussian() {
    let rho = VarianceFunction::power(unit(), 2.0).unwrap();
    let spec = YehSpec::new(MeanFunction::linear(unit(), -2.0, 1.0).unwrap(), rho.clone()).unwrap();
    let grid = Grid::uniform(unit(), 5).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    for seed in [11, 12, 13] {
        let rows = sample_all(&sampler, 20_000, seed);
        let xs: Vec<f64> = rows.iter().map(|v| v[2] - spec.lambda().value(0.5)).collect();
        let r = ks_test(&xs, 0.0, rho.value(0.5)).unwrap();
        assert!(r.p_value > 0.01, "seed {seed}: {r:?}");
    }
}

#[test]
fn series_and_increments_agree_in_covariance() {
    let rho = VarianceFunction::power(unit(), 2.0).unwrap();
    let spec = YehSpec::new(MeanFunction::zero(unit()), rho.clone()).unwrap();
    let grid = Grid::uniform(unit(), 9).unwrap();
    let terms = 32;
    let series = SeriesSampler::new(&spec, &BasisFamily::cosine(rho), terms, &grid).unwrap();
    let incr = IncrementSampler::new(&spec, &grid).unwrap();
    let m = 20_000;
    let plan = StreamPlan::new(5);
    let a = par_map_paths(m, |k| {
        let mut v = vec![0.0; grid.len()];
        series.fill_centered(&mut plan.stream(k), &mut v);
        v
    });
    let b = sample_all(&incr, m, 6);
    let defect = series.variance_defect();
    for (i, j) in [(2, 6), (4, 4), (3, 8)] {
        let ea = McEstimate::from_samples(&a.iter().map(|v| v[i] * v[j]).collect::<Vec<_>>(), None).unwrap();
        let eb = McEstimate::from_samples(&b.iter().map(|v| v[i] * v[j]).collect::<Vec<_>>(), None).unwrap();
        let tol = defect[i].max(defect[j]) + K * (ea.std_error.powi(2) + eb.std_error.powi(2)).sqrt();
        assert!((ea.mean - eb.mean).abs() <= tol, "({i},{j}): {ea:?} vs {eb:?}");
    }
}

#[test]
fn l2_integral_variance() {
    let spec = YehSpec::brownian(unit());
    let grid = Grid::uniform(unit(), 257).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let integ = L2Integrator::new(&Integrand::linear(1.0, 0.0), &grid, 256).unwrap();
    let m = 100_000;
    let plan = StreamPlan::new(7);
    let xs = par_map_paths(m, |k| {
        let mut v = vec![0.0; grid.len()];
        sampler.fill(&mut plan.stream(k), &mut v);
        integ.apply(&v).value
    });
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let e = McEstimate::from_samples(&sq, Some(7)).unwrap();
    assert!(e.agrees_with(1.0 / 3.0, K, 0.0), "{e:?}");
}

#[test]
fn l2_refinement_shrinks_under_doubling() {
    let spec = YehSpec::brownian(unit());
    let grid = Grid::uniform(unit(), 1025).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let f = Integrand::linear(1.0, 0.0);
    let rows = sample_all(&sampler, 100, 8);
    let medians: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&cells| {
            let integ = L2Integrator::new(&f, &grid, cells).unwrap();
            let mut r: Vec<f64> = rows.iter().map(|v| integ.apply(v).refinement).collect();
            r.sort_by(f64::total_cmp);
            0.5 * (r[49] + r[50])
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");
}

#[test]
fn l2_extension_bound() {
    // E[(I(f) − I(fₙ))²] ≤ (1 + |λ|(b) − |λ|(a))·‖f − fₙ‖²_{λ,ρ}
    let spec = YehSpec::new(
        MeanFunction::table(unit(), &[(0.0, 0.0), (0.5, 1.0), (1.0, 0.25)]).unwrap(),
        VarianceFunction::power(unit(), 2.0).unwrap(),
    )
    .unwrap();
    let grid = Grid::uniform(unit(), 1025).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let f = Integrand::linear(2.0, -0.5);
    let reference = L2Integrator::new(&f, &grid, 1024).unwrap();
    let tv = spec.lambda().total_variation(0.0, 1.0).unwrap();
    let rows = sample_all(&sampler, 20_000, 9);
    for n in [4, 16, 64] {
        let fn_step = project_to_steps(&f, unit(), n).unwrap();
        let approx = L2Integrator::new(&fn_step.clone().into(), &grid, n).unwrap();
        let gaps: Vec<f64> = rows.iter().map(|v| (reference.apply(v).value - approx.apply(v).value).powi(2)).collect();
        let e = McEstimate::from_samples(&gaps, None).unwrap();
        let diff = Integrand::continuous(move |t| 2.0 * t - 0.5 - fn_step.value(t));
        let bound = (1.0 + tv) * norm_sq_lambda_rho(&diff, spec.lambda(), spec.rho(), 1 << 14).unwrap();
        assert!(e.mean <= bound + K * e.std_error, "n = {n}: {e:?} > {bound}");
    }
}

#[test]
fn rs_matches_l2_law() {
    let spec = drift_t();
    let grid = Grid::uniform(unit(), 257).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let f = Integrand::linear(-1.0, 1.0);
    let rs = RsIntegrator::new(&f, &grid, 256).unwrap();
    let law = integral_distribution(&f, &spec, 1 << 14).unwrap();
    let rows = sample_all(&sampler, 50_000, 10);
    let xs: Vec<f64> = rows.iter().map(|v| rs.apply(v).value).collect();
    let e = McEstimate::from_samples(&xs, None).unwrap();
    // left tags on a decreasing f bias the mean by h/2·∫ dλ
    assert!(e.agrees_with(law.mean, K, 0.5 / 256.0), "{e:?} vs {law:?}");
}

#[test]
fn series_partial_sums_converge_per_path() {
    // almost-sure convergence proxy: |target − partial sum| ≤ 10·√defect for large N
    let spec = YehSpec::brownian(unit());
    let grid = Grid::uniform(unit(), 1025).unwrap();
    let basis = BasisFamily::cosine(spec.rho().clone());
    let f: Integrand = StepFunction::indicator(0.0, 0.5).unwrap().into();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    for n in [64, 128, 256] {
        let exp = Expansion::new(&f, &basis, n, &grid, 1024, 1 << 14).unwrap();
        let bound = 10.0 * exp.defects()[n - 1].sqrt();
        for seed in 0..10 {
            let p = sampler.sample(StreamPlan::new(100 + seed).stream(0));
            let report = exp.apply(&center(&p, spec.lambda()).unwrap()).unwrap();
            let gap = (report.target - report.partial_sums[n - 1]).abs();
            assert!(gap <= bound, "N = {n}, seed {seed}: {gap} > {bound}");
        }
    }
}

#[test]
fn results_independent_of_worker_count() {
    let spec = drift_t();
    let grid = Grid::uniform(unit(), 65).unwrap();
    let sampler = IncrementSampler::new(&spec, &grid).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            mc_estimate(5_000, StreamPlan::new(77), |s| {
                let mut v = vec![0.0; grid.len()];
                sampler.fill(s, &mut v);
                v[32] * v[64]
            })
            .unwrap()
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn merge_order_is_pinned() {
    let mut s = StreamPlan::new(5).stream(0);
    let xs: Vec<f64> = (0..10_000).map(|_| s.next_gaussian()).collect();
    let whole: RunningStats = xs.iter().copied().collect();
    let mut merged = RunningStats::new();
    for chunk in xs.chunks(1000) {
        merged.merge(&chunk.iter().copied().collect());
    }
    assert!((merged.mean() - whole.mean()).abs() < 1e-15);
    assert!((merged.variance() - whole.variance()).abs() < 1e-13);
}
