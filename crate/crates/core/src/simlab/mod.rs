//! Monte Carlo laboratory: risk tables, estimator-agreement quantiles,
//! robustness sweeps under contamination and mixtures, and test-count
//! accounting, with CSV emission for all of it.
//!
//! Replications are independent work units seeded as `base_seed + r`, so
//! parallel and serial runs produce identical reports; aggregation happens
//! in replication order after collection.

mod truth;

pub use truth::{mixture_hellinger_to_model, Truth};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{self, BaselineKind, BaselineSpec};
use crate::error::{Error, Result};
use crate::models::{catalog_lookup, gaussian_loc_scale, Model, ParamRect, Sample};
use crate::quad::QuadratureSpec;
use crate::search1d::{estimate_1d, EstimatorConfig1D};
use crate::searchmd::{estimate_md, EstimatorConfigMD};

/// Search configuration for whichever dimensionality the scenario has.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SearchConfig {
    OneD(EstimatorConfig1D),
    MultiD(EstimatorConfigMD),
}

impl SearchConfig {
    pub fn defaults_for(model: &Model) -> Self {
        if model.dim() == 1 {
            let mut c = EstimatorConfig1D::defaults_for(model);
            c.record_trace = false;
            SearchConfig::OneD(c)
        } else {
            let mut c = EstimatorConfigMD::defaults_for(model);
            c.record_trace = false;
            SearchConfig::MultiD(c)
        }
    }

    fn validate(&self, model: &Model) -> Result<()> {
        match self {
            SearchConfig::OneD(c) => c.validate(model),
            SearchConfig::MultiD(c) => c.validate(model),
        }
    }
}

/// One simulation scenario: a model, the truth, sample sizes, replication
/// budget, and the estimators to compare against.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub truth: Truth,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub base_seed: u64,
    pub baselines: Vec<BaselineKind>,
    pub config: SearchConfig,
    /// Grid resolution for the grid-backed baselines.
    pub grid_points: usize,
}

/// Names accepted by [`Scenario::by_name`].
pub const SCENARIO_NAMES: [&str; 15] = [
    "table4-ex1",
    "table4-ex2",
    "table4-ex3",
    "table4-ex4",
    "table4-ex5",
    "table4-ex6",
    "table4-ex7",
    "table4-ex8",
    "table6-ex1",
    "table6-ex2",
    "table6-ex3",
    "table6-ex4",
    "table6-ex5",
    "table6-ex6",
    "contam-uniform",
];

impl Scenario {
    /// A named catalog scenario with its study defaults (truth point,
    /// comparator set, search configuration). Callers usually override
    /// `n_list`, `replications` and `base_seed`.
    pub fn by_name(name: &str) -> Result<Self> {
        use BaselineKind::*;
        let (model_name, truth, baselines): (&str, Truth, Vec<BaselineKind>) = match name {
            "table4-ex1" => ("exp-rate", Truth::InModel(vec![1.0]), vec![MleClosed]),
            "table4-ex2" => ("gauss-loc", Truth::InModel(vec![0.0]), vec![MleClosed]),
            "table4-ex3" => ("rayleigh", Truth::InModel(vec![1.0]), vec![MleClosed]),
            "table4-ex4" => ("cauchy-loc", Truth::InModel(vec![0.0]), vec![MleGrid]),
            "table4-ex5" => ("unif-scale", Truth::InModel(vec![1.0]), vec![MleClosed, Mvub]),
            "table4-ex6" => ("pareto-shift", Truth::InModel(vec![0.0]), vec![MleClosed]),
            "table4-ex7" => ("unif-loc", Truth::InModel(vec![0.0]), vec![Midrange]),
            "table4-ex8" => ("sqrt-singular", Truth::InModel(vec![0.0]), vec![Median, Mean, Mspe]),
            "table6-ex1" => ("gauss-2d", Truth::InModel(vec![0.0, 1.0]), vec![MleClosed]),
            "table6-ex2" => ("cauchy-2d", Truth::InModel(vec![0.0, 1.0]), vec![]),
            "table6-ex3" => ("gamma-2d", Truth::InModel(vec![2.0, 3.0]), vec![]),
            "table6-ex4" => ("beta-2d", Truth::InModel(vec![3.0, 4.0]), vec![]),
            "table6-ex5" => ("shiftexp-2d", Truth::InModel(vec![0.0, 1.0]), vec![MleClosed]),
            "table6-ex6" => ("unif-locscale-2d", Truth::InModel(vec![0.0, 1.0]), vec![MleClosed]),
            "contam-uniform" => ("unif-scale", Truth::ContaminatedUniform, vec![MleClosed]),
            other => return Err(Error::InvalidConfig(format!("unknown scenario `{other}`"))),
        };
        let model = catalog_lookup(model_name)?;
        let n_list = if model.dim() == 1 {
            vec![10, 25, 50, 75, 100]
        } else {
            vec![25, 50, 75, 100]
        };
        let config = SearchConfig::defaults_for(&model);
        Ok(Self {
            name: name.into(),
            model,
            truth,
            n_list,
            replications: 1000,
            base_seed: 1,
            baselines,
            config,
            grid_points: 100_000,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 || self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::InvalidConfig("need at least one replication and positive n".into()));
        }
        self.truth.validate(&self.model, &self.n_list)?;
        self.config.validate(&self.model)?;
        for kind in &self.baselines {
            match kind {
                BaselineKind::MleClosed => {
                    if self.model.closed_mle(&[1.0]).is_none() {
                        return Err(Error::Unsupported(format!(
                            "`{}` has no closed-form maximum likelihood",
                            self.model.name()
                        )));
                    }
                }
                BaselineKind::MleGrid | BaselineKind::Mspe => {
                    if self.model.dim() != 1 {
                        return Err(Error::Unsupported("grid baselines are unidimensional".into()));
                    }
                }
                _ => {
                    if self.model.dim() != 1 {
                        return Err(Error::Unsupported("order statistics are unidimensional".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

fn baseline_label(kind: BaselineKind) -> &'static str {
    match kind {
        BaselineKind::MleClosed => "mle",
        BaselineKind::MleGrid => "mle-grid",
        BaselineKind::Mspe => "mspe",
        BaselineKind::Median => "median",
        BaselineKind::Mean => "mean",
        BaselineKind::Mvub => "mvub",
        BaselineKind::Midrange => "midrange",
    }
}

/// Everything recorded about one replication.
#[derive(Debug, Clone)]
pub struct RepRecord {
    pub seed: u64,
    /// The search estimate; `None` when the replication failed.
    pub ours_theta: Option<Vec<f64>>,
    pub ours_h2: Option<f64>,
    pub ours_tests: Option<usize>,
    /// Index-aligned with the scenario's baseline list.
    pub baseline_h2: Vec<f64>,
    /// Componentwise-max distance between our estimate and each baseline.
    pub baseline_dist: Vec<f64>,
}

fn run_one_rep(scenario: &Scenario, n: usize, rep: usize, quad: &QuadratureSpec) -> Result<RepRecord> {
    let seed = scenario.base_seed.wrapping_add(rep as u64);
    let sample = scenario.truth.draw(&scenario.model, n, seed)?;
    let model = &scenario.model;

    let ours: Option<(Vec<f64>, usize)> = match &scenario.config {
        SearchConfig::OneD(c) => estimate_1d(model, &sample, c)
            .ok()
            .map(|e| (vec![e.theta_hat], e.trace.test_count)),
        SearchConfig::MultiD(c) => {
            estimate_md(model, &sample, c).ok().map(|e| (e.theta_hat.clone(), e.trace.test_count))
        }
    };

    let ours_h2 = match &ours {
        Some((theta, _)) => Some(scenario.truth.h2_to_point(model, theta, n, quad)?),
        None => None,
    };

    let mut baseline_h2 = Vec::with_capacity(scenario.baselines.len());
    let mut baseline_dist = Vec::with_capacity(scenario.baselines.len());
    for &kind in &scenario.baselines {
        let theta = baseline_estimate(scenario, kind, &sample, ours.as_ref().map(|o| &o.0))?;
        baseline_h2.push(scenario.truth.h2_to_point(model, &theta, n, quad)?);
        let dist = match &ours {
            Some((o, _)) => o
                .iter()
                .zip(&theta)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max),
            None => f64::NAN,
        };
        baseline_dist.push(dist);
    }

    Ok(RepRecord {
        seed,
        ours_theta: ours.as_ref().map(|o| o.0.clone()),
        ours_h2,
        ours_tests: ours.map(|o| o.1),
        baseline_h2,
        baseline_dist,
    })
}

fn baseline_estimate(
    scenario: &Scenario,
    kind: BaselineKind,
    sample: &Sample,
    ours: Option<&Vec<f64>>,
) -> Result<Vec<f64>> {
    let model = &scenario.model;
    match kind {
        BaselineKind::MleClosed => baselines::mle_closed(model, sample),
        BaselineKind::MleGrid => {
            // The likelihood may be multimodal; search a window around our
            // estimate and one around the median.
            let spec = BaselineSpec { kind, grid_points: scenario.grid_points };
            let median = baselines::simple_stats(model, sample, BaselineKind::Median)?;
            let mut anchors = vec![median];
            if let Some(o) = ours {
                anchors.insert(0, o[0]);
            }
            Ok(vec![baselines::mle_grid(model, sample, &spec, &anchors)?])
        }
        BaselineKind::Mspe => {
            let spec = BaselineSpec { kind, grid_points: (2 * scenario.grid_points).max(1000) };
            Ok(vec![baselines::mspe(model, sample, &spec)?])
        }
        simple => Ok(vec![baselines::simple_stats(model, sample, simple)?]),
    }
}

/// Run all replications for one sample size, in parallel, in a fixed seed
/// layout.
pub fn run_replications(scenario: &Scenario, n: usize) -> Result<Vec<RepRecord>> {
    scenario.validate()?;
    let quad = QuadratureSpec::default();
    (0..scenario.replications)
        .into_par_iter()
        .map(|rep| run_one_rep(scenario, n, rep, &quad))
        .collect()
}

/// One aggregated line of a simulation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub estimator: String,
    pub n: usize,
    /// Mean squared Hellinger distance to the truth.
    pub risk: f64,
    /// Sample standard deviation (n - 1 denominator) of the same.
    pub std: f64,
    /// `risk(ours) / risk(this) - 1`; `None` on the `ours` row.
    pub rel_risk: Option<f64>,
    /// Empirical quantiles of the componentwise-max distance between our
    /// estimate and this baseline; `None` on the `ours` row.
    pub q99: Option<f64>,
    pub q999: Option<f64>,
    pub q100: Option<f64>,
    /// Test-count statistics; only on the `ours` row.
    pub tests_mean: Option<f64>,
    pub tests_std: Option<f64>,
    /// Replications that failed (iteration caps or numerical errors).
    pub failures: usize,
}

/// Aggregated study output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scenario: String,
    pub model: String,
    pub replications: usize,
    pub base_seed: u64,
    pub rows: Vec<ReportRow>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Empirical c-quantile: the `ceil(c * N)`-th order statistic.
fn quantile(sorted: &[f64], c: f64) -> f64 {
    let n = sorted.len();
    let k = ((c * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

/// Aggregate one sample size's replication records into report rows.
pub fn aggregate_rows(scenario: &Scenario, n: usize, records: &[RepRecord]) -> Vec<ReportRow> {
    let mut rows = Vec::new();

    let ours_h2: Vec<f64> = records.iter().filter_map(|r| r.ours_h2).collect();
    let tests: Vec<f64> = records.iter().filter_map(|r| r.ours_tests.map(|t| t as f64)).collect();
    let failures = records.len() - ours_h2.len();
    let (risk_ours, std_ours) = mean_std(&ours_h2);
    let (tmean, tstd) = mean_std(&tests);
    rows.push(ReportRow {
        estimator: "ours".into(),
        n,
        risk: risk_ours,
        std: std_ours,
        rel_risk: None,
        q99: None,
        q999: None,
        q100: None,
        tests_mean: Some(tmean),
        tests_std: Some(tstd),
        failures,
    });

    for (b, &kind) in scenario.baselines.iter().enumerate() {
        let h2: Vec<f64> = records.iter().map(|r| r.baseline_h2[b]).collect();
        let (risk, std) = mean_std(&h2);
        let mut dist: Vec<f64> =
            records.iter().map(|r| r.baseline_dist[b]).filter(|d| d.is_finite()).collect();
        dist.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        let (q99, q999, q100) = if dist.is_empty() {
            (None, None, None)
        } else {
            (
                Some(quantile(&dist, 0.99)),
                Some(quantile(&dist, 0.999)),
                Some(quantile(&dist, 1.0)),
            )
        };
        rows.push(ReportRow {
            estimator: baseline_label(kind).into(),
            n,
            risk,
            std,
            rel_risk: Some(risk_ours / risk - 1.0),
            q99,
            q999,
            q100,
            tests_mean: None,
            tests_std: None,
            failures: 0,
        });
    }
    rows
}

/// Run the full risk study of a scenario across its sample sizes.
pub fn run_risk_study(scenario: &Scenario) -> Result<SimulationReport> {
    scenario.validate()?;
    let mut rows = Vec::new();
    for &n in &scenario.n_list {
        let records = run_replications(scenario, n)?;
        rows.extend(aggregate_rows(scenario, n, &records));
    }
    Ok(SimulationReport {
        scenario: scenario.name.clone(),
        model: scenario.model.name().into(),
        replications: scenario.replications,
        base_seed: scenario.base_seed,
        rows,
    })
}

/// Agreement quantiles between our estimate and the scenario's first
/// likelihood baseline, per sample size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgreementRow {
    pub n: usize,
    pub q99: f64,
    pub q999: f64,
    pub q100: f64,
}

/// Quantiles of the (componentwise-max) distance between our estimate and
/// the maximum likelihood estimate.
pub fn run_agreement_study(scenario: &Scenario) -> Result<Vec<AgreementRow>> {
    if !scenario
        .baselines
        .iter()
        .any(|k| matches!(k, BaselineKind::MleClosed | BaselineKind::MleGrid))
    {
        return Err(Error::InvalidConfig(
            "agreement study needs a maximum likelihood baseline in the scenario".into(),
        ));
    }
    let report = run_risk_study(scenario)?;
    let reference = scenario
        .baselines
        .iter()
        .find(|k| matches!(k, BaselineKind::MleClosed | BaselineKind::MleGrid))
        .copied()
        .expect("checked above");
    let label = baseline_label(reference);
    Ok(report
        .rows
        .iter()
        .filter(|r| r.estimator == label)
        .map(|r| AgreementRow {
            n: r.n,
            q99: r.q99.unwrap_or(f64::NAN),
            q999: r.q999.unwrap_or(f64::NAN),
            q100: r.q100.unwrap_or(f64::NAN),
        })
        .collect())
}

/// The contaminated-uniform robustness study: our estimator against the
/// maximum likelihood one on the uniform scale model.
pub fn run_uniform_contamination(n_list: &[usize], replications: usize, base_seed: u64) -> Result<SimulationReport> {
    let mut scenario = Scenario::by_name("contam-uniform")?;
    scenario.n_list = n_list.to_vec();
    scenario.replications = replications;
    scenario.base_seed = base_seed;
    run_risk_study(&scenario)
}

/// Which mixture sweep to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixtureKind {
    /// Uniform scale model under the uniform two-component mixture.
    Uniform1d,
    /// Wide Gaussian location-scale model under the two-bump Gaussian
    /// mixture.
    Gaussian2d,
}

/// One row of a mixture sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub risk_ours: f64,
    pub risk_mle: f64,
    /// Distance from the mixture to the whole model family.
    pub h2_model: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureSweep {
    pub kind: MixtureKind,
    pub n: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub rows: Vec<SweepRow>,
}

/// Sweep the mixture weight and compare risks of our estimator and the MLE,
/// with the model-distance reference curve.
pub fn run_mixture_sweep(
    kind: MixtureKind,
    p_grid: &[f64],
    n: usize,
    replications: usize,
    base_seed: u64,
) -> Result<MixtureSweep> {
    let model = match kind {
        MixtureKind::Uniform1d => catalog_lookup("unif-scale")?,
        MixtureKind::Gaussian2d => {
            gaussian_loc_scale(ParamRect::new(vec![-10.0, 0.5], vec![10.0, 10.0])?)?
        }
    };
    let config = SearchConfig::defaults_for(&model);
    let quad = QuadratureSpec::default();

    let mut rows = Vec::with_capacity(p_grid.len());
    for (pi, &p) in p_grid.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidConfig(format!("mixture weight {p} outside [0, 1]")));
        }
        let truth = match kind {
            MixtureKind::Uniform1d => Truth::UniformMixture { p },
            MixtureKind::Gaussian2d => Truth::GaussianMixture { p },
        };
        let offset = base_seed.wrapping_add((pi * replications) as u64);
        let per_rep: Vec<(f64, f64)> = (0..replications)
            .into_par_iter()
            .map(|rep| -> Result<(f64, f64)> {
                let seed = offset.wrapping_add(rep as u64);
                let sample = truth.draw(&model, n, seed)?;
                let ours = match &config {
                    SearchConfig::OneD(c) => vec![estimate_1d(&model, &sample, c)?.theta_hat],
                    SearchConfig::MultiD(c) => estimate_md(&model, &sample, c)?.theta_hat,
                };
                let mle = model
                    .closed_mle(sample.values())
                    .ok_or_else(|| Error::Unsupported("mixture sweep needs a closed MLE".into()))?;
                let h_ours = truth.h2_to_point(&model, &ours, n, &quad)?;
                let h_mle = truth.h2_to_point(&model, &mle, n, &quad)?;
                Ok((h_ours, h_mle))
            })
            .collect::<Result<_>>()?;
        let risk_ours = per_rep.iter().map(|r| r.0).sum::<f64>() / replications as f64;
        let risk_mle = per_rep.iter().map(|r| r.1).sum::<f64>() / replications as f64;
        let h2_model = match kind {
            MixtureKind::Uniform1d => mixture_hellinger_to_model(p),
            MixtureKind::Gaussian2d => gaussian_mixture_family_distance(&model, p, n, &quad)?,
        };
        rows.push(SweepRow { p, risk_ours, risk_mle, h2_model });
    }
    Ok(MixtureSweep { kind, n, replications, base_seed, rows })
}

/// Distance from the Gaussian two-bump mixture to the location-scale family,
/// by coarse grid minimization with local refinement.
fn gaussian_mixture_family_distance(model: &Model, p: f64, n: usize, quad: &QuadratureSpec) -> Result<f64> {
    let truth = Truth::GaussianMixture { p };
    let eval = |m: f64, s: f64| -> Result<f64> {
        truth.h2_to_point(model, &[m, s], n, quad)
    };
    let (m_lo, m_hi) = (model.rect().lower(0), model.rect().upper(0));
    let (s_lo, s_hi) = (model.rect().lower(1), model.rect().upper(1));
    let mut best = (f64::INFINITY, 0.0, 1.0);
    let (gm, gs) = (41usize, 25usize);
    for i in 0..=gm {
        for j in 0..=gs {
            let m = m_lo + (m_hi - m_lo) * i as f64 / gm as f64;
            let s = s_lo + (s_hi - s_lo) * j as f64 / gs as f64;
            let v = eval(m, s)?;
            if v < best.0 {
                best = (v, m, s);
            }
        }
    }
    let mut dm = (m_hi - m_lo) / gm as f64;
    let mut ds = (s_hi - s_lo) / gs as f64;
    for _ in 0..3 {
        let (center_m, center_s) = (best.1, best.2);
        for i in -5i32..=5 {
            for j in -5i32..=5 {
                let m = (center_m + dm * i as f64 / 5.0).clamp(m_lo, m_hi);
                let s = (center_s + ds * j as f64 / 5.0).clamp(s_lo, s_hi);
                let v = eval(m, s)?;
                if v < best.0 {
                    best = (v, m, s);
                }
            }
        }
        dm /= 5.0;
        ds /= 5.0;
    }
    Ok(best.0)
}

impl SimulationReport {
    /// Stable CSV rendering: fixed column order, one row per
    /// (estimator, n), empty cells for inapplicable fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "scenario,model,estimator,n,reps,failures,risk,std,rel_risk,q99,q999,q100,tests_mean,tests_std\n",
        );
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.8e}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.8e},{:.8e},{},{},{},{},{},{}\n",
                self.scenario,
                self.model,
                r.estimator,
                r.n,
                self.replications,
                r.failures,
                r.risk,
                r.std,
                opt(r.rel_risk),
                opt(r.q99),
                opt(r.q999),
                opt(r.q100),
                opt(r.tests_mean),
                opt(r.tests_std),
            ));
        }
        out
    }

    /// Fixed-width text table mirroring the CSV contents.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "scenario {} (model {}, N = {}, seed {})\n",
            self.scenario, self.model, self.replications, self.base_seed
        );
        out.push_str(&format!(
            "{:<10} {:>5} {:>12} {:>12} {:>12} {:>10} {:>10} {:>9}\n",
            "estimator", "n", "risk", "std", "rel_risk", "q99", "tests", "failures"
        ));
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<10} {:>5} {:>12.4e} {:>12.4e} {:>12} {:>10} {:>10} {:>9}\n",
                r.estimator,
                r.n,
                r.risk,
                r.std,
                opt(r.rel_risk),
                opt(r.q99),
                opt(r.tests_mean),
                r.failures
            ));
        }
        out
    }

    pub fn row(&self, estimator: &str, n: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.estimator == estimator && r.n == n)
    }
}

impl MixtureSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,risk_ours,risk_mle,h2_model\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.6},{:.8e},{:.8e},{:.8e}\n",
                r.p, r.risk_ours, r.risk_mle, r.h2_model
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tiny(name: &str) -> Scenario {
        let mut s = Scenario::by_name(name).unwrap();
        s.n_list = vec![25];
        s.replications = 40;
        s.base_seed = 7;
        s.grid_points = 2_000;
        s
    }

    #[test]
    fn unknown_scenario_is_rejected() {
        assert!(Scenario::by_name("nope").is_err());
    }

    #[test]
    fn report_is_deterministic_and_reaggregates_exactly() {
        let s = tiny("table4-ex2");
        let a = run_risk_study(&s).unwrap();
        let b = run_risk_study(&s).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());

        // The aggregates must reproduce exactly from the per-replication
        // records.
        let records = run_replications(&s, 25).unwrap();
        let rows = aggregate_rows(&s, 25, &records);
        let h2: Vec<f64> = records.iter().filter_map(|r| r.ours_h2).collect();
        let mean = h2.iter().sum::<f64>() / h2.len() as f64;
        assert_eq!(rows[0].risk.to_bits(), a.row("ours", 25).unwrap().risk.to_bits());
        assert_eq!(mean.to_bits(), rows[0].risk.to_bits());
    }

    #[test]
    fn gaussian_study_matches_mle_closely() {
        let s = tiny("table4-ex2");
        let report = run_risk_study(&s).unwrap();
        let ours = report.row("ours", 25).unwrap();
        let mle = report.row("mle", 25).unwrap();
        assert_eq!(ours.failures, 0);
        assert!(ours.risk > 0.0);
        assert!((ours.risk / mle.risk - 1.0).abs() < 1e-3);
        assert!(mle.q99.unwrap() < 1e-4);
    }

    #[test]
    fn quantiles_are_monotone_and_single_rep_collapses() {
        let mut s = tiny("table4-ex2");
        s.replications = 60;
        let rows = run_agreement_study(&s).unwrap();
        let r = &rows[0];
        assert!(r.q100 >= r.q999 && r.q999 >= r.q99);

        s.replications = 1;
        let rows = run_agreement_study(&s).unwrap();
        let r = &rows[0];
        assert_eq!(r.q99, r.q999);
        assert_eq!(r.q999, r.q100);
    }

    #[test]
    fn contamination_punishes_the_mle() {
        let report = run_uniform_contamination(&[100], 120, 3).unwrap();
        let ours = report.row("ours", 100).unwrap();
        let mle = report.row("mle", 100).unwrap();
        assert!(ours.risk < 0.05, "ours {}", ours.risk);
        assert!(mle.risk > 0.3, "mle {}", mle.risk);
    }

    #[test]
    fn mixture_sweep_uniform_shape() {
        let sweep =
            run_mixture_sweep(MixtureKind::Uniform1d, &[0.0, 0.15, 0.5, 1.0], 100, 60, 11).unwrap();
        assert_eq!(sweep.rows.len(), 4);
        // At p = 0 the truth is in the model: both risks are small and the
        // family distance vanishes.
        let r0 = &sweep.rows[0];
        assert_relative_eq!(r0.h2_model, 0.0, epsilon = 1e-12);
        assert!(r0.risk_ours < 0.02);
        assert!((r0.risk_ours / r0.risk_mle - 1.0).abs() < 0.5);
        // Below the crossover the MLE drifts to the wrong component.
        let r1 = &sweep.rows[1];
        assert!(r1.risk_mle > 2.0 * r1.risk_ours, "mle {} ours {}", r1.risk_mle, r1.risk_ours);
        let csv = sweep.to_csv();
        assert!(csv.starts_with("p,risk_ours,risk_mle,h2_model\n"));
    }

    #[test]
    fn parallel_and_serial_runs_agree_bit_exactly() {
        let s = tiny("table4-ex5");
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_risk_study(&s).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_risk_study(&s).unwrap());
        assert_eq!(serial.to_csv(), parallel.to_csv());
    }

    #[test]
    fn csv_has_fixed_schema() {
        let s = tiny("table4-ex7");
        let report = run_risk_study(&s).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "scenario,model,estimator,n,reps,failures,risk,std,rel_risk,q99,q999,q100,tests_mean,tests_std"
        );
        assert_eq!(csv.lines().count(), 1 + 2); // header + ours + midrange
    }
}
