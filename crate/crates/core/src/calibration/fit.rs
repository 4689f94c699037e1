use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{Map, Value};

use super::simplex::{minimize_restarted, SimplexOptions, SimplexOutcome};
use crate::dynamics::{MudState, SimOptions, Stepper};
use crate::error::{Error, Result};
use crate::model::Regime;
use crate::params::{FitParam, IntruderGeometry, MudParameters, ParameterSet, Units};
use crate::trajectory::{Trajectory, TrialRecord};

pub const DEFAULT_STARTS: usize = 8;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_EVALUATIONS: usize = 60_000;

/// Default search box, SI, in [`FitParam::ALL`] order.
pub const DEFAULT_BOUNDS: [(f64, f64); 9] = [
    (1e4, 1e7),
    (1e4, 1e7),
    (1e4, 1e7),
    (1e4, 1e7),
    (1e3, 1e6),
    (0.01, 1.0),
    (100.0, 1e5),
    (0.05, 2.0),
    (0.1, 20.0),
];

/// Distance from a bound, as a fraction of the search range, under which a
/// fitted value is reported as sitting on it.
const AT_BOUND_FRACTION: f64 = 1e-6;

const START_STEP: f64 = 0.1;
const XTOL: f64 = 1e-11;
/// Half-width of the uniform perturbation of a hop, in normalized coordinates.
const HOP_RADIUS: f64 = 0.03;
/// Consecutive unsuccessful hops before the search stops.
const HOP_PATIENCE: usize = 4;
/// Evaluation cap of a single hop.
const HOP_EVALS: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Closed search interval per fitted constant, SI, [`FitParam::ALL`] order.
    pub bounds: [(f64, f64); 9],
    /// Optional starting point, tried in addition to the random starts.
    pub initial: Option<[f64; 9]>,
    /// Number of Latin-hypercube starts.
    pub starts: usize,
    /// Convergence tolerance on the objective, N.
    pub tolerance: f64,
    /// Cap on objective evaluations across all starts.
    pub max_evaluations: usize,
    pub seed: u64,
    pub sim: SimOptions,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            bounds: DEFAULT_BOUNDS,
            initial: None,
            starts: DEFAULT_STARTS,
            tolerance: DEFAULT_TOLERANCE,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            seed: 0,
            sim: SimOptions::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        for (p, &(lo, hi)) in FitParam::ALL.iter().zip(&self.bounds) {
            let bad = |reason: String| Error::InvalidParameter {
                name: p.name(),
                reason,
            };
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(bad(format!(
                    "bounds [{lo}, {hi}] must be finite with lower < upper"
                )));
            }
            let ok = match p {
                FitParam::SigmaY => lo >= 0.0,
                FitParam::Beta => lo > 0.0 && hi <= 1.0,
                _ => lo > 0.0,
            };
            if !ok {
                return Err(bad(format!(
                    "bounds [{lo}, {hi}] leave the admissible range"
                )));
            }
        }
        if let Some(x) = &self.initial {
            for (p, (&v, &(lo, hi))) in FitParam::ALL.iter().zip(x.iter().zip(&self.bounds)) {
                if !(lo..=hi).contains(&v) {
                    return Err(Error::InvalidParameter {
                        name: p.name(),
                        reason: format!("initial value {v} outside [{lo}, {hi}]"),
                    });
                }
            }
        }
        if self.starts == 0 && self.initial.is_none() {
            return Err(Error::InvalidInput("need at least one start".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerance must be > 0".into()));
        }
        if self.max_evaluations == 0 {
            return Err(Error::InvalidInput("max_evaluations must be > 0".into()));
        }
        Ok(())
    }

    /// Applies a bounds document, `{"<key>": [lower, upper], ...}`, on top of
    /// the current bounds. Keys follow the parameter file, in either unit
    /// system.
    pub fn apply_bounds_json(&mut self, text: &str) -> Result<()> {
        let value: Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidInput("bounds document must be an object".into()))?;
        for (key, v) in obj {
            let (idx, scale) = FitParam::ALL
                .iter()
                .enumerate()
                .find_map(|(i, p)| {
                    [Units::Si, Units::Paper]
                        .into_iter()
                        .find(|u| p.key(*u) == key || (p.name() == key && *u == Units::Si))
                        .map(|u| (i, p.scale(u)))
                })
                .ok_or_else(|| Error::InvalidInput(format!("unknown bounds key `{key}`")))?;
            let pair = v
                .as_array()
                .filter(|a| a.len() == 2)
                .and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)))
                .ok_or_else(|| {
                    Error::InvalidInput(format!("bounds for `{key}` must be [lower, upper]"))
                })?;
            self.bounds[idx] = (pair.0 * scale, pair.1 * scale);
        }
        self.validate()
    }
}

/// Outcome of [`fit_parameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: MudParameters,
    /// Pooled RMSE over all trial samples at `params`, N.
    pub objective: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Per-parameter flag, [`FitParam::ALL`] order: the value sits on a bound.
    pub at_bound: [bool; 9],
    /// Best objective after each simplex iteration along the winning path.
    pub history: Vec<f64>,
    pub seed: u64,
    pub starts: usize,
}

impl FitResult {
    pub fn bounds_hit(&self) -> Vec<FitParam> {
        FitParam::ALL
            .into_iter()
            .zip(self.at_bound)
            .filter_map(|(p, hit)| hit.then_some(p))
            .collect()
    }

    /// Parameter document with an appended `fit_report` block.
    pub fn to_json(
        &self,
        name: Option<&str>,
        geometry: &IntruderGeometry,
        units: Units,
    ) -> Map<String, Value> {
        let set = ParameterSet {
            name: name.map(str::to_owned),
            params: self.params,
            geometry: *geometry,
            reported_rmse: Some(self.objective),
        };
        let mut obj = set.to_json(units);
        let mut report = Map::new();
        report.insert("objective_rmse_N".into(), Value::from(self.objective));
        report.insert("evaluations".into(), Value::from(self.evaluations));
        report.insert("converged".into(), Value::from(self.converged));
        report.insert("seed".into(), Value::from(self.seed));
        report.insert("starts".into(), Value::from(self.starts));
        report.insert(
            "bounds_hit".into(),
            Value::from(
                self.bounds_hit()
                    .iter()
                    .map(|p| p.name())
                    .collect::<Vec<_>>(),
            ),
        );
        obj.insert("fit_report".into(), Value::Object(report));
        obj
    }

    pub fn to_json_string(
        &self,
        name: Option<&str>,
        geometry: &IntruderGeometry,
        units: Units,
    ) -> String {
        let mut s =
            serde_json::to_string_pretty(&Value::Object(self.to_json(name, geometry, units)))
                .expect("fit document serializes");
        s.push('\n');
        s
    }
}

/// Maps the unit cube onto the search box, logarithmically for ranges
/// spanning a decade or more.
struct Scaling {
    bounds: [(f64, f64); 9],
    log: [bool; 9],
}

impl Scaling {
    fn new(bounds: [(f64, f64); 9]) -> Self {
        let log = bounds.map(|(lo, hi)| lo > 0.0 && hi / lo >= 10.0);
        Self { bounds, log }
    }

    fn to_theta(&self, u: &[f64]) -> [f64; 9] {
        std::array::from_fn(|i| {
            let (lo, hi) = self.bounds[i];
            let v = if self.log[i] {
                (lo.ln() + u[i] * (hi.ln() - lo.ln())).exp()
            } else {
                lo + u[i] * (hi - lo)
            };
            v.clamp(lo, hi)
        })
    }

    fn to_u(&self, theta: &[f64; 9]) -> [f64; 9] {
        std::array::from_fn(|i| {
            let (lo, hi) = self.bounds[i];
            if self.log[i] {
                (theta[i].ln() - lo.ln()) / (hi.ln() - lo.ln())
            } else {
                (theta[i] - lo) / (hi - lo)
            }
        })
    }
}

struct Objective<'a> {
    /// Trajectory, measured force, and the number of leading samples before
    /// the first withdrawal sample.
    trials: Vec<(&'a Trajectory, &'a [f64], usize)>,
    samples: usize,
    approach_samples: usize,
    base: MudParameters,
    geometry: IntruderGeometry,
    sim: SimOptions,
}

impl<'a> Objective<'a> {
    fn new(
        trials: &'a [TrialRecord],
        base: MudParameters,
        geometry: IntruderGeometry,
        sim: SimOptions,
    ) -> Self {
        let trials: Vec<_> = trials
            .iter()
            .map(|t| {
                let split = t
                    .trajectory
                    .samples()
                    .iter()
                    .position(|s| sim.classify(s.zdot_i) == Regime::Withdrawal)
                    .unwrap_or(t.trajectory.len());
                (&t.trajectory, t.force.as_deref().unwrap_or_default(), split)
            })
            .collect();
        Self {
            samples: trials.iter().map(|t| t.0.len()).sum(),
            approach_samples: trials.iter().map(|t| t.2).sum(),
            trials,
            base,
            geometry,
            sim,
        }
    }

    /// Pooled RMSE, or infinity when the candidate cannot be simulated.
    fn rmse(&self, theta: &[f64; 9]) -> f64 {
        self.pooled(theta, false)
    }

    /// RMSE over the samples preceding each trial's first withdrawal sample,
    /// which depend only on the intrusion and bulk-spring constants.
    fn approach_rmse(&self, theta: &[f64; 9]) -> f64 {
        self.pooled(theta, true)
    }

    fn pooled(&self, theta: &[f64; 9], approach_only: bool) -> f64 {
        let params = self.base.with_fitted_vector(theta);
        let mut sum = 0.0;
        for (traj, measured, split) in &self.trials {
            let Ok(stepper) = Stepper::new(&params, &self.geometry, traj.dt(), self.sim) else {
                return f64::INFINITY;
            };
            let mut state = MudState::at_rest(traj.samples()[0].z_i);
            let end = if approach_only { *split } else { traj.len() };
            for (s, m) in traj.samples()[..end].iter().zip(*measured) {
                match stepper.step(&mut state, s.z_i, s.zdot_i) {
                    Ok(out) => {
                        let d = out.stress.force - m;
                        sum += d * d;
                    }
                    Err(_) => return f64::INFINITY,
                }
            }
        }
        let n = if approach_only {
            self.approach_samples
        } else {
            self.samples
        };
        (sum / n as f64).sqrt()
    }
}

fn latin_hypercube(n: usize, dims: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; dims]; n];
    for d in 0..dims {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(rng);
        for (p, s) in points.iter_mut().zip(strata) {
            p[d] = (s as f64 + rng.random::<f64>()) / n as f64;
        }
    }
    points
}

fn check_trials(trials: &[TrialRecord]) -> Result<Option<f64>> {
    if trials.is_empty() {
        return Err(Error::InvalidInput(
            "calibration needs at least one trial".into(),
        ));
    }
    let mut water = None;
    for t in trials {
        t.measured_force()?;
        if let Some(w) = t.meta.water_content {
            match water {
                None => water = Some(w),
                Some(prev) if prev != w => {
                    return Err(Error::InvalidInput(format!(
                        "trials disagree on water content: {prev} vs {w}"
                    )))
                }
                Some(_) => {}
            }
        }
    }
    let informative = trials.iter().any(|t| {
        let s = t.trajectory.samples();
        s.iter().any(|x| x.z_i > 0.0) && s.iter().any(|x| x.z_i != s[0].z_i)
    });
    if !informative {
        return Err(Error::Degenerate(
            "no trial moves the intruder through the mud; the objective is insensitive to the parameters".into(),
        ));
    }
    Ok(water)
}

/// Constants governing the samples before the first withdrawal.
const APPROACH: [usize; 4] = [0, 1, 4, 5];
/// Constants that only act once the intruder withdraws.
const RETREAT: [usize; 5] = [2, 3, 6, 7, 8];

/// Best point of a multi-start search over a subset of coordinates.
struct StageOutcome {
    u: [f64; 9],
    f: f64,
    evals: usize,
    history: Vec<f64>,
    improved: bool,
}

/// Multi-start simplex search over the coordinates `free`, holding the
/// others at `anchor`. Starts run in parallel and are reduced in order.
fn stage<F>(
    objective: F,
    free: &[usize],
    anchor: [f64; 9],
    starts: &[Vec<f64>],
    opts: SimplexOptions,
) -> StageOutcome
where
    F: Fn(&[f64; 9]) -> f64 + Sync,
{
    let embed = |x: &[f64]| {
        let mut u = anchor;
        for (&i, &v) in free.iter().zip(x) {
            u[i] = v;
        }
        u
    };
    let sub = |x: &[f64]| objective(&embed(x));
    let runs: Vec<(f64, SimplexOutcome)> = starts
        .par_iter()
        .map(|x0| (sub(x0), minimize_restarted(sub, x0, opts)))
        .collect();
    let evals = runs.iter().map(|(_, r)| r.evals + 1).sum();
    let improved = runs.iter().any(|(f0, r)| r.f < *f0);
    let (_, best) = runs
        .into_iter()
        .min_by(|a, b| a.1.f.total_cmp(&b.1.f))
        .expect("at least one start");
    StageOutcome {
        u: embed(&best.x),
        f: best.f,
        evals,
        history: best.history,
        improved,
    }
}

/// Fits the nine model constants to measured trials by minimizing the pooled
/// force RMSE.
///
/// `base` supplies the constants held fixed (drag factor, density, water
/// content); its fitted constants are ignored unless passed as
/// [`FitConfig::initial`].
///
/// The search runs in three stages. The intrusion and bulk-spring constants
/// are first fitted to the samples before each trial's first withdrawal,
/// which they alone determine. The withdrawal and necking constants are then
/// fitted to the full trials with the first group held. Both stages use
/// Latin-hypercube multi-start simplex searches. Finally all nine constants
/// are polished jointly by restarted simplex searches until a restart gains
/// less than the tolerance, then perturbed and re-polished a few times to
/// step across the seams the sampled yield switch puts in the objective.
/// Parallel work is collected in order, so the
/// result depends only on the inputs and the seed.
pub fn fit_parameters(
    trials: &[TrialRecord],
    base: &MudParameters,
    geometry: &IntruderGeometry,
    config: &FitConfig,
) -> Result<FitResult> {
    config.validate()?;
    geometry.validate()?;
    let water = check_trials(trials)?;

    let mut base = *base;
    if let Some(w) = water {
        base.water_content = w;
    }
    let objective = Objective::new(trials, base, *geometry, config.sim);
    let scaling = Scaling::new(config.bounds);
    let full = |u: &[f64; 9]| objective.rmse(&scaling.to_theta(u));
    let approach = |u: &[f64; 9]| objective.approach_rmse(&scaling.to_theta(u));

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let initial = config.initial.map(|x| scaling.to_u(&x));
    let starts_for = |free: &[usize], rng: &mut ChaCha8Rng| {
        let mut s: Vec<Vec<f64>> = initial
            .iter()
            .map(|u| free.iter().map(|&i| u[i]).collect())
            .collect();
        s.extend(latin_hypercube(config.starts, free.len(), rng));
        s
    };
    let n_starts = config.starts + usize::from(initial.is_some());
    let budget = config.max_evaluations;
    let explore = |share: f64| SimplexOptions {
        step: START_STEP,
        ftol: config.tolerance,
        xtol: XTOL,
        max_evals: ((budget as f64 * share) as usize / n_starts).max(1),
    };

    let mut anchor = initial.unwrap_or([0.5; 9]);
    let mut evaluations = 0;
    let mut improved = false;
    if objective.approach_samples > 0 {
        let first = stage(
            approach,
            &APPROACH,
            anchor,
            &starts_for(&APPROACH, &mut rng),
            explore(0.2),
        );
        anchor = first.u;
        evaluations += first.evals;
        improved |= first.improved;
    }
    let second = stage(
        full,
        &RETREAT,
        anchor,
        &starts_for(&RETREAT, &mut rng),
        explore(0.3),
    );
    evaluations += second.evals;
    improved |= second.improved;
    if !improved {
        return Err(Error::Optimizer(format!(
            "none of the {n_starts} starts improved on its initial point"
        )));
    }
    if !second.f.is_finite() {
        return Err(Error::Optimizer(
            "every candidate failed to simulate".into(),
        ));
    }

    let polish = SimplexOptions {
        step: START_STEP,
        ftol: config.tolerance,
        xtol: XTOL,
        max_evals: budget.saturating_sub(evaluations).max(1),
    };
    let last = minimize_restarted(full_slice(&full), &second.u, polish);
    evaluations += last.evals;
    let mut history = second.history;
    history.extend(last.history.iter().map(|v| v.min(second.f)));
    let (mut x, mut converged) = if last.f <= second.f {
        (
            <[f64; 9]>::try_from(last.x.as_slice()).expect("nine coordinates"),
            last.converged,
        )
    } else {
        (second.u, false)
    };
    let mut best_f = last.f.min(second.f);

    // The yield switch fires on whole samples, so the objective is only
    // piecewise smooth in the withdrawal constants and a converged simplex
    // can sit on the wrong side of a seam. Hop to nearby points and polish.
    let mut misses = 0;
    while misses < HOP_PATIENCE && evaluations < budget {
        let start: Vec<f64> = x
            .iter()
            .map(|v| (v + rng.random_range(-HOP_RADIUS..HOP_RADIUS)).clamp(0.0, 1.0))
            .collect();
        let opts = SimplexOptions {
            max_evals: (budget - evaluations).min(HOP_EVALS),
            ..polish
        };
        let hop = minimize_restarted(full_slice(&full), &start, opts);
        evaluations += hop.evals;
        if hop.f < best_f - config.tolerance {
            x = hop.x.as_slice().try_into().expect("nine coordinates");
            converged = hop.converged;
            best_f = hop.f;
            history.push(best_f);
            misses = 0;
        } else {
            misses += 1;
        }
    }

    let theta = scaling.to_theta(&x);
    let u = scaling.to_u(&theta);
    let at_bound = u.map(|v| v <= AT_BOUND_FRACTION || v >= 1.0 - AT_BOUND_FRACTION);
    Ok(FitResult {
        params: base.with_fitted_vector(&theta),
        objective: objective.rmse(&theta),
        evaluations,
        converged,
        at_bound,
        history,
        seed: config.seed,
        starts: n_starts,
    })
}

fn full_slice<F: Fn(&[f64; 9]) -> f64>(f: &F) -> impl Fn(&[f64]) -> f64 + Copy + '_ {
    move |x: &[f64]| f(x.try_into().expect("nine coordinates"))
}
