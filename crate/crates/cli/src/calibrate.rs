use std::path::PathBuf;

use mudforce::calibration::{
    fit_parameters, FitConfig, DEFAULT_MAX_EVALUATIONS, DEFAULT_STARTS, DEFAULT_TOLERANCE,
};
use mudforce::params::{DEFAULT_LAMBDA_DRAG, DEFAULT_RHO_M};
use mudforce::{load_trial, FitParam, IntruderGeometry, MudParameters, TrialRecord};

use crate::common::{write_file, Global, ParamSource, SimArgs};
use crate::error::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Trial CSV files with a force column, fitted jointly.
    #[arg(required = true)]
    trials: Vec<PathBuf>,

    /// Search bounds document overriding the defaults.
    #[arg(long)]
    bounds: Option<PathBuf>,

    /// Constants held fixed (drag factor, density) and the intruder geometry.
    #[command(flatten)]
    base: ParamSource,

    /// Also start the search from the fitted constants of the base set.
    #[arg(long)]
    start_from_base: bool,

    /// Water content of the trials when their files do not record it.
    #[arg(long)]
    water: Option<f64>,

    /// Latin-hypercube starts.
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    starts: usize,

    /// Cap on objective evaluations.
    #[arg(long, default_value_t = DEFAULT_MAX_EVALUATIONS)]
    max_evals: usize,

    /// Convergence tolerance on the RMSE, N.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,

    /// Name stored in the written parameter file.
    #[arg(long, default_value = "fit")]
    name: String,

    /// Parameter file to write.
    #[arg(short, long)]
    output: PathBuf,

    #[command(flatten)]
    sim: SimArgs,
}

fn recorded_water(trials: &[TrialRecord]) -> Result<Option<f64>, CliError> {
    let mut found: Option<f64> = None;
    for w in trials.iter().filter_map(|t| t.meta.water_content) {
        match found {
            Some(prev) if prev != w => {
                return Err(CliError::Usage(format!(
                    "trials disagree on water content: {prev} vs {w}"
                )))
            }
            _ => found = Some(w),
        }
    }
    Ok(found)
}

pub fn run(g: &Global, args: Args) -> Result<(), CliError> {
    if args.start_from_base && args.base.preset.is_none() && args.base.params.is_none() {
        return Err(CliError::Usage(
            "--start-from-base needs --preset or --params".into(),
        ));
    }
    let trials = args
        .trials
        .iter()
        .map(load_trial)
        .collect::<Result<Vec<_>, _>>()?;
    let base_set = args.base.load()?;

    let water = match (recorded_water(&trials)?, args.water) {
        (Some(w), Some(given)) if w != given => {
            return Err(CliError::Usage(format!(
                "--water {given} conflicts with the recorded water content {w}"
            )))
        }
        (Some(w), _) | (None, Some(w)) => w,
        (None, None) => match &base_set {
            Some(set) => set.params.water_content,
            None => {
                return Err(CliError::Usage(
                    "trials record no water content; pass --water".into(),
                ))
            }
        },
    };
    let (mut base, geometry) = match &base_set {
        Some(set) => (set.params, set.geometry),
        None => (
            MudParameters {
                k_i: 1.0,
                b_i: 1.0,
                k_w: 1.0,
                b_w: 1.0,
                alpha: 1.0,
                beta: 1.0,
                sigma_y: 1.0,
                zeta: 1.0,
                omega0: 1.0,
                lambda_drag: DEFAULT_LAMBDA_DRAG,
                rho_m: DEFAULT_RHO_M,
                water_content: water,
            },
            IntruderGeometry::default(),
        ),
    };
    base.water_content = water;

    let mut config = FitConfig {
        starts: args.starts,
        tolerance: args.tolerance,
        max_evaluations: args.max_evals,
        seed: g.seed,
        sim: args.sim.options()?,
        ..FitConfig::default()
    };
    if let Some(path) = &args.bounds {
        let text = std::fs::read_to_string(path).map_err(|source| mudforce::Error::Io {
            path: path.clone(),
            source,
        })?;
        config.apply_bounds_json(&text)?;
    }
    if args.start_from_base {
        let start = base.fitted_vector();
        config.initial = Some(std::array::from_fn(|i| {
            let (lo, hi) = config.bounds[i];
            start[i].clamp(lo, hi)
        }));
    }

    let fit = fit_parameters(&trials, &base, &geometry, &config)?;
    write_file(
        &args.output,
        &fit.to_json_string(Some(&args.name), &geometry, g.units),
    )?;

    println!("{:<17} {:.6e} N", "rmse", fit.objective);
    println!("{:<17} {}", "evaluations", fit.evaluations);
    println!("{:<17} {}", "converged", fit.converged);
    for p in FitParam::ALL {
        println!(
            "{:<17} {:.6e} {}",
            p.key(g.units),
            p.from_si(fit.params.get(p), g.units),
            if fit.at_bound[p as usize] {
                "(at bound)"
            } else {
                ""
            }
        );
    }
    let hit = fit.bounds_hit();
    if !hit.is_empty() {
        let names: Vec<_> = hit.iter().map(|p| p.name()).collect();
        println!("{:<17} {}", "bounds hit", names.join(", "));
    }
    Ok(())
}
