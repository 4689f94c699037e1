use std::path::PathBuf;

use mudforce::calibration::error_profile;
use mudforce::load_trial;

use crate::common::{trial_label, write_file, Global, ParamSource, SimArgs};
use crate::error::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    source: ParamSource,

    /// Trial CSV files with a force column.
    #[arg(required = true)]
    trials: Vec<PathBuf>,

    /// Error profile CSV to write (mean and standard deviation of
    /// predicted minus measured force on a normalized axis).
    #[arg(short, long)]
    output: PathBuf,

    /// Per-trial RMSE table to write.
    #[arg(long)]
    rmse_table: Option<PathBuf>,

    #[command(flatten)]
    sim: SimArgs,
}

pub fn run(_g: &Global, args: Args) -> Result<(), CliError> {
    let set = args.source.require()?;
    let trials = args
        .trials
        .iter()
        .map(load_trial)
        .collect::<Result<Vec<_>, _>>()?;
    let profile = error_profile(&trials, &set.params, &set.geometry, args.sim.options()?)?;
    write_file(&args.output, &profile.to_csv())?;

    let mut table = String::from("trial,rmse_N\n");
    for ((path, trial), r) in args.trials.iter().zip(&trials).zip(&profile.trial_rmse) {
        table.push_str(&format!(
            "{},{r}\n",
            trial_label(path, trial.meta.trial_id.as_deref())
        ));
    }
    let n = profile.trial_rmse.len() as f64;
    let mean = profile.trial_rmse.iter().sum::<f64>() / n;
    let std = (profile
        .trial_rmse
        .iter()
        .map(|r| (r - mean).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    if let Some(path) = &args.rmse_table {
        write_file(path, &table)?;
    }
    print!("{table}");
    println!(
        "mean rmse {mean:.6} N, std {std:.6} N over {} trials",
        trials.len()
    );
    Ok(())
}
