use std::path::PathBuf;

use mudforce::trajectory::TrialMeta;
use mudforce::{generate_protocol, simulate_with, TrialRecord};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::common::{Global, ParamSource, ProtocolArgs, SimArgs};
use crate::error::CliError;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    protocol: ProtocolArgs,

    /// Synthesize a force column from these constants.
    #[command(flatten)]
    source: ParamSource,

    /// Standard deviation of Gaussian noise added to the force column, N.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,

    /// Water content recorded in the metadata line (defaults to that of the
    /// parameter set).
    #[arg(long)]
    water: Option<f64>,

    /// Trial id recorded in the metadata line.
    #[arg(long)]
    trial_id: Option<String>,

    /// Trial CSV to write.
    #[arg(short, long)]
    output: PathBuf,

    #[command(flatten)]
    sim: SimArgs,
}

pub fn run(g: &Global, args: Args) -> Result<(), CliError> {
    if !(args.noise.is_finite() && args.noise >= 0.0) {
        return Err(CliError::Usage(format!(
            "--noise must be >= 0, got {}",
            args.noise
        )));
    }
    let trajectory = generate_protocol(&args.protocol.spec(g.dt))?;
    let set = args.source.load()?;
    if set.is_none() && args.noise > 0.0 {
        return Err(CliError::Usage("--noise needs --preset or --params".into()));
    }
    let force = match &set {
        Some(set) => {
            let trace =
                simulate_with(&set.params, &set.geometry, &trajectory, args.sim.options()?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let mut f = trace.forces();
            if args.noise > 0.0 {
                let normal = Normal::new(0.0, args.noise).expect("finite positive deviation");
                for x in &mut f {
                    *x += normal.sample(&mut rng);
                }
            }
            Some(f)
        }
        None => None,
    };
    let meta = TrialMeta {
        water_content: args.water.or(set.as_ref().map(|s| s.params.water_content)),
        velocity: Some(args.protocol.v_down),
        trial_id: args.trial_id,
    };
    let n = trajectory.len();
    let record = TrialRecord::new(trajectory, force, meta)?;
    record.save(&args.output)?;
    println!("wrote {n} samples to {}", args.output.display());
    Ok(())
}
