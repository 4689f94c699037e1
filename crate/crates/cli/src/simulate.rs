use std::fmt::Write as _;
use std::path::PathBuf;

use mudforce::calibration::rmse;
use mudforce::{generate_protocol, load_trial, simulate_with, ForceTrace};

use crate::common::{write_file, Global, ParamSource, ProtocolArgs, SimArgs};
use crate::error::CliError;
use crate::svg;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[command(flatten)]
    source: ParamSource,

    #[command(flatten)]
    protocol: ProtocolArgs,

    /// Drive the simulation with a recorded trial instead of a protocol.
    #[arg(long, conflicts_with_all = ["v_down", "depth", "sustain", "v_up", "z_end"])]
    trial: Option<PathBuf>,

    /// Trace CSV to write.
    #[arg(short, long)]
    output: PathBuf,

    /// Divide the force column by the largest force magnitude.
    #[arg(long)]
    normalize: bool,

    /// Also write force against time and depth as an SVG chart.
    #[arg(long)]
    svg: Option<PathBuf>,

    #[command(flatten)]
    sim: SimArgs,
}

pub fn summary(trace: &ForceTrace) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "samples               {}", trace.len());
    let _ = writeln!(
        s,
        "peak intrusion force  {:.6} N",
        trace.peak_intrusion_force()
    );
    let _ = writeln!(s, "suction minimum       {:.6} N", trace.suction_min());
    match trace.steady_sustain_force() {
        Some(f) => {
            let _ = writeln!(s, "steady sustain force  {f:.6} N");
        }
        None => s.push_str("steady sustain force  none\n"),
    }
    match trace.necking_time() {
        Some(t) => {
            let _ = writeln!(s, "necking time          {t:.2} s");
        }
        None => s.push_str("necking time          none\n"),
    }
    let _ = writeln!(s, "hysteresis area       {:.6e} J", trace.hysteresis_area());
    s
}

pub fn run(g: &Global, args: Args) -> Result<(), CliError> {
    let set = args.source.require()?;
    let options = args.sim.options()?;
    let (trajectory, measured) = match &args.trial {
        Some(path) => {
            let trial = load_trial(path)?;
            (trial.trajectory, trial.force)
        }
        None => (generate_protocol(&args.protocol.spec(g.dt))?, None),
    };
    let trace = simulate_with(&set.params, &set.geometry, &trajectory, options)?;

    let mut report = summary(&trace);
    if let Some(measured) = measured {
        let _ = writeln!(
            report,
            "rmse vs measured      {:.6} N",
            rmse(&trace.forces(), &measured)?
        );
    }
    let written = if args.normalize {
        let peak = trace.forces().iter().fold(0.0f64, |m, f| m.max(f.abs()));
        let _ = writeln!(report, "normalized by         {peak:.6} N");
        trace.normalized()
    } else {
        trace
    };
    write_file(&args.output, &written.to_csv())?;
    if let Some(path) = &args.svg {
        write_file(path, &svg::trace_chart(&written, args.normalize))?;
    }
    print!("{report}");
    Ok(())
}
