//! Intruder motion: protocol generation, trial files and numerical
//! differentiation.
//!
//! Trial files are comma-separated with a header naming the columns
//! `t_s`, `z_i_m` and optionally `zdot_i_m_per_s` and `F_N`. A single
//! metadata comment `# W=<fraction>,v=<m/s>,trial=<id>` may precede the
//! header. When the velocity column is absent it is reconstructed from the
//! depth column by [`differentiate`].

use std::fmt::Write as _;
use std::path::Path;

use crate::dynamics::DEFAULT_DT;
use crate::error::{Error, Result};

/// Relative tolerance on sample spacing.
pub const SPACING_TOLERANCE: f64 = 0.01;

/// Smoothing window applied to velocities reconstructed from measured depth.
pub const MEASURED_SMOOTHING_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Time, s.
    pub t: f64,
    /// Depth below the undisturbed surface, m.
    pub z_i: f64,
    /// Downward velocity, m/s.
    pub zdot_i: f64,
}

/// Uniformly sampled intruder motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dt: f64,
    samples: Vec<TrajectorySample>,
}

impl Trajectory {
    /// Builds a trajectory, deriving the period from the time stamps.
    ///
    /// Requires at least two samples; spacing must be uniform to within
    /// [`SPACING_TOLERANCE`] of the period.
    pub fn new(samples: Vec<TrajectorySample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(
                "a trajectory needs at least two samples to define its period".into(),
            ));
        }
        let n = samples.len();
        let dt = (samples[n - 1].t - samples[0].t) / (n - 1) as f64;
        Self::with_dt(dt, samples)
    }

    /// Builds a trajectory with an explicit period. Allows a single sample.
    pub fn with_dt(dt: f64, samples: Vec<TrajectorySample>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sample period must be > 0, got {dt}"
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.t.is_finite() && s.z_i.is_finite() && s.zdot_i.is_finite()) {
                return Err(Error::InvalidInput(format!("sample {i} is not finite")));
            }
        }
        for (i, w) in samples.windows(2).enumerate() {
            let step = w[1].t - w[0].t;
            if step <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "time is not strictly increasing at sample {}",
                    i + 1
                )));
            }
            if (step - dt).abs() > SPACING_TOLERANCE * dt {
                return Err(Error::InvalidInput(format!(
                    "non-uniform spacing at sample {}: {step} s vs period {dt} s",
                    i + 1
                )));
            }
        }
        Ok(Self { dt, samples })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    /// Deepest point reached, m.
    pub fn max_depth(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.z_i)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Down / hold / up intrusion protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSpec {
    /// Intrusion speed, m/s.
    pub v_down: f64,
    /// Target depth, m.
    pub depth: f64,
    /// Hold duration at depth, s.
    pub t_sustain: f64,
    /// Withdrawal speed, m/s.
    pub v_up: f64,
    pub dt: f64,
    /// Final depth, at or above the surface (≤ 0), m.
    pub z_end: f64,
}

impl ProtocolSpec {
    /// 1 cm/s to 5 cm, 6 s hold, 1 cm/s back to the surface, sampled at 100 Hz.
    pub fn canonical() -> Self {
        Self {
            v_down: 0.01,
            depth: 0.05,
            t_sustain: 6.0,
            v_up: 0.01,
            dt: DEFAULT_DT,
            z_end: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("unreachable protocol: {msg}")))
            }
        };
        check(
            self.v_down.is_finite() && self.v_down > 0.0,
            "v_down must be > 0",
        )?;
        check(self.v_up.is_finite() && self.v_up > 0.0, "v_up must be > 0")?;
        check(
            self.depth.is_finite() && self.depth > 0.0,
            "depth must be > 0",
        )?;
        check(
            self.t_sustain.is_finite() && self.t_sustain >= 0.0,
            "t_sustain must be >= 0",
        )?;
        check(self.dt.is_finite() && self.dt > 0.0, "dt must be > 0")?;
        check(
            self.z_end.is_finite() && self.z_end <= 0.0,
            "z_end must be <= 0",
        )?;
        let total =
            self.depth / self.v_down + self.t_sustain + (self.depth - self.z_end) / self.v_up;
        check(total / self.dt < 1e8, "more than 1e8 samples")?;
        Ok(())
    }

    /// Sample counts of the down, hold and up phases.
    pub fn phase_samples(&self) -> [usize; 3] {
        let steps = |duration: f64| (duration / self.dt - 1e-9).ceil().max(0.0) as usize;
        [
            steps(self.depth / self.v_down).max(1),
            steps(self.t_sustain),
            steps((self.depth - self.z_end) / self.v_up).max(1),
        ]
    }
}

/// Piecewise-constant-velocity trajectory for `spec`.
///
/// Phase durations are rounded up to whole samples and the phase speed is
/// adjusted so every phase ends exactly on its target depth. Each sample's
/// velocity is that of the step arriving at it, so it equals the backward
/// difference of depth; the first sample is at rest.
pub fn generate_protocol(spec: &ProtocolSpec) -> Result<Trajectory> {
    spec.validate()?;
    let [n_down, n_hold, n_up] = spec.phase_samples();
    let dt = spec.dt;
    let mut samples = Vec::with_capacity(1 + n_down + n_hold + n_up);
    let mut push = |z_i: f64, zdot_i: f64| {
        let t = samples.len() as f64 * dt;
        samples.push(TrajectorySample { t, z_i, zdot_i });
    };
    push(0.0, 0.0);
    let v_down = spec.depth / (n_down as f64 * dt);
    for k in 1..n_down {
        push(spec.depth * k as f64 / n_down as f64, v_down);
    }
    push(spec.depth, v_down);
    for _ in 0..n_hold {
        push(spec.depth, 0.0);
    }
    let rise = spec.depth - spec.z_end;
    let v_up = -rise / (n_up as f64 * dt);
    for k in 1..=n_up {
        let z = if k == n_up {
            spec.z_end
        } else {
            spec.depth - rise * k as f64 / n_up as f64
        };
        push(z, v_up);
    }
    Trajectory::new(samples)
}

/// Velocity from a uniformly sampled depth series: central differences
/// (one-sided at the ends) followed by a centred moving average over
/// `window` samples, shrinking symmetrically near the ends.
pub fn differentiate(z: &[f64], dt: f64, window: usize) -> Result<Vec<f64>> {
    if z.len() < 2 {
        return Err(Error::InvalidInput(
            "differentiation needs at least two samples".into(),
        ));
    }
    if window == 0 || window % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "smoothing window must be odd, got {window}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "sample period must be > 0, got {dt}"
        )));
    }
    let n = z.len();
    let mut d = Vec::with_capacity(n);
    d.push((z[1] - z[0]) / dt);
    for i in 1..n - 1 {
        d.push((z[i + 1] - z[i - 1]) / (2.0 * dt));
    }
    d.push((z[n - 1] - z[n - 2]) / dt);
    if window == 1 {
        return Ok(d);
    }
    let half = window / 2;
    Ok((0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let span = &d[i - h..=i + h];
            span.iter().sum::<f64>() / span.len() as f64
        })
        .collect())
}

/// Trial annotations carried by the metadata comment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrialMeta {
    pub water_content: Option<f64>,
    /// Nominal intruder speed, m/s.
    pub velocity: Option<f64>,
    pub trial_id: Option<String>,
}

impl TrialMeta {
    fn parse(line: &str) -> std::result::Result<Self, String> {
        let mut meta = TrialMeta::default();
        for item in line.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("metadata item `{item}` is not key=value"))?;
            let number = || {
                value
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| format!("metadata `{key}` is not a number"))
            };
            match key.trim() {
                "W" => meta.water_content = Some(number()?),
                "v" => meta.velocity = Some(number()?),
                "trial" => meta.trial_id = Some(value.trim().to_owned()),
                other => return Err(format!("unknown metadata key `{other}`")),
            }
        }
        Ok(meta)
    }

    fn is_empty(&self) -> bool {
        self.water_content.is_none() && self.velocity.is_none() && self.trial_id.is_none()
    }

    fn to_line(&self) -> String {
        let mut parts = Vec::new();
        if let Some(w) = self.water_content {
            parts.push(format!("W={w}"));
        }
        if let Some(v) = self.velocity {
            parts.push(format!("v={v}"));
        }
        if let Some(id) = &self.trial_id {
            parts.push(format!("trial={id}"));
        }
        format!("# {}", parts.join(","))
    }
}

/// A recorded (or synthesized) trial: motion, optional measured force and
/// metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trajectory: Trajectory,
    /// Measured force aligned with the trajectory samples, N.
    pub force: Option<Vec<f64>>,
    pub meta: TrialMeta,
}

impl TrialRecord {
    pub fn new(trajectory: Trajectory, force: Option<Vec<f64>>, meta: TrialMeta) -> Result<Self> {
        if let Some(f) = &force {
            if f.len() != trajectory.len() {
                return Err(Error::LengthMismatch {
                    left: trajectory.len(),
                    right: f.len(),
                });
            }
            if let Some(i) = f.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "force sample {i} is not finite"
                )));
            }
        }
        Ok(Self {
            trajectory,
            force,
            meta,
        })
    }

    pub fn measured_force(&self) -> Result<&[f64]> {
        self.force
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("trial has no force column".into()))
    }

    /// Serializes to the trial CSV format. Numbers use the shortest
    /// representation that parses back to the same value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.meta.is_empty() {
            out.push_str(&self.meta.to_line());
            out.push('\n');
        }
        out.push_str("t_s,z_i_m,zdot_i_m_per_s");
        if self.force.is_some() {
            out.push_str(",F_N");
        }
        out.push('\n');
        for (i, s) in self.trajectory.samples().iter().enumerate() {
            let _ = write!(out, "{},{},{}", s.t, s.z_i, s.zdot_i);
            if let Some(f) = &self.force {
                let _ = write!(out, ",{}", f[i]);
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Reads a trial file.
pub fn load_trial(path: impl AsRef<Path>) -> Result<TrialRecord> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trial(&text, path)
}

/// Parses trial CSV text; `origin` only labels error messages.
pub fn parse_trial(text: &str, origin: impl AsRef<Path>) -> Result<TrialRecord> {
    let origin = origin.as_ref();
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        reason,
    };

    let mut meta = TrialMeta::default();
    let mut body_start = 0;
    let mut header_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            body_start += line.len() + 1;
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if !meta.is_empty() {
                return Err(parse_err(
                    idx + 1,
                    "only one metadata line is permitted".into(),
                ));
            }
            meta = TrialMeta::parse(comment).map_err(|e| parse_err(idx + 1, e))?;
            body_start += line.len() + 1;
            continue;
        }
        header_line = idx + 1;
        break;
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(&text.as_bytes()[body_start.min(text.len())..]);
    let header = reader
        .headers()
        .map_err(|e| parse_err(header_line, e.to_string()))?
        .clone();
    let column = |name: &str| header.iter().position(|h| h == name);
    let (Some(t_col), Some(z_col)) = (column("t_s"), column("z_i_m")) else {
        return Err(parse_err(
            header_line,
            format!(
                "header must name t_s and z_i_m, got `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    };
    let v_col = column("zdot_i_m_per_s");
    let f_col = column("F_N");
    if let Some(unknown) = header
        .iter()
        .find(|h| !matches!(*h, "t_s" | "z_i_m" | "zdot_i_m_per_s" | "F_N"))
    {
        return Err(parse_err(
            header_line,
            format!("unknown column `{unknown}`"),
        ));
    }

    let (mut t, mut z, mut v, mut f) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map_or(header_line, |p| header_line + p.line() as usize - 1);
            parse_err(line, e.to_string())
        })?;
        let line = header_line + record.position().map_or(0, |p| p.line() as usize - 1);
        let field = |col: usize| -> Result<f64> {
            let raw = record
                .get(col)
                .ok_or_else(|| parse_err(line, format!("missing column {}", col + 1)))?;
            let value: f64 = raw
                .parse()
                .map_err(|_| parse_err(line, format!("`{raw}` is not a number")))?;
            if value.is_finite() {
                Ok(value)
            } else {
                Err(parse_err(line, format!("non-finite value `{raw}`")))
            }
        };
        let ti = field(t_col)?;
        if let Some(&prev) = t.last() {
            if ti <= prev {
                return Err(parse_err(line, format!("time {ti} does not increase")));
            }
        }
        t.push(ti);
        z.push(field(z_col)?);
        if let Some(c) = v_col {
            v.push(field(c)?);
        }
        if let Some(c) = f_col {
            f.push(field(c)?);
        }
    }
    if t.len() < 2 {
        return Err(parse_err(
            header_line,
            "a trial needs at least two samples".into(),
        ));
    }

    let n = t.len();
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    if v_col.is_none() {
        let window = MEASURED_SMOOTHING_WINDOW.min(if n % 2 == 1 { n } else { n - 1 });
        v = differentiate(&z, dt, window)?;
    }
    let samples = t
        .iter()
        .zip(&z)
        .zip(&v)
        .map(|((&t, &z_i), &zdot_i)| TrajectorySample { t, z_i, zdot_i })
        .collect();
    let trajectory = Trajectory::new(samples).map_err(|e| parse_err(header_line, e.to_string()))?;
    TrialRecord::new(trajectory, f_col.map(|_| f), meta)
}
