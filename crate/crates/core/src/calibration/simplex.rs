//! Nelder–Mead direct search on the unit cube.
//!
//! Trial points are projected onto `[0, 1]^n`, so every evaluated point
//! respects the bounds. Coefficients follow the dimension-adaptive choice of
//! Gao and Han, which behaves better than the classic ones beyond a handful
//! of dimensions.

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Stop once best and worst vertex values differ by at most this much.
    pub ftol: f64,
    /// Stop once every vertex lies within this distance of the best one
    /// (max-norm).
    pub xtol: f64,
    pub max_evals: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
    /// Best value after each iteration; non-increasing.
    pub history: Vec<f64>,
}

fn project(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

pub(crate) fn minimize<F>(mut objective: F, x0: &[f64], opts: SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (reflect, expand, contract, shrink) =
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(objective(x))
    };

    let mut start = x0.to_vec();
    project(&mut start);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(&start, &mut evals);
    simplex.push((start.clone(), f0));
    for i in 0..n {
        let mut v = start.clone();
        v[i] = if v[i] + opts.step <= 1.0 {
            v[i] + opts.step
        } else {
            v[i] - opts.step
        };
        let f = eval(&v, &mut evals);
        simplex.push((v, f));
    }

    let mut history = Vec::new();
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        history.push(simplex[0].1);
        let spread = simplex[n].1 - simplex[0].1;
        let extent = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (spread.is_finite() && spread <= opts.ftol) || extent <= opts.xtol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            project(&mut p);
            p
        };

        let xr = along(reflect);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(reflect * expand);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(reflect * contract);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-contract);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (v, f) in simplex.iter_mut().skip(1) {
            for (x, b) in v.iter_mut().zip(&best) {
                *x = b + shrink * (*x - b);
            }
            *f = eval(v, &mut evals);
        }
    }

    let (x, f) = simplex.swap_remove(0);
    SimplexOutcome {
        x,
        f,
        evals,
        converged,
        history,
    }
}

/// Repeats [`minimize`] from the best point found until a restart gains at
/// most `opts.ftol` or the evaluation budget runs out. Restarting rebuilds a
/// full-size simplex, which escapes the premature collapse the search
/// suffers on flat or stepped objectives.
pub(crate) fn minimize_restarted<F>(
    objective: F,
    x0: &[f64],
    opts: SimplexOptions,
) -> SimplexOutcome
where
    F: Fn(&[f64]) -> f64 + Copy,
{
    let mut out = minimize(objective, x0, opts);
    while out.evals < opts.max_evals {
        let budget = SimplexOptions {
            max_evals: opts.max_evals - out.evals,
            ..opts
        };
        let next = minimize(objective, &out.x, budget);
        out.evals += next.evals;
        let gain = out.f - next.f;
        out.history
            .extend(next.history.iter().map(|v| v.min(out.f)));
        if next.f < out.f {
            out.x = next.x;
            out.f = next.f;
        }
        out.converged = next.converged;
        if gain <= opts.ftol {
            break;
        }
    }
    out
}
