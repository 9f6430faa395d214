//! Derivative-free Nelder-Mead simplex maximization.
//!
//! Non-finite objective values are treated as infinitely bad, so infeasible
//! regions can be signalled by returning `-∞`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop when the spread of objective values across the simplex is below this.
    pub f_tol: f64,
    /// ... and every vertex lies within this distance of the best one.
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_evals: 20_000, f_tol: 1e-10, x_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evals: usize,
}

fn score(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximizes `f` from `x0` with an initial simplex spanned by `steps`.
pub fn maximize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], steps: &[f64], opts: SimplexOptions) -> Optimum {
    let dim = x0.len();
    assert_eq!(dim, steps.len(), "one initial step per coordinate");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        score(f(x))
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut converged = false;
    while evals < opts.max_evals {
        // best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = if best.is_finite() && worst.is_finite() { best - worst } else { f64::INFINITY };
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if spread <= opts.f_tol * (1.0 + best.abs()) && size <= opts.x_tol * (1.0 + norm(&simplex[0].0)) {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[dim].0).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = along(1.0);
        let vr = eval(&xr, &mut evals);
        if vr > best {
            let xe = along(2.0);
            let ve = eval(&xe, &mut evals);
            simplex[dim] = if ve > vr { (xe, ve) } else { (xr, vr) };
            continue;
        }
        if vr > simplex[dim - 1].1 {
            simplex[dim] = (xr, vr);
            continue;
        }
        let (xc, vc) = if vr > worst {
            let xc = along(0.5);
            let vc = eval(&xc, &mut evals);
            (xc, vc)
        } else {
            let xc = along(-0.5);
            let vc = eval(&xc, &mut evals);
            (xc, vc)
        };
        if vc > worst.max(vr) {
            simplex[dim] = (xc, vc);
            continue;
        }
        // shrink toward the best vertex
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (x, value) = simplex.swap_remove(0);
    Optimum { x, value, converged, evals }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
