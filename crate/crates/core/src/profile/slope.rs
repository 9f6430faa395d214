//! Weighted least-squares slope of the profile-likelihood ridge.

use log::warn;

use crate::error::{Error, Result};

use super::grid::ProfileGrid;

/// Slope estimate with the weight diagnostics behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub c: f64,
    pub intercept: f64,
    /// Kish effective number of cells, `(Σw)² / Σw²`.
    pub effective_cells: f64,
    pub cells_used: usize,
}

/// The slope `c` of `γ_Y = a + c λ` fitted to the grid with weights
/// `exp(-2 (max - Pℓ))` over converged cells.
pub fn estimate_c(grid: &ProfileGrid) -> Result<f64> {
    estimate_c_detailed(grid).map(|f| f.c)
}

pub fn estimate_c_detailed(grid: &ProfileGrid) -> Result<SlopeFit> {
    let (_, _, top) = grid
        .max_cell()
        .ok_or_else(|| Error::numerical("profile grid has no converged finite cell"))?;
    let mut points = Vec::new();
    for (gamma, lambda, v, ok) in grid.cells() {
        if ok && v.is_finite() {
            let w = (-2.0 * (top - v)).exp();
            if w > 0.0 {
                points.push((lambda, gamma, w));
            }
        }
    }
    let sw: f64 = points.iter().map(|p| p.2).sum();
    let sw2: f64 = points.iter().map(|p| p.2 * p.2).sum();
    let mean_l = points.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let mean_g = points.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = points.iter().map(|p| p.2 * (p.0 - mean_l).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| p.2 * (p.0 - mean_l) * (p.1 - mean_g)).sum();
    let lambda_span = grid.lambda_values.last().unwrap_or(&0.0) - grid.lambda_values.first().unwrap_or(&0.0);
    if !(sxx > 1e-12 * sw * lambda_span.max(1e-300).powi(2)) || !(sxx > 0.0) {
        return Err(Error::numerical(
            "the weighted cells carry no spread in λ; refine the grid or widen its λ range",
        ));
    }
    let c = sxy / sxx;
    let effective_cells = sw * sw / sw2;
    let total = grid.loglik.len();
    if effective_cells > 0.5 * total as f64 {
        warn!(
            "profile nearly flat: {effective_cells:.0} of {total} cells carry weight, slope {c:.4} is poorly determined"
        );
    } else if effective_cells < 3.0 {
        warn!("only {effective_cells:.1} effective cells in the slope fit; consider a finer grid");
    }
    Ok(SlopeFit { c, intercept: mean_g - c * mean_l, effective_cells, cells_used: points.len() })
}

/// Writes `gamma,lambda,loglik,converged` rows.
pub fn write_grid_csv<W: std::io::Write>(grid: &ProfileGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma", "lambda", "loglik", "converged"])?;
    for (g, l, v, ok) in grid.cells() {
        w.write_record([g.to_string(), l.to_string(), v.to_string(), ok.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a grid written by [`write_grid_csv`].
pub fn read_grid_csv<R: std::io::Read>(input: R) -> Result<ProfileGrid> {
    let mut rows = Vec::new();
    for (k, rec) in csv::Reader::from_reader(input).records().enumerate() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::usage(format!("grid row {} is short", k + 2)));
        let num = |i: usize| -> Result<f64> {
            let s = field(i)?;
            s.parse::<f64>().map_err(|_| Error::usage(format!("grid row {}: cannot parse {s:?}", k + 2)))
        };
        let ok = field(3)?
            .parse::<bool>()
            .map_err(|_| Error::usage(format!("grid row {}: bad converged flag", k + 2)))?;
        rows.push((num(0)?, num(1)?, num(2)?, ok));
    }
    let mut gammas: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mut lambdas: Vec<f64> = rows.iter().map(|r| r.1).collect();
    for axis in [&mut gammas, &mut lambdas] {
        axis.sort_by(f64::total_cmp);
        axis.dedup();
    }
    let (ng, nl) = (gammas.len(), lambdas.len());
    if ng * nl != rows.len() {
        return Err(Error::usage(format!("grid file has {} rows, not a {ng}x{nl} rectangle", rows.len())));
    }
    let mut loglik = nalgebra::DMatrix::from_element(ng, nl, f64::NAN);
    let mut converged = nalgebra::DMatrix::from_element(ng, nl, false);
    for (g, l, v, ok) in rows {
        let i = gammas.partition_point(|&x| x < g);
        let j = lambdas.partition_point(|&x| x < l);
        loglik[(i, j)] = v;
        converged[(i, j)] = ok;
    }
    ProfileGrid::new(gammas, lambdas, loglik, converged)
}
