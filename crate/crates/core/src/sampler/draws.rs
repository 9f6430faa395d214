//! Stored posterior states and their Y-scale images.

use crate::error::{Error, Result};
use crate::evd::{convert_pp_nblocks, GevParams, ModelKind, PpParams, TransformedModel};

/// Column names of a draw row, sampled components first.
pub const COMPONENT_NAMES: [&str; 7] = ["beta_x", "log_alpha_x", "gamma_x", "lambda", "beta_y", "alpha_y", "gamma_y"];

/// Post burn-in states in sampling order.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    states: Vec<[f64; 4]>,
    c: f64,
    kind: ModelKind,
    /// Acceptance rates per component; NaN for a component that was not updated.
    pub acceptance: [f64; 4],
}

impl PosteriorDraws {
    /// Checks every state against the model constraints.
    pub fn new(states: Vec<[f64; 4]>, c: f64, kind: ModelKind, acceptance: [f64; 4]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::usage("posterior needs at least one draw"));
        }
        for (k, s) in states.iter().enumerate() {
            let ok = TransformedModel::new(s[0], s[1], s[2], s[3], c).is_ok_and(|m| m.satisfies_constraints());
            if !ok {
                return Err(Error::domain(format!("draw {k} {s:?} violates the model constraints")));
            }
        }
        Ok(Self { states, c, kind, acceptance })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The model kind the likelihood used; for exceedances its block count
    /// is the one the Y-scale parameters refer to.
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn states(&self) -> &[[f64; 4]] {
        &self.states
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }

    pub fn models(&self) -> impl Iterator<Item = TransformedModel> + '_ {
        self.states
            .iter()
            .map(|s| TransformedModel::new(s[0], s[1], s[2], s[3], self.c).expect("validated on construction"))
    }

    /// Y-scale parameters per draw, re-referenced to `n_blocks` blocks for
    /// exceedance models. Block-maxima draws ignore `n_blocks`.
    pub fn y_params_for_blocks(&self, n_blocks: Option<f64>) -> Result<Vec<GevParams>> {
        let mapped = posterior_for_original_params(self);
        match (self.kind, n_blocks) {
            (ModelKind::ThresholdExceedances { n_blocks: from, .. }, Some(to)) if to != from => mapped
                .iter()
                .map(|g| Ok(convert_pp_nblocks(&PpParams::from_gev(g, from)?, to)?.block_gev()))
                .collect(),
            _ => Ok(mapped),
        }
    }
}

/// Y-scale `(β_Y, α_Y, γ_Y)` for every draw, row for row.
pub fn posterior_for_original_params(draws: &PosteriorDraws) -> Vec<GevParams> {
    draws.models().map(|m| m.to_y_params()).collect()
}

/// Writes `iteration` plus the seven named columns.
pub fn write_draws_csv<W: std::io::Write>(draws: &PosteriorDraws, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iteration"];
    header.extend(COMPONENT_NAMES);
    w.write_record(&header)?;
    for (k, (s, y)) in draws.states.iter().zip(posterior_for_original_params(draws)).enumerate() {
        let mut row = vec![(k + 1).to_string()];
        row.extend(s.iter().map(|v| v.to_string()));
        row.extend([y.location, y.scale, y.shape].iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the sampled columns back; derived columns are recomputed.
pub fn read_draws_csv<R: std::io::Read>(input: R, c: f64, kind: ModelKind) -> Result<PosteriorDraws> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::usage(format!("draws file lacks a {name} column")))
    };
    let cols = [index("beta_x")?, index("log_alpha_x")?, index("gamma_x")?, index("lambda")?];
    let mut states = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let mut s = [0.0; 4];
        for (slot, &col) in s.iter_mut().zip(&cols) {
            let raw = rec.get(col).unwrap_or("");
            *slot = raw
                .parse()
                .map_err(|_| Error::usage(format!("draws line {}: cannot parse {raw:?}", k + 2)))?;
        }
        states.push(s);
    }
    PosteriorDraws::new(states, c, kind, [f64::NAN; 4])
}
