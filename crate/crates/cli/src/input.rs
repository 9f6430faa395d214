//! Turns an input file and the `[input]` section into model-ready data.

use log::info;

use evscale::data::{
    block_maxima, decluster_runs, largest_k, read_series, read_sidecar, threshold_at_quantile, ColumnSpec,
    ExceedanceSet, Series,
};
use evscale::evd::ModelKind;
use evscale::Error;

use crate::config::{InputConfig, KindName};

pub struct Prepared {
    pub data: Vec<f64>,
    /// Kind referenced to the block count of the input.
    pub kind: ModelKind,
}

impl Prepared {
    /// The kind used for fitting and sampling: exceedances count one block
    /// per point.
    pub fn working_kind(&self) -> ModelKind {
        self.kind.with_n_blocks(self.data.len() as f64)
    }

    pub fn reference_n_blocks(&self) -> Option<f64> {
        match self.kind {
            ModelKind::BlockMaxima => None,
            ModelKind::ThresholdExceedances { n_blocks, .. } => Some(n_blocks),
        }
    }
}

pub fn prepare(cfg: &InputConfig) -> Result<Prepared, Error> {
    let path = cfg.path.as_deref().ok_or_else(|| Error::Usage("no input file; pass --input".into()))?;
    let column = match cfg.column_index {
        Some(i) => ColumnSpec::Index(i),
        None => ColumnSpec::Name(cfg.column.clone()),
    };
    let series = read_series(path, &column)?;
    let meta = read_sidecar(path)?.unwrap_or_default();
    let series = match cfg.block_maxima_of {
        Some(b) => block_maxima(&series, b)?,
        None => series,
    };
    let prepared = match cfg.kind {
        KindName::Gev => Prepared { data: series.values, kind: ModelKind::BlockMaxima },
        KindName::Pp => {
            let set = select_exceedances(cfg, &series, meta.threshold)?;
            let n_blocks = cfg
                .n_blocks
                .or(meta.n_blocks)
                .or(series.block_length.map(|_| series.n_blocks()))
                .ok_or_else(|| {
                    Error::Usage("point-process input needs a block count: set input.n_blocks or a sidecar".into())
                })?;
            let kind = ModelKind::exceedances(set.threshold, n_blocks)?;
            Prepared { data: set.exceedances, kind }
        }
    };
    info!("{} points from {}", prepared.data.len(), path.display());
    Ok(prepared)
}

fn select_exceedances(cfg: &InputConfig, s: &Series, sidecar_threshold: Option<f64>) -> Result<ExceedanceSet, Error> {
    if let Some(k) = cfg.largest {
        return largest_k(s, k);
    }
    let u = match (cfg.threshold, cfg.threshold_quantile) {
        (Some(u), _) => u,
        (None, Some(q)) => threshold_at_quantile(s, q)?.threshold,
        (None, None) => sidecar_threshold.ok_or_else(|| {
            Error::Usage(
                "point-process input needs a threshold: input.threshold, input.threshold_quantile, input.largest or a sidecar"
                    .into(),
            )
        })?,
    };
    match cfg.decluster_gap {
        Some(gap) => decluster_runs(s, u, gap),
        None => Ok(ExceedanceSet {
            exceedances: s.values.iter().copied().filter(|&x| x > u).collect(),
            threshold: u,
            n_total: s.len(),
            n_blocks: s.n_blocks(),
            times: None,
        }),
    }
}
