//! Sobolev and Carleman-weighted norms on surfaces and space-time regions.

use crate::error::{Error, Result};
use crate::field::CharWaveField;
use crate::real::Real;
use crate::surface::BoundaryTrace;
use std::sync::Arc;

/// Weight evaluator psi(x, t) for the exponential factor e^{2 sigma psi}.
pub type PsiFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    L2,
    H1,
    Weighted0Sigma,
    Weighted1Sigma,
}

/// Norm descriptor. Weighted kinds need sigma > 0 and a weight; `psi_shift`
/// is subtracted inside the exponential (numerical normalization only: it
/// rescales both sides of every monitored inequality by the same factor).
#[derive(Clone)]
pub struct WeightedNorm {
    pub kind: NormKind,
    pub sigma: f64,
    pub psi: Option<PsiFn>,
    pub psi_shift: f64,
}

impl WeightedNorm {
    pub fn l2() -> Self {
        Self { kind: NormKind::L2, sigma: 0.0, psi: None, psi_shift: 0.0 }
    }

    pub fn h1() -> Self {
        Self { kind: NormKind::H1, sigma: 0.0, psi: None, psi_shift: 0.0 }
    }

    pub fn weighted(kind: NormKind, sigma: f64, psi: PsiFn) -> Self {
        Self { kind, sigma, psi: Some(psi), psi_shift: 0.0 }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.psi_shift = shift;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            NormKind::L2 | NormKind::H1 => Ok(()),
            _ => {
                if self.sigma < 0.0 {
                    return Err(Error::InvalidInput("weighted norms need sigma >= 0".into()));
                }
                if self.psi.is_none() {
                    return Err(Error::InvalidInput("weighted norms need a weight".into()));
                }
                Ok(())
            }
        }
    }

    fn factor(&self, x: &[f64], t: f64) -> f64 {
        match &self.psi {
            None => 1.0,
            Some(p) => (2.0 * self.sigma * (p(x, t) - self.psi_shift)).exp(),
        }
    }
}

/// Quadrature approximation of the named norm of a boundary trace.
pub fn surface_norm<R: Real>(trace: &BoundaryTrace<R>, norm: &WeightedNorm) -> Result<f64> {
    norm.validate()?;
    if matches!(norm.kind, NormKind::H1 | NormKind::Weighted1Sigma)
        && trace.tangential.len() != trace.values.len()
    {
        return Err(Error::InvalidInput("H1 norms need tangential samples".into()));
    }
    let mut acc = 0.0f64;
    for i in 0..trace.values.len() {
        let v = trace.values[i].to_f64_lossy();
        let g2: f64 = trace.tangential[i]
            .iter()
            .map(|c| {
                let c = c.to_f64_lossy();
                c * c
            })
            .sum();
        let w = trace.weights[i];
        let term = match norm.kind {
            NormKind::L2 => v * v,
            NormKind::H1 => v * v + g2,
            NormKind::Weighted0Sigma => norm.factor(&trace.points[i], trace.times[i]) * v * v,
            NormKind::Weighted1Sigma => {
                norm.factor(&trace.points[i], trace.times[i])
                    * (g2 + norm.sigma * norm.sigma * v * v)
            }
        };
        acc += w * term;
    }
    Ok(acc.sqrt())
}

/// Norm of a field over the space-time region selected by `include`, using
/// central differences for the space-time gradient (one-sided where a
/// neighbor sample is absent).
pub fn volume_norm<R: Real, P: Fn(&[f64], f64) -> bool>(
    field: &CharWaveField<R>,
    include: P,
    norm: &WeightedNorm,
) -> Result<f64> {
    norm.validate()?;
    let grid = &field.grid;
    let n = grid.len();
    let strides = grid.strides();
    let n_nodes = grid.n_nodes();
    let h: Vec<f64> = grid.spacing().iter().map(|v| v.to_f64_lossy()).collect();
    let cell: f64 = h.iter().product::<f64>() * field.dt;
    let coords: Vec<Vec<f64>> = grid
        .iter_indices()
        .map(|idx| grid.node(&idx).iter().map(|v| v.to_f64_lossy()).collect())
        .collect();
    let idxs: Vec<Vec<usize>> = grid.iter_indices().collect();
    let raw = field.raw();
    let get = |m: usize, f: usize| -> Option<f64> {
        let v = raw[m * n + f];
        if v.is_nan() {
            None
        } else {
            Some(v.to_f64_lossy())
        }
    };
    let mut acc = 0.0f64;
    for m in 0..field.n_steps() {
        let t = field.time(m);
        for f in 0..n {
            if !include(&coords[f], t) {
                continue;
            }
            let v = match get(m, f) {
                Some(v) => v,
                None => continue,
            };
            let term = match norm.kind {
                NormKind::L2 => v * v,
                NormKind::Weighted0Sigma => norm.factor(&coords[f], t) * v * v,
                NormKind::H1 | NormKind::Weighted1Sigma => {
                    let mut g2 = 0.0f64;
                    for k in 0..grid.dim() {
                        let minus = if idxs[f][k] > 0 { get(m, f - strides[k]) } else { None };
                        let plus = if idxs[f][k] + 1 < n_nodes[k] {
                            get(m, f + strides[k])
                        } else {
                            None
                        };
                        let d = fd(minus, v, plus, h[k]);
                        g2 += d * d;
                    }
                    let tm = if m > 0 { get(m - 1, f) } else { None };
                    let tp = if m + 1 < field.n_steps() { get(m + 1, f) } else { None };
                    let dtv = fd(tm, v, tp, field.dt);
                    g2 += dtv * dtv;
                    match norm.kind {
                        NormKind::H1 => v * v + g2,
                        _ => {
                            norm.factor(&coords[f], t)
                                * (g2 + norm.sigma * norm.sigma * v * v)
                        }
                    }
                }
            };
            acc += cell * term;
        }
    }
    Ok(acc.sqrt())
}

fn fd(minus: Option<f64>, center: f64, plus: Option<f64>, h: f64) -> f64 {
    match (minus, plus) {
        (Some(a), Some(b)) => (b - a) / (2.0 * h),
        (None, Some(b)) => (b - center) / h,
        (Some(a), None) => (center - a) / h,
        (None, None) => 0.0,
    }
}
