//! Space-time field containers with region predicates; samples outside the
//! region are NaN, never silently zero.

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::real::Real;

/// Region of validity of a characteristic wave field.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionTag {
    /// No time semantics (static payloads).
    Static,
    /// t >= x . omega (+ front offset), plane progressing wave remainder.
    AbovePlaneCone { omega: Vec<f64> },
    /// t >= |x| (+ front offset), point-source remainder.
    AboveLightCone,
    /// -|x| <= t < |x|, incoming spherical wave remainder.
    BetweenCones,
    /// t <= x . omega within the unit ball (the region Q_-).
    BelowPlaneConeInBall { omega: Vec<f64> },
    /// The whole cylinder: unit ball x [t0, t1].
    BallCylinder,
    /// Exterior of the unit ball (region of exterior solves).
    OutsideBall,
}

impl RegionTag {
    /// Wire code for the WVF1 container.
    pub fn code(&self) -> u8 {
        match self {
            RegionTag::Static => 0,
            RegionTag::AbovePlaneCone { omega } => match axis_sign(omega) {
                Some(true) => 1,
                Some(false) => 2,
                None => 7,
            },
            RegionTag::AboveLightCone => 3,
            RegionTag::BetweenCones => 4,
            RegionTag::BelowPlaneConeInBall { omega } => match axis_sign(omega) {
                Some(false) => 8,
                _ => 5,
            },
            RegionTag::BallCylinder => 6,
            RegionTag::OutsideBall => 9,
        }
    }

    pub fn from_code(code: u8, dim: usize) -> Result<Self> {
        let mut e = vec![0.0; dim];
        e[dim - 1] = 1.0;
        let mut me = vec![0.0; dim];
        me[dim - 1] = -1.0;
        Ok(match code {
            0 => RegionTag::Static,
            1 | 7 => RegionTag::AbovePlaneCone { omega: e },
            2 => RegionTag::AbovePlaneCone { omega: me },
            3 => RegionTag::AboveLightCone,
            4 => RegionTag::BetweenCones,
            5 => RegionTag::BelowPlaneConeInBall { omega: e },
            8 => RegionTag::BelowPlaneConeInBall { omega: me },
            6 => RegionTag::BallCylinder,
            9 => RegionTag::OutsideBall,
            _ => return Err(Error::BadWvf1(format!("unknown region tag {code}"))),
        })
    }

    /// Region predicate at (x, t); `front` widens characteristic boundaries by
    /// the smeared-front offset.
    pub fn contains(&self, x: &[f64], t: f64, front: f64) -> bool {
        let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        match self {
            RegionTag::Static => true,
            RegionTag::AbovePlaneCone { omega } => {
                let xw: f64 = x.iter().zip(omega).map(|(a, b)| a * b).sum();
                t >= xw + front
            }
            RegionTag::AboveLightCone => t >= r + front,
            RegionTag::BetweenCones => t >= -r + front && t < r - front,
            RegionTag::BelowPlaneConeInBall { omega } => {
                let xw: f64 = x.iter().zip(omega).map(|(a, b)| a * b).sum();
                t <= xw - front && r <= 1.0
            }
            RegionTag::BallCylinder => r <= 1.0,
            RegionTag::OutsideBall => r >= 1.0,
        }
    }
}

fn axis_sign(omega: &[f64]) -> Option<bool> {
    let dim = omega.len();
    let mut e = vec![0.0; dim];
    e[dim - 1] = 1.0;
    let dot: f64 = omega.iter().zip(&e).map(|(a, b)| a * b).sum();
    if (dot - 1.0).abs() < 1e-12 {
        Some(true)
    } else if (dot + 1.0).abs() < 1e-12 {
        Some(false)
    } else {
        None
    }
}

/// One-sided limits of a field on a characteristic cone, one value per
/// spatial node (NaN where undefined).
#[derive(Debug, Clone)]
pub struct ConeLimits<R: Real> {
    pub upper: Vec<R>,
    pub lower: Vec<R>,
}

/// Space-time samples of a smooth remainder field on its region of validity.
#[derive(Debug, Clone)]
pub struct CharWaveField<R: Real> {
    pub grid: SpatialGrid<R>,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub region: RegionTag,
    /// Width of the smeared front (mollifier eps); 0 for fields without one.
    pub front_width: f64,
    /// values[time * grid.len() + node]; NaN = absent.
    values: Vec<R>,
    n_steps: usize,
}

impl<R: Real> CharWaveField<R> {
    pub fn new(
        grid: SpatialGrid<R>,
        t0: f64,
        t1: f64,
        dt: f64,
        region: RegionTag,
        front_width: f64,
        values: Vec<R>,
    ) -> Result<Self> {
        if !(dt > 0.0) || t1 <= t0 {
            return Err(Error::InvalidInput("need dt > 0 and t1 > t0".into()));
        }
        let dim = grid.dim();
        let limit = grid.min_spacing().to_f64_lossy() / (dim as f64).sqrt();
        if dt > limit * (1.0 + 1e-9) {
            return Err(Error::CflViolation {
                dt,
                limit,
                h: grid.min_spacing().to_f64_lossy(),
            });
        }
        let n_steps = ((t1 - t0) / dt).round() as usize + 1;
        if values.len() != n_steps * grid.len() {
            return Err(Error::InvalidInput(format!(
                "value count {} does not match {} steps x {} nodes",
                values.len(),
                n_steps,
                grid.len()
            )));
        }
        Ok(Self { grid, t0, t1, dt, region, front_width, values, n_steps })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn time(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    pub fn slice(&self, m: usize) -> &[R] {
        let n = self.grid.len();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn raw(&self) -> &[R] {
        &self.values
    }

    /// Value at a node/time index; None where the sample is absent.
    pub fn value(&self, m: usize, flat: usize) -> Option<R> {
        let v = self.values[m * self.grid.len() + flat];
        if v.is_nan() {
            None
        } else {
            Some(v)
        }
    }

    /// Space-time interpolation; returns None if any participating sample is
    /// absent or the point is outside the grid/time window.
    pub fn interp(&self, x: &[R], t: f64) -> Option<R> {
        if t < self.t0 - 1e-12 || t > self.t1 + 1e-12 || !self.grid.contains(x) {
            return None;
        }
        let ft = ((t - self.t0) / self.dt).max(0.0);
        let m = (ft.floor() as usize).min(self.n_steps - 2);
        let a = R::of(ft - m as f64);
        let v0 = self.grid.interp(self.slice(m), x).ok()?;
        let v1 = self.grid.interp(self.slice(m + 1), x).ok()?;
        let v = (R::one() - a) * v0 + a * v1;
        if v.is_nan() {
            None
        } else {
            Some(v)
        }
    }

    /// Largest |value| over present samples.
    pub fn peak(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| !v.is_nan())
            .map(|v| v.abs().to_f64_lossy())
            .fold(0.0, f64::max)
    }

    /// Applies the region mask: samples with contains() false become NaN.
    pub fn masked(mut self) -> Self {
        let n = self.grid.len();
        let coords: Vec<Vec<f64>> = self
            .grid
            .iter_indices()
            .map(|idx| self.grid.node(&idx).iter().map(|v| v.to_f64_lossy()).collect())
            .collect();
        for m in 0..self.n_steps {
            let t = self.time(m);
            for f in 0..n {
                if !self.region.contains(&coords[f], t, self.front_width * 2.0) {
                    self.values[m * n + f] = R::nan();
                }
            }
        }
        self
    }

    /// Pointwise linear combination a*self + b*other on identical layouts.
    pub fn lincomb(&self, a: R, other: &Self, b: R) -> Result<Self> {
        self.grid.compatible(&other.grid)?;
        if self.n_steps != other.n_steps || (self.t0 - other.t0).abs() > 1e-12 {
            return Err(Error::IncompatibleGrids("time layout differs".into()));
        }
        let values: Vec<R> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| a * *u + b * *v)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            t0: self.t0,
            t1: self.t1,
            dt: self.dt,
            region: self.region.clone(),
            front_width: self.front_width.max(other.front_width),
            values,
            n_steps: self.n_steps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cfl_violation_is_rejected() {
        let g: SpatialGrid<f64> = SpatialGrid::cube(2, 1.0, 11).unwrap();
        let h = g.min_spacing();
        let bad = CharWaveField::new(
            g.clone(),
            0.0,
            1.0,
            h, // > h/sqrt(2)
            RegionTag::Static,
            0.0,
            vec![],
        );
        assert!(matches!(bad, Err(Error::CflViolation { .. })));
    }

    #[test]
    fn masking_marks_absent_samples() {
        let g: SpatialGrid<f64> = SpatialGrid::cube(2, 1.5, 16).unwrap();
        let dt = 0.4 * g.min_spacing();
        let nt = ((2.0 - 0.0) / dt).round() as usize + 1;
        let f = CharWaveField::new(
            g.clone(),
            0.0,
            2.0,
            dt,
            RegionTag::AbovePlaneCone { omega: vec![0.0, 1.0] },
            0.0,
            vec![1.0; nt * g.len()],
        )
        .unwrap()
        .masked();
        let mut above = 0;
        let mut below = 0;
        for m in 0..f.n_steps() {
            let t = f.time(m);
            for (flat, idx) in g.iter_indices().enumerate() {
                let x = g.node(&idx);
                match f.value(m, flat) {
                    Some(_) => {
                        above += 1;
                        assert!(t >= x[1] - 1e-12);
                    }
                    None => below += 1,
                }
            }
        }
        assert!(above > 0 && below > 0);
    }
}
