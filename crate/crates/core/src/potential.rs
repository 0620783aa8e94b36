//! Potentials q: grid samples of analytically defined bump sums, supported in the closed unit ball.

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::real::Real;
use rand::Rng;

/// One radial bump `amp * (1 - (|x-c|/width)^2)^3` on `|x-c| <= width` (C^2).
#[derive(Debug, Clone)]
pub struct RadialBump {
    pub center: Vec<f64>,
    pub width: f64,
    pub amp: f64,
}

impl RadialBump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
            / (self.width * self.width);
        if r2 >= 1.0 {
            0.0
        } else {
            let u = 1.0 - r2;
            self.amp * u * u * u
        }
    }
}

/// Analytic description of a potential: a finite sum of radial bumps.
#[derive(Debug, Clone, Default)]
pub struct BumpSum {
    pub bumps: Vec<RadialBump>,
}

impl BumpSum {
    pub fn single(center: Vec<f64>, width: f64, amp: f64) -> Self {
        Self { bumps: vec![RadialBump { center, width, amp }] }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.bumps.iter().map(|b| b.eval(x)).sum()
    }

    /// Largest |x| reached by any bump support.
    pub fn outer_radius(&self) -> f64 {
        self.bumps
            .iter()
            .map(|b| (b.center.iter().map(|c| c * c).sum::<f64>()).sqrt() + b.width)
            .fold(0.0, f64::max)
    }

    /// Smallest |x| reached by any bump support (for origin-hole checks).
    pub fn inner_radius(&self) -> f64 {
        self.bumps
            .iter()
            .map(|b| ((b.center.iter().map(|c| c * c).sum::<f64>()).sqrt() - b.width).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }

    /// Reflects every bump in z and averages, producing a potential even in z.
    pub fn symmetrized_in_z(&self) -> Self {
        let mut bumps = Vec::with_capacity(self.bumps.len() * 2);
        for b in &self.bumps {
            let mut half = b.clone();
            half.amp *= 0.5;
            let mut mirror = half.clone();
            let zk = mirror.center.len() - 1;
            mirror.center[zk] = -mirror.center[zk];
            bumps.push(half);
            bumps.push(mirror);
        }
        Self { bumps }
    }

    pub fn sample_onto<R: Real>(&self, grid: &SpatialGrid<R>) -> Result<Potential<R>> {
        let outer = self.outer_radius();
        if outer > 1.0 + 1e-12 {
            return Err(Error::InvalidInput(format!(
                "bump sum reaches |x| = {outer}, outside the unit ball"
            )));
        }
        let values: Vec<R> = grid
            .iter_indices()
            .map(|idx| {
                let x: Vec<f64> = grid.node(&idx).iter().map(|v| v.to_f64_lossy()).collect();
                R::of(self.eval(&x))
            })
            .collect();
        Potential::new(grid.clone(), values, 1.0, 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            bumps: self
                .bumps
                .iter()
                .map(|b| RadialBump { center: b.center.clone(), width: b.width, amp: b.amp * s })
                .collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut bumps = self.bumps.clone();
        bumps.extend(other.bumps.iter().cloned());
        Self { bumps }
    }
}

/// Draws a random sum of at most `max_bumps` radial bumps with centers in
/// |x| <= 0.7 and widths in [0.15, 0.3], keeping the smoothness proxy bounded.
pub fn random_bump_sum<G: Rng>(rng: &mut G, dim: usize, max_bumps: usize) -> BumpSum {
    let n = rng.gen_range(1..=max_bumps);
    let mut bumps = Vec::with_capacity(n);
    for _ in 0..n {
        let width = rng.gen_range(0.15..0.3);
        let cmax: f64 = 0.7f64.min(1.0 - width);
        let center = random_point_in_ball(rng, dim, cmax);
        let amp = rng.gen_range(-1.0..1.0);
        bumps.push(RadialBump { center, width, amp });
    }
    BumpSum { bumps }
}

/// Random bump sum whose support avoids the ball |x| <= hole (spherical problems).
pub fn random_bump_sum_with_hole<G: Rng>(
    rng: &mut G,
    dim: usize,
    max_bumps: usize,
    hole: f64,
) -> BumpSum {
    let n = rng.gen_range(1..=max_bumps);
    let mut bumps = Vec::with_capacity(n);
    for _ in 0..n {
        let width = rng.gen_range(0.15..0.25);
        let rmin = hole + width + 0.02;
        let rmax: f64 = 0.7f64.min(1.0 - width);
        let r = rng.gen_range(rmin..rmax);
        let dir = random_unit(rng, dim);
        let center = dir.iter().map(|d| d * r).collect();
        let amp = rng.gen_range(-1.0..1.0);
        bumps.push(RadialBump { center, width, amp });
    }
    BumpSum { bumps }
}

fn random_unit<G: Rng>(rng: &mut G, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|a| a / n).collect();
        }
    }
}

fn random_point_in_ball<G: Rng>(rng: &mut G, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
        if v.iter().map(|a| a * a).sum::<f64>() <= radius * radius {
            return v;
        }
    }
}

/// Gridded potential with support metadata and a smoothness proxy.
#[derive(Debug, Clone)]
pub struct Potential<R: Real> {
    pub grid: SpatialGrid<R>,
    values: Vec<R>,
    pub support_radius: f64,
    pub origin_hole_radius: f64,
    pub smoothness_bound_m: f64,
}

impl<R: Real> Potential<R> {
    pub fn new(
        grid: SpatialGrid<R>,
        mut values: Vec<R>,
        support_radius: f64,
        origin_hole_radius: f64,
    ) -> Result<Self> {
        if support_radius > 1.0 + 1e-12 {
            return Err(Error::InvalidInput("support radius must be <= 1".into()));
        }
        if values.len() != grid.len() {
            return Err(Error::InvalidInput("value count does not match grid".into()));
        }
        let min_extent = grid.extent().iter().cloned().fold(grid.extent()[0], R::min);
        if min_extent.to_f64_lossy() < 1.0 {
            return Err(Error::InvalidInput("grid must cover the unit ball".into()));
        }
        // Enforce the support invariants exactly at the sample level.
        let sr = R::of(support_radius);
        let hr = R::of(origin_hole_radius);
        for (f, idx) in grid.iter_indices().enumerate() {
            let r = SpatialGrid::norm2(&grid.node(&idx));
            if r > sr || (origin_hole_radius > 0.0 && r <= hr) {
                values[f] = R::zero();
            }
        }
        let m = smoothness_proxy(&grid, &values);
        Ok(Self { grid, values, support_radius, origin_hole_radius, smoothness_bound_m: m })
    }

    pub fn zero(grid: SpatialGrid<R>) -> Self {
        let n = grid.len();
        Self::new(grid, vec![R::zero(); n], 1.0, 0.0).unwrap()
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn value_at_node(&self, flat: usize) -> R {
        self.values[flat]
    }

    pub fn interp(&self, x: &[R]) -> Result<R> {
        self.grid.interp(&self.values, x)
    }

    /// q1 - q2 on a shared grid.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.grid.compatible(&other.grid)?;
        let values: Vec<R> =
            self.values.iter().zip(&other.values).map(|(a, b)| *a - *b).collect();
        Self::new(
            self.grid.clone(),
            values,
            self.support_radius.max(other.support_radius),
            self.origin_hole_radius.min(other.origin_hole_radius),
        )
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().map(|v| v.abs().to_f64_lossy()).fold(0.0, f64::max)
    }

    pub fn l2_ball(&self) -> f64 {
        let cell: f64 =
            self.grid.spacing().iter().map(|h| h.to_f64_lossy()).product();
        let mut acc = 0.0;
        for (f, idx) in self.grid.iter_indices().enumerate() {
            let r = SpatialGrid::norm2(&self.grid.node(&idx)).to_f64_lossy();
            if r <= 1.0 {
                let v = self.values[f].to_f64_lossy();
                acc += v * v;
            }
        }
        (acc * cell).sqrt()
    }

    pub fn is_even_in_z(&self, tol: f64) -> bool {
        let zk = self.grid.dim() - 1;
        let nz = self.grid.n_nodes()[zk];
        for idx in self.grid.iter_indices() {
            let mut m = idx.clone();
            m[zk] = nz - 1 - idx[zk];
            let a = self.values[self.grid.flat(&idx)].to_f64_lossy();
            let b = self.values[self.grid.flat(&m)].to_f64_lossy();
            if (a - b).abs() > tol {
                return false;
            }
        }
        true
    }
}

/// Finite-difference estimate of max |d^k q / dx_j^k| / k! style magnitude for
/// k up to dim + 4 along each axis. Tracks only the constant's dependency the
/// estimates need, not a certified C^{n+4} norm.
fn smoothness_proxy<R: Real>(grid: &SpatialGrid<R>, values: &[R]) -> f64 {
    let dim = grid.dim();
    let strides = grid.strides();
    let mut m = values.iter().map(|v| v.abs().to_f64_lossy()).fold(0.0, f64::max);
    for axis in 0..dim {
        let h = grid.spacing()[axis].to_f64_lossy();
        let n_axis = grid.n_nodes()[axis];
        let stride = strides[axis];
        let mut level: Vec<f64> = values.iter().map(|v| v.to_f64_lossy()).collect();
        let max_order = dim + 4;
        for k in 1..=max_order {
            let mut next = vec![0.0f64; level.len()];
            let mut worst: f64 = 0.0;
            for (f, idx) in grid.iter_indices().enumerate() {
                if idx[axis] + 1 < n_axis {
                    next[f] = level[f + stride] - level[f];
                    worst = worst.max(next[f].abs());
                }
            }
            m = m.max(worst / h.powi(k as i32));
            level = next;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn support_and_hole_invariants_enforced() {
        let g: SpatialGrid<f64> = SpatialGrid::cube(2, 1.5, 31).unwrap();
        let ones = vec![1.0; g.len()];
        let q = Potential::new(g.clone(), ones, 0.8, 0.2).unwrap();
        for (f, idx) in g.iter_indices().enumerate() {
            let r = SpatialGrid::norm2(&g.node(&idx));
            if r > 0.8 || r <= 0.2 {
                assert_eq!(q.values()[f], 0.0);
            }
        }
    }

    #[test]
    fn bump_sum_respects_ball_and_hole() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let b = random_bump_sum(&mut rng, 2, 5);
            assert!(b.outer_radius() <= 1.0 + 1e-12);
            let bh = random_bump_sum_with_hole(&mut rng, 3, 4, 0.15);
            assert!(bh.inner_radius() >= 0.15);
        }
    }

    #[test]
    fn symmetrized_bumps_are_even_in_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random_bump_sum(&mut rng, 2, 4).symmetrized_in_z();
        let g: SpatialGrid<f64> = SpatialGrid::cube(2, 1.5, 41).unwrap();
        let q = b.sample_onto(&g).unwrap();
        assert!(q.is_even_in_z(1e-14));
    }
}
