//! Explicit leapfrog solver for u_tt = Lap u - q u + source on uniform grids,
//! with node roles (update / forced Dirichlet / frozen), moving-front sources,
//! and streaming recorders.

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::real::Real;
use rayon::prelude::*;

pub const ROLE_FROZEN: u8 = 0;
pub const ROLE_UPDATE: u8 = 1;
pub const ROLE_FORCED: u8 = 2;

/// Normalized C^2 bump of width eps: integral over R equals 1.
pub fn mollified_delta(s: f64, eps: f64) -> f64 {
    let u = s / eps;
    if u.abs() >= 1.0 {
        0.0
    } else {
        let w = 1.0 - u * u;
        35.0 / 32.0 / eps * w * w * w
    }
}

/// Source amp(x) * delta_eps(t - phase(x)), the smeared progressing front.
pub struct FrontSource<R: Real> {
    pub amp: Vec<R>,
    pub phase: Vec<f64>,
    pub eps: f64,
}

impl<R: Real> FrontSource<R> {
    /// Plane front t = x . omega with amplitude -q(x) (remainder formulation).
    pub fn plane<F: Fn(usize) -> R>(
        grid: &SpatialGrid<R>,
        omega: &[f64],
        amp: F,
        eps: f64,
    ) -> Self {
        let mut a = Vec::with_capacity(grid.len());
        let mut p = Vec::with_capacity(grid.len());
        for (f, idx) in grid.iter_indices().enumerate() {
            let x = grid.node(&idx);
            let phase: f64 = x
                .iter()
                .zip(omega)
                .map(|(v, w)| v.to_f64_lossy() * w)
                .sum();
            a.push(amp(f));
            p.push(phase);
        }
        Self { amp: a, phase: p, eps }
    }

    /// Radial front t = sign * |x|.
    pub fn radial<F: Fn(usize, f64) -> R>(
        grid: &SpatialGrid<R>,
        sign: f64,
        amp: F,
        eps: f64,
    ) -> Self {
        let mut a = Vec::with_capacity(grid.len());
        let mut p = Vec::with_capacity(grid.len());
        for (f, idx) in grid.iter_indices().enumerate() {
            let r = SpatialGrid::norm2(&grid.node(&idx)).to_f64_lossy();
            a.push(amp(f, r));
            p.push(sign * r);
        }
        Self { amp: a, phase: p, eps }
    }
}

/// Streaming observer, called once per time level in order.
pub trait Recorder<R: Real> {
    fn record(&mut self, m: usize, t: f64, cur: &[R], grid: &SpatialGrid<R>);
}

pub struct MarchConfig<'a, R: Real> {
    pub grid: &'a SpatialGrid<R>,
    /// Time at level 0.
    pub t_init: f64,
    /// Signed step: negative marches backward in time.
    pub dt: f64,
    pub n_steps: usize,
    pub q: &'a [R],
    pub roles: &'a [u8],
    pub init_prev: Vec<R>,
    pub init_cur: Vec<R>,
    pub source: Option<&'a FrontSource<R>>,
    /// Values of forced nodes as a function of (flat index, time).
    pub forcing: Option<&'a (dyn Fn(usize, f64) -> R + Sync)>,
    /// Extra volumetric source g(flat, t), used by adjoint solves.
    pub extra_source: Option<&'a (dyn Fn(usize, f64) -> R + Sync)>,
}

/// Validates the CFL bound for the explicit scheme.
pub fn check_cfl<R: Real>(grid: &SpatialGrid<R>, dt: f64) -> Result<()> {
    let h = grid.min_spacing().to_f64_lossy();
    let limit = h / (grid.dim() as f64).sqrt();
    if dt.abs() > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt: dt.abs(), limit, h });
    }
    Ok(())
}

/// Time axis with `anchor` exactly on a grid time and step below `dt_raw`.
pub fn time_axis(a: f64, b: f64, anchor: f64, dt_raw: f64) -> (f64, f64, usize) {
    let lo = ((anchor - a) / dt_raw).ceil().max(0.0) as usize;
    let hi = ((b - anchor) / dt_raw).ceil().max(1.0) as usize;
    let t0 = anchor - lo as f64 * dt_raw;
    (t0, dt_raw, lo + hi + 1)
}

pub fn march<R: Real>(cfg: MarchConfig<'_, R>, recorders: &mut [&mut dyn Recorder<R>]) {
    check_cfl(cfg.grid, cfg.dt).expect("march called with CFL-violating dt");
    let n = cfg.grid.len();
    assert_eq!(cfg.q.len(), n);
    assert_eq!(cfg.roles.len(), n);
    let mut prev = cfg.init_prev;
    let mut cur = cfg.init_cur;
    let mut next = vec![R::zero(); n];
    for r in recorders.iter_mut() {
        r.record(0, cfg.t_init, &prev, cfg.grid);
    }
    if cfg.n_steps == 1 {
        return;
    }
    for r in recorders.iter_mut() {
        r.record(1, cfg.t_init + cfg.dt, &cur, cfg.grid);
    }
    let dt2 = R::of(cfg.dt * cfg.dt);
    for m in 1..cfg.n_steps - 1 {
        let t_cur = cfg.t_init + m as f64 * cfg.dt;
        let t_next = t_cur + cfg.dt;
        step(
            cfg.grid, dt2, t_cur, t_next, cfg.q, cfg.roles, &prev, &cur, &mut next,
            cfg.source, cfg.forcing, cfg.extra_source,
        );
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        for r in recorders.iter_mut() {
            r.record(m + 1, t_next, &cur, cfg.grid);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn step<R: Real>(
    grid: &SpatialGrid<R>,
    dt2: R,
    t_cur: f64,
    t_next: f64,
    q: &[R],
    roles: &[u8],
    prev: &[R],
    cur: &[R],
    next: &mut [R],
    source: Option<&FrontSource<R>>,
    forcing: Option<&(dyn Fn(usize, f64) -> R + Sync)>,
    extra: Option<&(dyn Fn(usize, f64) -> R + Sync)>,
) {
    let h = grid.spacing();
    match grid.dim() {
        2 => {
            let nz = grid.n_nodes()[1];
            let inv0 = R::one() / (h[0] * h[0]);
            let inv1 = R::one() / (h[1] * h[1]);
            let two = R::of(2.0);
            next.par_chunks_mut(nz).enumerate().for_each(|(ix, row)| {
                let base = ix * nz;
                for iz in 0..nz {
                    let f = base + iz;
                    row[iz] = match roles[f] {
                        ROLE_UPDATE => {
                            let c = cur[f];
                            let lap = (cur[f - nz] + cur[f + nz] - two * c) * inv0
                                + (cur[f - 1] + cur[f + 1] - two * c) * inv1;
                            let mut rhs = lap - q[f] * c;
                            if let Some(s) = source {
                                let d = mollified_delta(t_cur - s.phase[f], s.eps);
                                if d != 0.0 {
                                    rhs = rhs + s.amp[f] * R::of(d);
                                }
                            }
                            if let Some(g) = extra {
                                rhs = rhs + g(f, t_cur);
                            }
                            two * c - prev[f] + dt2 * rhs
                        }
                        ROLE_FORCED => forcing.map_or(R::zero(), |g| g(f, t_next)),
                        _ => R::zero(),
                    };
                }
            });
        }
        3 => {
            let ny = grid.n_nodes()[1];
            let nz = grid.n_nodes()[2];
            let sx = ny * nz;
            let inv0 = R::one() / (h[0] * h[0]);
            let inv1 = R::one() / (h[1] * h[1]);
            let inv2 = R::one() / (h[2] * h[2]);
            let two = R::of(2.0);
            next.par_chunks_mut(sx).enumerate().for_each(|(ix, slab)| {
                let base = ix * sx;
                for iy in 0..ny {
                    for iz in 0..nz {
                        let o = iy * nz + iz;
                        let f = base + o;
                        slab[o] = match roles[f] {
                            ROLE_UPDATE => {
                                let c = cur[f];
                                let lap = (cur[f - sx] + cur[f + sx] - two * c) * inv0
                                    + (cur[f - nz] + cur[f + nz] - two * c) * inv1
                                    + (cur[f - 1] + cur[f + 1] - two * c) * inv2;
                                let mut rhs = lap - q[f] * c;
                                if let Some(s) = source {
                                    let d = mollified_delta(t_cur - s.phase[f], s.eps);
                                    if d != 0.0 {
                                        rhs = rhs + s.amp[f] * R::of(d);
                                    }
                                }
                                if let Some(g) = extra {
                                    rhs = rhs + g(f, t_cur);
                                }
                                two * c - prev[f] + dt2 * rhs
                            }
                            ROLE_FORCED => forcing.map_or(R::zero(), |g| g(f, t_next)),
                            _ => R::zero(),
                        };
                    }
                }
            });
        }
        _ => unreachable!(),
    }
}

/// Roles for a plain box run: the outermost layer frozen, everything else updated.
pub fn box_roles<R: Real>(grid: &SpatialGrid<R>) -> Vec<u8> {
    let mut roles = vec![ROLE_UPDATE; grid.len()];
    for (f, idx) in grid.iter_indices().enumerate() {
        for k in 0..grid.dim() {
            if idx[k] == 0 || idx[k] + 1 == grid.n_nodes()[k] {
                roles[f] = ROLE_FROZEN;
            }
        }
    }
    roles
}

/// Roles for solves with Dirichlet data on the unit sphere.
///
/// `inside_updates = true`: update nodes strictly inside the ball, force a
/// ring of exterior nodes within `ring` of the sphere (backward cylinder
/// solves). `false`: update exterior nodes, force interior nodes within
/// `ring` of the sphere (exterior solves).
pub fn sphere_dirichlet_roles<R: Real>(
    grid: &SpatialGrid<R>,
    inside_updates: bool,
    ring: f64,
) -> Vec<u8> {
    let mut roles = box_roles(grid);
    for (f, idx) in grid.iter_indices().enumerate() {
        if roles[f] == ROLE_FROZEN {
            continue;
        }
        let r = SpatialGrid::norm2(&grid.node(&idx)).to_f64_lossy();
        if inside_updates {
            if r >= 1.0 {
                roles[f] = if r <= 1.0 + ring { ROLE_FORCED } else { ROLE_FROZEN };
            }
        } else if r <= 1.0 {
            roles[f] = if r >= 1.0 - ring { ROLE_FORCED } else { ROLE_FROZEN };
        }
    }
    roles
}

/// Discrete leapfrog energy of two consecutive levels (exactly conserved for
/// the free scheme on frozen-boundary boxes, up to roundoff).
pub fn leapfrog_energy<R: Real>(
    grid: &SpatialGrid<R>,
    q: &[R],
    prev: &[R],
    cur: &[R],
    dt: f64,
) -> f64 {
    let strides = grid.strides();
    let n_nodes = grid.n_nodes();
    let h = grid.spacing();
    let cell: f64 = h.iter().map(|v| v.to_f64_lossy()).product();
    let inv_dt = 1.0 / dt;
    let mut kinetic = 0.0f64;
    let mut cross = 0.0f64;
    for (f, idx) in grid.iter_indices().enumerate() {
        let d = (cur[f] - prev[f]).to_f64_lossy() * inv_dt;
        kinetic += d * d;
        for k in 0..grid.dim() {
            if idx[k] + 1 < n_nodes[k] {
                let hk = h[k].to_f64_lossy();
                let gc = (cur[f + strides[k]] - cur[f]).to_f64_lossy() / hk;
                let gp = (prev[f + strides[k]] - prev[f]).to_f64_lossy() / hk;
                cross += gc * gp;
            }
        }
        cross += q[f].to_f64_lossy() * cur[f].to_f64_lossy() * prev[f].to_f64_lossy();
    }
    0.5 * cell * (kinetic + cross)
}

// ---------------------------------------------------------------------------
// Recorders
// ---------------------------------------------------------------------------

/// Collects the full history on a sub-box grid.
pub struct VolumeRecorder<R: Real> {
    pub out_grid: SpatialGrid<R>,
    map: Vec<usize>,
    pub history: Vec<R>,
}

impl<R: Real> VolumeRecorder<R> {
    /// `out_grid` must be `solver_grid` shrunk by `pad` cells per side.
    pub fn new(solver_grid: &SpatialGrid<R>, out_grid: SpatialGrid<R>, pad: usize) -> Self {
        let map: Vec<usize> = out_grid
            .iter_indices()
            .map(|idx| solver_grid.embed_flat(&idx, pad))
            .collect();
        Self { out_grid, map, history: Vec::new() }
    }
}

impl<R: Real> Recorder<R> for VolumeRecorder<R> {
    fn record(&mut self, _m: usize, _t: f64, cur: &[R], _grid: &SpatialGrid<R>) {
        self.history.extend(self.map.iter().map(|&f| cur[f]));
    }
}

/// Records interpolated values at fixed points, one series per point.
pub struct PointProbeRecorder<R: Real> {
    pub points: Vec<Vec<R>>,
    pub times: Vec<f64>,
    pub series: Vec<Vec<R>>,
}

impl<R: Real> PointProbeRecorder<R> {
    pub fn new(points: Vec<Vec<R>>) -> Self {
        let n = points.len();
        Self { points, times: Vec::new(), series: vec![Vec::new(); n] }
    }
}

impl<R: Real> Recorder<R> for PointProbeRecorder<R> {
    fn record(&mut self, _m: usize, t: f64, cur: &[R], grid: &SpatialGrid<R>) {
        self.times.push(t);
        for (p, s) in self.points.iter().zip(self.series.iter_mut()) {
            s.push(grid.interp(cur, p).unwrap_or(R::zero()));
        }
    }
}

/// Tracks sup |u| over a fixed node set and the global sup.
pub struct SupRecorder {
    pub nodes: Vec<usize>,
    pub sup_region: f64,
    pub sup_global: f64,
}

impl SupRecorder {
    pub fn new(nodes: Vec<usize>) -> Self {
        Self { nodes, sup_region: 0.0, sup_global: 0.0 }
    }
}

impl<R: Real> Recorder<R> for SupRecorder {
    fn record(&mut self, _m: usize, _t: f64, cur: &[R], _grid: &SpatialGrid<R>) {
        for &f in &self.nodes {
            self.sup_region = self.sup_region.max(cur[f].abs().to_f64_lossy());
        }
        for v in cur {
            self.sup_global = self.sup_global.max(v.abs().to_f64_lossy());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_leapfrog_conserves_discrete_energy() {
        let g: SpatialGrid<f64> = SpatialGrid::cube(2, 1.0, 41).unwrap();
        let n = g.len();
        let q = vec![0.0; n];
        let roles = box_roles(&g);
        // Smooth compactly supported initial displacement, zero velocity.
        let mut init = vec![0.0; n];
        for (f, idx) in g.iter_indices().enumerate() {
            let x = g.node(&idx);
            let r2 = (x[0] * x[0] + x[1] * x[1]) / 0.25;
            if r2 < 1.0 {
                init[f] = (1.0 - r2).powi(3);
            }
        }
        let dt = 0.4 * g.min_spacing();
        struct EnergyWatch {
            q: Vec<f64>,
            prev: Vec<f64>,
            energies: Vec<f64>,
            dt: f64,
        }
        impl Recorder<f64> for EnergyWatch {
            fn record(&mut self, m: usize, _t: f64, cur: &[f64], grid: &SpatialGrid<f64>) {
                if m > 0 {
                    self.energies.push(leapfrog_energy(grid, &self.q, &self.prev, cur, self.dt));
                }
                self.prev = cur.to_vec();
            }
        }
        let mut watch =
            EnergyWatch { q: q.clone(), prev: vec![], energies: vec![], dt };
        march(
            MarchConfig {
                grid: &g,
                t_init: 0.0,
                dt,
                n_steps: 120,
                q: &q,
                roles: &roles,
                init_prev: init.clone(),
                init_cur: init.clone(),
                source: None,
                forcing: None,
                extra_source: None,
            },
            &mut [&mut watch],
        );
        let e0 = watch.energies[0];
        for e in &watch.energies {
            assert!((e - e0).abs() <= 1e-10 * e0.abs().max(1.0), "energy drifted: {e} vs {e0}");
        }
    }

    #[test]
    fn zero_data_stays_identically_zero() {
        let g: SpatialGrid<f64> = SpatialGrid::cube(2, 1.0, 21).unwrap();
        let n = g.len();
        let q = vec![0.3; n];
        let roles = box_roles(&g);
        let mut probe = PointProbeRecorder::new(vec![vec![0.1, 0.2]]);
        march(
            MarchConfig {
                grid: &g,
                t_init: 0.0,
                dt: 0.3 * g.min_spacing(),
                n_steps: 50,
                q: &q,
                roles: &roles,
                init_prev: vec![0.0; n],
                init_cur: vec![0.0; n],
                source: None,
                forcing: None,
                extra_source: None,
            },
            &mut [&mut probe],
        );
        assert!(probe.series[0].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn mollified_delta_normalized() {
        let eps = 0.37;
        let mut acc = 0.0;
        let n = 20001;
        let h = 2.0 * eps / (n - 1) as f64;
        for i in 0..n {
            let s = -eps + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * mollified_delta(s, eps) * h;
        }
        assert!((acc - 1.0).abs() < 1e-6);
    }
}
