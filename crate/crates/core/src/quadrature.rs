//! Line and radial integrals of gridded potentials, by deterministic composite quadrature.

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::potential::Potential;
use crate::real::Real;

/// Integration range along the ray x + sigma*omega.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineRange {
    /// sigma in (-inf, 0]: the incident ray up to x.
    ToX,
    /// sigma in [0, inf).
    FromXToInfinity,
    /// sigma in (-inf, inf).
    FullLine,
}

/// Integration range for s in q(s x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialRange {
    ZeroToOne,
    OneToInfinity,
    ZeroToInfinity,
}

/// Composite Simpson rule with an even number of subintervals.
pub fn simpson<R: Real, F: FnMut(R) -> R>(a: R, b: R, n: usize, mut f: F) -> R {
    let n = if n % 2 == 0 { n.max(2) } else { n + 1 };
    let h = (b - a) / R::from_usize(n).unwrap();
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { R::of(4.0) } else { R::of(2.0) };
        acc = acc + w * f(a + h * R::from_usize(i).unwrap());
    }
    acc * h / R::of(3.0)
}

fn check_unit<R: Real>(omega: &[R]) -> Result<()> {
    let n = SpatialGrid::norm2(omega).to_f64_lossy();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitDirection(n));
    }
    Ok(())
}

/// Intersection of the ray parameter interval with the support ball |x + s w| <= rad.
fn support_window<R: Real>(x: &[R], omega: &[R], rad: f64) -> Option<(f64, f64)> {
    let xw: f64 = x
        .iter()
        .zip(omega)
        .map(|(a, b)| (*a * *b).to_f64_lossy())
        .sum();
    let xx: f64 = x.iter().map(|a| (*a * *a).to_f64_lossy()).sum();
    let disc = xw * xw - (xx - rad * rad);
    if disc <= 0.0 {
        return None;
    }
    let d = disc.sqrt();
    Some((-xw - d, -xw + d))
}

/// Integral of q along the line through x with unit direction omega over the
/// requested range, by composite Simpson at resolution <= min grid spacing.
pub fn line_integral_along<R: Real>(
    q: &Potential<R>,
    omega: &[R],
    x: &[R],
    range: LineRange,
) -> Result<R> {
    check_unit(omega)?;
    if !q.grid.contains(x) {
        return Err(Error::OutsideGrid(x.iter().map(|v| v.to_f64_lossy()).collect()));
    }
    let window = match support_window(x, omega, q.support_radius) {
        None => return Ok(R::zero()),
        Some(w) => w,
    };
    let (lo, hi) = match range {
        LineRange::ToX => (window.0, window.1.min(0.0)),
        LineRange::FromXToInfinity => (window.0.max(0.0), window.1),
        LineRange::FullLine => window,
    };
    if hi <= lo {
        return Ok(R::zero());
    }
    let h = q.grid.min_spacing().to_f64_lossy();
    let n = (((hi - lo) / h).ceil() as usize).max(2) * 2;
    let val = simpson(R::of(lo), R::of(hi), n, |s| {
        let p: Vec<R> = x.iter().zip(omega).map(|(a, w)| *a + s * *w).collect();
        q.interp(&p).unwrap_or(R::zero())
    });
    Ok(val)
}

/// Integral of s -> q(s x) over the requested range; the integrand vanishes
/// once s |x| exceeds the support radius, so every range is finite.
pub fn radial_integral<R: Real>(
    q: &Potential<R>,
    x: &[R],
    range: RadialRange,
) -> Result<R> {
    let r = SpatialGrid::norm2(x).to_f64_lossy();
    if r == 0.0 {
        return Err(Error::InvalidInput("radial integral needs x != 0".into()));
    }
    let s_max = q.support_radius / r;
    let (lo, hi) = match range {
        RadialRange::ZeroToOne => (0.0, 1.0f64.min(s_max)),
        RadialRange::OneToInfinity => (1.0, s_max.max(1.0)),
        RadialRange::ZeroToInfinity => (0.0, s_max),
    };
    if hi <= lo {
        return Ok(R::zero());
    }
    let h = q.grid.min_spacing().to_f64_lossy();
    let n = (((hi - lo) * r / h).ceil() as usize).max(2) * 2;
    let val = simpson(R::of(lo), R::of(hi), n, |s| {
        let p: Vec<R> = x.iter().map(|a| *a * s).collect();
        if q.grid.contains(&p) {
            q.interp(&p).unwrap_or(R::zero())
        } else {
            R::zero()
        }
    });
    Ok(val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::potential::BumpSum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid_161() -> SpatialGrid<f64> {
        SpatialGrid::cube(2, 1.6, 161).unwrap()
    }

    #[test]
    fn zero_potential_integrates_to_zero() {
        let q = Potential::zero(grid_161());
        let v = line_integral_along(&q, &[0.0, 1.0], &[0.2, 0.3], LineRange::FullLine).unwrap();
        assert_eq!(v, 0.0);
        let r = radial_integral(&q, &[0.5, 0.1], RadialRange::ZeroToInfinity).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = Potential::zero(grid_161());
        assert!(line_integral_along(&q, &[0.0, 2.0], &[0.0, 0.0], LineRange::ToX).is_err());
        assert!(line_integral_along(&q, &[0.0, 1.0], &[5.0, 0.0], LineRange::ToX).is_err());
        assert!(radial_integral(&q, &[0.0, 0.0], RadialRange::ZeroToOne).is_err());
    }

    // Oracle-checked value: adaptive Simpson on the analytic bump profile at
    // 10x the tolerance the grid quadrature is expected to reach.
    #[test]
    fn line_integral_matches_adaptive_simpson_oracle() {
        let bumps = BumpSum::single(vec![0.1, -0.2], 0.6, 0.8);
        let q = bumps.sample_onto(&grid_161()).unwrap();
        // Line through the bump center: closed form amp * width * 32/35.
        let x = [0.1, -0.2];
        let got =
            line_integral_along(&q, &[0.0, 1.0], &[x[0], x[1]], LineRange::FullLine).unwrap();
        let want = oracle::adaptive_simpson(
            |s| bumps.eval(&[x[0], x[1] + s]),
            -2.0,
            2.0,
            1e-12,
        );
        // Frozen oracle value for these exact parameters.
        assert!((want - 0.438_857_142_857_142_8).abs() < 1e-9, "oracle drifted: {want}");
        assert!(
            (got - want).abs() <= 2e-4 * want.abs().max(1.0),
            "grid quadrature {got} vs oracle {want}"
        );
    }

    #[test]
    fn radial_integral_matches_oracle_outside_ball() {
        let bumps = BumpSum::single(vec![0.15, 0.1, -0.05], 0.5, -0.6);
        let g: SpatialGrid<f64> = SpatialGrid::cube(3, 1.4, 61).unwrap();
        let q = bumps.sample_onto(&g).unwrap();
        let x = [1.1, 0.3, -0.2];
        let got = radial_integral(&q, &x, RadialRange::ZeroToInfinity).unwrap();
        let want = oracle::adaptive_simpson(
            |s| bumps.eval(&[s * x[0], s * x[1], s * x[2]]),
            0.0,
            1.0,
            1e-12,
        );
        assert!(
            (got - want).abs() <= 3e-3 * want.abs().max(1e-3),
            "grid {got} vs oracle {want}"
        );
    }

    #[test]
    fn partial_line_integrals_sum_to_full_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = grid_161();
        for _ in 0..10 {
            let bumps = crate::potential::random_bump_sum(&mut rng, 2, 4);
            let q = bumps.sample_onto(&g).unwrap();
            let ang = rng.gen_range(0.0..std::f64::consts::TAU);
            let omega = [ang.cos(), ang.sin()];
            let x = [rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)];
            let a = line_integral_along(&q, &omega, &x, LineRange::ToX).unwrap();
            let b = line_integral_along(&q, &omega, &x, LineRange::FromXToInfinity).unwrap();
            let full = line_integral_along(&q, &omega, &x, LineRange::FullLine).unwrap();
            assert!(
                (a + b - full).abs() <= 1e-3 * full.abs().max(0.1),
                "additivity violated: {a} + {b} != {full}"
            );
        }
    }

    #[test]
    fn radial_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g: SpatialGrid<f64> = SpatialGrid::cube(2, 1.4, 101).unwrap();
        let bumps = crate::potential::random_bump_sum(&mut rng, 2, 3);
        let q = bumps.sample_onto(&g).unwrap();
        for _ in 0..10 {
            let x = [rng.gen_range(0.1..1.2), rng.gen_range(-1.0..1.0)];
            let a = radial_integral(&q, &x, RadialRange::ZeroToOne).unwrap();
            let b = radial_integral(&q, &x, RadialRange::OneToInfinity).unwrap();
            let full = radial_integral(&q, &x, RadialRange::ZeroToInfinity).unwrap();
            assert!((a + b - full).abs() <= 1e-10 + 1e-6 * full.abs());
        }
    }

    #[test]
    fn refinement_is_second_order() {
        let bumps = BumpSum::single(vec![0.0, 0.0], 0.7, 1.0);
        let x = [0.13, -0.21];
        let omega = [0.6, 0.8];
        let exact = oracle::adaptive_simpson(
            |s| bumps.eval(&[x[0] + s * omega[0], x[1] + s * omega[1]]),
            -2.0,
            2.0,
            1e-13,
        );
        let mut errs = Vec::new();
        for n in [41usize, 81, 161] {
            let g: SpatialGrid<f64> = SpatialGrid::cube(2, 1.6, n).unwrap();
            let q = bumps.sample_onto(&g).unwrap();
            let v = line_integral_along(&q, &omega, &x, LineRange::FullLine).unwrap();
            errs.push((v - exact).abs());
        }
        // Successive refinements gain roughly a factor 4 (second order).
        assert!(errs[1] < errs[0] / 2.5, "{errs:?}");
        assert!(errs[2] < errs[1] / 2.5, "{errs:?}");
    }
}
