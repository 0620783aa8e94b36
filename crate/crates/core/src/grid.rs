//! Uniform Cartesian grids on boxes [-L, L]^dim, dim = 2 or 3.

use crate::error::{Error, Result};
use crate::real::Real;

/// Uniform tensor grid covering `[-extent[k], extent[k]]` along axis k.
///
/// Nodes along axis k are `x_i = -extent[k] + i * h[k]`, `i = 0..n_nodes[k]`,
/// with `h[k] = 2 extent[k] / (n_nodes[k] - 1)`. Flat storage is row-major
/// with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid<R: Real> {
    dim: usize,
    extent: Vec<R>,
    n_nodes: Vec<usize>,
    h: Vec<R>,
}

impl<R: Real> SpatialGrid<R> {
    pub fn new(extent: &[R], n_nodes: &[usize]) -> Result<Self> {
        let dim = extent.len();
        if dim < 2 || dim > 3 {
            return Err(Error::InvalidInput(format!("dim must be 2 or 3, got {dim}")));
        }
        if n_nodes.len() != dim {
            return Err(Error::InvalidInput("extent/n_nodes length mismatch".into()));
        }
        for k in 0..dim {
            if !(extent[k] > R::zero()) {
                return Err(Error::InvalidInput("extent must be positive".into()));
            }
            if n_nodes[k] < 3 {
                return Err(Error::InvalidInput("need at least 3 nodes per axis".into()));
            }
        }
        let h = (0..dim)
            .map(|k| (extent[k] + extent[k]) / R::from_usize(n_nodes[k] - 1).unwrap())
            .collect();
        Ok(Self { dim, extent: extent.to_vec(), n_nodes: n_nodes.to_vec(), h })
    }

    /// Cube grid: same extent and node count along every axis.
    pub fn cube(dim: usize, extent: R, n_nodes: usize) -> Result<Self> {
        Self::new(&vec![extent; dim], &vec![n_nodes; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> &[R] {
        &self.extent
    }

    pub fn n_nodes(&self) -> &[usize] {
        &self.n_nodes
    }

    pub fn spacing(&self) -> &[R] {
        &self.h
    }

    pub fn min_spacing(&self) -> R {
        self.h.iter().cloned().fold(self.h[0], R::min)
    }

    pub fn max_spacing(&self) -> R {
        self.h.iter().cloned().fold(self.h[0], R::max)
    }

    pub fn len(&self) -> usize {
        self.n_nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, axis: usize, i: usize) -> R {
        -self.extent[axis] + self.h[axis] * R::from_usize(i).unwrap()
    }

    pub fn node(&self, idx: &[usize]) -> Vec<R> {
        (0..self.dim).map(|k| self.coord(k, idx[k])).collect()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for k in 0..self.dim {
            f = f * self.n_nodes[k] + idx[k];
        }
        f
    }

    pub fn unflat(&self, mut f: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim];
        for k in (0..self.dim).rev() {
            idx[k] = f % self.n_nodes[k];
            f /= self.n_nodes[k];
        }
        idx
    }

    /// Strides of the flat layout, last axis fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.dim];
        for k in (0..self.dim.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.n_nodes[k + 1];
        }
        s
    }

    pub fn contains(&self, x: &[R]) -> bool {
        (0..self.dim).all(|k| x[k].abs() <= self.extent[k] + self.h[k] * R::of(1e-9))
    }

    /// Multilinear interpolation of `values` (flat, one scalar per node) at `x`.
    pub fn interp(&self, values: &[R], x: &[R]) -> Result<R> {
        if !self.contains(x) {
            return Err(Error::OutsideGrid(x.iter().map(|v| v.to_f64_lossy()).collect()));
        }
        let mut base = vec![0usize; self.dim];
        let mut frac = vec![R::zero(); self.dim];
        for k in 0..self.dim {
            let s = (x[k] + self.extent[k]) / self.h[k];
            let mut i = s.floor().to_usize().unwrap_or(0);
            if i + 1 >= self.n_nodes[k] {
                i = self.n_nodes[k] - 2;
            }
            base[k] = i;
            frac[k] = (s - R::from_usize(i).unwrap()).max(R::zero()).min(R::one());
        }
        let strides = self.strides();
        let f0 = self.flat(&base);
        let mut acc = R::zero();
        for corner in 0..(1usize << self.dim) {
            let mut w = R::one();
            let mut off = 0usize;
            for k in 0..self.dim {
                if corner >> k & 1 == 1 {
                    w = w * frac[k];
                    off += strides[k];
                } else {
                    w = w * (R::one() - frac[k]);
                }
            }
            acc = acc + w * values[f0 + off];
        }
        Ok(acc)
    }

    /// Iterate all node multi-indices in flat order.
    pub fn iter_indices(&self) -> IndexIter {
        IndexIter { n: self.n_nodes.clone(), idx: vec![0; self.dim], done: false }
    }

    pub fn norm2(x: &[R]) -> R {
        x.iter().map(|v| *v * *v).sum::<R>().sqrt()
    }

    /// Same spacing, enlarged by `pad` whole cells on every side of every
    /// axis. Node (i + pad) of the result coincides with node i of self.
    pub fn extended(&self, pad: usize) -> Self {
        let extent: Vec<R> = (0..self.dim)
            .map(|k| self.extent[k] + self.h[k] * R::from_usize(pad).unwrap())
            .collect();
        let n_nodes: Vec<usize> = self.n_nodes.iter().map(|n| n + 2 * pad).collect();
        Self { dim: self.dim, extent, n_nodes, h: self.h.clone() }
    }

    /// Flat index into `self` of the node that sits at multi-index `idx` of
    /// `inner`, when `self` is `inner.extended(pad)`.
    pub fn embed_flat(&self, inner_idx: &[usize], pad: usize) -> usize {
        let shifted: Vec<usize> = inner_idx.iter().map(|i| i + pad).collect();
        self.flat(&shifted)
    }

    /// Checks that two grids share geometry exactly.
    pub fn compatible(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::IncompatibleGrids(format!(
                "{:?} nodes vs {:?}",
                self.n_nodes, other.n_nodes
            )));
        }
        Ok(())
    }
}

pub struct IndexIter {
    n: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for IndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let dim = self.n.len();
        let mut k = dim;
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.n[k] {
                break;
            }
            self.idx[k] = 0;
        }
        Some(out)
    }
}
