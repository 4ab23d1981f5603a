//! Axis-aligned box domains for decision and context spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An axis-aligned box `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    /// Build a box from per-dimension `(lo, hi)` pairs. Each interval must be
    /// nonempty (`lo <= hi`) and finite.
    pub fn new(bounds: &[(f64, f64)]) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::input("box domain needs at least one dimension"));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::input(format!("box bound {i} is not finite")));
            }
            if lo > hi {
                return Err(Error::input(format!(
                    "box bound {i} is empty: lo={lo} > hi={hi}"
                )));
            }
        }
        Ok(BoxDomain {
            lo: bounds.iter().map(|b| b.0).collect(),
            hi: bounds.iter().map(|b| b.1).collect(),
        })
    }

    /// Unit box `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Self {
        BoxDomain {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn width(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    pub fn widths(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.width(i)).collect()
    }

    /// Euclidean diameter of the box.
    pub fn diameter(&self) -> f64 {
        self.widths().iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&l, &h))| v >= l && v <= h)
    }

    /// Project a point onto the box, coordinate-wise.
    pub fn clamp(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&v, (&l, &h))| v.clamp(l, h))
            .collect()
    }

    /// Full tensor grid with `n` points per dimension (endpoints included;
    /// `n = 1` yields the midpoint in that dimension). Points are emitted in
    /// lexicographic order, last dimension fastest.
    pub fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let d = self.dim();
        let axes: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                if n <= 1 {
                    vec![0.5 * (self.lo[i] + self.hi[i])]
                } else {
                    (0..n)
                        .map(|k| {
                            self.lo[i] + self.width(i) * (k as f64) / ((n - 1) as f64)
                        })
                        .collect()
                }
            })
            .collect();
        let total: usize = axes.iter().map(|a| a.len()).product();
        let mut points = Vec::with_capacity(total);
        let mut idx = vec![0usize; d];
        for _ in 0..total {
            points.push((0..d).map(|i| axes[i][idx[i]]).collect());
            for i in (0..d).rev() {
                idx[i] += 1;
                if idx[i] < axes[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
        points
    }
}
