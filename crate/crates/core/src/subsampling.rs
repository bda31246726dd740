//! Non-stochastic block planner.
//!
//! A plan over `n` observations consists of `q = ⌊(n−b)/h⌋ + 1` blocks of
//! length `b` at stride `h`; block `j` (1-based) covers the 1-based index
//! range `[(j−1)h + 1, (j−1)h + b]`. With `h = b` the blocks are adjacent and
//! disjoint; trailing indices beyond `(q−1)h + b` belong to no block but
//! still count toward `n`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPlan {
    /// Sample size the plan was built for.
    pub n: usize,
    /// Block length.
    pub b: usize,
    /// Stride between consecutive block starts.
    pub h: usize,
    /// Number of blocks, `⌊(n−b)/h⌋ + 1`.
    pub q: usize,
}

impl BlockPlan {
    pub fn new(n: usize, b: usize, h: usize) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidPlan("block length b must be >= 1".into()));
        }
        if b > n {
            return Err(Error::InvalidPlan(format!(
                "block length {b} exceeds sample size {n}"
            )));
        }
        if h == 0 {
            return Err(Error::InvalidPlan("stride h must be >= 1".into()));
        }
        let q = (n - b) / h + 1;
        Ok(Self { n, b, h, q })
    }

    /// Plan with `b = ⌊n^beta⌋` and `h = max(1, ⌊a·b⌋)`.
    pub fn from_beta(n: usize, beta: f64, overlap_factor: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPlan(format!("need n >= 2, got {n}")));
        }
        if !beta.is_finite() || beta <= 0.0 || beta >= 1.0 {
            return Err(Error::InvalidPlan(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        if !overlap_factor.is_finite() || overlap_factor <= 0.0 {
            return Err(Error::InvalidPlan("overlap factor a must be > 0".into()));
        }
        let b = (n as f64).powf(beta).floor() as usize;
        if b == 0 {
            return Err(Error::InvalidPlan(format!(
                "n^beta < 1 for n = {n}, beta = {beta}"
            )));
        }
        let h = ((overlap_factor * b as f64).floor() as usize).max(1);
        Self::new(n, b, h)
    }

    /// 1-based inclusive index range of block `j ∈ 1..=q`.
    pub fn block_indices(&self, j: usize) -> Result<RangeInclusive<usize>> {
        if j == 0 || j > self.q {
            return Err(Error::BlockIndex { j, q: self.q });
        }
        let start = (j - 1) * self.h + 1;
        Ok(start..=start + self.b - 1)
    }

    /// 0-based half-open row range of block `j`, for slicing.
    pub fn block_rows(&self, j: usize) -> Result<std::ops::Range<usize>> {
        let r = self.block_indices(j)?;
        Ok(r.start() - 1..*r.end())
    }

    /// Number of leading rows covered by at least the last block,
    /// `(q−1)h + b`; any data beyond this is unused by the plan.
    pub fn required_rows(&self) -> usize {
        (self.q - 1) * self.h + self.b
    }

    /// Second-stage plan over one block's `b` points: `b' = ⌈b^beta⌉`,
    /// `h' = b'` (adjacent disjoint sub-blocks), `q' = ⌊(b−b')/h'⌋ + 1`.
    ///
    /// The block size rounds up rather than down: with integer `b^beta` both
    /// agree, and rounding up keeps `q'` consistent with treating `b/b'`
    /// sub-blocks as the second stage (e.g. `b = 5137`, `beta = 0.7` gives
    /// `b' = 396` and `q' = 12`).
    pub fn iterated(&self, beta: f64) -> Result<Self> {
        if self.b < 2 {
            return Err(Error::InvalidPlan(format!(
                "iterated plan needs block length >= 2, got {}",
                self.b
            )));
        }
        if !beta.is_finite() || beta <= 0.0 || beta >= 1.0 {
            return Err(Error::InvalidPlan(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        let b_inner = (self.b as f64).powf(beta).ceil() as usize;
        if b_inner == 0 {
            return Err(Error::InvalidPlan("iterated block length is zero".into()));
        }
        Self::new(self.b, b_inner, b_inner)
    }
}
