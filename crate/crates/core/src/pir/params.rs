use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{PirError, Row};
use crate::field_rs::{EvalPoints, FieldElement, MODULUS};

/// Node count and fault budgets, plus the shape of the stored content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PirParams {
    pub n: usize,
    /// Largest coalition whose joint view must stay independent of `d`.
    pub t: usize,
    /// Byzantine answers to correct.
    pub b: usize,
    /// Unresponsive nodes to tolerate.
    pub r: usize,
    /// Cell count `M`.
    pub cells: usize,
    /// Symbols per row `S`.
    pub symbols: usize,
}

impl PirParams {
    pub fn new(n: usize, t: usize, b: usize, r: usize, cells: usize, symbols: usize) -> Result<Self, PirError> {
        let p = PirParams { n, t, b, r, cells, symbols };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PirError> {
        let bad = |m: String| Err(PirError::InvalidParams(m));
        if self.t < 1 {
            return bad("t must be at least 1".into());
        }
        if self.n <= self.t + 2 * self.b + self.r {
            return bad(format!(
                "need n > t + 2b + r, got n={} t={} b={} r={}",
                self.n, self.t, self.b, self.r
            ));
        }
        if self.n as u64 >= MODULUS {
            return bad(format!("n={} exceeds the evaluation points of the field", self.n));
        }
        if self.cells < 1 || self.symbols < 1 {
            return bad("cells and symbols must be positive".into());
        }
        if self.cells * self.rows_per_stripe() > u16::MAX as usize {
            return bad("query longer than the wire format allows".into());
        }
        Ok(())
    }

    /// `L = n - t - 2b - r`.
    pub fn rows_per_stripe(&self) -> usize {
        self.n - self.t - 2 * self.b - self.r
    }

    /// Dimension `n - 2b - r` of the response code.
    pub fn response_dimension(&self) -> usize {
        self.n - 2 * self.b - self.r
    }

    /// `M · L` entries per query.
    pub fn query_len(&self) -> usize {
        self.cells * self.rows_per_stripe()
    }

    pub fn eval_points(&self) -> EvalPoints<MODULUS> {
        EvalPoints::sequential(self.n).expect("validated n < p")
    }
}

/// `(n - t - 2b - r) / (n - r)`.
pub fn retrieval_rate(params: &PirParams) -> Ratio<u64> {
    Ratio::new(params.rows_per_stripe() as u64, (params.n - params.r) as u64)
}

/// Fixed public layout of the replicated content: `cells` columns of
/// `capacity` rows each, `symbols` wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellLayout {
    pub cells: usize,
    pub capacity: usize,
    pub symbols: usize,
}

impl CellLayout {
    pub fn total_rows(&self) -> usize {
        self.cells * self.capacity
    }

    pub fn stripes(&self, rows_per_stripe: usize) -> usize {
        self.capacity.div_ceil(rows_per_stripe)
    }

    /// Rows `stripe·L .. stripe·L + L` of every cell, cell-major, zero-padded
    /// past the capacity. This is the content vector a node combines with
    /// one stripe's query.
    pub fn stripe_content(&self, snapshot: &[Row], rows_per_stripe: usize, stripe: usize) -> Vec<Row> {
        assert_eq!(snapshot.len(), self.total_rows(), "snapshot does not match layout");
        let zero = vec![FieldElement::ZERO; self.symbols];
        let mut out = Vec::with_capacity(self.cells * rows_per_stripe);
        for m in 0..self.cells {
            for l in 0..rows_per_stripe {
                let idx = stripe * rows_per_stripe + l;
                if idx < self.capacity {
                    out.push(snapshot[m * self.capacity + idx].clone());
                } else {
                    out.push(zero.clone());
                }
            }
        }
        out
    }
}
