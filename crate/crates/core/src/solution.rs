//! Candidate solutions: gene tuples locating segments and their grouping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Locates one candidate segment and its grouping indicator.
///
/// `start` is a 1-based sample index, `length` is in samples, and
/// `indicator` lives in `[0, 1)`; sorting all indicators and chunking the
/// order into blocks of `s` assigns segments to motifs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gene {
    pub start: usize,
    pub length: usize,
    pub indicator: f64,
}

impl Gene {
    pub fn new(start: usize, length: usize, indicator: f64) -> Self {
        Gene {
            start,
            length,
            indicator,
        }
    }

    /// 1-based inclusive interval occupied in the series.
    pub fn interval(&self) -> (usize, usize) {
        (self.start, self.start + self.length - 1)
    }
}

/// One search individual: an ordered list of exactly `k*s` genes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub genes: Vec<Gene>,
}

impl Solution {
    pub fn new(genes: Vec<Gene>) -> Self {
        Solution { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Checks every gene against the series length and segment bounds.
    pub fn validate(&self, series_len: usize, l_min: usize, l_max: usize) -> Result<()> {
        for (i, gene) in self.genes.iter().enumerate() {
            if gene.length < l_min || gene.length > l_max {
                return Err(Error::InvalidTask(format!(
                    "gene {i}: length {} outside [{l_min}, {l_max}]",
                    gene.length
                )));
            }
            if gene.start == 0 || gene.start + gene.length - 1 > series_len {
                return Err(Error::InvalidTask(format!(
                    "gene {i}: interval [{}, {}] outside series of length {series_len}",
                    gene.start,
                    gene.start + gene.length - 1
                )));
            }
            if !(0.0..1.0).contains(&gene.indicator) {
                return Err(Error::InvalidTask(format!(
                    "gene {i}: indicator {} outside [0, 1)",
                    gene.indicator
                )));
            }
        }
        Ok(())
    }
}

/// True iff any pair of gene intervals shares more than
/// `floor(tolerance * min(l_i, l_j))` samples. A tolerance of zero makes any
/// shared sample count as overlap.
pub fn some_overlap(solution: &Solution, tolerance: f64) -> bool {
    let genes = &solution.genes;
    for i in 0..genes.len() {
        let (a_lo, a_hi) = genes[i].interval();
        for j in (i + 1)..genes.len() {
            let (b_lo, b_hi) = genes[j].interval();
            let lo = a_lo.max(b_lo);
            let hi = a_hi.min(b_hi);
            if hi < lo {
                continue;
            }
            let shared = hi - lo + 1;
            let allowed = (tolerance * genes[i].length.min(genes[j].length) as f64).floor();
            if shared as f64 > allowed {
                return true;
            }
        }
    }
    false
}
