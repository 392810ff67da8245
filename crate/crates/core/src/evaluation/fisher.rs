use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative slack when comparing point probabilities against the observed
/// one, so that tables tied in exact arithmetic are not lost to rounding.
pub const TIE_TOLERANCE: f64 = 1e-7;

pub const FISHER_METHOD: &str = "two-sided; sum of hypergeometric point probabilities <= observed";

/// ```text
///                 acquired functional   acquired content
/// gold function            a                   b
/// gold content             c                   d
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ContingencyTable2x2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl ContingencyTable2x2 {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        ContingencyTable2x2 { a, b, c, d }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn transpose(&self) -> Self {
        ContingencyTable2x2::new(self.a, self.c, self.b, self.d)
    }

    /// Swaps both row labels and column labels.
    pub fn relabel(&self) -> Self {
        ContingencyTable2x2::new(self.d, self.c, self.b, self.a)
    }

    /// Some row or column sums to zero.
    pub fn has_degenerate_margins(&self) -> bool {
        self.a + self.b == 0 || self.c + self.d == 0 || self.a + self.c == 0 || self.b + self.d == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherResult {
    pub p: f64,
    /// A zero margin leaves a single possible table; p is 1 by convention.
    pub degenerate_margins: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FisherError {
    #[error("contingency table is empty")]
    EmptyTable,
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Fisher's exact test, two-sided.
///
/// Point probabilities are built in log space by the hypergeometric ratio
/// recurrence, so large tables neither overflow nor lose their tails.
pub fn fisher_exact_two_tailed(t: &ContingencyTable2x2) -> Result<FisherResult, FisherError> {
    let n = t.total();
    if n == 0 {
        return Err(FisherError::EmptyTable);
    }
    if t.has_degenerate_margins() {
        return Ok(FisherResult { p: 1.0, degenerate_margins: true });
    }
    let r1 = t.a + t.b;
    let c1 = t.a + t.c;
    let r2 = n - r1;
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);

    // log P(x) up to a shared constant, with x the top-left cell.
    let mut logw = Vec::with_capacity((hi - lo + 1) as usize);
    let mut acc = 0.0;
    logw.push(acc);
    for x in lo..hi {
        let num = (r1 - x) as f64 * (c1 - x) as f64;
        let den = (x + 1) as f64 * (r2 + x + 1 - c1) as f64;
        acc += (num / den).ln();
        logw.push(acc);
    }
    let observed = logw[(t.a - lo) as usize];
    let cut = observed + TIE_TOLERANCE.ln_1p();
    let all = log_sum_exp(logw.iter().copied());
    let tail = log_sum_exp(logw.iter().copied().filter(|&w| w <= cut));
    Ok(FisherResult { p: (tail - all).exp().min(1.0), degenerate_margins: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: u64, b: u64, c: u64, d: u64) -> f64 {
        fisher_exact_two_tailed(&ContingencyTable2x2::new(a, b, c, d)).unwrap().p
    }

    #[test]
    fn worked_values() {
        assert_eq!(p(1, 1, 1, 1), 1.0);
        assert!((p(10, 0, 0, 10) - 2.0 / 184_756.0).abs() < 1e-15);
        assert!((p(3, 1, 1, 3) - 34.0 / 70.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_and_empty() {
        let r = fisher_exact_two_tailed(&ContingencyTable2x2::new(3, 4, 0, 0)).unwrap();
        assert!(r.degenerate_margins);
        assert_eq!(r.p, 1.0);
        assert_eq!(fisher_exact_two_tailed(&ContingencyTable2x2::default()), Err(FisherError::EmptyTable));
    }

    #[test]
    fn large_table_keeps_tiny_p() {
        let r = p(55, 3, 0, 4_400);
        assert!(r > 0.0 && r < 1e-100, "{r}");
    }
}
