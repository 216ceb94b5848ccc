//! Brute-force reference implementations.
//!
//! These transliterate the defining sums with explicit nested loops and
//! `i != j` guards, with no prefix-sum shortcuts. They are quadratic to
//! quartic in `n` and exist solely to pin down the fast implementations on
//! test-sized inputs; `covcp verify` and the acceptance suite diff the two.

use alloc::vec::Vec;

use crate::data::{vech_len, CenteredData};
use crate::error::{Error, Result};
use crate::reduction::{ScreeningVector, SelectionSet};

fn product_series(c: &CenteredData, a: usize, b: usize) -> Result<Vec<f64>> {
    if a == 0 || a > b || b > c.p() {
        return Err(Error::ComponentOutOfRange { a, b, p: c.p() });
    }
    Ok((0..c.n()).map(|i| c.get(i, a - 1) * c.get(i, b - 1)).collect())
}

/// Debiased split contrast of component `(a, b)` at split `k`, by direct
/// double summation.
pub fn naive_contrast(c: &CenteredData, a: usize, b: usize, k: usize) -> Result<f64> {
    let n = c.n();
    if n < 4 || k < 2 || k > n - 2 {
        return Err(Error::SplitOutOfRange { split: k, n });
    }
    let y = product_series(c, a, b)?;
    let mut head = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                head += y[i] * y[j];
            }
        }
    }
    let mut tail = 0.0;
    for i in k..n {
        for j in k..n {
            if i != j {
                tail += y[i] * y[j];
            }
        }
    }
    let mut cross = 0.0;
    for i in 0..k {
        for j in k..n {
            cross += y[i] * y[j];
        }
    }
    let kf = k as f64;
    let mf = (n - k) as f64;
    Ok(head / (kf * (kf - 1.0)) + tail / (mf * (mf - 1.0)) - 2.0 * cross / (kf * mf))
}

/// Screening statistic for every component, by direct summation over splits.
pub fn naive_screening(c: &CenteredData) -> Result<ScreeningVector> {
    let n = c.n();
    if n < 8 {
        return Err(Error::TooFewRows { n, min: 8 });
    }
    let p = c.p();
    let mut values = Vec::with_capacity(vech_len(p));
    for a in 1..=p {
        for b in a..=p {
            let mut acc = 0.0;
            for k in 2..=n - 2 {
                let weight = (k * (n - k)) as f64 / n as f64;
                acc += weight * naive_contrast(c, a, b, k)?;
            }
            values.push(acc / (n as f64 - 3.0));
        }
    }
    Ok(ScreeningVector::from_values(p, values))
}

/// Change score over the selected components at split `k`, by direct
/// quadruple summation over observation pairs on both sides of the split.
pub fn naive_score(c: &CenteredData, selection: &SelectionSet, k: usize) -> Result<f64> {
    let n = c.n();
    if n < 4 || k < 2 || k > n - 2 {
        return Err(Error::SplitOutOfRange { split: k, n });
    }
    if selection.p() != c.p() {
        return Err(Error::ShapeMismatch {
            what: "selection dimension",
            expected: c.p(),
            actual: selection.p(),
        });
    }
    if selection.is_empty() {
        return Err(Error::InvalidParameter {
            name: "selection",
            detail: "at least one component required",
        });
    }
    let series: Vec<Vec<f64>> = selection
        .indices()
        .iter()
        .map(|idx| product_series(c, idx.a(), idx.b()))
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    for i in 0..k {
        for t in 0..k {
            if i == t {
                continue;
            }
            for j in k..n {
                for l in k..n {
                    if j == l {
                        continue;
                    }
                    let mut dot = 0.0;
                    for y in &series {
                        dot += (y[i] - y[j]) * (y[t] - y[l]);
                    }
                    sum += dot;
                }
            }
        }
    }
    let nf = n as f64;
    Ok(sum / (nf * nf * nf * nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{center, DataMatrix};
    use crate::reduction::SelectionSet;
    use alloc::vec;
    use rand::Rng;

    fn centered(n: usize, p: usize, seed: u64) -> CenteredData {
        let mut rng = crate::rng::substream(seed, &[0x0A]);
        let values = (0..n * p).map(|_| rng.random_range(-2.0..2.0)).collect();
        center(&DataMatrix::from_vec(n, p, values).unwrap())
    }

    #[test]
    fn zero_data_gives_zero_everything() {
        let c = CenteredData::from_centered(8, 2, vec![0.0; 16]).unwrap();
        assert_eq!(naive_contrast(&c, 1, 2, 4).unwrap(), 0.0);
        assert!(naive_screening(&c).unwrap().values().iter().all(|&v| v == 0.0));
        let sel = SelectionSet::full(2);
        assert_eq!(naive_score(&c, &sel, 4).unwrap(), 0.0);
    }

    #[test]
    fn split_bounds_enforced() {
        let c = centered(8, 2, 1);
        assert!(naive_contrast(&c, 1, 1, 1).is_err());
        assert!(naive_contrast(&c, 1, 1, 7).is_err());
        assert!(naive_contrast(&c, 1, 1, 6).is_ok());
    }

    #[test]
    fn component_bounds_enforced() {
        let c = centered(8, 2, 1);
        assert!(naive_contrast(&c, 2, 1, 4).is_err());
        assert!(naive_contrast(&c, 1, 3, 4).is_err());
    }
}
