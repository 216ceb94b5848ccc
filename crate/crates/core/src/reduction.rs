//! Stage one: screen components for evidence of a shift in their covariance
//! entry.
//!
//! For a component series `y` and split `k`, [`split_contrast`] estimates the
//! squared difference of the mean product before and after the split without
//! the diagonal bias terms:
//!
//! ```text
//! sum_{i != j <= k} y_i y_j / (k(k-1))
//!   + sum_{i != j > k} y_i y_j / ((n-k)(n-k-1))
//!   - 2 sum_{i <= k < j} y_i y_j / (k(n-k))
//! ```
//!
//! Removing the diagonals makes the statistic exactly invariant to adding a
//! constant to the whole series, so it isolates the *change* in the second
//! moment rather than its level. With prefix sums `S_k`, `Q_k` the three
//! double sums collapse to `S_k^2 - Q_k`, `T_k^2 - R_k` and `S_k T_k`, which
//! is what makes a full pass over all splits linear in `n`.
//!
//! [`screening`] aggregates the contrast over all admissible splits with
//! weights `k(n-k)/n` and normalizer `1/(n-3)`, yielding one score per
//! component; [`select`] keeps the components whose score strictly exceeds a
//! threshold.

use alloc::vec::Vec;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::data::{vech_len, CenteredData, ComponentIndex, ComponentSeries};
use crate::error::{Error, Result};

/// Split contrast from the head/tail sums alone.
///
/// `s_k`, `q_k` are the sums of the first `k` values and squared values;
/// `s_n`, `q_n` the totals.
#[inline]
pub(crate) fn contrast_from_sums(
    s_k: f64,
    q_k: f64,
    s_n: f64,
    q_n: f64,
    k: usize,
    n: usize,
) -> f64 {
    let t_k = s_n - s_k;
    let r_k = q_n - q_k;
    let kf = k as f64;
    let mf = (n - k) as f64;
    (s_k * s_k - q_k) / (kf * (kf - 1.0)) + (t_k * t_k - r_k) / (mf * (mf - 1.0))
        - 2.0 * s_k * t_k / (kf * mf)
}

/// Debiased contrast of the component series across split `k`.
///
/// Requires `2 <= k <= n - 2` so both segments hold at least two
/// observations.
pub fn split_contrast(series: &ComponentSeries, k: usize) -> Result<f64> {
    let n = series.len();
    if n < 4 || k < 2 || k > n - 2 {
        return Err(Error::SplitOutOfRange { split: k, n });
    }
    Ok(contrast_from_sums(
        series.sum_to(k),
        series.sq_sum_to(k),
        series.total(),
        series.total_sq(),
        k,
        n,
    ))
}

/// Weighted aggregate of the split contrast over all admissible splits:
/// `(1/(n-3)) * sum_{k=2}^{n-2} (k(n-k)/n) * contrast(k)`.
///
/// This is the per-component screening score. It also serves the bootstrap,
/// which feeds synthetic series through the identical aggregation.
pub fn weighted_contrast(series: &ComponentSeries) -> Result<f64> {
    let n = series.len();
    if n < 8 {
        return Err(Error::TooFewRows { n, min: 8 });
    }
    let nf = n as f64;
    let s_n = series.total();
    let q_n = series.total_sq();
    let mut acc = 0.0;
    for k in 2..=n - 2 {
        let weight = (k * (n - k)) as f64 / nf;
        acc += weight * contrast_from_sums(series.sum_to(k), series.sq_sum_to(k), s_n, q_n, k, n);
    }
    Ok(acc / (nf - 3.0))
}

/// Screening scores for all `p(p+1)/2` components, in half-vectorization
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningVector {
    p: usize,
    values: Vec<f64>,
}

impl ScreeningVector {
    pub(crate) fn from_values(p: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), vech_len(p));
        Self { p, values }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Score of the component with linear index `ell`.
    pub fn get(&self, ell: usize) -> Option<f64> {
        self.values.get(ell).copied()
    }

    /// `(index, score)` pairs in linear order.
    pub fn iter(&self) -> impl Iterator<Item = (ComponentIndex, f64)> + '_ {
        self.values.iter().enumerate().map(move |(ell, &v)| {
            let idx = ComponentIndex::from_linear(ell, self.p)
                .expect("stored scores match the component count");
            (idx, v)
        })
    }
}

/// Computes the screening score of every component.
///
/// Components are independent, so the scan parallelizes over them when the
/// `parallel` feature is enabled; each component's score lands in its own
/// slot, making the result identical for any thread count.
pub fn screening(c: &CenteredData) -> Result<ScreeningVector> {
    let n = c.n();
    if n < 8 {
        return Err(Error::TooFewRows { n, min: 8 });
    }
    let p = c.p();
    let len = vech_len(p);
    let score_one = |ell: usize| -> Result<f64> {
        let idx = ComponentIndex::from_linear(ell, p)?;
        let series = ComponentSeries::compute(c, idx)?;
        weighted_contrast(&series)
    };
    #[cfg(feature = "parallel")]
    let values = (0..len)
        .into_par_iter()
        .map(score_one)
        .collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let values = (0..len).map(score_one).collect::<Result<Vec<_>>>()?;
    Ok(ScreeningVector { p, values })
}

/// The components that survived screening, with the threshold that was
/// applied.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSet {
    p: usize,
    tau: f64,
    indices: Vec<ComponentIndex>,
}

impl SelectionSet {
    /// Every component, as used when screening is bypassed.
    pub fn full(p: usize) -> Self {
        let indices = (0..vech_len(p))
            .map(|ell| ComponentIndex::from_linear(ell, p).expect("ell < p(p+1)/2"))
            .collect();
        Self {
            p,
            tau: f64::NEG_INFINITY,
            indices,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Threshold the scores were compared against.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of selected components.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Selected components in ascending linear order.
    pub fn indices(&self) -> &[ComponentIndex] {
        &self.indices
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.indices.iter().any(|idx| idx.a() == a && idx.b() == b)
    }
}

/// Keeps the components whose score strictly exceeds `tau`.
///
/// `tau` may be infinite (minus infinity keeps everything); NaN is rejected.
/// An empty result is a legal outcome meaning no component shows evidence of
/// a change.
pub fn select(scores: &ScreeningVector, tau: f64) -> Result<SelectionSet> {
    if tau.is_nan() {
        return Err(Error::InvalidParameter {
            name: "tau",
            detail: "threshold must not be NaN",
        });
    }
    let p = scores.p();
    let indices = scores
        .values()
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v > tau)
        .map(|(ell, _)| ComponentIndex::from_linear(ell, p).expect("ell < p(p+1)/2"))
        .collect();
    Ok(SelectionSet { p, tau, indices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{center, DataMatrix};
    use crate::oracle::{naive_contrast, naive_screening};
    use alloc::vec;
    use rand::Rng;

    fn centered(n: usize, p: usize, seed: u64) -> CenteredData {
        let mut rng = crate::rng::substream(seed, &[0x0B]);
        let values = (0..n * p).map(|_| rng.random_range(-2.0..2.0)).collect();
        center(&DataMatrix::from_vec(n, p, values).unwrap())
    }

    fn series_of(values: Vec<f64>) -> ComponentSeries {
        let idx = ComponentIndex::new(1, 1, 1).unwrap();
        ComponentSeries::from_values(idx, values)
    }

    #[test]
    fn contrast_hand_case() {
        // y = (1, 1, 0, 0), k = 2: head pair sum 2 over k(k-1) = 2, rest zero.
        let s = series_of(vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(split_contrast(&s, 2).unwrap(), 1.0);
    }

    #[test]
    fn contrast_zero_series() {
        let s = series_of(vec![0.0; 12]);
        for k in 2..=10 {
            assert_eq!(split_contrast(&s, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn contrast_split_bounds() {
        let s = series_of(vec![1.0; 6]);
        assert!(split_contrast(&s, 1).is_err());
        assert!(split_contrast(&s, 5).is_err());
        assert!(split_contrast(&s, 4).is_ok());
    }

    #[test]
    fn contrast_shift_invariant() {
        // Adding a constant to the series must cancel exactly in the algebra,
        // up to rounding of the shifted inputs.
        let mut rng = crate::rng::substream(11, &[0x0C]);
        let y: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + 35.25).collect();
        let s0 = series_of(y);
        let s1 = series_of(shifted);
        for k in 2..=14 {
            let a = split_contrast(&s0, k).unwrap();
            let b = split_contrast(&s1, k).unwrap();
            assert!((a - b).abs() < 1e-9, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn contrast_matches_oracle() {
        let c = centered(12, 2, 21);
        for ell in 0..vech_len(2) {
            let idx = ComponentIndex::from_linear(ell, 2).unwrap();
            let series = ComponentSeries::compute(&c, idx).unwrap();
            for k in 2..=10 {
                let fast = split_contrast(&series, k).unwrap();
                let slow = naive_contrast(&c, idx.a(), idx.b(), k).unwrap();
                let scale = fast.abs().max(slow.abs()).max(1e-12);
                assert!(
                    (fast - slow).abs() / scale < 1e-10,
                    "component {idx} k={k}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn screening_constant_data_is_zero() {
        let rows: Vec<Vec<f64>> = (0..10).map(|_| vec![3.0, -1.5]).collect();
        let c = center(&DataMatrix::from_rows(&rows).unwrap());
        let d = screening(&c).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn screening_matches_oracle() {
        let c = centered(10, 3, 33);
        let fast = screening(&c).unwrap();
        let slow = naive_screening(&c).unwrap();
        for (f, s) in fast.values().iter().zip(slow.values()) {
            let scale = f.abs().max(s.abs()).max(1e-12);
            assert!((f - s).abs() / scale < 1e-9, "{f} vs {s}");
        }
    }

    #[test]
    fn screening_scale_equivariant() {
        // Doubling the data multiplies products by 4 and the quadratic
        // screening score by 16, exactly in binary arithmetic.
        let data = {
            let mut rng = crate::rng::substream(5, &[0x0D]);
            let values: Vec<f64> = (0..9 * 2).map(|_| rng.random_range(-2.0..2.0)).collect();
            DataMatrix::from_vec(9, 2, values).unwrap()
        };
        let scaled = DataMatrix::from_vec(
            9,
            2,
            data.values().iter().map(|v| 2.0 * v).collect(),
        )
        .unwrap();
        let d0 = screening(&center(&data)).unwrap();
        let d1 = screening(&center(&scaled)).unwrap();
        for (a, b) in d0.values().iter().zip(d1.values()) {
            assert_eq!(16.0 * a, *b);
        }
    }

    #[test]
    fn screening_respects_column_permutation() {
        let c = centered(10, 3, 44);
        // Permute columns as (1,2,3) -> (3,1,2) and recompute.
        let perm = [2usize, 0, 1]; // new column a0 takes old column perm[a0]
        let mut values = Vec::with_capacity(10 * 3);
        for i in 0..10 {
            for &src in &perm {
                values.push(c.get(i, src));
            }
        }
        let permuted = CenteredData::from_centered(10, 3, values).unwrap();
        let d0 = screening(&c).unwrap();
        let d1 = screening(&permuted).unwrap();
        for ell in 0..vech_len(3) {
            let idx = ComponentIndex::from_linear(ell, 3).unwrap();
            // Labels in the permuted data map back through perm.
            let (oa, ob) = (perm[idx.a() - 1] + 1, perm[idx.b() - 1] + 1);
            let (a, b) = (oa.min(ob), oa.max(ob));
            let original = crate::data::vech_index(a, b, 3).unwrap();
            assert_eq!(d1.get(ell).unwrap(), d0.get(original).unwrap());
        }
    }

    #[test]
    fn select_infinite_thresholds() {
        let c = centered(10, 2, 55);
        let d = screening(&c).unwrap();
        assert!(select(&d, f64::INFINITY).unwrap().is_empty());
        let all = select(&d, f64::NEG_INFINITY).unwrap();
        assert_eq!(all.len(), vech_len(2));
        assert!(select(&d, f64::NAN).is_err());
    }

    #[test]
    fn select_is_strict() {
        let d = ScreeningVector::from_values(2, vec![0.0, 1.0, 2.0]);
        let sel = select(&d, 1.0).unwrap();
        assert_eq!(sel.len(), 1);
        assert_eq!(sel.indices()[0].linear(), 2);
        assert!(sel.contains(2, 2));
        assert!(!sel.contains(1, 1));
    }

    #[test]
    fn full_selection_enumerates_everything() {
        let sel = SelectionSet::full(3);
        assert_eq!(sel.len(), 6);
        assert_eq!(sel.tau(), f64::NEG_INFINITY);
        for (ell, idx) in sel.indices().iter().enumerate() {
            assert_eq!(idx.linear(), ell);
        }
    }
}
