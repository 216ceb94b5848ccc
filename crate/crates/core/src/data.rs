//! Data model: raw observations, centered data, component indexing, and
//! per-component product series with prefix sums.
//!
//! Observations are rows, variables are columns. A *component* is an
//! unordered pair of variables `(a, b)` with `1 <= a <= b <= p`, i.e. one
//! entry of the upper triangle of the covariance matrix. Components are
//! enumerated row-major over that triangle, which gives a bijection between
//! pairs and linear indices `0..p(p+1)/2` (half-vectorization order).
//!
//! Variable labels `a`, `b` are 1-based throughout the public API; row and
//! linear indices are 0-based.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Rectangular matrix of raw observations, validated on construction:
/// every entry finite and at least [`DataMatrix::MIN_ROWS`] rows, so that
/// downstream statistics (which need splits `2..=n-2`, a positive `n - 3`
/// factor and at least two observation pairs) are all well defined.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Minimum number of observations accepted.
    pub const MIN_ROWS: usize = 8;

    /// Builds from a row-major buffer of `n * p` values.
    pub fn from_vec(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n < Self::MIN_ROWS {
            return Err(Error::TooFewRows {
                n,
                min: Self::MIN_ROWS,
            });
        }
        if p == 0 {
            return Err(Error::InvalidParameter {
                name: "p",
                detail: "at least one column required",
            });
        }
        if values.len() != n * p {
            return Err(Error::ShapeMismatch {
                what: "buffer length",
                expected: n * p,
                actual: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i / p + 1,
                    col: i % p + 1,
                });
            }
        }
        Ok(Self { n, p, values })
    }

    /// Builds from one slice per observation; all rows must share a length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * p);
        for row in rows {
            if row.len() != p {
                return Err(Error::ShapeMismatch {
                    what: "row length",
                    expected: p,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_vec(n, p, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Entry at 0-based row `i`, column `a`.
    #[inline]
    pub fn get(&self, i: usize, a: usize) -> f64 {
        self.values[i * self.p + a]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Column-centered data: each column of the source matrix minus its mean.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredData {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

/// Subtracts the column means from every observation.
pub fn center(data: &DataMatrix) -> CenteredData {
    let (n, p) = (data.n(), data.p());
    let mut means = vec![0.0f64; p];
    for i in 0..n {
        for (m, v) in means.iter_mut().zip(data.row(i)) {
            *m += v;
        }
    }
    let inv = 1.0 / n as f64;
    for m in &mut means {
        *m *= inv;
    }
    let mut values = Vec::with_capacity(n * p);
    for i in 0..n {
        for (m, v) in means.iter().zip(data.row(i)) {
            values.push(v - m);
        }
    }
    CenteredData { n, p, values }
}

impl CenteredData {
    /// Wraps values that are already centered.
    ///
    /// Accepts any `n >= 1`; statistics that need longer samples check their
    /// own preconditions. Column sums must vanish within
    /// `1e-9 * n * max|x|`.
    pub fn from_centered(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidParameter {
                name: "shape",
                detail: "n and p must be positive",
            });
        }
        if values.len() != n * p {
            return Err(Error::ShapeMismatch {
                what: "buffer length",
                expected: n * p,
                actual: values.len(),
            });
        }
        let mut max_abs = 0.0f64;
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i / p + 1,
                    col: i % p + 1,
                });
            }
            max_abs = max_abs.max(v.abs());
        }
        let tol = 1e-9 * n as f64 * max_abs;
        for a in 0..p {
            let sum: f64 = (0..n).map(|i| values[i * p + a]).sum();
            if sum.abs() > tol {
                return Err(Error::NotCentered { col: a + 1 });
            }
        }
        Ok(Self { n, p, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, a: usize) -> f64 {
        self.values[i * self.p + a]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Number of components for `p` variables: `p(p+1)/2`.
pub fn vech_len(p: usize) -> usize {
    p * (p + 1) / 2
}

/// Linear index of component `(a, b)` in half-vectorization order.
///
/// The upper triangle is walked row-major: with `m = a - 1` rows already
/// passed, `ell = m(2p - m + 1)/2 + (b - a)`.
pub fn vech_index(a: usize, b: usize, p: usize) -> Result<usize> {
    if a == 0 || a > b || b > p {
        return Err(Error::ComponentOutOfRange { a, b, p });
    }
    let m = a - 1;
    Ok(m * (2 * p - m + 1) / 2 + (b - a))
}

/// Inverse of [`vech_index`]: recovers `(a, b)` from a linear index.
pub fn vech_unindex(ell: usize, p: usize) -> Result<(usize, usize)> {
    let len = vech_len(p);
    if ell >= len {
        return Err(Error::IndexOutOfRange { index: ell, len });
    }
    // Row start offsets are m(2p - m + 1)/2 for m = a - 1; invert the
    // quadratic with floats, then fix up to be exact.
    let offset = |m: usize| m * (2 * p - m + 1) / 2;
    let pf = p as f64;
    let disc = (2.0 * pf + 1.0) * (2.0 * pf + 1.0) - 8.0 * ell as f64;
    let mut m = (((2.0 * pf + 1.0) - crate::math::sqrt(disc.max(0.0))) / 2.0) as usize;
    m = m.min(p - 1);
    while m > 0 && offset(m) > ell {
        m -= 1;
    }
    while m + 1 < p && offset(m + 1) <= ell {
        m += 1;
    }
    let a = m + 1;
    let b = a + (ell - offset(m));
    Ok((a, b))
}

/// A validated component label: the pair `(a, b)`, its linear index, and the
/// dimension `p` it was built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComponentIndex {
    a: usize,
    b: usize,
    ell: usize,
    p: usize,
}

impl ComponentIndex {
    pub fn new(a: usize, b: usize, p: usize) -> Result<Self> {
        let ell = vech_index(a, b, p)?;
        Ok(Self { a, b, ell, p })
    }

    pub fn from_linear(ell: usize, p: usize) -> Result<Self> {
        let (a, b) = vech_unindex(ell, p)?;
        Ok(Self { a, b, ell, p })
    }

    /// First variable label, 1-based.
    pub fn a(&self) -> usize {
        self.a
    }

    /// Second variable label, 1-based; `a <= b`.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Position in half-vectorization order, 0-based.
    pub fn linear(&self) -> usize {
        self.ell
    }

    /// Dimension this index was validated against.
    pub fn p(&self) -> usize {
        self.p
    }
}

impl core::fmt::Display for ComponentIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// The product series of one component together with its prefix sums.
///
/// For component `(a, b)` the series is `y_i = x'_{ia} x'_{ib}` over the
/// centered data `x'`. `sum_to(k)` and `sq_sum_to(k)` return the sums of the
/// first `k` values and squared values; every split statistic in this crate
/// is a function of those four numbers (head and tail), which is what makes
/// whole-curve evaluation linear in `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSeries {
    index: ComponentIndex,
    values: Vec<f64>,
    prefix_sum: Vec<f64>,
    prefix_sq: Vec<f64>,
}

impl ComponentSeries {
    /// Builds the series of `index` from centered data.
    pub fn compute(c: &CenteredData, index: ComponentIndex) -> Result<Self> {
        if index.p() != c.p() {
            return Err(Error::ShapeMismatch {
                what: "component dimension",
                expected: c.p(),
                actual: index.p(),
            });
        }
        let (a0, b0) = (index.a() - 1, index.b() - 1);
        let values = (0..c.n()).map(|i| c.get(i, a0) * c.get(i, b0)).collect();
        Ok(Self::from_values(index, values))
    }

    /// Wraps a raw series (used by the bootstrap, whose synthetic rows stand
    /// in for product series directly).
    pub fn from_values(index: ComponentIndex, values: Vec<f64>) -> Self {
        let n = values.len();
        let mut prefix_sum = Vec::with_capacity(n + 1);
        let mut prefix_sq = Vec::with_capacity(n + 1);
        prefix_sum.push(0.0);
        prefix_sq.push(0.0);
        let (mut s, mut q) = (0.0f64, 0.0f64);
        for &y in &values {
            s += y;
            q += y * y;
            prefix_sum.push(s);
            prefix_sq.push(q);
        }
        Self {
            index,
            values,
            prefix_sum,
            prefix_sq,
        }
    }

    pub fn index(&self) -> ComponentIndex {
        self.index
    }

    /// Number of observations in the series.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sum of the first `k` values (`k = 0..=n`).
    #[inline]
    pub fn sum_to(&self, k: usize) -> f64 {
        self.prefix_sum[k]
    }

    /// Sum of the first `k` squared values.
    #[inline]
    pub fn sq_sum_to(&self, k: usize) -> f64 {
        self.prefix_sq[k]
    }

    /// Sum of the whole series.
    pub fn total(&self) -> f64 {
        self.prefix_sum[self.len()]
    }

    /// Sum of the whole squared series.
    pub fn total_sq(&self) -> f64 {
        self.prefix_sq[self.len()]
    }
}
