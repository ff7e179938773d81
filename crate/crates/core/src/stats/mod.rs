//! Rank-based statistical kernel.
//!
//! Throughput-time comparisons in this crate are nonparametric throughout:
//! groups are pooled and mid-ranked, the omnibus question is answered by the
//! tie-corrected Kruskal–Wallis H test, and pairwise follow-ups use Dunn's
//! z statistic on the pooled ranks with Bonferroni adjustment. Descriptive
//! moments and a Jarque–Bera screen are provided for reporting; they do not
//! gate the rank tests.
//!
//! The kernel is generic over the scalar type via [`Scalar`] so it can be
//! instantiated at `f32` or `f64`; the crate-level [`crate::Real`] alias pins
//! the concrete type used by the pipeline.

pub mod special;

use crate::error::{Error, Result};
use num_traits::{Float, FromPrimitive};

pub use special::{chi2_sf, erfc, gamma_q, ln_gamma, normal_sf};

/// Scalar type the kernel operates on.
pub trait Scalar: Float + FromPrimitive + std::fmt::Debug {}
impl<T> Scalar for T where T: Float + FromPrimitive + std::fmt::Debug {}

fn num<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Which group sits higher in the ranking, once significance is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Longer,
    Shorter,
    NotSignificant,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Longer => "LONGER",
            Direction::Shorter => "SHORTER",
            Direction::NotSignificant => "NOT_SIGNIFICANT",
        }
    }
}

/// Outcome of one statistical test.
///
/// `p_adjusted` starts out equal to `p_raw`; multiplicity adjustment is the
/// caller's step (see [`adjust_bonferroni`]) because only the caller knows
/// how many comparisons a table performs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult<T> {
    pub statistic: T,
    pub df: u32,
    pub p_raw: T,
    pub p_adjusted: T,
    pub direction: Option<Direction>,
}

/// Descriptive moments of one sample of durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupStats<T> {
    pub n: usize,
    pub mean: T,
    /// Sample standard deviation (n-1 denominator); 0 for a single value.
    pub std: T,
    /// Bias-corrected skewness; `None` when undefined (n < 3 or zero spread).
    pub skewness: Option<T>,
    /// Bias-corrected excess kurtosis; `None` when undefined (n < 4 or zero spread).
    pub kurtosis: Option<T>,
}

/// Mean, sample standard deviation and bias-corrected higher moments.
pub fn descriptive_stats<T: Scalar>(samples: &[T]) -> Result<GroupStats<T>> {
    if samples.is_empty() {
        return Err(Error::Stats("descriptive_stats on empty sample".into()));
    }
    let n = samples.len();
    let nf = num::<T>(n);
    let mean = samples.iter().fold(T::zero(), |a, &x| a + x) / nf;
    if n == 1 {
        return Ok(GroupStats { n, mean, std: T::zero(), skewness: None, kurtosis: None });
    }
    let ss = samples.iter().fold(T::zero(), |a, &x| a + (x - mean) * (x - mean));
    let std = (ss / num::<T>(n - 1)).sqrt();
    if std == T::zero() {
        return Ok(GroupStats { n, mean, std, skewness: None, kurtosis: None });
    }
    let z3: T = samples.iter().fold(T::zero(), |a, &x| {
        let z = (x - mean) / std;
        a + z * z * z
    });
    let z4: T = samples.iter().fold(T::zero(), |a, &x| {
        let z = (x - mean) / std;
        a + z * z * z * z
    });
    let skewness = if n >= 3 {
        Some(nf / (num::<T>(n - 1) * num::<T>(n - 2)) * z3)
    } else {
        None
    };
    let kurtosis = if n >= 4 {
        let lead = nf * num::<T>(n + 1) / (num::<T>(n - 1) * num::<T>(n - 2) * num::<T>(n - 3));
        let tail = num::<T>(3) * num::<T>(n - 1) * num::<T>(n - 1)
            / (num::<T>(n - 2) * num::<T>(n - 3));
        Some(lead * z4 - tail)
    } else {
        None
    };
    Ok(GroupStats { n, mean, std, skewness, kurtosis })
}

/// Mid-ranks of the pooled values plus the size of every tie block.
fn ranks_and_ties<T: Scalar>(values: &[T]) -> (Vec<T>, Vec<usize>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("NaN in sample"));
    let mut ranks = vec![T::zero(); n];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j; the mid-rank is their average
        let mid = num::<T>(i + j + 1) / num::<T>(2);
        for &idx in &order[i..j] {
            ranks[idx] = mid;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

/// Mid-ranks of a pooled sample; tied values share the average of the
/// positions they occupy, so the ranks always sum to n(n+1)/2 exactly.
pub fn rank_with_ties<T: Scalar>(values: &[T]) -> Vec<T> {
    ranks_and_ties(values).0
}

fn pool<T: Scalar>(groups: &[&[T]]) -> Result<Vec<T>> {
    if groups.len() < 2 {
        return Err(Error::Stats("need at least two groups".into()));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::Stats("empty group".into()));
    }
    Ok(groups.iter().flat_map(|g| g.iter().copied()).collect())
}

/// Tie-corrected Kruskal–Wallis H test over `k >= 2` non-empty groups.
///
/// H is the usual `12/(N(N+1)) * sum R_i^2/n_i - 3(N+1)` divided by the tie
/// correction `1 - sum(t^3 - t)/(N^3 - N)`; when every pooled value is
/// identical the correction vanishes and H is defined as 0 with p = 1.
/// The p-value is the chi-squared upper tail with `k - 1` degrees of freedom.
pub fn kruskal_wallis<T: Scalar>(groups: &[&[T]]) -> Result<TestResult<T>> {
    let pooled = pool(groups)?;
    let k = groups.len();
    let n_total = pooled.len();
    let (ranks, ties) = ranks_and_ties(&pooled);
    let nf = num::<T>(n_total);

    let mut h_raw = T::zero();
    let mut offset = 0;
    for g in groups {
        let r: T = ranks[offset..offset + g.len()].iter().fold(T::zero(), |a, &x| a + x);
        h_raw = h_raw + r * r / num::<T>(g.len());
        offset += g.len();
    }
    h_raw = num::<T>(12) / (nf * (nf + T::one())) * h_raw - num::<T>(3) * (nf + T::one());

    let tie_term: T = ties
        .iter()
        .fold(T::zero(), |a, &t| a + num::<T>(t * t * t) - num::<T>(t));
    let correction = T::one() - tie_term / (nf * nf * nf - nf);
    let df = (k - 1) as u32;
    if correction == T::zero() {
        return Ok(TestResult {
            statistic: T::zero(),
            df,
            p_raw: T::one(),
            p_adjusted: T::one(),
            direction: None,
        });
    }
    let h = (h_raw / correction).max(T::zero());
    let p = chi2_sf(h, df);
    Ok(TestResult { statistic: h, df, p_raw: p, p_adjusted: p, direction: None })
}

/// Dunn's pairwise z test of groups `i` and `j`, ranked within the pool of
/// *all* supplied groups (the omnibus ranking context).
///
/// The variance term carries the usual tie correction. `direction` compares
/// the mean rank of group `i` against group `j`; significance is the
/// caller's decision once the p-values have been adjusted. The squared
/// statistic of a two-group comparison equals the Kruskal–Wallis H, so the
/// result is reported with one degree of freedom.
pub fn dunn_pairwise<T: Scalar>(groups: &[&[T]], i: usize, j: usize) -> Result<TestResult<T>> {
    let pooled = pool(groups)?;
    if i >= groups.len() || j >= groups.len() || i == j {
        return Err(Error::Stats(format!("invalid group pair ({i}, {j})")));
    }
    let n_total = pooled.len();
    let (ranks, ties) = ranks_and_ties(&pooled);
    let nf = num::<T>(n_total);

    let mut offset = 0;
    let mut mean_rank = vec![T::zero(); groups.len()];
    for (g_idx, g) in groups.iter().enumerate() {
        let r: T = ranks[offset..offset + g.len()].iter().fold(T::zero(), |a, &x| a + x);
        mean_rank[g_idx] = r / num::<T>(g.len());
        offset += g.len();
    }

    let tie_term: T = ties
        .iter()
        .fold(T::zero(), |a, &t| a + num::<T>(t * t * t) - num::<T>(t));
    let var_core = nf * (nf + T::one()) / num::<T>(12)
        - tie_term / (num::<T>(12) * (nf - T::one()));
    let var = var_core * (T::one() / num::<T>(groups[i].len()) + T::one() / num::<T>(groups[j].len()));
    if var <= T::zero() {
        return Ok(TestResult {
            statistic: T::zero(),
            df: 1,
            p_raw: T::one(),
            p_adjusted: T::one(),
            direction: Some(Direction::NotSignificant),
        });
    }
    let z = (mean_rank[i] - mean_rank[j]) / var.sqrt();
    let p = (num::<T>(2) * normal_sf(z.abs())).min(T::one());
    let direction = if mean_rank[i] > mean_rank[j] {
        Direction::Longer
    } else if mean_rank[i] < mean_rank[j] {
        Direction::Shorter
    } else {
        Direction::NotSignificant
    };
    Ok(TestResult { statistic: z, df: 1, p_raw: p, p_adjusted: p, direction: Some(direction) })
}

/// Bonferroni adjustment: each p is multiplied by the comparison count `m`
/// and clamped at 1. `m` must be at least the number of p-values supplied.
pub fn adjust_bonferroni<T: Scalar>(p_values: &[T], m: usize) -> Vec<T> {
    assert!(m >= p_values.len(), "comparison count below number of p-values");
    p_values.iter().map(|&p| (num::<T>(m) * p).min(T::one())).collect()
}

/// Jarque–Bera normality screen on raw (population) moments.
///
/// Informational only: the comparison pipeline is rank-based regardless of
/// the outcome. Needs `n >= 4` and a non-degenerate sample.
pub fn jarque_bera<T: Scalar>(samples: &[T]) -> Result<TestResult<T>> {
    let n = samples.len();
    if n < 4 {
        return Err(Error::Stats("jarque_bera needs at least 4 samples".into()));
    }
    let nf = num::<T>(n);
    let mean = samples.iter().fold(T::zero(), |a, &x| a + x) / nf;
    let mut m2 = T::zero();
    let mut m3 = T::zero();
    let mut m4 = T::zero();
    for &x in samples {
        let d = x - mean;
        m2 = m2 + d * d;
        m3 = m3 + d * d * d;
        m4 = m4 + d * d * d * d;
    }
    m2 = m2 / nf;
    m3 = m3 / nf;
    m4 = m4 / nf;
    if m2 == T::zero() {
        return Err(Error::Stats("degenerate sample".into()));
    }
    let skew = m3 / m2.powf(num::<T>(3) / num::<T>(2));
    let kurt = m4 / (m2 * m2);
    let three = num::<T>(3);
    let jb = nf / num::<T>(6) * (skew * skew + (kurt - three) * (kurt - three) / num::<T>(4));
    let p = chi2_sf(jb, 2);
    Ok(TestResult { statistic: jb, df: 2, p_raw: p, p_adjusted: p, direction: None })
}
