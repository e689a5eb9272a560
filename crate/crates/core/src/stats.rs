//! Small descriptive statistics shared by the analyses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r2: T,
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> Result<LineFit<T>> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData("need two or more paired points".into()));
    }
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxx = sxx + (a - mx) * (a - mx);
        sxy = sxy + (a - mx) * (b - my);
        syy = syy + (b - my) * (b - my);
    }
    if sxx == T::zero() {
        return Err(Error::Numerical("x has zero variance".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == T::zero() { T::one() } else { sxy * sxy / (sxx * syy) };
    Ok(LineFit { slope, intercept: my - slope * mx, r2 })
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks<T: Real>(v: &[T]) -> Vec<T> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut ranks = vec![T::zero(); v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = T::of((i + j) as f64 / 2.0 + 1.0);
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData("need two or more paired points".into()));
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = T::of_usize(x.len());
    let mx = rx.iter().copied().sum::<T>() / n;
    let my = ry.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in rx.iter().zip(&ry) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
        syy = syy + (b - my) * (b - my);
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::Numerical("constant input has no rank correlation".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
