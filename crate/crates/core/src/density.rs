//! How rare P-positions are.
//!
//! `pi(N)` counts the members of `P_0, .., P_N`; `nu(N)` counts every canonical
//! position with at most `k·T_N + N` tokens. Both are computed exactly by
//! partition counting. The closed-form integral bounds are evaluated in
//! rational arithmetic next to them for comparison only: they bound an
//! estimate of the counts, not the counts themselves.

use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::position::{DEFAULT_MAX_HEAPS, MIN_HEAPS};
use crate::triangular::triangular;

/// Largest DP table (entries) a single count may allocate.
const MAX_DP_CELLS: u128 = 1 << 27;

fn check_k(k: usize) -> Result<()> {
    if (MIN_HEAPS..=DEFAULT_MAX_HEAPS).contains(&k) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "k must be in {MIN_HEAPS}..={DEFAULT_MAX_HEAPS}, got {k}"
        )))
    }
}

fn check_cells(cells: u128) -> Result<()> {
    if cells > MAX_DP_CELLS {
        return Err(Error::ResourceLimit {
            what: "partition DP cells",
            needed: cells,
            limit: MAX_DP_CELLS,
        });
    }
    Ok(())
}

/// Number of partitions of `total` into exactly `parts` positive parts, each
/// at most `max_part`.
pub fn count_partitions(total: u64, parts: u64, max_part: u64) -> Result<BigUint> {
    if parts == 0 {
        return Ok(if total == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        });
    }
    if total < parts || max_part == 0 || total > parts.saturating_mul(max_part) {
        return Ok(BigUint::zero());
    }
    // Subtract 1 from every part: partitions of `rest` into at most `parts`
    // parts, each at most `max_part - 1`.
    let rest = total - parts;
    let cap = (max_part - 1).min(rest);
    check_cells((parts as u128 + 1) * (rest as u128 + 1))?;
    let (parts, rest) = (parts as usize, rest as usize);

    // dp[c][s]: partitions of s into exactly c parts drawn from values seen so far.
    let mut dp = vec![vec![BigUint::zero(); rest + 1]; parts + 1];
    dp[0][0] = BigUint::one();
    for v in 1..=cap as usize {
        for c in 1..=parts {
            let (lower, upper) = dp.split_at_mut(c);
            let prev = &lower[c - 1];
            let cur = &mut upper[0];
            for s in v..=rest {
                if !prev[s - v].is_zero() {
                    let add = prev[s - v].clone();
                    cur[s] += add;
                }
            }
        }
    }
    Ok(dp.iter().map(|row| &row[rest]).sum())
}

/// Size of `P_n` for `k` heaps: partitions of `n+k-1` into `k-1` parts in `[1, n+1]`.
pub fn p_class_size(n: u64, k: usize) -> Result<BigUint> {
    check_k(k)?;
    let total = n
        .checked_add(k as u64 - 1)
        .ok_or_else(|| Error::ArithmeticRange("n + k - 1 overflows".into()))?;
    count_partitions(total, k as u64 - 1, n + 1)
}

/// Number of P-positions in `P_0 ∪ .. ∪ P_N`.
pub fn pi_exact(big_n: u64, k: usize) -> Result<BigUint> {
    check_k(k)?;
    (0..=big_n).try_fold(BigUint::zero(), |acc, n| Ok(acc + p_class_size(n, k)?))
}

/// `k·T_N + N`, the token total of the members of `P_N`.
pub fn max_total(big_n: u64, k: usize) -> Result<u64> {
    triangular(big_n)?
        .checked_mul(k as u64)
        .and_then(|t| t.checked_add(big_n))
        .ok_or_else(|| Error::ArithmeticRange(format!("k*T_N + N overflows for N={big_n}")))
}

/// For each `s` in `0..=max_total`, the number of canonical `k`-heap positions
/// with exactly `s` tokens (partitions of `s` into at most `k` parts).
pub fn positions_by_total(max_total: u64, k: usize) -> Result<Vec<BigUint>> {
    check_k(k)?;
    check_cells((max_total as u128 + 1) * k as u128)?;
    let len = max_total as usize + 1;
    // At most k parts is conjugate to parts of size at most k.
    let mut ways = vec![BigUint::zero(); len];
    ways[0] = BigUint::one();
    for part in 1..=k {
        for s in part..len {
            let add = ways[s - part].clone();
            ways[s] += add;
        }
    }
    Ok(ways)
}

/// Number of canonical positions with at most `k·T_N + N` tokens.
pub fn nu_exact(big_n: u64, k: usize) -> Result<BigUint> {
    Ok(positions_by_total(max_total(big_n, k)?, k)?
        .into_iter()
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityBounds {
    pub pi_lower: BigRational,
    pub pi_upper: BigRational,
    pub nu_lower: BigRational,
    pub nu_upper: BigRational,
}

fn rat(v: u64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn factorial(n: u64) -> BigRational {
    (1..=n).fold(BigRational::one(), |acc, i| acc * rat(i))
}

fn pow(base: u64, exp: u64) -> BigRational {
    num_traits::pow(rat(base), exp as usize)
}

/// The integral bounds on the estimates of `pi(N)` and `nu(N)`:
///
/// ```text
/// ((N+k-1)^(k-1) - (k-2)^(k-1)) / (k-1)!   <= pi <=  ((N+k)^(k-1) - (k-1)^(k-1)) / (k-1)!
/// ((S+k)^k - (k-1)^k) / k!                 <= nu <=  ((S+k+1)^k - k^k) / k!
/// ```
///
/// with `S = k·T_N + N`.
pub fn density_bounds(big_n: u64, k: usize) -> Result<DensityBounds> {
    check_k(k)?;
    let kk = k as u64;
    let s = max_total(big_n, k)?;
    let overflow = || Error::ArithmeticRange("bound base overflows".into());
    let n_k = big_n.checked_add(kk).ok_or_else(overflow)?;
    let s_k = s.checked_add(kk).ok_or_else(overflow)?;
    let s_k1 = s_k.checked_add(1).ok_or_else(overflow)?;
    let pi_fact = factorial(kk - 1);
    let nu_fact = factorial(kk);
    Ok(DensityBounds {
        pi_lower: (pow(n_k - 1, kk - 1) - pow(kk - 2, kk - 1)) / pi_fact.clone(),
        pi_upper: (pow(n_k, kk - 1) - pow(kk - 1, kk - 1)) / pi_fact,
        nu_lower: (pow(s_k, kk) - pow(kk - 1, kk)) / nu_fact.clone(),
        nu_upper: (pow(s_k1, kk) - pow(kk, kk)) / nu_fact,
    })
}

/// `sum_{n=0}^{N} (n+k-1)^(k-2) / (k-2)!`, the estimate the `pi` bounds enclose.
pub fn pi_estimate(big_n: u64, k: usize) -> Result<BigRational> {
    check_k(k)?;
    let kk = k as u64;
    let fact = factorial(kk - 2);
    Ok((0..=big_n).fold(BigRational::zero(), |acc, n| {
        acc + pow(n + kk - 1, kk - 2) / fact.clone()
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub k: usize,
    pub n: u64,
    pub pi_exact: BigUint,
    pub nu_exact: BigUint,
    pub bounds: DensityBounds,
    /// `pi_exact / nu_exact`.
    pub ratio: BigRational,
}

impl DensityReport {
    pub fn ratio_f64(&self) -> f64 {
        to_f64(&self.ratio)
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}

fn ratio_of(pi: &BigUint, nu: &BigUint) -> BigRational {
    BigRational::new(pi.clone().into(), nu.clone().into())
}

pub fn density_report(big_n: u64, k: usize) -> Result<DensityReport> {
    let pi = pi_exact(big_n, k)?;
    let nu = nu_exact(big_n, k)?;
    Ok(DensityReport {
        k,
        n: big_n,
        ratio: ratio_of(&pi, &nu),
        bounds: density_bounds(big_n, k)?,
        pi_exact: pi,
        nu_exact: nu,
    })
}

/// Reports for `N = 1..=n_max`, sharing one DP for the position counts.
pub fn ratio_scan(k: usize, n_max: u64) -> Result<Vec<DensityReport>> {
    check_k(k)?;
    let by_total = positions_by_total(max_total(n_max, k)?, k)?;
    let mut reports = Vec::with_capacity(n_max as usize);
    let mut pi = p_class_size(0, k)?;
    let mut nu = BigUint::zero();
    let mut counted = 0usize;
    for big_n in 1..=n_max {
        pi += p_class_size(big_n, k)?;
        let upto = max_total(big_n, k)? as usize;
        while counted <= upto {
            nu += &by_total[counted];
            counted += 1;
        }
        reports.push(DensityReport {
            k,
            n: big_n,
            ratio: ratio_of(&pi, &nu),
            bounds: density_bounds(big_n, k)?,
            pi_exact: pi.clone(),
            nu_exact: nu.clone(),
        });
    }
    Ok(reports)
}

/// Least-squares slope of `ln(ratio)` against `ln(N)` over reports with
/// `lo <= N <= hi`.
pub fn log_log_slope(reports: &[DensityReport], lo: u64, hi: u64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| (lo..=hi).contains(&r.n))
        .map(|r| ((r.n as f64).ln(), r.ratio_f64().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

pub const CSV_HEADER: &str = "N,pi_exact,nu_exact,pi_lower,pi_upper,nu_lower,nu_upper,ratio";

/// One CSV row per report. Counts are exact integers; bounds and the ratio
/// are printed as decimals.
pub fn write_csv(reports: &[DensityReport], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:e}",
            r.n,
            r.pi_exact,
            r.nu_exact,
            to_f64(&r.bounds.pi_lower),
            to_f64(&r.bounds.pi_upper),
            to_f64(&r.bounds.nu_lower),
            to_f64(&r.bounds.nu_upper),
            r.ratio_f64()
        )?;
    }
    Ok(())
}
