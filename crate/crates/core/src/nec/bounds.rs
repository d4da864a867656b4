//! Closed-form bounds: generalized Singleton bound, sufficient field size,
//! `T_dfree` caps and the block-code field size used for comparison.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::prime_power;

fn check_rate(n: u64, k: u64) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::BadRate {
            k: k as usize,
            n: n as usize,
        });
    }
    Ok(())
}

/// `(n - k)(floor(delta / k) + 1) + delta + 1`.
pub fn bound_singleton(n: u64, k: u64, delta: u64) -> Result<u64> {
    check_rate(n, k)?;
    Ok((n - k) * (delta / k + 1) + delta + 1)
}

/// Smallest prime power `q` with `n | q - 1` and
/// `q > max(num_sinks, 2n^2/(n - k) + 2)`.
pub fn bound_field_size(n: u64, k: u64, num_sinks: u64) -> Result<u64> {
    check_rate(n, k)?;
    let gap = n - k;
    let admissible = |q: u64| {
        prime_power(q).is_some()
            && (q - 1) % n == 0
            && q > num_sinks
            // q > 2n^2/(n-k) + 2 without leaving the integers
            && q * gap > 2 * n * n + 2 * gap
    };
    Ok((2u64..).find(|&q| admissible(q)).expect("infinitely many primes"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TdfreeBounds {
    /// `(dfree - 1) * delta + 1`
    pub general: u64,
    /// `6nk - 2k^2 + 1`, for MDS codes of degree `2k`
    pub mds: Option<u64>,
}

pub fn bound_tdfree(dfree: u64, delta: u64, n: u64, k: u64, is_mds: bool) -> TdfreeBounds {
    let general = dfree.saturating_sub(1) * delta + 1;
    let mds = (is_mds && delta == 2 * k && n > k).then(|| 6 * n * k - 2 * k * k + 1);
    TdfreeBounds { general, mds }
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Sufficient field size for a `t`-error-correcting block network code on
/// the network replicated `j` times: `num_sinks * C(j |E|, 2t)`.
pub fn bnecc_field_bound(j: u64, num_edges: u64, t: u64, num_sinks: u64) -> BigUint {
    binomial(j * num_edges, 2 * t) * BigUint::from(num_sinks)
}
