//! Elementary symmetric polynomials and the quantities built from them.
//!
//! `p_k^n(r)` is the sum over all `k`-subsets of `{1..n}` of the product of the
//! selected entries. Everything here is evaluated with the one-row recurrence
//! `p_j^{n+1}(r, r') = p_j^n(r) + r' p_{j-1}^n(r)`, which costs `O(nk)` and
//! never enumerates subsets.
//!
//! On top of `p` sit
//!
//! * [`h_poly`]: `H_k^n(r) = p_n^n(r) + Σ_{j<k} (-1)^{k-j} C(n-j-1, n-k) p_j^n(r)`,
//! * [`e_kernel_core`]: `E_k^n(s) = H_k^n(e^{-s_1}, …, e^{-s_n})`,
//! * [`shifted_ratio`]: `p_k^n(1 + r) / p_k^n(r)`.

use crate::error::{Error, Result};

/// Largest `n` for which every `C(n, k)` fits in a `u64`.
pub const MAX_BINOMIAL_N: u64 = 62;

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if n > MAX_BINOMIAL_N {
        return Err(Error::Arity(format!("binomial C({n}, {k}) exceeds the supported range n <= {MAX_BINOMIAL_N}")));
    }
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    u64::try_from(acc).map_err(|_| Error::Arity(format!("binomial C({n}, {k}) overflows u64")))
}

/// `C(n, k)` as a float. Panics only for `n > 62`, which callers rule out.
pub(crate) fn binom_f64(n: usize, k: usize) -> f64 {
    binomial(n as u64, k as u64).expect("binomial argument within range") as f64
}

/// Signed coefficient `(-1)^{k-j} C(n-j-1, n-k)` attached to the `|F| = j`
/// layer (`j < k`) in `μ_k^n`, `H_k^n`, `Λ_k^n` and the boundary correction.
pub(crate) fn layer_coefficient(n: usize, k: usize, j: usize) -> f64 {
    debug_assert!(j < k && k <= n);
    let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
    sign * binom_f64(n - j - 1, n - k)
}

/// All of `p_0^n(r), …, p_max^n(r)`.
pub fn elem_sym_all(r: &[f64], max: usize) -> Vec<f64> {
    let mut p = vec![0.0; max + 1];
    p[0] = 1.0;
    for (i, &x) in r.iter().enumerate() {
        let top = max.min(i + 1);
        for j in (1..=top).rev() {
            p[j] += x * p[j - 1];
        }
    }
    p
}

/// Elementary symmetric polynomial `p_k^n(r)` with `n = r.len()`.
pub fn elem_sym_poly(r: &[f64], k: usize) -> Result<f64> {
    if k > r.len() {
        return Err(Error::Arity(format!("order k = {k} exceeds the number of variables n = {}", r.len())));
    }
    Ok(elem_sym_all(r, k)[k])
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Arity("order k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Arity(format!("order k = {k} exceeds n = {n}")));
    }
    if n as u64 > MAX_BINOMIAL_N {
        return Err(Error::Arity(format!("n = {n} exceeds {MAX_BINOMIAL_N}")));
    }
    Ok(())
}

/// `H_k^n(r)`, defined for `1 <= k <= n`.
pub fn h_poly(r: &[f64], k: usize) -> Result<f64> {
    let n = r.len();
    check_order(n, k)?;
    let p = elem_sym_all(r, n);
    let mut acc = p[n];
    for (j, pj) in p.iter().enumerate().take(k) {
        acc += layer_coefficient(n, k, j) * pj;
    }
    Ok(acc)
}

/// `(-1)^k H_k^n(1 - b)` rewritten in the complementary variables `b`:
/// `Σ_{j=k}^{n} (-1)^{j-k} p_j^n(b)`.
///
/// Terms with fewer than `k` nonzero `b_i` vanish exactly, which the
/// direct form only achieves up to cancellation error.
pub(crate) fn signed_h_complement(b: &[f64], k: usize) -> f64 {
    let n = b.len();
    let p = elem_sym_all(b, n);
    let mut acc = 0.0;
    for (offset, pj) in p[k..].iter().enumerate() {
        if offset % 2 == 0 {
            acc += pj;
        } else {
            acc -= pj;
        }
    }
    acc
}

/// `E_k^n(s) = H_k^n(e^{-s_1}, …, e^{-s_n})` for `s ∈ [0, ∞)^n`.
///
/// `(-1)^k E_k^n(s) >= 0`, and the value is exactly zero whenever fewer than
/// `k` entries of `s` are nonzero.
pub fn e_kernel_core(s: &[f64], k: usize) -> Result<f64> {
    check_order(s.len(), k)?;
    let mut b = Vec::with_capacity(s.len());
    for &x in s {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::Domain(format!("E_k^n needs finite nonnegative arguments, got {x}")));
        }
        b.push(-(-x).exp_m1());
    }
    let signed = signed_h_complement(&b, k);
    Ok(if k % 2 == 0 { signed } else { -signed })
}

/// Number of strictly positive entries.
pub(crate) fn positive_count(r: &[f64]) -> usize {
    r.iter().filter(|&&x| x > 0.0).count()
}

/// `p_k^n(1 + r) / p_k^n(r)`; requires at least `k + 1` positive entries.
pub fn shifted_ratio(r: &[f64], k: usize) -> Result<f64> {
    let n = r.len();
    if k > n {
        return Err(Error::Arity(format!("order k = {k} exceeds n = {n}")));
    }
    if let Some(bad) = r.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Domain(format!("shifted ratio needs finite nonnegative entries, got {bad}")));
    }
    let positive = positive_count(r);
    if positive <= k {
        return Err(Error::DegenerateSupport(format!("{positive} positive entries, need at least k + 1 = {}", k + 1)));
    }
    let shifted: Vec<f64> = r.iter().map(|x| 1.0 + x).collect();
    Ok(elem_sym_all(&shifted, k)[k] / elem_sym_all(r, k)[k])
}
