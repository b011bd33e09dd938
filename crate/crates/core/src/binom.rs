//! Binomial pmf helpers in log space.
//!
//! Dense matrix builds need rows of `Bin(n, p)` for `n` up to a few thousand;
//! `C(2000, 1000)` overflows f64, so everything goes through a table of
//! `ln k!` and exponentiation at the end.

/// Table of `ln k!` for `k = 0..=n_max`, built with compensated summation so
/// the absolute error stays near machine precision even at `n_max ~ 5000`.
#[derive(Debug, Clone)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(n_max: usize) -> Self {
        let mut table = Vec::with_capacity(n_max + 1);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        table.push(0.0);
        for k in 1..=n_max {
            let term = (k as f64).ln() - comp;
            let next = sum + term;
            comp = (next - sum) - term;
            sum = next;
            table.push(sum);
        }
        Self { table }
    }

    #[inline]
    pub fn ln_fact(&self, n: usize) -> f64 {
        self.table[n]
    }

    #[inline]
    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n);
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

/// `ln(1 - p)` without cancellation for small `p`.
#[inline]
fn ln_one_minus(p: f64) -> f64 {
    (-p).ln_1p()
}

/// Binomial coefficient as f64, exact while the value fits in 53 bits
/// (safe through n ~ 30 even at the central column).
pub fn choose(n: usize, j: usize) -> f64 {
    if j > n {
        return 0.0;
    }
    let j = j.min(n - j);
    let mut c = 1.0f64;
    for i in 0..j {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// `P(Bin(n, p) = k)`.
pub fn pmf_at(n: usize, p: f64, k: usize, tbl: &LnFactorial) -> f64 {
    debug_assert!(k <= n);
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln = tbl.ln_choose(n, k) + (k as f64) * p.ln() + ((n - k) as f64) * ln_one_minus(p);
    ln.exp()
}

/// The full pmf of `Bin(n, p)` as a vector of length `n + 1`.
pub fn pmf(n: usize, p: f64, tbl: &LnFactorial) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if p <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if p >= 1.0 {
        out[n] = 1.0;
        return out;
    }
    let lp = p.ln();
    let lq = ln_one_minus(p);
    for (k, slot) in out.iter_mut().enumerate() {
        let ln = tbl.ln_choose(n, k) + (k as f64) * lp + ((n - k) as f64) * lq;
        *slot = ln.exp();
    }
    out
}

/// `P(Bin(n, p) >= k)` by direct summation. Exact up to rounding; intended
/// for verification against the closed-form tail bounds, not for large `n`.
pub fn sf_ge(n: usize, p: f64, k: usize, tbl: &LnFactorial) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    (k..=n).map(|j| pmf_at(n, p, j, tbl)).sum()
}

/// `P(Bin(n, p) <= k)` by direct summation.
pub fn cdf_le(n: usize, p: f64, k: usize, tbl: &LnFactorial) -> f64 {
    if k >= n {
        return 1.0;
    }
    (0..=k).map(|j| pmf_at(n, p, j, tbl)).sum()
}
