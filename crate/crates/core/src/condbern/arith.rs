//! Elementary symmetric polynomials over positive weights, in linear or log
//! arithmetic.
//!
//! Weights are divided by their geometric mean before any recursion runs; the
//! CB law is invariant to that rescaling and callers that need absolute
//! constants add back `j * ln(scale)`. Linear arithmetic is used whenever a
//! bound on every intermediate `e_j` of the rescaled weights stays well inside
//! the `f64` exponent range, otherwise the two-term recursion is carried out
//! with log-sum-exp.

pub(crate) trait Semiring: Copy + Send + Sync {
    const ZERO: Self;
    const ONE: Self;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
    fn from_ln(v: f64) -> Self;
    fn ln(self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Linear(pub f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogSpace(pub f64);

impl Semiring for Linear {
    const ZERO: Self = Linear(0.0);
    const ONE: Self = Linear(1.0);

    #[inline]
    fn add(self, other: Self) -> Self {
        Linear(self.0 + other.0)
    }

    #[inline]
    fn mul(self, other: Self) -> Self {
        Linear(self.0 * other.0)
    }

    fn from_ln(v: f64) -> Self {
        Linear(v.exp())
    }

    fn ln(self) -> f64 {
        self.0.ln()
    }
}

impl Semiring for LogSpace {
    const ZERO: Self = LogSpace(f64::NEG_INFINITY);
    const ONE: Self = LogSpace(0.0);

    #[inline]
    fn add(self, other: Self) -> Self {
        let (hi, lo) = if self.0 >= other.0 { (self.0, other.0) } else { (other.0, self.0) };
        if lo == f64::NEG_INFINITY {
            return LogSpace(hi);
        }
        LogSpace(hi + (lo - hi).exp().ln_1p())
    }

    #[inline]
    fn mul(self, other: Self) -> Self {
        LogSpace(self.0 + other.0)
    }

    fn from_ln(v: f64) -> Self {
        LogSpace(v)
    }

    fn ln(self) -> f64 {
        self.0
    }
}

/// Log weights centred on their mean, plus the shift that was removed.
#[derive(Debug, Clone)]
pub(crate) struct Centered {
    pub ln_w: Vec<f64>,
    pub ln_scale: f64,
}

impl Centered {
    pub fn new(w: &[f64]) -> Self {
        let ln_w: Vec<f64> = w.iter().map(|v| v.ln()).collect();
        Self::from_ln(ln_w)
    }

    pub fn from_ln(mut ln_w: Vec<f64>) -> Self {
        let ln_scale = if ln_w.is_empty() {
            0.0
        } else {
            ln_w.iter().sum::<f64>() / ln_w.len() as f64
        };
        for v in &mut ln_w {
            *v -= ln_scale;
        }
        Self { ln_w, ln_scale }
    }

    /// Whether `e_0..=e_order` of any subset can be formed in plain `f64`.
    pub fn linear_safe(&self, order: usize) -> bool {
        linear_safe(&self.ln_w, order)
    }
}

// exp(650) ~ 1e282, leaving head-room for the sums of products.
const LN_RANGE: f64 = 650.0;

pub(crate) fn linear_safe(ln_w: &[f64], order: usize) -> bool {
    let (lo, hi) = ln_w
        .iter()
        .fold((0.0f64, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let j = order as f64;
    // e_j <= C(n, j) max(w)^j <= 2^n max(w)^j, and >= min(w)^j when non-zero.
    j * hi + ln_w.len() as f64 * std::f64::consts::LN_2 < LN_RANGE && j * lo > -LN_RANGE
}

pub(crate) fn lift<S: Semiring>(ln_w: &[f64]) -> Vec<S> {
    ln_w.iter().map(|&v| S::from_ln(v)).collect()
}

/// `e_0..=e_order` of all weights by the two-term recursion
/// `e_j(first m) = e_j(first m-1) + w_m e_{j-1}(first m-1)`.
pub(crate) fn esp<S: Semiring>(w: &[S], order: usize) -> Vec<S> {
    let mut e = vec![S::ZERO; order + 1];
    e[0] = S::ONE;
    for (m, &wm) in w.iter().enumerate() {
        let top = order.min(m + 1);
        for j in (1..=top).rev() {
            e[j] = e[j].add(wm.mul(e[j - 1]));
        }
    }
    e
}

/// Rows `0..=n` of `e_0..=order` for prefixes (`w[..i]`) and suffixes
/// (`w[i..]`), stored flat with stride `order + 1`.
fn prefix_suffix<S: Semiring>(w: &[S], order: usize) -> (Vec<S>, Vec<S>) {
    let n = w.len();
    let stride = order + 1;
    let mut pre = vec![S::ZERO; (n + 1) * stride];
    let mut suf = vec![S::ZERO; (n + 1) * stride];
    pre[0] = S::ONE;
    suf[n * stride] = S::ONE;
    for i in 0..n {
        let (done, rest) = pre.split_at_mut((i + 1) * stride);
        let prev = &done[i * stride..];
        let next = &mut rest[..stride];
        next[0] = S::ONE;
        for j in 1..=order {
            next[j] = prev[j].add(w[i].mul(prev[j - 1]));
        }
    }
    for i in (0..n).rev() {
        let (head, tail) = suf.split_at_mut((i + 1) * stride);
        let prev = &tail[..stride];
        let next = &mut head[i * stride..];
        next[0] = S::ONE;
        for j in 1..=order {
            next[j] = prev[j].add(w[i].mul(prev[j - 1]));
        }
    }
    (pre, suf)
}

/// `e_order(w without i)` for every `i`.
pub(crate) fn leave_one_out<S: Semiring>(w: &[S], order: usize) -> Vec<S> {
    let stride = order + 1;
    let (pre, suf) = prefix_suffix(w, order);
    (0..w.len())
        .map(|i| {
            let left = &pre[i * stride..(i + 1) * stride];
            let right = &suf[(i + 1) * stride..(i + 2) * stride];
            (0..=order).fold(S::ZERO, |acc, a| acc.add(left[a].mul(right[order - a])))
        })
        .collect()
}

/// `e_j(w without i)` for every `i` and `j = 0..=order`, row-major by `i`.
pub(crate) fn leave_one_out_table<S: Semiring>(w: &[S], order: usize) -> Vec<S> {
    let stride = order + 1;
    let (pre, suf) = prefix_suffix(w, order);
    let mut out = Vec::with_capacity(w.len() * stride);
    for i in 0..w.len() {
        let left = &pre[i * stride..(i + 1) * stride];
        let right = &suf[(i + 1) * stride..(i + 2) * stride];
        for j in 0..=order {
            out.push((0..=j).fold(S::ZERO, |acc, a| acc.add(left[a].mul(right[j - a]))));
        }
    }
    out
}

/// Natural logs of `e_order(w without i)`, choosing the arithmetic.
pub(crate) fn leave_one_out_ln(c: &Centered, order: usize) -> Vec<f64> {
    let ln: Vec<f64> = if c.linear_safe(order) {
        leave_one_out(&lift::<Linear>(&c.ln_w), order)
            .into_iter()
            .map(Semiring::ln)
            .collect()
    } else {
        leave_one_out(&lift::<LogSpace>(&c.ln_w), order)
            .into_iter()
            .map(Semiring::ln)
            .collect()
    };
    let shift = order as f64 * c.ln_scale;
    ln.into_iter().map(|v| v + shift).collect()
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64 / i as f64).ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_esp(w: &[f64], j: usize) -> f64 {
        let n = w.len();
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == j)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| w[i]).product::<f64>())
            .sum()
    }

    #[test]
    fn linear_and_log_agree() {
        let w = [0.3, 2.0, 5.5, 0.01, 1.0, 7.0, 0.2];
        let lin = esp(&w.iter().map(|&v| Linear(v)).collect::<Vec<_>>(), 4);
        let log = esp(&w.iter().map(|&v| LogSpace(v.ln())).collect::<Vec<_>>(), 4);
        for (j, (a, b)) in lin.iter().zip(&log).enumerate() {
            assert!((a.0.ln() - b.0).abs() < 1e-12, "j={j}");
            assert!((a.0 / brute_esp(&w, j) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn leave_one_out_matches_brute_force() {
        let w = [0.5, 1.5, 3.0, 0.25, 2.0];
        let lin: Vec<Linear> = w.iter().map(|&v| Linear(v)).collect();
        let table = leave_one_out_table(&lin, 3);
        for i in 0..w.len() {
            let rest: Vec<f64> = w.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            for j in 0..=3 {
                let want = brute_esp(&rest, j);
                assert!((table[i * 4 + j].0 - want).abs() <= 1e-12 * want.max(1.0));
            }
            assert_eq!(leave_one_out(&lin, 3)[i], table[i * 4 + 3]);
        }
    }

    #[test]
    fn safety_bound() {
        assert!(linear_safe(&[0.0; 40], 20));
        assert!(!linear_safe(&[30.0, -30.0, 0.0], 30));
        assert!((ln_binomial(40, 20) - 137_846_528_820f64.ln()).abs() < 1e-9);
    }
}
