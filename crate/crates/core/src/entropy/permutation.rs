use crate::error::{ensure_len, Error, Result};
use crate::numeric::shannon_entropy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationEntropy {
    /// Nats.
    pub raw: f64,
    /// `raw / ln(m!)`, in [0, 1].
    pub normalized: f64,
}

/// Bandt–Pompe permutation entropy over windows of `m` samples spaced `tau`
/// apart. Equal values rank by position, earlier first.
pub fn permutation_entropy(x: &[f64], m: usize, tau: usize) -> Result<PermutationEntropy> {
    if !(2..=7).contains(&m) {
        return Err(Error::InvalidOrder(m));
    }
    if tau == 0 {
        return Err(Error::InvalidParameter("tau must be ≥ 1".into()));
    }
    ensure_len(x.len(), (m - 1) * tau + 2)?;
    let factorial: usize = (1..=m).product();
    let mut counts = vec![0u64; factorial];
    let windows = x.len() - (m - 1) * tau;
    let mut idx = [0usize; 7];
    for start in 0..windows {
        let w = &mut idx[..m];
        for (k, slot) in w.iter_mut().enumerate() {
            *slot = k;
        }
        // stable: ties keep index order
        w.sort_by(|&a, &b| x[start + a * tau].total_cmp(&x[start + b * tau]));
        counts[lehmer_code(w)] += 1;
    }
    let raw = shannon_entropy(counts);
    Ok(PermutationEntropy {
        raw,
        normalized: raw / (factorial as f64).ln(),
    })
}

/// Rank of a permutation of `0..k` in lexicographic order.
fn lehmer_code(perm: &[usize]) -> usize {
    let k = perm.len();
    let mut code = 0;
    for i in 0..k {
        let smaller_after = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count();
        code = code * (k - i) + smaller_after;
    }
    code
}
