use std::collections::BTreeMap;

use crate::error::{ensure_len, Error, Result};
use crate::numeric::{median, pairwise_sum};

/// Binarisation threshold for symbolic entropy.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum Threshold {
    /// The series median.
    #[default]
    AutoMedian,
    Value(f64),
}

/// Normalised corrected Shannon entropy of overlapping binary words.
///
/// Samples above the threshold map to 1, the rest to 0. With W words, K
/// distinct observed words and M = 2^L possible ones, the entropy is
/// corrected by (K − 1)/(2W) and divided by the corrected entropy of the
/// uniform distribution over all M words, ln M + (M − 1)/(2W).
pub fn symbolic_entropy(x: &[f64], threshold: Threshold, word_length: usize) -> Result<f64> {
    if !(1..=32).contains(&word_length) {
        return Err(Error::InvalidParameter(format!("word_length={word_length} outside 1..=32")));
    }
    ensure_len(x.len(), word_length + 1)?;
    let thr = match threshold {
        Threshold::AutoMedian => median(x),
        Threshold::Value(v) => v,
    };
    let bits: Vec<u64> = x.iter().map(|&v| u64::from(v > thr)).collect();
    let mask = (1u64 << word_length) - 1;

    let mut words: BTreeMap<u64, u64> = BTreeMap::new();
    let mut w = 0u64;
    for (i, b) in bits.iter().enumerate() {
        w = ((w << 1) | b) & mask;
        if i + 1 >= word_length {
            *words.entry(w).or_default() += 1;
        }
    }
    let total = (x.len() - word_length + 1) as f64;
    let terms: Vec<f64> = words
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .collect();
    let corrected = pairwise_sum(&terms) + (words.len() as f64 - 1.0) / (2.0 * total);
    let possible = 2f64.powi(word_length as i32);
    let corrected_max = possible.ln() + (possible - 1.0) / (2.0 * total);
    Ok(corrected / corrected_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_zero() {
        assert_eq!(symbolic_entropy(&[2.0; 40], Threshold::AutoMedian, 3).unwrap(), 0.0);
    }

    #[test]
    fn all_on_one_side_is_zero() {
        let x: Vec<f64> = (0..40).map(f64::from).collect();
        assert_eq!(symbolic_entropy(&x, Threshold::Value(-1.0), 4).unwrap(), 0.0);
    }

    #[test]
    fn word_length_bounds() {
        assert!(symbolic_entropy(&[1.0; 10], Threshold::AutoMedian, 0).is_err());
        assert!(symbolic_entropy(&[1.0; 10], Threshold::AutoMedian, 33).is_err());
        assert!(matches!(
            symbolic_entropy(&[1.0; 3], Threshold::AutoMedian, 3),
            Err(Error::SeriesTooShort { .. })
        ));
    }
}
