use crate::model::SmoothingConfig;

/// Shannon entropy in bits; zero entries contribute nothing.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Entropy in bits of the smoothed distribution built from `counts` (the
/// positive cell counts) over a domain of `domain` cells.
pub fn smoothed_entropy(counts: &[u64], domain: usize, smoothing: SmoothingConfig) -> f64 {
    debug_assert!(counts.len() <= domain);
    let total: u64 = counts.iter().sum();
    let a = smoothing.pseudocount;
    if total == 0 && a == 0.0 {
        return (domain as f64).log2();
    }
    let denom = total as f64 + a * domain as f64;
    let mut h = 0.0;
    for &c in counts {
        let p = (c as f64 + a) / denom;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    let unobserved = domain - counts.len();
    if a > 0.0 && unobserved > 0 {
        let p = a / denom;
        h -= unobserved as f64 * p * p.log2();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(entropy_bits(&[0.25; 4]), 2.0);
        assert_eq!(entropy_bits(&[1.0, 0.0]), 0.0);
        assert!((entropy_bits(&[0.5, 0.25, 0.25]) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn smoothed_matches_explicit_distribution() {
        let s = SmoothingConfig::new(0.5).unwrap();
        // counts {3, 1} over a domain of 4 -> (3.5, 1.5, 0.5, 0.5) / 6
        let explicit = entropy_bits(&[3.5 / 6.0, 1.5 / 6.0, 0.5 / 6.0, 0.5 / 6.0]);
        assert!((smoothed_entropy(&[3, 1], 4, s) - explicit).abs() < 1e-14);
        assert!((smoothed_entropy(&[2, 1, 1], 3, SmoothingConfig::none()) - 1.5).abs() < 1e-15);
        assert_eq!(smoothed_entropy(&[], 8, SmoothingConfig::none()), 3.0);
    }
}
