//! Symbol-by-symbol maximum-likelihood detectors used as references.

use num_complex::Complex64;

use super::ReceiverError;
use crate::channel::demodulate_hard;

/// ML detection from the direct link only: slice `r1 / h1`.
pub fn detect_ml_direct(r1: &[Complex64], h1: Complex64) -> Result<Vec<u8>, ReceiverError> {
    if h1.norm_sqr() == 0.0 {
        return Err(ReceiverError::ZeroGain);
    }
    let eq: Vec<Complex64> = r1.iter().map(|&r| r / h1).collect();
    Ok(demodulate_hard(&eq))
}

/// ML detection over both links with both gains known.
///
/// All 4-QAM points share one energy, so minimising
/// `|r1 - h1 x|^2 + |r2 - h2 x|^2` is the same as slicing the maximum-ratio
/// combination `conj(h1) r1 + conj(h2) r2`.
pub fn detect_ml_all_links(
    r1: &[Complex64],
    r2: &[Complex64],
    h1: Complex64,
    h2: Complex64,
) -> Result<Vec<u8>, ReceiverError> {
    if r1.len() != r2.len() {
        return Err(ReceiverError::BranchLength { r1: r1.len(), r2: r2.len() });
    }
    let z: Vec<Complex64> = r1.iter().zip(r2).map(|(&a, &b)| h1.conj() * a + h2.conj() * b).collect();
    Ok(demodulate_hard(&z))
}

/// Two-stage receiver for an unknown relay gain.
///
/// Decisions from the direct link serve as pilots for a least-squares
/// estimate `h2_hat = sum conj(x_hat) r2 / sum |x_hat|^2`; the frame is then
/// detected over both links with `(h1, h2_hat)`.
pub fn detect_df_chanest(
    r1: &[Complex64],
    r2: &[Complex64],
    h1: Complex64,
) -> Result<(Vec<u8>, Complex64), ReceiverError> {
    let first = detect_ml_direct(r1, h1)?;
    let x_hat = crate::channel::modulate_qam4_gray(&first).expect("slicer emits bit pairs");
    if r2.len() != x_hat.len() {
        return Err(ReceiverError::BranchLength { r1: r1.len(), r2: r2.len() });
    }
    let num: Complex64 = x_hat.iter().zip(r2).map(|(x, r)| x.conj() * r).sum();
    let den: f64 = x_hat.iter().map(|x| x.norm_sqr()).sum();
    let h2_hat = num / den;
    Ok((detect_ml_all_links(r1, r2, h1, h2_hat)?, h2_hat))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_direct_gain_rejected() {
        let r = [Complex64::new(1.0, 0.0)];
        assert_eq!(detect_ml_direct(&r, Complex64::new(0.0, 0.0)), Err(ReceiverError::ZeroGain));
    }

    #[test]
    fn rotation_is_undone() {
        let h1 = Complex64::new(0.0, 2.0);
        let x = Complex64::new(-1.0, 1.0);
        assert_eq!(detect_ml_direct(&[h1 * x], h1).unwrap(), vec![0, 1]);
    }

    #[test]
    fn silent_relay_matches_direct() {
        let h1 = Complex64::new(0.7, -0.3);
        let r1 = [Complex64::new(0.2, 0.9), Complex64::new(-1.3, 0.1), Complex64::new(0.05, -0.6)];
        let r2 = [Complex64::new(5.0, -5.0); 3];
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(detect_ml_all_links(&r1, &r2, h1, zero).unwrap(), detect_ml_direct(&r1, h1).unwrap());
    }

    #[test]
    fn noiseless_estimate_is_exact() {
        let h1 = Complex64::new(0.9, 0.4);
        let h2 = Complex64::new(-0.2, 1.1);
        let x = crate::channel::modulate_qam4_gray(&[0, 1, 1, 1, 1, 0, 0, 0]).unwrap();
        let r1: Vec<_> = x.iter().map(|&s| h1 * s).collect();
        let r2: Vec<_> = x.iter().map(|&s| h2 * s).collect();
        let (bits, est) = detect_df_chanest(&r1, &r2, h1).unwrap();
        assert_eq!(bits, vec![0, 1, 1, 1, 1, 0, 0, 0]);
        assert!((est - h2).norm() < 1e-12);
    }
}
