use num_complex::Complex64;

use super::LdpcError;

/// Bit LLRs `log P(r | f = 0) / P(r | f = 1)` from the direct link alone.
///
/// Symbol `k` carries bit `2k` on its imaginary part and bit `2k + 1` on its
/// real part (`x = (1 - 2 f[2k+1]) + j (1 - 2 f[2k])`). With complex noise
/// variance `noise_var` the Gaussian likelihood ratio reduces to
/// `4 / noise_var` times the matched-filter output `conj(h1) * r1[k]`.
pub fn direct_llr(r1: &[Complex64], h1: Complex64, noise_var: f64) -> Result<Vec<f64>, LdpcError> {
    if !(noise_var > 0.0) {
        return Err(LdpcError::NoiseVariance(noise_var));
    }
    let scale = 4.0 / noise_var;
    Ok(r1
        .iter()
        .flat_map(|&r| {
            let z = h1.conj() * r;
            [scale * z.im, scale * z.re]
        })
        .collect())
}
