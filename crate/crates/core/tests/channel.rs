mod common;

use common::*;
use num_complex::Complex64;
use relaylp::channel::{
    demodulate_hard, draw_channel, make_frame, modulate_qam4_gray, noise_var_for_snr_db, substream, transmit,
    ChannelRealization, FrameParams, SYMBOL_ENERGY,
};
use relaylp::ldpc::{check_codeword, gallager_construct, systematize};

fn mean_and_power(v: &[Complex64]) -> (Complex64, f64) {
    let n = v.len() as f64;
    (v.iter().sum::<Complex64>() / n, v.iter().map(|z| z.norm_sqr()).sum::<f64>() / n)
}

#[test]
fn gains_have_the_requested_variances() {
    let mut rng = rng(1);
    let draws: Vec<ChannelRealization> = (0..100_000).map(|_| draw_channel(0.5, 1.0, &mut rng)).collect();
    let h1: Vec<Complex64> = draws.iter().map(|c| c.h1).collect();
    let h2: Vec<Complex64> = draws.iter().map(|c| c.h2).collect();
    for (v, want) in [(h1, 0.5), (h2, 1.0)] {
        let (mean, power) = mean_and_power(&v);
        assert!(mean.norm() < 0.02, "mean {mean}");
        assert!((power / want - 1.0).abs() < 0.02, "power {power} vs {want}");
    }
}

#[test]
fn noise_only_samples_have_the_requested_variance() {
    let x = vec![Complex64::new(0.0, 0.0); 100_000];
    let ch = ChannelRealization { h1: Complex64::new(0.3, 0.1), h2: Complex64::new(-1.0, 0.5) };
    let (r1, r2) = transmit(&x, ch, 0.3, &mut rng(2));
    for r in [&r1, &r2] {
        let (_, power) = mean_and_power(r);
        assert!((power / 0.3 - 1.0).abs() < 0.02);
        let re_var = r.iter().map(|z| z.re * z.re).sum::<f64>() / r.len() as f64;
        assert!((re_var / 0.15 - 1.0).abs() < 0.03, "real part carries half the variance");
    }
    let cross: f64 = r1.iter().zip(&r2).map(|(a, b)| (a * b.conj()).re).sum::<f64>() / r1.len() as f64;
    assert!(cross.abs() < 0.01, "branches are independent");
}

#[test]
fn realized_snr_matches_configuration() {
    let sigma1_sq = 0.5;
    for snr_db in [0.0, 7.5, 15.0] {
        let nv = noise_var_for_snr_db(snr_db, sigma1_sq);
        let mut rng = rng(3);
        let (mut signal, mut noise) = (0.0, 0.0);
        let samples = 1_000_000;
        for k in 0..samples {
            let ch = draw_channel(sigma1_sq, 1.0, &mut rng);
            let x = [gray_point((k & 1) as u8, (k >> 1 & 1) as u8)];
            let (r1, _) = transmit(&x, ch, nv, &mut rng);
            let clean = ch.h1 * x[0];
            signal += clean.norm_sqr();
            noise += (r1[0] - clean).norm_sqr();
        }
        let measured = 10.0 * (signal / noise).log10();
        assert!((measured - snr_db).abs() < 0.1, "{measured} dB vs {snr_db} dB");
    }
    assert_eq!(SYMBOL_ENERGY, 2.0);
}

#[test]
fn gray_mapping_matches_table() {
    for ((b0, b1), (re, im)) in GRAY_TABLE {
        assert_eq!(modulate_qam4_gray(&[b0, b1]).unwrap(), vec![Complex64::new(re, im)]);
        assert_eq!(demodulate_hard(&[Complex64::new(re, im)]), vec![b0, b1]);
        // sliced from a nearby point too
        assert_eq!(demodulate_hard(&[Complex64::new(0.3 * re, 0.6 * im)]), vec![b0, b1]);
    }
}

#[test]
fn noiseless_loop_back_recovers_bits() {
    let params = FrameParams { noise_var: 0.0, ..FrameParams::default() };
    for i in 0..200 {
        let f = make_frame(None, &mut substream(4, i), &params).unwrap();
        let eq: Vec<Complex64> = f.r1.iter().map(|r| r / f.channel.h1).collect();
        assert_eq!(demodulate_hard(&eq), f.tx_bits);
    }
}

#[test]
fn coded_frames_carry_codewords() {
    let h = gallager_construct(64, 3, 6, 2).unwrap();
    let enc = systematize(&h);
    for i in 0..20 {
        let f = make_frame(Some(&enc), &mut substream(5, i), &FrameParams::default()).unwrap();
        assert_eq!(f.symbols(), 32);
        assert_eq!(f.tx_bits.len(), 64);
        assert!(check_codeword(&h, &f.tx_bits));
        assert_eq!((f.r1.len(), f.r2.len()), (32, 32));
        assert!(f.x.iter().all(|x| x.re.abs() == 1.0 && x.im.abs() == 1.0));
    }
}

#[test]
fn frames_are_reproducible() {
    let p = FrameParams::default();
    let a = make_frame(None, &mut substream(9, 3), &p).unwrap();
    let b = make_frame(None, &mut substream(9, 3), &p).unwrap();
    assert_eq!(a, b);
    let c = make_frame(None, &mut substream(9, 4), &p).unwrap();
    assert_ne!(a.r1, c.r1);
}
