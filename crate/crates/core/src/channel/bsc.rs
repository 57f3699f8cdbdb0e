use rand::Rng;

use crate::error::CodecError;

/// Probability that an `s`-bit symbol contains at least one bit error,
/// `1 - (1 - p_e)^s`.
pub fn symbol_error_prob(p_e: f64, s: u32) -> f64 {
    if p_e >= 1.0 {
        return 1.0;
    }
    // -expm1(s * ln(1 - p)) keeps precision for tiny p.
    -(s as f64 * (-p_e).ln_1p()).exp_m1()
}

/// Indices in `0..len` flipped by a BSC with crossover `p_e`, ascending.
///
/// Equivalent in distribution to an independent Bernoulli draw per bit, but
/// costs time proportional to the number of errors.
pub fn error_positions<R: Rng + ?Sized>(len: usize, p_e: f64, rng: &mut R) -> Vec<usize> {
    if len == 0 || p_e <= 0.0 {
        return Vec::new();
    }
    if p_e >= 1.0 {
        return (0..len).collect();
    }
    // Inversion: gap = floor(ln U / ln(1 - p)), U uniform on (0, 1).
    let log_q = (-p_e).ln_1p();
    let mut out = Vec::new();
    let mut pos = 0usize;
    loop {
        let u = ((rng.random::<u64>() >> 11) as f64 + 0.5) * f64::EPSILON / 2.0;
        let gap = (u.ln() / log_q).floor();
        if gap >= (len - pos) as f64 {
            return out;
        }
        pos += gap as usize;
        out.push(pos);
        pos += 1;
        if pos >= len {
            return out;
        }
    }
}

/// Sends `bits` through a binary symmetric channel.
pub fn transmit<R: Rng + ?Sized>(bits: &[u8], p_e: f64, rng: &mut R) -> Vec<u8> {
    let mut out = bits.to_vec();
    for i in error_positions(bits.len(), p_e, rng) {
        out[i] ^= 1;
    }
    out
}

/// Fraction of positions where `received` differs from `sent`.
pub fn measure_ber(sent: &[u8], received: &[u8]) -> Result<f64, CodecError> {
    if sent.len() != received.len() {
        return Err(CodecError::Length {
            expected: sent.len(),
            actual: received.len(),
        });
    }
    if sent.is_empty() {
        return Ok(0.0);
    }
    Ok(crate::bits::hamming_distance(sent, received) as f64 / sent.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symbol_error_edges() {
        assert_eq!(symbol_error_prob(0.0, 8), 0.0);
        assert_eq!(symbol_error_prob(1.0, 8), 1.0);
        assert!((symbol_error_prob(0.01, 8) - (1.0 - 0.99f64.powi(8))).abs() < 1e-15);
        assert!((symbol_error_prob(0.01, 8) - 0.07726).abs() < 1e-5);
        assert!((symbol_error_prob(0.3, 1) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn symbol_error_monotone() {
        let mut last = 0.0;
        for i in 1..100 {
            let p = i as f64 / 200.0;
            let v = symbol_error_prob(p, 5);
            assert!(v > last);
            assert!(symbol_error_prob(p, 6) > v);
            last = v;
        }
    }

    #[test]
    fn degenerate_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits: Vec<u8> = (0..1000).map(|i| (i % 3 == 0) as u8).collect();
        assert_eq!(transmit(&bits, 0.0, &mut rng), bits);
        let flipped = transmit(&bits, 1.0, &mut rng);
        assert!(bits.iter().zip(&flipped).all(|(a, b)| a ^ b == 1));
    }

    #[test]
    fn flip_rate_within_three_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB5C);
        let bits = vec![0u8; 1_000_000];
        let flips = transmit(&bits, 0.1, &mut rng).iter().filter(|&&b| b == 1).count();
        assert!((flips as f64 - 100_000.0).abs() <= 900.0, "flips = {flips}");
    }

    #[test]
    fn vanishing_crossover_terminates_without_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [1e-300, 5e-324, 1e-17] {
            assert!(error_positions(1 << 20, p, &mut rng).is_empty());
        }
    }

    #[test]
    fn mean_gap_matches_geometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 4_000_000usize;
        let p = 0.2;
        let k = error_positions(n, p, &mut rng).len() as f64;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((k - n as f64 * p).abs() < 4.0 * sd);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let bits = vec![0u8; 10_000];
        let a = transmit(&bits, 0.05, &mut ChaCha8Rng::seed_from_u64(9));
        let b = transmit(&bits, 0.05, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn ber_measurement() {
        let a = vec![0u8; 1000];
        let mut b = a.clone();
        assert_eq!(measure_ber(&a, &b).unwrap(), 0.0);
        b[3] = 1;
        b[500] = 1;
        b[999] = 1;
        assert_eq!(measure_ber(&a, &b).unwrap(), 0.003);
        let c = vec![1u8; 1000];
        assert_eq!(measure_ber(&a, &c).unwrap(), 1.0);
        assert!(measure_ber(&a, &c[..10]).is_err());
    }
}
