//! Channel models and energy conventions.
//!
//! SISO: `y = Σ_j d x_j + z` with unit-norm dictionary columns and unit-variance
//! real noise, so `Eb/N0 = d² L / (2B)`.
//!
//! MIMO: `Y(ℓ) = Σ_j a_{i_j(ℓ)} h_j(ℓ)ᵀ + Z(ℓ)` with columns on the sphere of radius
//! `√(nP)`, `h ~ CN(0, I_M)` drawn independently per block, and complex noise of
//! power `N0`, so `Eb/N0 = L n P / (B N0)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::seeds::rng_from_seed;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Per-user amplitude `d` for a target SISO `Eb/N0`.
pub fn ebn0_to_amplitude(ebn0_db: f64, message_bits: usize, sections: usize) -> f64 {
    (2.0 * message_bits as f64 * db_to_linear(ebn0_db) / sections as f64).sqrt()
}

pub fn amplitude_to_ebn0(amplitude: f64, message_bits: usize, sections: usize) -> f64 {
    linear_to_db(amplitude * amplitude * sections as f64 / (2.0 * message_bits as f64))
}

/// Per-symbol power `P` for a target MIMO `Eb/N0`.
pub fn ebn0_to_power(ebn0_db: f64, message_bits: usize, sections: usize, block_len: usize, noise_power: f64) -> f64 {
    db_to_linear(ebn0_db) * message_bits as f64 * noise_power / (sections as f64 * block_len as f64)
}

pub fn power_to_ebn0(power: f64, message_bits: usize, sections: usize, block_len: usize, noise_power: f64) -> f64 {
    linear_to_db(sections as f64 * block_len as f64 * power / (message_bits as f64 * noise_power))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SisoChannelConfig {
    pub amplitude: f64,
    pub noise_seed: u64,
    /// Real noise variance; `1.0` for the standard channel, `0.0` for noiseless runs.
    pub noise_variance: f64,
}

impl SisoChannelConfig {
    pub fn new(amplitude: f64, noise_seed: u64) -> Self {
        SisoChannelConfig {
            amplitude,
            noise_seed,
            noise_variance: 1.0,
        }
    }
}

/// Superposes `d·x_j` for every user and adds seeded Gaussian noise.
pub fn gmac_transmit(len: usize, signals: &[Vec<f64>], config: &SisoChannelConfig) -> Result<Vec<f64>> {
    if config.amplitude < 0.0 || config.noise_variance < 0.0 {
        return Err(Error::invalid("amplitude and noise variance must be nonnegative"));
    }
    if let Some(bad) = signals.iter().find(|s| s.len() != len) {
        return Err(Error::invalid(format!("signal of length {} on a channel of length {len}", bad.len())));
    }
    let mut rng = rng_from_seed(config.noise_seed);
    let std = config.noise_variance.sqrt();
    Ok((0..len)
        .map(|t| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let sum: f64 = signals.iter().map(|s| s[t]).sum();
            config.amplitude * sum + std * z
        })
        .collect())
}

/// Circularly-symmetric complex normal with total variance `variance`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// Complex dictionary with `2^v` columns drawn uniformly on the sphere of radius `√(nP)`.
pub fn mimo_sensing_matrix(block_len: usize, fragment_bits: usize, power: f64, seed: u64, budget: u128) -> Result<DMatrix<Complex64>> {
    if block_len == 0 || fragment_bits == 0 {
        return Err(Error::invalid("dictionary needs n >= 1 and v >= 1"));
    }
    let requested = if fragment_bits >= 64 { u128::MAX } else { block_len as u128 * (1u128 << fragment_bits) };
    if requested > budget {
        return Err(Error::ResourceRefusal {
            what: "MIMO dictionary".into(),
            requested,
            budget,
        });
    }
    let cols = 1usize << fragment_bits;
    let radius = (block_len as f64 * power).sqrt();
    let mut rng = rng_from_seed(seed);
    let mut a = DMatrix::from_fn(block_len, cols, |_, _| complex_normal(&mut rng, 1.0));
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        col *= Complex64::from(radius / norm);
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MimoChannelConfig {
    pub antennas: usize,
    pub noise_power: f64,
    pub fading_seed: u64,
    pub noise_seed: u64,
}

/// `K × M` matrix of i.i.d. `CN(0, 1)` fading coefficients; row `j` is `h_jᵀ`.
pub fn fading_matrix(users: usize, antennas: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = rng_from_seed(seed);
    DMatrix::from_fn(users, antennas, |_, _| complex_normal(&mut rng, 1.0))
}

pub fn noise_matrix(rows: usize, antennas: usize, noise_power: f64, seed: u64) -> DMatrix<Complex64> {
    let mut rng = rng_from_seed(seed);
    DMatrix::from_fn(rows, antennas, |_, _| complex_normal(&mut rng, noise_power))
}

/// Observation of one coherence block: `n × M`.
pub fn mimo_block_transmit(indices: &[u64], a: &DMatrix<Complex64>, config: &MimoChannelConfig) -> Result<DMatrix<Complex64>> {
    if config.antennas == 0 || config.noise_power <= 0.0 {
        return Err(Error::invalid("need M >= 1 and N0 > 0"));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i as usize >= a.ncols()) {
        return Err(Error::invalid(format!("column {bad} outside a {}-column dictionary", a.ncols())));
    }
    let h = fading_matrix(indices.len(), config.antennas, config.fading_seed);
    let mut y = noise_matrix(a.nrows(), config.antennas, config.noise_power, config.noise_seed);
    for (j, &i) in indices.iter().enumerate() {
        y += a.column(i as usize) * h.row(j);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_invert() {
        assert!((ebn0_to_amplitude(0.0, 24, 24) - 2f64.sqrt()).abs() < 1e-15);
        assert!((ebn0_to_power(0.0, 64, 4, 16, 1.0) - 1.0).abs() < 1e-15);
        for db in [-3.0, 0.0, 2.5, 11.0] {
            assert!((amplitude_to_ebn0(ebn0_to_amplitude(db, 75, 11), 75, 11) - db).abs() < 1e-12);
            assert!((power_to_ebn0(ebn0_to_power(db, 96, 32, 100, 0.7), 96, 32, 100, 0.7) - db).abs() < 1e-12);
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_single_user_passes_through() {
        let x = vec![0.5, -1.0, 2.0];
        let cfg = SisoChannelConfig { amplitude: 1.0, noise_seed: 0, noise_variance: 0.0 };
        assert_eq!(gmac_transmit(3, std::slice::from_ref(&x), &cfg).unwrap(), x);
    }

    #[test]
    fn noiseless_superposition_scales() {
        let a = vec![1.0, 2.0, -0.5];
        let b = vec![0.25, -1.0, 3.0];
        let cfg = SisoChannelConfig { amplitude: 2.0, noise_seed: 0, noise_variance: 0.0 };
        let y = gmac_transmit(3, &[a.clone(), b.clone()], &cfg).unwrap();
        for t in 0..3 {
            assert!((y[t] - 2.0 * (a[t] + b[t])).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_noise_has_unit_variance() {
        let n = 20_000;
        let y = gmac_transmit(n, &[], &SisoChannelConfig::new(1.0, 5)).unwrap();
        let mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        // sample variance of N(0,1) has standard error sqrt(2/n)
        assert!((var - 1.0).abs() <= 3.0 * (2.0 / n as f64).sqrt());
        assert_eq!(y, gmac_transmit(n, &[], &SisoChannelConfig::new(1.0, 5)).unwrap());
    }

    #[test]
    fn dictionary_columns_on_sphere() {
        let a = mimo_sensing_matrix(8, 4, 0.3, 1, 1 << 20).unwrap();
        for col in a.column_iter() {
            assert!((col.norm_squared() - 8.0 * 0.3).abs() < 1e-9 * 2.4);
        }
    }

    #[test]
    fn single_user_block_is_rank_one() {
        let a = mimo_sensing_matrix(4, 3, 1.0, 2, 1 << 20).unwrap();
        let cfg = MimoChannelConfig { antennas: 1, noise_power: 1e-300, fading_seed: 3, noise_seed: 4 };
        let y = mimo_block_transmit(&[5], &a, &cfg).unwrap();
        let h = fading_matrix(1, 1, 3);
        for r in 0..4 {
            assert!((y[(r, 0)] - a[(r, 5)] * h[(0, 0)]).norm() < 1e-12);
        }
    }

    #[test]
    fn block_matches_dense_product() {
        let a = mimo_sensing_matrix(4, 3, 0.5, 7, 1 << 20).unwrap();
        let indices = [1u64, 6, 6];
        let cfg = MimoChannelConfig { antennas: 5, noise_power: 0.2, fading_seed: 8, noise_seed: 9 };
        let y = mimo_block_transmit(&indices, &a, &cfg).unwrap();
        let mut select = DMatrix::<Complex64>::zeros(8, 3);
        for (j, &i) in indices.iter().enumerate() {
            select[(i as usize, j)] = Complex64::new(1.0, 0.0);
        }
        let dense = &a * select * fading_matrix(3, 5, 8) + noise_matrix(4, 5, 0.2, 9);
        assert!((y - dense).norm() < 1e-12);
    }

    #[test]
    fn pure_noise_covariance_tends_to_n0_identity() {
        let (n, m, n0) = (4, 10_000, 0.8);
        let a = mimo_sensing_matrix(n, 2, 1.0, 0, 1 << 20).unwrap();
        let cfg = MimoChannelConfig { antennas: m, noise_power: n0, fading_seed: 1, noise_seed: 2 };
        let y = mimo_block_transmit(&[], &a, &cfg).unwrap();
        let cov = &y * y.adjoint() / Complex64::from(m as f64);
        // each entry of the sample covariance has standard deviation n0 / sqrt(M)
        let se = n0 / (m as f64).sqrt();
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { n0 } else { 0.0 };
                assert!((cov[(r, c)] - Complex64::from(target)).norm() <= 4.0 * se);
            }
        }
    }
}
