//! Covariance-based activity detection by coordinate descent, with the index set
//! optionally restricted to the parity-admissible fragments of each block.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::ccs_siso::top_k_support;
use crate::error::{Error, Result};
use crate::tree_code::{decode_concatenated, ColumnFilter, ConcatenatedOutcome, DecodeMode, DecodeOptions, TreeCodebook};

type CMatrix = DMatrix<Complex64>;

/// `Σ̂ = (1/M) Y Yᴴ` for an `n × M` block observation.
pub fn sample_covariance(y: &CMatrix) -> Result<CMatrix> {
    if y.ncols() == 0 {
        return Err(Error::invalid("sample covariance needs at least one antenna"));
    }
    let mut cov = y * y.adjoint() / Complex64::from(y.ncols() as f64);
    hermitize(&mut cov);
    Ok(cov)
}

fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for r in 0..n {
        m[(r, r)] = Complex64::new(m[(r, r)].re, 0.0);
        for c in r + 1..n {
            let v = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivityOptions {
    pub max_sweeps: usize,
    /// Stop once a full pass changes no `γ_k` by more than this.
    pub tol: f64,
    /// Steps with `1 + d·aᴴΣ⁻¹a` at or below this are skipped.
    pub singular_tol: f64,
    /// Check inverse drift after this many rank-one updates.
    pub refresh_every: usize,
    /// Recompute `Σ⁻¹` from scratch when `‖Σ⁻¹Σ − I‖_F` exceeds this.
    pub refresh_tol: f64,
}

impl Default for ActivityOptions {
    fn default() -> Self {
        ActivityOptions {
            max_sweeps: 10,
            tol: 1e-6,
            singular_tol: 1e-12,
            refresh_every: 32,
            refresh_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub d_star: f64,
    /// Step actually applied after clamping `γ_k` at zero.
    pub d_eff: f64,
    pub skipped: bool,
}

/// Running `(Σ⁻¹, γ)` pair of one coherence block.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    pub sigma_inv: CMatrix,
    pub gamma: Vec<f64>,
    pub noise_power: f64,
    pub skipped_steps: usize,
    pub refreshes: usize,
    updates_since_check: usize,
}

impl CovarianceState {
    /// `Σ = N0 I`, `γ = 0`.
    pub fn new(block_len: usize, columns: usize, noise_power: f64) -> Self {
        CovarianceState {
            sigma_inv: CMatrix::identity(block_len, block_len) / Complex64::from(noise_power),
            gamma: vec![0.0; columns],
            noise_power,
            skipped_steps: 0,
            refreshes: 0,
            updates_since_check: 0,
        }
    }

    /// One clamped coordinate update of `γ_k` with the matching rank-one inverse update.
    pub fn coordinate_step(&mut self, k: usize, a_k: &DVector<Complex64>, sample_cov: &CMatrix, singular_tol: f64) -> StepOutcome {
        let u = &self.sigma_inv * a_k;
        let s = a_k.dotc(&u).re;
        let q = u.dotc(&(sample_cov * &u)).re;
        let d_star = (q - s) / (s * s);
        let d_eff = d_star.max(-self.gamma[k]);
        let denom = 1.0 + d_eff * s;
        if !d_star.is_finite() || denom <= singular_tol {
            self.skipped_steps += 1;
            return StepOutcome { d_star, d_eff: 0.0, skipped: true };
        }
        if d_eff != 0.0 {
            self.gamma[k] += d_eff;
            let scale = Complex64::from(d_eff / denom);
            let uh = u.adjoint();
            self.sigma_inv -= (&u * uh) * scale;
            self.updates_since_check += 1;
        }
        StepOutcome { d_star, d_eff, skipped: false }
    }

    /// `A diag(γ) Aᴴ + N0 I`.
    pub fn sigma(&self, a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let mut sigma = CMatrix::identity(n, n) * Complex64::from(self.noise_power);
        for (k, &g) in self.gamma.iter().enumerate() {
            if g > 0.0 {
                let col = a.column(k);
                sigma += (col * col.adjoint()) * Complex64::from(g);
            }
        }
        sigma
    }

    /// `‖Σ⁻¹ Σ − I‖_F` against a freshly built `Σ`.
    pub fn inverse_error(&self, a: &CMatrix) -> f64 {
        let n = a.nrows();
        (&self.sigma_inv * self.sigma(a) - CMatrix::identity(n, n)).norm()
    }

    pub fn refresh(&mut self, a: &CMatrix) -> Result<()> {
        let sigma = self.sigma(a);
        let chol = sigma
            .cholesky()
            .ok_or_else(|| Error::invalid("covariance lost positive definiteness"))?;
        self.sigma_inv = chol.inverse();
        self.refreshes += 1;
        self.updates_since_check = 0;
        Ok(())
    }

    /// Covariance-matching cost `log det Σ + tr(Σ⁻¹ Σ̂)` evaluated directly from `γ`.
    pub fn cost(&self, a: &CMatrix, sample_cov: &CMatrix) -> f64 {
        let sigma = self.sigma(a);
        let chol = sigma.cholesky().expect("Σ is positive definite");
        let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
        let trace = chol.solve(sample_cov).trace().re;
        log_det + trace
    }
}

/// Coordinate descent over a fixed index set.
pub struct ActivityDetector<'a> {
    a: &'a CMatrix,
    sample_cov: &'a CMatrix,
    support: Vec<usize>,
    columns: Vec<DVector<Complex64>>,
    state: CovarianceState,
    options: ActivityOptions,
    sweeps: usize,
}

impl<'a> ActivityDetector<'a> {
    pub fn new(sample_cov: &'a CMatrix, a: &'a CMatrix, support: &[u64], noise_power: f64, options: ActivityOptions) -> Result<Self> {
        let n = a.nrows();
        if sample_cov.nrows() != n || sample_cov.ncols() != n {
            return Err(Error::invalid("sample covariance and dictionary disagree in n"));
        }
        if noise_power <= 0.0 {
            return Err(Error::invalid("N0 must be positive"));
        }
        let support: Vec<usize> = support.iter().map(|&k| k as usize).collect();
        if let Some(&bad) = support.iter().find(|&&k| k >= a.ncols()) {
            return Err(Error::invalid(format!("index {bad} outside the dictionary")));
        }
        let columns = support.iter().map(|&k| a.column(k).into_owned()).collect();
        Ok(ActivityDetector {
            a,
            sample_cov,
            support,
            columns,
            state: CovarianceState::new(n, a.ncols(), noise_power),
            options,
            sweeps: 0,
        })
    }

    pub fn state(&self) -> &CovarianceState {
        &self.state
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// One ascending pass over the index set; returns the largest `|Δγ_k|`.
    pub fn sweep(&mut self) -> Result<f64> {
        let mut max_change = 0.0f64;
        for (&k, col) in self.support.iter().zip(&self.columns) {
            let step = self.state.coordinate_step(k, col, self.sample_cov, self.options.singular_tol);
            max_change = max_change.max(step.d_eff.abs());
            if self.options.refresh_every > 0 && self.state.updates_since_check >= self.options.refresh_every {
                if self.state.inverse_error(self.a) > self.options.refresh_tol {
                    self.state.refresh(self.a)?;
                } else {
                    self.state.updates_since_check = 0;
                }
            }
        }
        self.sweeps += 1;
        Ok(max_change)
    }

    pub fn run(mut self) -> Result<ActivityResult> {
        while self.sweeps < self.options.max_sweeps {
            if self.sweep()? < self.options.tol {
                break;
            }
        }
        Ok(ActivityResult {
            sweeps: self.sweeps,
            skipped_steps: self.state.skipped_steps,
            refreshes: self.state.refreshes,
            gamma: self.state.gamma,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityResult {
    /// One entry per dictionary column; zero outside the index set.
    pub gamma: Vec<f64>,
    pub sweeps: usize,
    pub skipped_steps: usize,
    pub refreshes: usize,
}

pub fn activity_detect(
    sample_cov: &CMatrix,
    a: &CMatrix,
    support: &[u64],
    noise_power: f64,
    options: ActivityOptions,
) -> Result<ActivityResult> {
    if options.max_sweeps == 0 {
        return Err(Error::invalid("at least one sweep required"));
    }
    ActivityDetector::new(sample_cov, a, support, noise_power, options)?.run()
}

/// The `list_size` largest entries of `γ`, ties to the lower index.
pub fn support_from_gamma(gamma: &[f64], list_size: usize) -> Vec<u64> {
    let ids: Vec<u64> = (0..gamma.len() as u64).collect();
    top_k_support(gamma, &ids, list_size)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MimoDecodeOptions {
    pub activity: ActivityOptions,
    pub decode: DecodeOptions,
}

/// Decodes `L` coherence blocks.
///
/// The per-slot reports carry `|S_ℓ|` as `active_columns` and the detector's
/// wall time as `elapsed`.
pub fn decode_mimo(
    observations: &[CMatrix],
    dictionaries: &[CMatrix],
    codebook: &TreeCodebook,
    noise_power: f64,
    list_size: usize,
    mode: DecodeMode,
    options: MimoDecodeOptions,
) -> Result<ConcatenatedOutcome> {
    let profile = codebook.profile();
    let sections = profile.sections();
    if observations.len() != sections || dictionaries.len() != sections {
        return Err(Error::invalid(format!(
            "{} blocks and {} dictionaries for {sections} slots",
            observations.len(),
            dictionaries.len()
        )));
    }
    if list_size == 0 {
        return Err(Error::invalid("list size must be at least 1"));
    }
    for (slot, a) in dictionaries.iter().enumerate() {
        if a.ncols() as u64 != 1u64 << profile.fragment_bits(slot) || a.nrows() != observations[slot].nrows() {
            return Err(Error::invalid(format!("dictionary of block {slot} has the wrong shape")));
        }
    }
    let mut inner = |slot: usize, filter: &ColumnFilter| -> Result<Vec<u64>> {
        let support = filter.columns(profile, slot);
        if support.is_empty() {
            return Err(Error::DecodeAbort { slot });
        }
        let cov = sample_covariance(&observations[slot])?;
        let result = activity_detect(&cov, &dictionaries[slot], &support, noise_power, options.activity)?;
        let restricted: Vec<f64> = support.iter().map(|&k| result.gamma[k as usize]).collect();
        Ok(top_k_support(&restricted, &support, list_size))
    };
    decode_concatenated(codebook, mode, &mut inner, options.decode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{mimo_block_transmit, mimo_sensing_matrix, MimoChannelConfig};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn covariance_of_zero_and_single_sample() {
        let zero = CMatrix::zeros(3, 5);
        assert_eq!(sample_covariance(&zero).unwrap(), CMatrix::zeros(3, 3));
        let u = CMatrix::from_column_slice(2, 1, &[Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25)]);
        let cov = sample_covariance(&u).unwrap();
        assert!((cov - &u * u.adjoint()).norm() < 1e-15);
    }

    #[test]
    fn covariance_is_hermitian() {
        let a = mimo_sensing_matrix(5, 3, 1.0, 1, 1 << 20).unwrap();
        let y = mimo_block_transmit(&[1, 4], &a, &MimoChannelConfig { antennas: 7, noise_power: 0.5, fading_seed: 2, noise_seed: 3 }).unwrap();
        let cov = sample_covariance(&y).unwrap();
        assert!((&cov - cov.adjoint()).norm() <= 1e-12);
    }

    #[test]
    fn scalar_step_by_hand() {
        let mut state = CovarianceState::new(1, 1, 1.0);
        let a = DVector::from_element(1, c(1.0));
        let cov = CMatrix::from_element(1, 1, c(3.0));
        let step = state.coordinate_step(0, &a, &cov, 1e-12);
        assert!((step.d_star - 2.0).abs() < 1e-15);
        assert!((state.gamma[0] - 2.0).abs() < 1e-15);
        assert!((state.sigma_inv[(0, 0)].re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn negative_step_clamps_at_zero() {
        let mut state = CovarianceState::new(1, 1, 1.0);
        state.gamma[0] = 0.5;
        state.sigma_inv = CMatrix::from_element(1, 1, c(1.0 / 1.5));
        let a = DVector::from_element(1, c(1.0));
        // Σ̂ far below N0 pushes d* under -γ
        let cov = CMatrix::from_element(1, 1, c(0.1));
        let step = state.coordinate_step(0, &a, &cov, 1e-12);
        assert!(step.d_star < -0.5);
        assert_eq!(state.gamma[0], 0.0);
        assert!((state.sigma_inv[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_top_k() {
        assert_eq!(support_from_gamma(&[0.0, 0.0, 2.0, 0.0, 0.0, 0.0], 1), vec![2]);
        assert_eq!(support_from_gamma(&[1.0; 6], 3), vec![0, 1, 2]);
        let mut got = support_from_gamma(&[0.2, 1.5, 0.0, 0.7, 1.5, 0.1], 3);
        got.sort();
        assert_eq!(got, vec![1, 3, 4]);
    }
}
