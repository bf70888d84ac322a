//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::HashSet;

use ccs_ura::ccs_siso::SensingMatrix;
use ccs_ura::tree_code::{Message, ParityProfile, TreeCodebook};
use rand::Rng;

pub fn objective(a: &SensingMatrix, x: &[f64], y: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    0.5 * ax.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>()
}

fn gradient(a: &SensingMatrix, x: &[f64], y: &[f64]) -> Vec<f64> {
    let r: Vec<f64> = a.mul_vec(x).iter().zip(y).map(|(p, q)| p - q).collect();
    a.mul_transpose(&r)
}

/// Largest eigenvalue of `AᵀA` by power iteration, padded slightly upward.
fn lipschitz(a: &SensingMatrix) -> f64 {
    let mut v = vec![1.0; a.cols()];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = a.mul_transpose(&a.mul_vec(&v));
        let n = w.iter().map(|t| t * t).sum::<f64>().sqrt();
        if n == 0.0 {
            return 1.0;
        }
        lambda = n;
        v = w.iter().map(|t| t / n).collect();
    }
    lambda * 1.01
}

/// Accelerated projected gradient with gradient-based restart, stopped on the
/// projected-gradient norm.
pub fn projected_gradient(a: &SensingMatrix, y: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
    let step = 1.0 / lipschitz(a);
    let cols = a.cols();
    let mut x = vec![0.0; cols];
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..max_iter {
        let g = gradient(a, &z, y);
        let next: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| (zi - step * gi).max(0.0)).collect();
        let gx = gradient(a, &next, y);
        let pg = next
            .iter()
            .zip(&gx)
            .map(|(&xi, &gi)| if xi > 0.0 { gi.abs() } else { (-gi).max(0.0) })
            .fold(0.0f64, f64::max);
        // restart when momentum points uphill
        let uphill: f64 = g.iter().zip(next.iter().zip(&x)).map(|(gi, (n, o))| gi * (n - o)).sum();
        let t_next = if uphill > 0.0 { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
        let beta = if uphill > 0.0 { 0.0 } else { (t - 1.0) / t_next };
        z = next.iter().zip(&x).map(|(n, o)| (n + beta * (n - o)).max(0.0)).collect();
        x = next;
        t = t_next;
        if pg <= tol {
            break;
        }
    }
    x
}

/// `K` messages whose information sections are pairwise distinct in every slot.
pub fn distinct_messages<R: Rng>(profile: &ParityProfile, users: usize, rng: &mut R) -> Vec<Message> {
    let mut used: Vec<HashSet<u64>> = vec![HashSet::new(); profile.sections()];
    let mut out = Vec::with_capacity(users);
    while out.len() < users {
        let m = Message::random(profile, rng);
        if m.sections().iter().zip(&used).all(|(w, set)| !set.contains(w)) {
            for (w, set) in m.sections().iter().zip(used.iter_mut()) {
                set.insert(*w);
            }
            out.push(m);
        }
    }
    out
}

/// Wrong paths from the root of user 0 after each stage, by explicit enumeration
/// over the true fragments (no path cap).
pub fn erroneous_paths_from_first_root(codebook: &TreeCodebook, encoded: &[Vec<u64>]) -> Vec<usize> {
    let profile = codebook.profile();
    let sections = profile.sections();
    let mut prefixes: Vec<Vec<u64>> = vec![vec![profile.info_of(0, encoded[0][0])]];
    let mut counts = vec![0];
    for slot in 1..sections {
        let mut next = Vec::new();
        for prefix in &prefixes {
            let parity = codebook.compute_parity(prefix, slot).unwrap();
            for user in encoded {
                if profile.parity_of(slot, user[slot]) == parity {
                    let mut p = prefix.clone();
                    p.push(profile.info_of(slot, user[slot]));
                    next.push(p);
                }
            }
        }
        prefixes = next;
        counts.push(prefixes.len() - 1);
    }
    counts
}

#[derive(Debug, Clone, Copy)]
pub struct Paired {
    pub mean_a: f64,
    pub mean_b: f64,
    /// Mean of `a - b` over its standard error; zero when `a ≡ b`.
    pub t: f64,
}

pub fn paired(a: &[f64], b: &[f64]) -> Paired {
    let n = a.len() as f64;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    Paired {
        mean_a: a.iter().sum::<f64>() / n,
        mean_b: b.iter().sum::<f64>() / n,
        t: if se > 0.0 { mean / se } else if mean == 0.0 { 0.0 } else { mean.signum() * f64::INFINITY },
    }
}

/// One-sided 5% critical value of the standard normal.
pub const Z_95: f64 = 1.6448536269514722;
