//! The spectral fidelity cosine sum and long-horizon scans.
//!
//! `f(t) = sum_lambda cos(t arccos lambda) (E_lambda)_{ba}` equals the
//! walk inner product `<U^t x_a, x_b>` for real weights, so scanning it
//! costs `O(#classes)` per time step instead of a state evolution.

use crate::spectral::hypercube::HypercubeSpectrum;
use crate::spectral::Decomposition;
use crate::{Error, Result};

/// Times whose fidelity magnitudes differ by at most this are reported
/// as ties (earliest wins).
pub const TIE_TOL: f64 = 1e-9;

/// Steps per scan chunk. Chunk boundaries reseed the cosine recurrences
/// from direct evaluations, capping drift, and fix the work units that
/// make parallel scans byte-identical for any worker count.
const CHUNK: u64 = 1 << 15;

/// The per-class data needed to evaluate `f(t)`: angle and projection
/// entry `(E_lambda)_{ba}`.
#[derive(Clone, Debug)]
pub struct CosineProfile {
    thetas: Vec<f64>,
    coeffs: Vec<f64>,
}

impl CosineProfile {
    /// Profile for a vertex pair from a numeric decomposition.
    pub fn from_decomposition(dec: &Decomposition, a: usize, b: usize) -> Result<Self> {
        if a >= dec.n || b >= dec.n {
            return Err(Error::VertexOutOfRange {
                vertex: a.max(b),
                n: dec.n,
            });
        }
        Ok(CosineProfile {
            thetas: dec
                .classes
                .iter()
                .map(|c| c.lambda.clamp(-1.0, 1.0).acos())
                .collect(),
            coeffs: dec
                .classes
                .iter()
                .map(|c| c.projection[(b, a)])
                .collect(),
        })
    }

    /// Profile for a vertex pair from the exact hypercube spectrum.
    pub fn from_hypercube(spec: &HypercubeSpectrum, a: u32, b: u32) -> Result<Self> {
        let mut thetas = Vec::with_capacity(spec.classes.len());
        let mut coeffs = Vec::with_capacity(spec.classes.len());
        for idx in 0..spec.classes.len() {
            let (num, den) = spec.projection_entry(idx, a, b)?;
            thetas.push(spec.theta(idx));
            coeffs.push(num as f64 / den as f64);
        }
        Ok(CosineProfile { thetas, coeffs })
    }

    /// Evaluate `f(t)` by direct cosine calls. `f(-t) = f(t)`.
    pub fn eval(&self, t: u64) -> f64 {
        let tf = t as f64;
        self.thetas
            .iter()
            .zip(&self.coeffs)
            .map(|(&theta, &c)| c * (tf * theta).cos())
            .sum()
    }

    pub fn class_count(&self) -> usize {
        self.thetas.len()
    }
}

/// A strict running-maximum improvement during a scan.
#[derive(Clone, Copy, Debug)]
pub struct Checkpoint {
    pub t: u64,
    pub f: f64,
}

/// Scan outcome: the best magnitude, the earliest time attaining it
/// within [`TIE_TOL`], and the running-maximum checkpoint trail.
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub t_best: u64,
    pub f_best: f64,
    pub prob_best: f64,
    pub checkpoints: Vec<Checkpoint>,
}

/// Maximize `|f(t)|` over integer `t` in `[0, horizon]`.
///
/// Each chunk advances all classes with the Chebyshev recurrence
/// `cos((t+1)theta) = 2 cos(theta) cos(t theta) - cos((t-1)theta)` and
/// records its local strict improvements; chunks are merged in order, so
/// the result does not depend on `workers`.
pub fn scan_fidelity(profile: &CosineProfile, horizon: u64, workers: usize) -> ScanResult {
    let chunk_count = horizon / CHUNK + 1;
    let workers = workers.max(1).min(chunk_count as usize);

    let mut chunk_records: Vec<Vec<Checkpoint>> = Vec::new();
    if workers <= 1 {
        for chunk_idx in 0..chunk_count {
            chunk_records.push(scan_chunk(profile, chunk_idx, horizon));
        }
    } else {
        let results: Vec<(u64, Vec<Checkpoint>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let profile = &profile;
                    scope.spawn(move || {
                        let mut local = Vec::new();
                        let mut chunk_idx = w as u64;
                        while chunk_idx < chunk_count {
                            local.push((chunk_idx, scan_chunk(profile, chunk_idx, horizon)));
                            chunk_idx += workers as u64;
                        }
                        local
                    })
                })
                .collect();
            let mut all = Vec::new();
            for handle in handles {
                all.extend(handle.join().expect("scan worker panicked"));
            }
            all
        });
        let mut sorted = results;
        sorted.sort_by_key(|&(idx, _)| idx);
        chunk_records = sorted.into_iter().map(|(_, recs)| recs).collect();
    }

    // merge: a global improvement is necessarily a chunk-local one
    let mut checkpoints: Vec<Checkpoint> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for records in chunk_records {
        for rec in records {
            if rec.f.abs() > best {
                best = rec.f.abs();
                checkpoints.push(rec);
            }
        }
    }
    let f_best = checkpoints
        .last()
        .map(|c| c.f.abs())
        .unwrap_or(0.0);
    let t_best = checkpoints
        .iter()
        .find(|c| c.f.abs() >= f_best - TIE_TOL)
        .map(|c| c.t)
        .unwrap_or(0);
    ScanResult {
        t_best,
        f_best,
        prob_best: f_best * f_best,
        checkpoints,
    }
}

fn scan_chunk(profile: &CosineProfile, chunk_idx: u64, horizon: u64) -> Vec<Checkpoint> {
    let start = chunk_idx * CHUNK;
    let end = (start + CHUNK - 1).min(horizon);
    let k = profile.thetas.len();
    // seed cos((start-1) theta), cos(start theta) directly
    let mut prev: Vec<f64> = (0..k)
        .map(|i| ((start as f64 - 1.0) * profile.thetas[i]).cos())
        .collect();
    let mut cur: Vec<f64> = (0..k)
        .map(|i| (start as f64 * profile.thetas[i]).cos())
        .collect();
    let two_cos: Vec<f64> = profile.thetas.iter().map(|&th| 2.0 * th.cos()).collect();

    let mut records = Vec::new();
    let mut local_best = f64::NEG_INFINITY;
    let mut t = start;
    loop {
        let f: f64 = cur
            .iter()
            .zip(&profile.coeffs)
            .map(|(&c, &coeff)| c * coeff)
            .sum();
        assert!(
            f.abs() <= 1.0 + 1e-6,
            "fidelity magnitude {f} exceeds 1 at t = {t}; projections are broken"
        );
        if f.abs() > local_best {
            local_best = f.abs();
            records.push(Checkpoint { t, f });
        }
        if t == end {
            break;
        }
        for i in 0..k {
            let next = two_cos[i] * cur[i] - prev[i];
            prev[i] = cur[i];
            cur[i] = next;
        }
        t += 1;
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_hypercube, build_weighted_hypercube, hermitian_adjacency, WeightedGraph};
    use crate::spectral::hypercube::hypercube_spectrum;
    use crate::spectral::eig_sym;
    use crate::walk::transition;

    fn antipodal_profile(d: u8, m: u32) -> CosineProfile {
        let spec = hypercube_spectrum(d, m).unwrap();
        CosineProfile::from_hypercube(&spec, 0, (1 << d) - 1).unwrap()
    }

    #[test]
    fn fidelity_vanishes_at_zero_for_distinct_vertices() {
        let g = build_hypercube(3).unwrap();
        let dec = eig_sym(&hermitian_adjacency(&g).unwrap()).unwrap();
        for b in 1..8 {
            let p = CosineProfile::from_decomposition(&dec, 0, b).unwrap();
            assert!(p.eval(0).abs() < 1e-12);
        }
    }

    #[test]
    fn q4_grover_fidelity_values() {
        let p = antipodal_profile(4, 2);
        // cosine oracle: f(6) = (1/16)(1 - 4 - 6 - 4 + 1) = -3/4
        assert!((p.eval(6) + 0.75).abs() < 1e-12);
        assert!(p.eval(3).abs() < 1e-12);
        // the same peak recurs at t = 4 and with period 12
        assert!((p.eval(4) - 0.75).abs() < 1e-12);
        for t in [6u64, 18, 30] {
            assert!((p.eval(t).powi(2) - 0.5625).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_matches_simulation() {
        for (d, m) in [(2u8, 1u32), (3, 2), (3, 3), (4, 1)] {
            let g = if m == 2 {
                build_hypercube(d).unwrap()
            } else {
                build_weighted_hypercube(d, m).unwrap()
            };
            let t_op = transition(&g);
            let p = antipodal_profile(d, m);
            let b = g.n() - 1;
            for t in 0..=60u64 {
                let sim = t_op.fidelity_simulated(0, b, t).unwrap();
                assert!(
                    (sim.re - p.eval(t)).abs() < 1e-9,
                    "d={d} m={m} t={t}: sim {} vs spectral {}",
                    sim.re,
                    p.eval(t)
                );
                assert!(sim.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn k2_scan_finds_perfect_swap() {
        let k2 = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let dec = eig_sym(&hermitian_adjacency(&k2).unwrap()).unwrap();
        let p = CosineProfile::from_decomposition(&dec, 0, 1).unwrap();
        let scan = scan_fidelity(&p, 10, 1);
        assert_eq!(scan.t_best, 1);
        assert!((scan.f_best - 1.0).abs() < 1e-12);
        assert!((scan.prob_best - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q4_grover_scan_peaks_at_four() {
        // first attainment of the 9/16 peak is t = 4 (then 6, 8, ...)
        let p = antipodal_profile(4, 2);
        let scan = scan_fidelity(&p, 1000, 1);
        assert!((scan.prob_best - 0.5625).abs() < 1e-9);
        assert_eq!(scan.t_best, 4);
    }

    #[test]
    fn checkpoints_are_strictly_increasing() {
        let p = antipodal_profile(4, 1);
        let scan = scan_fidelity(&p, 100_000, 1);
        for pair in scan.checkpoints.windows(2) {
            assert!(pair[1].f.abs() > pair[0].f.abs());
            assert!(pair[1].t > pair[0].t);
        }
        assert!(scan.f_best <= 1.0 + 1e-9);
    }

    #[test]
    fn scan_is_worker_count_invariant() {
        let p = antipodal_profile(5, 1);
        let one = scan_fidelity(&p, 200_000, 1);
        let four = scan_fidelity(&p, 200_000, 4);
        assert_eq!(one.t_best, four.t_best);
        assert_eq!(one.f_best.to_bits(), four.f_best.to_bits());
        assert_eq!(one.checkpoints.len(), four.checkpoints.len());
        for (a, b) in one.checkpoints.iter().zip(&four.checkpoints) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.f.to_bits(), b.f.to_bits());
        }
    }

    #[test]
    fn recurrence_agrees_with_direct_evaluation() {
        let p = antipodal_profile(6, 3);
        let scan = scan_fidelity(&p, 50_000, 2);
        for c in scan.checkpoints.iter().take(20) {
            assert!((c.f - p.eval(c.t)).abs() < 1e-10);
        }
    }
}
