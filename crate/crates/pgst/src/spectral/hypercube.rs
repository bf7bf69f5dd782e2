//! Exact spectral data for the reweighted hypercube family.
//!
//! With weight `sqrt(m)` in direction 0 and `sqrt(2)` elsewhere, the
//! characters of the bit-string group diagonalize `H`, and the character
//! indexed by `g` has integer eigenvalue
//! `2d - 4 wt(g) + (-1)^{g_0} (m - 2)` over `q = 2d - 2 + m`. Everything
//! downstream of this module is exact integer arithmetic: eigenvalues,
//! multiplicities, and projection entries (Krawtchouk sums over `2^d`).

use nalgebra::DMatrix;

use crate::bitgroup::{GroupElement, MAX_DIMENSION};
use crate::certify::numtheory::binomial;
use crate::graph::MAX_DENSE_N;
use crate::spectral::{Decomposition, EigenClass};
use crate::{Error, Result};

/// One character orbit `{g : g_0 = eps, wt(g) = k}` inside an eigenvalue
/// class; `mult = C(d-1, k - eps)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassMember {
    pub g0: u8,
    pub k: u8,
    pub mult: u64,
}

/// An exact eigenvalue class: integer numerator `lambda_int` over the
/// common denominator `q`, with its character orbits. Orbits with
/// coinciding eigenvalues are merged (this happens only for even `m`).
#[derive(Clone, Debug)]
pub struct HypercubeClass {
    pub lambda_int: i64,
    pub members: Vec<ClassMember>,
    pub multiplicity: u64,
}

/// The full exact spectrum of `(Q_d, W_m)`, classes sorted by descending
/// eigenvalue.
#[derive(Clone, Debug)]
pub struct HypercubeSpectrum {
    pub d: u8,
    pub m: u32,
    pub q: u64,
    pub classes: Vec<HypercubeClass>,
}

/// Build the exact spectrum for dimension `d` and coin weight `m`.
pub fn hypercube_spectrum(d: u8, m: u32) -> Result<HypercubeSpectrum> {
    if d == 0 || d > MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange {
            got: d as u32,
            min: 1,
            max: MAX_DIMENSION as u32,
        });
    }
    if m == 0 {
        return Err(Error::InvalidCoinWeight);
    }
    let q = m as u64 + 2 * (d as u64 - 1);
    let mut by_lambda: std::collections::BTreeMap<i64, Vec<ClassMember>> =
        std::collections::BTreeMap::new();
    for g0 in 0u8..=1 {
        for k in g0..=(d - 1 + g0) {
            let sign = if g0 == 0 { 1i64 } else { -1 };
            let lambda = 2 * d as i64 - 4 * k as i64 + sign * (m as i64 - 2);
            let mult = binomial(d as u64 - 1, (k - g0) as u64) as u64;
            by_lambda
                .entry(lambda)
                .or_default()
                .push(ClassMember { g0, k, mult });
        }
    }
    let classes = by_lambda
        .into_iter()
        .rev()
        .map(|(lambda_int, members)| {
            let multiplicity = members.iter().map(|m| m.mult).sum();
            HypercubeClass {
                lambda_int,
                members,
                multiplicity,
            }
        })
        .collect();
    Ok(HypercubeSpectrum { d, m, q, classes })
}

/// Krawtchouk value `K_j(w; n) = sum_i (-1)^i C(w, i) C(n - w, j - i)`:
/// the character sum over all weight-`j` masks against a fixed weight-`w`
/// mask in `n` coordinates.
fn krawtchouk(j: u64, w: u64, n: u64) -> i128 {
    let mut acc: i128 = 0;
    for i in 0..=j.min(w) {
        if j - i > n - w {
            continue;
        }
        let term = binomial(w, i) as i128 * binomial(n - w, j - i) as i128;
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

impl HypercubeSpectrum {
    pub fn n(&self) -> usize {
        1usize << self.d
    }

    pub fn lambda_hat(&self, idx: usize) -> f64 {
        self.classes[idx].lambda_int as f64 / self.q as f64
    }

    pub fn theta(&self, idx: usize) -> f64 {
        self.lambda_hat(idx).clamp(-1.0, 1.0).acos()
    }

    /// Exact projection entry `(E_lambda)_{b,a}` as a fraction
    /// `num / 2^d`, via Krawtchouk sums in the displacement `z = a XOR b`.
    pub fn projection_entry(&self, idx: usize, a: u32, b: u32) -> Result<(i128, u64)> {
        let n = self.n() as u32;
        if a >= n || b >= n {
            return Err(Error::VertexOutOfRange {
                vertex: a.max(b) as usize,
                n: n as usize,
            });
        }
        let z = a ^ b;
        let z0 = z & 1;
        let w_rest = (z >> 1).count_ones() as u64;
        let rest = self.d as u64 - 1;
        let mut num: i128 = 0;
        for member in &self.classes[idx].members {
            let j = (member.k - member.g0) as u64;
            let k_val = krawtchouk(j, w_rest, rest);
            let sign = if (member.g0 as u32 & z0) == 1 { -1 } else { 1 };
            num += sign as i128 * k_val;
        }
        Ok((num, 1u64 << self.d))
    }

    /// `(E_lambda)_{b,a}` for the antipodal pair: `(-1)^k` times the class
    /// multiplicity, over `2^d`.
    pub fn antipodal_projection_entry(&self, idx: usize) -> (i128, u64) {
        let ones = (1u32 << self.d) - 1;
        self.projection_entry(idx, 0, ones)
            .expect("antipodal vertices in range")
    }

    /// Sign `mu` with `psi_g(z)` constant equal to `mu` across the class,
    /// or `None` when the class mixes both signs. For the antipodal
    /// displacement this is `(-1)^k`.
    pub fn sign_for_displacement(&self, idx: usize, z: u32) -> Option<i8> {
        let z0 = (z & 1) as u8;
        let w_rest = (z >> 1).count_ones() as u64;
        let rest = self.d as u64 - 1;
        let mut sign: Option<i8> = None;
        for member in &self.classes[idx].members {
            let j = (member.k - member.g0) as u64;
            // intersection sizes |g' AND z'| over weight-j masks g' span a
            // consecutive range; the parity is constant only when the
            // range is a single point
            let lo = j.saturating_sub(rest - w_rest);
            let hi = j.min(w_rest);
            if lo != hi {
                return None;
            }
            let parity = (lo + (member.g0 & z0) as u64) % 2;
            let s = if parity == 0 { 1i8 } else { -1 };
            match sign {
                None => sign = Some(s),
                Some(prev) if prev != s => return None,
                Some(_) => {}
            }
        }
        sign
    }

    /// Materialize dense projections from the characters (independent of
    /// any numeric eigensolver). Capped by matrix size.
    pub fn to_decomposition(&self) -> Result<Decomposition> {
        let n = self.n();
        if n > MAX_DENSE_N.min(1 << 10) {
            return Err(Error::MatrixTooLarge {
                n,
                cap: MAX_DENSE_N.min(1 << 10),
            });
        }
        let d = self.d;
        let scale = 1.0 / n as f64;
        let classes = self
            .classes
            .iter()
            .enumerate()
            .map(|(idx, class)| {
                let mut projection = DMatrix::zeros(n, n);
                for g in GroupElement::enumerate(d).expect("dimension checked") {
                    let in_class = class.members.iter().any(|m| {
                        g.bit(0) == (m.g0 == 1) && g.hamming_weight() == m.k as u32
                    });
                    if !in_class {
                        continue;
                    }
                    for x in 0..n {
                        let gx = GroupElement::new(x as u32, d).unwrap();
                        let cx = g.character(&gx).unwrap() as f64;
                        for y in 0..=x {
                            let gy = GroupElement::new(y as u32, d).unwrap();
                            let cy = g.character(&gy).unwrap() as f64;
                            projection[(x, y)] += cx * cy * scale;
                        }
                    }
                }
                for x in 0..n {
                    for y in x + 1..n {
                        projection[(x, y)] = projection[(y, x)];
                    }
                }
                EigenClass {
                    lambda: self.lambda_hat(idx),
                    lambda_int: Some(class.lambda_int),
                    multiplicity: class.multiplicity as usize,
                    projection,
                }
            })
            .collect();
        Ok(Decomposition {
            n,
            classes,
            q: Some(self.q),
        })
    }
}
