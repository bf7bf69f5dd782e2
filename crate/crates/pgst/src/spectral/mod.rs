//! Spectral decompositions of the Hermitian adjacency matrix and the
//! correspondence with the walk spectrum.
//!
//! Two routes are provided deliberately: a numeric route (dense symmetric
//! eigendecomposition with eigenvalue grouping) that works for any graph,
//! and an exact analytic route for the hypercube family in
//! [`hypercube`]. The test suites hold them against each other.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::graph::HermitianAdjacency;
use crate::{Error, Result};

pub mod fidelity;
pub mod hypercube;
pub mod verify;

pub use fidelity::{scan_fidelity, CosineProfile, ScanResult};
pub use hypercube::{hypercube_spectrum, HypercubeSpectrum};

/// Relative eigenvalue grouping tolerance. Distinct exact eigenvalues of
/// `H_int / q` differ by at least `1/q`, far above this.
pub const GROUPING_TOL: f64 = 1e-8;

/// One eigenvalue class: the eigenvalue, its multiplicity, and the
/// orthogonal projection onto its eigenspace.
#[derive(Clone, Debug)]
pub struct EigenClass {
    pub lambda: f64,
    /// Candidate integer numerator over the decomposition's `q`, when an
    /// exact form was attached. Certification re-verifies before use.
    pub lambda_int: Option<i64>,
    pub multiplicity: usize,
    pub projection: DMatrix<f64>,
}

/// A grouped spectral decomposition `H = sum_lambda lambda E_lambda`,
/// classes sorted by descending eigenvalue.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub n: usize,
    pub classes: Vec<EigenClass>,
    /// Scale of the exact integer form, when present.
    pub q: Option<u64>,
}

impl Decomposition {
    /// Column `a` of `E_lambda` for class `idx`.
    pub fn project_vertex(&self, idx: usize, a: usize) -> nalgebra::DVector<f64> {
        self.classes[idx].projection.column(a).into_owned()
    }
}

/// Numerically diagonalize a real symmetric `H` and group near-equal
/// eigenvalues into classes with explicit projections.
pub fn eig_sym(h: &HermitianAdjacency) -> Result<Decomposition> {
    let n = h.n;
    let asym = (&h.matrix - h.matrix.transpose())
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if asym > 1e-12 {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::new(h.matrix.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("finite eigenvalues")
    });

    let scale = order
        .iter()
        .map(|&i| eig.eigenvalues[i].abs())
        .fold(0.0f64, f64::max);
    let tol = GROUPING_TOL * scale.max(1.0);

    let mut classes = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]] < tol
        {
            end += 1;
        }
        let members = &order[start..end];
        let lambda = members.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>()
            / members.len() as f64;
        let mut projection = DMatrix::zeros(n, n);
        for &i in members {
            let v = eig.eigenvectors.column(i);
            projection.ger(1.0, &v, &v, 1.0);
        }
        let lambda_int = h.exact.as_ref().and_then(|exact| {
            let scaled = lambda * exact.q as f64;
            let rounded = scaled.round();
            ((scaled - rounded).abs() < 1e-6).then_some(rounded as i64)
        });
        classes.push(EigenClass {
            lambda,
            lambda_int,
            multiplicity: members.len(),
            projection,
        });
        start = end;
    }
    Ok(Decomposition {
        n,
        classes,
        q: h.exact.as_ref().map(|e| e.q),
    })
}

/// How an `H` eigenvalue lifts into the walk spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UEigenKind {
    /// `lambda = 1` lifts to the fixed eigenvalue 1.
    One,
    /// `lambda = -1` lifts to the eigenvalue -1.
    MinusOne,
    /// Interior `lambda` lifts to the conjugate pair `e^{+-i theta}`.
    ConjugatePair,
}

/// A walk eigenvalue record tied back to its source class.
#[derive(Clone, Copy, Debug)]
pub struct UEigenRecord {
    pub theta: f64,
    pub lambda: f64,
    pub class_index: usize,
    pub kind: UEigenKind,
}

/// Map `H` eigenvalues to walk eigenvalues: `1 -> 1`, `-1 -> -1`, and
/// interior `lambda -> e^{+-i arccos(lambda)}`.
pub fn u_spectrum_from_h(dec: &Decomposition) -> Result<Vec<UEigenRecord>> {
    let mut records = Vec::with_capacity(dec.classes.len());
    for (idx, class) in dec.classes.iter().enumerate() {
        let lambda = class.lambda;
        if lambda.abs() > 1.0 + 1e-10 {
            return Err(Error::EigenvalueOutOfRange(lambda));
        }
        let clamped = lambda.clamp(-1.0, 1.0);
        let theta = clamped.acos();
        let kind = if clamped >= 1.0 - f64::EPSILON * 4.0 {
            UEigenKind::One
        } else if clamped <= -1.0 + f64::EPSILON * 4.0 {
            UEigenKind::MinusOne
        } else {
            UEigenKind::ConjugatePair
        };
        records.push(UEigenRecord {
            theta,
            lambda: clamped,
            class_index: idx,
            kind,
        });
    }
    Ok(records)
}
