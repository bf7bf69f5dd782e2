//! Numeric verification oracles: the walk-spectrum eigenprojection
//! relations, operator structure identities, and simulation-vs-spectral
//! agreement.
//!
//! These densely diagonalize in arc space, so they are capped and meant
//! as test oracles, not production paths. The route is deliberately
//! independent of the vertex-space decomposition: the walk operator `U`
//! is real orthogonal, so its symmetric part `(U + U^T)/2` is
//! diagonalizable with eigenvalues `cos theta`, and on each interior
//! invariant subspace `V` the complex eigenprojection is
//! `F_theta = P_V / 2 - i (U - cos theta) P_V / (2 sin theta)`.

use nalgebra::DMatrix;

use crate::graph::{hermitian_adjacency, HermitianAdjacency, WeightedGraph};
use crate::spectral::{eig_sym, Decomposition};
use crate::walk::{coin, shift, tail_incidence, transition};
use crate::{Error, Result};

/// Dense arc-space diagonalization cap.
pub const MAX_VERIFY_ARCS: usize = 4096;

/// Which eigenprojection relation a residual row refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationKind {
    /// `N F_0 N^* = E_1` (or zero when 1 is not an `H` eigenvalue).
    ThetaZero,
    /// `N F_pi N^* = E_{-1}` (or zero).
    ThetaPi,
    /// `N F_theta N^* = E_lambda / 2` for interior angles.
    Interior,
    /// An `H` class with no matching walk angle; always a failure.
    MissingTheta,
}

#[derive(Clone, Copy, Debug)]
pub struct RelationResidual {
    pub kind: RelationKind,
    pub theta: f64,
    pub lambda: Option<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub entries: Vec<RelationResidual>,
    pub max_residual: f64,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Diagonalize the walk operator and report the entrywise residuals of
/// the compressed eigenprojection relations against the `H` classes.
pub fn verify_eigenprojection_relations(w: &WeightedGraph) -> Result<RelationReport> {
    let arcs = 2 * w.edge_count();
    if arcs > MAX_VERIFY_ARCS {
        return Err(Error::ArcSpaceTooLarge {
            arcs,
            cap: MAX_VERIFY_ARCS,
        });
    }
    let h = hermitian_adjacency(w)?;
    let dec = eig_sym(&h)?;

    let op = transition(w);
    let u = op.to_dense_real()?;
    let nt = tail_incidence(w).to_dense_real()?;
    let symmetric_part = (&u + u.transpose()) * 0.5;
    let arc_dec = eig_sym(&HermitianAdjacency {
        n: arcs,
        matrix: symmetric_part,
        exact: None,
    })?;

    const BOUNDARY: f64 = 1e-7;
    const MATCH: f64 = 1e-7;

    let mut entries = Vec::new();
    let mut matched = vec![false; dec.classes.len()];
    for arc_class in &arc_dec.classes {
        let c = arc_class.lambda.clamp(-1.0, 1.0);
        let p = &arc_class.projection;
        let compressed = &nt * p * nt.transpose();
        let target = dec
            .classes
            .iter()
            .position(|cl| (cl.lambda - c).abs() < MATCH);
        if let Some(idx) = target {
            matched[idx] = true;
        }
        if c >= 1.0 - BOUNDARY || c <= -1.0 + BOUNDARY {
            let zero = DMatrix::zeros(dec.n, dec.n);
            let e = target
                .map(|idx| &dec.classes[idx].projection)
                .unwrap_or(&zero);
            entries.push(RelationResidual {
                kind: if c > 0.0 {
                    RelationKind::ThetaZero
                } else {
                    RelationKind::ThetaPi
                },
                theta: if c > 0.0 { 0.0 } else { std::f64::consts::PI },
                lambda: target.map(|idx| dec.classes[idx].lambda),
                residual: max_abs(&(compressed - e)),
            });
        } else {
            let theta = c.acos();
            let sin_theta = (1.0 - c * c).sqrt();
            // real part of N F N^*: compressed / 2; imaginary part:
            // -N (U - cI) P N^T / (2 sin theta)
            let skew = &nt * ((&u - DMatrix::identity(arcs, arcs) * c) * p) * nt.transpose();
            let zero = DMatrix::zeros(dec.n, dec.n);
            let e = target
                .map(|idx| &dec.classes[idx].projection)
                .unwrap_or(&zero);
            let real_resid = (compressed - e * 1.0) * 0.5;
            let imag = skew * (1.0 / (2.0 * sin_theta));
            let mut residual = 0.0f64;
            for i in 0..dec.n {
                for j in 0..dec.n {
                    residual = residual.max(real_resid[(i, j)].hypot(imag[(i, j)]));
                }
            }
            entries.push(RelationResidual {
                kind: RelationKind::Interior,
                theta,
                lambda: target.map(|idx| dec.classes[idx].lambda),
                residual,
            });
        }
    }
    for (idx, was_matched) in matched.iter().enumerate() {
        if !was_matched {
            let class = &dec.classes[idx];
            entries.push(RelationResidual {
                kind: RelationKind::MissingTheta,
                theta: class.lambda.clamp(-1.0, 1.0).acos(),
                lambda: Some(class.lambda),
                residual: max_abs(&class.projection),
            });
        }
    }
    let max_residual = entries.iter().fold(0.0f64, |m, e| m.max(e.residual));
    Ok(RelationReport {
        entries,
        max_residual,
    })
}

/// Max-norm residuals of the defining operator identities.
#[derive(Clone, Copy, Debug)]
pub struct StructureReport {
    /// `max |U* U - I|`
    pub unitarity: f64,
    /// shift is an exact involution on arc indices
    pub shift_involution_ok: bool,
    /// `max |C^2 - I|`
    pub coin_involution: f64,
    /// `max |N_t N_t^* - I|`
    pub incidence_gram: f64,
    /// `max |N_t R N_t^* - H|`
    pub compression: f64,
}

impl StructureReport {
    pub fn max_residual(&self) -> f64 {
        let shift = if self.shift_involution_ok { 0.0 } else { 1.0 };
        self.unitarity
            .max(shift)
            .max(self.coin_involution)
            .max(self.incidence_gram)
            .max(self.compression)
    }
}

/// Check the operator structure identities densely (real weights).
pub fn structure_residuals(w: &WeightedGraph) -> Result<StructureReport> {
    let arcs = 2 * w.edge_count();
    if arcs > MAX_VERIFY_ARCS {
        return Err(Error::ArcSpaceTooLarge {
            arcs,
            cap: MAX_VERIFY_ARCS,
        });
    }
    let h = hermitian_adjacency(w)?;
    let op = transition(w);
    let u = op.to_dense_real()?;
    let identity = DMatrix::<f64>::identity(arcs, arcs);
    let unitarity = max_abs(&(u.transpose() * &u - &identity));

    let nt_struct = tail_incidence(w);
    let indexing = nt_struct.indexing();
    let r_op = shift(indexing);
    let shift_involution_ok = (0..arcs)
        .all(|i| r_op.permutation()[r_op.permutation()[i]] == i);

    let c = coin(&nt_struct).to_dense().map(|z| z.re);
    let coin_involution = max_abs(&(&c * &c - &identity));

    let nt = nt_struct.to_dense_real()?;
    let gram = &nt * nt.transpose();
    let incidence_gram = max_abs(&(gram - DMatrix::identity(w.n(), w.n())));

    let mut r = DMatrix::<f64>::zeros(arcs, arcs);
    for i in 0..arcs {
        r[(i, indexing.reverse_of(i))] = 1.0;
    }
    let compression = max_abs(&(&nt * r * nt.transpose() - &h.matrix));

    Ok(StructureReport {
        unitarity,
        shift_involution_ok,
        coin_involution,
        incidence_gram,
        compression,
    })
}

/// Maximum deviation between the evolved inner product and the spectral
/// cosine sum over `t = 0..=t_max`, for the vertex pair `(a, b)`.
pub fn sim_spectral_agreement(
    w: &WeightedGraph,
    a: usize,
    b: usize,
    t_max: u64,
) -> Result<f64> {
    let dec = eig_sym(&hermitian_adjacency(w)?)?;
    let profile = super::fidelity::CosineProfile::from_decomposition(&dec, a, b)?;
    let op = transition(w);
    let x = op.incidence().vertex_state(a)?;
    let y = op.incidence().vertex_state(b)?;
    let mut state = x;
    let mut worst = 0.0f64;
    for t in 0..=t_max {
        if t > 0 {
            state = op.apply(&state);
        }
        let sim = state.inner(&y);
        let spectral = profile.eval(t);
        worst = worst.max((sim.re - spectral).abs()).max(sim.im.abs());
    }
    Ok(worst)
}

/// Verification-suite summary used by the command-line `verify` run.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub structure: StructureReport,
    pub relations: RelationReport,
    pub sim_agreement: f64,
}

/// Thresholds: structure identities at `1e-12`, projection relations and
/// simulation agreement at `1e-9`.
impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.structure.max_residual() < 1e-12
            && self.relations.max_residual < 1e-9
            && self.sim_agreement < 1e-9
    }
}

/// Run the full verification suite for a graph and vertex pair.
pub fn verify_walk(w: &WeightedGraph, a: usize, b: usize, t_max: u64) -> Result<VerifyReport> {
    Ok(VerifyReport {
        structure: structure_residuals(w)?,
        relations: verify_eigenprojection_relations(w)?,
        sim_agreement: sim_spectral_agreement(w, a, b, t_max)?,
    })
}
