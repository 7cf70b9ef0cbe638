//! Lie triple systems `t ⊆ m` (`[[t,t],t] ⊆ t`), their enveloping
//! subalgebras `t + [t,t]`, and injectivity of `π₁` on the envelope.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Result, SymError};
use crate::lie::{AlgebraVector, LieAlgebra};
use crate::product::ProductSpace;
use crate::sampling::{self, gaussian_matrix, orthonormalize_columns};
use crate::symmetric::SymmetricPair;

/// Residuals at or below this are triple systems.
pub const TRIPLE_TOL: f64 = 1e-8;
/// Residuals above `TRIPLE_TOL` and at or below this are borderline.
pub const BORDERLINE_TOL: f64 = 1e-3;
/// Smallest singular value of `π₁` on the envelope certifying injectivity.
pub const INJECTIVITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleStatus {
    Triple,
    Borderline,
    NotTriple,
}

impl TripleStatus {
    pub fn classify(residual: f64) -> Self {
        if residual <= TRIPLE_TOL {
            TripleStatus::Triple
        } else if residual <= BORDERLINE_TOL {
            TripleStatus::Borderline
        } else {
            TripleStatus::NotTriple
        }
    }
}

/// A subspace of `m` given by orthonormal columns of `m`-coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateSubspace {
    basis: DMatrix<f64>,
}

impl CandidateSubspace {
    pub fn new(pair: &SymmetricPair, basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != pair.m_dim() {
            return Err(SymError::DimensionMismatch {
                expected: pair.m_dim(),
                got: basis.nrows(),
            });
        }
        let k = basis.ncols();
        let err = (basis.transpose() * &basis - DMatrix::identity(k, k)).amax();
        if err > 1e-10 {
            return Err(SymError::Degenerate(format!(
                "subspace basis is not orthonormal (Gram error {err:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Orthonormalizes the span of the given `m`-coordinate columns.
    pub fn from_span(pair: &SymmetricPair, span: &DMatrix<f64>) -> Result<Self> {
        let mut basis = span.clone();
        if !orthonormalize_columns(&mut basis) {
            return Err(SymError::Degenerate(
                "subspace vectors are dependent".into(),
            ));
        }
        Self::new(pair, basis)
    }

    /// Subspace spanned by algebra vectors lying in `m`.
    pub fn from_vectors(pair: &SymmetricPair, vectors: &[AlgebraVector]) -> Result<Self> {
        for v in vectors {
            let residual = pair.m_residual(v);
            if residual > 1e-10 {
                return Err(SymError::NotInSubspace {
                    space: "m",
                    residual,
                });
            }
        }
        let span = DMatrix::from_fn(pair.m_dim(), vectors.len(), |r, c| {
            pair.m_coords(&vectors[c])[r]
        });
        Self::from_span(pair, &span)
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vectors(&self, pair: &SymmetricPair) -> Vec<AlgebraVector> {
        (0..self.dim())
            .map(|c| pair.from_m_coords(self.basis.column(c).as_slice()))
            .collect()
    }
}

/// Span of the first `k` directions `L_{a,n+1}` of the sphere pair: a great `k`-sphere.
pub fn great_sphere_subspace(pair: &SymmetricPair, k: usize) -> Result<CandidateSubspace> {
    if k == 0 || k > pair.m_dim() {
        return Err(SymError::InvalidParameter(format!(
            "great sphere dimension must be in 1..={}, got {k}",
            pair.m_dim()
        )));
    }
    let mut basis = DMatrix::zeros(pair.m_dim(), k);
    basis.view_mut((0, 0), (k, k)).fill_with_identity();
    CandidateSubspace::new(pair, basis)
}

/// `{(x, x)/√2}` in a product of two identical factors.
pub fn diagonal_subspace(space: &ProductSpace) -> Result<CandidateSubspace> {
    let p = space.p();
    if space.codim() != p {
        return Err(SymError::DimensionMismatch {
            expected: p,
            got: space.codim(),
        });
    }
    let s = 0.5f64.sqrt();
    let basis = DMatrix::from_fn(2 * p, p, |r, c| if r == c || r == c + p { s } else { 0.0 });
    CandidateSubspace::new(space.pair(), basis)
}

/// Uniformly random `k`-dimensional subspace of `m`.
pub fn random_subspace(pair: &SymmetricPair, k: usize, seed: u64) -> Result<CandidateSubspace> {
    if k == 0 || k > pair.m_dim() {
        return Err(SymError::InvalidParameter(format!(
            "subspace dimension must be in 1..={}, got {k}",
            pair.m_dim()
        )));
    }
    let mut rng = sampling::rng_for(seed);
    loop {
        let mut g = gaussian_matrix(&mut rng, pair.m_dim(), k);
        if orthonormalize_columns(&mut g) {
            return CandidateSubspace::new(pair, g);
        }
    }
}

/// Norm of the trilinear map `(x,y,z) ↦ [[x,y],z]` followed by orthogonal
/// projection off the subspace: `(Σ_{a,b,c} ‖[[t_a,t_b],t_c]^⊥‖²)^{1/2}` over an
/// orthonormal basis. It bounds every single basis triple from above and does
/// not depend on the chosen basis.
pub fn triple_residual(pair: &SymmetricPair, sub: &CandidateSubspace) -> f64 {
    let alg = pair.algebra();
    let v = sub.vectors(pair);
    let proj = sub.basis() * sub.basis().transpose();
    let k = v.len();
    let mut acc = 0.0;
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let ab = alg.bracket_raw(&v[a], &v[b]);
            for z in &v {
                let w = alg.bracket_raw(&ab, z);
                // the h-part of w vanishes up to rounding; count it anyway
                let wm = pair.m_coords(&w);
                let off = &wm - &proj * &wm;
                acc += off.norm_squared() + pair.h_coords(&w).norm_squared();
            }
        }
    }
    acc.sqrt()
}

/// Induced Ricci form `Σ_c ⟨−[t_a,[t_b,t_c]], t_c⟩` of a triple system in the ambient metric.
pub fn induced_ricci(pair: &SymmetricPair, sub: &CandidateSubspace) -> DMatrix<f64> {
    let alg = pair.algebra();
    let v = sub.vectors(pair);
    let k = v.len();
    let mut ric = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            for c in &v {
                let inner = alg.bracket_raw(&v[b], c);
                let outer = alg.bracket_raw(&v[a], &inner);
                ric[(a, b)] -= alg.metric_raw(&outer, c);
            }
        }
    }
    (&ric + ric.transpose()) * 0.5
}

/// Scalar curvature of the totally geodesic submanifold tangent to a triple system.
pub fn induced_scalar(pair: &SymmetricPair, sub: &CandidateSubspace) -> f64 {
    induced_ricci(pair, sub).trace()
}

#[derive(Clone, Debug)]
pub struct Envelope {
    /// Orthonormal basis: the subspace first, then a basis of the rest of `[t,t]`.
    pub basis: Vec<AlgebraVector>,
    pub closure_residual: f64,
    /// Killing form of `t + [t,t]` computed from its own structure constants.
    pub killing_eigenvalues: Vec<f64>,
}

impl Envelope {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn killing_definite(&self) -> bool {
        !self.killing_eigenvalues.is_empty() && self.killing_eigenvalues.iter().all(|e| *e < -1e-10)
    }
}

/// Orthonormal basis of `t + [t,t]` with its closure residual and Killing spectrum.
pub fn enveloping_algebra(pair: &SymmetricPair, sub: &CandidateSubspace) -> Result<Envelope> {
    let residual = triple_residual(pair, sub);
    if residual > TRIPLE_TOL {
        return Err(SymError::NotTripleSystem(residual));
    }
    let alg = pair.algebra();
    let t = sub.vectors(pair);
    let mut span = t.clone();
    for a in 0..t.len() {
        for b in (a + 1)..t.len() {
            span.push(alg.bracket_raw(&t[a], &t[b]));
        }
    }
    let basis = alg.orthonormal_span(&span, 1e-8);
    let d = basis.len();

    let mut closure_residual = 0.0f64;
    let mut structure = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            let br = alg.bracket_raw(&basis[i], &basis[j]);
            let mut rest = br.clone();
            for (k, u) in basis.iter().enumerate() {
                let c = alg.metric_raw(u, &br);
                structure[(i * d + j) * d + k] = c;
                rest.axpy(-c, u);
            }
            closure_residual = closure_residual.max(alg.metric_raw(&rest, &rest).max(0.0).sqrt());
        }
    }
    if closure_residual > TRIPLE_TOL {
        return Err(SymError::InvalidStructure(format!(
            "t + [t,t] is not closed under the bracket (residual {closure_residual:.3e})"
        )));
    }
    let killing_eigenvalues = if d == 0 {
        Vec::new()
    } else {
        let labels = (0..d).map(|i| format!("u{i}")).collect();
        let env = LieAlgebra::from_structure(labels, structure)?;
        let mut eig: Vec<f64> = SymmetricEigen::new(env.killing_matrix().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        eig
    };
    Ok(Envelope {
        basis,
        closure_residual,
        killing_eigenvalues,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityCheck {
    pub applicable: bool,
    pub reason: Option<String>,
    pub pi2_operator: f64,
    pub injective: Option<bool>,
    pub sigma_min: Option<f64>,
    pub envelope_dim: Option<usize>,
}

/// Whether `π₁` restricted to `t + [t,t]` is injective. Only meaningful when
/// `‖π₂‖ < 1` in operator norm on `t` and the first factor has rank one;
/// otherwise the check reports itself as not applicable.
pub fn pi1_injectivity_check(
    space: &ProductSpace,
    sub: &CandidateSubspace,
) -> Result<InjectivityCheck> {
    let pi2 = space.projection_norms_coords(sub.basis()).operator;
    let mut out = InjectivityCheck {
        applicable: false,
        reason: None,
        pi2_operator: pi2,
        injective: None,
        sigma_min: None,
        envelope_dim: None,
    };
    if pi2 >= 1.0 - 1e-12 {
        out.reason = Some(format!("operator norm of pi2 is {pi2:.6}, not below 1"));
        return Ok(out);
    }
    if !space.factor1_rank_one() {
        out.reason = Some("first factor does not have rank one".into());
        return Ok(out);
    }
    let env = enveloping_algebra(space.pair(), sub)?;
    let alg = space.pair().algebra();
    let images: Vec<AlgebraVector> = env.basis.iter().map(|u| space.pi1(u)).collect();
    let d = images.len();
    let gram = DMatrix::from_fn(d, d, |a, b| alg.metric_raw(&images[a], &images[b]));
    let min_eig = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let sigma = min_eig.max(0.0).sqrt();
    out.applicable = true;
    out.injective = Some(sigma > INJECTIVITY_TOL);
    out.sigma_min = Some(sigma);
    out.envelope_dim = Some(d);
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleReport {
    pub dim: usize,
    pub residual: f64,
    pub status: TripleStatus,
    pub envelope_dim: Option<usize>,
    pub envelope_killing_definite: Option<bool>,
    pub injectivity: Option<InjectivityCheck>,
}

/// Residual, envelope and injectivity data for one subspace of a product.
pub fn triple_report(space: &ProductSpace, sub: &CandidateSubspace) -> Result<TripleReport> {
    let residual = triple_residual(space.pair(), sub);
    let status = TripleStatus::classify(residual);
    let (envelope_dim, definite, injectivity) = if status == TripleStatus::Triple {
        let env = enveloping_algebra(space.pair(), sub)?;
        (
            Some(env.dim()),
            Some(env.killing_definite()),
            Some(pi1_injectivity_check(space, sub)?),
        )
    } else {
        (None, None, None)
    };
    Ok(TripleReport {
        dim: sub.dim(),
        residual,
        status,
        envelope_dim,
        envelope_killing_definite: definite,
        injectivity,
    })
}
