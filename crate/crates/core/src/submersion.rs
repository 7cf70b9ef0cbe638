//! Hopf fibrations `S^{2n+1} → CP^n` and `S^{4n+3} → HP^n` with the metric
//! of the total sphere pair, and the scalar-curvature bookkeeping
//! `K = K̄ + τ − r` relating a submanifold of the base to its lift.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SymError};
use crate::product::ProductSpace;
use crate::sampling::{
    self, gaussian_matrix, orthonormalize_columns, random_orthogonal, FrameSearch,
};
use crate::simons::SubmanifoldGerm;
use crate::symmetric::{
    build_cpn_pair, build_hpn_pair, build_sphere_pair, PairKind, SymmetricPair,
};
use crate::triple::{induced_scalar, triple_residual, CandidateSubspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FibrationKind {
    Cpn,
    Hpn,
}

impl FibrationKind {
    pub fn fibre_dim(self) -> usize {
        match self {
            FibrationKind::Cpn => 1,
            FibrationKind::Hpn => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FibrationModel {
    pub kind: FibrationKind,
    pub n: usize,
    pub base: SymmetricPair,
    pub total: SymmetricPair,
}

impl FibrationModel {
    pub fn new(kind: FibrationKind, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(SymError::InvalidDimension {
                family: "fibration base",
                got: n,
                min: 1,
            });
        }
        let (base, total) = match kind {
            FibrationKind::Cpn => (build_cpn_pair(n)?, build_sphere_pair(2 * n + 1)?),
            FibrationKind::Hpn => (build_hpn_pair(n)?, build_sphere_pair(4 * n + 3)?),
        };
        let model = Self {
            kind,
            n,
            base,
            total,
        };
        debug_assert_eq!(model.total.m_dim(), model.base.m_dim() + model.fibre_dim());
        Ok(model)
    }

    pub fn fibre_dim(&self) -> usize {
        self.kind.fibre_dim()
    }

    /// Sectional curvature of the total sphere, `1/(2(dim−1))`.
    pub fn total_curvature(&self) -> f64 {
        1.0 / (2.0 * (self.total.m_dim() as f64 - 1.0))
    }

    /// The fibre through the base point as a subspace of the total `m`: the
    /// last `fibre_dim` directions, which share a complex or quaternionic
    /// coordinate with the base point.
    pub fn fibre_subspace(&self) -> Result<CandidateSubspace> {
        let d = self.total.m_dim();
        let f = self.fibre_dim();
        let mut basis = DMatrix::zeros(d, f);
        for i in 0..f {
            basis[(d - f + i, i)] = 1.0;
        }
        CandidateSubspace::new(&self.total, basis)
    }
}

/// Scalar curvature `r` of a fibre: circles are flat, and the `S³` fibres
/// are great spheres of curvature `1/(2(4n+2))`.
pub fn fibre_scalar(model: &FibrationModel) -> f64 {
    match model.kind {
        FibrationKind::Cpn => 0.0,
        FibrationKind::Hpn => 3.0 / (4.0 * model.n as f64 + 2.0),
    }
}

/// `r` computed as the induced scalar curvature of the fibre's triple system.
pub fn fibre_scalar_direct(model: &FibrationModel) -> Result<f64> {
    let sub = model.fibre_subspace()?;
    let residual = triple_residual(&model.total, &sub);
    if residual > crate::triple::TRIPLE_TOL {
        return Err(SymError::NotTripleSystem(residual));
    }
    Ok(induced_scalar(&model.total, &sub))
}

/// Upper bound on the twisting curvature `τ`: horizontal dimension times
/// fibre dimension times the total curvature, i.e. `1/2` for `CP^n` and
/// `3n/(2n+1)` for `HP^n`.
pub fn tau_bound(model: &FibrationModel, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(SymError::InvalidParameter(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let n = model.n as f64;
    Ok(match model.kind {
        FibrationKind::Cpn => 1.0 / (4.0 * n) * (2.0 * n),
        FibrationKind::Hpn => 3.0 * n / (2.0 * n + 1.0),
    })
}

/// `n + 1`
pub fn threshold_cpn(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(SymError::InvalidDimension {
            family: "cpn",
            got: n,
            min: 1,
        });
    }
    Ok(n as f64 + 1.0)
}

/// `4n(n+2)/(2n+1)`
pub fn threshold_hpn(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(SymError::InvalidDimension {
            family: "hpn",
            got: n,
            min: 1,
        });
    }
    let n = n as f64;
    Ok(4.0 * n * (n + 2.0) / (2.0 * n + 1.0))
}

/// Whether a base configuration with scalar curvature `k_prime` satisfies
/// `threshold − K′ < ρ/q`.
pub fn passes_threshold(threshold: f64, k_prime: f64, rho: f64, q: f64) -> bool {
    threshold - k_prime < rho / q
}

#[derive(Clone, Debug, Serialize)]
pub struct SubmersionSummary {
    pub model: FibrationKind,
    pub n: usize,
    pub fibre_dim: usize,
    /// Fibre scalar curvature from the closed form.
    pub r: f64,
    /// Fibre scalar curvature from the induced Ricci trace.
    pub r_direct: f64,
    pub tau_bound: f64,
    /// Scalar curvature of the total sphere, `dim/2`.
    pub k_bar: f64,
    /// Same, as the trace of the Ricci form of the total pair.
    pub k_bar_direct: f64,
    /// `K̄ + τ − r`
    pub k_base_threshold: f64,
    /// Closed-form threshold `n+1` or `4n(n+2)/(2n+1)`.
    pub threshold_closed_form: f64,
    /// Scalar curvature of the base pair rescaled to the submersion metric.
    pub base_scalar_rescaled: f64,
    pub base_sec_max: f64,
    pub lift_residual: f64,
}

/// Fibre, twisting and threshold data of the fibration. The base scalar
/// curvature in the submersion metric is obtained independently by
/// rescaling the base pair's own metric so that its largest sectional
/// curvature is four times the total sphere's.
pub fn summarize(model: &FibrationModel, search: &FrameSearch) -> Result<SubmersionSummary> {
    let r = fibre_scalar(model);
    let r_direct = fibre_scalar_direct(model)?;
    let tau = tau_bound(model, 1.0)?;
    let k_bar = model.total.m_dim() as f64 / 2.0;
    let k_bar_direct = model.total.scalar_curvature();
    let k_base_threshold = k_bar + tau - r;
    let threshold_closed_form = match model.kind {
        FibrationKind::Cpn => threshold_cpn(model.n)?,
        FibrationKind::Hpn => threshold_hpn(model.n)?,
    };
    // holomorphic (quaternionic) planes of the base have curvature 4c
    let base_sec_max = model.base.maximize_bracket(search)?.value;
    let scale = 4.0 * model.total_curvature() / base_sec_max;
    let base_scalar_rescaled = model.base.scalar_curvature() * scale;
    Ok(SubmersionSummary {
        model: model.kind,
        n: model.n,
        fibre_dim: model.fibre_dim(),
        r,
        r_direct,
        tau_bound: tau,
        k_bar,
        k_bar_direct,
        k_base_threshold,
        threshold_closed_form,
        base_scalar_rescaled,
        base_sec_max,
        lift_residual: (k_base_threshold - threshold_closed_form).abs(),
    })
}

/// A germ over `S^{2n+1} × X₂` containing the vertical Hopf direction `ν`
/// with `B(ν,ν) = 0`, its horizontal part the graph of a random map into `m₂`.
#[derive(Clone, Debug)]
pub struct FibredGerm {
    pub germ: SubmanifoldGerm,
    /// Index of `ν` among the tangent columns.
    pub vertical: usize,
}

/// Mixed curvatures of a fibred germ.
#[derive(Clone, Debug, Serialize)]
pub struct FibredCheck {
    /// `S_X(e_i, ν)` from brackets.
    pub ambient: Vec<f64>,
    /// `S_M(e_i, ν)` from the Gauss equation.
    pub intrinsic: Vec<f64>,
    /// `λ_i = |π₁ e_i|`
    pub lambda1: Vec<f64>,
    /// Largest `S_M(e_i,ν) − c λ_i²`.
    pub excess: f64,
    /// Smallest `S_X − S_M = ‖B(e_i,ν)‖²`.
    pub gauss_gap_min: f64,
    /// Largest `|S_X(e_i,ν) − c λ_i²|`.
    pub ambient_gap: f64,
    /// `Σ_i S_M(e_i, ν)`
    pub tau: f64,
}

pub fn random_fibred_germ(
    space: &ProductSpace,
    lambda: f64,
    magnitude: f64,
    seed: u64,
) -> Result<FibredGerm> {
    let p = space.p();
    if p.is_multiple_of(2) || !matches!(space.factor1().kind(), PairKind::Sphere(_)) {
        return Err(SymError::InvalidParameter(
            "fibred germs need an odd-dimensional sphere as first factor".into(),
        ));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(SymError::InvalidParameter(format!(
            "lambda must lie in [0, 1), got {lambda}"
        )));
    }
    let mut rng = sampling::rng_for(seed);
    let n = space.n_total();
    let c = n - p;
    let h = p - 1;
    let g = gaussian_matrix(&mut rng, c, h);
    let gn = g.norm();
    let t = if gn > 0.0 {
        lambda / (1.0 - lambda * lambda).sqrt() / gn
    } else {
        0.0
    };

    // horizontal graph columns, then ν = last m₁ direction
    let mut tangent = DMatrix::zeros(n, p);
    tangent.view_mut((0, 0), (h, h)).fill_with_identity();
    tangent.view_mut((p, 0), (c, h)).copy_from(&(&g * t));
    tangent[(h, h)] = 1.0;
    let mut normal = DMatrix::zeros(n, c);
    normal
        .view_mut((0, 0), (h, c))
        .copy_from(&(g.transpose() * -t));
    normal.view_mut((p, 0), (c, c)).fill_with_identity();
    if !orthonormalize_columns(&mut tangent) || !orthonormalize_columns(&mut normal) {
        return Err(SymError::Degenerate("graph frame collapsed".into()));
    }
    let normal = normal * random_orthogonal(&mut rng, c);

    let mut sff = vec![0.0; p * p * c];
    for j in 0..c {
        let s = gaussian_matrix(&mut rng, p, p);
        let mut sym = (&s + s.transpose()) * 0.5;
        sym[(h, h)] = 0.0;
        let mean = sym.trace() / h as f64;
        for i in 0..h {
            sym[(i, i)] -= mean;
        }
        for i in 0..p {
            for k in 0..p {
                sff[(i * p + k) * c + j] = sym[(i, k)];
            }
        }
    }
    let norm = sff.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = if norm > 0.0 { magnitude / norm } else { 0.0 };
    sff.iter_mut().for_each(|v| *v *= scale);
    Ok(FibredGerm {
        germ: SubmanifoldGerm::new(tangent, normal, sff)?,
        vertical: h,
    })
}

/// Checks `S_M(e_i, ν) ≤ c λ_i²` with `c` the total sphere curvature.
pub fn check_fibred_germ(space: &ProductSpace, fg: &FibredGerm) -> Result<FibredCheck> {
    let curvature = space
        .sphere_curvature()
        .ok_or_else(|| SymError::InvalidParameter("first factor must be a sphere".into()))?;
    let germ = &fg.germ;
    let (p, c) = (germ.p(), germ.codim());
    let nu = fg.vertical;
    let pair = space.pair();
    let t = germ.tangent();
    let mut out = FibredCheck {
        ambient: Vec::new(),
        intrinsic: Vec::new(),
        lambda1: Vec::new(),
        excess: f64::NEG_INFINITY,
        gauss_gap_min: f64::INFINITY,
        ambient_gap: 0.0,
        tau: 0.0,
    };
    for i in (0..p).filter(|i| *i != nu) {
        let sx = pair.bracket_sq(t.column(i).as_slice(), t.column(nu).as_slice());
        let mut gauss = 0.0;
        for j in 0..c {
            gauss += germ.b(i, i, j) * germ.b(nu, nu, j) - germ.b(i, nu, j).powi(2);
        }
        let sm = sx + gauss;
        let l1 = t.column(i).rows(0, space.p()).norm();
        out.excess = out.excess.max(sm - curvature * l1 * l1);
        out.gauss_gap_min = out.gauss_gap_min.min(sx - sm);
        out.ambient_gap = out.ambient_gap.max((sx - curvature * l1 * l1).abs());
        out.tau += sm;
        out.ambient.push(sx);
        out.intrinsic.push(sm);
        out.lambda1.push(l1);
    }
    Ok(out)
}
