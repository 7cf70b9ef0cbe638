//! Symmetric pairs `g = h ⊕ m` and the curvature of the associated
//! compact symmetric space.
//!
//! With the metric `⟨·,·⟩ = −B` restricted to `m`, the curvature tensor is
//! `R_{X,Y}Z = −[[X,Y],Z]` and the Ricci form is
//! `Ric(X,Y) = tr_m(Z ↦ −[X,[Y,Z]])`. For orthonormal `X, Y ∈ m` the
//! sectional curvature equals `‖[X,Y]‖²`.
//!
//! Curvature extrema are found numerically: random orthonormal 2-frames in
//! `m`, each refined by projected gradient steps on the Stiefel manifold,
//! best result kept. Every reported value is attained by an actual frame, so
//! a maximum is a certified lower bound and a minimum a certified upper bound.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SymError};
use crate::lie::{build_so, build_sp, build_su, AlgebraVector, LieAlgebra};
use crate::sampling::{self, FrameSearch};
use crate::tolerance;

/// Minimum of `‖[X,Y]‖²` over orthonormal pairs above which `m` has rank one.
pub const RANK_ONE_THRESHOLD: f64 = 1e-6;

/// Convergence tolerance on the objective during frame refinement.
const REFINE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Sphere(usize),
    ComplexProjective(usize),
    QuaternionicProjective(usize),
    Product,
    Custom,
}

#[derive(Clone, Debug)]
pub struct SymmetricPair {
    algebra: LieAlgebra,
    h_basis: Vec<AlgebraVector>,
    m_basis: Vec<AlgebraVector>,
    name: String,
    kind: PairKind,
    /// Rows map algebra coordinates to orthonormal `m` coordinates.
    m_dual: DMatrix<f64>,
    h_dual: DMatrix<f64>,
    /// `⟨[m_a, m_b], h_c⟩` at `(a * dm + b) * dh + c`.
    mm_h: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClosureResiduals {
    pub hh: f64,
    pub hm: f64,
    pub mm: f64,
}

impl ClosureResiduals {
    pub fn max(&self) -> f64 {
        self.hh.max(self.hm).max(self.mm)
    }
}

/// An orthonormal pair in `m` (in `m` coordinates) and the value of
/// `‖[X,Y]‖²` it attains.
#[derive(Clone, Debug, Serialize)]
pub struct FrameExtremum {
    pub value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sample_index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankOneCertificate {
    pub rank_one: bool,
    /// Smallest `‖[X,Y]‖²` found over orthonormal pairs.
    pub min_bracket_sq: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SecExtrema {
    pub max: f64,
    pub min: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureSummary {
    pub name: String,
    pub rho: f64,
    pub k_bracket_max: f64,
    pub sec_max: f64,
    pub sec_min: f64,
    pub is_rank_one: bool,
    pub scalar: f64,
    pub samples: usize,
    pub refine_steps: usize,
    pub seed: u64,
}

impl SymmetricPair {
    /// Builds a pair from spanning sets of `h` and `m`. Both are
    /// orthonormalized; the result must be an orthogonal splitting of the
    /// whole algebra closed under the symmetric-pair bracket relations.
    pub fn new(
        algebra: LieAlgebra,
        h_span: &[AlgebraVector],
        m_span: &[AlgebraVector],
        name: impl Into<String>,
        kind: PairKind,
    ) -> Result<Self> {
        let h_basis = algebra.orthonormal_span(h_span, 1e-8);
        let m_basis = algebra.orthonormal_span(m_span, 1e-8);
        if h_basis.len() + m_basis.len() != algebra.dim() {
            return Err(SymError::InvalidStructure(format!(
                "dim h + dim m = {} + {} does not match dim g = {}",
                h_basis.len(),
                m_basis.len(),
                algebra.dim()
            )));
        }
        for h in &h_basis {
            for m in &m_basis {
                let ip = algebra.metric_raw(h, m).abs();
                if ip > tolerance::exact() {
                    return Err(SymError::InvalidStructure(format!(
                        "h and m are not orthogonal (inner product {ip:.3e})"
                    )));
                }
            }
        }
        let dual = |basis: &[AlgebraVector]| {
            let d = algebra.dim();
            let mut out = DMatrix::zeros(basis.len(), d);
            for (r, v) in basis.iter().enumerate() {
                let lowered = -(algebra.killing_matrix() * v.as_dvector());
                out.row_mut(r).copy_from(&lowered.transpose());
            }
            out
        };
        let m_dual = dual(&m_basis);
        let h_dual = dual(&h_basis);
        let (dm, dh) = (m_basis.len(), h_basis.len());
        let mut mm_h = vec![0.0; dm * dm * dh];
        for a in 0..dm {
            for b in 0..dm {
                let br = algebra.bracket_raw(&m_basis[a], &m_basis[b]);
                let hc = &h_dual * br.as_dvector();
                for c in 0..dh {
                    mm_h[(a * dm + b) * dh + c] = hc[c];
                }
            }
        }
        let pair = Self {
            algebra,
            h_basis,
            m_basis,
            name: name.into(),
            kind,
            m_dual,
            h_dual,
            mm_h,
        };
        let closure = pair.closure_residuals();
        if closure.max() > tolerance::accumulated() {
            return Err(SymError::InvalidStructure(format!(
                "bracket relations violated: {closure:?}"
            )));
        }
        Ok(pair)
    }

    /// Splits an algebra with a defining representation by the involution
    /// `X ↦ S X S⁻¹` for a real orthogonal involutive matrix `S`.
    pub fn from_involution(
        algebra: LieAlgebra,
        s: &DMatrix<f64>,
        name: impl Into<String>,
        kind: PairKind,
    ) -> Result<Self> {
        let mats = algebra.realization().ok_or_else(|| {
            SymError::InvalidStructure("algebra has no matrix realization".into())
        })?;
        let d = algebra.dim();
        let mut images = Vec::with_capacity(d);
        for m in mats {
            let img = s * m * s;
            let coords = algebra.from_matrix(&img).ok_or_else(|| {
                SymError::InvalidStructure("involution does not preserve the algebra".into())
            })?;
            images.push(coords);
        }
        let mut h_span = Vec::with_capacity(d);
        let mut m_span = Vec::with_capacity(d);
        for (i, img) in images.iter().enumerate() {
            let b = AlgebraVector::basis(d, i);
            h_span.push((&b + img).scaled(0.5));
            m_span.push((&b - img).scaled(0.5));
        }
        Self::new(algebra, &h_span, &m_span, name, kind)
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn h_basis(&self) -> &[AlgebraVector] {
        &self.h_basis
    }

    pub fn m_basis(&self) -> &[AlgebraVector] {
        &self.m_basis
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }

    pub fn m_dim(&self) -> usize {
        self.m_basis.len()
    }

    pub fn h_dim(&self) -> usize {
        self.h_basis.len()
    }

    /// Orthonormal `m` coordinates of an algebra vector (its `m` component).
    pub fn m_coords(&self, x: &AlgebraVector) -> DVector<f64> {
        &self.m_dual * x.as_dvector()
    }

    pub fn h_coords(&self, x: &AlgebraVector) -> DVector<f64> {
        &self.h_dual * x.as_dvector()
    }

    pub fn from_m_coords(&self, coords: &[f64]) -> AlgebraVector {
        let mut out = AlgebraVector::zeros(self.algebra.dim());
        for (c, m) in coords.iter().zip(&self.m_basis) {
            out.axpy(*c, m);
        }
        out
    }

    /// Norm of the `h` component of `x`.
    pub fn m_residual(&self, x: &AlgebraVector) -> f64 {
        self.h_coords(x).norm()
    }

    fn require_m(&self, x: &AlgebraVector) -> Result<()> {
        if x.dim() != self.algebra.dim() {
            return Err(SymError::DimensionMismatch {
                expected: self.algebra.dim(),
                got: x.dim(),
            });
        }
        let residual = self.m_residual(x);
        let scale = self.algebra.metric_raw(x, x).max(0.0).sqrt().max(1.0);
        if residual > tolerance::accumulated() * scale {
            return Err(SymError::NotInSubspace {
                space: "m",
                residual,
            });
        }
        Ok(())
    }

    pub fn closure_residuals(&self) -> ClosureResiduals {
        let mut r = ClosureResiduals {
            hh: 0.0,
            hm: 0.0,
            mm: 0.0,
        };
        for a in &self.h_basis {
            for b in &self.h_basis {
                let br = self.algebra.bracket_raw(a, b);
                r.hh = r.hh.max(self.m_coords(&br).norm());
            }
            for b in &self.m_basis {
                let br = self.algebra.bracket_raw(a, b);
                r.hm = r.hm.max(self.h_coords(&br).norm());
            }
        }
        for a in &self.m_basis {
            for b in &self.m_basis {
                let br = self.algebra.bracket_raw(a, b);
                r.mm = r.mm.max(self.m_coords(&br).norm());
            }
        }
        r
    }

    pub(crate) fn curvature_raw(
        &self,
        x: &AlgebraVector,
        y: &AlgebraVector,
        z: &AlgebraVector,
    ) -> AlgebraVector {
        let xy = self.algebra.bracket_raw(x, y);
        -&self.algebra.bracket_raw(&xy, z)
    }

    /// `R_{x,y} z = −[[x,y],z]` for `x, y, z ∈ m`.
    pub fn curvature_op(
        &self,
        x: &AlgebraVector,
        y: &AlgebraVector,
        z: &AlgebraVector,
    ) -> Result<AlgebraVector> {
        self.require_m(x)?;
        self.require_m(y)?;
        self.require_m(z)?;
        Ok(self.curvature_raw(x, y, z))
    }

    /// `⟨R_{x,y} z, w⟩`
    pub fn curvature_form(
        &self,
        x: &AlgebraVector,
        y: &AlgebraVector,
        z: &AlgebraVector,
        w: &AlgebraVector,
    ) -> Result<f64> {
        self.require_m(w)?;
        let r = self.curvature_op(x, y, z)?;
        Ok(self.algebra.metric_raw(&r, w))
    }

    /// Ricci form on the orthonormal `m` basis, computed as the trace
    /// `Σ_c ⟨−[m_a,[m_b,m_c]], m_c⟩` and returned exactly symmetric.
    pub fn ricci(&self) -> DMatrix<f64> {
        let raw = self.ricci_unsymmetrized();
        (&raw + raw.transpose()) * 0.5
    }

    pub(crate) fn ricci_unsymmetrized(&self) -> DMatrix<f64> {
        let d = self.m_dim();
        let mut ric = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut acc = 0.0;
                for c in 0..d {
                    let inner = self.algebra.bracket_raw(&self.m_basis[b], &self.m_basis[c]);
                    let outer = self.algebra.bracket_raw(&self.m_basis[a], &inner);
                    acc -= self.algebra.metric_raw(&outer, &self.m_basis[c]);
                }
                ric[(a, b)] = acc;
            }
        }
        ric
    }

    /// Smallest Ricci curvature of a unit vector in `m`.
    pub fn rho_min(&self) -> f64 {
        if self.m_dim() == 0 {
            return 0.0;
        }
        SymmetricEigen::new(self.ricci())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.ricci().trace()
    }

    /// `[X, Y]` in orthonormal `h` coordinates, for `X, Y` given in `m` coordinates.
    pub fn bracket_m_to_h(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let (dm, dh) = (self.m_dim(), self.h_dim());
        let mut out = vec![0.0; dh];
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0.0 {
                continue;
            }
            for (b, &yb) in y.iter().enumerate() {
                let s = xa * yb;
                if s == 0.0 {
                    continue;
                }
                let row = &self.mm_h[(a * dm + b) * dh..(a * dm + b + 1) * dh];
                for (o, t) in out.iter_mut().zip(row) {
                    *o += s * t;
                }
            }
        }
        out
    }

    /// `‖[X,Y]‖²` for `X, Y` in `m` coordinates.
    pub fn bracket_sq(&self, x: &[f64], y: &[f64]) -> f64 {
        self.bracket_m_to_h(x, y).iter().map(|v| v * v).sum()
    }

    /// `⟨R_{x,y}y,x⟩ / (|x|²|y|² − ⟨x,y⟩²)`
    pub fn sectional_curvature(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<f64> {
        let num = self.curvature_form(x, y, y, x)?;
        let xx = self.algebra.metric_raw(x, x);
        let yy = self.algebra.metric_raw(y, y);
        let xy = self.algebra.metric_raw(x, y);
        let den = xx * yy - xy * xy;
        if den.is_nan() || den <= 1e-12 * xx * yy || xx == 0.0 || yy == 0.0 {
            return Err(SymError::Degenerate(
                "sectional curvature needs two independent vectors".into(),
            ));
        }
        Ok(num / den)
    }

    fn bracket_sq_gradient(&self, x: &[f64], y: &[f64]) -> (f64, DVector<f64>, DVector<f64>) {
        let (dm, dh) = (self.m_dim(), self.h_dim());
        let v = self.bracket_m_to_h(x, y);
        let mut gx = DVector::zeros(dm);
        let mut gy = DVector::zeros(dm);
        for a in 0..dm {
            for b in 0..dm {
                let row = &self.mm_h[(a * dm + b) * dh..(a * dm + b + 1) * dh];
                let t: f64 = row.iter().zip(&v).map(|(r, w)| r * w).sum();
                gx[a] += 2.0 * t * y[b];
                gy[b] += 2.0 * t * x[a];
            }
        }
        (v.iter().map(|w| w * w).sum(), gx, gy)
    }

    /// Projected-gradient refinement of `f(X,Y) = ‖[X,Y]‖²` on orthonormal
    /// 2-frames. Steps that do not improve `f` are rejected and the step halved.
    fn refine_frame(
        &self,
        mut q: DMatrix<f64>,
        steps: usize,
        maximize: bool,
        mut step: f64,
    ) -> (f64, DMatrix<f64>) {
        let sign = if maximize { 1.0 } else { -1.0 };
        let (mut f, _, _) =
            self.bracket_sq_gradient(q.column(0).as_slice(), q.column(1).as_slice());
        for _ in 0..steps {
            let (_, gx, gy) =
                self.bracket_sq_gradient(q.column(0).as_slice(), q.column(1).as_slice());
            let mut g = DMatrix::zeros(q.nrows(), 2);
            g.set_column(0, &gx);
            g.set_column(1, &gy);
            let qtg = q.transpose() * &g;
            let sym = (&qtg + qtg.transpose()) * 0.5;
            let riem = &g - &q * sym;
            if riem.norm() < 1e-14 {
                break;
            }
            let mut cand = &q + riem * (sign * step);
            if !sampling::orthonormalize_columns(&mut cand) {
                break;
            }
            let f_new = self.bracket_sq(cand.column(0).as_slice(), cand.column(1).as_slice());
            if sign * (f_new - f) < 0.0 {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
                continue;
            }
            let delta = (f_new - f).abs();
            q = cand;
            f = f_new;
            if delta < REFINE_TOL {
                break;
            }
        }
        (f, q)
    }

    fn optimize_frames(&self, search: &FrameSearch, maximize: bool) -> Result<FrameExtremum> {
        let dm = self.m_dim();
        if dm == 0 {
            return Err(SymError::Degenerate(format!("{}: m is empty", self.name)));
        }
        if search.samples == 0 {
            return Err(SymError::InvalidParameter(
                "samples must be at least 1".into(),
            ));
        }
        if dm == 1 {
            return Ok(FrameExtremum {
                value: 0.0,
                x: vec![1.0],
                y: vec![0.0],
                sample_index: 0,
            });
        }
        let mut scale = 0.0f64;
        for a in 0..dm {
            for b in (a + 1)..dm {
                let mut ea = vec![0.0; dm];
                let mut eb = vec![0.0; dm];
                ea[a] = 1.0;
                eb[b] = 1.0;
                scale = scale.max(self.bracket_sq(&ea, &eb));
            }
        }
        let step = if scale > 0.0 { 0.25 / scale } else { 1.0 };
        let results: Vec<(f64, DMatrix<f64>)> = (0..search.samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = sampling::rng_for(sampling::sample_seed(search.seed, i as u64));
                let mut q = sampling::gaussian_matrix(&mut rng, dm, 2);
                while !sampling::orthonormalize_columns(&mut q) {
                    q = sampling::gaussian_matrix(&mut rng, dm, 2);
                }
                self.refine_frame(q, search.refine_steps, maximize, step)
            })
            .collect();
        let mut best = 0;
        for (i, (v, _)) in results.iter().enumerate() {
            let better = if maximize {
                *v > results[best].0
            } else {
                *v < results[best].0
            };
            if better {
                best = i;
            }
        }
        let (value, q) = &results[best];
        Ok(FrameExtremum {
            value: *value,
            x: q.column(0).iter().copied().collect(),
            y: q.column(1).iter().copied().collect(),
            sample_index: best,
        })
    }

    /// The orthonormal pair maximizing `‖[X,Y]‖²` (value is the square).
    pub fn maximize_bracket(&self, search: &FrameSearch) -> Result<FrameExtremum> {
        self.optimize_frames(search, true)
    }

    /// The orthonormal pair minimizing `‖[X,Y]‖²`.
    pub fn minimize_bracket(&self, search: &FrameSearch) -> Result<FrameExtremum> {
        self.optimize_frames(search, false)
    }

    /// `max ‖[X,Y]‖` over unit `X, Y ∈ m`.
    pub fn bracket_norm_max(&self, search: &FrameSearch) -> Result<f64> {
        Ok(self.maximize_bracket(search)?.value.max(0.0).sqrt())
    }

    pub fn sec_extrema(&self, search: &FrameSearch) -> Result<SecExtrema> {
        let max = self.maximize_bracket(search)?.value;
        let min = self.minimize_bracket(search)?.value;
        Ok(SecExtrema { max, min })
    }

    /// Rank-one test: the minimum of `‖[X,Y]‖²` over orthonormal pairs is
    /// positive exactly when no two independent directions of `m` commute.
    pub fn is_rank_one(&self, search: &FrameSearch) -> Result<RankOneCertificate> {
        if self.m_dim() < 2 {
            return Err(SymError::InvalidParameter(
                "rank-one test needs dim m >= 2".into(),
            ));
        }
        let best = self.minimize_bracket(search)?;
        Ok(RankOneCertificate {
            rank_one: best.value > RANK_ONE_THRESHOLD,
            min_bracket_sq: best.value,
            x: best.x,
            y: best.y,
        })
    }

    pub fn summary(&self, search: &FrameSearch) -> Result<CurvatureSummary> {
        let max = self.maximize_bracket(search)?;
        let min = self.minimize_bracket(search)?;
        let rank_one = self.m_dim() >= 2 && min.value > RANK_ONE_THRESHOLD;
        Ok(CurvatureSummary {
            name: self.name.clone(),
            rho: self.rho_min(),
            k_bracket_max: max.value.max(0.0).sqrt(),
            sec_max: max.value,
            sec_min: min.value,
            is_rank_one: rank_one,
            scalar: self.scalar_curvature(),
            samples: search.samples,
            refine_steps: search.refine_steps,
            seed: search.seed,
        })
    }

    /// The same space with its `m` basis replaced by `m · q` for an orthogonal `q`.
    pub fn with_rotated_m(&self, q: &DMatrix<f64>) -> Result<Self> {
        let d = self.m_dim();
        if q.nrows() != d || q.ncols() != d {
            return Err(SymError::DimensionMismatch {
                expected: d,
                got: q.nrows(),
            });
        }
        let rotated: Vec<AlgebraVector> = (0..d)
            .map(|c| self.from_m_coords(q.column(c).as_slice()))
            .collect();
        Self::new(
            self.algebra.clone(),
            &self.h_basis,
            &rotated,
            self.name.clone(),
            self.kind,
        )
    }
}

fn reflection(n: usize, flipped: usize) -> DMatrix<f64> {
    let mut s = DMatrix::identity(n, n);
    s[(flipped, flipped)] = -1.0;
    s
}

/// The round sphere `S^n = SO(n+1)/SO(n)`.
pub fn build_sphere_pair(n: usize) -> Result<SymmetricPair> {
    if n < 2 {
        return Err(SymError::InvalidDimension {
            family: "sphere",
            got: n,
            min: 2,
        });
    }
    let alg = build_so(n + 1)?;
    SymmetricPair::from_involution(
        alg,
        &reflection(n + 1, n),
        format!("S^{n}"),
        PairKind::Sphere(n),
    )
}

/// `CP^n = SU(n+1)/S(U(n)×U(1))`.
pub fn build_cpn_pair(n: usize) -> Result<SymmetricPair> {
    if n < 1 {
        return Err(SymError::InvalidDimension {
            family: "cpn",
            got: n,
            min: 1,
        });
    }
    let alg = build_su(n + 1)?;
    // diag(1,…,1,−1) acting on the real and imaginary blocks alike
    let k = n + 1;
    let mut s = DMatrix::identity(2 * k, 2 * k);
    s[(n, n)] = -1.0;
    s[(k + n, k + n)] = -1.0;
    SymmetricPair::from_involution(alg, &s, format!("CP^{n}"), PairKind::ComplexProjective(n))
}

/// `HP^n = Sp(n+1)/(Sp(n)×Sp(1))`.
pub fn build_hpn_pair(n: usize) -> Result<SymmetricPair> {
    if n < 1 {
        return Err(SymError::InvalidDimension {
            family: "hpn",
            got: n,
            min: 1,
        });
    }
    let alg = build_sp(n + 1)?;
    let mut s = DMatrix::identity(4 * (n + 1), 4 * (n + 1));
    for r in 0..4 {
        s[(4 * n + r, 4 * n + r)] = -1.0;
    }
    SymmetricPair::from_involution(
        alg,
        &s,
        format!("HP^{n}"),
        PairKind::QuaternionicProjective(n),
    )
}
