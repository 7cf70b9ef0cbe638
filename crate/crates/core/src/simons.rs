//! Pointwise second-fundamental-form data of a `p`-dimensional submanifold
//! of a product `S^p × X₂` and the curvature term `⟨R(A), A⟩` of Simons'
//! equation.
//!
//! The six contributions are evaluated twice. The lemma route rewrites each
//! one through brackets in `m`-coordinates (Ricci splitting, squared norms,
//! the constant-curvature expansion on the sphere factor). The direct route
//! evaluates the defining sums with `R_{X,Y}Z = −[[X,Y],Z]` on algebra
//! vectors. Agreement of the two is checked on every evaluation.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Result, SymError};
use crate::lie::AlgebraVector;
use crate::product::ProductSpace;
use crate::sampling::{self, gaussian_matrix, orthonormalize_columns, random_orthogonal};

/// Largest allowed gap between the two evaluation routes, per unit `‖A‖²`.
pub const ROUTE_TOL: f64 = 1e-8;

const ORTHONORMAL_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;

/// Frames and second fundamental form at one point. Frames are columns of
/// `m`-coordinates of the product pair; `B[i][k][j] = ⟨B(e_i,e_k), η_j⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubmanifoldGerm {
    tangent: DMatrix<f64>,
    normal: DMatrix<f64>,
    sff: Vec<f64>,
}

impl SubmanifoldGerm {
    /// Validates orthonormality, symmetry and minimality. `sff` is indexed
    /// `(i * p + k) * codim + j`.
    pub fn new(tangent: DMatrix<f64>, normal: DMatrix<f64>, sff: Vec<f64>) -> Result<Self> {
        let n = tangent.nrows();
        let p = tangent.ncols();
        if normal.nrows() != n || p + normal.ncols() != n {
            return Err(SymError::DimensionMismatch {
                expected: n,
                got: p + normal.ncols(),
            });
        }
        let c = normal.ncols();
        if sff.len() != p * p * c {
            return Err(SymError::DimensionMismatch {
                expected: p * p * c,
                got: sff.len(),
            });
        }
        let mut frame = DMatrix::zeros(n, n);
        frame.columns_mut(0, p).copy_from(&tangent);
        frame.columns_mut(p, c).copy_from(&normal);
        let err = (frame.transpose() * &frame - DMatrix::identity(n, n)).amax();
        if err > ORTHONORMAL_TOL {
            return Err(SymError::Degenerate(format!(
                "frames are not orthonormal (Gram error {err:.3e})"
            )));
        }
        let germ = Self {
            tangent,
            normal,
            sff,
        };
        let scale = germ.a_norm_sq().sqrt().max(1.0);
        for j in 0..c {
            let mut tr = 0.0;
            for i in 0..p {
                tr += germ.b(i, i, j);
                for k in 0..i {
                    let gap = (germ.b(i, k, j) - germ.b(k, i, j)).abs();
                    if gap > SYMMETRY_TOL * scale {
                        return Err(SymError::InvalidStructure(format!(
                            "second fundamental form is not symmetric (gap {gap:.3e})"
                        )));
                    }
                }
            }
            if tr.abs() > SYMMETRY_TOL * scale {
                return Err(SymError::InvalidStructure(format!(
                    "second fundamental form is not trace-free along normal {j} (trace {tr:.3e})"
                )));
            }
        }
        Ok(germ)
    }

    pub fn p(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn codim(&self) -> usize {
        self.normal.ncols()
    }

    pub fn n_total(&self) -> usize {
        self.tangent.nrows()
    }

    pub fn tangent(&self) -> &DMatrix<f64> {
        &self.tangent
    }

    pub fn normal(&self) -> &DMatrix<f64> {
        &self.normal
    }

    pub fn sff(&self) -> &[f64] {
        &self.sff
    }

    /// `⟨B(e_i, e_k), η_j⟩`
    pub fn b(&self, i: usize, k: usize, j: usize) -> f64 {
        self.sff[(i * self.p() + k) * self.codim() + j]
    }

    /// `‖A‖² = Σ B[i][k][j]²`
    pub fn a_norm_sq(&self) -> f64 {
        self.sff.iter().map(|v| v * v).sum()
    }

    /// Frobenius norm of `π₂` on the tangent plane, `√Σ λ_i²`.
    pub fn lambda(&self) -> f64 {
        let p = self.p();
        self.tangent.rows(p, self.n_total() - p).norm()
    }

    pub fn with_scaled_sff(&self, t: f64) -> Self {
        Self {
            sff: self.sff.iter().map(|v| v * t).collect(),
            ..self.clone()
        }
    }

    /// Replaces the tangent frame by `e'_a = Σ_i e_i q_{ia}` and transforms
    /// the second fundamental form to match.
    pub fn with_rotated_tangent(&self, q: &DMatrix<f64>) -> Result<Self> {
        let (p, c) = (self.p(), self.codim());
        if q.nrows() != p || q.ncols() != p {
            return Err(SymError::DimensionMismatch {
                expected: p,
                got: q.nrows(),
            });
        }
        let mut sff = vec![0.0; p * p * c];
        for a in 0..p {
            for b in 0..p {
                for j in 0..c {
                    let mut acc = 0.0;
                    for i in 0..p {
                        for k in 0..p {
                            acc += q[(i, a)] * q[(k, b)] * self.b(i, k, j);
                        }
                    }
                    sff[(a * p + b) * c + j] = acc;
                }
            }
        }
        Self::new(&self.tangent * q, self.normal.clone(), sff)
    }

    fn check_space(&self, space: &ProductSpace) -> Result<()> {
        if self.n_total() != space.n_total() {
            return Err(SymError::DimensionMismatch {
                expected: space.n_total(),
                got: self.n_total(),
            });
        }
        if self.p() != space.p() {
            return Err(SymError::DimensionMismatch {
                expected: space.p(),
                got: self.p(),
            });
        }
        Ok(())
    }
}

/// Solves `Σ t²σ²/(1+t²σ²) = λ²` for the graph scale `t`, rounding down.
fn graph_scale(sigmas: &[f64], lambda: f64) -> f64 {
    let target = lambda * lambda;
    let f = |t: f64| -> f64 {
        sigmas
            .iter()
            .map(|s| {
                let ts = t * s;
                ts * ts / (1.0 + ts * ts)
            })
            .sum()
    };
    if target == 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    let mut guard = 0;
    while f(hi) < target && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A germ whose tangent plane is the graph of a random map `m₁ → m₂` with
/// Frobenius `π₂`-norm exactly `lambda` (up to rounding, never above it).
pub fn random_germ_at(
    space: &ProductSpace,
    lambda: f64,
    magnitude: f64,
    seed: u64,
) -> Result<SubmanifoldGerm> {
    let mut rng = sampling::rng_for(seed);
    build_germ(space, lambda, magnitude, &mut rng)
}

/// A random minimal germ with `π₂`-norm drawn uniformly from `[0, lambda_max]`
/// and `‖A‖ = magnitude`. The same seed always gives the same germ.
pub fn random_germ(
    space: &ProductSpace,
    lambda_max: f64,
    magnitude: f64,
    seed: u64,
) -> Result<SubmanifoldGerm> {
    if !(0.0..1.0).contains(&lambda_max) {
        return Err(SymError::InvalidParameter(format!(
            "lambda_max must lie in [0, 1), got {lambda_max}"
        )));
    }
    let mut rng = sampling::rng_for(seed);
    let u: f64 = rng.random();
    build_germ(space, lambda_max * u, magnitude, &mut rng)
}

fn build_germ(
    space: &ProductSpace,
    lambda: f64,
    magnitude: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<SubmanifoldGerm> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(SymError::InvalidParameter(format!(
            "lambda must lie in [0, 1), got {lambda}"
        )));
    }
    if !(magnitude >= 0.0 && magnitude.is_finite()) {
        return Err(SymError::InvalidParameter(format!(
            "magnitude must be finite and non-negative, got {magnitude}"
        )));
    }
    let (p, n) = (space.p(), space.n_total());
    let c = n - p;
    let g = gaussian_matrix(rng, c, p);
    let sigmas: Vec<f64> = g
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    let t = graph_scale(&sigmas, lambda);

    let mut tangent = DMatrix::zeros(n, p);
    tangent.view_mut((0, 0), (p, p)).fill_with_identity();
    tangent.view_mut((p, 0), (c, p)).copy_from(&(&g * t));
    let mut normal = DMatrix::zeros(n, c);
    normal
        .view_mut((0, 0), (p, c))
        .copy_from(&(g.transpose() * -t));
    normal.view_mut((p, 0), (c, c)).fill_with_identity();
    if !orthonormalize_columns(&mut tangent) || !orthonormalize_columns(&mut normal) {
        return Err(SymError::Degenerate("graph frame collapsed".into()));
    }
    let tangent = tangent * random_orthogonal(rng, p);
    let normal = normal * random_orthogonal(rng, c);

    let mut sff = vec![0.0; p * p * c];
    for j in 0..c {
        let s = gaussian_matrix(rng, p, p);
        let mut sym = (&s + s.transpose()) * 0.5;
        let mean = sym.trace() / p as f64;
        for i in 0..p {
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
    SubmanifoldGerm::new(tangent, normal, sff)
}

/// Germ-derived vectors shared by both evaluation routes, in `m`-coordinates.
struct Frames {
    p: usize,
    c: usize,
    e: Vec<Vec<f64>>,
    eta: Vec<Vec<f64>>,
    /// `A^{η_j} e_k` at `j * p + k`
    ae: Vec<Vec<f64>>,
    /// `B(e_i, e_k)` at `i * p + k`
    bv: Vec<Vec<f64>>,
}

impl Frames {
    fn new(germ: &SubmanifoldGerm) -> Self {
        let (p, c, n) = (germ.p(), germ.codim(), germ.n_total());
        let col =
            |m: &DMatrix<f64>, i: usize| -> Vec<f64> { m.column(i).iter().copied().collect() };
        let e: Vec<_> = (0..p).map(|i| col(&germ.tangent, i)).collect();
        let eta: Vec<_> = (0..c).map(|j| col(&germ.normal, j)).collect();
        let mut ae = Vec::with_capacity(c * p);
        for j in 0..c {
            for k in 0..p {
                let mut v = vec![0.0; n];
                for (l, el) in e.iter().enumerate() {
                    let b = germ.b(k, l, j);
                    v.iter_mut().zip(el).for_each(|(o, x)| *o += b * x);
                }
                ae.push(v);
            }
        }
        let mut bv = Vec::with_capacity(p * p);
        for i in 0..p {
            for k in 0..p {
                let mut v = vec![0.0; n];
                for (j, ej) in eta.iter().enumerate() {
                    let b = germ.b(i, k, j);
                    v.iter_mut().zip(ej).for_each(|(o, x)| *o += b * x);
                }
                bv.push(v);
            }
        }
        Self {
            p,
            c,
            e,
            eta,
            ae,
            bv,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

fn restrict(v: &[f64], range: std::ops::Range<usize>) -> Vec<f64> {
    v.iter()
        .enumerate()
        .map(|(i, x)| if range.contains(&i) { *x } else { 0.0 })
        .collect()
}

/// The two parts of the sixth term: the first factor evaluated both by the
/// constant-curvature expansion and by brackets, and the second factor.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Term6Split {
    pub factor1_expansion: Option<f64>,
    pub factor1_bracket: f64,
    pub factor2: f64,
}

fn term6_split(space: &ProductSpace, fr: &Frames) -> Term6Split {
    let pair = space.pair();
    let (p, c, n) = (fr.p, fr.c, space.n_total());
    let pi1 = |v: &[f64]| restrict(v, 0..p);
    let pi2 = |v: &[f64]| restrict(v, p..n);
    let mut f1_bracket = 0.0;
    let mut f2 = 0.0;
    let mut f1_expansion = 0.0;
    for j in 0..c {
        for i in 0..p {
            let ai = &fr.ae[j * p + i];
            for k in 0..p {
                let ak = &fr.ae[j * p + k];
                let (ei, ek) = (&fr.e[i], &fr.e[k]);
                let l = pair.bracket_m_to_h(&pi1(ei), &pi1(ek));
                let r = pair.bracket_m_to_h(&pi1(ai), &pi1(ak));
                f1_bracket -= 2.0 * dot(&l, &r);
                let l = pair.bracket_m_to_h(&pi2(ei), &pi2(ek));
                let r = pair.bracket_m_to_h(&pi2(ai), &pi2(ak));
                f2 -= 2.0 * dot(&l, &r);
                let (ei1, ek1, ai1, ak1) = (&ei[..p], &ek[..p], &ai[..p], &ak[..p]);
                f1_expansion += -dot(ei1, ai1) * dot(ek1, ak1) + dot(ek1, ai1) * dot(ei1, ak1);
            }
        }
    }
    let expansion = space.sphere_curvature().map(|k| 2.0 * k * f1_expansion);
    Term6Split {
        factor1_expansion: expansion,
        factor1_bracket: f1_bracket,
        factor2: f2,
    }
}

/// The six terms through their bracket rewrites.
fn lemma_route(space: &ProductSpace, fr: &Frames) -> [f64; 6] {
    let pair = space.pair();
    let (p, c) = (fr.p, fr.c);
    let mut t = [0.0; 6];

    // ⟨(1)⟩ = 2Σ⟨[A^j e_k, e_i], [B(e_i,e_k), η_j]⟩ and its mirror for ⟨(2)⟩
    for j in 0..c {
        for k in 0..p {
            let a = &fr.ae[j * p + k];
            for i in 0..p {
                let b = &fr.bv[i * p + k];
                let l = pair.bracket_m_to_h(a, &fr.e[i]);
                let r = pair.bracket_m_to_h(b, &fr.eta[j]);
                t[0] += 2.0 * dot(&l, &r);
                let l = pair.bracket_m_to_h(&fr.e[i], a);
                let r = pair.bracket_m_to_h(&fr.eta[j], b);
                t[1] += 2.0 * dot(&l, &r);
            }
        }
    }

    // ⟨(3)⟩ by splitting the Ricci trace into tangent and normal parts,
    // ⟨(4)⟩ as the tangent part directly
    let ric = pair.ricci();
    for a in &fr.ae {
        let av = nalgebra::DVector::from_column_slice(a);
        t[2] += (av.transpose() * &ric * &av)[(0, 0)];
        for eta in &fr.eta {
            t[2] -= norm_sq(&pair.bracket_m_to_h(a, eta));
        }
        for e in &fr.e {
            t[3] += norm_sq(&pair.bracket_m_to_h(e, a));
        }
    }

    // ⟨(5)⟩ = −Σ‖[B(e_k,e_l), e_i]‖²
    for b in &fr.bv {
        for e in &fr.e {
            t[4] -= norm_sq(&pair.bracket_m_to_h(b, e));
        }
    }

    let split = term6_split(space, fr);
    t[5] = split.factor1_expansion.unwrap_or(split.factor1_bracket) + split.factor2;
    t
}

/// The six terms evaluated from their defining sums with the curvature operator.
fn direct_route(space: &ProductSpace, germ: &SubmanifoldGerm, fr: &Frames) -> [f64; 6] {
    let pair = space.pair();
    let alg = pair.algebra();
    let (p, c) = (fr.p, fr.c);
    let lift = |v: &[f64]| pair.from_m_coords(v);
    let e: Vec<AlgebraVector> = fr.e.iter().map(|v| lift(v)).collect();
    let eta: Vec<AlgebraVector> = fr.eta.iter().map(|v| lift(v)).collect();
    let ae: Vec<AlgebraVector> = fr.ae.iter().map(|v| lift(v)).collect();
    let bv: Vec<AlgebraVector> = fr.bv.iter().map(|v| lift(v)).collect();
    let r = |x: &AlgebraVector, y: &AlgebraVector, z: &AlgebraVector| pair.curvature_raw(x, y, z);
    let ip = |x: &AlgebraVector, y: &AlgebraVector| alg.metric_raw(x, y);

    let mut t = [0.0; 6];
    for j in 0..c {
        for k in 0..p {
            for l in 0..p {
                let w = germ.b(k, l, j);
                if w == 0.0 {
                    continue;
                }
                let (mut s1, mut s2, mut s3, mut s4, mut s5, mut s6) =
                    (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
                for i in 0..p {
                    s1 += ip(&r(&e[i], &e[l], &bv[k * p + i]), &eta[j]);
                    s2 += ip(&r(&e[i], &e[k], &bv[l * p + i]), &eta[j]);
                    s3 += ip(&ae[j * p + k], &r(&e[i], &e[l], &e[i]));
                    s4 += ip(&ae[j * p + l], &r(&e[i], &e[k], &e[i]));
                    s5 += ip(&r(&e[i], &bv[k * p + l], &e[i]), &eta[j]);
                    s6 += ip(&ae[j * p + i], &r(&e[i], &e[k], &e[l]));
                }
                t[0] += 2.0 * s1 * w;
                t[1] += 2.0 * s2 * w;
                t[2] -= s3 * w;
                t[3] -= s4 * w;
                t[4] += s5 * w;
                t[5] -= 2.0 * s6 * w;
            }
        }
    }
    t
}

/// `⟨(index), A⟩` for `index` in `1..=6`, through the lemma rewrites.
pub fn simons_term(space: &ProductSpace, germ: &SubmanifoldGerm, index: usize) -> Result<f64> {
    if !(1..=6).contains(&index) {
        return Err(SymError::InvalidParameter(format!(
            "Simons term index must be 1..=6, got {index}"
        )));
    }
    germ.check_space(space)?;
    Ok(lemma_route(space, &Frames::new(germ))[index - 1])
}

/// All six terms by the direct route.
pub fn simons_terms_direct(space: &ProductSpace, germ: &SubmanifoldGerm) -> Result<[f64; 6]> {
    germ.check_space(space)?;
    let fr = Frames::new(germ);
    Ok(direct_route(space, germ, &fr))
}

pub fn term6_parts(space: &ProductSpace, germ: &SubmanifoldGerm) -> Result<Term6Split> {
    germ.check_space(space)?;
    Ok(term6_split(space, &Frames::new(germ)))
}

#[derive(Clone, Debug, Serialize)]
pub struct SimonsBreakdown {
    pub terms: [f64; 6],
    pub direct_terms: [f64; 6],
    pub route_gap: f64,
    pub total: f64,
    pub a_norm_sq: f64,
    pub lambda_used: f64,
    pub lambda_operator: f64,
    pub bound: f64,
    pub margin: f64,
}

/// `(2ρ + 1/(p−1) − CΛ²)‖A‖²`
pub fn main_bound(space: &ProductSpace, lambda: f64, a_norm_sq: f64) -> f64 {
    let k = space.constants();
    let pf = k.p as f64;
    (2.0 * k.rho + 1.0 / (pf - 1.0) - k.c * lambda * lambda) * a_norm_sq
}

/// Evaluates `⟨R(A), A⟩` by both routes and compares it with the bound.
/// Disagreement between the routes is an internal error.
pub fn simons_total(space: &ProductSpace, germ: &SubmanifoldGerm) -> Result<SimonsBreakdown> {
    germ.check_space(space)?;
    let fr = Frames::new(germ);
    let terms = lemma_route(space, &fr);
    let direct_terms = direct_route(space, germ, &fr);
    let a_norm_sq = germ.a_norm_sq();
    let scale = a_norm_sq.max(1.0);
    let mut route_gap = 0.0f64;
    for (idx, (a, b)) in terms.iter().zip(&direct_terms).enumerate() {
        let gap = (a - b).abs();
        route_gap = route_gap.max(gap);
        if gap > ROUTE_TOL * scale {
            return Err(SymError::RouteDisagreement {
                term: idx + 1,
                lemma_route: *a,
                direct_route: *b,
            });
        }
    }
    let total: f64 = terms.iter().sum();
    let lambda = germ.lambda();
    let bound = main_bound(space, lambda, a_norm_sq);
    Ok(SimonsBreakdown {
        terms,
        direct_terms,
        route_gap,
        total,
        a_norm_sq,
        lambda_used: lambda,
        lambda_operator: space.projection_norms_coords(germ.tangent()).operator,
        bound,
        margin: total - bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Lemma {
    L1,
    L3,
    L5,
    /// `L5` with the coefficient `K₁ + K₂²` exactly as printed.
    L5Printed,
    L6,
}

impl Lemma {
    pub const ALL: [Lemma; 5] = [Lemma::L1, Lemma::L3, Lemma::L5, Lemma::L5Printed, Lemma::L6];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::L1 => "L1",
            Lemma::L3 => "L3",
            Lemma::L5 => "L5",
            Lemma::L5Printed => "L5-printed",
            Lemma::L6 => "L6",
        }
    }

    /// Which of the six terms the lemma bounds.
    pub fn term_index(self) -> usize {
        match self {
            Lemma::L1 => 1,
            Lemma::L3 => 3,
            Lemma::L5 | Lemma::L5Printed => 5,
            Lemma::L6 => 6,
        }
    }

    /// Right-hand side of the lemma for measured `Λ` and `‖A‖²`.
    pub fn rhs(self, space: &ProductSpace, lambda: f64, a_norm_sq: f64) -> f64 {
        let k = space.constants();
        let pf = k.p as f64;
        let cod = (k.n_total - k.p) as f64;
        let (k1s, k2s) = (k.k1 * k.k1, k.k2 * k.k2);
        let l2 = lambda * lambda;
        match self {
            Lemma::L1 => -2.0 * pf * pf * cod * (k1s + k2s) * l2 * a_norm_sq,
            Lemma::L3 => k.rho * a_norm_sq - pf * cod * cod * (k1s + k2s) * l2 * a_norm_sq,
            Lemma::L5 => -pf * pf * pf * (k1s + k2s) * l2 * a_norm_sq,
            Lemma::L5Printed => -pf * pf * pf * (k.k1 + k2s) * l2 * a_norm_sq,
            Lemma::L6 => {
                a_norm_sq / (pf - 1.0)
                    - ((pf * pf + 2.0) / (pf - 1.0) + 2.0 * pf * pf * cod * k2s) * l2 * a_norm_sq
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LemmaCheck {
    pub lemma: Lemma,
    pub term: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Lemma check from an existing breakdown.
pub fn lemma_from_breakdown(
    space: &ProductSpace,
    breakdown: &SimonsBreakdown,
    lemma: Lemma,
) -> LemmaCheck {
    let term = breakdown.terms[lemma.term_index() - 1];
    let rhs = lemma.rhs(space, breakdown.lambda_used, breakdown.a_norm_sq);
    LemmaCheck {
        lemma,
        term,
        rhs,
        margin: term - rhs,
    }
}

/// `⟨(n), A⟩ − RHS` for the lemma bounding term `n`, with `Λ` the germ's
/// measured Frobenius `π₂`-norm.
pub fn verify_lemma(
    space: &ProductSpace,
    germ: &SubmanifoldGerm,
    lemma: Lemma,
) -> Result<LemmaCheck> {
    let term = simons_term(space, germ, lemma.term_index())?;
    let rhs = lemma.rhs(space, germ.lambda(), germ.a_norm_sq());
    Ok(LemmaCheck {
        lemma,
        term,
        rhs,
        margin: term - rhs,
    })
}

/// `Σ_{i≠j} ⟨R_{e_i,e_j} e_j, e_i⟩`, the ambient sectional curvatures of the tangent plane.
pub fn ambient_sectional_sum(space: &ProductSpace, germ: &SubmanifoldGerm) -> Result<f64> {
    germ.check_space(space)?;
    let pair = space.pair();
    let p = germ.p();
    let mut acc = 0.0;
    for i in 0..p {
        for j in 0..p {
            if i != j {
                acc += pair.bracket_sq(
                    germ.tangent.column(i).as_slice(),
                    germ.tangent.column(j).as_slice(),
                );
            }
        }
    }
    Ok(acc)
}

/// Scalar curvature of the germ from the Gauss equation,
/// `Σ_{i≠j}(⟨R^X e_i e_j e_j e_i⟩ + ⟨B_ii, B_jj⟩ − ‖B_ij‖²)`.
pub fn intrinsic_scalar(space: &ProductSpace, germ: &SubmanifoldGerm) -> Result<f64> {
    let mut k = ambient_sectional_sum(space, germ)?;
    let (p, c) = (germ.p(), germ.codim());
    for i in 0..p {
        for l in 0..p {
            if i == l {
                continue;
            }
            for j in 0..c {
                k += germ.b(i, i, j) * germ.b(l, l, j) - germ.b(i, l, j).powi(2);
            }
        }
    }
    Ok(k)
}

/// `‖A‖²` recovered from a supplied intrinsic scalar curvature `K` of a
/// minimal germ: `Σ_{i≠j}⟨R^X_{e_i,e_j} e_j, e_i⟩ − K`.
pub fn gauss_a_norm(space: &ProductSpace, germ: &SubmanifoldGerm, scalar: f64) -> Result<f64> {
    Ok(ambient_sectional_sum(space, germ)? - scalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{rng_for, sample_seed, FrameSearch};
    use crate::symmetric::{build_cpn_pair, build_sphere_pair};
    use approx::assert_abs_diff_eq;

    fn space(a: usize, b: usize) -> ProductSpace {
        ProductSpace::new(
            build_sphere_pair(a).unwrap(),
            build_sphere_pair(b).unwrap(),
            &FrameSearch::new(16, 200, 0),
        )
        .unwrap()
    }

    #[test]
    fn germ_invariants_hold() {
        let s = space(3, 3);
        for seed in 0..20 {
            let g = random_germ(&s, 0.5, 1.3, seed).unwrap();
            assert!(g.lambda() <= 0.5 + 1e-12);
            assert_abs_diff_eq!(g.a_norm_sq(), 1.69, epsilon = 1e-12);
        }
    }

    #[test]
    fn germ_lambda_target_is_met() {
        let s = space(4, 3);
        let g = random_germ_at(&s, 0.3, 1.0, 5).unwrap();
        assert!((g.lambda() - 0.3).abs() < 1e-12);
        assert!(g.lambda() <= 0.3 + 1e-15);
    }

    #[test]
    fn zero_lambda_spans_m1() {
        let s = space(3, 2);
        let g = random_germ(&s, 0.0, 1.0, 3).unwrap();
        assert_eq!(g.lambda(), 0.0);
        assert!(g.tangent().rows(3, 2).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn germ_rejects_bad_input() {
        let s = space(3, 3);
        assert!(random_germ(&s, 1.0, 1.0, 0).is_err());
        let g = random_germ(&s, 0.2, 1.0, 0).unwrap();
        let mut sff = g.sff().to_vec();
        sff[0] += 1e-3;
        assert!(SubmanifoldGerm::new(g.tangent().clone(), g.normal().clone(), sff).is_err());
        let t = g.tangent() * 1.1;
        assert!(SubmanifoldGerm::new(t, g.normal().clone(), g.sff().to_vec()).is_err());
    }

    #[test]
    fn same_seed_same_germ() {
        let s = space(3, 3);
        let a = random_germ(&s, 0.2, 1.0, 99).unwrap();
        let b = random_germ(&s, 0.2, 1.0, 99).unwrap();
        assert_eq!(a, b);
        let c = random_germ(&s, 0.2, 1.0, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_germ_vanishes() {
        let s = space(3, 3);
        let g = random_germ(&s, 0.1, 0.0, 4).unwrap();
        let br = simons_total(&s, &g).unwrap();
        assert!(br.terms.iter().all(|t| *t == 0.0));
        assert_eq!((br.total, br.bound, br.margin), (0.0, 0.0, 0.0));
        for lemma in Lemma::ALL {
            assert_eq!(verify_lemma(&s, &g, lemma).unwrap().margin, 0.0);
        }
    }

    #[test]
    fn routes_agree_and_symmetries_hold() {
        for s in [space(3, 3), space(4, 3)] {
            let lt = s.constants().lambda_tg;
            for i in 0..30 {
                let g = random_germ(&s, lt, 1.0, sample_seed(1, i)).unwrap();
                let br = simons_total(&s, &g).unwrap();
                assert!(br.route_gap <= 1e-8);
                assert!((br.direct_terms[0] - br.direct_terms[1]).abs() <= 1e-9);
                assert!((br.direct_terms[2] - br.direct_terms[3]).abs() <= 1e-9);
                assert!(br.terms[4] <= 0.0);
                let sum: f64 = br.terms.iter().sum();
                assert!((br.total - sum).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn routes_agree_far_from_the_factor() {
        let s = ProductSpace::new(
            build_sphere_pair(3).unwrap(),
            build_cpn_pair(2).unwrap(),
            &FrameSearch::new(16, 200, 0),
        )
        .unwrap();
        for i in 0..10 {
            let g = random_germ(&s, 0.9, 2.0, i).unwrap();
            simons_total(&s, &g).unwrap();
            let split = term6_parts(&s, &g).unwrap();
            let gap = split.factor1_expansion.unwrap() - split.factor1_bracket;
            assert!(gap.abs() <= 1e-9);
        }
    }

    #[test]
    fn margin_vanishes_on_the_factor() {
        let s = space(3, 3);
        let g = random_germ(&s, 0.0, 1.0, 8).unwrap();
        let br = simons_total(&s, &g).unwrap();
        assert!(br.margin.abs() <= 1e-9, "{}", br.margin);
        assert_abs_diff_eq!(br.total, 2.0 * 0.5 + 0.5, epsilon = 1e-9);
        for lemma in [Lemma::L1, Lemma::L3, Lemma::L5, Lemma::L6] {
            assert!(verify_lemma(&s, &g, lemma).unwrap().margin >= -1e-9);
        }
    }

    #[test]
    fn terms_are_quadratic_in_a() {
        let s = space(4, 3);
        let g = random_germ(&s, 0.1, 1.0, 2).unwrap();
        let g3 = g.with_scaled_sff(3.0);
        for n in 1..=6 {
            let a = simons_term(&s, &g, n).unwrap();
            let b = simons_term(&s, &g3, n).unwrap();
            assert!((b - 9.0 * a).abs() <= 1e-9 * 9.0_f64.max(b.abs()));
        }
        assert!(simons_term(&s, &g, 0).is_err());
        assert!(simons_term(&s, &g, 7).is_err());
    }

    #[test]
    fn terms_are_frame_gauge_invariant() {
        let s = space(3, 3);
        let g = random_germ(&s, 0.15, 1.0, 12).unwrap();
        let q = random_orthogonal(&mut rng_for(77), 3);
        let h = g.with_rotated_tangent(&q).unwrap();
        for n in 1..=6 {
            let a = simons_term(&s, &g, n).unwrap();
            let b = simons_term(&s, &h, n).unwrap();
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn gauss_round_trip() {
        let s = space(3, 3);
        for seed in 0..10 {
            let g = random_germ(&s, 0.2, 0.7, seed).unwrap();
            let k = intrinsic_scalar(&s, &g).unwrap();
            let a = gauss_a_norm(&s, &g, k).unwrap();
            assert!((a - g.a_norm_sq()).abs() <= 1e-9);
        }
    }

    #[test]
    fn totally_geodesic_sphere_has_scalar_p_over_2() {
        for p in 2..=4 {
            let s = space(p, 2);
            let g = random_germ(&s, 0.0, 0.0, 1).unwrap();
            let k = p as f64 / 2.0;
            assert!(gauss_a_norm(&s, &g, k).unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn ambient_sum_bound() {
        let s = space(3, 3);
        let k = s.constants();
        let pf = k.p as f64;
        for seed in 0..20 {
            let g = random_germ(&s, 0.5, 1.0, seed).unwrap();
            let l = g.lambda();
            let bound = pf * (pf - 1.0) * (1.0 / (2.0 * (pf - 1.0)) + l * l * k.k2 * k.k2);
            assert!(ambient_sectional_sum(&s, &g).unwrap() <= bound + 1e-9);
        }
    }

    #[test]
    fn graph_scale_inverts() {
        let sig = [0.5, 1.2, 2.0];
        let t = graph_scale(&sig, 0.4);
        let f: f64 = sig
            .iter()
            .map(|s| (t * s).powi(2) / (1.0 + (t * s).powi(2)))
            .sum();
        assert!((f.sqrt() - 0.4).abs() < 1e-14 && f.sqrt() <= 0.4);
    }
}
