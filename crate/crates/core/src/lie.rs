//! Finite-dimensional real Lie algebras described by structure constants.
//!
//! An algebra is stored as the dense tensor `c[i][j][k]` with
//! `[b_i, b_j] = Σ_k c[i][j][k] b_k`, a sparse copy of the same tensor for
//! fast brackets, and the Killing form `B(b_i, b_j) = tr(ad b_i ∘ ad b_j)`.
//! The background metric is `⟨x, y⟩ = −B(x, y)`.
//!
//! The classical families are built from an explicit matrix basis: brackets
//! are matrix commutators projected back onto the basis once, after which the
//! real structure constants are frozen and no complex or quaternionic
//! arithmetic is needed downstream.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SymError};
use crate::tolerance;

/// Structure constants smaller than this are frozen to exactly zero.
const STRUCTURE_SNAP: f64 = 1e-14;

/// An element of a Lie algebra, in the coordinates of the algebra basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraVector {
    coords: DVector<f64>,
}

impl AlgebraVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self {
            coords: DVector::from_vec(coords),
        }
    }

    pub fn from_dvector(coords: DVector<f64>) -> Self {
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coords: DVector::zeros(dim),
        }
    }

    /// The `i`-th basis element.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coords: &self.coords * s,
        }
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &AlgebraVector) {
        self.coords.axpy(a, &x.coords, 1.0);
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.amax()
    }
}

impl Add for &AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, rhs: &AlgebraVector) -> AlgebraVector {
        AlgebraVector {
            coords: &self.coords + &rhs.coords,
        }
    }
}

impl Sub for &AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, rhs: &AlgebraVector) -> AlgebraVector {
        AlgebraVector {
            coords: &self.coords - &rhs.coords,
        }
    }
}

impl Neg for &AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> AlgebraVector {
        AlgebraVector {
            coords: -&self.coords,
        }
    }
}

impl Mul<f64> for &AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, rhs: f64) -> AlgebraVector {
        self.scaled(rhs)
    }
}

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    dim: usize,
    labels: Vec<String>,
    /// Dense `c[i][j][k]` at `(i * dim + j) * dim + k`.
    structure: Vec<f64>,
    /// Non-zero entries of `[b_i, b_j]` at `i * dim + j`.
    table: Vec<Vec<(usize, f64)>>,
    killing: DMatrix<f64>,
    compact: bool,
    realization: Option<Vec<DMatrix<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct LieAlgebraDoc {
    dim: usize,
    basis_labels: Vec<String>,
    structure: Vec<Vec<Vec<f64>>>,
    killing: Vec<Vec<f64>>,
}

impl LieAlgebra {
    /// Builds an algebra from dense structure constants, validating
    /// antisymmetry and the Jacobi identity.
    pub fn from_structure(labels: Vec<String>, structure: Vec<f64>) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(SymError::InvalidStructure("empty basis".into()));
        }
        if structure.len() != dim * dim * dim {
            return Err(SymError::DimensionMismatch {
                expected: dim * dim * dim,
                got: structure.len(),
            });
        }
        let tol = tolerance::exact();
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let a = structure[(i * dim + j) * dim + k];
                    let b = structure[(j * dim + i) * dim + k];
                    if (a + b).abs() > tol {
                        return Err(SymError::InvalidStructure(format!(
                            "antisymmetry violated at ({i}, {j}, {k}): {a} vs {b}"
                        )));
                    }
                }
            }
        }
        let alg = Self::assemble(labels, structure, None);
        let jac = alg.jacobi_residual();
        if jac > tol {
            return Err(SymError::InvalidStructure(format!(
                "Jacobi identity residual {jac:.3e}"
            )));
        }
        Ok(alg)
    }

    /// Builds an algebra from a basis of real matrices closed under the
    /// commutator. The matrices are kept as the defining representation.
    pub fn from_matrix_basis(labels: Vec<String>, mats: Vec<DMatrix<f64>>) -> Result<Self> {
        let dim = mats.len();
        if dim == 0 || labels.len() != dim {
            return Err(SymError::InvalidStructure(
                "labels and matrices must be non-empty and of equal length".into(),
            ));
        }
        let gram = DMatrix::from_fn(dim, dim, |a, b| mats[a].dot(&mats[b]));
        let solver = GramSolver::new(gram)
            .ok_or_else(|| SymError::Degenerate("matrix basis is linearly dependent".into()))?;

        let mut structure = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let comm = &mats[i] * &mats[j] - &mats[j] * &mats[i];
                let rhs = DVector::from_fn(dim, |k, _| mats[k].dot(&comm));
                let coef = solver.solve(rhs);
                let mut rebuilt = DMatrix::zeros(comm.nrows(), comm.ncols());
                for k in 0..dim {
                    rebuilt += &mats[k] * coef[k];
                }
                let resid = (&comm - rebuilt).norm();
                if resid > tolerance::exact() * comm.norm().max(1.0) {
                    return Err(SymError::InvalidStructure(format!(
                        "commutator of {} and {} leaves the span (residual {resid:.3e})",
                        labels[i], labels[j]
                    )));
                }
                for k in 0..dim {
                    let c = if coef[k].abs() < STRUCTURE_SNAP {
                        0.0
                    } else {
                        coef[k]
                    };
                    structure[(i * dim + j) * dim + k] = c;
                    structure[(j * dim + i) * dim + k] = -c;
                }
            }
        }
        Ok(Self::assemble(labels, structure, Some(mats)))
    }

    fn assemble(
        labels: Vec<String>,
        structure: Vec<f64>,
        realization: Option<Vec<DMatrix<f64>>>,
    ) -> Self {
        let dim = labels.len();
        let mut table = vec![Vec::new(); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let row = &structure[(i * dim + j) * dim..(i * dim + j + 1) * dim];
                table[i * dim + j] = row
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0.0)
                    .map(|(k, c)| (k, *c))
                    .collect();
            }
        }
        // B_ij = Σ_{k,l} c[i][l][k] c[j][k][l], upper triangle mirrored so the
        // cached matrix is exactly symmetric.
        let mut killing = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let mut acc = 0.0;
                for l in 0..dim {
                    for &(k, c) in &table[i * dim + l] {
                        acc += c * structure[(j * dim + k) * dim + l];
                    }
                }
                killing[(i, j)] = acc;
                killing[(j, i)] = acc;
            }
        }
        let eig = SymmetricEigen::new(killing.clone());
        let compact = eig.eigenvalues.iter().all(|&e| e < -tolerance::exact());
        Self {
            dim,
            labels,
            structure,
            table,
            killing,
            compact,
            realization,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn killing_matrix(&self) -> &DMatrix<f64> {
        &self.killing
    }

    /// Negative-definite Killing form.
    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn killing_eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(self.killing.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Matrices of the defining representation, when the algebra was built from one.
    pub fn realization(&self) -> Option<&[DMatrix<f64>]> {
        self.realization.as_deref()
    }

    fn check(&self, x: &AlgebraVector) -> Result<()> {
        if x.dim() != self.dim {
            return Err(SymError::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn bracket_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0.0 {
                    continue;
                }
                let s = xi * yj;
                for &(k, c) in &self.table[i * self.dim + j] {
                    out[k] += s * c;
                }
            }
        }
    }

    pub(crate) fn bracket_raw(&self, x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
        let mut out = vec![0.0; self.dim];
        self.bracket_into(x.coords(), y.coords(), &mut out);
        AlgebraVector::new(out)
    }

    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.bracket_raw(x, y))
    }

    pub(crate) fn killing_raw(&self, x: &AlgebraVector, y: &AlgebraVector) -> f64 {
        x.as_dvector().dot(&(&self.killing * y.as_dvector()))
    }

    pub fn killing_form(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.killing_raw(x, y))
    }

    pub(crate) fn metric_raw(&self, x: &AlgebraVector, y: &AlgebraVector) -> f64 {
        -self.killing_raw(x, y)
    }

    /// The background inner product `−B(x, y)`.
    pub fn metric(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<f64> {
        Ok(-self.killing_form(x, y)?)
    }

    pub fn norm(&self, x: &AlgebraVector) -> Result<f64> {
        Ok(self.metric(x, x)?.max(0.0).sqrt())
    }

    /// Gram–Schmidt with respect to the metric. Fails when the input is
    /// (numerically) rank deficient.
    pub fn orthonormalize(&self, vectors: &[AlgebraVector]) -> Result<Vec<AlgebraVector>> {
        for v in vectors {
            self.check(v)?;
        }
        if vectors.is_empty() {
            return Ok(Vec::new());
        }
        let n = vectors.len();
        let gram = DMatrix::from_fn(n, n, |a, b| self.metric_raw(&vectors[a], &vectors[b]));
        let min_eig = SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < tolerance::DEGENERACY {
            return Err(SymError::Degenerate(format!(
                "Gram matrix has smallest eigenvalue {min_eig:.3e}"
            )));
        }
        let mut out: Vec<AlgebraVector> = Vec::with_capacity(n);
        for v in vectors {
            let mut w = v.clone();
            // two passes keep the result orthonormal to ~1e-15
            for _ in 0..2 {
                for u in &out {
                    let c = self.metric_raw(u, &w);
                    w.axpy(-c, u);
                }
            }
            let nrm = self.metric_raw(&w, &w).sqrt();
            out.push(w.scaled(1.0 / nrm));
        }
        Ok(out)
    }

    /// Orthonormal basis of the span of `vectors`, dropping vectors whose
    /// component outside the running span is below `rel_tol` of their norm.
    pub fn orthonormal_span(&self, vectors: &[AlgebraVector], rel_tol: f64) -> Vec<AlgebraVector> {
        let mut out: Vec<AlgebraVector> = Vec::new();
        for v in vectors {
            let n0 = self.metric_raw(v, v).max(0.0).sqrt();
            if n0 == 0.0 {
                continue;
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for u in &out {
                    let c = self.metric_raw(u, &w);
                    w.axpy(-c, u);
                }
            }
            let nrm = self.metric_raw(&w, &w).max(0.0).sqrt();
            if nrm > rel_tol * n0 {
                out.push(w.scaled(1.0 / nrm));
            }
        }
        out
    }

    /// Largest |Σ_k (c_ijk c_klm + c_jlk c_kim + c_lik c_kjm)| over all index tuples.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        let mut acc = vec![0.0; d];
        for i in 0..d {
            for j in (i + 1)..d {
                for l in (j + 1)..d {
                    acc.iter_mut().for_each(|v| *v = 0.0);
                    for (a, b, c) in [(i, j, l), (j, l, i), (l, i, j)] {
                        for &(k, s) in &self.table[a * d + b] {
                            for &(m, t) in &self.table[k * d + c] {
                                acc[m] += s * t;
                            }
                        }
                    }
                    worst = acc.iter().fold(worst, |w, v| w.max(v.abs()));
                }
            }
        }
        worst
    }

    /// Largest deviation of the cached Killing matrix from `tr(ad b_i ∘ ad b_j)`
    /// recomputed densely from the structure constants.
    pub fn killing_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    for l in 0..d {
                        acc += self.structure_constant(i, l, k) * self.structure_constant(j, k, l);
                    }
                }
                worst = worst.max((acc - self.killing[(i, j)]).abs());
            }
        }
        worst
    }

    /// |B([z,x], y) + B(x, [z,y])|
    pub fn invariance_residual(
        &self,
        x: &AlgebraVector,
        y: &AlgebraVector,
        z: &AlgebraVector,
    ) -> Result<f64> {
        let zx = self.bracket(z, x)?;
        let zy = self.bracket(z, y)?;
        Ok((self.killing_raw(&zx, y) + self.killing_raw(x, &zy)).abs())
    }

    /// Image of `x` in the defining representation.
    pub fn to_matrix(&self, x: &AlgebraVector) -> Option<DMatrix<f64>> {
        let mats = self.realization.as_ref()?;
        let mut out = DMatrix::zeros(mats[0].nrows(), mats[0].ncols());
        for (m, c) in mats.iter().zip(x.coords()) {
            out += m * *c;
        }
        Some(out)
    }

    /// Coordinates of a matrix in the defining representation (least squares
    /// onto the basis).
    pub fn from_matrix(&self, m: &DMatrix<f64>) -> Option<AlgebraVector> {
        let mats = self.realization.as_ref()?;
        let d = mats.len();
        let gram = DMatrix::from_fn(d, d, |a, b| mats[a].dot(&mats[b]));
        let rhs = DVector::from_fn(d, |k, _| mats[k].dot(m));
        GramSolver::new(gram).map(|s| AlgebraVector::from_dvector(s.solve(rhs)))
    }

    /// Direct sum `self ⊕ other`; coordinates of `self` come first.
    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let (d1, d2) = (self.dim, other.dim);
        let d = d1 + d2;
        let mut structure = vec![0.0; d * d * d];
        for i in 0..d1 {
            for j in 0..d1 {
                for k in 0..d1 {
                    structure[(i * d + j) * d + k] = self.structure_constant(i, j, k);
                }
            }
        }
        for i in 0..d2 {
            for j in 0..d2 {
                for k in 0..d2 {
                    structure[((d1 + i) * d + d1 + j) * d + d1 + k] =
                        other.structure_constant(i, j, k);
                }
            }
        }
        let labels = self
            .labels
            .iter()
            .map(|l| format!("1:{l}"))
            .chain(other.labels.iter().map(|l| format!("2:{l}")))
            .collect();
        let realization = match (&self.realization, &other.realization) {
            (Some(a), Some(b)) => {
                let (n1, n2) = (a[0].nrows(), b[0].nrows());
                let embed = |m: &DMatrix<f64>, off: usize| {
                    let mut out = DMatrix::zeros(n1 + n2, n1 + n2);
                    out.view_mut((off, off), (m.nrows(), m.ncols()))
                        .copy_from(m);
                    out
                };
                Some(
                    a.iter()
                        .map(|m| embed(m, 0))
                        .chain(b.iter().map(|m| embed(m, n1)))
                        .collect(),
                )
            }
            _ => None,
        };
        Self::assemble(labels, structure, realization)
    }

    pub fn to_json(&self) -> Result<String> {
        let d = self.dim;
        let doc = LieAlgebraDoc {
            dim: d,
            basis_labels: self.labels.clone(),
            structure: (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| (0..d).map(|k| self.structure_constant(i, j, k)).collect())
                        .collect()
                })
                .collect(),
            killing: (0..d)
                .map(|i| (0..d).map(|j| self.killing[(i, j)]).collect())
                .collect(),
        };
        crate::json::to_string(&doc)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: LieAlgebraDoc = serde_json::from_str(s)?;
        let d = doc.dim;
        if doc.basis_labels.len() != d
            || doc.structure.len() != d
            || doc
                .structure
                .iter()
                .any(|r| r.len() != d || r.iter().any(|c| c.len() != d))
            || doc.killing.len() != d
            || doc.killing.iter().any(|r| r.len() != d)
        {
            return Err(SymError::InvalidStructure(
                "array shapes do not match `dim`".into(),
            ));
        }
        let structure = doc.structure.into_iter().flatten().flatten().collect();
        let mut alg = Self::from_structure(doc.basis_labels, structure)?;
        let stored = DMatrix::from_fn(d, d, |i, j| doc.killing[i][j]);
        let diff = (&stored - &alg.killing).amax();
        if diff > tolerance::exact() {
            return Err(SymError::InvalidStructure(format!(
                "stored Killing form disagrees with structure constants by {diff:.3e}"
            )));
        }
        alg.killing = stored;
        Ok(alg)
    }
}

/// Solves `G c = r` for a basis Gram matrix. Orthogonal bases are divided
/// through directly so that integer structure constants stay exact.
enum GramSolver {
    Diagonal(DVector<f64>),
    Cholesky(nalgebra::linalg::Cholesky<f64, nalgebra::Dyn>),
}

impl GramSolver {
    fn new(gram: DMatrix<f64>) -> Option<Self> {
        let n = gram.nrows();
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || gram[(i, j)] == 0.0));
        if diagonal {
            let d = gram.diagonal();
            if d.iter().all(|&v| v > 0.0) {
                return Some(Self::Diagonal(d));
            }
            return None;
        }
        gram.cholesky().map(Self::Cholesky)
    }

    fn solve(&self, rhs: DVector<f64>) -> DVector<f64> {
        match self {
            Self::Diagonal(d) => rhs.component_div(d),
            Self::Cholesky(c) => c.solve(&rhs),
        }
    }
}

fn elementary(n: usize, a: usize, b: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(a, b)] = 1.0;
    m
}

/// `so(n)` on the basis `L_ab = E_ab − E_ba` (a < b), so that
/// `[L_ab, L_bc] = L_ac` for a < b < c.
pub fn build_so(n: usize) -> Result<LieAlgebra> {
    if n < 3 {
        return Err(SymError::InvalidDimension {
            family: "so",
            got: n,
            min: 3,
        });
    }
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            labels.push(format!("L{}_{}", a + 1, b + 1));
            mats.push(elementary(n, a, b) - elementary(n, b, a));
        }
    }
    LieAlgebra::from_matrix_basis(labels, mats)
}

/// Real form of a complex matrix `X + iY` as `[[X, −Y], [Y, X]]`.
fn complex_to_real(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    let n = re.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(re);
    out.view_mut((n, n), (n, n)).copy_from(re);
    out.view_mut((0, n), (n, n)).copy_from(&(-im));
    out.view_mut((n, 0), (n, n)).copy_from(im);
    out
}

/// `su(n)` as traceless anti-Hermitian matrices, on a basis orthonormal for
/// `−tr(XY)`: `(E_ab − E_ba)/√2`, `i(E_ab + E_ba)/√2` and the generalized
/// Gell-Mann diagonals.
pub fn build_su(n: usize) -> Result<LieAlgebra> {
    if n < 2 {
        return Err(SymError::InvalidDimension {
            family: "su",
            got: n,
            min: 2,
        });
    }
    let zero = DMatrix::zeros(n, n);
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let re = (elementary(n, a, b) - elementary(n, b, a)) * FRAC_1_SQRT_2;
            labels.push(format!("X{}_{}", a + 1, b + 1));
            mats.push(complex_to_real(&re, &zero));
            let im = (elementary(n, a, b) + elementary(n, b, a)) * FRAC_1_SQRT_2;
            labels.push(format!("Y{}_{}", a + 1, b + 1));
            mats.push(complex_to_real(&zero, &im));
        }
    }
    for k in 1..n {
        let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
        let mut im = DMatrix::zeros(n, n);
        for a in 0..k {
            im[(a, a)] = scale;
        }
        im[(k, k)] = -(k as f64) * scale;
        labels.push(format!("H{k}"));
        mats.push(complex_to_real(&zero, &im));
    }
    LieAlgebra::from_matrix_basis(labels, mats)
}

/// Left multiplication by the quaternion `q0 + q1 i + q2 j + q3 k` on ℝ⁴.
pub(crate) fn quaternion_left(q: [f64; 4]) -> Matrix4<f64> {
    let [a, b, c, d] = q;
    Matrix4::new(
        a, -b, -c, -d, //
        b, a, -d, c, //
        c, d, a, -b, //
        d, -c, b, a,
    )
}

/// Real 4n×4n form of a quaternionic n×n matrix given entry-wise.
fn quaternionic_to_real(n: usize, entries: &[(usize, usize, [f64; 4])]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(4 * n, 4 * n);
    for &(a, b, q) in entries {
        let blk = quaternion_left(q);
        let mut view = out.view_mut((4 * a, 4 * b), (4, 4));
        view += blk;
    }
    out
}

/// `sp(n)` as quaternionic anti-Hermitian n×n matrices, realized on ℝ^{4n}.
pub fn build_sp(n: usize) -> Result<LieAlgebra> {
    if n < 1 {
        return Err(SymError::InvalidDimension {
            family: "sp",
            got: n,
            min: 1,
        });
    }
    const UNITS: [(char, [f64; 4]); 3] = [
        ('i', [0.0, 1.0, 0.0, 0.0]),
        ('j', [0.0, 0.0, 1.0, 0.0]),
        ('k', [0.0, 0.0, 0.0, 1.0]),
    ];
    let s = FRAC_1_SQRT_2;
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for a in 0..n {
        for (name, q) in UNITS {
            labels.push(format!("{}{}", name.to_ascii_uppercase(), a + 1));
            mats.push(quaternionic_to_real(n, &[(a, a, q)]));
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            labels.push(format!("R{}_{}", a + 1, b + 1));
            mats.push(quaternionic_to_real(
                n,
                &[(a, b, [s, 0.0, 0.0, 0.0]), (b, a, [-s, 0.0, 0.0, 0.0])],
            ));
            for (name, q) in UNITS {
                let qs = q.map(|v| v * s);
                labels.push(format!("{}{}_{}", name.to_ascii_uppercase(), a + 1, b + 1));
                mats.push(quaternionic_to_real(n, &[(a, b, qs), (b, a, qs)]));
            }
        }
    }
    LieAlgebra::from_matrix_basis(labels, mats)
}
