//! Products `X₁ × X₂` of symmetric spaces, the projections `π₁, π₂` onto
//! the factors, and the isolation constants built from them.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Result, SymError};
use crate::lie::AlgebraVector;
use crate::sampling::FrameSearch;
use crate::symmetric::{PairKind, SymmetricPair};

/// Constants of a product space. `k1`, `k2` are maximal bracket norms
/// `‖[X,Y]‖` over unit vectors of each factor, so `k²` is the largest
/// sectional curvature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductConstants {
    pub p: usize,
    #[serde(rename = "N")]
    pub n_total: usize,
    pub q: f64,
    pub rho: f64,
    pub k1: f64,
    pub k2: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda_tg: f64,
    #[serde(rename = "lambda_K")]
    pub lambda_k: f64,
}

impl ProductConstants {
    /// Derives `q`, `C` and both thresholds from the primary data.
    pub fn from_parts(p: usize, n_total: usize, rho: f64, k1: f64, k2: f64) -> Result<Self> {
        if n_total <= p {
            return Err(SymError::InvalidParameter(format!(
                "total dimension {n_total} must exceed p = {p}"
            )));
        }
        let c = constant_c(p, n_total, k1, k2)?;
        Ok(Self {
            p,
            n_total,
            q: 2.0 - 1.0 / (n_total - p) as f64,
            rho,
            k1,
            k2,
            c,
            lambda_tg: lambda_tg(rho, p, c)?,
            lambda_k: lambda_k(rho, p, c, k2)?,
        })
    }
}

/// `C = (4p²(N−p) + 2p(N−p)² + p³)(K₁²+K₂²) + ((p²+2)/(p−1) + 2p²(N−p)K₂²)`
pub fn constant_c(p: usize, n_total: usize, k1: f64, k2: f64) -> Result<f64> {
    if p < 2 {
        return Err(SymError::InvalidDimension {
            family: "product first factor",
            got: p,
            min: 2,
        });
    }
    if n_total <= p {
        return Err(SymError::InvalidParameter(format!(
            "total dimension {n_total} must exceed p = {p}"
        )));
    }
    let pf = p as f64;
    let cod = (n_total - p) as f64;
    let (k1s, k2s) = (k1 * k1, k2 * k2);
    let curv = 4.0 * pf * pf * cod + 2.0 * pf * cod * cod + pf * pf * pf;
    Ok(curv * (k1s + k2s) + ((pf * pf + 2.0) / (pf - 1.0) + 2.0 * pf * pf * cod * k2s))
}

fn threshold(rho: f64, p: usize, denom: f64) -> Result<f64> {
    if p < 2 {
        return Err(SymError::InvalidDimension {
            family: "product first factor",
            got: p,
            min: 2,
        });
    }
    assert!(denom > 0.0, "isolation constant must be positive");
    Ok(((rho + 1.0 / (p as f64 - 1.0)) / denom).sqrt())
}

/// `Λ_tg = √((ρ + 1/(p−1)) / C)`
pub fn lambda_tg(rho: f64, p: usize, c: f64) -> Result<f64> {
    threshold(rho, p, c)
}

/// `Λ_K = √((ρ + 1/(p−1)) / (C + p(p−1)K₂²))`
pub fn lambda_k(rho: f64, p: usize, c: f64, k2: f64) -> Result<f64> {
    let pf = p as f64;
    threshold(rho, p, c + pf * (pf - 1.0) * k2 * k2)
}

/// Volume of the unit round sphere `S^p`.
pub fn unit_sphere_volume(p: usize) -> f64 {
    match p {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (p as f64 - 1.0) * unit_sphere_volume(p - 2),
    }
}

/// Volume of `S^p` in the metric `−B` of `so(p+1)`, where its radius is `√(2(p−1))`.
pub fn sphere_volume_killing(p: usize) -> Result<f64> {
    if p < 2 {
        return Err(SymError::InvalidDimension {
            family: "sphere",
            got: p,
            min: 2,
        });
    }
    let radius = (2.0 * (p as f64 - 1.0)).sqrt();
    Ok(unit_sphere_volume(p) * radius.powi(p as i32))
}

/// `(λ²/(1−λ²))^{p/2} vol(S^p)`: volume bound for the `π₂`-image of a
/// totally geodesic sphere whose tangent planes satisfy `‖π₂‖ ≤ λ`.
pub fn tg_volume_bound(p: usize, lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(SymError::InvalidParameter(format!(
            "lambda must lie in [0, 1), got {lambda}"
        )));
    }
    let l2 = lambda * lambda;
    Ok((l2 / (1.0 - l2)).powf(p as f64 / 2.0) * sphere_volume_killing(p)?)
}

/// Norms of `π₂` restricted to a subspace. `singular_values` are the `λ_i`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearMapNorm {
    pub frobenius: f64,
    pub operator: f64,
    pub singular_values: Vec<f64>,
}

impl LinearMapNorm {
    /// Norms of the map whose rows are the images of an orthonormal basis.
    pub fn of_rows(images: &DMatrix<f64>) -> Self {
        let mut singular_values: Vec<f64> = if images.nrows() == 0 || images.ncols() == 0 {
            vec![0.0; images.nrows()]
        } else {
            images
                .clone()
                .svd(false, false)
                .singular_values
                .iter()
                .copied()
                .collect()
        };
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let frobenius = images.norm();
        let operator = singular_values.first().copied().unwrap_or(0.0);
        Self {
            frobenius,
            operator,
            singular_values,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProductSpace {
    factor1: SymmetricPair,
    factor2: SymmetricPair,
    pair: SymmetricPair,
    constants: ProductConstants,
    search: FrameSearch,
    factor1_rank_one: bool,
}

impl ProductSpace {
    /// Glues two compact symmetric pairs. `K₁`, `K₂` and the rank-one flag of
    /// the first factor come from frame searches with `search`.
    pub fn new(
        factor1: SymmetricPair,
        factor2: SymmetricPair,
        search: &FrameSearch,
    ) -> Result<Self> {
        for f in [&factor1, &factor2] {
            if !f.algebra().is_compact() {
                return Err(SymError::NotCompact(f.name().to_string()));
            }
        }
        let p = factor1.m_dim();
        let n_total = p + factor2.m_dim();
        let algebra = factor1.algebra().direct_sum(factor2.algebra());
        let (d1, d2) = (factor1.algebra().dim(), factor2.algebra().dim());
        let embed1 = |v: &AlgebraVector| {
            let mut c = v.coords().to_vec();
            c.resize(d1 + d2, 0.0);
            AlgebraVector::new(c)
        };
        let embed2 = |v: &AlgebraVector| {
            let mut c = vec![0.0; d1];
            c.extend_from_slice(v.coords());
            AlgebraVector::new(c)
        };
        let h: Vec<_> = factor1
            .h_basis()
            .iter()
            .map(embed1)
            .chain(factor2.h_basis().iter().map(embed2))
            .collect();
        let m: Vec<_> = factor1
            .m_basis()
            .iter()
            .map(embed1)
            .chain(factor2.m_basis().iter().map(embed2))
            .collect();
        let name = format!("{}x{}", factor1.name(), factor2.name());
        let pair = SymmetricPair::new(algebra, &h, &m, name, PairKind::Product)?;
        let k1 = factor1.bracket_norm_max(search)?;
        let k2 = if factor2.m_dim() >= 2 {
            factor2.bracket_norm_max(search)?
        } else {
            0.0
        };
        let constants = ProductConstants::from_parts(p, n_total, pair.rho_min(), k1, k2)?;
        let factor1_rank_one = match factor1.kind() {
            PairKind::Sphere(_)
            | PairKind::ComplexProjective(_)
            | PairKind::QuaternionicProjective(_) => true,
            _ => factor1.m_dim() >= 2 && factor1.is_rank_one(search)?.rank_one,
        };
        Ok(Self {
            factor1,
            factor2,
            pair,
            constants,
            search: *search,
            factor1_rank_one,
        })
    }

    pub fn factor1(&self) -> &SymmetricPair {
        &self.factor1
    }

    pub fn factor2(&self) -> &SymmetricPair {
        &self.factor2
    }

    /// The product as a single symmetric pair; its `m` coordinates list the
    /// `m₁` coordinates first.
    pub fn pair(&self) -> &SymmetricPair {
        &self.pair
    }

    pub fn constants(&self) -> &ProductConstants {
        &self.constants
    }

    pub fn search(&self) -> &FrameSearch {
        &self.search
    }

    pub fn name(&self) -> &str {
        self.pair.name()
    }

    pub fn p(&self) -> usize {
        self.constants.p
    }

    pub fn n_total(&self) -> usize {
        self.constants.n_total
    }

    pub fn codim(&self) -> usize {
        self.constants.n_total - self.constants.p
    }

    pub fn factor1_rank_one(&self) -> bool {
        self.factor1_rank_one
    }

    /// `1/(2(p−1))` when the first factor is the sphere `S^p`.
    pub fn sphere_curvature(&self) -> Option<f64> {
        match self.factor1.kind() {
            PairKind::Sphere(p) => Some(1.0 / (2.0 * (p as f64 - 1.0))),
            _ => None,
        }
    }

    /// Same space with the constants replaced, e.g. by exact values of `K₁, K₂`.
    pub fn with_constants(&self, constants: ProductConstants) -> Self {
        Self {
            constants,
            ..self.clone()
        }
    }

    /// `π₁` on the algebra: keeps the first summand.
    pub fn pi1(&self, x: &AlgebraVector) -> AlgebraVector {
        let d1 = self.factor1.algebra().dim();
        let mut c = x.coords().to_vec();
        c[d1..].iter_mut().for_each(|v| *v = 0.0);
        AlgebraVector::new(c)
    }

    pub fn pi2(&self, x: &AlgebraVector) -> AlgebraVector {
        let d1 = self.factor1.algebra().dim();
        let mut c = x.coords().to_vec();
        c[..d1].iter_mut().for_each(|v| *v = 0.0);
        AlgebraVector::new(c)
    }

    /// Norms of `π₂` on the span of an orthonormal basis of vectors in `m`.
    pub fn projection_norms(&self, basis: &[AlgebraVector]) -> Result<LinearMapNorm> {
        let coords: Vec<_> = basis.iter().map(|v| self.pair.m_coords(v)).collect();
        for (v, c) in basis.iter().zip(&coords) {
            if v.dim() != self.pair.algebra().dim() {
                return Err(SymError::DimensionMismatch {
                    expected: self.pair.algebra().dim(),
                    got: v.dim(),
                });
            }
            let residual = self.pair.m_residual(v);
            if residual > 1e-9 {
                return Err(SymError::NotInSubspace {
                    space: "m",
                    residual,
                });
            }
            debug_assert_eq!(c.len(), self.n_total());
        }
        let k = basis.len();
        let gram = DMatrix::from_fn(k, k, |a, b| {
            self.pair.algebra().metric_raw(&basis[a], &basis[b])
        });
        let err = (gram - DMatrix::identity(k, k)).amax();
        if err > 1e-9 {
            return Err(SymError::Degenerate(format!(
                "subspace basis is not orthonormal (Gram error {err:.3e})"
            )));
        }
        let p = self.p();
        let images = DMatrix::from_fn(k, self.codim(), |r, c| coords[r][p + c]);
        Ok(LinearMapNorm::of_rows(&images))
    }

    /// `π₂` norms for a frame given as columns of `m` coordinates.
    pub fn projection_norms_coords(&self, frame: &DMatrix<f64>) -> LinearMapNorm {
        let p = self.p();
        let images = frame.rows(p, self.codim()).transpose();
        LinearMapNorm::of_rows(&images)
    }
}
