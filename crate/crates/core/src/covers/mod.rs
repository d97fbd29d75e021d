//! Closed-form covering maps and the univalent maps they factor through.
//!
//! A [`CoverSpec`] is a tagged description of one covering map. It knows how
//! to evaluate itself, its Jacobian, which ball it is defined on, and its
//! deck group. Time-dependent families live in [`chain`].

pub mod chain;
pub mod deck;
pub mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::complex::{
    cayley_strip, cayley_strip_derivative, jacobian_with, safe_power, sqrt_one_plus_sq, strip_to_disk,
    CMatrix, CPoint, DiffScheme, NormKind,
};
use crate::embed::EmbeddedSlice;
use crate::error::{Error, Result};

pub use chain::{product_chain, ChainKind, ChainSpec, Factorization, Stability};
pub use deck::{deck_generator, DeckElement};
pub use oracle::DomainOracle;

/// A holomorphic self-map of `C^n` (or of a subset of it).
pub trait HolomorphicMap: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, z: &CPoint) -> Result<CPoint>;

    /// Complex Jacobian. Defaults to central differences.
    fn jacobian(&self, z: &CPoint) -> Result<CMatrix> {
        jacobian_with(|p| self.eval(p), z, DiffScheme::default())
    }
}

/// Where a cover's source variable lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceDomain {
    /// Open unit ball of the given norm.
    Ball(NormKind),
    /// All of `C^n`.
    Whole,
}

impl SourceDomain {
    /// Distance-like margin to the boundary; `+inf` for `C^n`.
    pub fn margin(&self, z: &CPoint) -> f64 {
        match self {
            SourceDomain::Ball(kind) => 1.0 - z.norm(*kind),
            SourceDomain::Whole => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoverKind {
    /// `Psi(w) = (e^{w_1} - 1, w_2, ..., w_n)`.
    Exp { dim: usize },
    /// Slice `f_t(z) = ((1 - iz)/(1 + iz))^{(i/2) e^t} - 1` of the annulus chain.
    AnnulusSlice { t: f64 },
    /// Slice of the generalized annulus chain on the Euclidean ball of `C^n`.
    GeneralizedAnnulusSlice { n: usize, t: f64 },
    /// Coordinatewise product of one-dimensional covers on the polydisk.
    ProductSlice(Vec<CoverSpec>),
    /// `Psi o g` with `g` univalent.
    Composed { psi: Box<CoverSpec>, g: UnivalentMap },
    /// Normalized cover of a round annulus built by [`crate::embed`].
    EmbeddedAnnulusSlice(EmbeddedSlice),
    /// `factor * inner`; only used to engineer failing chains.
    Scaled { factor: f64, inner: Box<CoverSpec> },
}

/// One covering map together with its normalization `(df)_0 = lambda Id`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSpec {
    pub kind: CoverKind,
    pub dim: usize,
    pub domain: SourceDomain,
    pub lambda: f64,
}

impl CoverSpec {
    pub fn exp(dim: usize) -> Self {
        CoverSpec {
            kind: CoverKind::Exp { dim },
            dim,
            domain: SourceDomain::Whole,
            lambda: 1.0,
        }
    }

    pub fn annulus(t: f64) -> Self {
        CoverSpec {
            kind: CoverKind::AnnulusSlice { t },
            dim: 1,
            domain: SourceDomain::Ball(NormKind::Euclidean),
            lambda: t.exp(),
        }
    }

    pub fn generalized_annulus(n: usize, t: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("generalized annulus needs n >= 2, got {n}")));
        }
        Ok(CoverSpec {
            kind: CoverKind::GeneralizedAnnulusSlice { n, t },
            dim: n,
            domain: SourceDomain::Ball(NormKind::Euclidean),
            lambda: t.exp(),
        })
    }

    pub fn product(parts: Vec<CoverSpec>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Invalid("empty product".into()));
        }
        if parts.iter().any(|p| p.dim != 1) {
            return Err(Error::Invalid("product factors must be one-dimensional".into()));
        }
        let lambda = parts[0].lambda;
        if parts.iter().any(|p| (p.lambda - lambda).abs() > 1e-12 * lambda) {
            return Err(Error::MixedNormalization);
        }
        Ok(CoverSpec {
            dim: parts.len(),
            kind: CoverKind::ProductSlice(parts),
            domain: SourceDomain::Ball(NormKind::Sup),
            lambda,
        })
    }

    pub fn composed(psi: CoverSpec, g: UnivalentMap) -> Result<Self> {
        if psi.dim != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: psi.dim,
                got: g.dim(),
            });
        }
        Ok(CoverSpec {
            dim: psi.dim,
            domain: g.domain(),
            lambda: psi.lambda * g.derivative_at_origin(),
            kind: CoverKind::Composed {
                psi: Box::new(psi),
                g,
            },
        })
    }

    pub fn embedded(slice: EmbeddedSlice) -> Self {
        CoverSpec {
            lambda: slice.alpha(),
            kind: CoverKind::EmbeddedAnnulusSlice(slice),
            dim: 1,
            domain: SourceDomain::Ball(NormKind::Euclidean),
        }
    }

    pub fn scaled(factor: f64, inner: CoverSpec) -> Self {
        CoverSpec {
            dim: inner.dim,
            domain: inner.domain,
            lambda: factor * inner.lambda,
            kind: CoverKind::Scaled {
                factor,
                inner: Box::new(inner),
            },
        }
    }

    fn check_point(&self, z: &CPoint) -> Result<()> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.dim(),
            });
        }
        z.ensure_finite()?;
        if let SourceDomain::Ball(kind) = self.domain {
            let r = z.norm(kind);
            if r >= 1.0 {
                return Err(Error::OutsideBall(r));
            }
        }
        Ok(())
    }

    /// Evaluate the cover.
    pub fn eval(&self, z: &CPoint) -> Result<CPoint> {
        self.check_point(z)?;
        match &self.kind {
            CoverKind::Exp { .. } => exp_cover(z),
            CoverKind::AnnulusSlice { t } => Ok(CPoint::scalar(annulus_slice(*t, z[0])?)),
            CoverKind::GeneralizedAnnulusSlice { t, .. } => generalized_annulus_slice(*t, z),
            CoverKind::ProductSlice(parts) => {
                let coords = parts
                    .iter()
                    .enumerate()
                    .map(|(j, p)| p.eval(&CPoint::scalar(z[j])).map(|w| w[0]))
                    .collect::<Result<Vec<_>>>()?;
                CPoint::new(coords)
            }
            CoverKind::Composed { psi, g } => psi.eval(&g.eval(z)?),
            CoverKind::EmbeddedAnnulusSlice(s) => Ok(CPoint::scalar(s.eval(z[0])?)),
            CoverKind::Scaled { factor, inner } => Ok(inner.eval(z)?.scale_re(*factor)),
        }
    }

    /// Closed-form Jacobian.
    pub fn jacobian(&self, z: &CPoint) -> Result<CMatrix> {
        self.check_point(z)?;
        match &self.kind {
            CoverKind::Exp { dim } => {
                let mut d = vec![Complex64::new(1.0, 0.0); *dim];
                d[0] = checked_exp(z[0])?;
                Ok(CMatrix::diagonal(&d))
            }
            CoverKind::AnnulusSlice { t } => {
                let z1 = z[0];
                let f = annulus_slice(*t, z1)?;
                let d = (f + 1.0) * t.exp() * cayley_strip_derivative(z1)?;
                Ok(CMatrix::diagonal(&[d]))
            }
            CoverKind::GeneralizedAnnulusSlice { n, t } => {
                let z1 = z[0];
                let et = t.exp();
                let f1 = annulus_slice(*t, z1)?;
                let s = sqrt_one_plus_sq(z1)?;
                let mut m = CMatrix::zeros(*n);
                m.set(0, 0, (f1 + 1.0) * et * cayley_strip_derivative(z1)?);
                for j in 1..*n {
                    m.set(j, j, et / s);
                    m.set(j, 0, -et * z[j] * z1 / (s * s * s));
                }
                Ok(m)
            }
            CoverKind::ProductSlice(parts) => {
                let blocks = parts
                    .iter()
                    .enumerate()
                    .map(|(j, p)| p.jacobian(&CPoint::scalar(z[j])))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CMatrix::block_diagonal(&blocks))
            }
            CoverKind::Composed { psi, g } => {
                let inner = g.eval(z)?;
                Ok(psi.jacobian(&inner)?.mul(&g.jacobian(z)?))
            }
            CoverKind::EmbeddedAnnulusSlice(s) => Ok(CMatrix::diagonal(&[s.derivative(z[0])?])),
            CoverKind::Scaled { factor, inner } => {
                Ok(inner.jacobian(z)?.scale(Complex64::new(*factor, 0.0)))
            }
        }
    }

    /// Level `t` of a chain slice, when the cover is one.
    pub fn level(&self) -> Option<f64> {
        match &self.kind {
            CoverKind::AnnulusSlice { t } | CoverKind::GeneralizedAnnulusSlice { t, .. } => Some(*t),
            CoverKind::ProductSlice(parts) => parts[0].level(),
            CoverKind::EmbeddedAnnulusSlice(s) => Some(s.level),
            CoverKind::Scaled { inner, .. } => inner.level(),
            CoverKind::Exp { .. } | CoverKind::Composed { .. } => None,
        }
    }
}

impl HolomorphicMap for CoverSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: &CPoint) -> Result<CPoint> {
        CoverSpec::eval(self, z)
    }

    fn jacobian(&self, z: &CPoint) -> Result<CMatrix> {
        CoverSpec::jacobian(self, z)
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn checked_exp(w: Complex64) -> Result<Complex64> {
    if w.re > 700.0 {
        return Err(Error::Overflow(w.re));
    }
    Ok(w.exp())
}

/// `Psi(w) = e^w - 1` on the first coordinate, identity on the rest.
pub fn exp_cover(w: &CPoint) -> Result<CPoint> {
    w.ensure_finite()?;
    let mut out = w.clone();
    out[0] = checked_exp(w[0])? - 1.0;
    Ok(out)
}

/// `f_t(z) = ((1 - iz)/(1 + iz))^{(i/2) e^t} - 1`, the annulus chain slice at
/// level `t`, on the principal branch (the base has positive real part on
/// the disk).
pub fn annulus_slice(t: f64, z: Complex64) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutsideDisk(z.norm()));
    }
    let one = Complex64::new(1.0, 0.0);
    let base = (one - I * z) / (one + I * z);
    let alpha = Complex64::new(0.0, 0.5 * t.exp());
    let log = crate::complex::principal_log(base)?;
    if (alpha * log).re > 700.0 {
        return Err(Error::Overflow((alpha * log).re));
    }
    Ok(safe_power(base, alpha)? - 1.0)
}

/// The annulus chain evaluated on a one-dimensional point.
pub fn annulus_chain(t: f64, z: &CPoint) -> Result<CPoint> {
    if t < 0.0 {
        return Err(Error::Invalid(format!("negative time {t}")));
    }
    CoverSpec::annulus(t).eval(z)
}

/// Outer radius `r_t = exp((pi/4) e^t)` of the annulus `A_t`.
pub fn annulus_radius(t: f64) -> f64 {
    (PI / 4.0 * t.exp()).exp()
}

fn generalized_annulus_slice(t: f64, z: &CPoint) -> Result<CPoint> {
    let et = t.exp();
    let z1 = z[0];
    let s = sqrt_one_plus_sq(z1)?;
    let mut out = Vec::with_capacity(z.dim());
    out.push(annulus_slice(t, z1)?);
    out.extend(z.coords()[1..].iter().map(|zj| et * zj / s));
    CPoint::new(out)
}

/// The generalized annulus chain on the Euclidean ball of `C^n`, `n >= 2`.
pub fn generalized_annulus_chain(t: f64, z: &CPoint) -> Result<CPoint> {
    if t < 0.0 {
        return Err(Error::Invalid(format!("negative time {t}")));
    }
    CoverSpec::generalized_annulus(z.dim(), t)?.eval(z)
}

/// Univalent factors `g_t` in `f_t = Psi o g_t`.
#[derive(Debug, Clone, PartialEq)]
pub enum UnivalentMap {
    /// `z -> scale * g(z)` on the disk, `g` the strip map.
    ScaledStrip { scale: f64 },
    /// `z -> (e^t g(z_1), e^t z_2 / sqrt(1 + z_1^2), ...)` on the ball.
    GeneralizedAnnulusNormal { n: usize, t: f64 },
}

impl UnivalentMap {
    pub fn dim(&self) -> usize {
        match self {
            UnivalentMap::ScaledStrip { .. } => 1,
            UnivalentMap::GeneralizedAnnulusNormal { n, .. } => *n,
        }
    }

    fn domain(&self) -> SourceDomain {
        SourceDomain::Ball(NormKind::Euclidean)
    }

    fn derivative_at_origin(&self) -> f64 {
        match self {
            UnivalentMap::ScaledStrip { scale } => *scale,
            UnivalentMap::GeneralizedAnnulusNormal { t, .. } => t.exp(),
        }
    }

    pub fn eval(&self, z: &CPoint) -> Result<CPoint> {
        match self {
            UnivalentMap::ScaledStrip { scale } => Ok(CPoint::scalar(*scale * cayley_strip(z[0])?)),
            UnivalentMap::GeneralizedAnnulusNormal { t, .. } => {
                let et = t.exp();
                let s = sqrt_one_plus_sq(z[0])?;
                let mut out = vec![et * cayley_strip(z[0])?];
                out.extend(z.coords()[1..].iter().map(|zj| et * zj / s));
                CPoint::new(out)
            }
        }
    }

    pub fn jacobian(&self, z: &CPoint) -> Result<CMatrix> {
        match self {
            UnivalentMap::ScaledStrip { scale } => {
                Ok(CMatrix::diagonal(&[*scale * cayley_strip_derivative(z[0])?]))
            }
            UnivalentMap::GeneralizedAnnulusNormal { n, t } => {
                let et = t.exp();
                let z1 = z[0];
                let s = sqrt_one_plus_sq(z1)?;
                let mut m = CMatrix::zeros(*n);
                m.set(0, 0, et * cayley_strip_derivative(z1)?);
                for j in 1..*n {
                    m.set(j, j, et / s);
                    m.set(j, 0, -et * z[j] * z1 / (s * s * s));
                }
                Ok(m)
            }
        }
    }

    /// Inverse on the image; the argument must lie in `g(B)` up to a deck
    /// translation of the first coordinate.
    pub fn inverse(&self, w: &CPoint) -> Result<CPoint> {
        match self {
            UnivalentMap::ScaledStrip { scale } => {
                Ok(CPoint::scalar(strip_to_disk(w[0] / *scale)?))
            }
            UnivalentMap::GeneralizedAnnulusNormal { t, .. } => {
                let et = t.exp();
                let z1 = strip_to_disk(w[0] / et)?;
                let s = sqrt_one_plus_sq(z1)?;
                let mut out = vec![z1];
                out.extend(w.coords()[1..].iter().map(|wj| wj * s / et));
                CPoint::new(out)
            }
        }
    }
}

impl HolomorphicMap for UnivalentMap {
    fn dim(&self) -> usize {
        UnivalentMap::dim(self)
    }

    fn eval(&self, z: &CPoint) -> Result<CPoint> {
        UnivalentMap::eval(self, z)
    }

    fn jacobian(&self, z: &CPoint) -> Result<CMatrix> {
        UnivalentMap::jacobian(self, z)
    }
}
