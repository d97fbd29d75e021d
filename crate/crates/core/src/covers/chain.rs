//! Loewner chains of covering mappings: `t -> f_t` with nested images and
//! `(df_t)_0 = e^t Id`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use super::{CoverSpec, DomainOracle, UnivalentMap};
use crate::complex::{CPoint, NormKind};
use crate::embed::EmbeddedChain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    KnownStable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChainKind {
    Annulus,
    GeneralizedAnnulus { n: usize },
    Product(Vec<ChainSpec>),
    Embedded(Arc<EmbeddedChain>),
    /// `factor * f_t`; breaks normalization on purpose.
    Scaled { factor: f64, inner: Box<ChainSpec> },
}

/// A time-parameterized family of covers of the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub kind: ChainKind,
    pub dim: usize,
    pub norm: NormKind,
    pub stability: Stability,
}

impl ChainSpec {
    /// `f_t(z) = ((1 - iz)/(1 + iz))^{(i/2) e^t} - 1` with images the annuli `A_t`.
    pub fn annulus() -> Self {
        ChainSpec {
            kind: ChainKind::Annulus,
            dim: 1,
            norm: NormKind::Euclidean,
            stability: Stability::KnownStable,
        }
    }

    pub fn generalized_annulus(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("generalized annulus needs n >= 2, got {n}")));
        }
        Ok(ChainSpec {
            kind: ChainKind::GeneralizedAnnulus { n },
            dim: n,
            norm: NormKind::Euclidean,
            stability: Stability::KnownStable,
        })
    }

    pub fn embedded(chain: Arc<EmbeddedChain>) -> Self {
        ChainSpec {
            kind: ChainKind::Embedded(chain),
            dim: 1,
            norm: NormKind::Euclidean,
            stability: Stability::KnownStable,
        }
    }

    pub fn scaled(factor: f64, inner: ChainSpec) -> Self {
        ChainSpec {
            dim: inner.dim,
            norm: inner.norm,
            stability: Stability::Unknown,
            kind: ChainKind::Scaled {
                factor,
                inner: Box::new(inner),
            },
        }
    }

    /// Parse a catalog id: `annulus`, `gen-annulus:n=3`,
    /// `product:annulus,annulus` or `scaled-annulus` (the `2 f_t` failure case).
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        if id == "annulus" {
            return Ok(Self::annulus());
        }
        if id == "scaled-annulus" {
            return Ok(Self::scaled(2.0, Self::annulus()));
        }
        if let Some(rest) = id.strip_prefix("gen-annulus") {
            let n = match rest.strip_prefix(":n=") {
                Some(n) => n
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad dimension in chain id {id:?}")))?,
                None if rest.is_empty() => 2,
                None => return Err(Error::Invalid(format!("unknown chain id {id:?}"))),
            };
            return Self::generalized_annulus(n);
        }
        if let Some(rest) = id.strip_prefix("product:") {
            let parts = rest
                .split(',')
                .map(Self::parse)
                .collect::<Result<Vec<_>>>()?;
            return product_chain(parts);
        }
        Err(Error::Invalid(format!("unknown chain id {id:?}")))
    }

    pub fn id(&self) -> String {
        match &self.kind {
            ChainKind::Annulus => "annulus".into(),
            ChainKind::GeneralizedAnnulus { n } => format!("gen-annulus:n={n}"),
            ChainKind::Product(parts) => {
                let ids: Vec<String> = parts.iter().map(ChainSpec::id).collect();
                format!("product:{}", ids.join(","))
            }
            ChainKind::Embedded(e) => format!(
                "embed:c={},rin={},rout={}",
                e.annulus.center, e.annulus.r_in, e.annulus.r_out
            ),
            ChainKind::Scaled { factor, inner } if *factor == 2.0 && inner.kind == ChainKind::Annulus => {
                "scaled-annulus".into()
            }
            ChainKind::Scaled { factor, inner } => format!("scaled:{factor}:{}", inner.id()),
        }
    }

    /// Largest time for which slices are available.
    pub fn t_max(&self) -> f64 {
        match &self.kind {
            ChainKind::Embedded(e) => e.t_max(),
            ChainKind::Product(parts) => parts.iter().map(ChainSpec::t_max).fold(f64::INFINITY, f64::min),
            ChainKind::Scaled { inner, .. } => inner.t_max(),
            _ => f64::INFINITY,
        }
    }

    /// `f_0'(0)`; the chain is normalized as `(df_t)_0 = base_scale * e^t Id`.
    pub fn base_scale(&self) -> f64 {
        match &self.kind {
            ChainKind::Annulus | ChainKind::GeneralizedAnnulus { .. } => 1.0,
            ChainKind::Product(parts) => parts[0].base_scale(),
            ChainKind::Embedded(e) => e.alpha0,
            ChainKind::Scaled { inner, .. } => inner.base_scale(),
        }
    }

    /// Declared normalization `lambda(t)`. A scaled chain declares the
    /// normalization of the chain it perturbs.
    pub fn normalization(&self, t: f64) -> f64 {
        self.base_scale() * t.exp()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Invalid(format!("time must be finite and >= 0, got {t}")));
        }
        if t > self.t_max() {
            return Err(Error::Invalid(format!("time {t} beyond chain horizon {}", self.t_max())));
        }
        Ok(())
    }

    /// The slice `f_t`.
    pub fn slice(&self, t: f64) -> Result<CoverSpec> {
        self.check_time(t)?;
        match &self.kind {
            ChainKind::Annulus => Ok(CoverSpec::annulus(t)),
            ChainKind::GeneralizedAnnulus { n } => CoverSpec::generalized_annulus(*n, t),
            ChainKind::Product(parts) => {
                CoverSpec::product(parts.iter().map(|p| p.slice(t)).collect::<Result<Vec<_>>>()?)
            }
            ChainKind::Embedded(e) => Ok(CoverSpec::embedded(e.slice(t)?)),
            ChainKind::Scaled { factor, inner } => Ok(CoverSpec::scaled(*factor, inner.slice(t)?)),
        }
    }

    pub fn eval(&self, t: f64, z: &CPoint) -> Result<CPoint> {
        self.slice(t)?.eval(z)
    }

    /// Oracle for `Omega_t = f_t(B)`.
    pub fn oracle(&self, t: f64) -> Result<DomainOracle> {
        self.check_time(t)?;
        Ok(match &self.kind {
            ChainKind::Annulus => DomainOracle::catalog_annulus(t),
            ChainKind::GeneralizedAnnulus { .. } => DomainOracle::GeneralizedAnnulus { t },
            ChainKind::Product(parts) => DomainOracle::Product(
                parts.iter().map(|p| p.oracle(t)).collect::<Result<Vec<_>>>()?,
            ),
            ChainKind::Embedded(e) => e.oracle(t)?,
            ChainKind::Scaled { inner, .. } => inner.oracle(t)?,
        })
    }

    pub fn margin(&self, t: f64, p: &CPoint) -> Result<f64> {
        Ok(self.oracle(t)?.margin(p))
    }

    /// Oracle for the Loewner range `R(f_t)`, the union of all images.
    pub fn range_oracle(&self) -> DomainOracle {
        let minus_one = Complex64::new(-1.0, 0.0);
        match &self.kind {
            ChainKind::Annulus => DomainOracle::Punctured { center: minus_one },
            ChainKind::GeneralizedAnnulus { .. } => DomainOracle::PuncturedCylinder { center: minus_one },
            ChainKind::Product(parts) => {
                DomainOracle::Product(parts.iter().map(ChainSpec::range_oracle).collect())
            }
            ChainKind::Embedded(e) => DomainOracle::Punctured {
                center: e.annulus.center,
            },
            ChainKind::Scaled { inner, .. } => inner.range_oracle(),
        }
    }

    /// Closed-form factorization `f_t = Psi o g_t`, when registered.
    pub fn factorization(&self) -> Result<Factorization> {
        match &self.kind {
            ChainKind::Annulus | ChainKind::GeneralizedAnnulus { .. } => Ok(Factorization {
                psi: CoverSpec::exp(self.dim),
                chain: self.clone(),
            }),
            _ => Err(Error::NoClosedForm(self.id())),
        }
    }
}

impl FromStr for ChainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChainSpec::parse(s)
    }
}

impl fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// `F_t(z_1, ..., z_n) = (f^(1)_t(z_1), ..., f^(n)_t(z_n))` on the unit polydisk.
pub fn product_chain(components: Vec<ChainSpec>) -> Result<ChainSpec> {
    if components.is_empty() {
        return Err(Error::Invalid("product of zero chains".into()));
    }
    if components.iter().any(|c| c.dim != 1) {
        return Err(Error::Invalid("product components must be one-dimensional chains".into()));
    }
    let base = components[0].base_scale();
    if components
        .iter()
        .any(|c| (c.base_scale() - base).abs() > 1e-12 * base || matches!(c.kind, ChainKind::Scaled { .. }))
    {
        return Err(Error::MixedNormalization);
    }
    let stability = if components.iter().all(|c| c.stability == Stability::KnownStable) {
        Stability::KnownStable
    } else {
        Stability::Unknown
    };
    Ok(ChainSpec {
        dim: components.len(),
        kind: ChainKind::Product(components),
        norm: NormKind::Sup,
        stability,
    })
}

/// A registered factorization `f_t = Psi o g_t` through a fixed cover `Psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub psi: CoverSpec,
    chain: ChainSpec,
}

impl Factorization {
    /// The univalent factor `g_t`.
    pub fn normal(&self, t: f64) -> Result<UnivalentMap> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Invalid(format!("time must be finite and >= 0, got {t}")));
        }
        match self.chain.kind {
            ChainKind::Annulus => Ok(UnivalentMap::ScaledStrip { scale: t.exp() }),
            ChainKind::GeneralizedAnnulus { n } => Ok(UnivalentMap::GeneralizedAnnulusNormal { n, t }),
            _ => Err(Error::NoClosedForm(self.chain.id())),
        }
    }

    /// `Psi o g_t` as a cover.
    pub fn composed(&self, t: f64) -> Result<CoverSpec> {
        CoverSpec::composed(self.psi.clone(), self.normal(t)?)
    }

    /// `|Psi(g_t(z)) - f_t(z)|`.
    pub fn residual(&self, t: f64, z: &CPoint) -> Result<f64> {
        let lhs = self.psi.eval(&self.normal(t)?.eval(z)?)?;
        let rhs = self.chain.eval(t, z)?;
        Ok(lhs.dist(&rhs))
    }
}

/// `(Psi, g_t)` for a catalog chain.
pub fn factorization(chain: &ChainSpec) -> Result<Factorization> {
    chain.factorization()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ids_round_trip() {
        for id in ["annulus", "gen-annulus:n=3", "product:annulus,annulus", "scaled-annulus"] {
            assert_eq!(ChainSpec::parse(id).unwrap().id(), id);
        }
        assert!(ChainSpec::parse("torus").is_err());
        assert!(ChainSpec::parse("gen-annulus:n=x").is_err());
        assert!(ChainSpec::parse("product:annulus,gen-annulus:n=2").is_err());
    }

    #[test]
    fn product_evaluates_coordinatewise() {
        let chain = ChainSpec::parse("product:annulus,annulus").unwrap();
        assert_eq!(chain.norm, NormKind::Sup);
        let z = CPoint::new(vec![c(0.3, 0.1), c(-0.5, 0.6)]).unwrap();
        let v = chain.eval(0.5, &z).unwrap();
        let a = ChainSpec::annulus();
        assert_eq!(v[0], a.eval(0.5, &CPoint::scalar(z[0])).unwrap()[0]);
        assert_eq!(v[1], a.eval(0.5, &CPoint::scalar(z[1])).unwrap()[0]);
        assert_eq!(chain.eval(0.0, &CPoint::zeros(2)).unwrap(), CPoint::zeros(2));
    }

    #[test]
    fn factorization_at_sample_points() {
        let f = ChainSpec::annulus().factorization().unwrap();
        assert!(f.residual(0.0, &CPoint::scalar(c(0.5, 0.0))).unwrap() < 1e-12);
        for t in [0.0, 0.5, 2.0] {
            assert_eq!(f.normal(t).unwrap().eval(&CPoint::zeros(1)).unwrap(), CPoint::zeros(1));
        }
        let g = ChainSpec::generalized_annulus(2).unwrap().factorization().unwrap();
        let z = CPoint::new(vec![c(0.3, 0.0), c(0.0, 0.4)]).unwrap();
        assert!(g.residual(1.0, &z).unwrap() < 1e-12);
        assert!(matches!(
            ChainSpec::parse("product:annulus,annulus").unwrap().factorization(),
            Err(Error::NoClosedForm(_))
        ));
    }

    #[test]
    fn negative_time_is_rejected() {
        assert!(ChainSpec::annulus().slice(-0.1).is_err());
    }
}
