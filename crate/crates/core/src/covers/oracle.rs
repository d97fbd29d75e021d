//! Membership oracles for images `Omega_t` and Loewner ranges.
//!
//! Margins are signed: positive inside, negative outside, zero on the
//! boundary. Annular margins are measured in log-radius so that they stay
//! comparable as `r_t` grows doubly exponentially.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::CPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainOracle {
    /// `{ r_in < |z - c| < r_out }` in `C`.
    Annulus { center: Complex64, r_in: f64, r_out: f64 },
    /// Image of the generalized annulus slice at level `t`:
    /// `|log|z_1 + 1|| < (pi/4) e^t` and
    /// `sum_{j>=2} |z_j|^2 < e^{2t} cos(2 e^{-t} log|z_1 + 1|)`.
    GeneralizedAnnulus { t: f64 },
    /// `C` minus a point.
    Punctured { center: Complex64 },
    /// `(C minus a point) x C^{n-1}`.
    PuncturedCylinder { center: Complex64 },
    /// Cartesian product of one-dimensional oracles.
    Product(Vec<DomainOracle>),
}

impl DomainOracle {
    /// The annulus `A_t` of the catalog chain.
    pub fn catalog_annulus(t: f64) -> Self {
        let log_r = FRAC_PI_4 * t.exp();
        DomainOracle::Annulus {
            center: Complex64::new(-1.0, 0.0),
            r_in: (-log_r).exp(),
            r_out: log_r.exp(),
        }
    }

    pub fn margin(&self, p: &CPoint) -> f64 {
        match self {
            DomainOracle::Annulus {
                center,
                r_in,
                r_out,
            } => {
                let l = (p[0] - center).norm().max(f64::MIN_POSITIVE).ln();
                (l - r_in.ln()).min(r_out.ln() - l)
            }
            DomainOracle::GeneralizedAnnulus { t } => {
                let l = (p[0] + 1.0).norm().max(f64::MIN_POSITIVE).ln();
                let first = FRAC_PI_4 * t.exp() - l.abs();
                let tail: f64 = p.coords()[1..].iter().map(|z| z.norm_sqr()).sum();
                let rest = (2.0 * t).exp() * (2.0 * (-t).exp() * l).cos() - tail;
                first.min(rest)
            }
            DomainOracle::Punctured { center } | DomainOracle::PuncturedCylinder { center } => {
                (p[0] - center).norm()
            }
            DomainOracle::Product(parts) => parts
                .iter()
                .enumerate()
                .map(|(j, o)| o.margin(&CPoint::scalar(p[j])))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, p: &CPoint) -> bool {
        self.margin(p) > 0.0
    }

    pub fn tag(&self) -> String {
        match self {
            DomainOracle::Annulus {
                center,
                r_in,
                r_out,
            } => format!("annulus(c={center}, r_in={r_in}, r_out={r_out})"),
            DomainOracle::GeneralizedAnnulus { t } => format!("generalized-annulus(t={t})"),
            DomainOracle::Punctured { center } => format!("punctured-plane(c={center})"),
            DomainOracle::PuncturedCylinder { center } => format!("punctured-cylinder(c={center})"),
            DomainOracle::Product(parts) => {
                let inner: Vec<String> = parts.iter().map(DomainOracle::tag).collect();
                format!("product({})", inner.join(" x "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::annulus_radius;

    #[test]
    fn annulus_margin_signs() {
        let o = DomainOracle::catalog_annulus(0.0);
        let r = annulus_radius(0.0);
        assert!(o.margin(&CPoint::zeros(1)) > 0.0);
        let outside = CPoint::scalar(Complex64::new(-1.0 + 1.01 * r, 0.0));
        assert!(o.margin(&outside) < 0.0);
        let inner = CPoint::scalar(Complex64::new(-1.0 + 0.99 / r, 0.0));
        assert!(o.margin(&inner) < 0.0);
        let boundary = CPoint::scalar(Complex64::new(-1.0 + r, 0.0));
        assert!(o.margin(&boundary).abs() < 1e-14);
    }

    #[test]
    fn generalized_margin_at_origin_is_positive() {
        for t in [0.0, 1.0, 3.0] {
            let o = DomainOracle::GeneralizedAnnulus { t };
            assert!(o.margin(&CPoint::zeros(3)) > 0.0);
        }
    }
}
