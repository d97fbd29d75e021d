//! Approximation of `f_t = Psi o g_t` by `Psi o h_k` with `h_k -> g_t`
//! locally uniformly.

use num_complex::Complex64;

use super::report::{CheckRecord, ValidationReport};
use crate::complex::{CMatrix, CPoint};
use crate::covers::{ChainSpec, CoverSpec, HolomorphicMap};
use crate::error::{Error, Result};
use crate::sampling::sphere_points;

/// Smallest admissible `|det D(Psi o h_k)|` on the samples.
pub const DET_FLOOR: f64 = 1e-10;

/// Truncated Taylor series of the normal factor `g_t` with `terms` terms:
/// `e^t sum_{j<terms} (-1)^j z_1^{2j+1} / (2j+1)` in the first coordinate and
/// `e^t z_m sum_{j<terms} binom(-1/2, j) z_1^{2j}` in the others.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorStripSurrogate {
    pub scale: f64,
    pub terms: usize,
    pub dim: usize,
}

impl TaylorStripSurrogate {
    pub fn new(t: f64, terms: usize, dim: usize) -> Self {
        TaylorStripSurrogate {
            scale: t.exp(),
            terms,
            dim,
        }
    }

    /// `(sum, derivative)` of the arctan truncation.
    fn arctan(&self, z: Complex64) -> (Complex64, Complex64) {
        let z2 = z * z;
        let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let (mut odd, mut even) = (z, Complex64::new(1.0, 0.0));
        for j in 0..self.terms {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            p += sign * odd / (2 * j + 1) as f64;
            dp += sign * even;
            odd *= z2;
            even *= z2;
        }
        (p, dp)
    }

    /// `(sum, derivative)` of the truncated `(1 + z^2)^{-1/2}`.
    fn inv_sqrt(&self, z: Complex64) -> (Complex64, Complex64) {
        let z2 = z * z;
        let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut c = 1.0;
        let mut pow = Complex64::new(1.0, 0.0); // z^{2j}
        for j in 0..self.terms {
            p += c * pow;
            if j > 0 {
                dp += c * 2.0 * j as f64 * pow / z;
            }
            c *= (-0.5 - j as f64) / (j + 1) as f64;
            pow *= z2;
        }
        (p, if z == Complex64::new(0.0, 0.0) { Complex64::new(0.0, 0.0) } else { dp })
    }
}

impl HolomorphicMap for TaylorStripSurrogate {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: &CPoint) -> Result<CPoint> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.dim(),
            });
        }
        let (a, _) = self.arctan(z[0]);
        let (q, _) = self.inv_sqrt(z[0]);
        let mut out = vec![self.scale * a];
        out.extend(z.coords()[1..].iter().map(|zj| self.scale * zj * q));
        CPoint::finite(out)
    }

    fn jacobian(&self, z: &CPoint) -> Result<CMatrix> {
        let (_, da) = self.arctan(z[0]);
        let (q, dq) = self.inv_sqrt(z[0]);
        let mut m = CMatrix::zeros(self.dim);
        m.set(0, 0, self.scale * da);
        for j in 1..self.dim {
            m.set(j, j, self.scale * q);
            m.set(j, 0, self.scale * z[j] * dq);
        }
        Ok(m)
    }
}

/// `h_1, h_2, ...` and the fixed cover `Psi`.
pub struct ApproximantSeq {
    pub maps: Vec<Box<dyn HolomorphicMap>>,
    pub psi: CoverSpec,
}

impl ApproximantSeq {
    /// Taylor truncations with `1, ..., count` terms.
    pub fn taylor(chain: &ChainSpec, t: f64, count: usize) -> Result<Self> {
        let fac = chain.factorization()?;
        Ok(ApproximantSeq {
            maps: (1..=count)
                .map(|k| Box::new(TaylorStripSurrogate::new(t, k, chain.dim)) as Box<dyn HolomorphicMap>)
                .collect(),
            psi: fac.psi,
        })
    }

    /// The constant sequence `h_k = g_t`.
    pub fn exact(chain: &ChainSpec, t: f64, count: usize) -> Result<Self> {
        let fac = chain.factorization()?;
        let g = fac.normal(t)?;
        Ok(ApproximantSeq {
            maps: (0..count)
                .map(|_| Box::new(g.clone()) as Box<dyn HolomorphicMap>)
                .collect(),
            psi: fac.psi,
        })
    }
}

/// Errors `e_k(rho)` and the report built from them.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximantOutcome {
    pub report: ValidationReport,
    pub radii: Vec<f64>,
    /// `errors[i][k]` is `sup_{|z| <= radii[i]} |Psi(h_k(z)) - f_t(z)|`.
    pub errors: Vec<Vec<f64>>,
}

fn compact_samples(chain: &ChainSpec, rho: f64) -> Vec<CPoint> {
    let mut out = vec![CPoint::zeros(chain.dim)];
    for (i, frac) in [0.25, 0.5, 0.75, 1.0].iter().enumerate() {
        out.extend(sphere_points(chain.dim, chain.norm, rho * frac, 64, i as u64));
    }
    out
}

/// Sup errors of `Psi o h_k` against `f_t` on balls of the given radii, with
/// checks that they do not increase in `k` and that every `Psi o h_k` is a
/// local biholomorphism on the samples.
pub fn approximant_check(chain: &ChainSpec, t: f64, seq: &ApproximantSeq, radii: &[f64]) -> Result<ApproximantOutcome> {
    if seq.maps.is_empty() {
        return Err(Error::NoApproximants);
    }
    let f_t = chain.slice(t)?;
    let mut report = ValidationReport::new(chain.id(), 0);
    let mut errors = Vec::with_capacity(radii.len());
    let mut det = CheckRecord::new("approximant-local-biholomorphism", 0.0);
    for &rho in radii {
        let pts = compact_samples(chain, rho);
        let targets: Vec<Result<CPoint>> = pts.iter().map(|z| f_t.eval(z)).collect();
        let mut row = Vec::with_capacity(seq.maps.len());
        for h in &seq.maps {
            let mut sup = 0.0f64;
            for (z, target) in pts.iter().zip(&targets) {
                let e: Result<f64> = (|| {
                    let w = h.eval(z)?;
                    let value = seq.psi.eval(&w)?;
                    let jac = seq.psi.jacobian(&w)?.mul(&h.jacobian(z)?);
                    det.push(Ok((DET_FLOOR - jac.determinant().norm()).max(0.0)));
                    Ok(value.dist(target.as_ref().map_err(Clone::clone)?))
                })();
                sup = sup.max(e.unwrap_or(f64::INFINITY));
            }
            row.push(sup);
        }
        report.push(CheckRecord::from_residuals(
            format!("approximant-monotone(rho={rho})"),
            0.0,
            row.windows(2).map(|w| Ok((w[1] - w[0]).max(0.0))).chain(std::iter::once(Ok(0.0))),
        ));
        errors.push(row);
    }
    report.push(det);
    Ok(ApproximantOutcome {
        report,
        radii: radii.to_vec(),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sequence_has_zero_error() {
        let chain = ChainSpec::annulus();
        let seq = ApproximantSeq::exact(&chain, 1.0, 3).unwrap();
        let out = approximant_check(&chain, 1.0, &seq, &[0.5]).unwrap();
        assert!(out.errors[0].iter().all(|&e| e < 1e-12), "{:?}", out.errors);
        assert!(out.report.passed());
    }

    #[test]
    fn empty_sequence_is_rejected() {
        let chain = ChainSpec::annulus();
        let seq = ApproximantSeq {
            maps: Vec::new(),
            psi: CoverSpec::exp(1),
        };
        assert!(matches!(approximant_check(&chain, 0.0, &seq, &[0.5]), Err(Error::NoApproximants)));
    }

    #[test]
    fn surrogate_jacobian_matches_differences() {
        let h = TaylorStripSurrogate::new(0.5, 6, 3);
        let z = CPoint::new(vec![Complex64::new(0.3, -0.2), Complex64::new(0.1, 0.1), Complex64::new(-0.2, 0.0)]).unwrap();
        let fd = crate::complex::jacobian_with(|p| h.eval(p), &z, crate::complex::DiffScheme::complex_step()).unwrap();
        assert!(h.jacobian(&z).unwrap().max_abs_diff(&fd) < 1e-10);
    }

    #[test]
    fn generalized_taylor_errors_shrink() {
        let chain = ChainSpec::generalized_annulus(2).unwrap();
        let seq = ApproximantSeq::taylor(&chain, 1.0, 10).unwrap();
        let out = approximant_check(&chain, 1.0, &seq, &[0.5]).unwrap();
        assert!(out.report.passed(), "{}", out.report.summary());
        assert!(out.errors[0][9] < 1e-4, "{:?}", out.errors);
    }
}
