//! Kernel convergence of the images `Omega_s -> Omega_t`.
//!
//! For a nested family the kernel from below is the union `U_{s<t} Omega_s`
//! and from above the interior of `n_{u>t} Omega_u`. Both must equal
//! `Omega_t`; a jump in the boundary radius breaks one of them.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::report::{CheckRecord, ValidationReport};
use crate::complex::CPoint;
use crate::covers::{ChainSpec, DomainOracle};
use crate::error::Result;

/// Points with `|margin_t| <= BOUNDARY_BAND` are treated as on the boundary
/// and skipped.
pub const BOUNDARY_BAND: f64 = 1e-9;
/// Number of halvings of the time offset.
pub const HALVINGS: i32 = 40;

/// A nested family of domains with signed membership margins.
pub trait DomainFamily: Sync {
    fn margin(&self, t: f64, p: &CPoint) -> Result<f64>;
    fn label(&self) -> String;
}

impl DomainFamily for ChainSpec {
    fn margin(&self, t: f64, p: &CPoint) -> Result<f64> {
        ChainSpec::margin(self, t, p)
    }

    fn label(&self) -> String {
        self.id()
    }
}

/// The annuli `A_t` with the outer radius multiplied by `factor` after
/// `jump_time` (from `jump_time` on when `right_continuous`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpAnnulusFamily {
    pub jump_time: f64,
    pub factor: f64,
    pub right_continuous: bool,
}

impl DomainFamily for JumpAnnulusFamily {
    fn margin(&self, t: f64, p: &CPoint) -> Result<f64> {
        let jumped = if self.right_continuous {
            t >= self.jump_time
        } else {
            t > self.jump_time
        };
        let log_r = FRAC_PI_4 * t.exp();
        let r_out = log_r.exp() * if jumped { self.factor } else { 1.0 };
        Ok(DomainOracle::Annulus {
            center: Complex64::new(-1.0, 0.0),
            r_in: (-log_r).exp(),
            r_out,
        }
        .margin(p))
    }

    fn label(&self) -> String {
        format!("jump-annulus(t0={}, factor={})", self.jump_time, self.factor)
    }
}

fn offsets(delta0: f64) -> Vec<f64> {
    (0..=HALVINGS).map(|k| delta0 * 0.5f64.powi(k)).collect()
}

/// Compare `Omega_t` with its kernels from below and above at `points`.
pub fn kernel_convergence_check(family: &dyn DomainFamily, t: f64, points: &[CPoint]) -> ValidationReport {
    let mut report = ValidationReport::new(family.label(), 0);
    let mut inner = CheckRecord::new("kernel-from-below", 0.0);
    let mut outer = CheckRecord::new("kernel-from-above", 0.0);
    let mut monotone = CheckRecord::new("images-nested", 1e-12);
    let below = offsets(t.min(0.5));
    let above = offsets(0.5);
    for p in points {
        let m_t = match family.margin(t, p) {
            Ok(m) => m,
            Err(e) => {
                inner.push(Err(e.clone()));
                outer.push(Err(e));
                continue;
            }
        };
        if m_t.abs() <= BOUNDARY_BAND {
            continue;
        }
        // Increasing times t - d_0 < ... < t < ... < t + d_0.
        let times: Vec<f64> = below
            .iter()
            .filter(|_| t > 0.0)
            .map(|d| t - d)
            .chain(std::iter::once(t))
            .chain(above.iter().rev().map(|d| t + d))
            .collect();
        let margins: Result<Vec<f64>> = times.iter().map(|&s| family.margin(s, p)).collect();
        let margins = match margins {
            Ok(m) => m,
            Err(e) => {
                monotone.push(Err(e));
                continue;
            }
        };
        monotone.push(Ok(margins.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max)));
        let t_index = times.iter().position(|&s| s == t).expect("t is in the sequence");
        if m_t > 0.0 {
            if t > 0.0 {
                // Closest time below t.
                inner.push(Ok((-margins[t_index - 1]).max(0.0)));
            }
            outer.push(Ok((-margins[t_index + 1]).max(0.0)));
        } else {
            // Outside Omega_t: must stay outside just after t.
            outer.push(Ok(margins[t_index + 1].max(0.0)));
        }
    }
    if inner.samples > 0 {
        report.push(inner);
    }
    report.push(outer);
    report.push(monotone);
    report
}

/// `inf { s <= t : p in Omega_s }` by bisection, assuming nested images.
pub fn entry_time(family: &dyn DomainFamily, t: f64, p: &CPoint) -> Result<Option<f64>> {
    if family.margin(t, p)? <= 0.0 {
        return Ok(None);
    }
    if family.margin(0.0, p)? > 0.0 {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (0.0, t);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if family.margin(mid, p)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial(rs: &[f64]) -> Vec<CPoint> {
        rs.iter().map(|r| CPoint::scalar(Complex64::new(-1.0 + r, 0.0))).collect()
    }

    #[test]
    fn catalog_annuli_converge() {
        let chain = ChainSpec::annulus();
        let pts = radial(&[0.1, 0.5, 2.0, 3.0, 5.0, 50.0]);
        for t in [0.0, 0.5, 1.0, 2.0] {
            let r = kernel_convergence_check(&chain, t, &pts);
            assert!(r.passed(), "t = {t}\n{}", r.summary());
        }
    }

    #[test]
    fn jumps_are_detected_from_either_side() {
        let r0 = crate::covers::annulus_radius(1.0);
        let pts = radial(&[1.5 * r0, 0.5]);
        for right in [true, false] {
            let fam = JumpAnnulusFamily {
                jump_time: 1.0,
                factor: 2.0,
                right_continuous: right,
            };
            let r = kernel_convergence_check(&fam, 1.0, &pts);
            assert!(!r.passed(), "{}", r.summary());
            let away = kernel_convergence_check(&fam, 0.5, &pts);
            assert!(away.passed(), "{}", away.summary());
        }
    }

    #[test]
    fn entry_time_of_the_annulus() {
        let chain = ChainSpec::annulus();
        // |p + 1| = r_s  <=>  s = ln(4 ln r / pi).
        let r = 5.0f64;
        let p = CPoint::scalar(Complex64::new(-1.0 + r, 0.0));
        let s = entry_time(&chain, 2.0, &p).unwrap().unwrap();
        assert!((s - (4.0 * r.ln() / std::f64::consts::PI).ln()).abs() < 1e-9);
    }
}
