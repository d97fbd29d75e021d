//! Embedding covers of round annuli into Loewner chains.
//!
//! A round annulus `A = { r_in < |z - c| < r_out }` containing the origin is
//! covered by `h(z) = c + m exp(a g(z))` with `m = sqrt(r_in r_out)` and
//! `a = (2/pi) ln(r_out / r_in)`, `g` the strip map. Precomposing with the
//! disk automorphism that sends `0` to a zero `z0` of `h`, followed by a
//! rotation, gives the unique cover with `f(0) = 0` and `f'(0) > 0`.
//!
//! Growing the annulus along a schedule and reparameterizing time so that
//! `f_t'(0) = alpha_0 e^t` produces the chain.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{cayley_strip, cayley_strip_derivative, jacobian_with, strip_to_disk, CPoint, DiffScheme};
use crate::covers::{ChainSpec, CoverSpec, DomainOracle};
use crate::error::{Error, Result};
use crate::lifting::local_inverse;

/// Number of nodes of the `tau` grid used to tabulate `alpha`.
pub const ALPHA_GRID: usize = 64;

/// `{ r_in < |z - c| < r_out }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundAnnulus {
    pub center: Complex64,
    pub r_in: f64,
    pub r_out: f64,
}

impl RoundAnnulus {
    pub fn new(center: Complex64, r_in: f64, r_out: f64) -> Result<Self> {
        let a = RoundAnnulus { center, r_in, r_out };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let finite = self.center.re.is_finite() && self.center.im.is_finite();
        if !finite || !(self.r_in > 0.0) || !(self.r_out > self.r_in) || !self.r_out.is_finite() {
            return Err(Error::Invalid(format!(
                "annulus needs 0 < r_in < r_out, got r_in = {}, r_out = {}",
                self.r_in, self.r_out
            )));
        }
        let d = self.center.norm();
        if !(self.r_in < d && d < self.r_out) {
            return Err(Error::OriginOutside);
        }
        Ok(())
    }

    pub fn oracle(&self) -> DomainOracle {
        DomainOracle::Annulus {
            center: self.center,
            r_in: self.r_in,
            r_out: self.r_out,
        }
    }

    fn m(&self) -> f64 {
        (self.r_in * self.r_out).sqrt()
    }

    fn a(&self) -> f64 {
        2.0 / PI * (self.r_out / self.r_in).ln()
    }

    /// `f'(0)` of the normalized cover, in closed form:
    /// `|c| a cos(2 ln(|c|/m) / a)`.
    pub fn alpha_closed_form(&self) -> f64 {
        let a = self.a();
        let u0 = (self.center.norm() / self.m()).ln() / a;
        self.center.norm() * a * (2.0 * u0).cos()
    }
}

/// How the annulus grows with the schedule time `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScheduleParams {
    /// `r_in e^{-inner_rate tau}`, `r_out e^{outer_rate tau}`.
    Exponential { inner_rate: f64, outer_rate: f64 },
    /// Radii given at increasing `tau` nodes, interpolated linearly in
    /// log-radius and held constant past the last node.
    Tabulated {
        taus: Vec<f64>,
        r_in: Vec<f64>,
        r_out: Vec<f64>,
    },
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams::Exponential {
            inner_rate: 1.0,
            outer_rate: 1.0,
        }
    }
}

impl ScheduleParams {
    /// The annulus at schedule time `tau`.
    pub fn annulus_at(&self, base: &RoundAnnulus, tau: f64) -> Result<RoundAnnulus> {
        let (r_in, r_out) = match self {
            ScheduleParams::Exponential {
                inner_rate,
                outer_rate,
            } => (base.r_in * (-inner_rate * tau).exp(), base.r_out * (outer_rate * tau).exp()),
            ScheduleParams::Tabulated { taus, r_in, r_out } => {
                if taus.is_empty() || taus.len() != r_in.len() || taus.len() != r_out.len() {
                    return Err(Error::ScheduleNotAdmissible("malformed table".into()));
                }
                (log_interp(taus, r_in, tau), log_interp(taus, r_out, tau))
            }
        };
        RoundAnnulus::new(base.center, r_in, r_out)
            .map_err(|e| Error::ScheduleNotAdmissible(format!("at tau = {tau}: {e}")))
    }

    fn check(&self) -> Result<()> {
        match self {
            ScheduleParams::Exponential {
                inner_rate,
                outer_rate,
            } => {
                if !(*inner_rate > 0.0 && *outer_rate > 0.0) {
                    return Err(Error::ScheduleNotAdmissible(
                        "exponential rates must be positive".into(),
                    ));
                }
            }
            ScheduleParams::Tabulated { taus, .. } => {
                if taus.first() != Some(&0.0) || taus.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::ScheduleNotAdmissible(
                        "table must start at tau = 0 and increase".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn log_interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    for i in 1..xs.len() {
        if x <= xs[i] {
            let s = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return (ys[i - 1].ln() * (1.0 - s) + ys[i].ln() * s).exp();
        }
    }
    *ys.last().unwrap()
}

/// `f(z) = c + m exp(a g(M(rot z)))` with `M(z) = (z + z0)/(1 + conj(z0) z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedSlice {
    pub annulus: RoundAnnulus,
    pub m: f64,
    pub a: f64,
    pub z0: Complex64,
    pub rot: Complex64,
    /// Chain time of this slice (0 for a standalone cover).
    pub level: f64,
}

impl EmbeddedSlice {
    fn mobius(&self, zeta: Complex64) -> Complex64 {
        (zeta + self.z0) / (1.0 + self.z0.conj() * zeta)
    }

    fn mobius_inv(&self, xi: Complex64) -> Complex64 {
        (xi - self.z0) / (1.0 - self.z0.conj() * xi)
    }

    fn disk_point(&self, z: Complex64) -> Result<Complex64> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::OutsideDisk(r));
        }
        Ok(self.mobius(self.rot * z))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let xi = self.disk_point(z)?;
        Ok(self.annulus.center + self.m * (self.a * cayley_strip(xi)?).exp())
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let zeta = self.rot * z;
        let xi = self.disk_point(z)?;
        let h_prime = self.m * self.a * (self.a * cayley_strip(xi)?).exp() * cayley_strip_derivative(xi)?;
        let denom = 1.0 + self.z0.conj() * zeta;
        let m_prime = (1.0 - self.z0.norm_sqr()) / (denom * denom);
        Ok(h_prime * m_prime * self.rot)
    }

    /// `f'(0)`, real by construction.
    pub fn alpha(&self) -> f64 {
        self.derivative(Complex64::new(0.0, 0.0)).map(|d| d.re).unwrap_or(f64::NAN)
    }

    /// Deck transformation `F_k`: shift the strip coordinate by `2 pi i k / a`.
    pub fn deck(&self, k: i64, z: Complex64) -> Result<Complex64> {
        let xi = self.disk_point(z)?;
        let shifted = strip_to_disk(cayley_strip(xi)? + Complex64::new(0.0, 2.0 * PI * k as f64 / self.a))?;
        Ok(self.mobius_inv(shifted) / self.rot)
    }
}

fn raw_cover(annulus: &RoundAnnulus, level: f64) -> EmbeddedSlice {
    EmbeddedSlice {
        annulus: *annulus,
        m: annulus.m(),
        a: annulus.a(),
        z0: Complex64::new(0.0, 0.0),
        rot: Complex64::new(1.0, 0.0),
        level,
    }
}

fn normalized_slice(annulus: &RoundAnnulus, level: f64) -> Result<EmbeddedSlice> {
    annulus.validate()?;
    let h = raw_cover(annulus, level);
    // Zero of h from the principal branch of Log(-c/m). The argument is taken
    // in (-pi, pi]; a centre on the positive axis lands on pi, which is just
    // another deck translate.
    let q = -annulus.center / h.m;
    let log_q = Complex64::new(q.norm().ln(), q.im.atan2(q.re));
    let seed = strip_to_disk(log_q / h.a)?;
    let z0 = local_inverse(
        &CoverSpec::embedded(h.clone()),
        &CPoint::scalar(annulus.center * 0.0),
        &CPoint::scalar(seed),
        1e-12 * (1.0 + annulus.center.norm()),
    )?[0];
    let mut s = EmbeddedSlice { z0, ..h };
    let d = s.derivative(Complex64::new(0.0, 0.0))?;
    s.rot = d.conj() / d.norm();
    Ok(s)
}

/// Normalized covering `f` of `A` by the unit disk: `f(0) = 0`, `f'(0) > 0`.
pub fn standard_cover(annulus: &RoundAnnulus) -> Result<CoverSpec> {
    Ok(CoverSpec::embedded(normalized_slice(annulus, 0.0)?))
}

/// `f'(0)` via the complex-step stencil; fails if it is not a positive real.
pub fn measure_alpha(cover: &CoverSpec) -> Result<f64> {
    let origin = CPoint::zeros(cover.dim);
    let j = jacobian_with(|z| cover.eval(z), &origin, DiffScheme::complex_step())?;
    let d = j.get(0, 0);
    if d.im.abs() > 1e-9 || !(d.re > 0.0) {
        return Err(Error::NotNormalized { re: d.re, im: d.im });
    }
    Ok(d.re)
}

/// Chain built from a round annulus and a growth schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedChain {
    pub annulus: RoundAnnulus,
    pub schedule: ScheduleParams,
    pub alpha0: f64,
    /// Uniform `tau` grid.
    pub tau_grid: Vec<f64>,
    /// Measured `log(alpha(tau) / alpha0)` on the grid.
    pub log_alpha: Vec<f64>,
    slopes: Vec<f64>,
}

impl EmbeddedChain {
    pub fn tau_max(&self) -> f64 {
        *self.tau_grid.last().unwrap()
    }

    /// Chain horizon: slices exist for `0 <= t <= t_max`.
    pub fn t_max(&self) -> f64 {
        *self.log_alpha.last().unwrap()
    }

    /// Interpolated `gamma(tau) = log(alpha(tau) / alpha0)`.
    pub fn gamma(&self, tau: f64) -> f64 {
        pchip_eval(&self.tau_grid, &self.log_alpha, &self.slopes, tau)
    }

    /// `beta = gamma^{-1}` from the interpolant, by bisection.
    pub fn beta_interpolated(&self, t: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.tau_max());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.gamma(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// `beta(t)`: the interpolated inverse, polished by bisection on the
    /// closed-form `alpha` so that `f_t'(0) = alpha0 e^t` to rounding.
    pub fn beta(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let guess = self.beta_interpolated(t);
        let step = self.tau_max() / (ALPHA_GRID - 1) as f64;
        let target = self.alpha0 * t.exp();
        let alpha_at = |tau: f64| -> Result<f64> {
            Ok(self.schedule.annulus_at(&self.annulus, tau)?.alpha_closed_form())
        };
        let mut lo = (guess - step).max(0.0);
        let mut hi = (guess + step).min(self.tau_max());
        if alpha_at(lo)? > target || alpha_at(hi)? < target {
            lo = 0.0;
            hi = self.tau_max();
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if alpha_at(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn annulus_at_time(&self, t: f64) -> Result<RoundAnnulus> {
        self.schedule.annulus_at(&self.annulus, self.beta(t)?)
    }

    pub fn slice(&self, t: f64) -> Result<EmbeddedSlice> {
        normalized_slice(&self.annulus_at_time(t)?, t)
    }

    pub fn oracle(&self, t: f64) -> Result<DomainOracle> {
        Ok(self.annulus_at_time(t)?.oracle())
    }
}

/// Embed the standard cover of `annulus` into a chain reaching time `t_horizon`.
pub fn embed_annulus_until(
    annulus: &RoundAnnulus,
    schedule: &ScheduleParams,
    t_horizon: f64,
) -> Result<ChainSpec> {
    annulus.validate()?;
    schedule.check()?;
    let alpha0 = measure_alpha(&standard_cover(annulus)?)?;

    // Grow tau_max until the measured gamma reaches the horizon.
    let mut tau_max = 1.0;
    loop {
        let a = schedule.annulus_at(annulus, tau_max)?;
        if (a.alpha_closed_form() / alpha0).ln() >= t_horizon {
            break;
        }
        tau_max *= 2.0;
        if tau_max > 1024.0 {
            return Err(Error::ScheduleNotAdmissible(format!(
                "alpha does not reach e^{t_horizon} alpha0 by tau = 1024"
            )));
        }
    }

    let tau_grid: Vec<f64> = (0..ALPHA_GRID)
        .map(|i| tau_max * i as f64 / (ALPHA_GRID - 1) as f64)
        .collect();
    let mut log_alpha = Vec::with_capacity(ALPHA_GRID);
    for &tau in &tau_grid {
        let cover = standard_cover(&schedule.annulus_at(annulus, tau)?)?;
        log_alpha.push((measure_alpha(&cover)? / alpha0).ln());
    }
    log_alpha[0] = 0.0;
    if let Some(i) = log_alpha.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::ScheduleNotAdmissible(format!(
            "measured alpha is not strictly increasing near tau = {}",
            tau_grid[i + 1]
        )));
    }
    let slopes = pchip_slopes(&tau_grid, &log_alpha);
    let chain = EmbeddedChain {
        annulus: *annulus,
        schedule: schedule.clone(),
        alpha0,
        tau_grid,
        log_alpha,
        slopes,
    };
    Ok(ChainSpec::embedded(Arc::new(chain)))
}

/// Embed with the default horizon `t = 3`.
pub fn embed_annulus(annulus: &RoundAnnulus, schedule: &ScheduleParams) -> Result<ChainSpec> {
    embed_annulus_until(annulus, schedule, 3.0)
}

/// Fritsch-Carlson slopes for a monotone piecewise-cubic Hermite interpolant.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = end_slope(h[0], h.get(1).copied().unwrap_or(h[0]), delta[0], delta.get(1).copied().unwrap_or(delta[0]));
    d[n - 1] = end_slope(
        h[n - 2],
        if n > 2 { h[n - 3] } else { h[n - 2] },
        delta[n - 2],
        if n > 2 { delta[n - 3] } else { delta[n - 2] },
    );
    d
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

fn pchip_eval(x: &[f64], y: &[f64], d: &[f64], t: f64) -> f64 {
    let n = x.len();
    if t <= x[0] {
        return y[0] + d[0] * (t - x[0]);
    }
    if t >= x[n - 1] {
        return y[n - 1] + d[n - 1] * (t - x[n - 1]);
    }
    let i = match x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
        Ok(i) => return y[i],
        Err(i) => i - 1,
    };
    let h = x[i + 1] - x[i];
    let s = (t - x[i]) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1]
}

/// The annulus `A_0` of the catalog chain as a [`RoundAnnulus`].
pub fn catalog_annulus_a0() -> RoundAnnulus {
    let r = (FRAC_PI_2 / 2.0).exp();
    RoundAnnulus {
        center: Complex64::new(-1.0, 0.0),
        r_in: 1.0 / r,
        r_out: r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::ChainKind;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_must_lie_in_annulus() {
        assert_eq!(RoundAnnulus::new(c(-1.0, 0.0), 1.5, 3.0), Err(Error::OriginOutside));
        assert!(RoundAnnulus::new(c(-1.0, 0.0), 2.0, 1.0).is_err());
    }

    #[test]
    fn standard_cover_is_normalized() {
        let a = RoundAnnulus::new(c(0.5, 0.3), 0.2, 2.0).unwrap();
        let f = standard_cover(&a).unwrap();
        assert!(f.eval(&CPoint::zeros(1)).unwrap().norm(crate::complex::NormKind::Sup) < 1e-12);
        let alpha = measure_alpha(&f).unwrap();
        assert!(alpha > 0.0);
        assert!((alpha - a.alpha_closed_form()).abs() < 1e-9);
    }

    #[test]
    fn positive_real_centre_uses_the_pi_branch() {
        let a = RoundAnnulus::new(c(1.0, 0.0), 0.5, 1.5).unwrap();
        let f = standard_cover(&a).unwrap();
        assert!(f.eval(&CPoint::zeros(1)).unwrap()[0].norm() < 1e-12);
        assert!(measure_alpha(&f).is_ok());
    }

    #[test]
    fn boundary_radii_are_reproduced() {
        let a = RoundAnnulus::new(c(0.5, 0.3), 0.2, 2.0).unwrap();
        let CoverSpec { kind: crate::covers::CoverKind::EmbeddedAnnulusSlice(s), .. } = standard_cover(&a).unwrap()
        else {
            panic!("expected an embedded slice");
        };
        let eps = 1e-8;
        for (xi, r) in [(1.0 - eps, a.r_out), (-1.0 + eps, a.r_in)] {
            let z = s.mobius_inv(c(xi, 0.0)) / s.rot;
            let v = s.eval(z).unwrap();
            assert!(((v - a.center).norm() - r).abs() < 1e-6 * r);
        }
    }

    #[test]
    fn pchip_reproduces_nodes_and_stays_monotone() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (1.0 + v).ln()).collect();
        let d = pchip_slopes(&x, &y);
        for i in 0..10 {
            assert!((pchip_eval(&x, &y, &d, x[i]) - y[i]).abs() < 1e-15);
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=900 {
            let v = pchip_eval(&x, &y, &d, k as f64 * 0.01);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn embedded_a0_beta_starts_at_zero() {
        let chain = embed_annulus(&catalog_annulus_a0(), &ScheduleParams::default()).unwrap();
        let ChainKind::Embedded(e) = &chain.kind else { unreachable!() };
        assert_eq!(e.beta(0.0).unwrap(), 0.0);
        assert!(e.t_max() >= 3.0);
        assert!(e.tau_grid.windows(2).all(|w| w[1] > w[0]));
        let betas: Vec<f64> = (0..=12).map(|k| e.beta(k as f64 * 0.25).unwrap()).collect();
        assert!(betas.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn stalled_schedule_is_not_admissible() {
        let a = catalog_annulus_a0();
        let sched = ScheduleParams::Tabulated {
            taus: vec![0.0, 1.0, 2.0, 40.0],
            r_in: vec![a.r_in, a.r_in * 0.5, a.r_in * 0.5, a.r_in * 1e-12],
            r_out: vec![a.r_out, a.r_out * 2.0, a.r_out * 2.0, a.r_out * 1e12],
        };
        assert!(matches!(
            embed_annulus(&a, &sched),
            Err(Error::ScheduleNotAdmissible(_))
        ));
    }
}
