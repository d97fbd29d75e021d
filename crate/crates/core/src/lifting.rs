//! Path lifting through covering maps.
//!
//! A path `c(u)` downstairs is followed upstairs by predictor-corrector
//! continuation: the predictor is the Newton step `w + Df(w)^{-1} (c(u') - f(w))`,
//! the corrector damped Newton on `f(w) = c(u')`. A step is accepted only
//! when the corrector converges quickly and lands close to the predictor,
//! which keeps the iterate on the sheet it started on. Otherwise the
//! parameter step is halved.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::complex::CPoint;
use crate::covers::{ChainSpec, CoverSpec};
use crate::error::{Error, Result};

/// Tuning knobs for [`lift_curve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftOptions {
    /// Absolute defect `|f(w) - c|` requested at every output node.
    pub tol: f64,
    /// Cap on accepted plus rejected continuation steps.
    pub max_nodes: usize,
    /// Corrector iterations before a step is refined.
    pub max_newton: usize,
    /// Step halvings per damped Newton iteration.
    pub damping_halvings: usize,
    /// `|Df^{-1}|` above this is reported as a critical point.
    pub inverse_cap: f64,
    /// Lifts whose ball margin drops to this are reported as escaped.
    pub ball_exit: f64,
    /// Largest predictor displacement upstairs.
    pub max_step: f64,
    /// Initial number of parameter steps per knot interval.
    pub initial_steps: usize,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            tol: 1e-12,
            max_nodes: 1 << 14,
            max_newton: 8,
            damping_halvings: 6,
            inverse_cap: 1e8,
            ball_exit: 1e-12,
            max_step: 0.05,
            initial_steps: 8,
        }
    }
}

impl LiftOptions {
    pub fn with_tol(tol: f64) -> Self {
        LiftOptions {
            tol,
            ..Self::default()
        }
    }
}

/// A discretized path `u -> point`, `u` running from 0 to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    nodes: Vec<(f64, CPoint)>,
}

impl PathSample {
    pub fn new(nodes: Vec<(f64, CPoint)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Invalid("a path needs at least two nodes".into()));
        }
        if nodes[0].0 != 0.0 || nodes.last().unwrap().0 != 1.0 {
            return Err(Error::Invalid("path parameter must run from 0 to 1".into()));
        }
        if nodes.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Invalid("path parameter must be strictly increasing".into()));
        }
        let dim = nodes[0].1.dim();
        for (_, p) in &nodes {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            p.ensure_finite()?;
        }
        Ok(PathSample { nodes })
    }

    /// Sample `f` at `n + 1` equally spaced parameters.
    pub fn uniform<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<CPoint>,
    {
        let n = n.max(1);
        let nodes = (0..=n)
            .map(|j| {
                let u = j as f64 / n as f64;
                f(u).map(|p| (u, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[(f64, CPoint)] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].1.dim()
    }

    pub fn start(&self) -> &CPoint {
        &self.nodes[0].1
    }

    pub fn end(&self) -> &CPoint {
        &self.nodes.last().unwrap().1
    }

    pub fn params(&self) -> Vec<f64> {
        self.nodes.iter().map(|(u, _)| *u).collect()
    }

    /// Largest parameter step.
    pub fn mesh(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1].0 - w[0].0).fold(0.0, f64::max)
    }

    /// Largest Euclidean distance between consecutive points.
    pub fn spatial_mesh(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1].1.dist(&w[0].1))
            .fold(0.0, f64::max)
    }

    /// Piecewise-linear interpolation.
    pub fn point_at(&self, u: f64) -> CPoint {
        let u = u.clamp(0.0, 1.0);
        let i = self.nodes.partition_point(|(v, _)| *v < u);
        if i == 0 {
            return self.nodes[0].1.clone();
        }
        let (u0, p0) = &self.nodes[i - 1];
        let (u1, p1) = &self.nodes[i];
        let s = (u - u0) / (u1 - u0);
        &p0.scale_re(1.0 - s) + &p1.scale_re(s)
    }

    /// Apply a map to every node.
    pub fn map<F>(&self, f: F) -> Result<PathSample>
    where
        F: Fn(&CPoint) -> Result<CPoint>,
    {
        let nodes = self
            .nodes
            .iter()
            .map(|(u, p)| f(p).map(|q| (*u, q)))
            .collect::<Result<Vec<_>>>()?;
        PathSample::new(nodes)
    }

    /// Run through `self`, then `other`, each at half speed.
    pub fn concat(&self, other: &PathSample) -> Result<PathSample> {
        let mut nodes: Vec<(f64, CPoint)> = self.nodes.iter().map(|(u, p)| (0.5 * u, p.clone())).collect();
        nodes.extend(other.nodes.iter().skip(1).map(|(u, p)| (0.5 + 0.5 * u, p.clone())));
        PathSample::new(nodes)
    }

    /// Insert `factor - 1` interpolated nodes in every interval.
    pub fn refine(&self, factor: usize) -> PathSample {
        let factor = factor.max(1);
        let mut nodes = Vec::with_capacity((self.nodes.len() - 1) * factor + 1);
        for w in self.nodes.windows(2) {
            for k in 0..factor {
                let s = k as f64 / factor as f64;
                let u = w[0].0 + s * (w[1].0 - w[0].0);
                nodes.push((u, &w[0].1.scale_re(1.0 - s) + &w[1].1.scale_re(s)));
            }
        }
        nodes.push(self.nodes.last().unwrap().clone());
        PathSample { nodes }
    }
}

/// Outcome of a lift.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    pub lifted: PathSample,
    /// `max_j |f(w_j) - c_j|` over output nodes.
    pub max_defect: f64,
    /// `newton_iterations[k]` counts corrector solves that took `k` iterations.
    pub newton_iterations: Vec<usize>,
    /// Continuation steps taken, including rejected ones.
    pub steps: usize,
}

impl LiftResult {
    pub fn end(&self) -> &CPoint {
        self.lifted.end()
    }
}

struct NewtonOutcome {
    w: CPoint,
    residual: f64,
    iterations: usize,
}

enum NewtonFailure {
    Hard(Error),
    Slow,
}

fn ensure_invertible(jac_inv_norm: f64, cap: f64) -> Result<()> {
    if !(jac_inv_norm <= cap) {
        return Err(Error::NearCritical(jac_inv_norm));
    }
    Ok(())
}

/// Damped Newton on `f(w) = target` from `w`.
fn newton(
    cover: &CoverSpec,
    target: &CPoint,
    w: CPoint,
    opts: &LiftOptions,
    max_iter: usize,
) -> std::result::Result<NewtonOutcome, NewtonFailure> {
    let eval = |w: &CPoint| cover.eval(w).map(|v| &v - target);
    let mut w = w;
    let mut f = eval(&w).map_err(NewtonFailure::Hard)?;
    let mut r = f.norm(crate::complex::NormKind::Euclidean);
    let scale = 1.0 + target.norm(crate::complex::NormKind::Euclidean);
    for it in 0..=max_iter {
        let jac = cover.jacobian(&w).map_err(NewtonFailure::Hard)?;
        let floor = 32.0 * f64::EPSILON * (scale + jac_norm_estimate(&jac) * w.norm(crate::complex::NormKind::Euclidean));
        if r <= opts.tol.max(floor) {
            return Ok(NewtonOutcome {
                w,
                residual: r,
                iterations: it,
            });
        }
        if it == max_iter {
            break;
        }
        ensure_invertible(jac.inverse_norm(), opts.inverse_cap).map_err(NewtonFailure::Hard)?;
        let delta = jac.solve(&(-&f)).ok_or(NewtonFailure::Hard(Error::NearCritical(f64::INFINITY)))?;
        let step_norm = delta.norm(crate::complex::NormKind::Euclidean);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.damping_halvings {
            let trial = &w + &delta.scale_re(lambda);
            if cover.domain.margin(&trial) > 0.0 {
                if let Ok(ft) = eval(&trial) {
                    let rt = ft.norm(crate::complex::NormKind::Euclidean);
                    if rt < r {
                        accepted = Some((trial, ft, rt));
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((wn, fn_, rn)) => {
                w = wn;
                f = fn_;
                r = rn;
            }
            None => {
                // No decrease: either at the rounding floor or genuinely stuck.
                if step_norm <= 1e3 * f64::EPSILON * (1.0 + w.norm(crate::complex::NormKind::Euclidean)) {
                    return Ok(NewtonOutcome {
                        w,
                        residual: r,
                        iterations: it + 1,
                    });
                }
                return Err(NewtonFailure::Slow);
            }
        }
        if lambda == 1.0 && step_norm <= 4.0 * f64::EPSILON * (1.0 + w.norm(crate::complex::NormKind::Euclidean)) {
            return Ok(NewtonOutcome {
                w,
                residual: r,
                iterations: it + 1,
            });
        }
    }
    Err(NewtonFailure::Slow)
}

fn jac_norm_estimate(j: &crate::complex::CMatrix) -> f64 {
    let n = j.dim();
    (0..n)
        .map(|i| (0..n).map(|k| j.get(i, k).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Lift the curve `u -> curve(u)` through `cover`, starting at `start`,
/// reporting the lift at each of the parameters in `knots`
/// (strictly increasing, from 0 to 1).
pub fn lift_curve<F>(
    cover: &CoverSpec,
    curve: F,
    knots: &[f64],
    start: &CPoint,
    opts: &LiftOptions,
) -> Result<LiftResult>
where
    F: Fn(f64) -> Result<CPoint>,
{
    if knots.len() < 2 || knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
        return Err(Error::Invalid("knots must run from 0 to 1".into()));
    }
    if start.dim() != cover.dim {
        return Err(Error::DimensionMismatch {
            expected: cover.dim,
            got: start.dim(),
        });
    }
    let c0 = curve(0.0)?;
    let start_defect = cover.eval(start)?.dist(&c0);
    let start_tol = opts.tol.max(64.0 * f64::EPSILON * (1.0 + c0.norm(crate::complex::NormKind::Euclidean)));
    if start_defect > start_tol {
        return Err(Error::BadStart(start_defect));
    }

    let mut hist = vec![0usize; opts.max_newton + 2];
    let mut steps = 0usize;
    let mut w = start.clone();
    let mut u = 0.0;
    let mut out = vec![(0.0, w.clone())];
    let mut max_defect = start_defect;

    for pair in knots.windows(2) {
        let (_, u_end) = (pair[0], pair[1]);
        let span = u_end - u;
        let mut du = span / opts.initial_steps.max(1) as f64;
        let min_du = span * 1e-12;
        while u < u_end {
            if steps >= opts.max_nodes {
                return Err(Error::StepTooCoarse(u));
            }
            steps += 1;
            let last = u + du >= u_end - 1e-15 * span;
            let u_next = if last { u_end } else { u + du };
            let target = curve(u_next)?;
            let accepted = try_step(cover, &w, &target, opts)?;
            match accepted {
                Some(outcome) => {
                    if cover.domain.margin(&outcome.w) <= opts.ball_exit {
                        return Err(Error::LiftEscaped(u_next));
                    }
                    let slot = outcome.iterations.min(hist.len() - 1);
                    hist[slot] += 1;
                    let quick = outcome.iterations <= 3;
                    w = outcome.w;
                    u = u_next;
                    if last {
                        max_defect = max_defect.max(outcome.residual);
                    }
                    if quick {
                        du *= 1.5;
                    }
                }
                None => {
                    du *= 0.5;
                    if du < min_du {
                        return Err(Error::StepTooCoarse(u));
                    }
                }
            }
        }
        u = u_end;
        w = polish(cover, &curve(u_end)?, w);
        out.push((u_end, w.clone()));
    }

    Ok(LiftResult {
        lifted: PathSample::new(out)?,
        max_defect,
        newton_iterations: hist,
        steps,
    })
}

/// A few undamped Newton steps past the defect tolerance. Where `|Df|` is
/// small a tiny defect still hides a sizeable error upstairs; iterate until
/// the step itself is at rounding level or stops shrinking.
fn polish(cover: &CoverSpec, target: &CPoint, w: CPoint) -> CPoint {
    let mut w = w;
    let mut last_step = f64::INFINITY;
    for _ in 0..4 {
        let (Ok(jac), Ok(fw)) = (cover.jacobian(&w), cover.eval(&w)) else {
            break;
        };
        let Some(delta) = jac.solve(&(target - &fw)) else {
            break;
        };
        let step = delta.norm(crate::complex::NormKind::Euclidean);
        if !(step < 0.5 * last_step) {
            break;
        }
        let next = &w + &delta;
        if cover.domain.margin(&next) <= 0.0 {
            break;
        }
        w = next;
        last_step = step;
        if step <= 4.0 * f64::EPSILON * (1.0 + w.norm(crate::complex::NormKind::Euclidean)) {
            break;
        }
    }
    w
}

/// One predictor-corrector step. `Ok(None)` asks the caller to refine.
fn try_step(
    cover: &CoverSpec,
    w: &CPoint,
    target: &CPoint,
    opts: &LiftOptions,
) -> Result<Option<NewtonOutcome>> {
    let jac = cover.jacobian(w)?;
    ensure_invertible(jac.inverse_norm(), opts.inverse_cap)?;
    let fw = cover.eval(w)?;
    let Some(delta) = jac.solve(&(target - &fw)) else {
        return Err(Error::NearCritical(f64::INFINITY));
    };
    let step = delta.norm(crate::complex::NormKind::Euclidean);
    if step > opts.max_step {
        return Ok(None);
    }
    let predicted = w + &delta;
    if cover.domain.margin(&predicted) <= 0.0 {
        return Ok(None);
    }
    match newton(cover, target, predicted.clone(), opts, opts.max_newton) {
        Ok(outcome) => {
            let drift = outcome.w.dist(&predicted);
            if drift <= 0.25 * step + 1e-12 {
                Ok(Some(outcome))
            } else {
                Ok(None)
            }
        }
        Err(NewtonFailure::Slow) => Ok(None),
        Err(NewtonFailure::Hard(Error::OutsideBall(_) | Error::OutsideDisk(_))) => Ok(None),
        Err(NewtonFailure::Hard(e @ Error::NearCritical(_))) => Err(e),
        Err(NewtonFailure::Hard(_)) => Ok(None),
    }
}

/// Lift a sampled path, reporting the lift at the path's own nodes. Between
/// nodes the path is followed by linear interpolation.
pub fn lift_path(cover: &CoverSpec, path: &PathSample, start: &CPoint, tol: f64) -> Result<LiftResult> {
    lift_path_with(cover, path, start, &LiftOptions::with_tol(tol))
}

pub fn lift_path_with(
    cover: &CoverSpec,
    path: &PathSample,
    start: &CPoint,
    opts: &LiftOptions,
) -> Result<LiftResult> {
    if path.dim() != cover.dim {
        return Err(Error::DimensionMismatch {
            expected: cover.dim,
            got: path.dim(),
        });
    }
    lift_curve(cover, |u| Ok(path.point_at(u)), &path.params(), start, opts)
}

/// Newton from `seed` for a preimage of `target` (up to 50 iterations).
pub fn local_inverse(cover: &CoverSpec, target: &CPoint, seed: &CPoint, tol: f64) -> Result<CPoint> {
    let opts = LiftOptions::with_tol(tol);
    match newton(cover, target, seed.clone(), &opts, 50) {
        Ok(o) => Ok(o.w),
        Err(NewtonFailure::Hard(e @ Error::NearCritical(_))) => Err(e),
        Err(_) => {
            let r = cover
                .eval(seed)
                .map(|v| v.dist(target))
                .unwrap_or(f64::INFINITY);
            Err(Error::NoLocalPreimage(r))
        }
    }
}

/// `phi_{s,t}(z)`: endpoint of the lift through `f_t`, from 0, of the radial
/// image path `u -> f_s(u z)`.
pub fn evolution_map(chain: &ChainSpec, s: f64, t: f64, z: &CPoint, tol: f64) -> Result<CPoint> {
    evolution_map_with(chain, s, t, z, &LiftOptions::with_tol(tol))
}

pub fn evolution_map_with(
    chain: &ChainSpec,
    s: f64,
    t: f64,
    z: &CPoint,
    opts: &LiftOptions,
) -> Result<CPoint> {
    if !(0.0 <= s && s <= t) {
        return Err(Error::Invalid(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
    }
    if z.dim() != chain.dim {
        return Err(Error::DimensionMismatch {
            expected: chain.dim,
            got: z.dim(),
        });
    }
    z.ensure_finite()?;
    let r = z.norm(chain.norm);
    if r >= 1.0 {
        return Err(Error::OutsideBall(r));
    }
    if r == 0.0 {
        return Ok(z.clone());
    }
    let f_s = chain.slice(s)?;
    let f_t = chain.slice(t)?;
    let origin = CPoint::zeros(chain.dim);
    let lift = lift_curve(&f_t, |u| f_s.eval(&z.scale_re(u)), &[0.0, 1.0], &origin, opts)?;
    let end = lift.end().clone();
    if end.norm(chain.norm) >= 1.0 {
        return Err(Error::LiftEscaped(1.0));
    }
    Ok(end)
}

/// Evaluate `phi_{s,t}` at many points in parallel; order is preserved.
pub fn evolution_map_batch(
    chain: &ChainSpec,
    s: f64,
    t: f64,
    points: &[CPoint],
    tol: f64,
) -> Vec<Result<CPoint>> {
    points
        .par_iter()
        .map(|z| evolution_map(chain, s, t, z, tol))
        .collect()
}

/// Lift a grid of paths row by row. Row `j + 1` starts where the lift of the
/// seam from row `j`'s start to row `j + 1`'s start ends.
pub fn lift_homotopy(cover: &CoverSpec, grid: &[PathSample], start: &CPoint, tol: f64) -> Result<Vec<LiftResult>> {
    let opts = LiftOptions::with_tol(tol);
    let Some(first) = grid.first() else {
        return Ok(Vec::new());
    };
    let mut rows = Vec::with_capacity(grid.len());
    rows.push(lift_path_with(cover, first, start, &opts)?);
    let mut row_start = start.clone();
    for pair in grid.windows(2) {
        let (a, b) = (pair[0].start().clone(), pair[1].start().clone());
        if a != b {
            let seam = lift_curve(
                cover,
                |u| Ok(&a.scale_re(1.0 - u) + &b.scale_re(u)),
                &[0.0, 1.0],
                &row_start,
                &opts,
            )?;
            row_start = seam.end().clone();
        }
        rows.push(lift_path_with(cover, &pair[1], &row_start, &opts)?);
    }
    Ok(rows)
}

/// Largest distance between corresponding nodes of adjacent lifted rows.
pub fn homotopy_row_gap(rows: &[LiftResult]) -> f64 {
    rows.windows(2)
        .map(|w| {
            w[0].lifted
                .nodes()
                .iter()
                .zip(w[1].lifted.nodes())
                .map(|((_, a), (_, b))| a.dist(b))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// `exp(i theta)` shorthand used by the loop builders.
pub(crate) fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{cayley_strip, strip_to_disk};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_path_lifts_to_constant() {
        let cover = CoverSpec::annulus(0.0);
        let path = PathSample::uniform(4, |_| Ok(CPoint::zeros(1))).unwrap();
        let lift = lift_path(&cover, &path, &CPoint::zeros(1), 1e-12).unwrap();
        for (_, w) in lift.lifted.nodes() {
            assert_eq!(*w, CPoint::zeros(1));
        }
    }

    #[test]
    fn exp_loop_lifts_to_deck_translate() {
        let cover = CoverSpec::exp(1);
        let path = PathSample::uniform(64, |u| Ok(CPoint::scalar(cis(2.0 * PI * u) - 1.0))).unwrap();
        let lift = lift_path(&cover, &path, &CPoint::zeros(1), 1e-12).unwrap();
        assert!((lift.end()[0] - c(0.0, 2.0 * PI)).norm() < 1e-10);
        for (u, w) in lift.lifted.nodes() {
            assert!((w[0] - c(0.0, 2.0 * PI * u)).norm() < 1e-10);
        }
    }

    #[test]
    fn radial_image_lifts_to_closed_form() {
        let f0 = CoverSpec::annulus(0.0);
        let f1 = CoverSpec::annulus(1.0);
        let path = PathSample::uniform(32, |u| f0.eval(&CPoint::scalar(c(0.8 * u, 0.0)))).unwrap();
        let lift = lift_path(&f1, &path, &CPoint::zeros(1), 1e-13).unwrap();
        let expected = strip_to_disk((-1.0f64).exp() * cayley_strip(c(0.8, 0.0)).unwrap()).unwrap();
        assert!((lift.end()[0] - expected).norm() < 1e-9);
    }

    #[test]
    fn evolution_map_trivial_cases() {
        let chain = ChainSpec::annulus();
        let z = CPoint::scalar(c(0.4, -0.3));
        assert!(evolution_map(&chain, 1.0, 1.0, &z, 1e-13).unwrap().dist(&z) < 1e-12);
        assert_eq!(evolution_map(&chain, 0.0, 1.0, &CPoint::zeros(1), 1e-13).unwrap(), CPoint::zeros(1));
        assert!(evolution_map(&chain, 1.0, 0.5, &z, 1e-13).is_err());
        let outside = CPoint::scalar(c(1.0, 0.0));
        assert!(matches!(evolution_map(&chain, 0.0, 1.0, &outside, 1e-13), Err(Error::OutsideBall(_))));
    }

    #[test]
    fn evolution_map_matches_strip_formula() {
        let chain = ChainSpec::annulus();
        let z = c(0.5, 0.0);
        let got = evolution_map(&chain, 0.0, 1.0, &CPoint::scalar(z), 1e-13).unwrap()[0];
        let expected = strip_to_disk((-1.0f64).exp() * cayley_strip(z).unwrap()).unwrap();
        assert!((got - expected).norm() < 1e-10);
    }

    #[test]
    fn local_inverse_examples() {
        let cover = CoverSpec::exp(1);
        let seed = CPoint::scalar(c(0.2, 0.3));
        let target = cover.eval(&seed).unwrap();
        assert!(local_inverse(&cover, &target, &seed, 1e-14).unwrap().dist(&seed) < 1e-15);
        let w = local_inverse(&cover, &CPoint::zeros(1), &CPoint::scalar(c(0.1, 0.0)), 1e-14).unwrap();
        assert!(w[0].norm() < 1e-14);
        let w = local_inverse(&cover, &CPoint::zeros(1), &CPoint::scalar(c(0.0, 6.0)), 1e-14).unwrap();
        assert!((w[0] - c(0.0, 2.0 * PI)).norm() < 1e-13);
    }

    #[test]
    fn local_inverse_reports_divergence() {
        // 10 lies outside the annulus A_0, so Newton runs into the disk boundary.
        let cover = CoverSpec::annulus(0.0);
        let r = local_inverse(&cover, &CPoint::scalar(c(10.0, 0.0)), &CPoint::zeros(1), 1e-12);
        assert!(matches!(r, Err(Error::NoLocalPreimage(_))), "{r:?}");
    }

    #[test]
    fn bad_start_is_rejected() {
        let cover = CoverSpec::annulus(0.0);
        let path = PathSample::uniform(4, |u| Ok(CPoint::scalar(c(0.1 * u, 0.0)))).unwrap();
        let r = lift_path(&cover, &path, &CPoint::scalar(c(0.3, 0.0)), 1e-12);
        assert!(matches!(r, Err(Error::BadStart(_))));
    }

    #[test]
    fn path_sample_validation() {
        let p = CPoint::zeros(1);
        assert!(PathSample::new(vec![(0.0, p.clone())]).is_err());
        assert!(PathSample::new(vec![(0.0, p.clone()), (0.5, p.clone())]).is_err());
        assert!(PathSample::new(vec![(0.0, p.clone()), (0.0, p.clone()), (1.0, p.clone())]).is_err());
        let path = PathSample::uniform(4, |u| Ok(CPoint::scalar(c(u, 0.0)))).unwrap();
        assert!((path.point_at(0.3)[0] - c(0.3, 0.0)).norm() < 1e-15);
        assert_eq!(path.refine(4).len(), 17);
        assert!((path.mesh() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn identical_rows_lift_identically() {
        let cover = CoverSpec::annulus(0.5);
        let row = PathSample::uniform(16, |u| Ok(CPoint::scalar(cis(2.0 * PI * u) - 1.0))).unwrap();
        let rows = lift_homotopy(&cover, &[row.clone(), row.clone(), row], &CPoint::zeros(1), 1e-12).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(homotopy_row_gap(&rows) < 1e-12);
    }
}
