//! Loops, winding numbers and deck indices.
//!
//! A based loop `zeta` at `f_t(0)` lifts through `f_t` from 0 to some deck
//! translate `F_k(0)`; the integer `k` is the class of `zeta` in the deck
//! group. Comparing it with the winding of `zeta` around the puncture of the
//! Loewner range probes whether `pi_1(Omega_s) -> pi_1(R)` is injective.

use std::f64::consts::{PI, TAU};
use std::ops::Add;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{CPoint, NormKind};
use crate::covers::{ChainSpec, CoverSpec, DomainOracle};
use crate::error::{Error, Result};
use crate::lifting::{cis, lift_path_with, LiftOptions, PathSample};

/// Loops must close up to this distance.
pub const CLOSURE_TOL: f64 = 1e-10;
/// Loops passing closer than this to the winding center are rejected.
pub const WINDING_MARGIN: f64 = 1e-6;
/// Angle increments above this between consecutive nodes are ambiguous.
pub const MAX_ANGLE_STEP: f64 = 3.0 * PI / 4.0;

/// A closed sampled path.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSample {
    path: PathSample,
}

impl LoopSample {
    pub fn new(path: PathSample) -> Result<Self> {
        let gap = path.start().dist(path.end());
        if gap > CLOSURE_TOL {
            return Err(Error::NotClosed(gap));
        }
        Ok(LoopSample { path })
    }

    /// Sample `f` at `n + 1` equally spaced parameters; the last node is
    /// replaced by the first so the loop closes exactly.
    pub fn uniform<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<CPoint>,
    {
        let path = PathSample::uniform(n, &f)?;
        let gap = path.start().dist(path.end());
        if gap > CLOSURE_TOL {
            return Err(Error::NotClosed(gap));
        }
        let mut nodes = path.nodes().to_vec();
        let first = nodes[0].1.clone();
        nodes.last_mut().unwrap().1 = first;
        Ok(LoopSample {
            path: PathSample::new(nodes)?,
        })
    }

    pub fn path(&self) -> &PathSample {
        &self.path
    }

    pub fn basepoint(&self) -> &CPoint {
        self.path.start()
    }

    pub fn dim(&self) -> usize {
        self.path.dim()
    }

    /// Concatenation: `self` first, then `other`. Basepoints must agree.
    pub fn concat(&self, other: &LoopSample) -> Result<LoopSample> {
        let gap = self.basepoint().dist(other.basepoint());
        if gap > CLOSURE_TOL {
            return Err(Error::NotClosed(gap));
        }
        LoopSample::new(self.path.concat(&other.path)?)
    }

    /// The same loop run backwards.
    pub fn reverse(&self) -> LoopSample {
        let nodes = self
            .path
            .nodes()
            .iter()
            .rev()
            .map(|(u, p)| (1.0 - u, p.clone()))
            .collect();
        LoopSample {
            path: PathSample::new(nodes).expect("reversal keeps a valid path"),
        }
    }

    /// Coordinate `j` as a loop in `C`.
    pub fn coordinate(&self, j: usize) -> Result<LoopSample> {
        if j >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: j + 1,
            });
        }
        LoopSample::new(self.path.map(|p| Ok(CPoint::scalar(p[j])))?)
    }
}

/// An element of `Z^r`, the deck group of a product of `r` annular covers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomotopyClass(pub Vec<i64>);

impl HomotopyClass {
    pub fn scalar(&self) -> Option<i64> {
        match self.0.as_slice() {
            [k] => Some(*k),
            _ => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }
}

impl Add for HomotopyClass {
    type Output = HomotopyClass;

    fn add(self, rhs: HomotopyClass) -> HomotopyClass {
        HomotopyClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * s - p).norm()
}

/// Winding number of a planar loop around `center`.
pub fn winding_number(lp: &LoopSample, center: Complex64) -> Result<i64> {
    if lp.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: lp.dim(),
        });
    }
    let pts: Vec<Complex64> = lp.path.nodes().iter().map(|(_, p)| p[0]).collect();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let d = segment_distance(w[0], w[1], center);
        if d < WINDING_MARGIN {
            return Err(Error::LoopTooClose(d));
        }
        let step = ((w[1] - center) / (w[0] - center)).arg();
        if step.abs() > MAX_ANGLE_STEP {
            return Err(Error::RefineLoop(step.abs()));
        }
        total += step;
    }
    Ok((total / TAU).round() as i64)
}

/// Deck class of a loop based at `cover(0)`: lift from 0 and identify the
/// endpoint among the translates `F_k(0)` within `tol`.
pub fn deck_index(cover: &CoverSpec, lp: &LoopSample, tol: f64) -> Result<HomotopyClass> {
    let origin = CPoint::zeros(cover.dim);
    let base = cover.eval(&origin)?;
    let gap = base.dist(lp.basepoint());
    if gap > tol.max(CLOSURE_TOL) {
        return Err(Error::BadStart(gap));
    }
    let lift = lift_path_with(cover, lp.path(), &origin, &LiftOptions::default())?;
    Ok(HomotopyClass(cover.identify_deck(lift.end(), tol)?))
}

/// Class of a loop in the Loewner range, read off as winding numbers
/// around its punctures.
pub fn range_class(range: &DomainOracle, lp: &LoopSample) -> Result<HomotopyClass> {
    match range {
        DomainOracle::Punctured { center } | DomainOracle::PuncturedCylinder { center } => {
            let first = if lp.dim() == 1 { lp.clone() } else { lp.coordinate(0)? };
            Ok(HomotopyClass(vec![winding_number(&first, *center)?]))
        }
        DomainOracle::Product(parts) => {
            let mut out = Vec::with_capacity(parts.len());
            for (j, part) in parts.iter().enumerate() {
                out.extend(range_class(part, &lp.coordinate(j)?)?.0);
            }
            Ok(HomotopyClass(out))
        }
        other => Err(Error::Invalid(format!("no fundamental group model for {}", other.tag()))),
    }
}

/// One probed loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Pi1Entry {
    /// Deck class through `f_s`.
    pub class_s: HomotopyClass,
    /// Deck class through `f_t`.
    pub class_t: HomotopyClass,
    /// Class in the Loewner range.
    pub class_range: HomotopyClass,
    /// Smallest oracle margin of the loop in `Omega_s`.
    pub margin: f64,
}

impl Pi1Entry {
    pub fn consistent(&self) -> bool {
        self.class_s == self.class_t && self.class_t == self.class_range
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pi1Report {
    pub s: f64,
    pub t: f64,
    pub entries: Vec<Pi1Entry>,
}

impl Pi1Report {
    /// Every loop keeps its class from `Omega_s` to `Omega_t` to the range;
    /// in particular no nontrivial loop dies.
    pub fn injective(&self) -> bool {
        self.entries.iter().all(Pi1Entry::consistent)
    }
}

/// Compare deck classes of loops in `Omega_s` through `f_s`, through `f_t`,
/// and in the Loewner range.
pub fn pi1_injectivity_probe(chain: &ChainSpec, s: f64, t: f64, loops: &[LoopSample], tol: f64) -> Result<Pi1Report> {
    if !(s <= t) {
        return Err(Error::Invalid(format!("need s <= t, got s = {s}, t = {t}")));
    }
    let f_s = chain.slice(s)?;
    let f_t = chain.slice(t)?;
    let oracle = chain.oracle(s)?;
    let range = chain.range_oracle();
    let mut entries = Vec::with_capacity(loops.len());
    for lp in loops {
        let margin = lp
            .path()
            .nodes()
            .iter()
            .map(|(_, p)| oracle.margin(p))
            .fold(f64::INFINITY, f64::min);
        if !(margin > 0.0) {
            return Err(Error::Invalid(format!("loop leaves Omega_s (margin {margin:e})")));
        }
        entries.push(Pi1Entry {
            class_s: deck_index(&f_s, lp, tol)?,
            class_t: deck_index(&f_t, lp, tol)?,
            class_range: range_class(&range, lp)?,
            margin,
        });
    }
    Ok(Pi1Report { s, t, entries })
}

/// `turns` times around the circle of radius `radius` about `center`,
/// starting at the point of the circle on the ray from `center` through 0.
pub fn circle(center: Complex64, radius: f64, turns: i64, nodes: usize) -> Result<LoopSample> {
    let phase = if center == Complex64::new(0.0, 0.0) { 0.0 } else { (-center).arg() };
    let nodes = nodes.max(3 * turns.unsigned_abs() as usize + 3);
    LoopSample::uniform(nodes, |u| {
        Ok(CPoint::scalar(center + radius * cis(phase + TAU * turns as f64 * u)))
    })
}

/// Image under `f_t` of the seam `u -> F_{turns u}(0)`, i.e. of
/// `g^{-1}(2 pi i turns u e^{-t})`: the unit circle about `-1`, traversed
/// `turns` times from 0. It lies in every `A_t`.
pub fn seam(turns: i64, nodes: usize) -> Result<LoopSample> {
    circle(Complex64::new(-1.0, 0.0), 1.0, turns, nodes)
}

/// A wobbly loop about `-1` based at 0:
/// `-1 + exp(a sin(2 pi p u) + i (2 pi k u + b sin(2 pi q u)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopShape {
    pub turns: i64,
    pub radial_amp: f64,
    pub radial_freq: u32,
    pub angular_amp: f64,
    pub angular_freq: u32,
}

impl LoopShape {
    pub fn point(&self, u: f64) -> Complex64 {
        let rho = self.radial_amp * (TAU * self.radial_freq as f64 * u).sin();
        let theta = TAU * self.turns as f64 * u + self.angular_amp * (TAU * self.angular_freq as f64 * u).sin();
        Complex64::new(-1.0, 0.0) + Complex64::new(rho, theta).exp()
    }

    /// Largest `|log|zeta + 1||` along the loop.
    pub fn log_radius_bound(&self) -> f64 {
        self.radial_amp.abs()
    }

    pub fn sample(&self, nodes: usize) -> Result<LoopSample> {
        let swing = TAU * (self.turns.unsigned_abs() as f64 + self.angular_amp.abs() * self.angular_freq as f64);
        let needed = (swing / 0.5).ceil() as usize + 8;
        LoopSample::uniform(nodes.max(needed), |u| Ok(CPoint::scalar(self.point(u))))
    }
}

/// Product of planar loops, one per coordinate; all share the parameter.
pub fn product_loop(parts: &[LoopSample]) -> Result<LoopSample> {
    let Some(first) = parts.first() else {
        return Err(Error::Invalid("empty product loop".into()));
    };
    let params = first.path().params();
    if parts.iter().any(|p| p.path().params() != params) {
        return Err(Error::Invalid("product loop factors must share their parameters".into()));
    }
    let nodes = (0..params.len())
        .map(|i| {
            let coords: Vec<Complex64> = parts.iter().map(|p| p.path().nodes()[i].1[0]).collect();
            CPoint::new(coords).map(|c| (params[i], c))
        })
        .collect::<Result<Vec<_>>>()?;
    LoopSample::new(PathSample::new(nodes)?)
}

/// Lift `lp` and also return the Euclidean sup-norm of the lifted path, for
/// diagnostics.
pub fn lift_extent(cover: &CoverSpec, lp: &LoopSample) -> Result<f64> {
    let lift = lift_path_with(cover, lp.path(), &CPoint::zeros(cover.dim), &LiftOptions::default())?;
    Ok(lift
        .lifted
        .nodes()
        .iter()
        .map(|(_, w)| w.norm(NormKind::Euclidean))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn winding_of_circles() {
        for k in -3..=3 {
            let lp = circle(Complex64::new(-1.0, 0.0), 1.0, k, 64).unwrap();
            assert_eq!(winding_number(&lp, Complex64::new(-1.0, 0.0)).unwrap(), k);
            assert_eq!(winding_number(&lp, Complex64::new(5.0, 0.0)).unwrap(), 0);
        }
    }

    #[test]
    fn coarse_loops_ask_for_refinement() {
        let lp = LoopSample::uniform(5, |u| Ok(CPoint::scalar(cis(TAU * 2.0 * u)))).unwrap();
        assert!(matches!(
            winding_number(&lp, Complex64::new(0.0, 0.0)),
            Err(Error::RefineLoop(_))
        ));
    }

    #[test]
    fn loops_through_the_center_are_rejected() {
        let lp = circle(Complex64::new(0.0, 0.0), 1.0, 1, 32).unwrap();
        assert!(matches!(
            winding_number(&lp, Complex64::new(1.0, 0.0)),
            Err(Error::LoopTooClose(_))
        ));
    }

    #[test]
    fn open_paths_are_not_loops() {
        let p = PathSample::uniform(4, |u| Ok(CPoint::scalar(Complex64::new(u, 0.0)))).unwrap();
        assert!(matches!(LoopSample::new(p), Err(Error::NotClosed(_))));
    }

    #[test]
    fn seam_classes_through_the_annulus_cover() {
        let cover = CoverSpec::annulus(1.0);
        for k in -2..=2 {
            let lp = seam(k, 128).unwrap();
            assert_eq!(deck_index(&cover, &lp, 1e-8).unwrap(), HomotopyClass(vec![k]));
        }
    }

    #[test]
    fn concatenation_adds_classes() {
        let cover = CoverSpec::annulus(0.5);
        let a = seam(2, 96).unwrap();
        let b = seam(-1, 96).unwrap();
        let ab = a.concat(&b).unwrap();
        let k = deck_index(&cover, &ab, 1e-8).unwrap();
        assert_eq!(k, deck_index(&cover, &a, 1e-8).unwrap() + deck_index(&cover, &b, 1e-8).unwrap());
        assert_eq!(deck_index(&cover, &a.reverse(), 1e-8).unwrap(), HomotopyClass(vec![-2]));
    }
}
