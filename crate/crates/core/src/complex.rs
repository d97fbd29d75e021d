//! Complex vectors, norms, branch-safe elementary functions and numerical
//! Jacobians.
//!
//! Every multivalued function in the crate goes through [`principal_log`].
//! The callers only pass arguments that are confined to the right half-plane
//! by a disk hypothesis, so a cut hit is reported as an error and never
//! clamped.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default distance from the negative real axis below which a log argument is
/// treated as lying on the cut.
pub const CUT_MARGIN: f64 = 1e-14;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-6;

/// Default radius of the complex-step stencil.
pub const COMPLEX_STEP_RADIUS: f64 = 1e-3;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A point of `C^n`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CPoint(Vec<Complex64>);

impl CPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("a point needs at least one coordinate".into()));
        }
        Ok(Self(coords))
    }

    /// Checked constructor that also rejects NaN and infinities.
    pub fn finite(coords: Vec<Complex64>) -> Result<Self> {
        let p = Self::new(coords)?;
        p.ensure_finite()?;
        Ok(p)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self(vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn scalar(z: Complex64) -> Self {
        Self(vec![z])
    }

    /// Unit coordinate vector `e_j` scaled by `scale`.
    pub fn basis(dim: usize, j: usize, scale: Complex64) -> Self {
        let mut p = Self::zeros(dim);
        p.0[j] = scale;
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.0
    }

    /// First coordinate; every point has one.
    pub fn first(&self) -> Complex64 {
        self.0[0]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * k).collect())
    }

    pub fn scale_re(&self, k: f64) -> Self {
        Self(self.0.iter().map(|z| z * k).collect())
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Euclidean => self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormKind::Sup => self.0.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// Euclidean distance, the default metric for residuals.
    pub fn dist(&self, other: &CPoint) -> f64 {
        (self - other).norm(NormKind::Euclidean)
    }

    /// Sub-vector of coordinates `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> CPoint {
        CPoint(self.0[range].to_vec())
    }

    pub fn concat(parts: &[CPoint]) -> CPoint {
        CPoint(parts.iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    fn check_dim(&self, other: &CPoint) {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in point arithmetic");
    }
}

impl fmt::Debug for CPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, z) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{:+}i", z.re, z.im)?;
        }
        f.write_str(")")
    }
}

impl Index<usize> for CPoint {
    type Output = Complex64;
    fn index(&self, j: usize) -> &Complex64 {
        &self.0[j]
    }
}

impl IndexMut<usize> for CPoint {
    fn index_mut(&mut self, j: usize) -> &mut Complex64 {
        &mut self.0[j]
    }
}

impl Add for &CPoint {
    type Output = CPoint;
    fn add(self, rhs: &CPoint) -> CPoint {
        self.check_dim(rhs);
        CPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CPoint {
    type Output = CPoint;
    fn sub(self, rhs: &CPoint) -> CPoint {
        self.check_dim(rhs);
        CPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for CPoint {
    type Output = CPoint;
    fn add(self, rhs: CPoint) -> CPoint {
        &self + &rhs
    }
}

impl Sub for CPoint {
    type Output = CPoint;
    fn sub(self, rhs: CPoint) -> CPoint {
        &self - &rhs
    }
}

impl Neg for &CPoint {
    type Output = CPoint;
    fn neg(self) -> CPoint {
        CPoint(self.0.iter().map(|z| -z).collect())
    }
}

impl From<Complex64> for CPoint {
    fn from(z: Complex64) -> Self {
        CPoint::scalar(z)
    }
}

/// Norm on `C^n` used for ball membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Euclidean,
    Sup,
}

/// `norm` with the finiteness check.
pub fn norm(p: &CPoint, kind: NormKind) -> Result<f64> {
    p.ensure_finite()?;
    Ok(p.norm(kind))
}

/// Square complex matrix, used for differentials.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<Complex64>);

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn scaled_identity(n: usize, lambda: Complex64) -> Self {
        Self(DMatrix::identity(n, n) * lambda)
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, e) in entries.iter().enumerate() {
            m[(j, j)] = *e;
        }
        Self(m)
    }

    /// Block-diagonal matrix assembled from square blocks.
    pub fn block_diagonal(blocks: &[CMatrix]) -> Self {
        let n: usize = blocks.iter().map(CMatrix::dim).sum();
        let mut m = DMatrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            let k = b.dim();
            m.view_mut((off, off), (k, k)).copy_from(&b.0);
            off += k;
        }
        Self(m)
    }

    pub fn from_columns(cols: &[CPoint]) -> Self {
        let n = cols.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.dim(), n, "jacobian columns must be square");
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.0[(i, j)] = v;
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self(&self.0 * k)
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }

    pub fn apply(&self, v: &CPoint) -> CPoint {
        let n = self.dim();
        CPoint(
            (0..n)
                .map(|i| (0..n).map(|j| self.0[(i, j)] * v[j]).sum())
                .collect(),
        )
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    /// Solve `self * x = rhs`. `None` when the matrix is singular.
    pub fn solve(&self, rhs: &CPoint) -> Option<CPoint> {
        let b = nalgebra::DVector::from_column_slice(rhs.coords());
        self.0.clone().lu().solve(&b).map(|x| CPoint(x.iter().copied().collect()))
    }

    /// Max-row-sum norm of the inverse; infinite for singular matrices.
    pub fn inverse_norm(&self) -> f64 {
        match self.0.clone().try_inverse() {
            Some(inv) => (0..inv.nrows())
                .map(|i| inv.row(i).iter().map(|z| z.norm()).sum::<f64>())
                .fold(0.0, f64::max),
            None => f64::INFINITY,
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn on_cut(z: Complex64, margin: f64) -> bool {
    z.re <= 0.0 && z.im.abs() <= margin
}

/// Principal logarithm with the cut `(-inf, 0]` and explicit cut margin.
pub fn principal_log_with_margin(z: Complex64, margin: f64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if on_cut(z, margin) {
        return Err(Error::BranchCut(format!("{z}")));
    }
    Ok(Complex64::new(z.norm().ln(), z.im.atan2(z.re)))
}

/// Principal logarithm; `Im` of the result lies in `(-pi, pi)`.
pub fn principal_log(z: Complex64) -> Result<Complex64> {
    principal_log_with_margin(z, CUT_MARGIN)
}

/// `z^alpha = exp(alpha * Log z)` on the principal branch.
pub fn safe_power(z: Complex64, alpha: Complex64) -> Result<Complex64> {
    Ok((alpha * principal_log(z)?).exp())
}

fn ensure_in_disk(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let r = z.norm();
    if r >= 1.0 {
        return Err(Error::OutsideDisk(r));
    }
    Ok(())
}

/// Biholomorphism of the unit disk onto the strip `|Re w| < pi/4`,
/// `g(z) = (i/2) Log((1 - iz)/(1 + iz))`, with `g(0) = 0` and `g'(0) = 1`.
pub fn cayley_strip(z: Complex64) -> Result<Complex64> {
    ensure_in_disk(z)?;
    let ratio = (Complex64::new(1.0, 0.0) - I * z) / (Complex64::new(1.0, 0.0) + I * z);
    Ok(0.5 * I * principal_log(ratio)?)
}

/// `g'(z) = 1 / (1 + z^2)`.
pub fn cayley_strip_derivative(z: Complex64) -> Result<Complex64> {
    ensure_in_disk(z)?;
    Ok(1.0 / (1.0 + z * z))
}

/// Inverse of [`cayley_strip`]: maps the strip `|Re w| < pi/4` onto the disk.
///
/// Evaluated through `exp(±2iw)` on the side where it does not overflow, so
/// points far up or down the strip land close to `±i` without NaNs.
pub fn strip_to_disk(w: Complex64) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if w.re.abs() >= FRAC_PI_4 {
        return Err(Error::OutsideStrip(w.re.abs()));
    }
    let one = Complex64::new(1.0, 0.0);
    let z = if w.im >= 0.0 {
        let e = (2.0 * I * w).exp();
        I * (one - e) / (one + e)
    } else {
        let e = (-2.0 * I * w).exp();
        I * (e - one) / (e + one)
    };
    Ok(z)
}

/// `sqrt(1 + z^2)` realized as `exp((Log(1 - iz) + Log(1 + iz)) / 2)`.
///
/// On the disk both factors have positive real part, so both logs avoid the
/// cut and the result is the branch with value 1 at the origin.
pub fn sqrt_one_plus_sq(z: Complex64) -> Result<Complex64> {
    ensure_in_disk(z)?;
    let one = Complex64::new(1.0, 0.0);
    let a = principal_log(one - I * z)?;
    let b = principal_log(one + I * z)?;
    Ok((0.5 * (a + b)).exp())
}

/// Finite-difference scheme for [`jacobian_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffScheme {
    /// `(f(p + h e_j) - f(p - h e_j)) / 2h`.
    Central { h: f64 },
    /// Perturbations `h * w^k e_j` around a circle in the complex coordinate
    /// plane, `w = exp(2 pi i / nodes)`. For holomorphic maps the trapezoidal
    /// Cauchy rule makes the error `O(h^nodes)`, leaving only rounding.
    ComplexStep { h: f64, nodes: usize },
}

impl Default for DiffScheme {
    fn default() -> Self {
        DiffScheme::Central { h: DEFAULT_STEP }
    }
}

impl DiffScheme {
    pub fn complex_step() -> Self {
        DiffScheme::ComplexStep {
            h: COMPLEX_STEP_RADIUS,
            nodes: 8,
        }
    }
}

/// Central-difference Jacobian with step `h`.
pub fn jacobian<F>(f: F, p: &CPoint, h: f64) -> Result<CMatrix>
where
    F: Fn(&CPoint) -> Result<CPoint>,
{
    if !(1e-10..=1e-4).contains(&h) {
        return Err(Error::Invalid(format!("step {h} outside [1e-10, 1e-4]")));
    }
    jacobian_with(f, p, DiffScheme::Central { h })
}

/// Numerical Jacobian of a holomorphic map with an explicit scheme.
pub fn jacobian_with<F>(f: F, p: &CPoint, scheme: DiffScheme) -> Result<CMatrix>
where
    F: Fn(&CPoint) -> Result<CPoint>,
{
    p.ensure_finite()?;
    let n = p.dim();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let col = match scheme {
            DiffScheme::Central { h } => {
                let e = CPoint::basis(n, j, Complex64::new(h, 0.0));
                let fp = f(&(p + &e))?;
                let fm = f(&(p - &e))?;
                check_out_dim(&fp, n)?;
                (&fp - &fm).scale_re(0.5 / h)
            }
            DiffScheme::ComplexStep { h, nodes } => {
                let nodes = nodes.max(4);
                let mut acc = CPoint::zeros(n);
                for k in 0..nodes {
                    let dir = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
                    let e = CPoint::basis(n, j, dir * h);
                    let fk = f(&(p + &e))?;
                    check_out_dim(&fk, n)?;
                    acc = &acc + &fk.scale(dir.conj());
                }
                acc.scale_re(1.0 / (h * nodes as f64))
            }
        };
        cols.push(col);
    }
    Ok(CMatrix::from_columns(&cols))
}

fn check_out_dim(v: &CPoint, n: usize) -> Result<()> {
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn norms_of_small_vectors() {
        let zero = CPoint::zeros(2);
        assert_eq!(norm(&zero, NormKind::Sup).unwrap(), 0.0);
        let p = CPoint::new(vec![c(3.0, 4.0), c(0.0, 0.0)]).unwrap();
        assert!((norm(&p, NormKind::Euclidean).unwrap() - 5.0).abs() < 1e-15);
        // componentwise moduli 5 and 12
        let q = CPoint::new(vec![c(3.0, 4.0), c(0.0, 12.0)]).unwrap();
        assert_eq!(norm(&q, NormKind::Sup).unwrap(), 12.0);
        let bad = CPoint::new(vec![c(f64::NAN, 0.0)]).unwrap();
        assert_eq!(norm(&bad, NormKind::Sup), Err(Error::NonFinite));
    }

    #[test]
    fn norm_is_homogeneous() {
        let p = CPoint::new(vec![c(0.3, -0.2), c(1.5, 0.7)]).unwrap();
        let lam = c(-0.6, 1.1);
        for kind in [NormKind::Euclidean, NormKind::Sup] {
            let lhs = p.scale(lam).norm(kind);
            assert!((lhs - lam.norm() * p.norm(kind)).abs() < 1e-14);
        }
    }

    #[test]
    fn principal_log_values() {
        assert_eq!(principal_log(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((principal_log(c(std::f64::consts::E, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let l = principal_log(c(0.0, 1.0)).unwrap();
        assert!((l - c(0.0, PI / 2.0)).norm() < 1e-15);
        assert!((l.exp() - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn principal_log_rejects_cut() {
        assert!(matches!(principal_log(c(-2.0, 0.0)), Err(Error::BranchCut(_))));
        assert!(matches!(principal_log(c(0.0, 0.0)), Err(Error::BranchCut(_))));
        assert!(matches!(principal_log(c(-1.0, 1e-15)), Err(Error::BranchCut(_))));
        assert!(principal_log(c(-1.0, 1e-12)).is_ok());
    }

    #[test]
    fn safe_power_values() {
        assert!((safe_power(c(4.0, 0.0), c(0.5, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(safe_power(c(0.3, -2.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let z = c(0.7, 0.4);
        assert!((safe_power(z, c(1.0, 0.0)).unwrap() - z).norm() < 1e-15);
        assert!((safe_power(z, c(3.0, 0.0)).unwrap() - z * z * z).norm() < 1e-14);
    }

    #[test]
    fn safe_power_imaginary_exponent() {
        // mpmath at 30 digits: exp((i/2) * log((1 - 0.3i)/(1 + 0.3i)))
        let z = (c(1.0, -0.3)) / (c(1.0, 0.3));
        let got = safe_power(z, c(0.0, 0.5)).unwrap();
        let expected = c(1.338_375_807_015_702, 0.0);
        assert!((got - expected).norm() < 1e-14, "{got}");
    }

    #[test]
    fn cayley_strip_values() {
        assert_eq!(cayley_strip(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let h = 1e-6;
        let d = (cayley_strip(c(h, 0.0)).unwrap() - cayley_strip(c(-h, 0.0)).unwrap()) / (2.0 * h);
        assert!((d - c(1.0, 0.0)).norm() < 1e-9);
        let w = cayley_strip(c(0.5, 0.0)).unwrap();
        assert!(w.re.abs() < FRAC_PI_4);
        assert!(matches!(cayley_strip(c(0.6, 0.8)), Err(Error::OutsideDisk(_))));
    }

    #[test]
    fn strip_to_disk_far_up_and_down() {
        let z = strip_to_disk(c(0.1, 40.0)).unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-15);
        let z = strip_to_disk(c(0.1, -400.0)).unwrap();
        assert!((z - c(0.0, -1.0)).norm() < 1e-15);
        assert!(matches!(strip_to_disk(c(0.8, 0.0)), Err(Error::OutsideStrip(_))));
    }

    #[test]
    fn sqrt_one_plus_sq_values() {
        assert_eq!(sqrt_one_plus_sq(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let r = sqrt_one_plus_sq(c(0.6, 0.0)).unwrap();
        assert!((r - c(1.36f64.sqrt(), 0.0)).norm() < 1e-15);
        let r = sqrt_one_plus_sq(c(0.0, 0.9)).unwrap();
        assert!((r * r - c(0.19, 0.0)).norm() < 1e-12);
        assert!(sqrt_one_plus_sq(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn jacobian_of_linear_maps() {
        let p = CPoint::new(vec![c(0.2, 0.1), c(-0.3, 0.5)]).unwrap();
        let j = jacobian(|z: &CPoint| Ok(z.clone()), &p, 1e-6).unwrap();
        assert!(j.max_abs_diff(&CMatrix::identity(2)) < 1e-10);
        let j = jacobian(|z: &CPoint| Ok(z.scale_re(2.0)), &CPoint::zeros(2), 1e-6).unwrap();
        assert!(j.max_abs_diff(&CMatrix::scaled_identity(2, c(2.0, 0.0))) < 1e-10);
        assert!(jacobian(|z: &CPoint| Ok(z.clone()), &p, 1e-2).is_err());
    }

    #[test]
    fn complex_step_is_near_machine_precision() {
        let f = |z: &CPoint| Ok(CPoint::scalar(z[0].exp()));
        let p = CPoint::scalar(c(0.3, -0.7));
        let j = jacobian_with(f, &p, DiffScheme::complex_step()).unwrap();
        assert!((j.get(0, 0) - p[0].exp()).norm() < 1e-12);
    }

    #[test]
    fn solve_and_inverse_norm() {
        let m = CMatrix::diagonal(&[c(2.0, 0.0), c(0.0, 4.0)]);
        let x = m.solve(&CPoint::new(vec![c(2.0, 0.0), c(0.0, 4.0)]).unwrap()).unwrap();
        assert!(x.dist(&CPoint::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap()) < 1e-15);
        assert!((m.inverse_norm() - 0.5).abs() < 1e-15);
        assert_eq!(CMatrix::zeros(2).inverse_norm(), f64::INFINITY);
    }
}
