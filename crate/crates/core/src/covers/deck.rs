//! Deck transformations of the catalog covers.
//!
//! Every catalog cover factors as `Psi o g` with `Psi(w) = e^{w_1} - 1` up to
//! an affine change, so its deck group is generated by translating the strip
//! coordinate by `2 pi i / a`, where `a` is the scale in front of `g`.
//! Products carry one such generator per factor.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{chain::ChainSpec, CoverKind, CoverSpec};
use crate::complex::{cayley_strip, sqrt_one_plus_sq, strip_to_disk, CPoint};
use crate::error::{Error, Result};

/// Largest `|k|` searched when identifying a deck element.
pub const DECK_SEARCH: i64 = 64;

/// The deck transformation `F_k` of a cover, `k` one integer per cyclic factor.
#[derive(Debug, Clone, PartialEq)]
pub struct DeckElement {
    pub indices: Vec<i64>,
    pub level: f64,
    cover: CoverSpec,
}

impl DeckElement {
    pub fn cover(&self) -> &CoverSpec {
        &self.cover
    }

    /// Upstairs translation `w -> w + 2 pi i k` for each factor.
    pub fn upstairs_translation(&self) -> Vec<Complex64> {
        self.indices
            .iter()
            .map(|&k| Complex64::new(0.0, 2.0 * PI * k as f64))
            .collect()
    }

    /// Action on the source ball.
    pub fn apply(&self, z: &CPoint) -> Result<CPoint> {
        apply_deck(&self.cover, &self.indices, z)
    }

    /// The inverse element `F_{-k}`.
    pub fn inverse(&self) -> DeckElement {
        DeckElement {
            indices: self.indices.iter().map(|k| -k).collect(),
            level: self.level,
            cover: self.cover.clone(),
        }
    }
}

impl CoverSpec {
    /// Number of independent `Z` factors of the deck group.
    pub fn deck_rank(&self) -> usize {
        match &self.kind {
            CoverKind::Exp { .. }
            | CoverKind::AnnulusSlice { .. }
            | CoverKind::GeneralizedAnnulusSlice { .. }
            | CoverKind::EmbeddedAnnulusSlice(_) => 1,
            CoverKind::ProductSlice(parts) => parts.iter().map(CoverSpec::deck_rank).sum(),
            CoverKind::Composed { psi, .. } => psi.deck_rank(),
            CoverKind::Scaled { inner, .. } => inner.deck_rank(),
        }
    }

    pub fn deck(&self, indices: &[i64]) -> Result<DeckElement> {
        let rank = self.deck_rank();
        if rank == 0 {
            return Err(Error::SimplyConnected);
        }
        if indices.len() != rank {
            return Err(Error::Invalid(format!(
                "deck group has rank {rank}, got {} indices",
                indices.len()
            )));
        }
        Ok(DeckElement {
            indices: indices.to_vec(),
            level: self.level().unwrap_or(0.0),
            cover: self.clone(),
        })
    }

    /// Identify the deck element `F_k` with `F_k(0)` nearest to `w`.
    ///
    /// Fails when no `|k| <= 64` lands within `tol`.
    pub fn identify_deck(&self, w: &CPoint, tol: f64) -> Result<Vec<i64>> {
        match &self.kind {
            CoverKind::ProductSlice(parts) => {
                let mut out = Vec::with_capacity(parts.len());
                for (j, p) in parts.iter().enumerate() {
                    out.extend(p.identify_deck(&CPoint::scalar(w[j]), tol)?);
                }
                Ok(out)
            }
            CoverKind::Scaled { inner, .. } => inner.identify_deck(w, tol),
            _ => {
                if self.deck_rank() != 1 {
                    return Err(Error::SimplyConnected);
                }
                let origin = CPoint::zeros(self.dim);
                let mut best = (f64::INFINITY, 0);
                for k in -DECK_SEARCH..=DECK_SEARCH {
                    let Ok(image) = apply_deck(self, &[k], &origin) else {
                        continue;
                    };
                    let d = image.dist(w);
                    if d < best.0 {
                        best = (d, k);
                    }
                }
                if best.0 < tol {
                    Ok(vec![best.1])
                } else {
                    Err(Error::UnidentifiedDeck(best.0))
                }
            }
        }
    }
}

fn strip_shift(k: i64, scale: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * k as f64 / scale)
}

fn apply_deck(cover: &CoverSpec, indices: &[i64], z: &CPoint) -> Result<CPoint> {
    match &cover.kind {
        CoverKind::Exp { .. } => {
            let mut out = z.clone();
            out[0] += strip_shift(indices[0], 1.0);
            Ok(out)
        }
        CoverKind::AnnulusSlice { t } => {
            let w = cayley_strip(z[0])? + strip_shift(indices[0], t.exp());
            Ok(CPoint::scalar(strip_to_disk(w)?))
        }
        CoverKind::GeneralizedAnnulusSlice { t, .. } => {
            let z1 = z[0];
            let moved = strip_to_disk(cayley_strip(z1)? + strip_shift(indices[0], t.exp()))?;
            let ratio = sqrt_one_plus_sq(moved)? / sqrt_one_plus_sq(z1)?;
            let mut out = vec![moved];
            out.extend(z.coords()[1..].iter().map(|zj| zj * ratio));
            CPoint::new(out)
        }
        CoverKind::ProductSlice(parts) => {
            let mut coords = Vec::with_capacity(parts.len());
            let mut off = 0;
            for (j, p) in parts.iter().enumerate() {
                let r = p.deck_rank();
                let w = apply_deck(p, &indices[off..off + r], &CPoint::scalar(z[j]))?;
                coords.push(w[0]);
                off += r;
            }
            CPoint::new(coords)
        }
        CoverKind::Composed { psi, g } => {
            let up = apply_deck(psi, indices, &g.eval(z)?)?;
            g.inverse(&up)
        }
        CoverKind::EmbeddedAnnulusSlice(s) => Ok(CPoint::scalar(s.deck(indices[0], z[0])?)),
        CoverKind::Scaled { inner, .. } => apply_deck(inner, indices, z),
    }
}

/// Generator `F_1` of the cyclic deck group of the slice `f_t`.
pub fn deck_generator(chain: &ChainSpec, t: f64) -> Result<DeckElement> {
    let slice = chain.slice(t)?;
    match slice.deck_rank() {
        0 => Err(Error::SimplyConnected),
        1 => slice.deck(&[1]),
        r => Err(Error::Invalid(format!(
            "deck group of rank {r} is not cyclic; use CoverSpec::deck with explicit indices"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::chain::ChainSpec;

    fn disk_samples() -> Vec<CPoint> {
        (0..100)
            .map(|j| {
                let r = 0.9 * (j as f64 + 0.5) / 100.0;
                let th = 2.399_963 * j as f64;
                CPoint::scalar(Complex64::from_polar(r, th))
            })
            .collect()
    }

    #[test]
    fn generator_leaves_the_cover_invariant() {
        let chain = ChainSpec::annulus();
        let f1 = deck_generator(&chain, 0.0).unwrap();
        let f0 = chain.slice(0.0).unwrap();
        for z in disk_samples() {
            let moved = f1.apply(&z).unwrap();
            assert!(f0.eval(&moved).unwrap().dist(&f0.eval(&z).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn zero_index_is_identity_and_inverse_cancels() {
        let cover = CoverSpec::annulus(0.5);
        let id = cover.deck(&[0]).unwrap();
        let f = cover.deck(&[1]).unwrap();
        for z in disk_samples() {
            assert!(id.apply(&z).unwrap().dist(&z) < 1e-15);
            let back = f.inverse().apply(&f.apply(&z).unwrap()).unwrap();
            assert!(back.dist(&z) < 1e-10);
        }
    }

    #[test]
    fn generalized_deck_is_invariant() {
        let cover = CoverSpec::generalized_annulus(3, 0.7).unwrap();
        let z = CPoint::new(vec![
            Complex64::new(0.2, -0.3),
            Complex64::new(0.1, 0.4),
            Complex64::new(-0.3, 0.0),
        ])
        .unwrap();
        for k in [-2, -1, 1, 2] {
            let moved = cover.deck(&[k]).unwrap().apply(&z).unwrap();
            assert!(moved.norm(crate::complex::NormKind::Euclidean) < 1.0);
            assert!(cover.eval(&moved).unwrap().dist(&cover.eval(&z).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn identify_recovers_index() {
        let cover = CoverSpec::annulus(1.0);
        for k in -3..=3 {
            let w = cover.deck(&[k]).unwrap().apply(&CPoint::zeros(1)).unwrap();
            assert_eq!(cover.identify_deck(&w, 1e-9).unwrap(), vec![k]);
        }
        let far = CPoint::scalar(Complex64::new(0.5, 0.0));
        assert!(matches!(cover.identify_deck(&far, 1e-9), Err(Error::UnidentifiedDeck(_))));
    }

    #[test]
    fn product_decks_are_rejected_by_generator() {
        let chain = ChainSpec::parse("product:annulus,annulus").unwrap();
        assert!(matches!(deck_generator(&chain, 0.0), Err(Error::Invalid(_))));
    }
}
