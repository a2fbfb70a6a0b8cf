//! Regions of P^n cut out by a pair of Hermitian forms.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codec::{self, Pair};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::projective::{ProjPoint, ZERO_NORM};
use crate::psl::ProjMap;
use crate::sampling;

const HERMITIAN_TOL: f64 = 1e-12;
const DEFINITE_TOL: f64 = 1e-10;
const SIGNATURE_TOL: f64 = 1e-12;

/// `{[x] : x* a x < x* b x}` with `a` Hermitian and `b` positive definite.
///
/// The region is `{x* h x < 0}` for the form `h = a - b`; `b` only fixes the
/// scale of [`QuadricRegion::value`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadricRegion {
    a: CMatrix,
    b: CMatrix,
}

/// Position of a point relative to a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Inside,
    Boundary,
    Outside,
}

impl QuadricRegion {
    /// Validates the pair: both Hermitian, `b` positive definite, and `a - b`
    /// indefinite so the region is open, nonempty and the interior of its closure.
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        let size = linalg::check_square(&a)?;
        if b.shape() != a.shape() {
            return Err(Error::DimensionMismatch { expected: size, found: b.nrows() });
        }
        if size < 2 {
            return Err(Error::InvalidInput("region forms must be at least 2x2".into()));
        }
        for m in [&a, &b] {
            let asymmetry = linalg::hermitian_asymmetry(m);
            if asymmetry > HERMITIAN_TOL * linalg::frobenius(m).max(1.0) {
                return Err(Error::NotHermitian { asymmetry });
            }
        }
        let (b_eigs, _) = linalg::hermitian_eigen(&b);
        if !(b_eigs[0] > DEFINITE_TOL) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: b_eigs[0] });
        }
        let region = QuadricRegion { a: linalg::hermitize(&a), b: linalg::hermitize(&b) };
        let (positive, negative) = region.signature();
        if positive == 0 || negative == 0 {
            return Err(Error::DegenerateSignature { positive, negative });
        }
        Ok(region)
    }

    /// The region `{x* h x < 0}`, using `a = h + |h| I`, `b = |h| I`.
    pub fn from_form(h: &CMatrix) -> Result<Self> {
        let size = linalg::check_square(h)?;
        let scale = spectral_norm(h);
        if !(scale > 0.0) {
            return Err(Error::DegenerateSignature { positive: 0, negative: 0 });
        }
        let shift = CMatrix::identity(size, size) * c(scale, 0.0);
        Self::new(h + &shift, shift)
    }

    /// Congruence images keep both the signature and definiteness.
    fn from_congruence(a: CMatrix, b: CMatrix) -> Self {
        QuadricRegion { a: linalg::hermitize(&a), b: linalg::hermitize(&b) }
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    /// `a - b`; the region is where this form is negative.
    pub fn form(&self) -> CMatrix {
        &self.a - &self.b
    }

    pub fn ambient_dim(&self) -> usize {
        self.a.nrows() - 1
    }

    /// Counts of positive and negative eigenvalues of `a - b`.
    pub fn signature(&self) -> (usize, usize) {
        let (eigs, _) = linalg::hermitian_eigen(&self.form());
        let scale = eigs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let positive = eigs.iter().filter(|&&e| e > SIGNATURE_TOL * scale).count();
        let negative = eigs.iter().filter(|&&e| e < -SIGNATURE_TOL * scale).count();
        (positive, negative)
    }

    /// `x*(a - b)x / x* b x`: negative inside, zero on the boundary.
    pub fn value(&self, x: &CVector) -> f64 {
        let num = x.dotc(&(&self.form() * x)).re;
        let den = x.dotc(&(&self.b * x)).re;
        num / den
    }

    pub fn value_at(&self, p: &ProjPoint) -> f64 {
        self.value(p.lift())
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.value_at(p) < 0.0
    }

    pub fn classify(&self, p: &ProjPoint, boundary: f64) -> Position {
        classify_value(self.value_at(p), boundary)
    }

    /// `P^n` minus the closure of `self`.
    pub fn complement(&self) -> QuadricRegion {
        let a = &self.b * c(2.0, 0.0) - &self.a;
        QuadricRegion { a, b: self.b.clone() }
    }

    pub fn image(&self, g: &ProjMap) -> Result<QuadricRegion> {
        region_image(self, g)
    }

    /// Positive scale `c` with `self.form() ≈ c * other.form()`, and the relative residual.
    pub fn form_ratio(&self, other: &QuadricRegion) -> Option<(f64, f64)> {
        form_ratio(&self.form(), &other.form())
    }

    /// Point of the region, drawn by scaling down the components along the
    /// positive directions of the form and rejecting misses.
    pub fn sample_inside<R: Rng + ?Sized>(&self, rng: &mut R) -> ProjPoint {
        let (eigs, vecs) = linalg::hermitian_eigen(&self.form());
        let neg: f64 = eigs.iter().filter(|&&e| e < 0.0).map(|e| -e).sum();
        let pos: f64 = eigs.iter().filter(|&&e| e > 0.0).sum();
        let ratio = if pos > 0.0 { (neg / pos).sqrt() } else { 1.0 };
        loop {
            let y = sampling::gaussian_vector(rng, eigs.len());
            let shrink: f64 = rng.random_range(0.0..1.0);
            let z = CVector::from_fn(eigs.len(), |i, _| if eigs[i] > 0.0 { y[i] * (ratio * shrink) } else { y[i] });
            let x = &vecs * z;
            if linalg::vector_norm(&x) <= ZERO_NORM {
                continue;
            }
            if let Ok(p) = ProjPoint::new(x) {
                if self.contains(&p) {
                    return p;
                }
            }
        }
    }
}

pub(crate) fn classify_value(value: f64, boundary: f64) -> Position {
    if value < -boundary {
        Position::Inside
    } else if value <= boundary {
        Position::Boundary
    } else {
        Position::Outside
    }
}

fn spectral_norm(h: &CMatrix) -> f64 {
    let (eigs, _) = linalg::hermitian_eigen(h);
    eigs.iter().fold(0.0, |m, e| m.max(e.abs()))
}

pub(crate) fn form_ratio(h: &CMatrix, other: &CMatrix) -> Option<(f64, f64)> {
    let denom = other.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if !(denom > 0.0) {
        return None;
    }
    let scale = other.iter().zip(h.iter()).map(|(o, x)| (o.conj() * x).re).sum::<f64>() / denom;
    if !(scale > 0.0) {
        return None;
    }
    let residual = linalg::frobenius(&(h - other * c(scale, 0.0))) / linalg::frobenius(h);
    Some((scale, residual))
}

/// `g(r) = {g x : x in r}`, i.e. the pair `(g^{-*} a g^{-1}, g^{-*} b g^{-1})`.
pub fn region_image(r: &QuadricRegion, g: &ProjMap) -> Result<QuadricRegion> {
    g.check_dim(r.ambient_dim())?;
    let inv = g.inverse();
    let inv = inv.lift();
    let a = inv.adjoint() * &r.a * inv;
    let b = inv.adjoint() * &r.b * inv;
    Ok(QuadricRegion::from_congruence(a, b))
}

/// Outcome of [`region_disjoint`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Disjointness {
    /// `mu h1 + (1 - mu) h2` (forms scaled to unit norm) is positive definite
    /// with smallest eigenvalue `margin`, so no point lies in both closures.
    Certificate {
        mu: f64,
        margin: f64,
    },
    /// A point in both closures, with the two region values.
    Counterexample {
        point: ProjPoint,
        values: [f64; 2],
    },
    Unknown {
        samples: usize,
    },
}

impl Disjointness {
    pub fn is_certificate(&self) -> bool {
        matches!(self, Disjointness::Certificate { .. })
    }
}

/// Number of fallback samples used when the pencil search is inconclusive.
pub const DISJOINT_SAMPLES: usize = 100_000;

pub fn region_disjoint(r1: &QuadricRegion, r2: &QuadricRegion) -> Disjointness {
    region_disjoint_with(r1, r2, &Tolerances::default(), 0)
}

/// Decides whether the closures of two regions are disjoint.
///
/// The joint numerical range of two Hermitian forms is convex, so the
/// closures are disjoint exactly when some convex combination of the forms is
/// positive definite. The smallest eigenvalue of the combination is concave in
/// the weight; it is maximized by a grid search followed by golden-section
/// refinement. When the maximum is not positive, the bottom eigenspace at the
/// maximizer holds a point of both closures.
pub fn region_disjoint_with(r1: &QuadricRegion, r2: &QuadricRegion, tol: &Tolerances, seed: u64) -> Disjointness {
    if r1.ambient_dim() != r2.ambient_dim() {
        return Disjointness::Unknown { samples: 0 };
    }
    let h1 = normalized(&r1.form());
    let h2 = normalized(&r2.form());
    let min_eig = |mu: f64| linalg::hermitian_eigen(&pencil(&h1, &h2, mu)).0[0];

    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..=100 {
        let mu = i as f64 / 100.0;
        let v = min_eig(mu);
        if v > best.1 {
            best = (mu, v);
        }
    }
    let (mut lo, mut hi) = ((best.0 - 0.01).max(0.0), (best.0 + 0.01).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (min_eig(x1), min_eig(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = min_eig(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = min_eig(x1);
        }
    }
    for (mu, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (mu, v);
        }
    }
    let (mu, margin) = best;
    if margin > tol.certificate_margin {
        return Disjointness::Certificate { mu, margin };
    }

    if let Some(point) = shared_point(&h1, &h2, mu) {
        let values = [r1.value_at(&point), r2.value_at(&point)];
        if values.iter().all(|&v| v <= tol.boundary.max(1e-9)) {
            return Disjointness::Counterexample { point, values };
        }
    }
    sampled_shared_point(r1, r2, tol, seed)
}

fn normalized(h: &CMatrix) -> CMatrix {
    let s = spectral_norm(h);
    if s > 0.0 {
        h / c(s, 0.0)
    } else {
        h.clone()
    }
}

fn pencil(h1: &CMatrix, h2: &CMatrix, mu: f64) -> CMatrix {
    h1 * c(mu, 0.0) + h2 * c(1.0 - mu, 0.0)
}

/// Vector of the bottom eigenspace of the pencil at `mu` on which `h1` and
/// `h2` take equal values (or the better one at an endpoint).
fn shared_point(h1: &CMatrix, h2: &CMatrix, mu: f64) -> Option<ProjPoint> {
    let (eigs, vecs) = linalg::hermitian_eigen(&pencil(h1, h2, mu));
    let dim = eigs.iter().take_while(|&&e| e <= eigs[0] + 1e-9).count();
    let bottom = vecs.columns(0, dim).into_owned();
    let diff = bottom.adjoint() * (h1 - h2) * &bottom;
    let (d, w) = linalg::hermitian_eigen(&diff);
    let (lo, hi) = (d[0], d[dim - 1]);
    let local: CVector = if lo >= 0.0 {
        w.column(0).into_owned()
    } else if hi <= 0.0 {
        w.column(dim - 1).into_owned()
    } else {
        let cos = (hi / (hi - lo)).sqrt();
        let sin = (-lo / (hi - lo)).sqrt();
        w.column(0) * c(cos, 0.0) + w.column(dim - 1) * c(sin, 0.0)
    };
    ProjPoint::new(bottom * local).ok()
}

fn sampled_shared_point(r1: &QuadricRegion, r2: &QuadricRegion, tol: &Tolerances, seed: u64) -> Disjointness {
    let mut rng = sampling::substream(seed, 0xD15);
    for i in 0..DISJOINT_SAMPLES {
        let (inside, other) = if i % 2 == 0 { (r1, r2) } else { (r2, r1) };
        let p = inside.sample_inside(&mut rng);
        if other.value_at(&p) <= tol.boundary {
            let values = [r1.value_at(&p), r2.value_at(&p)];
            return Disjointness::Counterexample { point: p, values };
        }
    }
    Disjointness::Unknown { samples: DISJOINT_SAMPLES }
}

impl Serialize for QuadricRegion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RegionRepr { a: codec::encode_matrix(&self.a), b: codec::encode_matrix(&self.b) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadricRegion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = RegionRepr::deserialize(d)?;
        let a = codec::decode_matrix(&repr.a).map_err(D::Error::custom)?;
        let b = codec::decode_matrix(&repr.b).map_err(D::Error::custom)?;
        QuadricRegion::new(a, b).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionRepr {
    a: Vec<Vec<Pair>>,
    b: Vec<Vec<Pair>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_diagonal;
    use crate::projective::real_point;

    /// `{phi < t}` with `phi = (|x0|^2 + |x1|^2) / |x|^2` on P^3.
    fn below(t: f64) -> QuadricRegion {
        QuadricRegion::new(real_diagonal(&[1.0, 1.0, 0.0, 0.0]), CMatrix::identity(4, 4) * c(t, 0.0)).unwrap()
    }

    /// `{phi > t}`.
    fn above(t: f64) -> QuadricRegion {
        QuadricRegion::from_form(&real_diagonal(&[t - 1.0, t - 1.0, t, t])).unwrap()
    }

    fn phi(p: &ProjPoint) -> f64 {
        let x = p.lift();
        x[0].norm_sqr() + x[1].norm_sqr()
    }

    #[test]
    fn construction_checks() {
        let id = CMatrix::identity(3, 3);
        assert!(matches!(QuadricRegion::new(id.clone(), id.clone()), Err(Error::DegenerateSignature { .. })));
        assert!(matches!(
            QuadricRegion::new(real_diagonal(&[1.0, 0.0, 0.0]), real_diagonal(&[1.0, 1.0, 0.0])),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let mut skew = real_diagonal(&[1.0, 0.0, 0.0]);
        skew[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(QuadricRegion::new(skew, id), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn membership_matches_phi() {
        let r = below(0.3);
        assert!(r.contains(&real_point(&[0.1, 0.0, 1.0, 0.0])));
        assert!(!r.contains(&real_point(&[1.0, 0.0, 0.1, 0.0])));
        let p = real_point(&[0.3f64.sqrt(), 0.0, 0.7f64.sqrt(), 0.0]);
        assert_eq!(r.classify(&p, 1e-10), Position::Boundary);
    }

    #[test]
    fn identity_image_is_identical() {
        let r = below(0.2);
        let img = region_image(&r, &ProjMap::identity(3)).unwrap();
        assert_eq!(img, r);
    }

    #[test]
    fn unitary_image_keeps_denominator() {
        let mut rng = sampling::seeded_rng(3);
        let u = ProjMap::new(sampling::random_unitary(&mut rng, 4)).unwrap();
        let r = below(0.25);
        let img = region_image(&r, &u).unwrap();
        assert!(linalg::frobenius(&(img.b() - r.b())) < 1e-12);
        for _ in 0..200 {
            let p = ProjPoint::random(&mut rng, 3);
            let q = u.apply(&p).unwrap();
            assert!((img.value_at(&q) - r.value_at(&p)).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_examples() {
        match region_disjoint(&below(0.2), &above(0.8)) {
            Disjointness::Certificate { mu, margin } => {
                assert!(margin > 0.0);
                assert!((0.0..=1.0).contains(&mu));
            }
            other => panic!("expected certificate, got {other:?}"),
        }
        match region_disjoint(&below(0.4), &above(0.4)) {
            Disjointness::Counterexample { point, .. } => assert!((phi(&point) - 0.4).abs() < 1e-9),
            other => panic!("expected counterexample, got {other:?}"),
        }
        let r = below(0.3);
        match region_disjoint(&r, &r) {
            Disjointness::Counterexample { point, .. } => assert!(r.contains(&point)),
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn complement_swaps_sides() {
        let r = below(0.3);
        let comp = r.complement();
        let mut rng = sampling::seeded_rng(5);
        for _ in 0..100 {
            let p = ProjPoint::random(&mut rng, 3);
            assert_eq!(comp.contains(&p), phi(&p) > 0.3);
        }
    }

    #[test]
    fn sampler_stays_inside() {
        let r = below(0.05);
        let mut rng = sampling::seeded_rng(9);
        for _ in 0..200 {
            assert!(r.contains(&r.sample_inside(&mut rng)));
        }
    }

    #[test]
    fn json_round_trip() {
        let r = below(0.2);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<QuadricRegion>(&text).unwrap(), r);
    }
}
