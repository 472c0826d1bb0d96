//! Boundary disks as Hermitian forms, with the inversive-distance calculus
//! used by the ping-pong certificates.
//!
//! A disk is stored as a real-diagonal Hermitian form (α, β, γ) whose region
//! is {z : α|z|² + β z̄ + β̄ z + γ ≤ 0}, together with ∞ when α < 0. This
//! represents round disks, exteriors of round disks, and half planes
//! uniformly, and transforms cleanly under Möbius maps: the image region of
//! M is given by the form (M⁻¹)† H (M⁻¹). All predicates are invariant under
//! positive rescaling of the form.

use num_complex::Complex64;
use thiserror::Error;

use crate::moebius::{BoundaryPoint, ModelPoint, MoebiusTransform};

#[derive(Debug, Error)]
pub enum DiskError {
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("form does not define a real circle (det = {0:.3e} >= 0)")]
    ImaginaryCircle(f64),
    #[error("degenerate disk (half plane) in {0}")]
    DegenerateDisk(&'static str),
}

/// Region bounded by a boundary circle.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryDisk {
    alpha: f64,
    beta: Complex64,
    gamma: f64,
}

/// Euclidean description of a disk's region.
#[derive(Clone, Copy, Debug)]
pub enum DiskShape {
    /// {|z − center| ≤ radius}
    Disk { center: Complex64, radius: f64 },
    /// {|z − center| ≥ radius} ∪ {∞}
    Exterior { center: Complex64, radius: f64 },
    /// Boundary circle passes through ∞.
    HalfPlane { beta: Complex64, gamma: f64 },
}

impl BoundaryDisk {
    /// Closed round disk {|z − center| ≤ radius}.
    pub fn from_center_radius(center: Complex64, radius: f64) -> Result<Self, DiskError> {
        if !(radius > 0.0) {
            return Err(DiskError::NonPositiveRadius(radius));
        }
        Ok(BoundaryDisk {
            alpha: 1.0,
            beta: -center,
            gamma: center.norm_sqr() - radius * radius,
        })
    }

    /// Closed exterior {|z − center| ≥ radius} ∪ {∞}.
    pub fn exterior_of(center: Complex64, radius: f64) -> Result<Self, DiskError> {
        Ok(BoundaryDisk::from_center_radius(center, radius)?.complement())
    }

    /// The closure of the complementary region (same boundary circle).
    pub fn complement(&self) -> Self {
        BoundaryDisk { alpha: -self.alpha, beta: -self.beta, gamma: -self.gamma }
    }

    /// Determinant αγ − |β|²; negative for real circles.
    pub fn det(&self) -> f64 {
        self.alpha * self.gamma - self.beta.norm_sqr()
    }

    fn scale(&self) -> f64 {
        self.alpha.abs().max(self.beta.norm()).max(self.gamma.abs())
    }

    fn sqrt_neg_det(&self) -> Result<f64, DiskError> {
        let det = self.det();
        if det >= -1e-300 {
            return Err(DiskError::ImaginaryCircle(det));
        }
        Ok((-det).sqrt())
    }

    /// The defining form evaluated at a finite boundary point; the region is
    /// where this is ≤ 0.
    pub fn eval(&self, z: Complex64) -> f64 {
        self.alpha * z.norm_sqr() + 2.0 * (self.beta * z.conj()).re + self.gamma
    }

    pub fn contains_boundary_point(&self, p: BoundaryPoint) -> bool {
        match p {
            BoundaryPoint::Finite(z) => self.eval(z) <= 1e-12 * self.scale(),
            BoundaryPoint::Infinity => self.alpha <= 1e-12 * self.scale(),
        }
    }

    /// Euclidean shape of the region.
    pub fn shape(&self) -> DiskShape {
        let s = self.scale();
        if self.alpha.abs() <= 1e-12 * s {
            return DiskShape::HalfPlane { beta: self.beta, gamma: self.gamma };
        }
        let center = -self.beta / self.alpha;
        let det = self.det();
        let radius = (-det).max(0.0).sqrt() / self.alpha.abs();
        if self.alpha > 0.0 {
            DiskShape::Disk { center, radius }
        } else {
            DiskShape::Exterior { center, radius }
        }
    }

    /// Form of the image region under m.
    pub fn transform(&self, m: &MoebiusTransform) -> BoundaryDisk {
        // H' = (M⁻¹)† H (M⁻¹) with M⁻¹ = [[d, −b], [−c, a]] (det M = 1).
        let [a, b, c, d] = m.entries();
        let (al, be, ga) = (self.alpha, self.beta, self.gamma);
        let alpha = al * d.norm_sqr() - 2.0 * (be * c * d.conj()).re + ga * c.norm_sqr();
        let gamma = al * b.norm_sqr() - 2.0 * (be * a * b.conj()).re + ga * a.norm_sqr();
        let beta = -al * b * d.conj() + be * a * d.conj() + be.conj() * b * c.conj()
            - ga * a * c.conj();
        BoundaryDisk { alpha, beta, gamma }
    }

    /// Möbius-invariant bilinear pairing of two forms.
    pub fn pairing(&self, other: &Self) -> f64 {
        self.alpha * other.gamma + self.gamma * other.alpha
            - 2.0 * (self.beta * other.beta.conj()).re
    }

    /// Signed inversive distance. Values < −1 mean the closed regions are
    /// disjoint; values > 1 mean one region contains the other; |I| ≤ 1 means
    /// the boundary circles intersect.
    pub fn inversive_distance(&self, other: &Self) -> Result<f64, DiskError> {
        let n1 = self.sqrt_neg_det()?;
        let n2 = other.sqrt_neg_det()?;
        Ok(-self.pairing(other) / (2.0 * n1 * n2))
    }

    /// Hyperbolic distance between the geodesic hyperplanes bounding the two
    /// half spaces; zero if the boundary circles meet.
    pub fn plane_distance(&self, other: &Self) -> Result<f64, DiskError> {
        let i = self.inversive_distance(other)?;
        Ok(if i.abs() > 1.0 { i.abs().acosh() } else { 0.0 })
    }

    /// Signed hyperbolic distance from an interior model point to the
    /// geodesic hyperplane over the boundary circle: positive outside the
    /// half space shadowed by the region, negative inside.
    pub fn signed_point_distance(&self, p: ModelPoint) -> Result<f64, DiskError> {
        let n = self.sqrt_neg_det()?;
        let t = p.height;
        let f = self.alpha * (p.z.norm_sqr() + t * t) + 2.0 * (self.beta * p.z.conj()).re
            + self.gamma;
        Ok((f / (2.0 * t * n)).asinh())
    }

    /// Whether `inner`'s region is contained in this region (closed sets).
    pub fn contains_region(&self, inner: &Self) -> Result<bool, DiskError> {
        use DiskShape::*;
        match (self.shape(), inner.shape()) {
            (HalfPlane { .. }, _) | (_, HalfPlane { .. }) => {
                Err(DiskError::DegenerateDisk("containment test"))
            }
            (Disk { center: co, radius: ro }, Disk { center: ci, radius: ri }) => {
                Ok((ci - co).norm() + ri <= ro)
            }
            (Exterior { center: co, radius: ro }, Disk { center: ci, radius: ri }) => {
                Ok((ci - co).norm() >= ro + ri)
            }
            (Disk { .. }, Exterior { .. }) => Ok(false),
            (Exterior { center: co, radius: ro }, Exterior { center: ci, radius: ri }) => {
                // Complements are disks; containment reverses.
                Ok((co - ci).norm() + ro <= ri)
            }
        }
    }

    /// Whether the two closed regions are disjoint.
    pub fn disjoint_from(&self, other: &Self) -> Result<bool, DiskError> {
        use DiskShape::*;
        match (self.shape(), other.shape()) {
            (HalfPlane { .. }, _) | (_, HalfPlane { .. }) => {
                Err(DiskError::DegenerateDisk("disjointness test"))
            }
            (Disk { center: c1, radius: r1 }, Disk { center: c2, radius: r2 }) => {
                Ok((c1 - c2).norm() > r1 + r2)
            }
            (Disk { center: cd, radius: rd }, Exterior { center: ce, radius: re })
            | (Exterior { center: ce, radius: re }, Disk { center: cd, radius: rd }) => {
                Ok((cd - ce).norm() + rd < re)
            }
            // Two exteriors both contain ∞.
            (Exterior { .. }, Exterior { .. }) => Ok(false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::ModelDim;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shape_round_trip() {
        let d = BoundaryDisk::from_center_radius(c(2.0, -1.0), 0.75).unwrap();
        match d.shape() {
            DiskShape::Disk { center, radius } => {
                assert_relative_eq!(center.re, 2.0, max_relative = 1e-14);
                assert_relative_eq!(center.im, -1.0, max_relative = 1e-14);
                assert_relative_eq!(radius, 0.75, max_relative = 1e-14);
            }
            other => panic!("expected disk, got {other:?}"),
        }
        let e = BoundaryDisk::exterior_of(c(0.5, 0.0), 2.0).unwrap();
        match e.shape() {
            DiskShape::Exterior { center, radius } => {
                assert_relative_eq!(center.re, 0.5, max_relative = 1e-14);
                assert_relative_eq!(radius, 2.0, max_relative = 1e-14);
            }
            other => panic!("expected exterior, got {other:?}"),
        }
    }

    #[test]
    fn membership_including_infinity() {
        let d = BoundaryDisk::from_center_radius(c(0.0, 0.0), 1.0).unwrap();
        assert!(d.contains_boundary_point(BoundaryPoint::Finite(c(0.5, 0.3))));
        assert!(d.contains_boundary_point(BoundaryPoint::Finite(c(1.0, 0.0))));
        assert!(!d.contains_boundary_point(BoundaryPoint::Finite(c(1.5, 0.0))));
        assert!(!d.contains_boundary_point(BoundaryPoint::Infinity));
        let e = d.complement();
        assert!(e.contains_boundary_point(BoundaryPoint::Infinity));
        assert!(!e.contains_boundary_point(BoundaryPoint::Finite(c(0.0, 0.0))));
    }

    #[test]
    fn transform_by_translation_and_scaling() {
        let m = MoebiusTransform::from_real(1.0, 3.0, 0.0, 1.0).unwrap();
        let d = BoundaryDisk::from_center_radius(c(0.0, 0.0), 1.0).unwrap().transform(&m);
        match d.shape() {
            DiskShape::Disk { center, radius } => {
                assert_relative_eq!(center.re, 3.0, max_relative = 1e-13);
                assert_relative_eq!(radius, 1.0, max_relative = 1e-13);
            }
            other => panic!("expected disk, got {other:?}"),
        }

        // z ↦ e⁴ z pushes the exterior of the half-unit circle out to the
        // exterior of radius e⁴/2.
        let a = MoebiusTransform::from_real((2.0_f64).exp(), 0.0, 0.0, (-2.0_f64).exp()).unwrap();
        let e = BoundaryDisk::exterior_of(c(0.0, 0.0), 0.5).unwrap().transform(&a);
        match e.shape() {
            DiskShape::Exterior { center, radius } => {
                assert_abs_diff_eq!(center.norm(), 0.0, epsilon = 1e-12);
                assert_relative_eq!(radius, 27.299075016572118, max_relative = 1e-12);
            }
            other => panic!("expected exterior, got {other:?}"),
        }
    }

    #[test]
    fn image_through_pole_becomes_half_plane() {
        // z ↦ 1/(1 − z) sends 1 (on the boundary circle) to ∞.
        let m = MoebiusTransform::from_real(0.0, 1.0, -1.0, 1.0).unwrap();
        let d = BoundaryDisk::from_center_radius(c(0.0, 0.0), 1.0).unwrap().transform(&m);
        assert!(matches!(d.shape(), DiskShape::HalfPlane { .. }));
        assert!(d.contains_region(&d).is_err());
    }

    #[test]
    fn inversive_distance_of_separated_disks() {
        let d1 = BoundaryDisk::from_center_radius(c(0.0, 0.0), 1.0).unwrap();
        let d2 = BoundaryDisk::from_center_radius(c(5.0, 0.0), 1.0).unwrap();
        // (d² − r1² − r2²)/(2 r1 r2) = 11.5, negated for disjoint regions.
        assert_relative_eq!(d1.inversive_distance(&d2).unwrap(), -11.5, max_relative = 1e-14);
        assert!(d1.disjoint_from(&d2).unwrap());
    }

    #[test]
    fn inversive_distance_of_nested_disks() {
        let d1 = BoundaryDisk::from_center_radius(c(0.0, 0.0), 1.0).unwrap();
        let d2 = BoundaryDisk::from_center_radius(c(0.0, 0.0), 2.0).unwrap();
        assert_relative_eq!(d1.inversive_distance(&d2).unwrap(), 1.25, max_relative = 1e-14);
        assert!(d2.contains_region(&d1).unwrap());
        assert!(!d1.contains_region(&d2).unwrap());
    }

    #[test]
    fn plane_distance_of_concentric_circles() {
        // Geodesic hemispheres over |z| = 1 and |z| = 2 are ln 2 apart.
        let d1 = BoundaryDisk::from_center_radius(c(0.0, 0.0), 1.0).unwrap();
        let d2 = BoundaryDisk::exterior_of(c(0.0, 0.0), 2.0).unwrap();
        assert_relative_eq!(d1.inversive_distance(&d2).unwrap(), -1.25, max_relative = 1e-14);
        assert_relative_eq!(
            d1.plane_distance(&d2).unwrap(),
            std::f64::consts::LN_2,
            max_relative = 1e-13
        );
        // Same circles, nested orientation: same plane distance.
        let d2c = d2.complement();
        assert_relative_eq!(
            d1.plane_distance(&d2c).unwrap(),
            std::f64::consts::LN_2,
            max_relative = 1e-13
        );
    }

    #[test]
    fn signed_point_distance_along_vertical_geodesic() {
        let d = BoundaryDisk::from_center_radius(c(0.0, 0.0), 1.0).unwrap();
        // (0, t) is ln t above the unit hemisphere: sinh distance (t − 1/t)/2.
        let p = ModelPoint::new(c(0.0, 0.0), 2.0);
        assert_relative_eq!(d.signed_point_distance(p).unwrap(), 2.0_f64.ln(), max_relative = 1e-13);
        let q = ModelPoint::new(c(0.0, 0.0), 0.5);
        assert_relative_eq!(
            d.signed_point_distance(q).unwrap(),
            -(2.0_f64.ln()),
            max_relative = 1e-13
        );
        assert_abs_diff_eq!(
            d.signed_point_distance(ModelPoint::origin()).unwrap(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn containment_and_disjointness_cases() {
        let small = BoundaryDisk::from_center_radius(c(0.0, 0.0), 0.5).unwrap();
        let far = BoundaryDisk::from_center_radius(c(4.0, 0.0), 1.0).unwrap();
        let ext = BoundaryDisk::exterior_of(c(0.0, 0.0), 2.0).unwrap();
        let ext_wide = BoundaryDisk::exterior_of(c(0.1, 0.0), 3.0).unwrap();

        assert!(ext.contains_region(&far).unwrap());
        assert!(!ext.contains_region(&small).unwrap());
        assert!(ext.disjoint_from(&small).unwrap());
        assert!(!ext.disjoint_from(&far).unwrap());
        assert!(!ext.disjoint_from(&ext_wide).unwrap());
        assert!(ext.contains_region(&ext_wide).unwrap());
        assert!(!ext_wide.contains_region(&ext).unwrap());
        assert!(!small.contains_region(&ext).unwrap());
        assert!(small.disjoint_from(&far).unwrap());
    }

    #[test]
    fn pairing_is_symmetric() {
        let d1 = BoundaryDisk::from_center_radius(c(1.0, 2.0), 0.7).unwrap();
        let d2 = BoundaryDisk::exterior_of(c(-0.5, 1.0), 1.3).unwrap();
        assert_relative_eq!(d1.pairing(&d2), d2.pairing(&d1), max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn inversive_distance_is_moebius_invariant(
            cx1 in -3.0..3.0f64, cy1 in -3.0..3.0f64, r1 in 0.1..2.0f64,
            cx2 in -3.0..3.0f64, cy2 in -3.0..3.0f64, r2 in 0.1..2.0f64,
            ma in -2.0..2.0f64, mb in -2.0..2.0f64, mc in -2.0..2.0f64,
        ) {
            // Build a well-conditioned complex matrix from the sampled reals.
            let a = c(1.0 + ma * ma, mb);
            let b = c(mb, mc);
            let cc = c(mc, -ma);
            let d = (c(1.0, 0.0) + b * cc) / a;
            let m = MoebiusTransform::new(a, b, cc, d, ModelDim::Three).unwrap();

            let d1 = BoundaryDisk::from_center_radius(c(cx1, cy1), r1).unwrap();
            let d2 = BoundaryDisk::from_center_radius(c(cx2, cy2), r2).unwrap();
            let before = d1.inversive_distance(&d2).unwrap();
            let after = d1.transform(&m).inversive_distance(&d2.transform(&m)).unwrap();
            prop_assert!(
                (before - after).abs() <= 1e-9 * (1.0 + before.abs()),
                "inversive distance changed: {} vs {}", before, after
            );
        }
    }
}
