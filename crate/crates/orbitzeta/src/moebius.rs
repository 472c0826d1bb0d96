//! Möbius transformations acting on hyperbolic 2- and 3-space.
//!
//! Elements are 2x2 matrices with unit determinant, considered modulo sign.
//! The 2-space model is the upper half plane with boundary R ∪ {∞}; the
//! 3-space model is the upper half space with boundary C ∪ {∞}. Both models
//! share one point type: `ModelPoint { z, height }`, where the 2-space point
//! (x, y) is stored as z = x, height = y.

use num_complex::Complex64;
use thiserror::Error;

/// Entrywise tolerance used when renormalizing determinants and comparing
/// against ±identity.
pub const MATRIX_TOL: f64 = 1e-12;

/// Which hyperbolic model a transform acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelDim {
    /// Upper half plane (real matrix entries).
    Two,
    /// Upper half space (complex matrix entries).
    Three,
}

impl ModelDim {
    /// Boundary dimension n of the model (the quotient is n+1 dimensional).
    pub fn boundary_dim(self) -> u32 {
        match self {
            ModelDim::Two => 1,
            ModelDim::Three => 2,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            ModelDim::Two => 2,
            ModelDim::Three => 3,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            2 => Some(ModelDim::Two),
            3 => Some(ModelDim::Three),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum MoebiusError {
    #[error("matrix is singular (|det| = {0:.3e})")]
    Singular(f64),
    #[error("2-space transforms must have real entries (imaginary part {0:.3e})")]
    NotReal(f64),
    #[error("operation requires a hyperbolic element, found {0:?}")]
    NotHyperbolic(IsometryClass),
}

/// Coarse classification of an isometry.
///
/// `Hyperbolic` covers loxodromic elements as well: in the 3-space model the
/// rotation angle may be nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryClass {
    Identity,
    Parabolic,
    Elliptic,
    Hyperbolic,
}

/// Complex translation length ℓ + iθ of a hyperbolic element.
///
/// ℓ > 0 always; θ ∈ (−π, π] and is identically 0 in the 2-space model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexLength {
    pub ell: f64,
    pub theta: f64,
}

/// A point of the model interior: (z, height) with height > 0.
/// In the 2-space model z is real and the point is z + i·height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelPoint {
    pub z: Complex64,
    pub height: f64,
}

impl ModelPoint {
    pub fn new(z: Complex64, height: f64) -> Self {
        ModelPoint { z, height }
    }

    /// The model origin: i in the half plane, j in the half space.
    pub fn origin() -> Self {
        ModelPoint { z: Complex64::new(0.0, 0.0), height: 1.0 }
    }

    /// Hyperbolic distance to another interior point.
    pub fn dist(&self, other: &ModelPoint) -> f64 {
        // cosh d = 1 + (|z1-z2|^2 + (t1-t2)^2) / (2 t1 t2)
        let dz = (self.z - other.z).norm_sqr();
        let dt = self.height - other.height;
        let arg = 1.0 + (dz + dt * dt) / (2.0 * self.height * other.height);
        arg.max(1.0).acosh()
    }
}

/// A boundary point of the model: a point of R̂ (2-space) or Ĉ (3-space).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint {
    Finite(Complex64),
    Infinity,
}

/// Möbius transform with determinant renormalized to 1, modulo ±I.
#[derive(Clone, Copy, Debug)]
pub struct MoebiusTransform {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    dim: ModelDim,
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Wrap an angle into (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta.rem_euclid(two_pi);
    if t > std::f64::consts::PI {
        t -= two_pi;
    }
    // rem_euclid can return exactly two_pi-eps ranges; map -π to π for a
    // half-open convention.
    if t <= -std::f64::consts::PI {
        t += two_pi;
    }
    t
}

/// Upper half space action shared by interior-point maps: any nonzero complex
/// rescaling of (a, b, c, d) induces the same isometry.
fn point_action(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    p: ModelPoint,
) -> ModelPoint {
    let t = p.height;
    let cz_d = c * p.z + d;
    let den = cz_d.norm_sqr() + c.norm_sqr() * t * t;
    let num = (a * p.z + b) * cz_d.conj() + a * c.conj() * t * t;
    ModelPoint { z: num / den, height: (a * d - b * c).norm() * t / den }
}

impl MoebiusTransform {
    /// Build a transform from matrix entries; the determinant is renormalized
    /// to 1. 2-space transforms must have (numerically) real entries.
    pub fn new(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
        dim: ModelDim,
    ) -> Result<Self, MoebiusError> {
        let det = a * d - b * c;
        if det.norm() < 1e-8 {
            return Err(MoebiusError::Singular(det.norm()));
        }
        if dim == ModelDim::Two {
            let imag = a.im.abs().max(b.im.abs()).max(c.im.abs()).max(d.im.abs());
            if imag > 1e-9 {
                return Err(MoebiusError::NotReal(imag));
            }
        }
        if dim == ModelDim::Two && det.re < 0.0 {
            // Real matrices with det < 0 do not preserve the upper half
            // plane (the principal sqrt would leave imaginary entries).
            return Err(MoebiusError::Singular(det.re));
        }
        // Renormalize only when the determinant genuinely differs from 1:
        // repeatedly dividing near-unit determinants by their computed square
        // root is not idempotent (each pass drifts entries by ~1 ulp), which
        // would make serialization round trips unstable.
        let mut m = if (det - c64(1.0, 0.0)).norm() <= 1e-12 {
            MoebiusTransform { a, b, c, d, dim }
        } else {
            let s = det.sqrt();
            MoebiusTransform { a: a / s, b: b / s, c: c / s, d: d / s, dim }
        };
        if dim == ModelDim::Two {
            m.a = c64(m.a.re, 0.0);
            m.b = c64(m.b.re, 0.0);
            m.c = c64(m.c.re, 0.0);
            m.d = c64(m.d.re, 0.0);
        }
        Ok(m)
    }

    /// Convenience constructor for real 2-space matrices.
    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        MoebiusTransform::new(c64(a, 0.0), c64(b, 0.0), c64(c, 0.0), c64(d, 0.0), ModelDim::Two)
    }

    pub fn identity(dim: ModelDim) -> Self {
        MoebiusTransform {
            a: c64(1.0, 0.0),
            b: c64(0.0, 0.0),
            c: c64(0.0, 0.0),
            d: c64(1.0, 0.0),
            dim,
        }
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn dim(&self) -> ModelDim {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Group composition `self ∘ other` (matrix product).
    ///
    /// No determinant renormalization happens here. Products of unit
    /// determinant matrices have unit determinant exactly, while the
    /// floating-point determinant of a product with large entries suffers
    /// catastrophic cancellation; dividing by its square root would corrupt
    /// entries that are accurate in the relative sense. Quantities derived
    /// from long words (traces, eigenvalues, displacement) depend only on
    /// that relative accuracy.
    pub fn compose(&self, other: &MoebiusTransform) -> MoebiusTransform {
        debug_assert_eq!(self.dim, other.dim);
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        MoebiusTransform { a, b, c, d, dim: self.dim }
    }

    pub fn inverse(&self) -> MoebiusTransform {
        MoebiusTransform { a: self.d, b: -self.b, c: -self.c, d: self.a, dim: self.dim }
    }

    /// k-th power by repeated composition (k ≥ 0).
    pub fn pow(&self, k: u32) -> MoebiusTransform {
        let mut acc = MoebiusTransform::identity(self.dim);
        let mut base = *self;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    /// Real power g^t of a hyperbolic element: same axis, complex
    /// translation length scaled by t. Uses spectral (Lagrange)
    /// interpolation on the two eigenvalues λ and 1/λ, so no eigenvectors
    /// are formed; the denominator λ − 1/λ stays bounded away from zero for
    /// hyperbolic elements. The matrix sign is fixed so ℜ(tr) ≥ 0 before
    /// taking the principal branch (±g act identically; the negative
    /// representative would put a spurious π·t rotation into the power).
    pub fn fractional_power(&self, t: f64) -> Result<MoebiusTransform, MoebiusError> {
        let m = if self.trace().re < 0.0 {
            MoebiusTransform { a: -self.a, b: -self.b, c: -self.c, d: -self.d, dim: self.dim }
        } else {
            *self
        };
        let lambda = m.dominant_eigenvalue()?;
        let inv = 1.0 / lambda;
        let mu = (t * lambda.ln()).exp();
        let mu_inv = (-t * lambda.ln()).exp();
        let denom = lambda - inv;
        // g^t = μ·(g − λ⁻¹I)/(λ − λ⁻¹) + μ⁻¹·(g − λI)/(λ⁻¹ − λ)
        let p = mu / denom;
        let q = mu_inv / denom;
        let mut out = MoebiusTransform {
            a: p * (m.a - inv) - q * (m.a - lambda),
            b: (p - q) * m.b,
            c: (p - q) * m.c,
            d: p * (m.d - inv) - q * (m.d - lambda),
            dim: m.dim,
        };
        if out.dim == ModelDim::Two {
            out.a.im = 0.0;
            out.b.im = 0.0;
            out.c.im = 0.0;
            out.d.im = 0.0;
        }
        // Built directly rather than through the checked constructor: the
        // determinant is exactly μ·μ⁻¹ = 1 in exact arithmetic, but evaluating
        // ad − bc with entries of size e^{tℓ/2} cancels quadratically, and
        // renormalizing by that noisy value would perturb the trace by
        // ~e^{tℓ}·ε — far worse than leaving the accurate entries alone.
        Ok(out)
    }

    fn is_identity_like(&self) -> bool {
        let close = |x: Complex64, y: Complex64| (x - y).norm() <= MATRIX_TOL;
        let one = c64(1.0, 0.0);
        let zero = c64(0.0, 0.0);
        (close(self.a, one) && close(self.b, zero) && close(self.c, zero) && close(self.d, one))
            || (close(self.a, -one)
                && close(self.b, zero)
                && close(self.c, zero)
                && close(self.d, -one))
    }

    /// Classify by the squared trace: real and in [0, 4) means elliptic,
    /// equal to 4 means parabolic (or identity), anything else is
    /// hyperbolic/loxodromic.
    pub fn classify(&self) -> IsometryClass {
        if self.is_identity_like() {
            return IsometryClass::Identity;
        }
        let t2 = self.trace() * self.trace();
        if (t2 - c64(4.0, 0.0)).norm() <= MATRIX_TOL {
            return IsometryClass::Parabolic;
        }
        if t2.im.abs() <= MATRIX_TOL && t2.re >= -MATRIX_TOL && t2.re < 4.0 {
            return IsometryClass::Elliptic;
        }
        IsometryClass::Hyperbolic
    }

    /// Eigenvalue of the matrix with modulus > 1 (hyperbolic elements only).
    fn dominant_eigenvalue(&self) -> Result<Complex64, MoebiusError> {
        match self.classify() {
            IsometryClass::Hyperbolic => {}
            other => return Err(MoebiusError::NotHyperbolic(other)),
        }
        let t = self.trace();
        let s = (t * t - c64(4.0, 0.0)).sqrt();
        let r1 = (t + s) / 2.0;
        let r2 = (t - s) / 2.0;
        Ok(if r1.norm() >= r2.norm() { r1 } else { r2 })
    }

    /// Complex translation length ℓ + iθ = 2 log λ, with λ the dominant
    /// eigenvalue; the branch is fixed by ℓ > 0 and θ ∈ (−π, π].
    pub fn translation_length(&self) -> Result<ComplexLength, MoebiusError> {
        let lambda = self.dominant_eigenvalue()?;
        let ell = 2.0 * lambda.norm().ln();
        let theta = if self.dim == ModelDim::Two { 0.0 } else { wrap_angle(2.0 * lambda.arg()) };
        Ok(ComplexLength { ell, theta })
    }

    /// Hyperbolic displacement of the model origin:
    /// cosh d = (|a|² + |b|² + |c|² + |d|²) / 2.
    pub fn displacement(&self) -> f64 {
        let f = (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr())
            / 2.0;
        f.max(1.0).acosh()
    }

    /// Image of a boundary point under the induced boundary map.
    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c.norm() <= MATRIX_TOL {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() <= MATRIX_TOL * (z.norm() + 1.0) {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Image of an interior model point.
    pub fn apply_point(&self, p: ModelPoint) -> ModelPoint {
        point_action(self.a, self.b, self.c, self.d, p)
    }

    /// Oriented invariant axis of a hyperbolic element.
    pub fn axis(&self) -> Result<Axis, MoebiusError> {
        let lambda = self.dominant_eigenvalue()?;
        let (fixed_plus, fixed_minus);
        if self.c.norm() > 1e-13 {
            // Fixed points solve c z² + (d − a) z − b = 0; the attracting one
            // has matrix eigenvalue λ: z = (λ − d)/c.
            fixed_plus = BoundaryPoint::Finite((lambda - self.d) / self.c);
            fixed_minus = BoundaryPoint::Finite((1.0 / lambda - self.d) / self.c);
        } else if (self.a - self.d).norm() <= MATRIX_TOL {
            return Err(MoebiusError::NotHyperbolic(self.classify()));
        } else {
            let finite = self.b / (self.d - self.a);
            if self.a.norm() > self.d.norm() {
                fixed_plus = BoundaryPoint::Infinity;
                fixed_minus = BoundaryPoint::Finite(finite);
            } else {
                fixed_plus = BoundaryPoint::Finite(finite);
                fixed_minus = BoundaryPoint::Infinity;
            }
        }
        Ok(Axis::through(fixed_minus, fixed_plus, self.dim))
    }

    /// Eigenvalues of the linearized first-return (Poincaré) map of the
    /// geodesic flow around the closed orbit, expanding directions first.
    ///
    /// 2-space: {e^ℓ, e^{−ℓ}}. 3-space: {e^{ℓ±iθ}, e^{−ℓ±iθ}}.
    pub fn poincare_multipliers(&self) -> Result<Vec<Complex64>, MoebiusError> {
        let cl = self.translation_length()?;
        Ok(poincare_multipliers_of(cl, self.dim))
    }

    /// |det(I − P^k)| for the k-th iterate of the Poincaré return map.
    pub fn det_i_minus_pk(&self, k: u32) -> Result<f64, MoebiusError> {
        let cl = self.translation_length()?;
        Ok(det_i_minus_pk_of(cl, self.dim, k))
    }
}

/// Multipliers from a complex length, expanding directions first.
pub fn poincare_multipliers_of(cl: ComplexLength, dim: ModelDim) -> Vec<Complex64> {
    let ell = cl.ell;
    match dim {
        ModelDim::Two => vec![c64(ell.exp(), 0.0), c64((-ell).exp(), 0.0)],
        ModelDim::Three => {
            let rot = Complex64::from_polar(1.0, cl.theta);
            vec![
                ell.exp() * rot,
                ell.exp() * rot.conj(),
                (-ell).exp() * rot,
                (-ell).exp() * rot.conj(),
            ]
        }
    }
}

/// |det(I − P^k)| computed as the product of |1 − μ^k| over the multipliers.
pub fn det_i_minus_pk_of(cl: ComplexLength, dim: ModelDim, k: u32) -> f64 {
    let kk = k as f64;
    let mut prod = 1.0_f64;
    for mu in poincare_multipliers_of(cl, dim) {
        // μ^k computed in polar form to avoid accumulating argument error.
        let muk = Complex64::from_polar((kk * mu.norm().ln()).exp(), kk * mu.arg());
        prod *= (Complex64::new(1.0, 0.0) - muk).norm();
    }
    prod
}

/// Oriented geodesic with endpoints on the model boundary and a unit-speed
/// parametrization running from `fixed_minus` (t → −∞) to `fixed_plus`
/// (t → +∞). For the axis of a hyperbolic m, m(axis(t)) = axis(t + ℓ).
#[derive(Clone, Debug)]
pub struct Axis {
    pub fixed_minus: BoundaryPoint,
    pub fixed_plus: BoundaryPoint,
    param: AxisParam,
}

#[derive(Clone, Debug)]
enum AxisParam {
    /// axis(t) = S · (0, e^t) for a matrix S with S(0) = fixed_minus,
    /// S(∞) = fixed_plus.
    Conjugated([Complex64; 4]),
    /// Vertical line over z0 traversed upward (fixed_plus = ∞).
    VerticalUp(Complex64),
    /// Vertical line over z0 traversed downward (fixed_minus = ∞).
    VerticalDown(Complex64),
}

impl Axis {
    /// Geodesic through two distinct boundary points, oriented from `minus`
    /// to `plus`.
    pub fn through(minus: BoundaryPoint, plus: BoundaryPoint, _dim: ModelDim) -> Axis {
        let param = match (minus, plus) {
            (BoundaryPoint::Finite(p), BoundaryPoint::Infinity) => AxisParam::VerticalUp(p),
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(q)) => AxisParam::VerticalDown(q),
            (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => {
                // S = [[q, p], [1, 1]] maps 0 ↦ p, ∞ ↦ q; the interior-point
                // action is invariant under complex rescaling, so no
                // determinant normalization is needed.
                AxisParam::Conjugated([q, p, c64(1.0, 0.0), c64(1.0, 0.0)])
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => {
                panic!("axis endpoints must be distinct")
            }
        };
        Axis { fixed_minus: minus, fixed_plus: plus, param }
    }

    /// The point at parameter t.
    pub fn point(&self, t: f64) -> ModelPoint {
        match &self.param {
            AxisParam::VerticalUp(z0) => ModelPoint { z: *z0, height: t.exp() },
            AxisParam::VerticalDown(z0) => ModelPoint { z: *z0, height: (-t).exp() },
            AxisParam::Conjugated([a, b, c, d]) => {
                point_action(*a, *b, *c, *d, ModelPoint { z: c64(0.0, 0.0), height: t.exp() })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn diag(l: f64) -> MoebiusTransform {
        MoebiusTransform::from_real((l / 2.0).exp(), 0.0, 0.0, (-l / 2.0).exp()).unwrap()
    }

    #[test]
    fn translation_length_of_diagonal_matrix() {
        // diag(e, e^{-1}) translates its axis by exactly 2.
        let m = diag(2.0);
        let cl = m.translation_length().unwrap();
        assert_relative_eq!(cl.ell, 2.0, max_relative = 1e-14);
        assert_eq!(cl.theta, 0.0);
    }

    #[test]
    fn translation_length_matches_arccosh_of_half_trace() {
        // trace 3 ⇒ ℓ = 2 arccosh(3/2) ≈ 1.9248473002384139.
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let cl = m.translation_length().unwrap();
        assert_relative_eq!(cl.ell, 2.0 * (1.5_f64).acosh(), max_relative = 1e-13);
        assert_relative_eq!(cl.ell, 1.9248473002384139, max_relative = 1e-13);
    }

    #[test]
    fn negative_trace_representative_gives_same_length() {
        let m = MoebiusTransform::from_real(-2.0, -1.0, -1.0, -1.0).unwrap();
        let cl = m.translation_length().unwrap();
        assert_relative_eq!(cl.ell, 1.9248473002384139, max_relative = 1e-13);
        assert_eq!(cl.theta, 0.0);
    }

    #[test]
    fn loxodromic_complex_length_roundtrip() {
        // diag(e^{(ℓ+iθ)/2}, e^{-(ℓ+iθ)/2}) has complex length ℓ + iθ.
        let (ell, theta): (f64, f64) = (1.25, 0.7);
        let lam = Complex64::from_polar((ell / 2.0).exp(), theta / 2.0);
        let m = MoebiusTransform::new(
            lam,
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            1.0 / lam,
            ModelDim::Three,
        )
        .unwrap();
        let cl = m.translation_length().unwrap();
        assert_relative_eq!(cl.ell, ell, max_relative = 1e-13);
        assert_relative_eq!(cl.theta, theta, max_relative = 1e-13);
    }

    #[test]
    fn classification_by_squared_trace() {
        let id = MoebiusTransform::from_real(-1.0, 0.0, 0.0, -1.0).unwrap();
        assert_eq!(id.classify(), IsometryClass::Identity);
        let par = MoebiusTransform::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(par.classify(), IsometryClass::Parabolic);
        let rot = MoebiusTransform::from_real(0.5, -0.8660254037844386, 0.8660254037844386, 0.5)
            .unwrap();
        assert_eq!(rot.classify(), IsometryClass::Elliptic);
        assert_eq!(diag(2.0).classify(), IsometryClass::Hyperbolic);
        // Purely imaginary trace: squared trace is negative, hence loxodromic.
        let lam = Complex64::from_polar(std::f64::consts::E, std::f64::consts::FRAC_PI_2);
        let lox =
            MoebiusTransform::new(lam, c64(0.0, 0.0), c64(0.0, 0.0), 1.0 / lam, ModelDim::Three)
                .unwrap();
        assert_eq!(lox.classify(), IsometryClass::Hyperbolic);
        let cl = lox.translation_length().unwrap();
        assert_relative_eq!(cl.ell, 2.0, max_relative = 1e-13);
        assert_relative_eq!(cl.theta, std::f64::consts::PI, max_relative = 1e-13);
    }

    #[test]
    fn displacement_of_parabolic_translation() {
        // [[1,1],[0,1]] moves i by arccosh(3/2) ≈ 0.9624236501192069.
        let m = MoebiusTransform::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(m.displacement(), (1.5_f64).acosh(), max_relative = 1e-14);
        assert_relative_eq!(m.displacement(), 0.9624236501192069, max_relative = 1e-13);
    }

    #[test]
    fn displacement_agrees_with_point_distance() {
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let o = ModelPoint::origin();
        let d_direct = o.dist(&m.apply_point(o));
        assert_relative_eq!(m.displacement(), d_direct, max_relative = 1e-12);
    }

    #[test]
    fn displacement_bounds_translation_length() {
        // cosh d − cosh ℓ = (b − c)²/2 for real matrices, so d ≥ ℓ always.
        let m = MoebiusTransform::from_real(3.0, 2.0, 4.0, 3.0).unwrap();
        let cl = m.translation_length().unwrap();
        assert!(m.displacement() >= cl.ell - 1e-14);
    }

    #[test]
    fn identity_has_zero_displacement() {
        let id = MoebiusTransform::identity(ModelDim::Two);
        assert_eq!(id.displacement(), 0.0);
    }

    #[test]
    fn axis_fixed_points_of_integer_matrix() {
        // [[2,1],[1,1]]: fixed points are the roots of z² − z − 1.
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let axis = m.axis().unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        match axis.fixed_plus {
            BoundaryPoint::Finite(z) => {
                assert_relative_eq!(z.re, golden, max_relative = 1e-13);
                assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-13);
            }
            _ => panic!("expected finite attracting fixed point"),
        }
        match axis.fixed_minus {
            BoundaryPoint::Finite(z) => {
                assert_relative_eq!(z.re, (1.0 - 5.0_f64.sqrt()) / 2.0, max_relative = 1e-13)
            }
            _ => panic!("expected finite repelling fixed point"),
        }
    }

    #[test]
    fn axis_parametrization_is_translated_by_the_element() {
        let cases = vec![
            MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap(),
            diag(3.0),
            diag(3.0).inverse(),
            MoebiusTransform::from_real(3.7622, 3.6269, 3.6269, 3.7622).unwrap(),
        ];
        for m in cases {
            let cl = m.translation_length().unwrap();
            let axis = m.axis().unwrap();
            for &t in &[-1.5, 0.0, 0.9, 4.2] {
                let moved = m.apply_point(axis.point(t));
                let expect = axis.point(t + cl.ell);
                assert!(moved.dist(&expect) < 1e-10, "axis translation failed at t={t}");
            }
        }
    }

    #[test]
    fn axis_parametrization_has_unit_speed() {
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let axis = m.axis().unwrap();
        for &(s, t) in &[(0.0, 1.0), (-2.0, 0.5), (1.0, 3.5)] {
            let d = axis.point(s).dist(&axis.point(t));
            assert_relative_eq!(d, (t - s).abs(), max_relative = 1e-11);
        }
    }

    #[test]
    fn loxodromic_axis_translation_in_half_space() {
        // Conjugated loxodromic with finite fixed points in C.
        let (ell, theta): (f64, f64) = (0.9, 1.1);
        let lam = Complex64::from_polar((ell / 2.0).exp(), theta / 2.0);
        let t0 = MoebiusTransform::new(lam, c64(0.0, 0.0), c64(0.0, 0.0), 1.0 / lam, ModelDim::Three)
            .unwrap();
        let q = MoebiusTransform::new(
            c64(1.0, 0.3),
            c64(-0.4, 0.1),
            c64(0.2, -0.5),
            c64(1.0, 0.0),
            ModelDim::Three,
        )
        .unwrap();
        let m = q.compose(&t0).compose(&q.inverse());
        let cl = m.translation_length().unwrap();
        assert_relative_eq!(cl.ell, ell, max_relative = 1e-12);
        let axis = m.axis().unwrap();
        for &t in &[-0.7, 0.0, 2.3] {
            let moved = m.apply_point(axis.point(t));
            assert!(moved.dist(&axis.point(t + cl.ell)) < 1e-10);
        }
    }

    #[test]
    fn multipliers_match_boundary_derivative_at_attracting_point() {
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let cl = m.translation_length().unwrap();
        let axis = m.axis().unwrap();
        let zp = match axis.fixed_plus {
            BoundaryPoint::Finite(z) => z,
            _ => unreachable!(),
        };
        // Central finite difference of the boundary action at the attracting
        // fixed point approximates e^{−ℓ}.
        let h = 1e-6;
        let f = |z: Complex64| -> Complex64 {
            let [a, b, c, d] = m.entries();
            (a * z + b) / (c * z + d)
        };
        let deriv = (f(zp + c64(h, 0.0)) - f(zp - c64(h, 0.0))) / c64(2.0 * h, 0.0);
        assert_relative_eq!(deriv.re, (-cl.ell).exp(), max_relative = 1e-8);
        let mults = m.poincare_multipliers().unwrap();
        assert_eq!(mults.len(), 2);
        assert_relative_eq!(mults[0].re, cl.ell.exp(), max_relative = 1e-13);
        assert_relative_eq!(mults[1].re, (-cl.ell).exp(), max_relative = 1e-13);
    }

    #[test]
    fn det_i_minus_p_surface_closed_form() {
        // |det(I − P^k)| = 4 sinh²(kℓ/2) in the 2-space model.
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let ell = m.translation_length().unwrap().ell;
        for k in 1..=5 {
            let got = m.det_i_minus_pk(k).unwrap();
            let want = 4.0 * (k as f64 * ell / 2.0).sinh().powi(2);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn det_i_minus_p_four_factor_product() {
        // (ℓ, θ) = (1, π): |(1+e)²(1+1/e)²| = (2 + 2 cosh 1)².
        let cl = ComplexLength { ell: 1.0, theta: std::f64::consts::PI };
        let got = det_i_minus_pk_of(cl, ModelDim::Three, 1);
        let want = (2.0 + 2.0 * 1.0_f64.cosh()).powi(2);
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }

    #[test]
    fn long_bounded_products_keep_unit_determinant() {
        // A thousand elliptic factors keep entries O(1), so the determinant
        // stays within rounding of 1 without any renormalization.
        let theta = 0.7_f64;
        let r = MoebiusTransform::from_real(theta.cos(), -theta.sin(), theta.sin(), theta.cos())
            .unwrap();
        let mut acc = MoebiusTransform::identity(ModelDim::Two);
        for _ in 0..1000 {
            acc = acc.compose(&r);
        }
        assert_abs_diff_eq!((acc.det() - c64(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn conjugation_preserves_translation_length() {
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let g = MoebiusTransform::from_real(1.0, 2.0, 0.3, 1.0).unwrap();
        let conj = g.compose(&m).compose(&g.inverse());
        let a = m.translation_length().unwrap();
        let b = conj.translation_length().unwrap();
        assert_relative_eq!(a.ell, b.ell, max_relative = 1e-12);
    }

    #[test]
    fn power_scales_translation_length() {
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let ell = m.translation_length().unwrap().ell;
        for k in 2..=6 {
            let lk = m.pow(k).translation_length().unwrap().ell;
            assert_relative_eq!(lk, k as f64 * ell, max_relative = 1e-12);
        }
    }

    #[test]
    fn half_space_action_reduces_to_half_plane_action() {
        // For real matrices the (z, height) action restricted to real z is
        // the complex Möbius action on x + iy.
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        let p = ModelPoint { z: c64(0.7, 0.0), height: 1.3 };
        let q = m.apply_point(p);
        let w = {
            let [a, b, c, d] = m.entries();
            let z = c64(0.7, 1.3);
            (a * z + b) / (c * z + d)
        };
        assert_relative_eq!(q.z.re, w.re, max_relative = 1e-13);
        assert_relative_eq!(q.height, w.im, max_relative = 1e-13);
    }

    #[test]
    fn boundary_action_handles_infinity() {
        let m = MoebiusTransform::from_real(2.0, 1.0, 1.0, 1.0).unwrap();
        match m.apply_boundary(BoundaryPoint::Infinity) {
            BoundaryPoint::Finite(z) => assert_relative_eq!(z.re, 2.0, max_relative = 1e-14),
            _ => panic!(),
        }
        let shift = MoebiusTransform::from_real(1.0, 5.0, 0.0, 1.0).unwrap();
        assert_eq!(shift.apply_boundary(BoundaryPoint::Infinity), BoundaryPoint::Infinity);
    }

    #[test]
    fn elliptic_has_no_translation_length() {
        let rot = MoebiusTransform::from_real(0.0, -1.0, 1.0, 0.0).unwrap();
        assert!(rot.translation_length().is_err());
    }

    #[test]
    fn fractional_power_scales_translation_length() {
        let ch = 2.0_f64.cosh();
        let sh = 2.0_f64.sinh();
        let g = MoebiusTransform::from_real(ch, sh, sh, ch).unwrap();
        let ell = g.translation_length().unwrap().ell;
        for t in [0.5, 1.0, 1.6, 3.25] {
            let p = g.fractional_power(t).unwrap();
            assert_relative_eq!(
                p.translation_length().unwrap().ell,
                t * ell,
                max_relative = 1e-13
            );
        }
        // Half-power composed with itself recovers the element.
        let half = g.fractional_power(0.5).unwrap();
        let again = half.compose(&half);
        for (x, y) in again.entries().iter().zip(g.entries()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn fractional_power_ignores_the_matrix_sign() {
        let e2 = 2.0_f64.exp();
        let g = MoebiusTransform::from_real(e2, 0.0, 0.0, 1.0 / e2).unwrap();
        let neg = MoebiusTransform::new(
            c64(-e2, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(-1.0 / e2, 0.0),
            ModelDim::Two,
        )
        .unwrap();
        let p = g.fractional_power(1.3).unwrap();
        let q = neg.fractional_power(1.3).unwrap();
        for (x, y) in p.entries().iter().zip(q.entries()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn fractional_power_scales_loxodromic_rotation() {
        // diag(λ, 1/λ) with λ = e^{1 + 0.2i}: length 2, angle 0.4.
        let lambda = Complex64::new(1.0, 0.2).exp();
        let g = MoebiusTransform::new(
            lambda,
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            1.0 / lambda,
            ModelDim::Three,
        )
        .unwrap();
        let p = g.fractional_power(1.5).unwrap();
        let cl = p.translation_length().unwrap();
        assert_relative_eq!(cl.ell, 3.0, max_relative = 1e-13);
        assert_relative_eq!(cl.theta, 0.6, max_relative = 1e-12);
    }

    #[test]
    fn fractional_power_requires_a_hyperbolic_element() {
        let parabolic = MoebiusTransform::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            parabolic.fractional_power(0.5),
            Err(MoebiusError::NotHyperbolic(_))
        ));
    }
}
