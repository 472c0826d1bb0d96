//! Schottky group data: generators with paired ping-pong disks, content
//! digests, JSON (de)serialization, and the completeness certificate derived
//! from the disk geometry.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::word::{char_to_letter, letter_to_char, Word};
use crate::disk::{BoundaryDisk, DiskError};
use crate::moebius::{ModelDim, ModelPoint, MoebiusError, MoebiusTransform};

/// Index of a letter in the doubled alphabet: generator i ↦ 2i, its inverse
/// ↦ 2i + 1, so `id ^ 1` is the inverse letter.
pub type LetterId = usize;

pub fn letter_to_id(letter: i32) -> LetterId {
    debug_assert!(letter != 0);
    let idx = (letter.unsigned_abs() as usize - 1) * 2;
    idx + if letter < 0 { 1 } else { 0 }
}

pub fn id_to_letter(id: LetterId) -> i32 {
    let gen = (id / 2) as i32 + 1;
    if id % 2 == 0 {
        gen
    } else {
        -gen
    }
}

pub fn inverse_id(id: LetterId) -> LetterId {
    id ^ 1
}

#[derive(Debug, Error)]
pub enum SchottkyError {
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("at most 26 generators are supported, got {0}")]
    RankTooLarge(usize),
    #[error("model_dim must be 2 or 3, got {0}")]
    BadModelDim(u8),
    #[error("disk letter {0:?} does not name a generator or inverse")]
    BadDiskLetter(String),
    #[error("duplicate disk for letter {0}")]
    DuplicateDisk(char),
    #[error("missing disk for letter {0}")]
    MissingDisk(char),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Disk(#[from] DiskError),
    #[error("ping-pong violation: {0}")]
    PingPongViolation(String),
    #[error("degenerate disks: {0}")]
    DegenerateDisks(String),
    #[error("group file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Free convex co-compact group of isometries given by generators and
/// pairwise disjoint boundary disks (one per letter and inverse letter).
#[derive(Clone, Debug)]
pub struct SchottkyGroup {
    dim: ModelDim,
    /// Transform per letter id (generator at 2i, inverse at 2i + 1).
    transforms: Vec<MoebiusTransform>,
    /// Disk per letter id.
    disks: Vec<BoundaryDisk>,
    digest: String,
}

impl SchottkyGroup {
    /// Build a group from generators and (letter, disk) pairs. Letters may
    /// come in any order but must cover each generator and inverse exactly
    /// once. Ping-pong is NOT verified here; call [`Self::validate_ping_pong`].
    pub fn new(
        dim: ModelDim,
        generators: Vec<MoebiusTransform>,
        disk_pairs: Vec<(i32, BoundaryDisk)>,
    ) -> Result<Self, SchottkyError> {
        let rank = generators.len();
        if rank < 2 {
            return Err(SchottkyError::RankTooSmall(rank));
        }
        if rank > 26 {
            return Err(SchottkyError::RankTooLarge(rank));
        }
        let mut transforms = Vec::with_capacity(2 * rank);
        for g in &generators {
            transforms.push(*g);
            transforms.push(g.inverse());
        }
        let mut disks: Vec<Option<BoundaryDisk>> = vec![None; 2 * rank];
        for (letter, disk) in disk_pairs {
            if letter == 0 || letter.unsigned_abs() as usize > rank {
                return Err(SchottkyError::BadDiskLetter(format!("{letter}")));
            }
            let id = letter_to_id(letter);
            if disks[id].is_some() {
                return Err(SchottkyError::DuplicateDisk(letter_to_char(letter)));
            }
            disks[id] = Some(disk);
        }
        let disks = disks
            .into_iter()
            .enumerate()
            .map(|(id, d)| d.ok_or(SchottkyError::MissingDisk(letter_to_char(id_to_letter(id)))))
            .collect::<Result<Vec<_>, _>>()?;
        let digest = compute_digest(dim, &generators);
        Ok(SchottkyGroup { dim, transforms, disks, digest })
    }

    pub fn rank(&self) -> usize {
        self.transforms.len() / 2
    }

    pub fn alphabet_size(&self) -> usize {
        self.transforms.len()
    }

    pub fn dim(&self) -> ModelDim {
        self.dim
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn letter_transform(&self, id: LetterId) -> &MoebiusTransform {
        &self.transforms[id]
    }

    pub fn disk(&self, id: LetterId) -> &BoundaryDisk {
        &self.disks[id]
    }

    /// Matrix of a word: letters act left-to-right, w(z) = x₁(x₂(…xₘ(z))).
    pub fn word_transform(&self, word: &Word) -> MoebiusTransform {
        let mut m = MoebiusTransform::identity(self.dim);
        for &l in word.letters() {
            m = m.compose(self.letter_transform(letter_to_id(l)));
        }
        m
    }

    /// Verify disjointness and the ping-pong mapping property, and derive
    /// the completeness certificate from the disk geometry.
    ///
    /// The certificate's per-pair depths δ(x, y) = d(∂H_x, ∂(x·H_y)) are the
    /// hyperbolic distances between the boundary geodesic hyperplanes in the
    /// nesting chain of a reduced word. They give rigorous lower bounds:
    /// translation length of a cyclically reduced word ≥ its cyclic depth
    /// sum, and d(o, w·o) ≥ d_o(x₁) + Σ depths + depth of x·o inside H_x.
    pub fn validate_ping_pong(&self) -> Result<CompletenessCertificate, SchottkyError> {
        let n = self.alphabet_size();
        let letter_name = |id: LetterId| letter_to_char(id_to_letter(id));

        // Pairwise disjoint with positive gaps.
        for i in 0..n {
            for j in (i + 1)..n {
                let disjoint = self.disks[i].disjoint_from(&self.disks[j]).map_err(|e| {
                    SchottkyError::DegenerateDisks(format!(
                        "disks {} and {}: {e}",
                        letter_name(i),
                        letter_name(j)
                    ))
                })?;
                if !disjoint {
                    return Err(SchottkyError::DegenerateDisks(format!(
                        "disks {} and {} are not disjoint",
                        letter_name(i),
                        letter_name(j)
                    )));
                }
            }
        }

        // Mapping property: x sends the complement of D_{x⁻¹} into D_x.
        for x in 0..n {
            let image = self.disks[inverse_id(x)].complement().transform(&self.transforms[x]);
            let ok = self.disks[x].contains_region(&image).map_err(|e| {
                SchottkyError::PingPongViolation(format!(
                    "image of the complement of D_{} under {} is degenerate: {e}",
                    letter_name(inverse_id(x)),
                    letter_name(x)
                ))
            })?;
            if !ok {
                return Err(SchottkyError::PingPongViolation(format!(
                    "{} does not map the complement of D_{} into D_{}",
                    letter_name(x),
                    letter_name(inverse_id(x)),
                    letter_name(x)
                )));
            }
        }

        // Depth matrix δ(x, y) for y ≠ x⁻¹.
        let mut depths = vec![f64::NAN; n * n];
        let mut delta_min = f64::INFINITY;
        for x in 0..n {
            for y in 0..n {
                if y == inverse_id(x) {
                    continue;
                }
                let image = self.disks[y].transform(&self.transforms[x]);
                let dist = self.disks[x].plane_distance(&image)?;
                if dist <= 0.0 {
                    return Err(SchottkyError::DegenerateDisks(format!(
                        "zero gap between D_{} and {}(D_{})",
                        letter_name(x),
                        letter_name(x),
                        letter_name(y)
                    )));
                }
                depths[x * n + y] = dist;
                delta_min = delta_min.min(dist);
            }
        }

        let origin = ModelPoint::origin();
        let mut origin_distances = Vec::with_capacity(n);
        let mut origin_depths = Vec::with_capacity(n);
        for x in 0..n {
            origin_distances.push(self.disks[x].signed_point_distance(origin)?);
            let xo = self.transforms[x].apply_point(origin);
            origin_depths.push(-self.disks[x].signed_point_distance(xo)?);
        }

        let c = 2.0
            * origin_distances.iter().fold(0.0_f64, |acc, &d| acc.max(d.abs()));

        Ok(CompletenessCertificate {
            kappa: (-delta_min).exp(),
            additive_constant: c,
            delta_min,
            depths,
            origin_distances,
            origin_depths,
            alphabet: n,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, SchottkyError> {
        let file: GroupFile = serde_json::from_str(text)?;
        file.into_group()
    }

    pub fn from_path(path: &Path) -> Result<Self, SchottkyError> {
        let text = fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let file = GroupFile::from_group(self);
        serde_json::to_string_pretty(&file).expect("group serialization cannot fail")
    }

    pub fn save(&self, path: &Path) -> Result<(), SchottkyError> {
        fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

/// Digest of the defining data: model dimension plus generator entries
/// rounded to 15 significant digits, SHA-256 hashed. Disks are deliberately
/// excluded — the digest identifies the group, and length data depends only
/// on the generators.
fn compute_digest(dim: ModelDim, generators: &[MoebiusTransform]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"orbitzeta-group-v1\n");
    hasher.update([dim.as_u8()]);
    for g in generators {
        for e in g.entries() {
            for v in [e.re, e.im] {
                // Collapse -0.0 to 0.0 so the sign of zero cannot split
                // otherwise identical groups.
                let v = if v == 0.0 { 0.0 } else { v };
                hasher.update(format!("{v:.14e},").as_bytes());
            }
        }
    }
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in out {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Geometric bounds extracted from a validated disk system.
///
/// Guarantee: every cyclically reduced word of length > L has translation
/// length > `t_certified(L)`, so enumerating words up to length L yields all
/// closed geodesics of length ≤ t_certified(L). The bound uses the spec
/// κ/C form, which is conservative relative to the raw depth sums.
#[derive(Clone, Debug)]
pub struct CompletenessCertificate {
    /// Per-letter contraction bound e^{−δ_min} ∈ (0, 1).
    pub kappa: f64,
    /// Additive slack C = 2 · max hyperbolic distance from the origin to a
    /// disk's bounding hyperplane.
    pub additive_constant: f64,
    /// Minimal nesting depth over admissible letter pairs.
    pub delta_min: f64,
    depths: Vec<f64>,
    origin_distances: Vec<f64>,
    origin_depths: Vec<f64>,
    alphabet: usize,
}

impl CompletenessCertificate {
    /// Cutoff guaranteed complete after exploring words of length ≤ L.
    pub fn t_certified(&self, word_len: u32) -> f64 {
        word_len as f64 * (-self.kappa.ln()) - self.additive_constant
    }

    /// Smallest explored word length whose certified cutoff reaches `t`.
    pub fn required_word_length(&self, t: f64) -> u32 {
        let raw = (t + self.additive_constant) / -self.kappa.ln();
        if raw <= 0.0 {
            return 0;
        }
        // Trim any float-rounding overshoot of the division against the
        // authoritative t_certified.
        let mut l = raw.ceil() as u32;
        while l > 0 && self.t_certified(l - 1) >= t {
            l -= 1;
        }
        l
    }

    /// Depth of the nesting step x then y (y ≠ x⁻¹).
    pub fn depth(&self, x: LetterId, y: LetterId) -> f64 {
        self.depths[x * self.alphabet + y]
    }

    /// Signed distance from the origin to letter x's bounding hyperplane
    /// (positive outside the half space).
    pub fn origin_distance(&self, x: LetterId) -> f64 {
        self.origin_distances[x]
    }

    /// Depth of x·origin inside letter x's half space.
    pub fn origin_depth(&self, x: LetterId) -> f64 {
        self.origin_depths[x]
    }

    /// Lower bound for d(o, w·o) usable while extending a word left-to-right:
    /// the final-letter depth term is replaced by its floor over letters so
    /// the bound is monotone along prefixes.
    pub fn min_final_depth(&self) -> f64 {
        self.origin_depths.iter().fold(0.0_f64, |acc, &q| acc.min(q))
    }
}

// --- JSON schema ---------------------------------------------------------

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
struct GroupFile {
    model_dim: u8,
    /// One 2×2 matrix per generator; each entry is [re, im].
    generators: Vec<[[f64; 2]; 4]>,
    disks: Vec<DiskFile>,
}

#[derive(Serialize, Deserialize)]
struct DiskFile {
    letter: String,
    center: CenterFile,
    radius: f64,
    /// When true the region is {|z − center| ≥ radius} ∪ {∞} — used for
    /// disks whose interior must contain the point at infinity.
    #[serde(default, skip_serializing_if = "is_false")]
    exterior: bool,
}

/// Disk centers may be written as a real number (a boundary point of the
/// half-plane model) or as an [re, im] pair.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CenterFile {
    Real(f64),
    Complex([f64; 2]),
}

impl CenterFile {
    fn as_complex(&self) -> Complex64 {
        match self {
            CenterFile::Real(x) => Complex64::new(*x, 0.0),
            CenterFile::Complex([re, im]) => Complex64::new(*re, *im),
        }
    }
}

impl GroupFile {
    fn into_group(self) -> Result<SchottkyGroup, SchottkyError> {
        let dim =
            ModelDim::from_u8(self.model_dim).ok_or(SchottkyError::BadModelDim(self.model_dim))?;
        let mut generators = Vec::with_capacity(self.generators.len());
        for mat in &self.generators {
            let e = |i: usize| Complex64::new(mat[i][0], mat[i][1]);
            generators.push(MoebiusTransform::new(e(0), e(1), e(2), e(3), dim)?);
        }
        let mut pairs = Vec::with_capacity(self.disks.len());
        for d in &self.disks {
            let mut chars = d.letter.chars();
            let (Some(ch), None) = (chars.next(), chars.next()) else {
                return Err(SchottkyError::BadDiskLetter(d.letter.clone()));
            };
            let letter = char_to_letter(ch)
                .map_err(|_| SchottkyError::BadDiskLetter(d.letter.clone()))?;
            let center = d.center.as_complex();
            let disk = if d.exterior {
                BoundaryDisk::exterior_of(center, d.radius)?
            } else {
                BoundaryDisk::from_center_radius(center, d.radius)?
            };
            pairs.push((letter, disk));
        }
        SchottkyGroup::new(dim, generators, pairs)
    }

    fn from_group(group: &SchottkyGroup) -> GroupFile {
        let generators = (0..group.rank())
            .map(|i| {
                let e = group.transforms[2 * i].entries();
                [[e[0].re, e[0].im], [e[1].re, e[1].im], [e[2].re, e[2].im], [e[3].re, e[3].im]]
            })
            .collect();
        let disks = (0..group.alphabet_size())
            .map(|id| {
                use crate::disk::DiskShape;
                let letter = letter_to_char(id_to_letter(id)).to_string();
                match group.disks[id].shape() {
                    DiskShape::Disk { center, radius } => DiskFile {
                        letter,
                        center: CenterFile::Complex([center.re, center.im]),
                        radius,
                        exterior: false,
                    },
                    DiskShape::Exterior { center, radius } => DiskFile {
                        letter,
                        center: CenterFile::Complex([center.re, center.im]),
                        radius,
                        exterior: true,
                    },
                    DiskShape::HalfPlane { .. } => {
                        unreachable!("constructors only build round disks")
                    }
                }
            })
            .collect();
        GroupFile { model_dim: group.dim.as_u8(), generators, disks }
    }
}

#[cfg(test)]
pub(crate) mod test_groups {
    use super::*;

    /// Rank-2 half-plane group: a = diag(e², e⁻²) and b = its conjugate by
    /// the quarter-turn (z−1)/(z+1), with disks around the four fixed points
    /// 0, ∞, ±1.
    pub fn reference_surface() -> SchottkyGroup {
        let e2 = 2.0_f64.exp();
        let a = MoebiusTransform::from_real(e2, 0.0, 0.0, 1.0 / e2).unwrap();
        let (ch, sh) = (2.0_f64.cosh(), 2.0_f64.sinh());
        let b = MoebiusTransform::from_real(ch, sh, sh, ch).unwrap();
        let cb = ch / sh; // coth 2 ≈ 1.0373
        let rb = 1.0 / sh + 0.05;
        let c = |x: f64| Complex64::new(x, 0.0);
        SchottkyGroup::new(
            ModelDim::Two,
            vec![a, b],
            vec![
                (1, BoundaryDisk::exterior_of(c(0.0), 2.0).unwrap()),
                (-1, BoundaryDisk::from_center_radius(c(0.0), 0.5).unwrap()),
                (2, BoundaryDisk::from_center_radius(c(cb), rb).unwrap()),
                (-2, BoundaryDisk::from_center_radius(c(-cb), rb).unwrap()),
            ],
        )
        .unwrap()
    }

    /// Same construction with translation lengths 6 instead of 4: wider
    /// funnels, a sparser orbit, a smaller critical exponent.
    pub fn wide_surface() -> SchottkyGroup {
        let e3 = 3.0_f64.exp();
        let a = MoebiusTransform::from_real(e3, 0.0, 0.0, 1.0 / e3).unwrap();
        let (ch, sh) = (3.0_f64.cosh(), 3.0_f64.sinh());
        let b = MoebiusTransform::from_real(ch, sh, sh, ch).unwrap();
        let cb = ch / sh;
        let rb = 1.0 / sh + 0.02;
        let c = |x: f64| Complex64::new(x, 0.0);
        SchottkyGroup::new(
            ModelDim::Two,
            vec![a, b],
            vec![
                (1, BoundaryDisk::exterior_of(c(0.0), 4.0).unwrap()),
                (-1, BoundaryDisk::from_center_radius(c(0.0), 0.25).unwrap()),
                (2, BoundaryDisk::from_center_radius(c(cb), rb).unwrap()),
                (-2, BoundaryDisk::from_center_radius(c(-cb), rb).unwrap()),
            ],
        )
        .unwrap()
    }

    /// Rank-2 group in the half-space model with genuinely loxodromic
    /// generators: complex length (4, 0.6) on the vertical axis and
    /// (4, 0.45) on the axis through ±1.
    pub fn twisted_threespace() -> SchottkyGroup {
        let lambda = Complex64::new(2.0, 0.3).exp();
        let zero = Complex64::new(0.0, 0.0);
        let a =
            MoebiusTransform::new(lambda, zero, zero, 1.0 / lambda, ModelDim::Three).unwrap();
        let w = Complex64::new(2.0, 0.225);
        let (cw, sw) = (w.cosh(), w.sinh());
        let b = MoebiusTransform::new(cw, sw, sw, cw, ModelDim::Three).unwrap();
        let coth = cw / sw;
        let rb = 1.0 / sw.norm() + 0.03;
        SchottkyGroup::new(
            ModelDim::Three,
            vec![a, b],
            vec![
                (1, BoundaryDisk::exterior_of(zero, 2.0).unwrap()),
                (-1, BoundaryDisk::from_center_radius(zero, 0.5).unwrap()),
                (2, BoundaryDisk::from_center_radius(coth, rb).unwrap()),
                (-2, BoundaryDisk::from_center_radius(-coth, rb).unwrap()),
            ],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_groups::reference_surface;
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn letter_id_round_trip() {
        for l in [1, -1, 2, -2, 3, -3] {
            assert_eq!(id_to_letter(letter_to_id(l)), l);
        }
        assert_eq!(inverse_id(letter_to_id(1)), letter_to_id(-1));
        assert_eq!(inverse_id(letter_to_id(-2)), letter_to_id(2));
    }

    #[test]
    fn reference_group_passes_ping_pong() {
        let group = reference_surface();
        let cert = group.validate_ping_pong().unwrap();
        assert!(cert.kappa > 0.0 && cert.kappa < 1.0);
        assert!(cert.delta_min > 1.5, "delta_min = {}", cert.delta_min);
        assert_relative_eq!(cert.kappa, (-cert.delta_min).exp(), max_relative = 1e-14);
        // Origin distances for the a-disks: sinh d = (1 − 1/4)/(2·1/2) and
        // (4 − 1)/(2·1·2) both equal 3/4, so d = ln 2 exactly.
        assert_relative_eq!(
            cert.origin_distance(letter_to_id(1)),
            std::f64::consts::LN_2,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            cert.origin_distance(letter_to_id(-1)),
            std::f64::consts::LN_2,
            max_relative = 1e-13
        );
        assert!(cert.additive_constant >= 2.0 * std::f64::consts::LN_2);
        // All forward depths are defined and at least delta_min.
        let n = group.alphabet_size();
        let mut found_min = f64::INFINITY;
        for x in 0..n {
            for y in 0..n {
                if y == inverse_id(x) {
                    continue;
                }
                let d = cert.depth(x, y);
                assert!(d.is_finite() && d >= cert.delta_min - 1e-12);
                found_min = found_min.min(d);
            }
        }
        assert_relative_eq!(found_min, cert.delta_min, max_relative = 1e-14);
        // x·origin sits strictly inside every H_x here.
        for x in 0..n {
            assert!(cert.origin_depth(x) > 0.0);
        }
    }

    #[test]
    fn alternate_fixtures_pass_ping_pong() {
        let wide = test_groups::wide_surface();
        let cert = wide.validate_ping_pong().unwrap();
        assert!(cert.kappa > 0.0 && cert.kappa < 1.0);

        let three = test_groups::twisted_threespace();
        let cert3 = three.validate_ping_pong().unwrap();
        assert!(cert3.kappa > 0.0 && cert3.kappa < 1.0);
        let cl = three.letter_transform(0).translation_length().unwrap();
        assert_relative_eq!(cl.ell, 4.0, epsilon = 1e-12);
        assert_relative_eq!(cl.theta, 0.6, epsilon = 1e-12);
        let clb = three.letter_transform(2).translation_length().unwrap();
        assert_relative_eq!(clb.ell, 4.0, epsilon = 1e-12);
        assert_relative_eq!(clb.theta, 0.45, epsilon = 1e-12);
    }

    #[test]
    fn certificate_cutoff_grows_linearly_in_word_length() {
        let cert = reference_surface().validate_ping_pong().unwrap();
        let t8 = cert.t_certified(8);
        let t9 = cert.t_certified(9);
        assert_relative_eq!(t9 - t8, cert.delta_min, max_relative = 1e-12);
        let l = cert.required_word_length(t9);
        assert!(l <= 9);
        assert!(cert.t_certified(l) >= t9 - 1e-9);
        assert_eq!(cert.required_word_length(-cert.additive_constant - 1.0), 0);
    }

    #[test]
    fn overlapping_disks_are_rejected() {
        let group = reference_surface();
        let e2 = 2.0_f64.exp();
        let a = MoebiusTransform::from_real(e2, 0.0, 0.0, 1.0 / e2).unwrap();
        let (ch, sh) = (2.0_f64.cosh(), 2.0_f64.sinh());
        let b = MoebiusTransform::from_real(ch, sh, sh, ch).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        // Inflate the b-disks until they collide at the origin-side gap.
        let fat = SchottkyGroup::new(
            group.dim(),
            vec![a, b],
            vec![
                (1, BoundaryDisk::exterior_of(c(0.0), 2.0).unwrap()),
                (-1, BoundaryDisk::from_center_radius(c(0.0), 0.5).unwrap()),
                (2, BoundaryDisk::from_center_radius(c(1.04), 1.2).unwrap()),
                (-2, BoundaryDisk::from_center_radius(c(-1.04), 1.2).unwrap()),
            ],
        )
        .unwrap();
        assert!(matches!(fat.validate_ping_pong(), Err(SchottkyError::DegenerateDisks(_))));
    }

    #[test]
    fn failed_mapping_property_is_reported() {
        let group = reference_surface();
        let e2 = 2.0_f64.exp();
        let a = MoebiusTransform::from_real(e2, 0.0, 0.0, 1.0 / e2).unwrap();
        let (ch, sh) = (2.0_f64.cosh(), 2.0_f64.sinh());
        let b = MoebiusTransform::from_real(ch, sh, sh, ch).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        // a maps {|z| ≥ 1/2} onto {|z| ≥ e⁴/2 ≈ 27.3}; demanding the image
        // land inside {|z| ≥ 50} must fail.
        let bad = SchottkyGroup::new(
            group.dim(),
            vec![a, b],
            vec![
                (1, BoundaryDisk::exterior_of(c(0.0), 50.0).unwrap()),
                (-1, BoundaryDisk::from_center_radius(c(0.0), 0.5).unwrap()),
                (2, BoundaryDisk::from_center_radius(c(1.0373), 0.3257).unwrap()),
                (-2, BoundaryDisk::from_center_radius(c(-1.0373), 0.3257).unwrap()),
            ],
        )
        .unwrap();
        assert!(matches!(bad.validate_ping_pong(), Err(SchottkyError::PingPongViolation(_))));
    }

    #[test]
    fn rank_one_is_rejected() {
        let e2 = 2.0_f64.exp();
        let a = MoebiusTransform::from_real(e2, 0.0, 0.0, 1.0 / e2).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        let err = SchottkyGroup::new(
            ModelDim::Two,
            vec![a],
            vec![
                (1, BoundaryDisk::exterior_of(c(0.0), 2.0).unwrap()),
                (-1, BoundaryDisk::from_center_radius(c(0.0), 0.5).unwrap()),
            ],
        );
        assert!(matches!(err, Err(SchottkyError::RankTooSmall(1))));
    }

    #[test]
    fn json_round_trip_preserves_digest_and_geometry() {
        let group = reference_surface();
        let text = group.to_json_string();
        let back = SchottkyGroup::from_json_str(&text).unwrap();
        assert_eq!(group.digest(), back.digest());
        assert_eq!(back.rank(), 2);
        let cert_a = group.validate_ping_pong().unwrap();
        let cert_b = back.validate_ping_pong().unwrap();
        assert_relative_eq!(cert_a.delta_min, cert_b.delta_min, max_relative = 1e-12);
    }

    #[test]
    fn json_accepts_real_centers_and_exterior_flag() {
        let text = r#"{
            "model_dim": 2,
            "generators": [
                [[7.38905609893065, 0], [0, 0], [0, 0], [0.1353352832366127, 0]],
                [[3.7621956910836314, 0], [3.626860407847019, 0], [3.626860407847019, 0], [3.7621956910836314, 0]]
            ],
            "disks": [
                {"letter": "a", "center": 0.0, "radius": 2.0, "exterior": true},
                {"letter": "A", "center": 0.0, "radius": 0.5},
                {"letter": "b", "center": 1.0373147207275482, "radius": 0.3257205647717832},
                {"letter": "B", "center": -1.0373147207275482, "radius": 0.3257205647717832}
            ]
        }"#;
        let group = SchottkyGroup::from_json_str(text).unwrap();
        assert_eq!(group.dim(), ModelDim::Two);
        group.validate_ping_pong().unwrap();
        // Same group as the inline constructor: digests agree.
        assert_eq!(group.digest(), reference_surface().digest());
    }

    #[test]
    fn digest_separates_distinct_generators() {
        let g1 = reference_surface();
        let e2 = 2.0_f64.exp() + 1e-10;
        let a = MoebiusTransform::from_real(e2, 0.0, 0.0, 1.0 / e2).unwrap();
        let (ch, sh) = (2.0_f64.cosh(), 2.0_f64.sinh());
        let b = MoebiusTransform::from_real(ch, sh, sh, ch).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        let g2 = SchottkyGroup::new(
            ModelDim::Two,
            vec![a, b],
            vec![
                (1, BoundaryDisk::exterior_of(c(0.0), 2.0).unwrap()),
                (-1, BoundaryDisk::from_center_radius(c(0.0), 0.5).unwrap()),
                (2, BoundaryDisk::from_center_radius(c(1.0373), 0.3257).unwrap()),
                (-2, BoundaryDisk::from_center_radius(c(-1.0373), 0.3257).unwrap()),
            ],
        )
        .unwrap();
        assert_ne!(g1.digest(), g2.digest());
    }

    #[test]
    fn word_transform_composes_letters() {
        let group = reference_surface();
        let w: Word = "ab".parse().unwrap();
        let m = group.word_transform(&w);
        let expect = group
            .letter_transform(letter_to_id(1))
            .compose(group.letter_transform(letter_to_id(2)));
        let t1 = m.translation_length().unwrap();
        let t2 = expect.translation_length().unwrap();
        assert_relative_eq!(t1.ell, t2.ell, max_relative = 1e-14);
        // tr(ab) = 2 cosh(2) cosh(2) ⇒ ℓ = 2 arccosh(cosh²2).
        let want = 2.0 * (2.0_f64.cosh() * 2.0_f64.cosh()).acosh();
        assert_relative_eq!(t1.ell, want, max_relative = 1e-13);
        let aa = group.word_transform(&"aA".parse::<Word>().unwrap());
        assert_abs_diff_eq!(aa.displacement(), 0.0, epsilon = 1e-12);
    }
}
