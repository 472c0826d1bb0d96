//! Certified depth-first enumeration of closed geodesics and of orbit
//! points of the basepoint.
//!
//! Both walks run over the tree of freely reduced words with incremental
//! prefix matrices. Pruning uses the separation depths from the ping-pong
//! certificate: the translation length of a cyclically reduced word
//! dominates the sum of depths over adjacent letter pairs, and the
//! basepoint displacement dominates the entry distance plus that sum, so a
//! prefix whose depth budget is already spent cannot have admissible
//! completions.

use thiserror::Error;

use super::group::{
    id_to_letter, inverse_id, CompletenessCertificate, LetterId, SchottkyError, SchottkyGroup,
};
use super::spectrum::{ClosedGeodesic, EnumerationStats, LengthSpectrum};
use super::word::Word;
use crate::moebius::{wrap_angle, MoebiusError, MoebiusTransform};

/// Slack added to pruning thresholds so rounding in the depth sums can
/// never hide an admissible word. Certified lower bounds understate true
/// lengths by far more than this.
const PRUNE_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct ResourceLimits {
    /// Hard cap on word length; enumeration deeper than this is refused
    /// and the result is marked uncertified.
    pub max_word_length: u32,
    /// Hard cap on reduced words visited.
    pub max_words: u64,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits { max_word_length: 64, max_words: 50_000_000 }
    }
}

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error(transparent)]
    Group(#[from] SchottkyError),
    #[error("word budget exhausted after {visited} words; partial spectrum kept (certified = false)")]
    ResourceExceeded { visited: u64, partial: Box<LengthSpectrum> },
    #[error("orbit walk hit {limit} before exhausting radius {radius}")]
    OrbitResourceExceeded { limit: String, radius: f64 },
}

/// Enumerate every closed geodesic of length ≤ `cutoff`, one entry per
/// conjugacy class.
///
/// The result is certified complete when the certificate's required word
/// length for `cutoff` fits inside `limits`; otherwise the (still correct,
/// possibly incomplete) spectrum is returned with `certified = false`.
pub fn enumerate_spectrum(
    group: &SchottkyGroup,
    cutoff: f64,
    limits: &ResourceLimits,
) -> Result<LengthSpectrum, EnumerationError> {
    enumerate_impl(group, cutoff, limits, None)
}

/// Test hook: force the search depth instead of deriving it from the
/// certificate.
#[cfg(test)]
pub(crate) fn enumerate_to_depth(
    group: &SchottkyGroup,
    cutoff: f64,
    depth: u32,
) -> Result<LengthSpectrum, EnumerationError> {
    enumerate_impl(group, cutoff, &ResourceLimits::default(), Some(depth))
}

fn enumerate_impl(
    group: &SchottkyGroup,
    cutoff: f64,
    limits: &ResourceLimits,
    depth_override: Option<u32>,
) -> Result<LengthSpectrum, EnumerationError> {
    let cert = group.validate_ping_pong()?;
    let required = cert.required_word_length(cutoff);
    let depth_limit = depth_override.unwrap_or_else(|| required.min(limits.max_word_length));
    let mut dfs = SpectrumDfs {
        group,
        cert: &cert,
        cutoff,
        depth_limit,
        max_words: limits.max_words,
        words_visited: 0,
        per_level: vec![0; depth_limit as usize],
        ids: Vec::new(),
        letters: Vec::new(),
        matrices: Vec::new(),
        depth_sums: Vec::new(),
        out: Vec::new(),
        aborted: false,
    };
    if depth_limit >= 1 {
        for id in 0..group.alphabet_size() {
            dfs.extend(id).map_err(SchottkyError::from)?;
            if dfs.aborted {
                break;
            }
        }
    }

    let stats = EnumerationStats {
        words_visited: dfs.words_visited,
        max_word_length: depth_limit,
        per_level_visits: dfs.per_level,
        kappa: cert.kappa,
        additive_constant: cert.additive_constant,
        t_certified: cert.t_certified(depth_limit),
    };
    let certified = required <= depth_limit && !dfs.aborted;
    let spectrum = LengthSpectrum::from_parts(
        dfs.out,
        cutoff,
        certified,
        group.digest().to_string(),
        group.dim(),
        stats,
    );
    if dfs.aborted {
        return Err(EnumerationError::ResourceExceeded {
            visited: dfs.words_visited,
            partial: Box::new(spectrum),
        });
    }
    Ok(spectrum)
}

struct SpectrumDfs<'g> {
    group: &'g SchottkyGroup,
    cert: &'g CompletenessCertificate,
    cutoff: f64,
    depth_limit: u32,
    max_words: u64,
    words_visited: u64,
    per_level: Vec<u64>,
    ids: Vec<LetterId>,
    letters: Vec<i32>,
    matrices: Vec<MoebiusTransform>,
    depth_sums: Vec<f64>,
    out: Vec<ClosedGeodesic>,
    aborted: bool,
}

impl SpectrumDfs<'_> {
    /// Append one letter (already known not to cancel), visit the extended
    /// word, and backtrack. Prunes when the adjacent-pair depth sum alone
    /// exceeds the cutoff: that sum only grows along completions and lower
    /// bounds every cyclically reduced length below it.
    fn extend(&mut self, id: LetterId) -> Result<(), MoebiusError> {
        let depth = self.ids.len();
        let depth_sum = if depth == 0 {
            0.0
        } else {
            let last = self.ids[depth - 1];
            debug_assert_ne!(id, inverse_id(last), "DFS produced a cancelling pair");
            self.depth_sums[depth - 1] + self.cert.depth(last, id)
        };
        if depth_sum > self.cutoff + PRUNE_SLACK {
            return Ok(());
        }
        let matrix = if depth == 0 {
            self.group.letter_transform(id).clone()
        } else {
            self.matrices[depth - 1].compose(self.group.letter_transform(id))
        };
        self.ids.push(id);
        self.letters.push(id_to_letter(id));
        self.matrices.push(matrix);
        self.depth_sums.push(depth_sum);
        self.visit()?;
        self.ids.pop();
        self.letters.pop();
        self.matrices.pop();
        self.depth_sums.pop();
        Ok(())
    }

    fn visit(&mut self) -> Result<(), MoebiusError> {
        let depth = self.ids.len();
        self.words_visited += 1;
        self.per_level[depth - 1] += 1;
        if self.words_visited > self.max_words {
            self.aborted = true;
            return Ok(());
        }

        // Emit one entry per conjugacy class: exactly at its canonical
        // representative, which this walk reaches like any other reduced
        // word.
        let word = Word::from_reduced(self.letters.clone());
        if word.is_canonical() {
            let (primitive_word, k) = word
                .primitive_root()
                .expect("canonical words are nonempty");
            // The primitive root is the length-p prefix, so its matrix is
            // already on the prefix stack. Deriving ℓ from the primitive
            // matrix keeps powers exact: ℓ = k·ℓ_p.
            let p = primitive_word.len();
            let prim = self.matrices[p - 1].translation_length()?;
            let length = k as f64 * prim.ell;
            if length <= self.cutoff {
                let theta = wrap_angle(k as f64 * prim.theta);
                self.out.push(ClosedGeodesic {
                    canonical_word: word,
                    primitive_word,
                    k,
                    length,
                    ell_p: prim.ell,
                    theta,
                    trace: self.matrices[depth - 1].trace(),
                });
            }
        }

        if (depth as u32) < self.depth_limit {
            let last = self.ids[depth - 1];
            for id in 0..self.group.alphabet_size() {
                if id == inverse_id(last) {
                    continue;
                }
                self.extend(id)?;
                if self.aborted {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Hyperbolic distances d(o, γ·o) for every group element γ (identity
/// included) with displacement ≤ `radius`, sorted ascending.
pub fn orbit_displacements(
    group: &SchottkyGroup,
    radius: f64,
    limits: &ResourceLimits,
) -> Result<Vec<f64>, EnumerationError> {
    let cert = group.validate_ping_pong()?;
    let mut dfs = OrbitDfs {
        group,
        cert: &cert,
        radius,
        // min over letters of the final-letter depth credit; ≤ 0 so it can
        // only loosen the bound.
        floor: cert.min_final_depth(),
        depth_limit: limits.max_word_length,
        max_words: limits.max_words,
        words_visited: 0,
        ids: Vec::new(),
        matrices: Vec::new(),
        bound_sums: Vec::new(),
        out: Vec::new(),
        truncated: false,
        budget_hit: false,
    };
    if 0.0 <= radius {
        dfs.out.push(0.0);
    }
    for id in 0..group.alphabet_size() {
        dfs.extend(id);
        if dfs.budget_hit {
            break;
        }
    }
    if dfs.budget_hit {
        return Err(EnumerationError::OrbitResourceExceeded {
            limit: format!("word budget {}", limits.max_words),
            radius,
        });
    }
    if dfs.truncated {
        return Err(EnumerationError::OrbitResourceExceeded {
            limit: format!("word length cap {}", limits.max_word_length),
            radius,
        });
    }
    dfs.out.sort_by(f64::total_cmp);
    Ok(dfs.out)
}

struct OrbitDfs<'g> {
    group: &'g SchottkyGroup,
    cert: &'g CompletenessCertificate,
    radius: f64,
    floor: f64,
    depth_limit: u32,
    max_words: u64,
    words_visited: u64,
    ids: Vec<LetterId>,
    matrices: Vec<MoebiusTransform>,
    /// bound_sums[i] = entry distance of the first letter plus the
    /// adjacent-pair depth sum; adding `floor` lower-bounds d(o, w·o) for
    /// this word and every descendant.
    bound_sums: Vec<f64>,
    out: Vec<f64>,
    truncated: bool,
    budget_hit: bool,
}

impl OrbitDfs<'_> {
    fn extend(&mut self, id: LetterId) {
        let depth = self.ids.len();
        let bound_sum = if depth == 0 {
            self.cert.origin_distance(id)
        } else {
            let last = self.ids[depth - 1];
            self.bound_sums[depth - 1] + self.cert.depth(last, id)
        };
        if bound_sum + self.floor > self.radius + PRUNE_SLACK {
            return;
        }
        if depth as u32 >= self.depth_limit {
            // A viable branch was cut: the result would silently miss
            // orbit points, so the caller gets an error instead.
            self.truncated = true;
            return;
        }
        let matrix = if depth == 0 {
            self.group.letter_transform(id).clone()
        } else {
            self.matrices[depth - 1].compose(self.group.letter_transform(id))
        };
        self.ids.push(id);
        self.matrices.push(matrix);
        self.bound_sums.push(bound_sum);
        self.visit();
        self.ids.pop();
        self.matrices.pop();
        self.bound_sums.pop();
    }

    fn visit(&mut self) {
        let depth = self.ids.len();
        self.words_visited += 1;
        if self.words_visited > self.max_words {
            self.budget_hit = true;
            return;
        }
        let d = self.matrices[depth - 1].displacement();
        if d <= self.radius {
            self.out.push(d);
        }
        let last = self.ids[depth - 1];
        for id in 0..self.group.alphabet_size() {
            if id == inverse_id(last) {
                continue;
            }
            self.extend(id);
            if self.budget_hit {
                return;
            }
        }
    }
}
