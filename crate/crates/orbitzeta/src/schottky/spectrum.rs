//! Length-spectrum containers, the versioned on-disk format, counting
//! functions, and the non-arithmeticity witness search.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use super::group::SchottkyGroup;
use super::word::{compare_letters, Word};
use crate::moebius::{ComplexLength, ModelDim};

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("spectrum file: {0}")]
    FormatError(String),
    #[error("spectrum was computed for digest {found}, group has digest {expected}")]
    DigestMismatch { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("grid value {0} exceeds the spectrum cutoff {1}")]
    CutoffExceeded(f64, f64),
    #[error("need at least {need} primitive geodesics, found {got}")]
    TooFewGeodesics { need: usize, got: usize },
}

/// One conjugacy class of closed geodesics: a canonical cyclically reduced
/// word, its primitive root, and the geometric data of the corresponding
/// matrix.
#[derive(Clone, Debug)]
pub struct ClosedGeodesic {
    pub canonical_word: Word,
    pub primitive_word: Word,
    /// canonical_word = primitive_word^k.
    pub k: u32,
    /// Total length k · ell_p.
    pub length: f64,
    /// Length of the primitive root.
    pub ell_p: f64,
    /// Holonomy angle of the full geodesic, wrapped to (−π, π].
    pub theta: f64,
    pub trace: Complex64,
}

impl ClosedGeodesic {
    pub fn complex_length(&self) -> ComplexLength {
        ComplexLength { ell: self.length, theta: self.theta }
    }

    pub fn is_primitive(&self) -> bool {
        self.k == 1
    }
}

/// Enumeration bookkeeping carried with a spectrum (and persisted).
#[derive(Clone, Debug)]
pub struct EnumerationStats {
    pub words_visited: u64,
    pub max_word_length: u32,
    /// Reduced words visited at each word length (index 0 = length 1).
    pub per_level_visits: Vec<u64>,
    /// Certificate summary under which the enumeration ran.
    pub kappa: f64,
    pub additive_constant: f64,
    pub t_certified: f64,
}

impl Default for EnumerationStats {
    fn default() -> Self {
        EnumerationStats {
            words_visited: 0,
            max_word_length: 0,
            per_level_visits: Vec::new(),
            kappa: f64::NAN,
            additive_constant: f64::NAN,
            t_certified: f64::NAN,
        }
    }
}

/// All closed geodesics of length ≤ cutoff (when certified), sorted by
/// (length, canonical word).
#[derive(Clone, Debug)]
pub struct LengthSpectrum {
    entries: Vec<ClosedGeodesic>,
    pub cutoff: f64,
    pub certified: bool,
    pub group_digest: String,
    pub model_dim: ModelDim,
    pub stats: EnumerationStats,
}

impl LengthSpectrum {
    pub(crate) fn from_parts(
        mut entries: Vec<ClosedGeodesic>,
        cutoff: f64,
        certified: bool,
        group_digest: String,
        model_dim: ModelDim,
        stats: EnumerationStats,
    ) -> Self {
        entries.sort_by(|a, b| {
            a.length
                .total_cmp(&b.length)
                .then_with(|| compare_letters(a.canonical_word.letters(), b.canonical_word.letters()))
        });
        LengthSpectrum { entries, cutoff, certified, group_digest, model_dim, stats }
    }

    pub fn entries(&self) -> &[ClosedGeodesic] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn primitive_entries(&self) -> impl Iterator<Item = &ClosedGeodesic> {
        self.entries.iter().filter(|e| e.is_primitive())
    }

    /// Number of length values distinct at the given tolerance.
    pub fn distinct_length_count(&self, tol: f64) -> usize {
        let mut count = 0;
        let mut last = f64::NEG_INFINITY;
        for e in &self.entries {
            if e.length - last > tol {
                count += 1;
                last = e.length;
            }
        }
        count
    }

    /// N(T) and N_p(T) on a grid of cutoff values.
    pub fn counting_function(&self, grid: &[f64]) -> Result<Vec<CountPoint>, SpectrumError> {
        for &t in grid {
            if t > self.cutoff + 1e-12 {
                return Err(SpectrumError::CutoffExceeded(t, self.cutoff));
            }
        }
        let lengths: Vec<f64> = self.entries.iter().map(|e| e.length).collect();
        let prim_lengths: Vec<f64> =
            self.primitive_entries().map(|e| e.length).collect();
        Ok(grid
            .iter()
            .map(|&t| CountPoint {
                t,
                all: lengths.partition_point(|&l| l <= t) as u64,
                primitive: prim_lengths.partition_point(|&l| l <= t) as u64,
            })
            .collect())
    }

    /// Search primitive length pairs for a ratio that admits no
    /// small-denominator rational approximation at precision `tol`.
    ///
    /// A pair witnesses non-arithmeticity when the first continued-fraction
    /// convergent of the length ratio that reaches precision `tol` needs a
    /// denominator larger than tol^{−0.4}: a genuinely rational ratio p/q is
    /// approximated to every precision already at denominator q. Finite data
    /// can never prove arithmeticity, so the negative verdict is
    /// "inconclusive".
    pub fn non_arithmeticity_check(&self, tol: f64) -> Result<NonArithVerdict, SpectrumError> {
        let mut prim: Vec<&ClosedGeodesic> = self.primitive_entries().collect();
        if prim.len() < 2 {
            return Err(SpectrumError::TooFewGeodesics { need: 2, got: prim.len() });
        }
        prim.sort_by(|a, b| a.length.total_cmp(&b.length));
        // Scan distinct length values (shortest first: best relative
        // accuracy), capped to keep the pair scan bounded.
        let mut reps: Vec<&ClosedGeodesic> = Vec::new();
        for e in prim {
            if reps.last().map_or(true, |r| e.length - r.length > 1e-12) {
                reps.push(e);
            }
            if reps.len() >= 60 {
                break;
            }
        }
        if reps.len() < 2 {
            return Ok(NonArithVerdict::Inconclusive);
        }
        let q_threshold = tol.powf(-0.4);
        for i in 0..reps.len() {
            for j in (i + 1)..reps.len() {
                let ratio = reps[i].length / reps[j].length;
                if let Some(q) = first_convergent_denominator(ratio, tol) {
                    if q > q_threshold {
                        return Ok(NonArithVerdict::NonArithmeticWitness {
                            shorter: reps[i].canonical_word.clone(),
                            longer: reps[j].canonical_word.clone(),
                            ratio,
                            denominator: q,
                        });
                    }
                }
            }
        }
        Ok(NonArithVerdict::Inconclusive)
    }

    pub fn save(&self, path: &Path) -> Result<(), SpectrumError> {
        let mut out = String::new();
        out.push_str("#orbitzeta-spectrum v1\n");
        out.push_str(&format!("#group-digest {}\n", self.group_digest));
        out.push_str(&format!("#cutoff {:.16e}\n", self.cutoff));
        out.push_str(&format!("#certified {}\n", self.certified));
        out.push_str(&format!("#model-dim {}\n", self.model_dim.as_u8()));
        out.push_str(&format!("#kappa {:.16e}\n", self.stats.kappa));
        out.push_str(&format!("#cert-c {:.16e}\n", self.stats.additive_constant));
        out.push_str(&format!("#t-certified {:.16e}\n", self.stats.t_certified));
        out.push_str(&format!("#words-visited {}\n", self.stats.words_visited));
        out.push_str(&format!("#max-word-len {}\n", self.stats.max_word_length));
        let levels: Vec<String> =
            self.stats.per_level_visits.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("#level-visits {}\n", levels.join(",")));
        out.push_str("canonical_word,primitive_word,k,length,ell_p,theta,trace_re,trace_im\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                e.canonical_word, e.primitive_word, e.k, e.length, e.ell_p, e.theta, e.trace.re,
                e.trace.im
            ));
        }
        let mut f = fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Load a spectrum; when a group is supplied its digest must match.
    pub fn load(path: &Path, group: Option<&SchottkyGroup>) -> Result<Self, SpectrumError> {
        let text = fs::read_to_string(path)?;
        let spectrum = Self::parse(&text)?;
        if let Some(g) = group {
            if g.digest() != spectrum.group_digest {
                return Err(SpectrumError::DigestMismatch {
                    expected: g.digest().to_string(),
                    found: spectrum.group_digest,
                });
            }
        }
        Ok(spectrum)
    }

    fn parse(text: &str) -> Result<Self, SpectrumError> {
        let bad = |msg: &str| SpectrumError::FormatError(msg.to_string());
        let mut lines = text.lines().peekable();
        match lines.next() {
            Some("#orbitzeta-spectrum v1") => {}
            _ => return Err(bad("missing '#orbitzeta-spectrum v1' header")),
        }
        let mut digest = None;
        let mut cutoff = None;
        let mut certified = None;
        let mut model_dim = None;
        let mut stats = EnumerationStats::default();
        while let Some(line) = lines.peek() {
            let Some(rest) = line.strip_prefix('#') else { break };
            let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
            let value = value.trim();
            match key {
                "group-digest" => digest = Some(value.to_string()),
                "cutoff" => {
                    cutoff =
                        Some(value.parse::<f64>().map_err(|_| bad("unparsable #cutoff"))?)
                }
                "certified" => {
                    certified =
                        Some(value.parse::<bool>().map_err(|_| bad("unparsable #certified"))?)
                }
                "model-dim" => {
                    let v: u8 = value.parse().map_err(|_| bad("unparsable #model-dim"))?;
                    model_dim =
                        Some(ModelDim::from_u8(v).ok_or_else(|| bad("model-dim must be 2 or 3"))?);
                }
                "kappa" => stats.kappa = value.parse().map_err(|_| bad("unparsable #kappa"))?,
                "cert-c" => {
                    stats.additive_constant =
                        value.parse().map_err(|_| bad("unparsable #cert-c"))?
                }
                "t-certified" => {
                    stats.t_certified =
                        value.parse().map_err(|_| bad("unparsable #t-certified"))?
                }
                "words-visited" => {
                    stats.words_visited =
                        value.parse().map_err(|_| bad("unparsable #words-visited"))?
                }
                "max-word-len" => {
                    stats.max_word_length =
                        value.parse().map_err(|_| bad("unparsable #max-word-len"))?
                }
                "level-visits" => {
                    stats.per_level_visits = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|v| v.parse::<u64>())
                            .collect::<Result<_, _>>()
                            .map_err(|_| bad("unparsable #level-visits"))?
                    };
                }
                // Unknown extension headers are skipped for forward
                // compatibility.
                _ => {}
            }
            lines.next();
        }
        let group_digest = digest.ok_or_else(|| bad("missing #group-digest"))?;
        let cutoff = cutoff.ok_or_else(|| bad("missing #cutoff"))?;
        let certified = certified.ok_or_else(|| bad("missing #certified"))?;
        let model_dim = model_dim.ok_or_else(|| bad("missing #model-dim"))?;

        // Optional column-header line.
        if lines.peek().map_or(false, |l| l.starts_with("canonical_word")) {
            lines.next();
        }
        let mut entries = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 8 {
                return Err(bad(&format!("row {}: expected 8 fields, got {}", idx + 1, fields.len())));
            }
            let word = |s: &str| -> Result<Word, SpectrumError> {
                s.parse::<Word>().map_err(|e| bad(&format!("row {}: {e}", idx + 1)))
            };
            let num = |s: &str| -> Result<f64, SpectrumError> {
                s.parse::<f64>().map_err(|_| bad(&format!("row {}: bad number {s:?}", idx + 1)))
            };
            entries.push(ClosedGeodesic {
                canonical_word: word(fields[0])?,
                primitive_word: word(fields[1])?,
                k: fields[2]
                    .parse()
                    .map_err(|_| bad(&format!("row {}: bad power {:?}", idx + 1, fields[2])))?,
                length: num(fields[3])?,
                ell_p: num(fields[4])?,
                theta: num(fields[5])?,
                trace: Complex64::new(num(fields[6])?, num(fields[7])?),
            });
        }
        Ok(LengthSpectrum::from_parts(entries, cutoff, certified, group_digest, model_dim, stats))
    }
}

/// One evaluation of the counting functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountPoint {
    pub t: f64,
    /// N(T): all classes, including proper powers.
    pub all: u64,
    /// N_p(T): primitive classes only.
    pub primitive: u64,
}

#[derive(Clone, Debug)]
pub enum NonArithVerdict {
    NonArithmeticWitness { shorter: Word, longer: Word, ratio: f64, denominator: f64 },
    Inconclusive,
}

/// Denominator of the first continued-fraction convergent of x that lands
/// within `tol`; None if the expansion stalls before reaching it.
fn first_convergent_denominator(x: f64, tol: f64) -> Option<f64> {
    let mut value = x;
    let (mut p_prev, mut q_prev) = (1.0_f64, 0.0_f64);
    let (mut p, mut q) = (x.floor(), 1.0_f64);
    for _ in 0..64 {
        if (x - p / q).abs() <= tol {
            return Some(q);
        }
        let frac = value - value.floor();
        if frac.abs() < 1e-15 || q > 1e15 {
            return None;
        }
        value = 1.0 / frac;
        let a = value.floor();
        let (p_next, q_next) = (a * p + p_prev, a * q + q_prev);
        (p_prev, q_prev) = (p, q);
        (p, q) = (p_next, q_next);
    }
    None
}
