//! Thermodynamic-formalism estimators: weighted orbital sums, topological
//! entropy, pressure, and the critical exponent of the Poincaré series.

pub mod expr;
pub mod quadrature;

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::fit::{linear_fit, pairwise_sum, FitError};
use crate::moebius::{MoebiusError, ModelDim};
use crate::schottky::{
    orbit_displacements, ClosedGeodesic, EnumerationError, LengthSpectrum, ResourceLimits,
    SchottkyGroup,
};
use expr::{parse_potential, Expr, ExprError};
use quadrature::{integrate, QuadratureError};

#[derive(Debug, Error)]
pub enum ThermoError {
    #[error("length spectrum is not certified complete; rerun enumeration or force the override")]
    NotCertified,
    #[error("need at least {need} {what}, got {got}")]
    InsufficientData { what: &'static str, need: usize, got: usize },
    #[error("potential needs half-plane coordinates, unavailable for this model: {0}")]
    ModelUnsupported(String),
    #[error("bad potential {0:?}: expected const:<value>, sbr:<coefficient>, or expr:<formula>")]
    BadPotentialSpec(String),
    #[error("curvature pinching must satisfy 0 < a <= b, got a = {a}, b = {b}")]
    BadPinching { a: f64, b: f64 },
    #[error("weight table has {weights} rows but the spectrum has {spectrum}")]
    WeightMismatch { spectrum: usize, weights: usize },
    #[error("estimator produced a non-positive growth rate {0}")]
    NonPositiveEstimate(f64),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A weighting of closed geodesics. `Constant(c)` integrates the constant
/// function: U(γ) = c·ℓ(γ). `Sbr{c}` scales the unstable Jacobian weight of
/// the constant-curvature model: U(γ) = c·n·ℓ(γ) with n the boundary
/// dimension. `Expression` integrates a pointwise potential along the
/// geodesic.
#[derive(Clone, Debug)]
pub enum PotentialSpec {
    Constant(f64),
    Sbr { coefficient: f64 },
    Expression(Expr),
}

impl FromStr for PotentialSpec {
    type Err = ThermoError;

    fn from_str(s: &str) -> Result<Self, ThermoError> {
        let Some((kind, rest)) = s.split_once(':') else {
            return Err(ThermoError::BadPotentialSpec(s.to_string()));
        };
        match kind {
            "const" => rest
                .trim()
                .parse::<f64>()
                .map(PotentialSpec::Constant)
                .map_err(|_| ThermoError::BadPotentialSpec(s.to_string())),
            "sbr" => rest
                .trim()
                .parse::<f64>()
                .map(|coefficient| PotentialSpec::Sbr { coefficient })
                .map_err(|_| ThermoError::BadPotentialSpec(s.to_string())),
            "expr" => Ok(PotentialSpec::Expression(parse_potential(rest)?)),
            _ => Err(ThermoError::BadPotentialSpec(s.to_string())),
        }
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Constant(c) => write!(f, "const:{c}"),
            PotentialSpec::Sbr { coefficient } => write!(f, "sbr:{coefficient}"),
            PotentialSpec::Expression(e) => write!(f, "expr:{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureSettings {
    pub nodes_per_unit: usize,
    pub rel_tol: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { nodes_per_unit: 32, rel_tol: 1e-8 }
    }
}

/// Integral of the potential over one traversal of the closed geodesic.
///
/// Powers are exact by construction: the primitive root is integrated once
/// and multiplied by k, so U(γ^k) = k·U(γ) holds to the last bit.
pub fn weight(
    group: &SchottkyGroup,
    geodesic: &ClosedGeodesic,
    potential: &PotentialSpec,
    quad: &QuadratureSettings,
) -> Result<f64, ThermoError> {
    match potential {
        PotentialSpec::Constant(c) => Ok(c * geodesic.length),
        PotentialSpec::Sbr { coefficient } => {
            let n = group.dim().boundary_dim() as f64;
            Ok(coefficient * n * geodesic.length)
        }
        PotentialSpec::Expression(e) => {
            if group.dim() != ModelDim::Two {
                return Err(ThermoError::ModelUnsupported(e.source().to_string()));
            }
            let axis = group.word_transform(&geodesic.primitive_word).axis()?;
            let f = |t: f64| {
                let p = axis.point(t);
                e.eval(p.z.re, p.height)
            };
            let per_period = integrate(f, 0.0, geodesic.ell_p, quad.nodes_per_unit, quad.rel_tol)?;
            Ok(geodesic.k as f64 * per_period)
        }
    }
}

/// Weights for every entry of a spectrum, kept in spectrum order.
#[derive(Clone, Debug)]
pub struct WeightTable {
    values: Vec<f64>,
}

impl WeightTable {
    pub fn compute(
        group: &SchottkyGroup,
        spectrum: &LengthSpectrum,
        potential: &PotentialSpec,
        quad: &QuadratureSettings,
    ) -> Result<WeightTable, ThermoError> {
        let values = spectrum
            .entries()
            .iter()
            .map(|e| weight(group, e, potential, quad))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WeightTable { values })
    }

    pub fn zero(spectrum: &LengthSpectrum) -> WeightTable {
        WeightTable { values: vec![0.0; spectrum.len()] }
    }

    /// Wrap externally computed per-entry weights (kept in spectrum order).
    pub fn from_values(values: Vec<f64>) -> WeightTable {
        WeightTable { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn save(&self, spectrum: &LengthSpectrum, path: &Path) -> Result<(), ThermoError> {
        check_weights(spectrum, self)?;
        let mut out = String::from("canonical_word,U\n");
        for (e, u) in spectrum.entries().iter().zip(&self.values) {
            out.push_str(&format!("{},{:.16e}\n", e.canonical_word, u));
        }
        let mut f = fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        Ok(())
    }
}

fn check_weights(spectrum: &LengthSpectrum, weights: &WeightTable) -> Result<(), ThermoError> {
    if spectrum.len() != weights.len() {
        return Err(ThermoError::WeightMismatch {
            spectrum: spectrum.len(),
            weights: weights.len(),
        });
    }
    Ok(())
}

/// Partial Poincaré series Σ exp(−s·d(o, γo)) over all group elements with
/// displacement ≤ radius, identity included.
#[derive(Clone, Copy, Debug)]
pub struct PoincareSum {
    pub value: f64,
    pub terms: u64,
}

pub fn poincare_series_partial(
    group: &SchottkyGroup,
    s: f64,
    radius: f64,
    limits: &ResourceLimits,
) -> Result<PoincareSum, ThermoError> {
    let displacements = orbit_displacements(group, radius, limits)?;
    let terms: Vec<f64> = displacements.iter().map(|&d| (-s * d).exp()).collect();
    Ok(PoincareSum { value: pairwise_sum(&terms), terms: displacements.len() as u64 })
}

#[derive(Clone, Debug)]
pub struct CriticalExponentEstimate {
    pub value: f64,
    /// max(|regression − endpoint ratio|, regression standard error).
    pub uncertainty: f64,
    pub ratio_check: f64,
    /// The (radius, orbit count) pairs the fit ran on.
    pub counts: Vec<(f64, u64)>,
}

/// Exponential growth rate of the orbit counting function, fitted over the
/// outer half of a 12-point radius grid.
pub fn critical_exponent(
    group: &SchottkyGroup,
    radius: f64,
    limits: &ResourceLimits,
) -> Result<CriticalExponentEstimate, ThermoError> {
    let displacements = orbit_displacements(group, radius, limits)?;
    let n_radii = 12;
    let radii: Vec<f64> =
        (1..=n_radii).map(|i| radius * i as f64 / n_radii as f64).collect();
    let counts: Vec<u64> = radii
        .iter()
        .map(|&r| displacements.partition_point(|&d| d <= r) as u64)
        .collect();
    let counts_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (value, uncertainty, ratio_check) = fit_growth_rate(&radii, &counts_f)?;
    Ok(CriticalExponentEstimate {
        value,
        uncertainty,
        ratio_check,
        counts: radii.into_iter().zip(counts).collect(),
    })
}

/// Slope of log(count) against radius over the last half of the grid, with
/// an endpoint-ratio cross-check. Counts must follow raw exponential
/// growth; no logarithmic correction is applied here.
pub fn fit_growth_rate(radii: &[f64], counts: &[f64]) -> Result<(f64, f64, f64), ThermoError> {
    if radii.len() < 6 || radii.len() != counts.len() {
        return Err(ThermoError::InsufficientData {
            what: "orbit-count radii",
            need: 6,
            got: radii.len().min(counts.len()),
        });
    }
    let start = radii.len() / 2;
    let xs = &radii[start..];
    if counts[start..].iter().any(|&c| c <= 0.0) {
        return Err(ThermoError::InsufficientData {
            what: "nonzero orbit counts in the fit window",
            need: xs.len(),
            got: counts[start..].iter().filter(|&&c| c > 0.0).count(),
        });
    }
    let ys: Vec<f64> = counts[start..].iter().map(|c| c.ln()).collect();
    let fit = linear_fit(xs, &ys)?;
    let ratio = (ys[ys.len() - 1] - ys[0]) / (xs[xs.len() - 1] - xs[0]);
    if fit.slope <= 0.0 {
        return Err(ThermoError::NonPositiveEstimate(fit.slope));
    }
    Ok((fit.slope, (fit.slope - ratio).abs().max(fit.slope_se), ratio))
}

#[derive(Clone, Copy, Debug)]
pub struct EntropyEstimate {
    pub value: f64,
    pub uncertainty: f64,
    /// Number of grid points the regression used.
    pub points_used: usize,
    /// Length window [lo, hi] the fit ran over.
    pub window: (f64, f64),
}

const ENTROPY_ANCHORS: usize = 12;

/// Exponential growth rate h of the geodesic counting function N(T).
///
/// Fits log(T·N(T)) against T over the upper half of the length window:
/// N grows like e^{hT}/(hT), so the T factor removes the leading polynomial
/// correction and the slope estimates h directly. The fit runs on a fixed
/// grid of evenly spaced abscissae rather than on the raw length values —
/// lengths cluster around trace-identity values, and a fit weighted by the
/// clusters inherits their spacing noise, while the grid averages over it.
pub fn entropy(
    spectrum: &LengthSpectrum,
    allow_uncertified: bool,
) -> Result<EntropyEstimate, ThermoError> {
    if !spectrum.certified && !allow_uncertified {
        return Err(ThermoError::NotCertified);
    }
    let lengths: Vec<f64> = spectrum.entries().iter().map(|e| e.length).collect();
    let mut distinct = 0usize;
    let mut last = f64::NEG_INFINITY;
    for &l in &lengths {
        if l - last > 1e-9 {
            distinct += 1;
            last = l;
        }
    }
    if distinct < 20 {
        return Err(ThermoError::InsufficientData {
            what: "distinct geodesic lengths",
            need: 20,
            got: distinct,
        });
    }
    let t_lo = lengths[0];
    let t_hi = *lengths.last().expect("nonempty after distinct check");
    let mid = 0.5 * (t_lo + t_hi);
    let mut xs = Vec::with_capacity(ENTROPY_ANCHORS);
    let mut ys = Vec::with_capacity(ENTROPY_ANCHORS);
    for i in 1..=ENTROPY_ANCHORS {
        let t = mid + (t_hi - mid) * i as f64 / ENTROPY_ANCHORS as f64;
        // Inclusive count; every anchor sits above t_lo, so n >= 1.
        let n = lengths.partition_point(|&l| l <= t + 1e-12);
        xs.push(t);
        ys.push((t * n as f64).ln());
    }
    let fit = linear_fit(&xs, &ys)?;
    let ratio = (ys[ys.len() - 1] - ys[0]) / (xs[xs.len() - 1] - xs[0]);
    if fit.slope <= 0.0 {
        return Err(ThermoError::NonPositiveEstimate(fit.slope));
    }
    Ok(EntropyEstimate {
        value: fit.slope,
        uncertainty: (fit.slope - ratio).abs().max(fit.slope_se),
        points_used: xs.len(),
        window: (xs[0], xs[xs.len() - 1]),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct PressureEstimate {
    pub value: f64,
    pub uncertainty: f64,
    /// Set when the weighted shell sums decay: the cumulative weighted sum
    /// saturates in this window, so only shell differences carry signal.
    pub negative_window: bool,
    pub shells: usize,
}

const PRESSURE_SHELLS: usize = 8;

/// Topological pressure ℘(U) from weighted orbital sums.
///
/// Shell sums over the upper half of the length window: S_j = Σ exp(U(γ))
/// for ℓ(γ) in shell j. These behave like w·e^{℘T̄}/T̄, so the slope of
/// log(T̄_j·S_j) estimates ℘ for positive and negative pressure alike —
/// unlike cumulative sums, which saturate when ℘ < 0.
pub fn pressure(
    spectrum: &LengthSpectrum,
    weights: &WeightTable,
    allow_uncertified: bool,
) -> Result<PressureEstimate, ThermoError> {
    if !spectrum.certified && !allow_uncertified {
        return Err(ThermoError::NotCertified);
    }
    check_weights(spectrum, weights)?;
    let entries = spectrum.entries();
    if entries.is_empty() {
        return Err(ThermoError::InsufficientData {
            what: "geodesics",
            need: 1,
            got: 0,
        });
    }
    let t_lo = entries[0].length;
    let t_hi = spectrum.cutoff;
    let mid = 0.5 * (t_lo + t_hi);
    let width = (t_hi - mid) / PRESSURE_SHELLS as f64;
    if !(width > 0.0) {
        return Err(ThermoError::InsufficientData {
            what: "length-window shells",
            need: PRESSURE_SHELLS,
            got: 0,
        });
    }
    let mut shell_terms: Vec<Vec<f64>> = vec![Vec::new(); PRESSURE_SHELLS];
    let mut shell_moments: Vec<Vec<f64>> = vec![Vec::new(); PRESSURE_SHELLS];
    for (e, &u) in entries.iter().zip(weights.values()) {
        if e.length <= mid {
            continue;
        }
        let j = (((e.length - mid) / width) as usize).min(PRESSURE_SHELLS - 1);
        shell_terms[j].push(u.exp());
        shell_moments[j].push(e.length * u.exp());
    }
    let nonempty = shell_terms.iter().filter(|s| !s.is_empty()).count();
    if nonempty < PRESSURE_SHELLS {
        return Err(ThermoError::InsufficientData {
            what: "nonempty pressure shells",
            need: PRESSURE_SHELLS,
            got: nonempty,
        });
    }
    // Abscissa of a shell: the weight-centroid length rather than the
    // midpoint. Steep potentials concentrate the shell's mass away from
    // the center, and the centroid removes that first-order bias.
    let sums: Vec<f64> = shell_terms.iter().map(|t| pairwise_sum(t)).collect();
    let xs: Vec<f64> = shell_moments
        .iter()
        .zip(&sums)
        .map(|(m, &s)| pairwise_sum(m) / s)
        .collect();
    let ys: Vec<f64> =
        sums.iter().zip(&xs).map(|(&s, &t)| (t * s).ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    let ratio = (ys[ys.len() - 1] - ys[0]) / (xs[xs.len() - 1] - xs[0]);
    Ok(PressureEstimate {
        value: fit.slope,
        uncertainty: (fit.slope - ratio).abs().max(fit.slope_se),
        negative_window: fit.slope < 0.0,
        shells: PRESSURE_SHELLS,
    })
}

/// Pressure window for the Sinai–Ruelle–Bowen potential −(1/2)·log J^u on
/// an (n+1)-manifold with sectional curvature pinched in [−b², −a²]:
/// ℘ lies in [h − n·b/2, h − n·a/2].
pub fn sbr_pressure_bounds(
    entropy: f64,
    a: f64,
    b: f64,
    n: u32,
) -> Result<(f64, f64), ThermoError> {
    if !(a > 0.0 && a <= b) {
        return Err(ThermoError::BadPinching { a, b });
    }
    Ok((entropy - n as f64 * b / 2.0, entropy - n as f64 * a / 2.0))
}
