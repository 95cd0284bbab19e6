//! Squeezing of the hidden parameter `H2` under parametric amplification.
//!
//! `Var(H2) < |<H3>|` reduces to `Sq(kt, N_x, N_y) < 0` with
//! `Sq = 1 + 2 N_x N_y / (1 + N_x + N_y) - sinh 4kt`, whose root is the
//! onset time. This module evaluates the thermal weights that feed
//! `N_x`, `N_y`, the printed moment formulas as claims to be checked, and
//! kt sweeps under three readings of the initial state.

use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dpa::{heisenberg_moments, suggest_cutoff, MomentReport, Oracle, Propagator, LEAKAGE_MARGIN};
use crate::error::{Error, Result};
use crate::fock::{boundary_leakage, FockCutoff, QuantumState, C64, LEAKAGE_TOL};

/// Bracket used by [`onset_time_bisection`].
pub const ONSET_BRACKET: (f64, f64) = (0.0, 1.0);

/// Largest per-mode dimension picked automatically for oracle sweeps.
pub const MAX_AUTO_CUTOFF: usize = 48;

fn check_photon_number(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and non-negative, got {v}"
        )));
    }
    Ok(())
}

/// `n_bar^n / (1 + n_bar)^(1 + n)`, evaluated in log space.
pub fn thermal_weight(n_bar: f64, n: u64) -> Result<f64> {
    check_photon_number("mean photon number", n_bar)?;
    if n_bar == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let n = n as f64;
    Ok((n * n_bar.ln() - (1.0 + n) * n_bar.ln_1p()).exp())
}

/// Weights `p(0), p(1), ...` up to the first `n` whose remaining tail
/// `(n_bar / (1 + n_bar))^(n + 1)` is at most `tail`.
pub fn thermal_distribution(n_bar: f64, tail: f64) -> Result<Vec<f64>> {
    check_photon_number("mean photon number", n_bar)?;
    if !(tail > 0.0 && tail < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail tolerance must lie in (0, 1), got {tail}"
        )));
    }
    let ratio = n_bar / (1.0 + n_bar);
    let len = if ratio == 0.0 {
        1
    } else {
        (tail.ln() / ratio.ln()).ceil().max(1.0) as usize
    };
    (0..len as u64).map(|n| thermal_weight(n_bar, n)).collect()
}

/// `1 + 2 N_x N_y / (1 + N_x + N_y) - sinh 4kt`; negative means squeezed.
pub fn squeezing_function(kt: f64, n_x: f64, n_y: f64) -> f64 {
    1.0 + 2.0 * n_x * n_y / (1.0 + n_x + n_y) - (4.0 * kt).sinh()
}

/// `asinh(1 + 2 N_x N_y / (1 + N_x + N_y)) / 4`.
pub fn onset_time(n_x: f64, n_y: f64) -> Result<f64> {
    check_photon_number("N_x", n_x)?;
    check_photon_number("N_y", n_y)?;
    Ok((1.0 + 2.0 * n_x * n_y / (1.0 + n_x + n_y)).asinh() / 4.0)
}

/// Root of [`squeezing_function`] in kt on [`ONSET_BRACKET`], or `None`
/// when it does not change sign there.
pub fn onset_time_bisection(n_x: f64, n_y: f64, tol: f64) -> Option<f64> {
    let f = |kt| squeezing_function(kt, n_x, n_y);
    bisect(f, ONSET_BRACKET.0, ONSET_BRACKET.1, tol)
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return if f_lo == 0.0 { Some(lo) } else if f_hi == 0.0 { Some(hi) } else { None };
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Outcome of comparing a printed formula with the derived value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimVerdict {
    Matches,
    SignFlip,
    Mismatch,
}

impl ClaimVerdict {
    pub const THRESHOLD: f64 = 1e-6;

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Matches => "matches",
            Self::SignFlip => "sign_flip",
            Self::Mismatch => "mismatch",
        }
    }

    /// Verdict and symmetric relative deviation of `printed` from `derived`.
    pub fn judge(printed: f64, derived: f64) -> (Self, f64) {
        let deviation = relative_deviation(printed, derived);
        if deviation < Self::THRESHOLD {
            (Self::Matches, deviation)
        } else if relative_deviation(printed.abs(), derived.abs()) < Self::THRESHOLD {
            (Self::SignFlip, deviation)
        } else {
            (Self::Mismatch, deviation)
        }
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// One printed moment formula evaluated at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentClaim {
    pub equation: u32,
    pub quantity: String,
    pub printed: f64,
    /// Closed form for `|n_x, n_y>`, present when `N_x`, `N_y` are integers.
    pub derived: Option<f64>,
    pub oracle: Option<f64>,
    pub verdict: Option<ClaimVerdict>,
    pub deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperMomentClaims {
    pub n_x: f64,
    pub n_y: f64,
    pub kt: f64,
    pub claims: Vec<MomentClaim>,
}

const QUANTITIES: [&str; 8] = [
    "<H0>", "<H1>", "<H2>", "<H3>", "Var(H0)", "Var(H1)", "Var(H2)", "Var(H3)",
];

/// The printed right-hand sides, in the order `<H0>..<H3>`,
/// `Var(H0)..Var(H3)`.
pub fn printed_moments(n_x: f64, n_y: f64, kt: f64) -> [f64; 8] {
    let (c4, s4, c8) = ((4.0 * kt).cosh(), (4.0 * kt).sinh(), (8.0 * kt).cosh());
    let s2 = (2.0 * kt).sinh();
    let sum = n_x + n_y;
    let prod = n_x * n_y;
    [
        sum * c4 + 2.0 * s2 * s2,
        n_y - n_x,
        0.0,
        (1.0 + sum) * s4,
        s4 * s4 + 2.0 * c8 * prod - (1.0 - 2.0 * c4) * sum - c4 * c4 * sum * sum,
        n_y * (1.0 - n_y) + n_x * (1.0 - n_x),
        1.0 + sum + 2.0 * prod,
        c4 * c4 + c8 * (sum + 2.0 * prod) - s4 * s4 * sum * sum,
    ]
}

fn as_photon_number(v: f64) -> Option<usize> {
    (v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64).then_some(v as usize)
}

fn flatten(report: &MomentReport) -> [f64; 8] {
    let mut out = [0.0; 8];
    out[..4].copy_from_slice(&report.means);
    out[4..].copy_from_slice(&report.variances);
    out
}

/// Evaluates the printed formulas and, when `N_x`, `N_y` are non-negative
/// integers, judges each against the closed form for `|N_x, N_y>`.
pub fn paper_moment_claims(n_x: f64, n_y: f64, kt: f64) -> Result<PaperMomentClaims> {
    check_photon_number("N_x", n_x)?;
    check_photon_number("N_y", n_y)?;
    if !kt.is_finite() {
        return Err(Error::InvalidParameter(format!("kt must be finite, got {kt}")));
    }
    let printed = printed_moments(n_x, n_y, kt);
    let derived = match (as_photon_number(n_x), as_photon_number(n_y)) {
        (Some(a), Some(b)) => Some(flatten(&heisenberg_moments(a, b, kt))),
        _ => None,
    };
    let claims = (0..8)
        .map(|k| {
            let d = derived.map(|d| d[k]);
            let judged = d.map(|d| ClaimVerdict::judge(printed[k], d));
            MomentClaim {
                equation: 27 + k as u32,
                quantity: QUANTITIES[k].to_string(),
                printed: printed[k],
                derived: d,
                oracle: None,
                verdict: judged.map(|j| j.0),
                deviation: judged.map(|j| j.1),
            }
        })
        .collect();
    Ok(PaperMomentClaims {
        n_x,
        n_y,
        kt,
        claims,
    })
}

impl PaperMomentClaims {
    /// Fills the oracle column by brute-force evolution of `|N_x, N_y>`.
    pub fn with_oracle(mut self, cutoff: FockCutoff) -> Result<Self> {
        let (Some(a), Some(b)) = (as_photon_number(self.n_x), as_photon_number(self.n_y)) else {
            return Err(Error::InvalidParameter(
                "oracle column needs integer photon numbers".into(),
            ));
        };
        let state = QuantumState::fock(cutoff, a, b)?;
        let report = Oracle::new(cutoff).moments(&state, self.kt, LEAKAGE_TOL)?;
        if !report.valid {
            return Err(Error::TruncationInsufficient {
                leakage: report.leakage,
                tolerance: LEAKAGE_TOL,
            });
        }
        for (claim, v) in self.claims.iter_mut().zip(flatten(&report)) {
            claim.oracle = Some(v);
        }
        Ok(self)
    }

    pub fn claim(&self, equation: u32) -> Option<&MomentClaim> {
        self.claims.iter().find(|c| c.equation == equation)
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let mut out = String::from("equation,quantity,printed,derived,oracle,verdict,deviation\n");
        for c in &self.claims {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.equation,
                c.quantity,
                c.printed,
                opt(c.derived),
                opt(c.oracle),
                c.verdict.map(|v| v.tag()).unwrap_or(""),
                opt(c.deviation),
            );
        }
        out
    }
}

/// Reading of the initial state used by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum StateModel {
    /// `|n_x, n_y>`, with `N = n`.
    Fock { n_x: usize, n_y: usize },
    /// Product of geometric photon-number distributions, with `N = n_bar`.
    ThermalMixture { n_bar_x: f64, n_bar_y: f64 },
    /// `N_x = p(n_bar_x, n_x)`, `N_y = p(n_bar_y, n_y)`; the state is the
    /// single projector `|n_x, n_y><n_x, n_y|` scaled by `N_x N_y`.
    PaperLiteral {
        n_bar_x: f64,
        n_x: usize,
        n_bar_y: f64,
        n_y: usize,
    },
}

/// Tail tolerance for closed-form thermal sums.
const THERMAL_TAIL: f64 = 1e-15;

impl StateModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Fock { .. } => Ok(()),
            Self::ThermalMixture { n_bar_x, n_bar_y } => {
                check_photon_number("n_bar_x", n_bar_x)?;
                check_photon_number("n_bar_y", n_bar_y)
            }
            Self::PaperLiteral {
                n_bar_x, n_bar_y, ..
            } => {
                check_photon_number("n_bar_x", n_bar_x)?;
                check_photon_number("n_bar_y", n_bar_y)
            }
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Fock { .. } => "fock",
            Self::ThermalMixture { .. } => "thermal",
            Self::PaperLiteral { .. } => "paper",
        }
    }

    /// `(N_x, N_y)` entering the squeezing function.
    pub fn intensities(&self) -> Result<(f64, f64)> {
        self.validate()?;
        Ok(match *self {
            Self::Fock { n_x, n_y } => (n_x as f64, n_y as f64),
            Self::ThermalMixture { n_bar_x, n_bar_y } => (n_bar_x, n_bar_y),
            Self::PaperLiteral {
                n_bar_x,
                n_x,
                n_bar_y,
                n_y,
            } => (
                thermal_weight(n_bar_x, n_x as u64)?,
                thermal_weight(n_bar_y, n_y as u64)?,
            ),
        })
    }

    /// Fock components `(weight, n_x, n_y)`; the thermal series is cut
    /// where its tail drops below `tail`.
    fn components(&self, tail: f64) -> Result<Vec<(f64, usize, usize)>> {
        Ok(match *self {
            Self::Fock { n_x, n_y } => vec![(1.0, n_x, n_y)],
            Self::ThermalMixture { n_bar_x, n_bar_y } => {
                let px = thermal_distribution(n_bar_x, tail)?;
                let py = thermal_distribution(n_bar_y, tail)?;
                let mut out = Vec::with_capacity(px.len() * py.len());
                for (a, &wx) in px.iter().enumerate() {
                    for (b, &wy) in py.iter().enumerate() {
                        out.push((wx * wy, a, b));
                    }
                }
                out
            }
            Self::PaperLiteral { n_x, n_y, .. } => {
                let (wx, wy) = self.intensities()?;
                vec![(wx * wy, n_x, n_y)]
            }
        })
    }

    /// Closed-form moments; no truncation.
    pub fn closed_form_moments(&self, kt: f64) -> Result<MomentReport> {
        let parts = self
            .components(THERMAL_TAIL)?
            .into_iter()
            .map(|(w, a, b)| (w, heisenberg_moments(a, b, kt)));
        Ok(mix(kt, parts, 0.0))
    }

    /// Per-mode cutoff suggested for oracle runs up to `kt_max`, capped at
    /// [`MAX_AUTO_CUTOFF`].
    pub fn suggest_cutoff(&self, kt_max: f64) -> Result<usize> {
        let reach = |n_bar: f64| -> Result<usize> { Ok(thermal_distribution(n_bar, 1e-8)?.len()) };
        let d = match *self {
            Self::Fock { n_x, n_y } | Self::PaperLiteral { n_x, n_y, .. } => suggest_cutoff(n_x, n_y, kt_max),
            Self::ThermalMixture { n_bar_x, n_bar_y } => {
                suggest_cutoff(reach(n_bar_x)?, reach(n_bar_y)?, kt_max)
            }
        };
        Ok(d.min(MAX_AUTO_CUTOFF))
    }

    /// Initial state for brute-force evolution: the Fock state for `fock`
    /// and `paper` (the latter's weight is applied to the moments), the
    /// normalized truncated thermal density matrix for `thermal`.
    pub fn initial_state(&self, cutoff: FockCutoff) -> Result<QuantumState> {
        match *self {
            Self::Fock { n_x, n_y } | Self::PaperLiteral { n_x, n_y, .. } => {
                QuantumState::fock(cutoff, n_x, n_y)
            }
            Self::ThermalMixture { n_bar_x, n_bar_y } => {
                let mut rho = Array2::zeros((cutoff.dim(), cutoff.dim()));
                for a in 0..cutoff.d_x() {
                    for b in 0..cutoff.d_y() {
                        let w = thermal_weight(n_bar_x, a as u64)? * thermal_weight(n_bar_y, b as u64)?;
                        let i = cutoff.index(a, b);
                        rho[[i, i]] = C64::new(w, 0.0);
                    }
                }
                let total: f64 = rho.diag().iter().map(|z| z.re).sum();
                rho.mapv_inplace(|z| z / total);
                QuantumState::mixed(cutoff, rho)
            }
        }
    }

    fn oracle_weight(&self) -> Result<f64> {
        Ok(match self {
            Self::PaperLiteral { .. } => {
                let (wx, wy) = self.intensities()?;
                wx * wy
            }
            _ => 1.0,
        })
    }
}

/// Moments of `sum_k w_k rho_k` from the moments of each `rho_k`; the
/// weights need not sum to one.
fn mix(kt: f64, parts: impl Iterator<Item = (f64, MomentReport)>, leakage: f64) -> MomentReport {
    let mut means = [0.0; 4];
    let mut second = [0.0; 4];
    for (w, r) in parts {
        for k in 0..4 {
            means[k] += w * r.means[k];
            second[k] += w * (r.variances[k] + r.means[k] * r.means[k]);
        }
    }
    let mut variances = [0.0; 4];
    for k in 0..4 {
        variances[k] = second[k] - means[k] * means[k];
    }
    MomentReport {
        kt,
        means,
        variances,
        leakage,
        valid: true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    ClosedForm,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingCurve {
    pub model: StateModel,
    pub intensities: (f64, f64),
    pub kt_grid: Vec<f64>,
    pub sq_values: Vec<f64>,
    pub rows: Vec<MomentReport>,
    pub source: MomentSource,
    pub cutoff: Option<FockCutoff>,
    pub onset: Option<f64>,
}

/// Options for [`sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub kt_max: f64,
    pub steps: usize,
    pub with_oracle: bool,
    /// Per-mode cutoff for oracle rows; suggested from the model when absent.
    pub cutoff: Option<usize>,
    pub leakage_tol: f64,
}

impl SweepOptions {
    pub fn new(kt_max: f64, steps: usize) -> Self {
        Self {
            kt_max,
            steps,
            with_oracle: false,
            cutoff: None,
            leakage_tol: LEAKAGE_TOL,
        }
    }
}

/// Uniform grid `0, kt_max/steps, ..., kt_max`.
pub fn kt_grid(kt_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| kt_max * i as f64 / steps as f64).collect()
}

/// Evaluates `Sq` and the hidden-operator moments on a kt grid and locates
/// the onset. Oracle rows whose leakage exceeds the tolerance are marked
/// invalid; the sweep still completes.
pub fn sweep(model: &StateModel, options: &SweepOptions) -> Result<SqueezingCurve> {
    model.validate()?;
    if !(options.kt_max.is_finite() && options.kt_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kt_max must be positive, got {}",
            options.kt_max
        )));
    }
    if options.steps < 2 {
        return Err(Error::InvalidParameter(format!(
            "steps must be at least 2, got {}",
            options.steps
        )));
    }
    let (n_x, n_y) = model.intensities()?;
    let grid = kt_grid(options.kt_max, options.steps);
    let sq_values: Vec<f64> = grid.iter().map(|&kt| squeezing_function(kt, n_x, n_y)).collect();

    let (rows, cutoff) = if options.with_oracle {
        let d = match options.cutoff {
            Some(d) => d,
            None => model.suggest_cutoff(options.kt_max)?,
        };
        let cutoff = FockCutoff::square(d)?;
        let oracle = Oracle::new(cutoff);
        let initial = model.initial_state(cutoff)?;
        let weight = model.oracle_weight()?;
        let mut rows = Vec::with_capacity(grid.len());
        for &kt in &grid {
            let evolved = Propagator::for_dpa(cutoff, kt)?.apply(&initial)?;
            let leakage = boundary_leakage(&evolved, LEAKAGE_MARGIN);
            let own = oracle.moments_of(&evolved, kt, leakage)?;
            let mut row = mix(kt, std::iter::once((weight, own)), leakage);
            row.valid = leakage <= options.leakage_tol;
            rows.push(row);
        }
        (rows, Some(cutoff))
    } else {
        let rows = grid
            .iter()
            .map(|&kt| model.closed_form_moments(kt))
            .collect::<Result<Vec<_>>>()?;
        (rows, None)
    };

    let onset = grid
        .windows(2)
        .zip(sq_values.windows(2))
        .find(|(_, s)| s[0] > 0.0 && s[1] <= 0.0)
        .and_then(|(k, _)| bisect(|kt| squeezing_function(kt, n_x, n_y), k[0], k[1], 1e-8));

    Ok(SqueezingCurve {
        model: *model,
        intensities: (n_x, n_y),
        kt_grid: grid,
        sq_values,
        rows,
        source: if options.with_oracle {
            MomentSource::Oracle
        } else {
            MomentSource::ClosedForm
        },
        cutoff,
        onset,
    })
}

impl SqueezingCurve {
    /// True when every row stayed within the leakage tolerance.
    pub fn all_valid(&self) -> bool {
        self.rows.iter().all(|r| r.valid)
    }

    pub const CSV_HEADER: &'static str =
        "kt,sq,h0,h1,h2,h3,var_h0,var_h1,var_h2,var_h3,leakage,model";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for ((kt, sq), r) in self.kt_grid.iter().zip(&self.sq_values).zip(&self.rows) {
            let _ = write!(out, "{kt},{sq}");
            for v in r.means.iter().chain(r.variances.iter()) {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{},{}", r.leakage, self.model.tag());
        }
        out
    }

    /// Line plot of `Sq` against kt with the zero line and the onset.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (640.0, 400.0, 50.0);
        let kt_max = self.kt_grid.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
        let lo = self.sq_values.iter().copied().fold(0.0, f64::min);
        let hi = self.sq_values.iter().copied().fold(0.0, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        let x = |kt: f64| pad + (w - 2.0 * pad) * kt / kt_max;
        let y = |sq: f64| h - pad - (h - 2.0 * pad) * (sq - lo) / span;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<line x1="{pad}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            y0 = y(0.0),
            x1 = w - pad
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{b}" stroke="black"/>"#,
            b = h - pad
        );
        let points: Vec<String> = self
            .kt_grid
            .iter()
            .zip(&self.sq_values)
            .map(|(&kt, &sq)| format!("{:.2},{:.2}", x(kt), y(sq)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        if let Some(t) = self.onset {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="crimson"/>"#,
                x(t),
                y(0.0)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="crimson">onset kt = {t:.5}</text>"#,
                x(t) + 8.0,
                y(0.0) - 8.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">kt</text>"#,
            w / 2.0,
            h - 15.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="15" y="{}" font-size="12" transform="rotate(-90 15 {})" text-anchor="middle">Sq</text>"#,
            h / 2.0,
            h / 2.0
        );
        svg.push_str("</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn thermal_weights_known_values() {
        assert_abs_diff_eq!(thermal_weight(10.0, 10).unwrap(), 1e10 / 11f64.powi(11), epsilon = 1e-15);
        assert_abs_diff_eq!(thermal_weight(10.0, 10).unwrap(), 0.035049, epsilon = 1e-6);
        assert_abs_diff_eq!(thermal_weight(1.0, 1).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(thermal_weight(20.0, 20).unwrap(), 0.017947, epsilon = 1e-6);
        assert_eq!(thermal_weight(0.0, 0).unwrap(), 1.0);
        assert_eq!(thermal_weight(0.0, 3).unwrap(), 0.0);
        assert!(thermal_weight(-1.0, 0).is_err());
    }

    #[test]
    fn thermal_weights_in_log_space_survive_large_n() {
        let w = thermal_weight(50.0, 2000).unwrap();
        assert!(w.is_finite() && w > 0.0);
    }

    #[test]
    fn thermal_distribution_sums_to_one() {
        for n_bar in [0.0, 0.035, 1.0, 10.0, 20.0] {
            let total: f64 = thermal_distribution(n_bar, 1e-12).unwrap().iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn squeezing_function_values() {
        assert_abs_diff_eq!(squeezing_function(0.0, 0.0, 0.0), 1.0);
        assert_abs_diff_eq!(squeezing_function(0.0, 2.0, 3.0), 3.0);
        assert_abs_diff_eq!(squeezing_function(0.22, 0.035, 0.035), 0.0042313, epsilon = 1e-7);
        assert_abs_diff_eq!(squeezing_function(0.20, 0.035, 0.035), 0.1141837, epsilon = 1e-7);
    }

    #[test]
    fn onset_values() {
        assert_abs_diff_eq!(onset_time(0.0, 0.0).unwrap(), 1f64.asinh() / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(onset_time(0.035, 0.035).unwrap(), 0.22074793, epsilon = 1e-8);
        assert_abs_diff_eq!(onset_time(0.25, 0.018).unwrap(), 0.22159590, epsilon = 1e-8);
        assert!(onset_time(-0.1, 0.0).is_err());
    }

    #[test]
    fn bisection_agrees_with_closed_form() {
        for (a, b) in [(0.0, 0.0), (0.035, 0.035), (0.25, 0.018), (3.0, 3.0)] {
            let root = onset_time_bisection(a, b, 1e-13).unwrap();
            assert_abs_diff_eq!(root, onset_time(a, b).unwrap(), epsilon = 1e-10);
        }
        // sinh 4 < 1 + 2 N^2/(1 + 2N) for very large N: no root in [0, 1]
        assert_eq!(onset_time_bisection(100.0, 100.0, 1e-12), None);
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(ClaimVerdict::judge(1.0, 1.0 + 1e-9).0, ClaimVerdict::Matches);
        assert_eq!(ClaimVerdict::judge(0.0, 0.0).0, ClaimVerdict::Matches);
        assert_eq!(ClaimVerdict::judge(2.5, -2.5).0, ClaimVerdict::SignFlip);
        assert_eq!(ClaimVerdict::judge(2.5, 2.0).0, ClaimVerdict::Mismatch);
    }

    #[test]
    fn claims_under_the_fock_reading() {
        let c = paper_moment_claims(1.0, 2.0, 0.3).unwrap();
        let verdict = |eq| c.claim(eq).unwrap().verdict.unwrap();
        assert_eq!(c.claims.len(), 8);
        assert_eq!(c.claim(28).unwrap().printed, 1.0);
        assert_eq!(verdict(27), ClaimVerdict::Matches);
        assert_eq!(verdict(28), ClaimVerdict::Matches);
        assert_eq!(verdict(29), ClaimVerdict::Matches);
        assert_eq!(verdict(30), ClaimVerdict::SignFlip);
        assert_eq!(verdict(32), ClaimVerdict::Mismatch);
        assert_eq!(verdict(33), ClaimVerdict::Matches);
    }

    #[test]
    fn vacuum_claims_and_oracle_column() {
        let c = paper_moment_claims(0.0, 0.0, 0.22)
            .unwrap()
            .with_oracle(FockCutoff::square(32).unwrap())
            .unwrap();
        let var_h2 = c.claim(33).unwrap();
        assert_eq!(var_h2.printed, 1.0);
        assert_abs_diff_eq!(var_h2.oracle.unwrap(), 1.0, epsilon = 1e-9);
        for claim in &c.claims {
            assert!((claim.oracle.unwrap() - claim.derived.unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn non_integer_claims_have_no_verdict() {
        let c = paper_moment_claims(0.035, 0.035, 0.22).unwrap();
        assert!(c.claims.iter().all(|c| c.verdict.is_none()));
        assert!(c.with_oracle(FockCutoff::square(8).unwrap()).is_err());
    }

    #[test]
    fn claims_are_reproducible() {
        let a = paper_moment_claims(2.0, 1.0, 0.4).unwrap();
        let b = paper_moment_claims(2.0, 1.0, 0.4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn model_intensities() {
        let paper = StateModel::PaperLiteral {
            n_bar_x: 1.0,
            n_x: 1,
            n_bar_y: 20.0,
            n_y: 20,
        };
        let (a, b) = paper.intensities().unwrap();
        assert_abs_diff_eq!(a, 0.25);
        assert_abs_diff_eq!(b, 0.017947, epsilon = 1e-6);
        assert!(StateModel::ThermalMixture {
            n_bar_x: -1.0,
            n_bar_y: 0.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn thermal_closed_form_matches_oracle() {
        let model = StateModel::ThermalMixture {
            n_bar_x: 0.2,
            n_bar_y: 0.1,
        };
        let options = SweepOptions {
            with_oracle: true,
            cutoff: Some(24),
            ..SweepOptions::new(0.2, 4)
        };
        let oracle = sweep(&model, &options).unwrap();
        assert!(oracle.all_valid());
        for (row, &kt) in oracle.rows.iter().zip(&oracle.kt_grid) {
            let closed = model.closed_form_moments(kt).unwrap();
            // the oracle state is the thermal state truncated at 24 levels
            assert!(row.max_abs_diff(&closed) < 1e-8, "kt={kt}");
        }
    }

    #[test]
    fn thermal_mixture_of_vacuum_is_the_vacuum() {
        let thermal = StateModel::ThermalMixture {
            n_bar_x: 0.0,
            n_bar_y: 0.0,
        };
        let fock = StateModel::Fock { n_x: 0, n_y: 0 };
        for kt in [0.0, 0.1, 0.3] {
            let a = thermal.closed_form_moments(kt).unwrap();
            let b = fock.closed_form_moments(kt).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn paper_literal_oracle_scales_the_fock_moments() {
        let model = StateModel::PaperLiteral {
            n_bar_x: 1.0,
            n_x: 1,
            n_bar_y: 1.0,
            n_y: 0,
        };
        let options = SweepOptions {
            with_oracle: true,
            cutoff: Some(24),
            ..SweepOptions::new(0.2, 2)
        };
        let oracle = sweep(&model, &options).unwrap();
        for (row, &kt) in oracle.rows.iter().zip(&oracle.kt_grid) {
            assert!(row.max_abs_diff(&model.closed_form_moments(kt).unwrap()) < 1e-9);
        }
        // w = 0.25 * 0.5; <H1> = w (0 - 1)
        assert_abs_diff_eq!(oracle.rows[0].means[1], -0.125, epsilon = 1e-12);
    }

    #[test]
    fn fock_sweep_finds_vacuum_onset() {
        let curve = sweep(&StateModel::Fock { n_x: 0, n_y: 0 }, &SweepOptions::new(0.5, 100)).unwrap();
        assert_eq!(curve.kt_grid.len(), 101);
        assert_abs_diff_eq!(curve.onset.unwrap(), 0.220343, epsilon = 1e-6);
        assert_eq!(curve.source, MomentSource::ClosedForm);
    }

    #[test]
    fn literal_model_sweeps_find_expected_onsets() {
        let equal = StateModel::PaperLiteral {
            n_bar_x: 10.0,
            n_x: 10,
            n_bar_y: 10.0,
            n_y: 10,
        };
        let curve = sweep(&equal, &SweepOptions::new(0.5, 100)).unwrap();
        let onset = curve.onset.unwrap();
        assert_abs_diff_eq!(onset, onset_time(0.035049, 0.035049).unwrap(), epsilon = 1e-6);
        assert!(curve
            .kt_grid
            .iter()
            .zip(&curve.sq_values)
            .all(|(&kt, &sq)| (kt > onset) == (sq < 0.0)));
    }

    #[test]
    fn sweep_validation() {
        let m = StateModel::Fock { n_x: 0, n_y: 0 };
        assert!(sweep(&m, &SweepOptions::new(0.0, 10)).is_err());
        assert!(sweep(&m, &SweepOptions::new(0.5, 1)).is_err());
    }

    #[test]
    fn truncation_failures_flag_rows() {
        let options = SweepOptions {
            with_oracle: true,
            cutoff: Some(8),
            ..SweepOptions::new(0.6, 3)
        };
        let curve = sweep(&StateModel::Fock { n_x: 0, n_y: 0 }, &options).unwrap();
        assert_eq!(curve.rows.len(), 4);
        assert!(curve.rows[0].valid);
        assert!(!curve.rows[3].valid);
        assert!(!curve.all_valid());
    }

    #[test]
    fn csv_and_svg_output() {
        let curve = sweep(&StateModel::Fock { n_x: 1, n_y: 0 }, &SweepOptions::new(0.4, 8)).unwrap();
        let csv = curve.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], SqueezingCurve::CSV_HEADER);
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[1].split(',').count(), 12);
        assert!(lines[1].starts_with("0,1,") && lines[1].ends_with(",fock"));
        let svg = curve.to_svg();
        assert!(svg.starts_with("<svg") && svg.contains("polyline") && svg.contains("circle"));
    }
}
