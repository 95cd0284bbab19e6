//! Run configuration: flags override the config file, which overrides the
//! per-command defaults.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use hops_core::classical::AmplitudeDistribution;
use hops_core::fock::LEAKAGE_TOL;
use hops_core::squeezing::StateModel;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Fock,
    Thermal,
    Paper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Hops,
    Ordinary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Sweep,
    Onset,
    Verify,
    Ensemble,
    Claims,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sweep => "sweep",
            Self::Onset => "onset",
            Self::Verify => "verify",
            Self::Ensemble => "ensemble",
            Self::Claims => "claims",
        }
    }
}

/// Every tunable, all optional. Used both for command-line flags and for
/// the key-value config file (keys are the flag names with `_`).
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Output file (default: stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// SVG plot of the squeezing function (sweep only)
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// RNG seed (ensemble)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-mode Fock cutoff
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Initial-state model (sweep)
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// x-mode photon number or intensity N_x
    #[arg(long, allow_negative_numbers = true)]
    pub nx: Option<f64>,
    /// y-mode photon number or intensity N_y
    #[arg(long, allow_negative_numbers = true)]
    pub ny: Option<f64>,
    /// x-mode mean photon number (thermal, paper models)
    #[arg(long, allow_negative_numbers = true)]
    pub nbar_x: Option<f64>,
    /// y-mode mean photon number (thermal, paper models)
    #[arg(long, allow_negative_numbers = true)]
    pub nbar_y: Option<f64>,
    /// Largest kt of the sweep grid
    #[arg(long, allow_negative_numbers = true)]
    pub kt_max: Option<f64>,
    /// Number of grid intervals
    #[arg(long)]
    pub steps: Option<usize>,
    /// Interaction strength kt (claims)
    #[arg(long, allow_negative_numbers = true)]
    pub kt: Option<f64>,
    /// Add brute-force oracle moments
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub oracle: Option<bool>,
    /// Boundary-leakage tolerance for oracle rows
    #[arg(long)]
    pub leakage_tol: Option<f64>,
    /// Ensemble kind
    #[arg(long, value_enum)]
    pub kind: Option<EnsembleKind>,
    /// Ensemble size
    #[arg(long)]
    pub samples: Option<usize>,
    /// Amplitude-ratio angle chi (radians)
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Phase angle delta (radians)
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Fixed real amplitude A0
    #[arg(long, allow_negative_numbers = true, conflicts_with = "rayleigh")]
    pub amp: Option<f64>,
    /// Rayleigh-distributed A0 with this scale
    #[arg(long, allow_negative_numbers = true)]
    pub rayleigh: Option<f64>,
}

macro_rules! overlay {
    ($low:expr, $high:expr, $($field:ident),*) => {
        Overrides { $($field: $high.$field.or($low.$field)),* }
    };
}

impl Overrides {
    /// `self` wins over `lower`.
    pub fn over(self, lower: Overrides) -> Overrides {
        overlay!(
            lower, self, out, svg, seed, cutoff, model, nx, ny, nbar_x, nbar_y, kt_max, steps,
            kt, oracle, leakage_tol, kind, samples, chi, delta, amp, rayleigh
        )
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    fn set_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! check {
            ($($field:ident),*) => {
                $(if self.$field.is_some() { keys.push(stringify!($field)); })*
            };
        }
        check!(
            out, svg, seed, cutoff, model, nx, ny, nbar_x, nbar_y, kt_max, steps, kt, oracle,
            leakage_tol, kind, samples, chi, delta, amp, rayleigh
        );
        keys
    }
}

fn allowed(command: CommandKind) -> &'static [&'static str] {
    match command {
        CommandKind::Sweep => &[
            "out", "svg", "cutoff", "model", "nx", "ny", "nbar_x", "nbar_y", "kt_max", "steps",
            "oracle", "leakage_tol",
        ],
        CommandKind::Onset => &["out", "nx", "ny"],
        CommandKind::Verify => &["out", "cutoff", "seed"],
        CommandKind::Ensemble => &[
            "out", "seed", "kind", "samples", "chi", "delta", "amp", "rayleigh",
        ],
        CommandKind::Claims => &["out", "nx", "ny", "kt", "oracle", "cutoff"],
    }
}

/// Fully resolved parameters of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Sweep {
        state: StateModel,
        kt_max: f64,
        steps: usize,
        oracle: bool,
        cutoff: Option<usize>,
        leakage_tol: f64,
        svg: Option<PathBuf>,
    },
    Onset {
        n_x: f64,
        n_y: f64,
    },
    Verify {
        cutoff: usize,
        seed: u64,
    },
    Ensemble {
        kind: EnsembleKind,
        chi: f64,
        delta: f64,
        amplitude: AmplitudeDistribution,
        samples: usize,
        seed: u64,
    },
    Claims {
        n_x: f64,
        n_y: f64,
        kt: f64,
        oracle: bool,
        cutoff: Option<usize>,
    },
}

fn photon_number(name: &str, v: f64) -> Result<usize, String> {
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(format!("--{name} must be a non-negative integer for this model, got {v}"))
    }
}

fn non_negative(name: &str, v: f64) -> Result<f64, String> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("--{name} must be finite and non-negative, got {v}"))
    }
}

impl RunConfig {
    /// Applies defaults and validates; any error is a usage error.
    pub fn resolve(command: CommandKind, o: &Overrides) -> Result<Self, String> {
        let stray: Vec<_> = o
            .set_keys()
            .into_iter()
            .filter(|k| !allowed(command).contains(k))
            .collect();
        if !stray.is_empty() {
            return Err(format!(
                "option(s) not used by `{}`: {}",
                command.name(),
                stray.join(", ")
            ));
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(format!("--{name} must be finite and positive, got {v}"))
            }
        };
        let cutoff = |d: Option<usize>| match d {
            Some(d) if d < 6 => Err(format!("--cutoff must be at least 6, got {d}")),
            other => Ok(other),
        };

        let config = match command {
            CommandKind::Sweep => {
                let model = o.model.unwrap_or(ModelKind::Paper);
                let state = match model {
                    ModelKind::Fock => {
                        if o.nbar_x.is_some() || o.nbar_y.is_some() {
                            return Err("--nbar-x/--nbar-y do not apply to the fock model".into());
                        }
                        StateModel::Fock {
                            n_x: photon_number("nx", o.nx.unwrap_or(0.0))?,
                            n_y: photon_number("ny", o.ny.unwrap_or(0.0))?,
                        }
                    }
                    ModelKind::Thermal => {
                        if o.nx.is_some() || o.ny.is_some() {
                            return Err("the thermal model takes --nbar-x/--nbar-y, not --nx/--ny".into());
                        }
                        StateModel::ThermalMixture {
                            n_bar_x: non_negative("nbar-x", o.nbar_x.unwrap_or(0.0))?,
                            n_bar_y: non_negative("nbar-y", o.nbar_y.unwrap_or(0.0))?,
                        }
                    }
                    ModelKind::Paper => StateModel::PaperLiteral {
                        n_bar_x: non_negative("nbar-x", o.nbar_x.unwrap_or(10.0))?,
                        n_x: photon_number("nx", o.nx.unwrap_or(10.0))?,
                        n_bar_y: non_negative("nbar-y", o.nbar_y.unwrap_or(10.0))?,
                        n_y: photon_number("ny", o.ny.unwrap_or(10.0))?,
                    },
                };
                let steps = o.steps.unwrap_or(100);
                if steps < 2 {
                    return Err(format!("--steps must be at least 2, got {steps}"));
                }
                let leakage_tol = o.leakage_tol.unwrap_or(LEAKAGE_TOL);
                if !(leakage_tol > 0.0 && leakage_tol < 1.0) {
                    return Err(format!("--leakage-tol must lie in (0, 1), got {leakage_tol}"));
                }
                let oracle = o.oracle.unwrap_or(false);
                if o.cutoff.is_some() && !oracle {
                    return Err("--cutoff only applies together with --oracle".into());
                }
                RunConfig::Sweep {
                    state,
                    kt_max: positive("kt-max", o.kt_max.unwrap_or(0.5))?,
                    steps,
                    oracle,
                    cutoff: cutoff(o.cutoff)?,
                    leakage_tol,
                    svg: o.svg.clone(),
                }
            }
            CommandKind::Onset => RunConfig::Onset {
                n_x: non_negative("nx", o.nx.unwrap_or(0.035))?,
                n_y: non_negative("ny", o.ny.unwrap_or(0.035))?,
            },
            CommandKind::Verify => RunConfig::Verify {
                cutoff: cutoff(Some(o.cutoff.unwrap_or(16)))?.unwrap_or(16),
                seed: o.seed.unwrap_or(1),
            },
            CommandKind::Ensemble => {
                let amplitude = match (o.amp, o.rayleigh) {
                    (Some(_), Some(_)) => return Err("--amp and --rayleigh are exclusive".into()),
                    (_, Some(scale)) => AmplitudeDistribution::Rayleigh {
                        scale: positive("rayleigh", scale)?,
                    },
                    (a0, None) => AmplitudeDistribution::Fixed {
                        a0: non_negative("amp", a0.unwrap_or(1.0))?,
                    },
                };
                let samples = o.samples.unwrap_or(1_000_000);
                if samples < 2 {
                    return Err(format!("--samples must be at least 2, got {samples}"));
                }
                RunConfig::Ensemble {
                    kind: o.kind.unwrap_or(EnsembleKind::Hops),
                    chi: o.chi.unwrap_or(FRAC_PI_2),
                    delta: o.delta.unwrap_or(0.0),
                    amplitude,
                    samples,
                    seed: o.seed.unwrap_or(1),
                }
            }
            CommandKind::Claims => {
                let oracle = o.oracle.unwrap_or(false);
                if o.cutoff.is_some() && !oracle {
                    return Err("--cutoff only applies together with --oracle".into());
                }
                RunConfig::Claims {
                    n_x: non_negative("nx", o.nx.unwrap_or(0.0))?,
                    n_y: non_negative("ny", o.ny.unwrap_or(0.0))?,
                    kt: non_negative("kt", o.kt.unwrap_or(0.22))?,
                    oracle,
                    cutoff: cutoff(o.cutoff)?,
                }
            }
        };
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    #[cfg(test)]
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// The effective configuration as `#` comment lines.
    pub fn comment_header(&self) -> String {
        let mut out = String::from("# hops effective config\n");
        for line in self.to_toml().lines().filter(|l| !l.trim().is_empty()) {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}
