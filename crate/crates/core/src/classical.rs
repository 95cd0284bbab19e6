//! Classical bi-modal fields: polarization indices and Monte-Carlo
//! ensembles of ordinary and hidden-polarized (HOPS) light.
//!
//! Samples are complex amplitude pairs `(A_x, A_y)`. A HOPS ensemble has a
//! random phase *difference* but a fixed `A_y / conj(A_x)`; an ordinary
//! ensemble has a random overall phase but a fixed `A_y / A_x`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalFieldSample {
    pub amp_x: C64,
    pub amp_y: C64,
}

impl ClassicalFieldSample {
    pub fn new(amp_x: C64, amp_y: C64) -> Result<Self> {
        let s = Self { amp_x, amp_y };
        if !s.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(s)
    }

    pub fn is_finite(&self) -> bool {
        [self.amp_x, self.amp_y]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn intensity(&self) -> f64 {
        self.amp_x.norm_sqr() + self.amp_y.norm_sqr()
    }
}

/// Law of the real amplitude `A0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmplitudeDistribution {
    Fixed { a0: f64 },
    /// Rayleigh with the given scale, `E[A0^2] = 2 scale^2`.
    Rayleigh { scale: f64 },
}

impl AmplitudeDistribution {
    fn validate(&self) -> Result<()> {
        match *self {
            Self::Fixed { a0 } if !(a0.is_finite() && a0 >= 0.0) => Err(Error::InvalidParameter(
                format!("fixed amplitude must be finite and non-negative, got {a0}"),
            )),
            Self::Rayleigh { scale } if !(scale.is_finite() && scale > 0.0) => {
                Err(Error::InvalidParameter(format!(
                    "Rayleigh scale must be finite and positive, got {scale}"
                )))
            }
            _ => Ok(()),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Self::Fixed { a0 } => a0,
            Self::Rayleigh { scale } => {
                let u: f64 = rng.random();
                scale * (-2.0 * (1.0 - u).ln()).sqrt()
            }
        }
    }

    /// `E[A0^2]`.
    pub fn mean_square(&self) -> f64 {
        match *self {
            Self::Fixed { a0 } => a0 * a0,
            Self::Rayleigh { scale } => 2.0 * scale * scale,
        }
    }
}

fn validate_angles(chi: f64, delta: f64) -> Result<()> {
    if !(chi.is_finite() && (0.0..=PI).contains(&chi)) {
        return Err(Error::InvalidParameter(format!(
            "chi must lie in [0, pi], got {chi}"
        )));
    }
    if !(delta.is_finite() && delta > -PI && delta <= PI) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (-pi, pi], got {delta}"
        )));
    }
    Ok(())
}

/// HOPS ensemble:
/// `A_x = A0 cos(chi_h/2) e^{i(phi + delta_h/2)}`,
/// `A_y = A0 sin(chi_h/2) e^{i(-phi + delta_h/2)}`, `phi ~ U[0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopsEnsembleSpec {
    pub chi_h: f64,
    pub delta_h: f64,
    pub amp: AmplitudeDistribution,
}

impl HopsEnsembleSpec {
    pub fn new(chi_h: f64, delta_h: f64, amp: AmplitudeDistribution) -> Result<Self> {
        let spec = Self {
            chi_h,
            delta_h,
            amp,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        validate_angles(self.chi_h, self.delta_h)?;
        self.amp.validate()
    }

    /// `tan(chi_h/2) e^{i delta_h}`, shared by every sample.
    pub fn hidden_index(&self) -> C64 {
        C64::from_polar((self.chi_h / 2.0).tan(), self.delta_h)
    }

    /// Ensemble value of `h2 + i h3`: `E[A0^2] sin(chi_h) e^{i delta_h}`.
    pub fn expected_hidden_coherence(&self) -> C64 {
        C64::from_polar(self.amp.mean_square() * self.chi_h.sin(), self.delta_h)
    }
}

/// Ordinary polarized ensemble:
/// `A_x = A0 cos(chi/2) e^{i(phi - delta/2)}`,
/// `A_y = A0 sin(chi/2) e^{i(phi + delta/2)}`, `phi ~ U[0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrdinaryEnsembleSpec {
    pub chi: f64,
    pub delta: f64,
    pub amp: AmplitudeDistribution,
}

impl OrdinaryEnsembleSpec {
    pub fn new(chi: f64, delta: f64, amp: AmplitudeDistribution) -> Result<Self> {
        validate_angles(chi, delta)?;
        amp.validate()?;
        Ok(Self { chi, delta, amp })
    }

    /// `tan(chi/2) e^{i delta}`, shared by every sample.
    pub fn index(&self) -> C64 {
        C64::from_polar((self.chi / 2.0).tan(), self.delta)
    }
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    Ok(())
}

/// Draws `count` HOPS samples from a ChaCha8 stream seeded with `seed`.
/// Per sample the generator consumes one uniform for `phi`, then one for
/// `A0` when the amplitude is random.
pub fn sample_hops(spec: &HopsEnsembleSpec, count: usize, seed: u64) -> Result<Vec<ClassicalFieldSample>> {
    spec.validate()?;
    check_count(count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c, s) = ((spec.chi_h / 2.0).cos(), (spec.chi_h / 2.0).sin());
    let half = spec.delta_h / 2.0;
    Ok((0..count)
        .map(|_| {
            let phi = 2.0 * PI * rng.random::<f64>();
            let a0 = spec.amp.draw(&mut rng);
            ClassicalFieldSample {
                amp_x: C64::from_polar(a0 * c, phi + half),
                amp_y: C64::from_polar(a0 * s, -phi + half),
            }
        })
        .collect())
}

/// Draws `count` ordinary polarized samples; same stream layout as
/// [`sample_hops`].
pub fn sample_ordinary(
    spec: &OrdinaryEnsembleSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<ClassicalFieldSample>> {
    validate_angles(spec.chi, spec.delta)?;
    spec.amp.validate()?;
    check_count(count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c, s) = ((spec.chi / 2.0).cos(), (spec.chi / 2.0).sin());
    let half = spec.delta / 2.0;
    Ok((0..count)
        .map(|_| {
            let phi = 2.0 * PI * rng.random::<f64>();
            let a0 = spec.amp.draw(&mut rng);
            ClassicalFieldSample {
                amp_x: C64::from_polar(a0 * c, phi - half),
                amp_y: C64::from_polar(a0 * s, phi + half),
            }
        })
        .collect())
}

/// Four ensemble averages with batch-means standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentEstimates {
    pub values: [f64; 4],
    pub std_errors: [f64; 4],
    pub count: usize,
}

/// Mean and batch-means standard error of each of four per-sample
/// quantities, using `floor(sqrt(n))` (at least 2) contiguous batches.
fn batch_estimates(samples: &[ClassicalFieldSample], f: impl Fn(&ClassicalFieldSample) -> [f64; 4]) -> Result<ComponentEstimates> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "ensemble averages need at least 2 samples, got {n}"
        )));
    }
    let batches = ((n as f64).sqrt() as usize).max(2);
    let mut sums = vec![[0.0; 4]; batches];
    let mut sizes = vec![0usize; batches];
    for (i, sample) in samples.iter().enumerate() {
        let b = i * batches / n;
        let v = f(sample);
        for k in 0..4 {
            sums[b][k] += v[k];
        }
        sizes[b] += 1;
    }
    let mut values = [0.0; 4];
    let mut std_errors = [0.0; 4];
    for k in 0..4 {
        let total: f64 = sums.iter().map(|s| s[k]).sum();
        let mean = total / n as f64;
        let spread: f64 = sums
            .iter()
            .zip(&sizes)
            .map(|(s, &m)| (s[k] / m as f64 - mean).powi(2))
            .sum::<f64>()
            / (batches - 1) as f64;
        values[k] = mean;
        std_errors[k] = (spread / batches as f64).sqrt();
    }
    Ok(ComponentEstimates {
        values,
        std_errors,
        count: n,
    })
}

/// `s0 = <|A_y|^2 + |A_x|^2>`, `s1 = <|A_y|^2 - |A_x|^2>`,
/// `s2 + i s3 = 2 <conj(A_y) A_x>`.
pub fn classical_stokes(samples: &[ClassicalFieldSample]) -> Result<ComponentEstimates> {
    batch_estimates(samples, |a| {
        let (ix, iy) = (a.amp_x.norm_sqr(), a.amp_y.norm_sqr());
        let cross = 2.0 * a.amp_y.conj() * a.amp_x;
        [iy + ix, iy - ix, cross.re, cross.im]
    })
}

/// `h0 = s0`, `h1 = s1`, `h2 + i h3 = 2 <A_y A_x>`.
pub fn classical_hidden(samples: &[ClassicalFieldSample]) -> Result<ComponentEstimates> {
    batch_estimates(samples, |a| {
        let (ix, iy) = (a.amp_x.norm_sqr(), a.amp_y.norm_sqr());
        let cross = 2.0 * a.amp_y * a.amp_x;
        [iy + ix, iy - ix, cross.re, cross.im]
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub s: [f64; 4],
    pub h: [f64; 4],
    pub s_std_errors: [f64; 4],
    pub h_std_errors: [f64; 4],
    pub sample_count: usize,
}

impl EnsembleStats {
    pub fn from_samples(samples: &[ClassicalFieldSample]) -> Result<Self> {
        let s = classical_stokes(samples)?;
        let h = classical_hidden(samples)?;
        Ok(Self {
            s: s.values,
            h: h.values,
            s_std_errors: s.std_errors,
            h_std_errors: h.std_errors,
            sample_count: samples.len(),
        })
    }

    /// `(name, estimate, std_error)` for `s0..s3`, `h0..h3`.
    pub fn rows(&self) -> Vec<(String, f64, f64)> {
        let s = (0..4).map(|k| (format!("s{k}"), self.s[k], self.s_std_errors[k]));
        let h = (0..4).map(|k| (format!("h{k}"), self.h[k], self.h_std_errors[k]));
        s.chain(h).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("component,estimate,std_error,count\n");
        for (name, estimate, err) in self.rows() {
            let _ = writeln!(out, "{name},{estimate},{err},{}", self.sample_count);
        }
        out
    }
}

/// Orthonormal pair `(e, e_perp)` of complex polarization vectors, given by
/// their `(x, y)` components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationBasis {
    e: [C64; 2],
    e_perp: [C64; 2],
}

impl PolarizationBasis {
    const TOL: f64 = 1e-12;

    pub fn new(e: [C64; 2], e_perp: [C64; 2]) -> Result<Self> {
        let dot = |u: &[C64; 2], v: &[C64; 2]| u[0].conj() * v[0] + u[1].conj() * v[1];
        let ok = (dot(&e, &e).re - 1.0).abs() <= Self::TOL
            && (dot(&e_perp, &e_perp).re - 1.0).abs() <= Self::TOL
            && dot(&e, &e_perp).norm() <= Self::TOL;
        if !ok {
            return Err(Error::InvalidParameter(
                "polarization basis is not orthonormal".into(),
            ));
        }
        Ok(Self { e, e_perp })
    }

    /// `(e_x, e_y)`.
    pub fn linear_xy() -> Self {
        Self {
            e: [C64::new(1.0, 0.0), ZERO],
            e_perp: [ZERO, C64::new(1.0, 0.0)],
        }
    }

    /// `e = (e_x + i e_y)/sqrt 2`, `e_perp = (e_x - i e_y)/sqrt 2`.
    pub fn circular() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            e: [C64::new(r, 0.0), C64::new(0.0, r)],
            e_perp: [C64::new(r, 0.0), C64::new(0.0, -r)],
        }
    }

    /// `(conj(e) . A, conj(e_perp) . A)`.
    pub fn project(&self, sample: &ClassicalFieldSample) -> (C64, C64) {
        let a = [sample.amp_x, sample.amp_y];
        let along = |v: &[C64; 2]| v[0].conj() * a[0] + v[1].conj() * a[1];
        (along(&self.e), along(&self.e_perp))
    }
}

/// `A_e_perp / A_e`.
pub fn polarization_index(sample: &ClassicalFieldSample, basis: &PolarizationBasis) -> Result<C64> {
    let (a, a_perp) = basis.project(sample);
    if a == ZERO {
        return Err(Error::UndefinedIndex);
    }
    Ok(a_perp / a)
}

/// `A_e_perp / conj(A_e)`.
pub fn hidden_polarization_index(
    sample: &ClassicalFieldSample,
    basis: &PolarizationBasis,
) -> Result<C64> {
    let (a, a_perp) = basis.project(sample);
    if a == ZERO {
        return Err(Error::UndefinedIndex);
    }
    Ok(a_perp / a.conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn unit() -> AmplitudeDistribution {
        AmplitudeDistribution::Fixed { a0: 1.0 }
    }

    #[test]
    fn spec_validation() {
        assert!(HopsEnsembleSpec::new(0.0, PI, unit()).is_ok());
        assert!(HopsEnsembleSpec::new(PI + 1e-9, 0.0, unit()).is_err());
        assert!(HopsEnsembleSpec::new(1.0, -PI, unit()).is_err());
        assert!(HopsEnsembleSpec::new(1.0, 0.0, AmplitudeDistribution::Fixed { a0: -1.0 }).is_err());
        assert!(
            HopsEnsembleSpec::new(1.0, 0.0, AmplitudeDistribution::Rayleigh { scale: 0.0 }).is_err()
        );
        let spec = HopsEnsembleSpec::new(1.0, 0.0, unit()).unwrap();
        assert!(sample_hops(&spec, 0, 1).is_err());
    }

    #[test]
    fn balanced_real_hops_samples_are_conjugate_pairs() {
        let spec = HopsEnsembleSpec::new(FRAC_PI_2, 0.0, unit()).unwrap();
        for a in sample_hops(&spec, 1000, 7).unwrap() {
            assert!((a.amp_y - a.amp_x.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_chi_leaves_y_empty() {
        let spec = HopsEnsembleSpec::new(0.0, 0.4, unit()).unwrap();
        let samples = sample_hops(&spec, 100, 3).unwrap();
        assert!(samples.iter().all(|a| a.amp_y.norm() == 0.0));
        let s = classical_stokes(&samples).unwrap();
        assert_eq!(s.values[1], -1.0);
    }

    #[test]
    fn intensity_is_a0_squared() {
        let spec = HopsEnsembleSpec::new(1.1, -2.0, AmplitudeDistribution::Fixed { a0: 1.7 }).unwrap();
        for a in sample_hops(&spec, 500, 11).unwrap() {
            assert!((a.intensity() - 1.7 * 1.7).abs() < 1e-13);
        }
    }

    #[test]
    fn hidden_index_is_exact_per_sample() {
        let spec = HopsEnsembleSpec::new(2.3, 2.9, AmplitudeDistribution::Rayleigh { scale: 0.8 }).unwrap();
        let target = spec.hidden_index();
        let basis = PolarizationBasis::linear_xy();
        for a in sample_hops(&spec, 1000, 5).unwrap() {
            let p = hidden_polarization_index(&a, &basis).unwrap();
            assert!((p - target).norm() < 1e-12 * target.norm().max(1.0));
        }
    }

    #[test]
    fn ordinary_index_is_exact_per_sample() {
        let spec = OrdinaryEnsembleSpec::new(0.7, -1.2, unit()).unwrap();
        let basis = PolarizationBasis::linear_xy();
        for a in sample_ordinary(&spec, 200, 9).unwrap() {
            let p = polarization_index(&a, &basis).unwrap();
            assert!((p - spec.index()).norm() < 1e-13);
        }
    }

    #[test]
    fn polarization_index_examples() {
        let xy = PolarizationBasis::linear_xy();
        let one = C64::new(1.0, 0.0);
        let linear = ClassicalFieldSample::new(one, ZERO).unwrap();
        assert_eq!(polarization_index(&linear, &xy).unwrap(), ZERO);
        let diagonal = ClassicalFieldSample::new(C64::new(0.3, 0.2), C64::new(0.3, 0.2)).unwrap();
        assert!((polarization_index(&diagonal, &xy).unwrap() - one).norm() < 1e-15);
        let circ = ClassicalFieldSample::new(C64::new(0.3, 0.2), C64::new(0.3, 0.2) * C64::i()).unwrap();
        assert!((polarization_index(&circ, &xy).unwrap() - C64::i()).norm() < 1e-15);
        let y_only = ClassicalFieldSample::new(ZERO, one).unwrap();
        assert_eq!(polarization_index(&y_only, &xy), Err(Error::UndefinedIndex));
    }

    #[test]
    fn circular_basis_sees_circular_light_as_pure() {
        // (1, i)/sqrt2 has no component along (1, -i)/sqrt2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = ClassicalFieldSample::new(C64::new(r, 0.0), C64::new(0.0, r)).unwrap();
        let p = polarization_index(&a, &PolarizationBasis::circular()).unwrap();
        assert!(p.norm() < 1e-15);
    }

    #[test]
    fn basis_must_be_orthonormal() {
        let one = C64::new(1.0, 0.0);
        assert!(PolarizationBasis::new([one, ZERO], [one, ZERO]).is_err());
        assert!(PolarizationBasis::new([one * 2.0, ZERO], [ZERO, one]).is_err());
    }

    #[test]
    fn degenerate_ensemble_reproduces_the_field() {
        let a = ClassicalFieldSample::new(C64::new(0.6, -0.1), C64::new(0.2, 0.5)).unwrap();
        let s = classical_stokes(&[a, a, a]).unwrap();
        let cross = 2.0 * a.amp_y.conj() * a.amp_x;
        assert!((s.values[0] - a.intensity()).abs() < 1e-15);
        assert!((s.values[2] - cross.re).abs() < 1e-15);
        assert!((s.values[3] - cross.im).abs() < 1e-15);
        assert!(s.std_errors.iter().all(|&e| e < 1e-15));
        assert!(classical_stokes(&[a]).is_err());
    }

    #[test]
    fn hidden_and_stokes_share_intensities() {
        let spec = HopsEnsembleSpec::new(1.0, 0.5, AmplitudeDistribution::Rayleigh { scale: 1.0 }).unwrap();
        let stats = EnsembleStats::from_samples(&sample_hops(&spec, 1000, 2).unwrap()).unwrap();
        assert_eq!(stats.s[0], stats.h[0]);
        assert_eq!(stats.s[1], stats.h[1]);
    }

    #[test]
    fn hops_hidden_coherence_survives_averaging() {
        let spec = HopsEnsembleSpec::new(1.3, -0.8, unit()).unwrap();
        let stats = EnsembleStats::from_samples(&sample_hops(&spec, 100_000, 21).unwrap()).unwrap();
        let expected = spec.expected_hidden_coherence();
        // h2 + i h3 does not depend on phi at all
        assert!((stats.h[2] - expected.re).abs() < 1e-12);
        assert!((stats.h[3] - expected.im).abs() < 1e-12);
        assert!((stats.s[1] + 1.3f64.cos()).abs() < 1e-12);
        for k in 2..4 {
            assert!(stats.s[k].abs() < 5.0 / (stats.sample_count as f64).sqrt() * stats.s[0]);
        }
    }

    #[test]
    fn ordinary_ensemble_has_no_hidden_coherence() {
        let spec = OrdinaryEnsembleSpec::new(1.0, 0.3, unit()).unwrap();
        let stats = EnsembleStats::from_samples(&sample_ordinary(&spec, 200_000, 4).unwrap()).unwrap();
        assert!(stats.h[2].abs() < 3.0 * stats.h_std_errors[2]);
        assert!(stats.h[3].abs() < 3.0 * stats.h_std_errors[3]);
        // while the ordinary Stokes vector survives: s2 + i s3 = sin chi e^{-i delta}
        assert!((stats.s[2] - 1f64.sin() * 0.3f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn std_errors_shrink_like_inverse_root_count() {
        let spec = HopsEnsembleSpec::new(FRAC_PI_2, 0.0, AmplitudeDistribution::Rayleigh { scale: 1.0 }).unwrap();
        let small = classical_stokes(&sample_hops(&spec, 10_000, 1).unwrap()).unwrap();
        let large = classical_stokes(&sample_hops(&spec, 1_000_000, 1).unwrap()).unwrap();
        for k in 0..4 {
            let ratio = small.std_errors[k] / large.std_errors[k];
            assert!((5.0..20.0).contains(&ratio), "component {k}: ratio {ratio}");
        }
    }

    #[test]
    fn rayleigh_mean_square() {
        let spec = HopsEnsembleSpec::new(FRAC_PI_2, 0.0, AmplitudeDistribution::Rayleigh { scale: 0.5 }).unwrap();
        let s = classical_stokes(&sample_hops(&spec, 200_000, 8).unwrap()).unwrap();
        assert!((s.values[0] - 0.5).abs() < 4.0 * s.std_errors[0]);
    }

    #[test]
    fn same_seed_same_stream() {
        let spec = HopsEnsembleSpec::new(0.9, 0.1, AmplitudeDistribution::Rayleigh { scale: 1.0 }).unwrap();
        assert_eq!(sample_hops(&spec, 50, 99).unwrap(), sample_hops(&spec, 50, 99).unwrap());
        assert_ne!(sample_hops(&spec, 50, 99).unwrap(), sample_hops(&spec, 50, 100).unwrap());
    }

    #[test]
    fn csv_layout() {
        let spec = HopsEnsembleSpec::new(FRAC_PI_2, 0.0, unit()).unwrap();
        let csv = EnsembleStats::from_samples(&sample_hops(&spec, 16, 0).unwrap())
            .unwrap()
            .to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "component,estimate,std_error,count");
        assert_eq!(lines.len(), 9);
        assert!(lines[1].starts_with("s0,") && lines[1].ends_with(",16"));
    }
}
