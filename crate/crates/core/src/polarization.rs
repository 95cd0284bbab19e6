//! Stokes and hidden-polarization operator families on the two-mode space.
//!
//! Stokes operators are built from the conjugated product `a_y^dagger a_x`,
//! hidden-polarization operators from the non-conjugated product `a_y a_x`:
//!
//! ```text
//! S0 = N_y + N_x      S1 = N_y - N_x      S2 + i S3 = 2 a_y^dagger a_x
//! H0 = N_y + N_x      H1 = N_y - N_x      H2 + i H3 = 2 e^{2i wt} a_y a_x
//! ```
//!
//! In the interaction picture the phase factor `e^{2i wt}` is 1.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    boundary_leakage, expectation, sparse_left_product, variance, FockCutoff,
    Mode, Operator, QuantumState, StateRepr, C64, I, ONE, ZERO,
};

/// Residual threshold used by the verdict tables.
pub const ALGEBRA_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StokesSet {
    pub s0: Operator,
    pub s1: Operator,
    pub s2: Operator,
    pub s3: Operator,
}

impl StokesSet {
    pub fn components(&self) -> [&Operator; 4] {
        [&self.s0, &self.s1, &self.s2, &self.s3]
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.s0.cutoff()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PhaseConvention {
    InteractionPicture,
    /// Keeps the factor `e^{2i omega_t}` with the given `omega_t`.
    ExplicitPhase { omega_t: f64 },
}

impl PhaseConvention {
    fn factor(self) -> C64 {
        match self {
            PhaseConvention::InteractionPicture => ONE,
            PhaseConvention::ExplicitPhase { omega_t } => C64::from_polar(1.0, 2.0 * omega_t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HiddenSet {
    pub h0: Operator,
    pub h1: Operator,
    pub h2: Operator,
    pub h3: Operator,
    pub convention: PhaseConvention,
}

impl HiddenSet {
    pub fn components(&self) -> [&Operator; 4] {
        [&self.h0, &self.h1, &self.h2, &self.h3]
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.h0.cutoff()
    }
}

fn total_and_difference(cutoff: FockCutoff) -> (Operator, Operator) {
    let sum = Operator::diagonal(cutoff, |n_x, n_y| C64::new((n_y + n_x) as f64, 0.0));
    let diff = Operator::diagonal(cutoff, |n_x, n_y| C64::new(n_y as f64 - n_x as f64, 0.0));
    (sum, diff)
}

/// Builds `(X + X^dagger, -i (X - X^dagger))` for `X = factor * base`.
fn hermitian_pair(base: &Operator, factor: C64) -> (Operator, Operator) {
    let x = base.scale(factor);
    let xd = x.adjoint();
    let re = x.add(&xd).expect("same cutoff");
    let im = x.sub(&xd).expect("same cutoff").scale(-I);
    (re, im)
}

pub fn build_stokes(cutoff: FockCutoff) -> StokesSet {
    let (s0, s1) = total_and_difference(cutoff);
    let a_x = Operator::annihilation(cutoff, Mode::X);
    let ad_y = Operator::creation(cutoff, Mode::Y);
    let raise_y_lower_x = ad_y.product(&a_x).expect("same cutoff");
    let (s2, s3) = hermitian_pair(&raise_y_lower_x, ONE);
    StokesSet { s0, s1, s2, s3 }
}

pub fn build_hidden(cutoff: FockCutoff, convention: PhaseConvention) -> HiddenSet {
    let (h0, h1) = total_and_difference(cutoff);
    let a_x = Operator::annihilation(cutoff, Mode::X);
    let a_y = Operator::annihilation(cutoff, Mode::Y);
    let pair_lowering = a_y.product(&a_x).expect("same cutoff");
    let (h2, h3) = hermitian_pair(&pair_lowering, convention.factor());
    HiddenSet {
        h0,
        h1,
        h2,
        h3,
        convention,
    }
}

/// Which version of a relation a verdict row checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationForm {
    /// Exactly as the reference table prints it.
    AsPrinted,
    /// The printed relation with the sign of its right-hand side flipped.
    SignCorrected,
    /// Closure of the cyclic su(2) relations.
    Cyclic,
    /// Quadratic operator identity.
    Identity,
}

impl RelationForm {
    pub fn tag(self) -> &'static str {
        match self {
            RelationForm::AsPrinted => "as_printed",
            RelationForm::SignCorrected => "sign_corrected",
            RelationForm::Cyclic => "cyclic",
            RelationForm::Identity => "identity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationVerdict {
    pub relation: String,
    pub residual: f64,
    pub passed: bool,
    pub form: RelationForm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictTable {
    pub rows: Vec<RelationVerdict>,
    pub tolerance: f64,
    pub probe_margin: usize,
}

impl VerdictTable {
    /// True when every relation holds in at least one of the forms tested
    /// for it.
    pub fn algebra_closes(&self) -> bool {
        let mut groups: Vec<(&str, bool)> = Vec::new();
        for row in &self.rows {
            let key = relation_key(&row.relation);
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, ok)) => *ok |= row.passed,
                None => groups.push((key, row.passed)),
            }
        }
        groups.iter().all(|(_, ok)| *ok)
    }

    pub fn row(&self, relation: &str, form: RelationForm) -> Option<&RelationVerdict> {
        self.rows
            .iter()
            .find(|r| r.relation == relation && r.form == form)
    }

    pub fn max_residual_passing(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.passed)
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }

    /// `relation,residual,pass,form`; relation names are quoted because
    /// they contain commas.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("relation,residual,pass,form\n");
        for r in &self.rows {
            out.push_str(&format!(
                "\"{}\",{},{},{}\n",
                r.relation,
                r.residual,
                if r.passed { "pass" } else { "fail" },
                r.form.tag()
            ));
        }
        out
    }
}

/// Left-hand side of a relation string, used to group printed and
/// corrected forms of the same commutator.
fn relation_key(relation: &str) -> &str {
    relation.split('=').next().unwrap_or(relation).trim()
}

enum Rhs<'a> {
    Zero,
    Scaled(C64, &'a Operator),
}

struct Relation<'a> {
    name: String,
    left: &'a Operator,
    right: &'a Operator,
    rhs: Rhs<'a>,
    form: RelationForm,
}

fn commutator_residual(
    left: &Operator,
    right: &Operator,
    rhs: &Operator,
    margin: usize,
) -> f64 {
    left.commutator(right)
        .and_then(|c| c.sub(rhs))
        .expect("operators share one cutoff")
        .interior_max_abs(margin)
}

fn evaluate(relations: Vec<Relation<'_>>, margin: usize, tol: f64) -> Vec<RelationVerdict> {
    let mut rows = Vec::new();
    for rel in relations {
        let cutoff = rel.left.cutoff();
        let rhs = match rel.rhs {
            Rhs::Zero => Operator::zeros(cutoff),
            Rhs::Scaled(c, op) => op.scale(c),
        };
        let residual = commutator_residual(rel.left, rel.right, &rhs, margin);
        let passed = residual < tol;
        rows.push(RelationVerdict {
            relation: rel.name.clone(),
            residual,
            passed,
            form: rel.form,
        });
        // A printed relation that fails is re-tested with the opposite sign
        // and reported next to it; the printed row keeps its failure.
        if !passed && rel.form == RelationForm::AsPrinted {
            if let Rhs::Scaled(c, op) = rel.rhs {
                let flipped = op.scale(-c);
                let residual = commutator_residual(rel.left, rel.right, &flipped, margin);
                rows.push(RelationVerdict {
                    relation: flip_sign(&rel.name),
                    residual,
                    passed: residual < tol,
                    form: RelationForm::SignCorrected,
                });
            }
        }
    }
    rows
}

fn flip_sign(name: &str) -> String {
    match name.split_once("= ") {
        Some((lhs, rhs)) => format!("{lhs}= -{rhs}"),
        None => name.to_string(),
    }
}

/// Checks the hidden-operator commutation table and the quadratic identity
/// `H1^2 + H2^2 + H3^2 = H0^2 + 2(1 + H0)` on the interior block.
pub fn verify_hidden_commutators(set: &HiddenSet, probe_margin: usize) -> VerdictTable {
    assert!(probe_margin >= 2, "probe margin must be at least 2");
    let cutoff = set.cutoff();
    let one_plus_h0 = Operator::identity(cutoff).add(&set.h0).expect("same cutoff");
    let two_i = C64::new(0.0, 2.0);
    let rel = |name: &str, left, right, rhs| Relation {
        name: name.to_string(),
        left,
        right,
        rhs,
        form: RelationForm::AsPrinted,
    };
    let relations = vec![
        rel("[H1,H0] = 0", &set.h1, &set.h0, Rhs::Zero),
        rel("[H1,H2] = 0", &set.h1, &set.h2, Rhs::Zero),
        rel("[H1,H3] = 0", &set.h1, &set.h3, Rhs::Zero),
        rel("[H0,H2] = 2iH3", &set.h0, &set.h2, Rhs::Scaled(two_i, &set.h3)),
        rel("[H0,H3] = 2iH2", &set.h0, &set.h3, Rhs::Scaled(two_i, &set.h2)),
        rel(
            "[H2,H3] = 2i(1+H0)",
            &set.h2,
            &set.h3,
            Rhs::Scaled(two_i, &one_plus_h0),
        ),
    ];
    let mut rows = evaluate(relations, probe_margin, ALGEBRA_TOL);

    let lhs = set
        .h1
        .square()
        .add(&set.h2.square())
        .and_then(|s| s.add(&set.h3.square()))
        .expect("same cutoff");
    let rhs = set
        .h0
        .square()
        .add(&one_plus_h0.scale(C64::new(2.0, 0.0)))
        .expect("same cutoff");
    let residual = lhs.sub(&rhs).expect("same cutoff").interior_max_abs(probe_margin);
    rows.push(RelationVerdict {
        relation: "H1^2+H2^2+H3^2 = H0^2+2(1+H0)".to_string(),
        residual,
        passed: residual < ALGEBRA_TOL,
        form: RelationForm::Identity,
    });

    VerdictTable {
        rows,
        tolerance: ALGEBRA_TOL,
        probe_margin,
    }
}

/// Checks the Stokes table: `[S0, Sj] = 0`, the three relations as printed
/// (the third printed as `[S3,S2] = 2iS1`), and the cyclic closure
/// `[S3,S1] = 2iS2`.
pub fn verify_stokes_commutators(set: &StokesSet, probe_margin: usize) -> VerdictTable {
    assert!(probe_margin >= 2, "probe margin must be at least 2");
    let two_i = C64::new(0.0, 2.0);
    let rel = |name: &str, left, right, rhs, form| Relation {
        name: name.to_string(),
        left,
        right,
        rhs,
        form,
    };
    use RelationForm::{AsPrinted, Cyclic};
    let relations = vec![
        rel("[S0,S1] = 0", &set.s0, &set.s1, Rhs::Zero, AsPrinted),
        rel("[S0,S2] = 0", &set.s0, &set.s2, Rhs::Zero, AsPrinted),
        rel("[S0,S3] = 0", &set.s0, &set.s3, Rhs::Zero, AsPrinted),
        rel("[S1,S2] = 2iS3", &set.s1, &set.s2, Rhs::Scaled(two_i, &set.s3), AsPrinted),
        rel("[S2,S3] = 2iS1", &set.s2, &set.s3, Rhs::Scaled(two_i, &set.s1), AsPrinted),
        rel("[S3,S2] = 2iS1", &set.s3, &set.s2, Rhs::Scaled(two_i, &set.s1), AsPrinted),
        rel("[S3,S1] = 2iS2", &set.s3, &set.s1, Rhs::Scaled(two_i, &set.s2), Cyclic),
    ];
    VerdictTable {
        rows: evaluate(relations, probe_margin, ALGEBRA_TOL),
        tolerance: ALGEBRA_TOL,
        probe_margin,
    }
}

/// One Robertson-type product: `lhs = Var(A) Var(B)`, `rhs = |<C>|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyProduct {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl UncertaintyProduct {
    /// `lhs >= rhs - 1e-8 * scale` with `scale = max(1, lhs, rhs)`.
    pub fn holds(&self) -> bool {
        let scale = self.lhs.abs().max(self.rhs.abs()).max(1.0);
        self.lhs >= self.rhs - 1e-8 * scale
    }
}

pub fn uncertainty_products(
    set: &HiddenSet,
    state: &QuantumState,
) -> Result<[UncertaintyProduct; 3]> {
    let leakage = boundary_leakage(state, 1);
    if leakage > crate::fock::LEAKAGE_TOL {
        return Err(Error::TruncationInsufficient {
            leakage,
            tolerance: crate::fock::LEAKAGE_TOL,
        });
    }
    let mut var = [0.0; 4];
    let mut mean = [0.0; 4];
    for (k, op) in set.components().into_iter().enumerate() {
        var[k] = variance(op, state)?;
        mean[k] = expectation(op, state)?.re;
    }
    let product = |label: &str, a: usize, b: usize, c: usize| UncertaintyProduct {
        label: label.to_string(),
        lhs: var[a] * var[b],
        rhs: mean[c] * mean[c],
    };
    Ok([
        product("Var(H0)Var(H2) >= |<H3>|^2", 0, 2, 3),
        product("Var(H2)Var(H3) >= |<H0>|^2", 2, 3, 0),
        product("Var(H3)Var(H0) >= |<H2>|^2", 3, 0, 2),
    ])
}

/// Least-squares hidden polarization index of a state.
///
/// `p_h` minimizes `||a_y rho - p_h a_x^dagger rho||_F / ||rho||_F`;
/// `residual` is that minimum. `printed_p_h`/`printed_residual` are the
/// same fit for the right-multiplied form `a_y rho = p rho a_x^dagger`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopsFit {
    pub p_h: C64,
    pub residual: f64,
    pub printed_p_h: C64,
    pub printed_residual: f64,
}

pub fn fit_hops_criterion(state: &QuantumState) -> Result<HopsFit> {
    match state.repr() {
        StateRepr::Pure(psi) => fit_hops_pure(state.cutoff(), psi),
        StateRepr::Mixed(rho) => fit_hops_matrix(state.cutoff(), rho),
    }
}

/// Same fit for `rho = |psi><psi|` without forming `rho`: with `u = a_y psi`,
/// `v = a_x^dagger psi`, `w = a_x psi` the two residuals involve only the
/// rank-one matrices `u psi^dagger`, `v psi^dagger` and `psi w^dagger`.
fn fit_hops_pure(cutoff: FockCutoff, psi: &Array1<C64>) -> Result<HopsFit> {
    let a_x = Operator::annihilation(cutoff, Mode::X);
    let a_y = Operator::annihilation(cutoff, Mode::Y);
    let u = a_y.apply(psi);
    let v = a_x.adjoint().apply(psi);
    let w = a_x.apply(psi);
    let dot = |a: &Array1<C64>, b: &Array1<C64>| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let psi2 = dot(psi, psi).re;
    let (v2, w2, u2) = (dot(&v, &v).re, dot(&w, &w).re, dot(&u, &u).re);
    if v2 == 0.0 || psi2 == 0.0 {
        return Err(Error::UndefinedFit);
    }
    let p_h = dot(&v, &u) / v2;
    let residual = (&u - &v.mapv(|z| z * p_h)).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        / psi2.sqrt();
    let (printed_p_h, printed_residual) = if w2 == 0.0 {
        (ZERO, f64::NAN)
    } else {
        let overlap = dot(psi, &u) * dot(psi, &w);
        let p = overlap / (psi2 * w2);
        let r2 = u2 * psi2 - overlap.norm_sqr() / (psi2 * w2);
        (p, r2.max(0.0).sqrt() / psi2)
    };
    Ok(HopsFit {
        p_h,
        residual,
        printed_p_h,
        printed_residual,
    })
}

/// As [`fit_hops_criterion`] for an arbitrary (unnormalized) Hermitian
/// matrix.
pub fn fit_hops_matrix(cutoff: FockCutoff, rho: &Array2<C64>) -> Result<HopsFit> {
    let a_x = Operator::annihilation(cutoff, Mode::X);
    let a_y = Operator::annihilation(cutoff, Mode::Y);
    let lowered_y = sparse_left_product(a_y.matrix(), rho);
    let raised_x = sparse_left_product(a_x.adjoint().matrix(), rho);
    // rho a_x^dagger = (a_x rho)^dagger for Hermitian rho
    let raised_x_right = sparse_left_product(a_x.matrix(), rho).t().mapv(|z| z.conj());
    let rho_norm = frobenius(rho);
    let (p_h, residual) =
        least_squares_ratio(&lowered_y, &raised_x, rho_norm).ok_or(Error::UndefinedFit)?;
    let (printed_p_h, printed_residual) =
        least_squares_ratio(&lowered_y, &raised_x_right, rho_norm).unwrap_or((ZERO, f64::NAN));
    Ok(HopsFit {
        p_h,
        residual,
        printed_p_h,
        printed_residual,
    })
}

/// `p = <b, a>_F / ||b||^2` minimizing `||a - p b||`; `None` if `b = 0`.
fn least_squares_ratio(a: &Array2<C64>, b: &Array2<C64>, norm: f64) -> Option<(C64, f64)> {
    let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    if bb == 0.0 || norm == 0.0 {
        return None;
    }
    let ba: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let p = ba / bb;
    let residual = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - p * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Some((p, residual / norm))
}

fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orders `(m_x, m_y, n_x, n_y)` of a normally ordered moment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoherenceOrder {
    pub m_x: usize,
    pub m_y: usize,
    pub n_x: usize,
    pub n_y: usize,
}

impl CoherenceOrder {
    pub fn new(m_x: usize, m_y: usize, n_x: usize, n_y: usize) -> Self {
        Self { m_x, m_y, n_x, n_y }
    }

    /// All orders with `m_x + m_y <= max` and `n_x + n_y <= max`.
    pub fn up_to(max: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for m in 0..=max {
            for n in 0..=max {
                for m_x in 0..=m {
                    for n_x in 0..=n {
                        out.push(Self::new(m_x, m - m_x, n_x, n - n_x));
                    }
                }
            }
        }
        out
    }

    fn check(&self, cutoff: FockCutoff) -> Result<()> {
        let x_reach = self.m_x + self.m_y + self.n_x + self.n_y;
        let y_reach = self.m_y + self.n_y;
        if x_reach + 2 > cutoff.d_x() || y_reach + 2 > cutoff.d_y() {
            return Err(Error::OrderTooHigh {
                m_x: self.m_x,
                m_y: self.m_y,
                n_x: self.n_x,
                n_y: self.n_y,
                cutoff,
            });
        }
        Ok(())
    }
}

/// One factor `a^k` or `(a^dagger)^k` of a ladder-operator monomial.
#[derive(Clone, Copy)]
struct Ladder {
    mode: Mode,
    raise: bool,
    power: usize,
}

fn ladder(mode: Mode, raise: bool, power: usize) -> Ladder {
    Ladder { mode, raise, power }
}

/// `a v` or `a^dagger v` in O(D), truncating at the cutoff.
fn ladder_apply(cutoff: FockCutoff, mode: Mode, raise: bool, v: &Array1<C64>) -> Array1<C64> {
    let mut out = Array1::zeros(v.len());
    for (i, &z) in v.iter().enumerate() {
        if z == ZERO {
            continue;
        }
        let (n_x, n_y) = cutoff.occupation(i);
        let n = match mode {
            Mode::X => n_x,
            Mode::Y => n_y,
        };
        let target = match (raise, n) {
            (false, 0) => continue,
            (false, n) => (n - 1, (n as f64).sqrt()),
            (true, n) if n + 1 < cutoff.levels(mode) => (n + 1, ((n + 1) as f64).sqrt()),
            (true, _) => continue,
        };
        let j = match mode {
            Mode::X => cutoff.index(target.0, n_y),
            Mode::Y => cutoff.index(n_x, target.0),
        };
        out[j] += z * target.1;
    }
    out
}

/// `F_1 F_2 ... F_k v`, rightmost factor first.
fn monomial_apply(cutoff: FockCutoff, factors: &[Ladder], v: &Array1<C64>) -> Array1<C64> {
    factors.iter().rev().fold(v.clone(), |acc, f| {
        (0..f.power).fold(acc, |w, _| ladder_apply(cutoff, f.mode, f.raise, &w))
    })
}

/// `Tr[rho F_1 ... F_k]`.
fn moment(state: &QuantumState, factors: &[Ladder]) -> C64 {
    let cutoff = state.cutoff();
    match state.repr() {
        StateRepr::Pure(psi) => {
            let w = monomial_apply(cutoff, factors, psi);
            psi.iter().zip(&w).map(|(a, b)| a.conj() * b).sum()
        }
        StateRepr::Mixed(rho) => (0..rho.ncols())
            .map(|j| monomial_apply(cutoff, factors, &rho.column(j).to_owned())[j])
            .sum(),
    }
}

/// Normally ordered moment
/// `Tr[rho a_x^dagger^{m_x} a_y^dagger^{m_y} a_x^{n_x} a_y^{n_y}]`.
pub fn coherence_function(state: &QuantumState, order: CoherenceOrder) -> Result<C64> {
    order.check(state.cutoff())?;
    Ok(moment(
        state,
        &[
            ladder(Mode::X, true, order.m_x),
            ladder(Mode::Y, true, order.m_y),
            ladder(Mode::X, false, order.n_x),
            ladder(Mode::Y, false, order.n_y),
        ],
    ))
}

/// Comparison of a two-mode moment with its single-mode reduction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCheck {
    pub order: CoherenceOrder,
    pub two_mode: C64,
    /// `p*^{m_y} p^{n_y} Tr[rho a_x^{m_y} a_x^dagger^{m_x} a_x^{n_x} a_x^dagger^{n_y}]`,
    /// the reduction implied by `a_y rho = p a_x^dagger rho`.
    pub reduced: C64,
    /// `p*^{m_y} p^{n_y} Gamma^{(m_x+m_y, 0, n_x+n_y, 0)}`, the normally
    /// ordered single-mode form.
    pub normal_ordered: C64,
    pub reduced_residual: f64,
    pub normal_ordered_residual: f64,
}

pub fn factorization_check(
    state: &QuantumState,
    p_h: C64,
    order: CoherenceOrder,
) -> Result<FactorizationCheck> {
    let cutoff = state.cutoff();
    order.check(cutoff)?;
    let two_mode = coherence_function(state, order)?;
    let weight = p_h.conj().powu(order.m_y as u32) * p_h.powu(order.n_y as u32);

    let reduced = weight
        * moment(
            state,
            &[
                ladder(Mode::X, false, order.m_y),
                ladder(Mode::X, true, order.m_x),
                ladder(Mode::X, false, order.n_x),
                ladder(Mode::X, true, order.n_y),
            ],
        );

    let single = coherence_function(
        state,
        CoherenceOrder::new(order.m_x + order.m_y, 0, order.n_x + order.n_y, 0),
    )?;
    let normal_ordered = weight * single;

    Ok(FactorizationCheck {
        order,
        two_mode,
        reduced,
        normal_ordered,
        reduced_residual: (two_mode - reduced).norm(),
        normal_ordered_residual: (two_mode - normal_ordered).norm(),
    })
}

/// Largest `|H_k - H_k^dagger|` over all eight operators.
pub fn max_hermiticity_defect(stokes: &StokesSet, hidden: &HiddenSet) -> f64 {
    stokes
        .components()
        .into_iter()
        .chain(hidden.components())
        .map(Operator::hermiticity_defect)
        .fold(0.0, f64::max)
}
