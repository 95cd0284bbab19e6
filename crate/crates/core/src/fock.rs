//! Truncated two-mode Fock space.
//!
//! The joint basis state `|n_x, n_y>` lives at index `n_x * d_y + n_y`
//! (row-major over x, then y). Every module in the crate uses this ordering.
//!
//! Operators are stored densely. Products go through a kernel that skips
//! zero entries of the left factor, so ladder-operator algebra stays cheap
//! even at a few thousand basis states.

use std::fmt;

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for algebra that is exact on the truncated space.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for unitarity and trace preservation of evolved states.
pub const EVOLUTION_TOL: f64 = 1e-10;
/// Boundary population above which a truncated computation is not trusted.
pub const LEAKAGE_TOL: f64 = 1e-6;
/// Variances this far below zero are rounding noise and clamp to zero.
pub const VARIANCE_CLAMP: f64 = 1e-9;

/// Per-mode dimensions of the truncated space; mode `m` holds photon
/// numbers `0..d_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockCutoff {
    d_x: usize,
    d_y: usize,
}

impl FockCutoff {
    pub fn new(d_x: usize, d_y: usize) -> Result<Self> {
        if d_x < 2 || d_y < 2 {
            return Err(Error::InvalidCutoff { d_x, d_y });
        }
        Ok(Self { d_x, d_y })
    }

    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    pub fn d_x(&self) -> usize {
        self.d_x
    }

    pub fn d_y(&self) -> usize {
        self.d_y
    }

    pub fn levels(&self, mode: Mode) -> usize {
        match mode {
            Mode::X => self.d_x,
            Mode::Y => self.d_y,
        }
    }

    /// Joint dimension `d_x * d_y`.
    pub fn dim(&self) -> usize {
        self.d_x * self.d_y
    }

    pub fn index(&self, n_x: usize, n_y: usize) -> usize {
        debug_assert!(n_x < self.d_x && n_y < self.d_y);
        n_x * self.d_y + n_y
    }

    pub fn occupation(&self, index: usize) -> (usize, usize) {
        (index / self.d_y, index % self.d_y)
    }

    pub fn contains(&self, n_x: usize, n_y: usize) -> bool {
        n_x < self.d_x && n_y < self.d_y
    }

    /// True when both photon numbers sit at least `margin` levels below
    /// their cutoff.
    pub fn is_interior(&self, index: usize, margin: usize) -> bool {
        let (n_x, n_y) = self.occupation(index);
        n_x + margin < self.d_x && n_y + margin < self.d_y
    }

    pub(crate) fn check_same(&self, other: &FockCutoff) -> Result<()> {
        if self != other {
            return Err(Error::CutoffMismatch {
                left: *self,
                right: *other,
            });
        }
        Ok(())
    }
}

impl fmt::Display for FockCutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.d_x, self.d_y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    X,
    Y,
}

/// Dense complex matrix on the joint space of a [`FockCutoff`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    cutoff: FockCutoff,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn from_matrix(cutoff: FockCutoff, matrix: Array2<C64>) -> Result<Self> {
        let dim = cutoff.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::ShapeMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim,
            });
        }
        Ok(Self { cutoff, matrix })
    }

    pub fn zeros(cutoff: FockCutoff) -> Self {
        let dim = cutoff.dim();
        Self {
            cutoff,
            matrix: Array2::zeros((dim, dim)),
        }
    }

    pub fn identity(cutoff: FockCutoff) -> Self {
        Self {
            cutoff,
            matrix: Array2::eye(cutoff.dim()),
        }
    }

    /// Diagonal operator `f(n_x, n_y)` in the number basis.
    pub fn diagonal(cutoff: FockCutoff, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut op = Self::zeros(cutoff);
        for idx in 0..cutoff.dim() {
            let (n_x, n_y) = cutoff.occupation(idx);
            op.matrix[[idx, idx]] = f(n_x, n_y);
        }
        op
    }

    /// Truncated annihilation operator: `a|n> = sqrt(n)|n-1>` on the chosen
    /// mode, identity on the other.
    pub fn annihilation(cutoff: FockCutoff, mode: Mode) -> Self {
        let mut op = Self::zeros(cutoff);
        for col in 0..cutoff.dim() {
            let (n_x, n_y) = cutoff.occupation(col);
            let (n, row) = match mode {
                Mode::X if n_x > 0 => (n_x, cutoff.index(n_x - 1, n_y)),
                Mode::Y if n_y > 0 => (n_y, cutoff.index(n_x, n_y - 1)),
                _ => continue,
            };
            op.matrix[[row, col]] = C64::new((n as f64).sqrt(), 0.0);
        }
        op
    }

    pub fn creation(cutoff: FockCutoff, mode: Mode) -> Self {
        Self::annihilation(cutoff, mode).adjoint()
    }

    pub fn number(cutoff: FockCutoff, mode: Mode) -> Self {
        Self::diagonal(cutoff, |n_x, n_y| {
            let n = match mode {
                Mode::X => n_x,
                Mode::Y => n_y,
            };
            C64::new(n as f64, 0.0)
        })
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    /// Matrix element `<bra| op |ket>` between number states.
    pub fn element(&self, bra: (usize, usize), ket: (usize, usize)) -> C64 {
        self.matrix[[
            self.cutoff.index(bra.0, bra.1),
            self.cutoff.index(ket.0, ket.1),
        ]]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: self.matrix.t().mapv(|z| z.conj()),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: &self.matrix * factor,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.cutoff.check_same(&other.cutoff)?;
        Ok(Self {
            cutoff: self.cutoff,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.cutoff.check_same(&other.cutoff)?;
        Ok(Self {
            cutoff: self.cutoff,
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Matrix product `self * other`.
    pub fn product(&self, other: &Operator) -> Result<Self> {
        self.cutoff.check_same(&other.cutoff)?;
        Ok(Self {
            cutoff: self.cutoff,
            matrix: sparse_left_product(&self.matrix, &other.matrix),
        })
    }

    /// `self * self`.
    pub fn square(&self) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: sparse_left_product(&self.matrix, &self.matrix),
        }
    }

    /// `[self, other] = self * other - other * self`.
    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        let ab = self.product(other)?;
        let ba = other.product(self)?;
        ab.sub(&ba)
    }

    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        debug_assert_eq!(v.len(), self.cutoff.dim());
        let mut out = Array1::zeros(self.cutoff.dim());
        for (row, out_i) in self.matrix.outer_iter().zip(out.iter_mut()) {
            let mut acc = ZERO;
            for (&a, &x) in row.iter().zip(v.iter()) {
                if a != ZERO {
                    acc += a * x;
                }
            }
            *out_i = acc;
        }
        out
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Largest entry modulus restricted to rows and columns whose photon
    /// numbers sit at least `margin` levels below the cutoff.
    pub fn interior_max_abs(&self, margin: usize) -> f64 {
        let interior: Vec<usize> = (0..self.cutoff.dim())
            .filter(|&i| self.cutoff.is_interior(i, margin))
            .collect();
        let mut worst = 0.0_f64;
        for &i in &interior {
            for &j in &interior {
                worst = worst.max(self.matrix[[i, j]].norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `a * b`, skipping zero entries of `a`.
pub(crate) fn sparse_left_product(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    debug_assert_eq!(a.ncols(), b.nrows());
    let mut out = Array2::zeros((a.nrows(), b.ncols()));
    for (a_row, mut out_row) in a.outer_iter().zip(out.outer_iter_mut()) {
        for (k, &a_ik) in a_row.iter().enumerate() {
            if a_ik != ZERO {
                out_row.scaled_add(a_ik, &b.row(k));
            }
        }
    }
    out
}

pub(crate) fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

/// `Tr(a * b)` without forming the product.
pub(crate) fn trace_of_product(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    let mut acc = ZERO;
    for (i, a_row) in a.outer_iter().enumerate() {
        for (k, &a_ik) in a_row.iter().enumerate() {
            if a_ik != ZERO {
                acc += a_ik * b[[k, i]];
            }
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateRepr {
    Pure(Array1<C64>),
    Mixed(Array2<C64>),
}

/// Normalized pure state or density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    cutoff: FockCutoff,
    repr: StateRepr,
}

impl QuantumState {
    /// Pure state; the vector must already have unit norm within 1e-12.
    pub fn pure(cutoff: FockCutoff, amplitudes: Array1<C64>) -> Result<Self> {
        check_len(cutoff, amplitudes.len())?;
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = vector_norm(&amplitudes);
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidState(format!(
                "pure state norm {norm} differs from 1"
            )));
        }
        Ok(Self {
            cutoff,
            repr: StateRepr::Pure(amplitudes),
        })
    }

    /// Pure state rescaled to unit norm.
    pub fn normalized(cutoff: FockCutoff, amplitudes: Array1<C64>) -> Result<Self> {
        check_len(cutoff, amplitudes.len())?;
        let norm = vector_norm(&amplitudes);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState("vector cannot be normalized".into()));
        }
        let amplitudes = amplitudes.mapv(|z| z / norm);
        Ok(Self {
            cutoff,
            repr: StateRepr::Pure(amplitudes),
        })
    }

    /// Density matrix; must be Hermitian and unit-trace within 1e-12 with no
    /// eigenvalue below -1e-10.
    pub fn mixed(cutoff: FockCutoff, rho: Array2<C64>) -> Result<Self> {
        let dim = cutoff.dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::ShapeMismatch {
                rows: rho.nrows(),
                cols: rho.ncols(),
                dim,
            });
        }
        if !rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = hermiticity_defect(&rho);
        if defect > EXACT_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian (deviation {defect:e})"
            )));
        }
        let trace: C64 = rho.diag().sum();
        if (trace - ONE).norm() > EXACT_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix trace {trace} differs from 1"
            )));
        }
        if !is_positive_semidefinite(&rho, 1e-10) {
            return Err(Error::InvalidState(
                "density matrix has an eigenvalue below -1e-10".into(),
            ));
        }
        Ok(Self {
            cutoff,
            repr: StateRepr::Mixed(rho),
        })
    }

    /// Number state `|n_x, n_y>`.
    pub fn fock(cutoff: FockCutoff, n_x: usize, n_y: usize) -> Result<Self> {
        if !cutoff.contains(n_x, n_y) {
            return Err(Error::InvalidState(format!(
                "|{n_x},{n_y}> lies outside cutoff {cutoff}"
            )));
        }
        let mut v = Array1::zeros(cutoff.dim());
        v[cutoff.index(n_x, n_y)] = ONE;
        Ok(Self {
            cutoff,
            repr: StateRepr::Pure(v),
        })
    }

    pub fn vacuum(cutoff: FockCutoff) -> Self {
        Self::fock(cutoff, 0, 0).expect("vacuum is inside every cutoff")
    }

    /// Trusted constructors for states produced by unitary evolution.
    pub(crate) fn pure_unchecked(cutoff: FockCutoff, amplitudes: Array1<C64>) -> Self {
        Self {
            cutoff,
            repr: StateRepr::Pure(amplitudes),
        }
    }

    pub(crate) fn mixed_unchecked(cutoff: FockCutoff, rho: Array2<C64>) -> Self {
        Self {
            cutoff,
            repr: StateRepr::Mixed(rho),
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, StateRepr::Pure(_))
    }

    pub fn density_matrix(&self) -> Array2<C64> {
        match &self.repr {
            StateRepr::Pure(psi) => {
                let n = psi.len();
                Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj())
            }
            StateRepr::Mixed(rho) => rho.clone(),
        }
    }

    /// Probability of basis state `index`.
    pub fn population(&self, index: usize) -> f64 {
        match &self.repr {
            StateRepr::Pure(psi) => psi[index].norm_sqr(),
            StateRepr::Mixed(rho) => rho[[index, index]].re,
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(psi) => psi.iter().map(|z| z.norm_sqr()).sum(),
            StateRepr::Mixed(rho) => rho.diag().iter().map(|z| z.re).sum(),
        }
    }

    /// Largest entrywise difference of the amplitudes (both pure) or of the
    /// density matrices.
    pub fn max_abs_diff(&self, other: &QuantumState) -> Result<f64> {
        self.cutoff.check_same(&other.cutoff)?;
        let diff = match (&self.repr, &other.repr) {
            (StateRepr::Pure(a), StateRepr::Pure(b)) => {
                Zip::from(a).and(b).fold(0.0_f64, |m, x, y| m.max((x - y).norm()))
            }
            _ => {
                let a = self.density_matrix();
                let b = other.density_matrix();
                Zip::from(&a).and(&b).fold(0.0_f64, |m, x, y| m.max((x - y).norm()))
            }
        };
        Ok(diff)
    }
}

fn check_len(cutoff: FockCutoff, len: usize) -> Result<()> {
    if len != cutoff.dim() {
        return Err(Error::ShapeMismatch {
            rows: len,
            cols: 1,
            dim: cutoff.dim(),
        });
    }
    Ok(())
}

fn vector_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Cholesky of `m + shift * I`; succeeds iff the smallest eigenvalue of the
/// Hermitian matrix `m` is above `-shift` (up to rounding).
fn is_positive_semidefinite(m: &Array2<C64>, shift: f64) -> bool {
    let n = m.nrows();
    let off_diagonal_zero = (0..n).all(|i| (0..n).all(|j| i == j || m[[i, j]] == ZERO));
    if off_diagonal_zero {
        return m.diag().iter().all(|z| z.re >= -shift);
    }
    let mut l: Array2<C64> = Array2::zeros((n, n));
    for j in 0..n {
        let mut d = m[[j, j]].re + shift;
        for k in 0..j {
            d -= l[[j, k]].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        l[[j, j]] = C64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = m[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]].conj();
            }
            l[[i, j]] = s / d;
        }
    }
    true
}

/// `<op>` in `state`: `<psi|op|psi>` or `Tr(rho op)`.
pub fn expectation(op: &Operator, state: &QuantumState) -> Result<C64> {
    op.cutoff.check_same(&state.cutoff)?;
    Ok(match &state.repr {
        StateRepr::Pure(psi) => {
            let o_psi = op.apply(psi);
            psi.iter().zip(o_psi.iter()).map(|(a, b)| a.conj() * b).sum()
        }
        StateRepr::Mixed(rho) => trace_of_product(&op.matrix, rho),
    })
}

/// `<op^2> - <op>^2` for a Hermitian `op`, clamped to zero when rounding
/// pushes it slightly negative.
pub fn variance(op: &Operator, state: &QuantumState) -> Result<f64> {
    op.cutoff.check_same(&state.cutoff)?;
    let defect = op.hermiticity_defect();
    if defect > EVOLUTION_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let (mean, second) = match &state.repr {
        StateRepr::Pure(psi) => {
            let o_psi = op.apply(psi);
            let mean: C64 = psi.iter().zip(o_psi.iter()).map(|(a, b)| a.conj() * b).sum();
            let second: f64 = o_psi.iter().map(|z| z.norm_sqr()).sum();
            (mean.re, second)
        }
        StateRepr::Mixed(rho) => {
            let o_rho = sparse_left_product(&op.matrix, rho);
            let mean = o_rho.diag().sum().re;
            let second = trace_of_product(&o_rho, &op.matrix).re;
            (mean, second)
        }
    };
    Ok(clamp_variance(second - mean * mean))
}

pub(crate) fn clamp_variance(v: f64) -> f64 {
    if v < 0.0 && v >= -VARIANCE_CLAMP {
        0.0
    } else {
        v
    }
}

/// Total population with `n_x >= d_x - margin` or `n_y >= d_y - margin`.
///
/// Panics if `margin` is not below both mode dimensions.
pub fn boundary_leakage(state: &QuantumState, margin: usize) -> f64 {
    let cutoff = state.cutoff;
    assert!(
        margin < cutoff.d_x.min(cutoff.d_y),
        "leakage margin {margin} must be below the smaller mode dimension of {cutoff}"
    );
    (0..cutoff.dim())
        .filter(|&i| {
            let (n_x, n_y) = cutoff.occupation(i);
            n_x + margin >= cutoff.d_x || n_y + margin >= cutoff.d_y
        })
        .map(|i| state.population(i))
        .sum()
}
