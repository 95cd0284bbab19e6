//! Matrix exponential by scaling and squaring around a Padé(13,13) core
//! (Higham 2005).

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::fock::{hermiticity_defect, Operator, C64, ONE, ZERO};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which Padé(13) reaches double precision unscaled.
const THETA_13: f64 = 5.371920351148152;

/// `exp(op)`.
///
/// When `op` is anti-Hermitian within `tol` the result is checked to be
/// unitary within `tol` as well.
pub fn matrix_exponential(op: &Operator, tol: f64) -> Result<Operator> {
    let a = op.matrix();
    let u = expm_dense(a)?;
    let anti_hermitian = hermiticity_defect(&a.mapv(|z| z * C64::new(0.0, 1.0))) <= tol;
    if anti_hermitian {
        let deviation = unitarity_defect(&u);
        if deviation > tol {
            return Err(Error::UnitarityLost(deviation));
        }
    }
    Operator::from_matrix(op.cutoff(), u)
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_defect(u: &Array2<C64>) -> f64 {
    let udu = u.t().mapv(|z| z.conj()).dot(u);
    let mut worst = 0.0_f64;
    for ((i, j), z) in udu.indexed_iter() {
        let target = if i == j { ONE } else { ZERO };
        worst = worst.max((z - target).norm());
    }
    worst
}

pub(crate) fn expm_dense(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix exponential needs a square matrix");
    if !a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(2f64.powi(-squarings), 0.0);

    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

fn one_norm(a: &Array2<C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade13(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let eye: Array2<C64> = Array2::eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_outer = a6.dot(&u_inner) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &eye * b(1);
    let u = a.dot(&u_outer);

    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&v_inner) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &eye * b(0);

    // (V - U)^{-1} (V + U)
    solve(&v - &u, &v + &u)
}

/// Solves `lhs * X = rhs` by LU with partial pivoting.
fn solve(mut lhs: Array2<C64>, mut rhs: Array2<C64>) -> Array2<C64> {
    let n = lhs.nrows();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lhs[[i, col]].norm().total_cmp(&lhs[[j, col]].norm()))
            .unwrap_or(col);
        if pivot != col {
            for k in 0..n {
                lhs.swap([col, k], [pivot, k]);
            }
            for k in 0..rhs.ncols() {
                rhs.swap([col, k], [pivot, k]);
            }
        }
        let diag = lhs[[col, col]];
        for row in (col + 1)..n {
            let factor = lhs[[row, col]] / diag;
            if factor == ZERO {
                continue;
            }
            for k in col..n {
                let v = lhs[[col, k]];
                lhs[[row, k]] -= factor * v;
            }
            for k in 0..rhs.ncols() {
                let v = rhs[[col, k]];
                rhs[[row, k]] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let diag = lhs[[col, col]];
        for k in 0..rhs.ncols() {
            let mut acc = rhs[[col, k]];
            for j in (col + 1)..n {
                acc -= lhs[[col, j]] * rhs[[j, k]];
            }
            rhs[[col, k]] = acc / diag;
        }
    }
    rhs
}
