//! Small dense linear-algebra helpers on top of nalgebra.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::tolerance::{classify, Band};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex<f64>>;
pub type C64 = Complex<f64>;

pub fn max_abs(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn cmax_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

/// Argument in `(-pi, pi]`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

pub fn complexify(re: &RMat, im: &RMat) -> CMat {
    CMat::from_fn(re.nrows(), re.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

/// Principal eigenphases of a unitary matrix, in `(-pi, pi]`.
///
/// Eigenphases of a unitary matrix; `tol` bounds the off-diagonal residual
/// of the diagonalization.
pub fn unitary_eigenphases(u: &CMat, tol: f64) -> Result<Vec<f64>> {
    Ok(unitary_schur(u, tol)?.1)
}

/// Midpoint of the widest gap between the given angles on the circle.
pub(crate) fn widest_gap_midpoint(phases: &[f64]) -> f64 {
    if phases.is_empty() {
        return PI / 2.0;
    }
    let mut sorted: Vec<f64> = phases.iter().map(|&p| wrap_angle(p)).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut best = (
        sorted[0] + 2.0 * PI - sorted[sorted.len() - 1],
        sorted[sorted.len() - 1],
    );
    for pair in sorted.windows(2) {
        let gap = pair[1] - pair[0];
        if gap > best.0 {
            best = (gap, pair[0]);
        }
    }
    wrap_angle(best.1 + best.0 / 2.0)
}

/// `u = Z diag(e^{iφ}) Z*` for a unitary `u`; returns `Z` and the phases.
///
/// Diagonalizes the Hermitian Cayley transform `i (z0 + u)(z0 - u)^{-1}`,
/// which has the eigenvectors of `u` and separates distinct eigenvalues.
/// `z0 = e^{iψ}` sits in the widest gap of the candidate phases `±acos`
/// of the eigenvalues of `(u + u*)/2`, a superset of the true ones, so it
/// stays at least `π/2n` away from the spectrum.
pub fn unitary_schur(u: &CMat, tol: f64) -> Result<(CMat, Vec<f64>)> {
    let n = u.nrows();
    if n == 0 {
        return Ok((CMat::zeros(0, 0), Vec::new()));
    }
    let re = (u + u.adjoint()) * C64::new(0.5, 0.0);
    let mut candidates = Vec::with_capacity(2 * n);
    for c in SymmetricEigen::new(re).eigenvalues.iter() {
        let a = c.clamp(-1.0, 1.0).acos();
        candidates.extend([a, -a]);
    }
    let z0 = C64::from_polar(1.0, widest_gap_midpoint(&candidates));
    let id = CMat::identity(n, n);
    let inv = (&id * z0 - u)
        .try_inverse()
        .ok_or_else(|| Error::IllConditioned("Cayley transform of a unitary matrix is singular".into()))?;
    let k = (&id * z0 + u) * inv * C64::i();
    let herm = (&k + k.adjoint()) * C64::new(0.5, 0.0);
    let z = SymmetricEigen::new(herm).eigenvectors;
    let t = z.adjoint() * u * &z;
    let mut off = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                off = off.max(t[(i, j)].norm());
            }
        }
    }
    if off > tol {
        return Err(Error::IllConditioned(format!(
            "unitary matrix not diagonalized (residual {off:.3e})"
        )));
    }
    Ok((z, (0..n).map(|i| principal_arg(t[(i, i)])).collect()))
}

/// Eigenvalues of a real symmetric matrix (symmetrized first), ascending.
pub fn symmetric_eigenvalues(m: &RMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = (m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Counts of positive, negative and null eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub null: usize,
}

/// Sign counts of a symmetric matrix. The null threshold is
/// `tol_sig * max(1, largest |eigenvalue|)`; eigenvalues within one decade of
/// it are an error.
pub fn inertia(m: &RMat, tol_sig: f64) -> Result<Inertia> {
    let ev = symmetric_eigenvalues(m);
    let scale = ev.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let threshold = tol_sig * scale;
    let mut out = Inertia {
        positive: 0,
        negative: 0,
        null: 0,
    };
    for &v in &ev {
        match classify(v, threshold) {
            Band::Below => out.null += 1,
            Band::Above if v > 0.0 => out.positive += 1,
            Band::Above => out.negative += 1,
            Band::Ambiguous => {
                return Err(Error::IllConditioned(format!(
                    "eigenvalue {v:.3e} too close to the null threshold {threshold:.3e}"
                )))
            }
        }
    }
    Ok(out)
}

/// Singular values, descending.
pub fn singular_values(m: &RMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Singular values of a complex matrix, descending.
pub fn complex_singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values at or below `tol_rank * max(1, sigma_max)`,
/// erroring when one falls inside the ambiguity band.
pub fn corank_from_singular_values(s: &[f64], tol_rank: f64) -> Result<usize> {
    let scale = s.iter().fold(1.0f64, |acc, v| acc.max(*v));
    let threshold = tol_rank * scale;
    let mut k = 0;
    for &v in s {
        match classify(v, threshold) {
            Band::Below => k += 1,
            Band::Above => {}
            Band::Ambiguous => {
                return Err(Error::IllConditioned(format!(
                    "singular value {v:.3e} within the ambiguity band of {threshold:.3e}"
                )))
            }
        }
    }
    Ok(k)
}

/// Orthonormal basis (as columns) of the right null space of a square real
/// matrix, taking the `dim` smallest right singular vectors.
pub fn null_space(m: &RMat, dim: usize) -> RMat {
    let cols = m.ncols();
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let mut basis = RMat::zeros(cols, dim);
    for (c, &idx) in order.iter().take(dim).enumerate() {
        for r in 0..cols {
            basis[(r, c)] = v_t[(idx, r)];
        }
    }
    basis
}

/// `f(A)` for a real symmetric `A`, applied through its eigendecomposition.
pub fn symmetric_function(a: &RMat, f: impl Fn(f64) -> f64) -> RMat {
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let q = &eig.eigenvectors;
    let d = RMat::from_diagonal(&eig.eigenvalues.map(f));
    q * d * q.transpose()
}

pub fn block_diag(a: &RMat, b: &RMat) -> RMat {
    let mut m = RMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn cblock_diag(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_arg_is_half_open() {
        assert_eq!(principal_arg(C64::new(-1.0, -0.0)), PI);
        assert_eq!(principal_arg(C64::new(-1.0, 0.0)), PI);
        assert!((principal_arg(C64::new(0.0, -1.0)) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn wrap_angle_range() {
        for a in [-7.0, -PI, 0.0, PI, 3.5, 10.0] {
            let w = wrap_angle(a);
            assert!(w > -PI - 1e-15 && w <= PI + 1e-15);
            assert!((a.cos() - w.cos()).abs() < 1e-12 && (a.sin() - w.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenphases_of_diagonal_unitary() {
        let u = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::from_polar(1.0, 0.3),
            C64::from_polar(1.0, -2.0),
        ]));
        let mut ph = unitary_eigenphases(&u, 1e-10).unwrap();
        ph.sort_by(|a, b| a.total_cmp(b));
        assert!((ph[0] + 2.0).abs() < 1e-12);
        assert!((ph[1] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn inertia_flags_ambiguous_eigenvalue() {
        let m = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2e-9, -1.0]));
        assert!(matches!(inertia(&m, 1e-9), Err(Error::IllConditioned(_))));
        let m = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-14, -1.0, 3.0]));
        let i = inertia(&m, 1e-9).unwrap();
        assert_eq!((i.positive, i.negative, i.null), (2, 1, 1));
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = RMat::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let ns = null_space(&m, 1);
        assert!((ns[(0, 0)] + ns[(1, 0)]).abs() < 1e-12);
        assert!((ns.norm() - 1.0).abs() < 1e-12);
    }
}
