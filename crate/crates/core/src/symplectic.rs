//! The symplectic space `X x X*`, the symplectic group and the embedding of
//! the unitary group.
//!
//! Coordinates are always ordered `(x, p)`: the first `n` entries are the
//! position block and the last `n` the momentum block. With that ordering the
//! form is `omega(z, z') = <p, x'> - <p', x> = z^T J z'` where
//! `J = [[0, -I], [I, 0]]`.

use std::ops::Mul;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{block_diag, max_abs, symmetric_function, CMat, RMat};
use crate::tolerance::Tolerances;

/// A point `z = (x, p)` of the symplectic space.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticVector {
    x: DVector<f64>,
    p: DVector<f64>,
}

impl SymplecticVector {
    pub fn new(x: DVector<f64>, p: DVector<f64>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: p.len(),
            });
        }
        Ok(Self { x, p })
    }

    pub fn from_slices(x: &[f64], p: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(x), DVector::from_column_slice(p))
    }

    /// Splits a stacked `2n` vector into its blocks.
    pub fn from_stacked(z: &DVector<f64>) -> Result<Self> {
        if !z.len().is_multiple_of(2) {
            return Err(Error::OddDimension { rows: z.len(), cols: 1 });
        }
        let n = z.len() / 2;
        Ok(Self {
            x: z.rows(0, n).into_owned(),
            p: z.rows(n, n).into_owned(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn p(&self) -> &DVector<f64> {
        &self.p
    }

    pub fn stacked(&self) -> DVector<f64> {
        let n = self.n();
        DVector::from_fn(2 * n, |i, _| if i < n { self.x[i] } else { self.p[i - n] })
    }
}

/// `omega(z, z') = <p, x'> - <p', x>`.
pub fn omega(z: &SymplecticVector, w: &SymplecticVector) -> Result<f64> {
    if z.n() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: z.n(),
            found: w.n(),
        });
    }
    Ok(z.p.dot(&w.x) - w.p.dot(&z.x))
}

/// The matrix `J = [[0, -I], [I, 0]]` of the symplectic form.
pub fn omega_matrix(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

fn check_even_square(m: &RMat) -> Result<usize> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(Error::OddDimension {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows() / 2)
}

fn symplectic_residual(m: &RMat, n: usize) -> f64 {
    let j = omega_matrix(n);
    max_abs(&(m.transpose() * &j * m - &j))
}

/// True iff `||S^T J S - J||_max <= tol`.
pub fn is_symplectic(s: &RMat, tol: f64) -> Result<bool> {
    let n = check_even_square(s)?;
    Ok(symplectic_residual(s, n) <= tol)
}

/// A real `2n x 2n` matrix preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    entries: RMat,
}

impl SymplecticMatrix {
    /// Validates `S^T J S = J` within `tol.tol_sym`.
    pub fn new(entries: RMat, tol: &Tolerances) -> Result<Self> {
        let n = check_even_square(&entries)?;
        let residual = symplectic_residual(&entries, n);
        if residual > tol.tol_sym {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: RMat::identity(2 * n, 2 * n),
        }
    }

    /// `J` itself, the image of the unitary `iI`.
    pub fn standard(n: usize) -> Self {
        Self {
            entries: omega_matrix(n),
        }
    }

    /// The shear `[[I, 0], [A, I]]` for symmetric `A`; maps `X` onto the graph
    /// of `A`.
    pub fn shear(a: &RMat, tol: &Tolerances) -> Result<Self> {
        let n = check_symmetric(a, tol)?;
        let mut m = RMat::identity(2 * n, 2 * n);
        m.view_mut((n, 0), (n, n)).copy_from(&((a + a.transpose()) * 0.5));
        Ok(Self { entries: m })
    }

    /// `[[L, 0], [0, L^{-T}]]` for invertible `L`.
    pub fn dilation(l: &RMat) -> Result<Self> {
        if l.nrows() != l.ncols() {
            return Err(Error::DimensionMismatch {
                expected: l.nrows(),
                found: l.ncols(),
            });
        }
        let inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::BadInput("dilation matrix is singular".into()))?;
        Ok(Self {
            entries: block_diag(l, &inv.transpose()),
        })
    }

    /// Block-diagonal rotation: the unitary `diag(e^{i angle_j})`.
    pub fn rotation(angles: &[f64]) -> Self {
        let n = angles.len();
        let mut m = RMat::zeros(2 * n, 2 * n);
        for (j, &a) in angles.iter().enumerate() {
            let (s, c) = a.sin_cos();
            m[(j, j)] = c;
            m[(j, n + j)] = -s;
            m[(n + j, j)] = s;
            m[(n + j, n + j)] = c;
        }
        Self { entries: m }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn entries(&self) -> &RMat {
        &self.entries
    }

    pub fn into_entries(self) -> RMat {
        self.entries
    }

    /// `S^{-1} = -J S^T J`.
    pub fn inverse(&self) -> Self {
        let j = omega_matrix(self.n());
        Self {
            entries: -(&j * self.entries.transpose() * &j),
        }
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.entries, self.n())
    }

    pub fn apply(&self, z: &SymplecticVector) -> Result<SymplecticVector> {
        if z.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: z.n(),
            });
        }
        SymplecticVector::from_stacked(&(&self.entries * z.stacked()))
    }
}

impl Mul for &SymplecticMatrix {
    type Output = SymplecticMatrix;

    fn mul(self, rhs: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            entries: &self.entries * &rhs.entries,
        }
    }
}

pub(crate) fn check_symmetric(a: &RMat, tol: &Tolerances) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let residual = max_abs(&(a - a.transpose()));
    if residual > tol.tol_sym {
        return Err(Error::NotSymmetric { residual });
    }
    Ok(a.nrows())
}

/// A unitary matrix `u = A + iB`, stored by its real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryEmbedding {
    a: RMat,
    b: RMat,
}

impl UnitaryEmbedding {
    /// Validates `A^T A + B^T B = I` and `A^T B = B^T A`.
    pub fn new(a: RMat, b: RMat, tol: &Tolerances) -> Result<Self> {
        if a.shape() != b.shape() || a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: b.nrows(),
            });
        }
        let n = a.nrows();
        let gram = a.transpose() * &a + b.transpose() * &b - RMat::identity(n, n);
        let cross = a.transpose() * &b - b.transpose() * &a;
        let residual = max_abs(&gram).max(max_abs(&cross));
        if residual > tol.tol_sym {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { a, b })
    }

    pub fn from_complex(u: &CMat, tol: &Tolerances) -> Result<Self> {
        Self::new(u.map(|z| z.re), u.map(|z| z.im), tol)
    }

    /// `e^{iH}` for a real symmetric `H` (a convenient way to get unitaries
    /// with real eigenvectors).
    pub fn exp_i_symmetric(h: &RMat) -> Self {
        Self {
            a: symmetric_function(h, f64::cos),
            b: symmetric_function(h, f64::sin),
        }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn real(&self) -> &RMat {
        &self.a
    }

    pub fn imag(&self) -> &RMat {
        &self.b
    }

    pub fn to_complex(&self) -> CMat {
        crate::linalg::complexify(&self.a, &self.b)
    }
}

/// `u = A + iB  ->  [[A, -B], [B, A]]`.
pub fn embed_unitary(u: &UnitaryEmbedding) -> SymplecticMatrix {
    let n = u.n();
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&u.a);
    m.view_mut((0, n), (n, n)).copy_from(&(-&u.b));
    m.view_mut((n, 0), (n, n)).copy_from(&u.b);
    m.view_mut((n, n), (n, n)).copy_from(&u.a);
    SymplecticMatrix { entries: m }
}

/// Position of coordinate `i` of a `2 n_part` space inside the `(x', x'', p', p'')`
/// ordering of the sum.
fn interleave_index(i: usize, n_part: usize, offset: usize, n_total: usize) -> usize {
    if i < n_part {
        offset + i
    } else {
        n_total + offset + (i - n_part)
    }
}

/// Interleaves two `2n' x k'` and `2n'' x k''` matrices so that x-blocks and
/// p-blocks stay together: rows follow `(x', x'', p', p'')` and columns are
/// either placed side by side or interleaved the same way.
pub(crate) fn interleave_rows(first: &RMat, second: &RMat, interleave_cols: bool) -> RMat {
    let (n1, n2) = (first.nrows() / 2, second.nrows() / 2);
    let n = n1 + n2;
    let (c1, c2) = (first.ncols(), second.ncols());
    let mut out = RMat::zeros(2 * n, c1 + c2);
    let col = |j: usize, part_cols: usize, offset: usize| {
        if interleave_cols {
            interleave_index(j, part_cols / 2, offset / 2, (c1 + c2) / 2)
        } else {
            offset + j
        }
    };
    for i in 0..first.nrows() {
        for j in 0..c1 {
            out[(interleave_index(i, n1, 0, n), col(j, c1, 0))] = first[(i, j)];
        }
    }
    for i in 0..second.nrows() {
        for j in 0..c2 {
            out[(interleave_index(i, n2, n1, n), col(j, c2, c1))] = second[(i, j)];
        }
    }
    out
}

/// `(S' + S'')(z' + z'') = S'z' + S''z''` in the `(x', x'', p', p'')` ordering.
pub fn direct_sum_symplectic(
    first: &SymplecticMatrix,
    second: &SymplecticMatrix,
    tol: &Tolerances,
) -> Result<SymplecticMatrix> {
    for s in [first, second] {
        let residual = s.residual();
        if residual > tol.tol_sym {
            return Err(Error::NotSymplectic { residual });
        }
    }
    Ok(SymplecticMatrix {
        entries: interleave_rows(&first.entries, &second.entries, true),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn omega_examples() {
        let z = SymplecticVector::from_slices(&[1.0], &[0.0]).unwrap();
        let w = SymplecticVector::from_slices(&[0.0], &[1.0]).unwrap();
        assert_eq!(omega(&z, &w).unwrap(), -1.0);
        assert_eq!(omega(&w, &z).unwrap(), 1.0);
        assert_eq!(omega(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn omega_matches_matrix_form() {
        let z = SymplecticVector::from_slices(&[0.3, -1.2], &[2.0, 0.5]).unwrap();
        let w = SymplecticVector::from_slices(&[-0.7, 0.1], &[1.5, -2.5]).unwrap();
        let via_matrix = (z.stacked().transpose() * omega_matrix(2) * w.stacked())[(0, 0)];
        assert!((omega(&z, &w).unwrap() - via_matrix).abs() < 1e-14);
    }

    #[test]
    fn omega_dimension_mismatch() {
        let z = SymplecticVector::from_slices(&[1.0], &[0.0]).unwrap();
        let w = SymplecticVector::from_slices(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!(matches!(omega(&z, &w), Err(Error::DimensionMismatch { .. })));
        assert!(SymplecticVector::from_slices(&[1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn is_symplectic_examples() {
        assert!(is_symplectic(&RMat::identity(2, 2), 1e-10).unwrap());
        let r = SymplecticMatrix::rotation(&[0.7]);
        assert!(is_symplectic(r.entries(), 1e-10).unwrap());
        let d = RMat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(!is_symplectic(&d, 1e-10).unwrap());
        assert!(matches!(
            is_symplectic(&RMat::identity(3, 3), 1e-10),
            Err(Error::OddDimension { .. })
        ));
    }

    #[test]
    fn diag_two_one_scales_the_form() {
        let d = RMat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let j = omega_matrix(1);
        assert_eq!(d.transpose() * &j * &d, &j * 2.0);
    }

    #[test]
    fn embed_examples() {
        let tol = Tolerances::default();
        let id = UnitaryEmbedding::new(RMat::identity(2, 2), RMat::zeros(2, 2), &tol).unwrap();
        assert_eq!(embed_unitary(&id).entries(), &RMat::identity(4, 4));

        let i = UnitaryEmbedding::new(RMat::zeros(2, 2), RMat::identity(2, 2), &tol).unwrap();
        assert_eq!(embed_unitary(&i).entries(), &omega_matrix(2));

        let alpha: f64 = 0.4;
        let e = UnitaryEmbedding::new(
            RMat::from_element(1, 1, alpha.cos()),
            RMat::from_element(1, 1, alpha.sin()),
            &tol,
        )
        .unwrap();
        let s = embed_unitary(&e);
        assert!(max_abs(&(s.entries() - SymplecticMatrix::rotation(&[alpha]).entries())) < 1e-15);
    }

    #[test]
    fn non_unitary_rejected() {
        let tol = Tolerances::default();
        let r = UnitaryEmbedding::new(RMat::identity(2, 2) * 2.0, RMat::zeros(2, 2), &tol);
        assert!(matches!(r, Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn direct_sum_examples() {
        let tol = Tolerances::default();
        let id = direct_sum_symplectic(&SymplecticMatrix::identity(1), &SymplecticMatrix::identity(2), &tol).unwrap();
        assert_eq!(id.entries(), &RMat::identity(6, 6));

        // J_1 + I_1 sends x' to p'.
        let s = direct_sum_symplectic(&SymplecticMatrix::standard(1), &SymplecticMatrix::identity(1), &tol).unwrap();
        let z = SymplecticVector::from_slices(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        let image = s.apply(&z).unwrap();
        assert_eq!(image.x().as_slice(), &[0.0, 0.0]);
        assert_eq!(image.p().as_slice(), &[1.0, 0.0]);

        // Two independent rotations act on (x', p') and (x'', p'').
        let (a, b) = (0.3, PI / 3.0);
        let s = direct_sum_symplectic(
            &SymplecticMatrix::rotation(&[a]),
            &SymplecticMatrix::rotation(&[b]),
            &tol,
        )
        .unwrap();
        assert!(max_abs(&(s.entries() - SymplecticMatrix::rotation(&[a, b]).entries())) < 1e-15);
    }

    #[test]
    fn inverse_is_inverse() {
        let tol = Tolerances::default();
        let a = RMat::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -2.0]);
        let s = &SymplecticMatrix::shear(&a, &tol).unwrap() * &SymplecticMatrix::rotation(&[0.3, 1.1]);
        let prod = &s * &s.inverse();
        assert!(max_abs(&(prod.entries() - RMat::identity(4, 4))) < 1e-13);
    }
}
