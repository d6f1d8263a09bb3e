//! Lagrangian planes: orthonormal real frames and their Souriau matrices.
//!
//! A plane `l` spanned by the columns of `[X; P]` corresponds to the unitary
//! `u = P - iX` (so that `l = u X*`) and to the symmetric unitary matrix
//! `w = u u^T`, which does not depend on the orthonormal frame chosen.
//! Reference values: `X* -> I`, `X -> -I`, and for `n = 1` the graph of
//! `p = a x` maps to `(a^2 - 1 - 2ia) / (1 + a^2)`.

use nalgebra::QR;

use crate::error::{Error, Result};
use crate::linalg::{
    cblock_diag, cmax_abs, complex_singular_values, complexify, corank_from_singular_values, max_abs, null_space,
    singular_values, symmetric_function, unitary_eigenphases, widest_gap_midpoint, CMat, RMat, C64,
};
use crate::symplectic::{check_symmetric, interleave_rows, SymplecticMatrix};
use crate::tolerance::Tolerances;

/// An orthonormal frame `[X; P]` of a Lagrangian plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianFrame {
    frame: RMat,
}

fn frame_residuals(frame: &RMat) -> (f64, f64) {
    let n = frame.ncols();
    let x = frame.rows(0, n);
    let p = frame.rows(n, n);
    let ortho = max_abs(&(frame.transpose() * frame - RMat::identity(n, n)));
    let iso = max_abs(&(x.transpose() * p - p.transpose() * x));
    (ortho, iso)
}

impl LagrangianFrame {
    /// Builds a frame from its blocks, validating orthonormality and isotropy.
    pub fn new(xblock: &RMat, pblock: &RMat, tol: &Tolerances) -> Result<Self> {
        if xblock.shape() != pblock.shape() || xblock.nrows() != xblock.ncols() {
            return Err(Error::InvalidFrame(format!(
                "blocks must be square of equal size, got {:?} and {:?}",
                xblock.shape(),
                pblock.shape()
            )));
        }
        let n = xblock.nrows();
        let mut frame = RMat::zeros(2 * n, n);
        frame.view_mut((0, 0), (n, n)).copy_from(xblock);
        frame.view_mut((n, 0), (n, n)).copy_from(pblock);
        Self::from_stacked(frame, tol)
    }

    /// Validates a stacked `2n x n` orthonormal frame.
    pub fn from_stacked(frame: RMat, tol: &Tolerances) -> Result<Self> {
        if frame.nrows() != 2 * frame.ncols() {
            return Err(Error::InvalidFrame(format!(
                "expected a 2n x n matrix, got {}x{}",
                frame.nrows(),
                frame.ncols()
            )));
        }
        let (ortho, iso) = frame_residuals(&frame);
        if ortho > tol.tol_sym {
            return Err(Error::InvalidFrame(format!(
                "columns not orthonormal (residual {ortho:.3e})"
            )));
        }
        if iso > tol.tol_sym {
            return Err(Error::InvalidFrame(format!(
                "plane is not isotropic (residual {iso:.3e})"
            )));
        }
        Ok(Self { frame })
    }

    /// Orthonormalizes an arbitrary full-rank spanning set of a Lagrangian
    /// plane. Isotropy is checked after orthonormalization, not imposed.
    pub fn from_spanning(span: RMat, tol: &Tolerances) -> Result<Self> {
        if span.nrows() != 2 * span.ncols() {
            return Err(Error::InvalidFrame(format!(
                "expected a 2n x n matrix, got {}x{}",
                span.nrows(),
                span.ncols()
            )));
        }
        let n = span.ncols();
        if n == 0 {
            return Ok(Self { frame: span });
        }
        let s = singular_values(&span);
        if s[n - 1] <= 1e-12 * s[0].max(1.0) {
            return Err(Error::InvalidFrame("spanning set is rank deficient".into()));
        }
        let q = QR::new(span).q();
        Self::from_stacked(q, tol)
    }

    /// The position plane `X = {(x, 0)}`.
    pub fn coordinate_x(n: usize) -> Self {
        let mut frame = RMat::zeros(2 * n, n);
        frame.view_mut((0, 0), (n, n)).fill_with_identity();
        Self { frame }
    }

    /// The momentum plane `X* = {(0, p)}`.
    pub fn coordinate_xstar(n: usize) -> Self {
        let mut frame = RMat::zeros(2 * n, n);
        frame.view_mut((n, 0), (n, n)).fill_with_identity();
        Self { frame }
    }

    /// The plane `u X*`, with frame `X = -Im u`, `P = Re u`.
    pub fn from_unitary(u: &CMat, tol: &Tolerances) -> Result<Self> {
        let n = u.nrows();
        let mut frame = RMat::zeros(2 * n, n);
        frame.view_mut((0, 0), (n, n)).copy_from(&(-u.map(|z| z.im)));
        frame.view_mut((n, 0), (n, n)).copy_from(&u.map(|z| z.re));
        Self::from_stacked(frame, tol)
    }

    /// The line at angle `alpha` from the x-axis, for `n = 1`.
    pub fn line(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self {
            frame: RMat::from_column_slice(2, 1, &[c, s]),
        }
    }

    pub fn n(&self) -> usize {
        self.frame.ncols()
    }

    pub fn stacked(&self) -> &RMat {
        &self.frame
    }

    pub fn xblock(&self) -> RMat {
        let n = self.n();
        self.frame.rows(0, n).into_owned()
    }

    pub fn pblock(&self) -> RMat {
        let n = self.n();
        self.frame.rows(n, n).into_owned()
    }

    /// `u = P - iX`, the unitary with `l = u X*`.
    pub fn unitary(&self) -> CMat {
        complexify(&self.pblock(), &(-self.xblock()))
    }
}

/// The symmetric unitary matrix `w = u u^T` of a Lagrangian plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SouriauMatrix {
    w: CMat,
}

impl SouriauMatrix {
    /// Validates `w = w^T` and `w conj(w)^T = I` within `tol.tol_sym`.
    pub fn new(w: CMat, tol: &Tolerances) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::DimensionMismatch {
                expected: w.nrows(),
                found: w.ncols(),
            });
        }
        let n = w.nrows();
        let sym = cmax_abs(&(&w - w.transpose()));
        if sym > tol.tol_sym {
            return Err(Error::NotSymmetric { residual: sym });
        }
        let unit = cmax_abs(&(&w * w.adjoint() - CMat::identity(n, n)));
        if unit > tol.tol_sym {
            return Err(Error::NotUnitary { residual: unit });
        }
        Ok(Self { w })
    }

    pub(crate) fn from_trusted(w: CMat) -> Self {
        Self { w }
    }

    /// `e^{i phase} I`.
    pub fn scalar(n: usize, phase: f64) -> Self {
        Self {
            w: CMat::identity(n, n) * C64::from_polar(1.0, phase),
        }
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.w
    }

    pub fn determinant(&self) -> C64 {
        if self.n() == 0 {
            return C64::new(1.0, 0.0);
        }
        self.w.determinant()
    }

    /// `w^{-1}`, which equals the entrywise conjugate for symmetric unitary `w`.
    pub fn inverse(&self) -> CMat {
        self.w.map(|z| z.conj())
    }

    /// Principal eigenphases of `w`.
    pub fn eigenphases(&self) -> Result<Vec<f64>> {
        unitary_eigenphases(&self.w, 1e-8)
    }

    pub fn direct_sum(&self, other: &SouriauMatrix) -> SouriauMatrix {
        SouriauMatrix {
            w: cblock_diag(&self.w, &other.w),
        }
    }

    pub fn distance(&self, other: &SouriauMatrix) -> f64 {
        cmax_abs(&(&self.w - &other.w))
    }
}

/// Intersection dimension of a plane with a reference plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StratumLabel(pub usize);

impl StratumLabel {
    pub fn k(self) -> usize {
        self.0
    }
}

/// Frame of the graph `{(x, Ax)}` of a symmetric matrix:
/// `X = (I + A^2)^{-1/2}`, `P = A (I + A^2)^{-1/2}`.
pub fn frame_from_graph(a: &RMat, tol: &Tolerances) -> Result<LagrangianFrame> {
    let n = check_symmetric(a, tol)?;
    let a = (a + a.transpose()) * 0.5;
    let x = symmetric_function(&a, |v| 1.0 / (1.0 + v * v).sqrt());
    let p = &a * &x;
    let mut frame = RMat::zeros(2 * n, n);
    frame.view_mut((0, 0), (n, n)).copy_from(&x);
    frame.view_mut((n, 0), (n, n)).copy_from(&p);
    LagrangianFrame::from_stacked(frame, tol)
}

/// `w = u u^T` with `u = P - iX`.
pub fn souriau_w(plane: &LagrangianFrame) -> SouriauMatrix {
    let u = plane.unitary();
    SouriauMatrix { w: &u * u.transpose() }
}

/// A frame of the plane represented by `w`.
///
/// The plane is `{(x, p) : p - ix = w (p + ix)}`, a real-linear condition
/// whose solution space is spanned by the null space of
/// `[[B, I - A], [-(I + A), -B]]` for `w = A + iB`.
pub fn frame_from_w(w: &SouriauMatrix, tol: &Tolerances) -> Result<LagrangianFrame> {
    let n = w.n();
    let a = w.w.map(|z| z.re);
    let b = w.w.map(|z| z.im);
    let id = RMat::identity(n, n);
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&b);
    m.view_mut((0, n), (n, n)).copy_from(&(&id - &a));
    m.view_mut((n, 0), (n, n)).copy_from(&(-(&id + &a)));
    m.view_mut((n, n), (n, n)).copy_from(&(-&b));
    let basis = null_space(&m, n);
    let frame = LagrangianFrame::from_stacked(basis, tol)?;
    let back = souriau_w(&frame);
    let gap = back.distance(w);
    if gap > tol.tol_sym.max(1e-9) {
        return Err(Error::IllConditioned(format!(
            "frame reconstruction from w missed by {gap:.3e}"
        )));
    }
    Ok(frame)
}

/// `corank(w1 - w2)` with the module's singular value threshold.
pub fn corank_w(w1: &SouriauMatrix, w2: &SouriauMatrix, tol: &Tolerances) -> Result<usize> {
    if w1.n() != w2.n() {
        return Err(Error::DimensionMismatch {
            expected: w1.n(),
            found: w2.n(),
        });
    }
    let s = complex_singular_values(&(&w1.w - &w2.w));
    corank_from_singular_values(&s, tol.tol_rank)
}

/// `dim(l1 ∩ l2)` as the corank of `w1 - w2`, cross-checked against the
/// kernel dimension of the real `2n x 2n` matrix `[F1 | -F2]`.
pub fn intersection_dim(l1: &LagrangianFrame, l2: &LagrangianFrame, tol: &Tolerances) -> Result<StratumLabel> {
    if l1.n() != l2.n() {
        return Err(Error::DimensionMismatch {
            expected: l1.n(),
            found: l2.n(),
        });
    }
    let k = corank_w(&souriau_w(l1), &souriau_w(l2), tol)?;

    let n = l1.n();
    let mut joined = RMat::zeros(2 * n, 2 * n);
    joined.view_mut((0, 0), (2 * n, n)).copy_from(&l1.frame);
    joined.view_mut((0, n), (2 * n, n)).copy_from(&(-&l2.frame));
    let s = singular_values(&joined);
    let threshold = tol.tol_rank * s.first().copied().unwrap_or(1.0).max(1.0);
    let k_frame = s.iter().filter(|&&v| v <= threshold).count();
    if k != k_frame {
        return Err(Error::IllConditioned(format!(
            "corank of w1 - w2 is {k} but the frame kernel has dimension {k_frame}"
        )));
    }
    Ok(StratumLabel(k))
}

/// The plane `S l`, re-orthonormalized.
pub fn apply_symplectic(s: &SymplecticMatrix, plane: &LagrangianFrame, tol: &Tolerances) -> Result<LagrangianFrame> {
    if s.n() != plane.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: plane.n(),
        });
    }
    LagrangianFrame::from_spanning(s.entries() * &plane.frame, tol)
}

/// A plane transversal to two given planes, as `w = e^{i phase} I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Companion {
    pub frame: LagrangianFrame,
    pub w: SouriauMatrix,
    /// The scalar phase; `e^{i phase}` is the single eigenvalue of `w`.
    pub phase: f64,
}

impl Companion {
    pub fn from_phase(n: usize, phase: f64) -> Self {
        let (s, c) = (phase / 2.0).sin_cos();
        let mut frame = RMat::zeros(2 * n, n);
        frame.view_mut((0, 0), (n, n)).fill_diagonal(-s);
        frame.view_mut((n, 0), (n, n)).fill_diagonal(c);
        Self {
            frame: LagrangianFrame { frame },
            w: SouriauMatrix::scalar(n, phase),
            phase,
        }
    }
}

/// `l3` with `w3 = e^{i theta} I`, where `theta` maximizes the distance to
/// the eigenphases of `w1` and `w2`; transversal to both inputs.
pub fn companion_for(w1: &SouriauMatrix, w2: &SouriauMatrix, tol: &Tolerances) -> Result<Companion> {
    if w1.n() != w2.n() {
        return Err(Error::DimensionMismatch {
            expected: w1.n(),
            found: w2.n(),
        });
    }
    let mut phases = w1.eigenphases()?;
    phases.extend(w2.eigenphases()?);
    let companion = Companion::from_phase(w1.n(), widest_gap_midpoint(&phases));
    for w in [w1, w2] {
        let k = corank_w(&companion.w, w, tol)?;
        if k != 0 {
            return Err(Error::IllConditioned("companion plane is not transversal".into()));
        }
    }
    Ok(companion)
}

pub fn transversal_companion(l1: &LagrangianFrame, l2: &LagrangianFrame, tol: &Tolerances) -> Result<LagrangianFrame> {
    Ok(companion_for(&souriau_w(l1), &souriau_w(l2), tol)?.frame)
}

/// `l' + l''` in the `(x', x'', p', p'')` ordering.
pub fn direct_sum_frames(first: &LagrangianFrame, second: &LagrangianFrame) -> LagrangianFrame {
    LagrangianFrame {
        frame: interleave_rows(&first.frame, &second.frame, false),
    }
}

/// Planes are equal when their Souriau matrices agree within `tol`.
pub fn same_plane(l1: &LagrangianFrame, l2: &LagrangianFrame, tol: f64) -> bool {
    l1.n() == l2.n() && souriau_w(l1).distance(&souriau_w(l2)) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{direct_sum_symplectic, SymplecticMatrix};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn graph_frame_examples() {
        let f = frame_from_graph(&RMat::zeros(2, 2), &tol()).unwrap();
        assert_eq!(f, LagrangianFrame::coordinate_x(2));

        let f = frame_from_graph(&RMat::from_element(1, 1, 1.0), &tol()).unwrap();
        assert!((f.stacked()[(0, 0)] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.stacked()[(1, 0)] - FRAC_1_SQRT_2).abs() < 1e-15);

        let a = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
        let f = frame_from_graph(&a, &tol()).unwrap();
        let expected = RMat::from_column_slice(4, 2, &[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(max_abs(&(f.stacked() - expected)) < 1e-15);
    }

    #[test]
    fn graph_rejects_non_symmetric() {
        let a = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(frame_from_graph(&a, &tol()), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn souriau_anchors() {
        let w = souriau_w(&LagrangianFrame::coordinate_xstar(3));
        assert!(cmax_abs(&(w.matrix() - CMat::identity(3, 3))) < 1e-15);
        let w = souriau_w(&LagrangianFrame::coordinate_x(3));
        assert!(cmax_abs(&(w.matrix() + CMat::identity(3, 3))) < 1e-15);
        let w = souriau_w(&frame_from_graph(&RMat::from_element(1, 1, 1.0), &tol()).unwrap());
        assert!(close(w.matrix()[(0, 0)], C64::new(0.0, -1.0)));
        for a in [-3.0, -0.5, 0.2, 2.0] {
            let w = souriau_w(&frame_from_graph(&RMat::from_element(1, 1, a), &tol()).unwrap());
            let expected = C64::new(a * a - 1.0, -2.0 * a) / (1.0 + a * a);
            assert!(close(w.matrix()[(0, 0)], expected));
        }
    }

    #[test]
    fn souriau_is_frame_independent() {
        let f = frame_from_graph(&RMat::from_row_slice(2, 2, &[0.3, -1.0, -1.0, 2.0]), &tol()).unwrap();
        let (s, c) = 0.8f64.sin_cos();
        let o = RMat::from_row_slice(2, 2, &[c, -s, s, c]);
        let g = LagrangianFrame::from_stacked(f.stacked() * o, &tol()).unwrap();
        assert!(souriau_w(&f).distance(&souriau_w(&g)) < 1e-14);
    }

    #[test]
    fn frame_from_w_roundtrips() {
        for w in [
            SouriauMatrix::scalar(2, 0.0),
            SouriauMatrix::scalar(2, PI),
            SouriauMatrix::scalar(1, -PI / 2.0),
        ] {
            let f = frame_from_w(&w, &tol()).unwrap();
            assert!(souriau_w(&f).distance(&w) < 1e-12);
        }
        let f = frame_from_w(&SouriauMatrix::scalar(1, -PI / 2.0), &tol()).unwrap();
        assert!(same_plane(
            &f,
            &frame_from_graph(&RMat::from_element(1, 1, 1.0), &tol()).unwrap(),
            1e-12
        ));
        let f = frame_from_w(&SouriauMatrix::scalar(2, PI), &tol()).unwrap();
        assert_eq!(
            intersection_dim(&f, &LagrangianFrame::coordinate_x(2), &tol()).unwrap(),
            StratumLabel(2)
        );
    }

    #[test]
    fn souriau_matrix_validation() {
        let bad = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            SouriauMatrix::new(bad, &tol()),
            Err(Error::NotSymmetric { .. })
        ));
        let bad = CMat::identity(2, 2) * C64::new(2.0, 0.0);
        assert!(matches!(SouriauMatrix::new(bad, &tol()), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn intersection_examples() {
        let x = LagrangianFrame::coordinate_x(2);
        let xs = LagrangianFrame::coordinate_xstar(2);
        assert_eq!(intersection_dim(&x, &xs, &tol()).unwrap(), StratumLabel(0));
        assert_eq!(intersection_dim(&x, &x, &tol()).unwrap(), StratumLabel(2));
        let g = frame_from_graph(
            &RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0])),
            &tol(),
        )
        .unwrap();
        assert_eq!(intersection_dim(&g, &x, &tol()).unwrap(), StratumLabel(1));
        assert_eq!(intersection_dim(&x, &g, &tol()).unwrap(), StratumLabel(1));
    }

    #[test]
    fn intersection_ambiguity_is_reported() {
        let a = LagrangianFrame::line(0.0);
        let b = LagrangianFrame::line(3e-8);
        assert!(matches!(
            intersection_dim(&a, &b, &tol()),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn apply_examples() {
        let x = LagrangianFrame::coordinate_x(2);
        let same = apply_symplectic(&SymplecticMatrix::identity(2), &x, &tol()).unwrap();
        assert!(same_plane(&same, &x, 1e-14));
        let j = apply_symplectic(&SymplecticMatrix::standard(2), &x, &tol()).unwrap();
        assert!(same_plane(&j, &LagrangianFrame::coordinate_xstar(2), 1e-14));
        let a = RMat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -0.5]);
        let sheared = apply_symplectic(&SymplecticMatrix::shear(&a, &tol()).unwrap(), &x, &tol()).unwrap();
        assert!(same_plane(&sheared, &frame_from_graph(&a, &tol()).unwrap(), 1e-13));
    }

    #[test]
    fn companion_examples() {
        let x = LagrangianFrame::coordinate_x(1);
        let xs = LagrangianFrame::coordinate_xstar(1);
        let c = companion_for(&souriau_w(&x), &souriau_w(&xs), &tol()).unwrap();
        assert!((c.phase.abs() - PI / 2.0).abs() < 1e-12);
        assert_eq!(intersection_dim(&c.frame, &x, &tol()).unwrap(), StratumLabel(0));
        assert_eq!(intersection_dim(&c.frame, &xs, &tol()).unwrap(), StratumLabel(0));
        assert!(souriau_w(&c.frame).distance(&c.w) < 1e-14);

        let g = frame_from_graph(&RMat::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -2.0]), &tol()).unwrap();
        let c = transversal_companion(&g, &g, &tol()).unwrap();
        assert_eq!(intersection_dim(&c, &g, &tol()).unwrap(), StratumLabel(0));
    }

    #[test]
    fn companion_is_deterministic() {
        let g = frame_from_graph(&RMat::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -2.0]), &tol()).unwrap();
        let x = LagrangianFrame::coordinate_x(2);
        let a = transversal_companion(&g, &x, &tol()).unwrap();
        let b = transversal_companion(&g, &x, &tol()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn direct_sum_frames_match_symplectic_sum() {
        let a = LagrangianFrame::line(0.4);
        let b = frame_from_graph(&RMat::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -2.0]), &tol()).unwrap();
        let sum = direct_sum_frames(&a, &b);
        assert!(LagrangianFrame::from_stacked(sum.stacked().clone(), &tol()).is_ok());
        let w = souriau_w(&sum);
        assert!(w.distance(&souriau_w(&a).direct_sum(&souriau_w(&b))) < 1e-14);

        let s = direct_sum_symplectic(
            &SymplecticMatrix::rotation(&[0.4]),
            &SymplecticMatrix::shear(&RMat::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -2.0]), &tol()).unwrap(),
            &tol(),
        )
        .unwrap();
        let image = apply_symplectic(&s, &LagrangianFrame::coordinate_x(3), &tol()).unwrap();
        assert!(same_plane(&image, &sum, 1e-13));
    }
}
