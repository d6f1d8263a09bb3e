//! Seeded random instances: symmetric matrices, unitaries, symplectic
//! matrices and paths, Lagrangian planes, lifts and connecting paths.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::derived::SymmetricFamily;
use crate::error::Result;
use crate::lagrangian::{apply_symplectic, frame_from_graph, LagrangianFrame};
use crate::leray::{lift_of, LagrangianLift};
use crate::linalg::{complexify, symmetric_function, unitary_schur, CMat, RMat, C64};
use crate::paths::{LagrangianPath, SymplecticPath};
use crate::symplectic::{embed_unitary, SymplecticMatrix, UnitaryEmbedding};
use crate::tolerance::Tolerances;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Symmetric matrix with independent `N(0, scale²)` entries on and above
/// the diagonal.
pub fn symmetric(rng: &mut impl Rng, n: usize, scale: f64) -> RMat {
    let g = gaussian(rng, n, n);
    (&g + g.transpose()) * (scale / 2f64.sqrt())
}

pub fn orthogonal(rng: &mut impl Rng, n: usize) -> RMat {
    let qr = gaussian(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `Q diag(λ) Q^T` with eigenvalue magnitudes uniform in `[gap, 3]` and
/// independent random signs.
pub fn nonsingular_symmetric(rng: &mut impl Rng, n: usize, gap: f64) -> RMat {
    let q = orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| {
        let m = rng.random_range(gap..3.0);
        if rng.random_bool(0.5) {
            m
        } else {
            -m
        }
    });
    &q * RMat::from_diagonal(&d) * q.transpose()
}

/// Symmetric matrix of rank `n - k` with nonzero eigenvalues of magnitude
/// in `[0.3, 3]`.
pub fn symmetric_with_kernel(rng: &mut impl Rng, n: usize, k: usize) -> RMat {
    let q = orthogonal(rng, n);
    let d = DVector::from_fn(n, |i, _| {
        if i < k {
            0.0
        } else {
            let m = rng.random_range(0.3..3.0);
            if rng.random_bool(0.5) {
                m
            } else {
                -m
            }
        }
    });
    &q * RMat::from_diagonal(&d) * q.transpose()
}

/// Haar-distributed unitary matrix.
pub fn unitary(rng: &mut impl Rng, n: usize) -> CMat {
    let z = complexify(&gaussian(rng, n, n), &gaussian(rng, n, n));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / C64::new(d.norm(), 0.0);
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

pub fn unitary_embedding(rng: &mut impl Rng, n: usize) -> UnitaryEmbedding {
    let u = unitary(rng, n);
    UnitaryEmbedding::from_complex(&u, &Tolerances::default()).expect("QR output is unitary")
}

/// `embed(U) [[I, 0], [A, I]] [[L, 0], [0, L^{-T}]]` with `L = exp(K)`.
pub fn symplectic(rng: &mut impl Rng, n: usize) -> SymplecticMatrix {
    symplectic_scaled(rng, n, 1.0, 0.4)
}

/// As [`symplectic`], with the entry scales of `A` and `K` given.
pub fn symplectic_scaled(rng: &mut impl Rng, n: usize, shear: f64, dilation: f64) -> SymplecticMatrix {
    let u = embed_unitary(&unitary_embedding(rng, n));
    let a = symmetric(rng, n, shear);
    let k = symmetric(rng, n, dilation);
    let tol = Tolerances::default();
    let shear = SymplecticMatrix::shear(&a, &tol).expect("symmetric by construction");
    let dil = SymplecticMatrix::dilation(&symmetric_function(&k, f64::exp)).expect("exp(K) is invertible");
    &(&u * &shear) * &dil
}

/// A plane `u X*` for a Haar-random unitary `u`.
pub fn lagrangian(rng: &mut impl Rng, n: usize) -> LagrangianFrame {
    LagrangianFrame::from_unitary(&unitary(rng, n), &Tolerances::default()).expect("unitary frame")
}

pub fn lift(rng: &mut impl Rng, n: usize, max_branch: i64) -> LagrangianLift {
    let plane = lagrangian(rng, n);
    lift_of(&plane, rng.random_range(-max_branch..=max_branch))
}

/// Two planes meeting in dimension `k`: `(U X, U graph(B))` with
/// `dim ker B = k` and `U` a random unitary.
pub fn pair_with_intersection(rng: &mut impl Rng, n: usize, k: usize) -> (LagrangianFrame, LagrangianFrame) {
    let tol = Tolerances::default();
    let u = embed_unitary(&unitary_embedding(rng, n));
    let b = symmetric_with_kernel(rng, n, k);
    let g = frame_from_graph(&b, &tol).expect("symmetric");
    let first = apply_symplectic(&u, &LagrangianFrame::coordinate_x(n), &tol).expect("unitary action");
    let second = apply_symplectic(&u, &g, &tol).expect("unitary action");
    (first, second)
}

/// `t ↦ exp(itH) [[I, 0], [tA, I]] diag(exp(tK), exp(-tK))`, a smooth
/// symplectic path from the identity.
pub fn symplectic_path(rng: &mut impl Rng, n: usize, intervals: usize) -> Result<SymplecticPath> {
    let h = symmetric(rng, n, 1.5);
    let a = symmetric(rng, n, 1.0);
    let k = symmetric(rng, n, 0.4);
    SymplecticPath::from_fn(
        move |t| {
            let tol = Tolerances::default();
            let u = embed_unitary(&UnitaryEmbedding::exp_i_symmetric(&(&h * t)));
            let shear = SymplecticMatrix::shear(&(&a * t), &tol)?;
            let dil = SymplecticMatrix::dilation(&symmetric_function(&(&k * t), f64::exp))?;
            Ok(&(&u * &shear) * &dil)
        },
        intervals,
    )
}

/// A path `t ↦ u(t) X*` from `from` to `to` inside the unitary orbit,
/// wound an extra `extra` times around one eigendirection.
pub fn connecting_path(
    from: &LagrangianFrame,
    to: &LagrangianFrame,
    extra: i64,
    intervals: usize,
) -> Result<LagrangianPath> {
    let ua = from.unitary();
    let ub = to.unitary();
    let (z, phases) = unitary_schur(&(ua.adjoint() * &ub), 1e-8)?;
    let n = phases.len();
    LagrangianPath::from_fn(
        move |t| {
            let d = DVector::from_fn(n, |i, _| {
                let mut phi = phases[i];
                if i == 0 {
                    phi += 2.0 * PI * extra as f64;
                }
                C64::from_polar(1.0, phi * t)
            });
            let u = &ua * &z * CMat::from_diagonal(&d) * z.adjoint();
            LagrangianFrame::from_unitary(&u, &Tolerances::default())
        },
        intervals,
    )
}

/// Family `(1 - t) A0 + t A1 + t(1 - t) C` with nonsingular endpoints.
pub fn symmetric_family(rng: &mut impl Rng, n: usize, gap: f64) -> Result<SymmetricFamily> {
    let a0 = nonsingular_symmetric(rng, n, gap);
    let a1 = nonsingular_symmetric(rng, n, gap);
    let c = symmetric(rng, n, 2.0);
    SymmetricFamily::polynomial(vec![a0.clone(), &a1 - &a0 + &c, -c], 16, &Tolerances::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::{intersection_dim, same_plane, StratumLabel};
    use crate::linalg::cmax_abs;
    use crate::paths::PathPoint;

    #[test]
    fn generators_are_deterministic() {
        let a = symplectic(&mut seeded(3), 3);
        let b = symplectic(&mut seeded(3), 3);
        assert_eq!(a, b);
    }

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = seeded(11);
        for n in 1..=4 {
            let u = unitary(&mut rng, n);
            assert!(cmax_abs(&(&u * u.adjoint() - CMat::identity(n, n))) < 1e-12);
            let s = symplectic(&mut rng, n);
            assert!(s.residual() < 1e-9);
            for k in 0..=n {
                let (a, b) = pair_with_intersection(&mut rng, n, k);
                assert_eq!(
                    intersection_dim(&a, &b, &Tolerances::default()).unwrap(),
                    StratumLabel(k)
                );
            }
        }
    }

    #[test]
    fn connecting_path_hits_endpoints() {
        let mut rng = seeded(5);
        let a = lagrangian(&mut rng, 3);
        let b = lagrangian(&mut rng, 3);
        let p = connecting_path(&a, &b, 2, 8).unwrap();
        assert!(same_plane(p.start(), &a, 1e-12));
        assert!(same_plane(p.end(), &b, 1e-12));
    }

    #[test]
    fn symplectic_path_starts_at_identity() {
        let p = symplectic_path(&mut seeded(1), 2, 8).unwrap();
        assert!(p.start().gap(&SymplecticMatrix::identity(2)) < 1e-12);
    }
}
