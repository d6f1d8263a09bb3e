//! Points of the universal cover of the Lagrangian Grassmannian as pairs
//! `(w, θ)` with `det w = e^{iθ}`, and the Leray index on pairs of them.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::lagrangian::{companion_for, corank_w, frame_from_w, souriau_w, Companion, LagrangianFrame, SouriauMatrix};
use crate::linalg::{cblock_diag, principal_arg, unitary_eigenphases, CMat, C64};
use crate::signature::tau;
use crate::tolerance::Tolerances;

/// A point `(w, θ)` of the universal cover, carrying a frame of its plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianLift {
    w: SouriauMatrix,
    theta: f64,
    frame: LagrangianFrame,
}

impl LagrangianLift {
    /// Validates `|det w - e^{iθ}| ≤ tol_phase`.
    pub fn new(w: SouriauMatrix, theta: f64, tol: &Tolerances) -> Result<Self> {
        check_phase(&w, theta, tol)?;
        let frame = frame_from_w(&w, tol)?;
        Ok(Self { w, theta, frame })
    }

    /// Lift of the plane spanned by `frame` with argument `theta`.
    pub fn from_frame(frame: LagrangianFrame, theta: f64, tol: &Tolerances) -> Result<Self> {
        let w = souriau_w(&frame);
        check_phase(&w, theta, tol)?;
        Ok(Self { w, theta, frame })
    }

    pub(crate) fn from_parts(frame: LagrangianFrame, w: SouriauMatrix, theta: f64) -> Self {
        Self { w, theta, frame }
    }

    pub fn w(&self) -> &SouriauMatrix {
        &self.w
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn frame(&self) -> &LagrangianFrame {
        &self.frame
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }
}

fn check_phase(w: &SouriauMatrix, theta: f64, tol: &Tolerances) -> Result<()> {
    let gap = (w.determinant() - C64::from_polar(1.0, theta)).norm();
    if gap > tol.tol_phase {
        return Err(Error::BadInput(format!("det w differs from e^(i theta) by {gap:.3e}")));
    }
    Ok(())
}

/// The deck transformation `β^k`, acting by `θ ↦ θ + 2kπ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeckAction {
    pub k: i64,
}

pub fn deck_apply(g: DeckAction, lift: &LagrangianLift) -> LagrangianLift {
    LagrangianLift {
        theta: lift.theta + 2.0 * PI * g.k as f64,
        ..lift.clone()
    }
}

/// `(w, θ0 + 2kπ)` with `θ0` the principal argument of `det w`.
pub fn lift_of(plane: &LagrangianFrame, branch: i64) -> LagrangianLift {
    let w = souriau_w(plane);
    let theta = principal_arg(w.determinant()) + 2.0 * PI * branch as f64;
    LagrangianLift {
        w,
        theta,
        frame: plane.clone(),
    }
}

/// Lift of the companion `w = e^{iψ} I`, with `θ = nψ`.
pub fn companion_lift(c: &Companion) -> LagrangianLift {
    LagrangianLift {
        w: c.w.clone(),
        theta: c.w.n() as f64 * c.phase,
        frame: c.frame.clone(),
    }
}

fn require_same_n(a: &LagrangianLift, b: &LagrangianLift) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}

/// `-w1 w2^{-1}`.
fn transition(w1: &SouriauMatrix, w2: &SouriauMatrix) -> CMat {
    -(w1.matrix() * w2.inverse())
}

fn round_checked(value: f64, tol: &Tolerances, what: &str) -> Result<i64> {
    let r = value.round();
    if (value - r).abs() > tol.tol_round {
        return Err(Error::IllConditioned(format!(
            "{what} = {value} is not within {} of an integer",
            tol.tol_round
        )));
    }
    Ok(r as i64)
}

/// `(θ1 - θ2 + i TrLog(-w1 w2^{-1})) / 2π + n/2` before rounding.
pub fn souriau_m_raw(l1: &LagrangianLift, l2: &LagrangianLift, tol: &Tolerances) -> Result<f64> {
    require_same_n(l1, l2)?;
    let k = corank_w(&l1.w, &l2.w, tol)?;
    if k != 0 {
        return Err(Error::NotTransversal(format!("projections meet in dimension {k}")));
    }
    let phases = unitary_eigenphases(&transition(&l1.w, &l2.w), 1e-8)?;
    if let Some(p) = phases.iter().find(|p| PI - p.abs() <= tol.tol_phase) {
        return Err(Error::IllConditioned(format!(
            "eigenphase {p} of -w1 w2^-1 is too close to the branch cut"
        )));
    }
    let sum: f64 = phases.iter().sum();
    Ok((l1.theta - l2.theta - sum) / (2.0 * PI) + l1.n() as f64 / 2.0)
}

/// Souriau's index `m` of a transversal pair; an integer.
pub fn souriau_m(l1: &LagrangianLift, l2: &LagrangianLift, tol: &Tolerances) -> Result<i64> {
    round_checked(souriau_m_raw(l1, l2, tol)?, tol, "m")
}

/// Value of the Leray index together with the companion used, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct MuBar {
    pub value: i64,
    pub companion: Option<Companion>,
}

/// The Leray index `μ̄` on an arbitrary pair of lifts.
pub fn mu_bar(l1: &LagrangianLift, l2: &LagrangianLift, tol: &Tolerances) -> Result<i64> {
    Ok(mu_bar_explained(l1, l2, tol)?.value)
}

pub fn mu_bar_explained(l1: &LagrangianLift, l2: &LagrangianLift, tol: &Tolerances) -> Result<MuBar> {
    require_same_n(l1, l2)?;
    if corank_w(&l1.w, &l2.w, tol)? == 0 {
        let m = souriau_m(l1, l2, tol)?;
        return Ok(MuBar {
            value: 2 * m - l1.n() as i64,
            companion: None,
        });
    }
    let companion = companion_for(&l1.w, &l2.w, tol)?;
    let value = mu_bar_via(l1, l2, &companion, tol)?;
    Ok(MuBar {
        value,
        companion: Some(companion),
    })
}

/// `μ̄(l1, l3) - μ̄(l2, l3) + τ(l1, l2, l3)` for a given companion `l3`
/// transversal to both projections.
pub fn mu_bar_via(l1: &LagrangianLift, l2: &LagrangianLift, companion: &Companion, tol: &Tolerances) -> Result<i64> {
    require_same_n(l1, l2)?;
    let l3 = companion_lift(companion);
    require_same_n(l1, &l3)?;
    let a = 2 * souriau_m(l1, &l3, tol)? - l1.n() as i64;
    let b = 2 * souriau_m(l2, &l3, tol)? - l1.n() as i64;
    let t = tau(&l1.frame, &l2.frame, &l3.frame, tol)?;
    Ok(a - b + t)
}

/// `μ̄` evaluated with the companion `e^{iψ} I`.
pub fn mu_bar_with_companion(l1: &LagrangianLift, l2: &LagrangianLift, psi: f64, tol: &Tolerances) -> Result<i64> {
    let companion = Companion::from_phase(l1.n(), psi);
    for l in [l1, l2] {
        if corank_w(&companion.w, &l.w, tol)? != 0 {
            return Err(Error::NotTransversal(format!(
                "companion phase {psi} meets an input plane"
            )));
        }
    }
    mu_bar_via(l1, l2, &companion, tol)
}

/// `Tr Log(u)` via `Log u = ∫_{-∞}^0 [(λ - u)^{-1} - (λ - 1)^{-1}] dλ`,
/// for a unitary `u` without the eigenvalue `-1`. Quadrature over
/// `λ = -s / (1 - s)`, `s ∈ [0, 1)`, split into `panels` Gauss-Legendre panels.
pub fn trace_log_integral(u: &CMat, panels: usize) -> Result<C64> {
    let n = u.nrows();
    let rule = GaussLegendre::new(16).map_err(|e| Error::BadInput(e.to_string()))?;
    let id = CMat::identity(n, n);
    let integrand = |s: f64, part: fn(C64) -> f64| -> f64 {
        if s >= 1.0 {
            return 0.0;
        }
        let lambda = -s / (1.0 - s);
        let jac = 1.0 / ((1.0 - s) * (1.0 - s));
        let m = &id * C64::new(lambda, 0.0) - u;
        let tr = match m.try_inverse() {
            Some(inv) => inv.trace(),
            None => return f64::NAN,
        };
        let value = tr - C64::new(n as f64 / (lambda - 1.0), 0.0);
        part(value * jac)
    };
    let mut re = 0.0;
    let mut im = 0.0;
    for k in 0..panels {
        // Geometric panels crowd toward s = 1, where λ runs off to -∞.
        let a = 1.0 - 0.5f64.powf(k as f64 * 40.0 / panels as f64);
        let b = 1.0 - 0.5f64.powf((k + 1) as f64 * 40.0 / panels as f64);
        re += rule.integrate(a, b, |s| integrand(s, |z| z.re));
        im += rule.integrate(a, b, |s| integrand(s, |z| z.im));
    }
    if !(re.is_finite() && im.is_finite()) {
        return Err(Error::IllConditioned(
            "resolvent singular on the integration path".into(),
        ));
    }
    Ok(C64::new(re, im))
}

/// Souriau's `m` with the trace logarithm taken from the resolvent
/// integral instead of eigenphases; an independent oracle for small `n`.
pub fn souriau_m_by_integral(l1: &LagrangianLift, l2: &LagrangianLift, panels: usize) -> Result<f64> {
    require_same_n(l1, l2)?;
    let trlog = trace_log_integral(&transition(&l1.w, &l2.w), panels)?;
    let inner = C64::new(l1.theta - l2.theta, 0.0) + C64::i() * trlog;
    Ok(inner.re / (2.0 * PI) + l1.n() as f64 / 2.0)
}

/// `(w', θ') ⊕ (w'', θ'')`.
pub fn direct_sum_lift(first: &LagrangianLift, second: &LagrangianLift) -> LagrangianLift {
    LagrangianLift {
        w: SouriauMatrix::from_trusted(cblock_diag(first.w.matrix(), second.w.matrix())),
        theta: first.theta + second.theta,
        frame: crate::lagrangian::direct_sum_frames(&first.frame, &second.frame),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::frame_from_graph;
    use crate::linalg::RMat;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn xs0(n: usize) -> LagrangianLift {
        lift_of(&LagrangianFrame::coordinate_xstar(n), 0)
    }

    fn x_pi() -> LagrangianLift {
        lift_of(&LagrangianFrame::coordinate_x(1), 0)
    }

    #[test]
    fn lift_examples() {
        let l = xs0(2);
        assert_eq!(l.theta(), 0.0);
        assert_eq!(x_pi().theta(), PI);
        assert!((lift_of(&LagrangianFrame::coordinate_xstar(1), 1).theta() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn lift_validation() {
        let w = SouriauMatrix::scalar(1, 0.5);
        assert!(LagrangianLift::new(w.clone(), 0.5 + 2.0 * PI, &tol()).is_ok());
        assert!(matches!(LagrangianLift::new(w, 0.6, &tol()), Err(Error::BadInput(_))));
    }

    #[test]
    fn deck_examples() {
        let l = xs0(1);
        assert_eq!(deck_apply(DeckAction { k: 0 }, &l), l);
        assert!((deck_apply(DeckAction { k: 1 }, &l).theta() - 2.0 * PI).abs() < 1e-15);
        let shifted = deck_apply(DeckAction { k: -2 }, &x_pi());
        assert!((shifted.theta() - (PI - 4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn souriau_m_examples() {
        assert_eq!(souriau_m(&xs0(1), &x_pi(), &tol()).unwrap(), 0);
        assert_eq!(souriau_m(&x_pi(), &xs0(1), &tol()).unwrap(), 1);
        let beta = deck_apply(DeckAction { k: 1 }, &xs0(1));
        assert_eq!(souriau_m(&beta, &x_pi(), &tol()).unwrap(), 1);
        assert!(matches!(
            souriau_m(&xs0(1), &xs0(1), &tol()),
            Err(Error::NotTransversal(_))
        ));
    }

    #[test]
    fn mu_bar_examples() {
        assert_eq!(mu_bar(&xs0(1), &x_pi(), &tol()).unwrap(), -1);
        assert_eq!(mu_bar(&x_pi(), &xs0(1), &tol()).unwrap(), 1);
        for l in [xs0(2), x_pi()] {
            assert_eq!(mu_bar(&l, &l, &tol()).unwrap(), 0);
        }
        for k in -3..=3 {
            let shifted = deck_apply(DeckAction { k }, &xs0(1));
            assert_eq!(mu_bar(&shifted, &x_pi(), &tol()).unwrap(), -1 + 2 * k);
        }
    }

    #[test]
    fn non_transversal_mu_bar_is_companion_independent() {
        let a = RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let g = lift_of(&frame_from_graph(&a, &tol()).unwrap(), 0);
        let x = lift_of(&LagrangianFrame::coordinate_x(2), 1);
        let reference = mu_bar_explained(&g, &x, &tol()).unwrap();
        assert!(reference.companion.is_some());
        for psi in [-2.5, -1.0, 0.3, 1.7, 2.9] {
            assert_eq!(mu_bar_with_companion(&g, &x, psi, &tol()).unwrap(), reference.value);
        }
    }

    #[test]
    fn coboundary_matches_tau_on_reference_triple() {
        // ∂μ̄ on (X*, graph(1), X) with principal lifts: 1 - 1 + 1.
        let g = lift_of(&frame_from_graph(&RMat::from_element(1, 1, 1.0), &tol()).unwrap(), 0);
        let (a, b, c) = (xs0(1), g, x_pi());
        let d = mu_bar(&a, &b, &tol()).unwrap() - mu_bar(&a, &c, &tol()).unwrap() + mu_bar(&b, &c, &tol()).unwrap();
        assert_eq!(d, tau(a.frame(), b.frame(), c.frame(), &tol()).unwrap());
        assert_eq!(d, 1);
    }

    #[test]
    fn integral_oracle_agrees() {
        let g = lift_of(
            &frame_from_graph(&RMat::from_row_slice(2, 2, &[0.4, 1.0, 1.0, -2.0]), &tol()).unwrap(),
            1,
        );
        let x = lift_of(&LagrangianFrame::coordinate_xstar(2), 0);
        let raw = souriau_m_raw(&g, &x, &tol()).unwrap();
        let oracle = souriau_m_by_integral(&g, &x, 64).unwrap();
        assert!((raw - oracle).abs() < 1e-8, "{raw} vs {oracle}");
    }

    #[test]
    fn direct_sum_lift_examples() {
        let s = direct_sum_lift(&xs0(1), &xs0(1));
        assert_eq!(s.theta(), 0.0);
        assert!(s.w().distance(&SouriauMatrix::scalar(2, 0.0)) < 1e-15);
        let s = direct_sum_lift(&xs0(1), &x_pi());
        assert_eq!(s.theta(), PI);
        let expected = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
        ]));
        assert!(crate::linalg::cmax_abs(&(s.w().matrix() - expected)) < 1e-15);
    }
}
