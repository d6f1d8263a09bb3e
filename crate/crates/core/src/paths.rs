//! Sampled paths of Lagrangian planes and symplectic matrices, their lifts
//! to the universal cover, and the intersection indices built on them.
//!
//! A path is a list of samples on `[0, 1]` plus an optional generator that
//! can be evaluated at any `t`. Lifting follows `arg det w` by nearest
//! argument continuation and accepts a step only when it moves by less
//! than `π/2`; coarser steps are bisected through the generator, or
//! reported as undersampled when there is none.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::lagrangian::{apply_symplectic, direct_sum_frames, souriau_w, LagrangianFrame, SouriauMatrix};
use crate::leray::{lift_of, mu_bar, mu_bar_explained, LagrangianLift};
use crate::linalg::{max_abs, principal_arg, wrap_angle, C64};
use crate::symplectic::{direct_sum_symplectic, SymplecticMatrix};
use crate::tolerance::Tolerances;

pub type Generator<T> = Arc<dyn Fn(f64) -> Result<T> + Send + Sync>;

/// Something a path can pass through.
pub trait PathPoint: Clone + Send + Sync + 'static {
    fn dim(&self) -> usize;
    /// Distance used to decide whether two points coincide.
    fn gap(&self, other: &Self) -> f64;
}

impl PathPoint for LagrangianFrame {
    fn dim(&self) -> usize {
        self.n()
    }

    fn gap(&self, other: &Self) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        souriau_w(self).distance(&souriau_w(other))
    }
}

impl PathPoint for SymplecticMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn gap(&self, other: &Self) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        max_abs(&(self.entries() - other.entries()))
    }
}

/// Samples `(t, point)` with `t` strictly increasing from 0 to 1, and an
/// optional generator for refinement.
#[derive(Clone)]
pub struct SampledPath<T: PathPoint> {
    samples: Vec<(f64, T)>,
    generator: Option<Generator<T>>,
}

pub type LagrangianPath = SampledPath<LagrangianFrame>;
pub type SymplecticPath = SampledPath<SymplecticMatrix>;

impl<T: PathPoint + fmt::Debug> fmt::Debug for SampledPath<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledPath")
            .field("samples", &self.samples)
            .field("generator", &self.generator.is_some())
            .finish()
    }
}

fn validate<T: PathPoint>(samples: &[(f64, T)]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::InvalidPath("a path needs at least two samples".into()));
    }
    if samples[0].0 != 0.0 || samples[samples.len() - 1].0 != 1.0 {
        return Err(Error::InvalidPath("sample times must start at 0 and end at 1".into()));
    }
    if let Some(w) = samples
        .windows(2)
        .find(|w| w[0].0.partial_cmp(&w[1].0) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidPath(format!(
            "sample times not strictly increasing at t={}",
            w[1].0
        )));
    }
    let n = samples[0].1.dim();
    if let Some((_, p)) = samples.iter().find(|(_, p)| p.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.dim(),
        });
    }
    Ok(())
}

fn missing_generator<T>(t: f64) -> Result<T> {
    Err(Error::Undersampled {
        t0: t,
        t1: t,
        step: f64::NAN,
    })
}

impl<T: PathPoint> SampledPath<T> {
    pub fn from_samples(samples: Vec<(f64, T)>) -> Result<Self> {
        validate(&samples)?;
        Ok(Self {
            samples,
            generator: None,
        })
    }

    pub fn with_generator(samples: Vec<(f64, T)>, generator: Generator<T>) -> Result<Self> {
        validate(&samples)?;
        Ok(Self {
            samples,
            generator: Some(generator),
        })
    }

    /// Samples `generator` on a uniform grid of `intervals` steps and keeps it
    /// for later refinement.
    pub fn from_generator(generator: Generator<T>, intervals: usize) -> Result<Self> {
        let intervals = intervals.max(1);
        let samples = (0..=intervals)
            .map(|k| {
                let t = if k == intervals {
                    1.0
                } else {
                    k as f64 / intervals as f64
                };
                generator(t).map(|p| (t, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_generator(samples, generator)
    }

    pub fn from_fn(f: impl Fn(f64) -> Result<T> + Send + Sync + 'static, intervals: usize) -> Result<Self> {
        Self::from_generator(Arc::new(f), intervals)
    }

    pub fn constant(point: T) -> Self {
        let g = point.clone();
        Self {
            samples: vec![(0.0, point.clone()), (1.0, point)],
            generator: Some(Arc::new(move |_| Ok(g.clone()))),
        }
    }

    pub fn n(&self) -> usize {
        self.samples[0].1.dim()
    }

    pub fn samples(&self) -> &[(f64, T)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> &T {
        &self.samples[0].1
    }

    pub fn end(&self) -> &T {
        &self.samples[self.samples.len() - 1].1
    }

    pub fn generator(&self) -> Option<&Generator<T>> {
        self.generator.as_ref()
    }

    pub fn has_generator(&self) -> bool {
        self.generator.is_some()
    }

    /// The point at `t`, from the generator or an exact sample time.
    pub fn eval(&self, t: f64) -> Result<T> {
        if let Some(g) = &self.generator {
            return g(t);
        }
        self.samples
            .iter()
            .find(|(s, _)| *s == t)
            .map(|(_, p)| p.clone())
            .ok_or_else(|| Error::InvalidPath(format!("no sample at t={t} and no generator")))
    }

    pub fn is_loop(&self, tol: f64) -> bool {
        self.start().gap(self.end()) <= tol
    }

    /// `self` on `[0, 1/2]` followed by `other` on `[1/2, 1]`.
    pub fn concat(&self, other: &Self, tol: f64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        let gap = self.end().gap(other.start());
        if gap > tol {
            return Err(Error::EndpointMismatch { gap });
        }
        let mut samples: Vec<(f64, T)> = self.samples.iter().map(|(t, p)| (0.5 * t, p.clone())).collect();
        samples.extend(other.samples.iter().skip(1).map(|(t, p)| (0.5 * (1.0 + t), p.clone())));
        let generator: Option<Generator<T>> = match (&self.generator, &other.generator) {
            (None, None) => None,
            (first, second) => {
                let (first, second) = (first.clone(), second.clone());
                Some(Arc::new(move |t: f64| {
                    if t <= 0.5 {
                        match &first {
                            Some(g) => g(2.0 * t),
                            None => missing_generator(t),
                        }
                    } else {
                        match &second {
                            Some(g) => g(2.0 * t - 1.0),
                            None => missing_generator(t),
                        }
                    }
                }))
            }
        };
        Ok(Self { samples, generator })
    }

    /// `t ↦ self(1 - t)`.
    pub fn reverse(&self) -> Self {
        let samples = self.samples.iter().rev().map(|(t, p)| (1.0 - t, p.clone())).collect();
        let generator = self
            .generator
            .clone()
            .map(|g| -> Generator<T> { Arc::new(move |t: f64| g(1.0 - t)) });
        Self { samples, generator }
    }

    /// Pointwise image under `f`, generator included.
    pub fn try_map<U: PathPoint>(&self, f: impl Fn(&T) -> Result<U> + Send + Sync + 'static) -> Result<SampledPath<U>> {
        let f = Arc::new(f);
        let samples = self
            .samples
            .iter()
            .map(|(t, p)| f(p).map(|q| (*t, q)))
            .collect::<Result<Vec<_>>>()?;
        let generator = self.generator.clone().map(|g| -> Generator<U> {
            let f = f.clone();
            Arc::new(move |t: f64| f(&g(t)?))
        });
        Ok(SampledPath { samples, generator })
    }

    /// `t ↦ self(warp(t))` for a monotone `warp` fixing 0 and 1.
    pub fn reparametrize(&self, warp: impl Fn(f64) -> f64 + Send + Sync + 'static, intervals: usize) -> Result<Self> {
        let g = self
            .generator
            .clone()
            .ok_or_else(|| Error::InvalidPath("reparametrization needs a generator".into()))?;
        Self::from_fn(move |t| g(warp(t)), intervals)
    }
}

/// Pointwise combination of two paths on a common time grid.
fn zip_paths<A: PathPoint, B: PathPoint, C: PathPoint>(
    a: &SampledPath<A>,
    b: &SampledPath<B>,
    combine: impl Fn(&A, &B) -> Result<C> + Send + Sync + 'static,
) -> Result<SampledPath<C>> {
    let combine = Arc::new(combine);
    let same_grid = a.samples.len() == b.samples.len() && a.samples.iter().zip(&b.samples).all(|(x, y)| x.0 == y.0);
    let samples = if same_grid {
        a.samples
            .iter()
            .zip(&b.samples)
            .map(|((t, p), (_, q))| combine(p, q).map(|c| (*t, c)))
            .collect::<Result<Vec<_>>>()?
    } else if a.has_generator() && b.has_generator() {
        let mut times: Vec<f64> = a
            .samples
            .iter()
            .map(|s| s.0)
            .chain(b.samples.iter().map(|s| s.0))
            .collect();
        times.sort_by(|x, y| x.total_cmp(y));
        times.dedup();
        times
            .into_iter()
            .map(|t| combine(&a.eval(t)?, &b.eval(t)?).map(|c| (t, c)))
            .collect::<Result<Vec<_>>>()?
    } else {
        return Err(Error::InvalidPath(
            "paths on different time grids need generators to be combined".into(),
        ));
    };
    let generator = match (&a.generator, &b.generator) {
        (Some(ga), Some(gb)) => {
            let (ga, gb) = (ga.clone(), gb.clone());
            let combine = combine.clone();
            Some(Arc::new(move |t: f64| combine(&ga(t)?, &gb(t)?)) as Generator<C>)
        }
        _ => None,
    };
    Ok(SampledPath { samples, generator })
}

/// A Lagrangian path together with a continuous argument of `det w`.
#[derive(Debug, Clone)]
pub struct LiftedPath {
    base: LagrangianPath,
    ws: Vec<SouriauMatrix>,
    thetas: Vec<f64>,
}

impl LiftedPath {
    /// The path as sampled after refinement.
    pub fn base(&self) -> &LagrangianPath {
        &self.base
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn sample_count(&self) -> usize {
        self.thetas.len()
    }

    fn lift_at(&self, k: usize) -> LagrangianLift {
        LagrangianLift::from_parts(self.base.samples[k].1.clone(), self.ws[k].clone(), self.thetas[k])
    }

    pub fn start_lift(&self) -> LagrangianLift {
        self.lift_at(0)
    }

    pub fn end_lift(&self) -> LagrangianLift {
        self.lift_at(self.thetas.len() - 1)
    }

    /// `θ(1) - θ(0)`.
    pub fn total_phase(&self) -> f64 {
        self.thetas[self.thetas.len() - 1] - self.thetas[0]
    }
}

struct Lifter<'a> {
    generator: Option<&'a Generator<LagrangianFrame>>,
    tol: &'a Tolerances,
    samples: Vec<(f64, LagrangianFrame)>,
    ws: Vec<SouriauMatrix>,
    thetas: Vec<f64>,
}

impl Lifter<'_> {
    fn push(&mut self, t: f64, frame: LagrangianFrame, w: SouriauMatrix, theta: f64) -> Result<()> {
        if self.samples.len() >= self.tol.max_samples {
            return Err(Error::RefinementExhausted(format!(
                "more than {} samples",
                self.tol.max_samples
            )));
        }
        self.samples.push((t, frame));
        self.ws.push(w);
        self.thetas.push(theta);
        Ok(())
    }

    /// Extends the lift from the last accepted sample to `(tb, frame_b)`.
    fn advance(&mut self, tb: f64, frame_b: LagrangianFrame, w_b: SouriauMatrix, depth: u32) -> Result<()> {
        let ta = self.samples[self.samples.len() - 1].0;
        let theta_a = self.thetas[self.thetas.len() - 1];
        let step = wrap_angle(principal_arg(w_b.determinant()) - theta_a);
        let coarse = self.generator.is_some() && self.ws[self.ws.len() - 1].distance(&w_b) > self.tol.max_step;
        if step.abs() < PI / 2.0 && !coarse {
            return self.push(tb, frame_b, w_b, theta_a + step);
        }
        let Some(g) = self.generator else {
            return Err(Error::Undersampled { t0: ta, t1: tb, step });
        };
        if depth >= self.tol.refine_depth {
            return Err(Error::RefinementExhausted(format!(
                "phase step {step:.3} between t={ta} and t={tb} after {depth} bisections"
            )));
        }
        let tm = 0.5 * (ta + tb);
        let frame_m = g(tm)?;
        let w_m = souriau_w(&frame_m);
        self.advance(tm, frame_m, w_m, depth + 1)?;
        self.advance(tb, frame_b, w_b, depth + 1)
    }
}

/// Lift starting at the branch `principal arg det w(0) + 2kπ`.
pub fn lift_path(path: &LagrangianPath, branch: i64, tol: &Tolerances) -> Result<LiftedPath> {
    let theta0 = principal_arg(souriau_w(path.start()).determinant()) + 2.0 * PI * branch as f64;
    lift_path_from(path, theta0, tol)
}

/// Lift starting at a given argument of `det w(0)`.
pub fn lift_path_from(path: &LagrangianPath, theta0: f64, tol: &Tolerances) -> Result<LiftedPath> {
    let w0 = souriau_w(path.start());
    let gap = (w0.determinant() - C64::from_polar(1.0, theta0)).norm();
    if gap > tol.tol_phase.max(1e-9) {
        return Err(Error::BadInput(format!(
            "starting argument does not match det w(0) (gap {gap:.3e})"
        )));
    }
    let mut lifter = Lifter {
        generator: path.generator.as_ref(),
        tol,
        samples: Vec::with_capacity(path.len()),
        ws: Vec::with_capacity(path.len()),
        thetas: Vec::with_capacity(path.len()),
    };
    lifter.push(0.0, path.start().clone(), w0, theta0)?;
    for (t, frame) in path.samples.iter().skip(1) {
        let w = souriau_w(frame);
        lifter.advance(*t, frame.clone(), w, 0)?;
    }
    Ok(LiftedPath {
        base: LagrangianPath {
            samples: lifter.samples,
            generator: path.generator.clone(),
        },
        ws: lifter.ws,
        thetas: lifter.thetas,
    })
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

fn require_loop(path: &LagrangianPath, tol: &Tolerances) -> Result<()> {
    let gap = path.start().gap(path.end());
    if gap > tol.tol_sym {
        return Err(Error::NotALoop { gap });
    }
    Ok(())
}

/// `(θ(1) - θ(0)) / 2π` of a loop, before rounding.
pub fn keller_maslov_raw(path: &LagrangianPath, tol: &Tolerances) -> Result<f64> {
    require_loop(path, tol)?;
    Ok(lift_path(path, 0, tol)?.total_phase() / (2.0 * PI))
}

/// The winding number of `det w` around a Lagrangian loop.
pub fn keller_maslov(path: &LagrangianPath, tol: &Tolerances) -> Result<i64> {
    round_checked(keller_maslov_raw(path, tol)?, tol, "loop index")
}

/// `(1/2π) ∫ Im(f'/f) dt` for `f(t) = det w(t)`, with `f'` from fourth
/// order central differences and composite Gauss-Legendre quadrature.
/// Needs a generator.
pub fn winding_integral(path: &LagrangianPath, panels: usize) -> Result<f64> {
    let g = path
        .generator()
        .ok_or_else(|| Error::InvalidPath("the winding integral needs a generator".into()))?;
    let rule = GaussLegendre::new(12).map_err(|e| Error::BadInput(e.to_string()))?;
    let det = |t: f64| -> Result<C64> { Ok(souriau_w(&g(t)?).determinant()) };
    let mut failure = None;
    let mut total = 0.0;
    let panels = panels.max(1);
    for k in 0..panels {
        let a = k as f64 / panels as f64;
        let b = (k + 1) as f64 / panels as f64;
        total += rule.integrate(a, b, |t| {
            let h = 1e-4f64.min(t / 2.0).min((1.0 - t) / 2.0);
            let eval = || -> Result<f64> {
                let f = det(t)?;
                let d = (-det(t + 2.0 * h)? + det(t + h)? * 8.0 - det(t - h)? * 8.0 + det(t - 2.0 * h)?) / (12.0 * h);
                Ok((d / f).im)
            };
            match eval() {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        });
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(total / (2.0 * PI)),
    }
}

/// An index value with the bookkeeping behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct PathIndex {
    pub value: i64,
    /// Samples after refinement.
    pub samples: usize,
    pub start_theta: f64,
    pub end_theta: f64,
    pub reference_theta: f64,
    /// Phases `ψ` of the companions `e^{iψ} I` used at the start and end.
    pub companions: Vec<f64>,
}

/// `μ̄(λ(1)∞, ℓ∞) - μ̄(λ(0)∞, ℓ∞)` along a lift of `λ`.
pub fn mu_lagrangian_detailed(path: &LagrangianPath, plane: &LagrangianFrame, tol: &Tolerances) -> Result<PathIndex> {
    if path.n() != plane.n() {
        return Err(Error::DimensionMismatch {
            expected: path.n(),
            found: plane.n(),
        });
    }
    let lifted = lift_path(path, 0, tol)?;
    let reference = lift_of(plane, 0);
    let end = mu_bar_explained(&lifted.end_lift(), &reference, tol)?;
    let start = mu_bar_explained(&lifted.start_lift(), &reference, tol)?;
    let companions = [&start, &end]
        .iter()
        .filter_map(|m| m.companion.as_ref().map(|c| c.phase))
        .collect();
    Ok(PathIndex {
        value: end.value - start.value,
        samples: lifted.sample_count(),
        start_theta: lifted.thetas[0],
        end_theta: lifted.thetas[lifted.thetas.len() - 1],
        reference_theta: reference.theta(),
        companions,
    })
}

pub fn mu_lagrangian(path: &LagrangianPath, plane: &LagrangianFrame, tol: &Tolerances) -> Result<i64> {
    Ok(mu_lagrangian_detailed(path, plane, tol)?.value)
}

/// `t ↦ σ(t) ℓ`.
pub fn induced_path(path: &SymplecticPath, plane: &LagrangianFrame, tol: &Tolerances) -> Result<LagrangianPath> {
    let plane = plane.clone();
    let tol = *tol;
    path.try_map(move |s| apply_symplectic(s, &plane, &tol))
}

pub fn mu_symplectic_detailed(path: &SymplecticPath, plane: &LagrangianFrame, tol: &Tolerances) -> Result<PathIndex> {
    mu_lagrangian_detailed(&induced_path(path, plane, tol)?, plane, tol)
}

pub fn mu_symplectic(path: &SymplecticPath, plane: &LagrangianFrame, tol: &Tolerances) -> Result<i64> {
    Ok(mu_symplectic_detailed(path, plane, tol)?.value)
}

fn require_identity_start(path: &SymplecticPath, tol: &Tolerances) -> Result<()> {
    let gap = path.start().gap(&SymplecticMatrix::identity(path.n()));
    if gap > tol.tol_sym {
        return Err(Error::InvalidPath(format!(
            "symplectic path must start at the identity (gap {gap:.3e})"
        )));
    }
    Ok(())
}

/// Action of the class of `σ` (a path from the identity) on a lift:
/// follow `t ↦ σ(t) ℓ` from `ℓ∞`.
pub fn act_on_lift(path: &SymplecticPath, lift: &LagrangianLift, tol: &Tolerances) -> Result<LagrangianLift> {
    require_identity_start(path, tol)?;
    let induced = induced_path(path, lift.frame(), tol)?;
    Ok(lift_path_from(&induced, lift.theta(), tol)?.end_lift())
}

/// `μ̄(s∞ ℓ∞, ℓ∞)` for the class `s∞` of a path from the identity.
pub fn mu_ell(path: &SymplecticPath, plane: &LagrangianFrame, tol: &Tolerances) -> Result<i64> {
    let reference = lift_of(plane, 0);
    let moved = act_on_lift(path, &reference, tol)?;
    mu_bar(&moved, &reference, tol)
}

/// `t ↦ s σ(t)`.
pub fn left_multiply(s: &SymplecticMatrix, path: &SymplecticPath) -> Result<SymplecticPath> {
    let s = s.clone();
    path.try_map(move |m| Ok(&s * m))
}

/// A representative of `s1∞ s2∞`: `σ1` followed by `s1 σ2`.
pub fn product_path(first: &SymplecticPath, second: &SymplecticPath, tol: &Tolerances) -> Result<SymplecticPath> {
    first.concat(&left_multiply(first.end(), second)?, tol.tol_sym.max(1e-9))
}

/// `t ↦ S λ(t)`.
pub fn map_path(s: &SymplecticMatrix, path: &LagrangianPath, tol: &Tolerances) -> Result<LagrangianPath> {
    let s = s.clone();
    let tol = *tol;
    path.try_map(move |l| apply_symplectic(&s, l, &tol))
}

/// Plane path rotated by `t ↦ diag(e^{i t a_j})`, starting at `plane`.
pub fn rotation_path(
    plane: &LagrangianFrame,
    angles: &[f64],
    intervals: usize,
    tol: &Tolerances,
) -> Result<LagrangianPath> {
    if angles.len() != plane.n() {
        return Err(Error::DimensionMismatch {
            expected: plane.n(),
            found: angles.len(),
        });
    }
    let sigma = symplectic_rotation_path(angles, intervals)?;
    induced_path(&sigma, plane, tol)
}

/// `t ↦ diag(e^{i t a_j})` embedded in `Sp(n)`.
pub fn symplectic_rotation_path(angles: &[f64], intervals: usize) -> Result<SymplecticPath> {
    let angles = angles.to_vec();
    SymplecticPath::from_fn(
        move |t| {
            let a: Vec<f64> = angles.iter().map(|a| a * t).collect();
            Ok(SymplecticMatrix::rotation(&a))
        },
        intervals,
    )
}

/// `λ'(t) ⊕ λ''(t)`.
pub fn direct_sum_lagrangian_paths(first: &LagrangianPath, second: &LagrangianPath) -> Result<LagrangianPath> {
    zip_paths(first, second, |a, b| Ok(direct_sum_frames(a, b)))
}

/// `σ'(t) ⊕ σ''(t)`.
pub fn direct_sum_symplectic_paths(
    first: &SymplecticPath,
    second: &SymplecticPath,
    tol: &Tolerances,
) -> Result<SymplecticPath> {
    let tol = *tol;
    zip_paths(first, second, move |a, b| direct_sum_symplectic(a, b, &tol))
}
