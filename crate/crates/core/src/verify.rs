//! Seeded invariant suite run by `maslov verify`.
//!
//! Each check draws its own instances from a ChaCha stream keyed by the
//! seed, the check's position and the dimension, so results do not depend
//! on scheduling.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derived::{
    direct_sum_lift, graph_path, hormander_xi, hormander_xi_by_path, robbin_salamon, shear_path, spectral_flow,
    SymmetricFamily,
};
use crate::error::Error;
use crate::lagrangian::{
    apply_symplectic, direct_sum_frames, frame_from_graph, frame_from_w, intersection_dim, souriau_w, LagrangianFrame,
    SouriauMatrix,
};
use crate::leray::{
    deck_apply, lift_of, mu_bar, mu_bar_explained, mu_bar_with_companion, souriau_m, souriau_m_by_integral,
    souriau_m_raw, DeckAction, LagrangianLift,
};
use crate::linalg::{
    cmax_abs, complex_singular_values, max_abs, principal_arg, symmetric_function, unitary_eigenphases, wrap_angle,
    CMat, RMat,
};
use crate::paths::{
    act_on_lift, direct_sum_lagrangian_paths, direct_sum_symplectic_paths, keller_maslov, keller_maslov_raw,
    left_multiply, map_path, mu_ell, mu_lagrangian, mu_symplectic, product_path, rotation_path, winding_integral,
    LagrangianPath,
};
use crate::random as rnd;
use crate::signature::{coboundary, inert_index, tau, Cochain};
use crate::symplectic::{
    direct_sum_symplectic, embed_unitary, omega, SymplecticMatrix, SymplecticVector, UnitaryEmbedding,
};
use crate::tolerance::Tolerances;

/// A deliberate corruption used to confirm that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Every `τ` consumed by the checks has its sign flipped.
    FlipTauSign,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub n_max: usize,
    /// Overrides the per-check instance count.
    pub instances: Option<usize>,
    pub tolerances: Tolerances,
    pub mutation: Option<Mutation>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            n_max: 5,
            instances: None,
            tolerances: Tolerances::default(),
            mutation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOutcome {
    pub id: String,
    pub n: usize,
    pub instances: usize,
    /// Draws redrawn because they fell inside an ambiguity band; at most
    /// one in twenty (plus two) before a refusal counts as a failure.
    pub refused: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub seed: u64,
    pub n_max: usize,
    pub mutation: Option<Mutation>,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn failed_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.id.clone())
            .collect();
        ids.dedup();
        ids
    }
}

#[derive(Debug)]
enum Failure {
    Wrong(String),
    /// The instance fell inside an ambiguity band and was refused.
    Refused(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IllConditioned(_) => Failure::Refused(e.to_string()),
            _ => Failure::Wrong(format!("{} ({e})", e.code())),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        let holds: bool = $cond;
        if !holds {
            return Err(Failure::Wrong(format!($($arg)*)));
        }
    };
}

struct Ctx {
    tol: Tolerances,
    mutation: Option<Mutation>,
}

impl Ctx {
    fn tau(&self, a: &LagrangianFrame, b: &LagrangianFrame, c: &LagrangianFrame) -> Result<i64, Error> {
        let t = tau(a, b, c, &self.tol)?;
        Ok(match self.mutation {
            Some(Mutation::FlipTauSign) => -t,
            None => t,
        })
    }
}

struct Check {
    id: &'static str,
    instances: usize,
    min_n: usize,
    run: fn(&Ctx, &mut ChaCha8Rng, usize) -> Outcome,
}

const fn check(
    id: &'static str,
    instances: usize,
    min_n: usize,
    run: fn(&Ctx, &mut ChaCha8Rng, usize) -> Outcome,
) -> Check {
    Check {
        id,
        instances,
        min_n,
        run,
    }
}

const CHECKS: &[Check] = &[
    check("derived.direct_sum_leray", 100, 2, direct_sum_leray),
    check("derived.direct_sum_paths", 40, 2, direct_sum_paths),
    check("derived.hormander", 100, 1, hormander),
    check("derived.robbin_salamon", 60, 1, robbin_salamon_axioms),
    check("derived.spectral_flow", 100, 1, spectral_flow_agrees),
    check("lagrangian.frame_roundtrip", 200, 1, frame_roundtrip),
    check("lagrangian.intersection", 200, 1, intersection_symmetric_invariant),
    check("lagrangian.unitary_action", 200, 1, unitary_action),
    check("leray.antisymmetry", 300, 1, leray_antisymmetry),
    check("leray.companion_independence", 50, 1, companion_independence),
    check("leray.deck", 200, 1, deck),
    check("leray.inertia", 200, 1, inertia_cocycle),
    check("leray.integral_oracle", 50, 1, integral_oracle),
    check("leray.local_constancy", 100, 1, leray_local_constancy),
    check("leray.remule", 300, 1, remule),
    check("paths.change_of_reference", 60, 1, change_of_reference),
    check("paths.concatenation", 40, 1, concatenation),
    check("paths.homotopy", 40, 1, homotopy),
    check("paths.loops", 40, 1, loop_axioms),
    check("paths.product", 40, 1, product),
    check("paths.reference_change_sp", 40, 1, reference_change_sp),
    check("paths.sp_cover_invariance", 40, 1, sp_cover_invariance),
    check("paths.symplectic_invariance", 40, 1, path_symplectic_invariance),
    check("paths.triple_signature", 40, 1, triple_signature),
    check("paths.winding_integral", 20, 1, winding),
    check("signature.additivity", 200, 2, tau_additivity),
    check("signature.antisymmetry", 300, 1, tau_antisymmetry),
    check("signature.cocycle", 300, 1, tau_cocycle),
    check("signature.local_constancy", 200, 1, tau_local_constancy),
    check("signature.sign_of_graph", 200, 1, taula),
    check("signature.symplectic_invariance", 200, 1, tau_symplectic_invariance),
    check("symplectic.direct_sum", 200, 2, symplectic_direct_sum),
    check("symplectic.omega", 200, 1, omega_antisymmetry),
    check("symplectic.unitary_embedding", 200, 1, unitary_embedding_is_symplectic),
];

/// Identifiers of every check, sorted.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

fn run_one(check_index: usize, n: usize, opts: &VerifyOptions) -> CheckOutcome {
    let c = &CHECKS[check_index];
    let ctx = Ctx {
        tol: opts.tolerances,
        mutation: opts.mutation,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream((check_index as u64) << 8 | n as u64);
    let instances = opts.instances.unwrap_or(c.instances);
    let budget = instances / 20 + 2;
    let mut failures = 0;
    let mut refused = 0;
    let mut first_failure = None;
    let mut i = 0;
    while i < instances {
        match (c.run)(&ctx, &mut rng, n) {
            Ok(()) => i += 1,
            Err(Failure::Refused(_)) if refused < budget => refused += 1,
            Err(Failure::Refused(msg) | Failure::Wrong(msg)) => {
                failures += 1;
                first_failure.get_or_insert_with(|| format!("instance {i}: {msg}"));
                i += 1;
            }
        }
    }
    CheckOutcome {
        id: c.id.to_string(),
        n,
        instances,
        refused,
        failures,
        first_failure,
    }
}

/// Runs every check at each dimension `1..=n_max`, in parallel, and returns
/// the outcomes sorted by check id and dimension.
pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let jobs: Vec<(usize, usize)> = (0..CHECKS.len())
        .flat_map(|i| (CHECKS[i].min_n.max(1)..=opts.n_max).map(move |n| (i, n)))
        .collect();
    let mut checks: Vec<CheckOutcome> = jobs.par_iter().map(|&(i, n)| run_one(i, n, opts)).collect();
    checks.sort_by(|a, b| a.id.cmp(&b.id).then(a.n.cmp(&b.n)));
    VerifyReport {
        seed: opts.seed,
        n_max: opts.n_max,
        mutation: opts.mutation,
        checks,
    }
}

// ---------------------------------------------------------------------------
// Instance generators

/// Planes `U graph(B0 + K_i)` or `U X` sharing one unitary `U`, so that
/// pairwise intersections are `ker(K_i - K_j)` and vary with the draw.
#[derive(Clone)]
struct PlaneFamily {
    u: SymplecticMatrix,
    b0: RMat,
    members: Vec<Option<RMat>>,
}

impl PlaneFamily {
    fn draw(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Self {
        let u = embed_unitary(&rnd::unitary_embedding(rng, n));
        let b0 = rnd::symmetric(rng, n, 1.0);
        let members = (0..count)
            .map(|_| match rng.random_range(0..4) {
                0 => None,
                1 => Some(RMat::zeros(n, n)),
                _ => {
                    let k = rng.random_range(0..=n);
                    Some(rnd::symmetric_with_kernel(rng, n, k))
                }
            })
            .collect();
        Self { u, b0, members }
    }

    fn planes(&self, tol: &Tolerances) -> Result<Vec<LagrangianFrame>, Error> {
        let n = self.b0.nrows();
        self.members
            .iter()
            .map(|m| {
                let base = match m {
                    None => LagrangianFrame::coordinate_x(n),
                    Some(k) => frame_from_graph(&(&self.b0 + k), tol)?,
                };
                apply_symplectic(&self.u, &base, tol)
            })
            .collect()
    }

    /// Moves `U` and `B0` slightly; every pairwise intersection dimension
    /// is unchanged, and no intermediate pair meets in a larger dimension
    /// as long as `eps` is small against [`stratum_margin`].
    fn perturbed(&self, rng: &mut ChaCha8Rng, eps: f64) -> Self {
        let n = self.b0.nrows();
        let h = rnd::symmetric(rng, n, eps);
        let e = rnd::symmetric(rng, n, eps);
        Self {
            u: &self.u * &embed_unitary(&UnitaryEmbedding::exp_i_symmetric(&h)),
            b0: &self.b0 + e,
            members: self.members.clone(),
        }
    }
}

/// Smallest nonzero singular value of `w_i - w_j` over all pairs.
fn stratum_margin(planes: &[LagrangianFrame]) -> f64 {
    let mut margin = f64::INFINITY;
    for (i, a) in planes.iter().enumerate() {
        for b in &planes[i + 1..] {
            let d = souriau_w(a).matrix() - souriau_w(b).matrix();
            for s in complex_singular_values(&d) {
                if s > 1e-7 {
                    margin = margin.min(s);
                }
            }
        }
    }
    margin
}

fn lifts(rng: &mut ChaCha8Rng, planes: &[LagrangianFrame]) -> Vec<LagrangianLift> {
    planes.iter().map(|p| lift_of(p, rng.random_range(-2..=2))).collect()
}

/// The lift of `plane` whose argument is nearest to `theta`.
fn nearby_lift(plane: &LagrangianFrame, theta: f64, tol: &Tolerances) -> Result<LagrangianLift, Error> {
    let arg = principal_arg(souriau_w(plane).determinant());
    LagrangianLift::from_frame(plane.clone(), theta + wrap_angle(arg - theta), tol)
}

fn split(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.random_range(1..n);
    (a, n - a)
}

/// Initial grid for generated paths. The lifter refines where it sees a
/// jump, but a full turn hidden between two samples that land on nearly
/// the same plane is invisible, so the grid must resolve the path.
const INTERVALS: usize = 48;

/// Symplectic matrices of moderate condition number for path checks.
fn mild_symplectic(rng: &mut ChaCha8Rng, n: usize) -> SymplecticMatrix {
    rnd::symplectic_scaled(rng, n, 0.5, 0.2)
}

fn path_between(rng: &mut ChaCha8Rng, a: &LagrangianFrame, b: &LagrangianFrame) -> Result<LagrangianPath, Error> {
    rnd::connecting_path(a, b, rng.random_range(-2..=2), INTERVALS)
}

// ---------------------------------------------------------------------------
// Symplectic space

fn omega_antisymmetry(_: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let v = |rng: &mut ChaCha8Rng| {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        SymplecticVector::from_slices(&x, &p)
    };
    let (z, w) = (v(rng)?, v(rng)?);
    let s = omega(&z, &w)? + omega(&w, &z)?;
    ensure!(s.abs() <= 1e-12, "ω(z,w) + ω(w,z) = {s:e}");
    Ok(())
}

fn unitary_embedding_is_symplectic(_: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let s = embed_unitary(&rnd::unitary_embedding(rng, n));
    ensure!(s.residual() <= 1e-10, "residual {:e}", s.residual());
    Ok(())
}

fn symplectic_direct_sum(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let (a, b) = split(rng, n);
    let tol = Tolerances {
        tol_sym: 1e-8,
        ..ctx.tol
    };
    let (s1, t1) = (rnd::symplectic(rng, a), rnd::symplectic(rng, a));
    let (s2, t2) = (rnd::symplectic(rng, b), rnd::symplectic(rng, b));
    let lhs = &direct_sum_symplectic(&s1, &s2, &tol)? * &direct_sum_symplectic(&t1, &t2, &tol)?;
    let rhs = direct_sum_symplectic(&(&s1 * &t1), &(&s2 * &t2), &tol)?;
    let scale = max_abs(rhs.entries()).max(1.0);
    let err = max_abs(&(lhs.entries() - rhs.entries()));
    ensure!(err <= 1e-12 * scale, "composition mismatch {err:e}");
    Ok(())
}

// ---------------------------------------------------------------------------
// Lagrangian planes

fn frame_roundtrip(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let u = rnd::unitary(rng, n);
    let w = SouriauMatrix::new(&u * u.transpose(), &ctx.tol)?;
    let back = souriau_w(&frame_from_w(&w, &ctx.tol)?);
    let err = cmax_abs(&(back.matrix() - w.matrix()));
    ensure!(err <= 1e-10, "w(frame(w)) off by {err:e}");
    Ok(())
}

fn intersection_symmetric_invariant(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let k = rng.random_range(0..=n);
    let (a, b) = rnd::pair_with_intersection(rng, n, k);
    let s = rnd::symplectic(rng, n);
    let d1 = intersection_dim(&a, &b, &ctx.tol)?.0;
    let d2 = intersection_dim(&b, &a, &ctx.tol)?.0;
    let sa = apply_symplectic(&s, &a, &ctx.tol)?;
    let sb = apply_symplectic(&s, &b, &ctx.tol)?;
    let d3 = intersection_dim(&sa, &sb, &ctx.tol)?.0;
    ensure!(d1 == k && d2 == k && d3 == k, "dims {d1}, {d2}, {d3}; expected {k}");
    Ok(())
}

fn unitary_action(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let l = rnd::lagrangian(rng, n);
    let u = rnd::unitary(rng, n);
    let moved = apply_symplectic(
        &embed_unitary(&UnitaryEmbedding::from_complex(&u, &ctx.tol)?),
        &l,
        &ctx.tol,
    )?;
    let expected: CMat = &u * souriau_w(&l).matrix() * u.transpose();
    let err = cmax_abs(&(souriau_w(&moved).matrix() - expected));
    ensure!(err <= 1e-10, "w(Uℓ) - U w Uᵀ = {err:e}");
    Ok(())
}

// ---------------------------------------------------------------------------
// Kashiwara signature

fn taula(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let a = rnd::nonsingular_symmetric(rng, n, 1e-3);
    let sign: i64 = crate::linalg::symmetric_eigenvalues(&a)
        .iter()
        .map(|&l| if l > 0.0 { 1 } else { -1 })
        .sum();
    let t = ctx.tau(
        &LagrangianFrame::coordinate_xstar(n),
        &frame_from_graph(&a, &ctx.tol)?,
        &LagrangianFrame::coordinate_x(n),
    )?;
    ensure!(t == sign, "τ = {t}, sign A = {sign}");
    Ok(())
}

const PERMS: [([usize; 3], i64); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([1, 0, 2], -1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
];

fn tau_antisymmetry(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = PlaneFamily::draw(rng, n, 3).planes(&ctx.tol)?;
    let t = ctx.tau(&p[0], &p[1], &p[2])?;
    for (perm, sgn) in PERMS {
        let tp = ctx.tau(&p[perm[0]], &p[perm[1]], &p[perm[2]])?;
        ensure!(tp == sgn * t, "τ{perm:?} = {tp}, τ = {t}");
    }
    Ok(())
}

fn tau_cocycle(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = PlaneFamily::draw(rng, n, 4).planes(&ctx.tol)?;
    let cochain = Cochain::new(2, |q: &[&LagrangianFrame]| ctx.tau(q[0], q[1], q[2]));
    let d = coboundary(&cochain, &[&p[0], &p[1], &p[2], &p[3]])?;
    ensure!(d == 0, "∂τ = {d}");
    Ok(())
}

fn tau_symplectic_invariance(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = PlaneFamily::draw(rng, n, 3).planes(&ctx.tol)?;
    let s = rnd::symplectic(rng, n);
    let q = p
        .iter()
        .map(|l| apply_symplectic(&s, l, &ctx.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let (a, b) = (ctx.tau(&p[0], &p[1], &p[2])?, ctx.tau(&q[0], &q[1], &q[2])?);
    ensure!(a == b, "τ = {a}, τ(S·) = {b}");
    Ok(())
}

fn tau_additivity(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let (a, b) = split(rng, n);
    let p = PlaneFamily::draw(rng, a, 3).planes(&ctx.tol)?;
    let q = PlaneFamily::draw(rng, b, 3).planes(&ctx.tol)?;
    let s: Vec<_> = p.iter().zip(&q).map(|(x, y)| direct_sum_frames(x, y)).collect();
    let (tp, tq, ts) = (
        ctx.tau(&p[0], &p[1], &p[2])?,
        ctx.tau(&q[0], &q[1], &q[2])?,
        ctx.tau(&s[0], &s[1], &s[2])?,
    );
    ensure!(ts == tp + tq, "τ(⊕) = {ts}, τ' + τ'' = {}", tp + tq);
    Ok(())
}

fn tau_local_constancy(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let family = PlaneFamily::draw(rng, n, 3);
    let p = family.planes(&ctx.tol)?;
    let eps = (1e-2 * stratum_margin(&p)).min(1e-3);
    let q = family.perturbed(rng, eps).planes(&ctx.tol)?;
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let (d, e) = (
            intersection_dim(&p[i], &p[j], &ctx.tol)?,
            intersection_dim(&q[i], &q[j], &ctx.tol)?,
        );
        ensure!(d == e, "perturbation changed an intersection ({} -> {})", d.0, e.0);
    }
    let (a, b) = (ctx.tau(&p[0], &p[1], &p[2])?, ctx.tau(&q[0], &q[1], &q[2])?);
    ensure!(a == b, "τ jumped from {a} to {b}");
    Ok(())
}

// ---------------------------------------------------------------------------
// Leray index

fn leray_antisymmetry(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = PlaneFamily::draw(rng, n, 2).planes(&ctx.tol)?;
    let l = lifts(rng, &p);
    let (a, b) = (mu_bar(&l[0], &l[1], &ctx.tol)?, mu_bar(&l[1], &l[0], &ctx.tol)?);
    ensure!(a == -b, "μ̄(1,2) = {a}, μ̄(2,1) = {b}");
    Ok(())
}

fn remule(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = PlaneFamily::draw(rng, n, 3).planes(&ctx.tol)?;
    let l = lifts(rng, &p);
    let d = mu_bar(&l[0], &l[1], &ctx.tol)? - mu_bar(&l[0], &l[2], &ctx.tol)? + mu_bar(&l[1], &l[2], &ctx.tol)?;
    let t = ctx.tau(&p[0], &p[1], &p[2])?;
    ensure!(d == t, "∂μ̄ = {d}, τ = {t}");
    Ok(())
}

fn deck(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = PlaneFamily::draw(rng, n, 2).planes(&ctx.tol)?;
    let l = lifts(rng, &p);
    let (k1, k2) = (rng.random_range(-3..=3), rng.random_range(-3..=3));
    let base = mu_bar(&l[0], &l[1], &ctx.tol)?;
    let moved = mu_bar(
        &deck_apply(DeckAction { k: k1 }, &l[0]),
        &deck_apply(DeckAction { k: k2 }, &l[1]),
        &ctx.tol,
    )?;
    ensure!(
        moved == base + 2 * (k1 - k2),
        "μ̄(β^{k1}·, β^{k2}·) = {moved}, μ̄ = {base}"
    );
    Ok(())
}

fn companion_independence(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = PlaneFamily::draw(rng, n, 2).planes(&ctx.tol)?;
    let l = lifts(rng, &p);
    let reference = mu_bar_explained(&l[0], &l[1], &ctx.tol)?.value;
    let mut phases = l[0].w().eigenphases()?;
    phases.extend(l[1].w().eigenphases()?);
    let mut tried = 0;
    while tried < 20 {
        let psi = rng.random_range(-PI..PI);
        if phases.iter().any(|&f| wrap_angle(f - psi).abs() < 1e-2) {
            continue;
        }
        tried += 1;
        let v = mu_bar_with_companion(&l[0], &l[1], psi, &ctx.tol)?;
        ensure!(v == reference, "companion ψ = {psi} gives {v}, expected {reference}");
    }
    Ok(())
}

fn inertia_cocycle(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let l: Vec<_> = (0..3).map(|_| rnd::lift(rng, n, 2)).collect();
    let d =
        souriau_m(&l[0], &l[1], &ctx.tol)? - souriau_m(&l[0], &l[2], &ctx.tol)? + souriau_m(&l[1], &l[2], &ctx.tol)?;
    let inert = inert_index(l[0].frame(), l[1].frame(), l[2].frame(), &ctx.tol)?;
    let via_tau = (ctx.tau(l[0].frame(), l[1].frame(), l[2].frame())? + n as i64) / 2;
    ensure!(
        d == inert && d == via_tau,
        "∂m = {d}, Inert = {inert}, (τ + n)/2 = {via_tau}"
    );
    Ok(())
}

fn integral_oracle(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    // The resolvent integral loses accuracy as an eigenvalue of
    // -w1 w2^{-1} approaches the cut at -1; keep a margin.
    let (a, b) = loop {
        let (a, b) = (rnd::lift(rng, n, 2), rnd::lift(rng, n, 2));
        let u = -(a.w().matrix() * b.w().inverse());
        let margin = unitary_eigenphases(&u, 1e-8)?
            .iter()
            .map(|f| PI - f.abs())
            .fold(f64::INFINITY, f64::min);
        if margin > 0.2 {
            break (a, b);
        }
    };
    let raw = souriau_m_raw(&a, &b, &ctx.tol)?;
    let integral = souriau_m_by_integral(&a, &b, 160)?;
    ensure!((raw - integral).abs() <= 1e-6, "m = {raw}, integral gives {integral}");
    Ok(())
}

fn leray_local_constancy(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let family = PlaneFamily::draw(rng, n, 2);
    let p = family.planes(&ctx.tol)?;
    let eps = (1e-2 * stratum_margin(&p)).min(1e-3);
    let q = family.perturbed(rng, eps).planes(&ctx.tol)?;
    let l = lifts(rng, &p);
    let m = [
        nearby_lift(&q[0], l[0].theta(), &ctx.tol)?,
        nearby_lift(&q[1], l[1].theta(), &ctx.tol)?,
    ];
    let (a, b) = (mu_bar(&l[0], &l[1], &ctx.tol)?, mu_bar(&m[0], &m[1], &ctx.tol)?);
    ensure!(a == b, "μ̄ jumped from {a} to {b}");
    Ok(())
}

// ---------------------------------------------------------------------------
// Path indices

fn reference_planes(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize, count: usize) -> Result<Vec<LagrangianFrame>, Error> {
    PlaneFamily::draw(rng, n, count).planes(&ctx.tol)
}

fn concatenation(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 4)?;
    let (l1, l2) = (path_between(rng, &p[0], &p[1])?, path_between(rng, &p[1], &p[2])?);
    let joined = l1.concat(&l2, 1e-9)?;
    let sum = mu_lagrangian(&l1, &p[3], &ctx.tol)? + mu_lagrangian(&l2, &p[3], &ctx.tol)?;
    let whole = mu_lagrangian(&joined, &p[3], &ctx.tol)?;
    ensure!(whole == sum, "μ(λ∗λ') = {whole}, μ(λ) + μ(λ') = {sum}");

    let s1 = rnd::symplectic_path(rng, n, INTERVALS)?;
    let s2 = left_multiply(s1.end(), &rnd::symplectic_path(rng, n, INTERVALS)?)?;
    let sum = mu_symplectic(&s1, &p[3], &ctx.tol)? + mu_symplectic(&s2, &p[3], &ctx.tol)?;
    let whole = mu_symplectic(&s1.concat(&s2, 1e-9)?, &p[3], &ctx.tol)?;
    ensure!(whole == sum, "μ_Sp(σ∗σ') = {whole}, sum = {sum}");
    Ok(())
}

fn homotopy(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 3)?;
    let path = path_between(rng, &p[0], &p[1])?;
    let base = mu_lagrangian(&path, &p[2], &ctx.tol)?;

    let power = rng.random_range(0.7..1.5);
    let warped = path.reparametrize(move |t: f64| t.powf(power), INTERVALS)?;
    let v = mu_lagrangian(&warped, &p[2], &ctx.tol)?;
    ensure!(v == base, "reparametrized index {v}, expected {base}");

    // A homotopy with fixed endpoints: rotate the interior by exp(iε sin(πt) H).
    let eps = rng.random_range(0.0..2.0);
    let h = rnd::symmetric(rng, n, eps);
    let inner = path.clone();
    let tol = ctx.tol;
    let deformed = LagrangianPath::from_fn(
        move |t| {
            let r = embed_unitary(&UnitaryEmbedding::exp_i_symmetric(&(&h * (PI * t).sin())));
            apply_symplectic(&r, &inner.eval(t)?, &tol)
        },
        INTERVALS,
    )?;
    let v = mu_lagrangian(&deformed, &p[2], &ctx.tol)?;
    ensure!(v == base, "deformed index {v}, expected {base}");
    Ok(())
}

fn change_of_reference(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 4)?;
    let path = path_between(rng, &p[0], &p[1])?;
    let lhs = mu_lagrangian(&path, &p[2], &ctx.tol)? - mu_lagrangian(&path, &p[3], &ctx.tol)?;
    let rhs = ctx.tau(&p[1], &p[2], &p[3])? - ctx.tau(&p[0], &p[2], &p[3])?;
    ensure!(lhs == rhs, "μ(λ,ℓ) - μ(λ,ℓ') = {lhs}, τ difference = {rhs}");
    Ok(())
}

fn triple_signature(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 3)?;
    let l01 = path_between(rng, &p[0], &p[1])?;
    let l12 = path_between(rng, &p[1], &p[2])?;
    let l20 = path_between(rng, &p[2], &p[0])?;
    let sum = mu_lagrangian(&l01, &p[2], &ctx.tol)?
        + mu_lagrangian(&l12, &p[0], &ctx.tol)?
        + mu_lagrangian(&l20, &p[1], &ctx.tol)?;
    let lp = l01.concat(&l12, 1e-9)?.concat(&l20, 1e-9)?;
    let winding = keller_maslov(&lp, &ctx.tol)?;
    let t = ctx.tau(&p[0], &p[1], &p[2])?;
    // Contractible loops give exactly 2τ; each winding adds 2.
    ensure!(sum == 2 * t + 2 * winding, "sum = {sum}, τ = {t}, winding = {winding}");
    Ok(())
}

fn path_symplectic_invariance(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 3)?;
    let path = path_between(rng, &p[0], &p[1])?;
    let s = mild_symplectic(rng, n);
    let a = mu_lagrangian(&path, &p[2], &ctx.tol)?;
    let b = mu_lagrangian(
        &map_path(&s, &path, &ctx.tol)?,
        &apply_symplectic(&s, &p[2], &ctx.tol)?,
        &ctx.tol,
    )?;
    ensure!(a == b, "μ(λ,ℓ) = {a}, μ(Sλ,Sℓ) = {b}");
    Ok(())
}

fn sp_cover_invariance(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 2)?;
    let l = lifts(rng, &p);
    let sigma = rnd::symplectic_path(rng, n, INTERVALS)?;
    let a = mu_bar(&l[0], &l[1], &ctx.tol)?;
    let moved = [
        act_on_lift(&sigma, &l[0], &ctx.tol)?,
        act_on_lift(&sigma, &l[1], &ctx.tol)?,
    ];
    let b = mu_bar(&moved[0], &moved[1], &ctx.tol)?;
    ensure!(a == b, "μ̄ = {a}, μ̄(s∞·, s∞·) = {b}");
    Ok(())
}

fn product(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let l = reference_planes(ctx, rng, n, 1)?.remove(0);
    let s1 = rnd::symplectic_path(rng, n, INTERVALS)?;
    let s2 = rnd::symplectic_path(rng, n, INTERVALS)?;
    let prod = product_path(&s1, &s2, &ctx.tol)?;
    let lhs = mu_ell(&prod, &l, &ctx.tol)?;
    let l1 = apply_symplectic(s1.end(), &l, &ctx.tol)?;
    let l12 = apply_symplectic(prod.end(), &l, &ctx.tol)?;
    let rhs = mu_ell(&s1, &l, &ctx.tol)? + mu_ell(&s2, &l, &ctx.tol)? + ctx.tau(&l, &l1, &l12)?;
    ensure!(lhs == rhs, "μ̄_ℓ(s1 s2) = {lhs}, expected {rhs}");
    Ok(())
}

/// `τ(sℓ, ℓ, ℓ') - τ(sℓ, sℓ', ℓ')`.
fn base_change_term(ctx: &Ctx, s: &SymplecticMatrix, l: &LagrangianFrame, l2: &LagrangianFrame) -> Result<i64, Error> {
    let sl = apply_symplectic(s, l, &ctx.tol)?;
    let sl2 = apply_symplectic(s, l2, &ctx.tol)?;
    Ok(ctx.tau(&sl, l, l2)? - ctx.tau(&sl, &sl2, l2)?)
}

fn reference_change_sp(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 2)?;
    let s01 = rnd::symplectic_path(rng, n, INTERVALS)?;
    let lhs = mu_ell(&s01, &p[0], &ctx.tol)? - mu_ell(&s01, &p[1], &ctx.tol)?;
    let rhs = base_change_term(ctx, s01.end(), &p[0], &p[1])?;
    ensure!(lhs == rhs, "μ̄_ℓ(s) - μ̄_ℓ'(s) = {lhs}, expected {rhs}");

    // A path from s1 to s2, against the classes of its endpoints.
    let s12 = left_multiply(s01.end(), &rnd::symplectic_path(rng, n, INTERVALS)?)?;
    let full = s01.concat(&s12, 1e-9)?;
    let direct = mu_symplectic(&s12, &p[0], &ctx.tol)?;
    let ends = mu_ell(&full, &p[0], &ctx.tol)? - mu_ell(&s01, &p[0], &ctx.tol)?;
    ensure!(direct == ends, "μ_Sp(σ12) = {direct}, endpoint difference = {ends}");

    let lhs = direct - mu_symplectic(&s12, &p[1], &ctx.tol)?;
    let rhs = base_change_term(ctx, s12.end(), &p[0], &p[1])? - base_change_term(ctx, s12.start(), &p[0], &p[1])?;
    ensure!(lhs == rhs, "μ_Sp(σ12,ℓ) - μ_Sp(σ12,ℓ') = {lhs}, expected {rhs}");
    Ok(())
}

fn loop_axioms(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 3)?;
    // diag(e^{iπk_j}) fixes an arbitrary plane only when it is ±I, so
    // either all angles share one odd-or-even k, or each is a full turn.
    let (angles, expected) = if rng.random_bool(0.5) {
        let k = rng.random_range(-3..=3);
        (vec![PI * k as f64; n], k * n as i64)
    } else {
        let k: Vec<i64> = (0..n).map(|_| rng.random_range(-2..=2)).collect();
        (
            k.iter().map(|&k| 2.0 * PI * k as f64).collect(),
            2 * k.iter().sum::<i64>(),
        )
    };
    let lp = rotation_path(&p[0], &angles, INTERVALS, &ctx.tol)?;
    let m = keller_maslov(&lp, &ctx.tol)?;
    ensure!(m == expected, "winding {m}, expected {expected}");
    let back = keller_maslov(&lp.reverse(), &ctx.tol)?;
    ensure!(back == -m, "reversed winding {back}");
    let twice = keller_maslov(&lp.concat(&lp, 1e-9)?, &ctx.tol)?;
    ensure!(twice == 2 * m, "doubled winding {twice}");
    for r in &p[1..] {
        let v = mu_lagrangian(&lp, r, &ctx.tol)?;
        ensure!(v == 2 * m, "μ(loop, ℓ) = {v}, 2m = {}", 2 * m);
    }
    let s = mild_symplectic(rng, n);
    let moved = keller_maslov(&map_path(&s, &lp, &ctx.tol)?, &ctx.tol)?;
    ensure!(moved == m, "winding of S·loop = {moved}, expected {m}");
    Ok(())
}

fn winding(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let base = rnd::lagrangian(rng, n);
    let lp = if rng.random_bool(0.5) {
        rnd::connecting_path(&base, &base, rng.random_range(-3..=3), INTERVALS)?
    } else {
        let angles = vec![PI * rng.random_range(-3..=3) as f64; n];
        let s = mild_symplectic(rng, n);
        map_path(&s, &rotation_path(&base, &angles, INTERVALS, &ctx.tol)?, &ctx.tol)?
    };
    let lifted = keller_maslov_raw(&lp, &ctx.tol)?;
    let integral = winding_integral(&lp, 64)?;
    ensure!(
        (lifted - integral).abs() <= 1e-6,
        "lift gives {lifted}, integral {integral}"
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// Derived indices

fn direct_sum_leray(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let (a, b) = split(rng, n);
    let p = reference_planes(ctx, rng, a, 2)?;
    let q = reference_planes(ctx, rng, b, 2)?;
    let (lp, lq) = (lifts(rng, &p), lifts(rng, &q));
    let sum = mu_bar(&lp[0], &lp[1], &ctx.tol)? + mu_bar(&lq[0], &lq[1], &ctx.tol)?;
    let whole = mu_bar(
        &direct_sum_lift(&lp[0], &lq[0]),
        &direct_sum_lift(&lp[1], &lq[1]),
        &ctx.tol,
    )?;
    ensure!(whole == sum, "μ̄(⊕) = {whole}, μ̄' + μ̄'' = {sum}");
    Ok(())
}

fn direct_sum_paths(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let (a, b) = split(rng, n);
    let p = reference_planes(ctx, rng, a, 3)?;
    let q = reference_planes(ctx, rng, b, 3)?;
    let (lp, lq) = (path_between(rng, &p[0], &p[1])?, path_between(rng, &q[0], &q[1])?);
    let sum = mu_lagrangian(&lp, &p[2], &ctx.tol)? + mu_lagrangian(&lq, &q[2], &ctx.tol)?;
    let reference = direct_sum_frames(&p[2], &q[2]);
    let whole = mu_lagrangian(&direct_sum_lagrangian_paths(&lp, &lq)?, &reference, &ctx.tol)?;
    ensure!(whole == sum, "μ(λ'⊕λ'') = {whole}, sum = {sum}");

    let (sp, sq) = (
        rnd::symplectic_path(rng, a, INTERVALS)?,
        rnd::symplectic_path(rng, b, INTERVALS)?,
    );
    let sum = mu_symplectic(&sp, &p[2], &ctx.tol)? + mu_symplectic(&sq, &q[2], &ctx.tol)?;
    let tol = Tolerances {
        tol_sym: 1e-8,
        ..ctx.tol
    };
    let whole = mu_symplectic(&direct_sum_symplectic_paths(&sp, &sq, &tol)?, &reference, &ctx.tol)?;
    ensure!(whole == sum, "μ_Sp(σ'⊕σ'') = {whole}, sum = {sum}");
    Ok(())
}

fn robbin_salamon_axioms(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let x = LagrangianFrame::coordinate_x(n);
    let xs = LagrangianFrame::coordinate_xstar(n);
    // Inside one stratum: lower shears and dilations fix X*.
    let start = reference_planes(ctx, rng, n, 1)?.remove(0);
    let c = rnd::symmetric(rng, n, 1.0);
    let k = rnd::symmetric(rng, n, 0.4);
    let tol = ctx.tol;
    let from = start.clone();
    let confined = LagrangianPath::from_fn(
        move |t| {
            let s = &SymplecticMatrix::shear(&(&c * t), &tol)?
                * &SymplecticMatrix::dilation(&symmetric_function(&(&k * t), f64::exp))?;
            apply_symplectic(&s, &from, &tol)
        },
        INTERVALS,
    )?;
    let v = robbin_salamon(&confined, &xs, &ctx.tol)?;
    ensure!(v.twice_value == 0, "stratum-confined path has index {v}");

    // Graph paths: half the signature change, also with singular endpoints.
    let (k0, k1) = (rng.random_range(0..=n), rng.random_range(0..=n));
    let a0 = rnd::symmetric_with_kernel(rng, n, k0);
    let a1 = rnd::symmetric_with_kernel(rng, n, k1);
    let family = SymmetricFamily::linear(&a0, &a1, INTERVALS, &ctx.tol)?;
    let v = robbin_salamon(&graph_path(&family, &ctx.tol)?, &x, &ctx.tol)?;
    let sign = |a: &RMat| -> i64 {
        crate::linalg::symmetric_eigenvalues(a)
            .iter()
            .map(|&l| {
                if l > 1e-9 {
                    1
                } else if l < -1e-9 {
                    -1
                } else {
                    0
                }
            })
            .sum()
    };
    ensure!(
        v.twice_value == sign(&a1) - sign(&a0),
        "RS = {v}, signatures {} -> {}",
        sign(&a0),
        sign(&a1)
    );

    // Loops: the winding number.
    let angles: Vec<f64> = (0..n).map(|_| 2.0 * PI * rng.random_range(-2..=2) as f64).collect();
    let lp = rotation_path(&start, &angles, INTERVALS, &ctx.tol)?;
    let v = robbin_salamon(&lp, &x, &ctx.tol)?;
    let m = keller_maslov(&lp, &ctx.tol)?;
    ensure!(v.twice_value == 2 * m, "RS(loop) = {v}, winding {m}");
    Ok(())
}

fn hormander(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let p = reference_planes(ctx, rng, n, 4)?;
    let path = path_between(rng, &p[2], &p[3])?;
    let by_sig = hormander_xi(&p[0], &p[1], &p[2], &p[3], &ctx.tol)?;
    let by_path = hormander_xi_by_path(&p[0], &p[1], &path, &ctx.tol)?;
    let formula = ctx.tau(&p[0], &p[1], &p[2])? - ctx.tau(&p[0], &p[1], &p[3])?;
    ensure!(
        by_sig == by_path && by_path.twice_value == formula,
        "ξ by signature {by_sig}, by path {by_path}, 2ξ from τ {formula}"
    );
    Ok(())
}

fn spectral_flow_agrees(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Outcome {
    let family = rnd::symmetric_family(rng, n, 0.05)?;
    let x = LagrangianFrame::coordinate_x(n);
    let xs = LagrangianFrame::coordinate_xstar(n);
    let sf = spectral_flow(&family, &ctx.tol)?;
    let graph = graph_path(&family, &ctx.tol)?;
    let by_graph = mu_lagrangian(&graph, &x, &ctx.tol)?;
    let by_shear = mu_symplectic(&shear_path(&family, &ctx.tol)?, &x, &ctx.tol)?;
    ensure!(
        sf == by_graph && sf == by_shear,
        "SF = {sf}, graph index {by_graph}, shear index {by_shear}"
    );
    let against_xstar = mu_lagrangian(&graph, &xs, &ctx.tol)?;
    ensure!(against_xstar == 0, "graph path against X* has index {against_xstar}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mutation: Option<Mutation>) -> VerifyOptions {
        VerifyOptions {
            seed: 7,
            n_max: 2,
            instances: Some(3),
            mutation,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn ids_are_sorted_and_unique() {
        let ids = check_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let a = run_verify(&small(None));
        for c in &a.checks {
            assert!(c.passed(), "{} n={}: {:?}", c.id, c.n, c.first_failure);
        }
        assert_eq!(a, run_verify(&small(None)));
    }

    #[test]
    fn flipped_tau_is_caught() {
        let r = run_verify(&small(Some(Mutation::FlipTauSign)));
        assert!(!r.passed());
        let failed = r.failed_ids();
        assert!(failed.iter().any(|id| id == "signature.sign_of_graph"));
        assert!(failed.iter().any(|id| id == "leray.remule"));
    }
}
