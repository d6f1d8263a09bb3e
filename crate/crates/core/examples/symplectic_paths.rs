//! Indices of symplectic paths: the relative index against a plane, the
//! index of a point of the covering group, and the product formula.

use maslov::paths::{product_path, symplectic_rotation_path};
use maslov::random as rnd;
use maslov::signature::tau;
use maslov::{apply_symplectic, mu_ell, mu_symplectic, LagrangianFrame, Tolerances};

fn main() -> maslov::Result<()> {
    let tol = Tolerances::default();
    let x = LagrangianFrame::coordinate_x(2);
    let full_turn = symplectic_rotation_path(&[2.0 * std::f64::consts::PI, 0.0], 32)?;
    println!(
        "full rotation in one plane: mu_Sp = {}, mu_l = {}",
        mu_symplectic(&full_turn, &x, &tol)?,
        mu_ell(&full_turn, &x, &tol)?
    );

    let mut rng = rnd::seeded(4);
    let l = rnd::lagrangian(&mut rng, 2);
    let s1 = rnd::symplectic_path(&mut rng, 2, 48)?;
    let s2 = rnd::symplectic_path(&mut rng, 2, 48)?;
    let prod = product_path(&s1, &s2, &tol)?;
    let (m1, m2, m12) = (mu_ell(&s1, &l, &tol)?, mu_ell(&s2, &l, &tol)?, mu_ell(&prod, &l, &tol)?);
    let t = tau(
        &l,
        &apply_symplectic(s1.end(), &l, &tol)?,
        &apply_symplectic(prod.end(), &l, &tol)?,
        &tol,
    )?;
    println!("mu_l(s1 s2) = {m12};  mu_l(s1) + mu_l(s2) + tau = {m1} + {m2} + {t}");
    Ok(())
}
