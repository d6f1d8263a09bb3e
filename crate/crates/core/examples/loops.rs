//! Winding numbers of loops of Lagrangian planes, by lifting the phase of
//! `det w` and by the contour integral.

use std::f64::consts::PI;

use maslov::paths::rotation_path;
use maslov::random as rnd;
use maslov::{keller_maslov, mu_lagrangian, winding_integral, LagrangianFrame, Tolerances};

fn main() -> maslov::Result<()> {
    let tol = Tolerances::default();
    let base = LagrangianFrame::coordinate_xstar(2);
    let reference = rnd::lagrangian(&mut rnd::seeded(5), 2);

    for k in [[1, 0], [1, 1], [-2, 3]] {
        let angles: Vec<f64> = k.iter().map(|&k| PI * k as f64).collect();
        let lp = rotation_path(&base, &angles, 48, &tol)?;
        println!(
            "angles pi*{k:?}: winding {:2}, integral {:+.9}, mu(loop, l) = {:2}",
            keller_maslov(&lp, &tol)?,
            winding_integral(&lp, 64)?,
            mu_lagrangian(&lp, &reference, &tol)?
        );
    }

    let beta = rotation_path(&LagrangianFrame::coordinate_x(1), &[PI], 16, &tol)?;
    println!("generator loop in dimension 1: {}", keller_maslov(&beta, &tol)?);
    Ok(())
}
