//! Dimensional additivity of the Leray index and the path indices.

use maslov::lagrangian::direct_sum_frames;
use maslov::paths::direct_sum_lagrangian_paths;
use maslov::random as rnd;
use maslov::{direct_sum_lift, mu_bar, mu_lagrangian, Tolerances};

fn main() -> maslov::Result<()> {
    let tol = Tolerances::default();
    let mut rng = rnd::seeded(8);
    let (a, b) = (rnd::lift(&mut rng, 1, 2), rnd::lift(&mut rng, 1, 2));
    let (c, d) = (rnd::lift(&mut rng, 2, 2), rnd::lift(&mut rng, 2, 2));
    println!(
        "mu(a+c, b+d) = {}, mu(a, b) + mu(c, d) = {} + {}",
        mu_bar(&direct_sum_lift(&a, &c), &direct_sum_lift(&b, &d), &tol)?,
        mu_bar(&a, &b, &tol)?,
        mu_bar(&c, &d, &tol)?
    );

    let p1 = rnd::connecting_path(a.frame(), b.frame(), 1, 48)?;
    let p2 = rnd::connecting_path(c.frame(), d.frame(), -1, 48)?;
    let (r1, r2) = (rnd::lagrangian(&mut rng, 1), rnd::lagrangian(&mut rng, 2));
    let whole = mu_lagrangian(
        &direct_sum_lagrangian_paths(&p1, &p2)?,
        &direct_sum_frames(&r1, &r2),
        &tol,
    )?;
    println!(
        "path index of the sum {whole}, parts {} + {}",
        mu_lagrangian(&p1, &r1, &tol)?,
        mu_lagrangian(&p2, &r2, &tol)?
    );
    Ok(())
}
