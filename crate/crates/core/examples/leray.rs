//! The Leray index on the universal cover: transversal and
//! non-transversal pairs, deck shifts and the coboundary identity.

use maslov::leray::mu_bar_explained;
use maslov::random as rnd;
use maslov::signature::tau;
use maslov::{deck_apply, lift_of, mu_bar, souriau_m, DeckAction, LagrangianFrame, Tolerances};

fn main() -> maslov::Result<()> {
    let tol = Tolerances::default();
    let x = lift_of(&LagrangianFrame::coordinate_x(1), 0);
    let xs = lift_of(&LagrangianFrame::coordinate_xstar(1), 0);
    println!(
        "m(X*, X) = {}, mu(X*, X) = {}",
        souriau_m(&xs, &x, &tol)?,
        mu_bar(&xs, &x, &tol)?
    );

    for k in -2..=2 {
        let shifted = deck_apply(DeckAction { k }, &xs);
        println!("k = {k:2}: mu(beta^k X*, X) = {:3}", mu_bar(&shifted, &x, &tol)?);
    }

    // A pair meeting in a line needs a transversal companion.
    let mut rng = rnd::seeded(11);
    let (a, b) = rnd::pair_with_intersection(&mut rng, 3, 1);
    let r = mu_bar_explained(&lift_of(&a, 1), &lift_of(&b, 0), &tol)?;
    println!(
        "non-transversal pair: mu = {}, companion {:?}",
        r.value,
        r.companion.map(|c| c.phase)
    );

    let l: Vec<_> = (0..3).map(|_| rnd::lift(&mut rng, 3, 2)).collect();
    let d = mu_bar(&l[0], &l[1], &tol)? - mu_bar(&l[0], &l[2], &tol)? + mu_bar(&l[1], &l[2], &tol)?;
    println!(
        "coboundary of mu = {d}, tau = {}",
        tau(l[0].frame(), l[1].frame(), l[2].frame(), &tol)?
    );
    Ok(())
}
