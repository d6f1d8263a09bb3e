//! Kashiwara signature of a few triples, and the cocycle identity on a
//! random quadruple.

use maslov::linalg::RMat;
use maslov::random as rnd;
use maslov::signature::tau_cochain;
use maslov::{coboundary, frame_from_graph, kashiwara_tau, LagrangianFrame, Tolerances};

fn main() -> maslov::Result<()> {
    let tol = Tolerances::default();
    let x = LagrangianFrame::coordinate_x(2);
    let xs = LagrangianFrame::coordinate_xstar(2);

    for diag in [[1.0, 2.0], [1.0, -3.0], [-0.5, -0.5], [0.0, 4.0]] {
        let a = RMat::from_diagonal(&nalgebra::DVector::from_row_slice(&diag));
        let s = kashiwara_tau(&xs, &frame_from_graph(&a, &tol)?, &x, &tol)?;
        println!(
            "A = diag{diag:?}: tau = {:2}  (+{} -{} null {})",
            s.tau, s.positive_count, s.negative_count, s.null_count
        );
    }

    let mut rng = rnd::seeded(3);
    let q: Vec<_> = (0..4).map(|_| rnd::lagrangian(&mut rng, 3)).collect();
    let d = coboundary(&tau_cochain(tol), &[&q[0], &q[1], &q[2], &q[3]])?;
    println!("coboundary of tau on a random quadruple in R^6: {d}");
    Ok(())
}
