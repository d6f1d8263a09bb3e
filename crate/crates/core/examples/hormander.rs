//! Hörmander's index of four planes from signatures and from a
//! connecting path.

use maslov::random as rnd;
use maslov::{frame_from_graph, hormander_xi, hormander_xi_by_path, LagrangianFrame, Tolerances};

fn main() -> maslov::Result<()> {
    let tol = Tolerances::default();
    let xs = LagrangianFrame::coordinate_xstar(1);
    let x = LagrangianFrame::coordinate_x(1);
    let g = frame_from_graph(&maslov::linalg::RMat::from_element(1, 1, 1.0), &tol)?;
    println!("xi(X*, graph 1, X, X*) = {}", hormander_xi(&xs, &g, &x, &xs, &tol)?);

    let mut rng = rnd::seeded(9);
    for n in 1..=3 {
        let p: Vec<_> = (0..4).map(|_| rnd::lagrangian(&mut rng, n)).collect();
        let path = rnd::connecting_path(&p[2], &p[3], 1, 48)?;
        println!(
            "n = {n}: signature form {}, path form {}",
            hormander_xi(&p[0], &p[1], &p[2], &p[3], &tol)?,
            hormander_xi_by_path(&p[0], &p[1], &path, &tol)?
        );
    }
    Ok(())
}
