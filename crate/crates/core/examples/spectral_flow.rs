//! Spectral flow of a symmetric family against the index of its graph
//! path and of its shear path, plus the half-integer Robbin-Salamon value.

use maslov::linalg::RMat;
use maslov::random as rnd;
use maslov::{
    graph_path, mu_lagrangian, mu_symplectic, robbin_salamon, shear_path, spectral_flow, LagrangianFrame,
    SymmetricFamily, Tolerances,
};

fn main() -> maslov::Result<()> {
    let tol = Tolerances::default();
    let a0 = RMat::from_element(1, 1, -1.0);
    let a1 = RMat::from_element(1, 1, 1.0);
    let family = SymmetricFamily::linear(&a0, &a1, 8, &tol)?;
    let x = LagrangianFrame::coordinate_x(1);
    println!("A(t) = 2t - 1: spectral flow {}", spectral_flow(&family, &tol)?);
    println!(
        "  RS(graph, X) = {}",
        robbin_salamon(&graph_path(&family, &tol)?, &x, &tol)?
    );

    // Ends on the singular set give half-integers.
    let half = SymmetricFamily::linear(&RMat::zeros(1, 1), &a1, 8, &tol)?;
    println!(
        "A(t) = t: RS(graph, X) = {}",
        robbin_salamon(&graph_path(&half, &tol)?, &x, &tol)?
    );

    let mut rng = rnd::seeded(2);
    for n in 1..=4 {
        let f = rnd::symmetric_family(&mut rng, n, 1e-2)?;
        let x = LagrangianFrame::coordinate_x(n);
        println!(
            "n = {n}: sf {:2}, graph {:2}, shear {:2}",
            spectral_flow(&f, &tol)?,
            mu_lagrangian(&graph_path(&f, &tol)?, &x, &tol)?,
            mu_symplectic(&shear_path(&f, &tol)?, &x, &tol)?
        );
    }
    Ok(())
}
