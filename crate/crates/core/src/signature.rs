//! The Kashiwara signature of Lagrangian triples, the inertia index, and
//! integer cochains with their coboundary.

use crate::error::{Error, Result};
use crate::lagrangian::{intersection_dim, LagrangianFrame, StratumLabel};
use crate::linalg::{inertia, RMat};
use crate::symplectic::omega_matrix;
use crate::tolerance::Tolerances;

/// Sign counts of the quadratic form
/// `Q(z1, z2, z3) = ω(z1, z2) + ω(z2, z3) + ω(z3, z1)` on `l1 × l2 × l3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleSignature {
    pub tau: i64,
    pub positive_count: usize,
    pub negative_count: usize,
    pub null_count: usize,
}

/// Symmetric `3n x 3n` matrix of `Q` in frame coordinates.
pub fn kashiwara_gram(l1: &LagrangianFrame, l2: &LagrangianFrame, l3: &LagrangianFrame) -> Result<RMat> {
    let n = l1.n();
    for l in [l2, l3] {
        if l.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: l.n(),
            });
        }
    }
    let j = omega_matrix(n);
    let frames = [l1.stacked(), l2.stacked(), l3.stacked()];
    let mut g = RMat::zeros(3 * n, 3 * n);
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        let block = frames[a].transpose() * &j * frames[b];
        g.view_mut((a * n, b * n), (n, n)).copy_from(&block);
    }
    // Each block then holds ½ F_a^T J F_b, with the transpose opposite it.
    Ok((&g + g.transpose()) * 0.5)
}

pub fn kashiwara_tau(
    l1: &LagrangianFrame,
    l2: &LagrangianFrame,
    l3: &LagrangianFrame,
    tol: &Tolerances,
) -> Result<TripleSignature> {
    let g = kashiwara_gram(l1, l2, l3)?;
    let i = inertia(&g, tol.tol_sig)?;
    Ok(TripleSignature {
        tau: i.positive as i64 - i.negative as i64,
        positive_count: i.positive,
        negative_count: i.negative,
        null_count: i.null,
    })
}

/// Shorthand for the integer `τ`.
pub fn tau(l1: &LagrangianFrame, l2: &LagrangianFrame, l3: &LagrangianFrame, tol: &Tolerances) -> Result<i64> {
    Ok(kashiwara_tau(l1, l2, l3, tol)?.tau)
}

/// `(τ + n) / 2` on a pairwise transversal triple.
pub fn inert_index(l1: &LagrangianFrame, l2: &LagrangianFrame, l3: &LagrangianFrame, tol: &Tolerances) -> Result<i64> {
    for (a, b, name) in [(l1, l2, "l1, l2"), (l2, l3, "l2, l3"), (l3, l1, "l3, l1")] {
        let k = intersection_dim(a, b, tol)?;
        if k != StratumLabel(0) {
            return Err(Error::NotTransversal(format!("{name} meet in dimension {}", k.0)));
        }
    }
    let t = tau(l1, l2, l3, tol)?;
    let n = l1.n() as i64;
    debug_assert_eq!((t + n) % 2, 0);
    Ok((t + n) / 2)
}

type Evaluator<'a, P> = Box<dyn Fn(&[&P]) -> Result<i64> + Send + Sync + 'a>;

/// An integer-valued function on `(arity + 1)`-tuples of points.
pub struct Cochain<'a, P> {
    arity: usize,
    evaluator: Evaluator<'a, P>,
}

impl<'a, P> Cochain<'a, P> {
    pub fn new(arity: usize, evaluator: impl Fn(&[&P]) -> Result<i64> + Send + Sync + 'a) -> Self {
        Self {
            arity,
            evaluator: Box::new(evaluator),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, points: &[&P]) -> Result<i64> {
        if points.len() != self.arity + 1 {
            return Err(Error::ArityMismatch {
                arity: self.arity,
                expected: self.arity + 1,
                found: points.len(),
            });
        }
        (self.evaluator)(points)
    }
}

/// `Σ_j (-1)^j f(p_0, ..., p̂_j, ..., p_{k+1})`.
pub fn coboundary<P>(f: &Cochain<'_, P>, points: &[&P]) -> Result<i64> {
    let expected = f.arity + 2;
    if points.len() != expected {
        return Err(Error::ArityMismatch {
            arity: f.arity,
            expected,
            found: points.len(),
        });
    }
    let mut sum = 0;
    let mut face = Vec::with_capacity(points.len() - 1);
    for j in 0..points.len() {
        face.clear();
        face.extend(points.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, p)| *p));
        let v = f.eval(&face)?;
        sum += if j % 2 == 0 { v } else { -v };
    }
    Ok(sum)
}

/// `τ` as a 2-cochain on Lagrangian planes.
pub fn tau_cochain(tol: Tolerances) -> Cochain<'static, LagrangianFrame> {
    Cochain::new(2, move |p: &[&LagrangianFrame]| tau(p[0], p[1], p[2], &tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::frame_from_graph;
    use nalgebra::DVector;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn x(n: usize) -> LagrangianFrame {
        LagrangianFrame::coordinate_x(n)
    }

    fn xs(n: usize) -> LagrangianFrame {
        LagrangianFrame::coordinate_xstar(n)
    }

    fn graph(a: &[f64]) -> LagrangianFrame {
        frame_from_graph(&RMat::from_diagonal(&DVector::from_row_slice(a)), &tol()).unwrap()
    }

    #[test]
    fn tau_examples() {
        let g1 = graph(&[1.0]);
        let s = kashiwara_tau(&xs(1), &g1, &x(1), &tol()).unwrap();
        assert_eq!(s.tau, 1);
        assert_eq!(s.positive_count + s.negative_count + s.null_count, 3);
        assert_eq!(tau(&x(1), &g1, &xs(1), &tol()).unwrap(), -1);
        assert_eq!(tau(&g1, &g1, &x(1), &tol()).unwrap(), 0);
        assert_eq!(tau(&xs(3), &graph(&[2.0, -1.0, 0.5]), &x(3), &tol()).unwrap(), 1);
        assert_eq!(tau(&xs(2), &graph(&[-1.0, -1.0]), &x(2), &tol()).unwrap(), -2);
    }

    #[test]
    fn gram_of_reference_triple() {
        // Expanded by hand: [[0, a, c], [a, 0, a], [c, a, 0]] with
        // a = 1/(2√2), c = -1/2, so det = 2a²c = -1/8.
        let g = kashiwara_gram(&xs(1), &graph(&[1.0]), &x(1)).unwrap();
        assert!((g.determinant() + 0.125).abs() < 1e-12);
    }

    #[test]
    fn inert_examples() {
        let g1 = graph(&[1.0]);
        assert_eq!(inert_index(&xs(1), &g1, &x(1), &tol()).unwrap(), 1);
        assert_eq!(inert_index(&x(1), &g1, &xs(1), &tol()).unwrap(), 0);
        assert_eq!(inert_index(&xs(2), &graph(&[-1.0, -1.0]), &x(2), &tol()).unwrap(), 0);
        assert!(matches!(
            inert_index(&xs(2), &graph(&[1.0, 0.0]), &x(2), &tol()),
            Err(Error::NotTransversal(_))
        ));
    }

    #[test]
    fn coboundary_examples() {
        let constant: Cochain<'_, i32> = Cochain::new(1, |_| Ok(5));
        assert_eq!(coboundary(&constant, &[&1, &2, &3]).unwrap(), 5);
        let g = |v: i32| (v * v) as i64;
        let exact: Cochain<'_, i32> = Cochain::new(1, move |p| Ok(g(*p[1]) - g(*p[0])));
        assert_eq!(coboundary(&exact, &[&1, &7, &-3]).unwrap(), 0);
        assert!(matches!(
            coboundary(&exact, &[&1, &2]),
            Err(Error::ArityMismatch {
                arity: 1,
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn tau_cocycle_on_fixed_quadruple() {
        let planes = [xs(2), graph(&[1.0, -2.0]), x(2), graph(&[0.5, 3.0])];
        let refs: Vec<&LagrangianFrame> = planes.iter().collect();
        assert_eq!(coboundary(&tau_cochain(tol()), &refs).unwrap(), 0);
    }
}
