//! Indices expressed through the canonical ones: spectral flow, the
//! Robbin-Salamon index, the Hörmander index, and direct sums of lifts.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lagrangian::{frame_from_graph, LagrangianFrame};
use crate::linalg::{inertia, max_abs, RMat};
use crate::paths::{mu_lagrangian, LagrangianPath, PathPoint, SampledPath, SymplecticPath};
use crate::signature::tau;
use crate::symplectic::{check_symmetric, SymplecticMatrix};
use crate::tolerance::Tolerances;

pub use crate::leray::direct_sum_lift;

impl PathPoint for RMat {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn gap(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        max_abs(&(self - other))
    }
}

/// A family `t ↦ A(t)` of real symmetric matrices on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct SymmetricFamily {
    path: SampledPath<RMat>,
}

impl SymmetricFamily {
    pub fn from_samples(samples: Vec<(f64, RMat)>, tol: &Tolerances) -> Result<Self> {
        for (_, a) in &samples {
            check_symmetric(a, tol)?;
        }
        Ok(Self {
            path: SampledPath::from_samples(samples)?,
        })
    }

    /// Family given by a function, checked for symmetry wherever it is evaluated.
    pub fn from_fn(
        f: impl Fn(f64) -> Result<RMat> + Send + Sync + 'static,
        intervals: usize,
        tol: &Tolerances,
    ) -> Result<Self> {
        let tol = *tol;
        let path = SampledPath::from_fn(
            move |t| {
                let a = f(t)?;
                check_symmetric(&a, &tol)?;
                Ok(a)
            },
            intervals,
        )?;
        Ok(Self { path })
    }

    /// `A(t) = Σ_k c_k t^k`.
    pub fn polynomial(coefficients: Vec<RMat>, intervals: usize, tol: &Tolerances) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(Error::BadInput("polynomial needs at least one coefficient".into()));
        };
        let shape = first.shape();
        for c in &coefficients {
            if c.shape() != shape {
                return Err(Error::DimensionMismatch {
                    expected: shape.0,
                    found: c.nrows(),
                });
            }
            check_symmetric(c, tol)?;
        }
        let coefficients = Arc::new(coefficients);
        Self::from_fn(
            move |t| {
                let mut acc = RMat::zeros(shape.0, shape.1);
                for c in coefficients.iter().rev() {
                    acc = acc * t + c;
                }
                Ok(acc)
            },
            intervals,
            tol,
        )
    }

    /// `A(t) = (1 - t) A0 + t A1`.
    pub fn linear(a0: &RMat, a1: &RMat, intervals: usize, tol: &Tolerances) -> Result<Self> {
        Self::polynomial(vec![a0.clone(), a1 - a0], intervals, tol)
    }

    pub fn constant(a: &RMat, tol: &Tolerances) -> Result<Self> {
        check_symmetric(a, tol)?;
        Ok(Self {
            path: SampledPath::constant(a.clone()),
        })
    }

    pub fn n(&self) -> usize {
        self.path.n()
    }

    pub fn start(&self) -> &RMat {
        self.path.start()
    }

    pub fn end(&self) -> &RMat {
        self.path.end()
    }

    pub fn at(&self, t: f64) -> Result<RMat> {
        self.path.eval(t)
    }

    pub fn path(&self) -> &SampledPath<RMat> {
        &self.path
    }
}

/// Exact half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInteger {
    pub twice_value: i64,
}

impl HalfInteger {
    pub fn from_twice(twice_value: i64) -> Self {
        Self { twice_value }
    }

    pub fn from_integer(v: i64) -> Self {
        Self { twice_value: 2 * v }
    }

    pub fn value(self) -> f64 {
        self.twice_value as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice_value % 2 == 0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

/// `sign A(1) - sign A(0)`.
pub fn spectral_flow(family: &SymmetricFamily, tol: &Tolerances) -> Result<i64> {
    let mut sign = [0i64; 2];
    for (slot, a) in sign.iter_mut().zip([family.start(), family.end()]) {
        let i = inertia(a, tol.tol_sig)?;
        if i.null > 0 {
            return Err(Error::IllConditioned(format!(
                "endpoint matrix has {} null eigenvalues",
                i.null
            )));
        }
        *slot = i.positive as i64 - i.negative as i64;
    }
    Ok(sign[1] - sign[0])
}

/// `t ↦ graph A(t)`.
pub fn graph_path(family: &SymmetricFamily, tol: &Tolerances) -> Result<LagrangianPath> {
    let tol = *tol;
    family.path.try_map(move |a| frame_from_graph(a, &tol))
}

/// `t ↦ [[I, 0], [A(t), I]]`.
pub fn shear_path(family: &SymmetricFamily, tol: &Tolerances) -> Result<SymplecticPath> {
    let tol = *tol;
    family.path.try_map(move |a| SymplecticMatrix::shear(a, &tol))
}

/// Half of the canonical Lagrangian path index.
pub fn robbin_salamon(path: &LagrangianPath, plane: &LagrangianFrame, tol: &Tolerances) -> Result<HalfInteger> {
    Ok(HalfInteger::from_twice(mu_lagrangian(path, plane, tol)?))
}

/// `ξ = (τ(l1, l2, l3) - τ(l1, l2, l4)) / 2`.
pub fn hormander_xi(
    l1: &LagrangianFrame,
    l2: &LagrangianFrame,
    l3: &LagrangianFrame,
    l4: &LagrangianFrame,
    tol: &Tolerances,
) -> Result<HalfInteger> {
    Ok(HalfInteger::from_twice(tau(l1, l2, l3, tol)? - tau(l1, l2, l4, tol)?))
}

/// `ξ` from any path `λ34` joining `l3` to `l4`:
/// `μ_RS(λ34, l2) - μ_RS(λ34, l1)`.
pub fn hormander_xi_by_path(
    l1: &LagrangianFrame,
    l2: &LagrangianFrame,
    path34: &LagrangianPath,
    tol: &Tolerances,
) -> Result<HalfInteger> {
    let a = robbin_salamon(path34, l2, tol)?;
    let b = robbin_salamon(path34, l1, tol)?;
    Ok(HalfInteger::from_twice(a.twice_value - b.twice_value))
}
