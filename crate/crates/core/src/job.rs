//! JSON job descriptions and index reports for the command-line front end.
//!
//! Matrices are row-major nested arrays. Floats in emitted reports carry 17
//! significant digits so that every value re-parses to the same `f64`.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::derived::{graph_path, hormander_xi, shear_path, spectral_flow, HalfInteger, SymmetricFamily};
use crate::error::{Error, ErrorCode, Result};
use crate::lagrangian::{frame_from_graph, LagrangianFrame};
use crate::leray::{lift_of, mu_bar_explained};
use crate::linalg::RMat;
use crate::paths::{
    keller_maslov, lift_path, mu_ell, mu_lagrangian_detailed, mu_symplectic_detailed, rotation_path,
    symplectic_rotation_path, LagrangianPath, SymplecticPath,
};
use crate::signature::{inert_index, kashiwara_tau};
use crate::symplectic::SymplecticMatrix;
use crate::tolerance::Tolerances;

pub type Matrix = Vec<Vec<f64>>;

const DEFAULT_INTERVALS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexKind {
    KellerMaslov,
    Leray,
    Lagrangian,
    Symplectic,
    MuEll,
    Kashiwara,
    Inert,
    Hormander,
    Rs,
    SpectralFlow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneSpec {
    CoordinateX,
    CoordinateXstar,
    Graph(Matrix),
    /// `[X, P]`, each `n x n`.
    Frame([Matrix; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// Frames as row-major `2n x n` arrays; times default to a uniform grid.
    LagrangianSamples {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<Vec<f64>>,
        frames: Vec<Matrix>,
    },
    /// Row-major `2n x 2n` matrices.
    SymplecticSamples {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<Vec<f64>>,
        matrices: Vec<Matrix>,
    },
    /// `A(t) = Σ_k c_k t^k`; a graph path, or the shear path for symplectic indices.
    GraphPolynomial {
        coefficients: Vec<Matrix>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intervals: Option<usize>,
    },
    /// `t ↦ diag(e^{i t a_j})`, applied to `base` (default `X*`) for Lagrangian indices.
    Rotation {
        angles: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<PlaneSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intervals: Option<usize>,
    },
    /// `t ↦ [[I, 0], [A(t), I]]` with polynomial `A`.
    Shear {
        coefficients: Vec<Matrix>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intervals: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftSpec {
    pub plane: PlaneSpec,
    #[serde(default)]
    pub branch: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub planes: Vec<PlaneSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lifts: Vec<LiftSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// An integer, or a half-integer as `{"twice_value": k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexValue {
    Integer(i64),
    Half(HalfInteger),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportError {
    pub code: ErrorCode,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureCounts {
    pub positive: usize,
    pub negative: usize,
    pub null: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexReport {
    pub index: Option<IndexKind>,
    pub value: Option<IndexValue>,
    pub error: Option<ReportError>,
    pub inputs: Option<JobSpec>,
    /// Branches `k` of the lifts `θ0 + 2kπ` chosen for the inputs.
    pub lift_branches: Vec<i64>,
    /// Arguments of `det w` used: path start, path end and reference for
    /// path indices; the two lifts for the Leray index.
    pub thetas: Vec<f64>,
    /// Phases `ψ` of the transversal companions `e^{iψ} I` used, if any.
    pub companions: Vec<f64>,
    /// Samples of the lifted path after refinement.
    pub samples: Option<usize>,
    pub signature: Option<SignatureCounts>,
    pub tolerances: Tolerances,
}

impl IndexReport {
    fn empty(spec: Option<&JobSpec>, index: Option<IndexKind>, tol: Tolerances) -> Self {
        Self {
            index,
            value: None,
            error: None,
            inputs: spec.cloned(),
            lift_branches: Vec::new(),
            thetas: Vec::new(),
            companions: Vec::new(),
            samples: None,
            signature: None,
            tolerances: tol,
        }
    }

    /// Failure report for input that could not be parsed.
    pub fn bad_input(message: impl Into<String>, tol: Tolerances) -> Self {
        Self {
            error: Some(ReportError {
                code: ErrorCode::BadInput,
                message: message.into(),
            }),
            ..Self::empty(None, None, tol)
        }
    }

    /// Process exit code: 0 on success, otherwise that of the error class.
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, |e| e.code.exit_code())
    }
}

/// Command-line overrides applied on top of a job's own settings.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub index: Option<IndexKind>,
    pub tol_rank: Option<f64>,
    pub tol_sig: Option<f64>,
    pub tol_round: Option<f64>,
    pub refine_depth: Option<u32>,
}

impl Overrides {
    fn apply(&self, mut tol: Tolerances) -> Tolerances {
        if let Some(v) = self.tol_rank {
            tol.tol_rank = v;
        }
        if let Some(v) = self.tol_sig {
            tol.tol_sig = v;
        }
        if let Some(v) = self.tol_round {
            tol.tol_round = v;
        }
        if let Some(v) = self.refine_depth {
            tol.refine_depth = v;
        }
        tol
    }
}

fn matrix(rows: &Matrix, shape: (usize, usize), what: &str) -> Result<RMat> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(Error::BadInput(format!(
            "{what} must be a {}x{} array",
            shape.0, shape.1
        )));
    }
    Ok(RMat::from_fn(shape.0, shape.1, |i, j| rows[i][j]))
}

fn plane(spec: &PlaneSpec, n: usize, tol: &Tolerances) -> Result<LagrangianFrame> {
    match spec {
        PlaneSpec::CoordinateX => Ok(LagrangianFrame::coordinate_x(n)),
        PlaneSpec::CoordinateXstar => Ok(LagrangianFrame::coordinate_xstar(n)),
        PlaneSpec::Graph(a) => frame_from_graph(&matrix(a, (n, n), "graph matrix")?, tol),
        PlaneSpec::Frame([x, p]) => LagrangianFrame::new(
            &matrix(x, (n, n), "frame X block")?,
            &matrix(p, (n, n), "frame P block")?,
            tol,
        ),
    }
}

fn times(given: &Option<Vec<f64>>, count: usize) -> Result<Vec<f64>> {
    match given {
        Some(t) if t.len() == count => Ok(t.clone()),
        Some(t) => Err(Error::BadInput(format!("{} times given for {count} samples", t.len()))),
        None if count < 2 => Err(Error::BadInput("a path needs at least two samples".into())),
        None => Ok((0..count)
            .map(|k| {
                if k + 1 == count {
                    1.0
                } else {
                    k as f64 / (count - 1) as f64
                }
            })
            .collect()),
    }
}

fn family(coefficients: &[Matrix], intervals: Option<usize>, n: usize, tol: &Tolerances) -> Result<SymmetricFamily> {
    let coefficients = coefficients
        .iter()
        .map(|c| matrix(c, (n, n), "polynomial coefficient"))
        .collect::<Result<Vec<_>>>()?;
    SymmetricFamily::polynomial(coefficients, intervals.unwrap_or(DEFAULT_INTERVALS), tol)
}

fn lagrangian_path(spec: &PathSpec, n: usize, tol: &Tolerances) -> Result<LagrangianPath> {
    match spec {
        PathSpec::LagrangianSamples { times: t, frames } => {
            let t = times(t, frames.len())?;
            let samples = frames
                .iter()
                .zip(t)
                .map(|(f, t)| LagrangianFrame::from_stacked(matrix(f, (2 * n, n), "frame")?, tol).map(|f| (t, f)))
                .collect::<Result<Vec<_>>>()?;
            LagrangianPath::from_samples(samples)
        }
        PathSpec::GraphPolynomial {
            coefficients,
            intervals,
        } => graph_path(&family(coefficients, *intervals, n, tol)?, tol),
        PathSpec::Rotation {
            angles,
            base,
            intervals,
        } => {
            let base = match base {
                Some(b) => plane(b, n, tol)?,
                None => LagrangianFrame::coordinate_xstar(n),
            };
            rotation_path(&base, angles, intervals.unwrap_or(DEFAULT_INTERVALS), tol)
        }
        PathSpec::SymplecticSamples { .. } | PathSpec::Shear { .. } => Err(Error::BadInput(
            "this index needs a Lagrangian path (lagrangian_samples, graph_polynomial or rotation)".into(),
        )),
    }
}

fn symplectic_path(spec: &PathSpec, n: usize, tol: &Tolerances) -> Result<SymplecticPath> {
    match spec {
        PathSpec::SymplecticSamples { times: t, matrices } => {
            let t = times(t, matrices.len())?;
            let samples = matrices
                .iter()
                .zip(t)
                .map(|(m, t)| {
                    SymplecticMatrix::new(matrix(m, (2 * n, 2 * n), "symplectic matrix")?, tol).map(|m| (t, m))
                })
                .collect::<Result<Vec<_>>>()?;
            SymplecticPath::from_samples(samples)
        }
        PathSpec::Shear {
            coefficients,
            intervals,
        }
        | PathSpec::GraphPolynomial {
            coefficients,
            intervals,
        } => shear_path(&family(coefficients, *intervals, n, tol)?, tol),
        PathSpec::Rotation { angles, intervals, .. } => {
            if angles.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: angles.len(),
                });
            }
            symplectic_rotation_path(angles, intervals.unwrap_or(DEFAULT_INTERVALS))
        }
        PathSpec::LagrangianSamples { .. } => Err(Error::BadInput(
            "this index needs a symplectic path (symplectic_samples, shear, graph_polynomial or rotation)".into(),
        )),
    }
}

fn require_path(spec: &JobSpec) -> Result<&PathSpec> {
    spec.path
        .as_ref()
        .ok_or_else(|| Error::BadInput("this index needs a \"path\"".into()))
}

fn planes(spec: &JobSpec, count: usize, tol: &Tolerances) -> Result<Vec<LagrangianFrame>> {
    if spec.planes.len() != count {
        return Err(Error::BadInput(format!(
            "this index needs exactly {count} planes, got {}",
            spec.planes.len()
        )));
    }
    spec.planes.iter().map(|p| plane(p, spec.n, tol)).collect()
}

fn compute(spec: &JobSpec, kind: IndexKind, report: &mut IndexReport) -> Result<IndexValue> {
    let tol = report.tolerances;
    let n = spec.n;
    if n == 0 {
        return Err(Error::BadInput("n must be positive".into()));
    }
    let path_index = |report: &mut IndexReport, idx: crate::paths::PathIndex| {
        report.lift_branches = vec![0, 0];
        report.thetas = vec![idx.start_theta, idx.end_theta, idx.reference_theta];
        report.companions = idx.companions;
        report.samples = Some(idx.samples);
        idx.value
    };
    match kind {
        IndexKind::KellerMaslov => {
            let path = lagrangian_path(require_path(spec)?, n, &tol)?;
            let value = keller_maslov(&path, &tol)?;
            let lifted = lift_path(&path, 0, &tol)?;
            report.lift_branches = vec![0];
            report.thetas = vec![lifted.thetas()[0], lifted.thetas()[lifted.sample_count() - 1]];
            report.samples = Some(lifted.sample_count());
            Ok(IndexValue::Integer(value))
        }
        IndexKind::Leray => {
            if spec.lifts.len() != 2 {
                return Err(Error::BadInput("leray needs exactly two \"lifts\"".into()));
            }
            let lifts = spec
                .lifts
                .iter()
                .map(|l| Ok(lift_of(&plane(&l.plane, n, &tol)?, l.branch)))
                .collect::<Result<Vec<_>>>()?;
            let m = mu_bar_explained(&lifts[0], &lifts[1], &tol)?;
            report.lift_branches = spec.lifts.iter().map(|l| l.branch).collect();
            report.thetas = lifts.iter().map(|l| l.theta()).collect();
            report.companions = m.companion.iter().map(|c| c.phase).collect();
            Ok(IndexValue::Integer(m.value))
        }
        IndexKind::Lagrangian => {
            let path = lagrangian_path(require_path(spec)?, n, &tol)?;
            let reference = planes(spec, 1, &tol)?;
            let idx = mu_lagrangian_detailed(&path, &reference[0], &tol)?;
            Ok(IndexValue::Integer(path_index(report, idx)))
        }
        IndexKind::Rs => {
            let path = lagrangian_path(require_path(spec)?, n, &tol)?;
            let reference = planes(spec, 1, &tol)?;
            let idx = mu_lagrangian_detailed(&path, &reference[0], &tol)?;
            Ok(IndexValue::Half(HalfInteger::from_twice(path_index(report, idx))))
        }
        IndexKind::Symplectic => {
            let path = symplectic_path(require_path(spec)?, n, &tol)?;
            let reference = planes(spec, 1, &tol)?;
            let idx = mu_symplectic_detailed(&path, &reference[0], &tol)?;
            Ok(IndexValue::Integer(path_index(report, idx)))
        }
        IndexKind::MuEll => {
            let path = symplectic_path(require_path(spec)?, n, &tol)?;
            let reference = planes(spec, 1, &tol)?;
            let value = mu_ell(&path, &reference[0], &tol)?;
            report.lift_branches = vec![0];
            Ok(IndexValue::Integer(value))
        }
        IndexKind::Kashiwara => {
            let p = planes(spec, 3, &tol)?;
            let s = kashiwara_tau(&p[0], &p[1], &p[2], &tol)?;
            report.signature = Some(SignatureCounts {
                positive: s.positive_count,
                negative: s.negative_count,
                null: s.null_count,
            });
            Ok(IndexValue::Integer(s.tau))
        }
        IndexKind::Inert => {
            let p = planes(spec, 3, &tol)?;
            Ok(IndexValue::Integer(inert_index(&p[0], &p[1], &p[2], &tol)?))
        }
        IndexKind::Hormander => {
            let p = planes(spec, 4, &tol)?;
            Ok(IndexValue::Half(hormander_xi(&p[0], &p[1], &p[2], &p[3], &tol)?))
        }
        IndexKind::SpectralFlow => match require_path(spec)? {
            PathSpec::GraphPolynomial {
                coefficients,
                intervals,
            }
            | PathSpec::Shear {
                coefficients,
                intervals,
            } => Ok(IndexValue::Integer(spectral_flow(
                &family(coefficients, *intervals, n, &tol)?,
                &tol,
            )?)),
            _ => Err(Error::BadInput(
                "spectral-flow needs a graph_polynomial or shear path".into(),
            )),
        },
    }
}

/// Runs a parsed job. Errors are folded into the report.
pub fn run_job(spec: &JobSpec, overrides: &Overrides) -> IndexReport {
    let tol = overrides.apply(spec.tolerances.unwrap_or_default());
    let kind = overrides.index.or(spec.index);
    let mut report = IndexReport::empty(Some(spec), kind, tol);
    let Some(kind) = kind else {
        report.error = Some(ReportError {
            code: ErrorCode::BadInput,
            message: "no index kind given (job \"index\" field or --index)".into(),
        });
        return report;
    };
    match compute(spec, kind, &mut report) {
        Ok(v) => report.value = Some(v),
        Err(e) => {
            report.error = Some(ReportError {
                code: e.code(),
                message: e.to_string(),
            });
            report.value = None;
        }
    }
    report
}

pub fn parse_job(text: &str) -> Result<JobSpec> {
    serde_json::from_str(text).map_err(|e| Error::BadInput(format!("job schema: {e}")))
}

/// Reads, parses and runs a job file.
pub fn run_compute(path: &Path, overrides: &Overrides) -> IndexReport {
    let fallback = overrides.apply(Tolerances::default());
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return IndexReport::bad_input(format!("cannot read {}: {e}", path.display()), fallback),
    };
    match parse_job(&text) {
        Ok(spec) => run_job(&spec, overrides),
        Err(e) => IndexReport::bad_input(e.to_string(), fallback),
    }
}

/// Compact JSON whose floats are printed with 17 significant digits.
struct RoundTripFormatter;

impl serde_json::ser::Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RoundTripFormatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn parse_report(text: &str) -> Result<IndexReport> {
    serde_json::from_str(text).map_err(|e| Error::BadInput(format!("report schema: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> IndexReport {
        run_job(&parse_job(text).unwrap(), &Overrides::default())
    }

    #[test]
    fn spectral_flow_job() {
        let r = run(
            r#"{"n":1,"index":"spectral-flow","path":{"kind":"graph_polynomial","coefficients":[[[-1.0]],[[2.0]]]}}"#,
        );
        assert_eq!(r.value, Some(IndexValue::Integer(2)));
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn generator_loop_job() {
        let r = run(
            r#"{"n":1,"index":"lagrangian","path":{"kind":"rotation","angles":[3.141592653589793],"base":"coordinate_x"},"planes":[{"graph":[[1.0]]}]}"#,
        );
        assert_eq!(r.value, Some(IndexValue::Integer(2)));
        assert_eq!(r.thetas.len(), 3);
    }

    #[test]
    fn hormander_job() {
        let r = run(
            r#"{"n":1,"index":"hormander","planes":["coordinate_xstar",{"graph":[[1.0]]},"coordinate_x","coordinate_xstar"]}"#,
        );
        assert_eq!(r.value, Some(IndexValue::Half(HalfInteger::from_twice(1))));
        assert!(to_json(&r).contains(r#""value":{"twice_value":1}"#));
    }

    #[test]
    fn errors_carry_codes() {
        let r = run(r#"{"n":1,"index":"kashiwara","planes":["coordinate_x"]}"#);
        assert_eq!(r.error.as_ref().unwrap().code, ErrorCode::BadInput);
        assert_eq!(r.value, None);
        assert_eq!(r.exit_code(), 2);

        let r = run(
            r#"{"n":1,"index":"keller-maslov","path":{"kind":"lagrangian_samples","frames":[[[1.0],[0.0]],[[0.0],[1.0]],[[-1.0],[0.0]]]}}"#,
        );
        assert_eq!(r.error.as_ref().unwrap().code, ErrorCode::Undersampled);
        assert_eq!(r.exit_code(), 3);

        assert!(parse_job(r#"{"n":1,"bogus":true}"#).is_err());
    }

    #[test]
    fn floats_round_trip() {
        let r =
            run(r#"{"n":1,"index":"leray","lifts":[{"plane":{"graph":[[0.3]]},"branch":1},{"plane":"coordinate_x"}]}"#);
        let text = to_json(&r);
        let back = parse_report(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(to_json(&back), text);
    }
}
