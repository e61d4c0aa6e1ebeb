//! Two-mode covariance matrices: physicality validation and reduction to
//! the standard form (a, b, c1, c2).
//!
//! Conventions: quadratures x̂ = (â+â†)/2, p̂ = −i(â−â†)/2, so the vacuum
//! variance is 1/4 and [x̂, p̂] = i/2. Covariance rows/columns are ordered
//! (x1, p1, x2, p2). In the common ħ=1 convention with x̂' = (â+â†)/√2,
//! covariance matrices are exactly twice the ones used here.

use nalgebra::{Matrix2, Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum quadrature variance in this crate's convention.
pub const VACUUM_VARIANCE: f64 = 0.25;

const SYMMETRY_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = -1e-10;
const DISCRIMINANT_FLOOR: f64 = -1e-10;

/// Standard-form parameters of a two-mode Gaussian covariance matrix:
/// diag blocks aI, bI and correlation block diag(c1, c2), with the
/// convention c1 ≥ |c2| ≥ sign-carrying c2 and c1 ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl GaussianParams {
    /// Validates and canonicalizes (a, b, c1, c2).
    ///
    /// Requires a, b ≥ 1/4 and ab ≥ c1², ab ≥ c2². The correlation pair is
    /// brought to the canonical ordering c1 ≥ |c2|, c1 ≥ 0; reordering and
    /// joint sign flips are local rotations, so the state's Q is unchanged.
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !v.is_finite() || v < VACUUM_VARIANCE - 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "{name} < 1/4: standard-form diagonal {name} = {v} is below the vacuum variance"
                )));
            }
        }
        let ab = a * b;
        for (name, c) in [("c1", c1), ("c2", c2)] {
            if !c.is_finite() || c * c > ab * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::InvalidInput(format!(
                    "{name}² > ab: correlation {name} = {c} exceeds the positivity bound √(ab) = {}",
                    ab.sqrt()
                )));
            }
        }
        let (hi, lo) = if c1.abs() >= c2.abs() { (c1, c2) } else { (c2, c1) };
        let sign = (c1 * c2).signum();
        let (c1, c2) = if hi.abs() == 0.0 {
            (0.0, 0.0)
        } else {
            (hi.abs(), if lo == 0.0 { 0.0 } else { sign * lo.abs() })
        };
        Ok(Self { a, b, c1, c2 })
    }

    /// The standard-form covariance matrix for these parameters.
    pub fn covariance(&self) -> CovarianceMatrix {
        let (a, b, c1, c2) = (self.a, self.b, self.c1, self.c2);
        CovarianceMatrix::from_matrix(Matrix4::new(
            a, 0.0, c1, 0.0, //
            0.0, a, 0.0, c2, //
            c1, 0.0, b, 0.0, //
            0.0, c2, 0.0, b,
        ))
    }
}

/// A general 4×4 real covariance matrix over (x1, p1, x2, p2).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    v: Matrix4<f64>,
}

/// On-disk JSON form: `{"V": [[...], [...], [...], [...]]}`.
#[derive(Serialize, Deserialize)]
struct CovarianceFile {
    #[serde(rename = "V")]
    v: [[f64; 4]; 4],
}

impl CovarianceMatrix {
    pub fn from_matrix(v: Matrix4<f64>) -> Self {
        Self { v }
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.v
    }

    /// Parses the JSON object {"V": [[...4×4...]]}.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CovarianceFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("covariance JSON: {e}")))?;
        let mut v = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                v[(i, j)] = file.v[i][j];
            }
        }
        Ok(Self { v })
    }

    pub fn to_json(&self) -> String {
        let mut rows = [[0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.v[(i, j)];
            }
        }
        serde_json::to_string(&CovarianceFile { v: rows }).expect("serializing covariance")
    }
}

/// The 4×4 symplectic form for (x1, p1, x2, p2): block-diagonal [[0,1],[-1,0]].
pub fn symplectic_form() -> Matrix4<f64> {
    let mut w = Matrix4::zeros();
    w[(0, 1)] = 1.0;
    w[(1, 0)] = -1.0;
    w[(2, 3)] = 1.0;
    w[(3, 2)] = -1.0;
    w
}

/// One violated invariant together with its numeric margin
/// (negative margins measure how far the check failed).
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub invariant: String,
    pub margin: f64,
}

/// Outcome of `validate_covariance`: empty violation list means valid.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationVerdict {
    pub violations: Vec<Violation>,
}

impl ValidationVerdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.is_valid() {
            "valid".to_owned()
        } else {
            self.violations
                .iter()
                .map(|v| format!("{} (margin {:.3e})", v.invariant, v.margin))
                .collect::<Vec<_>>()
                .join("; ")
        }
    }
}

/// Checks symmetry and physicality (V + (i/4)Ω ⪰ 0) of a covariance matrix.
///
/// Physicality is tested through the real 8×8 embedding of the Hermitian
/// matrix V + (i/4)Ω: for H = V + iB the block matrix [[V, −B], [B, V]] is
/// real symmetric with the same spectrum (doubled).
pub fn validate_covariance(cov: &CovarianceMatrix) -> ValidationVerdict {
    let v = cov.matrix();
    let mut violations = Vec::new();

    let mut asym: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            asym = asym.max((v[(i, j)] - v[(j, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL {
        violations.push(Violation {
            invariant: "symmetry |V - Vᵀ| ≤ 1e-12".to_owned(),
            margin: SYMMETRY_TOL - asym,
        });
    }

    // Work with the symmetrized matrix so the remaining checks stay meaningful.
    let vs = (v + v.transpose()) * 0.5;

    let det_a = vs.fixed_view::<2, 2>(0, 0).into_owned().determinant();
    let det_b = vs.fixed_view::<2, 2>(2, 2).into_owned().determinant();
    for (name, det) in [("a", det_a), ("b", det_b)] {
        let floor = VACUUM_VARIANCE * VACUUM_VARIANCE;
        let value = if det >= 0.0 { det.sqrt() } else { f64::NEG_INFINITY };
        if det < floor - 1e-12 {
            violations.push(Violation {
                invariant: format!("{name} < 1/4 (single-mode block below vacuum)"),
                margin: value - VACUUM_VARIANCE,
            });
        }
    }

    let b = symplectic_form() * 0.25;
    let mut h = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            h[(i, j)] = vs[(i, j)];
            h[(i + 4, j + 4)] = vs[(i, j)];
            h[(i, j + 4)] = -b[(i, j)];
            h[(i + 4, j)] = b[(i, j)];
        }
    }
    let eigs = h.symmetric_eigenvalues();
    let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_eig < EIGEN_FLOOR {
        violations.push(Violation {
            invariant: "uncertainty relation V + (i/4)Ω ⪰ 0".to_owned(),
            margin: min_eig,
        });
    }

    ValidationVerdict { violations }
}

/// Reduces a valid covariance matrix to standard-form parameters via the
/// four local-symplectic invariants det𝒜, detℬ, det𝒞, detV:
/// a = √det𝒜, b = √detℬ, c1c2 = det𝒞, (ab−c1²)(ab−c2²) = detV.
pub fn standard_form_reduce(cov: &CovarianceMatrix) -> Result<GaussianParams> {
    let verdict = validate_covariance(cov);
    if !verdict.is_valid() {
        return Err(Error::NonPhysical(verdict.summary()));
    }
    let v = (cov.matrix() + cov.matrix().transpose()) * 0.5;

    let block_a: Matrix2<f64> = v.fixed_view::<2, 2>(0, 0).into_owned();
    let block_b: Matrix2<f64> = v.fixed_view::<2, 2>(2, 2).into_owned();
    let block_c: Matrix2<f64> = v.fixed_view::<2, 2>(0, 2).into_owned();

    let a = block_a.determinant().sqrt();
    let b = block_b.determinant().sqrt();
    let p = block_c.determinant(); // c1·c2
    let det_v = v.determinant();

    let ab = a * b;
    if !ab.is_finite() || ab <= 0.0 {
        return Err(Error::SingularCovariance);
    }
    // (ab−c1²)(ab−c2²) = detV  ⇒  c1² + c2² = (ab)² + (c1c2)² − detV, scaled by ab.
    let s2 = ((ab * ab) + p * p - det_v) / ab;
    let scale = (ab * ab).max(1.0);
    let mut disc = s2 * s2 - 4.0 * p * p;
    if disc < DISCRIMINANT_FLOOR * scale {
        return Err(Error::DegenerateInvariants { discriminant: disc });
    }
    disc = disc.max(0.0);
    let root = disc.sqrt();
    let c1_sq = ((s2 + root) * 0.5).max(0.0);
    let c2_sq = ((s2 - root) * 0.5).max(0.0);

    let c1 = c1_sq.sqrt();
    let c2 = if p == 0.0 { 0.0 } else { p.signum() * c2_sq.sqrt() };
    GaussianParams::new(a, b, c1, c2)
}
