//! The discord marker Q.
//!
//! Q is a difference of two overlap integrals of the Wigner function,
//! nonnegative for every two-mode state and zero exactly on the states of
//! zero discord — those classical on the first mode, ρ = Σᵢ pᵢ|i⟩⟨i|₁ ⊗ σᵢ
//! with {|i⟩} orthonormal. Three evaluators:
//!
//! * `q_gaussian_closed` — closed form in the standard-form parameters
//!   (a, b, c₁, c₂) of a Gaussian state;
//! * `q_general` — exact evaluation for any polynomial × Gaussian Wigner
//!   function by assembling both integral terms over ten real variables
//!   (five complex phase-space arguments) and integrating each component
//!   tuple with the moment engine;
//! * `fock_q` (in the companion number-basis module) — an independent
//!   cross-check.
//!
//! The integral form being assembled:
//!
//!   Q = 4π³ ∫ [ W(α₁,α₂)W(α₃,α₂)W(α₅,α₄)W(α₅−α₃+α₁,α₄)
//!             − W(α₁,α₂)W(α₃,α₄)W(α₅,α₂)W(α₅−α₃+α₁,α₄) ]
//!       · exp[i4·Im(α₃*α₁ + α₅*α₃ − α₅*α₁)] ∏d²αᵢ
//!
//! with αₖ = x_k + ip_k laid out as real variables (x₁,p₁,…,x₅,p₅).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::cv::GaussianParams;
use crate::error::{Error, Result};
use crate::gauss::{self, ComplexGaussPoly};
use crate::poly::SparsePoly;
use crate::wigner::WignerState;

const PI: f64 = std::f64::consts::PI;
const IMAG_TOL: f64 = 1e-8;
const LOG_CLAMP: f64 = 1e-300;

/// Which evaluator produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedGaussian,
    GeneralWigner,
    FockOracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedGaussian => "closed-gaussian",
            Method::GeneralWigner => "general-wigner",
            Method::FockOracle => "fock-oracle",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Method-specific diagnostics attached to a report.
#[derive(Debug, Clone, Default)]
pub struct ReportMeta {
    /// Component 4-tuples integrated (general evaluator).
    pub tuple_count: Option<usize>,
    /// Largest |Im| discarded when realizing the two terms.
    pub imag_residue: Option<f64>,
    /// Truncation dimensions (dim A, dim B) of the number-basis oracle.
    pub fock_dims: Option<(usize, usize)>,
    /// Probability mass lost to truncation in the number-basis oracle.
    pub truncation_deficit: Option<f64>,
}

/// A computed marker value with its two constituent terms.
#[derive(Debug, Clone)]
pub struct QReport {
    pub q: f64,
    pub term1: f64,
    pub term2: f64,
    pub method: Method,
    pub meta: ReportMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Zero,
    Nonzero,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Zero => "zero",
            Verdict::Nonzero => "nonzero",
        }
    }
}

/// Decision against an explicit numerical threshold. Floating point cannot
/// certify an exact zero, so the boundary is a numerical one; the
/// underlying criterion itself is exact.
#[derive(Debug, Clone)]
pub struct DiscordVerdict {
    pub verdict: Verdict,
    pub q: f64,
    pub threshold: f64,
}

impl DiscordVerdict {
    /// Verdict by comparing a computed q against a threshold.
    pub fn from_q(q: f64, threshold: f64) -> Self {
        let verdict = if q > threshold { Verdict::Nonzero } else { Verdict::Zero };
        Self { verdict, q, threshold }
    }
}

/// Closed form of Q for a Gaussian state in standard form:
///
///   term1 = 1 / (32·√(∏ᵢ (ab−cᵢ²)(b+16a²b−16acᵢ²)))
///   term2 = 1 / (32·a·(b² + 16·∏ᵢ(ab−cᵢ²)))
pub fn q_gaussian_closed(p: &GaussianParams) -> Result<QReport> {
    let (a, b) = (p.a, p.b);
    let scale = (a * b).max(1.0);
    let mut sqrt_arg = 1.0;
    let mut det_prod = 1.0;
    for c in [p.c1, p.c2] {
        let f = a * b - c * c;
        let g = b + 16.0 * a * f;
        if f <= 1e-15 * scale || g <= 1e-15 * scale {
            return Err(Error::DegenerateInvariants { discriminant: f.min(g) });
        }
        sqrt_arg *= f * g;
        det_prod *= f;
    }
    let term1 = 1.0 / (32.0 * sqrt_arg.sqrt());
    let term2 = 1.0 / (32.0 * a * (b * b + 16.0 * det_prod));
    Ok(QReport {
        q: term1 - term2,
        term1,
        term2,
        method: Method::ClosedGaussian,
        meta: ReportMeta::default(),
    })
}

/// The sign-analysis polynomial
/// f = ∏ᵢ[(ab−χᵢ)(b+16a²b−16aχᵢ)] − a²[b²+16∏ᵢ(ab−χᵢ)]², χᵢ = cᵢ²:
/// f ≤ 0 for all valid parameters (equivalently term1 ≥ term2, i.e. Q ≥ 0),
/// with equality exactly at χ₁ = χ₂ = 0.
pub fn sign_analysis_f(p: &GaussianParams) -> f64 {
    let (a, b) = (p.a, p.b);
    let mut prod = 1.0;
    let mut det_prod = 1.0;
    for chi in [p.c1 * p.c1, p.c2 * p.c2] {
        prod *= (a * b - chi) * (b + 16.0 * a * a * b - 16.0 * a * chi);
        det_prod *= a * b - chi;
    }
    let rhs = a * (b * b + 16.0 * det_prod);
    prod - rhs * rhs
}

/// Zero-discord classification of a Gaussian state. The exact criterion is
/// c₁ = c₂ = 0; `tol` is the numerical budget on c₁² + c₂² below which the
/// state is declared Zero. The reported `threshold` echoes that budget (it
/// applies to c₁²+c₂², not to q; q-space verdicts use
/// [`DiscordVerdict::from_q`]).
pub fn gaussian_zero_discord(p: &GaussianParams, tol: f64) -> Result<DiscordVerdict> {
    let report = q_gaussian_closed(p)?;
    let s = p.c1 * p.c1 + p.c2 * p.c2;
    let verdict = if s <= tol { Verdict::Zero } else { Verdict::Nonzero };
    Ok(DiscordVerdict { verdict, q: report.q, threshold: tol })
}

// Argument patterns of the four Wigner factors in each integral term:
// (mode-A slot as a signed combination of the αₖ, mode-B slot index).
type Pattern = [(&'static [(usize, f64)], usize); 4];

const TERM1_PATTERN: Pattern = [
    (&[(1, 1.0)], 2),
    (&[(3, 1.0)], 2),
    (&[(5, 1.0)], 4),
    (&[(5, 1.0), (3, -1.0), (1, 1.0)], 4),
];

const TERM2_PATTERN: Pattern = [
    (&[(1, 1.0)], 2),
    (&[(3, 1.0)], 4),
    (&[(5, 1.0)], 2),
    (&[(5, 1.0), (3, -1.0), (1, 1.0)], 4),
];

#[inline]
fn x_idx(k: usize) -> usize {
    2 * (k - 1)
}

#[inline]
fn p_idx(k: usize) -> usize {
    2 * (k - 1) + 1
}

/// exp[i4·Im(α₃*α₁ + α₅*α₃ − α₅*α₁)] as −½ξᵀAξ with A purely imaginary:
/// Im(z*w) = x_z·p_w − p_z·x_w expands the phase into six bilinear terms.
fn phase_matrix() -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(10, 10);
    let pairs: [(usize, usize, f64); 6] = [
        (x_idx(3), p_idx(1), 4.0),
        (p_idx(3), x_idx(1), -4.0),
        (x_idx(5), p_idx(3), 4.0),
        (p_idx(5), x_idx(3), -4.0),
        (x_idx(5), p_idx(1), -4.0),
        (p_idx(5), x_idx(1), 4.0),
    ];
    for (i, j, coeff) in pairs {
        let v = Complex64::new(0.0, -coeff);
        m[(i, j)] += v;
        m[(j, i)] += v;
    }
    m
}

/// 4×10 transport of one Wigner factor: rows (x_A, p_A, x_B, p_B) as
/// linear forms in ξ, plus the matching substitution map for polynomials.
fn factor_transport(slot_a: &[(usize, f64)], slot_b: usize) -> (DMatrix<f64>, Vec<Vec<(usize, f64)>>) {
    let mut t = DMatrix::<f64>::zeros(4, 10);
    let mut map: Vec<Vec<(usize, f64)>> = vec![Vec::new(); 4];
    for &(k, s) in slot_a {
        t[(0, x_idx(k))] += s;
        t[(1, p_idx(k))] += s;
        map[0].push((x_idx(k), s));
        map[1].push((p_idx(k), s));
    }
    t[(2, x_idx(slot_b))] = 1.0;
    t[(3, p_idx(slot_b))] = 1.0;
    map[2].push((x_idx(slot_b), 1.0));
    map[3].push((p_idx(slot_b), 1.0));
    (t, map)
}

fn integrate_term(w: &WignerState, pattern: &Pattern, phase: &DMatrix<Complex64>) -> Result<(Complex64, usize)> {
    let comps = &w.components;
    let n = comps.len();
    let transports: Vec<_> =
        pattern.iter().map(|&(slot_a, slot_b)| factor_transport(slot_a, slot_b)).collect();

    let mut total = Complex64::new(0.0, 0.0);
    let mut tuples = 0;
    let mut idx = [0usize; 4];
    loop {
        let mut quad_real = DMatrix::<f64>::zeros(10, 10);
        let mut lin_real = DVector::<f64>::zeros(10);
        let mut logconst = 0.0;
        let mut poly = SparsePoly::one(10);
        for (f, &ci) in idx.iter().enumerate() {
            let comp = &comps[ci];
            let (t, map) = &transports[f];
            let m4 = DMatrix::from_fn(4, 4, |r, c| comp.quad[(r, c)]);
            quad_real += t.transpose() * m4 * t;
            lin_real += t.transpose() * DVector::from_fn(4, |r, _| comp.lin[r]);
            logconst += comp.logconst;
            poly = poly.mul(&comp.poly.compose_linear(10, map));
        }
        let quad = DMatrix::from_fn(10, 10, |r, c| Complex64::new(quad_real[(r, c)], 0.0)) + phase;
        let lin = DVector::from_fn(10, |r, _| Complex64::new(lin_real[r], 0.0));
        let g = ComplexGaussPoly::new(poly, quad, lin, Complex64::new(logconst, 0.0));
        total += gauss::integrate(&g)?;
        tuples += 1;

        // advance the 4-digit base-n counter
        let mut pos = 3;
        loop {
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            if pos == 0 {
                return Ok((total, tuples));
            }
            pos -= 1;
        }
    }
}

/// Exact evaluation of Q for a polynomial × Gaussian Wigner function.
pub fn q_general(w: &WignerState) -> Result<QReport> {
    let phase = phase_matrix();
    let (i1, tuples1) = integrate_term(w, &TERM1_PATTERN, &phase)?;
    let (i2, tuples2) = integrate_term(w, &TERM2_PATTERN, &phase)?;
    let prefactor = 4.0 * PI.powi(3);
    let term1 = i1 * prefactor;
    let term2 = i2 * prefactor;
    let q = term1 - term2;
    if q.im.abs() > IMAG_TOL * (1.0 + q.norm()) {
        return Err(Error::ComplexResidue { value: q.re, imag: q.im });
    }
    Ok(QReport {
        q: q.re,
        term1: term1.re,
        term2: term2.re,
        method: Method::GeneralWigner,
        meta: ReportMeta {
            tuple_count: Some(tuples1 + tuples2),
            imag_residue: Some(term1.im.abs().max(term2.im.abs())),
            ..ReportMeta::default()
        },
    })
}

/// Closed form of Q for the mixture k·ρ_G + (1−k)·|00⟩⟨00| with
/// c₁² = c₂² ≡ c²:
///
///   Q = k⁴bc²/[32(A+bc²)A] + 8k²k̄²c²/[(B+4c²)B]
///       + 128k³k̄(1+4b)c²/{[C+8(1+4b)c²]C}
///
/// with A = (ab−c²)[b+16a(ab−c²)], B = (1+4a)²b − 8(1+2a)c²,
/// C = [(1+4a)(1+4b) − 16c²]·B.
pub fn q_mixture_closed(k: f64, p: &GaussianParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidInput(format!("mixing weight must lie in [0, 1], got {k}")));
    }
    let scale = p.c1.abs().max(p.c2.abs()).max(1.0);
    if (p.c1.abs() - p.c2.abs()).abs() > 1e-12 * scale {
        return Err(Error::ParamMismatch(format!(
            "mixture closed form requires |c1| = |c2|, got c1 = {}, c2 = {}",
            p.c1, p.c2
        )));
    }
    let (a, b) = (p.a, p.b);
    let c2 = p.c1 * p.c1;
    let kb = 1.0 - k;
    let big_a = (a * b - c2) * (b + 16.0 * a * (a * b - c2));
    let big_b = (1.0 + 4.0 * a).powi(2) * b - 8.0 * (1.0 + 2.0 * a) * c2;
    let big_c = ((1.0 + 4.0 * a) * (1.0 + 4.0 * b) - 16.0 * c2) * big_b;
    let q = k.powi(4) * b * c2 / (32.0 * (big_a + b * c2) * big_a)
        + 8.0 * k * k * kb * kb * c2 / ((big_b + 4.0 * c2) * big_b)
        + 128.0 * k.powi(3) * kb * (1.0 + 4.0 * b) * c2
            / ((big_c + 8.0 * (1.0 + 4.0 * b) * c2) * big_c);
    Ok(q)
}

/// Closed form of Q for k·|00⟩⟨00| + (1−k)·|+1⟩⟨+1|, |+⟩ = (|0⟩+|1⟩)/√2:
/// Q = k²(1−k)²/2.
pub fn q_photon_mixed_closed(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidInput(format!("mixing weight must lie in [0, 1], got {k}")));
    }
    let kb = 1.0 - k;
    Ok(k * k * kb * kb / 2.0)
}

/// Closed form of Q for the photon-added squeezed vacuum (n = 0):
///
///   Q = (3+cosh4r)·sech³2r/4
///       − sech¹⁶r·(1 + 11tanh⁸r + 11tanh¹⁶r + tanh²⁴r)/(1 − tanh⁸r)⁵
pub fn q_photon_added_n0(r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let sech2r = 1.0 / (2.0 * r).cosh();
    let first = (3.0 + (4.0 * r).cosh()) * sech2r.powi(3) / 4.0;
    let t = r.tanh();
    let t8 = t.powi(8);
    let sech_r = 1.0 / r.cosh();
    let second = sech_r.powi(16) * (1.0 + 11.0 * t8 + 11.0 * t8 * t8 + t8.powi(3))
        / (1.0 - t8).powi(5);
    first - second
}

/// One scan cell: grid coordinates, log₁₀ of the (clamped) marker, and an
/// "ok" / error-token status.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub n: f64,
    pub r: f64,
    pub log10_q: f64,
    pub status: String,
}

/// Evaluates Q over a photon-added squeezed-thermal grid, one `q_general`
/// call per cell, rows in row-major (n outer, r inner) order. Failures are
/// recorded per cell and do not abort the scan.
pub fn scan_photon_added(n_values: &[f64], r_values: &[f64]) -> Vec<ScanRow> {
    let cells: Vec<(f64, f64)> = n_values
        .iter()
        .flat_map(|&n| r_values.iter().map(move |&r| (n, r)))
        .collect();
    cells
        .into_par_iter()
        .map(|(n, r)| {
            let outcome = crate::wigner::make_photon_added_squeezed_thermal(n, r)
                .and_then(|w| q_general(&w));
            match outcome {
                Ok(report) => ScanRow {
                    n,
                    r,
                    log10_q: report.q.max(LOG_CLAMP).log10(),
                    status: "ok".into(),
                },
                Err(e) => ScanRow { n, r, log10_q: f64::NAN, status: e.status_token().into() },
            }
        })
        .collect()
}
