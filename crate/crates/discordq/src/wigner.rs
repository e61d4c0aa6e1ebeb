//! Two-mode Wigner functions represented exactly as sums of
//! polynomial × Gaussian components over ξ = (x₁, p₁, x₂, p₂):
//!
//!   W(ξ) = Σ_k poly_k(ξ)·exp(−½ξᵀM_kξ + l_kᵀξ + c_k)
//!
//! Quadrature conventions: x̂ = (â+â†)/2, p̂ = −i(â−â†)/2, so the vacuum
//! variance is 1/4 and a normalized two-mode Gaussian state has
//! W(ξ) = (2π)⁻²(det V)^{−1/2}·exp(−½ξᵀV⁻¹ξ).
//!
//! Constructors are provided for the state families with known discord
//! behaviour: squeezed thermal states, |00⟩⟨00|/|+1⟩⟨+1| photon-number
//! mixtures, Gaussian-vacuum mixtures, and single-photon-added squeezed
//! thermal states.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cv::{CovarianceMatrix, GaussianParams};
use crate::error::{Error, Result};
use crate::gauss::{self, ComplexGaussPoly};
use crate::poly::SparsePoly;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const IMAG_TOL: f64 = 1e-10;

/// One polynomial × Gaussian summand of a Wigner function.
#[derive(Debug, Clone)]
pub struct WignerComponent {
    pub poly: SparsePoly,
    pub quad: Matrix4<f64>,
    pub lin: Vector4<f64>,
    pub logconst: f64,
}

impl WignerComponent {
    pub fn new(poly: SparsePoly, quad: Matrix4<f64>, lin: Vector4<f64>, logconst: f64) -> Self {
        assert_eq!(poly.arity(), 4, "Wigner components live on four quadratures");
        Self { poly, quad, lin, logconst }
    }

    /// The component as a complex Gaussian integrand over ξ.
    pub fn as_integrand(&self) -> ComplexGaussPoly {
        let quad = DMatrix::from_fn(4, 4, |i, j| Complex64::new(self.quad[(i, j)], 0.0));
        let lin = DVector::from_fn(4, |i, _| Complex64::new(self.lin[i], 0.0));
        ComplexGaussPoly::new(self.poly.clone(), quad, lin, Complex64::new(self.logconst, 0.0))
    }
}

/// A two-mode Wigner function as a sum of components.
#[derive(Debug, Clone)]
pub struct WignerState {
    pub components: Vec<WignerComponent>,
}

impl WignerState {
    pub fn new(components: Vec<WignerComponent>) -> Self {
        assert!(!components.is_empty(), "a Wigner state needs at least one component");
        Self { components }
    }
}

/// W(ξ) at a phase-space point.
pub fn eval_wigner(state: &WignerState, point: &[f64; 4]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for comp in &state.components {
        let mut expo = comp.logconst;
        for i in 0..4 {
            expo += comp.lin[i] * point[i];
            let mut row = 0.0;
            for (j, &pj) in point.iter().enumerate() {
                row += comp.quad[(i, j)] * pj;
            }
            expo -= 0.5 * point[i] * row;
        }
        acc += comp.poly.eval(point) * expo.exp();
    }
    acc.re
}

fn real_integral(value: Complex64) -> Result<f64> {
    if value.im.abs() > IMAG_TOL * (1.0 + value.re.abs()) {
        return Err(Error::ComplexResidue { value: value.re, imag: value.im });
    }
    Ok(value.re)
}

/// ∫ W d⁴ξ — equals 1 for a normalized state.
pub fn normalization(state: &WignerState) -> Result<f64> {
    let mut total = Complex64::new(0.0, 0.0);
    for comp in &state.components {
        total += gauss::integrate(&comp.as_integrand())?;
    }
    real_integral(total)
}

/// Tr ρ² = π²∫ W² d⁴ξ.
pub fn purity(state: &WignerState) -> Result<f64> {
    let n = state.components.len();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let a = &state.components[i];
            let b = &state.components[j];
            let g = ComplexGaussPoly::new(
                a.poly.mul(&b.poly),
                DMatrix::from_fn(4, 4, |r, c| Complex64::new(a.quad[(r, c)] + b.quad[(r, c)], 0.0)),
                DVector::from_fn(4, |r, _| Complex64::new(a.lin[r] + b.lin[r], 0.0)),
                Complex64::new(a.logconst + b.logconst, 0.0),
            );
            total += gauss::integrate(&g)?;
        }
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    real_integral(total * pi2)
}

/// Wigner function of the Gaussian state with covariance V (zero mean).
pub fn wigner_of_gaussian(cov: &CovarianceMatrix) -> Result<WignerState> {
    let verdict = crate::cv::validate_covariance(cov);
    if !verdict.is_valid() {
        return Err(Error::NonPhysical(verdict.summary()));
    }
    let v = *cov.matrix();
    let chol = v.cholesky().ok_or(Error::SingularCovariance)?;
    let inv = chol.inverse();
    let log_det: f64 = (0..4).map(|i| 2.0 * chol.l()[(i, i)].ln()).sum();
    let logconst = -2.0 * TWO_PI.ln() - 0.5 * log_det;
    Ok(WignerState::new(vec![WignerComponent::new(
        SparsePoly::one(4),
        (inv + inv.transpose()) * 0.5,
        Vector4::zeros(),
        logconst,
    )]))
}

/// Standard-form parameters of a squeezed thermal state: both modes carry
/// mean thermal occupation n, entangled by two-mode squeezing r.
pub fn squeezed_thermal_params(n: f64, r: f64) -> Result<GaussianParams> {
    if !(n.is_finite() && r.is_finite()) || n < 0.0 {
        return Err(Error::InvalidInput(format!(
            "squeezed thermal state needs finite r and n ≥ 0, got n = {n}, r = {r}"
        )));
    }
    let nn = 1.0 + 2.0 * n;
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    GaussianParams::new(nn * ch / 4.0, nn * ch / 4.0, nn * sh / 4.0, -nn * sh / 4.0)
}

fn squeezed_thermal_kernel(n: f64, r: f64) -> (Matrix4<f64>, f64) {
    let nn = 1.0 + 2.0 * n;
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    let g = 4.0 / nn;
    let quad = Matrix4::new(
        g * ch,
        0.0,
        -g * sh,
        0.0,
        0.0,
        g * ch,
        0.0,
        g * sh,
        -g * sh,
        0.0,
        g * ch,
        0.0,
        0.0,
        g * sh,
        0.0,
        g * ch,
    );
    let logconst = 4.0_f64.ln() - 2.0 * (nn * std::f64::consts::PI).ln();
    (quad, logconst)
}

/// Squeezed thermal state with thermal occupation n and squeezing r.
pub fn make_squeezed_thermal(n: f64, r: f64) -> Result<WignerState> {
    squeezed_thermal_params(n, r)?;
    let (quad, logconst) = squeezed_thermal_kernel(n, r);
    Ok(WignerState::new(vec![WignerComponent::new(
        SparsePoly::one(4),
        quad,
        Vector4::zeros(),
        logconst,
    )]))
}

/// Photon-number mixture k·|00⟩⟨00| + (1−k)·|+1⟩⟨+1| with
/// |+⟩ = (|0⟩+|1⟩)/√2: both summands share the vacuum kernel, so
/// W = W₀·[k + 2(1−k)(x₁+|α₁|²)(4|α₂|²−1)].
pub fn make_photon_number_mixed(k: f64) -> Result<WignerState> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidInput(format!("mixing weight must lie in [0, 1], got {k}")));
    }
    let kb = 1.0 - k;
    let re = |x: f64| Complex64::new(x, 0.0);
    let poly = SparsePoly::from_terms(
        4,
        &[
            (&[0, 0, 0, 0], re(k)),
            (&[1, 0, 0, 0], re(-2.0 * kb)),
            (&[2, 0, 0, 0], re(-2.0 * kb)),
            (&[0, 2, 0, 0], re(-2.0 * kb)),
            (&[1, 0, 2, 0], re(8.0 * kb)),
            (&[1, 0, 0, 2], re(8.0 * kb)),
            (&[2, 0, 2, 0], re(8.0 * kb)),
            (&[2, 0, 0, 2], re(8.0 * kb)),
            (&[0, 2, 2, 0], re(8.0 * kb)),
            (&[0, 2, 0, 2], re(8.0 * kb)),
        ],
    );
    let logconst = 4.0_f64.ln() - 2.0 * std::f64::consts::PI.ln();
    Ok(WignerState::new(vec![WignerComponent::new(
        poly,
        Matrix4::identity() * 4.0,
        Vector4::zeros(),
        logconst,
    )]))
}

/// Mixture k·ρ_G + (1−k)·|00⟩⟨00| of a standard-form Gaussian state with
/// the two-mode vacuum. Requires |c₁| = |c₂|.
pub fn make_gaussian_vacuum_mixture(k: f64, params: &GaussianParams) -> Result<WignerState> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidInput(format!("mixing weight must lie in [0, 1], got {k}")));
    }
    let scale = params.c1.abs().max(params.c2.abs()).max(1.0);
    if (params.c1.abs() - params.c2.abs()).abs() > 1e-12 * scale {
        return Err(Error::ParamMismatch(format!(
            "vacuum mixture requires |c1| = |c2|, got c1 = {}, c2 = {}",
            params.c1, params.c2
        )));
    }
    let gaussian = wigner_of_gaussian(&params.covariance())?;
    let mut comp_g = gaussian.components[0].clone();
    comp_g.poly = comp_g.poly.scale(Complex64::new(k, 0.0));

    let vac_logconst = 4.0_f64.ln() - 2.0 * std::f64::consts::PI.ln();
    let comp_vac = WignerComponent::new(
        SparsePoly::constant(4, Complex64::new(1.0 - k, 0.0)),
        Matrix4::identity() * 4.0,
        Vector4::zeros(),
        vac_logconst,
    );
    Ok(WignerState::new(vec![comp_g, comp_vac]))
}

/// Squeezed thermal state with one photon added to the second mode:
/// ρ ∝ (1 ⊗ â†)·ρ_sts(n, r)·(1 ⊗ â), normalized.
pub fn make_photon_added_squeezed_thermal(n: f64, r: f64) -> Result<WignerState> {
    squeezed_thermal_params(n, r)?;
    let (quad, kernel_logconst) = squeezed_thermal_kernel(n, r);
    let nn = 1.0 + 2.0 * n;
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    // Acting with (1 ⊗ â†)·(1 ⊗ â) on the Gaussian kernel multiplies it by
    // a quadratic: with A = 1 + 2n + cosh 2r,
    //   [(A·x₂ − sh·x₁)² + (A·p₂ + sh·p₁)² − (1+2n)·A/2] / (1+2n)²,
    // and the trace of that product, cosh²r + n·cosh 2r, renormalizes.
    let a = nn + ch;
    let norm = r.cosh().powi(2) + n * ch;
    let re = |x: f64| Complex64::new(x, 0.0);
    let poly = SparsePoly::from_terms(
        4,
        &[
            (&[2, 0, 0, 0], re(sh * sh)),
            (&[0, 2, 0, 0], re(sh * sh)),
            (&[0, 0, 2, 0], re(a * a)),
            (&[0, 0, 0, 2], re(a * a)),
            (&[1, 0, 1, 0], re(-2.0 * a * sh)),
            (&[0, 1, 0, 1], re(2.0 * a * sh)),
            (&[0, 0, 0, 0], re(-nn * a / 2.0)),
        ],
    );
    let logconst = kernel_logconst - 2.0 * nn.ln() - norm.ln();
    Ok(WignerState::new(vec![WignerComponent::new(poly, quad, Vector4::zeros(), logconst)]))
}

#[derive(Serialize, Deserialize)]
struct PolyTermFile {
    exp: [u8; 4],
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ComponentFile {
    poly: Vec<PolyTermFile>,
    quad: [[f64; 4]; 4],
    lin: [f64; 4],
    logconst: f64,
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    components: Vec<ComponentFile>,
}

impl WignerState {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if file.components.is_empty() {
            return Err(Error::InvalidInput("state has no components".into()));
        }
        let mut components = Vec::with_capacity(file.components.len());
        for (idx, comp) in file.components.iter().enumerate() {
            let flat: Vec<f64> = comp
                .quad
                .iter()
                .flatten()
                .chain(comp.lin.iter())
                .chain(std::iter::once(&comp.logconst))
                .cloned()
                .collect();
            if flat.iter().any(|x| !x.is_finite())
                || comp.poly.iter().any(|t| !t.re.is_finite() || !t.im.is_finite())
            {
                return Err(Error::InvalidInput(format!(
                    "component {idx} contains a non-finite number"
                )));
            }
            let quad = Matrix4::from_fn(|i, j| comp.quad[i][j]);
            let scale = flat.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
            if (quad - quad.transpose()).abs().max() > 1e-12 * scale {
                return Err(Error::InvalidInput(format!(
                    "component {idx} kernel matrix is not symmetric"
                )));
            }
            let mut poly = SparsePoly::zero(4);
            for term in &comp.poly {
                poly.add_term(&term.exp, Complex64::new(term.re, term.im));
            }
            components.push(WignerComponent::new(
                poly,
                (quad + quad.transpose()) * 0.5,
                Vector4::from_column_slice(&comp.lin),
                comp.logconst,
            ));
        }
        Ok(Self::new(components))
    }

    pub fn to_json(&self) -> String {
        let file = StateFile {
            components: self
                .components
                .iter()
                .map(|comp| ComponentFile {
                    poly: comp
                        .poly
                        .terms()
                        .map(|(e, c)| PolyTermFile {
                            exp: [e[0], e[1], e[2], e[3]],
                            re: c.re,
                            im: c.im,
                        })
                        .collect(),
                    quad: std::array::from_fn(|i| std::array::from_fn(|j| comp.quad[(i, j)])),
                    lin: std::array::from_fn(|i| comp.lin[i]),
                    logconst: comp.logconst,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("state serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn vacuum() -> WignerState {
        make_squeezed_thermal(0.0, 0.0).unwrap()
    }

    #[test]
    fn vacuum_wigner_peak() {
        let w0 = eval_wigner(&vacuum(), &[0.0; 4]);
        assert!((w0 - 4.0 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn squeezed_thermal_matches_covariance_inversion() {
        let n = 0.3;
        let r = 0.4;
        let direct = make_squeezed_thermal(n, r).unwrap();
        let params = squeezed_thermal_params(n, r).unwrap();
        let via_cov = wigner_of_gaussian(&params.covariance()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..25 {
            let pt: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
            let a = eval_wigner(&direct, &pt);
            let b = eval_wigner(&via_cov, &pt);
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "{pt:?}: {a} vs {b}");
        }
    }

    #[test]
    fn photon_number_mixture_pointwise() {
        // Independent check against per-mode factors: W₀ = (2/π)e^{−2(x²+p²)},
        // W₁ = W₀·(4(x²+p²)−1), and for |+⟩ = (|0⟩+|1⟩)/√2 the cross term
        // doubles the displaced quadratic, W₊ = W₀·2(x + x² + p²).
        let w0 = |x: f64, p: f64| 2.0 / PI * (-2.0 * (x * x + p * p)).exp();
        let w1 = |x: f64, p: f64| {
            2.0 / PI * (4.0 * (x * x + p * p) - 1.0) * (-2.0 * (x * x + p * p)).exp()
        };
        let wplus = |x: f64, p: f64| {
            2.0 / PI * 2.0 * (x + x * x + p * p) * (-2.0 * (x * x + p * p)).exp()
        };
        let k = 0.35;
        let state = make_photon_number_mixed(k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let pt: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.2..1.2));
            let want = k * w0(pt[0], pt[1]) * w0(pt[2], pt[3])
                + (1.0 - k) * wplus(pt[0], pt[1]) * w1(pt[2], pt[3]);
            let got = eval_wigner(&state, &pt);
            assert!((got - want).abs() < 1e-13 * (1.0 + want.abs()), "{pt:?}");
        }
    }

    #[test]
    fn constructors_are_normalized() {
        let params = squeezed_thermal_params(0.2, 0.6).unwrap();
        let states = [
            vacuum(),
            make_squeezed_thermal(0.5, 0.8).unwrap(),
            make_photon_number_mixed(0.3).unwrap(),
            make_gaussian_vacuum_mixture(0.4, &params).unwrap(),
            make_photon_added_squeezed_thermal(0.0, 0.0).unwrap(),
            make_photon_added_squeezed_thermal(0.4, 0.7).unwrap(),
        ];
        for (i, s) in states.iter().enumerate() {
            let norm = normalization(s).unwrap();
            assert!((norm - 1.0).abs() < 1e-12, "state {i}: ∫W = {norm}");
        }
    }

    #[test]
    fn purity_of_known_states() {
        assert!((purity(&vacuum()).unwrap() - 1.0).abs() < 1e-12);

        // Squeezing is unitary: purity stays 1.
        let sq = make_squeezed_thermal(0.0, 0.9).unwrap();
        assert!((purity(&sq).unwrap() - 1.0).abs() < 1e-12);

        // Two thermal modes: (1+2n)⁻².
        let n = 0.7;
        let th = make_squeezed_thermal(n, 0.0).unwrap();
        let want = 1.0 / (1.0 + 2.0 * n).powi(2);
        assert!((purity(&th).unwrap() - want).abs() < 1e-12);

        // Rank-two number mixture: k² + (1−k)².
        let k = 0.3;
        let pm = make_photon_number_mixed(k).unwrap();
        let want = k * k + (1.0 - k) * (1.0 - k);
        assert!((purity(&pm).unwrap() - want).abs() < 1e-12);

        // Adding a photon to a squeezed vacuum keeps the state pure.
        let pa = make_photon_added_squeezed_thermal(0.0, 0.5).unwrap();
        assert!((purity(&pa).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn photon_added_reduces_to_vacuum_times_single_photon() {
        let state = make_photon_added_squeezed_thermal(0.0, 0.0).unwrap();
        let w0 = |x: f64, p: f64| 2.0 / PI * (-2.0 * (x * x + p * p)).exp();
        let w1 = |x: f64, p: f64| {
            2.0 / PI * (4.0 * (x * x + p * p) - 1.0) * (-2.0 * (x * x + p * p)).exp()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let pt: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let want = w0(pt[0], pt[1]) * w1(pt[2], pt[3]);
            let got = eval_wigner(&state, &pt);
            assert!((got - want).abs() < 1e-13 * (1.0 + want.abs()), "{pt:?}");
        }
    }

    #[test]
    fn mixture_weights_interpolate() {
        let params = squeezed_thermal_params(0.0, 0.5).unwrap();
        let pure_g = make_gaussian_vacuum_mixture(1.0, &params).unwrap();
        let sq = make_squeezed_thermal(0.0, 0.5).unwrap();
        let pt = [0.3, -0.2, 0.1, 0.4];
        assert!((eval_wigner(&pure_g, &pt) - eval_wigner(&sq, &pt)).abs() < 1e-12);

        let pure_vac = make_gaussian_vacuum_mixture(0.0, &params).unwrap();
        assert!((eval_wigner(&pure_vac, &pt) - eval_wigner(&vacuum(), &pt)).abs() < 1e-14);
    }

    #[test]
    fn mixture_rejects_asymmetric_correlations() {
        let params = GaussianParams::new(0.6, 0.5, 0.3, -0.1).unwrap();
        assert!(matches!(
            make_gaussian_vacuum_mixture(0.5, &params),
            Err(Error::ParamMismatch(_))
        ));
    }

    #[test]
    fn json_round_trip_preserves_values() {
        let state = make_photon_added_squeezed_thermal(0.3, 0.6).unwrap();
        let text = state.to_json();
        let back = WignerState::from_json(&text).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let pt: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            assert!((eval_wigner(&state, &pt) - eval_wigner(&back, &pt)).abs() < 1e-15);
        }
        assert_eq!(text, back.to_json());
    }

    #[test]
    fn json_rejects_malformed_input() {
        assert!(WignerState::from_json("{\"components\": []}").is_err());
        assert!(WignerState::from_json("not json").is_err());
        let bad = r#"{"components":[{"poly":[{"exp":[0,0,0,0],"re":1.0,"im":0.0}],
            "quad":[[4,1,0,0],[0,4,0,0],[0,0,4,0],[0,0,0,4]],
            "lin":[0,0,0,0],"logconst":0.0}]}"#;
        assert!(matches!(WignerState::from_json(bad), Err(Error::InvalidInput(_))));
    }
}
