//! Exact integration of polynomials against complex Gaussian kernels
//! ∫ poly(ξ)·exp(−½ξᵀAξ + bᵀξ + c) dⁿξ with A complex symmetric and
//! Re(A) positive definite.
//!
//! The kernel part is handled in closed form. Writing A = R + iS with
//! R = LLᵀ and K = L⁻¹SL⁻ᵀ = U·diag(ν)·Uᵀ (both real decompositions),
//! det A = det(R)·∏(1 + iν_j), and since every eigenvalue path
//! t ↦ 1 + itν_j stays in the right half-plane, the square root that is
//! continuous along t ↦ R + itS from the positive real root is
//! √detA = ∏L_jj · ∏ psqrt(1 + iν_j) with principal branches. The same
//! factorization yields Σ = A⁻¹ = L⁻ᵀU·diag(1/(1+iν))·UᵀL⁻¹.
//!
//! The polynomial part reduces to formal Gaussian moments with mean
//! μ = A⁻¹b and covariance Σ, computed by the integration-by-parts
//! recursion E[ξᵢ·m] = μᵢE[m] + Σⱼ Σᵢⱼ E[∂m/∂ξⱼ], memoized on exponent
//! vectors.

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::SparsePoly;

pub mod quadrature;

const SYMMETRY_TOL: f64 = 1e-12;
const CONDITION_LIMIT: f64 = 1e12;

/// Integrand poly(ξ)·exp(−½ξᵀAξ + bᵀξ + c) over n real variables.
#[derive(Debug, Clone)]
pub struct ComplexGaussPoly {
    pub poly: SparsePoly,
    pub quad: DMatrix<Complex64>,
    pub lin: DVector<Complex64>,
    pub logconst: Complex64,
}

impl ComplexGaussPoly {
    pub fn new(
        poly: SparsePoly,
        quad: DMatrix<Complex64>,
        lin: DVector<Complex64>,
        logconst: Complex64,
    ) -> Self {
        assert_eq!(quad.nrows(), quad.ncols(), "kernel matrix must be square");
        assert_eq!(poly.arity(), quad.nrows(), "polynomial arity must match kernel size");
        assert_eq!(lin.len(), quad.nrows(), "linear term must match kernel size");
        Self { poly, quad, lin, logconst }
    }

    pub fn dim(&self) -> usize {
        self.quad.nrows()
    }
}

/// Factorized kernel: mean μ = A⁻¹b, covariance Σ = A⁻¹, and the complex
/// log-prefactor log[(2π)^{n/2}(detA)^{−1/2}] + ½bᵀA⁻¹b + c.
#[derive(Debug, Clone)]
pub struct GaussMoments {
    pub mean: DVector<Complex64>,
    pub cov: DMatrix<Complex64>,
    pub lognorm: Complex64,
}

/// Internal real factorization of A = R + iS shared by the kernel routines.
struct KernelFactors {
    /// Diagonal of the Cholesky factor of R.
    chol_diag: Vec<f64>,
    /// Eigenvalues ν of K = L⁻¹SL⁻ᵀ.
    nu: Vec<f64>,
    /// W = L⁻ᵀU, so that A⁻¹ = W·diag(1/(1+iν))·Wᵀ.
    w: DMatrix<f64>,
}

fn factor_kernel(quad: &DMatrix<Complex64>) -> Result<KernelFactors> {
    let n = quad.nrows();
    if quad.ncols() != n {
        return Err(Error::InvalidInput("kernel matrix must be square".into()));
    }
    let scale = quad.iter().map(|z| z.norm()).fold(0.0_f64, f64::max).max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (quad[(i, j)] - quad[(j, i)]).norm() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "kernel matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    let re = {
        let m = quad.map(|z| z.re);
        (&m + m.transpose()) * 0.5
    };
    let im = {
        let m = quad.map(|z| z.im);
        (&m + m.transpose()) * 0.5
    };

    let chol = Cholesky::new(re).ok_or_else(|| {
        Error::Divergent("real part of the kernel matrix is not positive definite".into())
    })?;
    let l = chol.l();
    let chol_diag: Vec<f64> = (0..n).map(|i| l[(i, i)]).collect();

    // K = L⁻¹ S L⁻ᵀ, symmetrized against rounding.
    let t = l
        .solve_lower_triangular(&im)
        .ok_or_else(|| Error::Divergent("singular Cholesky factor".into()))?;
    let k = l
        .solve_lower_triangular(&t.transpose())
        .ok_or_else(|| Error::Divergent("singular Cholesky factor".into()))?
        .transpose();
    let k = (&k + k.transpose()) * 0.5;

    let eig = SymmetricEigen::new(k);
    let nu: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let w = l
        .transpose()
        .solve_upper_triangular(&eig.eigenvectors)
        .ok_or_else(|| Error::Divergent("singular Cholesky factor".into()))?;

    Ok(KernelFactors { chol_diag, nu, w })
}

impl KernelFactors {
    /// log √detA along the continuous branch.
    fn log_det_sqrt(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &d in &self.chol_diag {
            acc += Complex64::new(d.ln(), 0.0);
        }
        for &nu in &self.nu {
            acc += Complex64::new(1.0, nu).ln() * 0.5;
        }
        acc
    }

    /// Σ = A⁻¹, complex symmetric.
    fn inverse(&self) -> DMatrix<Complex64> {
        let n = self.w.nrows();
        let mut cov = DMatrix::<Complex64>::zeros(n, n);
        for k in 0..n {
            let d = Complex64::new(1.0, self.nu[k]).inv();
            for i in 0..n {
                let wi = self.w[(i, k)];
                if wi == 0.0 {
                    continue;
                }
                for j in 0..=i {
                    let t = d * (wi * self.w[(j, k)]);
                    cov[(i, j)] += t;
                    if i != j {
                        cov[(j, i)] += t;
                    }
                }
            }
        }
        cov
    }
}

/// √detA continuous along t ↦ Re(A) + i·t·Im(A) from the positive real
/// root at t = 0. Requires Re(A) positive definite.
pub fn det_sqrt_branch(quad: &DMatrix<Complex64>) -> Result<Complex64> {
    Ok(factor_kernel(quad)?.log_det_sqrt().exp())
}

/// Factorizes a kernel into moments usable for polynomial expectations.
pub fn factorize(
    quad: &DMatrix<Complex64>,
    lin: &DVector<Complex64>,
    logconst: Complex64,
) -> Result<GaussMoments> {
    let n = quad.nrows();
    if lin.len() != n {
        return Err(Error::InvalidInput("linear term length mismatch".into()));
    }
    let factors = factor_kernel(quad)?;
    let cov = factors.inverse();

    let norm_a: f64 = quad.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let norm_inv: f64 = cov.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let cond = norm_a * norm_inv;
    if cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned { cond });
    }

    let mean = &cov * lin;
    let half = Complex64::new(0.5, 0.0);
    let lognorm = Complex64::new(0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln(), 0.0)
        - factors.log_det_sqrt()
        + half * lin.dot(&mean)
        + logconst;
    Ok(GaussMoments { mean, cov, lognorm })
}

/// Frobenius-norm condition estimate of the kernel matrix (diagnostic).
pub fn condition_estimate(m: &GaussMoments, quad: &DMatrix<Complex64>) -> f64 {
    let norm_a: f64 = quad.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let norm_inv: f64 = m.cov.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    norm_a * norm_inv
}

fn pack(expo: &[u8]) -> u128 {
    debug_assert!(expo.len() <= 16, "moment recursion supports at most 16 variables");
    expo.iter().fold(0u128, |acc, &e| (acc << 8) | e as u128)
}

fn moment_rec(
    expo: &mut [u8],
    m: &GaussMoments,
    mean_zero: bool,
    cache: &mut HashMap<u128, Complex64>,
) -> Complex64 {
    let Some(i) = expo.iter().position(|&e| e > 0) else {
        return Complex64::new(1.0, 0.0);
    };
    if mean_zero && expo.iter().map(|&e| e as usize).sum::<usize>() % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let key = pack(expo);
    if let Some(&v) = cache.get(&key) {
        return v;
    }
    expo[i] -= 1;
    let mut acc = if mean_zero {
        Complex64::new(0.0, 0.0)
    } else {
        m.mean[i] * moment_rec(expo, m, mean_zero, cache)
    };
    for j in 0..expo.len() {
        if expo[j] > 0 {
            let count = expo[j] as f64;
            expo[j] -= 1;
            let sub = moment_rec(expo, m, mean_zero, cache);
            expo[j] += 1;
            acc += m.cov[(i, j)] * (count * sub);
        }
    }
    expo[i] += 1;
    cache.insert(key, acc);
    acc
}

/// E[∏ξᵢ^{eᵢ}] under the formal Gaussian (μ, Σ).
pub fn scalar_moment(expo: &[u8], m: &GaussMoments) -> Complex64 {
    assert_eq!(expo.len(), m.mean.len(), "exponent arity mismatch");
    let mean_zero = m.mean.iter().all(|z| z.re == 0.0 && z.im == 0.0);
    let mut cache = HashMap::new();
    let mut e = expo.to_vec();
    moment_rec(&mut e, m, mean_zero, &mut cache)
}

/// E[poly(ζ)] under the formal Gaussian (μ, Σ), one shared moment cache.
pub fn expectation(poly: &SparsePoly, m: &GaussMoments) -> Complex64 {
    assert_eq!(poly.arity(), m.mean.len(), "polynomial arity mismatch");
    let mean_zero = m.mean.iter().all(|z| z.re == 0.0 && z.im == 0.0);
    let mut cache = HashMap::new();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scratch = Vec::new();
    for (e, c) in poly.terms() {
        if mean_zero && e.iter().map(|&x| x as usize).sum::<usize>() % 2 == 1 {
            continue;
        }
        scratch.clear();
        scratch.extend_from_slice(e);
        acc += c * moment_rec(&mut scratch, m, mean_zero, &mut cache);
    }
    acc
}

/// ∫ poly·exp(−½ξᵀAξ + bᵀξ + c) dⁿξ, exact up to floating point.
pub fn integrate(g: &ComplexGaussPoly) -> Result<Complex64> {
    let m = factorize(&g.quad, &g.lin, g.logconst)?;
    Ok(m.lognorm.exp() * expectation(&g.poly, &m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::SparsePoly;

    const PI: f64 = std::f64::consts::PI;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn kernel1(a: f64) -> ComplexGaussPoly {
        // exp(−a·x²) as quad = [2a]
        ComplexGaussPoly::new(
            SparsePoly::one(1),
            DMatrix::from_element(1, 1, re(2.0 * a)),
            DVector::from_element(1, re(0.0)),
            re(0.0),
        )
    }

    #[test]
    fn plain_gaussian_integral() {
        let got = integrate(&kernel1(1.0)).unwrap();
        assert!((got.re - PI.sqrt()).abs() < 1e-14);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn second_moment_against_univariate_formula() {
        let mut g = kernel1(1.0);
        g.poly = SparsePoly::from_terms(1, &[(&[2], re(1.0))]);
        let got = integrate(&g).unwrap();
        assert!((got.re - PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn complex_cross_kernel_matches_reference_value() {
        // exp(−x² − y² + ixy): ∫ = 2π/√5, pinned by the quadrature reference.
        let quad = DMatrix::from_row_slice(
            2,
            2,
            &[re(2.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0), re(2.0)],
        );
        let g = ComplexGaussPoly::new(
            SparsePoly::one(2),
            quad,
            DVector::from_element(2, re(0.0)),
            re(0.0),
        );
        let got = integrate(&g).unwrap();
        let expected = 2.0 * PI / 5.0_f64.sqrt();
        assert!((got.re - expected).abs() < 1e-12, "{got}");
        assert!(got.im.abs() < 1e-13);

        let oracle = quadrature::integrate_reference(&g, 10.0, 1e-10);
        assert!((oracle.re - expected).abs() < 1e-7);
        assert!(oracle.im.abs() < 1e-7);
    }

    #[test]
    fn det_branch_examples() {
        // identity → 1
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert!((det_sqrt_branch(&id).unwrap() - re(1.0)).norm() < 1e-14);

        // real SPD → positive real √det
        let spd = DMatrix::from_row_slice(2, 2, &[re(4.0), re(1.0), re(1.0), re(3.0)]);
        let got = det_sqrt_branch(&spd).unwrap();
        assert!((got.re - 11.0_f64.sqrt()).abs() < 1e-12);
        assert!(got.im.abs() < 1e-14);

        // [[2,−i],[−i,2]] → √5 on the branch fixed by the 2-D reference value
        let quad = DMatrix::from_row_slice(
            2,
            2,
            &[re(2.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, -1.0), re(2.0)],
        );
        let got = det_sqrt_branch(&quad).unwrap();
        assert!((got - re(5.0_f64.sqrt())).norm() < 1e-12, "{got}");
    }

    #[test]
    fn derivative_in_linear_term_matches_first_moment() {
        // ∂/∂b of ∫exp(−½ξᵀAξ+bᵀξ) equals ∫ξ·exp(...), via central differences.
        let quad = DMatrix::from_row_slice(
            2,
            2,
            &[re(3.0), Complex64::new(0.4, 0.2), Complex64::new(0.4, 0.2), re(2.0)],
        );
        let lin = DVector::from_column_slice(&[re(0.3), Complex64::new(-0.1, 0.05)]);
        let dim = 0;
        let eps = 1e-5;
        let at = |shift: f64| {
            let mut l = lin.clone();
            l[dim] += re(shift);
            integrate(&ComplexGaussPoly::new(SparsePoly::one(2), quad.clone(), l, re(0.0)))
                .unwrap()
        };
        let numeric = (at(eps) - at(-eps)) / re(2.0 * eps);
        let direct = integrate(&ComplexGaussPoly::new(
            SparsePoly::variable(2, dim, re(1.0)),
            quad.clone(),
            lin,
            re(0.0),
        ))
        .unwrap();
        assert!((numeric - direct).norm() < 1e-6 * direct.norm().max(1.0));
    }

    #[test]
    fn moments_match_isserlis_pairings() {
        // Independent oracle: literal Wick pairing enumeration (zero mean).
        fn pairing_sum(idx: &mut Vec<usize>, cov: &DMatrix<Complex64>) -> Complex64 {
            if idx.is_empty() {
                return re(1.0);
            }
            let first = idx.remove(0);
            let mut acc = re(0.0);
            for k in 0..idx.len() {
                let other = idx.remove(k);
                acc += cov[(first, other)] * pairing_sum(idx, cov);
                idx.insert(k, other);
            }
            idx.insert(0, first);
            acc
        }

        let quad = DMatrix::from_row_slice(
            3,
            3,
            &[
                re(2.5),
                Complex64::new(0.3, 0.1),
                re(-0.2),
                Complex64::new(0.3, 0.1),
                re(3.0),
                Complex64::new(0.0, -0.4),
                re(-0.2),
                Complex64::new(0.0, -0.4),
                re(2.2),
            ],
        );
        let m = factorize(&quad, &DVector::from_element(3, re(0.0)), re(0.0)).unwrap();
        for expo in [[4u8, 0, 0], [2, 2, 0], [1, 2, 1], [2, 1, 3], [0, 4, 2]] {
            let mut idx = Vec::new();
            for (var, &e) in expo.iter().enumerate() {
                idx.extend(std::iter::repeat_n(var, e as usize));
            }
            let want = pairing_sum(&mut idx, &m.cov);
            let got = scalar_moment(&expo, &m);
            assert!((got - want).norm() < 1e-12 * want.norm().max(1.0), "{expo:?}");
        }
        // e=4 univariate: 3s² with s = Σ₀₀.
        let s = m.cov[(0, 0)];
        let got = scalar_moment(&[4, 0, 0], &m);
        assert!((got - re(3.0) * s * s).norm() < 1e-13 * got.norm());
    }

    #[test]
    fn first_moments_and_constants() {
        let quad = DMatrix::from_row_slice(2, 2, &[re(2.0), re(0.5), re(0.5), re(2.0)]);
        let lin = DVector::from_column_slice(&[re(1.0), re(-0.5)]);
        let m = factorize(&quad, &lin, re(0.0)).unwrap();
        assert_eq!(scalar_moment(&[0, 0], &m), re(1.0));
        assert!((scalar_moment(&[1, 0], &m) - m.mean[0]).norm() < 1e-15);
        // A·Σ = I
        let prod = quad.map(|z| z) * &m.cov;
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - re(want)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn linearity_in_polynomial() {
        let quad = DMatrix::from_row_slice(
            2,
            2,
            &[re(2.0), Complex64::new(0.1, 0.3), Complex64::new(0.1, 0.3), re(1.5)],
        );
        let lin = DVector::from_column_slice(&[re(0.2), re(0.0)]);
        let p1 = SparsePoly::from_terms(2, &[(&[2, 1], re(1.0))]);
        let p2 = SparsePoly::from_terms(2, &[(&[0, 2], re(1.0)), (&[1, 0], re(-2.0))]);
        let sum = p1.add(&p2.scale(re(3.0)));
        let int = |p: &SparsePoly| {
            integrate(&ComplexGaussPoly::new(p.clone(), quad.clone(), lin.clone(), re(0.0)))
                .unwrap()
        };
        let lhs = int(&sum);
        let rhs = int(&p1) + int(&p2) * re(3.0);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn real_kernel_gives_real_result() {
        let quad = DMatrix::from_row_slice(2, 2, &[re(2.0), re(0.7), re(0.7), re(3.0)]);
        let lin = DVector::from_column_slice(&[re(0.5), re(-1.0)]);
        let poly = SparsePoly::from_terms(2, &[(&[3, 1], re(0.5)), (&[0, 2], re(1.0))]);
        let got = integrate(&ComplexGaussPoly::new(poly, quad, lin, re(0.1))).unwrap();
        assert!(got.im.abs() < 1e-12 * got.re.abs());
    }

    #[test]
    fn divergent_kernel_is_refused() {
        let quad = DMatrix::from_row_slice(2, 2, &[re(1.0), re(2.0), re(2.0), re(1.0)]);
        let g = ComplexGaussPoly::new(
            SparsePoly::one(2),
            quad,
            DVector::from_element(2, re(0.0)),
            re(0.0),
        );
        assert!(matches!(integrate(&g), Err(Error::Divergent(_))));
    }

    #[test]
    fn ill_conditioned_kernel_is_refused() {
        let quad = DMatrix::from_row_slice(2, 2, &[re(1e9), re(0.0), re(0.0), re(1e-8)]);
        let g = ComplexGaussPoly::new(
            SparsePoly::one(2),
            quad,
            DVector::from_element(2, re(0.0)),
            re(0.0),
        );
        assert!(matches!(integrate(&g), Err(Error::IllConditioned { .. })));
    }
}
