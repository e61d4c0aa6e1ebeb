//! Number-basis oracle for the discord marker.
//!
//! Q is a basis-independent functional of ρ⊗ρ⊗ρ⊗ρ, so it can be evaluated
//! in a truncated Fock basis with no phase-space machinery at all: slicing
//! ρ along the second mode gives first-mode operators
//!
//!   B_mn = ⟨m|₂ ρ |n⟩₂,   B_mn† = B_nm,
//!
//! and the marker is the total commutator weight
//!
//!   Q = ½ Σ_{(m,n),(p,q)} Tr([B_mn, B_pq]·[B_mn, B_pq]†)
//!     = Tr(M²) − Σ_{(m,n),(p,q)} Tr(B_mn B_pq B_nm B_qp),   M = Σ B_mn B_nm,
//!
//! which vanishes exactly when every pair of blocks commutes, i.e. when the
//! state is classical on the first mode. Everything here is deliberately
//! independent of the integration path: same answer, different arithmetic.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::marker::{Method, QReport, ReportMeta};

const HERMITICITY_TOL: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;
const DEFICIT_LIMIT: f64 = 1e-6;
const CONVERGENCE_TOL: f64 = 1e-4;

/// A two-mode density matrix truncated to `dim_a` × `dim_b` number states,
/// stored on the product basis |a⟩₁|b⟩₂ ↔ row a·dim_b + b.
#[derive(Debug, Clone)]
pub struct FockState {
    dim_a: usize,
    dim_b: usize,
    rho: DMatrix<Complex64>,
    trace_deficit: f64,
}

impl FockState {
    /// Validates Hermiticity and positivity, renormalizes the trace to one,
    /// and records how much trace the input was missing.
    pub fn new(dim_a: usize, dim_b: usize, rho: DMatrix<Complex64>) -> Result<Self> {
        let d = dim_a * dim_b;
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidInput("Fock dimensions must be positive".into()));
        }
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::InvalidInput(format!(
                "density matrix is {}×{}, expected {d}×{d}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("density matrix has non-finite entries".into()));
        }

        let scale = rho.iter().map(|z| z.norm()).fold(0.0_f64, f64::max).max(1.0);
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            }
        }
        if worst > HERMITICITY_TOL * scale {
            return Err(Error::NonPhysical(format!(
                "density matrix is not Hermitian (asymmetry {worst:.3e})"
            )));
        }
        let mut rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);

        let trace = rho.trace().re;
        if trace <= 0.0 || !trace.is_finite() {
            return Err(Error::NonPhysical(format!("density matrix has trace {trace:.3e}")));
        }
        let trace_deficit = 1.0 - trace;
        rho.scale_mut(1.0 / trace);

        let min_eig = rho
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::NonPhysical(format!(
                "density matrix has eigenvalue {min_eig:.3e}"
            )));
        }

        Ok(Self { dim_a, dim_b, rho, trace_deficit })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    /// Probability mass the input lost to truncation (before renormalization).
    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }
}

/// The second-mode slices of ρ, indexed m·dim_b + n: block[m·dim_b + n]
/// is the dim_a × dim_a matrix with entries ⟨a, m|ρ|a', n⟩.
pub fn conditional_blocks(state: &FockState) -> Vec<DMatrix<Complex64>> {
    let (da, db) = state.dims();
    let mut blocks = Vec::with_capacity(db * db);
    for m in 0..db {
        for n in 0..db {
            blocks.push(DMatrix::from_fn(da, da, |a, a_| {
                state.rho[(a * db + m, a_ * db + n)]
            }));
        }
    }
    blocks
}

/// Q evaluated from the number-basis blocks.
///
/// term1 = Tr(M²) with M = Σ B_mn·B_nm (Hermitian, so this is ‖M‖²_F);
/// term2 runs over unordered block pairs, the two orders of a pair being
/// complex conjugates of each other.
pub fn fock_q(state: &FockState) -> Result<QReport> {
    let (da, db) = state.dims();
    let blocks = conditional_blocks(state);

    let mut m_op = DMatrix::<Complex64>::zeros(da, da);
    for b in &blocks {
        m_op += b * b.adjoint();
    }
    let term1 = m_op.norm_squared();

    let nblocks = db * db;
    let partials: Vec<Complex64> = (0..nblocks)
        .into_par_iter()
        .map(|i| {
            let x = &blocks[i];
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, y) in blocks.iter().enumerate().skip(i) {
                let xy = x * y;
                let yx = y * x;
                let t = yx.dotc(&xy);
                if j == i {
                    acc += t;
                } else {
                    acc += Complex64::new(2.0 * t.re, 0.0);
                }
            }
            acc
        })
        .collect();
    let total: Complex64 = partials.into_iter().sum();
    let term2 = total.re;

    Ok(QReport {
        q: term1 - term2,
        term1,
        term2,
        method: Method::FockOracle,
        meta: ReportMeta {
            imag_residue: Some(total.im.abs()),
            fock_dims: Some((da, db)),
            truncation_deficit: Some(state.trace_deficit),
            ..ReportMeta::default()
        },
    })
}

fn annihilation(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

fn thermal_diagonal(n: f64, d: usize) -> DMatrix<f64> {
    // Geometric weights nᵏ/(1+n)^{k+1}.
    let ratio = n / (1.0 + n);
    let mut th = DMatrix::zeros(d, d);
    let mut w = 1.0 / (1.0 + n);
    for k in 0..d {
        th[(k, k)] = w;
        w *= ratio;
    }
    th
}

/// Squeezed thermal state in a d×d-per-mode truncation:
/// ρ = S·(ρ_th(n) ⊗ ρ_th(n))·Sᵀ with S = exp(r(â₁†â₂† − â₁â₂)).
///
/// The generator is real antisymmetric, so the truncated S is exactly
/// orthogonal and the only trace loss is the thermal tail above d; the
/// squeeze's own truncation error is invisible to the trace and must be
/// policed by `converge_q` instead.
pub fn fock_squeezed_thermal(n: f64, r: f64, d: usize) -> Result<FockState> {
    if n < 0.0 || !n.is_finite() {
        return Err(Error::InvalidInput(format!("mean photon number must be ≥ 0, got {n}")));
    }
    if !r.is_finite() {
        return Err(Error::InvalidInput(format!("squeezing must be finite, got {r}")));
    }
    if d < 4 {
        return Err(Error::InvalidInput(format!("truncation dimension must be ≥ 4, got {d}")));
    }

    let a = annihilation(d);
    let adag = a.transpose();
    let gen = (adag.kronecker(&adag) - a.kronecker(&a)) * r;
    let s = gen.exp();

    let th = thermal_diagonal(n, d);
    let rho_real = &s * th.kronecker(&th) * s.transpose();
    let rho = rho_real.map(|x| Complex64::new(x, 0.0));

    let state = FockState::new(d, d, rho)?;
    if state.trace_deficit() > DEFICIT_LIMIT {
        return Err(Error::TruncationError {
            deficit: state.trace_deficit(),
            limit: DEFICIT_LIMIT,
        });
    }
    Ok(state)
}

/// The exact two-level mixture k·|00⟩⟨00| + (1−k)·|+1⟩⟨+1| with
/// |+⟩ = (|0⟩+|1⟩)/√2, on a 2×2-per-mode basis.
pub fn fock_photon_number_mixed(k: f64) -> Result<FockState> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidInput(format!("mixing weight must lie in [0, 1], got {k}")));
    }
    let kb = 1.0 - k;
    let mut rho = DMatrix::<Complex64>::zeros(4, 4);
    rho[(0, 0)] = Complex64::new(k, 0.0);
    // |+1⟩ spreads over |01⟩ (index 1) and |11⟩ (index 3).
    for &i in &[1usize, 3] {
        for &j in &[1usize, 3] {
            rho[(i, j)] = Complex64::new(0.5 * kb, 0.0);
        }
    }
    FockState::new(2, 2, rho)
}

/// Evaluates `fock_q` on the same family at each dimension in `dims` and
/// returns the final report with the whole value history. Errors with the
/// history if the last two values still disagree by more than 1e-4 relative.
pub fn converge_q<F>(mut build: F, dims: &[usize]) -> Result<(QReport, Vec<f64>)>
where
    F: FnMut(usize) -> Result<FockState>,
{
    if dims.is_empty() {
        return Err(Error::InvalidInput("dimension list is empty".into()));
    }
    if dims.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("dimension list must be strictly increasing".into()));
    }

    let mut history = Vec::with_capacity(dims.len());
    let mut last = None;
    for &d in dims {
        let report = fock_q(&build(d)?)?;
        history.push(report.q);
        last = Some(report);
    }

    if history.len() >= 2 {
        let a = history[history.len() - 2];
        let b = history[history.len() - 1];
        let denom = a.abs().max(b.abs()).max(1e-12);
        if (a - b).abs() > CONVERGENCE_TOL * denom {
            return Err(Error::NonConverged {
                history: dims.iter().copied().zip(history).collect(),
            });
        }
    }

    Ok((last.expect("dims nonempty"), history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::q_gaussian_closed;
    use crate::wigner::squeezed_thermal_params;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_complex_matrix(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn ginibre_density(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let g = random_complex_matrix(d, rng);
        let rho = &g * g.adjoint();
        let tr = rho.trace().re;
        rho * c(1.0 / tr)
    }

    fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        random_complex_matrix(d, rng).qr().q()
    }

    /// k·|00⟩⟨00| + (1−k)·|+1⟩⟨+1| embedded in a d×d-per-mode space.
    fn photon_mixed_padded(k: f64, d: usize) -> FockState {
        let mut rho = DMatrix::<Complex64>::zeros(d * d, d * d);
        rho[(0, 0)] = c(k);
        for &i in &[1usize, d + 1] {
            for &j in &[1usize, d + 1] {
                rho[(i, j)] = c(0.5 * (1.0 - k));
            }
        }
        FockState::new(d, d, rho).unwrap()
    }

    #[test]
    fn vacuum_has_zero_marker() {
        let mut rho = DMatrix::<Complex64>::zeros(4, 4);
        rho[(0, 0)] = c(1.0);
        let state = FockState::new(2, 2, rho).unwrap();
        let report = fock_q(&state).unwrap();
        assert!((report.term1 - 1.0).abs() < 1e-14);
        assert!((report.term2 - 1.0).abs() < 1e-14);
        assert!(report.q.abs() < 1e-14);
        assert_eq!(report.meta.fock_dims, Some((2, 2)));
        assert!(report.meta.truncation_deficit.unwrap().abs() < 1e-14);
    }

    #[test]
    fn bell_state_marker_value() {
        // For ρ = ½Σ|ii⟩⟨jj| the blocks are B_mn = ½E_mn, so
        // M = ½·identity, term1 = ½, and the only surviving four-block
        // traces are the two diagonal ones: term2 = 2/16. Q = 3/8.
        let mut rho = DMatrix::<Complex64>::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                rho[(i, j)] = c(0.5);
            }
        }
        let report = fock_q(&FockState::new(2, 2, rho).unwrap()).unwrap();
        assert!((report.term1 - 0.5).abs() < 1e-14, "term1 {}", report.term1);
        assert!((report.term2 - 0.125).abs() < 1e-14, "term2 {}", report.term2);
        assert!((report.q - 0.375).abs() < 1e-14, "q {}", report.q);
    }

    #[test]
    fn classical_classical_mixture_vanishes() {
        let mut rho = DMatrix::<Complex64>::zeros(4, 4);
        rho[(0, 0)] = c(0.5);
        rho[(3, 3)] = c(0.5);
        let report = fock_q(&FockState::new(2, 2, rho).unwrap()).unwrap();
        assert!(report.q.abs() < 1e-15, "q {}", report.q);
    }

    #[test]
    fn photon_number_mixture_is_exact() {
        for k in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let state = fock_photon_number_mixed(k).unwrap();
            let want = 0.5 * k * k * (1.0 - k) * (1.0 - k);
            let got = fock_q(&state).unwrap().q;
            assert!((got - want).abs() < 1e-14, "k={k}: {got} vs {want}");
        }
        assert!(fock_photon_number_mixed(1.2).is_err());
    }

    #[test]
    fn classical_on_first_mode_states_vanish() {
        // Σᵢ pᵢ|i⟩⟨i|₁ ⊗ σᵢ, then the first-mode basis rotated by a random
        // unitary so the blocks are dense but still commuting.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (da, db) = (3usize, 4usize);
        for _ in 0..6 {
            let mut rho = DMatrix::<Complex64>::zeros(da * db, da * db);
            let mut weights: Vec<f64> = (0..da).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            for (i, w) in weights.iter().enumerate() {
                let sigma = ginibre_density(db, &mut rng);
                for m in 0..db {
                    for n in 0..db {
                        rho[(i * db + m, i * db + n)] = sigma[(m, n)] * c(*w);
                    }
                }
            }
            let u = random_unitary(da, &mut rng);
            let ub = DMatrix::<Complex64>::identity(db, db);
            let k = u.kronecker(&ub);
            let rotated = &k * rho * k.adjoint();
            let report = fock_q(&FockState::new(da, db, rotated).unwrap()).unwrap();
            assert!(report.q.abs() < 1e-12, "q {}", report.q);
        }
    }

    #[test]
    fn blocks_come_in_adjoint_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let state = FockState::new(3, 3, ginibre_density(9, &mut rng)).unwrap();
        let blocks = conditional_blocks(&state);
        let db = 3;
        let mut trace_sum = Complex64::new(0.0, 0.0);
        for m in 0..db {
            trace_sum += blocks[m * db + m].trace();
            for n in 0..db {
                let diff = (&blocks[m * db + n].adjoint() - &blocks[n * db + m]).norm();
                assert!(diff < 1e-14, "block ({m},{n}) adjoint mismatch {diff}");
            }
        }
        assert!((trace_sum.re - 1.0).abs() < 1e-12 && trace_sum.im.abs() < 1e-14);
    }

    #[test]
    fn squeezed_thermal_construction() {
        // No squeezing, no heat: the two-mode vacuum.
        let vac = fock_squeezed_thermal(0.0, 0.0, 8).unwrap();
        assert!((vac.rho()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(vac.rho().norm() - 1.0 < 1e-13);

        // Squeezed vacuum: Schmidt weights tanh²ᵏr/cosh²r along |kk⟩.
        let d = 15;
        let sq = fock_squeezed_thermal(0.0, 0.3, d).unwrap();
        let t = 0.3_f64.tanh();
        let ch2 = 0.3_f64.cosh().powi(2);
        for k in 0..4 {
            let want = t.powi(2 * k as i32) / ch2;
            let got = sq.rho()[(k * d + k, k * d + k)].re;
            assert!((got - want).abs() < 1e-10, "k={k}: {got} vs {want}");
        }

        assert!(fock_squeezed_thermal(0.5, 0.3, 20).is_ok());
        match fock_squeezed_thermal(2.0, 0.1, 8) {
            Err(Error::TruncationError { deficit, .. }) => assert!(deficit > 1e-2),
            other => panic!("expected truncation error, got {other:?}"),
        }
        assert!(fock_squeezed_thermal(0.0, 0.1, 3).is_err());
        assert!(fock_squeezed_thermal(-0.1, 0.1, 8).is_err());
    }

    #[test]
    fn squeezed_vacuum_approaches_closed_form() {
        let want = q_gaussian_closed(&squeezed_thermal_params(0.0, 0.3).unwrap()).unwrap().q;
        let err_at = |d: usize| {
            let q = fock_q(&fock_squeezed_thermal(0.0, 0.3, d).unwrap()).unwrap().q;
            (q - want).abs() / want
        };
        let coarse = err_at(12);
        let fine = err_at(16);
        assert!(fine < 1e-3, "relative error at d=16: {fine}");
        assert!(fine < coarse, "no improvement: {coarse} -> {fine}");
    }

    #[test]
    fn convergence_harness_accepts_and_rejects() {
        // Finite-dimensional family: padding changes nothing.
        let (report, history) =
            converge_q(|d| Ok(photon_mixed_padded(0.4, d)), &[2, 4]).unwrap();
        assert!((history[0] - history[1]).abs() < 1e-13);
        let want = 0.5 * 0.4f64.powi(2) * 0.6f64.powi(2);
        assert!((report.q - want).abs() < 1e-13);

        // Gentle squeezing settles onto the closed form.
        let closed = q_gaussian_closed(&squeezed_thermal_params(0.0, 0.3).unwrap()).unwrap().q;
        let (report, history) =
            converge_q(|d| fock_squeezed_thermal(0.0, 0.3, d), &[8, 12, 16]).unwrap();
        assert_eq!(history.len(), 3);
        assert!((report.q - closed).abs() < 1e-3 * closed);

        // Heavy squeezing at these sizes must be flagged, not reported.
        match converge_q(|d| fock_squeezed_thermal(0.0, 1.2, d), &[8, 12]) {
            Err(Error::NonConverged { history }) => assert_eq!(history.len(), 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }

        assert!(converge_q(|_| Ok(photon_mixed_padded(0.4, 2)), &[]).is_err());
        assert!(converge_q(|_| Ok(photon_mixed_padded(0.4, 2)), &[4, 4]).is_err());
    }

    #[test]
    fn invariant_under_local_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (da, db) = (4usize, 4usize);
        let rho = ginibre_density(da * db, &mut rng);
        let base = fock_q(&FockState::new(da, db, rho.clone()).unwrap()).unwrap().q;
        for _ in 0..3 {
            let k = random_unitary(da, &mut rng).kronecker(&random_unitary(db, &mut rng));
            let rotated = &k * &rho * k.adjoint();
            let q = fock_q(&FockState::new(da, db, rotated).unwrap()).unwrap().q;
            assert!((q - base).abs() < 1e-9 * base.abs().max(1e-9), "{q} vs {base}");
        }
    }

    #[test]
    fn construction_rejects_bad_input() {
        let mut rho = DMatrix::<Complex64>::zeros(4, 4);
        rho[(0, 1)] = c(0.3);
        rho[(0, 0)] = c(1.0);
        assert!(matches!(FockState::new(2, 2, rho), Err(Error::NonPhysical(_))));

        let mut indefinite = DMatrix::<Complex64>::zeros(4, 4);
        indefinite[(0, 0)] = c(1.5);
        indefinite[(1, 1)] = c(-0.5);
        assert!(matches!(FockState::new(2, 2, indefinite), Err(Error::NonPhysical(_))));

        let wrong = DMatrix::<Complex64>::zeros(3, 3);
        assert!(matches!(FockState::new(2, 2, wrong), Err(Error::InvalidInput(_))));
    }
}
