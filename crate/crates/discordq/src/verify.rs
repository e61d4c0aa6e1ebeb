//! Cross-evaluator verification suite.
//!
//! Eight self-contained checks exercise every route to Q against every
//! other: random Gaussian states through the closed form and the general
//! integrator, each state family against its printed closed form, the
//! number-basis oracle against both, the discord surface scan, and the
//! structural properties (positivity, sign analysis, product states,
//! normalization/purity, quadrature spot checks). All randomness is
//! seeded, so two runs produce identical reports.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cv::{validate_covariance, GaussianParams};
use crate::fock::{fock_photon_number_mixed, fock_q, fock_squeezed_thermal, FockState};
use crate::gauss::quadrature::{integrate_reference, suggested_half_width};
use crate::gauss::{integrate, ComplexGaussPoly};
use crate::marker::{
    gaussian_zero_discord, q_gaussian_closed, q_general, q_mixture_closed, q_photon_added_n0,
    q_photon_mixed_closed, scan_photon_added, Verdict,
};
use crate::poly::SparsePoly;
use crate::wigner::{
    make_gaussian_vacuum_mixture, make_photon_added_squeezed_thermal, make_photon_number_mixed,
    make_squeezed_thermal, normalization, purity, squeezed_thermal_params, wigner_of_gaussian,
};

/// Knobs a caller may vary without changing what is being verified.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Truncation dimension for the number-basis convergence check.
    pub fock_dim: usize,
    /// Decision threshold used when the suite forms zero/nonzero verdicts.
    pub threshold: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { fock_dim: 16, threshold: 1e-9 }
    }
}

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

type CheckResult = std::result::Result<String, String>;

fn run_check(id: usize, name: &'static str, body: impl FnOnce() -> CheckResult) -> CheckReport {
    match body() {
        Ok(details) => CheckReport { id, name, passed: true, details },
        Err(details) => CheckReport { id, name, passed: false, details },
    }
}

/// Runs every check and returns their reports in a fixed order.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckReport> {
    vec![
        run_check(1, "closed form vs general integrator on random Gaussians", check_random_gaussians),
        run_check(2, "squeezed-thermal closed formula", check_squeezed_thermal_formula),
        run_check(3, "photon-number mixture against k²(1−k)²/2", check_photon_mixture),
        run_check(4, "Gaussian-vacuum mixture against three-term closed form", check_mixture),
        run_check(5, "photon-added squeezed vacuum closed form", check_photon_added),
        run_check(6, "photon-added discord surface scan", check_scan),
        run_check(7, "number-basis oracle convergence and invariance", || check_fock(cfg)),
        run_check(8, "positivity, sign analysis, products, moments", || check_properties(cfg)),
    ]
}

/// Rejection-samples a physical two-mode Gaussian state with
/// a, b ∈ [0.25, 1.5) and |cᵢ| ≤ 0.95√(ab).
fn sample_params(rng: &mut ChaCha8Rng) -> GaussianParams {
    loop {
        let a: f64 = rng.gen_range(0.25..1.5);
        let b: f64 = rng.gen_range(0.25..1.5);
        let lim = 0.95 * (a * b).sqrt();
        let c1 = rng.gen_range(-lim..lim);
        let c2 = rng.gen_range(-lim..lim);
        if let Ok(p) = GaussianParams::new(a, b, c1, c2) {
            if validate_covariance(&p.covariance()).is_valid() {
                return p;
            }
        }
    }
}

fn check_random_gaussians() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_rel = 0.0_f64;
    let mut worst_abs = 0.0_f64;
    for i in 0..100 {
        let p = sample_params(&mut rng);
        let closed =
            q_gaussian_closed(&p).map_err(|e| format!("case {i}: closed form failed: {e}"))?.q;
        let state = wigner_of_gaussian(&p.covariance())
            .map_err(|e| format!("case {i}: state build failed: {e}"))?;
        let general =
            q_general(&state).map_err(|e| format!("case {i}: integrator failed: {e}"))?.q;
        let delta = (general - closed).abs();
        if closed.abs() < 1e-6 {
            worst_abs = worst_abs.max(delta);
            if delta > 1e-10 {
                return Err(format!(
                    "case {i} (a={:.4}, b={:.4}, c1={:.4}, c2={:.4}): |Δq| = {delta:.3e} > 1e-10",
                    p.a, p.b, p.c1, p.c2
                ));
            }
        } else {
            let rel = delta / closed.abs();
            worst_rel = worst_rel.max(rel);
            if rel > 1e-6 {
                return Err(format!(
                    "case {i} (a={:.4}, b={:.4}, c1={:.4}, c2={:.4}): rel Δq = {rel:.3e} > 1e-6",
                    p.a, p.b, p.c1, p.c2
                ));
            }
        }
    }
    Ok(format!("100 states: worst rel {worst_rel:.3e}, worst abs (q<1e-6) {worst_abs:.3e}"))
}

fn check_squeezed_thermal_formula() -> CheckResult {
    let mut worst = 0.0_f64;
    for n in [0.0, 0.5, 1.0] {
        for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let p = squeezed_thermal_params(n, r).map_err(|e| e.to_string())?;
            let q = q_gaussian_closed(&p).map_err(|e| e.to_string())?.q;
            let want = 2.0 * (2.0 * r).sinh() * (2.0 * r).tanh()
                / ((1.0 + 2.0 * n).powi(3)
                    * (1.0 + 2.0 * n + 2.0 * n * n)
                    * (3.0 + 8.0 * n + 8.0 * n * n + (4.0 * r).cosh()));
            let err = (q - want).abs() / want.abs().max(1e-12);
            worst = worst.max(err);
            if err > 1e-12 {
                return Err(format!("n={n}, r={r}: {q:.17e} vs {want:.17e} (rel {err:.3e})"));
            }
        }
    }
    Ok(format!("15 grid points: worst rel {worst:.3e}"))
}

fn check_photon_mixture() -> CheckResult {
    let mut worst_general = 0.0_f64;
    let mut worst_fock = 0.0_f64;
    for i in 0..=10 {
        let k = i as f64 / 10.0;
        let want = q_photon_mixed_closed(k).map_err(|e| e.to_string())?;

        let state = make_photon_number_mixed(k).map_err(|e| e.to_string())?;
        let general = q_general(&state).map_err(|e| format!("k={k}: {e}"))?.q;
        let dg = (general - want).abs();
        worst_general = worst_general.max(dg);
        if dg > 1e-10 {
            return Err(format!("k={k}: general {general:.12e} vs {want:.12e} (|Δ| {dg:.3e})"));
        }

        let fock_state = fock_photon_number_mixed(k).map_err(|e| e.to_string())?;
        let fock = fock_q(&fock_state).map_err(|e| format!("k={k}: {e}"))?.q;
        let df = (fock - want).abs();
        worst_fock = worst_fock.max(df);
        if df > 1e-12 {
            return Err(format!("k={k}: Fock {fock:.12e} vs {want:.12e} (|Δ| {df:.3e})"));
        }
    }
    Ok(format!("11 weights: worst |Δ| general {worst_general:.3e}, Fock {worst_fock:.3e}"))
}

fn check_mixture() -> CheckResult {
    let mut worst = 0.0_f64;
    for r in [0.2, 0.5] {
        let p = squeezed_thermal_params(0.0, r).map_err(|e| e.to_string())?;
        for k in [0.0, 0.3, 0.7, 1.0] {
            let want = q_mixture_closed(k, &p).map_err(|e| e.to_string())?;
            let state = make_gaussian_vacuum_mixture(k, &p).map_err(|e| e.to_string())?;
            let got = q_general(&state).map_err(|e| format!("k={k}, r={r}: {e}"))?.q;
            if k == 0.0 {
                if got.abs() > 1e-10 {
                    return Err(format!("k=0, r={r}: q = {got:.3e} exceeds 1e-10"));
                }
            } else {
                let rel = (got - want).abs() / want.abs();
                worst = worst.max(rel);
                if rel > 1e-8 {
                    return Err(format!(
                        "k={k}, r={r}: {got:.12e} vs {want:.12e} (rel {rel:.3e})"
                    ));
                }
            }
        }
    }
    // Uncorrelated ingredients: the mixture of two product states diagonal
    // in the same basis carries no discord.
    let p0 = squeezed_thermal_params(0.0, 0.0).map_err(|e| e.to_string())?;
    let state = make_gaussian_vacuum_mixture(0.5, &p0).map_err(|e| e.to_string())?;
    let q0 = q_general(&state).map_err(|e| e.to_string())?.q;
    if q0.abs() > 1e-10 {
        return Err(format!("c=0 mixture: q = {q0:.3e} exceeds 1e-10"));
    }
    Ok(format!("8 mixtures: worst rel {worst:.3e}; c=0 and k=0 below 1e-10"))
}

fn check_photon_added() -> CheckResult {
    let mut worst = 0.0_f64;
    for r in [0.1, 0.3, 0.5, 0.8, 1.0] {
        let want = q_photon_added_n0(r);
        let state = make_photon_added_squeezed_thermal(0.0, r).map_err(|e| e.to_string())?;
        let got = q_general(&state).map_err(|e| format!("r={r}: {e}"))?.q;
        let rel = (got - want).abs() / want.abs();
        worst = worst.max(rel);
        if rel > 1e-7 {
            return Err(format!("r={r}: {got:.12e} vs {want:.12e} (rel {rel:.3e})"));
        }
    }
    let state = make_photon_added_squeezed_thermal(0.0, 0.0).map_err(|e| e.to_string())?;
    let q0 = q_general(&state).map_err(|e| e.to_string())?.q;
    if q0.abs() > 1e-9 {
        return Err(format!("r=0: q = {q0:.3e} exceeds 1e-9"));
    }
    Ok(format!("5 squeezings: worst rel {worst:.3e}; r=0 value {q0:.3e}"))
}

fn check_scan() -> CheckResult {
    let grid: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
    let rows = scan_photon_added(&grid, &grid);
    if rows.len() != 121 {
        return Err(format!("expected 121 rows, got {}", rows.len()));
    }
    let mut worst_n0 = 0.0_f64;
    for row in &rows {
        if row.status != "ok" {
            return Err(format!("cell (n={}, r={}) failed: {}", row.n, row.r, row.status));
        }
        if row.r >= 0.05 {
            if row.log10_q <= -9.0 {
                return Err(format!(
                    "cell (n={}, r={}): log10 q = {:.3} not above -9",
                    row.n, row.r, row.log10_q
                ));
            }
        } else if row.log10_q > -9.0 {
            return Err(format!(
                "r=0 cell (n={}): log10 q = {:.3} exceeds -9",
                row.n, row.log10_q
            ));
        }
        if row.n == 0.0 && row.r >= 0.05 {
            let want = q_photon_added_n0(row.r);
            let got = 10.0_f64.powf(row.log10_q);
            let rel = (got - want).abs() / want.abs();
            worst_n0 = worst_n0.max(rel);
            if rel > 1e-7 {
                return Err(format!(
                    "n=0 row at r={}: {got:.12e} vs {want:.12e} (rel {rel:.3e})",
                    row.r
                ));
            }
        }
    }
    Ok(format!("121 cells ok; n=0 row worst rel {worst_n0:.3e}"))
}

fn random_complex_matrix(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn check_fock(cfg: &VerifyConfig) -> CheckResult {
    // Truncated squeezed vacuum against the Gaussian closed form.
    let closed = q_gaussian_closed(&squeezed_thermal_params(0.0, 0.3).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .q;
    let state = fock_squeezed_thermal(0.0, 0.3, cfg.fock_dim).map_err(|e| e.to_string())?;
    let fock = fock_q(&state).map_err(|e| e.to_string())?.q;
    let rel = (fock - closed).abs() / closed.abs();
    if rel > 1e-3 {
        return Err(format!(
            "squeezed vacuum at dim {}: {fock:.9e} vs {closed:.9e} (rel {rel:.3e})",
            cfg.fock_dim
        ));
    }

    // The finite-dimensional family is exact at dimension two.
    for k in [0.3, 0.5] {
        let want = q_photon_mixed_closed(k).map_err(|e| e.to_string())?;
        let got = fock_q(&fock_photon_number_mixed(k).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .q;
        if (got - want).abs() > 1e-12 {
            return Err(format!("photon mixture k={k}: {got:.15e} vs {want:.15e}"));
        }
    }

    // Local unitaries must not move the value.
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (da, db) = (4usize, 4usize);
    let g = random_complex_matrix(da * db, &mut rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    let rho = rho * Complex64::new(1.0 / tr, 0.0);
    let base = fock_q(&FockState::new(da, db, rho.clone()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .q;
    let mut worst_inv = 0.0_f64;
    for _ in 0..3 {
        let ua = random_complex_matrix(da, &mut rng).qr().q();
        let ub = random_complex_matrix(db, &mut rng).qr().q();
        let kron = ua.kronecker(&ub);
        let rotated = &kron * &rho * kron.adjoint();
        let q = fock_q(&FockState::new(da, db, rotated).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .q;
        let rel = (q - base).abs() / base.abs().max(1e-12);
        worst_inv = worst_inv.max(rel);
        if rel > 1e-9 {
            return Err(format!("local unitary moved q by rel {rel:.3e}"));
        }
    }

    Ok(format!(
        "squeezed vacuum rel {rel:.3e} at dim {}; mixture exact; invariance worst rel {worst_inv:.3e}",
        cfg.fock_dim
    ))
}

fn check_properties(cfg: &VerifyConfig) -> CheckResult {
    // Positivity and sign analysis over a large random population.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut max_f = f64::NEG_INFINITY;
    let mut min_q = f64::INFINITY;
    for _ in 0..1000 {
        let p = sample_params(&mut rng);
        let q = q_gaussian_closed(&p).map_err(|e| e.to_string())?.q;
        min_q = min_q.min(q);
        if q < -1e-9 {
            return Err(format!(
                "negative marker {q:.3e} at (a={:.4}, b={:.4}, c1={:.4}, c2={:.4})",
                p.a, p.b, p.c1, p.c2
            ));
        }
        let f = crate::marker::sign_analysis_f(&p);
        max_f = max_f.max(f);
        if f > 1e-12 {
            return Err(format!(
                "sign analysis f = {f:.3e} at (a={:.4}, b={:.4}, c1={:.4}, c2={:.4})",
                p.a, p.b, p.c1, p.c2
            ));
        }
    }

    // Positivity across every family grid, through the general integrator.
    let mut family_min = f64::INFINITY;
    let mut check_state = |state: &crate::wigner::WignerState, label: String| -> CheckResult {
        let q = q_general(state).map_err(|e| format!("{label}: {e}"))?.q;
        family_min = family_min.min(q);
        if q < -1e-9 {
            return Err(format!("{label}: negative marker {q:.3e}"));
        }
        Ok(String::new())
    };
    for n in [0.0, 0.5, 1.0] {
        for r in [0.0, 0.25, 0.5, 1.0] {
            let s = make_squeezed_thermal(n, r).map_err(|e| e.to_string())?;
            check_state(&s, format!("squeezed thermal (n={n}, r={r})"))?;
        }
    }
    for i in 0..=10 {
        let k = i as f64 / 10.0;
        let s = make_photon_number_mixed(k).map_err(|e| e.to_string())?;
        check_state(&s, format!("photon mixture (k={k})"))?;
    }
    for r in [0.2, 0.5] {
        let p = squeezed_thermal_params(0.0, r).map_err(|e| e.to_string())?;
        for k in [0.0, 0.3, 0.7, 1.0] {
            let s = make_gaussian_vacuum_mixture(k, &p).map_err(|e| e.to_string())?;
            check_state(&s, format!("mixture (k={k}, r={r})"))?;
        }
    }
    for n in [0.0, 0.5, 1.0] {
        for r in [0.0, 0.3, 0.8] {
            let s = make_photon_added_squeezed_thermal(n, r).map_err(|e| e.to_string())?;
            check_state(&s, format!("photon-added (n={n}, r={r})"))?;
        }
    }

    // Product states carry no discord, through both evaluators.
    let mut max_product = 0.0_f64;
    for _ in 0..50 {
        let a = rng.gen_range(0.25..1.5);
        let b = rng.gen_range(0.25..1.5);
        let p = GaussianParams::new(a, b, 0.0, 0.0).map_err(|e| e.to_string())?;
        let q = q_gaussian_closed(&p).map_err(|e| e.to_string())?.q;
        max_product = max_product.max(q.abs());
        if q.abs() > 1e-9 {
            return Err(format!("product state (a={a:.4}, b={b:.4}): q = {q:.3e}"));
        }
        let verdict = gaussian_zero_discord(&p, cfg.threshold).map_err(|e| e.to_string())?;
        if verdict.verdict != Verdict::Zero {
            return Err(format!("product state (a={a:.4}, b={b:.4}) judged nonzero"));
        }
    }
    for n in [0.0, 0.5, 1.0] {
        let s = make_squeezed_thermal(n, 0.0).map_err(|e| e.to_string())?;
        let q = q_general(&s).map_err(|e| e.to_string())?.q;
        max_product = max_product.max(q.abs());
        if q.abs() > 1e-9 {
            return Err(format!("thermal product (n={n}): q = {q:.3e}"));
        }
    }

    // Normalization and purity of every constructor.
    let sts_p = squeezed_thermal_params(0.0, 0.6).map_err(|e| e.to_string())?;
    let states: Vec<(crate::wigner::WignerState, Option<f64>, &str)> = vec![
        (make_squeezed_thermal(0.0, 0.0).map_err(|e| e.to_string())?, Some(1.0), "vacuum"),
        (
            make_squeezed_thermal(0.5, 0.8).map_err(|e| e.to_string())?,
            Some(1.0 / 4.0),
            "squeezed thermal",
        ),
        (
            make_photon_number_mixed(0.3).map_err(|e| e.to_string())?,
            Some(0.09 + 0.49),
            "photon mixture",
        ),
        (
            make_gaussian_vacuum_mixture(0.4, &sts_p).map_err(|e| e.to_string())?,
            Some(0.16 + 0.36 + 2.0 * 0.4 * 0.6 / 0.6_f64.cosh().powi(2)),
            "Gaussian-vacuum mixture",
        ),
        (
            make_photon_added_squeezed_thermal(0.0, 0.5).map_err(|e| e.to_string())?,
            Some(1.0),
            "photon-added squeezed vacuum",
        ),
        (make_photon_added_squeezed_thermal(0.4, 0.7).map_err(|e| e.to_string())?, None, "photon-added squeezed thermal"),
    ];
    for (state, want_purity, label) in &states {
        let norm = normalization(state).map_err(|e| format!("{label}: {e}"))?;
        if (norm - 1.0).abs() > 1e-10 {
            return Err(format!("{label}: ∫W = {norm:.15e}"));
        }
        let pur = purity(state).map_err(|e| format!("{label}: {e}"))?;
        if !(pur > 0.0 && pur <= 1.0 + 1e-10) {
            return Err(format!("{label}: purity {pur:.15e} outside (0, 1]"));
        }
        if let Some(want) = want_purity {
            if (pur - want).abs() > 1e-10 {
                return Err(format!("{label}: purity {pur:.15e} vs expected {want:.15e}"));
            }
        }
    }

    // Moment engine against brute-force quadrature in up to three variables.
    let mut worst_quad = 0.0_f64;
    for n in 1..=3usize {
        for case in 0..2 {
            let g = random_gauss_poly(n, &mut rng);
            let exact = integrate(&g).map_err(|e| format!("n={n} case {case}: {e}"))?;
            let tol = 1e-8 * (1.0 + exact.norm());
            let reference = integrate_reference(&g, suggested_half_width(&g.quad), tol);
            let rel = (exact - reference).norm() / reference.norm().max(1e-12);
            worst_quad = worst_quad.max(rel);
            if rel > 1e-6 {
                return Err(format!(
                    "n={n} case {case}: moments {exact} vs quadrature {reference} (rel {rel:.3e})"
                ));
            }
        }
    }

    Ok(format!(
        "min q {min_q:.3e} (families {family_min:.3e}), max f {max_f:.3e}, \
         max product q {max_product:.3e}, quadrature worst rel {worst_quad:.3e}"
    ))
}

/// Random integrand with positive-definite real kernel part and polynomial
/// degree at most six.
fn random_gauss_poly(n: usize, rng: &mut ChaCha8Rng) -> ComplexGaussPoly {
    let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let pd = &m * m.transpose() + DMatrix::<f64>::identity(n, n) * rng.gen_range(0.5..1.0);
    let mut quad = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let im = rng.gen_range(-0.4..0.4);
            quad[(i, j)] = Complex64::new(pd[(i, j)], im);
            quad[(j, i)] = quad[(i, j)];
        }
    }
    let lin = DVector::from_fn(n, |_, _| {
        Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
    });
    let mut poly = SparsePoly::zero(n);
    let max_exp = (6 / n) as u8;
    for _ in 0..4 {
        let expo: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=max_exp)).collect();
        let coeff = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        poly.add_term(&expo, coeff);
    }
    if poly.is_empty() {
        poly = SparsePoly::one(n);
    }
    let logconst = Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
    ComplexGaussPoly::new(poly, quad, lin, logconst)
}
