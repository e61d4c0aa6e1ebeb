//! Brute-force reference integrator for low-dimensional kernels: nested
//! one-dimensional adaptive Gauss–Kronrod (7–15) panels over a truncated
//! box. Shares no code path with the moment recursion it cross-checks, so
//! agreement between the two is meaningful. Practical up to three
//! variables.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexGaussPoly;

const MAX_DEPTH: u32 = 20;
const SEED_PANELS: usize = 6;

// Kronrod-15 abscissae (non-negative half; the rule is symmetric) and
// weights, with the embedded Gauss-7 weights on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Evaluates poly(ξ)·exp(−½ξᵀAξ + bᵀξ + c) at one point.
pub fn eval_integrand(g: &ComplexGaussPoly, point: &[f64]) -> Complex64 {
    let n = g.dim();
    debug_assert_eq!(point.len(), n);
    let mut expo = g.logconst;
    for i in 0..n {
        expo += g.lin[i] * point[i];
        let mut row = Complex64::new(0.0, 0.0);
        for (j, &pj) in point.iter().enumerate() {
            row += g.quad[(i, j)] * pj;
        }
        expo -= 0.5 * point[i] * row;
    }
    g.poly.eval(point) * expo.exp()
}

/// Box half-width that captures the kernel mass to well below any
/// tolerance of interest: the slowest-decaying direction of the Gaussian
/// factor has variance 1/λ_min(Re A).
pub fn suggested_half_width(quad: &DMatrix<Complex64>) -> f64 {
    let re = quad.map(|z| z.re);
    let min_eig = re
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        .max(1e-12);
    16.0 / min_eig.sqrt()
}

/// ∫ over [−half_width, half_width]ⁿ by nested adaptive panels.
pub fn integrate_reference(g: &ComplexGaussPoly, half_width: f64, tol: f64) -> Complex64 {
    let n = g.dim();
    assert!((1..=3).contains(&n), "reference integrator supports 1 to 3 variables");
    let mut point = vec![0.0; n];
    integrate_dim(g, 0, &mut point, half_width, tol)
}

fn integrate_dim(
    g: &ComplexGaussPoly,
    dim: usize,
    point: &mut Vec<f64>,
    half_width: f64,
    tol: f64,
) -> Complex64 {
    let n = g.dim();
    let inner_tol = tol / 8.0;
    let mut eval = |x: f64, point: &mut Vec<f64>| -> Complex64 {
        point[dim] = x;
        if dim + 1 == n {
            eval_integrand(g, point)
        } else {
            integrate_dim(g, dim + 1, point, half_width, inner_tol)
        }
    };

    let mut total = Complex64::new(0.0, 0.0);
    let step = 2.0 * half_width / SEED_PANELS as f64;
    let panel_tol = tol / SEED_PANELS as f64;
    for p in 0..SEED_PANELS {
        let a = -half_width + p as f64 * step;
        total += adaptive(&mut eval, point, a, a + step, panel_tol, MAX_DEPTH);
    }
    total
}

/// One Kronrod-15 panel; returns (integral, error estimate vs Gauss-7).
fn gk15<F: FnMut(f64, &mut Vec<f64>) -> Complex64>(
    eval: &mut F,
    point: &mut Vec<f64>,
    a: f64,
    b: f64,
) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = eval(c, point);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = eval(c - dx, point) + eval(c + dx, point);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[(j - 1) / 2];
        }
    }
    (kronrod * h, (kronrod - gauss).norm() * h)
}

fn adaptive<F: FnMut(f64, &mut Vec<f64>) -> Complex64>(
    eval: &mut F,
    point: &mut Vec<f64>,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let (value, err) = gk15(eval, point, a, b);
    if err <= tol || depth == 0 {
        return value;
    }
    let m = 0.5 * (a + b);
    adaptive(eval, point, a, m, tol * 0.5, depth - 1)
        + adaptive(eval, point, m, b, tol * 0.5, depth - 1)
}
