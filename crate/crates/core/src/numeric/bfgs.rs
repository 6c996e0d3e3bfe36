//! Quasi-Newton minimisation with a strong-Wolfe line search.
//!
//! The objective may return `+∞` to mark an infeasible point; the line search
//! then shrinks the step, which turns infeasible regions into barriers.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    /// Stop once the gradient's Euclidean norm falls below this.
    pub gradient_tolerance: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { max_iterations: 500, gradient_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
}

impl BfgsResult {
    pub fn gradient_norm(&self) -> f64 {
        norm(&self.gradient)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(x: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(xi, di)| xi + t * di).collect()
}

/// Minimises `f`, which returns the value and gradient at a point. The start
/// must be feasible (finite value).
pub fn bfgs<F>(mut f: F, x0: &[f64], opts: BfgsOptions) -> BfgsResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let dim = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    // Inverse Hessian approximation, row-major.
    let mut h = identity(dim);
    let mut first_step = true;
    let mut iterations = 0;

    while iterations < opts.max_iterations && norm(&g) >= opts.gradient_tolerance {
        let mut d: Vec<f64> = (0..dim).map(|i| -dot(&h[i * dim..(i + 1) * dim], &g)).collect();
        if dot(&d, &g) >= 0.0 {
            // Lost descent: restart from steepest descent.
            h = identity(dim);
            d = g.iter().map(|v| -v).collect();
        }
        let t0 = if first_step { (1.0 / norm(&g)).min(1.0) } else { 1.0 };
        let Some((t, fn_, gn)) = wolfe(&mut f, &x, fx, &g, &d, t0) else { break };
        iterations += 1;
        let s: Vec<f64> = d.iter().map(|v| t * v).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        x = axpy(&x, 1.0, &s);
        let progress = fx - fn_;
        fx = fn_;
        g = gn;
        if sy > 1e-16 * norm(&s) * norm(&y) {
            if first_step {
                // Shanno–Phua scaling of the initial approximation.
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
                first_step = false;
            }
            update_inverse(&mut h, &s, &y, sy);
        }
        if progress == 0.0 && norm(&s) <= f64::EPSILON * norm(&x).max(1.0) {
            break;
        }
    }
    BfgsResult { x, value: fx, gradient: g, iterations }
}

fn identity(dim: usize) -> Vec<f64> {
    let mut h = vec![0.0; dim * dim];
    for i in 0..dim {
        h[i * dim + i] = 1.0;
    }
    h
}

/// `H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ`.
fn update_inverse(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let dim = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..dim).map(|i| dot(&h[i * dim..(i + 1) * dim], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..dim {
        for j in 0..dim {
            h[i * dim + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

/// Strong-Wolfe line search (bracketing then zoom). Returns the step and the
/// value and gradient there, or `None` when no acceptable step is found.
fn wolfe<F>(f: &mut F, x: &[f64], f0: f64, g0: &[f64], d: &[f64], t0: f64) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let dg0 = dot(g0, d);
    let mut eval = |t: f64| {
        let (v, g) = f(&axpy(x, t, d));
        let dg = dot(&g, d);
        (v, g, dg)
    };

    let (mut t_prev, mut f_prev, mut dg_prev) = (0.0, f0, dg0);
    let mut t = t0;
    for i in 0..60 {
        let (ft, gt, dgt) = eval(t);
        if !ft.is_finite() {
            // Infeasible: shrink towards the last feasible step.
            t = t_prev + 0.5 * (t - t_prev);
            continue;
        }
        if ft > f0 + C1 * t * dg0 || (i > 0 && ft >= f_prev) {
            return zoom(&mut eval, f0, dg0, (t_prev, f_prev, dg_prev), (t, ft, dgt));
        }
        if dgt.abs() <= -C2 * dg0 {
            return Some((t, ft, gt));
        }
        if dgt >= 0.0 {
            return zoom(&mut eval, f0, dg0, (t, ft, dgt), (t_prev, f_prev, dg_prev));
        }
        t_prev = t;
        f_prev = ft;
        dg_prev = dgt;
        t *= 2.0;
    }
    None
}

type Probe = (f64, f64, f64);

fn zoom<E>(eval: &mut E, f0: f64, dg0: f64, mut lo: Probe, mut hi: Probe) -> Option<(f64, f64, Vec<f64>)>
where
    E: FnMut(f64) -> (f64, Vec<f64>, f64),
{
    for _ in 0..60 {
        let (a, b) = (lo.0, hi.0);
        // Quadratic interpolation from the low end, safeguarded to the middle.
        let width = b - a;
        let denom = 2.0 * (hi.1 - lo.1 - lo.2 * width);
        let mut t = if hi.1.is_finite() && denom > 0.0 { a - lo.2 * width * width / denom } else { a + 0.5 * width };
        let (left, right) = (a.min(b), a.max(b));
        let margin = 0.1 * (right - left);
        if !(t > left + margin && t < right - margin) {
            t = 0.5 * (a + b);
        }
        let (ft, gt, dgt) = eval(t);
        if !ft.is_finite() || ft > f0 + C1 * t * dg0 || ft >= lo.1 {
            hi = (t, ft, dgt);
        } else {
            if dgt.abs() <= -C2 * dg0 {
                return Some((t, ft, gt));
            }
            if dgt * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (t, ft, dgt);
        }
        if (hi.0 - lo.0).abs() < 1e-16 * lo.0.abs().max(1e-300) {
            break;
        }
    }
    // Accept a sufficient-decrease step even if curvature never settled.
    if lo.0 > 0.0 && lo.1 < f0 {
        let (v, g, _) = eval(lo.0);
        return Some((lo.0, v, g));
    }
    None
}
