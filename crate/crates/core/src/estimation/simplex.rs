//! Nelder–Mead simplex minimizer.

/// Options for [`minimize`].
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex along each coordinate.
    pub initial_step: f64,
    /// Stop once the spread of function values falls below this.
    pub f_tol: f64,
    /// and the largest vertex distance from the best point falls below this.
    pub x_tol: f64,
    pub max_evaluations: usize,
    /// Fresh simplices built around the incumbent after convergence.
    pub max_restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { initial_step: 0.5, f_tol: 1e-10, x_tol: 1e-9, max_evaluations: 20_000, max_restarts: 6 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        // NaN compares false everywhere; map it to +inf so the vertex is rejected
        if v.is_nan() { f64::INFINITY } else { v }
    }
}

/// Minimizes `f` starting from `x0`.
///
/// After each convergence the search restarts from the best vertex with a
/// simplex a quarter the size of the previous one; it stops when a restart
/// no longer improves the value by more than `f_tol`.
pub fn minimize(f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let mut counted = Counted { f, evaluations: 0 };
    let mut x = x0.to_vec();
    let mut value = counted.eval(&x);
    let mut step = opts.initial_step;
    let mut converged = false;

    for round in 0..=opts.max_restarts {
        let (bx, bv, ok) = run(&mut counted, &x, value, step, opts);
        let improvement = value - bv;
        let moved = bx.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = bx;
        value = bv;
        converged = ok;
        if !ok || counted.evaluations >= opts.max_evaluations {
            break;
        }
        if round > 0 && improvement.abs() <= opts.f_tol && moved <= opts.x_tol * 10.0 {
            break;
        }
        step = (step * 0.25).max(opts.x_tol * 100.0);
    }
    SimplexResult { x, value, evaluations: counted.evaluations, converged }
}

fn run<F: FnMut(&[f64]) -> f64>(
    f: &mut Counted<F>,
    x0: &[f64],
    f0: f64,
    step: f64,
    opts: &SimplexOptions,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        let fv = f.eval(&v);
        simplex.push((v, fv));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = if best.is_finite() && worst.is_finite() { worst - best } else { f64::INFINITY };
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && size <= opts.x_tol {
            return (simplex[0].0.clone(), best, true);
        }
        if f.evaluations >= opts.max_evaluations {
            return (simplex[0].0.clone(), best, false);
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(v, _)| v[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |coef: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + coef * (c - w)).collect()
        };

        let worst_x = simplex[n].0.clone();
        let xr = along(REFLECT, &worst_x);
        let fr = f.eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(EXPAND, &worst_x);
            let fe = f.eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        // contraction: outside if the reflection beat the worst point, inside otherwise
        let (xc, fc) = if fr < worst {
            let xc = along(CONTRACT, &worst_x);
            let fc = f.eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-CONTRACT, &worst_x);
            let fc = f.eval(&xc);
            (xc, fc)
        };
        if fc < worst.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best_x = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = best_x.iter().zip(&vertex.0).map(|(b, x)| b + SHRINK * (x - b)).collect();
            let fv = f.eval(&v);
            *vertex = (v, fv);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn finds_rosenbrock_minimum() {
        let res = minimize(rosenbrock, &[-1.2, 1.0], &SimplexOptions::default());
        assert!(res.converged);
        assert!((res.x[0] - 1.0).abs() < 1e-6, "{:?}", res.x);
        assert!((res.x[1] - 1.0).abs() < 1e-6, "{:?}", res.x);
    }

    #[test]
    fn quadratic_in_four_dimensions() {
        let target = [0.3, -1.0, 2.5, 0.0];
        let f = |x: &[f64]| x.iter().zip(&target).enumerate().map(|(i, (a, b))| (i + 1) as f64 * (a - b).powi(2)).sum();
        let res = minimize(f, &[0.0; 4], &SimplexOptions::default());
        for (a, b) in res.x.iter().zip(&target) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn infeasible_region_is_avoided() {
        // +inf outside x > 0
        let f = |x: &[f64]| if x[0] <= 0.0 { f64::INFINITY } else { (x[0] - 0.1).powi(2) };
        let res = minimize(f, &[2.0], &SimplexOptions::default());
        assert!((res.x[0] - 0.1).abs() < 1e-6);
    }

    #[test]
    fn evaluation_budget_is_respected() {
        let opts = SimplexOptions { max_evaluations: 50, ..Default::default() };
        let res = minimize(rosenbrock, &[-1.2, 1.0], &opts);
        assert!(!res.converged);
        assert!(res.evaluations <= 50 + 4);
    }
}
