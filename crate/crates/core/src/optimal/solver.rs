//! Minimization engine for the single-erasure measure over the dual space.
//!
//! The objective in the affine coordinates c of the dual parameterization,
//!
//!   phi(c) = max_i q_i (lambda |<f_i, g_i(c)>| + (1-lambda) ||f_i|| ||g_i(c)||),
//!
//! is a max of sums of Euclidean norms of affine maps, hence convex. The
//! solver runs two phases: plain subgradient descent (diminishing or fixed
//! steps, best-iterate tracking), then a smoothing Newton refinement that
//! drives the value to near machine precision. Both phases are
//! deterministic, so runs are bit-identical for identical inputs.

use crate::erasure::WeightSequence;
use crate::frame::{DualParameterization, Frame};
use crate::numerics::{Complex64, Vector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) struct Objective {
    /// q_i * lambda
    w: Vec<f64>,
    /// q_i * (1 - lambda) * ||f_i||
    z: Vec<f64>,
    /// <f_i, g0_i>
    a0: Vec<Complex64>,
    /// b[i][k] = <f_i, column i of U^(k)>
    b: Vec<Vec<Complex64>>,
    /// canonical dual vectors
    g0: Vec<Vector>,
    /// ucols[i][k] = column i of U^(k)
    ucols: Vec<Vec<Vector>>,
    /// real dimension of the parameter space (2 complex-K)
    dim: usize,
    /// Gram blocks of the affine derivative maps, per index: pa for the
    /// inner-product part, pv for the norm part (row-major dim x dim).
    pa: Vec<Vec<f64>>,
    pv: Vec<Vec<f64>>,
}

impl Objective {
    pub(crate) fn new(
        frame: &Frame,
        weights: &WeightSequence,
        lambda: f64,
        param: &DualParameterization,
    ) -> Objective {
        let n_vec = frame.len();
        let k = param.dimension();
        let dim = 2 * k;
        let mut w = Vec::with_capacity(n_vec);
        let mut z = Vec::with_capacity(n_vec);
        let mut a0 = Vec::with_capacity(n_vec);
        let mut b: Vec<Vec<Complex64>> = Vec::with_capacity(n_vec);
        let mut g0 = Vec::with_capacity(n_vec);
        let mut ucols: Vec<Vec<Vector>> = Vec::with_capacity(n_vec);
        for i in 0..n_vec {
            let f = frame.vector(i);
            let g = param.canonical.vector(i).clone();
            w.push(weights.get(i) * lambda);
            z.push(weights.get(i) * (1.0 - lambda) * f.norm());
            a0.push(f.inner(&g));
            let cols: Vec<Vector> = param.basis.iter().map(|u| u.column(i)).collect();
            b.push(cols.iter().map(|u| f.inner(u)).collect());
            g0.push(g);
            ucols.push(cols);
        }

        // Real derivative Gram blocks. The complex derivative of a_i along
        // real coordinate 2k is b_ik, along 2k+1 it is -i b_ik (a_i is
        // conjugate-linear in c); v_i is linear, with derivatives u and i u.
        let mut pa = Vec::with_capacity(n_vec);
        let mut pv = Vec::with_capacity(n_vec);
        for i in 0..n_vec {
            let da: Vec<Complex64> = (0..dim)
                .map(|t| {
                    let bk = b[i][t / 2];
                    if t % 2 == 0 {
                        bk
                    } else {
                        Complex64::new(bk.im, -bk.re)
                    }
                })
                .collect();
            let mut pai = vec![0.0; dim * dim];
            for s in 0..dim {
                for t in 0..dim {
                    pai[s * dim + t] = (da[s].conj() * da[t]).re;
                }
            }
            pa.push(pai);

            let mut pvi = vec![0.0; dim * dim];
            // <dv_s, dv_t> depends only on the complex Gram of the columns,
            // h = sum_j conj(u_s[j]) u_t[j]: multiplying a slot by i moves
            // the entry between Re(h) and +/- Im(h).
            let kdim = b[i].len();
            for ks in 0..kdim {
                for kt in 0..kdim {
                    let h = ucols[i][kt].inner(&ucols[i][ks]);
                    pvi[(2 * ks) * dim + 2 * kt] = h.re;
                    pvi[(2 * ks) * dim + 2 * kt + 1] = -h.im;
                    pvi[(2 * ks + 1) * dim + 2 * kt] = h.im;
                    pvi[(2 * ks + 1) * dim + 2 * kt + 1] = h.re;
                }
            }
            pv.push(pvi);
        }

        Objective {
            w,
            z,
            a0,
            b,
            g0,
            ucols,
            dim,
            pa,
            pv,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn terms(&self) -> usize {
        self.w.len()
    }

    fn affine(&self, i: usize, x: &[f64]) -> (Complex64, Vector) {
        let mut a = self.a0[i];
        let mut v = self.g0[i].clone();
        for (k, u) in self.ucols[i].iter().enumerate() {
            let c = Complex64::new(x[2 * k], x[2 * k + 1]);
            a += c.conj() * self.b[i][k];
            v = v.add_scaled(c, u);
        }
        (a, v)
    }

    fn term_value(&self, i: usize, x: &[f64]) -> f64 {
        let (a, v) = self.affine(i, x);
        self.w[i] * a.norm() + self.z[i] * v.norm()
    }

    /// Objective value and the lexicographically smallest achieving index.
    pub(crate) fn eval(&self, x: &[f64]) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for i in 0..self.terms() {
            let v = self.term_value(i, x);
            if v > best {
                best = v;
                arg = i;
            }
        }
        (best, arg)
    }

    /// True when the given term cannot vary over the dual space, i.e. all
    /// its homogeneous columns are exactly zero. If such a term achieves
    /// the maximum, the current point is a global minimizer.
    pub(crate) fn term_is_constant(&self, i: usize) -> bool {
        self.ucols[i].iter().all(|u| u.norm_sq() == 0.0)
    }

    /// A subgradient of the max, taken from the achieving term of smallest
    /// index. Returns (value, achieving index, gradient).
    pub(crate) fn subgradient(&self, x: &[f64]) -> (f64, usize, Vec<f64>) {
        let (value, i) = self.eval(x);
        let (a, v) = self.affine(i, x);
        let mut grad = vec![0.0; self.dim];
        let an = a.norm();
        let vn = v.norm();
        for k in 0..self.b[i].len() {
            let bk = self.b[i][k];
            let uk = &self.ucols[i][k];
            // d a / dx_{2k} = b_k, d a / dx_{2k+1} = -i b_k
            // d v / dx_{2k} = u_k, d v / dx_{2k+1} = i u_k
            let mut dvdot = ZERO; // sum_j conj(v_j) u_j
            for (vj, uj) in v.entries().iter().zip(uk.entries()) {
                dvdot += vj.conj() * uj;
            }
            let mut g_even = 0.0;
            let mut g_odd = 0.0;
            if an > 0.0 && self.w[i] != 0.0 {
                let ac = a.conj();
                g_even += self.w[i] * (ac * bk).re / an;
                g_odd += self.w[i] * (ac * Complex64::new(bk.im, -bk.re)).re / an;
            }
            if vn > 0.0 && self.z[i] != 0.0 {
                g_even += self.z[i] * dvdot.re / vn;
                g_odd += self.z[i] * (Complex64::new(0.0, 1.0) * dvdot).re / vn;
            }
            grad[2 * k] = g_even;
            grad[2 * k + 1] = g_odd;
        }
        (value, i, grad)
    }

    /// Value, gradient and Hessian of the smoothed objective
    /// mu log sum_i exp(psi_i / mu), where psi_i replaces each norm by
    /// sqrt(norm^2 + mu^2).
    fn smoothed(&self, x: &[f64], mu: f64) -> (f64, Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let n = self.terms();
        let mut psi = Vec::with_capacity(n);
        let mut grads: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut curems: Vec<(f64, f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(n);
        for i in 0..n {
            let (a, v) = self.affine(i, x);
            let na = (a.norm_sqr() + mu * mu).sqrt();
            let nv = (v.norm_sq() + mu * mu).sqrt();
            psi.push(self.w[i] * na + self.z[i] * nv);

            // ga[t] = Re(conj(da_t) a); gv[t] = Re(sum conj(v_j) dv_t[j]).
            let mut ga = vec![0.0; d];
            let mut gv = vec![0.0; d];
            for k in 0..self.b[i].len() {
                let bk = self.b[i][k];
                let ac = a.conj();
                ga[2 * k] = (ac * bk).re;
                ga[2 * k + 1] = (ac * Complex64::new(bk.im, -bk.re)).re;
                let mut dvdot = ZERO;
                for (vj, uj) in v.entries().iter().zip(self.ucols[i][k].entries()) {
                    dvdot += vj.conj() * uj;
                }
                gv[2 * k] = dvdot.re;
                gv[2 * k + 1] = -dvdot.im;
            }
            let mut grad_i = vec![0.0; d];
            for t in 0..d {
                grad_i[t] = self.w[i] * ga[t] / na + self.z[i] * gv[t] / nv;
            }
            grads.push(grad_i);
            curems.push((na, nv, ga, gv));
        }

        // Shifted softmax weights.
        let m = psi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = psi.iter().map(|&p| ((p - m) / mu).exp()).collect();
        let total: f64 = exps.iter().sum();
        let pis: Vec<f64> = exps.iter().map(|&e| e / total).collect();
        let value = m + mu * total.ln();

        let mut grad = vec![0.0; d];
        for i in 0..n {
            for t in 0..d {
                grad[t] += pis[i] * grads[i][t];
            }
        }

        let mut hess = vec![0.0; d * d];
        for i in 0..n {
            let pi = pis[i];
            if pi == 0.0 {
                continue;
            }
            let (na, nv, ga, gv) = &curems[i];
            let ca = pi * self.w[i] / na;
            let cv = pi * self.z[i] / nv;
            for s in 0..d {
                for t in 0..d {
                    let mut h = 0.0;
                    if self.w[i] != 0.0 {
                        h += ca * (self.pa[i][s * d + t] - ga[s] * ga[t] / (na * na));
                    }
                    if self.z[i] != 0.0 {
                        h += cv * (self.pv[i][s * d + t] - gv[s] * gv[t] / (nv * nv));
                    }
                    // Softmax curvature: (1/mu)(sum pi g g^T - gbar gbar^T),
                    // accumulated via sum pi (g_i - gbar)(g_i)^T below.
                    hess[s * d + t] += h + pi * (grads[i][s] - grad[s]) * grads[i][t] / mu;
                }
            }
        }
        (value, grad, hess)
    }
}

/// Dense Cholesky solve of (H + delta I) p = -g with escalating damping.
fn solve_damped(hess: &[f64], grad: &[f64], dim: usize) -> Option<Vec<f64>> {
    let mut mean_diag = 0.0;
    for s in 0..dim {
        mean_diag += hess[s * dim + s].abs();
    }
    mean_diag = (mean_diag / dim as f64).max(f64::MIN_POSITIVE);
    let mut delta = 1e-13 * mean_diag;
    for _ in 0..20 {
        if let Some(p) = cholesky_solve(hess, grad, dim, delta) {
            return Some(p);
        }
        delta *= 100.0;
    }
    None
}

fn cholesky_solve(hess: &[f64], grad: &[f64], dim: usize, delta: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = hess[i * dim + j];
            if i == j {
                sum += delta;
            }
            for k in 0..j {
                sum -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i * dim + i] = sum.sqrt();
            } else {
                l[i * dim + j] = sum / l[j * dim + j];
            }
        }
    }
    // Solve L y = -g, then L^T p = y.
    let mut y = vec![0.0; dim];
    for i in 0..dim {
        let mut sum = -grad[i];
        for k in 0..i {
            sum -= l[i * dim + k] * y[k];
        }
        y[i] = sum / l[i * dim + i];
    }
    let mut p = vec![0.0; dim];
    for i in (0..dim).rev() {
        let mut sum = y[i];
        for k in (i + 1)..dim {
            sum -= l[k * dim + i] * p[k];
        }
        p[i] = sum / l[i * dim + i];
    }
    Some(p)
}

pub(crate) struct Minimizer<'a> {
    pub objective: &'a Objective,
    pub best_x: Vec<f64>,
    pub best_value: f64,
    pub trace: Vec<f64>,
}

impl<'a> Minimizer<'a> {
    pub(crate) fn new(objective: &'a Objective, x0: Vec<f64>) -> Minimizer<'a> {
        let (v0, _) = objective.eval(&x0);
        Minimizer {
            objective,
            best_x: x0,
            best_value: v0,
            trace: vec![v0],
        }
    }

    fn consider(&mut self, x: &[f64]) {
        let (v, _) = self.objective.eval(x);
        if v < self.best_value {
            self.best_value = v;
            self.best_x = x.to_vec();
        }
        self.trace.push(self.best_value);
    }

    /// Plain subgradient descent with best-iterate tracking. `step(k)` maps
    /// the 1-based iteration number to a step size.
    pub(crate) fn subgradient_descent<F: Fn(usize) -> f64>(&mut self, iterations: usize, step: F) {
        let mut x = self.best_x.clone();
        for k in 1..=iterations {
            let (_, _, grad) = self.objective.subgradient(&x);
            let norm_sq: f64 = grad.iter().map(|g| g * g).sum();
            if norm_sq == 0.0 {
                // Zero subgradient of the max certifies global optimality.
                break;
            }
            let alpha = step(k);
            for (xi, gi) in x.iter_mut().zip(&grad) {
                *xi -= alpha * gi;
            }
            self.consider(&x);
        }
    }

    /// Smoothing Newton refinement with mu-continuation, warm-started at
    /// the incumbent. Keeps the best true objective value seen.
    pub(crate) fn newton_refine(&mut self) {
        let d = self.objective.dim();
        if d == 0 {
            return;
        }
        let scale = 1.0 + self.best_value.abs();
        let mut mu = 1e-2 * scale;
        let mu_floor = 1e-13 * scale;
        let mut x = self.best_x.clone();
        while mu > mu_floor {
            for _ in 0..40 {
                let (fmu, grad, hess) = self.objective.smoothed(&x, mu);
                let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if gnorm <= 1e-13 * scale {
                    break;
                }
                let Some(p) = solve_damped(&hess, &grad, d) else {
                    break;
                };
                let slope: f64 = grad.iter().zip(&p).map(|(g, pi)| g * pi).sum();
                if slope >= 0.0 {
                    break;
                }
                let mut t = 1.0;
                let mut accepted = false;
                for _ in 0..50 {
                    let xt: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + t * pi).collect();
                    let (ft, _, _) = self.objective.smoothed(&xt, mu);
                    if ft <= fmu + 1e-4 * t * slope {
                        x = xt;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
                if !accepted {
                    break;
                }
                self.consider(&x);
            }
            mu *= 0.1;
        }
    }
}
