//! Nelder-Mead simplex search with dimension-adaptive coefficients.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct NelderMead<T> {
    pub max_iters: usize,
    /// Stop once `max f - min f` over the simplex falls below this.
    pub tol: T,
    /// Edge length of the initial axis-aligned simplex.
    pub scale: T,
}

#[derive(Debug, Clone)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Real> NelderMead<T> {
    /// Minimizes `f` from `x0`. Non-finite values are treated as `+inf`.
    pub fn minimize(&self, mut f: impl FnMut(&[T]) -> T, x0: &[T]) -> Minimum<T> {
        let n = x0.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[T]| {
            evaluations += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                T::infinity()
            }
        };
        let nf = T::c(n.max(1) as f64);
        let two = T::c(2.0);
        let reflect = T::one();
        let expand = T::one() + two / nf;
        let contract = T::c(0.75) - T::one() / (two * nf);
        let shrink = T::one() - T::one() / nf;

        let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
        let v0 = eval(x0);
        simplex.push((x0.to_vec(), v0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] = x[i] + self.scale;
            let v = eval(&x);
            simplex.push((x, v));
        }

        let mut iterations = 0;
        let mut converged = false;
        loop {
            // stable sort keeps the older vertex first on ties
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite or inf"));
            let spread = simplex[n].1 - simplex[0].1;
            if n == 0 || spread < self.tol {
                converged = true;
                break;
            }
            if iterations >= self.max_iters {
                break;
            }
            iterations += 1;

            let mut centroid = vec![T::zero(); n];
            for (x, _) in &simplex[..n] {
                for (c, &xi) in centroid.iter_mut().zip(x) {
                    *c = *c + xi;
                }
            }
            centroid.iter_mut().for_each(|c| *c = *c / nf);
            let worst = simplex[n].0.clone();
            let along = |t: T| -> Vec<T> {
                centroid.iter().zip(&worst).map(|(&c, &w)| c + t * (c - w)).collect()
            };

            let xr = along(reflect);
            let fr = eval(&xr);
            let (best, second_worst, worst_v) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);
            if fr < best {
                let xe = along(reflect * expand);
                let fe = eval(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < second_worst {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst_v {
                let xc = along(reflect * contract);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-contract);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(worst_v) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, &bi) in x.iter_mut().zip(&x_best) {
                    *xi = bi + shrink * (*xi - bi);
                }
                *v = eval(x);
            }
        }
        let (x, value) = simplex.swap_remove(0);
        Minimum { x, value, iterations, evaluations, converged }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let nm = NelderMead::<f64> { max_iters: 5000, tol: 1e-14, scale: 0.5 };
        let m = nm.minimize(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5, &[0.0, 0.0]);
        assert!(m.converged);
        assert!((m.value - 0.5).abs() < 1e-12);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn rosenbrock() {
        let nm = NelderMead::<f64> { max_iters: 20000, tol: 1e-16, scale: 0.5 };
        let m = nm.minimize(|x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2), &[-1.2, 1.0]);
        assert!(m.value < 1e-10, "{}", m.value);
    }

    #[test]
    fn higher_dimension_and_f32() {
        let nm = NelderMead::<f64> { max_iters: 20000, tol: 1e-12, scale: 1.0 };
        let m = nm.minimize(|x| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * v * v).sum(), &[1.0; 10]);
        assert!(m.value < 1e-8);
        let nm = NelderMead { max_iters: 2000, tol: 1e-6f32, scale: 0.5f32 };
        let m = nm.minimize(|x| x[0] * x[0] + x[1].abs(), &[1.0f32, 1.0]);
        assert!(m.value < 1e-3);
    }

    #[test]
    fn budget_exhaustion_reports_not_converged() {
        let nm = NelderMead::<f64> { max_iters: 3, tol: 1e-15, scale: 0.5 };
        let m = nm.minimize(|x| x[0] * x[0], &[5.0]);
        assert!(!m.converged);
        assert_eq!(m.iterations, 3);
    }

    #[test]
    fn nan_is_avoided() {
        let nm = NelderMead::<f64> { max_iters: 500, tol: 1e-12, scale: 0.5 };
        let m = nm.minimize(|x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.3).powi(2) }, &[1.0]);
        assert!((m.x[0] - 0.3).abs() < 1e-4);
    }
}
