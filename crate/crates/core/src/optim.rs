//! Derivative-free minimization by the Nelder–Mead simplex method.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadSettings {
    /// Stop when the simplex spread in objective value falls below
    /// `rel_tol * (|f_best| + |f_worst|) / 2 + abs_tol`.
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Also require every vertex within `x_tol * (1 + |x|)` of the best one.
    pub x_tol: f64,
    pub max_iter: usize,
    /// Initial simplex edge length per coordinate.
    pub initial_step: f64,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            x_tol: 1e-7,
            max_iter: 500,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimize `f` from `start`. Non-finite objective values are treated as `+inf`.
///
/// Returns [`Error::NonConvergence`] carrying the best vertex when the
/// iteration budget runs out.
pub fn nelder_mead<F>(f: F, start: &[f64], settings: &NelderMeadSettings) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    if dim == 0 {
        return Err(Error::Domain("cannot optimize over zero parameters".into()));
    }
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        let h = if v[i] != 0.0 {
            settings.initial_step * v[i].abs().max(1.0)
        } else {
            settings.initial_step
        };
        v[i] += h;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    for iter in 0..settings.max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let worst = values[dim];
        let f_close = (worst - best).abs()
            <= settings.rel_tol * 0.5 * (best.abs() + worst.abs()) + settings.abs_tol;
        let x_close = simplex[1..].iter().all(|v| {
            v.iter()
                .zip(&simplex[0])
                .all(|(a, b)| (a - b).abs() <= settings.x_tol * (1.0 + b.abs()))
        });
        if best.is_finite() && f_close && x_close {
            return Ok(Minimum {
                x: simplex[0].clone(),
                value: best,
                iterations: iter,
            });
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[dim] = xe;
                values[dim] = fe;
            } else {
                simplex[dim] = xr;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = xr;
            values[dim] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[dim] {
            let xc = along(rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[dim].min(fr) {
            simplex[dim] = xc;
            values[dim] = fc;
            continue;
        }
        // shrink toward the best vertex
        let b = simplex[0].clone();
        for i in 1..=dim {
            simplex[i] = simplex[i]
                .iter()
                .zip(&b)
                .map(|(x, bx)| bx + sigma * (x - bx))
                .collect();
            values[i] = eval(&simplex[i]);
        }
    }

    let (ib, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty simplex");
    Err(Error::NonConvergence {
        iterations: settings.max_iter,
        best: simplex[ib].clone(),
        best_value: values[ib],
    })
}
