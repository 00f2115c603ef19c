//! Derivative-free local minimization (Nelder–Mead simplex).

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from the axis-aligned simplex of edge `step` at
/// `start`. Stops once every vertex is within `xtol` (max-norm) of the best
/// one, or after `max_evals` evaluations. NaN values count as `+∞`.
pub fn nelder_mead<F>(f: F, start: &[f64], step: f64, xtol: f64, max_evals: usize) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
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
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut evaluations = dim + 1;
    let mut converged = false;

    while evaluations < max_evals {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread =
            simplex[1..].iter().flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        if spread <= xtol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> =
            (0..dim).map(|k| simplex[..dim].iter().map(|v| v[k]).sum::<f64>() / dim as f64).collect();
        let toward =
            |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[dim]).map(|(c, w)| c + t * (w - c)).collect() };

        let reflected = toward(-1.0);
        let fr = eval(&reflected);
        evaluations += 1;
        if fr < values[0] {
            let expanded = toward(-2.0);
            let fe = eval(&expanded);
            evaluations += 1;
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[dim] {
            let c = toward(-0.5);
            let v = eval(&c);
            (c, v)
        } else {
            let c = toward(0.5);
            let v = eval(&c);
            (c, v)
        };
        evaluations += 1;
        if fc < values[dim].min(fr) {
            simplex[dim] = contracted;
            values[dim] = fc;
            continue;
        }
        // Shrink toward the best vertex.
        let best = simplex[0].clone();
        for i in 1..=dim {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            values[i] = eval(&simplex[i]);
        }
        evaluations += dim;
    }

    let best = (0..=dim).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    NelderMeadResult { x: simplex[best].clone(), value: values[best], evaluations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_quadratic() {
        let r = nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], 0.5, 1e-10, 10_000);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] + 2.0).abs() < 1e-8, "{:?}", r.x);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = nelder_mead(rosen, &[-1.2, 1.0], 0.1, 1e-10, 20_000);
        assert!(r.value < 1e-14, "{}", r.value);
    }

    #[test]
    fn one_dimensional_and_budget() {
        let r = nelder_mead(|x| (x[0] - 0.25).abs(), &[3.0], 1.0, 1e-12, 10_000);
        assert!((r.x[0] - 0.25).abs() < 1e-11);
        let r = nelder_mead(|x| x[0] * x[0], &[3.0], 1.0, 0.0, 20);
        assert!(!r.converged && r.evaluations >= 20);
    }
}
