//! Central finite-difference verification of analytic gradients.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Checks every coordinate of `params` against a central difference of
/// `loss` and returns the max relative error
/// `|analytic - numeric| / max(1, |analytic|)`.
///
/// `loss` must be a pure function of the flat parameter vector.
pub fn finite_diff_check<F>(params: &mut [f64], analytic: &[f64], h: f64, loss: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let all: Vec<usize> = (0..params.len()).collect();
    finite_diff_check_coords(params, analytic, h, loss, &all)
}

/// Like [`finite_diff_check`] but over `max_coords` randomly sampled
/// coordinates; used for models too large to sweep exhaustively.
pub fn finite_diff_check_sampled<F>(
    params: &mut [f64],
    analytic: &[f64],
    h: f64,
    loss: F,
    max_coords: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    if params.len() <= max_coords {
        return finite_diff_check(params, analytic, h, loss);
    }
    let mut coords: Vec<usize> = sample(rng, params.len(), max_coords).into_vec();
    coords.sort_unstable();
    finite_diff_check_coords(params, analytic, h, loss, &coords)
}

fn finite_diff_check_coords<F>(
    params: &mut [f64],
    analytic: &[f64],
    h: f64,
    mut loss: F,
    coords: &[usize],
) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    if params.len() != analytic.len() {
        return Err(Error::shape(format!(
            "{} parameters but {} analytic gradient entries",
            params.len(),
            analytic.len()
        )));
    }
    let mut max_err: f64 = 0.0;
    for &i in coords {
        let orig = params[i];
        params[i] = orig + h;
        let plus = loss(params);
        params[i] = orig - h;
        let minus = loss(params);
        params[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFinite(format!(
                "loss not finite when perturbing coordinate {i}"
            )));
        }
        let numeric = (plus - minus) / (2.0 * h);
        let err = (analytic[i] - numeric).abs() / analytic[i].abs().max(1.0);
        if err > max_err {
            max_err = err;
        }
    }
    Ok(max_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratic() {
        // loss = 0.5 * ||p||^2, gradient = p.
        let mut p = vec![0.3, -1.2, 4.0];
        let analytic = p.clone();
        let err = finite_diff_check(&mut p, &analytic, 1e-5, |q| {
            0.5 * q.iter().map(|x| x * x).sum::<f64>()
        })
        .unwrap();
        assert!(err < 1e-9, "err = {err}");
    }

    #[test]
    fn constant_loss_needs_zero_gradient() {
        let mut p = vec![1.0, 2.0];
        let err = finite_diff_check(&mut p, &[0.0, 0.0], 1e-5, |_| 3.5).unwrap();
        assert!(err < 1e-9);
    }

    #[test]
    fn non_finite_loss_reports_coordinate() {
        let mut p = vec![1.0];
        let res = finite_diff_check(&mut p, &[0.0], 1e-5, |q| (q[0] - 1.0).ln());
        match res {
            Err(Error::NonFinite(msg)) => assert!(msg.contains("coordinate 0")),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn wrong_gradient_is_caught() {
        let mut p = vec![2.0];
        let err = finite_diff_check(&mut p, &[1.0], 1e-5, |q| q[0] * q[0]).unwrap();
        assert!(err > 1.0, "err = {err}"); // true gradient is 4
    }
}
