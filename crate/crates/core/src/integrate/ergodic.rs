//! Time averages `(1/2T)∫_{-T}^{T} |Σ a_n e^{-iω_n t}| dt`.

use super::{IntegralEstimate, Method};
use crate::dirichlet::DirichletSpace;
use crate::math::{abs, cis, fabs, CompensatedSum};
use crate::quad::gk15;
use crate::{Complex64, Error, Result};
use core::f64::consts::PI;

/// A time average at `T` with the averages at `2T` and `4T` for judging
/// convergence. `estimate.stderr` is the largest deviation among the three.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErgodicEstimate {
    pub estimate: IntegralEstimate,
    pub horizons: [f64; 3],
    pub values: [f64; 3],
}

/// Time average of `|Σ_j a_j e^{-iω_j t}|` over `[-T, T]` by composite
/// Gauss–Kronrod panels of width at most `π/(4·max ω)`, with at least
/// `nodes` integrand evaluations on `[-T, T]`.
pub fn time_average(freqs: &[f64], coefs: &[Complex64], horizon: f64, nodes: usize) -> Result<ErgodicEstimate> {
    if freqs.len() != coefs.len() || freqs.is_empty() {
        return Err(Error::param("one coefficient per frequency, at least one term"));
    }
    if freqs.iter().any(|w| !w.is_finite()) {
        return Err(Error::Input("non-finite frequency value".into()));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::param("the horizon T must be positive"));
    }
    if nodes < 2 {
        return Err(Error::param("at least 2 nodes are needed"));
    }
    let w_max = freqs.iter().fold(0.0f64, |a, &w| a.max(fabs(w)));
    let by_width = if w_max > 0.0 { libm::ceil(horizon / (PI / (4.0 * w_max))) as u64 } else { 1 };
    let by_nodes = nodes.div_ceil(30) as u64;
    let k = by_width.max(by_nodes).max(1);
    let h = horizon / k as f64;
    let mut f = |t: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&w, &a) in freqs.iter().zip(coefs) {
            acc += a * cis(-w * t);
        }
        abs(acc)
    };
    // panels [lo + i·h, lo + (i+1)·h) for i in 0..count, mirrored to negative times
    let shell = |lo: f64, count: u64, f: &mut dyn FnMut(f64) -> f64| {
        let mut s = CompensatedSum::new();
        for i in 0..count {
            let a = lo + i as f64 * h;
            s.add(gk15(&mut |t| f(t), a, a + h).0);
            s.add(gk15(&mut |t| f(t), -a - h, -a).0);
        }
        s.value()
    };
    let s1 = shell(0.0, k, &mut f);
    let s2 = shell(horizon, k, &mut f);
    let s3 = shell(2.0 * horizon, 2 * k, &mut f);
    let values = [s1 / (2.0 * horizon), (s1 + s2) / (4.0 * horizon), (s1 + s2 + s3) / (8.0 * horizon)];
    let spread = fabs(values[0] - values[1]).max(fabs(values[0] - values[2]));
    Ok(ErgodicEstimate {
        estimate: IntegralEstimate {
            value: values[0],
            stderr: spread,
            samples: 8 * k * 15,
            method: Method::Quadrature,
            seed: 0,
        },
        horizons: [horizon, 2.0 * horizon, 4.0 * horizon],
        values,
    })
}

/// Time average of the space's polynomial (all-ones unless coefficients are
/// attached).
pub fn ergodic_l1(space: &DirichletSpace, horizon: f64, nodes: usize) -> Result<ErgodicEstimate> {
    let freqs = space.frequency_values()?;
    time_average(&freqs, &space.coefficient_vector(), horizon, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        let e = time_average(&[0.0], &[Complex64::new(1.0, 0.0)], 10.0, 2).unwrap();
        assert!((e.estimate.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_natural_frequencies() {
        let one = Complex64::new(1.0, 0.0);
        let e = time_average(&[0.0, 1.0], &[one, one], 1e4, 2).unwrap();
        assert!((e.estimate.value - 4.0 / PI).abs() < 1e-2);
        assert!(e.estimate.stderr < 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(time_average(&[f64::NAN], &[one], 1.0, 2), Err(Error::Input(_))));
        assert!(time_average(&[1.0], &[one], 0.0, 2).is_err());
    }
}
