//! Adaptive Gauss–Kronrod (G7/K15) quadrature on finite intervals.

use crate::math::{fabs, pow, CompensatedSum};
use alloc::vec::Vec;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod abscissae on `[-1, 1]` in ascending order with their weights.
pub fn kronrod_nodes() -> impl Iterator<Item = (f64, f64)> {
    (0..15).map(|i| {
        if i < 7 {
            (-XGK[i], WGK[i])
        } else {
            (XGK[14 - i], WGK[14 - i])
        }
    })
}

/// Result of a quadrature: the value and an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_err: f64,
    pub evals: usize,
}

/// QUADPACK's error rescaling for a single G7/K15 panel.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = fabs(err);
    if res_asc != 0.0 && e != 0.0 {
        let scale = pow(200.0 * e / res_asc, 1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > e {
            e = min_err;
        }
    }
    e
}

/// One G7/K15 panel on `[a, b]`: `(value, error estimate)`.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fabs(res_k);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (fabs(f1) + fabs(f2));
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * fabs(fc - mean);
    for j in 0..7 {
        res_asc += WGK[j] * (fabs(fv1[j] - mean) + fabs(fv2[j] - mean));
    }
    let ah = fabs(half);
    let err = rescale_error((res_k - res_g) * half, res_abs * ah, res_asc * ah);
    (res_k * half, err)
}

/// Kronrod abscissae mapped to `[0, 1]`, ascending, with Kronrod weights and
/// Gauss weights (zero at the Kronrod-only nodes), all scaled to unit width.
#[derive(Clone, Copy, Debug)]
pub struct UnitRule {
    pub x: [f64; 15],
    pub wk: [f64; 15],
    pub wg: [f64; 15],
}

pub fn unit_rule() -> UnitRule {
    let mut r = UnitRule { x: [0.0; 15], wk: [0.0; 15], wg: [0.0; 15] };
    for i in 0..15 {
        let j = if i < 7 { i } else { 14 - i };
        let sign = if i < 7 { -1.0 } else { 1.0 };
        r.x[i] = 0.5 * (1.0 + sign * XGK[j]);
        r.wk[i] = 0.5 * WGK[j];
        if j % 2 == 1 {
            r.wg[i] = 0.5 * WG[j / 2];
        }
    }
    r
}

/// The G7/K15 panel result from integrand values at `a + width·rule.x[i]`.
pub fn gk15_values(rule: &UnitRule, fv: &[f64; 15], width: f64) -> (f64, f64) {
    let mut res_k = 0.0;
    let mut res_g = 0.0;
    let mut res_abs = 0.0;
    for i in 0..15 {
        res_k += rule.wk[i] * fv[i];
        res_g += rule.wg[i] * fv[i];
        res_abs += rule.wk[i] * fabs(fv[i]);
    }
    let mut res_asc = 0.0;
    for i in 0..15 {
        res_asc += rule.wk[i] * fabs(fv[i] - res_k);
    }
    let w = fabs(width);
    let err = rescale_error((res_k - res_g) * width, res_abs * w, res_asc * w);
    (res_k * width, err)
}

// error estimates below this multiple of eps·|value| cannot be improved
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

/// Adaptive bisection on `[a, b]` until each panel's error estimate is below
/// its share of `abs_tol` or at the rounding level of the panel value, or
/// `max_depth` halvings have been spent.
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> Quadrature {
    let mut total = CompensatedSum::new();
    let mut err = 0.0;
    let mut evals = 0;
    let width = b - a;
    let mut stack: Vec<(f64, f64, u32)> = Vec::new();
    stack.push((a, b, 0));
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(f, lo, hi);
        evals += 15;
        let share = if width != 0.0 { abs_tol * fabs((hi - lo) / width) } else { abs_tol };
        if e <= share || e <= ROUNDOFF * fabs(v) || depth >= max_depth {
            total.add(v);
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Quadrature { value: total.value(), abs_err: err, evals }
}

/// Adaptive integration over consecutive breakpoints `pts[0] < pts[1] < …`,
/// the tolerance split evenly per interval.
pub fn adaptive_breakpoints<F: FnMut(f64) -> f64>(f: &mut F, pts: &[f64], abs_tol: f64, max_depth: u32) -> Quadrature {
    let mut total = CompensatedSum::new();
    let mut err = 0.0;
    let mut evals = 0;
    let n = pts.len().saturating_sub(1).max(1) as f64;
    for w in pts.windows(2) {
        let q = adaptive(f, w[0], w[1], abs_tol / n, max_depth);
        total.add(q.value);
        err += q.abs_err;
        evals += q.evals;
    }
    Quadrature { value: total.value(), abs_err: err, evals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{exp, sin, sqrt};

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = gk15(&mut |x: f64| x * x * x * x - 3.0 * x + 1.0, 0.0, 2.0);
        assert!((v - (32.0 / 5.0 - 6.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kink() {
        let q = adaptive(&mut |x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 50);
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-11, "{q:?}");
    }

    #[test]
    fn smooth_integrals() {
        let q = adaptive(&mut |x: f64| exp(-x * x), 0.0, 6.0, 1e-13, 30);
        assert!((q.value - 0.5 * sqrt(core::f64::consts::PI)).abs() < 1e-12);
        let q = adaptive_breakpoints(&mut |x: f64| sin(x), &[0.0, 1.0, 2.0, core::f64::consts::PI], 1e-13, 30);
        assert!((q.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn value_form_matches_closure_form() {
        let rule = unit_rule();
        let f = |x: f64| exp(x) * sin(3.0 * x);
        let (a, b) = (0.25, 1.75);
        let mut fv = [0.0; 15];
        for i in 0..15 {
            fv[i] = f(a + (b - a) * rule.x[i]);
        }
        let (v1, e1) = gk15_values(&rule, &fv, b - a);
        let (v2, e2) = gk15(&mut { f }, a, b);
        assert!((v1 - v2).abs() < 1e-14);
        assert!((e1 - e2).abs() <= 1e-3 * e2.max(1e-300) + 1e-20);
    }

    #[test]
    fn nodes_sum_to_two() {
        let s: f64 = kronrod_nodes().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
        let xs: Vec<f64> = kronrod_nodes().map(|(x, _)| x).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }
}
