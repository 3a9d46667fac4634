//! Composite Simpson rules on uniform grids and adaptive Gauss–Kronrod.

use crate::linalg::{C64, ZERO};

/// Composite Simpson weights for `n_intervals` (even) uniform intervals of width `h`.
pub fn simpson_weights(n_intervals: usize, h: f64) -> Vec<f64> {
    assert!(n_intervals >= 2 && n_intervals % 2 == 0, "Simpson needs an even number of intervals");
    let mut w = vec![0.0; n_intervals + 1];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = if i == 0 || i == n_intervals {
            h / 3.0
        } else if i % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        };
    }
    w
}

/// Running integral `F_i = ∫_{x_0}^{x_i} f` on a uniform grid.
///
/// Even nodes accumulate Simpson panels; odd nodes add a four-point cubic
/// rule for the single interval to the preceding even node, so the final
/// value equals the composite Simpson integral.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len() - 1;
    assert!(n >= 2 && n % 2 == 0, "Simpson needs an even number of intervals");
    let mut out = vec![0.0; n + 1];
    let mut acc = 0.0;
    for j in (0..n).step_by(2) {
        out[j] = acc;
        out[j + 1] = acc
            + if j + 3 <= n {
                h * (9.0 * f[j] + 19.0 * f[j + 1] - 5.0 * f[j + 2] + f[j + 3]) / 24.0
            } else {
                h * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2]) / 24.0
            };
        acc += h * (f[j] + 4.0 * f[j + 1] + f[j + 2]) / 3.0;
    }
    out[n] = acc;
    out
}

pub fn simpson_complex(f: &[C64], weights: &[f64]) -> C64 {
    f.iter().zip(weights).fold(ZERO, |acc, (v, w)| acc + v * *w)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(mid);
    let mut kronrod = fc * K15_WEIGHTS[7];
    let mut gauss = fc * G7_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += K15_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// Intervals are bisected until the Kronrod–Gauss difference is below the
/// share of `tol` proportional to their length.
pub fn adaptive_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (val, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 {
            return val;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth + 1) + recurse(f, m, b, 0.5 * tol, depth + 1)
    }
    recurse(&f, a, b, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let n = 10;
        let h = 1.0 / n as f64;
        let f: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
        let cum = cumulative_simpson(&f, h);
        assert!((cum[n] - 0.25).abs() < 1e-15);
        let w = simpson_weights(n, h);
        let s: f64 = f.iter().zip(&w).map(|(a, b)| a * b).sum();
        assert!((s - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cumulative_odd_nodes_are_exact_for_cubics() {
        let n = 8;
        let h = 1.0 / n as f64;
        let f: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
        let cum = cumulative_simpson(&f, h);
        for (i, v) in cum.iter().enumerate() {
            let x = i as f64 * h;
            assert!((v - x.powi(4) / 4.0).abs() < 1e-15, "node {i}");
        }
    }

    #[test]
    fn gauss_kronrod_matches_closed_forms() {
        let v = adaptive_gk(|x| 1.0 / (1.0 + x), 0.0, 1.0, 1e-13);
        assert!((v - std::f64::consts::LN_2).abs() < 1e-13);
        let v = adaptive_gk(|x| (-2.0 * x).exp(), 0.0, 1.0, 1e-13);
        assert!((v - (1.0 - (-2.0f64).exp()) / 2.0).abs() < 1e-13);
        let v = adaptive_gk(|x| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }
}
