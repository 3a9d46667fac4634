//! Dormand–Prince 5(4) integrator with continuous (dense) output, for
//! complex-valued linear systems on a bounded interval.

use crate::error::{HypspecError, Result};
use crate::linalg::{C64, ZERO};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut acc = ZERO;
        for (coef, k) in terms {
            acc += k[i] * *coef;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Integrates `y' = f(x, y)` from `x = 0` with `y(0) = y0` up to the last
/// entry of `samples` (sorted, starting at 0) and returns `y` at every sample
/// point, evaluated through the dense output of the accepted steps.
/// Steps end exactly on each of `breakpoints`, where the integration restarts.
pub fn integrate_dense<F>(
    mut f: F,
    y0: &[C64],
    samples: &[f64],
    breakpoints: &[f64],
    tol: Tolerances,
) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let dim = y0.len();
    let x_end = *samples.last().expect("at least one sample");
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(samples.len());
    let mut next_sample = 0;
    while next_sample < samples.len() && samples[next_sample] <= 0.0 {
        out.push(y0.to_vec());
        next_sample += 1;
    }

    let mut x = 0.0;
    let mut y = y0.to_vec();
    let mut k1 = vec![ZERO; dim];
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        vec![ZERO; dim],
        vec![ZERO; dim],
        vec![ZERO; dim],
        vec![ZERO; dim],
        vec![ZERO; dim],
        vec![ZERO; dim],
    );
    let mut stage = vec![ZERO; dim];
    let mut y_new = vec![ZERO; dim];
    f(x, &y, &mut k1);

    let h_max = x_end;
    let mut h = (1e-3 * x_end).min(h_max);
    let mut err_prev: f64 = 1e-4;
    let mut reject_streak = 0;

    let mut stops: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > 0.0 && b < x_end).collect();
    stops.sort_by(f64::total_cmp);
    stops.push(x_end);
    let mut next_stop = 0;

    while x < x_end {
        while stops[next_stop] <= x {
            next_stop += 1;
        }
        let stop = stops[next_stop];
        let landing = x + h >= stop;
        if landing {
            h = stop - x;
        }
        if h < 1e-14 * x_end.max(1.0) {
            return Err(HypspecError::IntegratorFailure { zeta: x, step: h });
        }
        axpy(&mut stage, &y, h, &[(A21, &k1)]);
        f(x + C2 * h, &stage, &mut k2);
        axpy(&mut stage, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(x + C3 * h, &stage, &mut k3);
        axpy(&mut stage, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(x + C4 * h, &stage, &mut k4);
        axpy(&mut stage, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(x + C5 * h, &stage, &mut k5);
        axpy(&mut stage, &y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        f(x + h, &stage, &mut k6);
        axpy(&mut y_new, &y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        f(x + h, &y_new, &mut k7);

        let mut err_sq = 0.0;
        for i in 0..dim {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let scale = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / scale).powi(2);
        }
        let err = (err_sq / dim.max(1) as f64).sqrt();

        if err <= 1.0 {
            // dense output coefficients for this step
            let x_old = x;
            let x_new = if landing { stop } else { x + h };
            while next_sample < samples.len() && samples[next_sample] <= x_new {
                let s = samples[next_sample];
                if s >= x_new {
                    out.push(y_new.clone());
                } else {
                    let theta = (s - x_old) / h;
                    let theta1 = 1.0 - theta;
                    let v = (0..dim)
                        .map(|i| {
                            let r1 = y[i];
                            let r2 = y_new[i] - y[i];
                            let r3 = k1[i] * h - r2;
                            let r4 = r2 - k7[i] * h - r3;
                            let r5 = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
                            r1 + (r2 + (r3 + (r4 + r5 * theta1) * theta) * theta1) * theta
                        })
                        .collect();
                    out.push(v);
                }
                next_sample += 1;
            }
            x = x_new;
            std::mem::swap(&mut y, &mut y_new);
            if landing && x < x_end {
                // restart at a breakpoint where the right-hand side is not smooth
                f(x, &y, &mut k1);
            } else {
                std::mem::swap(&mut k1, &mut k7);
            }
            // PI step-size controller (Hairer's dopri5 defaults)
            let err_c = err.max(1e-10);
            let fac = (0.9 * err_c.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0)).clamp(0.2, 10.0);
            err_prev = err_c.max(1e-4);
            let grow = if reject_streak > 0 { fac.min(1.0) } else { fac };
            h = (h * grow).min(h_max);
            reject_streak = 0;
        } else {
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
            } else {
                0.1
            };
            h *= fac;
            reject_streak += 1;
        }
    }
    while out.len() < samples.len() {
        out.push(y.clone());
    }
    Ok(out)
}
