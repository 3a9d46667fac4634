//! Interpolation kernels shared by profiles, geometry tables and the oracle.

/// Cubic Hermite interpolation on `[x0, x1]` with end values and slopes.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Derivative of [`hermite`] with respect to `x`.
pub fn hermite_slope(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let dh00 = 6.0 * t2 - 6.0 * t;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = -6.0 * t2 + 6.0 * t;
    let dh11 = 3.0 * t2 - 2.0 * t;
    (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1
}

/// Index `i` of the interval `[xs[i], xs[i+1]]` containing `x` (clamped).
pub fn locate(xs: &[f64], x: f64) -> usize {
    let last = xs.len() - 2;
    if x <= xs[0] {
        return 0;
    }
    if x >= xs[last + 1] {
        return last;
    }
    match xs.binary_search_by(|p| p.total_cmp(&x)) {
        Ok(i) => i.min(last),
        Err(i) => (i - 1).min(last),
    }
}

/// Fritsch–Carlson monotone slopes for piecewise cubic Hermite interpolation.
///
/// The resulting interpolant stays within `[min(y_i, y_{i+1}), max(y_i, y_{i+1})]`
/// on every interval, so positive data stay positive.
pub fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 2 {
        let d = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return vec![d, d];
    }
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Four-point cubic Lagrange stencil for `x` on sorted nodes `xs` (at least
/// four): the first node index and the weights.
pub fn cubic_weights(xs: &[f64], x: f64) -> (usize, [f64; 4]) {
    let i = locate(xs, x);
    let start = i.saturating_sub(1).min(xs.len() - 4);
    let s = &xs[start..start + 4];
    let mut w = [1.0; 4];
    for (a, wa) in w.iter_mut().enumerate() {
        for b in 0..4 {
            if a != b {
                *wa *= (x - s[b]) / (s[a] - s[b]);
            }
        }
    }
    (start, w)
}
