//! Cumulative quadrature of sampled functions.

fn lagrange(ts: &[f64], fs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..ts.len() {
        let mut w = 1.0;
        for j in 0..ts.len() {
            if i != j {
                w *= (t - ts[j]) / (ts[i] - ts[j]);
            }
        }
        acc += w * fs[i];
    }
    acc
}

/// Running integral `int_{t_0}^{t_i} f` for samples on a strictly increasing grid.
///
/// Each interval is integrated exactly against the cubic through the four
/// nearest samples (fewer when the grid is short), giving fourth-order accuracy
/// on smooth data.
pub fn cumulative(ts: &[f64], fs: &[f64]) -> Vec<f64> {
    assert_eq!(ts.len(), fs.len(), "sample grids differ in length");
    let n = ts.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let g = 0.5 / 3f64.sqrt();
    let width = n.min(4);
    for i in 0..n - 1 {
        let start = i.saturating_sub(1).min(n - width);
        let (sub_t, sub_f) = (&ts[start..start + width], &fs[start..start + width]);
        let (a, b) = (ts[i], ts[i + 1]);
        let mid = 0.5 * (a + b);
        let h = b - a;
        // Two-point Gauss-Legendre is exact for cubics.
        let piece = 0.5 * h * (lagrange(sub_t, sub_f, mid - g * h) + lagrange(sub_t, sub_f, mid + g * h));
        out[i + 1] = out[i] + piece;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let ts: Vec<f64> = (0..9).map(|i| (i as f64).powf(1.3) * 0.4).collect();
        let fs: Vec<f64> = ts.iter().map(|t| 2.0 - t + 0.5 * t * t - 0.1 * t * t * t).collect();
        let exact = |t: f64| 2.0 * t - t * t / 2.0 + t.powi(3) / 6.0 - 0.025 * t.powi(4);
        for (t, v) in ts.iter().zip(cumulative(&ts, &fs)) {
            assert!((v - exact(*t)).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_order_on_smooth_data() {
        let err = |n: usize| {
            let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64 * 3.0).collect();
            let fs: Vec<f64> = ts.iter().map(|t| t.cos()).collect();
            (cumulative(&ts, &fs)[n] - 3f64.sin()).abs()
        };
        let order = (err(20) / err(40)).log2();
        assert!(order > 3.8, "{order}");
    }

    #[test]
    fn short_grids() {
        assert_eq!(cumulative(&[1.0], &[5.0]), vec![0.0]);
        let two = cumulative(&[0.0, 2.0], &[1.0, 3.0]);
        assert!(two[0] == 0.0 && (two[1] - 4.0).abs() < 1e-15);
    }
}
