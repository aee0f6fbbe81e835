//! Least-squares fits used for rate and order extraction.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual sum of squares in the fitted coordinates.
    pub rss: f64,
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    Some(LineFit {
        slope,
        intercept,
        rss,
    })
}

/// Fits `y ≈ c·t^p` by a log–log line; `rss` is measured on `y` itself so it can be
/// compared with other models. Non-positive samples are skipped.
pub fn fit_power_law(t: &[f64], y: &[f64]) -> Option<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(y)
        .filter(|(ti, yi)| **ti > 0.0 && **yi > 0.0)
        .map(|(ti, yi)| (ti.ln(), yi.ln()))
        .unzip();
    let f = fit_line(&lx, &ly)?;
    let rss = t
        .iter()
        .zip(y)
        .map(|(ti, yi)| {
            let m = f.intercept.exp() * ti.powf(f.slope);
            (yi - m) * (yi - m)
        })
        .sum();
    Some(LineFit { rss, ..f })
}

/// Fits `y ≈ a + b·ln(t + 2)`; `slope = b`.
pub fn fit_log_model(t: &[f64], y: &[f64]) -> Option<LineFit> {
    let lx: Vec<f64> = t.iter().map(|ti| (ti + 2.0).ln()).collect();
    fit_line(&lx, y)
}

/// Observed convergence order from errors measured at resolutions `h` (any monotone
/// parametrisation: mesh width or time step).
pub fn observed_order(h: &[f64], err: &[f64]) -> Option<f64> {
    fit_power_law(h, err).map(|f| f.slope)
}

/// Pairwise orders `log(e_i/e_{i+1}) / log(h_i/h_{i+1})`.
pub fn pairwise_orders(h: &[f64], err: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(err.windows(2))
        .map(|(hw, ew)| (ew[0] / ew[1]).ln() / (hw[0] / hw[1]).ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let t: Vec<f64> = (1..50).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        let f = fit_power_law(&t, &y).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!((f.intercept.exp() - 3.0).abs() < 1e-10);
        assert!(f.rss < 1e-20);
    }

    #[test]
    fn log_model_wins_on_logarithmic_data() {
        let t: Vec<f64> = (100..1000).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|x| 0.5 + 2.0 * (x + 2.0).ln()).collect();
        let pl = fit_power_law(&t, &y).unwrap();
        let lg = fit_log_model(&t, &y).unwrap();
        assert!(lg.rss < pl.rss);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_line(&[1.0], &[2.0]).is_none());
        assert!(fit_line(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }
}
