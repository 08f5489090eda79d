use serde::Serialize;

/// Values at or below this are treated as underflowed and left out of fits.
pub const FIT_FLOOR: f64 = 1e-250;
/// Largest root-mean-square residual (natural log units) of a conclusive fit.
pub const MAX_FIT_RMS: f64 = 1.0;

/// Least-squares fit `ln y ≈ c - rate · t`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpFit {
    pub rate: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub points: usize,
    pub t_first: f64,
    pub t_last: f64,
    pub conclusive: bool,
}

pub fn exp_fit(points: &[(f64, f64)]) -> ExpFit {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > FIT_FLOOR && y.is_finite())
        .map(|&(t, y)| (t, y.ln()))
        .collect();
    let n = pts.len();
    if n < 3 {
        return ExpFit {
            rate: f64::NAN,
            intercept: f64::NAN,
            rms_residual: f64::NAN,
            points: n,
            t_first: pts.first().map_or(f64::NAN, |p| p.0),
            t_last: pts.last().map_or(f64::NAN, |p| p.0),
            conclusive: false,
        };
    }
    let nf = n as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let lm = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let stl: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - lm)).sum();
    let slope = stl / stt;
    let intercept = lm - slope * tm;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    ExpFit {
        rate: -slope,
        intercept,
        rms_residual: rms,
        points: n,
        t_first: pts[0].0,
        t_last: pts[n - 1].0,
        conclusive: rms <= MAX_FIT_RMS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_rate() {
        let pts: Vec<(f64, f64)> = (0..50)
            .map(|i| (i as f64, 3.0 * (-0.7 * i as f64).exp()))
            .collect();
        let f = exp_fit(&pts);
        assert!((f.rate - 0.7).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!(f.conclusive);
    }

    #[test]
    fn underflow_dropped() {
        let pts = vec![
            (0.0, 1.0),
            (1.0, 0.5),
            (2.0, 0.25),
            (3.0, 0.0),
            (4.0, 1e-300),
        ];
        let f = exp_fit(&pts);
        assert_eq!(f.points, 3);
        assert!((f.rate - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(!exp_fit(&[(0.0, 1.0)]).conclusive);
    }
}
