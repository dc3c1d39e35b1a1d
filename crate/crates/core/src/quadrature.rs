//! Time quadrature on uniform samples and adaptive Gauss-Kronrod on intervals.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Running integrals `∫_{t_0}^{t_i} f` of uniformly spaced samples.
///
/// Even nodes use composite Simpson from the origin. Odd nodes add the
/// third-order single-interval rule `h/12 (5 f_{i-1} + 8 f_i - f_{i+1})`
/// (mirrored at the last node). Two samples fall back to the trapezoid.
pub fn cumulative_simpson(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (values[0] + values[1]);
        return out;
    }
    for i in (2..n).step_by(2) {
        out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
    }
    for i in (1..n).step_by(2) {
        let step = if i + 1 < n {
            h / 12.0 * (5.0 * values[i - 1] + 8.0 * values[i] - values[i + 1])
        } else {
            h / 12.0 * (-values[i - 2] + 8.0 * values[i - 1] + 5.0 * values[i])
        };
        out[i] = out[i - 1] + step;
    }
    out
}

/// Simpson integral over the whole sample range.
pub fn simpson(values: &[Complex64], h: f64) -> Complex64 {
    cumulative_simpson(values, h).last().copied().unwrap_or_default()
}

#[allow(clippy::excessive_precision)]
const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const GK_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel with its 7-point Gauss error estimate.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = r * GK_NODES[i];
        let pair = f(c - x) + f(c + x);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Globally adaptive Gauss-Kronrod over the given breakpoints.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate drops below `tol` (absolute) or `max_panels` is reached.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    breakpoints: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidArgument("need at least two breakpoints".into()));
    }
    let mut panels: Vec<(f64, f64, f64, f64)> = breakpoints
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if error <= tol {
            let value = panels.iter().map(|p| p.2).sum();
            return Ok(Quadrature {
                value,
                error,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNotConverged { estimate: error });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (a, b, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
    }
}
