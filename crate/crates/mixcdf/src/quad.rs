//! Numerical integration: fixed Gauss-Legendre rules and an adaptive
//! Gauss-Kronrod integrator used for mixture CDFs.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial; accurate to
/// machine precision for the small n used here.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        // Chebyshev-based initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    if n == 1 {
        return (x, 1.0);
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integrates f over [a, b] with the n-point Gauss-Legendre rule.
pub fn gauss_legendre_integral(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(n)
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

// Gauss-Kronrod 7-15 pair (QUADPACK constants).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let fs = f(mid - x) + f(mid + x);
        kronrod += WGK[j] * fs;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fs;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

/// Adaptive Gauss-Kronrod integration of f over [a, b] to absolute
/// tolerance `tol`. Bisects the worst interval until the summed error
/// estimate is below `tol`.
pub fn adaptive_gk(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    assert!(tol > 0.0 && b >= a);
    if a == b {
        return 0.0;
    }
    // (neg_err, a, b, value, err) max-heap by error via sorted insertion.
    let (v0, e0) = gk15(&f, a, b);
    let mut intervals = vec![(a, b, v0, e0)];
    let mut total_err: f64 = e0;
    let max_intervals = 1 << 14;
    while total_err > tol && intervals.len() < max_intervals {
        // Split the interval with the largest error.
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (ia, ib, iv, ie) = intervals.swap_remove(idx);
        let im = 0.5 * (ia + ib);
        if im <= ia || im >= ib {
            // Interval at floating-point resolution; accept as is.
            intervals.push((ia, ib, iv, 0.0));
            total_err -= ie;
            continue;
        }
        let (vl, el) = gk15(&f, ia, im);
        let (vr, er) = gk15(&f, im, ib);
        total_err += el + er - ie;
        intervals.push((ia, im, vl, el));
        intervals.push((im, ib, vr, er));
    }
    intervals.iter().map(|t| t.2).sum()
}
