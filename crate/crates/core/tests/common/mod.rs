//! Independent oracles. Nothing here calls into the library's numerics.
#![allow(dead_code)]

/// Second eigenvalue of `-(H f')' = lambda f` on `[a, b]` with zero flux,
/// by a cell-centred finite-volume discretisation on `cells` cells and
/// Sturm-sequence bisection on the resulting tridiagonal matrix.
pub fn sturm_liouville_lambda1(h: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let dx = (b - a) / cells as f64;
    let face: Vec<f64> = (1..cells).map(|i| h(a + i as f64 * dx)).collect();
    let dx2 = dx * dx;
    let diag: Vec<f64> = (0..cells)
        .map(|i| {
            let left = if i > 0 { face[i - 1] } else { 0.0 };
            let right = if i + 1 < cells { face[i] } else { 0.0 };
            (left + right) / dx2
        })
        .collect();
    let off: Vec<f64> = face.iter().map(|f| -f / dx2).collect();
    // number of eigenvalues strictly below lambda
    let count = |lambda: f64| -> usize {
        let mut c = 0;
        let mut q = diag[0] - lambda;
        if q < 0.0 {
            c += 1;
        }
        for i in 1..cells {
            let prev = if q == 0.0 { 1e-300 } else { q };
            q = diag[i] - lambda - off[i - 1] * off[i - 1] / prev;
            if q < 0.0 {
                c += 1;
            }
        }
        c
    };
    let mut lo = 0.0;
    // Gershgorin upper bound
    let mut hi: f64 = (0..cells)
        .map(|i| diag[i] + if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < cells { off[i].abs() } else { 0.0 })
        .fold(0.0, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count(mid) >= 2 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `H = 2x(1-x)` on `[0, 1]`.
pub fn h_guillemin01(x: f64) -> f64 {
    2.0 * x * (1.0 - x)
}

/// `H = 1 / (1/(2x(1-x)) + c)` on `[0, 1]`.
pub fn h_uc01(c: f64) -> impl Fn(f64) -> f64 {
    move |x| {
        let w = 2.0 * x * (1.0 - x);
        w / (1.0 + c * w)
    }
}

/// Dilation family on `[-1, 1]` (offsets `c = 1`):
/// `G = (s-1)/(2s) sum (L + s)/(L (L + s - 1))`, `H = 1/G`.
pub fn h_dilation_pm1(s: f64) -> impl Fn(f64) -> f64 {
    move |x| {
        if x <= -1.0 || x >= 1.0 {
            return 0.0;
        }
        let g: f64 = [1.0 + x, 1.0 - x].iter().map(|&l| (l + s) / (l * (l + s - 1.0))).sum::<f64>() * (s - 1.0) / (2.0 * s);
        1.0 / g
    }
}

/// `-H_c''(x)` for `u_c` on `[0, 1]` by differentiating `w / (1 + c w)`,
/// `w = 2x(1-x)`, by hand.
pub fn scal_uc01(c: f64, x: f64) -> f64 {
    let w = 2.0 * x * (1.0 - x);
    let w1 = 2.0 - 4.0 * x;
    let w2 = -4.0;
    let d = 1.0 + c * w;
    -((w2 * d - 2.0 * c * w1 * w1) / d.powi(3))
}

/// Midpoint-rule average of `f` over `[0, 1]` with `m` cells.
pub fn grid_mean_interval(f: impl Fn(f64) -> f64, m: usize) -> f64 {
    (0..m).map(|i| f((i as f64 + 0.5) / m as f64)).sum::<f64>() / m as f64
}

/// Average of `f` over the unit right triangle using the centroids of an
/// `m x m` split into `m^2` congruent sub-triangles.
pub fn grid_mean_triangle(f: impl Fn(f64, f64) -> f64, m: usize) -> f64 {
    let h = 1.0 / m as f64;
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m - i {
            let (x, y) = (i as f64 * h, j as f64 * h);
            s += f(x + h / 3.0, y + h / 3.0);
            if i + j + 1 < m {
                s += f(x + 2.0 * h / 3.0, y + 2.0 * h / 3.0);
            }
        }
    }
    s / (m * m) as f64
}

/// Diagonal `Psi` for the Guillemin potential straight from the definition
/// `|Z_m|^2 = exp(2 m . du/dx)` with `du/dx = (1/2) sum nu log L`.
pub fn psi_from_definition(normals: &[Vec<f64>], offsets: &[f64], points: &[Vec<f64>], alpha: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut ux = vec![0.0; n];
    for (nu, c) in normals.iter().zip(offsets) {
        let l: f64 = nu.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + c;
        for j in 0..n {
            ux[j] += 0.5 * nu[j] * l.ln();
        }
    }
    let z: Vec<f64> = points.iter().zip(alpha).map(|(m, a)| a * a * (2.0 * m.iter().zip(&ux).map(|(p, q)| p * q).sum::<f64>()).exp()).collect();
    let s: f64 = z.iter().sum();
    z.iter().map(|v| v / s).collect()
}
