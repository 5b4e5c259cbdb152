//! Closed-form eigenvalues for 2×2 and 3×3 real matrices.

use num_complex::Complex64;

pub type Matrix2 = [[f64; 2]; 2];
pub type Matrix3 = [[f64; 3]; 3];

pub fn eigenvalues_2x2(m: &Matrix2) -> [Complex64; 2] {
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = half_tr * half_tr - det;
    let mut out = if disc >= 0.0 {
        let r = disc.sqrt();
        // Avoid cancellation for the smaller root.
        let big = half_tr + r.copysign(half_tr);
        let small = if big != 0.0 { det / big } else { half_tr - r.copysign(half_tr) };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let i = (-disc).sqrt();
        [Complex64::new(half_tr, i), Complex64::new(half_tr, -i)]
    };
    sort_eigenvalues(&mut out);
    out
}

pub fn trace_2x2(m: &Matrix2) -> f64 {
    m[0][0] + m[1][1]
}

pub fn det_2x2(m: &Matrix2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Eigenvalues from the characteristic cubic λ³ − tr·λ² + m₂·λ − det.
pub fn eigenvalues_3x3(m: &Matrix3) -> [Complex64; 3] {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2]
        - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut roots = cubic_roots(1.0, -tr, minors, -det);
    sort_eigenvalues(&mut roots);
    roots
}

/// All three complex roots of a·x³ + b·x² + c·x + d with a ≠ 0, by
/// Cardano's formula in complex arithmetic followed by Newton polishing.
pub fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 3] {
    let (b, c, d) = (b / a, c / a, d / a);
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    let p_c = Complex64::new(p, 0.0);
    let q_c = Complex64::new(q, 0.0);
    let sq = (q_c * q_c / 4.0 + p_c * p_c * p_c / 27.0).sqrt();
    let mut u3 = -q_c / 2.0 + sq;
    let alt = -q_c / 2.0 - sq;
    if alt.norm() > u3.norm() {
        u3 = alt;
    }
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    if u3.norm() == 0.0 {
        // p = q = 0: triple root.
        roots = [Complex64::new(-shift, 0.0); 3];
    } else {
        let mut u = u3.cbrt();
        for r in roots.iter_mut() {
            *r = u - p_c / (3.0 * u) - shift;
            u *= omega;
        }
    }

    let poly = |x: Complex64| ((x + b) * x + c) * x + d;
    let deriv = |x: Complex64| (3.0 * x + 2.0 * b) * x + c;
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let dp = deriv(*r);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *r - poly(*r) / dp;
            if poly(next).norm() < poly(*r).norm() {
                *r = next;
            } else {
                break;
            }
        }
    }

    // Real coefficients: snap roots that are real up to rounding.
    let scale = 1.0 + b.abs() + c.abs().sqrt() + d.abs().cbrt();
    let complex_count = roots.iter().filter(|r| r.im.abs() > 1e-10 * scale).count();
    if complex_count < 2 {
        for r in roots.iter_mut() {
            r.im = 0.0;
        }
    } else {
        // One real root and a conjugate pair.
        let real_idx = (0..3)
            .min_by(|&i, &j| roots[i].im.abs().total_cmp(&roots[j].im.abs()))
            .unwrap_or(0);
        roots[real_idx].im = 0.0;
        let others: Vec<usize> = (0..3).filter(|&i| i != real_idx).collect();
        let re = 0.5 * (roots[others[0]].re + roots[others[1]].re);
        let im = 0.5 * (roots[others[0]].im.abs() + roots[others[1]].im.abs());
        roots[others[0]] = Complex64::new(re, im);
        roots[others[1]] = Complex64::new(re, -im);
    }
    roots
}

/// Real roots of a cubic, sorted ascending.
pub fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let mut out: Vec<f64> = cubic_roots(a, b, c, d)
        .iter()
        .filter(|r| r.im == 0.0)
        .map(|r| r.re)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Descending real part, then descending imaginary part.
pub fn sort_eigenvalues(ev: &mut [Complex64]) {
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}
