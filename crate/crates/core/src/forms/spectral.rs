use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::GridTorus;

/// Derivative along `axis` of a periodic sample array by trigonometric
/// interpolation. The Nyquist mode of even-length axes is dropped, so the
/// result is exact for trigonometric polynomials below the Nyquist degree.
pub fn differentiate(grid: &GridTorus, values: &[f64], axis: usize) -> Vec<f64> {
    let n = grid.resolution()[axis];
    let stride = grid.stride(axis);
    let period = grid.period()[axis];

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let multipliers: Vec<Complex64> = (0..n)
        .map(|k| {
            let freq = if 2 * k < n {
                k as f64
            } else if 2 * k == n {
                0.0
            } else {
                k as f64 - n as f64
            };
            Complex64::new(0.0, 2.0 * PI * freq / period / n as f64)
        })
        .collect();

    let mut out = vec![0.0; values.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for start in grid.line_starts(axis) {
        for (j, slot) in line.iter_mut().enumerate() {
            *slot = Complex64::new(values[start + j * stride], 0.0);
        }
        fwd.process(&mut line);
        for (c, m) in line.iter_mut().zip(&multipliers) {
            *c *= m;
        }
        inv.process(&mut line);
        for (j, c) in line.iter().enumerate() {
            out[start + j * stride] = c.re;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine_is_exact() {
        let g = GridTorus::new(vec![16, 8], vec![1.0, 2.0]).unwrap();
        let f: Vec<f64> = (0..g.node_count())
            .map(|i| {
                let x = g.coordinates(i);
                (2.0 * PI * x[0]).sin() + (PI * x[1]).cos()
            })
            .collect();
        let d0 = differentiate(&g, &f, 0);
        let d1 = differentiate(&g, &f, 1);
        for i in 0..g.node_count() {
            let x = g.coordinates(i);
            assert!((d0[i] - 2.0 * PI * (2.0 * PI * x[0]).cos()).abs() < 1e-12);
            assert!((d1[i] + PI * (PI * x[1]).sin()).abs() < 1e-12);
        }
    }
}
