//! Adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
//!
//! The interval is first cut at caller-supplied breakpoints and into panels no
//! wider than `max_panel`, which is how oscillatory integrands get at least a
//! fixed number of panels per period. Panels are then bisected in order of
//! decreasing error estimate until the global tolerance is met. The final sum
//! runs over panels ordered by position with compensated summation, so the
//! result does not depend on the refinement history.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the width of the initial panels.
    pub max_panel: Option<f64>,
    pub max_panels: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_panel: None,
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Max-heap on error; ties go to the leftmost panel.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Panel { a, b, value, error }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl Integrator {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn max_panel(mut self, width: f64) -> Self {
        self.max_panel = Some(width);
        self
    }

    /// Integrates `f` over `[a, b]`, splitting first at every breakpoint that
    /// lies strictly inside the interval.
    pub fn integrate<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        breakpoints: &[f64],
    ) -> Result<QuadResult> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::invalid("integration bounds must be finite"));
        }
        if a == b {
            return Ok(QuadResult {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
                panels: 0,
            });
        }
        if a > b {
            let r = self.integrate(f, b, a, breakpoints)?;
            return Ok(QuadResult {
                value: -r.value,
                ..r
            });
        }

        let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
        cuts.push(a);
        cuts.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut heap = BinaryHeap::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let pieces = match self.max_panel {
                Some(m) if m > 0.0 => ((hi - lo) / m).ceil().max(1.0) as usize,
                _ => 1,
            };
            let step = (hi - lo) / pieces as f64;
            for i in 0..pieces {
                let pa = lo + step * i as f64;
                let pb = if i + 1 == pieces { hi } else { lo + step * (i + 1) as f64 };
                heap.push(kronrod(&f, pa, pb));
            }
        }
        let mut evaluations = 15 * heap.len();

        let mut total: f64 = heap.iter().map(|p| p.value).sum();
        let mut total_err: f64 = heap.iter().map(|p| p.error).sum();
        let mut converged = true;

        while total_err > self.abs_tol.max(self.rel_tol * total.abs()) {
            if heap.len() >= self.max_panels {
                converged = false;
                break;
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Panel cannot be bisected further in floating point.
                heap.push(worst);
                converged = false;
                break;
            }
            let left = kronrod(&f, worst.a, mid);
            let right = kronrod(&f, mid, worst.b);
            evaluations += 30;
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }

        let mut panels = heap.into_vec();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value = compensated_sum(panels.iter().map(|p| p.value));
        let error = compensated_sum(panels.iter().map(|p| p.error));
        let requested = self.abs_tol.max(self.rel_tol * value.abs());
        if !converged && error > requested {
            return Err(Error::Numeric {
                achieved: error,
                requested,
            });
        }
        Ok(QuadResult {
            value,
            error,
            evaluations,
            panels: panels.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = Integrator::default()
            .integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, &[])
            .unwrap();
        let exact = (64.0 / 6.0 - 1.0 / 6.0) - (8.0 + 1.0) + 3.0;
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_0^{10} cos(50 x) dx = sin(500)/50
        let r = Integrator::with_tolerance(1e-13, 1e-12)
            .max_panel(std::f64::consts::PI / (8.0 * 50.0))
            .integrate(|x| (50.0 * x).cos(), 0.0, 10.0, &[])
            .unwrap();
        assert!((r.value - 500f64.sin() / 50.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_tail_truncation() {
        let r = Integrator::default()
            .integrate(|x| (-x * x / 2.0).exp(), -12.0, 12.0, &[])
            .unwrap();
        assert!((r.value - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kink_with_breakpoint() {
        let r = Integrator::default()
            .integrate(|x: f64| x.abs(), -1.0, 3.0, &[0.0])
            .unwrap();
        assert!((r.value - 5.0).abs() < 1e-14);
        assert_eq!(r.panels, 2);
    }

    #[test]
    fn reversed_bounds_negate() {
        let i = Integrator::default();
        let fwd = i.integrate(f64::exp, 0.0, 1.0, &[]).unwrap().value;
        let rev = i.integrate(f64::exp, 1.0, 0.0, &[]).unwrap().value;
        assert_eq!(fwd, -rev);
    }

    #[test]
    fn non_convergence_reports_achieved_error() {
        let i = Integrator {
            max_panels: 4,
            ..Integrator::with_tolerance(1e-15, 0.0)
        };
        let err = i.integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &[]).unwrap_err();
        assert!(matches!(err, Error::Numeric { .. }));
    }
}
