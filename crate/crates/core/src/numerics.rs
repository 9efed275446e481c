//! Numerical building blocks: compensated summation, adaptive Gauss–Kronrod
//! quadrature and polynomial least squares.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Neumaier's compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `num / den` as an unevaluated pair `(hi, lo)` with `hi + lo` accurate to
/// about twice the working precision.
pub fn div_two_term(num: f64, den: f64) -> (f64, f64) {
    let hi = num / den;
    let lo = (-hi).mul_add(den, num) / den;
    (hi, lo)
}

// 15-point Kronrod nodes on [0, 1] (symmetric) and weights; the 7-point Gauss
// rule uses the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive 7/15-point Gauss–Kronrod integration of `f` over
/// `[a, b]`, bisecting the segment with the largest error estimate until the
/// total error is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<QuadResult> {
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    loop {
        let total: CompensatedSum = heap.iter().map(|s| s.value).collect();
        let err: f64 = heap.iter().map(|s| s.error).sum();
        let total = total.value();
        if !total.is_finite() {
            return Err(Error::numerical("integrand is not finite", vec![total]));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(QuadResult {
                value: total,
                error: err,
                intervals: heap.len(),
            });
        }
        if heap.len() >= max_intervals {
            return Err(Error::numerical(
                format!("quadrature did not reach tolerance with {max_intervals} intervals"),
                vec![total, err],
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&f, lo, hi);
            heap.push(Segment {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}

/// Least-squares polynomial coefficients `c₀ … c_deg` for `y ≈ Σ c_j x^j`.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    if x.len() != y.len() || x.len() <= degree {
        return Err(Error::numerical(
            format!(
                "polynomial fit of degree {degree} needs more than {} points",
                x.len()
            ),
            Vec::new(),
        ));
    }
    let design = DMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32));
    let rhs = DVector::from_column_slice(y);
    let solution = design
        .svd(true, true)
        .solve(&rhs, 0.0)
        .map_err(|e| Error::numerical(format!("least squares failed: {e}"), Vec::new()))?;
    Ok(solution.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let s: CompensatedSum = [1e16, 1.0, -1e16].into_iter().collect();
        assert_eq!(s.value(), 1.0);
        let naive: f64 = [1e16, 1.0, -1e16].iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn two_term_division() {
        let (hi, lo) = div_two_term(1.0, 3.0);
        assert_eq!(hi, 1.0 / 3.0);
        assert!(lo != 0.0 && lo.abs() < 1e-16);
    }

    #[test]
    fn integrates_smooth_functions() {
        let r = integrate(|x| x.sin(), 0.0, PI, 1e-12, 0.0, 100).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-13);
        let r = integrate(|x| x.powi(3) / x.exp_m1(), 1e-300, 60.0, 1e-12, 0.0, 500).unwrap();
        assert_relative_eq!(r.value, PI.powi(4) / 15.0, max_relative = 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-15, 0.0, 3);
        assert!(matches!(r, Err(Error::Numerical { .. })));
    }

    #[test]
    fn polyfit_exact_cubic() {
        let x: Vec<f64> = (0..6).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|t| 1.0 - 2.0 * t + 0.5 * t.powi(3)).collect();
        let c = polyfit(&x, &y, 3).unwrap();
        assert_relative_eq!(c[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(c[1], -2.0, max_relative = 1e-12);
        assert!(c[2].abs() < 1e-11);
        assert!(polyfit(&x[..3], &y[..3], 3).is_err());
    }
}
