//! Truncated power series `Σ_{n=0}^{K} c_n χ^n` over scalars, vectors and
//! matrices. Products are Cauchy convolutions cut at the shorter order.

use num_complex::Complex64;

use crate::linalg::{c, CMat, CVec, RMat};

/// Coefficient ring for [`Series`]. `mul` is the (possibly noncommutative)
/// ring product; vectors only support addition and scaling.
pub trait Coeff: Clone {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
}

pub trait RingCoeff: Coeff {
    fn mul(&self, other: &Self) -> Self;
}

impl Coeff for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
}
impl RingCoeff for f64 {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Coeff for Complex64 {
    fn zero_like(&self) -> Self {
        c(0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
}
impl RingCoeff for Complex64 {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Coeff for RMat {
    fn zero_like(&self) -> Self {
        RMat::zeros(self.nrows(), self.ncols())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
}
impl RingCoeff for RMat {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Coeff for CMat {
    fn zero_like(&self) -> Self {
        CMat::zeros(self.nrows(), self.ncols())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, s: f64) -> Self {
        self * c(s)
    }
}
impl RingCoeff for CMat {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
}

impl Coeff for CVec {
    fn zero_like(&self) -> Self {
        CVec::zeros(self.len())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, s: f64) -> Self {
        self * c(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    pub coeffs: Vec<T>,
}

pub type RealSeries = Series<f64>;
pub type SeriesScalar = Series<Complex64>;
pub type SeriesVector = Series<CVec>;
pub type SeriesMatrix = Series<CMat>;
pub type RealSeriesMatrix = Series<RMat>;

impl<T: Coeff> Series<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "series needs an order-0 coefficient");
        Series { coeffs }
    }

    pub fn constant(c0: T, order: usize) -> Self {
        let z = c0.zero_like();
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = c0;
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < order + 1 {
            coeffs.push(coeffs[0].zero_like());
        }
        coeffs.truncate(order + 1);
        Series { coeffs }
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        Series { coeffs: (0..=k).map(|n| self.coeffs[n].add(&o.coeffs[n])).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Series { coeffs: self.coeffs.iter().map(|x| x.scale(s)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    /// `χ·f(χ)`, keeping the order.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = vec![self.coeffs[0].zero_like()];
        coeffs.extend(self.coeffs[..self.order()].iter().cloned());
        Series { coeffs }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Series<U> {
        Series { coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Σ c_n χ^n at real χ.
    pub fn evaluate(&self, chi: f64) -> T {
        let mut acc = self.coeffs[self.order()].clone();
        for n in (0..self.order()).rev() {
            acc = acc.scale(chi).add(&self.coeffs[n]);
        }
        acc
    }
}

impl<T: RingCoeff> Series<T> {
    pub fn mul(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        let coeffs = (0..=k)
            .map(|n| {
                let mut acc = self.coeffs[0].mul(&o.coeffs[n]);
                for a in 1..=n {
                    acc = acc.add(&self.coeffs[a].mul(&o.coeffs[n - a]));
                }
                acc
            })
            .collect();
        Series { coeffs }
    }

    pub fn powi(&self, p: usize, one: T) -> Self {
        let mut acc = Series::constant(one, self.order());
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl Series<CMat> {
    pub fn apply(&self, v: &SeriesVector) -> SeriesVector {
        let k = self.order().min(v.order());
        let coeffs = (0..=k)
            .map(|n| {
                let mut acc = &self.coeffs[0] * &v.coeffs[n];
                for a in 1..=n {
                    acc += &self.coeffs[a] * &v.coeffs[n - a];
                }
                acc
            })
            .collect();
        Series { coeffs }
    }

    pub fn evaluate_complex(&self, chi: Complex64) -> CMat {
        let mut acc = self.coeffs[self.order()].clone();
        for n in (0..self.order()).rev() {
            acc = acc * chi + &self.coeffs[n];
        }
        acc
    }
}

impl Series<Complex64> {
    pub fn evaluate_complex(&self, chi: Complex64) -> Complex64 {
        let mut acc = self.coeffs[self.order()];
        for n in (0..self.order()).rev() {
            acc = acc * chi + self.coeffs[n];
        }
        acc
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    /// `f(x(χ))` for `f(x) = Σ_r a_r x^r` and `x` with zero constant term.
    pub fn compose(&self, a: &[Complex64]) -> Self {
        debug_assert!(self.coeffs[0].norm() == 0.0);
        let k = self.order();
        let mut out = Series::constant(a[0], k);
        let mut pow = Series::constant(c(1.0), k);
        for &ar in a.iter().take(k + 1).skip(1) {
            pow = pow.mul(self);
            out = out.add(&pow.scale_c(ar));
        }
        out
    }

    /// Principal square root, via `√g·(1 + x)^{1/2}` with `x = (f − g)/g`.
    pub fn sqrt(&self) -> Self {
        let g = self.coeffs[0];
        assert!(g.norm() > 0.0, "sqrt series needs a nonzero constant term");
        let mut x = self.scale_c(1.0 / g);
        x.coeffs[0] = c(0.0);
        let root = g.sqrt();
        let a: Vec<Complex64> = binomial_half(self.order()).into_iter().map(|b| c(b) * root).collect();
        x.compose(&a)
    }
}

impl Series<f64> {
    pub fn complexify(&self) -> SeriesScalar {
        self.map(|&x| c(x))
    }
}

impl Series<RMat> {
    pub fn complexify(&self) -> SeriesMatrix {
        self.map(|m| m.map(c))
    }
}

/// `C(1/2, r)` for `r = 0..=k`.
pub fn binomial_half(k: usize) -> Vec<f64> {
    let mut b = vec![1.0; k + 1];
    for r in 1..=k {
        b[r] = b[r - 1] * (0.5 - (r - 1) as f64) / r as f64;
    }
    b
}

/// Binomial coefficient as a float.
pub fn binom(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, k| acc * (n - k) as f64 / (k + 1) as f64)
}
