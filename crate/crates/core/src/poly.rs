//! Complex polynomials and rational functions.
//!
//! Coefficients are stored in ascending order. Root finding uses the
//! Durand-Kerner simultaneous iteration with a Newton polish and a
//! deterministic initial configuration, so repeated runs agree bitwise.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Tolerance for matching numerator and denominator roots during reduction.
const ROOT_MATCH_TOL: f64 = 1e-9;

/// Relative threshold at which rational evaluation reports a pole.
const POLE_GUARD_REL: f64 = 1e-12;

/// Dense univariate polynomial over the complex numbers, ascending
/// coefficients, no trailing zero coefficients (the zero polynomial keeps a
/// single zero coefficient).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::zero());
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![Complex64::zero()] }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![Complex64::one()] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Self::one();
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, Complex64::one()]));
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn lead(&self) -> Complex64 {
        *self.coeffs.last().expect("coeffs nonempty")
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c * Complex64::new(j as f64, 0.0))
            .collect();
        Self::new(coeffs)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![Complex64::zero(); n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            if j < self.coeffs.len() {
                *c += self.coeffs[j];
            }
            if j < rhs.coeffs.len() {
                *c += rhs.coeffs[j];
            }
        }
        Self::new(coeffs)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(-Complex64::one()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Complex64::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    /// `p(a x + b)` as a polynomial in `x`.
    pub fn compose_affine(&self, a: Complex64, b: Complex64) -> Self {
        let linear = Self::new(vec![b, a]);
        let mut acc = Self::constant(self.lead());
        for &c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(&linear).add(&Self::constant(c));
        }
        acc
    }

    /// Synthetic division by `(x - r)`, dropping the remainder.
    pub fn deflate(&self, r: Complex64) -> Self {
        let d = match self.degree() {
            None | Some(0) => return Self::zero(),
            Some(d) => d,
        };
        let mut out = vec![Complex64::zero(); d];
        let mut carry = self.coeffs[d];
        for j in (0..d).rev() {
            out[j] = carry;
            carry = self.coeffs[j] + r * carry;
        }
        Self::new(out)
    }

    /// All complex roots with multiplicity, sorted by real then imaginary
    /// part. Multiple roots are found to reduced accuracy (about machine
    /// epsilon to the power `1/multiplicity`), which downstream tolerances
    /// account for.
    pub fn roots(&self) -> Vec<Complex64> {
        let d = match self.degree() {
            None | Some(0) => return Vec::new(),
            Some(d) => d,
        };
        let lead = self.lead();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let mut roots = match d {
            1 => vec![-monic[0]],
            2 => quadratic_roots(monic[0], monic[1]),
            _ => durand_kerner(&monic),
        };
        newton_polish(self, &mut roots);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        roots
    }
}

/// Roots of `x^2 + b x + c`, with the stable Vieta pairing.
fn quadratic_roots(c: Complex64, b: Complex64) -> Vec<Complex64> {
    let disc = b * b - Complex64::new(4.0, 0.0) * c;
    let s = disc.sqrt();
    // Pick the sign that avoids cancellation in -b -/+ s.
    let t = if (b + s).norm() >= (b - s).norm() { b + s } else { b - s };
    if t.is_zero() {
        return vec![Complex64::zero(), Complex64::zero()];
    }
    let r1 = -t / Complex64::new(2.0, 0.0);
    let r2 = c / r1;
    vec![r1, r2]
}

/// Durand-Kerner iteration on a monic polynomial of degree >= 3.
fn durand_kerner(monic: &[Complex64]) -> Vec<Complex64> {
    let d = monic.len() - 1;
    let radius = 1.0 + monic.iter().take(d).map(|c| c.norm()).fold(0.0, f64::max);
    let mut w: Vec<Complex64> = (0..d)
        .map(|j| {
            let angle = core::f64::consts::TAU * (j as f64) / (d as f64) + 0.5;
            Complex64::new(angle.cos(), angle.sin()) * (0.9 * radius)
        })
        .collect();
    let eval = |x: Complex64| {
        let mut acc = Complex64::zero();
        for &c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        let mut max_mag = 0.0f64;
        for j in 0..d {
            let mut denom = Complex64::one();
            for k in 0..d {
                if k != j {
                    denom *= w[j] - w[k];
                }
            }
            if denom.norm() < 1e-300 {
                w[j] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                continue;
            }
            let step = eval(w[j]) / denom;
            w[j] -= step;
            max_step = max_step.max(step.norm());
            max_mag = max_mag.max(w[j].norm());
        }
        if max_step <= 1e-14 * (1.0 + max_mag) {
            break;
        }
    }
    w
}

/// A few Newton steps per root, kept only while the residual improves.
fn newton_polish(p: &Polynomial, roots: &mut [Complex64]) {
    let dp = p.derivative();
    for r in roots.iter_mut() {
        let mut best = *r;
        let mut best_val = p.eval(best).norm();
        let mut cur = best;
        for _ in 0..3 {
            let d = dp.eval(cur);
            if d.norm() < 1e-300 {
                break;
            }
            cur -= p.eval(cur) / d;
            let val = p.eval(cur).norm();
            if val < best_val {
                best_val = val;
                best = cur;
            } else {
                break;
            }
        }
        *r = best;
    }
}

/// Ratio of two polynomials, kept in lowest terms with a monic denominator.
///
/// Construction cancels near-common roots of numerator and denominator (to
/// tolerance [`ROOT_MATCH_TOL`], scaled by the root magnitude) and then
/// normalizes the denominator to be monic. The zero function is stored as
/// `0 / 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator"));
        }
        if num.is_zero() {
            return Ok(Self { num: Polynomial::zero(), den: Polynomial::one() });
        }
        let (mut num, mut den) = (num, den);
        if num.degree() > Some(0) && den.degree() > Some(0) {
            let nroots = num.roots();
            let droots = den.roots();
            let mut used = vec![false; nroots.len()];
            for &dr in &droots {
                let tol = ROOT_MATCH_TOL * (1.0 + dr.norm());
                let mut pick: Option<(usize, f64)> = None;
                for (i, &nr) in nroots.iter().enumerate() {
                    if used[i] {
                        continue;
                    }
                    let dist = (nr - dr).norm();
                    if dist <= tol && pick.map_or(true, |(_, d)| dist < d) {
                        pick = Some((i, dist));
                    }
                }
                if let Some((i, _)) = pick {
                    used[i] = true;
                    let mean = (nroots[i] + dr) * Complex64::new(0.5, 0.0);
                    num = num.deflate(mean);
                    den = den.deflate(mean);
                    if num.is_zero() {
                        return Ok(Self { num: Polynomial::zero(), den: Polynomial::one() });
                    }
                }
            }
        }
        let lead = den.lead();
        Ok(Self {
            num: num.scale(Complex64::one() / lead),
            den: den.scale(Complex64::one() / lead),
        })
    }

    pub fn zero() -> Self {
        Self { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// Evaluates the function, guarding against points that are poles to
    /// working precision; the guard compares `|den(x)|` against the value
    /// the denominator would have with all cancellation removed.
    pub fn eval(&self, x: Complex64) -> Result<Complex64> {
        let dv = self.den.eval(x);
        if dv.norm() <= POLE_GUARD_REL * self.den_scale(x) {
            return Err(Error::PoleEvaluation { at: x });
        }
        Ok(self.num.eval(x) / dv)
    }

    /// `|f(x)|`.
    pub fn abs_at(&self, x: Complex64) -> Result<f64> {
        Ok(self.eval(x)?.norm())
    }

    /// Derivative value `(n' d - n d') / d^2` at `x`, with the same pole
    /// guard as [`Self::eval`].
    pub fn eval_derivative(&self, x: Complex64) -> Result<Complex64> {
        let dv = self.den.eval(x);
        if dv.norm() <= POLE_GUARD_REL * self.den_scale(x) {
            return Err(Error::PoleEvaluation { at: x });
        }
        let nv = self.num.eval(x);
        let ndv = self.num.derivative().eval(x);
        let ddv = self.den.derivative().eval(x);
        Ok((ndv * dv - nv * ddv) / (dv * dv))
    }

    /// Poles with multiplicities, clustered representatives of the
    /// denominator roots.
    pub fn poles(&self) -> Vec<(Complex64, usize)> {
        cluster_points(&self.den.roots(), 1e-6)
    }

    fn den_scale(&self, x: Complex64) -> f64 {
        let ax = x.norm();
        let mut scale = 0.0;
        let mut pw = 1.0;
        for c in self.den.coeffs() {
            scale += c.norm() * pw;
            pw *= ax;
        }
        scale.max(f64::MIN_POSITIVE)
    }
}

/// Greedy clustering of points within `tol * (1 + |point|)`; returns
/// cluster means and sizes, ordered by first occurrence after sorting.
pub(crate) fn cluster_points(points: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &p in &sorted {
        match out.last_mut() {
            Some((mean, count)) if (*mean - p).norm() <= tol * (1.0 + p.norm()) => {
                let n = *count as f64;
                *mean = (*mean * Complex64::new(n, 0.0) + p) / Complex64::new(n + 1.0, 0.0);
                *count += 1;
            }
            _ => out.push((p, 1)),
        }
    }
    out
}
