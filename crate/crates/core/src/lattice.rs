//! Exactly represented lattice sequences and their discrete dynamics.
//!
//! A state holds one block of `C^m` per lattice site. Only sequences that
//! are eventually constant (or eventually geometric with unimodular ratio)
//! on both sides are representable: a finite window of explicit blocks
//! plus one tail block per side. This class is closed under the dynamics
//! `x_k <- T0 x_k + T1 x_{k-1}`, under the discrepancy map, and under
//! Cesaro averaging, so everything here is computed without truncation
//! error: the only rounding is ordinary floating-point arithmetic on
//! exactly the same operations an infinite computation would perform.
//!
//! Tail entries are updated through the same block operation as window
//! entries. A window entry that equals the tail therefore stays bitwise
//! equal to it forever, which keeps the canonical (trimmed) form stable:
//! padding a window with tail copies never changes any result bit.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::characteristic::{CoupledSystem, TimeKind};
use crate::error::{Error, Result};
use crate::matrix::{resolvent, vec_is_finite, ComplexMatrix};
use crate::rates::{dyadic_ladder, fit_loglog, RateFit};

/// Window cap used by the convenience wrappers.
pub const DEFAULT_WINDOW_CAP: usize = 1_000_000;

/// Relative tolerance used when the Cesaro constant estimate is tested
/// for stabilization across ladder steps.
const STABILIZE_TOL: f64 = 1e-6;

/// Residual tolerance for membership in the range subspace.
const RANGE_TOL: f64 = 1e-9;

/// Which sequence norm a state carries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormP {
    /// `l^p` with `1 <= p < infinity`.
    P(f64),
    /// Supremum norm.
    Inf,
}

impl NormP {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(NormP::Inf)
        } else if p >= 1.0 && p.is_finite() {
            Ok(NormP::P(p))
        } else {
            Err(Error::ParameterOutOfRange("norm exponent must satisfy p >= 1"))
        }
    }

    pub fn one() -> Self {
        NormP::P(1.0)
    }

    pub fn two() -> Self {
        NormP::P(2.0)
    }

    pub fn inf() -> Self {
        NormP::Inf
    }
}

/// Behaviour of the sequence outside the window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailKind {
    /// The tail repeats the tail block on each side.
    Constant,
    /// The tail is geometric, `x_{k-1} = x_k / ratio`, anchored at the
    /// stored tail blocks just outside the window. Only unimodular ratios
    /// are admissible (anything else escapes every `l^p`).
    Geometric { ratio: Complex64 },
}

/// An eventually constant (or eventually geometric) block sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    lo: i64,
    m: usize,
    /// `window_len * m` entries, row per site, sites `lo ..= hi`.
    values: Vec<Complex64>,
    /// Value at site `lo - 1` (and, via `tail`, further left).
    left_tail: Vec<Complex64>,
    /// Value at site `hi + 1` (and further right).
    right_tail: Vec<Complex64>,
    tail: TailKind,
    p: NormP,
}

impl LatticeState {
    /// Full constructor. `values` holds `window_len * m` entries for sites
    /// `lo ..= lo + window_len - 1`; the tail blocks are the values just
    /// outside the window. Finite-`p` states must have zero constant
    /// tails, geometric tails must be unimodular and carry `p = Inf`.
    pub fn new(
        lo: i64,
        block_dim: usize,
        values: Vec<Complex64>,
        left_tail: Vec<Complex64>,
        right_tail: Vec<Complex64>,
        tail: TailKind,
        p: NormP,
    ) -> Result<Self> {
        if block_dim == 0 {
            return Err(Error::InvalidInput("block dimension must be at least 1"));
        }
        if values.is_empty() || values.len() % block_dim != 0 {
            return Err(Error::InvalidInput("window must hold a positive number of blocks"));
        }
        if left_tail.len() != block_dim || right_tail.len() != block_dim {
            return Err(Error::InvalidInput("tail blocks must match the block dimension"));
        }
        if !vec_is_finite(&values) || !vec_is_finite(&left_tail) || !vec_is_finite(&right_tail)
        {
            return Err(Error::InvalidInput("state entries must be finite"));
        }
        match tail {
            TailKind::Constant => {
                if matches!(p, NormP::P(_)) {
                    let zero = |v: &[Complex64]| v.iter().all(|z| z.is_zero());
                    if !zero(&left_tail) || !zero(&right_tail) {
                        return Err(Error::NotInSpace);
                    }
                }
            }
            TailKind::Geometric { ratio } => {
                if matches!(p, NormP::P(_)) {
                    return Err(Error::NotInSpace);
                }
                if (ratio.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::NotInSpace);
                }
            }
        }
        Ok(Self::finish(lo, block_dim, values, left_tail, right_tail, tail, p))
    }

    /// Finitely supported data: the given blocks on `lo ..`, zero outside.
    pub fn from_window(
        lo: i64,
        block_dim: usize,
        values: Vec<Complex64>,
        p: NormP,
    ) -> Result<Self> {
        let zeros = vec![Complex64::zero(); block_dim];
        Self::new(lo, block_dim, values, zeros.clone(), zeros, TailKind::Constant, p)
    }

    /// Unit impulse: first coordinate vector at site 0, zero elsewhere.
    pub fn delta(block_dim: usize, p: NormP) -> Self {
        let mut block = vec![Complex64::zero(); block_dim];
        block[0] = Complex64::one();
        Self::from_window(0, block_dim, block, p).expect("valid delta state")
    }

    /// The zero sequence.
    pub fn zero(block_dim: usize, p: NormP) -> Self {
        Self::from_window(0, block_dim, vec![Complex64::zero(); block_dim], p)
            .expect("valid zero state")
    }

    /// The constant sequence with the given entry (sup norm).
    pub fn constant(entry: Vec<Complex64>) -> Result<Self> {
        let m = entry.len();
        Self::new(0, m, entry.clone(), entry.clone(), entry, TailKind::Constant, NormP::Inf)
    }

    fn finish(
        mut lo: i64,
        m: usize,
        mut values: Vec<Complex64>,
        left_tail: Vec<Complex64>,
        right_tail: Vec<Complex64>,
        tail: TailKind,
        p: NormP,
    ) -> Self {
        if matches!(tail, TailKind::Constant) {
            while values.len() > m && values[..m] == left_tail[..] {
                values.drain(..m);
                lo += 1;
            }
            while values.len() > m && values[values.len() - m..] == right_tail[..] {
                values.truncate(values.len() - m);
            }
        }
        Self { lo, m, values, left_tail, right_tail, tail, p }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + (self.window_len() as i64) - 1
    }

    pub fn window_len(&self) -> usize {
        self.values.len() / self.m
    }

    pub fn block_dim(&self) -> usize {
        self.m
    }

    pub fn norm_p(&self) -> NormP {
        self.p
    }

    pub fn tail_kind(&self) -> TailKind {
        self.tail
    }

    pub fn left_tail(&self) -> &[Complex64] {
        &self.left_tail
    }

    pub fn right_tail(&self) -> &[Complex64] {
        &self.right_tail
    }

    /// Window entries, row-major by site.
    pub fn window(&self) -> &[Complex64] {
        &self.values
    }

    fn block(&self, idx: usize) -> &[Complex64] {
        &self.values[idx * self.m..(idx + 1) * self.m]
    }

    /// The value at any site, tails included.
    pub fn value_at(&self, k: i64) -> Vec<Complex64> {
        if k < self.lo {
            match self.tail {
                TailKind::Constant => self.left_tail.clone(),
                TailKind::Geometric { ratio } => {
                    let dist = (self.lo - 1) - k;
                    let inv = Complex64::one() / ratio;
                    let f = inv.powu(dist as u32);
                    self.left_tail.iter().map(|z| z * f).collect()
                }
            }
        } else if k > self.hi() {
            match self.tail {
                TailKind::Constant => self.right_tail.clone(),
                TailKind::Geometric { ratio } => {
                    let dist = k - (self.hi() + 1);
                    let f = ratio.powu(dist as u32);
                    self.right_tail.iter().map(|z| z * f).collect()
                }
            }
        } else {
            self.block((k - self.lo) as usize).to_vec()
        }
    }

    /// `l^p` norm of the sequence. Finite-`p` states have zero tails by
    /// construction, so the sum is over the window; the sup norm includes
    /// the tails (whose block norm is constant along each side).
    pub fn lp_norm(&self) -> f64 {
        let block_norm = |b: &[Complex64]| crate::matrix::vec_norm2(b);
        match self.p {
            NormP::Inf => {
                let mut best = block_norm(&self.left_tail).max(block_norm(&self.right_tail));
                for idx in 0..self.window_len() {
                    best = best.max(block_norm(self.block(idx)));
                }
                best
            }
            NormP::P(p) => {
                if p == 1.0 {
                    (0..self.window_len()).map(|i| block_norm(self.block(i))).sum()
                } else if p == 2.0 {
                    (0..self.window_len())
                        .map(|i| {
                            let b = self.block(i);
                            b.iter().map(|z| z.norm_sqr()).sum::<f64>()
                        })
                        .sum::<f64>()
                        .sqrt()
                } else {
                    (0..self.window_len())
                        .map(|i| block_norm(self.block(i)).powf(p))
                        .sum::<f64>()
                        .powf(1.0 / p)
                }
            }
        }
    }

    /// Right shift `(S x)_k = x_{k-1}`.
    pub fn shift(&self) -> Self {
        let mut out = self.clone();
        out.lo += 1;
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let scale_vec = |v: &[Complex64]| v.iter().map(|z| z * c).collect::<Vec<_>>();
        Self {
            lo: self.lo,
            m: self.m,
            values: scale_vec(&self.values),
            left_tail: scale_vec(&self.left_tail),
            right_tail: scale_vec(&self.right_tail),
            tail: self.tail,
            p: self.p,
        }
    }

    /// Entrywise difference over the union window. Tail kinds must agree
    /// (and geometric ratios must be identical).
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::InvalidInput("block dimensions must match"));
        }
        if self.p != other.p {
            return Err(Error::InvalidInput("norms must match"));
        }
        let tail = match (self.tail, other.tail) {
            (TailKind::Constant, TailKind::Constant) => TailKind::Constant,
            (TailKind::Geometric { ratio: a }, TailKind::Geometric { ratio: b }) if a == b => {
                TailKind::Geometric { ratio: a }
            }
            _ => return Err(Error::UnsupportedTail),
        };
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let len = (hi - lo + 1) as usize;
        let mut values = Vec::with_capacity(len * self.m);
        for k in lo..=hi {
            let a = self.value_at(k);
            let b = other.value_at(k);
            values.extend(a.iter().zip(&b).map(|(x, y)| x - y));
        }
        let sub_vec = |x: &[Complex64], y: &[Complex64]| {
            x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>()
        };
        let left = sub_vec(&self.value_at(lo - 1), &other.value_at(lo - 1));
        let right = sub_vec(&self.value_at(hi + 1), &other.value_at(hi + 1));
        Ok(Self::finish(lo, self.m, values, left, right, tail, self.p))
    }

    /// One application of the two-banded block operator
    /// `y_k = b0 x_k + b1 x_{k-1}`. The window grows by one site on the
    /// right; tails are mapped through the same block operation.
    pub(crate) fn apply_blocks(
        &self,
        b0: &ComplexMatrix,
        b1: &ComplexMatrix,
        cap: usize,
    ) -> Result<Self> {
        let m = self.m;
        if b0.dim() != m || b1.dim() != m {
            return Err(Error::InvalidInput("block dimensions must match the state"));
        }
        let w = self.window_len();
        let needed = w + 1;
        if needed > cap {
            return Err(Error::WindowOverflow { needed, cap });
        }
        let left_prev = self.value_at(self.lo - 1);
        let right_next = self.value_at(self.hi() + 1);
        let mut values = vec![Complex64::zero(); needed * m];
        let mut scratch = vec![Complex64::zero(); m];
        for idx in 0..needed {
            let xk: &[Complex64] =
                if idx < w { self.block(idx) } else { &right_next };
            let xkm1: &[Complex64] =
                if idx == 0 { &left_prev } else { &self.values[(idx - 1) * m..idx * m] };
            step_block_into(b0, b1, xk, xkm1, &mut values[idx * m..(idx + 1) * m], &mut scratch);
        }
        let (left_tail, right_tail) = match self.tail {
            TailKind::Constant => {
                let mut lt = vec![Complex64::zero(); m];
                let mut rt = vec![Complex64::zero(); m];
                step_block_into(b0, b1, &self.left_tail, &self.left_tail, &mut lt, &mut scratch);
                step_block_into(
                    b0,
                    b1,
                    &self.right_tail,
                    &self.right_tail,
                    &mut rt,
                    &mut scratch,
                );
                (lt, rt)
            }
            TailKind::Geometric { ratio } => {
                let inv = Complex64::one() / ratio;
                let lt_prev: Vec<Complex64> =
                    self.left_tail.iter().map(|z| z * inv).collect();
                // After growth the right tail anchors at old hi + 2.
                let rt_here: Vec<Complex64> =
                    self.right_tail.iter().map(|z| z * ratio).collect();
                let mut lt = vec![Complex64::zero(); m];
                let mut rt = vec![Complex64::zero(); m];
                step_block_into(b0, b1, &self.left_tail, &lt_prev, &mut lt, &mut scratch);
                step_block_into(b0, b1, &rt_here, &self.right_tail, &mut rt, &mut scratch);
                (lt, rt)
            }
        };
        Ok(Self::finish(self.lo, m, values, left_tail, right_tail, self.tail, self.p))
    }

    /// One time step of a discrete system, with the default window cap.
    pub fn step(&self, system: &CoupledSystem) -> Result<Self> {
        self.step_capped(system, DEFAULT_WINDOW_CAP)
    }

    pub fn step_capped(&self, system: &CoupledSystem, cap: usize) -> Result<Self> {
        if system.kind() != TimeKind::Discrete {
            return Err(Error::InvalidInput("stepping needs a discrete system"));
        }
        self.apply_blocks(system.diag(), system.sub(), cap)
    }

    /// `n` time steps; the observer sees `(step_index, state)` after every
    /// step.
    pub fn evolve<F: FnMut(u64, &LatticeState)>(
        &self,
        system: &CoupledSystem,
        n: u64,
        observer: F,
    ) -> Result<Self> {
        self.evolve_capped(system, n, DEFAULT_WINDOW_CAP, observer)
    }

    pub fn evolve_capped<F: FnMut(u64, &LatticeState)>(
        &self,
        system: &CoupledSystem,
        n: u64,
        cap: usize,
        mut observer: F,
    ) -> Result<Self> {
        let mut cur = self.clone();
        for i in 1..=n {
            cur = cur.step_capped(system, cap)?;
            observer(i, &cur);
        }
        Ok(cur)
    }

    /// The discrepancy map: `x_k -> T1 R(1, T0) x_k` in discrete time,
    /// `x_k -> A1 A0^{-1} x_k` in continuous time. Its value is what the
    /// shifted Cesaro averages of the dynamics converge to, site by site.
    pub fn m_operator(&self, system: &CoupledSystem) -> Result<Self> {
        if system.dim() != self.m {
            return Err(Error::InvalidInput("block dimensions must match the state"));
        }
        let b = discrepancy_block(system)?;
        let map_vec = |v: &[Complex64]| b.mul_vec(v);
        let mut values = Vec::with_capacity(self.values.len());
        for idx in 0..self.window_len() {
            values.extend(map_vec(self.block(idx)));
        }
        Ok(Self::finish(
            self.lo,
            self.m,
            values,
            map_vec(&self.left_tail),
            map_vec(&self.right_tail),
            self.tail,
            self.p,
        ))
    }

    /// `(1/n) sum_{k=1..n} S^k (M x)` where `S` is the right shift and `M`
    /// the discrepancy map: the Cesaro average of the transported
    /// discrepancy data. Entries are accumulated in a fixed order and
    /// divided once, so dyadic `n` gives exactly rounded block sums.
    pub fn cesaro_average(&self, system: &CoupledSystem, n: u64) -> Result<Self> {
        self.cesaro_average_capped(system, n, DEFAULT_WINDOW_CAP)
    }

    pub fn cesaro_average_capped(
        &self,
        system: &CoupledSystem,
        n: u64,
        cap: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::ParameterOutOfRange("average length must be positive"));
        }
        if matches!(self.tail, TailKind::Geometric { .. }) {
            return Err(Error::UnsupportedTail);
        }
        let y = self.m_operator(system)?;
        let m = self.m;
        let y_w = y.window_len();
        let needed = y_w + (n as usize) - 1;
        if needed > cap {
            return Err(Error::WindowOverflow { needed, cap });
        }
        let lo_out = y.lo + 1;
        let hi_out = y.hi() + n as i64;
        let inv_n = 1.0 / n as f64;
        let mut values = vec![Complex64::zero(); needed * m];
        for (row, i) in (lo_out..=hi_out).enumerate() {
            let acc = &mut values[row * m..(row + 1) * m];
            for k in 1..=n as i64 {
                let idx = i - k;
                let src: &[Complex64] = if idx < y.lo {
                    &y.left_tail
                } else if idx > y.hi() {
                    &y.right_tail
                } else {
                    &y.values[((idx - y.lo) as usize) * m..((idx - y.lo) as usize + 1) * m]
                };
                for (a, s) in acc.iter_mut().zip(src) {
                    *a += s;
                }
            }
            for a in acc.iter_mut() {
                a.re *= inv_n;
                a.im *= inv_n;
            }
        }
        let avg_tail = |tail: &[Complex64]| {
            let mut acc = vec![Complex64::zero(); m];
            for _ in 1..=n {
                for (a, s) in acc.iter_mut().zip(tail) {
                    *a += s;
                }
            }
            for a in acc.iter_mut() {
                a.re *= inv_n;
                a.im *= inv_n;
            }
            acc
        };
        Ok(Self::finish(
            lo_out,
            m,
            values,
            avg_tail(&y.left_tail),
            avg_tail(&y.right_tail),
            TailKind::Constant,
            self.p,
        ))
    }

    /// Runs the Cesaro ladder `n = 16, 32, ..., n_max`, estimates the
    /// constant profile the averages approach, measures the distance to it
    /// at every rung, and predicts the limit of the dynamics itself from
    /// the estimated profile.
    pub fn convergence_test(
        &self,
        system: &CoupledSystem,
        n_max: u64,
    ) -> Result<ConvergenceReport> {
        if n_max < 16 {
            return Err(Error::ParameterOutOfRange("need n_max >= 16"));
        }
        let ladder = dyadic_ladder(4, n_max);
        let mut averages = Vec::with_capacity(ladder.len());
        for &n in &ladder {
            averages.push(self.cesaro_average(system, n)?);
        }
        let candidates: Vec<Vec<Complex64>> =
            averages.iter().map(constant_estimate).collect();
        let scale = self.lp_norm().max(1.0);
        let recent = &candidates[candidates.len().saturating_sub(4)..];
        let mut stabilized = true;
        for a in recent {
            for b in recent {
                let dev = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                if dev > STABILIZE_TOL * scale {
                    stabilized = false;
                }
            }
        }
        let estimate = candidates.last().expect("nonempty ladder").clone();
        let target = if estimate.iter().all(|z| z.is_zero()) {
            LatticeState::zero(self.m, self.p)
        } else {
            LatticeState::constant(estimate.clone())?
        };
        let mut errors = Vec::with_capacity(ladder.len());
        for (n, avg) in ladder.iter().zip(&averages) {
            errors.push((*n, avg.difference(&target)?.lp_norm()));
        }
        let rate = if errors.len() >= 5 {
            let samples: Vec<(f64, f64)> =
                errors.iter().map(|&(n, e)| (n as f64, e)).collect();
            Some(fit_loglog(&samples))
        } else {
            None
        };
        let predicted = if stabilized {
            match limit_candidate(system, &estimate) {
                Ok(entry) => {
                    if matches!(self.p, NormP::Inf) {
                        LatticeState::constant(entry).ok()
                    } else if entry.iter().all(|z| z.norm() <= RANGE_TOL) {
                        Some(LatticeState::zero(self.m, self.p))
                    } else {
                        None
                    }
                }
                Err(_) => None,
            }
        } else {
            None
        };
        Ok(ConvergenceReport { ladder: errors, limit_estimate: estimate, stabilized, rate, predicted })
    }
}

/// Outcome of a Cesaro convergence experiment.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// `(n, distance of the n-average from the estimated constant)`.
    pub ladder: Vec<(u64, f64)>,
    /// Entrywise estimate of the constant profile the averages approach.
    pub limit_estimate: Vec<Complex64>,
    /// Whether the estimate agreed across the last ladder rungs.
    pub stabilized: bool,
    /// Log-log fit of the ladder distances, when enough rungs exist.
    pub rate: Option<RateFit>,
    /// Constant state the dynamics itself should approach, obtained by
    /// inverting the discrepancy map on the estimated profile.
    pub predicted: Option<LatticeState>,
}

/// The constant block a state's Cesaro averages approach: entrywise median
/// over the window entries plus window-weighted tail copies, so for long
/// windows the tails dominate.
fn constant_estimate(state: &LatticeState) -> Vec<Complex64> {
    let w = state.window_len();
    let m = state.block_dim();
    let mut out = Vec::with_capacity(m);
    for comp in 0..m {
        let mut res = Vec::with_capacity(3 * w);
        let mut ims = Vec::with_capacity(3 * w);
        for idx in 0..w {
            let z = state.window()[idx * m + comp];
            res.push(z.re);
            ims.push(z.im);
        }
        for _ in 0..w {
            res.push(state.left_tail()[comp].re);
            ims.push(state.left_tail()[comp].im);
            res.push(state.right_tail()[comp].re);
            ims.push(state.right_tail()[comp].im);
        }
        out.push(Complex64::new(median(&mut res), median(&mut ims)));
    }
    out
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// The block of the discrepancy map: `T1 R(1, T0)` or `A1 A0^{-1}`.
fn discrepancy_block(system: &CoupledSystem) -> Result<ComplexMatrix> {
    match system.kind() {
        TimeKind::Discrete => {
            let r1 = resolvent(system.diag(), Complex64::one())?;
            Ok(system.sub().mul(&r1))
        }
        TimeKind::Continuous => {
            let inv = system.diag().inverse().map_err(|e| match e {
                Error::Singular => Error::SpectrumHit,
                other => other,
            })?;
            Ok(system.sub().mul(&inv))
        }
    }
}

/// Inverts the discrepancy map on its range: given a block `y0` in the
/// range of the coupling block, returns the entry `w` of the constant
/// sequence with `M w = y0`, picked inside the invariant subspace
/// `Ran(R(1, T0) T1)` (resp. `Ran(A0^{-1} A1)`) where the inverse is
/// unique. Differentiating the coupling identity at the tangency point
/// turns the inversion into one pseudo-inverse application:
/// `M (R1 T1 c) = -phi'(tangency) T1 c` for every `c`.
pub fn limit_candidate(system: &CoupledSystem, y0: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = system.dim();
    if y0.len() != m {
        return Err(Error::InvalidInput("profile has wrong block dimension"));
    }
    if !vec_is_finite(y0) {
        return Err(Error::InvalidInput("profile entries must be finite"));
    }
    let sub = system.sub();
    let y_norm = crate::matrix::vec_norm2(y0);
    // Membership in Ran(sub).
    let proj = sub.range_projection(y0, 1e-10);
    let residual = crate::matrix::vec_norm2(&crate::matrix::vec_sub(y0, &proj));
    if residual > RANGE_TOL * y_norm.max(1.0) {
        return Err(Error::NotInRange { residual });
    }
    let (r1, tangency) = match system.kind() {
        TimeKind::Discrete => (resolvent(system.diag(), Complex64::one())?, Complex64::one()),
        TimeKind::Continuous => (
            system.diag().inverse().map_err(|e| match e {
                Error::Singular => Error::SpectrumHit,
                other => other,
            })?,
            Complex64::zero(),
        ),
    };
    let phi_at = system.char_fn().eval(tangency)?;
    if (phi_at.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::NotOnLevelSet);
    }
    let dphi = system.char_fn().eval_derivative(tangency)?;
    if dphi.norm() <= 1e-12 {
        return Err(Error::DegenerateDerivative);
    }
    let rhs: Vec<Complex64> = y0.iter().map(|z| -z / dphi).collect();
    let c = sub.pinv_apply(&rhs, 1e-10);
    let w = r1.mul_vec(&sub.mul_vec(&c));
    // Confirm M w = y0.
    let b = discrepancy_block(system)?;
    let check = b.mul_vec(&w);
    let err = crate::matrix::vec_norm2(&crate::matrix::vec_sub(&check, y0));
    if err > 1e-8 * y_norm.max(1.0) {
        return Err(Error::NotInRange { residual: err });
    }
    Ok(w)
}

fn step_block_into(
    b0: &ComplexMatrix,
    b1: &ComplexMatrix,
    xk: &[Complex64],
    xkm1: &[Complex64],
    out: &mut [Complex64],
    scratch: &mut [Complex64],
) {
    b0.mul_vec_into(xk, out);
    b1.mul_vec_into(xkm1, scratch);
    for (o, s) in out.iter_mut().zip(scratch.iter()) {
        *o += *s;
    }
}
