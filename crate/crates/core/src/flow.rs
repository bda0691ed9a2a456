//! Continuous-time evolution of lattice states.
//!
//! Two independent integrators are provided. `ExpmCascade` evaluates the
//! matrix exponential of the two-banded block operator inside the algebra
//! of truncated band series: because information only flows downward
//! along the lattice, truncating the band index is exact for every band
//! it keeps, so the window values carry no spatial truncation error at
//! all; the constant tails are closed off in closed form through the
//! dense exponential of `A0 + A1`. `AdaptiveRk` integrates the equations
//! of motion on an extended window with an embedded Dormand-Prince pair
//! at tight tolerances and evolves the tail value as one extra block.
//! Agreement between the two is a strong end-to-end check since they
//! share no machinery beyond the derivative definition.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::characteristic::{CoupledSystem, TimeKind};
use crate::error::{Error, Result};
use crate::expm::{matrix_exp, scaling_exponent, PADE13};
use crate::lattice::{LatticeState, TailKind, DEFAULT_WINDOW_CAP};
use crate::matrix::ComplexMatrix;

/// Relative tolerance of the embedded Runge-Kutta integrator.
pub const RK_RTOL: f64 = 1e-11;
/// Absolute tolerance of the embedded Runge-Kutta integrator.
pub const RK_ATOL: f64 = 1e-13;

/// Band-tail threshold: the window is extended until the neglected bands
/// of the exponential are below this relative size.
const BAND_TAIL_TOL: f64 = 1e-13;

/// Integration scheme for [`evolve_continuous`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowMethod {
    /// Exponential of the band operator in the truncated band-series
    /// algebra (Pade 13 with scaling and squaring).
    ExpmCascade,
    /// Embedded Dormand-Prince 5(4) pair on the extended window.
    AdaptiveRk,
}

/// States of a continuous evolution at the requested times (plus the
/// initial state at time zero).
#[derive(Clone, Debug)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<LatticeState>,
    pub method: FlowMethod,
}

/// Evolves `x0` under `x' = A0 x_k + A1 x_{k-1}` and reports the state at
/// each requested time. Times must be finite, positive and strictly
/// increasing; the initial state must have constant tails.
pub fn evolve_continuous(
    x0: &LatticeState,
    system: &CoupledSystem,
    times: &[f64],
    method: FlowMethod,
) -> Result<FlowTrajectory> {
    if system.kind() != TimeKind::Continuous {
        return Err(Error::InvalidInput("continuous evolution needs a continuous system"));
    }
    if x0.block_dim() != system.dim() {
        return Err(Error::InvalidInput("block dimensions must match the state"));
    }
    if !matches!(x0.tail_kind(), TailKind::Constant) {
        return Err(Error::UnsupportedTail);
    }
    let mut prev = 0.0;
    for &t in times {
        if !(t.is_finite() && t > prev) {
            return Err(Error::InvalidInput("times must be finite, positive and increasing"));
        }
        prev = t;
    }
    let mut out_times = Vec::with_capacity(times.len() + 1);
    let mut states = Vec::with_capacity(times.len() + 1);
    out_times.push(0.0);
    states.push(x0.clone());
    if !times.is_empty() {
        let t_final = *times.last().expect("nonempty");
        let coupling = system.sub().op_norm2();
        let depth = band_depth(coupling * t_final);
        let needed = x0.window_len() + depth;
        if needed > DEFAULT_WINDOW_CAP {
            return Err(Error::WindowOverflow { needed, cap: DEFAULT_WINDOW_CAP });
        }
        match method {
            FlowMethod::ExpmCascade => {
                for &t in times {
                    out_times.push(t);
                    states.push(cascade_state(x0, system, t, depth)?);
                }
            }
            FlowMethod::AdaptiveRk => {
                let rk = rk_states(x0, system, times, depth)?;
                for (&t, s) in times.iter().zip(rk) {
                    out_times.push(t);
                    states.push(s);
                }
            }
        }
    }
    Ok(FlowTrajectory { times: out_times, states, method })
}

/// `||x'(0)||` for the given state: one application of the band operator.
pub fn derivative_norm(state: &LatticeState, system: &CoupledSystem) -> Result<f64> {
    if system.kind() != TimeKind::Continuous {
        return Err(Error::InvalidInput("derivative norms need a continuous system"));
    }
    Ok(state
        .apply_blocks(system.diag(), system.sub(), DEFAULT_WINDOW_CAP)?
        .lp_norm())
}

/// Smallest band index past the peak of `x^j / j!` whose value drops
/// below the band-tail threshold: influence beyond that many sites is
/// negligible at the working accuracy.
fn band_depth(x: f64) -> usize {
    if !(x > 0.0) {
        return 4;
    }
    let ln_tol = BAND_TAIL_TOL.ln();
    let ln_x = x.ln();
    let mut ln_fact = 0.0;
    let mut j = 0usize;
    loop {
        j += 1;
        ln_fact += (j as f64).ln();
        if (j as f64) >= x && (j as f64) * ln_x - ln_fact <= ln_tol {
            return j;
        }
        if j > 4_000_000 {
            return j;
        }
    }
}

// Band-series helpers. A sequence of `len` blocks represents the
// operator `sum_j S^j B_j` with `S` the right shift; products truncate at
// `len`, which is exact for every retained band.

fn seq_zero(m: usize, len: usize) -> Vec<ComplexMatrix> {
    vec![ComplexMatrix::zeros(m); len]
}

fn seq_identity(m: usize, len: usize, c: f64) -> Vec<ComplexMatrix> {
    let mut s = seq_zero(m, len);
    s[0] = ComplexMatrix::identity(m).scale(Complex64::new(c, 0.0));
    s
}

fn seq_mul(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let len = a.len();
    let m = a[0].dim();
    let mut out = seq_zero(m, len);
    for i in 0..len {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..len - i {
            if b[j].is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&a[i].mul(&b[j]));
        }
    }
    out
}

fn seq_add(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn seq_scale(a: &[ComplexMatrix], c: f64) -> Vec<ComplexMatrix> {
    let f = Complex64::new(c, 0.0);
    a.iter().map(|x| x.scale(f)).collect()
}

/// Solves `q * f = p` in the band algebra by block forward substitution;
/// only `q`'s leading band needs to be invertible.
fn seq_solve(q: &[ComplexMatrix], p: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let len = q.len();
    let lu = q[0].lu().map_err(|e| match e {
        Error::Singular => Error::OverflowRisk,
        other => other,
    })?;
    let mut f: Vec<ComplexMatrix> = Vec::with_capacity(len);
    for k in 0..len {
        let mut rhs = p[k].clone();
        for j in 1..=k {
            if q[j].is_zero() || f[k - j].is_zero() {
                continue;
            }
            rhs = rhs.sub(&q[j].mul(&f[k - j]));
        }
        f.push(lu.solve_mat(&rhs));
    }
    Ok(f)
}

/// All bands `Phi_0 ..= Phi_{len-1}` of `exp(t L)` where `L` is the band
/// operator with diagonal `a0` and subdiagonal `a1`: Pade 13 with scaling
/// and squaring carried out in the band algebra.
fn exponential_bands(
    a0: &ComplexMatrix,
    a1: &ComplexMatrix,
    t: f64,
    len: usize,
) -> Result<Vec<ComplexMatrix>> {
    let m = a0.dim();
    let eta = t * (a0.one_norm() + a1.one_norm());
    let s = scaling_exponent(eta);
    let factor = Complex64::new(t * (0.5f64).powi(s), 0.0);
    let mut a = seq_zero(m, len);
    a[0] = a0.scale(factor);
    if len > 1 {
        a[1] = a1.scale(factor);
    }
    let a2 = seq_mul(&a, &a);
    let a4 = seq_mul(&a2, &a2);
    let a6 = seq_mul(&a2, &a4);
    let b = &PADE13;
    let u_poly = seq_add(
        &seq_mul(
            &a6,
            &seq_add(
                &seq_add(&seq_scale(&a6, b[13]), &seq_scale(&a4, b[11])),
                &seq_scale(&a2, b[9]),
            ),
        ),
        &seq_add(
            &seq_add(&seq_scale(&a6, b[7]), &seq_scale(&a4, b[5])),
            &seq_add(&seq_scale(&a2, b[3]), &seq_identity(m, len, b[1])),
        ),
    );
    let u = seq_mul(&a, &u_poly);
    let v = seq_add(
        &seq_mul(
            &a6,
            &seq_add(
                &seq_add(&seq_scale(&a6, b[12]), &seq_scale(&a4, b[10])),
                &seq_scale(&a2, b[8]),
            ),
        ),
        &seq_add(
            &seq_add(&seq_scale(&a6, b[6]), &seq_scale(&a4, b[4])),
            &seq_add(&seq_scale(&a2, b[2]), &seq_identity(m, len, b[0])),
        ),
    );
    let p = seq_add(&v, &u);
    let mut q = v;
    for (qk, uk) in q.iter_mut().zip(&u) {
        *qk = qk.sub(uk);
    }
    let mut f = seq_solve(&q, &p)?;
    for _ in 0..s {
        f = seq_mul(&f, &f);
    }
    for band in &f {
        if !band.is_finite() {
            return Err(Error::OverflowRisk);
        }
    }
    Ok(f)
}

/// One cascade evaluation: exact band sums over the window plus the
/// closed-form tail correction `(E - sum of used bands) a`.
fn cascade_state(
    x0: &LatticeState,
    system: &CoupledSystem,
    t: f64,
    depth: usize,
) -> Result<LatticeState> {
    let m = x0.block_dim();
    let w = x0.window_len();
    let e = matrix_exp(&system.diag().add(system.sub()), t)?;
    let mut len = w + depth;
    let bands = loop {
        let bands = exponential_bands(system.diag(), system.sub(), t, len)?;
        let max_band = bands.iter().map(ComplexMatrix::max_norm).fold(0.0, f64::max);
        let tail_ok = bands[len - 1].max_norm() <= BAND_TAIL_TOL * (1.0 + max_band);
        if tail_ok {
            break bands;
        }
        len *= 2;
        if len > DEFAULT_WINDOW_CAP {
            return Err(Error::WindowOverflow { needed: len, cap: DEFAULT_WINDOW_CAP });
        }
    };
    let out_w = bands.len();
    // Consistency: the band sums must reproduce the dense exponential of
    // A0 + A1 (the value of the series at shift = identity).
    let mut band_sum = ComplexMatrix::zeros(m);
    for band in &bands {
        band_sum = band_sum.add(band);
    }
    if band_sum.sub(&e).max_norm() > 1e-9 * (1.0 + e.max_norm()) {
        return Err(Error::ToleranceNotMet);
    }
    let a = x0.left_tail();
    let r = x0.right_tail();
    let window = x0.window();
    let mut values = vec![Complex64::zero(); out_w * m];
    let mut prefix = ComplexMatrix::zeros(m);
    let mut block = vec![Complex64::zero(); m];
    for kk in 0..out_w {
        prefix = prefix.add(&bands[kk]);
        let acc = &mut values[kk * m..(kk + 1) * m];
        for j in 0..=kk {
            let site = kk - j;
            let src: &[Complex64] =
                if site < w { &window[site * m..(site + 1) * m] } else { r };
            bands[j].mul_vec_into(src, &mut block);
            for (av, bv) in acc.iter_mut().zip(&block) {
                *av += *bv;
            }
        }
        // Everything left of the window contributes (E - prefix) a.
        e.sub(&prefix).mul_vec_into(a, &mut block);
        for (av, bv) in acc.iter_mut().zip(&block) {
            *av += *bv;
        }
    }
    LatticeState::new(
        x0.lo(),
        m,
        values,
        e.mul_vec(a),
        e.mul_vec(r),
        TailKind::Constant,
        x0.norm_p(),
    )
}

// Dormand-Prince 5(4) data. The dynamics is autonomous, so the stage
// abscissae are never needed.
const RK_A2: [f64; 1] = [1.0 / 5.0];
const RK_A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const RK_A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const RK_A5: [f64; 4] =
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const RK_A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const RK_B: [f64; 6] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const RK_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Extended-window integration. Layout of the flat vector: one block for
/// the left tail value, `w + depth` site blocks, one block for the right
/// tail value; the tail blocks evolve under `A0 + A1` (the dynamics of a
/// constant sequence), the first site reads the left tail block as its
/// neighbour.
struct RkSystem<'a> {
    a0: &'a ComplexMatrix,
    a1: &'a ComplexMatrix,
    total: ComplexMatrix,
    sites: usize,
    m: usize,
}

impl<'a> RkSystem<'a> {
    fn deriv(&self, y: &[Complex64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        let m = self.m;
        self.total.mul_vec_into(&y[..m], &mut out[..m]);
        for i in 0..self.sites {
            let off = (i + 1) * m;
            let xk = &y[off..off + m];
            let xkm1 = &y[off - m..off];
            self.a0.mul_vec_into(xk, &mut out[off..off + m]);
            self.a1.mul_vec_into(xkm1, scratch);
            for (o, s) in out[off..off + m].iter_mut().zip(scratch.iter()) {
                *o += *s;
            }
        }
        let off = (self.sites + 1) * m;
        self.total.mul_vec_into(&y[off..off + m], &mut out[off..off + m]);
    }
}

fn rk_states(
    x0: &LatticeState,
    system: &CoupledSystem,
    times: &[f64],
    depth: usize,
) -> Result<Vec<LatticeState>> {
    let m = x0.block_dim();
    let w = x0.window_len();
    let sites = w + depth;
    let dim = (sites + 2) * m;
    let sys = RkSystem {
        a0: system.diag(),
        a1: system.sub(),
        total: system.diag().add(system.sub()),
        sites,
        m,
    };
    let mut y = Vec::with_capacity(dim);
    y.extend_from_slice(x0.left_tail());
    y.extend_from_slice(x0.window());
    for _ in 0..depth {
        y.extend_from_slice(x0.right_tail());
    }
    y.extend_from_slice(x0.right_tail());
    let t_final = *times.last().expect("nonempty in caller");
    let h_min = 1e-12 * t_final.max(1.0);
    let mut h = (times[0] / 10.0).min(0.05).max(1e-8);
    let mut t = 0.0f64;
    let mut scratch = vec![Complex64::zero(); m];
    let mut k: Vec<Vec<Complex64>> = (0..7).map(|_| vec![Complex64::zero(); dim]).collect();
    let mut ytmp = vec![Complex64::zero(); dim];
    let mut y5 = vec![Complex64::zero(); dim];
    {
        let (k1, _) = k.split_at_mut(1);
        sys.deriv(&y, &mut k1[0], &mut scratch);
    }
    let mut out = Vec::with_capacity(times.len());
    for &t_target in times {
        loop {
            let gap = t_target - t;
            if gap <= 1e-14 * t_target.max(1.0) {
                break;
            }
            let clipped = gap < h;
            let step = h.min(gap);
            if step < h_min {
                return Err(Error::ToleranceNotMet);
            }
            let err = rk_step(&sys, &y, step, &mut k, &mut ytmp, &mut y5, &mut scratch);
            let factor = if !err.is_finite() {
                0.2
            } else if err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            if err <= 1.0 {
                t += step;
                y.copy_from_slice(&y5);
                let (head, tail) = k.split_at_mut(6);
                head[0].copy_from_slice(&tail[0]);
                // A step clipped to hit the output time says nothing new
                // about the error-optimal size.
                if !clipped {
                    h = step * factor;
                }
            } else {
                h = step * factor;
            }
        }
        t = t_target;
        let values = y[m..(sites + 1) * m].to_vec();
        let left = y[..m].to_vec();
        let right = y[(sites + 1) * m..].to_vec();
        out.push(LatticeState::new(
            x0.lo(),
            m,
            values,
            left,
            right,
            TailKind::Constant,
            x0.norm_p(),
        )?);
    }
    Ok(out)
}

/// One embedded step: fills `k[1..7]` (with `k[0]` the stored FSAL
/// derivative), writes the fifth-order result into `y5` and returns the
/// scaled error norm.
fn rk_step(
    sys: &RkSystem<'_>,
    y: &[Complex64],
    h: f64,
    k: &mut [Vec<Complex64>],
    ytmp: &mut [Complex64],
    y5: &mut [Complex64],
    scratch: &mut [Complex64],
) -> f64 {
    let dim = y.len();
    let stage = |k: &[Vec<Complex64>], coeffs: &[f64], ytmp: &mut [Complex64]| {
        for i in 0..dim {
            let mut acc = Complex64::zero();
            for (c, kv) in coeffs.iter().zip(k) {
                if *c != 0.0 {
                    acc += kv[i] * *c;
                }
            }
            ytmp[i] = y[i] + acc * h;
        }
    };
    stage(k, &RK_A2, ytmp);
    {
        let (head, rest) = k.split_at_mut(1);
        let _ = head;
        sys.deriv(ytmp, &mut rest[0], scratch);
    }
    stage(k, &RK_A3, ytmp);
    {
        let (head, rest) = k.split_at_mut(2);
        let _ = head;
        sys.deriv(ytmp, &mut rest[0], scratch);
    }
    stage(k, &RK_A4, ytmp);
    {
        let (head, rest) = k.split_at_mut(3);
        let _ = head;
        sys.deriv(ytmp, &mut rest[0], scratch);
    }
    stage(k, &RK_A5, ytmp);
    {
        let (head, rest) = k.split_at_mut(4);
        let _ = head;
        sys.deriv(ytmp, &mut rest[0], scratch);
    }
    stage(k, &RK_A6, ytmp);
    {
        let (head, rest) = k.split_at_mut(5);
        let _ = head;
        sys.deriv(ytmp, &mut rest[0], scratch);
    }
    // Fifth-order solution (b7 = 0).
    for i in 0..dim {
        let mut acc = Complex64::zero();
        for (c, kv) in RK_B.iter().zip(k.iter()) {
            if *c != 0.0 {
                acc += kv[i] * *c;
            }
        }
        y5[i] = y[i] + acc * h;
    }
    {
        let (head, rest) = k.split_at_mut(6);
        let _ = head;
        sys.deriv(y5, &mut rest[0], scratch);
    }
    let mut sum = 0.0f64;
    for i in 0..dim {
        let mut err = Complex64::zero();
        for (c, kv) in RK_E.iter().zip(k.iter()) {
            if *c != 0.0 {
                err += kv[i] * *c;
            }
        }
        let scale = RK_ATOL + RK_RTOL * y[i].norm().max(y5[i].norm());
        let ratio = (err * h).norm() / scale;
        sum += ratio * ratio;
    }
    (sum / dim as f64).sqrt()
}
