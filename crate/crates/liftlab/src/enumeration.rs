//! Complete, duplicate-free enumeration of SL₂(ℤ) and SL₃(ℤ) in norm
//! balls, with optional congruence filters. This is the hot path.
//!
//! The SL₃ kernel enumerates the first two rows over the box, prunes pairs
//! whose cross product rules out a unimodular completion, and recovers every
//! admissible third row from the rank-2 solution lattice of c·v = 0:
//! a particular solution comes from the extended gcd, the kernel basis is
//! Lagrange-reduced, and coefficient ranges come from Cramer bounds using
//! the largest cross-product coordinate as the minor. Each matrix is emitted
//! by exactly one (r₁, r₂) pair, so the stream needs no deduplication.
//!
//! Streams are deterministic: the r₁ leading coordinate partitions the work,
//! partitions are processed in ascending order (or merged in that order when
//! running on several threads), and consumers must not assume any finer
//! global ordering.

use rayon::prelude::*;

use crate::exact::IntMat;
use crate::finite::{reduce_mod, Flag, ProjPoint};
use crate::{Error, Result};

/// Box bound guard for the SL₃ kernel (desk bound).
pub const MAX_SL3_T: i64 = 40;
/// Box bound guard for the SL₂ scan.
pub const MAX_SL2_T: i64 = 100_000;
/// Largest delta-ball radius whose enclosing box stays within [`MAX_SL3_T`].
pub const MAX_DELTA: i64 = 178;

/// Which gauge a ball is cut by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    Inf,
    Delta,
}

impl Gauge {
    pub fn as_str(&self) -> &'static str {
        match self {
            Gauge::Inf => "inf",
            Gauge::Delta => "delta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Sl2,
    Sl3,
}

/// Congruence filter applied to an enumeration stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filter {
    None,
    /// γ ≡ I mod q. Folded into the row loops, which shrink by ~q⁴.
    IdentityMod(u64),
    /// Φ_q(γ) fixes the given projective point (checked on the full matrix).
    FixesPoint(ProjPoint),
    /// Φ_q(γ) fixes the given flag.
    FixesFlag(Flag),
}

impl Filter {
    fn modulus(&self) -> Option<u64> {
        match self {
            Filter::None => None,
            Filter::IdentityMod(q) => Some(*q),
            Filter::FixesPoint(p) => Some(p.q()),
            Filter::FixesFlag(f) => Some(f.q()),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(q) = self.modulus() {
            if !crate::finite::is_prime(q) {
                return Err(Error::NotPrime(q));
            }
        }
        Ok(())
    }

    /// Exact membership test, usable as an independent post-filter.
    pub fn accepts(&self, m: &IntMat) -> bool {
        match self {
            Filter::None => true,
            Filter::IdentityMod(q) => {
                let q = *q as i64;
                let n = m.dim() as usize;
                m.entries().iter().enumerate().all(|(i, &v)| {
                    let want = i64::from(i / n == i % n);
                    (v - want).rem_euclid(q) == 0
                })
            }
            Filter::FixesPoint(p) => reduce_mod(m, p.q())
                .and_then(|mm| mm.act_point(p))
                .map(|img| img == *p)
                .unwrap_or(false),
            Filter::FixesFlag(f) => reduce_mod(m, f.q())
                .and_then(|mm| mm.act_flag(f))
                .map(|img| img == *f)
                .unwrap_or(false),
        }
    }
}

/// A ball specification: group, gauge, radius and filter.
#[derive(Clone, Debug)]
pub struct BallSpec {
    pub group: Group,
    pub gauge: Gauge,
    pub t: i64,
    pub filter: Filter,
}

impl BallSpec {
    pub fn validate(&self) -> Result<()> {
        if self.t < 1 {
            return Err(Error::Config("ball radius must be >= 1".into()));
        }
        self.filter.validate()?;
        match (self.group, self.gauge) {
            (Group::Sl2, Gauge::Inf) => {
                if self.t > MAX_SL2_T {
                    return Err(Error::BoundTooLarge(format!(
                        "SL2 box bound {} exceeds {MAX_SL2_T}",
                        self.t
                    )));
                }
                if matches!(self.filter, Filter::FixesPoint(_) | Filter::FixesFlag(_)) {
                    return Err(Error::Config(
                        "point/flag filters apply to the SL3 action".into(),
                    ));
                }
                Ok(())
            }
            (Group::Sl2, Gauge::Delta) => Err(Error::Config(
                "the delta gauge ball is implemented for SL3".into(),
            )),
            (Group::Sl3, Gauge::Inf) => check_sl3_t(self.t),
            (Group::Sl3, Gauge::Delta) => {
                check_delta(self.t)?;
                Ok(())
            }
        }
    }
}

fn check_sl3_t(t: i64) -> Result<()> {
    if !(1..=MAX_SL3_T).contains(&t) {
        return Err(Error::BoundTooLarge(format!(
            "SL3 box bound {t} outside 1..={MAX_SL3_T}"
        )));
    }
    Ok(())
}

fn check_delta(d: i64) -> Result<i64> {
    if d < 1 || d > MAX_DELTA {
        return Err(Error::BoundTooLarge(format!(
            "delta bound {d} outside 1..={MAX_DELTA}"
        )));
    }
    Ok(inf_bound_for_delta(d))
}

/// Smallest box bound that provably contains the delta ball of radius d:
/// inside the ball, ‖γ‖∞ ≤ 2‖γ⁻¹‖∞² forces ‖γ‖∞³ ≤ 2d², and ‖γ⁻¹‖∞ ≥ 1
/// forces ‖γ‖∞ ≤ d.
pub fn inf_bound_for_delta(d: i64) -> i64 {
    let mut s = (((2 * d * d) as f64).cbrt().ceil()) as i64;
    while s > 1 && (s - 1) * (s - 1) * (s - 1) >= 2 * d * d {
        s -= 1;
    }
    while s * s * s < 2 * d * d {
        s += 1;
    }
    s.min(d).max(1)
}

// ---------------------------------------------------------------------------
// SL2
// ---------------------------------------------------------------------------

/// Stream every (a b; c d) in SL₂(ℤ) with max|entry| ≤ t, each exactly once.
///
/// For a ≠ 0 the last entry is solved from ad = 1 + bc with a divisibility
/// check; a = 0 forces b = −c = ±1 with d free.
pub fn scan_sl2(t: i64, filter: &Filter, mut visit: impl FnMut(&IntMat)) -> Result<()> {
    let spec = BallSpec {
        group: Group::Sl2,
        gauge: Gauge::Inf,
        t,
        filter: filter.clone(),
    };
    spec.validate()?;
    let q = match filter {
        Filter::None => 1,
        Filter::IdentityMod(q) => *q as i64,
        _ => unreachable!("validated above"),
    };
    let a_vals = residue_range(t, 1, q);
    let bc_vals = residue_range(t, 0, q);
    for &a in &a_vals {
        if a == 0 {
            continue;
        }
        for &b in &bc_vals {
            for &c in &bc_vals {
                let n = 1 + b * c;
                if n % a == 0 {
                    let d = n / a;
                    if d.abs() <= t && (d - 1).rem_euclid(q) == 0 {
                        visit(&IntMat::new2([a, b, c, d]).expect("within guard"));
                    }
                }
            }
        }
    }
    // a = 0 forces bc = -1; compatible with the congruence only for q = 1.
    if q == 1 {
        for (b, c) in [(1i64, -1i64), (-1, 1)] {
            for d in -t..=t {
                visit(&IntMat::new2([0, b, c, d]).expect("within guard"));
            }
        }
    }
    Ok(())
}

/// Collected SL₂ ball (small t only; the stream form scales further).
pub fn enumerate_sl2(t: i64) -> Result<Vec<IntMat>> {
    let mut out = Vec::new();
    scan_sl2(t, &Filter::None, |m| out.push(*m))?;
    Ok(out)
}

fn residue_range(t: i64, residue: i64, q: i64) -> Vec<i64> {
    debug_assert!(q >= 1);
    let start = -t + (residue - (-t)).rem_euclid(q);
    (0..)
        .map(|k| start + k * q)
        .take_while(|&v| v <= t)
        .collect()
}

// ---------------------------------------------------------------------------
// SL3 oracle
// ---------------------------------------------------------------------------

/// Reference enumeration by brute force over all entries; testing only.
pub fn enumerate_sl3_oracle(t: i64) -> Result<Vec<IntMat>> {
    if !(1..=3).contains(&t) {
        return Err(Error::BoundTooLarge(format!(
            "oracle box bound {t} outside 1..=3"
        )));
    }
    let vals: Vec<i64> = (-t..=t).collect();
    let mut out = Vec::new();
    let mut r1 = [0i64; 3];
    let mut r2 = [0i64; 3];
    for &a in &vals {
        r1[0] = a;
        for &b in &vals {
            r1[1] = b;
            for &c in &vals {
                r1[2] = c;
                for &d in &vals {
                    r2[0] = d;
                    for &e in &vals {
                        r2[1] = e;
                        for &f in &vals {
                            r2[2] = f;
                            let cx = cross(r1, r2);
                            for &g in &vals {
                                for &h in &vals {
                                    for &i in &vals {
                                        if cx[0] * g + cx[1] * h + cx[2] * i == 1 {
                                            out.push(IntMat::from_rows3_unchecked(
                                                r1,
                                                r2,
                                                [g, h, i],
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// SL3 kernel
// ---------------------------------------------------------------------------

/// Validated parameters for an SL₃ scan.
#[derive(Clone, Debug)]
pub struct Sl3Params {
    t: i64,
    filter: Filter,
    delta_cap: Option<i64>,
}

impl Sl3Params {
    /// Infinity-norm ball ‖γ‖∞ ≤ t.
    pub fn inf_ball(t: i64, filter: Filter) -> Result<Self> {
        check_sl3_t(t)?;
        filter.validate()?;
        Ok(Sl3Params {
            t,
            filter,
            delta_cap: None,
        })
    }

    /// Delta ball ‖γ‖∞·‖γ⁻¹‖∞ ≤ d, enumerated inside its enclosing box.
    pub fn delta_ball(d: i64, filter: Filter) -> Result<Self> {
        let s = check_delta(d)?;
        filter.validate()?;
        Ok(Sl3Params {
            t: s,
            filter,
            delta_cap: Some(d),
        })
    }

    pub fn box_bound(&self) -> i64 {
        self.t
    }

    fn compile(&self) -> ScanCtx {
        let (r1_res, r2_res, r3_res) = match &self.filter {
            Filter::IdentityMod(q) => {
                let q = *q as i64;
                (Some(([1, 0, 0], q)), Some(([0, 1, 0], q)), Some(([0, 0, 1], q)))
            }
            _ => (None, None, None),
        };
        let axis = |res: Option<([i64; 3], i64)>, i: usize| match res {
            Some((r, q)) => residue_range(self.t, r[i], q),
            None => (-self.t..=self.t).collect(),
        };
        let line_cond = match &self.filter {
            Filter::FixesPoint(p) => Some(LineCond::new(p.q(), p.coords())),
            Filter::FixesFlag(f) => Some(LineCond::new(f.q(), f.line.coords())),
            _ => None,
        };
        ScanCtx {
            t: self.t,
            r1_axes: [axis(r1_res, 0), axis(r1_res, 1), axis(r1_res, 2)],
            r2_axes: [axis(r2_res, 0), axis(r2_res, 1), axis(r2_res, 2)],
            r3_res,
            delta_cap: self.delta_cap,
            line_cond,
            filter: self.filter.clone(),
        }
    }
}

/// Early-reject data for the fixes-point/flag filters: the proportionality
/// condition on the first two rows of γ·v, a necessary condition that never
/// drops a true match.
struct LineCond {
    q: i64,
    v: [i64; 3],
}

impl LineCond {
    fn new(q: u64, coords: [u64; 3]) -> Self {
        LineCond {
            q: q as i64,
            v: [coords[0] as i64, coords[1] as i64, coords[2] as i64],
        }
    }

    #[inline]
    fn admits(&self, r1: [i64; 3], r2: [i64; 3]) -> bool {
        let q = self.q;
        let w1 = (r1[0] * self.v[0] + r1[1] * self.v[1] + r1[2] * self.v[2]).rem_euclid(q);
        let w2 = (r2[0] * self.v[0] + r2[1] * self.v[1] + r2[2] * self.v[2]).rem_euclid(q);
        if (w1 * self.v[1] - w2 * self.v[0]).rem_euclid(q) != 0 {
            return false;
        }
        if self.v[0] == 0 && self.v[1] == 0 && (w1 != 0 || w2 != 0) {
            return false;
        }
        true
    }
}

struct ScanCtx {
    t: i64,
    r1_axes: [Vec<i64>; 3],
    r2_axes: [Vec<i64>; 3],
    r3_res: Option<([i64; 3], i64)>,
    delta_cap: Option<i64>,
    line_cond: Option<LineCond>,
    filter: Filter,
}

#[inline]
fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn inf3(a: [i64; 3]) -> i64 {
    a[0].abs().max(a[1].abs()).max(a[2].abs())
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Extended gcd: returns (g, s, t) with g ≥ 0 and a·s + b·t = g.
fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        let tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        let tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        let tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

#[inline]
fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if a % b != 0 && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

#[inline]
fn div_ceil(a: i64, b: i64) -> i64 {
    let q = a / b;
    if a % b != 0 && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

/// Nearest integer to a/b (ties toward -inf); b > 0.
#[inline]
fn div_round(a: i64, b: i64) -> i64 {
    div_floor(2 * a + b, 2 * b)
}

/// Basis of the kernel lattice {v : c·v = 0} together with a particular
/// solution of c·v = 1. Requires gcd(c) = 1, c ≠ 0.
fn kernel_and_particular(c: [i64; 3]) -> ([i64; 3], [i64; 3], [i64; 3]) {
    if c[0] == 0 && c[1] == 0 {
        // c = (0, 0, ±1)
        let s = c[2].signum();
        return ([1, 0, 0], [0, 1, 0], [0, 0, s]);
    }
    let (d, s, t) = egcd(c[0], c[1]);
    let v1 = [c[1] / d, -c[0] / d, 0];
    let v2 = [s * c[2], t * c[2], -d];
    let (g, u, v) = egcd(d, c[2]);
    debug_assert_eq!(g, 1, "primitivity is checked before completion");
    let p = [u * s, u * t, v];
    debug_assert_eq!(dot(c, v1), 0);
    debug_assert_eq!(dot(c, v2), 0);
    debug_assert_eq!(dot(c, p), 1);
    (v1, v2, p)
}

/// Lagrange (Gauss) reduction of a rank-2 lattice basis in Z³.
fn lagrange_reduce(b1: &mut [i64; 3], b2: &mut [i64; 3]) {
    for _ in 0..64 {
        if dot(*b1, *b1) > dot(*b2, *b2) {
            std::mem::swap(b1, b2);
        }
        let n = dot(*b1, *b1);
        debug_assert!(n > 0);
        let mu = div_round(dot(*b1, *b2), n);
        if mu == 0 {
            return;
        }
        for i in 0..3 {
            b2[i] -= mu * b1[i];
        }
    }
    debug_assert!(false, "lattice reduction failed to settle");
}

#[inline]
fn babai_step(p: &mut [i64; 3], u: [i64; 3]) {
    let n = dot(u, u);
    let mu = div_round(dot(*p, u), n);
    for i in 0..3 {
        p[i] -= mu * u[i];
    }
}

/// Emit every completion of (r1, r2) inside the box, subject to filters.
#[inline]
fn complete_pair(ctx: &ScanCtx, r1: [i64; 3], r2: [i64; 3], visit: &mut impl FnMut(&IntMat)) {
    let c = cross(r1, r2);
    if c == [0, 0, 0] {
        return;
    }
    let c_norm = inf3(c);
    if let Some(cap) = ctx.delta_cap {
        // c is a column of the inverse, so delta >= max(row norms) * |c|.
        if inf3(r1).max(inf3(r2)) * c_norm > cap {
            return;
        }
    }
    if gcd(gcd(c[0], c[1]), c[2]) != 1 {
        return;
    }
    if let Some(lc) = &ctx.line_cond {
        if !lc.admits(r1, r2) {
            return;
        }
    }
    let (mut u1, mut u2, mut p) = kernel_and_particular(c);
    lagrange_reduce(&mut u1, &mut u2);
    babai_step(&mut p, u1);
    babai_step(&mut p, u2);
    babai_step(&mut p, u1);
    {
        let cc = cross(u1, u2);
        debug_assert!(
            cc == c || cc == [-c[0], -c[1], -c[2]],
            "reduced basis must still span the kernel lattice"
        );
    }
    // Cramer bound for the u1 coefficient, using the largest coordinate of
    // c as the 2x2 minor of (u1, u2); unit slack absorbs rounding.
    let k = (0..3).max_by_key(|&i| c[i].abs()).unwrap();
    let (i, j) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let t = ctx.t;
    let s_max =
        (u2[j].abs() * (t + p[i].abs()) + u2[i].abs() * (t + p[j].abs())) / c_norm + 1;
    for s in -s_max..=s_max {
        let w = [p[0] + s * u1[0], p[1] + s * u1[1], p[2] + s * u1[2]];
        // Exact range of the u2 coefficient keeping every coordinate in the box.
        let mut lo = i64::MIN;
        let mut hi = i64::MAX;
        let mut empty = false;
        for m in 0..3 {
            let u = u2[m];
            if u == 0 {
                if w[m].abs() > t {
                    empty = true;
                    break;
                }
            } else if u > 0 {
                lo = lo.max(div_ceil(-t - w[m], u));
                hi = hi.min(div_floor(t - w[m], u));
            } else {
                lo = lo.max(div_ceil(t - w[m], u));
                hi = hi.min(div_floor(-t - w[m], u));
            }
        }
        if empty || lo > hi {
            continue;
        }
        for tt in lo..=hi {
            let r3 = [w[0] + tt * u2[0], w[1] + tt * u2[1], w[2] + tt * u2[2]];
            debug_assert!(inf3(r3) <= t);
            debug_assert_eq!(dot(c, r3), 1);
            if let Some((res, q)) = ctx.r3_res {
                if (r3[0] - res[0]) % q != 0
                    || (r3[1] - res[1]) % q != 0
                    || (r3[2] - res[2]) % q != 0
                {
                    continue;
                }
            }
            if let Some(cap) = ctx.delta_cap {
                let inv_norm = c_norm.max(inf3(cross(r2, r3))).max(inf3(cross(r3, r1)));
                let norm = inf3(r1).max(inf3(r2)).max(inf3(r3));
                if norm * inv_norm > cap {
                    continue;
                }
            }
            let m = IntMat::from_rows3_unchecked(r1, r2, r3);
            match &ctx.filter {
                Filter::FixesPoint(_) | Filter::FixesFlag(_) => {
                    if !ctx.filter.accepts(&m) {
                        continue;
                    }
                }
                _ => {}
            }
            visit(&m);
        }
    }
}

fn scan_partition(ctx: &ScanCtx, a0: i64, visit: &mut impl FnMut(&IntMat)) {
    let mut r1 = [a0, 0, 0];
    let mut r2 = [0i64; 3];
    for &b in &ctx.r1_axes[1] {
        r1[1] = b;
        for &c in &ctx.r1_axes[2] {
            r1[2] = c;
            for &d in &ctx.r2_axes[0] {
                r2[0] = d;
                for &e in &ctx.r2_axes[1] {
                    r2[1] = e;
                    for &f in &ctx.r2_axes[2] {
                        r2[2] = f;
                        complete_pair(ctx, r1, r2, visit);
                    }
                }
            }
        }
    }
}

/// Sequential scan in partition order.
pub fn scan_sl3(params: &Sl3Params, mut visit: impl FnMut(&IntMat)) -> Result<()> {
    let ctx = params.compile();
    for &a0 in &ctx.r1_axes[0] {
        scan_partition(&ctx, a0, &mut visit);
    }
    Ok(())
}

/// Parallel fold over the deterministic partitions: each partition folds
/// into its own accumulator, then accumulators merge in partition order, so
/// the result does not depend on the number of threads.
pub fn par_fold_sl3<A, MK, FO, MG>(params: &Sl3Params, make: MK, fold: FO, merge: MG) -> Result<A>
where
    A: Send,
    MK: Fn() -> A + Sync,
    FO: Fn(&mut A, &IntMat) + Sync,
    MG: Fn(A, A) -> A,
{
    let ctx = params.compile();
    let parts: Vec<A> = ctx.r1_axes[0]
        .par_iter()
        .map(|&a0| {
            let mut acc = make();
            scan_partition(&ctx, a0, &mut |m| fold(&mut acc, m));
            acc
        })
        .collect();
    parts
        .into_iter()
        .reduce(merge)
        .ok_or_else(|| Error::Config("empty scan".into()))
}

/// Number of matrices in the stream (parallel).
pub fn count_sl3(params: &Sl3Params) -> Result<u64> {
    par_fold_sl3(params, || 0u64, |acc, _| *acc += 1, |a, b| a + b)
}

/// Collected stream in partition order (parallel).
pub fn collect_sl3(params: &Sl3Params) -> Result<Vec<IntMat>> {
    par_fold_sl3(
        params,
        Vec::new,
        |acc, m| acc.push(*m),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )
}

/// Complete inf-norm ball ‖γ‖∞ ≤ t.
pub fn enumerate_sl3(t: i64) -> Result<Vec<IntMat>> {
    collect_sl3(&Sl3Params::inf_ball(t, Filter::None)?)
}

/// Complete delta ball ‖γ‖∞·‖γ⁻¹‖∞ ≤ d.
pub fn enumerate_delta_ball(d: i64) -> Result<Vec<IntMat>> {
    collect_sl3(&Sl3Params::delta_ball(d, Filter::None)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn key(m: &IntMat) -> Vec<i64> {
        m.entries().to_vec()
    }

    fn as_set(v: &[IntMat]) -> HashSet<Vec<i64>> {
        v.iter().map(key).collect()
    }

    #[test]
    fn sl2_t1_has_twenty_elements() {
        let ball = enumerate_sl2(1).unwrap();
        assert_eq!(ball.len(), 20);
        assert_eq!(as_set(&ball).len(), 20);
        assert!(ball.contains(&"0 -1; 1 0".parse().unwrap()));
        // independent brute force over all 3^4 tuples
        let mut brute = 0;
        for a in -1i64..=1 {
            for b in -1i64..=1 {
                for c in -1i64..=1 {
                    for d in -1i64..=1 {
                        if a * d - b * c == 1 {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(ball.len(), brute);
    }

    #[test]
    fn sl2_identity_filter_t2() {
        let mut out = Vec::new();
        scan_sl2(2, &Filter::IdentityMod(2), |m| out.push(*m)).unwrap();
        // brute force over a,d in {±1}, b,c in {-2,0,2}
        let mut brute = 0;
        for a in [-1i64, 1] {
            for d in [-1i64, 1] {
                for b in [-2i64, 0, 2] {
                    for c in [-2i64, 0, 2] {
                        if a * d - b * c == 1 {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(out.len(), brute);
        assert_eq!(out.len(), 10);
        for m in &out {
            assert!(Filter::IdentityMod(2).accepts(m));
        }
    }

    #[test]
    fn sl2_filter_equals_post_filter() {
        let all = enumerate_sl2(3).unwrap();
        let expected: Vec<_> = all
            .iter()
            .filter(|m| Filter::IdentityMod(3).accepts(m))
            .copied()
            .collect();
        let mut got = Vec::new();
        scan_sl2(3, &Filter::IdentityMod(3), |m| got.push(*m)).unwrap();
        assert_eq!(as_set(&got), as_set(&expected));
    }

    #[test]
    fn oracle_t1_contents() {
        let ball = enumerate_sl3_oracle(1).unwrap();
        assert!(ball.contains(&"1 1 0; 0 1 0; 0 0 1".parse().unwrap()));
        // all 24 even signed permutations are present
        let mut evens = 0;
        for m in &ball {
            let nonzero = m.entries().iter().filter(|&&v| v != 0).count();
            let is_perm = nonzero == 3
                && (0..3).all(|i| (0..3).filter(|&j| m.at(i, j) != 0).count() == 1);
            if is_perm {
                evens += 1;
            }
        }
        assert_eq!(evens, 24);
        for m in &ball {
            assert_eq!(m.det().unwrap(), 1);
        }
    }

    #[test]
    fn kernel_matches_oracle_t1() {
        let oracle = enumerate_sl3_oracle(1).unwrap();
        let fast = enumerate_sl3(1).unwrap();
        assert_eq!(fast.len(), as_set(&fast).len(), "no duplicates");
        assert_eq!(as_set(&fast), as_set(&oracle));
    }

    #[test]
    fn kernel_postconditions_t3() {
        let ball = enumerate_sl3(3).unwrap();
        assert_eq!(ball.len(), as_set(&ball).len());
        for m in &ball {
            assert_eq!(m.det().unwrap(), 1);
            assert!(m.norm_inf() <= 3);
        }
    }

    #[test]
    fn identity_filter_equals_post_filter_sl3() {
        let all = enumerate_sl3(4).unwrap();
        let expected: HashSet<_> = all
            .iter()
            .filter(|m| Filter::IdentityMod(2).accepts(m))
            .map(key)
            .collect();
        let got = collect_sl3(&Sl3Params::inf_ball(4, Filter::IdentityMod(2)).unwrap()).unwrap();
        assert_eq!(as_set(&got), expected);
    }

    #[test]
    fn fixes_point_filter_equals_post_filter() {
        let p = crate::finite::parse_point("0:0:1", 5).unwrap();
        let all = enumerate_delta_ball(5).unwrap();
        let expected: HashSet<_> = all
            .iter()
            .filter(|m| Filter::FixesPoint(p).accepts(m))
            .map(key)
            .collect();
        let got =
            collect_sl3(&Sl3Params::delta_ball(5, Filter::FixesPoint(p)).unwrap()).unwrap();
        assert_eq!(as_set(&got), expected);
        assert!(!expected.is_empty());
    }

    #[test]
    fn fixes_flag_filter_equals_post_filter() {
        let f = crate::finite::Flag::base(3).unwrap();
        let all = enumerate_sl3(2).unwrap();
        let expected: HashSet<_> = all
            .iter()
            .filter(|m| Filter::FixesFlag(f).accepts(m))
            .map(key)
            .collect();
        let got =
            collect_sl3(&Sl3Params::inf_ball(2, Filter::FixesFlag(f)).unwrap()).unwrap();
        assert_eq!(as_set(&got), expected);
        assert!(!expected.is_empty());
    }

    #[test]
    fn delta_ball_d1_is_the_unit_delta_sphere() {
        let ball = enumerate_delta_ball(1).unwrap();
        for m in &ball {
            let g = m.gauges().unwrap();
            assert_eq!((g.norm_inf, g.norm_inf_inverse), (1, 1));
        }
        assert!(ball.contains(&IntMat::identity(3)));
        // contains all I ± e_ij
        let mut unipotents = 0;
        for m in &ball {
            let diff: i64 = m
                .entries()
                .iter()
                .zip(IntMat::identity(3).entries())
                .map(|(a, b)| (a - b).abs())
                .sum();
            if diff == 1 {
                unipotents += 1;
            }
        }
        assert_eq!(unipotents, 12);
        // and the 24 even signed permutations
        let perms = ball
            .iter()
            .filter(|m| {
                m.entries().iter().filter(|&&v| v != 0).count() == 3
                    && (0..3).all(|i| (0..3).filter(|&j| m.at(i, j) != 0).count() == 1)
            })
            .count();
        assert_eq!(perms, 24);
    }

    #[test]
    fn delta_ball_agrees_with_post_filtered_box() {
        let d = 6;
        let s = inf_bound_for_delta(d);
        let expected: HashSet<_> = enumerate_sl3(s)
            .unwrap()
            .into_iter()
            .filter(|m| m.gauges().unwrap().delta <= d)
            .map(|m| key(&m))
            .collect();
        let ball = enumerate_delta_ball(d).unwrap();
        assert_eq!(as_set(&ball), expected);
    }

    #[test]
    fn delta_enclosing_box_bound() {
        assert_eq!(inf_bound_for_delta(1), 1);
        for d in 1..=178 {
            let s = inf_bound_for_delta(d);
            assert!(s * s * s >= 2 * d * d || s == d);
            assert!(s <= MAX_SL3_T.max(d));
        }
        assert!(enumerate_delta_ball(0).is_err());
        assert!(enumerate_delta_ball(10_000).is_err());
    }

    #[test]
    fn parallel_count_matches_sequential() {
        let params = Sl3Params::inf_ball(2, Filter::None).unwrap();
        let mut seq = 0u64;
        scan_sl3(&params, |_| seq += 1).unwrap();
        assert_eq!(count_sl3(&params).unwrap(), seq);
    }

    #[test]
    fn count_is_monotone_in_t() {
        let mut prev = 0;
        for t in 1..=4 {
            let n = count_sl3(&Sl3Params::inf_ball(t, Filter::None).unwrap()).unwrap();
            assert!(n > prev);
            prev = n;
        }
    }
}
