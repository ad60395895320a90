//! Counting experiments and exhaustive verification of the congruence
//! identities satisfied by bad reductions and by kernel-of-reduction
//! elements.
//!
//! The SL₂ congruence count pairs a divisor-driven fast path against a
//! direct scan oracle; fixed-pair sums over delta balls are tabulated two
//! ways (per-element eigen counts vs per-class law values) and must agree
//! exactly.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::enumeration::{par_fold_sl3, residue_range, scan_sl2, Filter, Sl3Params};
use crate::exact::IntMat;
use crate::finite::{inv_mod, is_prime, reduce_mod, FixKind, FlagSpace, PointSpace, ReductionClass};
use crate::{Error, Result};

/// One experiment row. `wall_seconds` is measured and is the only field
/// exempt from bitwise reproducibility.
#[derive(Clone, Debug, Serialize)]
pub struct CountRecord {
    pub q: u64,
    pub gauge: &'static str,
    #[serde(rename = "T")]
    pub t: i64,
    pub space: &'static str,
    pub value: u64,
    pub wall_seconds: f64,
}

impl CountRecord {
    pub const CSV_HEADER: &'static str = "q,gauge,T,space,value,wall_seconds";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.q, self.gauge, self.t, self.space, self.value, self.wall_seconds
        )
    }
}

/// Which finite homogeneous space an experiment runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Proj,
    Flag,
}

impl SpaceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpaceKind::Proj => "proj",
            SpaceKind::Flag => "flag",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "proj" => Ok(SpaceKind::Proj),
            "flag" => Ok(SpaceKind::Flag),
            _ => Err(Error::Config(format!("unknown space {s:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// SL2 congruence counting
// ---------------------------------------------------------------------------

const MAX_SL2_COUNT_T: i64 = 1_000_000;
/// Largest value for which a smallest-prime-factor sieve is built; above
/// this the divisor enumeration falls back to trial division.
const MAX_SIEVE: u64 = 30_000_000;

struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    fn new(limit: u64) -> Self {
        let n = (limit as usize + 1).max(2);
        let mut spf = vec![0u32; n];
        for i in 2..n {
            if spf[i] == 0 {
                let mut j = i;
                while j < n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }
}

/// Divisors of the factorized number lying in [lo, hi].
fn divisors_in_range(factors: &[(u64, u32)], lo: u64, hi: u64) -> u64 {
    fn rec(factors: &[(u64, u32)], idx: usize, d: u64, lo: u64, hi: u64, acc: &mut u64) {
        if idx == factors.len() {
            if d >= lo && d <= hi {
                *acc += 1;
            }
            return;
        }
        let (p, e) = factors[idx];
        let mut cur = d;
        for k in 0..=e {
            rec(factors, idx + 1, cur, lo, hi, acc);
            if k < e {
                match cur.checked_mul(p) {
                    Some(v) if v <= hi => cur = v,
                    _ => break,
                }
            }
        }
    }
    let mut acc = 0;
    rec(factors, 0, 1, lo, hi, &mut acc);
    acc
}

fn divisors_in_range_trial(n: u64, lo: u64, hi: u64) -> u64 {
    let mut acc = 0;
    let mut e = 1u64;
    while e * e <= n {
        if n % e == 0 {
            let f = n / e;
            if e >= lo && e <= hi {
                acc += 1;
            }
            if f != e && f >= lo && f <= hi {
                acc += 1;
            }
        }
        e += 1;
    }
    acc
}

/// |{γ ∈ SL₂(ℤ): γ ≡ I mod q, ‖γ‖∞ ≤ T}| by iterating the diagonal (the
/// congruence pins d mod q² once a is chosen) and enumerating divisor
/// pairs of (ad − 1)/q²; the ad = 1 family is counted in closed form.
/// q = 1 counts the full ball.
pub fn count_sl2_congruence(q: u64, t: i64) -> Result<CountRecord> {
    if q == 0 || (q > 1 && !is_prime(q)) {
        return Err(Error::NotPrime(q));
    }
    if !(1..=MAX_SL2_COUNT_T).contains(&t) {
        return Err(Error::BoundTooLarge(format!(
            "count bound {t} outside 1..={MAX_SL2_COUNT_T}"
        )));
    }
    let start = Instant::now();
    let qi = q as i64;
    let q2 = qi.checked_mul(qi).ok_or(Error::Overflow)?;
    let cap = (t / qi) as u64;
    let max_n = ((t as u64) * (t as u64) + 1) / (q * q);
    let sieve = if max_n <= MAX_SIEVE {
        Some(SpfSieve::new(max_n))
    } else {
        None
    };

    let a_vals = residue_range(t, 1, qi);
    let value: u64 = a_vals
        .par_iter()
        .map(|&a| {
            let d_iter: Vec<i64> = if q == 1 {
                (-t..=t).collect()
            } else {
                if a == 0 {
                    return 0;
                }
                // a = 1 + qα forces d ≡ 1 − qα (mod q²)
                let alpha = (a - 1) / qi;
                residue_range(t, (1 - qi * alpha).rem_euclid(q2), q2)
            };
            let mut local = 0u64;
            for d in d_iter {
                let n = a * d - 1;
                if n == 0 {
                    local += 4 * cap + 1;
                    continue;
                }
                debug_assert_eq!(n % q2, 0, "diagonal iteration guarantees q^2 | ad-1");
                let np = (n / q2).unsigned_abs();
                if cap == 0 {
                    continue;
                }
                let lo = np.div_ceil(cap);
                let count = match &sieve {
                    Some(s) => divisors_in_range(&s.factorize(np), lo, cap),
                    None => divisors_in_range_trial(np, lo, cap),
                };
                local += 2 * count;
            }
            local
        })
        .sum();

    Ok(CountRecord {
        q,
        gauge: "inf",
        t,
        space: "none",
        value,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Direct-scan oracle for the congruence count: streams the filtered SL₂
/// ball and counts. Independent of the divisor path.
pub fn brute_sl2_congruence(q: u64, t: i64) -> Result<u64> {
    let filter = if q == 1 {
        Filter::None
    } else {
        Filter::IdentityMod(q)
    };
    let mut n = 0u64;
    scan_sl2(t, &filter, |_| n += 1)?;
    Ok(n)
}

// ---------------------------------------------------------------------------
// Fixed-pair counting over delta balls
// ---------------------------------------------------------------------------

/// Per-class element tallies for a fixed-pair run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ClassTally {
    pub identity: u64,
    pub scalar: u64,
    pub bad_split: u64,
    pub bad_unipotent: u64,
    pub other: u64,
}

/// Result of summing fixed points (or flags) of reductions over a delta
/// ball. `direct_sum` adds per-element eigenspace counts; `tabulated`
/// multiplies class tallies by the per-class law values, falling back to
/// the per-element count only for the residual class. The two must agree
/// exactly.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPairsReport {
    pub q: u64,
    pub d: i64,
    pub space: SpaceKind,
    pub direct_sum: u64,
    pub tabulated: u64,
    pub tally: ClassTally,
    /// Elements whose brute-scan fixed set disagreed with the eigenspace
    /// construction (only populated with `verify_brute`; must stay 0).
    pub brute_mismatches: u64,
    pub wall_seconds: f64,
}

impl FixedPairsReport {
    pub fn record(&self) -> CountRecord {
        CountRecord {
            q: self.q,
            gauge: "delta",
            t: self.d,
            space: self.space.as_str(),
            value: self.direct_sum,
            wall_seconds: self.wall_seconds,
        }
    }
}

#[derive(Default)]
struct FixAcc {
    direct: u64,
    law_other: u64,
    tally: ClassTally,
    mismatches: u64,
}

/// Σ over γ in the delta ball of the number of fixed points (proj) or
/// fixed flags of the reduction mod q.
pub fn count_fixed_pairs(
    q: u64,
    d: i64,
    space: SpaceKind,
    verify_brute: bool,
) -> Result<FixedPairsReport> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let start = Instant::now();
    let params = Sl3Params::delta_ball(d, Filter::None)?;
    let point_space = if verify_brute && space == SpaceKind::Proj {
        Some(PointSpace::new(q)?)
    } else {
        None
    };
    let flag_space = if verify_brute && space == SpaceKind::Flag {
        Some(FlagSpace::new(q)?)
    } else {
        None
    };

    let acc = par_fold_sl3(
        &params,
        FixAcc::default,
        |acc, m| {
            let red = reduce_mod(m, q).expect("enumerated group elements reduce");
            let kind = red.fix_kind();
            let direct = match space {
                SpaceKind::Proj => red.fixed_point_count(),
                SpaceKind::Flag => red.fixed_flag_count(),
            };
            acc.direct += direct;
            match kind {
                FixKind::Identity => acc.tally.identity += 1,
                FixKind::Scalar(_) => acc.tally.scalar += 1,
                FixKind::BadSplit(_) => acc.tally.bad_split += 1,
                FixKind::BadUnipotent(_) => acc.tally.bad_unipotent += 1,
                FixKind::Other => {
                    acc.tally.other += 1;
                    acc.law_other += direct;
                }
            }
            if let Some(ps) = &point_space {
                if red.fixed_points_brute(ps) != red.fixed_points_eigen() {
                    acc.mismatches += 1;
                }
            }
            if let Some(fs) = &flag_space {
                if red.fixed_flags_brute(fs) != red.fixed_flags_eigen() {
                    acc.mismatches += 1;
                }
            }
        },
        |mut a, b| {
            a.direct += b.direct;
            a.law_other += b.law_other;
            a.tally.identity += b.tally.identity;
            a.tally.scalar += b.tally.scalar;
            a.tally.bad_split += b.tally.bad_split;
            a.tally.bad_unipotent += b.tally.bad_unipotent;
            a.tally.other += b.tally.other;
            a.mismatches += b.mismatches;
            a
        },
    )?;

    let all = q * q + q + 1;
    let (law_id, law_split, law_unip) = match space {
        SpaceKind::Proj => (all, q + 2, q + 1),
        SpaceKind::Flag => (all * (q + 1), 3 * q + 3, 2 * q + 1),
    };
    let tabulated = acc.tally.identity * law_id
        + acc.tally.scalar * law_id
        + acc.tally.bad_split * law_split
        + acc.tally.bad_unipotent * law_unip
        + acc.law_other;

    Ok(FixedPairsReport {
        q,
        d,
        space,
        direct_sum: acc.direct,
        tabulated,
        tally: acc.tally,
        brute_mismatches: acc.mismatches,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Bad-element counting
// ---------------------------------------------------------------------------

/// Elements with ‖γ‖∞ ≤ s, ‖γ⁻¹‖∞ ≤ r whose reduction has an eigenspace of
/// dimension ≥ 2. Identity reductions are tallied separately, never mixed
/// into the bad count.
#[derive(Clone, Debug, Serialize)]
pub struct BadCountReport {
    pub q: u64,
    pub s: i64,
    pub r: i64,
    pub bad: u64,
    pub identity_class: u64,
    pub wall_seconds: f64,
}

pub fn count_bad(q: u64, s: i64, r: i64) -> Result<BadCountReport> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if s > r {
        return Err(Error::Config(format!(
            "bad-count range needs s <= r, got s={s}, r={r}"
        )));
    }
    let start = Instant::now();
    let params = Sl3Params::inf_ball(s, Filter::None)?;
    let (bad, identity_class) = par_fold_sl3(
        &params,
        || (0u64, 0u64),
        |acc, m| {
            let g = m.gauges().expect("enumerated matrices are unimodular");
            if g.norm_inf_inverse > r {
                return;
            }
            let red = reduce_mod(m, q).expect("unimodular");
            match red.classify() {
                ReductionClass::BadDimTwo(_) => acc.0 += 1,
                ReductionClass::Identity => acc.1 += 1,
                ReductionClass::Other => {}
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    )?;
    Ok(BadCountReport {
        q,
        s,
        r,
        bad,
        identity_class,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Identity verification
// ---------------------------------------------------------------------------

/// Outcome of re-checking the exact congruence identities on one element.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub gamma: String,
    pub q: u64,
    pub class: String,
    pub checks: BTreeMap<&'static str, bool>,
    /// Integer lift of the repeated eigenvalue in (−q/2, q/2], when the
    /// element is bad mod q.
    pub alpha_used: Option<i64>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|&b| b)
    }
}

/// Lift a residue to the representative of smallest absolute value.
pub fn centered_lift(a: u64, q: u64) -> i64 {
    let a = a % q;
    if 2 * a > q {
        a as i64 - q as i64
    } else {
        a as i64
    }
}

/// Checks the exact identities a bad reduction must satisfy: the matrix
/// relation γ + α⁻¹γ⁻¹ ≡ (α + α⁻²)I mod q, the trace relations mod q in
/// the multiplicity-consistent form (tr γ ≡ 2α + α⁻²) and in the swapped
/// alternative form (tr γ ≡ α + 2α⁻², kept as a documented secondary
/// check), and the lifted relation α²·tr γ − α·tr γ⁻¹ ≡ α³ − 1 mod q².
pub fn verify_bad_identities(gamma: &IntMat, q: u64) -> Result<IdentityReport> {
    if gamma.dim() != 3 {
        return Err(Error::DimMismatch {
            expected: 3,
            got: gamma.dim(),
        });
    }
    let inv = gamma.inverse_unimodular()?;
    let red = reduce_mod(gamma, q)?;
    let alpha = match red.classify() {
        ReductionClass::BadDimTwo(a) => a,
        other => {
            return Err(Error::ClassMismatch(format!(
                "expected a bad reduction, classified as {other:?}"
            )))
        }
    };
    let red_inv = reduce_mod(&inv, q)?;
    let a_inv = inv_mod(alpha, q);
    let a_inv2 = a_inv * a_inv % q;
    let a_sq = alpha * alpha % q;

    let mut checks = BTreeMap::new();

    // γ + α⁻¹ γ⁻¹ ≡ (α + α⁻²) I  (mod q)
    let rhs = (alpha + a_inv2) % q;
    let mut matrix_ok = true;
    for i in 0..3 {
        for j in 0..3 {
            let lhs = (red.at(i, j) + a_inv * red_inv.at(i, j)) % q;
            let want = if i == j { rhs } else { 0 };
            if lhs != want {
                matrix_ok = false;
            }
        }
    }
    checks.insert("matrix_relation_mod_q", matrix_ok);

    let tr = red.trace();
    let tr_inv = red_inv.trace();
    checks.insert(
        "trace_relation_mod_q",
        tr == (2 * alpha + a_inv2) % q && tr_inv == (2 * a_inv + a_sq) % q,
    );
    checks.insert(
        "trace_relation_alt_mod_q",
        tr == (alpha + 2 * a_inv2) % q && tr_inv == (a_inv + 2 * a_sq) % q,
    );

    // lifted: α²·tr γ − α·tr γ⁻¹ ≡ α³ − 1 (mod q²), α lifted to (−q/2, q/2]
    let a_lift = centered_lift(alpha, q);
    let q2 = (q as i128) * (q as i128);
    let tg = gamma.trace()? as i128;
    let tgi = inv.trace()? as i128;
    let al = a_lift as i128;
    let lhs = al * al * tg - al * tgi;
    let rhs2 = al * al * al - 1;
    checks.insert("trace_relation_mod_q2", (lhs - rhs2).rem_euclid(q2) == 0);

    Ok(IdentityReport {
        gamma: gamma.to_string(),
        q,
        class: format!("{:?}", ReductionClass::BadDimTwo(alpha)),
        checks,
        alpha_used: Some(a_lift),
    })
}

/// Checks the congruences forced on γ ≡ I (mod q): both traces ≡ 3 mod q²,
/// the traces agree mod q³, and (γ − I)² ≡ 0 mod q², all over the integers.
pub fn verify_identity_congruences(gamma: &IntMat, q: u64) -> Result<IdentityReport> {
    if gamma.dim() != 3 {
        return Err(Error::DimMismatch {
            expected: 3,
            got: gamma.dim(),
        });
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if !Filter::IdentityMod(q).accepts(gamma) {
        return Err(Error::ClassMismatch(format!(
            "{gamma} is not congruent to the identity mod {q}"
        )));
    }
    let inv = gamma.inverse_unimodular()?;
    let qi = q as i128;
    let q2 = qi * qi;
    let q3 = q2 * qi;
    let tg = gamma.trace()? as i128;
    let tgi = inv.trace()? as i128;

    let mut checks = BTreeMap::new();
    checks.insert(
        "trace_three_mod_q2",
        (tg - 3).rem_euclid(q2) == 0 && (tgi - 3).rem_euclid(q2) == 0,
    );
    checks.insert("traces_equal_mod_q3", (tg - tgi).rem_euclid(q3) == 0);

    // (γ − I)² entrywise, exactly
    let mut dm = [0i128; 9];
    for i in 0..3 {
        for j in 0..3 {
            dm[3 * i + j] = gamma.at(i, j) as i128 - i128::from(i == j);
        }
    }
    let mut square_ok = true;
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0i128;
            for k in 0..3 {
                acc += dm[3 * i + k] * dm[3 * k + j];
            }
            if acc.rem_euclid(q2) != 0 {
                square_ok = false;
            }
        }
    }
    checks.insert("unipotent_square_mod_q2", square_ok);

    Ok(IdentityReport {
        gamma: gamma.to_string(),
        q,
        class: "Identity".into(),
        checks,
        alpha_used: None,
    })
}

// ---------------------------------------------------------------------------
// Trace-solution counting
// ---------------------------------------------------------------------------

/// Brute-force census of the trace relations: integer triples (x, y, α)
/// with |x| ≤ s, |y| ≤ r, α ∈ F_q^× satisfying the mod-q trace relations
/// and the lifted mod-q² relation, plus the reduced census of (z, w, α)
/// with αz ≡ w mod q on the shrunken box.
#[derive(Clone, Debug, Serialize)]
pub struct TraceSolutionReport {
    pub q: u64,
    pub s: i64,
    pub r: i64,
    pub trace_solutions: u64,
    pub reduced_solutions: u64,
    pub wall_seconds: f64,
}

/// The full solution lists, for cross-checking the pairwise reduction.
pub fn trace_solution_lists(
    q: u64,
    s: i64,
    r: i64,
) -> Result<(Vec<(i64, i64, u64)>, Vec<(i64, i64, u64)>)> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if s < 0 || r < 0 || (q as i64).saturating_mul(s).saturating_mul(r) > 2_000_000_000 {
        return Err(Error::Infeasible(format!(
            "trace solution grid q={q}, s={s}, r={r} is too large"
        )));
    }
    let qi = q as i64;
    let q2 = (qi as i128) * (qi as i128);
    let mut sols = Vec::new();
    for alpha in 1..q {
        let a_inv = inv_mod(alpha, q);
        let want_x = (2 * alpha + a_inv * a_inv) % q;
        let want_y = (2 * a_inv + alpha * alpha) % q;
        let al = centered_lift(alpha, q) as i128;
        for x in -s..=s {
            if x.rem_euclid(qi) as u64 != want_x {
                continue;
            }
            for y in -r..=r {
                if y.rem_euclid(qi) as u64 != want_y {
                    continue;
                }
                let lhs = al * al * (x as i128) - al * (y as i128) - (al * al * al - 1);
                if lhs.rem_euclid(q2) == 0 {
                    sols.push((x, y, alpha));
                }
            }
        }
    }
    let (zb, wb) = (2 * s / qi, 2 * r / qi);
    let mut reduced = Vec::new();
    for alpha in 1..q {
        for z in -zb..=zb {
            for w in -wb..=wb {
                if (alpha as i64 * z - w).rem_euclid(qi) == 0 {
                    reduced.push((z, w, alpha));
                }
            }
        }
    }
    Ok((sols, reduced))
}

pub fn count_trace_solutions(q: u64, s: i64, r: i64) -> Result<TraceSolutionReport> {
    let start = Instant::now();
    let (sols, reduced) = trace_solution_lists(q, s, r)?;
    Ok(TraceSolutionReport {
        q,
        s,
        r,
        trace_solutions: sols.len() as u64,
        reduced_solutions: reduced.len() as u64,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Log-log fitting
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares on (log x, log y).
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points".into()));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::DegenerateFit(
            "log-log fit needs positive coordinates".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissas equal".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(FitResult {
        slope,
        intercept,
        r2,
    })
}

/// Fit from experiment rows, using (T, value).
pub fn fit_from_records(records: &[CountRecord]) -> Result<FitResult> {
    fit_exponent(
        &records
            .iter()
            .map(|r| (r.t as f64, r.value as f64))
            .collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_congruence_examples() {
        assert_eq!(count_sl2_congruence(2, 2).unwrap().value, 10);
        assert_eq!(count_sl2_congruence(1, 1).unwrap().value, 20);
        let fast = count_sl2_congruence(3, 100).unwrap().value;
        let brute = brute_sl2_congruence(3, 100).unwrap();
        assert_eq!(fast, brute);
    }

    #[test]
    fn sl2_congruence_matches_oracle_grid() {
        for q in [1u64, 2, 3, 5, 7] {
            for t in [1i64, 2, 3, 10, 37] {
                let fast = count_sl2_congruence(q, t).unwrap().value;
                let brute = brute_sl2_congruence(q, t).unwrap();
                assert_eq!(fast, brute, "q={q}, t={t}");
            }
        }
    }

    #[test]
    fn fixed_pairs_small_cross_check() {
        let rep = count_fixed_pairs(2, 1, SpaceKind::Proj, true).unwrap();
        assert_eq!(rep.brute_mismatches, 0);
        assert_eq!(rep.direct_sum, rep.tabulated);
        assert_eq!(rep.tally.identity, 1);
        // the identity contributes the whole plane
        assert!(rep.direct_sum >= 7);
        let repf = count_fixed_pairs(2, 1, SpaceKind::Flag, true).unwrap();
        assert_eq!(repf.brute_mismatches, 0);
        assert_eq!(repf.direct_sum, repf.tabulated);
        assert!(repf.direct_sum >= 21);
    }

    #[test]
    fn count_bad_examples() {
        // diag(-1,-1,1) and I + e13 both have norm 1 and bad reduction mod 5
        let rep = count_bad(5, 1, 1).unwrap();
        assert!(rep.bad >= 2);
        assert_eq!(rep.identity_class, 1); // only the identity itself
        assert!(count_bad(5, 4, 2).is_err());
    }

    #[test]
    fn count_bad_matches_brute_recount() {
        let (q, s, r) = (5u64, 2i64, 4i64);
        let rep = count_bad(q, s, r).unwrap();
        let mut bad = 0u64;
        let mut idc = 0u64;
        for m in crate::enumeration::enumerate_sl3(s).unwrap() {
            let g = m.gauges().unwrap();
            if g.norm_inf_inverse > r {
                continue;
            }
            match reduce_mod(&m, q).unwrap().classify() {
                ReductionClass::BadDimTwo(_) => bad += 1,
                ReductionClass::Identity => idc += 1,
                ReductionClass::Other => {}
            }
        }
        assert_eq!(rep.bad, bad);
        assert_eq!(rep.identity_class, idc);
    }

    #[test]
    fn bad_identities_unipotent() {
        let g: IntMat = "1 0 1; 0 1 0; 0 0 1".parse().unwrap();
        let rep = verify_bad_identities(&g, 5).unwrap();
        assert_eq!(rep.alpha_used, Some(1));
        assert!(rep.all_pass(), "{:?}", rep.checks);
    }

    #[test]
    fn bad_identities_minus_one_block() {
        let g: IntMat = "-1 0 0; 0 -1 0; 0 0 1".parse().unwrap();
        let rep = verify_bad_identities(&g, 5).unwrap();
        assert_eq!(rep.alpha_used, Some(-1));
        assert!(rep.checks["matrix_relation_mod_q"]);
        assert!(rep.checks["trace_relation_mod_q"]);
        assert!(!rep.checks["trace_relation_alt_mod_q"]);
        assert!(rep.checks["trace_relation_mod_q2"]);
    }

    #[test]
    fn bad_identities_class_mismatch() {
        let g = IntMat::identity(3);
        assert!(matches!(
            verify_bad_identities(&g, 5),
            Err(Error::ClassMismatch(_))
        ));
    }

    #[test]
    fn identity_congruences_examples() {
        let g: IntMat = "1 3 0; 0 1 0; 0 0 1".parse().unwrap();
        let rep = verify_identity_congruences(&g, 3).unwrap();
        assert!(rep.all_pass());
        let id = IntMat::identity(3);
        assert!(verify_identity_congruences(&id, 7).unwrap().all_pass());
        let g: IntMat = "1 1 0; 0 1 0; 0 0 1".parse().unwrap();
        assert!(verify_identity_congruences(&g, 3).is_err());
    }

    #[test]
    fn trace_solutions_contains_unipotent_data() {
        // traces (3, 3) with α = 1 match the unipotent I + e13 mod 5
        let (sols, _) = trace_solution_lists(5, 3, 3).unwrap();
        assert!(sols.contains(&(3, 3, 1)));
    }

    #[test]
    fn trace_solution_pair_reduction() {
        // pairs of solutions with equal α reduce to the single congruence
        let q = 5u64;
        let qi = q as i64;
        let (sols, reduced) = trace_solution_lists(q, 20, 20).unwrap();
        assert!(!sols.is_empty());
        for a in &sols {
            for b in &sols {
                if a.2 == b.2 {
                    assert_eq!((a.0 - b.0).rem_euclid(qi), 0);
                    assert_eq!((a.1 - b.1).rem_euclid(qi), 0);
                    let z = (a.0 - b.0) / qi;
                    let w = (a.1 - b.1) / qi;
                    assert_eq!((a.2 as i64 * z - w).rem_euclid(qi), 0);
                    if z.abs() <= 2 * 20 / qi && w.abs() <= 2 * 20 / qi {
                        assert!(reduced.contains(&(z, w, a.2)));
                    }
                }
            }
        }
    }

    #[test]
    fn fit_examples() {
        let f = fit_exponent(&[(1.0, 1.0), (2.0, 64.0)]).unwrap();
        assert!((f.slope - 6.0).abs() < 1e-12);
        let f = fit_exponent(&[(1.0, 1.0), (10.0, 100.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        let f = fit_exponent(&[(1.0, 5.0), (2.0, 5.0), (3.0, 5.0)]).unwrap();
        assert!(f.slope.abs() < 1e-12);
        assert!(fit_exponent(&[(1.0, 1.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
    }
}
