//! Capacities, recovery-set structure of two-server PIR, the resulting
//! download-cost lower bound, and memory-load curve comparison.

use std::collections::BTreeSet;
use std::io::Write;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    as_string, envelope_at, fmt_rational, lower_convex_envelope, rat_int, AlgebraError, LinearForm, Rational,
    SpanSolver, TradeoffPoint,
};
use crate::caching::{tradeoff_points, CachingError, Generator};
use crate::pir::{PirScheme, Server};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("non-uniform recovery sets: {0}")]
    NonUniform(String),
    #[error("no factorization a1*a2 = {target} with a1 <= {n1}, a2 <= {n2}")]
    Infeasible { target: usize, n1: usize, n2: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Caching(#[from] CachingError),
}

/// `1 + 1/S + ... + 1/S^(N-1)`.
pub fn pir_capacity(n: usize, s: usize) -> Rational {
    assert!(n >= 1 && s >= 1, "pir_capacity needs N, S >= 1");
    let s = rat_int(s as i64);
    let mut term = rat_int(1);
    let mut sum = Rational::zero();
    for _ in 0..n {
        sum += &term;
        term /= &s;
    }
    sum
}

/// Recovery sets of a PIR scheme.
///
/// `sets[τ]` holds the query pairs the scheme emits for demand τ, each
/// certified by the span oracle to determine `W_τ`.
#[derive(Clone, Debug, Serialize)]
pub struct RecoverySets {
    pub messages: usize,
    /// |Q1|, |Q2|.
    pub n1_space: usize,
    pub n2_space: usize,
    pub sets: Vec<Vec<(usize, usize)>>,
    /// Size of every slice `U_{τ|Q2=q2}` (number of matching Q1 values).
    pub n1: usize,
    /// Size of every slice `U_{τ|Q1=q1}`.
    pub n2: usize,
    /// `N1/n1 <= N` and `N2/n2 <= N`.
    pub part2_holds: bool,
    /// Q1 and Q2 (given any demand) are uniform over their whole spaces.
    pub uniform_queries: bool,
    /// Number of all query pairs in `Q1 x Q2` whose answers determine `W_τ`.
    pub all_pairs_recovering: Vec<usize>,
}

impl RecoverySets {
    /// Uniform queries and the slice-size relation both hold.
    pub fn invariants_hold(&self) -> bool {
        self.uniform_queries && self.part2_holds
    }
}

fn recovers(scheme: &dyn PirScheme, a1: &[LinearForm], a2: &[LinearForm], tau: usize) -> Result<bool, AlgebraError> {
    let f = scheme.subpacketization();
    let mut solver = SpanSolver::new(scheme.field(), scheme.messages() * f);
    for form in a1.iter().chain(a2) {
        solver.push(form, None)?;
    }
    for j in 0..f {
        if !solver.contains(&LinearForm::unit(tau * f + j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn is_uniform(counts: &[usize]) -> bool {
    counts.iter().all(|&c| c > 0 && c == counts[0])
}

pub fn recovery_sets(scheme: &dyn PirScheme) -> Result<RecoverySets, BoundsError> {
    let n = scheme.messages();
    let (n1_space, n2_space) = scheme.query_space();
    let a1: Vec<_> = (0..n1_space).map(|q| scheme.answer_forms(Server::One, q)).collect();
    let a2: Vec<_> = (0..n2_space).map(|q| scheme.answer_forms(Server::Two, q)).collect();

    let mut q1_counts = vec![0; n1_space];
    for r in 0..scheme.randomness_size() {
        q1_counts[scheme.query1(r)] += 1;
    }
    let mut uniform = is_uniform(&q1_counts);

    let mut sets = Vec::with_capacity(n);
    for tau in 0..n {
        let mut q2_counts = vec![0; n2_space];
        let mut set = BTreeSet::new();
        for r in 0..scheme.randomness_size() {
            let (q1, q2) = (scheme.query1(r), scheme.query2(tau, r));
            q2_counts[q2] += 1;
            if !set.contains(&(q1, q2)) {
                if !recovers(scheme, &a1[q1], &a2[q2], tau)? {
                    return Err(BoundsError::NonUniform(format!(
                        "emitted pair (Q1={}, Q2={}) does not recover message {}",
                        q1 + 1,
                        q2 + 1,
                        tau + 1
                    )));
                }
                set.insert((q1, q2));
            }
        }
        uniform &= is_uniform(&q2_counts);
        sets.push(set.into_iter().collect::<Vec<_>>());
    }

    // slice sizes must not depend on the query or the message
    let slice = |tau: usize, server: Server, q: usize| -> usize {
        sets[tau]
            .iter()
            .filter(|&&(a, b)| if server == Server::One { a == q } else { b == q })
            .count()
    };
    let mut n2 = None;
    let mut n1 = None;
    for tau in 0..n {
        for q1 in 0..n1_space {
            let s = slice(tau, Server::One, q1);
            if *n2.get_or_insert(s) != s {
                return Err(BoundsError::NonUniform(format!(
                    "|U(message {}, Q1={})| = {} differs from {}",
                    tau + 1,
                    q1 + 1,
                    s,
                    n2.unwrap()
                )));
            }
        }
        for q2 in 0..n2_space {
            let s = slice(tau, Server::Two, q2);
            if *n1.get_or_insert(s) != s {
                return Err(BoundsError::NonUniform(format!(
                    "|U(message {}, Q2={})| = {} differs from {}",
                    tau + 1,
                    q2 + 1,
                    s,
                    n1.unwrap()
                )));
            }
        }
    }
    let (n1, n2) = (n1.unwrap_or(0), n2.unwrap_or(0));
    if n1 == 0 || n2 == 0 {
        return Err(BoundsError::NonUniform("some query never appears in a recovery set".into()));
    }
    let part2_holds = n1_space <= n * n1 && n2_space <= n * n2;

    let all_pairs_recovering = (0..n)
        .map(|tau| {
            let mut count = 0;
            for x in &a1 {
                for y in &a2 {
                    count += recovers(scheme, x, y, tau)? as usize;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<_>, AlgebraError>>()?;

    Ok(RecoverySets {
        messages: n,
        n1_space,
        n2_space,
        sets,
        n1,
        n2,
        part2_holds,
        uniform_queries: uniform,
        all_pairs_recovering,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub alpha1: usize,
    pub alpha2: usize,
    #[serde(with = "as_string")]
    pub lhs_min: Rational,
    pub n: usize,
    /// `lhs_min >= N`.
    pub passes: bool,
    /// `lhs_min == N`.
    pub tight: bool,
}

/// Minimizes `α1·R_D1 + α2·R_D2` over `α1·α2 = ⌈N1/n1⌉`, `α1 <= N1`, `α2 <= N2`.
pub fn lower_bound(rs: &RecoverySets, rd1: &Rational, rd2: &Rational) -> Result<LowerBound, BoundsError> {
    let target = rs.n1_space.div_ceil(rs.n1);
    let infeasible = BoundsError::Infeasible {
        target,
        n1: rs.n1_space,
        n2: rs.n2_space,
    };
    let best = (1..=target.min(rs.n1_space))
        .filter(|a1| target.is_multiple_of(*a1) && target / a1 <= rs.n2_space)
        .map(|a1| {
            let a2 = target / a1;
            (rat_int(a1 as i64) * rd1 + rat_int(a2 as i64) * rd2, a1, a2)
        })
        .min_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)))
        .ok_or(infeasible)?;
    let n = rat_int(rs.messages as i64);
    Ok(LowerBound {
        alpha1: best.1,
        alpha2: best.2,
        passes: best.0 >= n,
        tight: best.0 == n,
        lhs_min: best.0,
        n: rs.messages,
    })
}

/// `N / (√N + 1)` as a float.
pub fn total_cost_bound(n: usize) -> f64 {
    let n = n as f64;
    n / (n.sqrt() + 1.0)
}

/// Exact test of `N / (√N + 1) <= total`.
pub fn total_cost_bound_holds(n: usize, total: &Rational) -> bool {
    // N <= T(√N + 1)  <=>  N - T <= T√N
    let n_r = rat_int(n as i64);
    let lhs = &n_r - total;
    if !lhs.is_positive() {
        return true;
    }
    &lhs * &lhs <= total * total * n_r
}

/// `⌈√N⌉`, the cache size used for the order-optimal instance.
pub fn sqrt_ceil(n: usize) -> usize {
    let r = n.sqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// One row of a curve table; `subpacketization` is `None` for points
/// interpolated along an envelope edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveRow {
    pub scheme: String,
    #[serde(with = "as_string")]
    pub memory: Rational,
    #[serde(with = "as_string")]
    pub load: Rational,
    pub subpacketization: Option<String>,
}

fn envelope_of(generator: &Generator, n: usize, k: usize) -> Result<Vec<TradeoffPoint>, BoundsError> {
    let mut pts = tradeoff_points(generator, n, k)?;
    // both curves are anchored at the trivial corners
    pts.push(TradeoffPoint::new(rat_int(0), rat_int(n as i64), BigUint::from(1u32)));
    pts.push(TradeoffPoint::new(rat_int(n as i64), rat_int(0), BigUint::from(1u32)));
    Ok(lower_convex_envelope(&pts)?)
}

/// Virtual-users and capacity-composition envelopes sampled on the union of
/// their vertex memories and the integers `0..=N`.
pub fn compare_curves(n: usize, k: usize) -> Result<Vec<CurveRow>, BoundsError> {
    let curves = [
        ("vu", envelope_of(&Generator::VirtualUsers, n, k)?),
        ("cor1", envelope_of(&Generator::CapacityPir, n, k)?),
    ];
    let mut grid: BTreeSet<Rational> = (0..=n as i64).map(rat_int).collect();
    for (_, env) in &curves {
        grid.extend(env.iter().map(|p| p.memory.clone()));
    }
    let mut rows = Vec::new();
    for m in &grid {
        for (name, env) in &curves {
            let load = envelope_at(env, m).expect("grid inside [0, N]");
            let sub = env
                .iter()
                .find(|p| &p.memory == m)
                .map(|p| p.subpacketization.to_string());
            rows.push(CurveRow {
                scheme: name.to_string(),
                memory: m.clone(),
                load,
                subpacketization: sub,
            });
        }
    }
    Ok(rows)
}

/// Load of `scheme` at memory `m` in a curve table.
pub fn curve_load<'a>(rows: &'a [CurveRow], scheme: &str, m: &Rational) -> Option<&'a Rational> {
    rows.iter().find(|r| r.scheme == scheme && &r.memory == m).map(|r| &r.load)
}

/// CSV with columns `M_num,M_den,R_num,R_den,scheme,subpacketization`.
pub fn write_curves_csv<W: Write>(rows: &[CurveRow], w: W) -> Result<(), csv::Error> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["M_num", "M_den", "R_num", "R_den", "scheme", "subpacketization"])?;
    for r in rows {
        out.write_record([
            r.memory.numer().to_string(),
            r.memory.denom().to_string(),
            r.load.numer().to_string(),
            r.load.denom().to_string(),
            r.scheme.clone(),
            r.subpacketization.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Human-readable `(R_D1, R_D2)` pair.
pub fn fmt_costs(c: &(Rational, Rational)) -> String {
    format!("({}, {})", fmt_rational(&c.0), fmt_rational(&c.1))
}

/// `(R_D1 + R_D2)` for the built-in total-cost checks.
pub fn total_cost(c: &(Rational, Rational)) -> Rational {
    &c.0 + &c.1
}
