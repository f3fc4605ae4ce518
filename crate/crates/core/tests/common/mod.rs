#![allow(dead_code)]

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use privcache::auditor::{audit, AuditReport, Fault, WorldSpec};
use privcache::caching::{parse_caching, SchemeParams};

pub fn params(n: usize, k: usize, t: usize, q: Option<u32>) -> SchemeParams {
    SchemeParams {
        n,
        k,
        t,
        q,
        symbol_len: 1,
    }
}

pub fn audit_id(id: &str, n: usize, k: usize, t: usize, q: Option<u32>) -> AuditReport {
    audit_fault(id, n, k, t, q, None)
}

pub fn audit_fault(id: &str, n: usize, k: usize, t: usize, q: Option<u32>, fault: Option<Fault>) -> AuditReport {
    let scheme = parse_caching(id, params(n, k, t, q)).unwrap_or_else(|e| panic!("{id}: {e}"));
    let mut spec = WorldSpec::new(scheme);
    if let Some(f) = fault {
        spec = spec.with_fault(f);
    }
    audit(&spec).unwrap_or_else(|e| panic!("{id}: {e}")).0
}

/// Runs the binary entry point in-process.
pub fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["privcache"];
    argv.extend_from_slice(args);
    privcache::cli::run_from(argv)
}

pub fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn choose(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::from(0);
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Lower convex envelope at `m`, by brute force over all chords.
pub fn chord_envelope(points: &[(BigRational, BigRational)], m: &BigRational) -> Option<BigRational> {
    let mut best: Option<BigRational> = None;
    for (m1, r1) in points {
        for (m2, r2) in points {
            if m1 > m || m2 < m {
                continue;
            }
            let r = if m1 == m2 {
                r1.clone()
            } else {
                r1 + (r2 - r1) * (m - m1) / (m2 - m1)
            };
            if best.as_ref().is_none_or(|b| &r < b) {
                best = Some(r);
            }
        }
    }
    best
}

/// Achievable points of the virtual-users construction.
pub fn vu_points(n: i64, k: i64) -> Vec<(BigRational, BigRational)> {
    (0..=n * k)
        .map(|t| {
            let load = BigRational::new(choose(n * k, t + 1) - choose(n * k - n, t + 1), choose(n * k, t));
            (q(t, k), load)
        })
        .collect()
}

/// Achievable points of the composition with the capacity-achieving PIR at equal weights.
pub fn capacity_pir_points(n: i64, k: i64) -> Vec<(BigRational, BigRational)> {
    let r_star = q(2, 1) - BigRational::new(1.into(), BigInt::from(2).pow((n - 1) as u32));
    let half = &r_star / q(2, 1);
    let mut pts = vec![(q(0, 1), q(n, 1)), (q(n, 1), q(0, 1))];
    for t in 0..k {
        let m = q(n * t, k) + (q(1, 1) - q(t, k)) * &half;
        let r = &half * q(k - t, t + 1);
        pts.push((m, r));
    }
    pts
}
