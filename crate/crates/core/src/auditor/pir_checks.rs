//! Privacy, independence and correctness of two-server PIR schemes.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{mutual_information_zero, DistributionTable, Gf, LinearForm, Variable};
use crate::pir::{Decoder, PirScheme, Server};

use super::AuditError;

/// Joint law of `(d, Q1, Q2)` under uniform demand and randomness.
pub fn query_table(pir: &dyn PirScheme) -> Result<DistributionTable, AuditError> {
    let (n1, n2) = pir.query_space();
    let mut t = DistributionTable::new(vec![
        Variable::new("d", pir.messages() as u128),
        Variable::new("Q1", n1 as u128),
        Variable::new("Q2", n2 as u128),
    ])?;
    for d in 0..pir.messages() {
        for r in 0..pir.randomness_size() {
            t.add(&[d as u128, pir.query1(r) as u128, pir.query2(d, r) as u128], 1);
        }
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PirPrivacy {
    pub server1: bool,
    pub server2: bool,
    /// I(d; Q1) and I(d; Q2) in bits.
    pub mi1_bits: f64,
    pub mi2_bits: f64,
}

impl PirPrivacy {
    pub fn passed(&self) -> bool {
        self.server1 && self.server2
    }
}

/// Each server's query law is the same for every demand.
pub fn check_pir_privacy(pir: &dyn PirScheme) -> Result<PirPrivacy, AuditError> {
    let t = query_table(pir)?;
    let m1 = mutual_information_zero(&t, &["d"], &["Q1"], &[])?;
    let m2 = mutual_information_zero(&t, &["d"], &["Q2"], &[])?;
    Ok(PirPrivacy {
        server1: m1.is_zero(),
        server2: m2.is_zero(),
        mi1_bits: m1.bits(),
        mi2_bits: m2.bits(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Udiq {
    /// I(Q1; Q2) = 0 under uniform demand.
    pub marginal_zero: bool,
    pub marginal_bits: f64,
    /// I(Q1; Q2 | d = n) for each demand; informational only.
    pub per_demand_bits: Vec<f64>,
}

pub fn check_udiq(pir: &dyn PirScheme) -> Result<Udiq, AuditError> {
    let t = query_table(pir)?;
    let m = mutual_information_zero(&t, &["Q1"], &["Q2"], &[])?;
    let (n1, n2) = pir.query_space();
    let per_demand_bits = (0..pir.messages())
        .map(|d| {
            let mut s = DistributionTable::new(vec![Variable::new("Q1", n1 as u128), Variable::new("Q2", n2 as u128)])?;
            for r in 0..pir.randomness_size() {
                s.add(&[pir.query1(r) as u128, pir.query2(d, r) as u128], 1);
            }
            Ok(mutual_information_zero(&s, &["Q1"], &["Q2"], &[])?.bits())
        })
        .collect::<Result<Vec<_>, AuditError>>()?;
    Ok(Udiq {
        marginal_zero: m.is_zero(),
        marginal_bits: m.bits(),
        per_demand_bits,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correctness {
    /// `exhaustive` over all libraries or `symbolic` decoder certificate.
    pub method: String,
    pub libraries: String,
    pub pairs: usize,
    pub failures: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

struct Prepared {
    a1: Vec<Vec<LinearForm>>,
    a2: Vec<Vec<LinearForm>>,
    /// `(d, r, q1, q2, decoder)`; `None` when no decoder exists.
    pairs: Vec<(usize, usize, usize, usize, Option<Decoder>)>,
}

fn prepare(pir: &dyn PirScheme) -> Prepared {
    let (n1, n2) = pir.query_space();
    let a1 = (0..n1).map(|q| pir.answer_forms(Server::One, q)).collect();
    let a2 = (0..n2).map(|q| pir.answer_forms(Server::Two, q)).collect();
    let mut pairs = Vec::new();
    for d in 0..pir.messages() {
        for r in 0..pir.randomness_size() {
            pairs.push((d, r, pir.query1(r), pir.query2(d, r), pir.decoder(d, r).ok()));
        }
    }
    Prepared { a1, a2, pairs }
}

fn describe(d: usize, r: usize, lib: Option<u128>) -> String {
    match lib {
        Some(l) => format!("demand {} randomness {} library {}", d + 1, r, l),
        None => format!("demand {} randomness {}: no decoder", d + 1, r),
    }
}

/// Decoder applied to the symbolic answers yields exactly `W_d`, so decoding
/// is correct for every library.
pub fn pir_correctness_symbolic(pir: &dyn PirScheme) -> Result<Correctness, AuditError> {
    let gf = pir.field();
    let f = pir.subpacketization();
    let p = prepare(pir);
    let mut failures = 0usize;
    let mut first = None;
    for (d, r, q1, q2, dec) in &p.pairs {
        let ok = dec.as_ref().is_some_and(|dec| {
            let joined: Vec<&LinearForm> = p.a1[*q1].iter().chain(&p.a2[*q2]).collect();
            dec.a1_len == p.a1[*q1].len()
                && dec.a2_len == p.a2[*q2].len()
                && dec.rows.len() == f
                && dec.rows.iter().enumerate().all(|(j, row)| {
                    let acc = row
                        .terms()
                        .iter()
                        .fold(LinearForm::zero(), |acc, &(k, c)| acc.add_scaled(joined[k], c, &gf));
                    acc == LinearForm::unit(d * f + j)
                })
        });
        if !ok {
            failures += 1;
            first.get_or_insert_with(|| describe(*d, *r, None));
        }
    }
    Ok(Correctness {
        method: "symbolic".into(),
        libraries: "all".into(),
        pairs: p.pairs.len(),
        failures: failures.to_string(),
        passed: failures == 0,
        first_failure: first,
    })
}

fn earliest<T: Ord>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn eval_word(form: &LinearForm, words: &[u64]) -> u64 {
    form.terms().iter().fold(0, |acc, &(i, _)| acc ^ words[i])
}

// Lane patterns: bit `l` of LANES[i] is bit `i` of `l`.
const LANES: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// GF(2): 64 libraries per word, library index `64·batch + lane`.
fn exhaustive_binary(p: &Prepared, dim: usize, f: usize) -> (u128, Option<String>) {
    let batches = 1u64 << (dim - 6);
    let (failures, first) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let words: Vec<u64> = (0..dim)
                .map(|i| if i < 6 { LANES[i] } else if (b >> (i - 6)) & 1 == 1 { !0 } else { 0 })
                .collect();
            let w1: Vec<Vec<u64>> = p.a1.iter().map(|fs| fs.iter().map(|x| eval_word(x, &words)).collect()).collect();
            let w2: Vec<Vec<u64>> = p.a2.iter().map(|fs| fs.iter().map(|x| eval_word(x, &words)).collect()).collect();
            let mut fails = 0u128;
            let mut first: Option<(u64, usize, u32)> = None;
            for (idx, (d, _, q1, q2, dec)) in p.pairs.iter().enumerate() {
                let Some(dec) = dec else { continue };
                let joined: Vec<u64> = w1[*q1].iter().chain(&w2[*q2]).copied().collect();
                let mut bad = 0u64;
                for (j, row) in dec.rows.iter().enumerate() {
                    bad |= eval_word(row, &joined) ^ words[d * f + j];
                }
                if bad != 0 {
                    fails += bad.count_ones() as u128;
                    first.get_or_insert((b, idx, bad.trailing_zeros()));
                }
            }
            (fails, first)
        })
        .reduce(|| (0, None), |x, y| (x.0 + y.0, earliest(x.1, y.1)));
    let first = first.map(|(b, idx, lane)| {
        let (d, r, ..) = &p.pairs[idx];
        describe(*d, *r, Some(64 * b as u128 + lane as u128))
    });
    (failures, first)
}

fn exhaustive_generic(p: &Prepared, gf: &Gf, dim: usize, libraries: u128, f: usize) -> (u128, Option<String>) {
    let q = gf.modulus();
    let (failures, first) = (0..libraries as u64)
        .into_par_iter()
        .map(|lib| {
            let mut rest = lib;
            let sym: Vec<u32> = (0..dim)
                .map(|_| {
                    let v = (rest % q as u64) as u32;
                    rest /= q as u64;
                    v
                })
                .collect();
            let v1: Vec<Vec<u32>> = p.a1.iter().map(|fs| fs.iter().map(|x| x.eval(&sym, gf)).collect()).collect();
            let v2: Vec<Vec<u32>> = p.a2.iter().map(|fs| fs.iter().map(|x| x.eval(&sym, gf)).collect()).collect();
            let mut fails = 0u128;
            let mut first = None;
            for (idx, (d, _, q1, q2, dec)) in p.pairs.iter().enumerate() {
                let Some(dec) = dec else { continue };
                let ok = dec
                    .apply(gf, &v1[*q1], &v2[*q2])
                    .is_ok_and(|out| out.iter().enumerate().all(|(j, &v)| v == sym[d * f + j]));
                if !ok {
                    fails += 1;
                    first.get_or_insert((lib, idx));
                }
            }
            (fails, first)
        })
        .reduce(|| (0, None), |x, y| (x.0 + y.0, earliest(x.1, y.1)));
    let first = first.map(|(lib, idx)| {
        let (d, r, ..) = &p.pairs[idx];
        describe(*d, *r, Some(lib as u128))
    });
    (failures, first)
}

/// Runs every (library, randomness, demand) world and compares the decoded
/// message with the demanded one.
pub fn pir_correctness_exhaustive(pir: &dyn PirScheme, budget: u128) -> Result<Correctness, AuditError> {
    let gf = pir.field();
    let f = pir.subpacketization();
    let layout = pir.message_layout();
    let dim = layout.dim();
    let p = prepare(pir);
    let libraries = layout.realizations(gf.modulus());
    let worlds = libraries.and_then(|l| l.checked_mul(p.pairs.len() as u128));
    let libraries = match (libraries, worlds) {
        (Some(l), Some(w)) if w <= budget => l,
        _ => {
            return Err(AuditError::BudgetExceeded {
                worlds: worlds.map_or_else(|| "too many".into(), |w| w.to_string()),
                budget,
            })
        }
    };
    let missing = p.pairs.iter().filter(|x| x.4.is_none()).count() as u128;
    let (failures, mut first) = if gf.modulus() == 2 && dim > 6 {
        exhaustive_binary(&p, dim, f)
    } else {
        exhaustive_generic(&p, &gf, dim, libraries, f)
    };
    if missing > 0 {
        let (d, r, ..) = p.pairs.iter().find(|x| x.4.is_none()).expect("missing decoder");
        first = Some(describe(*d, *r, None));
    }
    let failures = failures + missing * libraries;
    Ok(Correctness {
        method: "exhaustive".into(),
        libraries: libraries.to_string(),
        pairs: p.pairs.len(),
        failures: failures.to_string(),
        passed: failures == 0,
        first_failure: first,
    })
}

/// Exhaustive when within budget, symbolic otherwise.
pub fn pir_correctness(pir: &dyn PirScheme, budget: u128) -> Result<Correctness, AuditError> {
    match pir_correctness_exhaustive(pir, budget) {
        Err(AuditError::BudgetExceeded { .. }) => pir_correctness_symbolic(pir),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auditor::naive_pir;
    use crate::pir::parse_pir;

    #[test]
    fn privacy_of_table_schemes() {
        for id in ["tsc2", "xor3", "signed4", "pk:3:2"] {
            let s = parse_pir(id, None).unwrap();
            assert!(check_pir_privacy(s.as_ref()).unwrap().passed(), "{id}");
        }
        let naive = naive_pir(3, Gf::new(2).unwrap());
        let p = check_pir_privacy(&naive).unwrap();
        assert!(p.server1 && !p.server2);
        assert!((p.mi2_bits - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn udiq_verdicts() {
        let u = check_udiq(parse_pir("signed4", None).unwrap().as_ref()).unwrap();
        assert!(u.marginal_zero);
        assert_eq!(u.per_demand_bits, vec![2.0; 4]);
        let u = check_udiq(parse_pir("pk:2:3", None).unwrap().as_ref()).unwrap();
        assert!(!u.marginal_zero && u.marginal_bits > 0.0);
    }

    #[test]
    fn binary_and_generic_paths_agree() {
        // cc2pir:man:3:1 has 9 binary symbols, so both paths apply
        let s = parse_pir("cc2pir:man:3:1", None).unwrap();
        let p = prepare(s.as_ref());
        let gf = s.field();
        let a = exhaustive_binary(&p, 9, 3);
        let b = exhaustive_generic(&p, &gf, 9, 512, 3);
        assert_eq!(a, (0, None));
        assert_eq!(a, b);
    }

    #[test]
    fn corrupted_decoder_is_caught() {
        let s = parse_pir("cc2pir:man:3:1", None).unwrap();
        let mut p = prepare(s.as_ref());
        let gf = s.field();
        if let Some(dec) = p.pairs[0].4.as_mut() {
            dec.rows[0] = dec.rows[0].add(&LinearForm::unit(0), &gf);
        }
        let a = exhaustive_binary(&p, 9, 3);
        let b = exhaustive_generic(&p, &gf, 9, 512, 3);
        assert_eq!(a.0, b.0);
        assert!(a.0 > 0 && a.1.is_some() && b.1.is_some());
    }
}
