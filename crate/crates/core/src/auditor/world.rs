//! World enumeration for caching schemes and the checks run on it.
//!
//! A world is a library realization, one randomness value per user and one
//! demand per user, all uniform and independent. Worlds are grouped by
//! their (randomness, demand) combination: placement, delivery and every
//! user's linear decoder are planned once per combination, then all
//! libraries are swept with an odometer.
//!
//! Table columns: `d1..dK` demands, `M1..MK` cache metadata, `Z1..ZK`
//! cache contents, `Xp` broadcast payload, `Xm` broadcast metadata. A user's
//! cache `Z_k` is `(Zk, Mk)`: the content together with the metadata needed
//! to use it. Variable-length contents are encoded with a leading 1 so that
//! length is part of the value.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    as_string, entropy, fmt_rational, mutual_information_zero, rat, DistributionTable, LinearForm,
    Membership, Rational, SpanSolver, Variable,
};
use crate::caching::{CachePlan, DeliveryPlan, SharedCaching};

use super::{AuditError, Check, Fault};

pub const DEFAULT_BUDGET: u128 = 1 << 24;

#[derive(Clone, Debug)]
pub struct WorldSpec {
    pub scheme: SharedCaching,
    pub budget: u128,
    pub fault: Option<Fault>,
}

impl WorldSpec {
    pub fn new(scheme: SharedCaching) -> Self {
        WorldSpec {
            scheme,
            budget: DEFAULT_BUDGET,
            fault: None,
        }
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    /// Number of (randomness, demand) combinations.
    pub fn combos(&self) -> Option<u128> {
        let s = &self.scheme;
        let k = s.users() as u32;
        (s.randomness_size() as u128)
            .checked_pow(k)?
            .checked_mul((s.files() as u128).checked_pow(k)?)
    }

    pub fn libraries(&self) -> Option<u128> {
        self.scheme.layout().realizations(self.scheme.field().modulus())
    }

    pub fn world_count(&self) -> Option<u128> {
        self.combos()?.checked_mul(self.libraries()?)
    }
}

/// Splits a combination index into randomness and demand vectors.
fn combo_vectors(mut idx: usize, k: usize, rsize: usize, n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut r = Vec::with_capacity(k);
    let mut d = Vec::with_capacity(k);
    for _ in 0..k {
        r.push(idx % rsize);
        idx /= rsize;
    }
    for _ in 0..k {
        d.push(idx % n);
        idx /= n;
    }
    (r, d)
}

fn digits_code(values: &[usize], radix: u128) -> u128 {
    values.iter().rev().fold(0, |acc, &v| acc * radix + v as u128)
}

fn sentinel_code(values: &[u32], q: u128) -> u128 {
    values.iter().fold(1, |acc, &v| acc * q + v as u128)
}

#[derive(Default)]
struct Partial {
    decode_failures: u128,
    /// Earliest `(combo, library, user)` with a wrong decoded value.
    first_failure: Option<(usize, u128, usize)>,
}

/// The exact joint table plus everything measured while building it.
#[derive(Debug)]
pub struct Enumeration {
    pub scheme: String,
    pub users: usize,
    pub files: usize,
    pub file_len: usize,
    pub field: u32,
    pub fault: Option<Fault>,
    pub table: DistributionTable,
    pub worlds: u128,
    pub combos: usize,
    pub decode_failures: u128,
    /// `(combo, user)` pairs whose demand lies outside the span of what the user holds.
    pub undecodable: Vec<(usize, usize)>,
    pub first_failure: Option<String>,
    /// Two combinations with equal broadcast metadata but different payload forms.
    pub metadata_ambiguous: bool,
    pub payload_symbols: (usize, usize),
    pub memory_per_user: Vec<Rational>,
    pub declared: (Rational, Rational),
}

fn var_names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

/// Enumerates every world and builds the joint table.
pub fn enumerate_worlds(spec: &WorldSpec) -> Result<Enumeration, AuditError> {
    let scheme = spec.scheme.as_ref();
    let worlds = spec.world_count().filter(|&w| w <= spec.budget).ok_or_else(|| AuditError::BudgetExceeded {
        worlds: spec.world_count().map_or_else(|| "too many".into(), |w| w.to_string()),
        budget: spec.budget,
    })?;
    let gf = scheme.field();
    let q = gf.modulus() as u128;
    let (n, k, rsize) = (scheme.files(), scheme.users(), scheme.randomness_size());
    let layout = scheme.layout();
    let dim = layout.dim();
    let libraries = spec.libraries().expect("bounded by the world count");
    let combos = spec.combos().expect("bounded by the world count") as usize;

    let places: Vec<Vec<CachePlan>> = (0..k).map(|u| (0..rsize).map(|r| scheme.place(u, r)).collect()).collect();
    let deliveries: Vec<DeliveryPlan> = (0..combos)
        .into_par_iter()
        .map(|c| {
            let (r, d) = combo_vectors(c, k, rsize, n);
            scheme.deliver(&r, &d)
        })
        .collect();

    let leak = spec.fault == Some(Fault::LeakQ1InMetadata);
    let msize = scheme.metadata_size() as u128;
    let radix = scheme.broadcast_metadata_radix() as u128;
    let bmeta = |c: usize| -> u128 {
        let mut code = digits_code(&deliveries[c].metadata, radix);
        if leak {
            let (r, _) = combo_vectors(c, k, rsize, n);
            let m: Vec<usize> = (0..k).map(|u| places[u][r[u]].metadata).collect();
            code = code * msize.pow(k as u32) + digits_code(&m, msize);
        }
        code
    };

    // the payload forms must be a function of the broadcast metadata
    let mut by_meta: HashMap<u128, usize> = HashMap::new();
    let mut metadata_ambiguous = false;
    for c in 0..combos {
        let first = *by_meta.entry(bmeta(c)).or_insert(c);
        if deliveries[first].payloads != deliveries[c].payloads {
            metadata_ambiguous = true;
        }
    }

    let payload_lens: Vec<usize> = deliveries.iter().map(|p| p.symbol_count()).collect();
    let payload_symbols = (
        *payload_lens.iter().min().unwrap_or(&0),
        *payload_lens.iter().max().unwrap_or(&0),
    );
    let cache_max: Vec<usize> = places
        .iter()
        .map(|ps| ps.iter().map(|p| p.symbol_count()).max().unwrap_or(0))
        .collect();
    let meta_len = deliveries.first().map_or(0, |p| p.metadata.len()) as u32;

    let mut vars = Vec::new();
    vars.extend(var_names("d", k).into_iter().map(|s| Variable::new(s, n as u128)));
    vars.extend(var_names("M", k).into_iter().map(|s| Variable::new(s, msize)));
    for (name, len) in var_names("Z", k).into_iter().zip(&cache_max) {
        vars.push(Variable::new(name, checked_card(q, *len + 1)?));
    }
    vars.push(Variable::new("Xp", checked_card(q, payload_symbols.1 + 1)?));
    let mut xm_card = checked_card(radix, meta_len as usize)?;
    if leak {
        xm_card = xm_card
            .checked_mul(checked_card(msize, k)?)
            .ok_or(crate::algebra::AlgebraError::TableTooWide)?;
    }
    vars.push(Variable::new("Xm", xm_card));
    let template = DistributionTable::new(vars)?;

    let undecodable = std::sync::Mutex::new(Vec::new());
    let (table, partial) = (0..combos)
        .into_par_iter()
        .fold(
            || (template.empty_like(), Partial::default()),
            |(mut table, mut partial), c| {
                let (r, d) = combo_vectors(c, k, rsize, n);
                let plan = &deliveries[c];
                let payload: Vec<&LinearForm> = plan.forms().collect();
                let caches: Vec<Vec<&LinearForm>> = (0..k).map(|u| places[u][r[u]].forms().collect()).collect();

                // decoders: rows over cache ++ payload, one per symbol of the demanded file
                let decoders: Vec<Option<Vec<(usize, LinearForm)>>> = (0..k)
                    .map(|u| {
                        let mut solver = SpanSolver::new(gf, dim);
                        for f in caches[u].iter().chain(&payload) {
                            solver.push(f, None).ok()?;
                        }
                        let mut rows = Vec::new();
                        for s in 0..layout.subfiles {
                            for j in 0..layout.sub_len {
                                let target = layout.index(d[u], s, j);
                                match solver.membership(&LinearForm::unit(target)).ok()? {
                                    Membership::InSpan { combination, .. } => rows.push((target, combination)),
                                    Membership::NotInSpan => return None,
                                }
                            }
                        }
                        Some(rows)
                    })
                    .collect();
                for (u, dec) in decoders.iter().enumerate() {
                    if dec.is_none() {
                        undecodable.lock().expect("no poisoning").push((c, u));
                    }
                }

                let mut row = vec![0u128; 3 * k + 2];
                for u in 0..k {
                    row[u] = d[u] as u128;
                    row[k + u] = places[u][r[u]].metadata as u128;
                }
                row[3 * k + 1] = bmeta(c);

                let mut sym = vec![0u32; dim];
                let mut cache_vals: Vec<Vec<u32>> = caches.iter().map(|f| vec![0; f.len()]).collect();
                let mut pay_vals = vec![0u32; payload.len()];
                let mut joined = Vec::new();
                for lib in 0..libraries {
                    for (f, v) in payload.iter().zip(pay_vals.iter_mut()) {
                        *v = f.eval(&sym, &gf);
                    }
                    if spec.fault == Some(Fault::CorruptPayload) {
                        if let Some(v) = pay_vals.first_mut() {
                            *v = gf.add(*v, 1);
                        }
                    }
                    for u in 0..k {
                        for (f, v) in caches[u].iter().zip(cache_vals[u].iter_mut()) {
                            *v = f.eval(&sym, &gf);
                        }
                        row[2 * k + u] = sentinel_code(&cache_vals[u], q);
                        if let Some(rows) = &decoders[u] {
                            joined.clear();
                            joined.extend_from_slice(&cache_vals[u]);
                            joined.extend_from_slice(&pay_vals);
                            if rows.iter().any(|(t, lam)| lam.eval(&joined, &gf) != sym[*t]) {
                                partial.decode_failures += 1;
                                let here = (c, lib, u);
                                if partial.first_failure.is_none_or(|f| here < f) {
                                    partial.first_failure = Some(here);
                                }
                            }
                        }
                    }
                    row[3 * k] = sentinel_code(&pay_vals, q);
                    table.add(&row, 1);

                    // next library: base-q odometer, symbol 0 least significant
                    for s in sym.iter_mut() {
                        *s += 1;
                        if *s < gf.modulus() {
                            break;
                        }
                        *s = 0;
                    }
                }
                (table, partial)
            },
        )
        .reduce(
            || (template.empty_like(), Partial::default()),
            |(mut ta, pa), (tb, pb)| {
                ta.merge(tb).expect("same schema");
                let first = match (pa.first_failure, pb.first_failure) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
                (
                    ta,
                    Partial {
                        decode_failures: pa.decode_failures + pb.decode_failures,
                        first_failure: first,
                    },
                )
            },
        );

    let mut undecodable = undecodable.into_inner().expect("no poisoning");
    undecodable.sort_unstable();
    let first_failure = match (undecodable.first(), partial.first_failure) {
        (Some(&(c, u)), _) => {
            let (r, d) = combo_vectors(c, k, rsize, n);
            Some(format!("user {} cannot decode (randomness {:?}, demands {:?})", u + 1, r, one_based(&d)))
        }
        (None, Some((c, lib, u))) => {
            let (r, d) = combo_vectors(c, k, rsize, n);
            Some(format!(
                "user {} decodes a wrong value (randomness {:?}, demands {:?}, library {})",
                u + 1,
                r,
                one_based(&d),
                lib
            ))
        }
        (None, None) => None,
    };

    let f = scheme.file_len() as i64;
    let memory_per_user = places
        .iter()
        .map(|ps| {
            let total: usize = ps.iter().map(|p| p.symbol_count()).sum();
            rat(total as i64, rsize as i64 * f)
        })
        .collect();

    Ok(Enumeration {
        scheme: scheme.name(),
        users: k,
        files: n,
        file_len: scheme.file_len(),
        field: gf.modulus(),
        fault: spec.fault,
        table,
        worlds,
        combos,
        decode_failures: partial.decode_failures,
        undecodable,
        first_failure,
        metadata_ambiguous,
        payload_symbols,
        memory_per_user,
        declared: scheme.declared_memory_load(),
    })
}

fn checked_card(base: u128, exp: usize) -> Result<u128, AuditError> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.max(1).checked_pow(e))
        .ok_or(AuditError::Algebra(crate::algebra::AlgebraError::TableTooWide))
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UserCheck {
    pub user: usize,
    pub passed: bool,
    pub mi_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Leakage {
    pub user: usize,
    /// `None` when the user's metadata is deterministic.
    pub epsilon: Option<f64>,
    pub exactly_zero: bool,
    pub metadata_entropy_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measured {
    #[serde(with = "as_string")]
    pub memory: Rational,
    #[serde(with = "as_string")]
    pub load: Rational,
    pub memory_per_user: Vec<String>,
    pub payload_symbols: usize,
    pub cache_entropy_bits: Vec<f64>,
    /// `M·F·log2(q) + H(M_k)` per user.
    pub cache_entropy_bound_bits: Vec<f64>,
    /// Entropy of the broadcast metadata in files; not counted in `load`.
    pub metadata_load: f64,
}

impl Enumeration {
    fn names(&self, prefix: &str) -> Vec<String> {
        var_names(prefix, self.users)
    }

    /// Every user recovers its whole demanded file in every world, and the
    /// payload forms are determined by the broadcast metadata.
    pub fn decodability(&self) -> Check {
        if self.metadata_ambiguous {
            return Check::fail("payload forms are not determined by the broadcast metadata");
        }
        if !self.undecodable.is_empty() || self.decode_failures > 0 {
            let bad = self.decode_failures + self.undecodable.len() as u128;
            return Check::fail(self.first_failure.clone().unwrap_or_default()).with_value(bad as f64);
        }
        Check::pass()
    }

    fn conditioned(&self, k: usize, x: &[String]) -> Result<UserCheck, AuditError> {
        let (dk, zk, mk) = (format!("d{}", k + 1), format!("Z{}", k + 1), format!("M{}", k + 1));
        let x: Vec<&str> = x.iter().map(String::as_str).filter(|s| *s != dk && *s != mk).collect();
        if x.is_empty() {
            return Ok(UserCheck {
                user: k + 1,
                passed: true,
                mi_bits: 0.0,
            });
        }
        let v = mutual_information_zero(&self.table, &x, &["Xp", "Xm"], &[&dk, &zk, &mk])?;
        Ok(UserCheck {
            user: k + 1,
            passed: v.is_zero(),
            mi_bits: v.bits(),
        })
    }

    /// `I(d ; X | d_k, Z_k) = 0`.
    pub fn demand_privacy(&self, k: usize) -> Result<UserCheck, AuditError> {
        self.conditioned(k, &self.names("d"))
    }

    /// `I(M_1..M_K ; X | d_k, Z_k) = 0`.
    pub fn cache_privacy(&self, k: usize) -> Result<UserCheck, AuditError> {
        self.conditioned(k, &self.names("M"))
    }

    /// `ε_k = I(M_k; X) / H(M_k)`.
    pub fn leakage_epsilon(&self, k: usize) -> Result<Leakage, AuditError> {
        let mk = format!("M{}", k + 1);
        let h = entropy(&self.table, &[&mk])?;
        if h == 0.0 {
            return Ok(Leakage {
                user: k + 1,
                epsilon: None,
                exactly_zero: true,
                metadata_entropy_bits: 0.0,
            });
        }
        let exact = mutual_information_zero(&self.table, &[&mk], &["Xp", "Xm"], &[])?;
        let eps = if exact.is_zero() {
            0.0
        } else {
            let i = h + entropy(&self.table, &["Xp", "Xm"])? - entropy(&self.table, &[&mk, "Xp", "Xm"])?;
            (i / h).clamp(0.0, 1.0)
        };
        Ok(Leakage {
            user: k + 1,
            epsilon: Some(eps),
            exactly_zero: exact.is_zero(),
            metadata_entropy_bits: h,
        })
    }

    /// Broadcast size does not depend on the world.
    pub fn constant_broadcast(&self) -> Check {
        let (lo, hi) = self.payload_symbols;
        if lo == hi {
            Check::pass()
        } else {
            Check::fail(format!("payload sizes range over {lo}..={hi} symbols")).with_value((hi - lo) as f64)
        }
    }

    pub fn measured(&self) -> Result<Measured, AuditError> {
        let f = self.file_len as i64;
        let memory = self.memory_per_user.iter().max().cloned().unwrap_or_else(|| rat(0, 1));
        let load = rat(self.payload_symbols.1 as i64, f);
        let log_q = (self.field as f64).log2();
        let mut h_z = Vec::new();
        let mut bound = Vec::new();
        for k in 0..self.users {
            let (zk, mk) = (format!("Z{}", k + 1), format!("M{}", k + 1));
            h_z.push(entropy(&self.table, &[&zk, &mk])?);
            let m = self.memory_per_user[k].to_f64().unwrap_or(f64::NAN);
            bound.push(m * f as f64 * log_q + entropy(&self.table, &[&mk])?);
        }
        Ok(Measured {
            memory,
            load,
            memory_per_user: self.memory_per_user.iter().map(fmt_rational).collect(),
            payload_symbols: self.payload_symbols.1,
            cache_entropy_bits: h_z,
            cache_entropy_bound_bits: bound,
            metadata_load: entropy(&self.table, &["Xm"])? / (f as f64 * log_q),
        })
    }

    /// Measured memory and load equal the declared ones.
    pub fn load_memory(&self) -> Result<Check, AuditError> {
        let m = self.measured()?;
        let (dm, dr) = &self.declared;
        if &m.memory == dm && &m.load == dr {
            Ok(Check::pass())
        } else {
            Ok(Check::fail(format!(
                "measured ({}, {}) but declared ({}, {})",
                fmt_rational(&m.memory),
                fmt_rational(&m.load),
                fmt_rational(dm),
                fmt_rational(dr)
            )))
        }
    }

    /// `H(d,X | d_k,Z_k) = H(d | d_k,Z_k) + H(X | d,Z_k)`, as a plumbing cross-check.
    pub fn chain_rule_consistent(&self) -> Result<bool, AuditError> {
        let d = self.names("d");
        for k in 0..self.users {
            let (zk, mk) = (format!("Z{}", k + 1), format!("M{}", k + 1));
            let z: Vec<&str> = vec![zk.as_str(), mk.as_str()];
            let dz: Vec<&str> = d.iter().map(String::as_str).chain(z.iter().copied()).collect();
            let dxz: Vec<&str> = dz.iter().copied().chain(["Xp", "Xm"]).collect();
            let dk = format!("d{}", k + 1);
            let dkz: Vec<&str> = std::iter::once(dk.as_str()).chain(z.iter().copied()).collect();
            let h = |v: &[&str]| entropy(&self.table, v);
            let lhs = h(&dxz)? - h(&dkz)?;
            let rhs = (h(&dz)? - h(&dkz)?) + (h(&dxz)? - h(&dz)?);
            if (lhs - rhs).abs() > 1e-9 || lhs < -1e-9 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub scheme: String,
    pub files: usize,
    pub users: usize,
    pub field: u32,
    pub file_len: usize,
    pub worlds: String,
    pub combos: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub decodability: Check,
    pub demand_privacy: Vec<UserCheck>,
    pub cache_privacy: Vec<UserCheck>,
    pub constant_broadcast: Check,
    pub load_memory: Check,
    pub measured: Measured,
    #[serde(with = "as_string")]
    pub declared_memory: Rational,
    #[serde(with = "as_string")]
    pub declared_load: Rational,
    pub leakage: Vec<Leakage>,
    pub chain_rule_consistent: bool,
    pub passed: bool,
}

impl AuditReport {
    pub fn from_enumeration(e: &Enumeration) -> Result<Self, AuditError> {
        let demand_privacy = (0..e.users).map(|k| e.demand_privacy(k)).collect::<Result<Vec<_>, _>>()?;
        let cache_privacy = (0..e.users).map(|k| e.cache_privacy(k)).collect::<Result<Vec<_>, _>>()?;
        let leakage = (0..e.users).map(|k| e.leakage_epsilon(k)).collect::<Result<Vec<_>, _>>()?;
        let decodability = e.decodability();
        let constant_broadcast = e.constant_broadcast();
        let load_memory = e.load_memory()?;
        let passed = decodability.passed
            && constant_broadcast.passed
            && load_memory.passed
            && demand_privacy.iter().all(|c| c.passed)
            && cache_privacy.iter().all(|c| c.passed);
        Ok(AuditReport {
            scheme: e.scheme.clone(),
            files: e.files,
            users: e.users,
            field: e.field,
            file_len: e.file_len,
            worlds: e.worlds.to_string(),
            combos: e.combos,
            fault: e.fault,
            decodability,
            demand_privacy,
            cache_privacy,
            constant_broadcast,
            load_memory,
            measured: e.measured()?,
            declared_memory: e.declared.0.clone(),
            declared_load: e.declared.1.clone(),
            leakage,
            chain_rule_consistent: e.chain_rule_consistent()?,
            passed,
        })
    }
}

/// Enumerates and runs every check.
pub fn audit(spec: &WorldSpec) -> Result<(AuditReport, Enumeration), AuditError> {
    let e = enumerate_worlds(spec)?;
    Ok((AuditReport::from_enumeration(&e)?, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caching::{parse_caching, SchemeParams};

    fn spec(id: &str, n: usize, k: usize, t: usize, q: Option<u32>) -> WorldSpec {
        let p = SchemeParams {
            n,
            k,
            t,
            q,
            symbol_len: 1,
        };
        WorldSpec::new(parse_caching(id, p).unwrap())
    }

    #[test]
    fn example_world_count_and_mass() {
        let s = spec("compose:tsc2", 2, 2, 1, None);
        assert_eq!(s.world_count(), Some(256));
        let e = enumerate_worlds(&s).unwrap();
        assert_eq!(e.table.total(), 256);
        assert_eq!(e.table.mass(), rat(1, 1));
    }

    #[test]
    fn combo_order() {
        assert_eq!(combo_vectors(0, 2, 2, 3), (vec![0, 0], vec![0, 0]));
        assert_eq!(combo_vectors(1, 2, 2, 3), (vec![1, 0], vec![0, 0]));
        assert_eq!(combo_vectors(4, 2, 2, 3), (vec![0, 0], vec![1, 0]));
    }

    #[test]
    fn codes() {
        assert_eq!(sentinel_code(&[], 3), 1);
        assert_eq!(sentinel_code(&[0], 3), 3);
        assert_eq!(sentinel_code(&[2, 1], 3), 16);
        assert_eq!(digits_code(&[1, 2], 3), 7);
    }

    #[test]
    fn budget_is_enforced() {
        let s = spec("compose:tsc2", 2, 2, 1, None).with_budget(255);
        assert!(matches!(enumerate_worlds(&s), Err(AuditError::BudgetExceeded { .. })));
    }

    #[test]
    fn man_leaks_demands() {
        let (r, _) = audit(&spec("man", 2, 2, 1, None)).unwrap();
        assert!(r.decodability.passed);
        assert!(r.demand_privacy.iter().all(|c| !c.passed && c.mi_bits > 0.0));
        assert!(!r.passed);
    }
}
