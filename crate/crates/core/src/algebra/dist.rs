//! Exact joint distributions over small discrete variables.
//!
//! A row of a [`DistributionTable`] is packed into a single `u128` by mixed
//! radix over the declared cardinalities. Probabilities are integer counts
//! over a common total, so every probability is an exact rational and the
//! conditional-independence test reduces to integer cross-multiplication.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// A named discrete variable taking values in `0..cardinality`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub cardinality: u128,
}

impl Variable {
    pub fn new(name: impl Into<String>, cardinality: u128) -> Self {
        Variable {
            name: name.into(),
            cardinality,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistributionTable {
    vars: Vec<Variable>,
    strides: Vec<u128>,
    counts: HashMap<u128, u64>,
    total: u64,
}

/// Result of the exact conditional-independence test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MiVerdict {
    ExactlyZero,
    /// Strictly positive; the value is the mutual information in bits.
    Positive(f64),
}

impl MiVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, MiVerdict::ExactlyZero)
    }

    pub fn bits(&self) -> f64 {
        match self {
            MiVerdict::ExactlyZero => 0.0,
            MiVerdict::Positive(v) => *v,
        }
    }
}

impl DistributionTable {
    pub fn new(vars: Vec<Variable>) -> Result<Self, AlgebraError> {
        let mut strides = Vec::with_capacity(vars.len());
        let mut acc: u128 = 1;
        for v in &vars {
            if v.cardinality == 0 {
                return Err(AlgebraError::TableTooWide);
            }
            strides.push(acc);
            acc = acc.checked_mul(v.cardinality).ok_or(AlgebraError::TableTooWide)?;
        }
        Ok(DistributionTable {
            vars,
            strides,
            counts: HashMap::new(),
            total: 0,
        })
    }

    /// Table with the same schema and no mass.
    pub fn empty_like(&self) -> Self {
        DistributionTable {
            vars: self.vars.clone(),
            strides: self.strides.clone(),
            counts: HashMap::new(),
            total: 0,
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>, AlgebraError> {
        names
            .iter()
            .map(|n| {
                self.index_of(n)
                    .ok_or_else(|| AlgebraError::UnknownVariable((*n).to_string()))
            })
            .collect()
    }

    pub fn pack(&self, values: &[u128]) -> u128 {
        debug_assert_eq!(values.len(), self.vars.len());
        values
            .iter()
            .zip(&self.strides)
            .zip(&self.vars)
            .map(|((&v, &s), var)| {
                debug_assert!(v < var.cardinality, "{} out of range", var.name);
                v * s
            })
            .sum()
    }

    pub fn unpack(&self, code: u128) -> Vec<u128> {
        self.vars
            .iter()
            .zip(&self.strides)
            .map(|(v, &s)| (code / s) % v.cardinality)
            .collect()
    }

    #[inline]
    pub fn add_packed(&mut self, code: u128, weight: u64) {
        if weight == 0 {
            return;
        }
        *self.counts.entry(code).or_insert(0) += weight;
        self.total += weight;
    }

    pub fn add(&mut self, values: &[u128], weight: u64) {
        let code = self.pack(values);
        self.add_packed(code, weight);
    }

    /// Additive merge of a partial table with the same schema.
    pub fn merge(&mut self, other: DistributionTable) -> Result<(), AlgebraError> {
        if other.vars != self.vars {
            return Err(AlgebraError::SchemaMismatch);
        }
        for (code, c) in other.counts {
            *self.counts.entry(code).or_insert(0) += c;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, values: &[u128]) -> u64 {
        self.counts.get(&self.pack(values)).copied().unwrap_or(0)
    }

    pub fn probability(&self, values: &[u128]) -> BigRational {
        BigRational::new(
            BigInt::from(self.count(values)),
            BigInt::from(self.total.max(1)),
        )
    }

    /// Sum of all row probabilities as an exact rational.
    pub fn mass(&self) -> BigRational {
        if self.total == 0 {
            return BigRational::zero();
        }
        let sum: u128 = self.counts.values().map(|&c| c as u128).sum();
        BigRational::new(BigInt::from(sum), BigInt::from(self.total))
    }

    /// Rows sorted by value tuple.
    pub fn rows(&self) -> Vec<(Vec<u128>, u64)> {
        let mut codes: Vec<_> = self.counts.iter().map(|(&k, &c)| (k, c)).collect();
        codes.sort_unstable();
        let mut rows: Vec<_> = codes.into_iter().map(|(k, c)| (self.unpack(k), c)).collect();
        rows.sort();
        rows
    }

    fn sub_code(&self, code: u128, cols: &[usize]) -> u128 {
        let mut acc = 0u128;
        for &c in cols {
            let v = (code / self.strides[c]) % self.vars[c].cardinality;
            acc = acc * self.vars[c].cardinality + v;
        }
        acc
    }

    /// Marginal counts over the given columns, keyed by a packed sub-tuple.
    pub fn marginal_counts(&self, cols: &[usize]) -> HashMap<u128, u64> {
        let mut out = HashMap::new();
        for (&code, &c) in &self.counts {
            *out.entry(self.sub_code(code, cols)).or_insert(0) += c;
        }
        out
    }

    /// Dumps the table: one column per variable, then the reduced
    /// probability as numerator and denominator.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = self.vars.iter().map(|v| v.name.clone()).collect();
        header.push("p_num".into());
        header.push("p_den".into());
        wr.write_record(&header)?;
        for (vals, c) in self.rows() {
            let p = BigRational::new(BigInt::from(c), BigInt::from(self.total));
            let mut rec: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
            rec.push(p.numer().to_string());
            rec.push(p.denom().to_string());
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

// Summation runs over sorted counts so results do not depend on hash order.
fn entropy_of_counts<'a, I: IntoIterator<Item = &'a u64>>(counts: I, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let mut sorted: Vec<u64> = counts.into_iter().copied().collect();
    sorted.sort_unstable();
    let mut h = 0.0;
    for c in sorted {
        if c > 0 {
            let p = c as f64 / t;
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

/// Shannon entropy (bits) of the marginal over `vars`.
pub fn entropy(dist: &DistributionTable, vars: &[&str]) -> Result<f64, AlgebraError> {
    let cols = dist.indices(vars)?;
    Ok(entropy_of_counts(dist.marginal_counts(&cols).values(), dist.total))
}

/// H(X | Y) in bits.
pub fn conditional_entropy(
    dist: &DistributionTable,
    x: &[&str],
    y: &[&str],
) -> Result<f64, AlgebraError> {
    let joint: Vec<&str> = x.iter().chain(y).copied().collect();
    Ok(entropy(dist, &joint)? - entropy(dist, y)?)
}

/// Exact test of I(X; Y | Z) = 0, with the value in bits when positive.
///
/// Zero holds iff for every z the conditional law of (X, Y) is the product
/// of its marginals: c(x,y,z)·c(z) = c(x,z)·c(y,z) on every row, and the
/// support of (X, Y) given z is the full product of the marginal supports.
pub fn mutual_information_zero(
    dist: &DistributionTable,
    x: &[&str],
    y: &[&str],
    z: &[&str],
) -> Result<MiVerdict, AlgebraError> {
    let xc = dist.indices(x)?;
    let yc = dist.indices(y)?;
    let zc = dist.indices(z)?;
    let mut seen = xc.clone();
    for c in yc.iter().chain(&zc) {
        if seen.contains(c) {
            return Err(AlgebraError::OverlappingVariables);
        }
        seen.push(*c);
    }
    if xc.is_empty() || yc.is_empty() {
        return Err(AlgebraError::OverlappingVariables);
    }

    let mut xyz: HashMap<(u128, u128, u128), u64> = HashMap::new();
    for (&code, &c) in &dist.counts {
        let key = (
            dist.sub_code(code, &xc),
            dist.sub_code(code, &yc),
            dist.sub_code(code, &zc),
        );
        *xyz.entry(key).or_insert(0) += c;
    }
    let mut xz: HashMap<(u128, u128), u64> = HashMap::new();
    let mut yz: HashMap<(u128, u128), u64> = HashMap::new();
    let mut zz: HashMap<u128, u64> = HashMap::new();
    for (&(xv, yv, zv), &c) in &xyz {
        *xz.entry((xv, zv)).or_insert(0) += c;
        *yz.entry((yv, zv)).or_insert(0) += c;
        *zz.entry(zv).or_insert(0) += c;
    }

    let mut factorizes = true;
    for (&(xv, yv, zv), &c) in &xyz {
        let lhs = c as u128 * zz[&zv] as u128;
        let rhs = xz[&(xv, zv)] as u128 * yz[&(yv, zv)] as u128;
        if lhs != rhs {
            factorizes = false;
            break;
        }
    }
    if factorizes {
        let mut nx: HashMap<u128, u64> = HashMap::new();
        let mut ny: HashMap<u128, u64> = HashMap::new();
        let mut nxyz: HashMap<u128, u64> = HashMap::new();
        for &(_, zv) in xz.keys() {
            *nx.entry(zv).or_insert(0) += 1;
        }
        for &(_, zv) in yz.keys() {
            *ny.entry(zv).or_insert(0) += 1;
        }
        for &(_, _, zv) in xyz.keys() {
            *nxyz.entry(zv).or_insert(0) += 1;
        }
        factorizes = zz
            .keys()
            .all(|zv| nxyz[zv] as u128 == nx[zv] as u128 * ny[zv] as u128);
    }
    if factorizes {
        return Ok(MiVerdict::ExactlyZero);
    }

    let t = dist.total as f64;
    let mut mi = 0.0;
    let mut keys: Vec<_> = xyz.iter().map(|(&k, &c)| (k, c)).collect();
    keys.sort_unstable();
    for ((xv, yv, zv), c) in keys {
        let num = c as f64 * zz[&zv] as f64;
        let den = xz[&(xv, zv)] as f64 * yz[&(yv, zv)] as f64;
        mi += (c as f64 / t) * (num / den).log2();
    }
    // a non-factorizing law has strictly positive information even when
    // rounding pushes the float to zero
    Ok(MiVerdict::Positive(mi.max(f64::MIN_POSITIVE)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cards: &[(&str, u128)]) -> DistributionTable {
        DistributionTable::new(cards.iter().map(|&(n, c)| Variable::new(n, c)).collect()).unwrap()
    }

    #[test]
    fn uniform_and_deterministic_entropy() {
        let mut t = table(&[("a", 4), ("b", 3)]);
        for a in 0..4 {
            t.add(&[a, 2], 1);
        }
        assert_eq!(entropy(&t, &["a"]).unwrap(), 2.0);
        assert_eq!(entropy(&t, &["b"]).unwrap(), 0.0);
        assert_eq!(t.mass(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn independent_bits_have_zero_mi() {
        let mut t = table(&[("x", 2), ("y", 2)]);
        for x in 0..2 {
            for y in 0..2 {
                t.add(&[x, y], 1);
            }
        }
        assert_eq!(mutual_information_zero(&t, &["x"], &["y"], &[]).unwrap(), MiVerdict::ExactlyZero);
    }

    #[test]
    fn copied_variable_has_full_mi() {
        let mut t = table(&[("x", 4), ("y", 4)]);
        for x in 0..4 {
            t.add(&[x, x], 1);
        }
        match mutual_information_zero(&t, &["x"], &["y"], &[]).unwrap() {
            MiVerdict::Positive(v) => assert!((v - 2.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_cell_breaks_independence() {
        // proportional on the support, but (1,1) never occurs
        let mut t = table(&[("x", 2), ("y", 2)]);
        t.add(&[0, 0], 1);
        t.add(&[0, 1], 1);
        t.add(&[1, 0], 1);
        assert!(!mutual_information_zero(&t, &["x"], &["y"], &[]).unwrap().is_zero());
    }

    #[test]
    fn conditioning_can_create_dependence() {
        // x, y fair and independent; z = x xor y
        let mut t = table(&[("x", 2), ("y", 2), ("z", 2)]);
        for x in 0..2 {
            for y in 0..2 {
                t.add(&[x, y, x ^ y], 1);
            }
        }
        assert!(mutual_information_zero(&t, &["x"], &["y"], &[]).unwrap().is_zero());
        let v = mutual_information_zero(&t, &["x"], &["y"], &["z"]).unwrap();
        assert!((v.bits() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_sets_rejected() {
        let t = table(&[("x", 2), ("y", 2)]);
        assert!(mutual_information_zero(&t, &["x"], &["x"], &[]).is_err());
        assert!(entropy(&t, &["nope"]).is_err());
    }

    #[test]
    fn merge_is_additive() {
        let mut a = table(&[("x", 3)]);
        let mut b = a.empty_like();
        a.add(&[0], 2);
        b.add(&[0], 1);
        b.add(&[2], 1);
        a.merge(b).unwrap();
        assert_eq!(a.total(), 4);
        assert_eq!(a.count(&[0]), 3);
        assert_eq!(a.rows(), vec![(vec![0], 3), (vec![2], 1)]);
    }

    #[test]
    fn csv_dump() {
        let mut t = table(&[("x", 2)]);
        t.add(&[0], 1);
        t.add(&[1], 3);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,p_num,p_den\n0,1,4\n1,3,4\n");
    }

    #[test]
    fn overflowing_schema_rejected() {
        let vars = (0..3).map(|i| Variable::new(format!("v{i}"), u64::MAX as u128)).collect();
        assert!(DistributionTable::new(vars).is_err());
    }
}
