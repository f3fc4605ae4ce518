//! Symbol vectors, sparse linear forms, and the span-membership oracle.
//!
//! Every scheme in this crate is linear: each transmitted or cached symbol
//! is a [`LinearForm`] over the flat index space of library symbols. The
//! [`SpanSolver`] decides whether a target form lies in the span of a set of
//! known forms, and if so returns both the combination and the implied value.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, FieldElement, Gf};

/// A fixed-length vector of symbols over one prime field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolVec {
    modulus: u32,
    values: Vec<u32>,
}

impl SymbolVec {
    pub fn new(modulus: u32, values: Vec<u32>) -> Result<Self, AlgebraError> {
        Gf::new(modulus)?;
        if let Some(&value) = values.iter().find(|&&v| v >= modulus) {
            return Err(AlgebraError::OutOfField { value, modulus });
        }
        Ok(SymbolVec { modulus, values })
    }

    pub fn zeros(modulus: u32, len: usize) -> Self {
        SymbolVec {
            modulus,
            values: vec![0; len],
        }
    }

    pub(crate) fn from_raw(modulus: u32, values: Vec<u32>) -> Self {
        debug_assert!(values.iter().all(|&v| v < modulus));
        SymbolVec { modulus, values }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    pub fn get(&self, i: usize) -> Option<FieldElement> {
        self.values.get(i).map(|&v| FieldElement::new(v, self.modulus).unwrap())
    }

    pub fn elems(&self) -> Vec<FieldElement> {
        (0..self.len()).filter_map(|i| self.get(i)).collect()
    }
}

/// A sparse linear combination `Σ c_i x_i` with nonzero coefficients,
/// sorted by index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm {
    terms: Vec<(usize, u32)>,
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm { terms: Vec::new() }
    }

    pub fn unit(index: usize) -> Self {
        LinearForm {
            terms: vec![(index, 1)],
        }
    }

    /// Builds a form from arbitrary (index, signed coefficient) pairs,
    /// merging duplicates and dropping zeros.
    pub fn from_terms<I>(gf: &Gf, terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for (i, c) in terms {
            let e = acc.entry(i).or_insert(0);
            *e = gf.add(*e, gf.from_i64(c));
        }
        LinearForm {
            terms: acc.into_iter().filter(|&(_, c)| c != 0).collect(),
        }
    }

    pub fn from_dense(coeffs: &[u32]) -> Self {
        LinearForm {
            terms: coeffs
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0)
                .map(|(i, &c)| (i, c))
                .collect(),
        }
    }

    pub fn terms(&self) -> &[(usize, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<(usize, u32)> {
        self.terms.first().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.last().map(|&(i, _)| i)
    }

    pub fn coefficient(&self, index: usize) -> u32 {
        match self.terms.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.terms[pos].1,
            Err(_) => 0,
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &LinearForm, c: u32, gf: &Gf) -> LinearForm {
        if c == 0 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let a = self.terms.get(i);
            let b = other.terms.get(j);
            match (a, b) {
                (Some(&(ia, ca)), Some(&(ib, cb))) if ia == ib => {
                    let v = gf.add(ca, gf.mul(c, cb));
                    if v != 0 {
                        out.push((ia, v));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(ia, ca)), Some(&(ib, _))) if ia < ib => {
                    out.push((ia, ca));
                    i += 1;
                }
                (Some(&(ia, ca)), None) => {
                    out.push((ia, ca));
                    i += 1;
                }
                (_, Some(&(ib, cb))) => {
                    out.push((ib, gf.mul(c, cb)));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        LinearForm { terms: out }
    }

    pub fn add(&self, other: &LinearForm, gf: &Gf) -> LinearForm {
        self.add_scaled(other, 1, gf)
    }

    pub fn scale(&self, c: u32, gf: &Gf) -> LinearForm {
        if c == 0 {
            return LinearForm::zero();
        }
        LinearForm {
            terms: self.terms.iter().map(|&(i, v)| (i, gf.mul(v, c))).collect(),
        }
    }

    /// Evaluates the form on a flat vector of symbol values.
    #[inline]
    pub fn eval(&self, values: &[u32], gf: &Gf) -> u32 {
        let mut acc = 0u32;
        for &(i, c) in &self.terms {
            acc = gf.add(acc, gf.mul(c, values[i]));
        }
        acc
    }

    /// Renames every index through `f`; `f` must be strictly increasing
    /// on the form's support so the sorted invariant survives.
    pub fn remap<F: Fn(usize) -> usize>(&self, f: F) -> LinearForm {
        LinearForm {
            terms: self.terms.iter().map(|&(i, c)| (f(i), c)).collect(),
        }
    }

    /// Renames indices through an arbitrary map, re-sorting and merging.
    pub fn remap_any<F: Fn(usize) -> usize>(&self, gf: &Gf, f: F) -> LinearForm {
        LinearForm::from_terms(gf, self.terms.iter().map(|&(i, c)| (f(i), c as i64)))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if *c == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "{c}*x{i}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct BasisRow {
    form: LinearForm,
    /// Expresses `form` in terms of the pushed rows.
    combo: LinearForm,
    value: Option<Vec<u32>>,
}

/// Outcome of a span-membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `combination` is indexed by the order in which known rows were pushed.
    InSpan {
        combination: LinearForm,
        value: Option<SymbolVec>,
    },
    NotInSpan,
}

/// Incremental row-echelon basis over GF(q).
///
/// Rows are kept in echelon form keyed by their leading index, each
/// normalized to a leading coefficient of one.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    gf: Gf,
    dim: usize,
    value_len: Option<usize>,
    basis: BTreeMap<usize, BasisRow>,
    pushed: usize,
}

fn axpy(acc: &mut [u32], c: u32, x: &[u32], gf: &Gf) {
    for (a, &b) in acc.iter_mut().zip(x) {
        *a = gf.add(*a, gf.mul(c, b));
    }
}

impl SpanSolver {
    pub fn new(gf: Gf, dim: usize) -> Self {
        SpanSolver {
            gf,
            dim,
            value_len: None,
            basis: BTreeMap::new(),
            pushed: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pushed(&self) -> usize {
        self.pushed
    }

    fn check_dim(&self, form: &LinearForm) -> Result<(), AlgebraError> {
        match form.max_index() {
            Some(i) if i >= self.dim => Err(AlgebraError::DimensionMismatch {
                index: i,
                dim: self.dim,
            }),
            _ => Ok(()),
        }
    }

    /// Adds a known equation `form = value`. Values are optional, but a
    /// solver must be used either with values throughout or without.
    pub fn push(&mut self, form: &LinearForm, value: Option<&SymbolVec>) -> Result<usize, AlgebraError> {
        self.check_dim(form)?;
        let idx = self.pushed;
        match (value, self.value_len, idx) {
            (Some(v), None, 0) => self.value_len = Some(v.len()),
            (Some(v), Some(len), _) if v.len() == len => {}
            (None, None, _) => {}
            _ => return Err(AlgebraError::ValueShape),
        }
        if let Some(v) = value {
            if v.modulus() != self.gf.modulus() {
                return Err(AlgebraError::ModulusMismatch(v.modulus(), self.gf.modulus()));
            }
        }
        let gf = self.gf;
        let mut row = BasisRow {
            form: form.clone(),
            combo: LinearForm::unit(idx),
            value: value.map(|v| v.values().to_vec()),
        };
        while let Some((lead, c)) = row.form.leading() {
            let Some(pivot) = self.basis.get(&lead) else {
                break;
            };
            let m = gf.neg(c);
            row.form = row.form.add_scaled(&pivot.form, m, &gf);
            row.combo = row.combo.add_scaled(&pivot.combo, m, &gf);
            if let (Some(acc), Some(pv)) = (row.value.as_mut(), pivot.value.as_ref()) {
                axpy(acc, m, pv, &gf);
            }
        }
        self.pushed += 1;
        match row.form.leading() {
            None => {
                if row.value.as_ref().is_some_and(|v| v.iter().any(|&x| x != 0)) {
                    return Err(AlgebraError::Inconsistent { row: idx });
                }
            }
            Some((lead, c)) => {
                let inv = gf.inv(c).expect("nonzero leading coefficient");
                row.form = row.form.scale(inv, &gf);
                row.combo = row.combo.scale(inv, &gf);
                if let Some(v) = row.value.as_mut() {
                    for x in v.iter_mut() {
                        *x = gf.mul(*x, inv);
                    }
                }
                self.basis.insert(lead, row);
            }
        }
        Ok(idx)
    }

    /// Decides whether `target` lies in the span of the pushed rows.
    pub fn membership(&self, target: &LinearForm) -> Result<Membership, AlgebraError> {
        self.check_dim(target)?;
        let gf = self.gf;
        let mut rest = target.clone();
        let mut combo = LinearForm::zero();
        let mut value = self.value_len.map(|len| vec![0u32; len]);
        while let Some((lead, c)) = rest.leading() {
            let Some(pivot) = self.basis.get(&lead) else {
                return Ok(Membership::NotInSpan);
            };
            rest = rest.add_scaled(&pivot.form, gf.neg(c), &gf);
            combo = combo.add_scaled(&pivot.combo, c, &gf);
            if let (Some(acc), Some(pv)) = (value.as_mut(), pivot.value.as_ref()) {
                axpy(acc, c, pv, &gf);
            }
        }
        Ok(Membership::InSpan {
            combination: combo,
            value: value.map(|v| SymbolVec::from_raw(gf.modulus(), v)),
        })
    }

    /// Combination of pushed rows equal to `target`, if any.
    pub fn combination(&self, target: &LinearForm) -> Result<Option<LinearForm>, AlgebraError> {
        Ok(match self.membership(target)? {
            Membership::InSpan { combination, .. } => Some(combination),
            Membership::NotInSpan => None,
        })
    }

    pub fn contains(&self, target: &LinearForm) -> Result<bool, AlgebraError> {
        Ok(matches!(self.membership(target)?, Membership::InSpan { .. }))
    }
}

/// One-shot span oracle: returns the value implied for `target` by the
/// known equations, or `None` when `target` is not in their span.
pub fn span_solve(
    gf: Gf,
    dim: usize,
    known: &[(LinearForm, SymbolVec)],
    target: &LinearForm,
) -> Result<Option<SymbolVec>, AlgebraError> {
    let mut solver = SpanSolver::new(gf, dim);
    for (form, value) in known {
        solver.push(form, Some(value))?;
    }
    Ok(match solver.membership(target)? {
        Membership::InSpan { value, .. } => {
            Some(value.unwrap_or_else(|| SymbolVec::zeros(gf.modulus(), 0)))
        }
        Membership::NotInSpan => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(q: u32, v: &[u32]) -> SymbolVec {
        SymbolVec::new(q, v.to_vec()).unwrap()
    }

    #[test]
    fn substitution_example() {
        let gf = Gf::new(7).unwrap();
        let known = vec![
            (LinearForm::from_terms(&gf, [(0, 1), (1, 1)]), sv(7, &[5])),
            (LinearForm::unit(1), sv(7, &[3])),
        ];
        let got = span_solve(gf, 2, &known, &LinearForm::unit(0)).unwrap();
        assert_eq!(got, Some(sv(7, &[2])));
    }

    #[test]
    fn not_in_span_example() {
        let gf = Gf::new(2).unwrap();
        let known = vec![(LinearForm::unit(0), sv(2, &[1]))];
        assert_eq!(span_solve(gf, 2, &known, &LinearForm::unit(1)).unwrap(), None);
    }

    #[test]
    fn cancel_cached_subfile() {
        // symbols: A1=0, A2=1, B1=2, B2=3; user 1 holds A1, B1 and hears A2+A1
        let gf = Gf::new(2).unwrap();
        let (a1, a2, b1) = (1, 0, 1);
        let known = vec![
            (LinearForm::unit(0), sv(2, &[a1])),
            (LinearForm::unit(2), sv(2, &[b1])),
            (LinearForm::from_terms(&gf, [(1, 1), (0, 1)]), sv(2, &[a2 ^ a1])),
        ];
        let got = span_solve(gf, 4, &known, &LinearForm::unit(1)).unwrap();
        assert_eq!(got, Some(sv(2, &[a2])));
    }

    #[test]
    fn inconsistent_rows_rejected() {
        let gf = Gf::new(3).unwrap();
        let known = vec![
            (LinearForm::unit(0), sv(3, &[1])),
            (LinearForm::from_terms(&gf, [(0, 2)]), sv(3, &[1])),
        ];
        assert!(matches!(
            span_solve(gf, 1, &known, &LinearForm::unit(0)),
            Err(AlgebraError::Inconsistent { row: 1 })
        ));
    }

    #[test]
    fn dimension_checked() {
        let gf = Gf::new(2).unwrap();
        let known = vec![(LinearForm::unit(5), sv(2, &[1]))];
        assert!(span_solve(gf, 3, &known, &LinearForm::unit(0)).is_err());
    }

    #[test]
    fn combination_reconstructs_target() {
        let gf = Gf::new(3).unwrap();
        let rows = [
            LinearForm::from_terms(&gf, [(0, 1), (1, 1), (2, 1), (3, 1)]),
            LinearForm::from_terms(&gf, [(0, -1), (1, 1), (2, 1), (3, 1)]),
        ];
        let mut s = SpanSolver::new(gf, 4);
        for r in &rows {
            s.push(r, None).unwrap();
        }
        let combo = s.combination(&LinearForm::unit(0)).unwrap().unwrap();
        let mut rebuilt = LinearForm::zero();
        for &(i, c) in combo.terms() {
            rebuilt = rebuilt.add_scaled(&rows[i], c, &gf);
        }
        assert_eq!(rebuilt, LinearForm::unit(0));
        assert!(!s.contains(&LinearForm::unit(1)).unwrap());
    }

    #[test]
    fn add_scaled_merges() {
        let gf = Gf::new(3).unwrap();
        let a = LinearForm::from_terms(&gf, [(0, 1), (2, 1)]);
        let b = LinearForm::from_terms(&gf, [(1, 1), (2, 1)]);
        let c = a.add_scaled(&b, 2, &gf);
        assert_eq!(c.terms(), &[(0, 1), (1, 2)]);
        assert_eq!(c.to_string(), "x0 + 2*x1");
    }
}
