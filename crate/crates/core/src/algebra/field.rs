//! Prime-field arithmetic.
//!
//! [`Gf`] is the lightweight handle used on hot paths (raw `u32` values);
//! [`FieldElement`] carries its modulus and is checked on every operation.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// A prime field GF(q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gf {
    q: u32,
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= q as u64 {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Gf {
    /// Moduli are capped at 2^16 so that products never overflow `u32`.
    pub const MAX_MODULUS: u32 = 1 << 16;

    pub fn new(q: u32) -> Result<Self, AlgebraError> {
        if q > Self::MAX_MODULUS || !is_prime(q) {
            return Err(AlgebraError::NotPrime(q));
        }
        Ok(Gf { q })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.q
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.q) {
            return None;
        }
        Some(self.pow(a, self.q - 2))
    }

    pub fn pow(&self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1 % self.q;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Maps a signed integer coefficient into the field.
    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    pub fn element(&self, value: u32) -> FieldElement {
        FieldElement {
            value: value % self.q,
            modulus: self.q,
        }
    }
}

/// A value in GF(q) together with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: u32, modulus: u32) -> Result<Self, AlgebraError> {
        let gf = Gf::new(modulus)?;
        if value >= modulus {
            return Err(AlgebraError::OutOfField { value, modulus });
        }
        Ok(gf.element(value))
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfOp {
    Add,
    Sub,
    Mul,
    /// Inverts the first operand; the second only has to share its modulus.
    Inv,
}

/// Checked field arithmetic on two elements of the same field.
pub fn gf_ops(a: FieldElement, b: FieldElement, op: GfOp) -> Result<FieldElement, AlgebraError> {
    if a.modulus != b.modulus {
        return Err(AlgebraError::ModulusMismatch(a.modulus, b.modulus));
    }
    let gf = Gf { q: a.modulus };
    let value = match op {
        GfOp::Add => gf.add(a.value, b.value),
        GfOp::Sub => gf.sub(a.value, b.value),
        GfOp::Mul => gf.mul(a.value, b.value),
        GfOp::Inv => gf.inv(a.value).ok_or(AlgebraError::InverseOfZero)?,
    };
    Ok(gf.element(value))
}
