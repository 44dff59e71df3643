//! Exact arithmetic in Q(ζ_p). Values are rational coefficient vectors of
//! length p−1 in the reduced power basis 1, ζ, …, ζ^(p−2); the relation
//! ζ^(p−1) = −1 − ζ − … − ζ^(p−2) keeps the representation canonical, so
//! equality is plain coefficient comparison.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycValue {
    p: u64,
    coeffs: Vec<BigRational>,
}

impl CycValue {
    pub fn zero(p: u64) -> CycValue {
        CycValue { p, coeffs: vec![BigRational::zero(); (p - 1) as usize] }
    }

    pub fn one(p: u64) -> CycValue {
        CycValue::integer(p, 1)
    }

    pub fn integer(p: u64, n: i64) -> CycValue {
        let mut v = CycValue::zero(p);
        v.coeffs[0] = BigRational::from_integer(BigInt::from(n));
        v
    }

    pub fn rational(p: u64, value: BigRational) -> CycValue {
        let mut v = CycValue::zero(p);
        v.coeffs[0] = value;
        v
    }

    /// ζ_p^k, k taken mod p, in the reduced basis.
    pub fn root_of_unity(p: u64, k: i64) -> CycValue {
        let k = k.rem_euclid(p as i64) as u64;
        let mut v = CycValue::zero(p);
        if k == p - 1 {
            for c in &mut v.coeffs {
                *c = -BigRational::one();
            }
        } else {
            v.coeffs[k as usize] = BigRational::one();
        }
        v
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &CycValue) -> CycValue {
        assert_eq!(self.p, other.p, "mixed cyclotomic orders");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CycValue { p: self.p, coeffs }
    }

    pub fn sub(&self, other: &CycValue) -> CycValue {
        assert_eq!(self.p, other.p, "mixed cyclotomic orders");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        CycValue { p: self.p, coeffs }
    }

    pub fn neg(&self) -> CycValue {
        CycValue { p: self.p, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &CycValue) -> CycValue {
        assert_eq!(self.p, other.p, "mixed cyclotomic orders");
        let n = (self.p - 1) as usize;
        let mut raw = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        reduce(self.p, raw)
    }

    pub fn scale(&self, factor: &BigRational) -> CycValue {
        CycValue { p: self.p, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Complex conjugation ζ ↦ ζ^(p−1); an involutive ring map.
    pub fn conj(&self) -> CycValue {
        let mut out = CycValue::zero(self.p);
        out.coeffs[0] = self.coeffs[0].clone();
        for k in 1..(self.p - 1) as usize {
            if self.coeffs[k].is_zero() {
                continue;
            }
            let root = CycValue::root_of_unity(self.p, (self.p - k as u64) as i64);
            out = out.add(&root.scale(&self.coeffs[k]));
        }
        out
    }

    /// The rational coefficient when the value is rational, else None.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        let r = self.as_rational()?;
        if r.is_integer() {
            Some(r.to_integer())
        } else {
            None
        }
    }

    pub fn expect_same_p(&self, other: &CycValue) -> Result<()> {
        if self.p != other.p {
            return Err(Error::InvalidArgument(format!(
                "cyclotomic orders differ: {} vs {}",
                self.p, other.p
            )));
        }
        Ok(())
    }
}

/// Fold coefficients of ζ^t for t ≥ p−1 back into the reduced basis.
fn reduce(p: u64, mut raw: Vec<BigRational>) -> CycValue {
    let n = (p - 1) as usize;
    // ζ^t = ζ^(t-p) for t ≥ p; on [0, 2n-2] = [0, 2p-4] only t ≥ p needs it
    for t in (p as usize..raw.len()).rev() {
        let c = std::mem::replace(&mut raw[t], BigRational::zero());
        if !c.is_zero() {
            raw[t - p as usize] += c;
        }
    }
    let mut coeffs: Vec<BigRational> = raw.into_iter().take(n + 1).collect();
    coeffs.resize(n + 1, BigRational::zero());
    // ζ^(p−1) = −(1 + ζ + … + ζ^(p−2))
    let top = coeffs.pop().unwrap();
    if !top.is_zero() {
        for c in &mut coeffs {
            *c -= &top;
        }
    }
    CycValue { p, coeffs }
}

impl fmt::Display for CycValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, &BigRational)> =
            self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (k, c)) in terms.iter().enumerate() {
            let mag = c.abs();
            if pos == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one() && *k > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}z", if unit { "" } else { "*" })?,
                _ => write!(f, "{}z^{}", if unit { "" } else { "*" }, k)?,
            }
        }
        Ok(())
    }
}
