//! One ambient field F_{q^L} holds every requested level: the level-n
//! subfield is the fixed set of the n-th power of the q-Frobenius. Elements
//! are coefficient vectors over F_p in the polynomial basis of a canonical
//! modulus, so lexicographic comparison of vectors doubles as the canonical
//! element order used everywhere downstream.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Element of the ambient field: dense F_p coefficients, constant term
/// first, always exactly `deg` entries. Derived `Ord` is the canonical
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

#[derive(Clone, Debug)]
pub struct FieldTower {
    p: u64,
    d: u32,
    ambient_exp: u32,
    deg: usize,
    modulus: Vec<u64>,
    levels: Vec<u32>,
    frob_p: Matrix,
    frob_q: Matrix,
    // per level n: basis of the F^n-fixed subfield over F_p, and the matrix
    // summing the first d*n p-power Frobenii (absolute trace to F_p on that
    // subfield)
    level_bases: BTreeMap<u32, Vec<FieldElement>>,
    trace_mats: BTreeMap<u32, Matrix>,
    fq_basis: Vec<FieldElement>,
}

/// Column-major matrix over F_p acting on coefficient vectors.
type Matrix = Vec<Vec<u64>>;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod_u64(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    powmod_u64(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

// -------- dense polynomial arithmetic over F_p, constant term first --------

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += (x as u128) * (y as u128);
        }
    }
    out.into_iter().map(|c| (c % p as u128) as u64).collect()
}

/// Remainder modulo a monic polynomial.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        if lead != 0 {
            for (j, &c) in m.iter().enumerate() {
                let t = mulmod(lead, c, p);
                let idx = shift + j;
                a[idx] = (a[idx] + p - t) % p;
            }
        }
        a.pop();
    }
    a
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    poly_trim(&mut out);
    out
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_mod_arbitrary(&a, &b, p);
        a = b;
        b = r;
    }
    // normalize monic for stable comparisons
    if let Some(&lead) = a.last() {
        let inv = inv_mod(lead, p);
        for c in &mut a {
            *c = mulmod(*c, inv, p);
        }
    }
    a
}

/// Remainder by a not-necessarily-monic divisor.
fn poly_mod_arbitrary(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    poly_trim(&mut a);
    let db = b.len() - 1;
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    while a.len() > db {
        let factor = mulmod(*a.last().unwrap(), lead_inv, p);
        let shift = a.len() - 1 - db;
        if factor != 0 {
            for (j, &c) in b.iter().enumerate() {
                let t = mulmod(factor, c, p);
                a[shift + j] = (a[shift + j] + p - t) % p;
            }
        }
        a.pop();
        poly_trim(&mut a);
        if a.len() <= db {
            break;
        }
    }
    a
}

/// Extended Euclid; returns (g, s) with s*a = g modulo m, g monic.
fn poly_inverse(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    poly_trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // r0 = q*r1 + r2
        let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        let lead_inv = inv_mod(*r1.last().unwrap(), p);
        while rem.len() >= r1.len() && !rem.is_empty() {
            let factor = mulmod(*rem.last().unwrap(), lead_inv, p);
            let shift = rem.len() - r1.len();
            q[shift] = factor;
            for (j, &c) in r1.iter().enumerate() {
                let t = mulmod(factor, c, p);
                rem[shift + j] = (rem[shift + j] + p - t) % p;
            }
            poly_trim(&mut rem);
            if rem.len() < r1.len() {
                break;
            }
        }
        poly_trim(&mut q);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None; // common factor of positive degree: not invertible
    }
    let scale = inv_mod(r0[0], p);
    let mut s = s0;
    for c in &mut s {
        *c = mulmod(*c, scale, p);
    }
    Some(poly_rem(&s, m, p))
}

impl FieldTower {
    pub fn build(p: u64, d: u32, levels: &[u32]) -> Result<FieldTower> {
        if p > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!("p = {p} is too large")));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d == 0 {
            return Err(Error::InvalidArgument("d must be positive".into()));
        }
        if levels.is_empty() || levels.contains(&0) {
            return Err(Error::InvalidArgument("levels must be positive and nonempty".into()));
        }

        // divisor closure keeps every Tr / Nm target available
        let mut level_set: Vec<u32> = vec![];
        for &n in levels {
            for k in 1..=n {
                if n % k == 0 && !level_set.contains(&k) {
                    level_set.push(k);
                }
            }
        }
        level_set.sort_unstable();

        let ambient_exp = level_set.iter().fold(1u64, |acc, &n| lcm(acc, n as u64));
        if ambient_exp > 1 << 20 {
            return Err(Error::InvalidArgument(format!("level lcm {ambient_exp} is unreasonably large")));
        }
        let ambient_exp = ambient_exp as u32;
        let deg = d as usize * ambient_exp as usize;
        if deg > 4096 {
            return Err(Error::InvalidArgument(format!("ambient degree {deg} over F_{p} is too large")));
        }

        let modulus = smallest_irreducible(p, deg);

        let mut tower = FieldTower {
            p,
            d,
            ambient_exp,
            deg,
            modulus,
            levels: level_set.clone(),
            frob_p: vec![],
            frob_q: vec![],
            level_bases: BTreeMap::new(),
            trace_mats: BTreeMap::new(),
            fq_basis: vec![],
        };

        tower.frob_p = tower.power_map_matrix();
        tower.frob_q = {
            let mut m = identity_matrix(deg, p);
            for _ in 0..d {
                m = tower.compose(&tower.frob_p, &m);
            }
            m
        };

        for &n in &level_set {
            tower.level_bases.insert(n, tower.fixed_subfield_basis(n)?);
            tower.trace_mats.insert(n, tower.absolute_trace_matrix(n));
        }
        tower.fq_basis = tower.find_fq_basis()?;
        Ok(tower)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.d)
    }

    pub fn ambient_exp(&self) -> u32 {
        self.ambient_exp
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn level_order(&self, n: u32) -> u128 {
        (self.p as u128).pow(self.d * n)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.deg] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_prime(1)
    }

    pub fn from_prime(&self, c: u64) -> FieldElement {
        let mut coeffs = vec![0; self.deg];
        coeffs[0] = c % self.p;
        FieldElement { coeffs }
    }

    pub fn element(&self, coeffs: Vec<u64>) -> Result<FieldElement> {
        if coeffs.len() != self.deg {
            return Err(Error::InvalidArgument(format!(
                "element needs {} coefficients, got {}",
                self.deg,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidArgument("coefficient out of range".into()));
        }
        Ok(FieldElement { coeffs })
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        x.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let coeffs = a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect();
        FieldElement { coeffs }
    }

    pub fn scalar_mul(&self, c: u64, a: &FieldElement) -> FieldElement {
        let coeffs = a.coeffs.iter().map(|&x| mulmod(c, x, self.p)).collect();
        FieldElement { coeffs }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut r = poly_rem(&poly_mul(&a.coeffs, &b.coeffs, self.p), &self.modulus, self.p);
        r.resize(self.deg, 0);
        FieldElement { coeffs: r }
    }

    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        let mut r = poly_inverse(&a.coeffs, &self.modulus, self.p)?;
        r.resize(self.deg, 0);
        Some(FieldElement { coeffs: r })
    }

    /// x ↦ x^q, the generator of the level hierarchy.
    pub fn frobenius(&self, x: &FieldElement) -> FieldElement {
        FieldElement { coeffs: self.apply(&self.frob_q, &x.coeffs) }
    }

    pub fn frobenius_pow(&self, x: &FieldElement, k: u32) -> FieldElement {
        let k = k % self.ambient_exp;
        let mut y = x.clone();
        for _ in 0..k {
            y = self.frobenius(&y);
        }
        y
    }

    pub fn is_level(&self, x: &FieldElement, n: u32) -> bool {
        // frob_q has order L on the ambient field, so reducing n mod L in
        // frobenius_pow answers the membership question exactly
        self.frobenius_pow(x, n) == *x
    }

    /// tr_{n,m}: x + x^(q^m) + ... + x^(q^(n-m)).
    pub fn field_trace(&self, x: &FieldElement, n: u32, m: u32) -> Result<FieldElement> {
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotDivisor { m, n });
        }
        if !self.is_level(x, n) {
            return Err(Error::LevelMismatch { expected: n, got: 0 });
        }
        let mut acc = self.zero();
        let mut term = x.clone();
        for _ in 0..n / m {
            acc = self.add(&acc, &term);
            term = self.frobenius_pow(&term, m);
        }
        Ok(acc)
    }

    /// All q^n level-n elements in canonical (lexicographic) order.
    pub fn enumerate_level(&self, n: u32) -> Result<Vec<FieldElement>> {
        let basis = self
            .level_bases
            .get(&n)
            .ok_or(Error::UnknownLevel(n))?;
        let mut out = Vec::with_capacity((self.p as usize).pow(basis.len() as u32));
        let mut digits = vec![0u64; basis.len()];
        loop {
            let mut x = self.zero();
            for (i, &c) in digits.iter().enumerate() {
                if c != 0 {
                    x = self.add(&x, &self.scalar_mul(c, &basis[i]));
                }
            }
            out.push(x);
            if !increment(&mut digits, self.p) {
                break;
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn level_basis(&self, n: u32) -> Result<&[FieldElement]> {
        self.level_bases
            .get(&n)
            .map(|b| b.as_slice())
            .ok_or(Error::UnknownLevel(n))
    }

    /// Absolute trace of a level-n element down to F_p, returned as the
    /// exponent k with tr = k·1.
    pub fn abs_trace_exponent(&self, x: &FieldElement, n: u32) -> u64 {
        let mat = self.trace_mats.get(&n).expect("level present in tower");
        let v = self.apply(mat, &x.coeffs);
        debug_assert!(v[1..].iter().all(|&c| c == 0), "trace of a level element is rational");
        v[0]
    }

    /// The fixed F_p-basis of F_q used to interpret structure-constant
    /// coefficient lists: powers of the smallest level-1 element of degree
    /// exactly d.
    pub fn fq_basis(&self) -> &[FieldElement] {
        &self.fq_basis
    }

    pub fn fq_from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.d as usize {
            return Err(Error::MalformedSpec(format!(
                "coefficient list must have d = {} entries, got {}",
                self.d,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::MalformedSpec("coefficient not reduced mod p".into()));
        }
        let mut x = self.zero();
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                x = self.add(&x, &self.scalar_mul(c, &self.fq_basis[i]));
            }
        }
        Ok(x)
    }

    // ----- construction helpers -----

    fn power_map_matrix(&self) -> Matrix {
        // columns (t^j)^p = (t^p)^j
        let tp = poly_powmod(&[0, 1], self.p, &self.modulus, self.p);
        let mut cols = Vec::with_capacity(self.deg);
        let mut col = vec![1u64];
        for _ in 0..self.deg {
            let mut padded = col.clone();
            padded.resize(self.deg, 0);
            cols.push(padded);
            col = poly_rem(&poly_mul(&col, &tp, self.p), &self.modulus, self.p);
        }
        cols
    }

    fn apply(&self, mat: &Matrix, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0u128; self.deg];
        for (j, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, &m) in mat[j].iter().enumerate() {
                out[i] += (c as u128) * (m as u128);
            }
        }
        out.into_iter().map(|c| (c % self.p as u128) as u64).collect()
    }

    fn compose(&self, a: &Matrix, b: &Matrix) -> Matrix {
        b.iter().map(|col| self.apply(a, col)).collect()
    }

    fn absolute_trace_matrix(&self, n: u32) -> Matrix {
        let steps = self.d as usize * n as usize;
        let mut sum = vec![vec![0u64; self.deg]; self.deg];
        let mut power = identity_matrix(self.deg, self.p);
        for _ in 0..steps {
            for j in 0..self.deg {
                for i in 0..self.deg {
                    sum[j][i] = (sum[j][i] + power[j][i]) % self.p;
                }
            }
            power = self.compose(&self.frob_p, &power);
        }
        sum
    }

    /// F_p-basis of ker(frob_q^n − id); dimension must be d·n.
    fn fixed_subfield_basis(&self, n: u32) -> Result<Vec<FieldElement>> {
        let mut fqn = identity_matrix(self.deg, self.p);
        for _ in 0..n {
            fqn = self.compose(&self.frob_q, &fqn);
        }
        // rows of the linear system (frob_q^n - id) x = 0
        let mut rows = vec![vec![0u64; self.deg]; self.deg];
        for j in 0..self.deg {
            for i in 0..self.deg {
                let mut v = fqn[j][i];
                if i == j {
                    v = (v + self.p - 1) % self.p;
                }
                rows[i][j] = v;
            }
        }
        let kernel = kernel_basis_mod_p(rows, self.deg, self.p);
        let expect = self.d as usize * n as usize;
        if kernel.len() != expect {
            return Err(Error::InvalidArgument(format!(
                "level {n} subfield has F_p-dimension {} instead of {expect}",
                kernel.len()
            )));
        }
        Ok(kernel.into_iter().map(|coeffs| FieldElement { coeffs }).collect())
    }

    fn find_fq_basis(&self) -> Result<Vec<FieldElement>> {
        if self.d == 1 {
            return Ok(vec![self.one()]);
        }
        let level_one = self.enumerate_level(1)?;
        for x in &level_one {
            // degree over F_p = least e with x^(p^e) = x; must be exactly d
            let mut y = x.clone();
            let mut degree = 0;
            for e in 1..=self.d {
                y = FieldElement { coeffs: self.apply(&self.frob_p, &y.coeffs) };
                if y == *x {
                    degree = e;
                    break;
                }
            }
            if degree != self.d {
                continue;
            }
            let mut basis = Vec::with_capacity(self.d as usize);
            let mut pow = self.one();
            for _ in 0..self.d {
                basis.push(pow.clone());
                pow = self.mul(&pow, x);
            }
            return Ok(basis);
        }
        Err(Error::InvalidArgument("no generator of F_q over F_p found".into()))
    }
}

fn identity_matrix(n: usize, _p: u64) -> Matrix {
    (0..n)
        .map(|j| {
            let mut col = vec![0u64; n];
            col[j] = 1;
            col
        })
        .collect()
}

/// Odometer increment with the last digit fastest; false on wraparound.
fn increment(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Reduced row echelon kernel of a linear system over F_p. `rows` are the
/// equations; returns a deterministic basis of the solution space.
pub(crate) fn kernel_basis_mod_p(mut rows: Vec<Vec<u64>>, ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut pivot_cols = vec![];
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(sel) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, sel);
        let inv = inv_mod(rows[rank][col], p);
        for x in &mut rows[rank][col..] {
            *x = mulmod(*x, inv, p);
        }
        let pivot = rows[rank][col..].to_vec();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &pv) in row[col..].iter_mut().zip(&pivot) {
                    *x = (*x + p - mulmod(f, pv, p)) % p;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let mut basis = vec![];
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = (p - rows[r][free]) % p;
        }
        basis.push(v);
    }
    basis
}

/// Lexicographically smallest monic irreducible polynomial of the given
/// degree over F_p, scanning coefficient lists constant-term first.
fn smallest_irreducible(p: u64, deg: usize) -> Vec<u64> {
    if deg == 1 {
        return vec![0, 1]; // x itself: ambient field is F_p
    }
    let mut coeffs = vec![0u64; deg];
    loop {
        let mut candidate = coeffs.clone();
        candidate.push(1);
        if is_irreducible(&candidate, p) {
            return candidate;
        }
        // lexicographic successor: first coefficient most significant
        let mut pos = deg;
        loop {
            debug_assert!(pos > 0, "irreducible polynomials of every degree exist");
            pos -= 1;
            coeffs[pos] += 1;
            if coeffs[pos] < p {
                break;
            }
            coeffs[pos] = 0;
        }
    }
}

/// Monic f of degree m is irreducible iff x^(p^m) ≡ x mod f and f shares no
/// root with x^(p^k) − x for 0 < k < m.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    let mut xq = vec![0u64, 1]; // x^(p^k) mod f, starting at k = 0
    for _ in 1..m {
        xq = poly_powmod(&xq, p, f, p);
        let diff = poly_sub(&xq, &[0, 1], p);
        if diff.is_empty() {
            return false; // f divides x^(p^k) - x outright
        }
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    xq = poly_powmod(&xq, p, f, p);
    poly_sub(&xq, &[0, 1], p).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> FieldTower {
        FieldTower::build(2, 1, &[1, 2]).unwrap()
    }

    #[test]
    fn modulus_f4_is_x2_x_1() {
        assert_eq!(f4().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn modulus_f64_and_f8() {
        let t = FieldTower::build(2, 1, &[2, 3]).unwrap();
        assert_eq!(t.ambient_exp(), 6);
        assert_eq!(t.modulus(), &[1, 0, 0, 0, 0, 1, 1]);
        let t8 = FieldTower::build(2, 1, &[3]).unwrap();
        assert_eq!(t8.modulus(), &[1, 0, 1, 1]);
    }

    #[test]
    fn prime_field_has_degree_one_modulus() {
        let t = FieldTower::build(3, 1, &[1]).unwrap();
        assert_eq!(t.modulus(), &[0, 1]);
        assert_eq!(t.enumerate_level(1).unwrap().len(), 3);
        let two = t.from_prime(2);
        assert_eq!(t.mul(&two, &two), t.from_prime(1));
    }

    #[test]
    fn frobenius_on_f4_generator() {
        let t = f4();
        let omega = t.element(vec![0, 1]).unwrap();
        let omega_sq = t.mul(&omega, &omega);
        assert_eq!(t.frobenius(&omega), omega_sq);
        assert_eq!(omega_sq, t.element(vec![1, 1]).unwrap()); // ω² = ω + 1
        assert_eq!(t.frobenius(&omega_sq), omega);
        assert_eq!(t.frobenius(&t.one()), t.one());
    }

    #[test]
    fn trace_of_omega_is_one() {
        let t = f4();
        let omega = t.element(vec![0, 1]).unwrap();
        assert_eq!(t.field_trace(&omega, 2, 1).unwrap(), t.one());
        assert_eq!(t.field_trace(&omega, 2, 2).unwrap(), omega);
        assert_eq!(t.field_trace(&t.zero(), 2, 1).unwrap(), t.zero());
        assert!(t.field_trace(&omega, 2, 1).map(|x| t.is_level(&x, 1)).unwrap());
    }

    #[test]
    fn trace_rejects_bad_levels() {
        let t = f4();
        let omega = t.element(vec![0, 1]).unwrap();
        assert!(t.field_trace(&omega, 1, 2).is_err()); // 2 does not divide 1
        assert!(t.field_trace(&omega, 1, 1).is_err()); // ω is not at level 1
    }

    #[test]
    fn level_enumeration_is_lexicographic() {
        let t = f4();
        let l1 = t.enumerate_level(1).unwrap();
        assert_eq!(l1, vec![t.zero(), t.one()]);
        let l2 = t.enumerate_level(2).unwrap();
        let coeffs: Vec<&[u64]> = l2.iter().map(|x| x.coeffs()).collect();
        assert_eq!(coeffs, vec![&[0, 0][..], &[0, 1], &[1, 0], &[1, 1]]);
        for x in &l2 {
            assert!(t.is_level(x, 2));
        }
    }

    #[test]
    fn trace_surjective_and_transitive() {
        let t = FieldTower::build(2, 1, &[1, 2, 4]).unwrap();
        let l4 = t.enumerate_level(4).unwrap();
        for (n, m) in [(4u32, 2u32), (4, 1), (2, 1)] {
            let targets = t.enumerate_level(m).unwrap();
            for y in &targets {
                assert!(
                    t.enumerate_level(n)
                        .unwrap()
                        .iter()
                        .any(|x| t.field_trace(x, n, m).unwrap() == *y),
                    "trace {n}->{m} misses {:?}",
                    y
                );
            }
        }
        for x in &l4 {
            let once = t.field_trace(x, 4, 2).unwrap();
            let twice = t.field_trace(&once, 2, 1).unwrap();
            assert_eq!(twice, t.field_trace(x, 4, 1).unwrap());
            assert!(t.is_level(&t.field_trace(x, 4, 2).unwrap(), 2));
        }
    }

    #[test]
    fn frobenius_is_an_automorphism() {
        let t = f4();
        let elems = t.enumerate_level(2).unwrap();
        for a in &elems {
            for b in &elems {
                assert_eq!(t.frobenius(&t.add(a, b)), t.add(&t.frobenius(a), &t.frobenius(b)));
                assert_eq!(t.frobenius(&t.mul(a, b)), t.mul(&t.frobenius(a), &t.frobenius(b)));
            }
        }
    }

    #[test]
    fn inverses() {
        let t = FieldTower::build(3, 1, &[1, 2]).unwrap();
        assert_eq!(t.modulus(), &[1, 0, 1]); // x² + 1 over F_3
        for x in t.enumerate_level(2).unwrap() {
            if t.is_zero(&x) {
                assert!(t.inv(&x).is_none());
            } else {
                let inv = t.inv(&x).unwrap();
                assert_eq!(t.mul(&x, &inv), t.one());
            }
        }
    }

    #[test]
    fn absolute_trace_exponents() {
        let t = f4();
        let omega = t.element(vec![0, 1]).unwrap();
        assert_eq!(t.abs_trace_exponent(&omega, 2), 1); // ω + ω² = 1
        assert_eq!(t.abs_trace_exponent(&t.one(), 2), 0); // 1 + 1 = 0 in F_2
        assert_eq!(t.abs_trace_exponent(&t.one(), 1), 1);
        let t3 = FieldTower::build(3, 1, &[1]).unwrap();
        assert_eq!(t3.abs_trace_exponent(&t3.from_prime(2), 1), 2);
    }

    #[test]
    fn quadratic_extension_base_field_basis() {
        // d = 2: structure constants live in F_4 inside ambient F_16
        let t = FieldTower::build(2, 2, &[1, 2]).unwrap();
        assert_eq!(t.q(), 4);
        let basis = t.fq_basis();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], t.one());
        let gamma = &basis[1];
        assert!(t.is_level(gamma, 1));
        assert_ne!(FieldElement { coeffs: t.apply(&t.frob_p, &gamma.coeffs) }, *gamma);
        // γ² must be an F_2-combination of (1, γ): γ generates F_4
        let g2 = t.mul(gamma, gamma);
        let candidates: Vec<FieldElement> = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| t.add(&t.scalar_mul(a, &basis[0]), &t.scalar_mul(b, gamma)))
            .collect();
        assert!(candidates.contains(&g2));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(FieldTower::build(4, 1, &[1]), Err(Error::NotPrime(4))));
        assert!(FieldTower::build(2, 0, &[1]).is_err());
        assert!(FieldTower::build(2, 1, &[]).is_err());
    }

    #[test]
    fn divisor_closure() {
        let t = FieldTower::build(2, 1, &[4]).unwrap();
        assert_eq!(t.levels(), &[1, 2, 4]);
        assert_eq!(t.ambient_exp(), 4);
    }
}
