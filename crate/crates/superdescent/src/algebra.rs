//! Structure-constant nilpotent algebras and the groups 1 + A they carry.
//! The structure constants live in F_q (level 1); scalar extension to a
//! higher level is nothing more than letting coordinates range over the
//! bigger subfield, with the same constants.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldTower};

/// e_i · e_j = Σ_k c_{ij}^k e_k, stored sparsely as (k, c) pairs.
#[derive(Clone, Debug)]
pub struct NilpotentAlgebra {
    r: usize,
    constants: Vec<Vec<Vec<(usize, FieldElement)>>>,
    nilpotency_class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraElement {
    pub level: u32,
    pub coords: Vec<FieldElement>,
}

/// The formal object 1 + body.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub body: AlgebraElement,
}

impl NilpotentAlgebra {
    /// Validates associativity and nilpotency; the constants table is dense
    /// r×r on input, sparse afterwards.
    pub fn from_dense(tower: &FieldTower, table: Vec<Vec<Vec<FieldElement>>>) -> Result<NilpotentAlgebra> {
        let r = table.len();
        if r == 0 {
            return Err(Error::MalformedSpec("dimension must be positive".into()));
        }
        let mut constants = Vec::with_capacity(r);
        for row in &table {
            if row.len() != r || row.iter().any(|e| e.len() != r) {
                return Err(Error::MalformedSpec("constants table must be r x r x r".into()));
            }
            let mut sparse_row = Vec::with_capacity(r);
            for entry in row {
                let sparse: Vec<(usize, FieldElement)> = entry
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !tower.is_zero(c))
                    .map(|(k, c)| (k, c.clone()))
                    .collect();
                sparse_row.push(sparse);
            }
            constants.push(sparse_row);
        }
        for row in &constants {
            for entry in row {
                for (_, c) in entry {
                    if !tower.is_level(c, 1) {
                        return Err(Error::MalformedSpec(
                            "structure constants must lie in F_q".into(),
                        ));
                    }
                }
            }
        }

        let alg = NilpotentAlgebra { r, constants, nilpotency_class: 0 };
        alg.check_associativity(tower)?;
        let class = alg.check_nilpotency(tower)?;
        Ok(NilpotentAlgebra { nilpotency_class: class, ..alg })
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn nilpotency_class(&self) -> usize {
        self.nilpotency_class
    }

    pub fn constants(&self, i: usize, j: usize) -> &[(usize, FieldElement)] {
        &self.constants[i][j]
    }

    fn basis_product(&self, tower: &FieldTower, i: usize, j: usize, level: u32) -> AlgebraElement {
        let mut coords = vec![tower.zero(); self.r];
        for (k, c) in &self.constants[i][j] {
            coords[*k] = c.clone();
        }
        AlgebraElement { level, coords }
    }

    fn check_associativity(&self, tower: &FieldTower) -> Result<()> {
        for i in 0..self.r {
            for j in 0..self.r {
                let ij = self.basis_product(tower, i, j, 1);
                for k in 0..self.r {
                    let jk = self.basis_product(tower, j, k, 1);
                    let lhs = self.mul(tower, &ij, &self.basis_element(tower, k, 1));
                    let rhs = self.mul(tower, &self.basis_element(tower, i, 1), &jk);
                    if lhs != rhs {
                        return Err(Error::AssocViolation { i: i + 1, j: j + 1, k: k + 1 });
                    }
                }
            }
        }
        Ok(())
    }

    /// Sifts pure basis products of growing length; A^s = 0 must happen by
    /// s = r + 1, and the first surviving chain past that is the witness.
    fn check_nilpotency(&self, tower: &FieldTower) -> Result<usize> {
        // spanning set of A^s as (vector, chain) with vectors pure products;
        // echelon copies used only for rank tests
        let mut span: Vec<(AlgebraElement, Vec<usize>)> = (0..self.r)
            .map(|i| (self.basis_element(tower, i, 1), vec![i + 1]))
            .collect();
        let mut s = 1usize;
        while !span.is_empty() {
            if s > self.r {
                return Err(Error::NotNilpotent { chain: span[0].1.clone() });
            }
            let mut next: Vec<(AlgebraElement, Vec<usize>)> = vec![];
            let mut echelon: Vec<Vec<FieldElement>> = vec![];
            for (v, chain) in &span {
                for j in 0..self.r {
                    let w = self.mul(tower, v, &self.basis_element(tower, j, 1));
                    if self.is_zero(tower, &w) {
                        continue;
                    }
                    if sift(tower, &mut echelon, w.coords.clone()) {
                        let mut c = chain.clone();
                        c.push(j + 1);
                        next.push((w, c));
                    }
                }
            }
            span = next;
            s += 1;
        }
        Ok(s)
    }

    pub fn zero(&self, tower: &FieldTower, level: u32) -> AlgebraElement {
        AlgebraElement { level, coords: vec![tower.zero(); self.r] }
    }

    pub fn basis_element(&self, tower: &FieldTower, i: usize, level: u32) -> AlgebraElement {
        let mut coords = vec![tower.zero(); self.r];
        coords[i] = tower.one();
        AlgebraElement { level, coords }
    }

    pub fn is_zero(&self, tower: &FieldTower, a: &AlgebraElement) -> bool {
        a.coords.iter().all(|c| tower.is_zero(c))
    }

    pub fn add(&self, tower: &FieldTower, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        debug_assert_eq!(a.level, b.level);
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| tower.add(x, y)).collect();
        AlgebraElement { level: a.level, coords }
    }

    pub fn sub(&self, tower: &FieldTower, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        debug_assert_eq!(a.level, b.level);
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| tower.sub(x, y)).collect();
        AlgebraElement { level: a.level, coords }
    }

    pub fn neg(&self, tower: &FieldTower, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            level: a.level,
            coords: a.coords.iter().map(|x| tower.neg(x)).collect(),
        }
    }

    pub fn scale(&self, tower: &FieldTower, c: &FieldElement, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            level: a.level,
            coords: a.coords.iter().map(|x| tower.mul(c, x)).collect(),
        }
    }

    pub fn mul(&self, tower: &FieldTower, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        debug_assert_eq!(a.level, b.level);
        let mut coords = vec![tower.zero(); self.r];
        for (i, x) in a.coords.iter().enumerate() {
            if tower.is_zero(x) {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if tower.is_zero(y) {
                    continue;
                }
                let xy = tower.mul(x, y);
                for (k, c) in &self.constants[i][j] {
                    coords[*k] = tower.add(&coords[*k], &tower.mul(&xy, c));
                }
            }
        }
        AlgebraElement { level: a.level, coords }
    }

    pub fn frobenius(&self, tower: &FieldTower, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            level: a.level,
            coords: a.coords.iter().map(|x| tower.frobenius(x)).collect(),
        }
    }

    pub fn frobenius_pow(&self, tower: &FieldTower, a: &AlgebraElement, k: u32) -> AlgebraElement {
        AlgebraElement {
            level: a.level,
            coords: a.coords.iter().map(|x| tower.frobenius_pow(x, k)).collect(),
        }
    }

    pub fn identity(&self, tower: &FieldTower, level: u32) -> GroupElement {
        GroupElement { body: self.zero(tower, level) }
    }

    /// (1+a)(1+b) = 1 + a + b + ab.
    pub fn group_mul(&self, tower: &FieldTower, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let sum = self.add(tower, &g.body, &h.body);
        let prod = self.mul(tower, &g.body, &h.body);
        GroupElement { body: self.add(tower, &sum, &prod) }
    }

    /// (1+a)^(-1) = 1 − a + a² − …, cut off by nilpotency.
    pub fn group_inv(&self, tower: &FieldTower, g: &GroupElement) -> GroupElement {
        let neg_a = self.neg(tower, &g.body);
        let mut acc = neg_a.clone();
        let mut term = neg_a.clone();
        for _ in 2..self.nilpotency_class {
            term = self.mul(tower, &term, &neg_a);
            acc = self.add(tower, &acc, &term);
        }
        GroupElement { body: acc }
    }

    pub fn conjugate(&self, tower: &FieldTower, g: &GroupElement, x: &GroupElement) -> GroupElement {
        let gx = self.group_mul(tower, g, x);
        self.group_mul(tower, &gx, &self.group_inv(tower, g))
    }

    pub fn group_frobenius_pow(&self, tower: &FieldTower, g: &GroupElement, k: u32) -> GroupElement {
        GroupElement { body: self.frobenius_pow(tower, &g.body, k) }
    }

    /// All q^(rn) coordinate tuples at level n in canonical order: the
    /// first coordinate is most significant, each running through the
    /// level enumeration of the field.
    pub fn enumerate(&self, tower: &FieldTower, n: u32) -> Result<Vec<AlgebraElement>> {
        let scalars = tower.enumerate_level(n)?;
        let count = (scalars.len() as u128).checked_pow(self.r as u32);
        let count = count.ok_or(Error::SizeBound { needed: u128::MAX, bound: u64::MAX })?;
        let mut out = Vec::with_capacity(count as usize);
        let mut idx = vec![0usize; self.r];
        loop {
            let coords = idx.iter().map(|&i| scalars[i].clone()).collect();
            out.push(AlgebraElement { level: n, coords });
            // canonical order = odometer with the last coordinate fastest
            let mut pos = self.r;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < scalars.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

/// Reduce `candidate` against the echelon rows; if a nonzero residue
/// remains, absorb it and report the rank increase.
pub(crate) fn sift(
    tower: &FieldTower,
    echelon: &mut Vec<Vec<FieldElement>>,
    mut candidate: Vec<FieldElement>,
) -> bool {
    for row in echelon.iter() {
        let pivot = row.iter().position(|c| !tower.is_zero(c)).unwrap();
        if !tower.is_zero(&candidate[pivot]) {
            let factor = tower.mul(&candidate[pivot], &tower.inv(&row[pivot]).unwrap());
            for (c, r) in candidate.iter_mut().zip(row) {
                *c = tower.sub(c, &tower.mul(&factor, r));
            }
        }
    }
    if candidate.iter().all(|c| tower.is_zero(c)) {
        false
    } else {
        echelon.push(candidate);
        true
    }
}

/// Builtin families. `ut(n)` uses the superdiagonal-major basis order
/// (1,2), (2,3), …, (1,3), … so the one-dimensional center of ut(3) comes
/// last.
pub fn builtin_dense(
    tower: &FieldTower,
    family: &str,
    params: &[u32],
) -> Result<Vec<Vec<Vec<FieldElement>>>> {
    let one_param = || -> Result<u32> {
        match params {
            [v] if *v > 0 => Ok(*v),
            _ => Err(Error::MalformedSpec(format!("{family} takes one positive parameter"))),
        }
    };
    match family {
        "ut" => {
            let n = one_param()? as usize;
            if n < 2 {
                return Err(Error::MalformedSpec("ut(n) needs n >= 2".into()));
            }
            let mut pairs = vec![];
            for off in 1..n {
                for i in 1..=n - off {
                    pairs.push((i, i + off));
                }
            }
            let r = pairs.len();
            let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b));
            let mut table = vec![vec![vec![tower.zero(); r]; r]; r];
            for (x, &(a, b)) in pairs.iter().enumerate() {
                for (y, &(c, e)) in pairs.iter().enumerate() {
                    if b == c {
                        let k = index(a, e).expect("a < e inside the triangle");
                        table[x][y][k] = tower.one();
                    }
                }
            }
            Ok(table)
        }
        "abelian" => {
            let r = one_param()? as usize;
            Ok(vec![vec![vec![tower.zero(); r]; r]; r])
        }
        "truncpoly" => {
            let r = one_param()? as usize;
            let mut table = vec![vec![vec![tower.zero(); r]; r]; r];
            for i in 1..=r {
                for j in 1..=r {
                    if i + j <= r {
                        table[i - 1][j - 1][i + j - 1] = tower.one();
                    }
                }
            }
            Ok(table)
        }
        other => Err(Error::MalformedSpec(format!("unknown builtin family '{other}'"))),
    }
}
