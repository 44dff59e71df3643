//! Supercharacters and superclass functions. Values come by three
//! independent routes: the closed orbit-sum formula (used for the stored
//! tables), the superclass-sum form, and a literal induction oracle that
//! recomputes everything from the centraliser subgroup. The first two are
//! algebraically equivalent; the oracle is the referee for algebras with
//! no published tables.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cyclotomic::CycValue;
use crate::engine::{Engine, LevelTables};
use crate::error::{Error, Result};
use crate::field::FieldTower;
use crate::orbits::{
    centraliser_matrix, character_exponent, in_centraliser, matrix_rank_field, AdditiveCharacter,
    DualOrbit, LevelIndex, Superclass,
};

#[derive(Clone, Debug, PartialEq)]
pub struct SuperclassFunction {
    pub level: u32,
    pub values: Vec<CycValue>,
}

impl SuperclassFunction {
    pub fn zero(level: u32, classes: usize, p: u64) -> SuperclassFunction {
        SuperclassFunction { level, values: vec![CycValue::zero(p); classes] }
    }

    pub fn add(&self, other: &SuperclassFunction) -> Result<SuperclassFunction> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { expected: self.level, got: other.level });
        }
        if self.values.len() != other.values.len() {
            return Err(Error::InvalidArgument(
                "superclass functions have different class counts".into(),
            ));
        }
        let values =
            self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect();
        Ok(SuperclassFunction { level: self.level, values })
    }

    pub fn scale(&self, c: &CycValue) -> SuperclassFunction {
        SuperclassFunction {
            level: self.level,
            values: self.values.iter().map(|v| v.mul(c)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Supercharacter {
    pub level: u32,
    /// Index of the dual orbit this character belongs to.
    pub orbit: usize,
    /// ξ(1) = |Gϑ|; an integer, kept as one.
    pub degree: u64,
    /// ⟨ξ, ξ⟩ = |Gϑ ∩ ϑG|.
    pub norm: u64,
    pub values: SuperclassFunction,
}

pub(crate) fn cyc_from_exponent_counts(p: u64, counts: &[i64]) -> CycValue {
    let mut acc = CycValue::zero(p);
    for (e, &c) in counts.iter().enumerate() {
        if c != 0 {
            acc = acc.add(&CycValue::root_of_unity(p, e as i64).scale(&BigRational::from(
                BigInt::from(c),
            )));
        }
    }
    acc
}

/// ζ-exponent histogram of one dual character over a set of element ids.
fn exponent_counts(
    tower: &FieldTower,
    idx: &LevelIndex,
    theta: &AdditiveCharacter,
    ids: &[usize],
) -> Vec<i64> {
    let mut counts = vec![0i64; tower.p() as usize];
    for &id in ids {
        counts[character_exponent(tower, theta, &idx.coords_of(id)) as usize] += 1;
    }
    counts
}

/// One supercharacter per dual orbit, valued on superclass representatives
/// through the orbit-sum formula: ξ(1+a) = (|Gϑ|/|GϑG|)·Σ_{ϑ'} ϑ'(a).
pub(crate) fn build_supercharacters(
    tower: &FieldTower,
    idx: &LevelIndex,
    classes: &[Superclass],
    orbits: &[DualOrbit],
) -> Vec<Supercharacter> {
    let p = tower.p();
    orbits
        .iter()
        .enumerate()
        .map(|(oi, orbit)| {
            let prefactor = BigRational::new(
                BigInt::from(orbit.left_orbit_size),
                BigInt::from(orbit.members.len() as u64),
            );
            let members: Vec<AdditiveCharacter> = orbit
                .members
                .iter()
                .map(|&d| AdditiveCharacter { level: idx.level(), coords: idx.coords_of(d) })
                .collect();
            let values = classes
                .iter()
                .map(|class| {
                    let a = idx.coords_of(class.rep);
                    let mut counts = vec![0i64; p as usize];
                    for theta in &members {
                        counts[character_exponent(tower, theta, &a) as usize] += 1;
                    }
                    cyc_from_exponent_counts(p, &counts).scale(&prefactor)
                })
                .collect();
            Supercharacter {
                level: idx.level(),
                orbit: oi,
                degree: orbit.left_orbit_size,
                norm: orbit.biinvariant_size,
                values: SuperclassFunction { level: idx.level(), values },
            }
        })
        .collect()
}

impl LevelTables {
    /// ⟨φ, ψ⟩ = (1/|G|)·Σ_K |K|·φ(K)·conj(ψ(K)), exact.
    pub fn inner_product(
        &self,
        phi: &SuperclassFunction,
        psi: &SuperclassFunction,
    ) -> Result<CycValue> {
        if phi.level != self.level() {
            return Err(Error::LevelMismatch { expected: self.level(), got: phi.level });
        }
        if psi.level != self.level() {
            return Err(Error::LevelMismatch { expected: self.level(), got: psi.level });
        }
        if phi.values.len() != self.superclasses().len()
            || psi.values.len() != self.superclasses().len()
        {
            return Err(Error::InvalidArgument(
                "superclass function does not match the class count".into(),
            ));
        }
        let mut acc = CycValue::zero(self.p());
        for (k, class) in self.superclasses().iter().enumerate() {
            let term = phi.values[k].mul(&psi.values[k].conj());
            acc = acc.add(&term.scale(&BigRational::from(BigInt::from(class.members.len()))));
        }
        Ok(acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(self.element_count()))))
    }
}

impl Engine {
    /// Orbit-sum route at a single element: ξ_ϑ(1+a) with a given by id.
    pub fn supercharacter_value(&self, n: u32, dual: usize, element: usize) -> Result<CycValue> {
        let t = self.try_tables(n)?;
        if dual >= t.dual_count() || element >= t.element_count() {
            return Err(Error::InvalidArgument("dual or element id out of range".into()));
        }
        let orbit = &t.dual_orbits()[t.supercharacter_of_dual(dual)];
        let a = t.index.coords_of(element);
        let p = self.p();
        let mut counts = vec![0i64; p as usize];
        for &d in &orbit.members {
            let theta = t.additive_character(d);
            counts[character_exponent(&self.tower, &theta, &a) as usize] += 1;
        }
        let prefactor = BigRational::new(
            BigInt::from(orbit.left_orbit_size),
            BigInt::from(orbit.members.len() as u64),
        );
        Ok(cyc_from_exponent_counts(p, &counts).scale(&prefactor))
    }

    /// Superclass-sum route: ξ_ϑ(1+a) = (|Gϑ|/|GaG|)·Σ_{b ∈ GaG} ϑ(b).
    /// Uses the given ϑ itself, not an orbit representative, so agreement
    /// with the orbit-sum route is a genuine cross-check.
    pub fn supercharacter_by_class_sum(
        &self,
        n: u32,
        dual: usize,
        class: usize,
    ) -> Result<CycValue> {
        let t = self.try_tables(n)?;
        if dual >= t.dual_count() || class >= t.superclasses().len() {
            return Err(Error::InvalidArgument("dual or class id out of range".into()));
        }
        let theta = t.additive_character(dual);
        let members = &t.superclasses()[class].members;
        let counts = exponent_counts(&self.tower, &t.index, &theta, members);
        let left = t.dual_orbits()[t.supercharacter_of_dual(dual)].left_orbit_size;
        let prefactor =
            BigRational::new(BigInt::from(left), BigInt::from(members.len() as u64));
        Ok(cyc_from_exponent_counts(self.p(), &counts).scale(&prefactor))
    }

    /// Literal induction from the left-centraliser subgroup L = 1 + 𝓛:
    /// ξ(g) = (1/|L|)·Σ_{h ∈ G} ν°(hgh⁻¹) with ν(1+u) = ϑ(u) on L and
    /// zero elsewhere. Quadratic in |G|; the referee route.
    pub fn induced_character_oracle(&self, n: u32, dual: usize) -> Result<SuperclassFunction> {
        let t = self.try_tables(n)?;
        if dual >= t.dual_count() {
            return Err(Error::InvalidArgument("dual id out of range".into()));
        }
        let count = t.element_count();
        let quadratic = (count as u128).pow(2);
        if quadratic > self.size_bound() as u128 {
            return Err(Error::SizeBound { needed: quadratic, bound: self.size_bound() });
        }
        let theta = t.additive_character(dual);
        let matrix = centraliser_matrix(&self.tower, &self.algebra, &theta, true);
        let rank = matrix_rank_field(&self.tower, &matrix);
        let subgroup_order =
            (t.index.scalar_count() as u64).pow((self.algebra.dim() - rank) as u32);
        let p = self.p();

        let conjugators: Vec<_> = (0..count)
            .map(|hid| {
                let h = t.index.group_element(hid);
                let hinv = self.algebra.group_inv(&self.tower, &h);
                (h, hinv)
            })
            .collect();
        let value_at = |gid: usize| -> CycValue {
            let g = t.index.group_element(gid);
            let mut counts = vec![0i64; p as usize];
            for (h, hinv) in &conjugators {
                let hg = self.algebra.group_mul(&self.tower, h, &g);
                let hgh = self.algebra.group_mul(&self.tower, &hg, hinv);
                if in_centraliser(&self.tower, &matrix, &hgh.body.coords) {
                    counts[character_exponent(&self.tower, &theta, &hgh.body.coords) as usize] +=
                        1;
                }
            }
            cyc_from_exponent_counts(p, &counts)
                .scale(&BigRational::new(BigInt::from(1), BigInt::from(subgroup_order)))
        };

        let values = t
            .superclasses()
            .iter()
            .map(|class| {
                let v = value_at(class.rep);
                for &other in class.members.iter().filter(|&&m| m != class.rep) {
                    // induced characters must be superclass functions
                    assert_eq!(v, value_at(other), "induction oracle varies on a superclass");
                }
                v
            })
            .collect();
        Ok(SuperclassFunction { level: n, values })
    }

    /// Multiplicities of the supercharacters in the regular character:
    /// m_ξ = ξ(1)/⟨ξ,ξ⟩, verified to reassemble |G|·[g = 1] exactly.
    pub fn regular_decomposition(&self, n: u32) -> Result<Vec<(usize, u64)>> {
        let t = self.try_tables(n)?;
        let mut out = Vec::with_capacity(t.supercharacters().len());
        for (i, xi) in t.supercharacters().iter().enumerate() {
            if xi.norm == 0 || xi.degree % xi.norm != 0 {
                return Err(Error::NonIntegerMultiplicity {
                    orbit: i,
                    degree: xi.degree,
                    norm: xi.norm,
                });
            }
            out.push((i, xi.degree / xi.norm));
        }
        let p = self.p();
        let identity_class = t.class_membership()[0];
        for k in 0..t.superclasses().len() {
            let mut acc = CycValue::zero(p);
            for &(i, m) in &out {
                acc = acc.add(
                    &t.supercharacters()[i].values.values[k].mul(&CycValue::integer(p, m as i64)),
                );
            }
            let expect = if k == identity_class {
                CycValue::integer(p, t.element_count() as i64)
            } else {
                CycValue::zero(p)
            };
            assert_eq!(acc, expect, "regular character fails to reassemble at class {k}");
        }
        Ok(out)
    }

    /// ξ/ξ(1), verified against the plain orbit average
    /// (1/|GϑG|)·Σ_{ϑ'} ϑ'(a) recomputed from scratch.
    pub fn normalize(&self, n: u32, orbit: usize) -> Result<SuperclassFunction> {
        let t = self.try_tables(n)?;
        if orbit >= t.supercharacters().len() {
            return Err(Error::InvalidArgument("orbit index out of range".into()));
        }
        let xi = &t.supercharacters()[orbit];
        let inv_degree = BigRational::new(BigInt::from(1), BigInt::from(xi.degree));
        let values: Vec<CycValue> =
            xi.values.values.iter().map(|v| v.scale(&inv_degree)).collect();

        let o = &t.dual_orbits()[orbit];
        let p = self.p();
        let average = BigRational::new(BigInt::from(1), BigInt::from(o.members.len() as u64));
        for (k, class) in t.superclasses().iter().enumerate() {
            let a = t.index.coords_of(class.rep);
            let mut counts = vec![0i64; p as usize];
            for &d in &o.members {
                let theta = t.additive_character(d);
                counts[character_exponent(&self.tower, &theta, &a) as usize] += 1;
            }
            let direct = cyc_from_exponent_counts(p, &counts).scale(&average);
            assert_eq!(direct, values[k], "orbit average disagrees with ξ/ξ(1) at class {k}");
        }
        Ok(SuperclassFunction { level: n, values })
    }
}
