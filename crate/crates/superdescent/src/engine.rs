//! The engine owns one algebra over one field tower and precomputes, for
//! every requested level, the superclass partition, the dual-orbit
//! partition, the supercharacter table, and (bound permitting) the
//! twisted-class partitions and norm correspondences between levels.
//!
//! Everything is built eagerly at construction; all later queries are
//! lookups plus small exact arithmetic. Constructions whose cost is
//! quadratic in the group order are guarded separately: when q^(2rn)
//! exceeds the size bound they are left out and their accessors report
//! the bound instead of degrading to sampling.

use std::collections::BTreeMap;

use crate::algebra::{builtin_dense, NilpotentAlgebra};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldTower};
use crate::input::{AlgebraSpec, RunConfig};
use crate::orbits::{
    build_dual_orbits, build_f_classes, build_superclasses, AdditiveCharacter, DualOrbit, FClass,
    LevelIndex, Superclass,
};
use crate::shintani::NormCorrespondence;
use crate::superchar::{build_supercharacters, Supercharacter};

#[derive(Debug)]
pub(crate) struct FPartition {
    pub classes: Vec<FClass>,
    pub owner: Vec<usize>,
}

#[derive(Debug)]
pub struct LevelTables {
    level: u32,
    p: u64,
    pub(crate) index: LevelIndex,
    superclasses: Vec<Superclass>,
    class_of: Vec<usize>,
    dual_orbits: Vec<DualOrbit>,
    orbit_of: Vec<usize>,
    supercharacters: Vec<Supercharacter>,
    // keyed by twist m (every level dividing this one); None when the
    // quadratic sweep was refused by the size bound
    twisted: Option<BTreeMap<u32, FPartition>>,
}

impl LevelTables {
    fn build(
        tower: &FieldTower,
        alg: &NilpotentAlgebra,
        levels: &[u32],
        level: u32,
        size_bound: u64,
    ) -> Result<LevelTables> {
        let index = LevelIndex::new(tower, alg.dim(), level)?;
        let (superclasses, class_of) = build_superclasses(tower, alg, &index);
        let (dual_orbits, orbit_of) = build_dual_orbits(tower, alg, &index);
        let supercharacters =
            build_supercharacters(tower, &index, &superclasses, &dual_orbits);
        let quadratic = (index.count() as u128).pow(2);
        let twisted = if quadratic <= size_bound as u128 {
            let mut map = BTreeMap::new();
            for &m in levels.iter().filter(|&&m| level.is_multiple_of(m)) {
                let (classes, owner) = build_f_classes(tower, alg, &index, m);
                map.insert(m, FPartition { classes, owner });
            }
            Some(map)
        } else {
            None
        };
        Ok(LevelTables {
            level,
            p: tower.p(),
            index,
            superclasses,
            class_of,
            dual_orbits,
            orbit_of,
            supercharacters,
            twisted,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn element_count(&self) -> usize {
        self.index.count()
    }

    /// Dual characters are indexed by the same scheme as elements.
    pub fn dual_count(&self) -> usize {
        self.index.count()
    }

    pub fn superclasses(&self) -> &[Superclass] {
        &self.superclasses
    }

    pub fn dual_orbits(&self) -> &[DualOrbit] {
        &self.dual_orbits
    }

    pub fn supercharacters(&self) -> &[Supercharacter] {
        &self.supercharacters
    }

    /// Superclass index of each element id.
    pub fn class_membership(&self) -> &[usize] {
        &self.class_of
    }

    /// Dual-orbit index of each dual character id.
    pub fn orbit_membership(&self) -> &[usize] {
        &self.orbit_of
    }

    /// Index of the supercharacter attached to a dual character.
    pub fn supercharacter_of_dual(&self, dual: usize) -> usize {
        self.orbit_of[dual]
    }

    pub fn additive_character(&self, dual: usize) -> AdditiveCharacter {
        AdditiveCharacter { level: self.level, coords: self.index.coords_of(dual) }
    }

    /// None when the coordinates do not all lie in this level's subfield.
    pub fn dual_index(&self, coords: &[FieldElement]) -> Option<usize> {
        if coords.len() != self.index.dim() {
            return None;
        }
        self.index.id_of(coords)
    }

    pub fn f_classes(&self, twist: u32) -> Result<&[FClass]> {
        self.f_partition(twist).map(|p| p.classes.as_slice())
    }

    /// Twisted-class index of each element id.
    pub fn f_class_membership(&self, twist: u32) -> Result<&[usize]> {
        self.f_partition(twist).map(|p| p.owner.as_slice())
    }

    pub(crate) fn f_partition(&self, twist: u32) -> Result<&FPartition> {
        if twist == 0 || !self.level.is_multiple_of(twist) {
            return Err(Error::NotDivisor { m: twist, n: self.level });
        }
        let map = self.twisted.as_ref().ok_or(Error::SizeBound {
            needed: (self.index.count() as u128).pow(2),
            bound: 0, // patched by Engine accessors; kept for the raw path
        })?;
        map.get(&twist).ok_or(Error::UnknownLevel(twist))
    }

    /// Ordinary conjugacy classes (twist = level). Panics when the size
    /// bound excluded the quadratic sweep; use f_classes for a soft path.
    pub fn conjugacy_classes(&self) -> &[FClass] {
        self.f_classes(self.level).expect("conjugacy classes excluded by the size bound")
    }
}

#[derive(Debug)]
pub struct Engine {
    pub(crate) tower: FieldTower,
    pub(crate) algebra: NilpotentAlgebra,
    levels: Vec<u32>,
    size_bound: u64,
    slow_oracle: bool,
    tables: BTreeMap<u32, LevelTables>,
    pub(crate) norms: BTreeMap<(u32, u32), NormCorrespondence>,
}

/// base^exp if it stays ≤ bound, else None.
fn pow_within(base: u128, exp: u64, bound: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc > bound {
            return None;
        }
    }
    Some(acc)
}

fn lcm_u64(a: u64, b: u64) -> Option<u64> {
    let g = gcd_u64(a, b);
    (a / g).checked_mul(b)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Engine {
    pub fn new(spec: &AlgebraSpec, config: &RunConfig) -> Result<Engine> {
        spec.validate()?;
        if config.levels.is_empty() {
            return Err(Error::InvalidArgument("at least one level is required".into()));
        }
        let mut levels = config.levels.clone();
        levels.sort_unstable();
        levels.dedup();
        for &n in &levels {
            for div in 1..=n {
                if n % div == 0 && !levels.contains(&div) {
                    return Err(Error::InvalidArgument(format!(
                        "level set must be divisor-closed: {n} requires {div}"
                    )));
                }
            }
        }

        let tower = FieldTower::build(spec.p, spec.d, &levels)?;
        let dense = match (&spec.builtin, spec.r, &spec.constants) {
            (Some(family), _, _) => {
                builtin_dense(&tower, family, spec.params.as_deref().unwrap_or(&[]))?
            }
            (None, Some(r), Some(entries)) => {
                let mut table = vec![vec![vec![tower.zero(); r]; r]; r];
                for e in entries {
                    table[e.i - 1][e.j - 1][e.k - 1] =
                        tower.fq_from_coeffs(&e.coeff)?;
                }
                table
            }
            _ => unreachable!("validate() admits exactly the two shapes"),
        };
        let algebra = NilpotentAlgebra::from_dense(&tower, dense)?;

        // enumeration gate: q^(r·lcm) must fit the bound
        let q = pow_within(spec.p as u128, spec.d as u64, u64::MAX as u128)
            .ok_or(Error::SizeBound { needed: u128::MAX, bound: config.size_bound })?;
        let l: u64 = levels
            .iter()
            .try_fold(1u64, |acc, &n| lcm_u64(acc, n as u64))
            .ok_or(Error::SizeBound { needed: u128::MAX, bound: config.size_bound })?;
        let exp = (algebra.dim() as u64)
            .checked_mul(l)
            .ok_or(Error::SizeBound { needed: u128::MAX, bound: config.size_bound })?;
        match pow_within(q, exp, config.size_bound as u128) {
            Some(_) => {}
            None => {
                let needed = pow_within(q, exp, u128::MAX / 2).unwrap_or(u128::MAX);
                return Err(Error::SizeBound { needed, bound: config.size_bound });
            }
        }

        let mut tables = BTreeMap::new();
        for &n in &levels {
            tables.insert(
                n,
                LevelTables::build(&tower, &algebra, &levels, n, config.size_bound)?,
            );
        }

        let mut engine = Engine {
            tower,
            algebra,
            levels,
            size_bound: config.size_bound,
            slow_oracle: config.slow_oracle,
            tables,
            norms: BTreeMap::new(),
        };
        engine.build_norm_correspondences()?;
        Ok(engine)
    }

    fn build_norm_correspondences(&mut self) -> Result<()> {
        let pairs: Vec<(u32, u32)> = self
            .levels
            .iter()
            .flat_map(|&n| {
                self.levels
                    .iter()
                    .filter(move |&&m| m < n && n % m == 0)
                    .map(move |&m| (n, m))
            })
            .collect();
        for (n, m) in pairs {
            if self.tables[&n].twisted.is_none() || self.tables[&m].twisted.is_none() {
                continue; // accessor reports the bound
            }
            let corr = NormCorrespondence::build(self, n, m)?;
            self.norms.insert((n, m), corr);
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.tower.p()
    }

    pub fn q(&self) -> u128 {
        self.tower.q()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn size_bound(&self) -> u64 {
        self.size_bound
    }

    pub fn slow_oracle(&self) -> bool {
        self.slow_oracle
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn algebra(&self) -> &NilpotentAlgebra {
        &self.algebra
    }

    /// Panics on a level outside the lattice; try_tables is the soft path.
    pub fn tables(&self, n: u32) -> &LevelTables {
        self.try_tables(n).expect("level not in the lattice")
    }

    pub fn try_tables(&self, n: u32) -> Result<&LevelTables> {
        self.tables.get(&n).ok_or(Error::UnknownLevel(n))
    }

    pub fn norm_correspondence(&self, n: u32, m: u32) -> Result<&NormCorrespondence> {
        let top = self.try_tables(n)?;
        self.try_tables(m)?;
        if m >= n || !n.is_multiple_of(m) {
            return Err(Error::NotDivisor { m, n });
        }
        self.norms.get(&(n, m)).ok_or(Error::SizeBound {
            needed: (top.element_count() as u128).pow(2),
            bound: self.size_bound,
        })
    }

    /// Twisted partitions with the engine's bound reported on refusal.
    pub(crate) fn f_partition(&self, n: u32, twist: u32) -> Result<&FPartition> {
        let t = self.try_tables(n)?;
        t.f_partition(twist).map_err(|e| match e {
            Error::SizeBound { needed, .. } => {
                Error::SizeBound { needed, bound: self.size_bound }
            }
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ut3_engine(levels: &[u32]) -> Engine {
        let spec = AlgebraSpec::builtin(2, 1, "ut", &[3]);
        Engine::new(&spec, &RunConfig::with_levels(levels)).unwrap()
    }

    #[test]
    fn builds_expected_table_shapes() {
        let eng = ut3_engine(&[1, 2]);
        assert_eq!(eng.tables(1).superclasses().len(), 5);
        assert_eq!(eng.tables(1).dual_orbits().len(), 5);
        assert_eq!(eng.tables(2).superclasses().len(), 19);
        assert_eq!(eng.tables(2).dual_orbits().len(), 19);
        assert_eq!(eng.tables(2).element_count(), 64);
        assert!(eng.norm_correspondence(2, 1).is_ok());
    }

    #[test]
    fn refuses_non_divisor_closed_levels() {
        let spec = AlgebraSpec::builtin(2, 1, "ut", &[3]);
        let err = Engine::new(&spec, &RunConfig::with_levels(&[2])).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn size_bound_refuses_enumeration() {
        let spec = AlgebraSpec::builtin(2, 1, "ut", &[3]);
        let mut config = RunConfig::with_levels(&[1, 2]);
        config.size_bound = 10;
        match Engine::new(&spec, &config) {
            Err(Error::SizeBound { needed, bound }) => {
                assert_eq!(needed, 64);
                assert_eq!(bound, 10);
            }
            other => panic!("expected SizeBound, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn quadratic_guard_disables_twisted_tables_only() {
        let spec = AlgebraSpec::builtin(2, 1, "ut", &[3]);
        let mut config = RunConfig::with_levels(&[1, 2]);
        config.size_bound = 100; // 64 fits, 64^2 does not
        let eng = Engine::new(&spec, &config).unwrap();
        assert_eq!(eng.tables(2).superclasses().len(), 19);
        assert!(matches!(eng.tables(2).f_classes(1), Err(Error::SizeBound { .. })));
        assert!(matches!(eng.norm_correspondence(2, 1), Err(Error::SizeBound { .. })));
        // level 1 is small enough for its own conjugacy classes
        assert_eq!(eng.tables(1).conjugacy_classes().len(), 5);
    }

    #[test]
    fn explicit_constants_match_builtin() {
        // ut(3) written out longhand: e1·e2 = e3
        let json = r#"{
            "p": 2, "d": 1, "r": 3,
            "constants": [{"i": 1, "j": 2, "k": 3, "coeff": [1]}]
        }"#;
        let spec = AlgebraSpec::from_json_str(json).unwrap();
        let eng = Engine::new(&spec, &RunConfig::with_levels(&[1])).unwrap();
        assert_eq!(eng.tables(1).superclasses().len(), 5);
        assert_eq!(eng.algebra().nilpotency_class(), 3);
    }

    #[test]
    fn unknown_level_is_soft_error() {
        let eng = ut3_engine(&[1]);
        assert!(matches!(eng.try_tables(3), Err(Error::UnknownLevel(3))));
    }
}
