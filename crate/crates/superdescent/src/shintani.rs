//! Norm maps between twisted classes at level n and ordinary classes at
//! level m | n, the F-action on dual characters and supercharacters, and
//! Shintani descent of superclass functions.
//!
//! One pitfall shapes this module. The table supercharacter ξ_ϑ is NOT
//! constant on F-twisted classes, even for F-invariant ϑ: at level 2 over
//! F_2 in ut(3), ξ at the identity is the degree 4, while the identity's
//! twisted class contains 1+e1 where ξ vanishes. What descends pointwise
//! through the norm map is the twisted induction
//!
//! ```text
//! Ξ_ϑ(g) = (1/|L(ϑ)|) · Σ_x ν°_ϑ(x⁻¹ · g · F(x)),
//! ```
//!
//! and Sh(Ξ_ϑ) equals the base supercharacter ξ_τ exactly, where ϑ is the
//! trace lift of τ. On superclass functions the descent therefore acts by
//! transporting supercharacter coefficients along the fixed-orbit
//! bijection; `twisted_induction_check` grounds that bijection in the
//! pointwise norm-map computation and is the expensive, honest part.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::GroupElement;
use crate::cyclotomic::CycValue;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::orbits::{
    centraliser_matrix, character_exponent, in_centraliser, matrix_rank_field, AdditiveCharacter,
};
use crate::superchar::{cyc_from_exponent_counts, SuperclassFunction};

#[derive(Clone, Debug)]
pub struct NormCorrespondence {
    pub n: u32,
    pub m: u32,
    /// Twisted-class index at level n (twist m) → conjugacy-class index at
    /// level m.
    pub forward: Vec<usize>,
    pub certified_bijection: bool,
}

impl NormCorrespondence {
    /// The landing is found by conjugator search: for each twisted-class
    /// representative x some conjugate of Nm(x) has level-m coordinates,
    /// and every successful conjugator must land in one and the same
    /// level-m class. Both facts are checked, not assumed.
    pub(crate) fn build(eng: &Engine, n: u32, m: u32) -> Result<NormCorrespondence> {
        let tn = eng.tables(n);
        let tm = eng.tables(m);
        let twisted = eng.f_partition(n, m)?;
        let conj = eng.f_partition(m, m)?;

        let count = tn.element_count();
        let mut forward = Vec::with_capacity(twisted.classes.len());
        for (ci, class) in twisted.classes.iter().enumerate() {
            let x = tn.index.group_element(class.rep);
            let norm = eng.norm_element(&x, m)?;
            let mut landings = BTreeSet::new();
            for gid in 0..count {
                let g = tn.index.group_element(gid);
                let conjugate = eng.algebra.conjugate(&eng.tower, &g, &norm);
                if conjugate.body.coords.iter().all(|c| eng.tower.is_level(c, m)) {
                    let id = tm
                        .index
                        .id_of(&conjugate.body.coords)
                        .expect("level-m coordinates index at level m");
                    landings.insert(conj.owner[id]);
                }
            }
            let mut it = landings.into_iter();
            let first = it.next().ok_or(Error::NoLanding { level: n, twist: m, class: ci })?;
            if let Some(second) = it.next() {
                return Err(Error::AmbiguousLanding {
                    level: n,
                    twist: m,
                    class: ci,
                    first,
                    second,
                });
            }
            forward.push(first);
        }
        let distinct: BTreeSet<usize> = forward.iter().copied().collect();
        let certified_bijection =
            distinct.len() == forward.len() && forward.len() == conj.classes.len();
        Ok(NormCorrespondence { n, m, forward, certified_bijection })
    }
}

impl Engine {
    /// Nm(g) = g·F^m(g)·F^2m(g)⋯F^(n−m)(g) with n the level of g. The
    /// result stays at level n; it need not have level-m coordinates.
    pub fn norm_element(&self, g: &GroupElement, m: u32) -> Result<GroupElement> {
        let n = g.body.level;
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotDivisor { m, n });
        }
        let mut acc = g.clone();
        let mut power = g.clone();
        for _ in 1..n / m {
            power = self.algebra.group_frobenius_pow(&self.tower, &power, m);
            acc = self.algebra.group_mul(&self.tower, &acc, &power);
        }
        Ok(acc)
    }

    /// τ ↦ τ∘Tr_{n,m}: the same dual coordinates reinterpreted at level n.
    pub fn dual_trace_lift(&self, tau: &AdditiveCharacter, n: u32) -> Result<AdditiveCharacter> {
        let m = tau.level;
        self.try_tables(m)?;
        self.try_tables(n)?;
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotDivisor { m, n });
        }
        if tau.coords.len() != self.algebra.dim()
            || tau.coords.iter().any(|c| !self.tower.is_level(c, m))
        {
            return Err(Error::InvalidArgument(
                "dual coordinates do not lie at the claimed level".into(),
            ));
        }
        Ok(AdditiveCharacter { level: n, coords: tau.coords.clone() })
    }

    /// ϑ ↦ ϑ∘F^m as a permutation of dual-character ids at level n; in
    /// coordinates this is the inverse Frobenius applied entrywise.
    pub fn f_action_on_duals(&self, n: u32, m: u32) -> Result<Vec<usize>> {
        let t = self.try_tables(n)?;
        let order = self.tower.ambient_exp();
        let k = (order - m % order) % order;
        let perm: Vec<usize> = (0..t.dual_count())
            .map(|d| {
                let coords: Vec<_> = t
                    .index
                    .coords_of(d)
                    .iter()
                    .map(|c| self.tower.frobenius_pow(c, k))
                    .collect();
                t.index.id_of(&coords).expect("Frobenius preserves the level")
            })
            .collect();
        debug_assert!({
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            sorted.iter().copied().eq(0..t.dual_count())
        });
        Ok(perm)
    }

    pub fn is_dual_f_invariant(&self, theta: &AdditiveCharacter, m: u32) -> bool {
        theta.coords.iter().all(|c| self.tower.frobenius_pow(c, m) == *c)
    }

    /// The permutation ξ ↦ ξ∘F^m on supercharacters (dual orbits) plus
    /// the sorted fixed set. Every fixed orbit is checked to contain an
    /// F^m-invariant character, the converse direction of the fixed-point
    /// characterization.
    pub fn f_action_on_supercharacters(
        &self,
        n: u32,
        m: u32,
    ) -> Result<(Vec<usize>, Vec<usize>)> {
        let t = self.try_tables(n)?;
        let dual_perm = self.f_action_on_duals(n, m)?;
        let orbit_of = t.orbit_membership();
        let mut perm = Vec::with_capacity(t.dual_orbits().len());
        for orbit in t.dual_orbits() {
            let target = orbit_of[dual_perm[orbit.rep]];
            for &d in &orbit.members {
                // a field automorphism must map dual orbits onto dual orbits
                assert_eq!(orbit_of[dual_perm[d]], target, "orbit image is not an orbit");
            }
            perm.push(target);
        }
        let fixed: Vec<usize> = (0..perm.len()).filter(|&i| perm[i] == i).collect();
        for &oi in &fixed {
            let has_invariant = t.dual_orbits()[oi]
                .members
                .iter()
                .any(|&d| self.is_dual_f_invariant(&t.additive_character(d), m));
            assert!(has_invariant, "fixed orbit {oi} lacks an F-invariant character");
        }
        Ok((perm, fixed))
    }

    /// The descent bijection on labels: each F^m-fixed supercharacter at
    /// level n maps to the level-m supercharacter of any F^m-invariant
    /// member of its dual orbit, read at level m through the coordinates.
    /// Independence of the member, injectivity, and surjectivity onto the
    /// level-m supercharacters are all asserted.
    pub(crate) fn fixed_orbit_descent(&self, n: u32, m: u32) -> Result<BTreeMap<usize, usize>> {
        let tn = self.try_tables(n)?;
        let tm = self.try_tables(m)?;
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotDivisor { m, n });
        }
        let (_, fixed) = self.f_action_on_supercharacters(n, m)?;
        let mut map = BTreeMap::new();
        let mut targets = BTreeSet::new();
        for &oi in &fixed {
            let mut target: Option<usize> = None;
            for &d in &tn.dual_orbits()[oi].members {
                let theta = tn.additive_character(d);
                if !self.is_dual_f_invariant(&theta, m) {
                    continue;
                }
                let tid = tm
                    .dual_index(&theta.coords)
                    .expect("invariant coordinates live at the base level");
                let t = tm.orbit_membership()[tid];
                match target {
                    None => target = Some(t),
                    Some(prev) => {
                        assert_eq!(prev, t, "descent target depends on the invariant member")
                    }
                }
            }
            let t = target.expect("fixed orbit lacks an F-invariant character");
            assert!(targets.insert(t), "two fixed supercharacters descend to one target");
            map.insert(oi, t);
        }
        assert_eq!(
            map.len(),
            tm.dual_orbits().len(),
            "descent must reach every base supercharacter"
        );
        Ok(map)
    }

    /// Shintani descent on superclass functions: decompose over the
    /// (orthogonal, complete) supercharacter basis at level n, require the
    /// support to be F^m-fixed, and transport coefficients along the
    /// fixed-orbit bijection. Exact throughout.
    pub fn shintani_descend(
        &self,
        phi: &SuperclassFunction,
        m: u32,
    ) -> Result<SuperclassFunction> {
        let n = phi.level;
        let tn = self.try_tables(n)?;
        let tm = self.try_tables(m)?;
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotDivisor { m, n });
        }
        if phi.values.len() != tn.superclasses().len() {
            return Err(Error::InvalidArgument(
                "superclass function does not match the class count".into(),
            ));
        }
        let (perm, _) = self.f_action_on_supercharacters(n, m)?;
        let map = self.fixed_orbit_descent(n, m)?;

        let chars = tn.supercharacters();
        let coeffs: Vec<CycValue> = chars
            .iter()
            .map(|xi| {
                let ip = tn.inner_product(phi, &xi.values)?;
                Ok(ip.scale(&BigRational::new(BigInt::from(1), BigInt::from(xi.norm))))
            })
            .collect::<Result<_>>()?;
        // the basis is orthogonal and spans, so the coefficients must
        // reassemble the input; anything else is a corrupted table
        for (k, expected) in phi.values.iter().enumerate() {
            let mut acc = CycValue::zero(self.p());
            for (c, xi) in coeffs.iter().zip(chars) {
                if !c.is_zero() {
                    acc = acc.add(&c.mul(&xi.values.values[k]));
                }
            }
            assert_eq!(acc, *expected, "supercharacters failed to reassemble the input");
        }
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() && !map.contains_key(&i) {
                return Err(Error::NotTwistedClassFunction(i, perm[i]));
            }
        }

        let mut out = SuperclassFunction::zero(m, tm.superclasses().len(), self.p());
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let base = &tm.supercharacters()[map[&i]].values;
            out = out.add(&base.scale(c))?;
        }
        Ok(out)
    }

    /// Pointwise grounding of the descent: for F^m-invariant ϑ, evaluate
    /// the twisted induction Ξ_ϑ(g) = (1/|L|)·Σ_x ν°(x⁻¹·g·F^m(x)) at
    /// every element of every twisted class and compare against the base
    /// supercharacter ξ_τ through the norm correspondence (τ has the same
    /// coordinates as ϑ, read at level m). Verifies constancy on twisted
    /// classes along the way. Quadratic in the group order.
    pub fn twisted_induction_check(&self, theta: &AdditiveCharacter, m: u32) -> Result<bool> {
        let n = theta.level;
        let tn = self.try_tables(n)?;
        let tm = self.try_tables(m)?;
        if !self.is_dual_f_invariant(theta, m) {
            return Err(Error::InvalidArgument(
                "twisted induction requires an F-invariant character".into(),
            ));
        }
        if tn.dual_index(&theta.coords).is_none() {
            return Err(Error::InvalidArgument("character is not at this level".into()));
        }
        let count = tn.element_count();
        let quadratic = (count as u128) * (count as u128);
        if quadratic > self.size_bound() as u128 {
            return Err(Error::SizeBound { needed: quadratic, bound: self.size_bound() });
        }
        let corr = self.norm_correspondence(n, m)?;
        let twisted = self.f_partition(n, m)?;
        let conj = self.f_partition(m, m)?;

        let tau = tm.dual_index(&theta.coords).expect("invariant coordinates live at level m");
        let base = &tm.supercharacters()[tm.supercharacter_of_dual(tau)].values.values;
        let class_of_m = tm.class_membership();

        let matrix = centraliser_matrix(&self.tower, &self.algebra, theta, true);
        let rank = matrix_rank_field(&self.tower, &matrix);
        let subgroup_order =
            (tn.index.scalar_count() as u64).pow((self.algebra.dim() - rank) as u32);
        let p = self.p();
        let sweep: Vec<(GroupElement, GroupElement)> = (0..count)
            .map(|xid| {
                let x = tn.index.group_element(xid);
                let xinv = self.algebra.group_inv(&self.tower, &x);
                let fx = self.algebra.group_frobenius_pow(&self.tower, &x, m);
                (xinv, fx)
            })
            .collect();

        for (ci, class) in twisted.classes.iter().enumerate() {
            let landing_rep = conj.classes[corr.forward[ci]].rep;
            let expected = &base[class_of_m[landing_rep]];
            for &gid in &class.members {
                let g = tn.index.group_element(gid);
                let mut counts = vec![0i64; p as usize];
                for (xinv, fx) in &sweep {
                    let xg = self.algebra.group_mul(&self.tower, xinv, &g);
                    let y = self.algebra.group_mul(&self.tower, &xg, fx);
                    if in_centraliser(&self.tower, &matrix, &y.body.coords) {
                        counts
                            [character_exponent(&self.tower, theta, &y.body.coords) as usize] += 1;
                    }
                }
                let value = cyc_from_exponent_counts(p, &counts)
                    .scale(&BigRational::new(BigInt::from(1), BigInt::from(subgroup_order)));
                if value != *expected {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::{AlgebraSpec, RunConfig};

    fn ut3_q2() -> Engine {
        let spec = AlgebraSpec::builtin(2, 1, "ut", &[3]);
        Engine::new(&spec, &RunConfig::with_levels(&[1, 2])).unwrap()
    }

    #[test]
    fn norm_of_twist_conjugate_pair() {
        let eng = ut3_q2();
        let t = eng.tables(2);
        // g = 1 + ω·e1 with ω a generator of F_4: Nm(g) = 1 + e1
        let omega = eng.tower().element(vec![0, 1]).unwrap();
        let mut coords = vec![eng.tower().zero(); 3];
        coords[0] = omega;
        let gid = t.index.id_of(&coords).unwrap();
        let g = t.index.group_element(gid);
        let norm = eng.norm_element(&g, 1).unwrap();
        assert_eq!(norm.body.coords[0], eng.tower().one());
        assert!(eng.tower().is_zero(&norm.body.coords[1]));
        assert!(eng.tower().is_zero(&norm.body.coords[2]));

        let id = eng.algebra().identity(eng.tower(), 2);
        assert_eq!(eng.norm_element(&id, 1).unwrap(), id);
    }

    #[test]
    fn abelian_norm_is_trace() {
        let spec = AlgebraSpec::builtin(2, 1, "abelian", &[1]);
        let eng = Engine::new(&spec, &RunConfig::with_levels(&[1, 2])).unwrap();
        let omega = eng.tower().element(vec![0, 1]).unwrap();
        let g = crate::algebra::GroupElement {
            body: crate::algebra::AlgebraElement { level: 2, coords: vec![omega.clone()] },
        };
        let norm = eng.norm_element(&g, 1).unwrap();
        let trace = eng.tower().field_trace(&omega, 2, 1).unwrap();
        assert_eq!(norm.body.coords[0], trace);
    }

    #[test]
    fn norm_correspondence_is_certified() {
        let eng = ut3_q2();
        let corr = eng.norm_correspondence(2, 1).unwrap();
        assert!(corr.certified_bijection);
        assert_eq!(corr.forward.len(), 5);
        assert_eq!(eng.tables(2).f_classes(1).unwrap().len(), 5);
        assert_eq!(eng.tables(1).conjugacy_classes().len(), 5);
    }

    #[test]
    fn lift_image_is_the_fixed_set() {
        let eng = ut3_q2();
        let base = eng.tables(1);
        let top = eng.tables(2);
        let mut lifted: Vec<usize> = (0..base.dual_count())
            .map(|tau| {
                let theta = eng.dual_trace_lift(&base.additive_character(tau), 2).unwrap();
                assert!(eng.is_dual_f_invariant(&theta, 1));
                top.dual_index(&theta.coords).unwrap()
            })
            .collect();
        lifted.sort_unstable();
        let perm = eng.f_action_on_duals(2, 1).unwrap();
        let fixed: Vec<usize> = (0..top.dual_count()).filter(|&d| perm[d] == d).collect();
        assert_eq!(lifted, fixed);
        assert_eq!(lifted.len(), 8);
    }

    #[test]
    fn descent_roundtrip_for_central_character() {
        let eng = ut3_q2();
        let base = eng.tables(1);
        // τ = e3*
        let tau_coords = {
            let t = eng.tower();
            vec![t.zero(), t.zero(), t.one()]
        };
        let tau = base.dual_index(&tau_coords).unwrap();
        let theta = eng.dual_trace_lift(&base.additive_character(tau), 2).unwrap();
        let lifted = eng.tables(2).dual_index(&theta.coords).unwrap();
        let xi_top = eng.tables(2).supercharacter_of_dual(lifted);
        let descended = eng
            .shintani_descend(&eng.tables(2).supercharacters()[xi_top].values, 1)
            .unwrap();
        let xi_base = base.supercharacter_of_dual(tau);
        assert_eq!(descended, base.supercharacters()[xi_base].values);
        // upstairs the degree grows from 2 to 4
        assert_eq!(eng.tables(2).supercharacters()[xi_top].degree, 4);
        assert_eq!(base.supercharacters()[xi_base].degree, 2);
    }

    #[test]
    fn five_fixed_supercharacters_at_level_two() {
        let eng = ut3_q2();
        let (perm, fixed) = eng.f_action_on_supercharacters(2, 1).unwrap();
        assert_eq!(fixed.len(), 5);
        assert_eq!(perm.len(), 19);
    }

    #[test]
    fn twisted_induction_realizes_descent() {
        let eng = ut3_q2();
        let theta = {
            let tw = eng.tower();
            AdditiveCharacter { level: 2, coords: vec![tw.zero(), tw.zero(), tw.one()] }
        };
        assert!(eng.twisted_induction_check(&theta, 1).unwrap());
        // non-invariant characters are rejected up front
        let omega = eng.tower().element(vec![0, 1]).unwrap();
        let bad = AdditiveCharacter {
            level: 2,
            coords: vec![eng.tower().zero(), eng.tower().zero(), omega],
        };
        assert!(!eng.is_dual_f_invariant(&bad, 1));
        assert!(eng.twisted_induction_check(&bad, 1).is_err());
    }

    #[test]
    fn non_fixed_supercharacter_is_rejected() {
        let eng = ut3_q2();
        let t = eng.tables(2);
        let (perm, _) = eng.f_action_on_supercharacters(2, 1).unwrap();
        let moved = (0..perm.len()).find(|&i| perm[i] != i).unwrap();
        let phi = &t.supercharacters()[moved].values;
        match eng.shintani_descend(phi, 1) {
            Err(Error::NotTwistedClassFunction(a, b)) => {
                assert_eq!(a, moved);
                assert_eq!(b, perm[moved]);
            }
            other => panic!("expected a descent-domain rejection, got {other:?}"),
        }
    }

    #[test]
    fn descent_is_linear_on_the_fixed_span() {
        let eng = ut3_q2();
        let t = eng.tables(2);
        let (_, fixed) = eng.f_action_on_supercharacters(2, 1).unwrap();
        let p = eng.p();
        let two = CycValue::integer(p, 2);
        let minus_three = CycValue::integer(p, -3);
        let a = &t.supercharacters()[fixed[0]].values;
        let b = &t.supercharacters()[fixed[1]].values;
        let combo = a.scale(&two).add(&b.scale(&minus_three)).unwrap();
        let lhs = eng.shintani_descend(&combo, 1).unwrap();
        let rhs = eng
            .shintani_descend(a, 1)
            .unwrap()
            .scale(&two)
            .add(&eng.shintani_descend(b, 1).unwrap().scale(&minus_three))
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}
