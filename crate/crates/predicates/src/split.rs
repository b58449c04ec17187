//! Rewrites a compiled implication over bounded alphabets into one whose
//! variables are all binary.
//!
//! The rewrite has two passes. Pass one appends, for every explicitly
//! bounded variable whose alphabet size is not a power of two, a uniformity
//! block pinning that variable to at most its declared number of values.
//! Alphabet bounds themselves do not survive bit decomposition (a bound of
//! three becomes two bits, which admit four values), so the bound has to be
//! restated as antecedent structure first. Pass two then replaces every
//! variable of bound `K` by `ceil(log2 K)` bit variables and maps each
//! statement through the substitution, which is exact because the bits of a
//! variable jointly carry the same information as the variable.
//!
//! Pass one is conservative only when the antecedent already forces the
//! pinned variables to be uniform; the compiled torus instances have this
//! property (every head coordinate passes through a cycle predicate, which
//! contains a uniformity block). Callers splitting hand-written instances
//! must ensure it themselves.

use std::collections::BTreeSet;

use ciwb_ci::{
    Bound, BoundKind, CIStatement, ImplicationInstance, VarSet, VariableSpec,
};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::build::{DefPlan, PredicateBuild, VarId};
use crate::error::PredicateError;
use crate::finalize::TilingImplication;

/// Result of the binary-split rewrite.
///
/// `extended` is the input instance with the pass-one uniformity blocks
/// appended; it still uses the original alphabets. `instance` is the binary
/// instance; its statements correspond one to one with `extended`'s, so
/// `paths` and `tags` describe both.
#[derive(Debug, Clone)]
pub struct SplitInstance {
    pub extended: ImplicationInstance,
    pub extended_plans: Vec<DefPlan>,
    pub instance: ImplicationInstance,
    /// One plan per binary variable, always `BitOf` into an `extended` id.
    pub plans: Vec<DefPlan>,
    pub paths: Vec<String>,
    pub tags: Vec<u32>,
    /// For each `extended` variable, the ids of its bit variables in
    /// `instance`, least significant first. Empty for bound-one variables,
    /// which are constants and vanish.
    pub bit_map: Vec<Vec<usize>>,
}

/// Number of bits needed to address an alphabet of size `k`.
pub fn bits_needed(k: &BigUint) -> u32 {
    if *k <= BigUint::from(1u8) {
        0
    } else {
        (k - 1u8).bits() as u32
    }
}

fn is_power_of_two(k: &BigUint) -> bool {
    k.count_ones() == 1
}

fn expand(s: &BTreeSet<usize>, bit_map: &[Vec<usize>]) -> BTreeSet<usize> {
    s.iter().flat_map(|&i| bit_map[i].iter().copied()).collect()
}

/// Maps a variable set through the bit substitution. Complement sets stay
/// complement sets: the bit variables partition the variable list, so the
/// complement of a union of bit blocks is the union of the remaining blocks.
fn map_set(vs: &VarSet, bit_map: &[Vec<usize>]) -> VarSet {
    match vs {
        VarSet::Explicit(s) => VarSet::Explicit(expand(s, bit_map)),
        VarSet::AllBut(s) => VarSet::AllBut(expand(s, bit_map)),
    }
}

fn map_statement(st: &CIStatement, bit_map: &[Vec<usize>]) -> CIStatement {
    CIStatement::new(
        map_set(&st.a, bit_map),
        map_set(&st.b, bit_map),
        map_set(&st.c, bit_map),
    )
}

/// Rewrites `instance` into an equivalent implication over binary variables.
///
/// `plans`, `paths`, `tags`, `anchor` and `fresh` are the build bookkeeping
/// returned alongside the instance by the compiler; pass one resumes the
/// build with them so the appended blocks share the memo and naming
/// machinery of ordinary emission.
pub fn split_binary(
    instance: &ImplicationInstance,
    plans: &[DefPlan],
    paths: &[String],
    tags: &[u32],
    anchor: VarId,
    fresh: u64,
) -> Result<SplitInstance, PredicateError> {
    let mut b = PredicateBuild::resume(instance, plans, paths, tags, anchor, fresh)?;

    let mut pins: Vec<(VarId, u64)> = Vec::new();
    for (id, spec) in b.vars().iter().enumerate() {
        if spec.kind != BoundKind::Explicit {
            continue;
        }
        let bound = match &spec.bound {
            Bound::Finite(k) => k,
            Bound::Unbounded => {
                return Err(PredicateError::UnboundedVariable(spec.name.clone()))
            }
        };
        if is_power_of_two(bound) {
            continue;
        }
        let k = bound
            .to_u64()
            .ok_or_else(|| PredicateError::BoundTooLarge(spec.name.clone()))?;
        pins.push((id, k));
    }
    for (id, k) in pins {
        b.emit_unif_le_k(&[id], k)?;
    }
    let (extended, extended_plans, paths, tags, _fresh) =
        b.into_parts(instance.consequent.clone());

    let mut bit_map: Vec<Vec<usize>> = Vec::with_capacity(extended.vars.len());
    let mut bit_vars: Vec<VariableSpec> = Vec::new();
    let mut bit_plans: Vec<DefPlan> = Vec::new();
    for (id, spec) in extended.vars.iter().enumerate() {
        let bound = match &spec.bound {
            Bound::Finite(k) => k,
            Bound::Unbounded => unreachable!("resume rejects unbounded variables"),
        };
        let n_bits = bits_needed(bound);
        let mut ids = Vec::with_capacity(n_bits as usize);
        for bit in 0..n_bits {
            ids.push(bit_vars.len());
            bit_vars.push(VariableSpec {
                name: format!("{}.b{}", spec.name, bit),
                bound: Bound::finite(2),
                kind: BoundKind::Explicit,
            });
            bit_plans.push(DefPlan::BitOf { of: id, bit });
        }
        bit_map.push(ids);
    }

    let split = ImplicationInstance {
        vars: bit_vars,
        antecedent: extended
            .antecedent
            .iter()
            .map(|st| map_statement(st, &bit_map))
            .collect(),
        consequent: map_statement(&extended.consequent, &bit_map),
    };

    Ok(SplitInstance {
        extended,
        extended_plans,
        instance: split,
        plans: bit_plans,
        paths,
        tags,
        bit_map,
    })
}

impl TilingImplication {
    /// Binary-splits this implication; see [`split_binary`].
    pub fn split_binary(&self) -> Result<SplitInstance, PredicateError> {
        split_binary(&self.instance, &self.plans, &self.paths, &self.tags, 0, self.fresh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finalize::finalize_implication;
    use ciwb_tiling::TileSystem;

    fn one_tile() -> TileSystem {
        let mut sys = TileSystem::new(vec!["a".to_string()]).unwrap();
        sys.add_h(0, 0);
        sys.add_v(0, 0);
        sys
    }

    #[test]
    fn bit_counts_round_up() {
        let b = |k: u64| bits_needed(&BigUint::from(k));
        assert_eq!(b(1), 0);
        assert_eq!(b(2), 1);
        assert_eq!(b(3), 2);
        assert_eq!(b(4), 2);
        assert_eq!(b(5), 3);
        assert_eq!(b(8), 3);
        assert_eq!(b(105), 7);
    }

    #[test]
    fn power_of_two_alphabets_need_no_pinning() {
        let ti = finalize_implication(&one_tile(), 2, 2, 0).unwrap();
        let split = ti.split_binary().unwrap();

        assert_eq!(split.extended.antecedent.len(), ti.instance.antecedent.len());
        assert_eq!(split.extended.vars.len(), ti.instance.vars.len());
        assert_eq!(split.instance.antecedent.len(), split.extended.antecedent.len());
        assert_eq!(split.tags, ti.tags);

        for spec in &split.instance.vars {
            assert_eq!(spec.bound, Bound::finite(2));
            assert_eq!(spec.kind, BoundKind::Explicit);
        }
        let concat: Vec<usize> = split.bit_map.iter().flatten().copied().collect();
        assert_eq!(concat, (0..split.instance.vars.len()).collect::<Vec<_>>());
        for (j, plan) in split.plans.iter().enumerate() {
            match plan {
                DefPlan::BitOf { of, bit } => {
                    assert_eq!(split.bit_map[*of][*bit as usize], j);
                    let parent = &split.extended.vars[*of].name;
                    assert_eq!(split.instance.vars[j].name, format!("{parent}.b{bit}"));
                }
                other => panic!("split plan should be BitOf, got {other:?}"),
            }
        }

        // The flip gadget uses a four-valued and a three-valued auxiliary;
        // both take two bits.
        let four = BigUint::from(4u8);
        let three = BigUint::from(3u8);
        let mut saw_four = false;
        let mut saw_three = false;
        for (id, spec) in split.extended.vars.iter().enumerate() {
            if spec.bound == Bound::Finite(four.clone()) {
                assert_eq!(split.bit_map[id].len(), 2);
                saw_four = true;
            }
            if spec.bound == Bound::Finite(three.clone()) {
                assert_eq!(split.bit_map[id].len(), 2);
                saw_three = true;
            }
        }
        assert!(saw_four && saw_three);

        let f_bit = split.bit_map[ti.roles.f][0];
        assert!(split.instance.consequent.a.contains(f_bit));
    }

    #[test]
    fn pinning_blocks_cover_non_power_alphabets() {
        let ti = finalize_implication(&one_tile(), 3, 2, 0).unwrap();
        let split = ti.split_binary().unwrap();

        // One uniformity block of 324 statements per three-valued head
        // coordinate (X1 and X2), nothing for the width-two coordinates.
        let base = ti.instance.antecedent.len();
        assert_eq!(split.extended.antecedent.len(), base + 2 * 324);
        let pinned = split.tags[base..]
            .iter()
            .filter(|&&t| split.paths[t as usize].starts_with("unifle3"))
            .count();
        assert_eq!(pinned, 2 * 324);

        assert_eq!(split.bit_map[ti.roles.x1].len(), 2);
        assert_eq!(split.instance.vars[split.bit_map[ti.roles.x1][0]].name, "X1.b0");
        assert_eq!(split.instance.vars[split.bit_map[ti.roles.x1][1]].name, "X1.b1");

        // The block's power auxiliary over a three-valued base has alphabet
        // nine; it splits into four bits with no further pinning.
        let nine = BigUint::from(9u8);
        let w1 = split
            .extended
            .vars
            .iter()
            .position(|v| v.bound == Bound::Finite(nine.clone()))
            .expect("cube block has a bound-9 auxiliary");
        assert_eq!(split.bit_map[w1].len(), 4);
    }

    #[test]
    fn complement_sets_map_through_the_bit_partition() {
        let vars = vec![
            VariableSpec {
                name: "B".into(),
                bound: Bound::finite(2),
                kind: BoundKind::Explicit,
            },
            VariableSpec {
                name: "A".into(),
                bound: Bound::finite(4),
                kind: BoundKind::Explicit,
            },
            VariableSpec {
                name: "D".into(),
                bound: Bound::finite(1),
                kind: BoundKind::Explicit,
            },
            VariableSpec {
                name: "C".into(),
                bound: Bound::finite(2),
                kind: BoundKind::Implicit,
            },
        ];
        let antecedent = vec![CIStatement::new(
            VarSet::explicit([3]),
            VarSet::all_but([1, 3]),
            VarSet::explicit([1]),
        )];
        let instance = ImplicationInstance {
            vars,
            antecedent,
            consequent: CIStatement::fd(vec![3], vec![1]),
        };
        let plans = vec![DefPlan::Given; 4];
        let paths = vec!["given".to_string()];
        let tags = vec![0];

        let split = split_binary(&instance, &plans, &paths, &tags, 0, 0).unwrap();

        // B -> bit 0, A -> bits 1 and 2, D -> nothing, C -> bit 3.
        assert_eq!(split.bit_map, vec![vec![0], vec![1, 2], vec![], vec![3]]);
        assert_eq!(
            split.instance.antecedent[0],
            CIStatement::new(
                VarSet::explicit([3]),
                VarSet::all_but([1, 2, 3]),
                VarSet::explicit([1, 2]),
            )
        );
        assert_eq!(split.instance.consequent, CIStatement::fd(vec![3], vec![1, 2]));
    }

    #[test]
    fn oversized_bounds_are_rejected() {
        let vars = vec![
            VariableSpec {
                name: "B".into(),
                bound: Bound::finite(2),
                kind: BoundKind::Explicit,
            },
            VariableSpec {
                name: "E".into(),
                bound: Bound::Finite((BigUint::from(1u8) << 80) + 1u8),
                kind: BoundKind::Explicit,
            },
        ];
        let instance = ImplicationInstance {
            vars,
            antecedent: vec![],
            consequent: CIStatement::fd(vec![1], vec![0]),
        };
        let plans = vec![DefPlan::Given; 2];
        let err = split_binary(&instance, &plans, &[], &[], 0, 0).unwrap_err();
        assert!(matches!(err, PredicateError::BoundTooLarge(name) if name == "E"));
    }
}
