//! Exact verification of CI statements against a structured distribution.
//!
//! Statements are decided by the cheapest sound certificate available, in a
//! fixed order. Closure reasoning covers functional dependence chains: the
//! conditioning set is closed under "determines" rules (copies, tuples, pad
//! constructions and their inverses, bit decompositions), and a statement
//! whose left side lands inside the closure holds outright. Independence
//! certificates cover unconditional statements whose sides touch disjoint
//! factors, or one-time-pad shapes where a fresh uniform pad masks the base.
//! Everything else is decided by exact enumeration over the factors the
//! statement depends on. A statement none of the methods can decide is a
//! hard error, never a silent verdict.

use num_bigint::BigUint;

use ciwb_ci::statement::{Bound, CIStatement, ImplicationInstance, VarSet};

use crate::error::WitnessError;
use crate::structured::{Def, DepSet, StructuredDistribution, ENUM_CAP};

/// How a statement was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// The conditioning set functionally determines one side.
    Closure,
    /// The sides are functions of disjoint independent factors.
    LeafFactor,
    /// One side is a padded value whose fresh pad is independent of the
    /// other side, so the padded value is an independent uniform mask.
    PadMask,
    /// Pad versus padded value with a uniform full-range base.
    UniformBase,
    /// Exact enumeration over the touched factors.
    Enumerated,
}

#[derive(Clone, Copy, Debug)]
pub struct Verdict {
    pub holds: bool,
    pub method: Method,
}

#[derive(Clone, Debug)]
pub struct BoundViolation {
    pub var: usize,
    pub support: BigUint,
    pub bound: BigUint,
}

#[derive(Debug)]
pub struct VerificationReport {
    pub antecedent: Vec<Verdict>,
    pub consequent: Verdict,
    pub bound_violations: Vec<BoundViolation>,
}

impl VerificationReport {
    pub fn antecedent_holds(&self) -> bool {
        self.antecedent.iter().all(|v| v.holds)
    }

    pub fn failing_antecedents(&self) -> Vec<usize> {
        self.antecedent
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.holds)
            .map(|(i, _)| i)
            .collect()
    }

    /// All antecedents hold, the consequent fails, and every variable stays
    /// within its declared bound.
    pub fn is_counterexample(&self) -> bool {
        self.antecedent_holds() && !self.consequent.holds && self.bound_violations.is_empty()
    }

    pub fn method_counts(&self) -> Vec<(Method, usize)> {
        let methods = [
            Method::Closure,
            Method::LeafFactor,
            Method::PadMask,
            Method::UniformBase,
            Method::Enumerated,
        ];
        methods
            .iter()
            .map(|&m| {
                (
                    m,
                    self.antecedent.iter().filter(|v| v.method == m).count(),
                )
            })
            .collect()
    }
}

pub struct Verifier<'a> {
    dist: &'a StructuredDistribution,
    cap: u64,
    n_instance_vars: usize,
    in_set: Vec<bool>,
    touched: Vec<usize>,
    stack: Vec<usize>,
}

impl<'a> Verifier<'a> {
    pub fn new(dist: &'a StructuredDistribution, n_instance_vars: usize) -> Self {
        Verifier {
            dist,
            cap: ENUM_CAP,
            n_instance_vars,
            in_set: vec![false; dist.n_internal()],
            touched: Vec::new(),
            stack: Vec::new(),
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    fn internal(&self, instance_var: usize) -> usize {
        self.dist.internal_of(instance_var)
    }

    fn explicit_ids(&self, set: &VarSet) -> Option<Vec<usize>> {
        match set {
            VarSet::Explicit(s) => Some(s.iter().map(|&i| self.internal(i)).collect()),
            VarSet::AllBut(_) => None,
        }
    }

    fn resolve_ids(&self, set: &VarSet) -> Vec<usize> {
        set.resolve(self.n_instance_vars)
            .into_iter()
            .map(|i| self.internal(i))
            .collect()
    }

    pub fn verify_statement(
        &mut self,
        index: usize,
        st: &CIStatement,
    ) -> Result<Verdict, WitnessError> {
        let fd = st.a == st.b;
        let a_ids = self.explicit_ids(&st.a);
        let b_ids = self.explicit_ids(&st.b);
        let c_ids = self.explicit_ids(&st.c);

        // Closure of the conditioning set.
        if let Some(c) = &c_ids {
            if !c.is_empty() || fd {
                let mut targets: Vec<&[usize]> = Vec::new();
                if let Some(a) = &a_ids {
                    targets.push(a);
                }
                if !fd {
                    if let Some(b) = &b_ids {
                        targets.push(b);
                    }
                }
                if !targets.is_empty() {
                    let hit = self.closure_any(c, &targets)?;
                    if hit {
                        return Ok(Verdict {
                            holds: true,
                            method: Method::Closure,
                        });
                    }
                }
            }
        }

        // Unconditional independence certificates.
        if !fd && st.c.is_empty_in(self.n_instance_vars) {
            if let (Some(a), Some(b)) = (&a_ids, &b_ids) {
                let da = self.union_deps(a);
                let db = self.union_deps(b);
                if da.disjoint(&db) {
                    return Ok(Verdict {
                        holds: true,
                        method: Method::LeafFactor,
                    });
                }
                if self.pad_masks(a, &db)? || self.pad_masks(b, &da)? {
                    return Ok(Verdict {
                        holds: true,
                        method: Method::PadMask,
                    });
                }
                if self.pad_versus_padded(a, b)? || self.pad_versus_padded(b, a)? {
                    return Ok(Verdict {
                        holds: true,
                        method: Method::UniformBase,
                    });
                }
            }
        }

        // Exact enumeration.
        let a = a_ids.unwrap_or_else(|| self.resolve_ids(&st.a));
        let c = c_ids.unwrap_or_else(|| self.resolve_ids(&st.c));
        let outcome = if fd {
            self.dist.check_fd_enumerated(&a, &c, self.cap)
        } else {
            let b = b_ids.unwrap_or_else(|| self.resolve_ids(&st.b));
            self.dist.check_ci_enumerated(&a, &b, &c, self.cap)
        };
        match outcome {
            Ok(holds) => Ok(Verdict {
                holds,
                method: Method::Enumerated,
            }),
            Err(WitnessError::EnumerationTooBig { states, cap }) => Err(WitnessError::Undecided {
                index,
                reason: format!(
                    "no structural certificate applies and enumeration needs {states} states (cap {cap})"
                ),
            }),
            Err(e) => Err(e),
        }
    }

    fn union_deps(&self, ids: &[usize]) -> DepSet {
        let mut d = DepSet::default();
        for &v in ids {
            let dv = self.dist.deps_of(v);
            d.backbone |= dv.backbone;
            d.leaves.extend(dv.leaves.iter().copied());
        }
        d
    }

    /// Chases copy and bit chains to a single defining root, if the whole
    /// side reduces to one.
    fn side_root(&self, ids: &[usize]) -> Option<usize> {
        let mut root = None;
        for &v in ids {
            let mut x = v;
            loop {
                match self.dist.def(x) {
                    Def::Copy(src) => x = *src,
                    Def::Bit { of, .. } => x = *of,
                    _ => break,
                }
            }
            match root {
                None => root = Some(x),
                Some(r) if r == x => {}
                Some(_) => return None,
            }
        }
        root
    }

    /// One side is a function of a single pad construction whose fresh pad
    /// leaf appears nowhere on the other side: the padded value is uniform
    /// and independent of everything the other side can see.
    fn pad_masks(&self, side: &[usize], other: &DepSet) -> Result<bool, WitnessError> {
        let Some(root) = self.side_root(side) else {
            return Ok(false);
        };
        let Def::Otp { base, pad, modulus } = self.dist.def(root) else {
            return Ok(false);
        };
        let pad = self.dist.canon(*pad);
        let Def::Leaf(l) = self.dist.def(pad) else {
            return Ok(false);
        };
        if self.dist.leaf_size(*l) != modulus {
            return Ok(false);
        }
        let base_deps = self.union_deps(base);
        Ok(!base_deps.leaves.contains(l) && !other.leaves.contains(l))
    }

    /// Pad on one side, padded value on the other. When the base is itself
    /// uniform over the full modulus, base and pad enter symmetrically and
    /// the padded value is independent of the pad.
    fn pad_versus_padded(&self, pad_side: &[usize], otp_side: &[usize]) -> Result<bool, WitnessError> {
        let (Some(p_root), Some(o_root)) = (self.side_root(pad_side), self.side_root(otp_side))
        else {
            return Ok(false);
        };
        let Def::Otp { base, pad, modulus } = self.dist.def(o_root) else {
            return Ok(false);
        };
        if self.dist.canon(*pad) != self.dist.canon(p_root) {
            return Ok(false);
        }
        let pad = self.dist.canon(*pad);
        let Def::Leaf(l) = self.dist.def(pad) else {
            return Ok(false);
        };
        if self.dist.leaf_size(*l) != modulus {
            return Ok(false);
        }
        let base = base.clone();
        let base_deps = self.union_deps(&base);
        if base_deps.leaves.contains(l) {
            return Ok(false);
        }
        let law = self.dist.law(&base)?;
        Ok(law.uniform && law.support == *modulus)
    }

    /// Functional closure: grows `seed` under determination rules and
    /// reports whether any target set is fully contained. An empty target
    /// set is trivially contained.
    fn closure_any(&mut self, seed: &[usize], targets: &[&[usize]]) -> Result<bool, WitnessError> {
        debug_assert!(self.touched.is_empty() && self.stack.is_empty());
        let result = self.closure_inner(seed, targets);
        for &v in &self.touched {
            self.in_set[v] = false;
        }
        self.touched.clear();
        self.stack.clear();
        result
    }

    fn mark(&mut self, v: usize) {
        if !self.in_set[v] {
            self.in_set[v] = true;
            self.touched.push(v);
            self.stack.push(v);
        }
    }

    fn closure_inner(
        &mut self,
        seed: &[usize],
        targets: &[&[usize]],
    ) -> Result<bool, WitnessError> {
        let dist = self.dist;
        let consumers = dist.consumers();
        let bit_groups = dist.bit_groups();
        for &v in seed {
            self.mark(v);
        }
        while let Some(v) = self.stack.pop() {
            // Rules from the variable's own definition.
            match dist.def(v) {
                Def::Copy(src) => self.mark(*src),
                Def::Tuple(parts) => {
                    for &p in parts {
                        self.mark(p);
                    }
                }
                Def::Otp { .. } => self.fire_otp(v)?,
                Def::Bit { of, .. } => {
                    if self.bit_group_complete(*of, &bit_groups)? {
                        self.mark(*of);
                    }
                }
                Def::Atom(_) | Def::Leaf(_) | Def::Mixed { .. } => {}
            }
            // Rules from definitions that consume the variable.
            for &c in consumers[v].iter() {
                let c = c as usize;
                if self.in_set[c] {
                    continue;
                }
                match dist.def(c) {
                    Def::Copy(_) | Def::Bit { .. } => self.mark(c),
                    Def::Tuple(parts) => {
                        if parts.iter().all(|&p| self.in_set[p]) {
                            self.mark(c);
                        }
                    }
                    Def::Otp { .. } => self.fire_otp(c)?,
                    _ => {}
                }
            }
        }
        Ok(targets
            .iter()
            .any(|t| t.iter().all(|&v| self.in_set[v])))
    }

    /// Determination rules around a pad construction `o = enc(base) + pad`:
    /// base and pad give o; o and base give pad; o and pad give base when
    /// the base support fits the modulus, making the encoding invertible.
    fn fire_otp(&mut self, o: usize) -> Result<(), WitnessError> {
        let Def::Otp { base, pad, .. } = self.dist.def(o) else {
            return Ok(());
        };
        let pad = *pad;
        let base_in = base.iter().all(|&x| self.in_set[x]);
        if base_in && self.in_set[pad] && !self.in_set[o] {
            self.mark(o);
        }
        if self.in_set[o] && base_in && !self.in_set[pad] {
            self.mark(pad);
        }
        if self.in_set[o] && self.in_set[pad] && !base_in && self.dist.otp_solvable(o)? {
            let base = base.clone();
            for &x in &base {
                self.mark(x);
            }
        }
        Ok(())
    }

    /// All bit variables of `of` are in the closure and they cover the whole
    /// value range, so the value is determined.
    fn bit_group_complete(
        &self,
        of: usize,
        groups: &std::collections::HashMap<usize, Vec<usize>>,
    ) -> Result<bool, WitnessError> {
        let Some(group) = groups.get(&of) else {
            return Ok(false);
        };
        let mut bits: Vec<u32> = Vec::new();
        for &g in group {
            if !self.in_set[g] {
                return Ok(false);
            }
            if let Def::Bit { bit, .. } = self.dist.def(g) {
                bits.push(*bit);
            }
        }
        bits.sort_unstable();
        bits.dedup();
        let w = bits.len() as u32;
        if bits != (0..w).collect::<Vec<_>>() || w >= 127 {
            return Ok(false);
        }
        // Values are bounded by the key radix, so w bits suffice iff the
        // radix fits.
        Ok(self.dist.key_radix(of)? <= (1u128 << w))
    }
}

/// Verifies a list of statements, for predicate-level checks that have no
/// surrounding implication instance.
pub fn verify_statements(
    dist: &StructuredDistribution,
    statements: &[CIStatement],
    n_instance_vars: usize,
) -> Result<Vec<Verdict>, WitnessError> {
    let mut verifier = Verifier::new(dist, n_instance_vars);
    statements
        .iter()
        .enumerate()
        .map(|(i, st)| verifier.verify_statement(i, st))
        .collect()
}

/// Verifies a full implication instance: every antecedent, the consequent,
/// and the declared variable bounds.
pub fn verify_instance(
    dist: &StructuredDistribution,
    instance: &ImplicationInstance,
) -> Result<VerificationReport, WitnessError> {
    assert_eq!(
        dist.n_vars(),
        instance.n_vars(),
        "distribution and instance disagree on variable count"
    );
    let mut verifier = Verifier::new(dist, instance.n_vars());
    let mut antecedent = Vec::with_capacity(instance.antecedent.len());
    for (i, st) in instance.antecedent.iter().enumerate() {
        antecedent.push(verifier.verify_statement(i, st)?);
    }
    let consequent = verifier.verify_statement(instance.antecedent.len(), &instance.consequent)?;

    let mut bound_violations = Vec::new();
    for (i, spec) in instance.vars.iter().enumerate() {
        if let Bound::Finite(b) = &spec.bound {
            let support = dist.support_upper(dist.internal_of(i))?;
            if support > *b {
                bound_violations.push(BoundViolation {
                    var: i,
                    support,
                    bound: b.clone(),
                });
            }
        }
    }

    Ok(VerificationReport {
        antecedent,
        consequent,
        bound_violations,
    })
}
