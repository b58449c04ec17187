//! Conditional-independence statements, variable bounds, and implication
//! instances of the form "antecedent statements imply consequent".

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::distribution::JointDistribution;
use crate::error::CiError;

/// A set of variables, by index into the owning instance's variable list.
/// `AllBut` is the complement form; saturated statements condition on all
/// variables except a couple, and spelling those sets out does not scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarSet {
    Explicit(BTreeSet<usize>),
    AllBut(BTreeSet<usize>),
}

impl VarSet {
    pub fn explicit<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VarSet::Explicit(iter.into_iter().collect())
    }

    pub fn all_but<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VarSet::AllBut(iter.into_iter().collect())
    }

    pub fn empty() -> Self {
        VarSet::Explicit(BTreeSet::new())
    }

    pub fn contains(&self, idx: usize) -> bool {
        match self {
            VarSet::Explicit(s) => s.contains(&idx),
            VarSet::AllBut(s) => !s.contains(&idx),
        }
    }

    /// Concrete sorted index list, given the instance's variable count.
    pub fn resolve(&self, n_vars: usize) -> Vec<usize> {
        match self {
            VarSet::Explicit(s) => s.iter().copied().collect(),
            VarSet::AllBut(s) => (0..n_vars).filter(|i| !s.contains(i)).collect(),
        }
    }

    pub fn len_in(&self, n_vars: usize) -> usize {
        match self {
            VarSet::Explicit(s) => s.len(),
            VarSet::AllBut(s) => n_vars - s.iter().filter(|&&i| i < n_vars).count(),
        }
    }

    pub fn is_empty_in(&self, n_vars: usize) -> bool {
        self.len_in(n_vars) == 0
    }

    /// Shifts every index by `offset`; used when instances are embedded into
    /// larger variable lists.
    pub fn shifted(&self, offset: usize) -> Self {
        match self {
            VarSet::Explicit(s) => VarSet::Explicit(s.iter().map(|i| i + offset).collect()),
            VarSet::AllBut(s) => VarSet::AllBut(s.iter().map(|i| i + offset).collect()),
        }
    }

    pub fn mapped(&self, f: impl Fn(usize) -> usize) -> Self {
        match self {
            VarSet::Explicit(s) => VarSet::Explicit(s.iter().map(|&i| f(i)).collect()),
            VarSet::AllBut(s) => VarSet::AllBut(s.iter().map(|&i| f(i)).collect()),
        }
    }
}

/// I(A ; B | C) = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CIStatement {
    pub a: VarSet,
    pub b: VarSet,
    pub c: VarSet,
}

impl CIStatement {
    pub fn new(a: VarSet, b: VarSet, c: VarSet) -> Self {
        CIStatement { a, b, c }
    }

    /// Independence of explicit sets: I(a ; b | c) = 0.
    pub fn ci(a: Vec<usize>, b: Vec<usize>, c: Vec<usize>) -> Self {
        CIStatement {
            a: VarSet::explicit(a),
            b: VarSet::explicit(b),
            c: VarSet::explicit(c),
        }
    }

    /// Functional dependence of `targets` on `givens`, written I(T ; T | G) = 0.
    pub fn fd(targets: Vec<usize>, givens: Vec<usize>) -> Self {
        CIStatement {
            a: VarSet::explicit(targets.clone()),
            b: VarSet::explicit(targets),
            c: VarSet::explicit(givens),
        }
    }

    pub fn shifted(&self, offset: usize) -> Self {
        CIStatement {
            a: self.a.shifted(offset),
            b: self.b.shifted(offset),
            c: self.c.shifted(offset),
        }
    }

    pub fn mapped(&self, f: impl Fn(usize) -> usize + Copy) -> Self {
        CIStatement {
            a: self.a.mapped(f),
            b: self.b.mapped(f),
            c: self.c.mapped(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Finite(BigUint),
    Unbounded,
}

impl Bound {
    pub fn finite(k: u64) -> Self {
        Bound::Finite(BigUint::from(k))
    }
}

/// Explicit bounds come with enforcement blocks in the construction;
/// implicit bounds are consequences of the surrounding statements and are
/// tracked so witness checking can still audit them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Explicit,
    Implicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSpec {
    pub name: String,
    pub bound: Bound,
    pub kind: BoundKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplicationInstance {
    pub vars: Vec<VariableSpec>,
    pub antecedent: Vec<CIStatement>,
    pub consequent: CIStatement,
}

impl ImplicationInstance {
    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    pub var: usize,
    pub support: usize,
    pub bound: BigUint,
    pub kind: BoundKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ImplicationOutcome {
    /// Some antecedent statements fail, so the distribution says nothing
    /// about the implication. Indices into `antecedent`.
    AntecedentViolated { failing: Vec<usize> },
    /// All statements hold; the implication is not falsified here.
    Satisfied,
    /// Antecedent holds and the consequent fails: a counterexample.
    Counterexample { consequent_cmi_bits: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport {
    pub bound_violations: Vec<BoundViolation>,
    pub antecedent_holds: Vec<bool>,
    pub outcome: ImplicationOutcome,
}

impl EvaluationReport {
    pub fn is_counterexample(&self) -> bool {
        self.bound_violations.is_empty()
            && matches!(self.outcome, ImplicationOutcome::Counterexample { .. })
    }
}

/// Evaluates an implication instance against an explicit joint distribution.
/// Every instance variable must be present in the distribution by name.
pub fn evaluate_implication(
    inst: &ImplicationInstance,
    dist: &JointDistribution,
) -> Result<EvaluationReport, CiError> {
    let n = inst.n_vars();
    let map: Vec<usize> = inst
        .vars
        .iter()
        .map(|v| {
            dist.var_index(&v.name)
                .ok_or_else(|| CiError::UnknownVariable(v.name.clone()))
        })
        .collect::<Result<_, _>>()?;

    let mut bound_violations = Vec::new();
    for (i, spec) in inst.vars.iter().enumerate() {
        if let Bound::Finite(k) = &spec.bound {
            let support = dist.support_size(map[i]);
            if BigUint::from(support) > *k {
                bound_violations.push(BoundViolation {
                    var: i,
                    support,
                    bound: k.clone(),
                    kind: spec.kind,
                });
            }
        }
    }

    let resolve = |set: &VarSet| -> Vec<usize> {
        set.resolve(n).into_iter().map(|i| map[i]).collect()
    };

    let mut antecedent_holds = Vec::with_capacity(inst.antecedent.len());
    let mut failing = Vec::new();
    for (i, st) in inst.antecedent.iter().enumerate() {
        let ok = dist.check_ci_exact(&resolve(&st.a), &resolve(&st.b), &resolve(&st.c));
        antecedent_holds.push(ok);
        if !ok {
            failing.push(i);
        }
    }

    let outcome = if !failing.is_empty() {
        ImplicationOutcome::AntecedentViolated { failing }
    } else {
        let (a, b, c) = (
            resolve(&inst.consequent.a),
            resolve(&inst.consequent.b),
            resolve(&inst.consequent.c),
        );
        if dist.check_ci_exact(&a, &b, &c) {
            ImplicationOutcome::Satisfied
        } else {
            ImplicationOutcome::Counterexample {
                consequent_cmi_bits: dist.cond_mutual_info_bits(&a, &b, &c),
            }
        }
    };

    Ok(EvaluationReport {
        bound_violations,
        antecedent_holds,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn xor_dist() -> JointDistribution {
        let mut b = JointDistribution::builder(["X", "Y", "Z"]);
        for x in 0..2u64 {
            for y in 0..2u64 {
                b.atom_ints(&[x, y, x ^ y], rat(1, 4));
            }
        }
        b.build().unwrap()
    }

    fn xor_instance() -> ImplicationInstance {
        ImplicationInstance {
            vars: ["X", "Y", "Z"]
                .iter()
                .map(|n| VariableSpec {
                    name: n.to_string(),
                    bound: Bound::finite(2),
                    kind: BoundKind::Explicit,
                })
                .collect(),
            antecedent: vec![
                CIStatement::ci(vec![0], vec![1], vec![]),
                CIStatement::fd(vec![2], vec![0, 1]),
            ],
            consequent: CIStatement::ci(vec![0], vec![1], vec![2]),
        }
    }

    #[test]
    fn xor_is_a_counterexample() {
        let report = evaluate_implication(&xor_instance(), &xor_dist()).unwrap();
        assert!(report.bound_violations.is_empty());
        assert_eq!(report.antecedent_holds, vec![true, true]);
        match report.outcome {
            ImplicationOutcome::Counterexample { consequent_cmi_bits } => {
                assert!((consequent_cmi_bits - 1.0).abs() < 1e-12);
            }
            ref o => panic!("expected counterexample, got {o:?}"),
        }
        assert!(report.is_counterexample());
    }

    #[test]
    fn violated_antecedent_reported() {
        let mut inst = xor_instance();
        inst.antecedent.push(CIStatement::ci(vec![0], vec![2], vec![]));
        inst.antecedent.push(CIStatement::ci(vec![0], vec![2], vec![1]));
        let report = evaluate_implication(&inst, &xor_dist()).unwrap();
        // X and Z are unconditionally independent but dependent given Y.
        assert_eq!(report.antecedent_holds, vec![true, true, true, false]);
        assert_eq!(
            report.outcome,
            ImplicationOutcome::AntecedentViolated { failing: vec![3] }
        );
    }

    #[test]
    fn bound_violation_detected() {
        let mut inst = xor_instance();
        inst.vars[0].bound = Bound::finite(1);
        let report = evaluate_implication(&inst, &xor_dist()).unwrap();
        assert_eq!(report.bound_violations.len(), 1);
        assert_eq!(report.bound_violations[0].var, 0);
        assert_eq!(report.bound_violations[0].support, 2);
        assert!(!report.is_counterexample());
    }

    #[test]
    fn missing_variable_is_an_error() {
        let mut inst = xor_instance();
        inst.vars[2].name = "W".into();
        assert!(matches!(
            evaluate_implication(&inst, &xor_dist()),
            Err(CiError::UnknownVariable(_))
        ));
    }

    #[test]
    fn all_but_resolution() {
        let s = VarSet::all_but([1, 3]);
        assert_eq!(s.resolve(5), vec![0, 2, 4]);
        assert_eq!(s.len_in(5), 3);
        assert!(s.contains(0));
        assert!(!s.contains(3));
        let all = VarSet::all_but([]);
        assert_eq!(all.resolve(3), vec![0, 1, 2]);
        assert_eq!(VarSet::empty().resolve(4), Vec::<usize>::new());
    }
}
