//! Incremental construction of CI statement conjunctions.
//!
//! `PredicateBuild` accumulates variables and statements while predicates
//! are emitted. Each quantified variable carries a `DefPlan` describing how
//! a satisfying distribution realizes it, so witness assembly downstream is
//! mechanical. Statements carry an interned provenance path naming the
//! emission scope that produced them.
//!
//! Repeated emissions of the same predicate over the same arguments are
//! skipped: a conjunction is idempotent, and the skipped copy would only
//! introduce renamed auxiliaries.

use crate::error::PredicateError;
use ciwb_ci::{Bound, BoundKind, CIStatement, ImplicationInstance, VariableSpec};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};

pub type VarId = usize;

/// Cardinality expression over realized supports, evaluated at witness time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizeExpr {
    Const(BigUint),
    /// Joint support size of a tuple of variables.
    Card(Vec<VarId>),
    Prod(Vec<SizeExpr>),
    Pow(Box<SizeExpr>, u64),
    /// Exact quotient; witness construction asserts divisibility.
    Div(Box<SizeExpr>, Box<SizeExpr>),
}

impl SizeExpr {
    pub fn card_of(vars: &[VarId]) -> SizeExpr {
        SizeExpr::Card(vars.to_vec())
    }
}

/// Recipe for realizing one quantified variable in a satisfying
/// distribution.
#[derive(Debug, Clone)]
pub enum DefPlan {
    /// Head variable; the witness supplies its joint law directly.
    Given,
    /// Fresh uniform factor of the given size, independent of all else.
    FreshUniform(SizeExpr),
    /// (encoded value of `base` + value of `pad`) mod `modulus`.
    OneTimePad {
        base: Vec<VarId>,
        pad: VarId,
        modulus: SizeExpr,
    },
    TupleOf(Vec<VarId>),
    CopyOf(VarId),
    /// Bit `bit` of the pre-split variable `of` (little endian); used only
    /// in binary-split instances, where `of` indexes the source instance.
    BitOf { of: VarId, bit: u32 },
    /// Role-tagged variable the witness layer synthesizes.
    Custom(CustomSpec),
}

/// Enough context for the witness layer to synthesize a custom variable.
#[derive(Debug, Clone)]
pub struct CustomSpec {
    pub role: String,
    pub args: Vec<VarId>,
    /// For sat gadgets: the 1-based index sets (S, Sbar) over W.
    pub s: BTreeSet<usize>,
    pub sbar: BTreeSet<usize>,
}

impl CustomSpec {
    pub fn plain(role: &str, args: Vec<VarId>) -> CustomSpec {
        CustomSpec {
            role: role.to_string(),
            args,
            s: BTreeSet::new(),
            sbar: BTreeSet::new(),
        }
    }
}

type MemoKey = (&'static str, Vec<Vec<VarId>>, u64);

pub struct PredicateBuild {
    vars: Vec<VariableSpec>,
    bounds: Vec<BigUint>,
    plans: Vec<DefPlan>,
    statements: Vec<CIStatement>,
    tags: Vec<u32>,
    paths: Vec<String>,
    path_ids: BTreeMap<String, u32>,
    scope: Vec<String>,
    memo: BTreeSet<MemoKey>,
    /// Tuples whose exact-2 uniformity is restated as UNIF_=(tuple, B).
    anchor_alias: BTreeSet<Vec<VarId>>,
    anchor: VarId,
    fresh: u64,
}

impl PredicateBuild {
    /// Starts a build holding only the Bernoulli(1/2) anchor B.
    pub fn new() -> PredicateBuild {
        let mut b = PredicateBuild {
            vars: Vec::new(),
            bounds: Vec::new(),
            plans: Vec::new(),
            statements: Vec::new(),
            tags: Vec::new(),
            paths: Vec::new(),
            path_ids: BTreeMap::new(),
            scope: Vec::new(),
            memo: BTreeSet::new(),
            anchor_alias: BTreeSet::new(),
            anchor: 0,
            fresh: 0,
        };
        b.anchor = b.add_given("B", BigUint::from(2u32), BoundKind::Explicit);
        b
    }

    pub fn anchor(&self) -> VarId {
        self.anchor
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_statements(&self) -> usize {
        self.statements.len()
    }

    pub fn statements(&self) -> &[CIStatement] {
        &self.statements
    }

    pub fn vars(&self) -> &[VariableSpec] {
        &self.vars
    }

    pub fn plans(&self) -> &[DefPlan] {
        &self.plans
    }

    pub fn bound(&self, v: VarId) -> &BigUint {
        &self.bounds[v]
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v].name
    }

    /// Joint declared bound of a tuple.
    pub fn card(&self, tup: &[VarId]) -> BigUint {
        tup.iter().map(|&v| &self.bounds[v]).product()
    }

    /// Declares a head variable the witness must supply directly.
    pub fn add_given(&mut self, name: &str, bound: BigUint, kind: BoundKind) -> VarId {
        self.push_var(name.to_string(), bound, kind, DefPlan::Given)
    }

    /// Declares a quantified variable with an implicit bound.
    pub fn fresh_var(&mut self, base: VarId, tag: &str, bound: BigUint, plan: DefPlan) -> VarId {
        let name = format!("{}.{}{}", self.vars[base].name, tag, self.fresh);
        self.fresh += 1;
        self.push_var(name, bound, BoundKind::Implicit, plan)
    }

    fn push_var(&mut self, name: String, bound: BigUint, kind: BoundKind, plan: DefPlan) -> VarId {
        let id = self.vars.len();
        self.vars.push(VariableSpec {
            name,
            bound: Bound::Finite(bound.clone()),
            kind,
        });
        self.bounds.push(bound);
        self.plans.push(plan);
        id
    }

    /// Runs `f` with `label` appended to the provenance scope.
    pub fn scoped<R>(&mut self, label: impl Into<String>, f: impl FnOnce(&mut Self) -> R) -> R {
        self.scope.push(label.into());
        let out = f(self);
        self.scope.pop();
        out
    }

    fn path_id(&mut self) -> u32 {
        let path = self.scope.join(".");
        if let Some(&id) = self.path_ids.get(&path) {
            return id;
        }
        let id = self.paths.len() as u32;
        self.paths.push(path.clone());
        self.path_ids.insert(path, id);
        id
    }

    pub fn push(&mut self, stmt: CIStatement) {
        let tag = self.path_id();
        self.statements.push(stmt);
        self.tags.push(tag);
    }

    /// True when the keyed emission already happened; records it otherwise.
    pub fn memo_hit(&mut self, op: &'static str, args: &[&[VarId]], extra: u64) -> bool {
        let key = (op, args.iter().map(|a| a.to_vec()).collect(), extra);
        !self.memo.insert(key)
    }

    /// Marks a tuple whose exact-2 uniformity is emitted as UNIF_=(t, B).
    pub fn alias_unif2_to_anchor(&mut self, tup: &[VarId]) {
        self.anchor_alias.insert(tup.to_vec());
    }

    pub fn unif2_aliased(&self, tup: &[VarId]) -> bool {
        self.anchor_alias.contains(tup)
    }

    pub fn two_pow(p: u64) -> BigUint {
        BigUint::one() << p
    }

    /// Provenance paths and per-statement path indices.
    pub fn provenance(&self) -> (&[String], &[u32]) {
        (&self.paths, &self.tags)
    }

    pub fn into_parts(
        self,
        consequent: CIStatement,
    ) -> (ImplicationInstance, Vec<DefPlan>, Vec<String>, Vec<u32>, u64) {
        (
            ImplicationInstance {
                vars: self.vars,
                antecedent: self.statements,
                consequent,
            },
            self.plans,
            self.paths,
            self.tags,
            self.fresh,
        )
    }

    /// Rebuilds a mutable context over a finished instance so further
    /// blocks can be appended (used by the binary split).
    pub fn resume(
        instance: &ImplicationInstance,
        plans: &[DefPlan],
        paths: &[String],
        tags: &[u32],
        anchor: VarId,
        fresh: u64,
    ) -> Result<PredicateBuild, PredicateError> {
        let mut bounds = Vec::with_capacity(instance.vars.len());
        for v in &instance.vars {
            match &v.bound {
                Bound::Finite(b) => bounds.push(b.clone()),
                Bound::Unbounded => {
                    return Err(PredicateError::UnboundedVariable(v.name.clone()))
                }
            }
        }
        let path_ids = paths
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        Ok(PredicateBuild {
            vars: instance.vars.clone(),
            bounds,
            plans: plans.to_vec(),
            statements: instance.antecedent.clone(),
            tags: tags.to_vec(),
            paths: paths.to_vec(),
            path_ids,
            scope: Vec::new(),
            memo: BTreeSet::new(),
            anchor_alias: BTreeSet::new(),
            anchor,
            fresh,
        })
    }
}

impl Default for PredicateBuild {
    fn default() -> Self {
        PredicateBuild::new()
    }
}
