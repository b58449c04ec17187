//! Factored distributions over a small explicit backbone and independent
//! uniform leaves.
//!
//! Compiled instances use auxiliary variables whose joint support is
//! astronomically large (uniform factors of size 2^p for tower exponents p
//! in the hundreds), so a witness distribution cannot be tabulated. Instead
//! it is kept in factored form: a list of backbone atoms with exact rational
//! masses, a list of independent uniform leaves that are never enumerated
//! unless a check actually needs them, and one [`Def`] per variable giving
//! its value as a function of the backbone atom and the leaves.
//!
//! Exact checks then run at two levels. Laws (marginal support size and
//! uniformity) and statement verdicts are derived structurally where the
//! definitions make them obvious, and by exact enumeration over the factors
//! a query actually depends on otherwise. All arithmetic is integer counting
//! over a common denominator, so every verdict is exact.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use ciwb_ci::distribution::JointDistribution;
use ciwb_predicates::build::SizeExpr;

use crate::error::WitnessError;

/// How a variable's value is produced from a backbone atom and leaf values.
#[derive(Clone, Debug)]
pub enum Def {
    /// Deterministic function of the backbone atom.
    Atom(Vec<u64>),
    /// The value of an independent uniform leaf.
    Leaf(usize),
    /// Per-atom value table indexed by a leaf residue: the value at atom `a`
    /// and leaf value `l` is `table[a][l % table[a].len()]`. Row lengths must
    /// divide the leaf size so residues stay uniform.
    Mixed { leaf: usize, table: Vec<Vec<u64>> },
    /// Joint of earlier variables, encoded in mixed radix over their
    /// canonical value indices. Components must be independent with full
    /// product support for the encoding to be a bijection onto `0..prod`.
    Tuple(Vec<usize>),
    /// `(enc(base) + pad) mod modulus` where `enc` is the canonical index of
    /// the base tuple within its realized support.
    Otp {
        base: Vec<usize>,
        pad: usize,
        modulus: BigUint,
    },
    Copy(usize),
    /// Bit `bit` of the binary expansion of another variable's value.
    Bit { of: usize, bit: u32 },
}

/// What a variable depends on: the backbone atom and/or a set of leaves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepSet {
    pub backbone: bool,
    pub leaves: BTreeSet<usize>,
}

impl DepSet {
    pub fn disjoint(&self, other: &DepSet) -> bool {
        if self.backbone && other.backbone {
            return false;
        }
        self.leaves.is_disjoint(&other.leaves)
    }
}

/// Marginal law summary: exact support size and whether the law is uniform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Law {
    pub support: BigUint,
    pub uniform: bool,
}

/// Cap on exact enumeration; checks that would exceed it come back as
/// errors rather than silently degrading.
pub const ENUM_CAP: u64 = 1 << 22;

pub struct StructuredDistribution {
    atom_mass: Vec<BigRational>,
    /// Numerators of the atom masses over `mass_den`.
    mass_num: Vec<u64>,
    mass_den: BigUint,
    leaves: Vec<BigUint>,
    defs: Vec<Def>,
    names: Vec<String>,
    deps: Vec<Rc<DepSet>>,
    /// Instance variable -> internal variable.
    visible: Vec<usize>,
    laws: RefCell<HashMap<Vec<usize>, Law>>,
    solve_ok: RefCell<HashMap<usize, bool>>,
    consumers: RefCell<Option<Rc<Vec<Vec<u32>>>>>,
    bit_groups: RefCell<Option<Rc<HashMap<usize, Vec<usize>>>>>,
}

impl StructuredDistribution {
    /// Starts a distribution from backbone atom masses, which must be
    /// positive rationals summing to one.
    pub fn new(atom_mass: Vec<BigRational>) -> Result<Self, WitnessError> {
        if atom_mass.is_empty() {
            return Err(WitnessError::BadAtomMasses);
        }
        let mut total = BigRational::zero();
        for m in &atom_mass {
            if *m <= BigRational::zero() {
                return Err(WitnessError::BadAtomMasses);
            }
            total += m;
        }
        if !total.is_one() {
            return Err(WitnessError::BadAtomMasses);
        }
        let mut den = BigUint::one();
        for m in &atom_mass {
            den = den.lcm(&m.denom().magnitude().clone());
        }
        let mut nums = Vec::with_capacity(atom_mass.len());
        for m in &atom_mass {
            let n = m.numer().magnitude() * &den / m.denom().magnitude();
            nums.push(n.to_u64().ok_or(WitnessError::MassOverflow)?);
        }
        Ok(StructuredDistribution {
            atom_mass,
            mass_num: nums,
            mass_den: den,
            leaves: Vec::new(),
            defs: Vec::new(),
            names: Vec::new(),
            deps: Vec::new(),
            visible: Vec::new(),
            laws: RefCell::new(HashMap::new()),
            solve_ok: RefCell::new(HashMap::new()),
            consumers: RefCell::new(None),
            bit_groups: RefCell::new(None),
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.atom_mass.len()
    }

    pub fn atom_mass(&self, a: usize) -> &BigRational {
        &self.atom_mass[a]
    }

    pub fn n_internal(&self) -> usize {
        self.defs.len()
    }

    pub fn n_vars(&self) -> usize {
        self.visible.len()
    }

    pub fn internal_of(&self, var: usize) -> usize {
        self.visible[var]
    }

    pub fn def(&self, internal: usize) -> &Def {
        &self.defs[internal]
    }

    pub fn name(&self, internal: usize) -> &str {
        &self.names[internal]
    }

    pub fn leaf_size(&self, leaf: usize) -> &BigUint {
        &self.leaves[leaf]
    }

    pub fn add_leaf(&mut self, size: BigUint) -> Result<usize, WitnessError> {
        if size.is_zero() {
            return Err(WitnessError::InvalidDef {
                var: self.defs.len(),
                reason: "leaf of size zero".into(),
            });
        }
        self.leaves.push(size);
        Ok(self.leaves.len() - 1)
    }

    /// Appends a variable. Definitions may only reference earlier variables,
    /// which keeps every walk over definitions well founded.
    pub fn push_var(&mut self, name: String, def: Def) -> Result<usize, WitnessError> {
        let id = self.defs.len();
        let bad = |reason: &str| WitnessError::InvalidDef {
            var: id,
            reason: reason.into(),
        };
        let dep = match &def {
            Def::Atom(table) => {
                if table.len() != self.n_atoms() {
                    return Err(bad("atom table length differs from atom count"));
                }
                Rc::new(DepSet {
                    backbone: true,
                    leaves: BTreeSet::new(),
                })
            }
            Def::Leaf(l) => {
                if *l >= self.leaves.len() {
                    return Err(bad("leaf out of range"));
                }
                Rc::new(DepSet {
                    backbone: false,
                    leaves: BTreeSet::from([*l]),
                })
            }
            Def::Mixed { leaf, table } => {
                if *leaf >= self.leaves.len() {
                    return Err(bad("leaf out of range"));
                }
                if table.len() != self.n_atoms() {
                    return Err(bad("mixed table length differs from atom count"));
                }
                for row in table {
                    if row.is_empty() {
                        return Err(bad("empty mixed table row"));
                    }
                    if !(&self.leaves[*leaf] % BigUint::from(row.len())).is_zero() {
                        return Err(bad("mixed row length does not divide the leaf size"));
                    }
                }
                Rc::new(DepSet {
                    backbone: true,
                    leaves: BTreeSet::from([*leaf]),
                })
            }
            Def::Tuple(parts) => {
                if parts.iter().any(|&p| p >= id) {
                    return Err(bad("tuple part out of range"));
                }
                Rc::new(self.union_deps(parts))
            }
            Def::Otp { base, pad, .. } => {
                if base.iter().any(|&p| p >= id) || *pad >= id || base.is_empty() {
                    return Err(bad("pad construction references later variables"));
                }
                let mut d = self.union_deps(base);
                let pd = self.deps_of(*pad);
                d.backbone |= pd.backbone;
                d.leaves.extend(pd.leaves.iter().copied());
                Rc::new(d)
            }
            Def::Copy(src) => {
                if *src >= id {
                    return Err(bad("copy of a later variable"));
                }
                Rc::clone(&self.deps[*src])
            }
            Def::Bit { of, .. } => {
                if *of >= id {
                    return Err(bad("bit of a later variable"));
                }
                Rc::clone(&self.deps[*of])
            }
        };
        self.defs.push(def);
        self.names.push(name);
        self.deps.push(dep);
        *self.consumers.borrow_mut() = None;
        *self.bit_groups.borrow_mut() = None;
        Ok(id)
    }

    /// Appends one instance variable mapping; realization walks push these
    /// in instance order.
    pub fn push_visible(&mut self, internal: usize) {
        assert!(internal < self.defs.len());
        self.visible.push(internal);
    }

    /// Declares which internal variables the instance variables map to.
    pub fn set_visible(&mut self, visible: Vec<usize>) -> Result<(), WitnessError> {
        if let Some(&v) = visible.iter().find(|&&v| v >= self.defs.len()) {
            return Err(WitnessError::InvalidDef {
                var: v,
                reason: "visible variable out of range".into(),
            });
        }
        self.visible = visible;
        Ok(())
    }

    pub fn deps_of(&self, internal: usize) -> Rc<DepSet> {
        Rc::clone(&self.deps[internal])
    }

    fn union_deps(&self, ids: &[usize]) -> DepSet {
        let mut d = DepSet::default();
        for &v in ids {
            let dv = &self.deps[v];
            d.backbone |= dv.backbone;
            d.leaves.extend(dv.leaves.iter().copied());
        }
        d
    }

    /// Chases copy chains to the defining variable.
    pub fn canon(&self, mut v: usize) -> usize {
        while let Def::Copy(src) = self.defs[v] {
            v = src;
        }
        v
    }

    // ------------------------------------------------------------------
    // Laws
    // ------------------------------------------------------------------

    /// Exact marginal law of the joint of `ids`.
    pub fn law(&self, ids: &[usize]) -> Result<Law, WitnessError> {
        let mut key: Vec<usize> = ids.iter().map(|&v| self.canon(v)).collect();
        key.sort_unstable();
        key.dedup();
        if key.is_empty() {
            return Ok(Law {
                support: BigUint::one(),
                uniform: true,
            });
        }
        if let Some(l) = self.laws.borrow().get(&key) {
            return Ok(l.clone());
        }
        let law = if key.len() == 1 {
            self.single_law(key[0])?
        } else {
            self.joint_law(&key)?
        };
        self.laws.borrow_mut().insert(key, law.clone());
        Ok(law)
    }

    fn single_law(&self, v: usize) -> Result<Law, WitnessError> {
        match &self.defs[v] {
            Def::Atom(_) | Def::Mixed { .. } | Def::Bit { .. } => self.law_by_enumeration(&[v]),
            Def::Leaf(l) => Ok(Law {
                support: self.leaves[*l].clone(),
                uniform: true,
            }),
            Def::Copy(src) => self.law(&[*src]),
            Def::Tuple(parts) => {
                let parts = parts.clone();
                if self.pairwise_independent(&parts) {
                    let mut support = BigUint::one();
                    let mut uniform = true;
                    for &p in &parts {
                        let l = self.law(&[p])?;
                        support *= l.support;
                        uniform &= l.uniform;
                    }
                    Ok(Law { support, uniform })
                } else {
                    self.law_by_enumeration(&[v])
                }
            }
            Def::Otp { base, pad, modulus } => {
                let (base, pad, modulus) = (base.clone(), *pad, modulus.clone());
                if self.pad_is_fresh(&base, pad, &modulus) {
                    Ok(Law {
                        support: modulus,
                        uniform: true,
                    })
                } else {
                    self.law_by_enumeration(&[v])
                }
            }
        }
    }

    /// True when `pad` resolves to a dedicated uniform leaf covering the
    /// whole modulus and sharing nothing with the base. The padded value is
    /// then uniform on `0..modulus` no matter what the base law is.
    fn pad_is_fresh(&self, base: &[usize], pad: usize, modulus: &BigUint) -> bool {
        let pad = self.canon(pad);
        let Def::Leaf(l) = &self.defs[pad] else {
            return false;
        };
        if self.leaves[*l] != *modulus {
            return false;
        }
        let base_deps = self.union_deps(base);
        !base_deps.leaves.contains(l)
    }

    fn joint_law(&self, ids: &[usize]) -> Result<Law, WitnessError> {
        if self.pairwise_independent(ids) {
            let mut support = BigUint::one();
            let mut uniform = true;
            for &v in ids {
                let l = self.law(&[v])?;
                support *= l.support;
                uniform &= l.uniform;
            }
            return Ok(Law { support, uniform });
        }
        self.law_by_enumeration(ids)
    }

    fn pairwise_independent(&self, ids: &[usize]) -> bool {
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if !self.deps[a].disjoint(&self.deps[b]) {
                    return false;
                }
            }
        }
        true
    }

    fn law_by_enumeration(&self, ids: &[usize]) -> Result<Law, WitnessError> {
        let plan = self.plan_enumeration(ids, ENUM_CAP)?;
        let positions = plan.positions(ids);
        let radices = self.block_radices(ids)?;
        let mut counts: HashMap<u128, u128> = HashMap::new();
        self.run_enumeration(&plan, |vals, num| {
            let key = pack_key(&positions, &radices, vals.raw())?;
            *counts.entry(key).or_insert(0) += num as u128;
            Ok(())
        })?;
        let mut it = counts.values();
        let first = *it.next().expect("positive masses leave support nonempty");
        let uniform = it.all(|&c| c == first);
        Ok(Law {
            support: BigUint::from(counts.len()),
            uniform,
        })
    }

    /// Cheap upper bound on a variable's support size, for bound audits.
    pub fn support_upper(&self, v: usize) -> Result<BigUint, WitnessError> {
        match &self.defs[v] {
            Def::Bit { .. } => Ok(BigUint::from(2u8)),
            _ => Ok(self.law(&[v])?.support),
        }
    }

    // ------------------------------------------------------------------
    // Size expressions
    // ------------------------------------------------------------------

    /// Evaluates a cardinality expression over realized supports. Instance
    /// variable ids inside the expression are mapped through `visible`.
    pub fn eval_size(&self, expr: &SizeExpr) -> Result<BigUint, WitnessError> {
        match expr {
            SizeExpr::Const(c) => Ok(c.clone()),
            SizeExpr::Card(vars) => {
                let ids: Vec<usize> = vars.iter().map(|&v| self.visible[v]).collect();
                Ok(self.law(&ids)?.support)
            }
            SizeExpr::Prod(parts) => {
                let mut p = BigUint::one();
                for e in parts {
                    p *= self.eval_size(e)?;
                }
                Ok(p)
            }
            SizeExpr::Pow(base, e) => Ok(self.eval_size(base)?.pow(*e as u32)),
            SizeExpr::Div(a, b) => {
                let a = self.eval_size(a)?;
                let b = self.eval_size(b)?;
                let (q, r) = a.div_rem(&b);
                if !r.is_zero() {
                    return Err(WitnessError::SizeNotExact);
                }
                Ok(q)
            }
        }
    }

    // ------------------------------------------------------------------
    // Closure structure accessors
    // ------------------------------------------------------------------

    /// Variables whose definitions mention `v`, for closure propagation.
    pub(crate) fn consumers(&self) -> Rc<Vec<Vec<u32>>> {
        if let Some(c) = self.consumers.borrow().as_ref() {
            return Rc::clone(c);
        }
        let mut cons = vec![Vec::new(); self.defs.len()];
        for (id, def) in self.defs.iter().enumerate() {
            match def {
                Def::Tuple(parts) => {
                    for &p in parts {
                        cons[p].push(id as u32);
                    }
                }
                Def::Otp { base, pad, .. } => {
                    for &p in base {
                        cons[p].push(id as u32);
                    }
                    cons[*pad].push(id as u32);
                }
                Def::Copy(src) => cons[*src].push(id as u32),
                Def::Bit { of, .. } => cons[*of].push(id as u32),
                Def::Atom(_) | Def::Leaf(_) | Def::Mixed { .. } => {}
            }
        }
        let rc = Rc::new(cons);
        *self.consumers.borrow_mut() = Some(Rc::clone(&rc));
        rc
    }

    /// Bit variables grouped by the variable they decompose.
    pub(crate) fn bit_groups(&self) -> Rc<HashMap<usize, Vec<usize>>> {
        if let Some(g) = self.bit_groups.borrow().as_ref() {
            return Rc::clone(g);
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for (id, def) in self.defs.iter().enumerate() {
            if let Def::Bit { of, .. } = def {
                groups.entry(*of).or_default().push(id);
            }
        }
        let rc = Rc::new(groups);
        *self.bit_groups.borrow_mut() = Some(Rc::clone(&rc));
        rc
    }

    /// Whether `base` can be recovered from the padded value and the pad:
    /// subtraction inverts the encoding exactly when the base support fits
    /// inside the modulus.
    pub(crate) fn otp_solvable(&self, otp_var: usize) -> Result<bool, WitnessError> {
        if let Some(&ok) = self.solve_ok.borrow().get(&otp_var) {
            return Ok(ok);
        }
        let Def::Otp { base, modulus, .. } = &self.defs[otp_var] else {
            return Ok(false);
        };
        let (base, modulus) = (base.clone(), modulus.clone());
        let ok = self.law(&base)?.support <= modulus;
        self.solve_ok.borrow_mut().insert(otp_var, ok);
        Ok(ok)
    }

    // ------------------------------------------------------------------
    // Enumeration
    // ------------------------------------------------------------------

    /// Builds an enumeration over exactly the factors `targets` depend on.
    /// Leaves consumed only through `Mixed` tables are folded to the lcm of
    /// the row lengths; residues beyond that are indistinguishable.
    pub(crate) fn plan_enumeration(
        &self,
        targets: &[usize],
        cap: u64,
    ) -> Result<EnumPlan, WitnessError> {
        let mut needed: BTreeSet<usize> = BTreeSet::new();
        let mut stack: Vec<usize> = targets.to_vec();
        while let Some(v) = stack.pop() {
            if !needed.insert(v) {
                continue;
            }
            match &self.defs[v] {
                Def::Atom(_) | Def::Leaf(_) | Def::Mixed { .. } => {}
                Def::Tuple(parts) => stack.extend(parts.iter().copied()),
                Def::Otp { base, pad, .. } => {
                    stack.extend(base.iter().copied());
                    stack.push(*pad);
                }
                Def::Copy(src) => stack.push(*src),
                Def::Bit { of, .. } => stack.push(*of),
            }
        }
        let needed: Vec<usize> = needed.into_iter().collect();
        let deps = self.union_deps(&needed);

        let mut leaf_dims: Vec<(usize, u64)> = Vec::new();
        for &l in &deps.leaves {
            let mut mixed_only = true;
            let mut lcm_len: u64 = 1;
            for &v in &needed {
                match &self.defs[v] {
                    Def::Leaf(x) if *x == l => mixed_only = false,
                    Def::Mixed { leaf, table } if *leaf == l => {
                        for row in table {
                            lcm_len = lcm_len.lcm(&(row.len() as u64));
                        }
                    }
                    _ => {}
                }
            }
            let eff = if mixed_only {
                lcm_len
            } else {
                self.leaves[l]
                    .to_u64()
                    .filter(|&s| s <= cap)
                    .ok_or(WitnessError::EnumerationTooBig {
                        states: u128::MAX,
                        cap,
                    })?
            };
            leaf_dims.push((l, eff));
        }

        let mut states: u128 = if deps.backbone {
            self.n_atoms() as u128
        } else {
            1
        };
        for &(_, eff) in &leaf_dims {
            states = states.saturating_mul(eff as u128);
        }
        if states > cap as u128 {
            return Err(WitnessError::EnumerationTooBig { states, cap });
        }

        let mut pos = HashMap::new();
        for (i, &v) in needed.iter().enumerate() {
            pos.insert(v, i);
        }
        let mut leaf_slot = HashMap::new();
        for (i, &(l, _)) in leaf_dims.iter().enumerate() {
            leaf_slot.insert(l, i);
        }

        let mut computes = Vec::with_capacity(needed.len());
        for &v in &needed {
            computes.push(self.compile_compute(v, &pos, &leaf_slot)?);
        }

        Ok(EnumPlan {
            needed,
            pos,
            backbone: deps.backbone,
            leaf_dims,
            states: states as u64,
            computes,
        })
    }

    fn compile_compute(
        &self,
        v: usize,
        pos: &HashMap<usize, usize>,
        leaf_slot: &HashMap<usize, usize>,
    ) -> Result<Compute, WitnessError> {
        Ok(match &self.defs[v] {
            Def::Atom(table) => Compute::Atom(table.clone()),
            Def::Leaf(l) => Compute::Leaf(leaf_slot[l]),
            Def::Mixed { leaf, table } => Compute::Mixed {
                slot: leaf_slot[leaf],
                table: table.clone(),
            },
            Def::Tuple(parts) => Compute::Tuple(self.compile_enc(parts, pos)?),
            Def::Otp { base, pad, modulus } => {
                let m = modulus
                    .to_u64()
                    .ok_or(WitnessError::KeyOverflow)?;
                Compute::Otp {
                    base: self.compile_enc(base, pos)?,
                    pad: pos[pad],
                    modulus: m,
                }
            }
            Def::Copy(src) => Compute::Copy(pos[src]),
            Def::Bit { of, bit } => Compute::Bit {
                of: pos[of],
                bit: *bit,
            },
        })
    }

    /// Canonical encoding of a variable tuple into `0..support`. Backbone
    /// only tuples get a per-atom index table; otherwise the components must
    /// be independent and are combined in mixed radix over their canonical
    /// single-variable encodings.
    fn compile_enc(
        &self,
        ids: &[usize],
        pos: &HashMap<usize, usize>,
    ) -> Result<VecEnc, WitnessError> {
        let deps = self.union_deps(ids);
        if deps.backbone && deps.leaves.is_empty() && ids.len() > 1 {
            let tables: Vec<Vec<u64>> = ids
                .iter()
                .map(|&v| self.atom_values(v))
                .collect::<Result<_, _>>()?;
            let mut joint: Vec<Vec<u64>> = (0..self.n_atoms())
                .map(|a| tables.iter().map(|t| t[a]).collect())
                .collect();
            let mut sorted = joint.clone();
            sorted.sort_unstable();
            sorted.dedup();
            let index: HashMap<Vec<u64>, u64> = sorted
                .into_iter()
                .enumerate()
                .map(|(i, v)| (v, i as u64))
                .collect();
            let per_atom: Vec<u64> = joint.drain(..).map(|v| index[&v]).collect();
            return Ok(VecEnc::BackboneJoint(per_atom));
        }
        if ids.len() > 1 && !self.pairwise_independent(ids) {
            return Err(WitnessError::LawUnavailable(format!(
                "canonical encoding of dependent tuple {:?}",
                ids.iter().map(|&v| self.name(v)).collect::<Vec<_>>()
            )));
        }
        let mut parts = Vec::with_capacity(ids.len());
        for &v in ids {
            let radix = self
                .law(&[v])?
                .support
                .to_u64()
                .ok_or(WitnessError::KeyOverflow)?;
            let mode = match &self.defs[self.canon(v)] {
                Def::Atom(_) | Def::Mixed { .. } => {
                    let mut vals = self.enum_values(self.canon(v))?;
                    vals.sort_unstable();
                    vals.dedup();
                    let map: HashMap<u64, u64> = vals
                        .into_iter()
                        .enumerate()
                        .map(|(i, x)| (x, i as u64))
                        .collect();
                    EncMode::Table(map)
                }
                _ => EncMode::Identity,
            };
            parts.push((pos[&v], mode, radix));
        }
        Ok(VecEnc::Parts(parts))
    }

    /// Values an atom-determined variable takes, per atom.
    fn atom_values(&self, v: usize) -> Result<Vec<u64>, WitnessError> {
        match &self.defs[self.canon(v)] {
            Def::Atom(t) => Ok(t.clone()),
            _ => Err(WitnessError::LawUnavailable(format!(
                "{} is not determined by the backbone atom",
                self.name(v)
            ))),
        }
    }

    /// All values a variable takes, with multiplicity, for index maps.
    fn enum_values(&self, v: usize) -> Result<Vec<u64>, WitnessError> {
        match &self.defs[v] {
            Def::Atom(t) => Ok(t.clone()),
            Def::Mixed { table, .. } => Ok(table.iter().flatten().copied().collect()),
            _ => Err(WitnessError::LawUnavailable(format!(
                "no direct value table for {}",
                self.name(v)
            ))),
        }
    }

    /// Radix bounding a variable's values, for packing joint keys.
    pub(crate) fn key_radix(&self, v: usize) -> Result<u128, WitnessError> {
        Ok(match &self.defs[v] {
            Def::Atom(t) => (*t.iter().max().unwrap_or(&0) as u128) + 1,
            Def::Leaf(l) => self.leaves[*l].to_u128().ok_or(WitnessError::KeyOverflow)?,
            Def::Mixed { table, .. } => {
                (*table.iter().flatten().max().unwrap_or(&0) as u128) + 1
            }
            Def::Tuple(parts) => {
                let mut r: u128 = 1;
                for &p in parts {
                    let lr = self
                        .law(&[p])?
                        .support
                        .to_u128()
                        .ok_or(WitnessError::KeyOverflow)?;
                    r = r.checked_mul(lr).ok_or(WitnessError::KeyOverflow)?;
                }
                r
            }
            Def::Otp { modulus, .. } => {
                modulus.to_u128().ok_or(WitnessError::KeyOverflow)?
            }
            Def::Copy(src) => self.key_radix(*src)?,
            Def::Bit { .. } => 2,
        })
    }

    /// Runs the enumeration, calling `f` with each state's values and its
    /// mass numerator. The common denominator is `mass_den` times the
    /// product of effective leaf sizes.
    pub(crate) fn run_enumeration<F>(
        &self,
        plan: &EnumPlan,
        mut f: F,
    ) -> Result<(), WitnessError>
    where
        F: FnMut(&EnumValues<'_>, u64) -> Result<(), WitnessError>,
    {
        let n_atoms = if plan.backbone { self.n_atoms() } else { 1 };
        // With the backbone marginalized out the masses sum to one, so each
        // state carries the full common denominator as its numerator.
        let flat_num = if plan.backbone {
            0
        } else {
            self.mass_den.to_u64().ok_or(WitnessError::MassOverflow)?
        };
        let mut leaf_vals = vec![0u64; plan.leaf_dims.len()];
        let mut vals = vec![0u64; plan.needed.len()];
        loop {
            for a in 0..n_atoms {
                for i in 0..plan.computes.len() {
                    // Definitions only reference earlier variables, which sit
                    // at earlier positions of the ascending `needed` list.
                    let (done, rest) = vals.split_at_mut(i);
                    rest[0] = plan.computes[i].eval(a, &leaf_vals, done)?;
                }
                let num = if plan.backbone {
                    self.mass_num[a]
                } else {
                    flat_num
                };
                let values = EnumValues {
                    pos: &plan.pos,
                    vals: &vals,
                };
                f(&values, num)?;
            }
            // Odometer over leaf values.
            let mut i = 0;
            loop {
                if i == leaf_vals.len() {
                    return Ok(());
                }
                leaf_vals[i] += 1;
                if leaf_vals[i] < plan.leaf_dims[i].1 {
                    break;
                }
                leaf_vals[i] = 0;
                i += 1;
            }
        }
    }

    /// Common denominator of the mass numerators produced by `plan`.
    pub(crate) fn enum_denominator(&self, plan: &EnumPlan) -> BigUint {
        let mut den = self.mass_den.clone();
        for &(_, eff) in &plan.leaf_dims {
            den *= BigUint::from(eff);
        }
        den
    }

    // ------------------------------------------------------------------
    // Exact checks by enumeration
    // ------------------------------------------------------------------

    pub fn check_ci_enumerated(
        &self,
        a: &[usize],
        b: &[usize],
        c: &[usize],
        cap: u64,
    ) -> Result<bool, WitnessError> {
        let mut all: Vec<usize> = Vec::new();
        all.extend_from_slice(a);
        all.extend_from_slice(b);
        all.extend_from_slice(c);
        let plan = self.plan_enumeration(&all, cap)?;
        let pa = plan.positions(a);
        let pb = plan.positions(b);
        let pc = plan.positions(c);
        let ra = self.block_radices(a)?;
        let rb = self.block_radices(b)?;
        let rc = self.block_radices(c)?;
        let mut joint: HashMap<(u128, u128, u128), u128> = HashMap::new();
        self.run_enumeration(&plan, |vals, num| {
            let ka = pack_key(&pa, &ra, vals.raw())?;
            let kb = pack_key(&pb, &rb, vals.raw())?;
            let kc = pack_key(&pc, &rc, vals.raw())?;
            *joint.entry((ka, kb, kc)).or_insert(0) += num as u128;
            Ok(())
        })?;
        let mut m_ac: HashMap<(u128, u128), u128> = HashMap::new();
        let mut m_bc: HashMap<(u128, u128), u128> = HashMap::new();
        let mut m_c: HashMap<u128, u128> = HashMap::new();
        for (&(ka, kb, kc), &n) in &joint {
            *m_ac.entry((ka, kc)).or_insert(0) += n;
            *m_bc.entry((kb, kc)).or_insert(0) += n;
            *m_c.entry(kc).or_insert(0) += n;
        }
        for (&(ka, kb, kc), &n) in &joint {
            if n * m_c[&kc] != m_ac[&(ka, kc)] * m_bc[&(kb, kc)] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn check_fd_enumerated(
        &self,
        targets: &[usize],
        givens: &[usize],
        cap: u64,
    ) -> Result<bool, WitnessError> {
        let mut all: Vec<usize> = Vec::new();
        all.extend_from_slice(targets);
        all.extend_from_slice(givens);
        let plan = self.plan_enumeration(&all, cap)?;
        let pt = plan.positions(targets);
        let pg = plan.positions(givens);
        let rt = self.block_radices(targets)?;
        let rg = self.block_radices(givens)?;
        let mut seen: HashMap<u128, u128> = HashMap::new();
        let mut ok = true;
        self.run_enumeration(&plan, |vals, _| {
            if !ok {
                return Ok(());
            }
            let kt = pack_key(&pt, &rt, vals.raw())?;
            let kg = pack_key(&pg, &rg, vals.raw())?;
            match seen.entry(kg) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(kt);
                }
                std::collections::hash_map::Entry::Occupied(e) => {
                    if *e.get() != kt {
                        ok = false;
                    }
                }
            }
            Ok(())
        })?;
        Ok(ok)
    }

    fn block_radices(&self, ids: &[usize]) -> Result<Vec<u128>, WitnessError> {
        let radices: Vec<u128> = ids
            .iter()
            .map(|&v| self.key_radix(v))
            .collect::<Result<_, _>>()?;
        let mut total: u128 = 1;
        for &r in &radices {
            total = total.checked_mul(r).ok_or(WitnessError::KeyOverflow)?;
        }
        Ok(radices)
    }

    /// Explicit joint marginal of `ids`, as a tabulated distribution with
    /// the given column names. Token strings are the decimal values.
    pub fn to_explicit(&self, ids: &[usize], names: &[&str]) -> Result<JointDistribution, WitnessError> {
        assert_eq!(ids.len(), names.len());
        let plan = self.plan_enumeration(ids, ENUM_CAP)?;
        let den = self.enum_denominator(&plan);
        let mut counts: HashMap<Vec<u64>, u128> = HashMap::new();
        self.run_enumeration(&plan, |vals, num| {
            let key: Vec<u64> = ids.iter().map(|&v| vals.get(v)).collect();
            *counts.entry(key).or_insert(0) += num as u128;
            Ok(())
        })?;
        let mut builder = JointDistribution::builder(
            names.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        );
        let mut keys: Vec<&Vec<u64>> = counts.keys().collect();
        keys.sort_unstable();
        for key in keys {
            let n = counts[key];
            let mass = BigRational::new(
                BigInt::from(BigUint::from(n)),
                BigInt::from(den.clone()),
            );
            builder.atom_ints(key, mass);
        }
        Ok(builder.build()?)
    }
}

// ----------------------------------------------------------------------
// Enumeration plumbing
// ----------------------------------------------------------------------

pub(crate) struct EnumPlan {
    pub needed: Vec<usize>,
    pos: HashMap<usize, usize>,
    backbone: bool,
    /// (leaf id, effective size).
    leaf_dims: Vec<(usize, u64)>,
    pub states: u64,
    computes: Vec<Compute>,
}

pub(crate) struct EnumValues<'a> {
    pos: &'a HashMap<usize, usize>,
    vals: &'a [u64],
}

impl EnumValues<'_> {
    pub fn get(&self, internal: usize) -> u64 {
        self.vals[self.pos[&internal]]
    }

    pub fn raw(&self) -> &[u64] {
        self.vals
    }
}

impl EnumPlan {
    pub fn positions(&self, ids: &[usize]) -> Vec<usize> {
        ids.iter().map(|v| self.pos[v]).collect()
    }
}

enum EncMode {
    Identity,
    Table(HashMap<u64, u64>),
}

enum VecEnc {
    /// Per-atom canonical index of a backbone determined tuple.
    BackboneJoint(Vec<u64>),
    /// Mixed radix over independent components: (position, encoding, radix).
    Parts(Vec<(usize, EncMode, u64)>),
}

impl VecEnc {
    fn eval(&self, atom: usize, vals: &[u64]) -> Result<u64, WitnessError> {
        match self {
            VecEnc::BackboneJoint(t) => Ok(t[atom]),
            VecEnc::Parts(parts) => {
                let mut acc: u128 = 0;
                for (pos, mode, radix) in parts {
                    let raw = vals[*pos];
                    let enc = match mode {
                        EncMode::Identity => raw,
                        EncMode::Table(map) => *map
                            .get(&raw)
                            .expect("value table covers every realized value"),
                    };
                    debug_assert!(enc < *radix);
                    acc = acc * (*radix as u128) + enc as u128;
                }
                u64::try_from(acc).map_err(|_| WitnessError::KeyOverflow)
            }
        }
    }
}

enum Compute {
    Atom(Vec<u64>),
    Leaf(usize),
    Mixed { slot: usize, table: Vec<Vec<u64>> },
    Tuple(VecEnc),
    Otp { base: VecEnc, pad: usize, modulus: u64 },
    Copy(usize),
    Bit { of: usize, bit: u32 },
}

impl Compute {
    fn eval(&self, atom: usize, leaf_vals: &[u64], vals: &[u64]) -> Result<u64, WitnessError> {
        Ok(match self {
            Compute::Atom(t) => t[atom],
            Compute::Leaf(slot) => leaf_vals[*slot],
            Compute::Mixed { slot, table } => {
                let row = &table[atom];
                row[(leaf_vals[*slot] % row.len() as u64) as usize]
            }
            Compute::Tuple(enc) => enc.eval(atom, vals)?,
            Compute::Otp { base, pad, modulus } => {
                let e = base.eval(atom, vals)? as u128;
                ((e + vals[*pad] as u128) % *modulus as u128) as u64
            }
            Compute::Copy(pos) => vals[*pos],
            Compute::Bit { of, bit } => (vals[*of] >> bit) & 1,
        })
    }
}

pub(crate) fn pack_key(
    positions: &[usize],
    radices: &[u128],
    raw: &[u64],
) -> Result<u128, WitnessError> {
    let mut key: u128 = 0;
    for (&p, &r) in positions.iter().zip(radices) {
        let x = raw[p] as u128;
        debug_assert!(x < r);
        key = key
            .checked_mul(r)
            .and_then(|k| k.checked_add(x))
            .ok_or(WitnessError::KeyOverflow)?;
    }
    Ok(key)
}
