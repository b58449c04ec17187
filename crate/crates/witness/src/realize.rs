//! Walks definition plans and realizes them into a structured distribution.
//!
//! Plans fix the shape of every auxiliary variable (fresh uniform, pad
//! construction, tuple, copy, bit) but leave two holes open: the given head
//! variables, whose values come from whatever witness is being built, and
//! custom roles, whose realizations are construction specific. Both are
//! supplied as hooks. Size expressions evaluate against the realized
//! supports of earlier variables, which is well defined because plans only
//! reference earlier ids.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use ciwb_ci::statement::VariableSpec;
use ciwb_predicates::build::{CustomSpec, DefPlan};

use crate::error::WitnessError;
use crate::structured::{Def, StructuredDistribution};

pub type GivenHook<'h> = dyn FnMut(usize, &VariableSpec) -> Result<Def, WitnessError> + 'h;
pub type CustomHook<'h> = dyn FnMut(usize, &CustomSpec, &mut StructuredDistribution) -> Result<Def, WitnessError>
    + 'h;

/// Realizes `plans` over the given backbone, producing a distribution whose
/// visible variables are exactly the instance variables, in order.
pub fn realize(
    vars: &[VariableSpec],
    plans: &[DefPlan],
    atom_mass: Vec<BigRational>,
    given: &mut GivenHook<'_>,
    custom: &mut CustomHook<'_>,
) -> Result<StructuredDistribution, WitnessError> {
    assert_eq!(vars.len(), plans.len(), "one plan per variable");
    let mut dist = StructuredDistribution::new(atom_mass)?;
    realize_onto(&mut dist, vars, plans, 0, given, custom)?;
    Ok(dist)
}

/// Realizes a suffix of plans onto an existing distribution whose visible
/// variables already cover `0..start`. Used when a derived instance extends
/// a realized one with further variables.
pub fn realize_onto(
    dist: &mut StructuredDistribution,
    vars: &[VariableSpec],
    plans: &[DefPlan],
    start: usize,
    given: &mut GivenHook<'_>,
    custom: &mut CustomHook<'_>,
) -> Result<(), WitnessError> {
    assert_eq!(vars.len(), plans.len(), "one plan per variable");
    assert_eq!(dist.n_vars(), start, "extension must continue the plan walk");
    for (id, (spec, plan)) in vars.iter().zip(plans).enumerate().skip(start) {
        let def = match plan {
            DefPlan::Given => given(id, spec)?,
            DefPlan::FreshUniform(expr) => {
                let size = dist.eval_size(expr)?;
                Def::Leaf(dist.add_leaf(size)?)
            }
            DefPlan::OneTimePad { base, pad, modulus } => {
                let m = dist.eval_size(modulus)?;
                Def::Otp {
                    base: base.iter().map(|&v| dist.internal_of(v)).collect(),
                    pad: dist.internal_of(*pad),
                    modulus: m,
                }
            }
            DefPlan::TupleOf(parts) => {
                Def::Tuple(parts.iter().map(|&v| dist.internal_of(v)).collect())
            }
            DefPlan::CopyOf(v) => Def::Copy(dist.internal_of(*v)),
            DefPlan::BitOf { of, bit } => Def::Bit {
                of: dist.internal_of(*of),
                bit: *bit,
            },
            DefPlan::Custom(cspec) => custom(id, cspec, dist)?,
        };
        let internal = dist.push_var(spec.name.clone(), def)?;
        dist.push_visible(internal);
    }
    Ok(())
}

/// Atom value table behind a variable, when the variable is determined by
/// the backbone atom.
pub fn atom_table<'d>(
    dist: &'d StructuredDistribution,
    v: usize,
) -> Result<&'d [u64], WitnessError> {
    match dist.def(dist.canon(v)) {
        Def::Atom(t) => Ok(t),
        _ => Err(WitnessError::LawUnavailable(format!(
            "{} is not a backbone function",
            dist.name(v)
        ))),
    }
}

/// The four patterns a flip block realizes over (f, g1, g2), in the order
/// that indexes the block's uniform four-value variable.
pub const FLIP_PATTERNS: [(u64, u64, u64); 4] = [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 0, 1)];

/// u for a flip block: the index of the realized (f, g1, g2) pattern.
pub fn flip_u_def(
    dist: &StructuredDistribution,
    f: usize,
    g1: usize,
    g2: usize,
) -> Result<Def, WitnessError> {
    let tf = atom_table(dist, f)?;
    let t1 = atom_table(dist, g1)?;
    let t2 = atom_table(dist, g2)?;
    let mut table = Vec::with_capacity(tf.len());
    for a in 0..tf.len() {
        let pat = (tf[a], t1[a], t2[a]);
        let idx = FLIP_PATTERNS
            .iter()
            .position(|&p| p == pat)
            .ok_or(WitnessError::FlipShape(f, g1, g2))?;
        table.push(idx as u64);
    }
    Ok(Def::Atom(table))
}

/// z1 or z2 for a flip block. Where the paired variable is 0 the pattern
/// determines z (three possible patterns, ranked); where it is 1, z is an
/// independent uniform three-value draw.
pub fn flip_z_def(
    dist: &mut StructuredDistribution,
    f: usize,
    g1: usize,
    g2: usize,
    second: bool,
) -> Result<Def, WitnessError> {
    let determined: [(u64, u64, u64); 3] = if second {
        [(0, 0, 0), (0, 1, 0), (1, 0, 0)]
    } else {
        [(0, 0, 0), (1, 0, 0), (1, 0, 1)]
    };
    let (tf, t1, t2) = (
        atom_table(dist, f)?.to_vec(),
        atom_table(dist, g1)?.to_vec(),
        atom_table(dist, g2)?.to_vec(),
    );
    let paired = if second { &t2 } else { &t1 };
    let mut table = Vec::with_capacity(tf.len());
    for a in 0..tf.len() {
        let pat = (tf[a], t1[a], t2[a]);
        if FLIP_PATTERNS.iter().all(|&p| p != pat) {
            return Err(WitnessError::FlipShape(f, g1, g2));
        }
        if paired[a] == 0 {
            let rank = determined
                .iter()
                .position(|&p| p == pat)
                .ok_or(WitnessError::FlipShape(f, g1, g2))?;
            table.push(vec![rank as u64]);
        } else {
            table.push(vec![0, 1, 2]);
        }
    }
    let leaf = dist.add_leaf(3u8.into())?;
    Ok(Def::Mixed { leaf, table })
}

/// u for a uniform split gadget of arity `kappa` over the observation
/// tuple: within every observation class, u must be exactly uniform over
/// `0..kappa`, f must be a function of (observation, u), and u must be
/// independent of the observation.
///
/// Classes mixing f = 0 and f = 1 mass are split: the f = 0 atoms spread
/// over a prefix A of `0..kappa` and the f = 1 atoms over the complementary
/// suffix, with |A| = kappa * m0 / (m0 + m1). That keeps u uniform on the
/// class (each side contributes mass/|side| per value, and the two sides'
/// conditional masses are |A|/kappa and |B|/kappa of the class). Classes
/// pure in f spread over all of `0..kappa`. Infeasible exactly when some
/// mixed class's |A| is not an integer.
pub fn sat_u_def(
    dist: &mut StructuredDistribution,
    kappa: u64,
    observed: &[usize],
    f: usize,
) -> Result<Def, WitnessError> {
    let tf = atom_table(dist, f)?.to_vec();
    let obs: Vec<Vec<u64>> = observed
        .iter()
        .map(|&v| atom_table(dist, v).map(|t| t.to_vec()))
        .collect::<Result<_, _>>()?;
    let n_atoms = dist.n_atoms();

    use std::collections::HashMap;
    let mut classes: HashMap<Vec<u64>, (BigRational, BigRational)> = HashMap::new();
    let key_of = |a: usize| -> Vec<u64> { obs.iter().map(|t| t[a]).collect() };
    for a in 0..n_atoms {
        let entry = classes
            .entry(key_of(a))
            .or_insert_with(|| (BigRational::zero(), BigRational::zero()));
        if tf[a] == 0 {
            entry.0 += dist.atom_mass(a);
        } else {
            entry.1 += dist.atom_mass(a);
        }
    }

    let mut split: HashMap<Vec<u64>, u64> = HashMap::new();
    for (key, (m0, m1)) in &classes {
        if !m0.is_zero() && !m1.is_zero() {
            let a_len = m0 * BigRational::from_integer(kappa.into()) / (m0 + m1);
            if !a_len.is_integer() {
                return Err(WitnessError::GadgetInfeasible(format!(
                    "class split {a_len} of {kappa} is not integral"
                )));
            }
            let a_len = a_len.to_integer().to_u64().expect("split fits u64");
            split.insert(key.clone(), a_len);
        }
    }

    let mut table = Vec::with_capacity(n_atoms);
    let mut lcm: u64 = 1;
    for a in 0..n_atoms {
        let row: Vec<u64> = match split.get(&key_of(a)) {
            Some(&a_len) if tf[a] == 0 => (0..a_len).collect(),
            Some(&a_len) => (a_len..kappa).collect(),
            None => (0..kappa).collect(),
        };
        lcm = lcm.lcm(&(row.len() as u64));
        table.push(row);
    }
    let leaf = dist.add_leaf(lcm.into())?;
    Ok(Def::Mixed { leaf, table })
}
