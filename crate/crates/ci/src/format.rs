//! Canonical text formats and JSON mirrors.
//!
//! Both formats round-trip bit-exactly: parse(serialize(x)) == x. Lines
//! starting with `#` (or trailing `#` comments) are ignored by the parsers,
//! and serializers never emit them.
//!
//! Implication instance:
//! ```text
//! var X bound=4
//! var Y bound=inf kind=implicit
//! ci X | Y | -
//! ci X Y | all-but X Y | X
//! consequent X | Y | -
//! ```
//!
//! Distribution:
//! ```text
//! vars X Y Z
//! 1/4 0 0 0
//! 1/4 0 1 1
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::distribution::JointDistribution;
use crate::error::CiError;
use crate::statement::{
    Bound, BoundKind, CIStatement, ImplicationInstance, VarSet, VariableSpec,
};

pub fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s != "-"
        && s != "all-but"
        && !s
            .chars()
            .any(|c| c.is_whitespace() || c == '|' || c == '#' || c == '=')
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn perr(line: usize, msg: impl Into<String>) -> CiError {
    CiError::Parse {
        line,
        msg: msg.into(),
    }
}

// ---------------------------------------------------------------------------
// Implication instances
// ---------------------------------------------------------------------------

pub fn serialize_instance(inst: &ImplicationInstance) -> String {
    let mut out = String::new();
    for v in &inst.vars {
        let bound = match &v.bound {
            Bound::Finite(k) => k.to_string(),
            Bound::Unbounded => "inf".to_string(),
        };
        match v.kind {
            BoundKind::Explicit => writeln!(out, "var {} bound={}", v.name, bound).unwrap(),
            BoundKind::Implicit => {
                writeln!(out, "var {} bound={} kind=implicit", v.name, bound).unwrap()
            }
        }
    }
    for st in &inst.antecedent {
        writeln!(out, "ci {}", fmt_statement(st, inst)).unwrap();
    }
    writeln!(out, "consequent {}", fmt_statement(&inst.consequent, inst)).unwrap();
    out
}

fn fmt_statement(st: &CIStatement, inst: &ImplicationInstance) -> String {
    format!(
        "{} | {} | {}",
        fmt_set(&st.a, inst),
        fmt_set(&st.b, inst),
        fmt_set(&st.c, inst)
    )
}

fn fmt_set(set: &VarSet, inst: &ImplicationInstance) -> String {
    let names = |s: &std::collections::BTreeSet<usize>| {
        s.iter()
            .map(|&i| inst.vars[i].name.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    match set {
        VarSet::Explicit(s) if s.is_empty() => "-".to_string(),
        VarSet::Explicit(s) => names(s),
        VarSet::AllBut(s) if s.is_empty() => "all-but".to_string(),
        VarSet::AllBut(s) => format!("all-but {}", names(s)),
    }
}

pub fn parse_instance(text: &str) -> Result<ImplicationInstance, CiError> {
    let mut vars: Vec<VariableSpec> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut antecedent: Vec<CIStatement> = Vec::new();
    let mut consequent: Option<CIStatement> = None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        match head {
            "var" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| perr(lineno, "var line needs a name"))?;
                if !valid_name(name) {
                    return Err(CiError::InvalidName(name.to_string()));
                }
                if index.contains_key(name) {
                    return Err(CiError::DuplicateVariable(name.to_string()));
                }
                let mut bound: Option<Bound> = None;
                let mut kind = BoundKind::Explicit;
                for kv in tokens {
                    let (key, value) = kv
                        .split_once('=')
                        .ok_or_else(|| perr(lineno, format!("expected key=value, got `{kv}`")))?;
                    match key {
                        "bound" => {
                            bound = Some(if value == "inf" {
                                Bound::Unbounded
                            } else {
                                let k = value.parse::<BigUint>().map_err(|_| {
                                    perr(lineno, format!("bad bound `{value}`"))
                                })?;
                                Bound::Finite(k)
                            });
                        }
                        "kind" => {
                            kind = match value {
                                "explicit" => BoundKind::Explicit,
                                "implicit" => BoundKind::Implicit,
                                _ => return Err(perr(lineno, format!("bad kind `{value}`"))),
                            };
                        }
                        _ => return Err(perr(lineno, format!("unknown key `{key}`"))),
                    }
                }
                let bound = bound.ok_or_else(|| perr(lineno, "var line needs bound="))?;
                index.insert(name.to_string(), vars.len());
                vars.push(VariableSpec {
                    name: name.to_string(),
                    bound,
                    kind,
                });
            }
            "ci" | "consequent" => {
                let rest = line[head.len()..].trim();
                let st = parse_statement(rest, &index, lineno)?;
                if head == "ci" {
                    antecedent.push(st);
                } else if consequent.is_some() {
                    return Err(CiError::DuplicateConsequent);
                } else {
                    consequent = Some(st);
                }
            }
            _ => return Err(perr(lineno, format!("unknown directive `{head}`"))),
        }
    }

    Ok(ImplicationInstance {
        vars,
        antecedent,
        consequent: consequent.ok_or(CiError::MissingConsequent)?,
    })
}

fn parse_statement(
    rest: &str,
    index: &HashMap<String, usize>,
    lineno: usize,
) -> Result<CIStatement, CiError> {
    let parts: Vec<&str> = rest.split('|').collect();
    if parts.len() != 3 {
        return Err(perr(lineno, "statement needs exactly two `|` separators"));
    }
    let set = |part: &str| -> Result<VarSet, CiError> {
        let toks: Vec<&str> = part.split_whitespace().collect();
        let resolve = |names: &[&str]| -> Result<Vec<usize>, CiError> {
            names
                .iter()
                .map(|n| {
                    index
                        .get(*n)
                        .copied()
                        .ok_or_else(|| CiError::UnknownVariable(n.to_string()))
                })
                .collect()
        };
        match toks.as_slice() {
            ["-"] => Ok(VarSet::empty()),
            ["all-but", rest @ ..] => Ok(VarSet::all_but(resolve(rest)?)),
            [] => Err(perr(lineno, "empty set must be written `-`")),
            names => Ok(VarSet::explicit(resolve(names)?)),
        }
    };
    Ok(CIStatement {
        a: set(parts[0])?,
        b: set(parts[1])?,
        c: set(parts[2])?,
    })
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

pub fn serialize_distribution(dist: &JointDistribution) -> String {
    let mut out = String::new();
    writeln!(out, "vars {}", dist.vars().join(" ")).unwrap();
    for (key, mass) in dist.atoms() {
        write!(out, "{}/{}", mass.numer(), mass.denom()).unwrap();
        for tok in dist.tokens_of(key) {
            write!(out, " {tok}").unwrap();
        }
        writeln!(out).unwrap();
    }
    out
}

pub fn parse_distribution(text: &str) -> Result<JointDistribution, CiError> {
    let mut builder: Option<crate::distribution::DistributionBuilder> = None;
    let mut n_vars = 0usize;
    let mut seen: std::collections::BTreeSet<Vec<String>> = std::collections::BTreeSet::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if builder.is_none() {
            if toks[0] != "vars" {
                return Err(perr(lineno, "distribution must start with a `vars` line"));
            }
            let names = &toks[1..];
            if names.is_empty() {
                return Err(perr(lineno, "vars line needs at least one name"));
            }
            let mut uniq = std::collections::HashSet::new();
            for n in names {
                if !valid_name(n) {
                    return Err(CiError::InvalidName(n.to_string()));
                }
                if !uniq.insert(*n) {
                    return Err(CiError::DuplicateVariable(n.to_string()));
                }
            }
            n_vars = names.len();
            builder = Some(JointDistribution::builder(names.iter().copied()));
            continue;
        }
        if toks.len() != n_vars + 1 {
            return Err(CiError::BadArity {
                got: toks.len().saturating_sub(1),
                want: n_vars,
            });
        }
        let mass = parse_mass(toks[0], lineno)?;
        if !mass.is_positive() {
            return Err(CiError::NonPositiveMass(mass.to_string()));
        }
        let values: Vec<String> = toks[1..].iter().map(|s| s.to_string()).collect();
        if !seen.insert(values.clone()) {
            return Err(perr(lineno, "duplicate atom"));
        }
        builder.as_mut().unwrap().atom(&values, mass);
    }

    match builder {
        Some(b) => b.build(),
        None => Err(CiError::EmptyDistribution),
    }
}

fn parse_mass(tok: &str, lineno: usize) -> Result<BigRational, CiError> {
    let bad = || perr(lineno, format!("bad mass `{tok}`"));
    match tok.split_once('/') {
        Some((n, d)) => {
            let n = n.parse::<BigInt>().map_err(|_| bad())?;
            let d = d.parse::<BigInt>().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n = tok.parse::<BigInt>().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

// ---------------------------------------------------------------------------
// JSON mirrors
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SetJson {
    #[serde(default, skip_serializing_if = "is_false")]
    pub all_but: bool,
    pub names: Vec<String>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct StatementJson {
    pub a: SetJson,
    pub b: SetJson,
    pub c: SetJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct VarJson {
    pub name: String,
    /// Decimal integer or "inf".
    pub bound: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub implicit: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct InstanceJson {
    pub vars: Vec<VarJson>,
    pub antecedent: Vec<StatementJson>,
    pub consequent: StatementJson,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct AtomJson {
    pub mass: String,
    pub values: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DistributionJson {
    pub vars: Vec<String>,
    pub atoms: Vec<AtomJson>,
}

pub fn instance_to_json(inst: &ImplicationInstance) -> InstanceJson {
    let set = |s: &VarSet| -> SetJson {
        let (all_but, idxs): (bool, Vec<usize>) = match s {
            VarSet::Explicit(x) => (false, x.iter().copied().collect()),
            VarSet::AllBut(x) => (true, x.iter().copied().collect()),
        };
        SetJson {
            all_but,
            names: idxs.iter().map(|&i| inst.vars[i].name.clone()).collect(),
        }
    };
    let stmt = |st: &CIStatement| StatementJson {
        a: set(&st.a),
        b: set(&st.b),
        c: set(&st.c),
    };
    InstanceJson {
        vars: inst
            .vars
            .iter()
            .map(|v| VarJson {
                name: v.name.clone(),
                bound: match &v.bound {
                    Bound::Finite(k) => k.to_string(),
                    Bound::Unbounded => "inf".to_string(),
                },
                implicit: v.kind == BoundKind::Implicit,
            })
            .collect(),
        antecedent: inst.antecedent.iter().map(stmt).collect(),
        consequent: stmt(&inst.consequent),
    }
}

pub fn instance_from_json(json: &InstanceJson) -> Result<ImplicationInstance, CiError> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut vars = Vec::new();
    for v in &json.vars {
        if !valid_name(&v.name) {
            return Err(CiError::InvalidName(v.name.clone()));
        }
        if index.insert(v.name.as_str(), vars.len()).is_some() {
            return Err(CiError::DuplicateVariable(v.name.clone()));
        }
        let bound = if v.bound == "inf" {
            Bound::Unbounded
        } else {
            Bound::Finite(
                v.bound
                    .parse::<BigUint>()
                    .map_err(|_| perr(0, format!("bad bound `{}`", v.bound)))?,
            )
        };
        vars.push(VariableSpec {
            name: v.name.clone(),
            bound,
            kind: if v.implicit {
                BoundKind::Implicit
            } else {
                BoundKind::Explicit
            },
        });
    }
    let set = |s: &SetJson| -> Result<VarSet, CiError> {
        let idxs: Vec<usize> = s
            .names
            .iter()
            .map(|n| {
                index
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| CiError::UnknownVariable(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(if s.all_but {
            VarSet::all_but(idxs)
        } else {
            VarSet::explicit(idxs)
        })
    };
    let stmt = |st: &StatementJson| -> Result<CIStatement, CiError> {
        Ok(CIStatement {
            a: set(&st.a)?,
            b: set(&st.b)?,
            c: set(&st.c)?,
        })
    };
    Ok(ImplicationInstance {
        vars,
        antecedent: json
            .antecedent
            .iter()
            .map(stmt)
            .collect::<Result<_, _>>()?,
        consequent: stmt(&json.consequent)?,
    })
}

pub fn distribution_to_json(dist: &JointDistribution) -> DistributionJson {
    DistributionJson {
        vars: dist.vars().to_vec(),
        atoms: dist
            .atoms()
            .map(|(key, mass)| AtomJson {
                mass: format!("{}/{}", mass.numer(), mass.denom()),
                values: dist.tokens_of(key).iter().map(|s| s.to_string()).collect(),
            })
            .collect(),
    }
}

pub fn distribution_from_json(json: &DistributionJson) -> Result<JointDistribution, CiError> {
    let mut b = JointDistribution::builder(json.vars.iter().cloned());
    for atom in &json.atoms {
        if atom.values.len() != json.vars.len() {
            return Err(CiError::BadArity {
                got: atom.values.len(),
                want: json.vars.len(),
            });
        }
        let mass = parse_mass(&atom.mass, 0)?;
        if !mass.is_positive() {
            return Err(CiError::NonPositiveMass(mass.to_string()));
        }
        b.atom(&atom.values, mass);
    }
    b.build()
}
