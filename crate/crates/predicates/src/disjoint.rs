//! Rewrites an implication into one whose statements each have pairwise
//! disjoint variable blocks.
//!
//! Functional dependence is stated as I(T; T | G) = 0, whose first two
//! blocks coincide, so compiled instances are never disjoint as written.
//! The rewrite makes three copies of every variable and routes each
//! statement's first block through copy zero, its second through copy one
//! and its conditioning block through copy two. Each copy Y gets a partner
//! Z, saturated independences force Y and Z to interact with the rest of
//! the instance only through their shared information, and chains of
//! three-cycle predicates through fresh auxiliaries force that shared
//! information to agree across the three copies. A counterexample of the
//! source instance transports by setting all copies and auxiliaries of a
//! variable to the variable itself; a counterexample of the rewritten
//! instance restricts to one of the source.

use ciwb_ci::{
    CIStatement, CiError, ImplicationInstance, JointDistribution, VarSet,
    VariableSpec,
};
use ciwb_ci::BoundKind;

/// Where each source variable's copies and chain auxiliaries land in the
/// rewritten instance.
///
/// Variable ids are laid out as the three Y copies (`copy * n + i`), then
/// the three Z partners (`3n + copy * n + i`), then two auxiliaries per
/// chain (`6n + 2t`, `6n + 2t + 1`). Chain `t < n` ties copies zero and one
/// of source variable `t`; chain `t >= n` ties copies one and two of
/// source variable `t - n`.
#[derive(Debug, Clone)]
pub struct DisjointMapping {
    pub n_source: usize,
    /// `copies[i]` lists the ids carrying source variable `i`: the three Y
    /// copies, then the three Z partners.
    pub copies: Vec<[usize; 6]>,
    /// `aux[t]` is the pair of chain auxiliaries of chain `t`.
    pub aux: Vec<[usize; 2]>,
    /// Variable names of the rewritten instance, in id order.
    pub names: Vec<String>,
}

impl DisjointMapping {
    pub fn n_vars(&self) -> usize {
        10 * self.n_source
    }

    /// Source variable that a rewritten variable tracks under the diagonal
    /// embedding.
    pub fn source_of(&self, id: usize) -> usize {
        let n = self.n_source;
        if id < 6 * n {
            id % n
        } else {
            ((id - 6 * n) / 2) % n
        }
    }
}

/// Three-cycle of conditional independences. It holds exactly when the
/// three variables pairwise share information only through one common
/// part, which all three then determine.
pub fn emit_res3(out: &mut Vec<CIStatement>, y1: usize, y2: usize, y3: usize) {
    out.push(CIStatement::ci(vec![y1], vec![y2], vec![y3]));
    out.push(CIStatement::ci(vec![y2], vec![y3], vec![y1]));
    out.push(CIStatement::ci(vec![y3], vec![y1], vec![y2]));
}

/// Chains four three-cycles through two auxiliaries, the last two arguments
/// of each cycle being the first two of the next. Forces the common part
/// of (y1, z1) to coincide with that of (y2, z2).
pub fn emit_eqres(
    out: &mut Vec<CIStatement>,
    y1: usize,
    z1: usize,
    y2: usize,
    z2: usize,
    u1: usize,
    u2: usize,
) {
    emit_res3(out, y1, z1, u1);
    emit_res3(out, z1, u1, u2);
    emit_res3(out, u1, u2, y2);
    emit_res3(out, u2, y2, z2);
}

/// Rewrites `inst` into an equivalent implication whose statements all have
/// pairwise disjoint blocks: 10n variables, 30n + m antecedent statements.
pub fn to_disjoint(inst: &ImplicationInstance) -> (ImplicationInstance, DisjointMapping) {
    let n = inst.n_vars();
    let y = |copy: usize, i: usize| copy * n + i;
    let z = |copy: usize, i: usize| 3 * n + copy * n + i;

    let mut vars = Vec::with_capacity(10 * n);
    for (family, tag) in [(&y as &dyn Fn(usize, usize) -> usize, 'y'), (&z, 'z')] {
        for copy in 0..3 {
            for (i, spec) in inst.vars.iter().enumerate() {
                debug_assert_eq!(family(copy, i), vars.len());
                vars.push(VariableSpec {
                    name: format!("{}.{}{}", spec.name, tag, copy),
                    bound: spec.bound.clone(),
                    kind: spec.kind,
                });
            }
        }
    }
    for t in 0..2 * n {
        let src = &inst.vars[t % n];
        for leg in 0..2 {
            vars.push(VariableSpec {
                name: format!("{}.u{}{}", src.name, t / n, leg),
                bound: src.bound.clone(),
                kind: BoundKind::Implicit,
            });
        }
    }

    let mut antecedent = Vec::with_capacity(30 * n + inst.antecedent.len());
    for t in 0..2 * n {
        let (u1, u2) = (6 * n + 2 * t, 6 * n + 2 * t + 1);
        emit_eqres(&mut antecedent, t, 3 * n + t, t + n, 3 * n + t + n, u1, u2);
    }
    for i in 0..3 * n {
        // Saturated: each copy talks to everything else only through its
        // partner, hence only through their common part.
        let all_but_pair = VarSet::all_but([i, 3 * n + i]);
        antecedent.push(CIStatement::new(
            VarSet::explicit([i]),
            all_but_pair.clone(),
            VarSet::explicit([3 * n + i]),
        ));
        antecedent.push(CIStatement::new(
            VarSet::explicit([3 * n + i]),
            all_but_pair,
            VarSet::explicit([i]),
        ));
    }

    let route = |vs: &VarSet, copy: usize| -> VarSet {
        VarSet::explicit(vs.resolve(n).into_iter().map(|i| y(copy, i)))
    };
    let route_statement = |st: &CIStatement| -> CIStatement {
        CIStatement::new(route(&st.a, 0), route(&st.b, 1), route(&st.c, 2))
    };
    antecedent.extend(inst.antecedent.iter().map(route_statement));

    let out = ImplicationInstance {
        vars,
        antecedent,
        consequent: route_statement(&inst.consequent),
    };
    debug_assert!(disjointness_violations(&out).is_empty());

    let mapping = DisjointMapping {
        n_source: n,
        copies: (0..n)
            .map(|i| [y(0, i), y(1, i), y(2, i), z(0, i), z(1, i), z(2, i)])
            .collect(),
        aux: (0..2 * n).map(|t| [6 * n + 2 * t, 6 * n + 2 * t + 1]).collect(),
        names: out.vars.iter().map(|v| v.name.clone()).collect(),
    };
    (out, mapping)
}

fn sets_disjoint(x: &VarSet, y: &VarSet, n_vars: usize) -> bool {
    match (x, y) {
        (VarSet::Explicit(a), VarSet::Explicit(b)) => a.intersection(b).next().is_none(),
        (VarSet::Explicit(a), VarSet::AllBut(b)) | (VarSet::AllBut(b), VarSet::Explicit(a)) => {
            a.iter().all(|i| b.contains(i))
        }
        (VarSet::AllBut(a), VarSet::AllBut(b)) => {
            // Complements are disjoint iff the two exclusion lists cover
            // every variable.
            (0..n_vars).all(|i| a.contains(&i) || b.contains(&i))
        }
    }
}

/// True when the statement's three blocks are pairwise disjoint.
pub fn statement_blocks_disjoint(st: &CIStatement, n_vars: usize) -> bool {
    sets_disjoint(&st.a, &st.b, n_vars)
        && sets_disjoint(&st.a, &st.c, n_vars)
        && sets_disjoint(&st.b, &st.c, n_vars)
}

/// Indices of statements whose blocks overlap; the consequent reports as
/// index `antecedent.len()`.
pub fn disjointness_violations(inst: &ImplicationInstance) -> Vec<usize> {
    let n = inst.n_vars();
    let mut bad: Vec<usize> = inst
        .antecedent
        .iter()
        .enumerate()
        .filter(|(_, st)| !statement_blocks_disjoint(st, n))
        .map(|(i, _)| i)
        .collect();
    if !statement_blocks_disjoint(&inst.consequent, n) {
        bad.push(inst.antecedent.len());
    }
    bad
}

/// Spreads a distribution over the source variables diagonally across all
/// copies and auxiliaries: every rewritten variable takes the value of the
/// source variable it tracks. Transports counterexamples exactly.
pub fn diagonal_embed(
    dist: &JointDistribution,
    mapping: &DisjointMapping,
) -> Result<JointDistribution, CiError> {
    if dist.n_vars() != mapping.n_source {
        return Err(CiError::BadArity {
            got: dist.n_vars(),
            want: mapping.n_source,
        });
    }
    let mut b = JointDistribution::builder(mapping.names.iter().cloned());
    for (key, mass) in dist.atoms() {
        let toks: Vec<&str> = (0..mapping.n_vars())
            .map(|j| {
                let src = mapping.source_of(j);
                dist.token(src, key[src])
            })
            .collect();
        b.atom(&toks, mass.clone());
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ciwb_ci::{evaluate_implication, Bound, ImplicationOutcome};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn holds(st: &CIStatement, dist: &JointDistribution) -> bool {
        let n = dist.n_vars();
        dist.check_ci_exact(&st.a.resolve(n), &st.b.resolve(n), &st.c.resolve(n))
    }

    /// Common part of columns `y` and `z` by connected components of the
    /// bipartite support graph: one token per component, evaluated per atom.
    fn common_part_column(dist: &JointDistribution, y: usize, z: usize) -> Vec<String> {
        let atoms: Vec<&[u32]> = dist.atoms().map(|(k, _)| k).collect();
        let ys: Vec<u32> = {
            let mut v: Vec<u32> = atoms.iter().map(|k| k[y]).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let zs: Vec<u32> = {
            let mut v: Vec<u32> = atoms.iter().map(|k| k[z]).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        // Union-find over y-values followed by z-values.
        let mut parent: Vec<usize> = (0..ys.len() + zs.len()).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for k in &atoms {
            let yi = ys.binary_search(&k[y]).unwrap();
            let zi = zs.binary_search(&k[z]).unwrap() + ys.len();
            let (a, b) = (find(&mut parent, yi), find(&mut parent, zi));
            parent[a] = b;
        }
        atoms
            .iter()
            .map(|k| {
                let yi = ys.binary_search(&k[y]).unwrap();
                format!("c{}", find(&mut parent, yi))
            })
            .collect()
    }

    /// Two disconnected product blocks: Y, Z uniform on {0,1}x{0,1} within
    /// each block, blocks {0,1} and {2,3}.
    fn two_block_pair() -> JointDistribution {
        let mut b = JointDistribution::builder(["Y", "Z"]);
        for y in 0..2u64 {
            for z in 0..2u64 {
                b.atom_ints(&[y, z], rat(1, 8));
                b.atom_ints(&[y + 2, z + 2], rat(1, 8));
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn three_cycle_holds_for_independents_and_common_parts() {
        let mut stmts = Vec::new();
        emit_res3(&mut stmts, 0, 1, 2);
        assert_eq!(stmts.len(), 3);

        let mut b = JointDistribution::builder(["A", "B", "C"]);
        for v in 0..8u64 {
            b.atom_ints(&[v & 1, (v >> 1) & 1, v >> 2], rat(1, 8));
        }
        let independent = b.build().unwrap();
        assert!(stmts.iter().all(|st| holds(st, &independent)));

        // Y, Z with their common part as the third variable.
        let pair = two_block_pair();
        let part = common_part_column(&pair, 0, 1);
        let mut b = JointDistribution::builder(["Y", "Z", "X"]);
        for ((key, mass), c) in pair.atoms().zip(&part) {
            let toks = [
                pair.token(0, key[0]).to_string(),
                pair.token(1, key[1]).to_string(),
                c.clone(),
            ];
            b.atom(&toks, mass.clone());
        }
        let with_part = b.build().unwrap();
        assert!(stmts.iter().all(|st| holds(st, &with_part)));

        // Shared fair bit with a constant third variable fails the cycle.
        let mut b = JointDistribution::builder(["A", "B", "C"]);
        b.atom_ints(&[0, 0, 7], rat(1, 2));
        b.atom_ints(&[1, 1, 7], rat(1, 2));
        let coupled = b.build().unwrap();
        assert!(!holds(&stmts[0], &coupled));
    }

    #[test]
    fn common_part_is_the_unique_coarsest_resolver() {
        // RESC(Y, Z, W): I(Y; Z | W) = 0 with W a function of both Y and Z.
        // Over the two-block pair, exactly the relabelings of the block id
        // qualify, among all maps from Y's four values to three tokens.
        let pair = two_block_pair();
        for code in 0..81u64 {
            let f: Vec<u64> = (0..4).map(|i| (code / 3u64.pow(i)) % 3).collect();
            let mut b = JointDistribution::builder(["Y", "Z", "W"]);
            for (key, mass) in pair.atoms() {
                let yv: u64 = pair.token(0, key[0]).parse().unwrap();
                let zv: u64 = pair.token(1, key[1]).parse().unwrap();
                b.atom_ints(&[yv, zv, f[yv as usize]], mass.clone());
            }
            let d = b.build().unwrap();
            let resc = d.check_ci_exact(&[0], &[1], &[2])
                && d.check_functional(&[2], &[0])
                && d.check_functional(&[2], &[1]);
            let is_block_id = f[0] == f[1] && f[2] == f[3] && f[0] != f[2];
            assert_eq!(resc, is_block_id, "map {f:?}");
        }
    }

    #[test]
    fn chained_cycles_accept_shared_parts_and_reject_distinct_ones() {
        let mut stmts = Vec::new();
        emit_eqres(&mut stmts, 0, 1, 2, 3, 4, 5);
        assert_eq!(stmts.len(), 12);

        // Y1, Z1 carry a fair bit X plus private noise; Y2, Z2 are X
        // itself; both common parts are X, so U1 = U2 = X satisfies all
        // twelve statements.
        let mut b = JointDistribution::builder(["Y1", "Z1", "Y2", "Z2", "U1", "U2"]);
        for x in 0..2u64 {
            for a in 0..2u64 {
                for c in 0..2u64 {
                    b.atom_ints(&[x * 2 + a, x * 2 + c, x, x, x, x], rat(1, 8));
                }
            }
        }
        let shared = b.build().unwrap();
        assert!(stmts.iter().all(|st| holds(st, &shared)));

        // Distinct common parts: (Y1, Z1) share bit X1, (Y2, Z2) share an
        // independent bit X2. No deterministic pair of auxiliaries with at
        // most two values satisfies the chain (the chain would force the
        // common parts to coincide, so no auxiliaries of any kind exist;
        // the scan is a bounded spot check of that impossibility).
        for u1_code in 0..16u64 {
            for u2_code in 0..16u64 {
                let u = |code: u64, x1: u64, x2: u64| (code >> (2 * x1 + x2)) & 1;
                let mut b =
                    JointDistribution::builder(["Y1", "Z1", "Y2", "Z2", "U1", "U2"]);
                for x1 in 0..2u64 {
                    for x2 in 0..2u64 {
                        b.atom_ints(
                            &[x1, x1, x2, x2, u(u1_code, x1, x2), u(u2_code, x1, x2)],
                            rat(1, 4),
                        );
                    }
                }
                let d = b.build().unwrap();
                assert!(
                    !stmts.iter().all(|st| holds(st, &d)),
                    "codes {u1_code}/{u2_code} slipped through"
                );
            }
        }
    }

    fn xor_instance() -> ImplicationInstance {
        ImplicationInstance {
            vars: ["X", "Y", "Z"]
                .into_iter()
                .map(|n| VariableSpec {
                    name: n.into(),
                    bound: Bound::finite(2),
                    kind: BoundKind::Explicit,
                })
                .collect(),
            antecedent: vec![
                CIStatement::ci(vec![0], vec![1], vec![]),
                CIStatement::ci(vec![0], vec![2], vec![]),
            ],
            consequent: CIStatement::ci(vec![0], vec![1, 2], vec![]),
        }
    }

    fn xor_distribution() -> JointDistribution {
        let mut b = JointDistribution::builder(["X", "Y", "Z"]);
        for x in 0..2u64 {
            for y in 0..2u64 {
                b.atom_ints(&[x, y, x ^ y], rat(1, 4));
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn rewrite_shape_and_audit() {
        let (out, mapping) = to_disjoint(&xor_instance());
        assert_eq!(out.vars.len(), 30);
        assert_eq!(out.antecedent.len(), 30 * 3 + 2);
        assert!(disjointness_violations(&out).is_empty());

        assert_eq!(out.vars[0].name, "X.y0");
        assert_eq!(out.vars[4].name, "Y.y1");
        assert_eq!(out.vars[9].name, "X.z0");
        assert_eq!(out.vars[18].name, "X.u00");
        assert_eq!(out.vars[24].name, "X.u10");
        assert_eq!(mapping.copies[0], [0, 3, 6, 9, 12, 15]);
        assert_eq!(mapping.aux[3], [24, 25]);
        assert_eq!(mapping.source_of(25), 0);
        assert_eq!(mapping.source_of(14), 2);

        // Consequent routes block one through copy zero, block two through
        // copy one, conditioning through copy two.
        assert_eq!(
            out.consequent,
            CIStatement::new(
                VarSet::explicit([0]),
                VarSet::explicit([4, 5]),
                VarSet::explicit([]),
            )
        );

        // Copies keep the source bound and kind, auxiliaries go implicit.
        for (i, spec) in out.vars.iter().enumerate() {
            assert_eq!(spec.bound, Bound::finite(2));
            let expected = if i < 18 { BoundKind::Explicit } else { BoundKind::Implicit };
            assert_eq!(spec.kind, expected, "var {i}");
        }

        let (tiny, _) = to_disjoint(&ImplicationInstance {
            vars: vec![VariableSpec {
                name: "A".into(),
                bound: Bound::Unbounded,
                kind: BoundKind::Explicit,
            }],
            antecedent: vec![],
            consequent: CIStatement::fd(vec![0], vec![]),
        });
        assert_eq!(tiny.vars.len(), 10);
        assert_eq!(tiny.antecedent.len(), 30);
        assert!(tiny.vars.iter().all(|v| v.bound == Bound::Unbounded));
    }

    #[test]
    fn diagonal_embedding_transports_the_xor_counterexample() {
        let inst = xor_instance();
        let dist = xor_distribution();
        assert!(evaluate_implication(&inst, &dist).unwrap().is_counterexample());

        let (out, mapping) = to_disjoint(&inst);
        let spread = diagonal_embed(&dist, &mapping).unwrap();
        let report = evaluate_implication(&out, &spread).unwrap();
        assert!(report.bound_violations.is_empty());
        assert!(report.is_counterexample());

        // Three independent bits satisfy the source implication, and their
        // embedding satisfies every rewritten statement.
        let mut b = JointDistribution::builder(["X", "Y", "Z"]);
        for v in 0..8u64 {
            b.atom_ints(&[v & 1, (v >> 1) & 1, v >> 2], rat(1, 8));
        }
        let indep = b.build().unwrap();
        let spread = diagonal_embed(&indep, &mapping).unwrap();
        let report = evaluate_implication(&out, &spread).unwrap();
        assert_eq!(report.outcome, ImplicationOutcome::Satisfied);

        let wrong = diagonal_embed(&two_block_pair(), &mapping);
        assert!(matches!(wrong, Err(CiError::BadArity { got: 2, want: 3 })));
    }

    #[test]
    fn audit_sees_overlapping_blocks() {
        let inst = ImplicationInstance {
            vars: (0..4)
                .map(|i| VariableSpec {
                    name: format!("V{i}"),
                    bound: Bound::finite(2),
                    kind: BoundKind::Explicit,
                })
                .collect(),
            antecedent: vec![
                CIStatement::fd(vec![0], vec![1]),
                CIStatement::ci(vec![0], vec![1], vec![2]),
                CIStatement::new(
                    VarSet::explicit([0]),
                    VarSet::all_but([0, 1]),
                    VarSet::explicit([1]),
                ),
                CIStatement::new(
                    VarSet::all_but([0, 1]),
                    VarSet::all_but([2, 3]),
                    VarSet::explicit([]),
                ),
            ],
            consequent: CIStatement::new(
                VarSet::explicit([2]),
                VarSet::all_but([2]),
                VarSet::explicit([]),
            ),
        };
        // fd overlaps; the complement pair covers {0..3} so it is disjoint.
        assert_eq!(disjointness_violations(&inst), vec![0]);

        let overlapping = CIStatement::new(
            VarSet::all_but([0]),
            VarSet::all_but([3]),
            VarSet::explicit([]),
        );
        assert!(!statement_blocks_disjoint(&overlapping, 4));
    }
}
