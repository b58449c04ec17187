//! Whole-compiler checks: polynomial statement counts, a mechanical audit
//! of every variable's bound against its witness plan, and bit-exact text
//! round-trips of finalized masters.

use ciwb_ci::format::{parse_instance, serialize_instance};
use ciwb_ci::{Bound, BoundKind};
use ciwb_predicates::{finalize_implication, DefPlan, SizeExpr};
use ciwb_tiling::TileSystem;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

fn all_adjacent(l: usize) -> TileSystem {
    let tokens: Vec<String> = (0..l).map(|i| format!("t{i}")).collect();
    let mut sys = TileSystem::new(tokens).unwrap();
    for a in 0..l as u32 {
        for b in 0..l as u32 {
            sys.add_h(a, b).unwrap();
            sys.add_v(a, b).unwrap();
        }
    }
    sys
}

fn checkerboard() -> TileSystem {
    let mut sys = TileSystem::new(vec!["a".to_string(), "b".to_string()]).unwrap();
    sys.add_h(0, 1).unwrap();
    sys.add_h(1, 0).unwrap();
    sys.add_v(0, 1).unwrap();
    sys.add_v(1, 0).unwrap();
    sys
}

// The dominant statement family is the face-quad block: a system with l
// tiles has at most 3 * l^4 quads, each contributing two 2647-statement
// gadgets, so counts approach 6 * 2647 * ((k - 1) / 4)^4, about 62 * k^4,
// from below. Small systems are overhead-heavy instead (the switch block
// grows linearly in k, the edge-pair block quadratically); the worst
// observed ratio is count / k^4 of roughly 72 at l = 1. c = 100 covers
// both regimes with slack.
const POLY_C: usize = 100;

fn poly_budget(l: usize, m: u64, n: u64) -> usize {
    let k = 4 * l + 1;
    let log_mn = (64 - (m * n).leading_zeros()) as usize;
    POLY_C * (l.pow(4) + k.pow(4) + log_mn)
}

#[test]
fn statement_counts_fit_the_polynomial_budget() {
    let cases: Vec<(TileSystem, u64, u64)> = vec![
        (all_adjacent(1), 2, 2),
        (all_adjacent(1), 64, 64),
        (checkerboard(), 2, 2),
        (all_adjacent(2), 2, 2),
        (all_adjacent(3), 2, 2),
    ];
    for (sys, m, n) in cases {
        let l = sys.n_tiles() as usize;
        let ti = finalize_implication(&sys, m, n, 0).unwrap();
        let count = ti.instance.antecedent.len() + 1;
        let budget = poly_budget(l, m, n);
        assert!(
            count <= budget,
            "l={l} m={m} n={n}: {count} statements exceed {budget}"
        );
    }
}

#[test]
fn statement_count_is_independent_of_the_grid_bounds() {
    let small = finalize_implication(&all_adjacent(1), 2, 2, 0).unwrap();
    let large = finalize_implication(&all_adjacent(1), 64, 64, 0).unwrap();
    assert_eq!(
        small.instance.antecedent.len(),
        large.instance.antecedent.len()
    );
}

fn eval_size(e: &SizeExpr, bounds: &[BigUint]) -> BigUint {
    match e {
        SizeExpr::Const(c) => c.clone(),
        SizeExpr::Card(vs) => vs.iter().map(|&v| bounds[v].clone()).product(),
        SizeExpr::Prod(es) => es.iter().map(|x| eval_size(x, bounds)).product(),
        SizeExpr::Pow(b, p) => eval_size(b, bounds).pow(*p as u32),
        SizeExpr::Div(a, b) => {
            let (q, r) = eval_size(a, bounds).div_rem(&eval_size(b, bounds));
            assert!(r.is_zero(), "inexact size quotient");
            q
        }
    }
}

#[test]
fn every_variable_is_bounded_and_matches_its_plan() {
    let ti = finalize_implication(&all_adjacent(1), 2, 2, 0).unwrap();
    let bounds: Vec<BigUint> = ti
        .instance
        .vars
        .iter()
        .map(|v| match &v.bound {
            Bound::Finite(b) => b.clone(),
            Bound::Unbounded => panic!("unbounded variable {}", v.name),
        })
        .collect();

    let mut customs = 0usize;
    for (i, (spec, plan)) in ti.instance.vars.iter().zip(&ti.plans).enumerate() {
        if matches!(plan, DefPlan::Given) {
            continue;
        }
        assert_eq!(spec.kind, BoundKind::Implicit, "{}", spec.name);
        match plan {
            DefPlan::Given => unreachable!(),
            // A quotient size only materializes at witness time (it divides
            // actual supports, not declared bounds), so such variables carry
            // the numerator's bound instead of the quotient.
            DefPlan::FreshUniform(SizeExpr::Div(a, _)) => {
                assert_eq!(bounds[i], eval_size(a, &bounds), "{}", spec.name);
            }
            DefPlan::FreshUniform(size) => {
                assert_eq!(bounds[i], eval_size(size, &bounds), "{}", spec.name);
            }
            DefPlan::OneTimePad { modulus, .. } => {
                assert_eq!(bounds[i], eval_size(modulus, &bounds), "{}", spec.name);
            }
            // A tuple whose components carry loose bounds may itself be
            // declared tighter (the sqrt gadget's reassembled product), so
            // only dominance is required here.
            DefPlan::TupleOf(xs) => {
                let product: BigUint = xs.iter().map(|&x| bounds[x].clone()).product();
                assert!(bounds[i] <= product, "{}", spec.name);
            }
            DefPlan::CopyOf(x) => assert_eq!(bounds[i], bounds[*x], "{}", spec.name),
            DefPlan::BitOf { .. } => {
                assert_eq!(bounds[i], BigUint::from(2u32), "{}", spec.name);
            }
            DefPlan::Custom(c) => {
                customs += 1;
                let want: u32 = match c.role.as_str() {
                    "cycs.u" | "sw.g" | "sat_ne2.u" => 2,
                    "flip.z1" | "flip.z2" | "sat_le2.u" => 3,
                    "flip.u" => 4,
                    "sat_le34.u" => 105,
                    role => panic!("unexpected custom role {role}"),
                };
                assert_eq!(bounds[i], BigUint::from(want), "{}", spec.name);
            }
        }
    }
    assert!(customs > 0);
}

#[test]
fn finalized_masters_round_trip_through_text() {
    let ti = finalize_implication(&all_adjacent(1), 2, 2, 0).unwrap();
    let text = serialize_instance(&ti.instance);
    let back = parse_instance(&text).unwrap();
    assert_eq!(back, ti.instance);
    assert_eq!(serialize_instance(&back), text);
}
