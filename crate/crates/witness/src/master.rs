//! Torus-shaped counterexamples for compiled tiling implications.
//!
//! A periodic tiling that uses the designated tile induces a distribution
//! over labeled doubled-torus vertices: pick a uniform vertex (p, q) of the
//! 2a x 2b torus, a uniform sign bit z, and an (F, G) pair independent of
//! everything with P(0,0) = P(0,1) = 1/4 and P(1,0) = 1/2. Head variables
//! read off the vertex: the cycle coordinates are the two cell indices
//! adjacent to p (resp. q), the label bits come from the tiling, and the
//! flip side applies F through the label. Every antecedent of the compiled
//! implication holds on this distribution while the designated-tile
//! consequent fails, so verification yields an exact counterexample.

use num_bigint::BigInt;
use num_rational::BigRational;

use ciwb_ci::JointDistribution;
use ciwb_predicates::build::{CustomSpec, DefPlan};
use ciwb_predicates::emit::SatKind;
use ciwb_predicates::finalize::{finalize_implication, TilingImplication};
use ciwb_tiling::system::{validate_tiling, TileSystem, TilingGrid};

use crate::error::WitnessError;
use crate::labeling::TorusLabeling;
use crate::realize::{atom_table, flip_u_def, flip_z_def, realize_onto, sat_u_def};
use crate::structured::{Def, StructuredDistribution};
use crate::verify::{verify_instance, VerificationReport};

/// A compiled implication together with a fully verified counterexample.
#[derive(Debug)]
pub struct WitnessBundle {
    pub implication: TilingImplication,
    pub labeling: TorusLabeling,
    pub structured: StructuredDistribution,
    /// Marginal of the head variables, as an explicit table.
    pub heads: JointDistribution,
    pub report: VerificationReport,
}

impl WitnessBundle {
    /// Every antecedent holds, the consequent fails, and all supports stay
    /// within the declared bounds.
    pub fn is_valid(&self) -> bool {
        self.report.is_counterexample()
    }
}

/// Smallest admissible torus side over a grid side: a multiple of the grid
/// side, at least 2 (a single-cell ring has no proper two-coloring), and
/// within the instance bound.
pub fn fit_side(grid_side: usize, max: u64) -> Result<usize, WitnessError> {
    let side = if grid_side == 1 { 2 } else { grid_side };
    if side as u64 <= max {
        Ok(side)
    } else {
        Err(WitnessError::TorusTooSmall { max })
    }
}

/// Compiles the implication for (sys, m, n, tile) and realizes the torus
/// counterexample induced by `grid`, a valid periodic tiling using `tile`.
pub fn tiling_to_counterexample(
    sys: &TileSystem,
    grid: &TilingGrid,
    tile: usize,
    m: u64,
    n: u64,
) -> Result<WitnessBundle, WitnessError> {
    if !validate_tiling(sys, grid, true) {
        return Err(WitnessError::InvalidTiling);
    }
    let used = (0..grid.height())
        .any(|j| (0..grid.width()).any(|i| grid.get(i, j) as usize == tile));
    if !used {
        return Err(WitnessError::TileUnused(tile));
    }
    let a = fit_side(grid.width(), m)?;
    let b = fit_side(grid.height(), n)?;
    let ti = finalize_implication(sys, m, n, tile)?;
    let labeling = TorusLabeling::new(grid, ti.roles.scheme.clone(), a, b)?;
    bundle_for(ti, labeling)
}

/// Realizes and verifies the torus witness for an already compiled
/// implication.
pub fn bundle_for(
    ti: TilingImplication,
    labeling: TorusLabeling,
) -> Result<WitnessBundle, WitnessError> {
    let structured = torus_witness(&ti, &labeling)?;
    let report = verify_instance(&structured, &ti.instance)?;
    let heads = head_marginal(&structured, &ti)?;
    Ok(WitnessBundle {
        implication: ti,
        labeling,
        structured,
        heads,
        report,
    })
}

/// Explicit marginal over the instance's given variables.
pub fn head_marginal(
    dist: &StructuredDistribution,
    ti: &TilingImplication,
) -> Result<JointDistribution, WitnessError> {
    let ids: Vec<usize> = ti
        .plans
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p, DefPlan::Given))
        .map(|(i, _)| dist.internal_of(i))
        .collect();
    let names: Vec<&str> = ti
        .plans
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p, DefPlan::Given))
        .map(|(i, _)| ti.instance.vars[i].name.as_str())
        .collect();
    dist.to_explicit(&ids, &names)
}

/// The torus witness distribution for a compiled implication: backbone
/// atoms are (p, q, z, (F, G)) tuples, head variables are backbone
/// functions, and custom auxiliaries are synthesized per role.
pub fn torus_witness(
    ti: &TilingImplication,
    labeling: &TorusLabeling,
) -> Result<StructuredDistribution, WitnessError> {
    let (a, b) = (labeling.a, labeling.b);
    let k = labeling.k();
    let n_atoms = 24 * a * b;

    // Atom layout: (((p - 1) * 2b + (q - 1)) * 2 + z) * 3 + fg, where fg
    // indexes the (F, G) patterns (0,0), (0,1), (1,0) with weights
    // 1/4, 1/4, 1/2. Total mass per vertex copy is 1 / (8ab).
    let fg_num = [1u64, 1, 2];
    let den = BigInt::from(32 * a as u64 * b as u64);
    let mut atom_mass = Vec::with_capacity(n_atoms);
    for _ in 0..8 * a * b {
        for num in fg_num {
            atom_mass.push(BigRational::new(BigInt::from(num), den.clone()));
        }
    }

    let mut x1t = vec![0u64; n_atoms];
    let mut x2t = vec![0u64; n_atoms];
    let mut y1t = vec![0u64; n_atoms];
    let mut y2t = vec![0u64; n_atoms];
    let mut zt = vec![0u64; n_atoms];
    let mut ft = vec![0u64; n_atoms];
    let mut gt = vec![0u64; n_atoms];
    let mut wt = vec![vec![0u64; n_atoms]; k];
    let mut vt = vec![vec![0u64; n_atoms]; k];
    let mut vbt = vec![vec![0u64; n_atoms]; k];

    let mut idx = 0;
    for p0 in 0..2 * a {
        let p = p0 + 1;
        for q0 in 0..2 * b {
            let q = q0 + 1;
            for z in 0..2 {
                let bits = labeling.label_bits(p, q, z);
                for fg in 0..3 {
                    let f = (fg == 2) as u64;
                    // The two cells sharing vertex column p are
                    // ceil(p/2) - 1 and floor(p/2), taken cyclically.
                    x1t[idx] = (((p + 1) / 2) % a) as u64;
                    x2t[idx] = ((p / 2) % a) as u64;
                    y1t[idx] = (((q + 1) / 2) % b) as u64;
                    y2t[idx] = ((q / 2) % b) as u64;
                    zt[idx] = z as u64;
                    ft[idx] = f;
                    gt[idx] = (fg == 1) as u64;
                    for i in 0..k {
                        let w = bits[i] as u64;
                        wt[i][idx] = w;
                        vt[i][idx] = (1 - w) * f;
                        vbt[i][idx] = w * f;
                    }
                    idx += 1;
                }
            }
        }
    }

    let mut dist = StructuredDistribution::new(atom_mass)?;
    let b_leaf = dist.add_leaf(2u8.into())?;

    let roles = &ti.roles;
    let mut tables: Vec<(usize, Vec<u64>)> = vec![
        (roles.x1, x1t),
        (roles.x2, x2t),
        (roles.y1, y1t),
        (roles.y2, y2t),
        (roles.z, zt),
        (roles.f, ft),
    ];
    for i in 0..k {
        tables.push((roles.w[i], std::mem::take(&mut wt[i])));
        tables.push((roles.v[i], std::mem::take(&mut vt[i])));
        tables.push((roles.vbar[i], std::mem::take(&mut vbt[i])));
    }
    let mut by_id: std::collections::HashMap<usize, Vec<u64>> = tables.into_iter().collect();

    let mut given = |id: usize, spec: &ciwb_ci::statement::VariableSpec| match by_id.remove(&id) {
        Some(t) => Ok(Def::Atom(t)),
        None if spec.name == "B" => Ok(Def::Leaf(b_leaf)),
        None => Err(WitnessError::InvalidDef {
            var: spec.name.clone(),
            reason: "given head with no role in the torus layout".to_string(),
        }),
    };

    let sat_kinds = [SatKind::NeHalf, SatKind::LeHalf, SatKind::LeThreeQuarters];
    let mut custom = |_id: usize,
                      spec: &CustomSpec,
                      dist: &mut StructuredDistribution|
     -> Result<Def, WitnessError> {
        let args: Vec<usize> = spec.args.iter().map(|&v| dist.internal_of(v)).collect();
        match spec.role.as_str() {
            "cycs.u" => {
                let t1 = atom_table(dist, args[0])?;
                let t2 = atom_table(dist, args[1])?;
                let table = t1.iter().zip(t2).map(|(&x, &y)| (x != y) as u64).collect();
                Ok(Def::Atom(table))
            }
            "flip.u" => flip_u_def(dist, args[0], args[1], args[2]),
            "flip.z1" => flip_z_def(dist, args[0], args[1], args[2], false),
            "flip.z2" => flip_z_def(dist, args[0], args[1], args[2], true),
            "sw.g" => Ok(Def::Atom(gt.clone())),
            role => {
                let kind = sat_kinds
                    .iter()
                    .find(|kd| format!("{}.u", kd.label()) == role)
                    .ok_or_else(|| WitnessError::UnknownRole(role.to_string()))?;
                let mut observed = args;
                observed.extend(spec.s.iter().map(|&i| dist.internal_of(roles.v[i - 1])));
                observed.extend(spec.sbar.iter().map(|&i| dist.internal_of(roles.vbar[i - 1])));
                sat_u_def(dist, kind.kappa(), &observed, dist.internal_of(roles.f))
            }
        }
    };

    realize_onto(
        &mut dist,
        &ti.instance.vars,
        &ti.plans,
        0,
        &mut given,
        &mut custom,
    )?;
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Method;

    fn one_tile() -> TileSystem {
        let mut sys = TileSystem::new(vec!["a"]).unwrap();
        sys.add_h(0, 0).unwrap();
        sys.add_v(0, 0).unwrap();
        sys
    }

    fn one_cell_grid() -> TilingGrid {
        let mut g = TilingGrid::new_filled(1, 1, 0);
        g.periodic = true;
        g
    }

    #[test]
    fn fit_side_picks_smallest_admissible_multiple() {
        assert_eq!(fit_side(1, 2).unwrap(), 2);
        assert_eq!(fit_side(1, 12).unwrap(), 2);
        assert_eq!(fit_side(3, 12).unwrap(), 3);
        assert!(fit_side(3, 2).is_err());
        assert!(fit_side(1, 1).is_err());
    }

    #[test]
    fn one_tile_torus_is_an_exact_counterexample() {
        let sys = one_tile();
        let bundle = tiling_to_counterexample(&sys, &one_cell_grid(), 0, 2, 2).unwrap();
        assert!(bundle.is_valid());
        assert!(bundle.report.antecedent_holds());
        assert!(!bundle.report.consequent.holds);
        assert!(bundle.report.bound_violations.is_empty());
        assert_eq!(bundle.labeling.a, 2);
        assert_eq!(bundle.labeling.b, 2);
        // The head marginal is a genuine distribution over 22 columns.
        assert_eq!(bundle.heads.n_vars(), 22);
    }

    #[test]
    fn verification_uses_every_method_family() {
        let sys = one_tile();
        let bundle = tiling_to_counterexample(&sys, &one_cell_grid(), 0, 2, 2).unwrap();
        let counts = bundle.report.method_counts();
        let seen: Vec<Method> = counts.iter().map(|(m, _)| *m).collect();
        assert!(seen.contains(&Method::Closure));
        assert!(seen.contains(&Method::Enumerated));
    }

    #[test]
    fn unused_tile_is_rejected() {
        let sys = one_tile();
        let err = tiling_to_counterexample(&sys, &one_cell_grid(), 1, 2, 2).unwrap_err();
        // Tile 1 does not exist; tile validation happens after use checking.
        assert!(matches!(err, WitnessError::TileUnused(1)));
    }

    #[test]
    fn invalid_tiling_is_rejected() {
        let mut sys = TileSystem::new(vec!["a", "b"]).unwrap();
        for (x, y) in [(0, 1), (1, 0)] {
            sys.add_h(x, y).unwrap();
            sys.add_v(x, y).unwrap();
        }
        // A constant grid breaks the checkerboard adjacency rules.
        let mut g = TilingGrid::new_filled(2, 2, 0);
        g.periodic = true;
        let err = tiling_to_counterexample(&sys, &g, 0, 2, 2).unwrap_err();
        assert!(matches!(err, WitnessError::InvalidTiling));
    }

    #[test]
    fn decoded_grid_matches_the_tiling() {
        let sys = one_tile();
        let bundle = tiling_to_counterexample(&sys, &one_cell_grid(), 0, 2, 2).unwrap();
        let decoded = bundle.labeling.decode_grid().unwrap();
        assert_eq!(decoded.width(), 2);
        assert_eq!(decoded.height(), 2);
        for j in 0..2 {
            for i in 0..2 {
                assert_eq!(decoded.get(i, j), 0);
            }
        }
    }
}
