//! Turning a master build into a checkable implication.
//!
//! The consequent singles out one designated tile: H(F | V_S, Vbar_Sbar,
//! W^k) = 0 where (S, Sbar) encode the tile's group 0 label with positive
//! sign. That conditional entropy equals the probability of the label, so
//! counterexample distributions are exactly the labeled tori whose tiling
//! uses the designated tile.

use crate::build::{DefPlan, PredicateBuild, VarId};
use crate::error::PredicateError;
use crate::labels::encode_t;
use crate::ttori::{ttori_prime, TtoriRoles};
use ciwb_ci::{CIStatement, ImplicationInstance};
use ciwb_tiling::TileSystem;
use std::collections::BTreeSet;

/// A compiled implication plus everything needed to realize, split, and
/// audit it: per-variable witness plans, per-statement provenance, head
/// variable roles, and the designated tile's index sets.
#[derive(Debug, Clone)]
pub struct TilingImplication {
    pub instance: ImplicationInstance,
    pub plans: Vec<DefPlan>,
    pub paths: Vec<String>,
    pub tags: Vec<u32>,
    pub roles: TtoriRoles,
    pub designated_tile: usize,
    pub s: BTreeSet<usize>,
    pub sbar: BTreeSet<usize>,
    pub fresh: u64,
}

impl TilingImplication {
    /// Provenance path of antecedent statement `i`.
    pub fn path_of(&self, i: usize) -> &str {
        &self.paths[self.tags[i] as usize]
    }
}

/// Consequent statement for a designated tile under the given label layout.
fn consequent_for(roles: &TtoriRoles, tile: usize) -> (CIStatement, BTreeSet<usize>, BTreeSet<usize>) {
    let k = roles.scheme.k;
    let w_string = encode_t(k, roles.scheme.value(tile, 0), false);
    let s: BTreeSet<usize> = (1..=k).filter(|&i| w_string[i - 1] == 1).collect();
    let sbar: BTreeSet<usize> = (1..=k).filter(|&i| w_string[i - 1] == 0).collect();
    let mut given: Vec<VarId> = s.iter().map(|&i| roles.v[i - 1]).collect();
    given.extend(sbar.iter().map(|&i| roles.vbar[i - 1]));
    given.extend(&roles.w);
    (CIStatement::fd(vec![roles.f], given), s, sbar)
}

/// Compile the master implication for `sys` at size bounds (m, n) with the
/// given designated tile.
pub fn finalize_implication(
    sys: &TileSystem,
    m: u64,
    n: u64,
    tile: usize,
) -> Result<TilingImplication, PredicateError> {
    if tile >= sys.n_tiles() as usize {
        return Err(PredicateError::UnknownTile {
            tile,
            n_tiles: sys.n_tiles() as usize,
        });
    }
    let (b, roles) = ttori_prime(sys, m, n)?;
    finalize_build(b, roles, tile)
}

/// Attach the designated-tile consequent to an already emitted master build.
pub fn finalize_build(
    b: PredicateBuild,
    roles: TtoriRoles,
    tile: usize,
) -> Result<TilingImplication, PredicateError> {
    let (consequent, s, sbar) = consequent_for(&roles, tile);
    let (instance, plans, paths, tags, fresh) = b.into_parts(consequent);
    Ok(TilingImplication {
        instance,
        plans,
        paths,
        tags,
        roles,
        designated_tile: tile,
        s,
        sbar,
        fresh,
    })
}
