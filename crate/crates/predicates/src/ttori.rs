//! Master instance assembly: the full torus predicate for a tile system.
//!
//! The build lays out head variables (X^2, Y^2, Z, W^k, V^k, Vbar^k, F over
//! the anchor B), then emits the torus skeleton, the labeling, the edge
//! orientation gadgets, and the face content gadgets. Satisfying
//! distributions correspond exactly to pairs of labeled tori of size at
//! most 2m x 2n that project to periodic tilings of size at most m x n.

use crate::build::{PredicateBuild, VarId};
use crate::emit::SatKind;
use crate::error::PredicateError;
use crate::labels::{face_sets, j1_pairs, j2_pairs, LabelScheme};
use ciwb_ci::BoundKind;
use ciwb_tiling::TileSystem;
use num_bigint::BigUint;
use std::collections::BTreeSet;

/// Where each head variable of the master instance lives.
#[derive(Debug, Clone)]
pub struct TtoriRoles {
    pub x1: VarId,
    pub x2: VarId,
    pub y1: VarId,
    pub y2: VarId,
    pub z: VarId,
    pub w: Vec<VarId>,
    pub v: Vec<VarId>,
    pub vbar: Vec<VarId>,
    pub f: VarId,
    pub scheme: LabelScheme,
}

fn complement(k: usize, keep: &BTreeSet<usize>) -> BTreeSet<usize> {
    (1..=k).filter(|i| !keep.contains(i)).collect()
}

fn singleton(i: usize) -> BTreeSet<usize> {
    [i].into_iter().collect()
}

/// Emit the full master conjunction for `sys` with torus size bounds m, n.
/// The caller picks the consequent afterwards (see `finalize_implication`).
pub fn ttori_prime(
    sys: &TileSystem,
    m: u64,
    n: u64,
) -> Result<(PredicateBuild, TtoriRoles), PredicateError> {
    if sys.n_tiles() == 0 {
        return Err(PredicateError::EmptyTuple("tile system"));
    }
    if m == 0 || n == 0 {
        return Err(PredicateError::KTooSmall { k: 0, min: 1 });
    }
    let scheme = LabelScheme::new(sys.n_tiles() as usize);
    let k = scheme.k;

    let mut b = PredicateBuild::new();
    let x1 = b.add_given("X1", BigUint::from(m), BoundKind::Explicit);
    let x2 = b.add_given("X2", BigUint::from(m), BoundKind::Explicit);
    let y1 = b.add_given("Y1", BigUint::from(n), BoundKind::Explicit);
    let y2 = b.add_given("Y2", BigUint::from(n), BoundKind::Explicit);
    let two = BigUint::from(2u32);
    let z = b.add_given("Z", two.clone(), BoundKind::Implicit);
    let w: Vec<VarId> = (1..=k)
        .map(|i| b.add_given(&format!("W{i}"), two.clone(), BoundKind::Implicit))
        .collect();
    let v: Vec<VarId> = (1..=k)
        .map(|i| b.add_given(&format!("V{i}"), two.clone(), BoundKind::Implicit))
        .collect();
    let vbar: Vec<VarId> = (1..=k)
        .map(|i| b.add_given(&format!("Vb{i}"), two.clone(), BoundKind::Implicit))
        .collect();
    let f = b.add_given("F", two, BoundKind::Implicit);

    // The anchor's own uniformity opens the antecedent; F is pinned to it
    // so a nontrivial F forces a nontrivial B.
    let anchor = b.anchor();
    b.emit_unif(&[anchor]);
    b.alias_unif2_to_anchor(&[f]);

    b.emit_tori_prime(x1, x2, y1, y2, z)?;
    let heads = [x1, x2, y1, y2, z];
    b.emit_cold(&heads, &w, &v, &vbar, f)?;

    let k_only = singleton(k);
    let empty = BTreeSet::new();
    let e_vert = [[x1, x2, y1, z], [x1, x2, y2, z]];
    let e_horiz = [[x1, y1, y2, z], [x2, y1, y2, z]];

    // Edge sign coherence: every edge pair agrees on w_k.
    for e in e_vert.iter().chain(e_horiz.iter()) {
        b.emit_sat_gadget(SatKind::NeHalf, e, &k_only, &empty, &v, &vbar, f)?;
    }

    // Vertical edges: only group combinations {0,1} and {2,3} survive.
    for (j1, j2) in j1_pairs(k) {
        let comp = complement(k, &[j1, j2].into_iter().collect());
        for e in &e_vert {
            b.emit_sat_gadget(SatKind::LeHalf, e, &empty, &comp, &v, &vbar, f)?;
        }
        for e in &e_vert {
            b.emit_sat_gadget(SatKind::LeHalf, e, &comp, &empty, &v, &vbar, f)?;
        }
    }

    // Horizontal edges: only {1,2} and {0,3}.
    for (j1, j2) in j2_pairs(k) {
        let comp = complement(k, &[j1, j2].into_iter().collect());
        for e in &e_horiz {
            b.emit_sat_gadget(SatKind::LeHalf, e, &empty, &comp, &v, &vbar, f)?;
        }
        for e in &e_horiz {
            b.emit_sat_gadget(SatKind::LeHalf, e, &comp, &empty, &v, &vbar, f)?;
        }
    }

    // Corresponding vertices across the two tori carry opposite signs.
    let e_pair = [x1, x2, y1, y2];
    b.emit_sat_gadget(SatKind::LeHalf, &e_pair, &k_only, &empty, &v, &vbar, f)?;
    b.emit_sat_gadget(SatKind::LeHalf, &e_pair, &empty, &k_only, &v, &vbar, f)?;

    // Face content: forbid every distinct-residue quadruple the system does
    // not realize, in both signs.
    let fs = face_sets(sys);
    let faces = [
        (&fs.i11, [x1, y1, z]),
        (&fs.i12, [x1, y2, z]),
        (&fs.i21, [x2, y1, z]),
    ];
    for (quads, e) in faces {
        for quad in quads {
            let comp = complement(k, quad);
            b.emit_sat_gadget(SatKind::LeThreeQuarters, &e, &empty, &comp, &v, &vbar, f)?;
            b.emit_sat_gadget(SatKind::LeThreeQuarters, &e, &comp, &empty, &v, &vbar, f)?;
        }
    }

    let roles = TtoriRoles {
        x1,
        x2,
        y1,
        y2,
        z,
        w,
        v,
        vbar,
        f,
        scheme,
    };
    Ok((b, roles))
}
