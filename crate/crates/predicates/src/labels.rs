//! Tile labels, near-constant bit strings, and face index sets.
//!
//! A system with l tiles is labeled over k = 4l + 1 bit positions. Each tile
//! t in 0..l owns four label values 4t+1 .. 4t+4 (one per group 0..3), and a
//! label is signed: value j with positive sign is the bit string with a lone
//! one at position j, negative sign the string with a lone zero at position
//! j, the sign itself carried by the last bit w_k. Those strings are exactly
//! the set T_k of strings where precisely one bit differs from the last one.

use ciwb_tiling::TileSystem;
use std::collections::BTreeSet;

/// All 2(k-1) members of T_k: negatives -1..-(k-1) first, then positives.
pub fn t_k(k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(2 * (k - 1));
    for j in 1..k {
        out.push(encode_t(k, j, true));
    }
    for j in 1..k {
        out.push(encode_t(k, j, false));
    }
    out
}

/// Bit string of the label with the given value in 1..k-1 and sign.
pub fn encode_t(k: usize, value: usize, negative: bool) -> Vec<u8> {
    assert!((1..k).contains(&value), "label value out of range");
    let base = if negative { 1 } else { 0 };
    let mut w = vec![base; k];
    w[value - 1] = 1 - base;
    w
}

/// Inverse of `encode_t`; None when the string is not in T_k.
pub fn decode_t(w: &[u8]) -> Option<(usize, bool)> {
    let k = w.len();
    let last = w[k - 1];
    let mut flipped = None;
    for (i, &b) in w[..k - 1].iter().enumerate() {
        if b != last {
            if flipped.is_some() {
                return None;
            }
            flipped = Some(i + 1);
        }
    }
    flipped.map(|j| (j, last == 1))
}

/// Indicator sat(w, S, Sbar): every S position is 1 and every Sbar position 0.
/// Positions are 1-based; the sets may not overlap.
pub fn sat_indicator(w: &[u8], s: &BTreeSet<usize>, sbar: &BTreeSet<usize>) -> bool {
    s.iter().all(|&i| w[i - 1] == 1) && sbar.iter().all(|&i| w[i - 1] == 0)
}

/// Label bookkeeping for a system with `l` tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelScheme {
    pub l: usize,
    pub k: usize,
}

impl LabelScheme {
    pub fn new(n_tiles: usize) -> LabelScheme {
        LabelScheme {
            l: n_tiles,
            k: 4 * n_tiles + 1,
        }
    }

    /// Label value of tile `t` in group `g` (g in 0..4): 4t + g + 1.
    pub fn value(&self, tile: usize, group: usize) -> usize {
        debug_assert!(tile < self.l && group < 4);
        4 * tile + group + 1
    }

    pub fn tile_of(&self, value: usize) -> usize {
        (value - 1) / 4
    }

    pub fn group_of(&self, value: usize) -> usize {
        (value - 1) % 4
    }
}

fn residue_pair(j1: usize, j2: usize) -> BTreeSet<usize> {
    [j1 % 4, j2 % 4].into_iter().collect()
}

fn pairs_avoiding(k: usize, allowed: [[usize; 2]; 2]) -> Vec<(usize, usize)> {
    let allowed: Vec<BTreeSet<usize>> = allowed
        .iter()
        .map(|p| p.iter().copied().collect())
        .collect();
    let mut out = Vec::new();
    for j1 in 1..k {
        for j2 in j1..k {
            if !allowed.contains(&residue_pair(j1, j2)) {
                out.push((j1, j2));
            }
        }
    }
    out
}

/// Value pairs whose residues are not a legal vertical-edge combination
/// ({0,1} or {2,3} on label values). Includes the diagonal pairs (j, j).
pub fn j1_pairs(k: usize) -> Vec<(usize, usize)> {
    pairs_avoiding(k, [[0, 1], [2, 3]])
}

/// Value pairs whose residues are not a legal horizontal-edge combination
/// ({1,2} or {0,3} on label values).
pub fn j2_pairs(k: usize) -> Vec<(usize, usize)> {
    pairs_avoiding(k, [[1, 2], [0, 3]])
}

/// The four label values around a horizontal-glue face between left tile u
/// and right tile v: groups 1 and 2 from u, groups 0 and 3 from v.
pub fn face_quad(u: usize, v: usize) -> BTreeSet<usize> {
    [4 * u + 2, 4 * u + 3, 4 * v + 1, 4 * v + 4]
        .into_iter()
        .collect()
}

/// The four label values around a vertical-glue face between upper tile u
/// and lower tile v: groups 2 and 3 from u, groups 0 and 1 from v.
pub fn vface_quad(u: usize, v: usize) -> BTreeSet<usize> {
    [4 * u + 3, 4 * u + 4, 4 * v + 1, 4 * v + 2]
        .into_iter()
        .collect()
}

/// Per-face-type quadruple sets: D holds the quadruples realized by legal
/// faces, I the distinct-residue quadruples that no legal face realizes.
#[derive(Debug, Clone)]
pub struct FaceSets {
    pub d11: BTreeSet<BTreeSet<usize>>,
    pub d12: BTreeSet<BTreeSet<usize>>,
    pub d21: BTreeSet<BTreeSet<usize>>,
    pub i11: Vec<BTreeSet<usize>>,
    pub i12: Vec<BTreeSet<usize>>,
    pub i21: Vec<BTreeSet<usize>>,
}

/// Every 4-subset of {1..k-1} with pairwise distinct residues mod 4, in
/// lexicographic tile order (one value per group).
fn distinct_residue_quads(l: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::with_capacity(l.pow(4));
    for t0 in 0..l {
        for t1 in 0..l {
            for t2 in 0..l {
                for t3 in 0..l {
                    out.push(
                        [4 * t0 + 1, 4 * t1 + 2, 4 * t2 + 3, 4 * t3 + 4]
                            .into_iter()
                            .collect(),
                    );
                }
            }
        }
    }
    out
}

pub fn face_sets(sys: &TileSystem) -> FaceSets {
    let l = sys.n_tiles() as usize;
    let d11: BTreeSet<_> = (0..l).map(|t| face_quad(t, t)).collect();
    let d12: BTreeSet<_> = sys
        .v_pairs()
        .map(|(u, v)| vface_quad(u as usize, v as usize))
        .collect();
    let d21: BTreeSet<_> = sys
        .h_pairs()
        .map(|(u, v)| face_quad(u as usize, v as usize))
        .collect();
    let all = distinct_residue_quads(l);
    let keep = |d: &BTreeSet<BTreeSet<usize>>| -> Vec<BTreeSet<usize>> {
        all.iter().filter(|q| !d.contains(*q)).cloned().collect()
    };
    FaceSets {
        i11: keep(&d11),
        i12: keep(&d12),
        i21: keep(&d21),
        d11,
        d12,
        d21,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn t4_matches_known_listing() {
        let want: Vec<Vec<u8>> = ["0111", "1011", "1101", "1000", "0100", "0010"]
            .iter()
            .map(|s| bits(s))
            .collect();
        assert_eq!(t_k(4), want);
    }

    #[test]
    fn encode_decode_round_trip() {
        for k in 2..=13 {
            for w in t_k(k) {
                let (value, negative) = decode_t(&w).unwrap();
                assert_eq!(encode_t(k, value, negative), w);
            }
            assert_eq!(t_k(k).len(), 2 * (k - 1));
        }
    }

    #[test]
    fn decode_rejects_non_members() {
        assert_eq!(decode_t(&bits("0000")), None);
        assert_eq!(decode_t(&bits("1111")), None);
        assert_eq!(decode_t(&bits("1100")), None);
        assert_eq!(decode_t(&bits("0110")), None);
    }

    #[test]
    fn sat_indicator_picks_patterns() {
        let w = bits("1000");
        let s: BTreeSet<usize> = [1].into_iter().collect();
        let sbar: BTreeSet<usize> = [2, 3, 4].into_iter().collect();
        assert!(sat_indicator(&w, &s, &sbar));
        assert!(!sat_indicator(&bits("1001"), &s, &sbar));

        let set = |xs: &[usize]| xs.iter().copied().collect::<BTreeSet<usize>>();
        assert!(sat_indicator(&bits("1111"), &set(&[1, 2]), &set(&[])));
        assert!(!sat_indicator(&bits("1011"), &set(&[2]), &set(&[])));
        assert!(sat_indicator(&bits("0111"), &set(&[2, 3, 4]), &set(&[])));
    }

    #[test]
    fn j_pair_counts_k5() {
        // 10 unordered pairs (diagonal included) minus the 2 allowed ones.
        assert_eq!(j1_pairs(5).len(), 8);
        assert_eq!(j2_pairs(5).len(), 8);
        assert!(!j1_pairs(5).contains(&(1, 4)));
        assert!(!j1_pairs(5).contains(&(2, 3)));
        assert!(!j2_pairs(5).contains(&(1, 2)));
        assert!(!j2_pairs(5).contains(&(3, 4)));
        // Same-value pairs are never a legal edge combination.
        for j in 1..5 {
            assert!(j1_pairs(5).contains(&(j, j)));
            assert!(j2_pairs(5).contains(&(j, j)));
        }
    }

    #[test]
    fn one_tile_face_sets_are_exhausted() {
        let mut sys = TileSystem::new(vec!["a"]).unwrap();
        sys.add_h(0, 0).unwrap();
        sys.add_v(0, 0).unwrap();
        let fs = face_sets(&sys);
        assert!(fs.i11.is_empty());
        assert!(fs.i12.is_empty());
        assert!(fs.i21.is_empty());
    }

    #[test]
    fn checkerboard_face_sets() {
        let mut sys = TileSystem::new(vec!["a", "b"]).unwrap();
        for (x, y) in [(0, 1), (1, 0)] {
            sys.add_h(x, y).unwrap();
            sys.add_v(x, y).unwrap();
        }
        let fs = face_sets(&sys);
        assert_eq!(fs.d11.len(), 2);
        assert_eq!(fs.d12.len(), 2);
        assert_eq!(fs.d21.len(), 2);
        assert_eq!(fs.i11.len(), 14);
        assert_eq!(fs.i12.len(), 14);
        assert_eq!(fs.i21.len(), 14);
        assert!(fs.d12.contains(&vface_quad(0, 1)));
        assert!(fs.d21.contains(&face_quad(0, 1)));
    }

    #[test]
    fn quad_shapes_agree_on_same_tile() {
        // A tile face carries one value per group, whichever glue shape
        // degenerates to it.
        for t in 0..4 {
            let want: BTreeSet<usize> = (4 * t + 1..=4 * t + 4).collect();
            assert_eq!(face_quad(t, t), want);
            assert_eq!(vface_quad(t, t), want);
        }
    }
}
