//! From bounded tiling to periodic tiling.
//!
//! A bounded instance asks for a `k` x `k` square with a designated tile at
//! the top-left corner. The periodic instance built here overlays the input
//! system with the countdown gadget, which pins the square's size, and then
//! frames the combined square with a one-tile-thick border layer so that
//! copies of it tile the torus. The border adds five tiles: a `center`
//! that marks the frame crossing, `horizontal` and `vertical` line tiles,
//! and two anchors `0aa`, `1aa` sitting next to the center that force
//! designated corner tiles into the square's bottom-left and top-right
//! interior cells.

use std::collections::BTreeSet;

use crate::counter::{build_counter_system, choose_counter_params, CounterParams};
use crate::error::TilingError;
use crate::system::{product_system, TileSystem, TilingGrid};

/// Which interior tiles may appear directly above the `0aa` anchor
/// (`starting`) and directly below the `1aa` anchor (`finals`).
#[derive(Debug, Clone)]
pub struct CornerConstraint {
    pub starting: BTreeSet<u32>,
    pub finals: BTreeSet<u32>,
}

#[derive(Debug, Clone)]
pub struct BorderedSystem {
    pub system: TileSystem,
    /// the frame-crossing tile; pinning it is how a search picks the frame
    pub center: u32,
    /// tile count of the base system; border tiles are `base_tiles..+5`
    pub base_tiles: u32,
}

const BORDER_NAMES: [&str; 5] = ["center", "horizontal", "vertical", "0aa", "1aa"];

/// Frames `base` with the five border tiles. Horizontally a border row reads
/// `center 0aa horizontal ... horizontal 1aa` and wraps; vertically a border
/// column is `center vertical ... vertical` and wraps. Interior tiles accept
/// the line tiles on all four sides, except that the cell above `0aa` must
/// come from `corner.starting` and the cell below `1aa` from `corner.finals`.
pub fn add_border(base: &TileSystem, corner: &CornerConstraint) -> Result<BorderedSystem, TilingError> {
    if corner.starting.is_empty() || corner.finals.is_empty() {
        return Err(TilingError::EmptyCornerSet);
    }
    let n = base.n_tiles();
    for &s in corner.starting.iter().chain(corner.finals.iter()) {
        if s >= n {
            return Err(TilingError::IndexOutOfRange { index: s, n_tiles: n as usize });
        }
    }

    let mut tokens: Vec<String> = base.tokens().to_vec();
    for name in BORDER_NAMES {
        let mut tok = name.to_string();
        let mut salt = 2;
        while tokens.iter().any(|t| t == &tok) {
            tok = format!("{name}.{salt}");
            salt += 1;
        }
        tokens.push(tok);
    }
    let mut sys = TileSystem::new(tokens)?;
    for (a, b) in base.h_pairs() {
        sys.add_h(a, b).unwrap();
    }
    for (a, b) in base.v_pairs() {
        sys.add_v(a, b).unwrap();
    }

    let center = n;
    let horiz = n + 1;
    let vert = n + 2;
    let zero = n + 3;
    let one = n + 4;

    sys.add_h(center, zero).unwrap();
    sys.add_h(zero, horiz).unwrap();
    sys.add_h(horiz, horiz).unwrap();
    sys.add_h(horiz, one).unwrap();
    sys.add_h(one, center).unwrap();
    for d in 0..n {
        sys.add_h(vert, d).unwrap();
        sys.add_h(d, vert).unwrap();
    }

    sys.add_v(center, vert).unwrap();
    sys.add_v(vert, vert).unwrap();
    sys.add_v(vert, center).unwrap();
    for d in 0..n {
        sys.add_v(horiz, d).unwrap();
        sys.add_v(d, horiz).unwrap();
        sys.add_v(zero, d).unwrap();
        sys.add_v(d, one).unwrap();
    }
    for &s in &corner.starting {
        sys.add_v(s, zero).unwrap();
    }
    for &f in &corner.finals {
        sys.add_v(one, f).unwrap();
    }

    Ok(BorderedSystem { system: sys, center, base_tiles: n })
}

/// A compiled periodic instance: search for a periodic tiling of size up to
/// `m` x `n` in which `designated` occurs.
#[derive(Debug, Clone)]
pub struct PeriodicInstance {
    pub system: TileSystem,
    pub designated: u32,
    pub m: u64,
    pub n: u64,
    pub params: CounterParams,
    /// tiles per countdown layer, for projecting interiors back out
    pub counter_tiles: u32,
    /// interior product tile count (the bordered system appends 5 more)
    pub interior_tiles: u32,
    /// interior tile that the cell above `0aa` is forced to
    pub start_pin: u32,
    /// countdown layer of the tiles the cell below `1aa` is forced to
    pub final_pin_counter: u32,
}

/// Compiles "does `d` tile the `k` x `k` square with `d0` top-left" into
/// "does the bordered product system tile some torus of size at most
/// `(k+1)` x `(k+1)` containing the center tile".
///
/// The input square is mirrored top-to-bottom and the countdown layer is
/// rotated a half turn before the two are overlaid. That way the countdown
/// corners, which the border anchors force into the interior's bottom-left
/// and top-right cells, translate back to the input's top-left `d0` cell
/// and the unconstrained far corner.
pub fn reduce_binary_to_periodic(
    d: &TileSystem,
    d0: u32,
    k: u64,
) -> Result<PeriodicInstance, TilingError> {
    if d0 >= d.n_tiles() {
        return Err(TilingError::IndexOutOfRange { index: d0, n_tiles: d.n_tiles() as usize });
    }
    let params = choose_counter_params(k)?;
    let counter = build_counter_system(&params);
    let cn = counter.system.n_tiles();
    let interior = product_system(&d.vflip(), &counter.system.rot180());

    let start_pin = d0 * cn + counter.c0;
    let finals: BTreeSet<u32> = (0..d.n_tiles()).map(|di| di * cn + counter.c1).collect();
    let corner = CornerConstraint { starting: BTreeSet::from([start_pin]), finals };
    let bordered = add_border(&interior, &corner)?;

    Ok(PeriodicInstance {
        designated: bordered.center,
        interior_tiles: bordered.base_tiles,
        system: bordered.system,
        m: k + 1,
        n: k + 1,
        params,
        counter_tiles: cn,
        start_pin,
        final_pin_counter: counter.c1,
    })
}

/// Interprets a bound `k` as the exponent form `2^m` x `2^n` with
/// `m = n = ceil(log2(k + 1))`: the smallest power of two no smaller than
/// the reduction's own bound. Sound because any fundamental domain of the
/// compiled system is forced to size exactly `(k+1)` x `(k+1)`, which stays
/// within every bound of at least `k + 1`.
pub fn to_power_of_two(k: u64) -> (u32, u32) {
    let need = k + 1;
    let exp = 64 - (need - 1).leading_zeros();
    (exp, exp)
}

/// Lays a valid `k` x `k` input tiling (top-left `d0`) out as the full
/// `(k+1)` x `(k+1)` fundamental domain of the compiled system, with the
/// center at `(0, 0)`. Used to turn positive answers into checkable
/// periodic tilings.
pub fn embed_reduction(inst: &PeriodicInstance, d_grid: &TilingGrid) -> Result<TilingGrid, TilingError> {
    let k = inst.params.k as usize;
    if d_grid.width() != k || d_grid.height() != k {
        return Err(TilingError::MalformedGrid(format!(
            "input tiling must be {k} x {k}"
        )));
    }
    let counter = build_counter_system(&inst.params);
    let pad = crate::counter::padded_layout(&counter);
    let cn = inst.counter_tiles;
    let side = k + 1;
    let center = inst.designated;
    let horiz = inst.interior_tiles + 1;
    let vert = inst.interior_tiles + 2;
    let zero = inst.interior_tiles + 3;
    let one = inst.interior_tiles + 4;

    let mut grid = TilingGrid::new_filled(side, side, center);
    grid.set(1, 0, zero);
    for c in 2..side - 1 {
        grid.set(c, 0, horiz);
    }
    grid.set(side - 1, 0, one);
    for r in 1..side {
        grid.set(0, r, vert);
    }
    for r in 1..side {
        for c in 1..side {
            // interior row r maps to mirrored input row k-r; the countdown
            // layer is the padded layout rotated a half turn
            let d_tile = d_grid.get(c - 1, k - r);
            let c_tile = pad.get(k - c, k - r);
            grid.set(c, r, d_tile * cn + c_tile);
        }
    }
    grid.periodic = true;
    Ok(grid)
}

/// Projects the interior of a periodic solution back to an input-layer
/// tiling in the input's own orientation. The solution must have the center
/// at `(0, 0)` and size `(k+1)` x `(k+1)`.
pub fn project_interior(inst: &PeriodicInstance, grid: &TilingGrid) -> Result<TilingGrid, TilingError> {
    let k = inst.params.k as usize;
    if grid.width() != k + 1 || grid.height() != k + 1 || grid.get(0, 0) != inst.designated {
        return Err(TilingError::MalformedGrid(
            "expected a centered fundamental domain of the compiled system".into(),
        ));
    }
    let cn = inst.counter_tiles;
    let mut out = TilingGrid::new_filled(k, k, 0);
    for r in 1..=k {
        for c in 1..=k {
            let tile = grid.get(c, r);
            if tile >= inst.interior_tiles {
                return Err(TilingError::MalformedGrid("border tile inside the frame".into()));
            }
            out.set(c - 1, k - r, tile / cn);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{solve_bounded, solve_periodic, SolveOutcome};
    use crate::system::validate_tiling;

    fn all_adjacent(tokens: Vec<&str>) -> TileSystem {
        let mut s = TileSystem::new(tokens).unwrap();
        for a in 0..s.n_tiles() {
            for b in 0..s.n_tiles() {
                s.add_h(a, b).unwrap();
                s.add_v(a, b).unwrap();
            }
        }
        s
    }

    #[test]
    fn border_adds_expected_pair_counts() {
        let base = all_adjacent(vec!["a", "b", "c"]);
        let n = base.n_tiles() as usize;
        let corner = CornerConstraint {
            starting: BTreeSet::from([0]),
            finals: BTreeSet::from([0, 1, 2]),
        };
        let b = add_border(&base, &corner).unwrap();
        assert_eq!(b.system.n_tiles() as usize, n + 5);
        assert_eq!(b.system.n_h_pairs(), base.n_h_pairs() + 5 + 2 * n);
        assert_eq!(b.system.n_v_pairs(), base.n_v_pairs() + 3 + 4 * n + 1 + 3);
    }

    #[test]
    fn border_token_collisions_get_salted() {
        let base = all_adjacent(vec!["center", "x"]);
        let corner = CornerConstraint { starting: BTreeSet::from([1]), finals: BTreeSet::from([1]) };
        let b = add_border(&base, &corner).unwrap();
        assert_eq!(b.system.token(b.center), "center.2");
    }

    #[test]
    fn framed_domain_validates_periodically() {
        // single all-adjacent interior tile, both anchors accept it: the
        // frame pattern and wraparound rules carry the whole check
        let base = all_adjacent(vec!["d"]);
        let corner = CornerConstraint { starting: BTreeSet::from([0]), finals: BTreeSet::from([0]) };
        let b = add_border(&base, &corner).unwrap();
        let (center, horiz, vert, zero, one) = (1u32, 2, 3, 4, 5);
        let rows = vec![
            vec![center, zero, horiz, horiz, one],
            vec![vert, 0, 0, 0, 0],
            vec![vert, 0, 0, 0, 0],
            vec![vert, 0, 0, 0, 0],
        ];
        let grid = TilingGrid::from_rows(rows).unwrap();
        assert!(validate_tiling(&b.system, &grid, true));
        // anchors force corners: swapping the anchor's partner breaks it
        let corner = CornerConstraint { starting: BTreeSet::new(), finals: BTreeSet::from([0]) };
        assert!(add_border(&base, &corner).is_err());
    }

    #[test]
    fn border_row_needs_width_at_least_four() {
        let base = all_adjacent(vec!["d"]);
        let corner = CornerConstraint { starting: BTreeSet::from([0]), finals: BTreeSet::from([0]) };
        let b = add_border(&base, &corner).unwrap();
        // no (zero, one) or (center, horizontal) pairs: 2 and 3 wide rows
        // cannot close the frame
        assert!(!b.system.h_contains(4, 5));
        assert!(!b.system.h_contains(1, 2));
        assert!(matches!(
            solve_periodic(&b.system, 3, 3, b.center, 1_000_000),
            SolveOutcome::Exhausted
        ));
        assert!(solve_periodic(&b.system, 4, 2, b.center, 1_000_000).found().is_some());
    }

    #[test]
    fn reduction_round_trip_on_a_solvable_instance() {
        // free 2-tile system: everything adjacent, k = 4
        let d = all_adjacent(vec!["p", "q"]);
        let inst = reduce_binary_to_periodic(&d, 1, 4).unwrap();
        assert_eq!(inst.m, 5);
        // 2 * 18 interior product tiles + 5 border tiles
        assert_eq!(inst.system.n_tiles(), 2 * 18 + 5);

        let bounded = solve_bounded(&d, 4, 1, 1_000_000);
        let d_grid = bounded.found().expect("free system tiles the square");
        let embedded = embed_reduction(&inst, d_grid).unwrap();
        assert!(validate_tiling(&inst.system, &embedded, true), "embedded domain validates");

        let projected = project_interior(&inst, &embedded).unwrap();
        assert_eq!(&projected, d_grid);

        let solved = solve_periodic(&inst.system, inst.m as usize, inst.n as usize, inst.designated, 50_000_000);
        let g = solved.found().expect("compiled instance is solvable");
        assert_eq!((g.width(), g.height()), (5, 5));
        let back = project_interior(&inst, &g).unwrap();
        assert!(validate_tiling(&d, &back, false));
        assert_eq!(back.get(0, 0), 1, "designated input tile lands top-left");
    }

    #[test]
    fn unsolvable_input_compiles_to_unsolvable_instance() {
        // two tiles that only ever sit right of each other horizontally and
        // have no vertical pairs at all: no 4x4 square exists
        let mut d = TileSystem::new(vec!["p", "q"]).unwrap();
        d.add_h(0, 1).unwrap();
        d.add_h(1, 0).unwrap();
        let inst = reduce_binary_to_periodic(&d, 0, 4).unwrap();
        assert!(matches!(
            solve_periodic(&inst.system, inst.m as usize, inst.n as usize, inst.designated, 50_000_000),
            SolveOutcome::Exhausted
        ));
    }

    #[test]
    fn power_of_two_exponents() {
        assert_eq!(to_power_of_two(3), (2, 2));
        assert_eq!(to_power_of_two(4), (3, 3));
        assert_eq!(to_power_of_two(7), (3, 3));
        assert_eq!(to_power_of_two(8), (4, 4));
        assert_eq!(to_power_of_two(15), (4, 4));
    }
}
