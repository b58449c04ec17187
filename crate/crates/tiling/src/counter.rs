//! The decrement counter gadget: a tile system whose tilings with pinned
//! corners exist at exactly one square size.
//!
//! The gadget spells out a base-2 countdown. A memorized row fixes the
//! starting value `k'` in `b` bits; each following row sits one column left
//! of the row above and holds the previous value minus one; the run ends
//! when the borrow falls off the left end of an all-zero row, which is the
//! only place the bottom-left corner tile can appear. A triangle of dummy
//! padding cells continues the staircase up to the top-right corner, so the
//! whole picture is a `k` x `k` square for `k = k' + b + 2` and no other
//! size admits a tiling with the two corner tiles in place.
//!
//! The staircase band splits the blank cells in two: `^` above and left of
//! the band, `.` below and right of it. The two never touch, and the band
//! tiles each know which side is which; that is what keeps a padding cell
//! from floating free of the countdown. Each padding cell also knows its
//! position in the triangle, and the forced chains meet the two pinned
//! corners: `pad0.0` has no vertical predecessor and no horizontal
//! successor, so it sits in the top-right corner and the padding column
//! under it runs down to the last memorized bit, pulling in the whole
//! memorized row flush against the right edge. Rows below then shrink one
//! column per step, and the corner marker `*`, which admits nothing below
//! or to its left, appears exactly where the borrow falls off the end of
//! the countdown. Between the two pins this fixes both dimensions.
//!
//! Tile tokens, where `a` is the cell's own bit and `s` the bit of the cell
//! to its right (`-` when blank):
//!
//! - `^`, `.`       blank filler above / below the band
//! - `padJ.I`       padding cell of staircase row `J`, `I` columns in from
//!                  the right edge
//! - `mL:-_s`       memorized leader, `mJ:a_s` memorized bit `J`
//! - `-_0`, `-_1`   row leader carrying its right neighbor's bit
//! - `a_s`          working bit, untouched by the borrow
//! - `1*_s`         working bit that received the borrow (0 became 1)
//! - `0!_s`         working bit that absorbed the borrow (1 became 0)
//! - `*`            the corner marker the falling borrow produces
//!
//! The `!` mark is bookkeeping: within a row the borrow marks a suffix, a
//! starred cell passes the borrow left and an absorbing cell stops it, and
//! the horizontal relation can only enforce that with the stop recorded on
//! the tile. Display output drops the mark.

use crate::error::TilingError;
use crate::system::{TileSystem, TilingGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterParams {
    pub k: u64,
    /// starting value of the countdown
    pub k_prime: u64,
    /// bit width of the countdown rows
    pub b: u32,
}

/// Picks the smallest bit width `b` such that the countdown from
/// `k' = k - b - 2` fits: `k'` must be at least 1 and must fit in `b` bits.
/// The smallest workable square is `k = 4`, giving `k' = 1`, `b = 1`.
pub fn choose_counter_params(k: u64) -> Result<CounterParams, TilingError> {
    for b in 1..=k.min(64) as u32 {
        let used = b as u64 + 2;
        if k <= used {
            break;
        }
        let k_prime = k - used;
        if b >= 64 || k_prime < (1u64 << b) {
            return Ok(CounterParams { k, k_prime, b });
        }
    }
    Err(TilingError::NoCounterParams(k))
}

#[derive(Debug, Clone)]
pub struct CounterSystem {
    pub system: TileSystem,
    pub params: CounterParams,
    /// top-right corner pin: the first padding tile
    pub c0: u32,
    /// bottom-left corner pin: the fallen-borrow marker
    pub c1: u32,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flag {
    None,
    Star,
    Absorb,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    /// blank above/left of the staircase band
    Upper,
    /// blank below/right of the staircase band
    Lower,
    /// triangle cell in staircase row `row`, `off` columns in from the right
    Pad { row: u32, off: u32 },
    MemLeader,
    Mem(u32),
    Leader(u8),
    Star,
    Work { a: u8, flag: Flag, sub: Option<u8> },
}

fn bits_of(value: u64, b: u32) -> Vec<u8> {
    (0..b).rev().map(|i| ((value >> i) & 1) as u8).collect()
}

fn work_token(a: u8, flag: Flag, sub: Option<u8>) -> String {
    let f = match flag {
        Flag::None => "",
        Flag::Star => "*",
        Flag::Absorb => "!",
    };
    let s = match sub {
        Some(bit) => bit.to_string(),
        None => "-".to_string(),
    };
    format!("{a}{f}_{s}")
}

fn classes(params: &CounterParams) -> Vec<(String, Class)> {
    let b = params.b;
    let bits = bits_of(params.k_prime, b);
    let mut out: Vec<(String, Class)> = Vec::new();
    out.push(("^".into(), Class::Upper));
    out.push((".".into(), Class::Lower));
    for j in 0..b {
        for i in 0..=j {
            out.push((format!("pad{j}.{i}"), Class::Pad { row: j, off: i }));
        }
    }
    out.push((format!("mL:-_{}", bits[0]), Class::MemLeader));
    for j in 0..b {
        let sub = if j + 1 < b { Some(bits[(j + 1) as usize]) } else { None };
        let body = work_token(bits[j as usize], Flag::None, sub);
        out.push((format!("m{j}:{body}"), Class::Mem(j)));
    }
    out.push(("-_0".into(), Class::Leader(0)));
    out.push(("-_1".into(), Class::Leader(1)));
    out.push(("*".into(), Class::Star));
    // untouched bits keep their value; a starred bit went 0 -> 1 and an
    // absorbing bit went 1 -> 0, so the new value determines the mark
    for a in [0u8, 1] {
        for sub in [Some(0u8), Some(1u8)] {
            out.push((work_token(a, Flag::None, sub), Class::Work { a, flag: Flag::None, sub }));
        }
    }
    for sub in [Some(0u8), Some(1u8), None] {
        out.push((work_token(1, Flag::Star, sub), Class::Work { a: 1, flag: Flag::Star, sub }));
        out.push((work_token(0, Flag::Absorb, sub), Class::Work { a: 0, flag: Flag::Absorb, sub }));
    }
    out
}

/// Builds the counter system for `params`, with the two corner pins that
/// force the unique `k` x `k` tiling size.
pub fn build_counter_system(params: &CounterParams) -> CounterSystem {
    let b = params.b;
    let bits = bits_of(params.k_prime, b);
    let cls = classes(params);
    let tokens: Vec<String> = cls.iter().map(|(t, _)| t.clone()).collect();
    let classes: Vec<Class> = cls.iter().map(|(_, c)| *c).collect();
    let mut sys = TileSystem::new(tokens).expect("counter tokens are distinct");
    let n = sys.n_tiles();

    // subscript carried by a tile, for the vertical band rule
    let band_sub = |c: Class| -> Option<u8> {
        match c {
            Class::MemLeader => Some(bits[0]),
            Class::Mem(j) if j + 1 < b => Some(bits[(j + 1) as usize]),
            Class::Leader(beta) => Some(beta),
            Class::Work { sub: Some(s), .. } => Some(s),
            _ => None,
        }
    };

    for l in 0..n {
        for r in 0..n {
            let ok = match (classes[l as usize], classes[r as usize]) {
                (Class::Upper, Class::Upper) => true,
                // only a row's leftmost padding cell borders the blank
                (Class::Upper, Class::Pad { row, off }) => off == row,
                (Class::Upper, Class::MemLeader) => true,
                (Class::Upper, Class::Leader(_)) => true,
                (Class::Pad { row: j1, off: i1 }, Class::Pad { row: j2, off: i2 }) => {
                    j1 == j2 && i1 == i2 + 1
                }
                (Class::MemLeader, Class::Mem(0)) => true,
                (Class::Mem(i), Class::Mem(j)) => i + 1 == j,
                // a leader announces its right neighbor's bit; the borrow
                // cannot pass beyond the leader, so no star to its right
                (Class::Leader(beta), Class::Work { a, flag, .. }) => a == beta && flag != Flag::Star,
                // the corner marker is a fallen borrow: everything right of
                // it was passed through
                (Class::Star, Class::Work { flag, .. }) => flag == Flag::Star,
                // borrow marks form a suffix: the left cell is marked
                // exactly when the right cell passed the borrow on
                (Class::Work { sub: Some(s), flag: fl, .. }, Class::Work { a, flag: fr, .. }) => {
                    s == a && ((fl != Flag::None) == (fr == Flag::Star))
                }
                (Class::Work { sub: None, .. }, Class::Lower) => true,
                (Class::Lower, Class::Lower) => true,
                _ => false,
            };
            if ok {
                sys.add_h(l, r).unwrap();
            }
        }
    }

    for a in 0..n {
        for t in 0..n {
            let (ca, ct) = (classes[a as usize], classes[t as usize]);
            let ok = match (ca, ct) {
                (Class::Upper, Class::Upper) => true,
                // the blank only tops a row's leftmost padding cell, and
                // pad0.0 stays unreachable from above: top row only
                (Class::Upper, Class::Pad { row, off }) => row >= 1 && off == row,
                (Class::Upper, Class::MemLeader) => true,
                (Class::Upper, Class::Leader(_)) => true,
                (Class::Upper, Class::Star) => true,
                // padding cells stack by column offset, and the bottom
                // padding row is the only way into a memorized bit
                (Class::Pad { row: j1, off: i1 }, Class::Pad { row: j2, off: i2 }) => {
                    j1 + 1 == j2 && i1 == i2
                }
                (Class::Pad { row, off }, Class::Mem(j)) => row + 1 == b && off + j + 1 == b,
                (Class::Mem(j), Class::Lower) => j + 1 == b,
                (Class::Work { sub: None, .. }, Class::Lower) => true,
                (Class::Lower, Class::Lower) => true,
                // the band rule: a cell's subscript is the old value of the
                // bit below it, and the mark on the new bit tells whether
                // the borrow toggled it
                (_, Class::Work { a: na, flag, .. }) => match band_sub(ca) {
                    Some(beta) => match flag {
                        Flag::Star => beta == 0 && na == 1,
                        Flag::Absorb => beta == 1 && na == 0,
                        Flag::None => na == beta,
                    },
                    None => false,
                },
                _ => false,
            };
            if ok {
                sys.add_v(a, t).unwrap();
            }
        }
    }

    let c0 = sys.tile_index("pad0.0").unwrap();
    let c1 = sys.tile_index("*").unwrap();
    CounterSystem { system: sys, params: *params, c0, c1 }
}

/// Columns of staircase row `r` in the `k` x `k` square: padding rows hug
/// the right edge, countdown row `j` (at `r = b + j`) starts `j` columns
/// further left than the memorized row.
fn row_span(params: &CounterParams, r: usize) -> (usize, usize) {
    let (k, b) = (params.k as usize, params.b as usize);
    if r < b {
        (k - 1 - r, k - 1)
    } else {
        (k - 1 - r, k - 1 - r + b)
    }
}

/// The layout the construction is built around, without the padding rows:
/// `k` columns by `k' + 2` rows, memorized row on top, the fallen borrow at
/// the bottom left. Produced by simulating the countdown, not by solving.
pub fn figure_layout(counter: &CounterSystem) -> TilingGrid {
    let params = &counter.params;
    let b = params.b as usize;
    let height = params.k_prime as usize + 2;
    let full = padded_layout(counter);
    let mut grid = TilingGrid::new_filled(params.k as usize, height, 0);
    for r in 0..height {
        for c in 0..params.k as usize {
            grid.set(c, r, full.get(c, r + b));
        }
    }
    grid
}

/// The full `k` x `k` layout: the countdown plus the padding triangle and
/// the two blank regions.
pub fn padded_layout(counter: &CounterSystem) -> TilingGrid {
    let params = &counter.params;
    let (k, b) = (params.k as usize, params.b as usize);
    let sys = &counter.system;
    let upper = sys.tile_index("^").unwrap();
    let lower = sys.tile_index(".").unwrap();
    let mut grid = TilingGrid::new_filled(k, k, lower);
    for r in 0..k {
        let (start, end) = row_span(params, r);
        for c in 0..start {
            grid.set(c, r, upper);
        }
        if r < b {
            for c in start..=end {
                let pad = sys.tile_index(&format!("pad{r}.{}", k - 1 - c)).unwrap();
                grid.set(c, r, pad);
            }
        } else {
            let tokens = row_tokens(params, (r - b) as u64);
            for (i, tok) in tokens.iter().enumerate() {
                grid.set(start + i, r, sys.tile_index(tok).unwrap());
            }
        }
    }
    grid
}

/// Tokens of countdown row `j` (row 0 is the memorized row), left to right:
/// leader then `b` bits, except the final row where the leader slot holds
/// the fallen borrow.
fn row_tokens(params: &CounterParams, j: u64) -> Vec<String> {
    let b = params.b;
    let bw = b as usize;
    if j == 0 {
        let bits = bits_of(params.k_prime, b);
        let mut out = vec![format!("mL:-_{}", bits[0])];
        for i in 0..bw {
            let sub = if i + 1 < bw { Some(bits[i + 1]) } else { None };
            out.push(format!("m{i}:{}", work_token(bits[i], Flag::None, sub)));
        }
        return out;
    }
    let old = bits_of(params.k_prime - (j - 1), b);
    let new: Vec<u8>;
    let flags: Vec<Flag>;
    if j <= params.k_prime {
        new = bits_of(params.k_prime - j, b);
        // the borrow enters at the right and runs left to the lowest set bit
        let stop = old.iter().rposition(|&bit| bit == 1).expect("value positive");
        flags = (0..bw)
            .map(|i| {
                if i > stop {
                    Flag::Star
                } else if i == stop {
                    Flag::Absorb
                } else {
                    Flag::None
                }
            })
            .collect();
    } else {
        // below zero: the borrow passes every bit and falls off the left
        new = vec![1; bw];
        flags = vec![Flag::Star; bw];
    }

    let mut out = Vec::with_capacity(bw + 1);
    if j <= params.k_prime {
        out.push(format!("-_{}", new[0]));
    } else {
        out.push("*".to_string());
    }
    for i in 0..bw {
        let sub = if i + 1 < bw { Some(new[i + 1]) } else { None };
        out.push(work_token(new[i], flags[i], sub));
    }
    out
}

/// Maps a tile token to its display form: memorized prefixes and the
/// borrow-absorption mark are dropped, everything else is unchanged.
pub fn display_token(token: &str) -> String {
    let body = match token.split_once(':') {
        Some((head, rest)) if head.starts_with('m') => rest,
        _ => token,
    };
    body.replace('!', "")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{solve_pinned, SolveOutcome};
    use crate::system::validate_tiling;

    #[test]
    fn params_examples() {
        let p = choose_counter_params(10).unwrap();
        assert_eq!((p.k_prime, p.b), (5, 3));
        let p = choose_counter_params(8).unwrap();
        assert_eq!((p.k_prime, p.b), (3, 3));
        let p = choose_counter_params(4).unwrap();
        assert_eq!((p.k_prime, p.b), (1, 1));
        assert!(choose_counter_params(3).is_err());
        assert!(choose_counter_params(0).is_err());
        // spot check the defining property on a range
        for k in 4..200 {
            let p = choose_counter_params(k).unwrap();
            assert_eq!(p.k_prime + p.b as u64 + 2, k);
            assert!(p.k_prime >= 1);
            assert!(p.k_prime < (1 << p.b));
            if p.b > 1 {
                // minimality: one bit fewer cannot hold k' = k - (b-1) - 2
                let b1 = p.b - 1;
                assert!(k - b1 as u64 - 2 >= (1 << b1));
            }
        }
    }

    #[test]
    fn tile_count_matches_structure() {
        // 16 fixed tiles, b memorized bits, b(b+1)/2 padding cells
        for k in [4u64, 8, 10, 17] {
            let p = choose_counter_params(k).unwrap();
            let c = build_counter_system(&p);
            let b = p.b as u64;
            assert_eq!(c.system.n_tiles() as u64, 16 + b + b * (b + 1) / 2);
        }
    }

    #[test]
    fn layouts_validate() {
        for k in [4u64, 8, 10, 12] {
            let p = choose_counter_params(k).unwrap();
            let c = build_counter_system(&p);
            let fig = figure_layout(&c);
            assert_eq!((fig.width() as u64, fig.height() as u64), (k, p.k_prime + 2));
            assert!(validate_tiling(&c.system, &fig, false), "figure layout k={k}");
            let pad = padded_layout(&c);
            assert_eq!((pad.width() as u64, pad.height() as u64), (k, k));
            assert!(validate_tiling(&c.system, &pad, false), "padded layout k={k}");
            assert_eq!(pad.get(k as usize - 1, 0), c.c0);
            assert_eq!(pad.get(0, k as usize - 1), c.c1);
        }
    }

    #[test]
    fn golden_countdown_display() {
        // the k = 10 gadget: k' = 5 counted down in 3 bits, 10 x 7 before
        // padding; display form drops the absorption marks
        let p = choose_counter_params(10).unwrap();
        let c = build_counter_system(&p);
        let fig = figure_layout(&c);
        let expected: [&str; 7] = [
            "^ ^ ^ ^ ^ ^ -_1 1_0 0_1 1_-",
            "^ ^ ^ ^ ^ -_1 1_0 0_0 0_- .",
            "^ ^ ^ ^ -_0 0_1 1*_1 1*_- . .",
            "^ ^ ^ -_0 0_1 1_0 0_- . . .",
            "^ ^ -_0 0_0 0_1 1*_- . . . .",
            "^ -_0 0_0 0_0 0_- . . . . .",
            "* 1*_1 1*_1 1*_- . . . . . .",
        ];
        for (r, want) in expected.iter().enumerate() {
            let got: Vec<String> = (0..fig.width())
                .map(|col| display_token(c.system.token(fig.get(col, r))))
                .collect();
            assert_eq!(got.join(" "), *want, "row {r}");
        }
    }

    #[test]
    fn k4_unique_size_scan() {
        // full scan at the smallest parameters: corners pinned, every size
        // up to 6 x 6, solutions exactly at 4 x 4
        let p = choose_counter_params(4).unwrap();
        let c = build_counter_system(&p);
        for w in 1..=6usize {
            for h in 1..=6usize {
                let mut budget = 2_000_000u64;
                let pins = [(w - 1, 0, c.c0), (0, h - 1, c.c1)];
                let out = solve_pinned(&c.system, w, h, &pins, false, &mut budget);
                match out {
                    SolveOutcome::Found(g) => {
                        assert_eq!((w, h), (4, 4), "unexpected solution at {w}x{h}");
                        assert!(validate_tiling(&c.system, &g, false));
                    }
                    SolveOutcome::Exhausted => assert_ne!((w, h), (4, 4)),
                    SolveOutcome::OutOfBudget => panic!("budget too small at {w}x{h}"),
                }
            }
        }
    }

    #[test]
    fn display_mapping() {
        assert_eq!(display_token("mL:-_1"), "-_1");
        assert_eq!(display_token("m2:1_-"), "1_-");
        assert_eq!(display_token("0!_1"), "0_1");
        assert_eq!(display_token("1*_-"), "1*_-");
        assert_eq!(display_token("*"), "*");
        assert_eq!(display_token("."), ".");
        assert_eq!(display_token("^"), "^");
        assert_eq!(display_token("pad1.0"), "pad1.0");
    }
}
