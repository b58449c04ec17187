use std::collections::VecDeque;

use crate::system::{TileSystem, TilingGrid};

/// Outcome of an exhaustive search. `Exhausted` is a definite negative:
/// the whole space was enumerated. `OutOfBudget` is inconclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Found(TilingGrid),
    Exhausted,
    OutOfBudget,
}

impl SolveOutcome {
    pub fn found(&self) -> Option<&TilingGrid> {
        match self {
            SolveOutcome::Found(g) => Some(g),
            _ => None,
        }
    }
}

/// Searches for a tiling of the `k` x `k` square with `f(0,0) = d0`.
pub fn solve_bounded(system: &TileSystem, k: usize, d0: u32, budget: u64) -> SolveOutcome {
    assert!(k > 0);
    let mut budget = budget;
    solve_pinned(system, k, k, &[(0, 0, d0)], false, &mut budget)
}

/// Searches for a periodic tiling of some `a` x `b` fundamental domain with
/// `a <= m`, `b <= n`, in which tile `t` occurs. Sizes are tried in
/// lexicographic order of `(a, b)`. A periodic tiling containing `t` can be
/// translated so that `t` lands on `(0, 0)`, so pinning it there loses no
/// solutions. The node budget is shared across all sizes.
pub fn solve_periodic(system: &TileSystem, m: usize, n: usize, t: u32, budget: u64) -> SolveOutcome {
    assert!(m > 0 && n > 0);
    let mut budget = budget;
    for a in 1..=m {
        for b in 1..=n {
            match solve_pinned(system, a, b, &[(0, 0, t)], true, &mut budget) {
                SolveOutcome::Found(g) => return SolveOutcome::Found(g),
                SolveOutcome::OutOfBudget => return SolveOutcome::OutOfBudget,
                SolveOutcome::Exhausted => {}
            }
        }
    }
    SolveOutcome::Exhausted
}

/// General engine: fixed grid size, arbitrary single-tile pins, optional
/// wraparound. Domains are narrowed to arc consistency before the search,
/// which makes heavily forced systems (padding rows, border lines) near
/// deterministic. The budget counts candidate placement attempts and is
/// decremented in place so callers can share it across invocations.
pub fn solve_pinned(
    system: &TileSystem,
    width: usize,
    height: usize,
    pins: &[(usize, usize, u32)],
    periodic: bool,
    budget: &mut u64,
) -> SolveOutcome {
    assert!(width > 0 && height > 0);
    let n = system.n_tiles() as usize;
    if n == 0 {
        return SolveOutcome::Exhausted;
    }
    let mut dom = vec![vec![true; n]; width * height];
    for &(c, r, t) in pins {
        assert!(c < width && r < height && (t as usize) < n);
        // pins intersect, so two different pins on one cell contradict
        for x in 0..n {
            dom[r * width + c][x] &= x == t as usize;
        }
    }
    // degenerate wraparound: a cell adjacent to itself must self-pair
    if periodic && width == 1 {
        for d in dom.iter_mut() {
            for x in 0..n {
                d[x] &= system.h_contains(x as u32, x as u32);
            }
        }
    }
    if periodic && height == 1 {
        for d in dom.iter_mut() {
            for x in 0..n {
                d[x] &= system.v_contains(x as u32, x as u32);
            }
        }
    }
    if !propagate(system, width, height, periodic, &mut dom) {
        return SolveOutcome::Exhausted;
    }

    let cands: Vec<Vec<u32>> = dom
        .iter()
        .map(|d| d.iter().enumerate().filter(|(_, &ok)| ok).map(|(i, _)| i as u32).collect())
        .collect();
    let mut dfs = Dfs { system, width, height, periodic, cands, grid: vec![0; width * height], budget };
    match dfs.place(0) {
        Walk::Found => {
            let mut grid = TilingGrid::new_filled(width, height, 0);
            for r in 0..height {
                for c in 0..width {
                    grid.set(c, r, dfs.grid[r * width + c]);
                }
            }
            grid.periodic = periodic;
            SolveOutcome::Found(grid)
        }
        Walk::Dead => SolveOutcome::Exhausted,
        Walk::Out => SolveOutcome::OutOfBudget,
    }
}

/// AC-3 over the grid constraint graph. Returns false when a domain empties.
fn propagate(
    system: &TileSystem,
    w: usize,
    h: usize,
    periodic: bool,
    dom: &mut [Vec<bool>],
) -> bool {
    let n = system.n_tiles() as usize;
    let cells = w * h;
    let mut queued = vec![true; cells];
    let mut queue: VecDeque<usize> = (0..cells).collect();

    // neighbor(u) enumerates (v, kind) where kind orients the constraint:
    // 0: v is left of u, 1: v is right of u, 2: v is above u, 3: v is below u
    let neighbors = |u: usize| -> Vec<(usize, u8)> {
        let (r, c) = (u / w, u % w);
        let mut out = Vec::with_capacity(4);
        if c > 0 {
            out.push((u - 1, 0));
        } else if periodic && w > 1 {
            out.push((r * w + (w - 1), 0));
        }
        if c + 1 < w {
            out.push((u + 1, 1));
        } else if periodic && w > 1 {
            out.push((r * w, 1));
        }
        if r > 0 {
            out.push((u - w, 2));
        } else if periodic && h > 1 {
            out.push(((h - 1) * w + c, 2));
        }
        if r + 1 < h {
            out.push((u + w, 3));
        } else if periodic && h > 1 {
            out.push((c, 3));
        }
        out
    };

    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        for (v, kind) in neighbors(u) {
            if v == u {
                continue;
            }
            // narrow dom[v]: keep x iff some y in dom[u] supports it
            let mut changed = false;
            for x in 0..n {
                if !dom[v][x] {
                    continue;
                }
                let supported = (0..n).any(|y| {
                    dom[u][y]
                        && match kind {
                            0 => system.h_contains(x as u32, y as u32),
                            1 => system.h_contains(y as u32, x as u32),
                            2 => system.v_contains(x as u32, y as u32),
                            _ => system.v_contains(y as u32, x as u32),
                        }
                });
                if !supported {
                    dom[v][x] = false;
                    changed = true;
                }
            }
            if changed {
                if dom[v].iter().all(|&ok| !ok) {
                    return false;
                }
                if !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    true
}

enum Walk {
    Found,
    Dead,
    Out,
}

struct Dfs<'a> {
    system: &'a TileSystem,
    width: usize,
    height: usize,
    periodic: bool,
    cands: Vec<Vec<u32>>,
    grid: Vec<u32>,
    budget: &'a mut u64,
}

impl Dfs<'_> {
    fn place(&mut self, pos: usize) -> Walk {
        if pos == self.width * self.height {
            return Walk::Found;
        }
        for i in 0..self.cands[pos].len() {
            let t = self.cands[pos][i];
            if *self.budget == 0 {
                return Walk::Out;
            }
            *self.budget -= 1;
            if self.consistent(pos, t) {
                self.grid[pos] = t;
                match self.place(pos + 1) {
                    Walk::Found => return Walk::Found,
                    Walk::Out => return Walk::Out,
                    Walk::Dead => {}
                }
            }
        }
        Walk::Dead
    }

    /// Row-major fill order: the left and upper neighbors are always placed,
    /// and wraparound partners in column 0 and row 0 are placed by the time
    /// the last column or row is reached.
    fn consistent(&self, pos: usize, t: u32) -> bool {
        let (w, h) = (self.width, self.height);
        let (r, c) = (pos / w, pos % w);
        if c > 0 && !self.system.h_contains(self.grid[pos - 1], t) {
            return false;
        }
        if r > 0 && !self.system.v_contains(self.grid[pos - w], t) {
            return false;
        }
        if self.periodic && c == w - 1 {
            let right = if w == 1 { t } else { self.grid[r * w] };
            if !self.system.h_contains(t, right) {
                return false;
            }
        }
        if self.periodic && r == h - 1 {
            let below = if h == 1 { t } else { self.grid[c] };
            if !self.system.v_contains(t, below) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::validate_tiling;

    fn checker() -> TileSystem {
        let mut s = TileSystem::new(vec!["a", "b"]).unwrap();
        s.add_h(0, 1).unwrap();
        s.add_h(1, 0).unwrap();
        s.add_v(0, 1).unwrap();
        s.add_v(1, 0).unwrap();
        s
    }

    #[test]
    fn bounded_checkerboard() {
        let s = checker();
        let out = solve_bounded(&s, 3, 0, 10_000);
        let g = out.found().expect("3x3 checkerboard tiles");
        assert!(validate_tiling(&s, g, false));
        assert_eq!(g.get(0, 0), 0);
        assert_eq!(g.get(1, 0), 1);
        assert_eq!(g.get(1, 1), 0);
    }

    #[test]
    fn periodic_checkerboard_needs_even_period() {
        let s = checker();
        assert!(matches!(solve_periodic(&s, 1, 1, 0, 10_000), SolveOutcome::Exhausted));
        let out = solve_periodic(&s, 2, 2, 0, 10_000);
        let g = out.found().expect("2x2 fundamental domain");
        assert_eq!((g.width(), g.height()), (2, 2));
        assert!(g.periodic);
        assert!(validate_tiling(&s, g, true));
    }

    #[test]
    fn periodic_single_tile() {
        let mut s = TileSystem::new(vec!["a"]).unwrap();
        s.add_h(0, 0).unwrap();
        s.add_v(0, 0).unwrap();
        let out = solve_periodic(&s, 3, 3, 0, 10_000);
        assert_eq!((out.found().unwrap().width(), out.found().unwrap().height()), (1, 1));
    }

    #[test]
    fn no_adjacencies_means_exhausted() {
        let s = TileSystem::new(vec!["a", "b"]).unwrap();
        assert!(matches!(solve_bounded(&s, 2, 0, 10_000), SolveOutcome::Exhausted));
        assert!(matches!(solve_periodic(&s, 2, 2, 0, 10_000), SolveOutcome::Exhausted));
    }

    #[test]
    fn budget_zero_reports_out_of_budget() {
        let s = checker();
        assert!(matches!(solve_bounded(&s, 2, 0, 0), SolveOutcome::OutOfBudget));
    }

    #[test]
    fn pins_are_respected() {
        let s = checker();
        let mut budget = 10_000;
        let out = solve_pinned(&s, 2, 2, &[(1, 1, 1)], false, &mut budget);
        let g = out.found().unwrap();
        assert_eq!(g.get(1, 1), 1);
        assert_eq!(g.get(0, 0), 1);

        // contradictory pins die in propagation without spending budget
        let mut budget = 10_000;
        let out = solve_pinned(&s, 2, 2, &[(0, 0, 0), (1, 0, 0)], false, &mut budget);
        assert!(matches!(out, SolveOutcome::Exhausted));
        assert_eq!(budget, 10_000);
    }

    #[test]
    fn solution_respects_designated_tile_occurrence() {
        // two tiles, each self-tileable, no cross pairs: pinning tile 1
        // must produce the all-1 torus even though all-0 also tiles
        let mut s = TileSystem::new(vec!["a", "b"]).unwrap();
        s.add_h(0, 0).unwrap();
        s.add_v(0, 0).unwrap();
        s.add_h(1, 1).unwrap();
        s.add_v(1, 1).unwrap();
        let out = solve_periodic(&s, 2, 2, 1, 10_000);
        let g = out.found().unwrap();
        assert_eq!(g.get(0, 0), 1);
    }
}
