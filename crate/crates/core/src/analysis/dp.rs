use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::Serialize;

use super::bounds::{f_large, f_small, g_large, g_small};
use super::{rat, QSqrt6, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// `M(w,d)`: every node at least 1-marked.
    Large,
    /// `M(w,d,h)`: arbitrary stage with a heavy-node budget `h`.
    Small,
}

/// Inclusive grid ranges. `h_max` is ignored for [`TableKind::Large`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub w_min: i64,
    pub w_max: i64,
    pub d_max: i64,
    pub h_max: i64,
}

impl Grid {
    pub fn large(w_min: i64, w_max: i64, d_max: i64) -> Self {
        Grid {
            w_min,
            w_max,
            d_max,
            h_max: 0,
        }
    }

    pub fn small(w_min: i64, w_max: i64, d_max: i64, h_max: i64) -> Self {
        Grid {
            w_min,
            w_max,
            d_max,
            h_max,
        }
    }

    pub fn default_large() -> Self {
        Grid::large(-3, 60, 30)
    }

    pub fn default_small() -> Self {
        Grid::small(-3, 60, 30, 30)
    }

    pub fn points(&self) -> u64 {
        let w = (self.w_max - self.w_min + 1).max(0) as u64;
        w * (self.d_max + 1).max(0) as u64 * (self.h_max + 1).max(0) as u64
    }
}

/// Exact DP values on a grid.
///
/// For `w ≤ 0` no shoot constraint remains, so `M` does not depend on `w`
/// there; lookups below the stored range clamp to its lower edge.
#[derive(Clone, Debug)]
pub struct BoundTable {
    pub kind: TableKind,
    pub grid: Grid,
    w_lo: i64,
    // Indexed [d][h][w - w_lo].
    m: Vec<Vec<Vec<Rational>>>,
}

impl BoundTable {
    fn width(&self) -> usize {
        (self.grid.w_max - self.w_lo + 1) as usize
    }

    fn lookup(&self, w: i64, d: i64, h: i64) -> Rational {
        if h < 0 {
            return Rational::zero();
        }
        let w = w.max(self.w_lo);
        if w > self.grid.w_max || d > self.grid.d_max || h > self.grid.h_max || d < 0 {
            panic!("M({w},{d},{h}) outside the table");
        }
        self.m[d as usize][h as usize][(w - self.w_lo) as usize].clone()
    }

    /// `M(w,d)` or `M(w,d,h)`; `h` is ignored for the large table.
    pub fn m(&self, w: i64, d: i64, h: i64) -> Rational {
        match self.kind {
            TableKind::Large => self.lookup(w, d, 0),
            TableKind::Small => self.lookup(w, d, h),
        }
    }

    pub fn f(&self, w: i64, d: i64, h: i64) -> QSqrt6 {
        match self.kind {
            TableKind::Large => f_large(w, d).into(),
            TableKind::Small => f_small(w, d, h),
        }
    }

    /// `G_i`, `i` in `1..=2` (large) or `1..=4` (small).
    pub fn g(&self, i: usize, w: i64, d: i64, h: i64) -> QSqrt6 {
        match self.kind {
            TableKind::Large => g_large(i, w, d).into(),
            TableKind::Small => g_small(i, w, d, h),
        }
    }

    /// One row per grid point: `w,d[,h],M,F` with `F` as a decimal
    /// approximation and `M` exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let g = self.grid;
        match self.kind {
            TableKind::Large => out.push_str("w,d,M,F\n"),
            TableKind::Small => out.push_str("w,d,h,M,F\n"),
        }
        for d in 0..=g.d_max {
            for h in 0..=g.h_max {
                for w in g.w_min..=g.w_max {
                    let m = self.m(w, d, h);
                    let f = self.f(w, d, h).to_f64();
                    let _ = match self.kind {
                        TableKind::Large => writeln!(out, "{w},{d},{m},{f}"),
                        TableKind::Small => writeln!(out, "{w},{d},{h},{m},{f}"),
                    };
                }
            }
        }
        out
    }
}

fn empty_table(kind: TableKind, grid: Grid) -> BoundTable {
    let w_lo = grid.w_min.min(0);
    let mut t = BoundTable {
        kind,
        grid,
        w_lo,
        m: Vec::new(),
    };
    let base: Vec<Rational> = (w_lo..=grid.w_max)
        .map(|w| {
            if w <= 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    debug_assert_eq!(base.len(), t.width());
    t.m.push(vec![base; (grid.h_max + 1) as usize]);
    t
}

fn max_of(xs: impl IntoIterator<Item = Rational>) -> Rational {
    xs.into_iter()
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// `M(w,d) = max{(5/2)M(w−1,d−1), 2M(w−2,d−1), (3/2)M(w−3,d−1)}` with
/// `M(w,0) = [w ≤ 0]`.
pub fn dp_m_large(grid: Grid) -> BoundTable {
    let grid = Grid { h_max: 0, ..grid };
    let mut t = empty_table(TableKind::Large, grid);
    let steps = [(1, rat(5, 2)), (2, rat(2, 1)), (3, rat(3, 2))];
    for d in 1..=grid.d_max {
        let row = (t.w_lo..=grid.w_max)
            .map(|w| max_of(steps.iter().map(|(k, c)| c * t.lookup(w - k, d - 1, 0))))
            .collect();
        t.m.push(vec![row]);
    }
    t
}

/// `M(w,d,h) = max{(9/4)M(w−1,d−1,h), 2M(w−2,d−1,h−1), (7/4)M(w−2,d−1,h),
/// (3/2)M(w−3,d−1,h)}` with `M(w,0,h) = [w ≤ 0 ∧ h ≥ 0]`.
pub fn dp_m_small(grid: Grid) -> BoundTable {
    let mut t = empty_table(TableKind::Small, grid);
    let steps = [
        (1, 0, rat(9, 4)),
        (2, 1, rat(2, 1)),
        (2, 0, rat(7, 4)),
        (3, 0, rat(3, 2)),
    ];
    for d in 1..=grid.d_max {
        let layer = (0..=grid.h_max)
            .map(|h| {
                (t.w_lo..=grid.w_max)
                    .map(|w| {
                        max_of(
                            steps
                                .iter()
                                .map(|(k, dh, c)| c * t.lookup(w - k, d - 1, h - dh)),
                        )
                    })
                    .collect()
            })
            .collect();
        t.m.push(layer);
    }
    t
}
