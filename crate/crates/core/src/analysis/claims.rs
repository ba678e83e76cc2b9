use rayon::prelude::*;
use serde::Serialize;

use super::bounds::{g3_alt, small_regime};
use super::dp::{dp_m_large, dp_m_small, BoundTable, Grid};
use super::QSqrt6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimWitness {
    pub w: i64,
    pub d: i64,
    pub h: Option<i64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub name: String,
    pub checked: u64,
    pub violations: u64,
    /// First violating point, if any.
    pub witness: Option<ClaimWitness>,
}

impl ClaimResult {
    fn new(name: &str) -> Self {
        ClaimResult {
            name: name.to_string(),
            checked: 0,
            violations: 0,
            witness: None,
        }
    }

    fn check(&mut self, ok: bool, w: i64, d: i64, h: Option<i64>, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(ClaimWitness {
                    w,
                    d,
                    h,
                    detail: detail(),
                });
            }
        }
    }

    /// Folds a later slice of the same claim into this one.
    fn absorb(&mut self, later: ClaimResult) {
        self.checked += later.checked;
        self.violations += later.violations;
        if self.witness.is_none() {
            self.witness = later.witness;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub large_grid: Grid,
    pub small_grid: Grid,
    pub claims: Vec<ClaimResult>,
    pub all_pass: bool,
}

impl ClaimReport {
    pub fn get(&self, name: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.name == name)
    }
}

/// `lhs ≤ rhs` must hold exactly when `le` does, and `lhs = rhs` exactly
/// when `eq` does.
fn crossover(lhs: &QSqrt6, rhs: &QSqrt6, le: bool, eq: bool) -> bool {
    (lhs <= rhs) == le && (lhs == rhs) == eq
}

/// Runs `rows` for every `d` in parallel and merges the per-row results
/// in ascending `d`, so witnesses are the same as a sequential scan.
fn by_depth(d_max: i64, rows: impl Fn(i64) -> Vec<ClaimResult> + Sync + Send) -> Vec<ClaimResult> {
    let parts: Vec<Vec<ClaimResult>> = (0..=d_max).into_par_iter().map(&rows).collect();
    let mut iter = parts.into_iter();
    let mut acc = iter.next().unwrap_or_default();
    for part in iter {
        for (a, b) in acc.iter_mut().zip(part) {
            a.absorb(b);
        }
    }
    acc
}

fn large_claims(t: &BoundTable) -> Vec<ClaimResult> {
    by_depth(t.grid.d_max, |d| large_row(t, d))
}

fn small_claims(t: &BoundTable) -> Vec<ClaimResult> {
    by_depth(t.grid.d_max, |d| small_row(t, d))
}

fn large_row(t: &BoundTable, d: i64) -> Vec<ClaimResult> {
    let mut le_g1 = ClaimResult::new("M(w,d) <= G1(w,d)");
    let mut le_g2 = ClaimResult::new("M(w,d) <= G2(w,d)");
    let mut le_f = ClaimResult::new("M(w,d) <= F(w,d)");
    let mut g_eq_f = ClaimResult::new("min(G1,G2)(w,d) = F(w,d)");
    let mut cross = ClaimResult::new("G1(w,d) <= G2(w,d) iff w <= 2d");
    let g = t.grid;
    for w in g.w_min..=g.w_max {
        let m = QSqrt6::from(t.m(w, d, 0));
        let g1 = t.g(1, w, d, 0);
        let g2 = t.g(2, w, d, 0);
        let f = t.f(w, d, 0);
        let show = |x: &QSqrt6| format!("M = {m}, bound = {x}");
        le_g1.check(m <= g1, w, d, None, || show(&g1));
        le_g2.check(m <= g2, w, d, None, || show(&g2));
        le_f.check(m <= f, w, d, None, || show(&f));
        let min = g1.clone().min(g2.clone());
        g_eq_f.check(min == f, w, d, None, || format!("min G = {min}, F = {f}"));
        cross.check(
            crossover(&g1, &g2, w <= 2 * d, w == 2 * d),
            w,
            d,
            None,
            || format!("G1 = {g1}, G2 = {g2}"),
        );
    }
    vec![le_g1, le_g2, le_f, g_eq_f, cross]
}

fn small_row(t: &BoundTable, d: i64) -> Vec<ClaimResult> {
    let mut le_g: Vec<ClaimResult> = (1..=4)
        .map(|i| ClaimResult::new(&format!("M(w,d,h) <= G{i}(w,d,h)")))
        .collect();
    let mut le_f = ClaimResult::new("M(w,d,h) <= F(w,d,h)");
    let mut cross12 = ClaimResult::new("G1(w,d,h) <= G2(w,d,h) iff w <= d");
    let mut cross23 = ClaimResult::new("G2(w,d,h) <= G3(w,d,h) iff w <= d+h");
    let mut cross34 = ClaimResult::new("G3(w,d,h) <= G4(w,d,h) iff w <= 3d-h");
    let mut g3_forms = ClaimResult::new("G3 written forms agree");
    let mut g_eq_f = ClaimResult::new("min(G1..G4)(w,d,h) = F(w,d,h)");
    let g = t.grid;
    for h in 0..=g.h_max {
        for w in g.w_min..=g.w_max {
            let at = Some(h);
            let m = QSqrt6::from(t.m(w, d, h));
            let gs: Vec<QSqrt6> = (1..=4).map(|i| t.g(i, w, d, h)).collect();
            let f = t.f(w, d, h);
            for (i, c) in le_g.iter_mut().enumerate() {
                c.check(m <= gs[i], w, d, at, || format!("M = {m}, G = {}", gs[i]));
            }
            le_f.check(m <= f, w, d, at, || format!("M = {m}, F = {f}"));
            cross12.check(crossover(&gs[0], &gs[1], w <= d, w == d), w, d, at, || {
                format!("G1 = {}, G2 = {}", gs[0], gs[1])
            });
            cross23.check(
                crossover(&gs[1], &gs[2], w <= d + h, w == d + h),
                w,
                d,
                at,
                || format!("G2 = {}, G3 = {}", gs[1], gs[2]),
            );
            cross34.check(
                crossover(&gs[2], &gs[3], w <= 3 * d - h, w == 3 * d - h),
                w,
                d,
                at,
                || format!("G3 = {}, G4 = {}", gs[2], gs[3]),
            );
            let alt = g3_alt(w, d, h);
            g3_forms.check(alt == gs[2], w, d, at, || format!("{} vs {alt}", gs[2]));
            let min = gs.iter().min().cloned().unwrap_or_else(QSqrt6::zero);
            g_eq_f.check(min == f, w, d, at, || {
                format!("min G = {min}, F = {f} (case {:?})", small_regime(w, d, h))
            });
        }
    }
    let mut out = le_g;
    out.extend([le_f, cross12, cross23, cross34, g3_forms, g_eq_f]);
    out
}

/// Checks every pointwise claim about the two DPs and their closed-form
/// bounds, exactly, on the given grids.
pub fn verify_bound_claims(large: Grid, small: Grid) -> ClaimReport {
    let (lt, st) = rayon::join(|| dp_m_large(large), || dp_m_small(small));
    let (mut claims, small_results) = rayon::join(|| large_claims(&lt), || small_claims(&st));
    claims.extend(small_results);
    let all_pass = claims.iter().all(|c| c.passed());
    ClaimReport {
        large_grid: lt.grid,
        small_grid: st.grid,
        claims,
        all_pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_passes() {
        let r = verify_bound_claims(Grid::large(-3, 12, 6), Grid::small(-3, 10, 5, 5));
        for c in &r.claims {
            assert!(c.passed(), "{c:?}");
        }
        assert!(r.all_pass);
    }

    #[test]
    fn overlapping_ranges_take_the_smaller_piece() {
        // d = 1, h = 5, w = 3: both the second and fourth ranges apply.
        let r = verify_bound_claims(Grid::large(0, 0, 0), Grid::small(3, 3, 1, 5));
        assert!(r.get("min(G1..G4)(w,d,h) = F(w,d,h)").unwrap().passed());
        assert_eq!(small_regime(3, 1, 5), crate::analysis::Regime::Fourth);
        assert!(r.all_pass);
    }
}
