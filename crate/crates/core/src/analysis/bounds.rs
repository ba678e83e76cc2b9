use serde::Serialize;

use super::{rat, rpow, QSqrt6, Rational};

/// `G₁(w,d) = (5/2)^(2d−w)·2^(w−d)` (`i = 1`) or
/// `G₂(w,d) = 2^(3d−w)·(3/2)^(w−2d)` (`i = 2`).
pub fn g_large(i: usize, w: i64, d: i64) -> Rational {
    match i {
        1 => rpow(&rat(5, 2), 2 * d - w) * rpow(&rat(2, 1), w - d),
        2 => rpow(&rat(2, 1), 3 * d - w) * rpow(&rat(3, 2), w - 2 * d),
        _ => panic!("g_large index {i} not in 1..=2"),
    }
}

/// Bound on `ψ(u)` for a subtree of depth `d` whose shoots all have
/// weight at least `w`, when every node is at least 1-marked.
pub fn f_large(w: i64, d: i64) -> Rational {
    if w <= 2 * d {
        g_large(1, w, d)
    } else {
        g_large(2, w, d)
    }
}

/// A piece of the small-`t0` bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `w ≤ d`
    First,
    /// `d ≤ w ≤ d+h`
    Second,
    /// `d+h ≤ w ≤ 3d−h`
    Third,
    /// `3d−h ≤ w`
    Fourth,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::First, Regime::Second, Regime::Third, Regime::Fourth];

    pub fn index(self) -> usize {
        self as usize + 1
    }

    /// Whether the piece's range condition holds at `(w,d,h)`.
    pub fn applies(self, w: i64, d: i64, h: i64) -> bool {
        match self {
            Regime::First => w <= d,
            Regime::Second => d <= w && w <= d + h,
            Regime::Third => d + h <= w && w <= 3 * d - h,
            Regime::Fourth => 3 * d - h <= w,
        }
    }
}

/// The piece that defines `F(w,d,h)`.
///
/// For `h ≤ d` the ranges tile the line and neighbouring pieces agree on
/// shared endpoints. For `h > d` the second and fourth ranges overlap
/// and can disagree; the smaller applicable piece is taken (earlier on
/// ties), which keeps `F = min(G₁..G₄)`.
pub fn small_regime(w: i64, d: i64, h: i64) -> Regime {
    let mut best: Option<(Regime, QSqrt6)> = None;
    for r in Regime::ALL.into_iter().filter(|r| r.applies(w, d, h)) {
        let v = g_small(r.index(), w, d, h);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((r, v));
        }
    }
    best.map(|(r, _)| r).expect("the four ranges cover every w")
}

/// The four candidate bounds `G₁..G₄(w,d,h)`.
pub fn g_small(i: usize, w: i64, d: i64, h: i64) -> QSqrt6 {
    let nine_q = rat(9, 4);
    match i {
        1 => rpow(&nine_q, d).into(),
        2 => (rpow(&nine_q, 2 * d - w) * rpow(&rat(2, 1), w - d)).into(),
        3 => QSqrt6::pow_27_8_half(w - d - h) * &(rpow(&nine_q, 2 * d - w) * rpow(&rat(2, 1), h)),
        4 => (rpow(&rat(2, 1), 3 * d - w) * rpow(&rat(3, 2), w - 2 * d)).into(),
        _ => panic!("g_small index {i} not in 1..=4"),
    }
}

/// The second written form of `G₃`: `2^h·(27/8)^((3d−w−h)/2)·(3/2)^(w−2d)`.
pub fn g3_alt(w: i64, d: i64, h: i64) -> QSqrt6 {
    QSqrt6::pow_27_8_half(3 * d - w - h) * &(rpow(&rat(2, 1), h) * rpow(&rat(3, 2), w - 2 * d))
}

/// Bound on `ψ(u)` for an arbitrary-stage subtree of depth `d`, shoot
/// weight at least `w` and at most `h` heavy nodes per shoot.
pub fn f_small(w: i64, d: i64, h: i64) -> QSqrt6 {
    g_small(small_regime(w, d, h).index(), w, d, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_examples() {
        assert_eq!(f_large(2, 1), rat(2, 1));
        assert_eq!(f_large(0, 1), rat(25, 8));
        assert_eq!(f_large(3, 1), rat(3, 2));
        assert_eq!(f_large(4, 2), rat(4, 1));
    }

    #[test]
    fn small_examples() {
        assert_eq!(f_small(1, 1, 0), QSqrt6::from(rat(9, 4)));
        assert_eq!(f_small(4, 2, 0), QSqrt6::from(rat(27, 8)));
        assert_eq!(small_regime(4, 2, 0), Regime::Third);
        assert_eq!(f_small(6, 2, 0), QSqrt6::from(rat(9, 4)));
        assert_eq!(small_regime(6, 2, 0), Regime::Third);
        assert_eq!(f_small(7, 2, 0), QSqrt6::from(rat(27, 16)));
        assert_eq!(small_regime(7, 2, 0), Regime::Fourth);
    }

    #[test]
    fn odd_exponent_lands_in_surd() {
        // w − d − h = 1
        let v = f_small(3, 2, 0);
        assert!(v.as_rational().is_none());
        assert_eq!(&v * &v, QSqrt6::from(rat(27, 8) * rpow(&rat(9, 4), 2)));
    }
}
