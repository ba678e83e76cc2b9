use num_bigint::BigInt;
use num_integer::binomial;
use serde::Serialize;

use super::bounds::{f_large, f_small, g_small, small_regime, Regime};
use super::{rat, rpow, QSqrt6, Rational};
use crate::error::AnalysisError;

/// Controlled-stage quantities of a level-`t0` node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProfileParams {
    pub t0: usize,
    pub t1: usize,
    pub m_r_prime: usize,
    pub m_b: usize,
}

impl ProfileParams {
    pub fn new(t0: usize, t1: usize, m_r_prime: usize, m_b: usize) -> Self {
        ProfileParams {
            t0,
            t1,
            m_r_prime,
            m_b,
        }
    }

    /// `I(u₀) = 3t₀ + 2t₁ + m'R + mB`.
    pub fn i_u0(&self) -> usize {
        3 * self.t0 + 2 * self.t1 + self.m_r_prime + self.m_b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateTerm {
    /// Number of marked κ₁ edges of `C'_R` on the path.
    pub i: usize,
    pub w: i64,
    pub d: i64,
    pub h: i64,
    pub regime: Regime,
    /// `C(m'R, i)·(3/8)^i`.
    #[serde(serialize_with = "super::serialize_rational")]
    pub weight: Rational,
    pub f: QSqrt6,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeCertificate {
    pub n: usize,
    pub params: ProfileParams,
    pub terms: Vec<CertificateTerm>,
    pub n_u0: QSqrt6,
    pub i_u0: usize,
    /// `Third` when `I(u₀) ≤ n`, else `Fourth`.
    pub predicted_regime: Regime,
}

impl NodeCertificate {
    /// `d + h ≤ w` at every term.
    pub fn weight_dominates(&self) -> bool {
        self.terms.iter().all(|t| t.d + t.h <= t.w)
    }

    /// Every term's bound equals the piece selected by `I(u₀)`.
    pub fn regime_consistent(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.f == g_small(self.predicted_regime.index(), t.w, t.d, t.h))
    }

    /// `3^t₀·N(u₀)`.
    pub fn scaled(&self) -> QSqrt6 {
        self.n_u0.clone() * &rpow(&rat(3, 1), self.params.t0 as i64)
    }
}

fn refuse(msg: String) -> AnalysisError {
    AnalysisError::Refused(msg)
}

/// Evaluates `N(u₀)` exactly for the given profile.
///
/// Refuses odd `n`, profiles violating `m'R ≤ t₁`, `mB + t₁ ≤ t₀`,
/// `4t₀ ≤ n`, and profiles whose controlled stage would run past depth
/// `n/2` (`t₀ + t₁ + m'R > n/2`).
pub fn n_of_u0(n: usize, p: ProfileParams) -> Result<NodeCertificate, AnalysisError> {
    if !n.is_multiple_of(2) {
        return Err(refuse(format!("n = {n} is odd")));
    }
    if p.m_r_prime > p.t1 {
        return Err(refuse(format!(
            "m'R = {} exceeds t1 = {}",
            p.m_r_prime, p.t1
        )));
    }
    if p.m_b + p.t1 > p.t0 {
        return Err(refuse(format!(
            "mB + t1 = {} exceeds t0 = {}",
            p.m_b + p.t1,
            p.t0
        )));
    }
    if 4 * p.t0 > n {
        return Err(refuse(format!("t0 = {} exceeds n/4", p.t0)));
    }
    if p.t0 + p.t1 + p.m_r_prime > n / 2 {
        return Err(refuse(format!(
            "t0 + t1 + m'R = {} exceeds n/2",
            p.t0 + p.t1 + p.m_r_prime
        )));
    }
    let half = (n / 2) as i64;
    let (t0, t1, mr, mb) = (p.t0 as i64, p.t1 as i64, p.m_r_prime as i64, p.m_b as i64);
    let mut terms = Vec::with_capacity(p.m_r_prime + 1);
    let mut sum = QSqrt6::zero();
    for i in 0..=mr {
        let w = half - 2 * i - t1;
        let d = half - t0 - t1 - i;
        let h = mr + mb - i;
        let weight = Rational::from_integer(binomial(BigInt::from(mr), BigInt::from(i)))
            * rpow(&rat(3, 8), i);
        let f = f_small(w, d, h);
        sum = sum + f.clone() * &weight;
        terms.push(CertificateTerm {
            i: i as usize,
            w,
            d,
            h,
            regime: small_regime(w, d, h),
            weight,
            f,
        });
    }
    let prefactor = rpow(&rat(5, 2), t1) * rpow(&rat(4, 5), mr);
    let i_u0 = p.i_u0();
    Ok(NodeCertificate {
        n,
        params: p,
        terms,
        n_u0: sum * &prefactor,
        i_u0,
        predicted_regime: if i_u0 <= n {
            Regime::Third
        } else {
            Regime::Fourth
        },
    })
}

/// `6^(n/4)`, exact for every even `n`.
pub fn six_pow_quarter(n: usize) -> QSqrt6 {
    let six = rat(6, 1);
    QSqrt6::half_pow(&six, &QSqrt6::sqrt6(), (n / 2) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LargeRouteRow {
    pub t0: usize,
    /// `4t₀ − n`, i.e. `4Δ`.
    pub delta_quarters: i64,
    /// `3^t₀·F(n/2, n/2 − t₀)`.
    #[serde(serialize_with = "super::serialize_rational")]
    pub value: Rational,
    pub within_bound: bool,
    /// `value = 6^(n/4)·(27/32)^Δ`; only evaluated when `4 | n`.
    pub matches_closed_form: Option<bool>,
}

/// The `t₀ ≥ n/4` route at every admissible `t₀`.
pub fn large_route_sweep(n: usize) -> Result<Vec<LargeRouteRow>, AnalysisError> {
    if !n.is_multiple_of(2) {
        return Err(refuse(format!("n = {n} is odd")));
    }
    let bound = six_pow_quarter(n);
    let half = n / 2;
    let t0_min = n.div_ceil(4);
    Ok((t0_min..=half)
        .map(|t0| {
            let value = rpow(&rat(3, 1), t0 as i64) * f_large(half as i64, (half - t0) as i64);
            let within_bound = QSqrt6::from(value.clone()) <= bound;
            let matches_closed_form = n.is_multiple_of(4).then(|| {
                let delta = (t0 - n / 4) as i64;
                value == rpow(&rat(6, 1), (n / 4) as i64) * rpow(&rat(27, 32), delta)
            });
            LargeRouteRow {
                t0,
                delta_quarters: 4 * t0 as i64 - n as i64,
                value,
                within_bound,
                matches_closed_form,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ControlledSweep {
    pub profiles_checked: u64,
    pub max_value: QSqrt6,
    pub argmax: Option<ProfileParams>,
    /// The maximum over profiles with `I(u₀) = n`, if any exist.
    pub max_at_i_eq_n: Option<QSqrt6>,
    pub bound_violations: Vec<ProfileParams>,
    pub weight_violations: Vec<ProfileParams>,
    pub regime_mismatches: Vec<ProfileParams>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalBoundReport {
    pub n: usize,
    pub bound: QSqrt6,
    pub large_route: Vec<LargeRouteRow>,
    pub controlled: ControlledSweep,
    pub pass: bool,
}

fn feasible_profiles(n: usize) -> Vec<ProfileParams> {
    let mut out = Vec::new();
    for t0 in 0..=n / 4 {
        for t1 in 0..=t0 {
            for m_b in 0..=t0 - t1 {
                for m_r_prime in 0..=t1 {
                    if t0 + t1 + m_r_prime <= n / 2 {
                        out.push(ProfileParams::new(t0, t1, m_r_prime, m_b));
                    }
                }
            }
        }
    }
    out
}

/// Verifies `3^t₀·F(n/2, n/4−Δ) ≤ 6^(n/4)` for every `Δ`, and
/// `3^t₀·N(u₀) ≤ 6^(n/4)` for the given profiles, or for every feasible
/// profile at `n` when `profiles` is `None`.
pub fn global_bound_check(
    n: usize,
    profiles: Option<&[ProfileParams]>,
) -> Result<GlobalBoundReport, AnalysisError> {
    let large_route = large_route_sweep(n)?;
    let bound = six_pow_quarter(n);
    let list = match profiles {
        Some(p) => p.to_vec(),
        None => feasible_profiles(n),
    };
    let mut sweep = ControlledSweep {
        profiles_checked: 0,
        max_value: QSqrt6::zero(),
        argmax: None,
        max_at_i_eq_n: None,
        bound_violations: Vec::new(),
        weight_violations: Vec::new(),
        regime_mismatches: Vec::new(),
    };
    for p in list {
        let cert = n_of_u0(n, p)?;
        let v = cert.scaled();
        sweep.profiles_checked += 1;
        if v > bound {
            sweep.bound_violations.push(p);
        }
        if !cert.weight_dominates() {
            sweep.weight_violations.push(p);
        }
        if !cert.regime_consistent() {
            sweep.regime_mismatches.push(p);
        }
        if cert.i_u0 == n && sweep.max_at_i_eq_n.as_ref().is_none_or(|m| v > *m) {
            sweep.max_at_i_eq_n = Some(v.clone());
        }
        if sweep.argmax.is_none() || v > sweep.max_value {
            sweep.max_value = v;
            sweep.argmax = Some(p);
        }
    }
    let pass = large_route
        .iter()
        .all(|r| r.within_bound && r.matches_closed_form != Some(false))
        && sweep.bound_violations.is_empty()
        && sweep.weight_violations.is_empty()
        && sweep.regime_mismatches.is_empty();
    Ok(GlobalBoundReport {
        n,
        bound,
        large_route,
        controlled: sweep,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_certificate() {
        let c = n_of_u0(8, ProfileParams::new(2, 0, 0, 0)).unwrap();
        assert_eq!(c.terms.len(), 1);
        assert_eq!(c.n_u0, QSqrt6::from(rat(27, 8)));
        assert_eq!(c.i_u0, 6);
        assert_eq!(c.predicted_regime, Regime::Third);
        assert!(c.regime_consistent());
    }

    #[test]
    fn i_of_profile() {
        assert_eq!(ProfileParams::new(2, 1, 1, 1).i_u0(), 10);
    }

    #[test]
    fn refusals() {
        assert!(n_of_u0(7, ProfileParams::new(1, 0, 0, 0)).is_err());
        assert!(n_of_u0(8, ProfileParams::new(2, 0, 1, 0)).is_err());
        assert!(n_of_u0(8, ProfileParams::new(2, 1, 0, 2)).is_err());
        assert!(n_of_u0(8, ProfileParams::new(3, 0, 0, 0)).is_err());
    }

    #[test]
    fn large_route_n8() {
        let rows = large_route_sweep(8).unwrap();
        assert_eq!(rows[0].t0, 2);
        assert_eq!(rows[0].value, rat(36, 1));
        assert_eq!(rows[1].value, rat(36, 1) * rat(27, 32));
        assert!(rows.iter().all(|r| r.within_bound));
    }

    #[test]
    fn six_quarter_powers() {
        assert_eq!(six_pow_quarter(8), QSqrt6::from(rat(36, 1)));
        assert_eq!(six_pow_quarter(6), QSqrt6::new(rat(0, 1), rat(6, 1)));
    }
}
