//! Closed-form memory-load points of the private caching constructions.

use num_bigint::BigUint;
use num_traits::One;

use crate::algebra::{binom, rat, rat_big, rat_int, Rational, TradeoffPoint};
use crate::bounds::pir_capacity;
use crate::pir::{time_share, SharedPir};

use super::compose::composed_subpacketization;
use super::CachingError;

#[derive(Clone, Debug)]
pub enum Generator {
    /// Virtual users: `(t/K, (C(NK,t+1) - C(NK-N,t+1)) / C(NK,t))`, t in [0, NK].
    VirtualUsers,
    /// Composition with a capacity-achieving PIR, both servers weighted 1/2.
    CapacityPir,
    /// Composition with the small-N schemes; `mu1` weights the N=2 scheme.
    SmallN { mu1: Rational },
    /// Privacy-key scheme: `(1 + t(N-1)/K, (C(K,t+1) - C(K-min(N-1,K),t+1)) / C(K,t))`.
    PrivacyKey,
    /// Composition with an arbitrary PIR scheme time-shared with weight `mu1`.
    Compose { pir: SharedPir, mu1: Rational },
}

impl Generator {
    pub fn name(&self) -> String {
        match self {
            Generator::VirtualUsers => "vu".into(),
            Generator::CapacityPir => "cor1".into(),
            Generator::SmallN { .. } => "cor_smallN".into(),
            Generator::PrivacyKey => "privacy_key".into(),
            Generator::Compose { pir, .. } => format!("compose:{}", pir.name()),
        }
    }
}

fn endpoint(m: Rational, r: Rational) -> TradeoffPoint {
    TradeoffPoint::new(m, r, BigUint::one())
}

/// Points `(Nt/K + (1-t/K)·c1, c2·(K-t)/(t+1))` for t in [0, K-1],
/// with the corner points (0, N) and (N, 0).
fn composition_points(n: usize, k: usize, c1: &Rational, c2: &Rational, f: usize) -> Vec<TradeoffPoint> {
    let (n, k) = (n as i64, k as i64);
    let mut pts = vec![endpoint(rat_int(0), rat_int(n))];
    for t in 0..k {
        let m = rat(n * t, k) + (rat_int(1) - rat(t, k)) * c1;
        let r = c2 * rat(k - t, t + 1);
        pts.push(TradeoffPoint::new(m, r, composed_subpacketization(k as usize, t as usize, f)));
    }
    pts.push(endpoint(rat_int(n), rat_int(0)));
    pts
}

/// Raw achievable points of a generator (apply the envelope separately).
pub fn tradeoff_points(generator: &Generator, n: usize, k: usize) -> Result<Vec<TradeoffPoint>, CachingError> {
    if n == 0 || k == 0 {
        return Err(CachingError::BadParams("N and K must be positive".into()));
    }
    let (nn, kk) = (n as u64, k as u64);
    Ok(match generator {
        Generator::VirtualUsers => {
            let nk = nn * kk;
            (0..=nk as i64)
                .map(|t| {
                    let sub = binom(nk, t);
                    let load = binom(nk, t + 1) - binom(nk - nn, t + 1);
                    TradeoffPoint::new(rat(t, k as i64), rat_big(&load, &sub), sub)
                })
                .collect()
        }
        Generator::CapacityPir => {
            let half = pir_capacity(n, 2) / rat_int(2);
            composition_points(n, k, &half, &half, 1)
        }
        Generator::SmallN { mu1 } => {
            let mu2 = rat_int(1) - mu1;
            let (c1, c2) = match n {
                2 => {
                    if mu1 <= &rat_int(0) || mu1 >= &rat_int(1) {
                        return Err(CachingError::BadParams("N=2 needs 0 < mu1 < 1".into()));
                    }
                    (mu1 / rat_int(2) + &mu2, mu1 + &mu2 / rat_int(2))
                }
                3 | 4 => (rat_int(1), rat_int(1)),
                _ => return Err(CachingError::BadParams("small-N points exist for N in {2,3,4}".into())),
            };
            composition_points(n, k, &c1, &c2, 1)
        }
        Generator::PrivacyKey => {
            let drop = (n as u64 - 1).min(kk);
            (0..=k as i64)
                .map(|t| {
                    let sub = binom(kk, t);
                    let load = binom(kk, t + 1) - binom(kk - drop, t + 1);
                    let m = rat_int(1) + rat(t * (n as i64 - 1), k as i64);
                    TradeoffPoint::new(m, rat_big(&load, &sub), sub)
                })
                .collect()
        }
        Generator::Compose { pir, mu1 } => {
            if pir.messages() != n {
                return Err(CachingError::PirMismatch {
                    pir: pir.messages(),
                    n,
                });
            }
            let shared = time_share(pir.clone(), mu1)?;
            let (c1, c2) = shared.download_costs();
            composition_points(n, k, &c1, &c2, shared.subpacketization())
        }
    })
}

/// The raw point of cache parameter `t` (no corner points).
pub fn tradeoff_point_at(generator: &Generator, n: usize, k: usize, t: usize) -> Result<TradeoffPoint, CachingError> {
    let (offset, max) = match generator {
        Generator::VirtualUsers => (0, n * k),
        Generator::PrivacyKey => (0, k),
        _ => (1, k.saturating_sub(1)),
    };
    if t > max {
        return Err(CachingError::BadT { t, max });
    }
    let pts = tradeoff_points(generator, n, k)?;
    Ok(pts[t + offset].clone())
}
