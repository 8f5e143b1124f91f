//! Delay laws of a single (master, node) channel.
//!
//! Sending `l` coded rows over a link with rate `gamma` using bandwidth
//! fraction `b` takes an exponential time with rate `b*gamma/l`. Computing
//! them with computing-power fraction `k` takes `a*l/k` plus an exponential
//! time with rate `k*u/l`. The two parts are independent.

use crate::error::{Error, Result};
use crate::rng::{exponential, UniformSource};
use crate::scalar::Real;
use crate::scenario::LinkParams;

/// Relative rate gap below which the equal-rate CDF is used.
pub const EQUAL_RATE_REL_TOL: f64 = 1e-9;

/// A link after applying resource fractions, carrying a load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveChannel<T: Real = f64> {
    /// `b*gamma`, or `None` when there is no communication stage.
    pub comm_rate: Option<T>,
    /// `k*u`.
    pub comp_rate: T,
    /// `a/k`, ms per row.
    pub comp_shift: T,
    /// Coded rows carried.
    pub load: T,
}

impl<T: Real> EffectiveChannel<T> {
    /// Channel for `link` with fractions `k`, `b`. Links without a
    /// communication rate ignore `b`.
    pub fn new(link: &LinkParams<T>, k: T, b: T, load: T) -> Self {
        Self {
            comm_rate: link.gamma.map(|g| b * g),
            comp_rate: k * link.u,
            comp_shift: link.a / k,
            load,
        }
    }

    /// Master-local channel (`k = 1`, no communication).
    pub fn local(link: &LinkParams<T>, load: T) -> Self {
        Self {
            comm_rate: None,
            comp_rate: link.u,
            comp_shift: link.a,
            load,
        }
    }

    /// Deterministic part of the delay, `a*l/k`.
    pub fn shift(&self) -> T {
        self.comp_shift * self.load
    }

    /// Mean total delay, `theta * l`.
    pub fn mean(&self) -> T {
        self.unit_delay().theta() * self.load
    }

    pub fn unit_delay(&self) -> UnitDelay<T> {
        let comm = self.comm_rate.map_or(T::zero(), |r| r.recip());
        UnitDelay::Finite(comm + self.comp_rate.recip() + self.comp_shift)
    }
}

/// CDF of the communication delay. Only defined for channels with a
/// communication stage.
pub fn trans_cdf<T: Real>(ch: &EffectiveChannel<T>, t: T) -> Result<T> {
    let rate = ch.comm_rate.ok_or_else(|| {
        Error::Domain("transmission CDF of a channel without communication".into())
    })?;
    if t < T::zero() {
        return Ok(T::zero());
    }
    Ok(-(-(rate / ch.load) * t).exp_m1())
}

/// CDF of the computation delay.
pub fn comp_cdf<T: Real>(ch: &EffectiveChannel<T>, t: T) -> T {
    let x = t - ch.shift();
    if x < T::zero() {
        return T::zero();
    }
    -(-(ch.comp_rate / ch.load) * x).exp_m1()
}

/// CDF of the total (communication plus computation) delay.
pub fn total_cdf<T: Real>(ch: &EffectiveChannel<T>, t: T) -> T {
    let Some(comm_rate) = ch.comm_rate else {
        return comp_cdf(ch, t);
    };
    let x = t - ch.shift();
    if x < T::zero() {
        return T::zero();
    }
    let l1 = comm_rate / ch.load;
    let l2 = ch.comp_rate / ch.load;
    let value = if (l1 - l2).abs() < T::lit(EQUAL_RATE_REL_TOL) * l1.max(l2) {
        let z = l2 * x;
        T::one() - (T::one() + z) * (-z).exp()
    } else {
        T::one() - (l1 * (-l2 * x).exp() - l2 * (-l1 * x).exp()) / (l1 - l2)
    };
    value.max(T::zero()).min(T::one())
}

/// Expected delay per coded row of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitDelay<T: Real = f64> {
    Finite(T),
    /// Zero computing power or bandwidth: the link never delivers.
    Unreachable,
}

impl<T: Real> UnitDelay<T> {
    /// `theta`, with `+inf` for unreachable links.
    pub fn theta(self) -> T {
        match self {
            UnitDelay::Finite(theta) => theta,
            UnitDelay::Unreachable => T::infinity(),
        }
    }

    /// `1/theta`, zero for unreachable links.
    pub fn inverse(self) -> T {
        match self {
            UnitDelay::Finite(theta) => theta.recip(),
            UnitDelay::Unreachable => T::zero(),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, UnitDelay::Finite(_))
    }
}

/// `theta = 1/(b*gamma) + 1/(k*u) + a/k`; the communication term is absent
/// for links without a communication rate.
pub fn unit_delay<T: Real>(link: &LinkParams<T>, k: T, b: T) -> UnitDelay<T> {
    if k <= T::zero() || (link.gamma.is_some() && b <= T::zero()) {
        return UnitDelay::Unreachable;
    }
    EffectiveChannel::new(link, k, b, T::one()).unit_delay()
}

/// Expected number of rows a master has received by time `t`.
pub fn expected_completed<T: Real>(channels: &[EffectiveChannel<T>], t: T) -> T {
    channels
        .iter()
        .filter(|ch| ch.load > T::zero())
        .map(|ch| ch.load * total_cdf(ch, t))
        .sum()
}

/// Draws one total delay. The communication part (if any) is drawn first.
pub fn sample_total_delay<T: Real, S: UniformSource + ?Sized>(
    ch: &EffectiveChannel<T>,
    src: &mut S,
) -> T {
    let load = ch.load.as_f64();
    let comm = match ch.comm_rate {
        Some(rate) => exponential(src, rate.as_f64() / load),
        None => 0.0,
    };
    let comp = exponential(src, ch.comp_rate.as_f64() / load);
    ch.shift() + T::lit(comm + comp)
}
