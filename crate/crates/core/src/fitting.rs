//! Shifted-exponential fits of measured per-row computation delays.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_FIT_SAMPLES: usize = 10;

/// Fitted law `a + Exp(u)` with its Kolmogorov-Smirnov distance to the data.
/// Serializes as `{"u", "a", "ks_distance"}`, matching the scenario's link
/// fragment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult<T: Real = f64> {
    #[serde(rename = "u", serialize_with = "as_f64")]
    pub u_hat: T,
    #[serde(rename = "a", serialize_with = "as_f64")]
    pub a_hat: T,
    #[serde(serialize_with = "as_f64")]
    pub ks_distance: T,
}

fn as_f64<T: Real, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(x.as_f64())
}

impl<T: Real> FitResult<T> {
    pub fn cdf(&self, x: T) -> T {
        if x <= self.a_hat {
            T::zero()
        } else {
            -(-self.u_hat * (x - self.a_hat)).exp_m1()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit serializes")
    }
}

/// `u = 1/(mean - min)`, `a = min - 1/(n u)` (floored at zero).
pub fn fit_shifted_exponential<T: Real>(samples: &[T]) -> Result<FitResult<T>> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_FIT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if let Some(i) = samples
        .iter()
        .position(|x| !(*x > T::zero() && x.is_finite()))
    {
        return Err(Error::Domain(format!(
            "sample {i} is not positive: {}",
            samples[i]
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = T::count(sorted.len());
    let min = sorted[0];
    let mean = sorted.iter().copied().sum::<T>() / n;
    let spread = mean - min;
    if !(spread > T::zero()) {
        return Err(Error::Domain("samples have zero spread".into()));
    }
    let u_hat = spread.recip();
    let a_hat = (min - spread / n).max(T::zero());
    let mut fit = FitResult {
        u_hat,
        a_hat,
        ks_distance: T::zero(),
    };
    fit.ks_distance = ks_distance(&sorted, |x| fit.cdf(x));
    Ok(fit)
}

/// Kolmogorov-Smirnov distance between sorted samples and a CDF.
pub fn ks_distance<T: Real>(sorted: &[T], cdf: impl Fn(T) -> T) -> T {
    let n = T::count(sorted.len());
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = T::count(i + 1) / n - f;
            let below = f - T::count(i) / n;
            above.max(below)
        })
        .fold(T::zero(), T::max)
}

/// Reads one numeric column (no header) of non-negative delays.
pub fn load_samples<T: Real>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            other => Error::Parse(format!("{}: {other:?}", path.display())),
        })?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record =
            record.map_err(|e| Error::Parse(format!("{} line {line}: {e}", path.display())))?;
        let field = record.get(0).unwrap_or("");
        let value: f64 = field.parse().map_err(|_| {
            Error::Parse(format!(
                "{} line {line}: '{field}' is not a number",
                path.display()
            ))
        })?;
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Parse(format!(
                "{} line {line}: delay must be non-negative, got {value}",
                path.display()
            )));
        }
        out.push(T::lit(value));
    }
    if out.is_empty() {
        return Err(Error::Parse(format!("{}: no samples", path.display())));
    }
    Ok(out)
}
