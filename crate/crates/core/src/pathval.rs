//! Partition valuations of paths in spaces with function-backed metrics.
//!
//! For a cost metric the valuation of a path is the supremum of chord sums
//! over all partitions of `[0, 1]`; for a gain metric it is the infimum.
//! Neither is computable in general, so [`refine_valuation`] reports the
//! sums along a dyadic refinement schedule. Under the triangle laws the
//! trace moves monotonically toward the true value, making the last level a
//! one-sided bound.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::finspace::Kind;

type EvalFn<P> = dyn Fn(&P, &P) -> ExtReal + Send + Sync;

/// A metric on points of type `P`, given by a function.
pub struct MetricFunction<P> {
    kind: Kind,
    eval: Arc<EvalFn<P>>,
}

impl<P> Clone for MetricFunction<P> {
    fn clone(&self) -> Self {
        MetricFunction {
            kind: self.kind,
            eval: Arc::clone(&self.eval),
        }
    }
}

impl<P> fmt::Debug for MetricFunction<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricFunction").field("kind", &self.kind).finish()
    }
}

impl<P> MetricFunction<P> {
    pub fn new(kind: Kind, eval: impl Fn(&P, &P) -> ExtReal + Send + Sync + 'static) -> Self {
        MetricFunction {
            kind,
            eval: Arc::new(eval),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn eval(&self, a: &P, b: &P) -> ExtReal {
        (self.eval)(a, b)
    }

    /// Sum of the metric along consecutive points.
    pub fn chain_sum<'a>(&self, points: impl IntoIterator<Item = &'a P>) -> ExtReal
    where
        P: 'a,
    {
        let mut it = points.into_iter();
        let Some(mut prev) = it.next() else {
            return ExtReal::ZERO;
        };
        let mut acc = ExtReal::ZERO;
        for p in it {
            acc = self.kind.sum(acc, self.eval(prev, p));
            prev = p;
        }
        acc
    }
}

/// Straight-line interpolation between two points.
pub trait Lerp: Sized {
    fn lerp(&self, other: &Self, s: f64) -> Self;
}

impl Lerp for f64 {
    fn lerp(&self, other: &f64, s: f64) -> f64 {
        self + s * (other - self)
    }
}

impl Lerp for Vec<f64> {
    fn lerp(&self, other: &Vec<f64>, s: f64) -> Vec<f64> {
        self.iter().zip(other).map(|(a, b)| a + s * (b - a)).collect()
    }
}

/// Samples of a path on `[0, 1]`: strictly increasing parameters from 0 to 1
/// with one point attached to each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath<P>", bound(deserialize = "P: Deserialize<'de> + PartialEq"))]
pub struct PolylinePath<P> {
    params: Vec<f64>,
    points: Vec<P>,
}

#[derive(Deserialize)]
struct RawPath<P> {
    params: Vec<f64>,
    points: Vec<P>,
}

impl<P: PartialEq> TryFrom<RawPath<P>> for PolylinePath<P> {
    type Error = Error;
    fn try_from(raw: RawPath<P>) -> Result<Self> {
        PolylinePath::new(raw.params, raw.points)
    }
}

impl<P: PartialEq> PolylinePath<P> {
    /// Validates the samples. Repeated parameters are collapsed, which
    /// requires their points to coincide.
    pub fn new(params: Vec<f64>, points: Vec<P>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(Error::Shape(format!(
                "{} params but {} points",
                params.len(),
                points.len()
            )));
        }
        if params.first() != Some(&0.0) || params.last() != Some(&1.0) {
            return Err(Error::InvalidArgument(
                "path parameters must start at 0 and end at 1".into(),
            ));
        }
        let mut kept_params = Vec::with_capacity(params.len());
        let mut kept_points: Vec<P> = Vec::with_capacity(points.len());
        for (t, p) in params.into_iter().zip(points) {
            match kept_params.last() {
                Some(&prev) if t < prev || t.is_nan() => {
                    return Err(Error::InvalidArgument(
                        "path parameters must be nondecreasing".into(),
                    ))
                }
                Some(&prev) if t == prev => {
                    if kept_points.last() != Some(&p) {
                        return Err(Error::InvalidArgument(format!(
                            "two different points at parameter {t}"
                        )));
                    }
                }
                _ => {
                    kept_params.push(t);
                    kept_points.push(p);
                }
            }
        }
        if kept_params.len() < 2 {
            return Err(Error::InvalidArgument("a path needs at least two samples".into()));
        }
        Ok(PolylinePath {
            params: kept_params,
            points: kept_points,
        })
    }

    /// Samples at equispaced parameters `i / (len - 1)`.
    pub fn uniform(points: Vec<P>) -> Result<Self> {
        let last = points.len().saturating_sub(1).max(1) as f64;
        let mut params: Vec<f64> = (0..points.len()).map(|i| i as f64 / last).collect();
        if let Some(t) = params.last_mut() {
            *t = 1.0;
        }
        Self::new(params, points)
    }
}

impl<P> PolylinePath<P> {
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (&P, &P)> {
        self.points.iter().zip(self.points.iter().skip(1))
    }

    pub fn first(&self) -> &P {
        &self.points[0]
    }

    pub fn last(&self) -> &P {
        &self.points[self.points.len() - 1]
    }
}

impl<P: Lerp + Clone> PolylinePath<P> {
    /// Piecewise-linear interpolation; vertices are returned exactly.
    pub fn at(&self, t: f64) -> P {
        let t = t.clamp(0.0, 1.0);
        let idx = self.params.partition_point(|&p| p <= t);
        if idx == 0 {
            return self.points[0].clone();
        }
        let lo = idx - 1;
        if self.params[lo] == t || lo + 1 == self.params.len() {
            return self.points[lo].clone();
        }
        let (t0, t1) = (self.params[lo], self.params[lo + 1]);
        self.points[lo].lerp(&self.points[lo + 1], (t - t0) / (t1 - t0))
    }
}

/// Chord sum over the samples selected by `partition`, composed with the
/// metric's own sum convention.
pub fn partition_sum<P>(
    metric: &MetricFunction<P>,
    path: &PolylinePath<P>,
    partition: &[usize],
) -> Result<ExtReal> {
    let last = path.len() - 1;
    if partition.first() != Some(&0) || partition.last() != Some(&last) {
        return Err(Error::InvalidArgument(
            "partition must contain the first and last sample".into(),
        ));
    }
    if partition.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "partition indices must be strictly increasing".into(),
        ));
    }
    if let Some(&index) = partition.iter().find(|&&i| i > last) {
        return Err(Error::IndexOutOfRange {
            index,
            len: path.len(),
        });
    }
    Ok(metric.chain_sum(partition.iter().map(|&i| &path.points[i])))
}

/// Chord sum over every sample of the path.
pub fn full_sum<P>(metric: &MetricFunction<P>, path: &PolylinePath<P>) -> ExtReal {
    metric.chain_sum(path.points())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSum {
    pub level: u32,
    pub sum: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    pub kind: Kind,
    pub estimate: ExtReal,
    pub trace: Vec<LevelSum>,
}

impl Refinement {
    /// True when every level moves in the bound direction of the kind
    /// (nondecreasing for costs, nonincreasing for gains), allowing a
    /// relative slack `tol` for rounding between finite sums.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.trace.windows(2).all(|w| {
            let (prev, next) = (w[0].sum, w[1].sum);
            let ok = if self.kind.is_cost() {
                next >= prev
            } else {
                next <= prev
            };
            ok || match (prev, next) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
                }
                _ => false,
            }
        })
    }
}

/// Chord sums at dyadic partitions `{i / 2^l}` for `l = 0..=levels`.
///
/// Once an absorbing value appears (`+inf` for costs, `-inf` for gains) it
/// is final and the remaining levels are not evaluated.
pub fn refine_valuation<P>(
    metric: &MetricFunction<P>,
    path: impl Fn(f64) -> P,
    levels: u32,
) -> Result<Refinement> {
    if levels == 0 {
        return Err(Error::InvalidArgument("at least one refinement level is required".into()));
    }
    if levels > 30 {
        return Err(Error::InvalidArgument(format!("{levels} refinement levels is too many")));
    }
    let absorbing = if metric.kind().is_cost() {
        ExtReal::PosInf
    } else {
        ExtReal::NegInf
    };

    let mut trace = Vec::with_capacity(levels as usize + 1);
    let mut settled = false;
    for level in 0..=levels {
        let sum = if settled {
            absorbing
        } else {
            let count = 1usize << level;
            let points: Vec<P> = (0..=count).map(|i| path(i as f64 / count as f64)).collect();
            metric.chain_sum(&points)
        };
        settled = sum == absorbing;
        trace.push(LevelSum { level, sum });
    }
    Ok(Refinement {
        kind: metric.kind(),
        estimate: trace.last().map_or(ExtReal::ZERO, |l| l.sum),
        trace,
    })
}

/// Built-in metrics on the real line.
#[derive(Clone)]
pub enum StandardMetric {
    /// `d(x, x') = x' - x` forward, `inf` backward.
    DeltaLine,
    /// `r(x, y) = y - x`.
    RhoLine,
    /// `r(x, y) = phi(y) - phi(x)`.
    Potential(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for StandardMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StandardMetric::DeltaLine => f.write_str("DeltaLine"),
            StandardMetric::RhoLine => f.write_str("RhoLine"),
            StandardMetric::Potential(_) => f.write_str("Potential(..)"),
        }
    }
}

pub fn standard_metric(which: StandardMetric) -> MetricFunction<f64> {
    match which {
        StandardMetric::DeltaLine => MetricFunction::new(Kind::Delta, |&x: &f64, &y: &f64| {
            if x <= y {
                ExtReal::new(y - x)
            } else {
                ExtReal::PosInf
            }
        }),
        StandardMetric::RhoLine => {
            MetricFunction::new(Kind::Rho, |&x: &f64, &y: &f64| ExtReal::new(y - x))
        }
        StandardMetric::Potential(phi) => {
            MetricFunction::new(Kind::Rho, move |&x: &f64, &y: &f64| ExtReal::new(phi(y) - phi(x)))
        }
    }
}
