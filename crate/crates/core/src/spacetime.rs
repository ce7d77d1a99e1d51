//! Minkowski spacetime and simple Lorentz manifolds on a single chart.
//!
//! Events carry a gain `gamma(x, y)`: the greatest proper time along causal
//! paths from `x` to `y`, or `-inf` when `x` cannot influence `y`. The cost
//! form `rho = -gamma` is estimated variationally over polylines with a few
//! movable control points.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::finspace::Kind;
use crate::lorentz::{self, LorentzFrame, LorentzVector, ScalarProduct};
use crate::pathval::{Lerp, MetricFunction, PolylinePath};

/// A point of the chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Event(pub Vec<f64>);

impl Event {
    pub fn new(coords: Vec<f64>) -> Self {
        Event(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// The tangent vector `to - self`.
    pub fn displacement(&self, to: &Event) -> LorentzVector {
        LorentzVector(to.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn offset(&self, v: &LorentzVector) -> Event {
        Event(self.0.iter().zip(&v.0).map(|(a, d)| a + d).collect())
    }
}

impl From<Vec<f64>> for Event {
    fn from(v: Vec<f64>) -> Self {
        Event(v)
    }
}

impl Lerp for Event {
    fn lerp(&self, other: &Self, s: f64) -> Self {
        if s == 1.0 {
            return other.clone();
        }
        Event(self.0.lerp(&other.0, s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Constant `diag(-1, 1, ..., 1)`.
    Minkowski,
    /// `diag(-1, t^(2p), ..., t^(2p))` with `t = x1 > 0`.
    DiagonalPower(f64),
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Minkowski => f.write_str("minkowski"),
            FieldKind::DiagonalPower(p) => write!(f, "power:{p}"),
        }
    }
}

impl FromStr for FieldKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("minkowski") {
            return Ok(FieldKind::Minkowski);
        }
        s.strip_prefix("power:")
            .and_then(|p| p.parse::<f64>().ok())
            .filter(|p| p.is_finite())
            .map(FieldKind::DiagonalPower)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown field `{s}`")))
    }
}

/// A time-oriented Lorentz metric on `R^n` (or the half-space `x1 > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricField {
    pub kind: FieldKind,
    pub dim: usize,
}

impl MetricField {
    pub fn new(kind: FieldKind, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument("spacetime dimension must be >= 2".into()));
        }
        if let FieldKind::DiagonalPower(p) = kind {
            if !p.is_finite() {
                return Err(Error::InvalidArgument("power must be finite".into()));
            }
        }
        Ok(MetricField { kind, dim })
    }

    pub fn minkowski(dim: usize) -> Result<Self> {
        Self::new(FieldKind::Minkowski, dim)
    }

    pub fn diagonal_power(p: f64, dim: usize) -> Result<Self> {
        Self::new(FieldKind::DiagonalPower(p), dim)
    }

    pub fn is_minkowski(&self) -> bool {
        self.kind == FieldKind::Minkowski
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    /// The scalar product and orientation at `x`.
    pub fn at(&self, x: &Event) -> Result<LorentzFrame> {
        self.check_dim(x.dim())?;
        let u = LorentzVector::unit(self.dim, 0);
        match self.kind {
            FieldKind::Minkowski => Ok(LorentzFrame::from_trusted(ScalarProduct::minkowski(self.dim), u)),
            FieldKind::DiagonalPower(p) => {
                let t = x.0[0];
                if !(t > 0.0) {
                    return Err(Error::Domain(format!(
                        "power field is defined for x1 > 0, got x1 = {t}"
                    )));
                }
                let a2 = t.powf(2.0 * p);
                let mut diag = vec![a2; self.dim];
                diag[0] = -1.0;
                let product = ScalarProduct::diagonal(&diag)
                    .ok()
                    .filter(|g| g.index() == 1)
                    .ok_or_else(|| {
                        Error::Domain(format!("power field degenerates at x1 = {t}"))
                    })?;
                Ok(LorentzFrame::from_trusted(product, u))
            }
        }
    }

    fn require_minkowski(&self, what: &str) -> Result<()> {
        if !self.is_minkowski() {
            return Err(Error::Unsupported(format!(
                "{what} has a closed form only on Minkowski space; use rho_g_estimate"
            )));
        }
        Ok(())
    }
}

/// `|y - x|` in the standard frame: finite and `>= 0` on the future causal
/// cone of `x`, `-inf` elsewhere.
pub fn event_antimetric(field: &MetricField, x: &Event, y: &Event) -> Result<ExtReal> {
    field.require_minkowski("the event antimetric")?;
    field.check_dim(x.dim())?;
    field.check_dim(y.dim())?;
    let frame = field.at(x)?;
    Ok(lorentz::antinorm_unchecked(&frame, &x.displacement(y).0))
}

/// `-event_antimetric(x, y)`, valued in `]-inf, 0] ∪ {inf}`.
pub fn event_rho(field: &MetricField, x: &Event, y: &Event) -> Result<ExtReal> {
    event_antimetric(field, x, y).map(ExtReal::negate)
}

/// `x <= y` iff `y - x` lies in the closed future cone.
pub fn causally_precedes(field: &MetricField, x: &Event, y: &Event) -> Result<bool> {
    field.require_minkowski("the causality order")?;
    field.check_dim(x.dim())?;
    field.check_dim(y.dim())?;
    let frame = field.at(x)?;
    let precedes = frame.cone_membership(&x.displacement(y))?.in_cone();
    debug_assert_eq!(precedes, event_rho(field, x, y)? < ExtReal::PosInf);
    Ok(precedes)
}

/// The γ-antimetric of Minkowski space as a function-backed metric.
pub fn minkowski_event_metric(dim: usize) -> Result<MetricFunction<Event>> {
    let frame = LorentzFrame::standard(dim)?;
    Ok(MetricFunction::new(Kind::Gamma, move |x: &Event, y: &Event| {
        lorentz::antinorm_unchecked(&frame, &x.displacement(y).0)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathViolation {
    pub segment: usize,
    /// Path parameter at which the tangent left the cone.
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausalPathCheck {
    pub causal: bool,
    pub violation: Option<PathViolation>,
}

fn check_path_dims(field: &MetricField, path: &PolylinePath<Event>) -> Result<()> {
    path.points().iter().try_for_each(|p| field.check_dim(p.dim()))
}

/// Checks that every segment direction lies in the causal cone at `samples`
/// equispaced points of the segment, endpoints included. On Minkowski space
/// one check per segment is exact.
pub fn is_causal_path(
    field: &MetricField,
    path: &PolylinePath<Event>,
    samples: usize,
) -> Result<CausalPathCheck> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample per segment".into()));
    }
    check_path_dims(field, path)?;
    let samples = if field.is_minkowski() { 1 } else { samples };
    let params = path.params();
    for (seg, (a, b)) in path.segments().enumerate() {
        let d = a.displacement(b);
        for i in 0..samples {
            let s = if samples == 1 {
                0.0
            } else {
                i as f64 / (samples - 1) as f64
            };
            let frame = field.at(&a.lerp(b, s))?;
            if !frame.cone_membership(&d)?.in_cone() {
                let t = params[seg] + s * (params[seg + 1] - params[seg]);
                return Ok(CausalPathCheck {
                    causal: false,
                    violation: Some(PathViolation { segment: seg, t }),
                });
            }
        }
    }
    Ok(CausalPathCheck {
        causal: true,
        violation: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Quadrature {
    /// Sum of segment antinorms; exact for polylines in Minkowski space.
    ExactMinkowski,
    /// Composite midpoint rule with `k` panels per segment.
    Midpoint(usize),
    /// Composite Simpson rule with `k` panels per segment.
    Simpson(usize),
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quadrature::ExactMinkowski => f.write_str("exact"),
            Quadrature::Midpoint(k) => write!(f, "midpoint:{k}"),
            Quadrature::Simpson(k) => write!(f, "simpson:{k}"),
        }
    }
}

impl FromStr for Quadrature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown quadrature `{s}`"));
        if s == "exact" {
            return Ok(Quadrature::ExactMinkowski);
        }
        let (name, k) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(Error::InvalidArgument("quadrature needs k >= 1".into()));
        }
        match name {
            "midpoint" => Ok(Quadrature::Midpoint(k)),
            "simpson" => Ok(Quadrature::Simpson(k)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Quadrature {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Quadrature> for String {
    fn from(q: Quadrature) -> String {
        q.to_string()
    }
}

/// `|d|` measured at `x`, or `None` when `d` leaves the cone there.
fn tangent_length(field: &MetricField, x: &Event, d: &LorentzVector) -> Result<Option<f64>> {
    let frame = field.at(x)?;
    Ok(lorentz::antinorm_unchecked(&frame, &d.0).finite())
}

/// Proper elapsed time along a polyline; `-inf` for non-causal paths.
pub fn proper_time(
    field: &MetricField,
    path: &PolylinePath<Event>,
    quadrature: Quadrature,
) -> Result<ExtReal> {
    check_path_dims(field, path)?;
    match quadrature {
        Quadrature::ExactMinkowski => {
            if !field.is_minkowski() {
                return Err(Error::InvalidArgument(
                    "exact quadrature requires the Minkowski field".into(),
                ));
            }
            let frame = field.at(path.first())?;
            Ok(path.segments().fold(ExtReal::ZERO, |acc, (a, b)| {
                acc.add_gain(lorentz::antinorm_unchecked(&frame, &a.displacement(b).0))
            }))
        }
        Quadrature::Midpoint(k) | Quadrature::Simpson(k) => {
            if k == 0 {
                return Err(Error::InvalidArgument("quadrature needs k >= 1".into()));
            }
            if !is_causal_path(field, path, k + 1)?.causal {
                return Ok(ExtReal::NegInf);
            }
            let simpson = matches!(quadrature, Quadrature::Simpson(_));
            let mut total = 0.0;
            for (a, b) in path.segments() {
                let d = a.displacement(b);
                let h = 1.0 / k as f64;
                let f = |s: f64| tangent_length(field, &a.lerp(b, s), &d);
                for j in 0..k {
                    let s0 = j as f64 * h;
                    let Some(mid) = f(s0 + 0.5 * h)? else {
                        return Ok(ExtReal::NegInf);
                    };
                    if simpson {
                        let (Some(left), Some(right)) = (f(s0)?, f(s0 + h)?) else {
                            return Ok(ExtReal::NegInf);
                        };
                        total += h / 6.0 * (left + 4.0 * mid + right);
                    } else {
                        total += h * mid;
                    }
                }
            }
            Ok(ExtReal::new(total))
        }
    }
}

fn default_controls() -> usize {
    3
}
fn default_iterations() -> usize {
    50
}
fn default_restarts() -> usize {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Interior control points of the polyline.
    #[serde(default = "default_controls")]
    pub controls: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Defaults to exact on Minkowski space and `simpson:8` elsewhere.
    #[serde(default)]
    pub quadrature: Option<Quadrature>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            controls: default_controls(),
            iterations: default_iterations(),
            quadrature: None,
            restarts: default_restarts(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub rho: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoEstimate {
    /// Upper bound on the geodesic ρ-metric; `inf` if no causal path was found.
    pub rho: ExtReal,
    pub path: Option<PolylinePath<Event>>,
    /// Best ρ over all restarts after each sweep; entry 0 is the start.
    pub trace: Vec<TraceEntry>,
}

struct RestartOutcome {
    best: Option<(f64, Vec<Event>)>,
    /// Best proper time after each sweep, `None` while infeasible.
    history: Vec<Option<f64>>,
}

struct Objective<'a> {
    field: &'a MetricField,
    quadrature: Quadrature,
    x: &'a Event,
    y: &'a Event,
}

impl Objective<'_> {
    fn polyline(&self, controls: &[Event]) -> Option<PolylinePath<Event>> {
        let mut pts = Vec::with_capacity(controls.len() + 2);
        pts.push(self.x.clone());
        pts.extend(controls.iter().cloned());
        pts.push(self.y.clone());
        PolylinePath::uniform(pts).ok()
    }

    /// Proper time of the polyline, or `None` if it is not causal or leaves
    /// the chart.
    fn value(&self, controls: &[Event]) -> Option<f64> {
        let path = self.polyline(controls)?;
        // the lightlike band would let zigzags gain about sqrt(band) per
        // segment, so candidates must stay in the cone up to rounding
        let samples = match self.quadrature {
            _ if self.field.is_minkowski() => 1,
            Quadrature::Midpoint(k) | Quadrature::Simpson(k) => 2 * k + 1,
            Quadrature::ExactMinkowski => 1,
        };
        for (a, b) in path.segments() {
            let d = a.displacement(b);
            for i in 0..samples {
                let s = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
                if !self.field.at(&a.lerp(b, s)).ok()?.strictly_causal(&d.0) {
                    return None;
                }
            }
        }
        proper_time(self.field, &path, self.quadrature).ok()?.finite()
    }
}

fn run_restart(obj: &Objective<'_>, config: &OptimizerConfig, restart: usize) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);

    let m = config.controls;
    let chord = obj.x.displacement(obj.y);
    let scale = chord.euclidean_norm_sq().sqrt().max(f64::MIN_POSITIVE);
    let straight: Vec<Event> = (1..=m)
        .map(|i| obj.x.lerp(obj.y, i as f64 / (m + 1) as f64))
        .collect();

    let mut start = None;
    if restart == 0 {
        start = obj.value(&straight).map(|v| (v, straight.clone()));
    }
    // perturbed starts, shrinking toward the chord until feasible
    let mut amplitude = if restart == 0 { 0.5 * scale } else { 0.25 * scale };
    let mut attempts = 0;
    while start.is_none() && attempts < 24 {
        let candidate: Vec<Event> = straight
            .iter()
            .map(|p| Event(p.0.iter().map(|c| c + amplitude * rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        start = obj.value(&candidate).map(|v| (v, candidate));
        attempts += 1;
        if attempts % 3 == 0 {
            amplitude *= 0.5;
        }
    }
    if start.is_none() {
        start = obj.value(&straight).map(|v| (v, straight.clone()));
    }

    let Some((mut best, mut controls)) = start else {
        return RestartOutcome {
            best: None,
            history: vec![None; config.iterations + 1],
        };
    };
    let mut history = Vec::with_capacity(config.iterations + 1);
    history.push(Some(best));

    let mut step = 0.25 * scale;
    for _ in 0..config.iterations {
        let mut improved = false;
        for i in 0..m {
            for c in 0..obj.x.dim() {
                for sign in [1.0, -1.0] {
                    let mut candidate = controls.clone();
                    candidate[i].0[c] += sign * step;
                    if let Some(v) = obj.value(&candidate) {
                        if v > best {
                            best = v;
                            controls = candidate;
                            improved = true;
                            break;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
        history.push(Some(best));
    }
    RestartOutcome {
        best: Some((best, controls)),
        history,
    }
}

/// Estimates `rho_g(x, y) = -sup proper_time(a)` over polylines from `x` to
/// `y` with `config.controls` interior points, by multi-restart projected
/// coordinate ascent. Non-causal candidates are rejected. The result is an
/// upper bound on the true `rho_g`.
pub fn rho_g_estimate(
    field: &MetricField,
    x: &Event,
    y: &Event,
    config: &OptimizerConfig,
) -> Result<RhoEstimate> {
    field.check_dim(x.dim())?;
    field.check_dim(y.dim())?;
    field.at(x)?;
    field.at(y)?;
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let quadrature = config.quadrature.unwrap_or(if field.is_minkowski() {
        Quadrature::ExactMinkowski
    } else {
        Quadrature::Simpson(8)
    });
    if quadrature == Quadrature::ExactMinkowski && !field.is_minkowski() {
        return Err(Error::InvalidArgument(
            "exact quadrature requires the Minkowski field".into(),
        ));
    }
    let obj = Objective {
        field,
        quadrature,
        x,
        y,
    };

    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&obj, config, r))
        .collect();

    // best value wins; ties go to the lower restart index
    let mut winner: Option<(f64, &Vec<Event>)> = None;
    for o in &outcomes {
        if let Some((v, c)) = &o.best {
            if winner.is_none_or(|(w, _)| *v > w) {
                winner = Some((*v, c));
            }
        }
    }

    let trace = (0..=config.iterations)
        .map(|it| {
            let best = outcomes
                .iter()
                .filter_map(|o| o.history[it])
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
            TraceEntry {
                iteration: it,
                rho: best.map_or(ExtReal::PosInf, |v| ExtReal::new(-v)),
            }
        })
        .collect();

    Ok(match winner {
        Some((v, controls)) => RhoEstimate {
            rho: ExtReal::new(-v),
            path: obj.polyline(controls),
            trace,
        },
        None => RhoEstimate {
            rho: ExtReal::PosInf,
            path: None,
            trace,
        },
    })
}
