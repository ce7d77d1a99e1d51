//! Finite generalized metric spaces stored as square tables of extended reals.
//!
//! A raw [`CostMatrix`] becomes a [`ValidatedSpace`] once it satisfies the
//! axioms of one of three kinds:
//!
//! | kind  | triangle law                          | sum  | diagonal      |
//! |-------|---------------------------------------|------|---------------|
//! | delta | `d(x,y) + d(y,z) >= d(x,z)`, `d >= 0` | cost | `0`           |
//! | rho   | `r(x,y) + r(y,z) >= r(x,z)`           | cost | `0` or `-inf` |
//! | gamma | `g(x,y) + g(y,z) <= g(x,z)`           | gain | `0` or `+inf` |

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// Matrices at least this large verify their triples in parallel.
const PARALLEL_VERIFY_MIN: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Delta,
    Rho,
    Gamma,
}

impl Kind {
    /// The monoidal sum this kind composes with.
    pub fn sum(self, a: ExtReal, b: ExtReal) -> ExtReal {
        match self {
            Kind::Delta | Kind::Rho => a.add_cost(b),
            Kind::Gamma => a.add_gain(b),
        }
    }

    /// True when composite transitions are bounded from above (costs).
    pub fn is_cost(self) -> bool {
        !matches!(self, Kind::Gamma)
    }

    fn triangle_holds(self, composite: ExtReal, direct: ExtReal) -> bool {
        if self.is_cost() {
            composite >= direct
        } else {
            composite <= direct
        }
    }

    fn diagonal_ok(self, v: ExtReal) -> bool {
        match self {
            Kind::Delta => v == ExtReal::ZERO,
            Kind::Rho => v == ExtReal::ZERO || v == ExtReal::NegInf,
            Kind::Gamma => v == ExtReal::ZERO || v == ExtReal::PosInf,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Delta => "delta",
            Kind::Rho => "rho",
            Kind::Gamma => "gamma",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Kind> {
        match s.to_ascii_lowercase().as_str() {
            "delta" => Ok(Kind::Delta),
            "rho" => Ok(Kind::Rho),
            "gamma" => Ok(Kind::Gamma),
            other => Err(Error::InvalidArgument(format!("unknown kind `{other}`"))),
        }
    }
}

/// An `n x n` table of extended reals, row-major.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct CostMatrix {
    n: usize,
    entries: Vec<ExtReal>,
    labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawMatrix {
    #[serde(default)]
    labels: Option<Vec<String>>,
    entries: Vec<Vec<ExtReal>>,
}

impl TryFrom<RawMatrix> for CostMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        let m = CostMatrix::new(raw.entries)?;
        match raw.labels {
            Some(labels) => m.with_labels(labels),
            None => Ok(m),
        }
    }
}

impl CostMatrix {
    pub fn new(rows: Vec<Vec<ExtReal>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("matrix not square".into()));
        }
        Ok(CostMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
            labels: None,
        })
    }

    /// Builds a matrix from finite `f64` rows; `f64` infinities map to the
    /// infinite variants.
    pub fn from_f64(rows: &[&[f64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| ExtReal::new(x)).collect())
                .collect(),
        )
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> ExtReal) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        CostMatrix {
            n,
            entries,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Shape(format!(
                "{} labels for {} points",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn get(&self, i: usize, j: usize) -> ExtReal {
        self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: ExtReal) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<ExtReal>> {
        self.entries.chunks(self.n.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn negated(&self) -> CostMatrix {
        CostMatrix {
            n: self.n,
            entries: self.entries.iter().map(|v| v.negate()).collect(),
            labels: self.labels.clone(),
        }
    }
}

impl Serialize for CostMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CostMatrix", 2)?;
        match &self.labels {
            Some(l) => st.serialize_field("labels", l)?,
            None => st.skip_field("labels")?,
        }
        st.serialize_field("entries", &self.rows())?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Composite `(i,j)+(j,k)` compared against direct `(i,k)`.
    Triangle,
    Diagonal,
    /// Entry outside `[0, inf]` in a delta-space.
    Range,
}

/// One failed axiom instance. For triangle failures `lhs` is the composite
/// `m(i,j) + m(j,k)` and `rhs` is `m(i,k)`; for entry-level failures `k` is
/// absent, `lhs` is the entry and `rhs` the bound it breaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub k: Option<usize>,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has_triple(&self, i: usize, j: usize, k: usize) -> bool {
        self.violations
            .iter()
            .any(|v| v.rule == Rule::Triangle && (v.i, v.j, v.k) == (i, j, Some(k)))
    }
}

/// Checks every axiom of `kind` and reports all failures.
pub fn verify(matrix: &CostMatrix, kind: Kind) -> ValidationReport {
    let n = matrix.n();
    let mut violations = Vec::new();

    for i in 0..n {
        let d = matrix.get(i, i);
        if !kind.diagonal_ok(d) {
            violations.push(Violation {
                i,
                j: i,
                k: None,
                lhs: d,
                rhs: ExtReal::ZERO,
                rule: Rule::Diagonal,
            });
        }
    }
    if kind == Kind::Delta {
        for i in 0..n {
            for j in 0..n {
                let v = matrix.get(i, j);
                if v < ExtReal::ZERO {
                    violations.push(Violation {
                        i,
                        j,
                        k: None,
                        lhs: v,
                        rhs: ExtReal::ZERO,
                        rule: Rule::Range,
                    });
                }
            }
        }
    }

    let row = |i: usize| -> Vec<Violation> {
        let mut out = Vec::new();
        for j in 0..n {
            let ij = matrix.get(i, j);
            for k in 0..n {
                let composite = kind.sum(ij, matrix.get(j, k));
                let direct = matrix.get(i, k);
                if !kind.triangle_holds(composite, direct) {
                    out.push(Violation {
                        i,
                        j,
                        k: Some(k),
                        lhs: composite,
                        rhs: direct,
                        rule: Rule::Triangle,
                    });
                }
            }
        }
        out
    };
    if n >= PARALLEL_VERIFY_MIN {
        let rows: Vec<Vec<Violation>> = (0..n).into_par_iter().map(row).collect();
        violations.extend(rows.into_iter().flatten());
    } else {
        violations.extend((0..n).flat_map(row));
    }

    ValidationReport {
        pass: violations.is_empty(),
        violations,
    }
}

/// A cost matrix known to satisfy the axioms of its kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedSpace {
    kind: Kind,
    #[serde(flatten)]
    matrix: CostMatrix,
}

impl ValidatedSpace {
    pub fn new(matrix: CostMatrix, kind: Kind) -> Result<Self> {
        let report = verify(&matrix, kind);
        if !report.pass {
            return Err(Error::AxiomViolation {
                kind,
                count: report.violations.len(),
            });
        }
        Ok(ValidatedSpace { kind, matrix })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn matrix(&self) -> &CostMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn get(&self, i: usize, j: usize) -> ExtReal {
        self.matrix.get(i, j)
    }

    pub fn into_matrix(self) -> CostMatrix {
        self.matrix
    }
}

/// Passes between a ρ-space and its γ-antimetric by entrywise negation.
pub fn dualize(space: &ValidatedSpace) -> Result<ValidatedSpace> {
    let kind = match space.kind {
        Kind::Rho => Kind::Gamma,
        Kind::Gamma => Kind::Rho,
        Kind::Delta => return Err(Error::UnsupportedKind(Kind::Delta)),
    };
    Ok(ValidatedSpace {
        kind,
        matrix: space.matrix.negated(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Closure {
    pub space: ValidatedSpace,
    /// Row-major flags: entry `(i,j)` is strictly below the input value.
    pub lowered: Vec<bool>,
}

impl Closure {
    pub fn lowered(&self, i: usize, j: usize) -> bool {
        self.lowered[i * self.space.n() + j]
    }
}

/// The largest ρ-metric lying below `matrix`: the infimum of cost-sums over
/// chains, with `-inf` wherever a negative cycle can be inserted.
pub fn metric_closure(matrix: &CostMatrix) -> Closure {
    let n = matrix.n();
    let mut d = matrix.clone();
    for i in 0..n {
        d.set(i, i, d.get(i, i).min(ExtReal::ZERO));
    }

    // Floyd-Warshall in the (min, cost-sum) semiring.
    for k in 0..n {
        for i in 0..n {
            let ik = d.get(i, k);
            if ik == ExtReal::PosInf {
                continue;
            }
            for j in 0..n {
                let via = ik.add_cost(d.get(k, j));
                if via < d.get(i, j) {
                    d.set(i, j, via);
                }
            }
        }
    }

    let on_negative_cycle: Vec<usize> = (0..n)
        .filter(|&c| d.get(c, c) < ExtReal::ZERO)
        .collect();
    if !on_negative_cycle.is_empty() {
        let reach = d.clone();
        for &c in &on_negative_cycle {
            for x in 0..n {
                if reach.get(x, c) == ExtReal::PosInf {
                    continue;
                }
                for y in 0..n {
                    if reach.get(c, y) < ExtReal::PosInf {
                        d.set(x, y, ExtReal::NegInf);
                    }
                }
            }
        }
    }
    for i in 0..n {
        d.set(i, i, d.get(i, i).min(ExtReal::ZERO));
    }

    let lowered = d
        .entries
        .iter()
        .zip(&matrix.entries)
        .map(|(new, old)| new < old)
        .collect();
    let space = ValidatedSpace {
        kind: Kind::Rho,
        matrix: d,
    };
    debug_assert!(verify(space.matrix(), Kind::Rho).pass);
    Closure { space, lowered }
}

/// A binary relation on `n` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                bits.push(f(i, j));
            }
        }
        Relation { n, bits }
    }

    pub fn holds(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.holds(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| !self.holds(i, j) || (0..n).all(|k| !self.holds(j, k) || self.holds(i, k)))
        })
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.bits.chunks(self.n.max(1)).map(<[_]>::to_vec).collect()
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preorders {
    /// `x -> y` is affordable: `r(x,y) < inf`.
    pub reflective: Relation,
    /// `r(y,x) <= 0`.
    pub coreflective: Relation,
}

/// The two preorders carried by a ρ-space (δ-spaces are accepted as ρ-spaces).
pub fn preorders(space: &ValidatedSpace) -> Result<Preorders> {
    if space.kind() == Kind::Gamma {
        return Err(Error::UnsupportedKind(Kind::Gamma));
    }
    let n = space.n();
    let reflective = Relation::from_fn(n, |x, y| space.get(x, y) < ExtReal::PosInf);
    let coreflective = Relation::from_fn(n, |x, y| space.get(y, x) <= ExtReal::ZERO);
    assert!(
        reflective.is_preorder() && coreflective.is_preorder(),
        "preorders of a validated ρ-space must be reflexive and transitive"
    );
    Ok(Preorders {
        reflective,
        coreflective,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzCheck {
    pub lipschitz: bool,
    /// First violating pair in row-major order.
    pub witness: Option<(usize, usize)>,
    pub violations: Vec<(usize, usize)>,
}

/// Tests `lambda * gx(x,x') <= gy(f x, f x')` for every pair of γ-space points.
pub fn check_lipschitz(
    map: &[usize],
    source: &ValidatedSpace,
    target: &ValidatedSpace,
    lambda: f64,
) -> Result<LipschitzCheck> {
    for s in [source, target] {
        if s.kind() != Kind::Gamma {
            return Err(Error::UnsupportedKind(s.kind()));
        }
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Lipschitz constant must lie in [0, inf), got {lambda}"
        )));
    }
    if map.len() != source.n() {
        return Err(Error::DimensionMismatch {
            expected: source.n(),
            found: map.len(),
        });
    }
    if let Some(&index) = map.iter().find(|&&i| i >= target.n()) {
        return Err(Error::IndexOutOfRange {
            index,
            len: target.n(),
        });
    }

    let mut violations = Vec::new();
    for x in 0..source.n() {
        for x2 in 0..source.n() {
            let scaled = source.get(x, x2).scale_nonneg(lambda);
            if scaled > target.get(map[x], map[x2]) {
                violations.push((x, x2));
            }
        }
    }
    Ok(LipschitzCheck {
        lipschitz: violations.is_empty(),
        witness: violations.first().copied(),
        violations,
    })
}
