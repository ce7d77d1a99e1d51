//! Lorentz vector spaces: scalar products of index 1, their cones and the
//! antinorm `|v| = sqrt(-<v,v>)` on the future causal cone.
//!
//! Orientation convention: a vector `v` is future-directed with respect to
//! the timelike orientation vector `u` when `<v, u> <= 0`. In the standard
//! space `R^n_1` with `u = e1` this is `v1 >= 0`, and the cones reduce to
//!
//! ```text
//! causal cone  Λ  = { v : v1 >= |v_spatial| }
//! timecone     Λ° = { v : v1 >  |v_spatial| }
//! ```

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::pathval::Lerp;

/// Relative tolerance for symmetry, degeneracy, orthonormality and the
/// lightlike band.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LorentzVector(pub Vec<f64>);

impl LorentzVector {
    pub fn new(coords: Vec<f64>) -> Self {
        LorentzVector(coords)
    }

    pub fn zero(dim: usize) -> Self {
        LorentzVector(vec![0.0; dim])
    }

    /// The `i`-th canonical basis vector (0-based).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        LorentzVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn euclidean_norm_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        LorentzVector(self.0.iter().map(|x| s * x).collect())
    }
}

impl From<Vec<f64>> for LorentzVector {
    fn from(v: Vec<f64>) -> Self {
        LorentzVector(v)
    }
}

impl Add for &LorentzVector {
    type Output = LorentzVector;
    fn add(self, rhs: &LorentzVector) -> LorentzVector {
        LorentzVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LorentzVector {
    type Output = LorentzVector;
    fn sub(self, rhs: &LorentzVector) -> LorentzVector {
        LorentzVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &LorentzVector {
    type Output = LorentzVector;
    fn mul(self, s: f64) -> LorentzVector {
        self.scale(s)
    }
}

impl Neg for &LorentzVector {
    type Output = LorentzVector;
    fn neg(self) -> LorentzVector {
        self.scale(-1.0)
    }
}

impl Lerp for LorentzVector {
    fn lerp(&self, other: &Self, s: f64) -> Self {
        LorentzVector(self.0.lerp(&other.0, s))
    }
}

/// A non-degenerate symmetric bilinear form on `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProduct {
    dim: usize,
    matrix: Vec<f64>,
    /// Largest absolute eigenvalue.
    norm: f64,
    index: usize,
}

impl ScalarProduct {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("scalar product matrix not square".into()));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "scalar product entries must be finite".into(),
            ));
        }
        let scale = rows.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in 0..i {
                if (rows[i][j] - rows[j][i]).abs() > TOLERANCE * scale {
                    return Err(Error::Shape(format!(
                        "scalar product matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                matrix[i * dim + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        let eigenvalues = SymmetricEigen::new(DMatrix::from_row_slice(dim, dim, &matrix)).eigenvalues;
        Self::from_parts(dim, matrix, eigenvalues.iter().copied())
    }

    /// `diag(d_1, ..., d_n)`.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        if dim == 0 || diag.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("diagonal must be finite and non-empty".into()));
        }
        let mut matrix = vec![0.0; dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            matrix[i * dim + i] = d;
        }
        Self::from_parts(dim, matrix, diag.iter().copied())
    }

    /// The standard Lorentz product `diag(-1, 1, ..., 1)`.
    pub fn minkowski(dim: usize) -> Self {
        let mut diag = vec![1.0; dim.max(1)];
        diag[0] = -1.0;
        Self::diagonal(&diag).expect("minkowski product is valid")
    }

    fn from_parts(dim: usize, matrix: Vec<f64>, eigenvalues: impl Iterator<Item = f64> + Clone) -> Result<Self> {
        let norm = eigenvalues.clone().fold(0.0f64, |m, l| m.max(l.abs()));
        let smallest = eigenvalues
            .clone()
            .min_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if norm == 0.0 || smallest.abs() <= TOLERANCE * norm {
            return Err(Error::Degenerate { eigenvalue: smallest });
        }
        let index = eigenvalues.filter(|&l| l < 0.0).count();
        Ok(ScalarProduct {
            dim,
            matrix,
            norm,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of negative entries in any orthonormal signature.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix.chunks(self.dim).map(<[_]>::to_vec).collect()
    }

    fn check_dim(&self, v: &LorentzVector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        Ok(())
    }

    /// `v^T g w`.
    pub fn product(&self, v: &LorentzVector, w: &LorentzVector) -> Result<f64> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(self.product_unchecked(&v.0, &w.0))
    }

    /// Compensated dot product of `g v` with `w`: each term's rounding
    /// error is recovered with an fma and carried in a second accumulator,
    /// so cancellation near the lightcone stays at the rounding level of
    /// `g v` (exact for diagonal `+-1` forms).
    pub(crate) fn product_unchecked(&self, v: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for i in 0..n {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            let row = &self.matrix[i * n..(i + 1) * n];
            for (g, &wj) in row.iter().zip(w) {
                if *g == 0.0 {
                    continue;
                }
                let a = g * vi;
                let p = a * wj;
                let p_err = a.mul_add(wj, -p);
                let t = sum + p;
                let z = t - sum;
                let s_err = (sum - (t - z)) + (p - z);
                sum = t;
                carry += s_err + p_err;
            }
        }
        sum + carry
    }

    /// The quadratic form `q(v) = <v, v>`.
    pub fn quadratic_form(&self, v: &LorentzVector) -> Result<f64> {
        self.product(v, v)
    }

    /// Width of the band `|q(v)| <= tol` treated as lightlike.
    fn light_band(&self, v: &[f64]) -> f64 {
        TOLERANCE * self.norm * v.iter().map(|x| x * x).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalCharacter {
    Timelike,
    Lightlike,
    Spacelike,
}

/// Sign of `q(v)` up to the lightlike band. The zero vector is spacelike.
pub fn classify(product: &ScalarProduct, v: &LorentzVector) -> Result<CausalCharacter> {
    let q = product.quadratic_form(v)?;
    Ok(classify_value(product, &v.0, q))
}

fn classify_value(product: &ScalarProduct, v: &[f64], q: f64) -> CausalCharacter {
    if v.iter().all(|&x| x == 0.0) {
        return CausalCharacter::Spacelike;
    }
    let band = product.light_band(v);
    if q.abs() <= band {
        CausalCharacter::Lightlike
    } else if q < 0.0 {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Spacelike
    }
}

/// A Lorentz scalar product together with a timelike vector fixing the
/// future direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameSpec", into = "FrameSpec")]
pub struct LorentzFrame {
    product: ScalarProduct,
    orientation: LorentzVector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameSpec {
    Standard { standard: usize },
    Explicit { g: Vec<Vec<f64>>, u: Vec<f64> },
}

impl TryFrom<FrameSpec> for LorentzFrame {
    type Error = Error;
    fn try_from(spec: FrameSpec) -> Result<Self> {
        match spec {
            FrameSpec::Standard { standard } => LorentzFrame::standard(standard),
            FrameSpec::Explicit { g, u } => {
                LorentzFrame::new(ScalarProduct::new(g)?, LorentzVector(u))
            }
        }
    }
}

impl From<LorentzFrame> for FrameSpec {
    fn from(f: LorentzFrame) -> FrameSpec {
        FrameSpec::Explicit {
            g: f.product.rows(),
            u: f.orientation.0,
        }
    }
}

impl LorentzFrame {
    pub fn new(product: ScalarProduct, orientation: LorentzVector) -> Result<Self> {
        if product.dim() < 2 {
            return Err(Error::InvalidArgument("Lorentz spaces need dimension >= 2".into()));
        }
        if product.index() != 1 {
            return Err(Error::NotLorentz {
                index: product.index(),
            });
        }
        if classify(&product, &orientation)? != CausalCharacter::Timelike {
            return Err(Error::NotTimelike);
        }
        Ok(LorentzFrame {
            product,
            orientation,
        })
    }

    /// `R^n_1` oriented by `e1`.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument("Lorentz spaces need dimension >= 2".into()));
        }
        Ok(LorentzFrame {
            product: ScalarProduct::minkowski(dim),
            orientation: LorentzVector::unit(dim, 0),
        })
    }

    pub(crate) fn from_trusted(product: ScalarProduct, orientation: LorentzVector) -> Self {
        debug_assert_eq!(product.index(), 1);
        LorentzFrame {
            product,
            orientation,
        }
    }

    pub fn product(&self) -> &ScalarProduct {
        &self.product
    }

    pub fn orientation(&self) -> &LorentzVector {
        &self.orientation
    }

    pub fn dim(&self) -> usize {
        self.product.dim()
    }

    pub fn scalar_product(&self, v: &LorentzVector, w: &LorentzVector) -> Result<f64> {
        self.product.product(v, w)
    }

    pub fn classify(&self, v: &LorentzVector) -> Result<CausalCharacter> {
        classify(&self.product, v)
    }

    pub fn cone_membership(&self, v: &LorentzVector) -> Result<ConeMembership> {
        cone_membership(self, v)
    }

    pub fn antinorm(&self, v: &LorentzVector) -> Result<ExtReal> {
        antinorm(self, v)
    }

    /// Causal up to rounding only, without the lightlike band.
    pub(crate) fn strictly_causal(&self, v: &[f64]) -> bool {
        let q = self.product.product_unchecked(v, v);
        let slack = 64.0 * f64::EPSILON * self.product.norm * v.iter().map(|x| x * x).sum::<f64>();
        q <= slack && self.product.product_unchecked(v, &self.orientation.0) <= 0.0
    }

    fn membership_and_q(&self, v: &[f64]) -> (ConeMembership, f64) {
        let q = self.product.product_unchecked(v, v);
        let band = self.product.light_band(v);
        let future = self.product.product_unchecked(v, &self.orientation.0) <= 0.0;
        let m = if !future || q > band {
            ConeMembership::Outside
        } else if q < -band {
            ConeMembership::Interior
        } else {
            ConeMembership::Boundary
        };
        (m, q)
    }
}

/// Position of a vector relative to the closed future causal cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeMembership {
    /// In the open timecone.
    Interior,
    /// On the future lightcone, or the apex `0`.
    Boundary,
    Outside,
}

impl ConeMembership {
    pub fn in_cone(self) -> bool {
        self != ConeMembership::Outside
    }
}

pub fn cone_membership(frame: &LorentzFrame, v: &LorentzVector) -> Result<ConeMembership> {
    frame.product.check_dim(v)?;
    Ok(frame.membership_and_q(&v.0).0)
}

/// `sqrt(-q(v))` on the causal cone, `-inf` elsewhere.
pub fn antinorm(frame: &LorentzFrame, v: &LorentzVector) -> Result<ExtReal> {
    frame.product.check_dim(v)?;
    Ok(antinorm_unchecked(frame, &v.0))
}

pub(crate) fn antinorm_unchecked(frame: &LorentzFrame, v: &[f64]) -> ExtReal {
    match frame.membership_and_q(v) {
        (ConeMembership::Outside, _) => ExtReal::NegInf,
        (_, q) => ExtReal::Finite((-q).max(0.0).sqrt()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthonormalBasis {
    pub vectors: Vec<LorentzVector>,
    /// `<b_i, b_i>`, negative entries first.
    pub signature: Vec<i8>,
    pub index: usize,
}

/// Eigenvectors of `g` rescaled by `|lambda|^(-1/2)`, ordered by eigenvalue.
/// Each vector's largest-magnitude component is made positive.
pub fn orthonormal_basis(product: &ScalarProduct) -> OrthonormalBasis {
    let n = product.dim();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &product.matrix));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut vectors = Vec::with_capacity(n);
    let mut signature = Vec::with_capacity(n);
    for &c in &order {
        let lambda = eig.eigenvalues[c];
        let col: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        let peak = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let lead = col
            .iter()
            .find(|x| x.abs() >= peak * (1.0 - 1e-12))
            .copied()
            .unwrap_or(1.0);
        let s = lead.signum() / lambda.abs().sqrt();
        vectors.push(LorentzVector(col.iter().map(|x| x * s).collect()));
        signature.push(if lambda < 0.0 { -1 } else { 1 });
    }
    let index = signature.iter().filter(|&&s| s < 0).count();
    OrthonormalBasis {
        vectors,
        signature,
        index,
    }
}

/// The linear isometry `f: R^n_1 -> V` sending the canonical basis to a
/// future-oriented orthonormal basis of the frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Isometry {
    /// `columns[i] = f(e_i)`.
    pub columns: Vec<LorentzVector>,
}

impl Isometry {
    pub fn apply(&self, a: &LorentzVector) -> Result<LorentzVector> {
        if a.dim() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                found: a.dim(),
            });
        }
        let mut out = LorentzVector::zero(self.columns.len());
        for (ai, col) in a.0.iter().zip(&self.columns) {
            for (o, c) in out.0.iter_mut().zip(&col.0) {
                *o += ai * c;
            }
        }
        Ok(out)
    }
}

pub fn standardize(frame: &LorentzFrame) -> Result<Isometry> {
    let basis = orthonormal_basis(frame.product());
    if basis.index != 1 {
        return Err(Error::NotLorentz { index: basis.index });
    }
    let mut columns = basis.vectors;
    let time = &columns[0];
    if frame.product.product_unchecked(&time.0, &frame.orientation.0) > 0.0 {
        columns[0] = -time;
    }
    Ok(Isometry { columns })
}
