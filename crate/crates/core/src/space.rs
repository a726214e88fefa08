//! Finite-dimensional normed-space kernel.
//!
//! `X` and `Y` are modelled as `R^d` with a p-norm. Operators are dense
//! row-major matrices, functionals act by the dot product.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::rng::{seeded_rng, unit_vector};

/// Point of `R^d`. Coordinates are always finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteVector(Vec<f64>);

impl FiniteVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(LabError::validation("vector must have positive dimension"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(LabError::validation(format!(
                "coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self(vec![0.0; dim])
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    /// Builds from coordinates produced by internal arithmetic.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        kind.norm_of(&self.0)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|x| c * x).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn distance(&self, other: &Self, kind: NormKind) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(distance(&self.0, &other.0, kind))
    }
}

impl std::ops::Index<usize> for FiniteVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(LabError::DimensionMismatch { expected, found })
    }
}

/// Distance between two equally sized coordinate slices.
pub(crate) fn distance(a: &[f64], b: &[f64], kind: NormKind) -> f64 {
    match kind {
        NormKind::Inf => a
            .iter()
            .zip(b)
            .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs())),
        _ => {
            let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            kind.norm_of(&d)
        }
    }
}

/// The exponent of a p-norm, `1 <= p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    P(f64),
    Inf,
}

impl NormKind {
    pub const L1: NormKind = NormKind::P(1.0);
    pub const L2: NormKind = NormKind::P(2.0);

    pub fn p(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(NormKind::Inf)
        } else if p.is_finite() && p >= 1.0 {
            Ok(NormKind::P(p))
        } else {
            Err(LabError::validation(format!(
                "norm exponent must be >= 1, got {p}"
            )))
        }
    }

    pub fn exponent(self) -> f64 {
        match self {
            NormKind::P(p) => p,
            NormKind::Inf => f64::INFINITY,
        }
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::Inf => NormKind::L1,
            NormKind::P(p) if p == 1.0 => NormKind::Inf,
            NormKind::P(p) => NormKind::P(p / (p - 1.0)),
        }
    }

    /// p-norm of a slice; callers guarantee finite entries.
    pub fn norm_of(self, v: &[f64]) -> f64 {
        let max = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        match self {
            NormKind::Inf => max,
            _ if max == 0.0 => 0.0,
            NormKind::P(p) if p == 1.0 => v.iter().map(|x| x.abs()).sum(),
            NormKind::P(p) if p == 2.0 => {
                let s: f64 = v.iter().map(|x| (x / max) * (x / max)).sum();
                max * s.sqrt()
            }
            NormKind::P(p) => {
                let s: f64 = v.iter().map(|x| (x.abs() / max).powf(p)).sum();
                max * s.powf(1.0 / p)
            }
        }
    }

    /// A vector of unit norm maximizing `<row, x>`; the maximum equals the
    /// dual norm of `row`. Zero rows give the zero vector.
    pub(crate) fn norming_vector(self, row: &[f64]) -> Vec<f64> {
        let dual = self.dual();
        let dn = dual.norm_of(row);
        if dn == 0.0 {
            return vec![0.0; row.len()];
        }
        match self {
            NormKind::Inf => row.iter().map(|&r| sign(r)).collect(),
            NormKind::P(p) if p == 1.0 => {
                let (i, _) = row.iter().enumerate().fold((0, -1.0), |(bi, bv), (i, r)| {
                    if r.abs() > bv {
                        (i, r.abs())
                    } else {
                        (bi, bv)
                    }
                });
                let mut x = vec![0.0; row.len()];
                x[i] = sign(row[i]);
                x
            }
            NormKind::P(_) => {
                let q = dual.exponent();
                row.iter()
                    .map(|&r| sign(r) * (r.abs() / dn).powf(q - 1.0))
                    .collect()
            }
        }
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Default for NormKind {
    fn default() -> Self {
        NormKind::Inf
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Inf => write!(f, "inf"),
            NormKind::P(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for NormKind {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "sup" | "max" => Ok(NormKind::Inf),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| LabError::validation(format!("bad norm exponent `{other}`")))?;
                NormKind::p(p)
            }
        }
    }
}

/// p-norm of a raw slice, rejecting non-finite coordinates.
pub fn try_norm(v: &[f64], kind: NormKind) -> Result<f64> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(LabError::validation("non-finite coordinate"));
    }
    Ok(kind.norm_of(v))
}

pub fn norm(v: &FiniteVector, kind: NormKind) -> f64 {
    kind.norm_of(v.as_slice())
}

/// Dense operator `R^cols -> R^rows`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearOperator {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LinearOperator {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LabError::validation("operator dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(LabError::validation(format!(
                "operator data has {} entries, expected {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(LabError::validation("operator entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LabError::validation("ragged operator rows"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = Self::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * d + i] = v;
        }
        m
    }

    pub fn dim_in(&self) -> usize {
        self.cols
    }

    pub fn dim_out(&self) -> usize {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn apply(&self, v: &FiniteVector) -> Result<FiniteVector> {
        check_dim(self.cols, v.dim())?;
        let mut out = vec![0.0; self.rows];
        self.apply_into(v.as_slice(), &mut out);
        Ok(FiniteVector::from_raw(out))
    }

    pub(crate) fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    fn apply_transpose_into(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (r, &vr) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a * vr;
            }
        }
    }
}

pub fn apply_operator(t: &LinearOperator, v: &FiniteVector) -> Result<FiniteVector> {
    t.apply(v)
}

/// Operator norm value; `exact == false` marks a sampled lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNorm {
    pub value: f64,
    pub exact: bool,
}

/// Number of seeded directions used for mixed-norm lower bounds.
pub const SAMPLED_NORM_DIRECTIONS: usize = 256;
const SAMPLED_NORM_SEED: u64 = 0x6e6f_726d_5eed;
/// Relative change of the Rayleigh quotient at which power iteration stops.
/// The quotient converges to `sigma^2` well past the 1e-10 target on `sigma`.
const RAYLEIGH_RTOL: f64 = 1e-14;

pub fn operator_norm(t: &LinearOperator, p_in: NormKind, p_out: NormKind) -> OperatorNorm {
    match (p_in, p_out) {
        (NormKind::Inf, NormKind::Inf) => OperatorNorm {
            value: (0..t.rows)
                .map(|r| t.row(r).iter().map(|a| a.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            exact: true,
        },
        (NormKind::P(a), NormKind::P(b)) if a == 1.0 && b == 1.0 => OperatorNorm {
            value: (0..t.cols)
                .map(|c| (0..t.rows).map(|r| t.get(r, c).abs()).sum::<f64>())
                .fold(0.0, f64::max),
            exact: true,
        },
        (NormKind::P(a), NormKind::P(b)) if a == 2.0 && b == 2.0 => OperatorNorm {
            value: spectral_norm(t),
            exact: true,
        },
        _ => OperatorNorm {
            value: sampled_norm(t, p_in, p_out),
            exact: false,
        },
    }
}

/// Largest singular value by power iteration on `T^T T`.
fn spectral_norm(t: &LinearOperator) -> f64 {
    if t.data.iter().all(|&a| a == 0.0) {
        return 0.0;
    }
    let n = t.cols;
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 1e-3 * (i as f64 + 1.0).sqrt())
        .collect();
    let nv = NormKind::L2.norm_of(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut tv = vec![0.0; t.rows];
    let mut w = vec![0.0; n];
    let mut lambda = 0.0_f64;
    for _ in 0..100_000 {
        t.apply_into(&v, &mut tv);
        t.apply_transpose_into(&tv, &mut w);
        let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let nw = NormKind::L2.norm_of(&w);
        if nw == 0.0 {
            break;
        }
        let done = (next - lambda).abs() <= RAYLEIGH_RTOL * next.abs();
        lambda = next;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
        if done {
            break;
        }
    }
    lambda.max(0.0).sqrt()
}

fn sampled_norm(t: &LinearOperator, p_in: NormKind, p_out: NormKind) -> f64 {
    let mut rng = seeded_rng(SAMPLED_NORM_SEED);
    let mut out = vec![0.0; t.rows];
    let mut best = 0.0_f64;
    let mut probe = |v: &[f64], best: &mut f64| {
        let nv = p_in.norm_of(v);
        if nv > 0.0 {
            t.apply_into(v, &mut out);
            *best = best.max(p_out.norm_of(&out) / nv);
        }
    };
    for c in 0..t.cols {
        let mut e = vec![0.0; t.cols];
        e[c] = 1.0;
        probe(&e, &mut best);
    }
    for _ in 0..SAMPLED_NORM_DIRECTIONS {
        let v = unit_vector(&mut rng, t.cols, p_in);
        probe(&v, &mut best);
    }
    best
}

/// Continuous linear functional `v -> <coeffs, v>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Functional {
    pub coeffs: FiniteVector,
    /// Whether `coeffs` has unit dual norm.
    pub unit: bool,
}

impl Functional {
    pub fn new(coeffs: FiniteVector) -> Self {
        Self {
            coeffs,
            unit: false,
        }
    }

    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Self {
            coeffs: FiniteVector::from_raw(c),
            unit: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn apply(&self, v: &[f64]) -> f64 {
        self.coeffs
            .as_slice()
            .iter()
            .zip(v)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Norm of the functional for a space normed by `kind`.
    pub fn dual_norm(&self, kind: NormKind) -> f64 {
        self.coeffs.norm(kind.dual())
    }
}

/// Coordinate functionals followed by `count` seeded random functionals of
/// unit dual norm.
pub fn sample_functionals(
    dim: usize,
    count: usize,
    seed: u64,
    kind: NormKind,
) -> Result<Vec<Functional>> {
    if dim == 0 {
        return Err(LabError::validation("dimension must be positive"));
    }
    if count == 0 {
        return Err(LabError::validation("functional count must be >= 1"));
    }
    let mut rng = seeded_rng(seed);
    let mut out: Vec<Functional> = (0..dim).map(|i| Functional::coordinate(dim, i)).collect();
    for _ in 0..count {
        out.push(Functional {
            coeffs: FiniteVector::from_raw(unit_vector(&mut rng, dim, kind.dual())),
            unit: true,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn fv(v: &[f64]) -> FiniteVector {
        FiniteVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&fv(&[3.0, 4.0]), NormKind::L2), 5.0);
        assert_eq!(norm(&fv(&[1.0, -2.0, 3.0]), NormKind::Inf), 3.0);
        assert_eq!(norm(&fv(&[1.0, 1.0, 1.0, 1.0]), NormKind::L1), 4.0);
        assert_eq!(norm(&FiniteVector::zeros(3), NormKind::P(3.0)), 0.0);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(FiniteVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(FiniteVector::new(vec![f64::INFINITY]).is_err());
        assert!(try_norm(&[f64::NAN], NormKind::L2).is_err());
        assert!(NormKind::p(0.5).is_err());
        assert!(LinearOperator::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn dual_exponents() {
        assert_eq!(NormKind::Inf.dual(), NormKind::L1);
        assert_eq!(NormKind::L1.dual(), NormKind::Inf);
        assert_eq!(NormKind::L2.dual(), NormKind::L2);
        assert_eq!(NormKind::P(3.0).dual(), NormKind::P(1.5));
        assert_eq!("inf".parse::<NormKind>().unwrap(), NormKind::Inf);
        assert_eq!("2".parse::<NormKind>().unwrap(), NormKind::L2);
    }

    #[test]
    fn apply_examples() {
        let v = fv(&[1.0, 2.0]);
        assert_eq!(LinearOperator::identity(2).apply(&v).unwrap(), v);
        assert!(LinearOperator::zeros(3, 2).apply(&v).unwrap().is_zero());
        let d = LinearOperator::diagonal(&[2.0, 3.0]);
        assert_eq!(d.apply(&fv(&[1.0, 1.0])).unwrap(), fv(&[2.0, 3.0]));
        assert!(matches!(
            d.apply(&fv(&[1.0])),
            Err(LabError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn operator_norm_examples() {
        let d = LinearOperator::diagonal(&[2.0, 3.0]);
        let n = operator_norm(&d, NormKind::Inf, NormKind::Inf);
        assert_eq!(
            n,
            OperatorNorm {
                value: 3.0,
                exact: true
            }
        );
        for (a, b) in [(NormKind::L1, NormKind::L1), (NormKind::L2, NormKind::L2)] {
            assert_eq!(operator_norm(&LinearOperator::zeros(2, 3), a, b).value, 0.0);
        }
        let m = LinearOperator::zeros(2, 2);
        assert!(!operator_norm(&m, NormKind::L1, NormKind::Inf).exact);
    }

    #[test]
    fn permutation_is_isometry() {
        let p = LinearOperator::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let n = operator_norm(&p, NormKind::L2, NormKind::L2);
        assert!((n.value - 1.0).abs() < 1e-10);
        // every sampled vector keeps its length
        let mut rng = seeded_rng(3);
        for _ in 0..100 {
            let v = fv(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let pv = p.apply(&v).unwrap();
            assert!((pv.norm(NormKind::L2) - v.norm(NormKind::L2)).abs() < 1e-15);
        }
    }

    #[test]
    fn spectral_norm_of_rectangular() {
        // singular values of [[3,0],[4,5]] are sqrt(45) and sqrt(5)
        let t = LinearOperator::from_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        let n = operator_norm(&t, NormKind::L2, NormKind::L2).value;
        assert!((n - 45f64.sqrt()).abs() < 1e-10 * 45f64.sqrt());
    }

    #[test]
    fn functional_sampling() {
        let f = sample_functionals(2, 1, 7, NormKind::Inf).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0].coeffs, fv(&[1.0, 0.0]));
        assert_eq!(f[1].coeffs, fv(&[0.0, 1.0]));
        assert_eq!(f, sample_functionals(2, 1, 7, NormKind::Inf).unwrap());
        assert!(sample_functionals(2, 0, 7, NormKind::Inf).is_err());

        let g = sample_functionals(3, 5, 1, NormKind::L2).unwrap();
        assert_eq!(g.len(), 8);
        for h in &g {
            assert!((h.coeffs.norm(NormKind::L2) - 1.0).abs() <= 1e-12);
        }
    }

    fn random_vec(rng: &mut crate::rng::LabRng, d: usize) -> Vec<f64> {
        (0..d).map(|_| rng.random_range(-10.0..10.0)).collect()
    }

    #[test]
    fn triangle_and_homogeneity() {
        let mut rng = seeded_rng(11);
        for kind in [NormKind::L1, NormKind::L2, NormKind::P(3.5), NormKind::Inf] {
            for _ in 0..1000 {
                let d = rng.random_range(1..6);
                let u = random_vec(&mut rng, d);
                let v = random_vec(&mut rng, d);
                let s: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
                assert!(kind.norm_of(&s) <= kind.norm_of(&u) + kind.norm_of(&v) + 1e-12);
                let c: f64 = rng.random_range(-5.0..5.0);
                let cu: Vec<f64> = u.iter().map(|a| c * a).collect();
                let lhs = kind.norm_of(&cu);
                let rhs = c.abs() * kind.norm_of(&u);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
            }
        }
    }

    #[test]
    fn operator_bound_on_samples() {
        let mut rng = seeded_rng(12);
        let cases = [
            (NormKind::L1, NormKind::L1),
            (NormKind::L2, NormKind::L2),
            (NormKind::Inf, NormKind::Inf),
        ];
        for _ in 0..1000 {
            let (r, c) = (rng.random_range(1..5), rng.random_range(1..5));
            let t = LinearOperator::new(r, c, random_vec(&mut rng, r * c)).unwrap();
            let v = fv(&random_vec(&mut rng, c));
            let tv = t.apply(&v).unwrap();
            for (a, b) in cases {
                let n = operator_norm(&t, a, b);
                assert!(n.exact);
                assert!(tv.norm(b) <= n.value * v.norm(a) + 1e-9);
            }
        }
    }

    #[test]
    fn functional_consistency() {
        let mut rng = seeded_rng(13);
        for kind in [NormKind::L1, NormKind::L2, NormKind::Inf] {
            let fs = sample_functionals(4, 20, 5, kind).unwrap();
            for _ in 0..200 {
                let v = random_vec(&mut rng, 4);
                for f in &fs {
                    assert!(f.apply(&v).abs() <= kind.norm_of(&v) + 1e-10);
                }
            }
        }
    }

    #[test]
    fn norming_vector_attains_dual_norm() {
        let row = [1.0, -2.0, 0.5];
        for kind in [NormKind::L1, NormKind::L2, NormKind::P(3.0), NormKind::Inf] {
            let x = kind.norming_vector(&row);
            assert!((kind.norm_of(&x) - 1.0).abs() < 1e-12);
            let val: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!((val - kind.dual().norm_of(&row)).abs() < 1e-12);
        }
    }
}
