//! Vectors, block vectors, radius schedules and direction sampling.
//!
//! Everything downstream probes a function on shrinking spheres: this module
//! owns the point types, the geometric radius schedules that discretize
//! "radius to zero", and the reproducible direction sets the probes walk.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radii below `RADIUS_FLOOR_FACTOR * eps * max(1, rho0)` are dropped from
/// schedules: residuals there are dominated by cancellation noise.
pub const RADIUS_FLOOR_FACTOR: f64 = 1e3;

/// A point in n-dimensional Euclidean space. Coordinates are finite by
/// construction and the dimension is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("vector needs dimension >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "vector coordinates must be finite".into(),
            ));
        }
        Ok(Self { coords })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coords: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean norm; zero exactly when every coordinate is zero. Scaled
    /// by the largest coordinate so squares cannot underflow to zero.
    pub fn norm(&self) -> f64 {
        let max = self.coords.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            return 0.0;
        }
        let sum: f64 = self
            .coords
            .iter()
            .map(|c| {
                let r = c / max;
                r * r
            })
            .sum();
        max * sum.sqrt()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scaled(&self, t: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|c| c * t).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Unit vector in the same direction; error when the norm is zero.
    pub fn normalized(&self) -> Result<Vector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(self.scaled(1.0 / n))
    }

    /// Compact `(a b c)` rendering used in evidence contexts. Deliberately
    /// comma-free so the strings embed into CSV untouched.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| format!("{c:.6}")).collect();
        format!("({})", parts.join(" "))
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;
    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.coords
    }
}

/// Unit vector along the i-th coordinate axis. Axis indices are 1-based,
/// matching the superscript convention x^1 ... x^n used everywhere else.
pub fn unit_axis(i: usize, n: usize) -> Result<Vector> {
    if i == 0 || i > n {
        return Err(Error::InvalidArgument(format!(
            "axis {i} out of range for dimension {n}"
        )));
    }
    let mut coords = vec![0.0; n];
    coords[i - 1] = 1.0;
    Ok(Vector { coords })
}

/// A point in a product of vector spaces: one `Vector` per block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    blocks: Vec<Vector>,
}

impl BlockVector {
    pub fn new(blocks: Vec<Vector>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument(
                "block vector needs at least one block".into(),
            ));
        }
        Ok(Self { blocks })
    }

    pub fn zeros(dims: &[usize]) -> Self {
        Self {
            blocks: dims.iter().map(|&d| Vector::zeros(d)).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vector] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Product-space norm: the max of the block norms. Zero exactly when
    /// every block is zero.
    pub fn block_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm()).fold(0.0, f64::max)
    }

    /// Copy with block `j` (0-based) replaced.
    pub fn with_block(&self, j: usize, block: Vector) -> BlockVector {
        let mut blocks = self.blocks.clone();
        blocks[j] = block;
        BlockVector { blocks }
    }

    /// Zero everywhere except block `j`.
    pub fn only_block(dims: &[usize], j: usize, block: Vector) -> BlockVector {
        let mut out = BlockVector::zeros(dims);
        out.blocks[j] = block;
        out
    }
}

/// Geometrically shrinking radii `rho0 * lambda^k`, k = 0..count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSchedule {
    pub rho0: f64,
    pub lambda: f64,
    pub count: usize,
}

impl RadialSchedule {
    pub fn new(rho0: f64, lambda: f64, count: usize) -> Result<Self> {
        if !(rho0.is_finite() && rho0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rho0 must be positive, got {rho0}"
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in (0,1), got {lambda}"
            )));
        }
        if count < 4 {
            return Err(Error::InvalidArgument(format!(
                "count must be >= 4, got {count}"
            )));
        }
        Ok(Self {
            rho0,
            lambda,
            count,
        })
    }

    /// Smallest radius the schedule is allowed to emit.
    pub fn floor(&self) -> f64 {
        RADIUS_FLOOR_FACTOR * f64::EPSILON * self.rho0.max(1.0)
    }

    /// The strictly decreasing radius list, truncated at the machine-scale
    /// floor. Iterative multiplication keeps consecutive ratios equal to
    /// lambda to within one rounding.
    pub fn radii(&self) -> Vec<f64> {
        let floor = self.floor();
        let mut out = Vec::with_capacity(self.count);
        let mut rho = self.rho0;
        for _ in 0..self.count {
            if rho < floor {
                break;
            }
            out.push(rho);
            rho *= self.lambda;
        }
        out
    }

    /// True when `radii()` dropped trailing entries at the floor; evidence
    /// collected under a truncated schedule carries a warning flag.
    pub fn floor_truncated(&self) -> bool {
        self.radii().len() < self.count
    }
}

/// A reproducible set of unit directions: the 2n signed axes plus `extra`
/// pseudo-random members drawn from a seed-keyed counter-based generator.
#[derive(Debug, Clone)]
pub struct DirectionSet {
    directions: Vec<Vector>,
    seed: u64,
}

impl DirectionSet {
    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// The 2n signed axis directions plus explicitly chosen extras
    /// (normalized here). Used by tests that must pin a particular
    /// direction, e.g. a diagonal.
    pub fn axes_with(n: usize, extras: &[Vector]) -> Result<Self> {
        let mut directions = signed_axes(n)?;
        for v in extras {
            if v.dim() != n {
                return Err(Error::InvalidArgument(format!(
                    "extra direction {} has dimension {}, expected {n}",
                    v.label(),
                    v.dim()
                )));
            }
            directions.push(v.normalized()?);
        }
        Ok(Self {
            directions,
            seed: 0,
        })
    }
}

fn signed_axes(n: usize) -> Result<Vec<Vector>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let mut axes = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let e = unit_axis(i, n)?;
        axes.push(e.clone());
        axes.push(e.scaled(-1.0));
    }
    Ok(axes)
}

/// One pseudo-random unit vector: normalized coordinate-wise standard
/// normal draws, redrawn in the measure-zero case of a tiny norm.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let coords: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let v = Vector { coords };
        if v.norm() > 1e-6 {
            return v.scaled(1.0 / v.norm());
        }
    }
}

/// Deterministic direction set: 2n signed axes plus `extra` seeded random
/// unit vectors. A pure function of `(n, extra, seed)`.
pub fn make_directions(n: usize, extra: usize, seed: u64) -> Result<DirectionSet> {
    let mut directions = signed_axes(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        directions.push(random_unit_vector(&mut rng, n));
    }
    Ok(DirectionSet { directions, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_axis_basis() {
        assert_eq!(unit_axis(1, 3).unwrap().coords(), &[1.0, 0.0, 0.0]);
        assert_eq!(unit_axis(3, 3).unwrap().coords(), &[0.0, 0.0, 1.0]);
        assert!(matches!(unit_axis(4, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(unit_axis(0, 3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn unit_axis_orthonormal() {
        for n in 1..=5 {
            for i in 1..=n {
                let ei = unit_axis(i, n).unwrap();
                assert_eq!(ei.norm(), 1.0);
                for j in 1..=n {
                    let ej = unit_axis(j, n).unwrap();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_eq!(ei.dot(&ej), expected);
                }
            }
        }
    }

    #[test]
    fn vector_rejects_non_finite() {
        assert!(Vector::new(vec![]).is_err());
        assert!(Vector::new(vec![f64::NAN]).is_err());
        assert!(Vector::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn norm_zero_iff_zero() {
        assert_eq!(Vector::zeros(4).norm(), 0.0);
        let v = Vector::new(vec![0.0, 1e-300, 0.0]).unwrap();
        assert!(v.norm() > 0.0);
    }

    #[test]
    fn block_norm_is_max() {
        let b = BlockVector::new(vec![
            Vector::new(vec![3.0, 4.0]).unwrap(),
            Vector::new(vec![1.0, 1.0, 1.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(b.block_norm(), 5.0);
        assert_eq!(BlockVector::zeros(&[2, 3]).block_norm(), 0.0);
    }

    #[test]
    fn radii_geometric() {
        let s = RadialSchedule::new(1.0, 0.5, 4).unwrap();
        assert_eq!(s.radii()[..3], [1.0, 0.5, 0.25]);

        let s = RadialSchedule::new(0.1, 0.1, 4).unwrap();
        let r = s.radii();
        let expected = [0.1, 0.01, 0.001, 0.0001];
        for (got, want) in r.iter().zip(expected) {
            assert!((got - want).abs() <= 1e-15 * want);
        }

        assert!(RadialSchedule::new(1.0, 1.5, 4).is_err());
        assert!(RadialSchedule::new(1.0, 0.5, 3).is_err());
        assert!(RadialSchedule::new(-1.0, 0.5, 8).is_err());
    }

    #[test]
    fn radii_ratio_is_lambda() {
        let s = RadialSchedule::new(0.7, 0.61, 30).unwrap();
        let r = s.radii();
        for w in r.windows(2) {
            assert!((w[1] / w[0] - 0.61).abs() < 1e-15);
        }
    }

    #[test]
    fn radii_floor_truncation() {
        // 1.0 * 0.1^k dips under the ~2.2e-13 floor at k = 13.
        let s = RadialSchedule::new(1.0, 0.1, 20).unwrap();
        let r = s.radii();
        assert!(r.len() < 20);
        assert!(s.floor_truncated());
        assert!(*r.last().unwrap() >= s.floor());

        let s = RadialSchedule::new(1.0, 0.5, 8).unwrap();
        assert!(!s.floor_truncated());
    }

    #[test]
    fn directions_axes_only() {
        let d = make_directions(2, 0, 0).unwrap();
        let got: Vec<&[f64]> = d.directions().iter().map(|v| v.coords()).collect();
        assert_eq!(
            got,
            vec![&[1.0, 0.0][..], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]
        );

        let d1 = make_directions(1, 0, 7).unwrap();
        let got: Vec<&[f64]> = d1.directions().iter().map(|v| v.coords()).collect();
        assert_eq!(got, vec![&[1.0][..], &[-1.0]]);
    }

    #[test]
    fn directions_deterministic_and_unit() {
        let a = make_directions(2, 8, 42).unwrap();
        let b = make_directions(2, 8, 42).unwrap();
        assert_eq!(a.len(), 12);
        for (u, v) in a.directions().iter().zip(b.directions()) {
            assert_eq!(u, v);
            assert!((u.norm() - 1.0).abs() < 1e-12);
        }
        let c = make_directions(2, 8, 43).unwrap();
        assert_ne!(a.directions()[4], c.directions()[4]);
    }

    #[test]
    fn axes_with_normalizes_extras() {
        let diag = Vector::new(vec![1.0, 1.0]).unwrap();
        let d = DirectionSet::axes_with(2, &[diag]).unwrap();
        assert_eq!(d.len(), 5);
        assert!((d.directions()[4].norm() - 1.0).abs() < 1e-15);
        assert!(DirectionSet::axes_with(2, &[Vector::zeros(2)]).is_err());
    }
}
