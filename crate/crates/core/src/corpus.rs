//! The black-box function interface and a labeled corpus of test functions.
//!
//! Every scalar entry is normalized to vanish at the origin, so probes can
//! assume `f(0) = 0` throughout. Truth labels record analytic facts about
//! differentiability at the origin; the notes say why, so the catalog doubles
//! as documentation.
//!
//! One classical counterexample is cataloged but deliberately has no numeric
//! entry: `G(x, y) = x*y*D(x*y)` with `D` the indicator of the rationals.
//! `G` is differentiable at the origin and discontinuous off the axes, but
//! every machine-representable number is rational, so in floating point
//! `D == 1` and `G` collapses to `x*y`. An unimplementable function must not
//! masquerade as implemented; it appears only in this note.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::{unit_axis, BlockVector, Vector};

/// Ground-truth differentiability label at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truth {
    DifferentiableAtOrigin,
    NotDifferentiableAtOrigin,
    Unknown,
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Truth::DifferentiableAtOrigin => "differentiable",
            Truth::NotDifferentiableAtOrigin => "not differentiable",
            Truth::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

type ScalarEval = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;

/// A real scalar field under test. Evaluation must be pure; probes evaluate
/// concurrently across directions and radii.
#[derive(Clone)]
pub struct ScalarField {
    pub name: String,
    pub dim: usize,
    /// Human-readable formula for catalogs and reports.
    pub formula: String,
    pub truth: Truth,
    pub truth_note: String,
    /// Gradient at the origin when known analytically.
    pub analytic_gradient_at_origin: Option<Vector>,
    eval: ScalarEval,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("truth", &self.truth)
            .finish()
    }
}

impl ScalarField {
    pub fn new(
        name: &str,
        dim: usize,
        formula: &str,
        truth: Truth,
        truth_note: &str,
        analytic_gradient_at_origin: Option<Vector>,
        eval: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.to_string(),
            dim,
            formula: formula.to_string(),
            truth,
            truth_note: truth_note.to_string(),
            analytic_gradient_at_origin,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, x: &Vector) -> f64 {
        debug_assert_eq!(x.dim(), self.dim);
        (self.eval)(x)
    }

    /// Probe the field at `p` by translating it to the origin:
    /// `f~(x) = f(p + x) - f(p)`. The translated field keeps the
    /// normalization `f~(0) = 0`; the origin truth label does not carry
    /// over, so it becomes `Unknown`.
    pub fn translated(&self, p: &Vector) -> Result<ScalarField> {
        if p.dim() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "point dimension {} does not match function dimension {}",
                p.dim(),
                self.dim
            )));
        }
        let base = self.eval.clone();
        let offset = base(p);
        if !offset.is_finite() {
            return Err(Error::NonFinite {
                context: format!("{} at {}", self.name, p.label()),
            });
        }
        let p = p.clone();
        Ok(ScalarField {
            name: format!("{}@{}", self.name, p.label()),
            dim: self.dim,
            formula: self.formula.clone(),
            truth: Truth::Unknown,
            truth_note: "translated probe point; origin label does not transfer".into(),
            analytic_gradient_at_origin: None,
            eval: Arc::new(move |x: &Vector| base(&p.add(x)) - offset),
        })
    }
}

/// Partial values: the function restricted to each coordinate axis,
/// `[f(x^1 e_1), ..., f(x^n e_n)]`.
pub fn partial_values(f: &ScalarField, x: &Vector) -> Vec<f64> {
    debug_assert_eq!(x.dim(), f.dim);
    (1..=f.dim)
        .map(|i| {
            let e = unit_axis(i, f.dim).expect("axis in range");
            f.eval(&e.scaled(x.coords()[i - 1]))
        })
        .collect()
}

type BlockEval = Arc<dyn Fn(&BlockVector) -> Vector + Send + Sync>;

/// A function on a product of vector spaces, `F: Y_1 x ... x Y_n -> Z`,
/// normalized so the zero block point maps to zero.
#[derive(Clone)]
pub struct BlockField {
    pub name: String,
    pub block_dims: Vec<usize>,
    pub codomain_dim: usize,
    pub formula: String,
    pub truth: Truth,
    pub truth_note: String,
    eval: BlockEval,
}

impl fmt::Debug for BlockField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockField")
            .field("name", &self.name)
            .field("block_dims", &self.block_dims)
            .field("codomain_dim", &self.codomain_dim)
            .finish()
    }
}

impl BlockField {
    pub fn new(
        name: &str,
        block_dims: &[usize],
        codomain_dim: usize,
        formula: &str,
        truth: Truth,
        truth_note: &str,
        eval: impl Fn(&BlockVector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.to_string(),
            block_dims: block_dims.to_vec(),
            codomain_dim,
            formula: formula.to_string(),
            truth,
            truth_note: truth_note.to_string(),
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, y: &BlockVector) -> Vector {
        debug_assert_eq!(y.block_count(), self.block_dims.len());
        (self.eval)(y)
    }
}

/// Block partial values: `F` evaluated with all blocks but one zeroed,
/// one result per block.
pub fn block_partial_values(f: &BlockField, y: &BlockVector) -> Vec<Vector> {
    (0..f.block_dims.len())
        .map(|j| {
            f.eval(&BlockVector::only_block(
                &f.block_dims,
                j,
                y.blocks()[j].clone(),
            ))
        })
        .collect()
}

fn vec2(x: f64, y: f64) -> Vector {
    Vector::new(vec![x, y]).expect("finite literals")
}

/// `x^2 y / (x^2 + y^2)`: every directional derivative exists (the radial
/// slope at angle phi is cos^2(phi) sin(phi)) yet no tangent plane does.
fn g2() -> ScalarField {
    ScalarField::new(
        "g2",
        2,
        "x^2*y/(x^2+y^2), 0 at origin",
        Truth::NotDifferentiableAtOrigin,
        "homogeneous of degree 1: directional slopes cos^2(phi)*sin(phi) depend \
         nonlinearly on direction, so the tangent lines form no common plane",
        None,
        |x: &Vector| {
            let (a, b) = (x.coords()[0], x.coords()[1]);
            let denom = a * a + b * b;
            if denom == 0.0 {
                0.0
            } else {
                a * a * b / denom
            }
        },
    )
}

/// `rho^2 cos(1/rho)`: differentiable at the origin with zero gradient, yet
/// every partial derivative is discontinuous there. The standard witness
/// that continuity-based sufficient conditions are not necessary.
fn h_osc(dim: usize) -> ScalarField {
    ScalarField::new(
        &format!("h_osc{dim}"),
        dim,
        "rho^2*cos(1/rho), 0 at origin",
        Truth::DifferentiableAtOrigin,
        "|f| <= rho^2 gives gradient 0, but the partials oscillate without \
         limit on every ray",
        Some(Vector::zeros(dim)),
        |x: &Vector| {
            let rho = x.norm();
            if rho == 0.0 {
                0.0
            } else {
                rho * rho * (1.0 / rho).cos()
            }
        },
    )
}

fn linear_23() -> ScalarField {
    ScalarField::new(
        "linear_23",
        2,
        "2x + 3y",
        Truth::DifferentiableAtOrigin,
        "linear, hence its own differential",
        Some(vec2(2.0, 3.0)),
        |x: &Vector| 2.0 * x.coords()[0] + 3.0 * x.coords()[1],
    )
}

fn prod_xy() -> ScalarField {
    ScalarField::new(
        "prod_xy",
        2,
        "x*y",
        Truth::DifferentiableAtOrigin,
        "smooth saddle; gradient vanishes at the origin",
        Some(vec2(0.0, 0.0)),
        |x: &Vector| x.coords()[0] * x.coords()[1],
    )
}

fn euclid_norm() -> ScalarField {
    ScalarField::new(
        "euclid_norm",
        2,
        "sqrt(x^2 + y^2)",
        Truth::NotDifferentiableAtOrigin,
        "the cone: one-sided axis slopes are -1 and +1, so no partial \
         derivative exists at the origin",
        None,
        |x: &Vector| x.norm(),
    )
}

/// `x^2 sin(1/x) + y` (the x-term is 0 at x = 0): f_y is identically 1 and
/// in particular continuous, while f_x merely exists at the origin. The
/// canonical input for the relaxed sufficient conditions.
fn relaxed_demo() -> ScalarField {
    ScalarField::new(
        "relaxed_demo",
        2,
        "x^2*sin(1/x) + y, with f(0,y) = y",
        Truth::DifferentiableAtOrigin,
        "f_y == 1 is continuous; f_x(0,0) = 0 exists although \
         f_x(x,0) = 2x*sin(1/x) - cos(1/x) has no limit at 0",
        Some(vec2(0.0, 1.0)),
        |x: &Vector| {
            let (a, b) = (x.coords()[0], x.coords()[1]);
            if a == 0.0 {
                b
            } else {
                a * a * (1.0 / a).sin() + b
            }
        },
    )
}

/// The scalar corpus probed by the regression suite, in report order.
pub fn corpus_list() -> Vec<ScalarField> {
    vec![
        g2(),
        h_osc(2),
        h_osc(3),
        linear_23(),
        prod_xy(),
        euclid_norm(),
        relaxed_demo(),
    ]
}

pub fn find_scalar(id: &str) -> Result<ScalarField> {
    corpus_list()
        .into_iter()
        .find(|f| f.name == id)
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}

// Fixed coefficient matrices for the block corpus. Chosen full-rank and
// integer so fits can be checked entrywise.
pub const BLOCK_M1: [[f64; 2]; 3] = [[1.0, 2.0], [0.0, 1.0], [3.0, -1.0]];
pub const BLOCK_M2: [[f64; 3]; 3] = [[0.0, 1.0, 1.0], [2.0, 0.0, -1.0], [1.0, 1.0, 0.0]];

fn apply_m1(u: &Vector) -> Vec<f64> {
    BLOCK_M1
        .iter()
        .map(|row| row.iter().zip(u.coords()).map(|(m, x)| m * x).sum())
        .collect()
}

fn apply_m2(v: &Vector) -> Vec<f64> {
    BLOCK_M2
        .iter()
        .map(|row| row.iter().zip(v.coords()).map(|(m, x)| m * x).sum())
        .collect()
}

fn block_base(y: &BlockVector) -> Vec<f64> {
    let m1 = apply_m1(&y.blocks()[0]);
    let m2 = apply_m2(&y.blocks()[1]);
    m1.iter().zip(&m2).map(|(a, b)| a + b).collect()
}

fn block_field(
    name: &str,
    formula: &str,
    truth: Truth,
    note: &str,
    extra: impl Fn(&BlockVector, &mut Vec<f64>) + Send + Sync + 'static,
) -> BlockField {
    BlockField::new(
        name,
        &[2, 3],
        3,
        formula,
        truth,
        note,
        move |y: &BlockVector| {
            let mut out = block_base(y);
            extra(y, &mut out);
            Vector::new(out).expect("finite block corpus output")
        },
    )
}

/// Block-structured corpus over `R^2 x R^3 -> R^3`.
pub fn block_corpus_list() -> Vec<BlockField> {
    vec![
        block_field(
            "block_linear",
            "M1*u + M2*v",
            Truth::DifferentiableAtOrigin,
            "block-linear, hence its own block differential",
            |_, _| {},
        ),
        block_field(
            "block_cross",
            "M1*u + M2*v + |u||v|*e1",
            Truth::DifferentiableAtOrigin,
            "cross term |u||v| <= rho^2 vanishes to second order",
            |y, out| out[0] += y.blocks()[0].norm() * y.blocks()[1].norm(),
        ),
        block_field(
            "block_sqrt_cross",
            "M1*u + M2*v + sqrt(|u||v|)*e1",
            Truth::NotDifferentiableAtOrigin,
            "sqrt(|u||v|) is exactly rho along |u| = |v| = rho, first order \
             and not captured by any block-linear sum",
            |y, out| out[0] += (y.blocks()[0].norm() * y.blocks()[1].norm()).sqrt(),
        ),
        block_field(
            "block_norm1",
            "|u|*e1 + M2*v",
            Truth::NotDifferentiableAtOrigin,
            "the |u| cone admits no linear approximation in block 1",
            |y, out| {
                let m1 = apply_m1(&y.blocks()[0]);
                for (o, m) in out.iter_mut().zip(&m1) {
                    *o -= m;
                }
                out[0] += y.blocks()[0].norm();
            },
        ),
        block_field(
            "block_smooth",
            "M1*u + M2*v + sum(u)*sum(v)*e2",
            Truth::DifferentiableAtOrigin,
            "smooth bilinear coupling: the block-2 map drifts linearly with \
             the block-1 offset",
            |y, out| {
                let su: f64 = y.blocks()[0].coords().iter().sum();
                let sv: f64 = y.blocks()[1].coords().iter().sum();
                out[1] += su * sv;
            },
        ),
        block_field(
            "block_jump",
            "M1*u + M2*v + [u != 0]*sum(v)*e1",
            Truth::NotDifferentiableAtOrigin,
            "the block-2 map jumps when block 1 leaves the origin; its drift \
             never vanishes",
            |y, out| {
                if y.blocks()[0].norm() > 0.0 {
                    out[0] += y.blocks()[1].coords().iter().sum::<f64>();
                }
            },
        ),
    ]
}

pub fn find_block(id: &str) -> Result<BlockField> {
    block_corpus_list()
        .into_iter()
        .find(|f| f.name == id)
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}

type ComplexEval = Arc<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

/// A function of n complex variables, probed through its real embedding on
/// `R^{2n}` with coordinates `(re z_1, im z_1, ..., re z_n, im z_n)`.
#[derive(Clone)]
pub struct ComplexFieldSample {
    pub name: String,
    pub n: usize,
    pub formula: String,
    pub truth_note: String,
    eval: ComplexEval,
}

impl fmt::Debug for ComplexFieldSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexFieldSample")
            .field("name", &self.name)
            .field("n", &self.n)
            .finish()
    }
}

impl ComplexFieldSample {
    pub fn new(
        name: &str,
        n: usize,
        formula: &str,
        truth_note: &str,
        eval: impl Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.to_string(),
            n,
            formula: formula.to_string(),
            truth_note: truth_note.to_string(),
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.n);
        (self.eval)(z)
    }

    /// Interleave a real point of `R^{2n}` into complex coordinates.
    pub fn recompose(&self, x: &Vector) -> Vec<Complex64> {
        debug_assert_eq!(x.dim(), 2 * self.n);
        x.coords()
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect()
    }

    /// Evaluate through the real embedding.
    pub fn eval_embedded(&self, x: &Vector) -> Complex64 {
        self.eval(&self.recompose(x))
    }

    /// Real (or imaginary) part as a scalar field on `R^{2n}`.
    pub fn component_field(&self, imag: bool) -> ScalarField {
        let eval = self.eval.clone();
        let n = self.n;
        let part = if imag { "im" } else { "re" };
        ScalarField::new(
            &format!("{}:{part}", self.name),
            2 * n,
            &format!("{part}({})", self.formula),
            Truth::Unknown,
            "component of a complex field",
            None,
            move |x: &Vector| {
                let z: Vec<Complex64> = x
                    .coords()
                    .chunks_exact(2)
                    .map(|p| Complex64::new(p[0], p[1]))
                    .collect();
                let w = eval(&z);
                if imag {
                    w.im
                } else {
                    w.re
                }
            },
        )
    }
}

/// Complex corpus for the Cauchy-Riemann check.
pub fn complex_corpus_list() -> Vec<ComplexFieldSample> {
    vec![
        ComplexFieldSample::new("cx_square", 1, "z^2", "entire", |z| z[0] * z[0]),
        ComplexFieldSample::new(
            "cx_conj",
            1,
            "conj(z)",
            "d/d(conj z) = 1 everywhere: nowhere complex-differentiable",
            |z| z[0].conj(),
        ),
        ComplexFieldSample::new(
            "cx_modsq",
            1,
            "|z|^2",
            "d/d(conj z) = z vanishes at the origin only",
            |z| z[0] * z[0].conj(),
        ),
        ComplexFieldSample::new("cx_z1z2", 2, "z1*z2", "entire in two variables", |z| {
            z[0] * z[1]
        }),
    ]
}

pub fn find_complex(id: &str) -> Result<ComplexFieldSample> {
    complex_corpus_list()
        .into_iter()
        .find(|f| f.name == id)
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}
