//! Multiplier sequences `x = (x_k)` in `X = R^m`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::rng::{seeded_rng, unit_vector, LabRng};
use crate::space::NormKind;
use crate::summability::parse_floats;

/// Envelope base of the seeded null family: `||x_k|| = 0.95^k * U[0.5, 1]`.
pub const NULL_ENVELOPE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MultiplierClass {
    Phi,
    C0,
    Linf,
}

impl MultiplierClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MultiplierClass::Phi => "phi",
            MultiplierClass::C0 => "c0",
            MultiplierClass::Linf => "linf",
        }
    }
}

impl fmt::Display for MultiplierClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MultiplierClass {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "phi" => Ok(MultiplierClass::Phi),
            "c0" => Ok(MultiplierClass::C0),
            "linf" => Ok(MultiplierClass::Linf),
            other => Err(LabError::validation(format!(
                "unknown multiplier class '{other}'"
            ))),
        }
    }
}

/// A rule generating `x_k`. Scalar rules act on every coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MultiplierSequence {
    /// `x_k = (1, ..., 1)`.
    Ones,
    /// Scalars `c_k` broadcast, then zeros.
    Phi(Vec<f64>),
    /// Listed vectors, then zeros.
    Explicit(Vec<Vec<f64>>),
    /// Scalars repeated with period equal to the list length.
    Periodic(Vec<f64>),
    /// `x_k = q^k` broadcast, `|q| <= 1`.
    Geometric(f64),
    /// Seeded random directions with envelope `0.95^k` times `U[0.5, 1]`.
    SeededNull(u64),
    /// Seeded random unit directions with random signs.
    SeededBounded(u64),
    Scaled(f64, Box<MultiplierSequence>),
    Sum(Box<MultiplierSequence>, Box<MultiplierSequence>),
    /// Zero for `k <= from`.
    Tail {
        from: usize,
        inner: Box<MultiplierSequence>,
    },
}

impl MultiplierSequence {
    pub fn scaled(self, c: f64) -> Self {
        MultiplierSequence::Scaled(c, Box::new(self))
    }

    pub fn plus(self, other: Self) -> Self {
        MultiplierSequence::Sum(Box::new(self), Box::new(other))
    }

    pub fn tail(self, from: usize) -> Self {
        MultiplierSequence::Tail {
            from,
            inner: Box::new(self),
        }
    }

    pub fn claimed_class(&self) -> MultiplierClass {
        match self {
            MultiplierSequence::Phi(_) | MultiplierSequence::Explicit(_) => MultiplierClass::Phi,
            MultiplierSequence::SeededNull(_) => MultiplierClass::C0,
            MultiplierSequence::Geometric(q) if q.abs() < 1.0 => MultiplierClass::C0,
            MultiplierSequence::Ones
            | MultiplierSequence::Periodic(_)
            | MultiplierSequence::Geometric(_)
            | MultiplierSequence::SeededBounded(_) => MultiplierClass::Linf,
            MultiplierSequence::Scaled(c, _) if *c == 0.0 => MultiplierClass::Phi,
            MultiplierSequence::Scaled(_, inner) | MultiplierSequence::Tail { inner, .. } => {
                inner.claimed_class()
            }
            MultiplierSequence::Sum(a, b) => a.claimed_class().max(b.claimed_class()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|a| a.is_finite());
        match self {
            MultiplierSequence::Phi(v) if !finite(v) => {
                Err(LabError::validation("multiplier entries must be finite"))
            }
            MultiplierSequence::Explicit(vs) if vs.iter().any(|v| !finite(v)) => {
                Err(LabError::validation("multiplier entries must be finite"))
            }
            MultiplierSequence::Periodic(v) if v.is_empty() || !finite(v) => Err(
                LabError::validation("periodic multiplier needs finite entries"),
            ),
            MultiplierSequence::Geometric(q) if !(q.is_finite() && q.abs() <= 1.0) => Err(
                LabError::validation(format!("geometric multiplier needs |q| <= 1, got {q}")),
            ),
            MultiplierSequence::Scaled(c, inner) => {
                if !c.is_finite() {
                    return Err(LabError::validation("scale must be finite"));
                }
                inner.validate()
            }
            MultiplierSequence::Tail { inner, .. } => inner.validate(),
            MultiplierSequence::Sum(a, b) => {
                a.validate()?;
                b.validate()
            }
            _ => Ok(()),
        }
    }

    /// Generator of `x_1, x_2, ...` in `R^dim`; random directions are unit in
    /// `norm`.
    pub fn stream(&self, dim: usize, norm: NormKind) -> Result<MultiplierStream> {
        self.validate()?;
        if dim == 0 {
            return Err(LabError::validation("dimension must be positive"));
        }
        if let MultiplierSequence::Explicit(vs) = self {
            if let Some(v) = vs.iter().find(|v| v.len() != dim) {
                return Err(LabError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        Ok(MultiplierStream {
            k: 0,
            dim,
            gen: Gen::build(self, dim, norm)?,
        })
    }

    pub fn materialize(&self, dim: usize, norm: NormKind, n: usize) -> Result<Vec<Vec<f64>>> {
        let mut s = self.stream(dim, norm)?;
        Ok((0..n).map(|_| s.next_vec()).collect())
    }

    /// Records how the claimed class looks at `depth`.
    pub fn class_evidence(
        &self,
        dim: usize,
        norm: NormKind,
        depth: usize,
        tol: f64,
    ) -> Result<ClassEvidence> {
        let mut s = self.stream(dim, norm)?;
        let mut x = vec![0.0; dim];
        let mut sup: f64 = 0.0;
        let mut last_nonzero = 0;
        let mut last_above = 0;
        for k in 1..=depth {
            s.fill_next(&mut x);
            let n = norm.norm_of(&x);
            sup = sup.max(n);
            if n > 0.0 {
                last_nonzero = k;
            }
            if n > tol {
                last_above = k;
            }
        }
        let claimed = self.claimed_class();
        let consistent = match claimed {
            MultiplierClass::Phi => last_nonzero < depth,
            MultiplierClass::C0 => last_above < depth,
            MultiplierClass::Linf => sup.is_finite(),
        };
        Ok(ClassEvidence {
            claimed,
            depth,
            sup_norm: sup,
            last_nonzero,
            last_above_tol: last_above,
            consistent,
        })
    }

    /// `sup_{k<=depth} ||x_k||`.
    pub fn sup_norm(&self, dim: usize, norm: NormKind, depth: usize) -> Result<f64> {
        Ok(self.class_evidence(dim, norm, depth, 0.0)?.sup_norm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassEvidence {
    pub claimed: MultiplierClass,
    pub depth: usize,
    pub sup_norm: f64,
    pub last_nonzero: usize,
    pub last_above_tol: usize,
    pub consistent: bool,
}

#[derive(Debug, Clone)]
enum Gen {
    Rule(MultiplierSequence),
    Null(LabRng, NormKind),
    Bounded(LabRng, NormKind),
    Scaled(f64, Box<Gen>),
    Sum(Box<Gen>, Box<Gen>, Vec<f64>),
    Tail(usize, Box<Gen>),
}

impl Gen {
    fn build(seq: &MultiplierSequence, dim: usize, norm: NormKind) -> Result<Gen> {
        Ok(match seq {
            MultiplierSequence::SeededNull(s) => Gen::Null(seeded_rng(*s), norm),
            MultiplierSequence::SeededBounded(s) => Gen::Bounded(seeded_rng(*s), norm),
            MultiplierSequence::Scaled(c, inner) => {
                Gen::Scaled(*c, Box::new(Gen::build(inner, dim, norm)?))
            }
            MultiplierSequence::Sum(a, b) => Gen::Sum(
                Box::new(Gen::build(a, dim, norm)?),
                Box::new(Gen::build(b, dim, norm)?),
                vec![0.0; dim],
            ),
            MultiplierSequence::Tail { from, inner } => {
                Gen::Tail(*from, Box::new(Gen::build(inner, dim, norm)?))
            }
            MultiplierSequence::Explicit(vs) => {
                if let Some(v) = vs.iter().find(|v| v.len() != dim) {
                    return Err(LabError::DimensionMismatch {
                        expected: dim,
                        found: v.len(),
                    });
                }
                Gen::Rule(seq.clone())
            }
            other => Gen::Rule(other.clone()),
        })
    }

    fn fill(&mut self, k: usize, out: &mut [f64]) {
        match self {
            Gen::Rule(rule) => match rule {
                MultiplierSequence::Ones => out.fill(1.0),
                MultiplierSequence::Phi(v) => out.fill(v.get(k - 1).copied().unwrap_or(0.0)),
                MultiplierSequence::Explicit(vs) => match vs.get(k - 1) {
                    Some(v) => out.copy_from_slice(v),
                    None => out.fill(0.0),
                },
                MultiplierSequence::Periodic(v) => out.fill(v[(k - 1) % v.len()]),
                MultiplierSequence::Geometric(q) => {
                    out.fill(q.powi(k.min(i32::MAX as usize) as i32))
                }
                _ => unreachable!("random and composite rules have dedicated generators"),
            },
            Gen::Null(rng, norm) => {
                let scale = NULL_ENVELOPE.powi(k.min(i32::MAX as usize) as i32)
                    * rng.random_range(0.5..=1.0);
                let dir = unit_vector(rng, out.len(), *norm);
                for (o, d) in out.iter_mut().zip(dir) {
                    *o = scale * d;
                }
            }
            Gen::Bounded(rng, norm) => {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let dir = unit_vector(rng, out.len(), *norm);
                for (o, d) in out.iter_mut().zip(dir) {
                    *o = sign * d;
                }
            }
            Gen::Scaled(c, inner) => {
                inner.fill(k, out);
                out.iter_mut().for_each(|o| *o *= *c);
            }
            Gen::Sum(a, b, buf) => {
                a.fill(k, out);
                b.fill(k, buf);
                out.iter_mut().zip(buf.iter()).for_each(|(o, v)| *o += v);
            }
            Gen::Tail(from, inner) => {
                // the inner generator still advances so random draws align
                inner.fill(k, out);
                if k <= *from {
                    out.fill(0.0);
                }
            }
        }
    }
}

/// Sequential generator of multiplier terms.
#[derive(Debug, Clone)]
pub struct MultiplierStream {
    k: usize,
    dim: usize,
    gen: Gen,
}

impl MultiplierStream {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `x_{k+1}` and advances.
    pub fn fill_next(&mut self, out: &mut [f64]) {
        self.k += 1;
        self.gen.fill(self.k, out);
    }

    pub fn next_vec(&mut self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.fill_next(&mut v);
        v
    }
}

fn join(v: &[f64], sep: &str) -> String {
    v.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

impl fmt::Display for MultiplierSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiplierSequence::Ones => f.write_str("ones"),
            MultiplierSequence::Phi(v) => write!(f, "phi:{}", join(v, ",")),
            MultiplierSequence::Explicit(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| join(v, ",")).collect();
                write!(f, "explicit:{}", parts.join(";"))
            }
            MultiplierSequence::Periodic(v) => write!(f, "periodic:{}", join(v, ",")),
            MultiplierSequence::Geometric(q) => write!(f, "geometric:{q}"),
            MultiplierSequence::SeededNull(s) => write!(f, "c0:{s}"),
            MultiplierSequence::SeededBounded(s) => write!(f, "linf:{s}"),
            MultiplierSequence::Scaled(c, inner) => write!(f, "({c})*({inner})"),
            MultiplierSequence::Sum(a, b) => write!(f, "({a})+({b})"),
            MultiplierSequence::Tail { from, inner } => write!(f, "tail[{from}]({inner})"),
        }
    }
}

impl FromStr for MultiplierSequence {
    type Err = LabError;

    /// Grammar: `ones`, `phi:a,b,..`, `explicit:a,b;c,d;..`, `periodic:a,..`,
    /// `geometric:q`, `c0:seed`, `linf:seed`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let seed = |p: &str| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| LabError::validation(format!("bad seed '{p}'")))
        };
        let seq = match name.trim() {
            "ones" if params.is_empty() => MultiplierSequence::Ones,
            "phi" => MultiplierSequence::Phi(parse_floats(params)?),
            "explicit" => MultiplierSequence::Explicit(
                params.split(';').map(parse_floats).collect::<Result<_>>()?,
            ),
            "periodic" => MultiplierSequence::Periodic(parse_floats(params)?),
            "geometric" => {
                let v = parse_floats(params)?;
                if v.len() != 1 {
                    return Err(LabError::validation("geometric multiplier takes one ratio"));
                }
                MultiplierSequence::Geometric(v[0])
            }
            "c0" => MultiplierSequence::SeededNull(seed(params)?),
            "linf" => MultiplierSequence::SeededBounded(seed(params)?),
            _ => return Err(LabError::validation(format!("unknown multiplier '{s}'"))),
        };
        seq.validate()?;
        Ok(seq)
    }
}
