//! Real potentials for the flows: polynomials (not necessarily homogeneous)
//! and radial powers `c·r^k`.

use serde::{Deserialize, Serialize};

use crate::algebra::HomogeneousPotential;
use crate::error::{Error, Result};

/// Imaginary parts below this are dropped when converting a potential to
/// real form.
const REAL_TOLERANCE: f64 = 1e-14;

pub trait Potential: Sync {
    fn dim(&self) -> usize;
    fn value(&self, q: &[f64]) -> f64;
    fn gradient(&self, q: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub c: f64,
    pub e: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialPotential {
    pub n: usize,
    pub terms: Vec<PolyTerm>,
}

impl PolynomialPotential {
    pub fn new(n: usize, terms: Vec<PolyTerm>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPotential("at least one variable is required".into()));
        }
        for t in &terms {
            if t.e.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.e.len(),
                });
            }
            if !t.c.is_finite() {
                return Err(Error::NonFinite(format!("coefficient {}", t.c)));
            }
        }
        Ok(Self { n, terms })
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec<u32>)>,
    {
        Self::new(n, terms.into_iter().map(|(c, e)| PolyTerm { c, e }).collect())
    }
}

fn monomial(q: &[f64], e: &[u32]) -> f64 {
    q.iter().zip(e).map(|(&x, &k)| x.powi(k as i32)).product()
}

impl Potential for PolynomialPotential {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, q: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.c * monomial(q, &t.e)).sum()
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for t in &self.terms {
            for i in 0..self.n {
                let ei = t.e[i];
                if ei == 0 {
                    continue;
                }
                let mut m = t.c * ei as f64;
                for (j, (&x, &k)) in q.iter().zip(&t.e).enumerate() {
                    m *= x.powi(if j == i { k as i32 - 1 } else { k as i32 });
                }
                out[i] += m;
            }
        }
    }
}

impl TryFrom<&HomogeneousPotential> for PolynomialPotential {
    type Error = Error;

    fn try_from(v: &HomogeneousPotential) -> Result<Self> {
        let mut terms = Vec::with_capacity(v.monomials().len());
        for m in v.monomials() {
            if m.coefficient.im.abs() > REAL_TOLERANCE * m.coefficient.norm().max(1.0) {
                return Err(Error::Unsupported(
                    "dynamics requires real coefficients".into(),
                ));
            }
            terms.push(PolyTerm {
                c: m.coefficient.re,
                e: m.exponents.clone(),
            });
        }
        Self::new(v.n(), terms)
    }
}

/// `V(q) = c·|q|^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub n: usize,
    pub c: f64,
    pub k: i32,
}

impl Potential for RadialPotential {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, q: &[f64]) -> f64 {
        let r2: f64 = q.iter().map(|x| x * x).sum();
        self.c * r2.powf(self.k as f64 / 2.0)
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        let r2: f64 = q.iter().map(|x| x * x).sum();
        let s = self.c * self.k as f64 * r2.powf(self.k as f64 / 2.0 - 1.0);
        for (o, &x) in out.iter_mut().zip(q) {
            *o = s * x;
        }
    }
}

/// Serializable potential for run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DynamicsPotential {
    Polynomial(PolynomialPotential),
    Radial(RadialPotential),
}

impl DynamicsPotential {
    pub fn as_potential(&self) -> &dyn Potential {
        match self {
            Self::Polynomial(p) => p,
            Self::Radial(r) => r,
        }
    }

    /// Accepts the tagged form or a homogeneous potential file.
    pub fn from_json(text: &str) -> Result<Self> {
        match serde_json::from_str::<Self>(text) {
            Ok(p) => {
                if let Self::Polynomial(poly) = &p {
                    PolynomialPotential::new(poly.n, poly.terms.clone())?;
                }
                if let Self::Radial(r) = &p {
                    if r.n == 0 || !r.c.is_finite() {
                        return Err(Error::InvalidPotential("radial potential needs n >= 1 and finite c".into()));
                    }
                }
                Ok(p)
            }
            Err(tagged) => match HomogeneousPotential::from_json(text) {
                Ok(h) => Ok(Self::Polynomial(PolynomialPotential::try_from(&h)?)),
                Err(_) => Err(Error::Parse {
                    line: tagged.line(),
                    column: tagged.column(),
                    message: tagged.to_string(),
                }),
            },
        }
    }
}

impl Potential for DynamicsPotential {
    fn dim(&self) -> usize {
        self.as_potential().dim()
    }

    fn value(&self, q: &[f64]) -> f64 {
        self.as_potential().value(q)
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        self.as_potential().gradient(q, out)
    }
}

/// Kepler-type `μ/r` in the plane.
pub fn kepler(mu: f64) -> DynamicsPotential {
    DynamicsPotential::Radial(RadialPotential { n: 2, c: mu, k: -1 })
}

/// `(q₁² + α q₂²)/2`.
pub fn oscillator(alpha: f64) -> DynamicsPotential {
    DynamicsPotential::Polynomial(PolynomialPotential {
        n: 2,
        terms: vec![
            PolyTerm { c: 0.5, e: vec![2, 0] },
            PolyTerm {
                c: 0.5 * alpha,
                e: vec![0, 2],
            },
        ],
    })
}

/// `(q₁² + q₂²)/2 + α q₁² q₂ + β q₂³ / 3`.
pub fn henon_heiles(alpha: f64, beta: f64) -> DynamicsPotential {
    DynamicsPotential::Polynomial(PolynomialPotential {
        n: 2,
        terms: vec![
            PolyTerm { c: 0.5, e: vec![2, 0] },
            PolyTerm { c: 0.5, e: vec![0, 2] },
            PolyTerm { c: alpha, e: vec![2, 1] },
            PolyTerm {
                c: beta / 3.0,
                e: vec![0, 3],
            },
        ],
    })
}
