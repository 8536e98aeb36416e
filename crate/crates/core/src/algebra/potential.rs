use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Complex;
use crate::error::{Error, Result};

/// Largest number of variables a potential may have.
pub const MAX_VARIABLES: usize = 8;

/// A single term `c * q_1^e_1 * ... * q_n^e_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coefficient: Complex,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coefficient: Complex, exponents: Vec<u32>) -> Self {
        Self {
            coefficient,
            exponents,
        }
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Value of `prod q_j^(e_j - shift_j)` times the falling-factorial
    /// factors produced by differentiating `shift_j` times in `q_j`.
    fn derivative_at(&self, q: &[Complex], shift: &[u32]) -> Complex {
        let mut acc = self.coefficient;
        for ((&e, &s), &x) in self.exponents.iter().zip(shift).zip(q) {
            if s > e {
                return Complex::new(0.0, 0.0);
            }
            for m in 0..s {
                acc *= f64::from(e - m);
            }
            let rest = e - s;
            if rest > 0 {
                acc *= x.powu(rest);
            }
        }
        acc
    }
}

/// Homogeneous polynomial potential `V(q)` of degree `k` in `n` variables
/// with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPotential {
    n: usize,
    k: i32,
    monomials: Vec<Monomial>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PotentialFile {
    n: usize,
    k: i32,
    monomials: Vec<MonomialFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MonomialFile {
    c: [f64; 2],
    e: Vec<u32>,
}

impl HomogeneousPotential {
    /// Validating constructor; rejects zero coefficients, duplicated exponent
    /// vectors and terms whose degree differs from `k`. Monomials are stored
    /// sorted by exponent vector.
    pub fn new(n: usize, k: i32, monomials: Vec<Monomial>) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        if n == 0 || n > MAX_VARIABLES {
            return Err(Error::InvalidPotential(format!(
                "n = {n} outside 1..={MAX_VARIABLES}"
            )));
        }
        if k < 0 {
            return Err(Error::InvalidPotential(format!(
                "polynomial potential cannot have negative degree {k}"
            )));
        }
        if monomials.is_empty() {
            return Err(Error::InvalidPotential(
                "potential is identically zero (no monomials)".into(),
            ));
        }
        let mut seen = BTreeMap::new();
        for (i, m) in monomials.iter().enumerate() {
            if m.exponents.len() != n {
                return Err(Error::InvalidPotential(format!(
                    "monomials[{i}].e: has {} exponents, expected {n}",
                    m.exponents.len()
                )));
            }
            if m.degree() as i64 != k as i64 {
                return Err(Error::InvalidPotential(format!(
                    "monomials[{i}].e: exponents sum to {}, expected k = {k}",
                    m.degree()
                )));
            }
            if !(m.coefficient.re.is_finite() && m.coefficient.im.is_finite()) {
                return Err(Error::InvalidPotential(format!(
                    "monomials[{i}].c: coefficient is not finite"
                )));
            }
            if m.coefficient.norm() == 0.0 {
                return Err(Error::InvalidPotential(format!(
                    "monomials[{i}].c: coefficient is zero"
                )));
            }
            if let Some(j) = seen.insert(m.exponents.clone(), i) {
                return Err(Error::InvalidPotential(format!(
                    "monomials[{i}].e: duplicates the exponents of monomials[{j}]"
                )));
            }
        }
        let mut monomials = monomials;
        monomials.sort_by(|a, b| a.exponents.cmp(&b.exponents));
        Ok(Self { n, k, monomials })
    }

    /// Builds a potential from raw terms, merging repeated exponent vectors
    /// and dropping terms that cancel.
    pub fn from_terms<I>(n: usize, k: i32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex, Vec<u32>)>,
    {
        let mut merged: BTreeMap<Vec<u32>, Complex> = BTreeMap::new();
        for (c, e) in terms {
            *merged.entry(e).or_default() += c;
        }
        let monomials = merged
            .into_iter()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(e, c)| Monomial::new(c, e))
            .collect();
        Self::new(n, k, monomials)
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real_terms<I>(n: usize, k: i32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec<u32>)>,
    {
        Self::from_terms(
            n,
            k,
            terms.into_iter().map(|(c, e)| (Complex::new(c, 0.0), e)),
        )
    }

    /// Parses the JSON potential format
    /// `{"n": int, "k": int, "monomials": [{"c": [re, im], "e": [..]}, ..]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PotentialFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let monomials = file
            .monomials
            .into_iter()
            .map(|m| Monomial::new(Complex::new(m.c[0], m.c[1]), m.e))
            .collect();
        Self::new(file.n, file.k, monomials)
    }

    pub fn to_json(&self) -> String {
        let file = PotentialFile {
            n: self.n,
            k: self.k,
            monomials: self
                .monomials
                .iter()
                .map(|m| MonomialFile {
                    c: [m.coefficient.re, m.coefficient.im],
                    e: m.exponents.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("potential serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn is_real(&self) -> bool {
        self.monomials.iter().all(|m| m.coefficient.im == 0.0)
    }

    /// Largest coefficient modulus.
    pub fn coefficient_scale(&self) -> f64 {
        self.monomials
            .iter()
            .map(|m| m.coefficient.norm())
            .fold(0.0, f64::max)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: Complex) -> Result<Self> {
        Self::from_terms(
            self.n,
            self.k,
            self.monomials
                .iter()
                .map(|m| (m.coefficient * c, m.exponents.clone())),
        )
    }

    fn check_dim(&self, q: &[Complex]) -> Result<()> {
        if q.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: q.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, q: &[Complex]) -> Result<Complex> {
        self.check_dim(q)?;
        let zero = vec![0; self.n];
        Ok(self
            .monomials
            .iter()
            .map(|m| m.derivative_at(q, &zero))
            .sum())
    }

    pub fn gradient(&self, q: &[Complex]) -> Result<Vec<Complex>> {
        self.check_dim(q)?;
        let mut shift = vec![0; self.n];
        let mut grad = vec![Complex::new(0.0, 0.0); self.n];
        for (i, g) in grad.iter_mut().enumerate() {
            shift[i] = 1;
            *g = self
                .monomials
                .iter()
                .map(|m| m.derivative_at(q, &shift))
                .sum();
            shift[i] = 0;
        }
        Ok(grad)
    }

    /// Symmetric matrix of second partial derivatives, row-major.
    pub fn hessian(&self, q: &[Complex]) -> Result<Vec<Vec<Complex>>> {
        self.check_dim(q)?;
        let n = self.n;
        let mut h = vec![vec![Complex::new(0.0, 0.0); n]; n];
        let mut shift = vec![0; n];
        for i in 0..n {
            for j in i..n {
                shift[i] += 1;
                shift[j] += 1;
                let v: Complex = self
                    .monomials
                    .iter()
                    .map(|m| m.derivative_at(q, &shift))
                    .sum();
                shift[i] -= 1;
                shift[j] -= 1;
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        Ok(h)
    }

    /// Coefficients of `V(1, t)`-style restrictions for two variables:
    /// returns `a_j` with `V = sum_j a_j q1^(k-j) q2^j`.
    pub(crate) fn binary_coefficients(&self) -> Result<Vec<Complex>> {
        if self.n != 2 {
            return Err(Error::Unsupported(format!(
                "binary form expected, potential has n = {}",
                self.n
            )));
        }
        let k = self.k as usize;
        let mut a = vec![Complex::new(0.0, 0.0); k + 1];
        for m in &self.monomials {
            a[m.exponents[1] as usize] += m.coefficient;
        }
        Ok(a)
    }
}
