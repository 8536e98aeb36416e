//! Darboux points `V'(d) = gamma d` and spectra of the scaled Hessian
//! `gamma^-1 V''(d)`.

use nalgebra::DMatrix;

use crate::algebra::{
    cmp_complex, reconstruct_rational, roots_univariate, Complex, HomogeneousPotential, Rational,
    DEFAULT_MAX_DENOMINATOR, DEFAULT_RECONSTRUCTION_TOLERANCE,
};
use crate::error::{Error, Result};

/// Relative residual bound a Darboux point must satisfy.
pub const DARBOUX_RESIDUAL: f64 = 1e-10;
/// Imaginary parts below this are treated as zero when reconstructing.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;
/// Relative threshold under which polynomial coefficients count as zero.
const ZERO_COEFFICIENT: f64 = 1e-13;
/// Roots of `W` closer than this (relative) describe the same direction.
const ROOT_MERGE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `d` rescaled so that `gamma = 1`.
    GammaOne,
    /// Quadratic potentials: `gamma` is a Hessian eigenvalue and is kept.
    GammaRaw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxPoint {
    pub d: Vec<Complex>,
    pub gamma: Complex,
    /// `max_i |V'_i(d) - gamma d_i|`.
    pub residual: f64,
    pub normalization: Normalization,
    /// Multiplicity of the direction as a root of the Darboux polynomial.
    pub multiplicity: usize,
    /// Every direction is a Darboux point; `d` is only a sample.
    pub continuum: bool,
}

impl DarbouxPoint {
    /// Builds a point from an externally supplied direction, computing
    /// `gamma` by projection and the residual. No normalization is applied.
    pub fn from_direction(v: &HomogeneousPotential, d: Vec<Complex>) -> Result<Self> {
        let grad = v.gradient(&d)?;
        let gamma = project(&d, &grad)?;
        if gamma.norm() == 0.0 {
            return Err(Error::ZeroGamma);
        }
        let residual = residual(&grad, &d, gamma);
        Ok(Self {
            d,
            gamma,
            residual,
            normalization: Normalization::GammaRaw,
            multiplicity: 1,
            continuum: false,
        })
    }

    pub fn residual_bound(&self) -> f64 {
        DARBOUX_RESIDUAL * 1f64.max(self.gamma.norm() * norm(&self.d))
    }
}

/// Result of the projective search, including rejected directions.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxSearch {
    pub points: Vec<DarbouxPoint>,
    /// Directions solving the Darboux condition with `gamma = 0`.
    pub zero_gamma_directions: Vec<Vec<Complex>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub trivial_eigenvalue: Complex,
    pub nontrivial: Vec<Complex>,
    pub nontrivial_rational: Vec<Option<Rational>>,
    pub all_rational: bool,
    pub all_integer: bool,
}

fn norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn project(d: &[Complex], grad: &[Complex]) -> Result<Complex> {
    let dd: f64 = d.iter().map(|z| z.norm_sqr()).sum();
    if dd == 0.0 {
        return Err(Error::InvalidArgument("Darboux direction is zero".into()));
    }
    let num: Complex = d.iter().zip(grad).map(|(a, g)| a.conj() * g).sum();
    Ok(num / dd)
}

fn residual(grad: &[Complex], d: &[Complex], gamma: Complex) -> f64 {
    grad.iter()
        .zip(d)
        .map(|(g, x)| (g - gamma * x).norm())
        .fold(0.0, f64::max)
}

/// Coefficients (ascending in `t`) of `W(t) = d2V(1,t) - t d1V(1,t)`.
fn darboux_polynomial(a: &[Complex], k: usize) -> Vec<Complex> {
    let at = |j: isize| -> Complex {
        if j < 0 || j as usize > k {
            Complex::new(0.0, 0.0)
        } else {
            a[j as usize]
        }
    };
    (0..=k as isize)
        .map(|i| at(i + 1) * (i + 1) as f64 - at(i - 1) * (k as isize - i + 1) as f64)
        .collect()
}

/// All projective Darboux points of a binary form.
pub fn find_darboux_points(v: &HomogeneousPotential) -> Result<Vec<DarbouxPoint>> {
    Ok(search_darboux_points(v)?.points)
}

/// Projective Darboux search for `n = 2`, reporting `gamma = 0` directions.
pub fn search_darboux_points(v: &HomogeneousPotential) -> Result<DarbouxSearch> {
    if v.n() != 2 {
        return Err(Error::Unsupported(format!(
            "Darboux search implemented for n = 2 only (n = {})",
            v.n()
        )));
    }
    let k = v.k() as usize;
    let a = v.binary_coefficients()?;
    let w = darboux_polynomial(&a, k);
    let scale = v.coefficient_scale() * k as f64;
    let is_zero = |c: &Complex| c.norm() <= ZERO_COEFFICIENT * scale;

    let mut search = DarbouxSearch {
        points: Vec::new(),
        zero_gamma_directions: Vec::new(),
    };

    if w.iter().all(is_zero) {
        let d = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        match normalized_point(v, d.clone(), 1)? {
            Some(mut pt) => {
                pt.continuum = true;
                search.points.push(pt);
            }
            None => search.zero_gamma_directions.push(d),
        }
        return Ok(search);
    }

    let top = w.iter().rposition(|c| !is_zero(c)).unwrap_or(0);
    let mut candidates: Vec<(Vec<Complex>, usize)> = Vec::new();
    if top >= 1 {
        let roots = roots_univariate(&w[..=top])?;
        for (t, m) in group_roots(&roots) {
            candidates.push((vec![Complex::new(1.0, 0.0), t], m));
        }
    }
    // The direction (0, 1) is a root "at infinity" of W.
    if top < k {
        candidates.push((vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)], k - top));
    }

    for (d, m) in candidates {
        match normalized_point(v, d.clone(), m)? {
            Some(pt) => search.points.push(pt),
            None => search.zero_gamma_directions.push(d),
        }
    }
    Ok(search)
}

fn group_roots(roots: &[Complex]) -> Vec<(Complex, usize)> {
    let mut groups: Vec<(Complex, usize)> = Vec::new();
    for &r in roots {
        let tol = ROOT_MERGE * r.norm().max(1.0);
        match groups.iter_mut().find(|(c, _)| (c - r).norm() <= tol) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => groups.push((r, 1)),
        }
    }
    groups
}

/// Rescales a candidate direction to the canonical normalization and
/// polishes it; `None` when `gamma` vanishes.
fn normalized_point(
    v: &HomogeneousPotential,
    d: Vec<Complex>,
    multiplicity: usize,
) -> Result<Option<DarbouxPoint>> {
    let k = v.k();
    let grad = v.gradient(&d)?;
    let gamma = project(&d, &grad)?;
    let gamma_floor = ZERO_COEFFICIENT * v.coefficient_scale() * k as f64 * norm(&d).powi(k - 1);
    if gamma.norm() <= gamma_floor {
        return Ok(None);
    }

    let (d, gamma, normalization) = if k == 2 {
        (d, gamma, Normalization::GammaRaw)
    } else {
        let alpha = gamma.powf(-1.0 / (k - 2) as f64);
        let d: Vec<Complex> = d.iter().map(|x| x * alpha).collect();
        let d = polish_unit_gamma(v, d)?;
        (d, Complex::new(1.0, 0.0), Normalization::GammaOne)
    };
    let grad = v.gradient(&d)?;
    Ok(Some(DarbouxPoint {
        residual: residual(&grad, &d, gamma),
        d,
        gamma,
        normalization,
        multiplicity,
        continuum: false,
    }))
}

/// Newton iterations on `V'(d) - d = 0`; stops when the Jacobian is singular
/// or the residual stops decreasing.
fn polish_unit_gamma(v: &HomogeneousPotential, mut d: Vec<Complex>) -> Result<Vec<Complex>> {
    let one = Complex::new(1.0, 0.0);
    let n = d.len();
    let mut best = residual(&v.gradient(&d)?, &d, one);
    for _ in 0..8 {
        if best <= f64::EPSILON * norm(&d).max(1.0) {
            break;
        }
        let grad = v.gradient(&d)?;
        let h = v.hessian(&d)?;
        let jac = DMatrix::from_fn(n, n, |i, j| h[i][j] - if i == j { one } else { Complex::new(0.0, 0.0) });
        let rhs = DMatrix::from_fn(n, 1, |i, _| grad[i] - d[i]);
        let Some(step) = jac.lu().solve(&rhs) else { break };
        let trial: Vec<Complex> = (0..n).map(|i| d[i] - step[(i, 0)]).collect();
        if trial.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            break;
        }
        let r = residual(&v.gradient(&trial)?, &trial, one);
        if r >= best {
            break;
        }
        best = r;
        d = trial;
    }
    Ok(d)
}

/// Eigenvalues of a small complex matrix, sorted by real then imaginary part.
pub fn eigenvalues(m: &[Vec<Complex>]) -> Result<Vec<Complex>> {
    let n = m.len();
    let mut out = match n {
        0 => Vec::new(),
        1 => vec![m[0][0]],
        2 => eig2(m[0][0], m[0][1], m[1][0], m[1][1]).to_vec(),
        _ => {
            let mat = DMatrix::from_fn(n, n, |i, j| m[i][j]);
            let (_, t) = mat
                .try_schur(f64::EPSILON, 10_000)
                .ok_or(Error::NonFinite("Schur decomposition did not converge".into()))?
                .unpack();
            let mut ev = Vec::with_capacity(n);
            let mut i = 0;
            while i < n {
                if i + 1 < n && t[(i + 1, i)].norm() > f64::EPSILON * (t[(i, i)].norm() + t[(i + 1, i + 1)].norm()) {
                    ev.extend(eig2(t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]));
                    i += 2;
                } else {
                    ev.push(t[(i, i)]);
                    i += 1;
                }
            }
            ev
        }
    };
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("eigenvalue".into()));
    }
    out.sort_by(cmp_complex);
    Ok(out)
}

fn eig2(a: Complex, b: Complex, c: Complex, d: Complex) -> [Complex; 2] {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let s = disc.sqrt();
    [half_tr - s, half_tr + s]
}

/// Spectrum of `gamma^-1 V''(d)`, split into the trivial eigenvalue `k - 1`
/// and the remaining `n - 1` values.
pub fn spectrum(v: &HomogeneousPotential, pt: &DarbouxPoint) -> Result<SpectrumReport> {
    if pt.d.len() != v.n() {
        return Err(Error::DimensionMismatch {
            expected: v.n(),
            got: pt.d.len(),
        });
    }
    if pt.gamma.norm() == 0.0 {
        return Err(Error::ZeroGamma);
    }
    let grad = v.gradient(&pt.d)?;
    let actual = residual(&grad, &pt.d, pt.gamma);
    if actual > pt.residual_bound() {
        return Err(Error::InvalidArgument(format!(
            "not a Darboux point: residual {actual:e} exceeds {:e}",
            pt.residual_bound()
        )));
    }
    let h = v.hessian(&pt.d)?;
    let scaled: Vec<Vec<Complex>> = h
        .iter()
        .map(|row| row.iter().map(|x| x / pt.gamma).collect())
        .collect();
    let mut ev = eigenvalues(&scaled)?;
    let expected = Complex::new((v.k() - 1) as f64, 0.0);
    let trivial_idx = ev
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - expected).norm().total_cmp(&(b.1 - expected).norm()))
        .map(|(i, _)| i)
        .expect("n >= 1");
    let trivial = ev.remove(trivial_idx);

    let nontrivial_rational: Vec<Option<Rational>> = ev.iter().map(|z| rational_of(*z)).collect();
    let all_rational = nontrivial_rational.iter().all(Option::is_some);
    let all_integer = nontrivial_rational
        .iter()
        .all(|r| r.as_ref().is_some_and(|r| r.is_integer()));
    Ok(SpectrumReport {
        trivial_eigenvalue: trivial,
        nontrivial: ev,
        nontrivial_rational,
        all_rational,
        all_integer,
    })
}

/// Rational reconstruction of an eigenvalue with the default tolerances.
pub fn rational_of(z: Complex) -> Option<Rational> {
    if z.im.abs() > IMAGINARY_TOLERANCE {
        return None;
    }
    reconstruct_rational(z.re, DEFAULT_MAX_DENOMINATOR, DEFAULT_RECONSTRUCTION_TOLERANCE)
}

/// `gamma^-1 tr V''(d) - (k - 1)`, the non-trivial eigenvalue for `n = 2`.
pub fn trace_shortcut(v: &HomogeneousPotential, pt: &DarbouxPoint) -> Result<Complex> {
    if v.n() != 2 {
        return Err(Error::Unsupported(format!(
            "trace shortcut needs n = 2 (n = {})",
            v.n()
        )));
    }
    if pt.gamma.norm() == 0.0 {
        return Err(Error::ZeroGamma);
    }
    let h = v.hessian(&pt.d)?;
    Ok((h[0][0] + h[1][1]) / pt.gamma - (v.k() - 1) as f64)
}

/// `sum 1/(lambda_i - 1) + 1`; zero when the universal relation holds.
pub fn universal_relation(lambdas: &[Complex]) -> Result<Complex> {
    let mut sum = Complex::new(1.0, 0.0);
    for (i, l) in lambdas.iter().enumerate() {
        let den = l - 1.0;
        if den.norm() <= 1e-12 {
            return Err(Error::UnitEigenvalue(i));
        }
        sum += den.inv();
    }
    Ok(sum)
}

/// Darboux points of a binary form paired with their spectra.
pub fn analyze(v: &HomogeneousPotential) -> Result<Vec<(DarbouxPoint, SpectrumReport)>> {
    find_darboux_points(v)?
        .into_iter()
        .map(|pt| spectrum(v, &pt).map(|s| (pt, s)))
        .collect()
}

/// Multiset union of the non-trivial eigenvalues over all Darboux points.
pub fn aggregate_nontrivial(v: &HomogeneousPotential) -> Result<Vec<Complex>> {
    let mut all: Vec<Complex> = analyze(v)?
        .into_iter()
        .flat_map(|(_, s)| s.nontrivial)
        .collect();
    all.sort_by(cmp_complex);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, k: i32, terms: &[(f64, &[u32])]) -> HomogeneousPotential {
        HomogeneousPotential::from_real_terms(n, k, terms.iter().map(|(c, e)| (*c, e.to_vec()))).unwrap()
    }

    fn assert_multiset(got: &[Complex], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        let mut want = want.to_vec();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - Complex::new(*w, 0.0)).norm() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn anisotropic_oscillator() {
        let v = real(2, 2, &[(1.0, &[2, 0]), (0.5, &[0, 2])]);
        let pts = find_darboux_points(&v).unwrap();
        assert_eq!(pts.len(), 2);
        let by_dir = |i: usize| pts.iter().find(|p| p.d[i].norm() > 0.5 && p.d[1 - i].norm() < 1e-12).unwrap();
        let x = by_dir(0);
        let y = by_dir(1);
        assert!((x.gamma - 2.0).norm() < 1e-14);
        assert!((y.gamma - 1.0).norm() < 1e-14);
        assert_eq!(x.normalization, Normalization::GammaRaw);
        assert_multiset(&spectrum(&v, x).unwrap().nontrivial, &[0.5], 1e-12);
        assert_multiset(&spectrum(&v, y).unwrap().nontrivial, &[2.0], 1e-12);
    }

    #[test]
    fn pure_cube_has_one_point() {
        let v = real(2, 3, &[(1.0, &[3, 0])]);
        let pts = find_darboux_points(&v).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].d[1].norm() < 1e-14);
        assert!((pts[0].gamma - 1.0).norm() < 1e-14);
        let s = spectrum(&v, &pts[0]).unwrap();
        assert!((s.trivial_eigenvalue - 2.0).norm() < 1e-12);
        assert_multiset(&s.nontrivial, &[0.0], 1e-12);
        assert!(trace_shortcut(&v, &pts[0]).unwrap().norm() < 1e-12);
    }

    #[test]
    fn v2_spectra() {
        let v = real(2, 3, &[(0.5, &[2, 1]), (1.0, &[0, 3])]);
        let pts = find_darboux_points(&v).unwrap();
        assert_eq!(pts.len(), 3);
        let mut traces: Vec<Complex> = pts.iter().map(|p| trace_shortcut(&v, p).unwrap()).collect();
        traces.sort_by(cmp_complex);
        assert_multiset(&traces, &[1.0 / 3.0, 5.0, 5.0], 1e-9);
        assert_multiset(&aggregate_nontrivial(&v).unwrap(), &[1.0 / 3.0, 5.0, 5.0], 1e-9);
        assert!(universal_relation(&traces).unwrap().norm() < 1e-9);
    }

    #[test]
    fn v3_spectra() {
        let v = real(2, 3, &[(0.5, &[2, 1]), (8.0 / 3.0, &[0, 3])]);
        let agg = aggregate_nontrivial(&v).unwrap();
        assert_multiset(&agg, &[0.125, 15.0, 15.0], 1e-9);
        let r: Vec<_> = analyze(&v).unwrap().into_iter().flat_map(|(_, s)| s.nontrivial_rational).collect();
        assert!(r.contains(&Some(Rational::new(1.into(), 8.into()))));
    }

    #[test]
    fn cartesian_quartic() {
        let v = real(2, 4, &[(1.0, &[4, 0]), (1.0, &[0, 4])]);
        assert_multiset(&aggregate_nontrivial(&v).unwrap(), &[0.0, 0.0, 3.0, 3.0], 1e-9);
    }

    #[test]
    fn radial_potential_is_a_continuum() {
        let v = real(2, 4, &[(1.0, &[4, 0]), (2.0, &[2, 2]), (1.0, &[0, 4])]);
        let pts = find_darboux_points(&v).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].continuum);
        assert_multiset(&spectrum(&v, &pts[0]).unwrap().nontrivial, &[1.0], 1e-12);
    }

    #[test]
    fn universal_relation_examples() {
        let c = |x: f64| Complex::new(x, 0.0);
        let mut k10 = vec![c(0.0), c(0.0)];
        k10.extend(std::iter::repeat(c(9.0)).take(8));
        assert!(universal_relation(&k10).unwrap().norm() < 1e-9);
        assert!((universal_relation(&[c(2.0)]).unwrap() - 2.0).norm() < 1e-15);
        assert!(matches!(universal_relation(&[c(1.0)]), Err(Error::UnitEigenvalue(0))));
    }

    #[test]
    fn supplied_point_for_three_variables() {
        let v = real(3, 2, &[(1.0, &[2, 0, 0]), (2.0, &[0, 2, 0]), (3.0, &[0, 0, 2])]);
        let c = |x: f64| Complex::new(x, 0.0);
        let pt = DarbouxPoint::from_direction(&v, vec![c(0.0), c(1.0), c(0.0)]).unwrap();
        let s = spectrum(&v, &pt).unwrap();
        assert_multiset(&s.nontrivial, &[0.5, 1.5], 1e-12);
        assert!(s.all_rational && !s.all_integer);
    }

    #[test]
    fn general_eigenvalues_match_closed_form() {
        let c = |x: f64| Complex::new(x, 0.0);
        let m = vec![
            vec![c(2.0), c(1.0), c(0.0)],
            vec![c(1.0), c(2.0), c(1.0)],
            vec![c(0.0), c(1.0), c(2.0)],
        ];
        let s2 = std::f64::consts::SQRT_2;
        assert_multiset(&eigenvalues(&m).unwrap(), &[2.0 - s2, 2.0, 2.0 + s2], 1e-12);
        let rot = vec![vec![c(0.0), c(-1.0), c(0.0)], vec![c(1.0), c(0.0), c(0.0)], vec![c(0.0), c(0.0), c(3.0)]];
        let ev = eigenvalues(&rot).unwrap();
        assert!((ev[0] - Complex::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - Complex::new(0.0, 1.0)).norm() < 1e-12);
        assert!((ev[2] - c(3.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bogus_point() {
        let v = real(2, 3, &[(0.5, &[2, 1]), (1.0, &[0, 3])]);
        let c = |x: f64| Complex::new(x, 0.0);
        let bogus = DarbouxPoint {
            d: vec![c(1.0), c(0.3)],
            gamma: c(1.0),
            residual: 0.0,
            normalization: Normalization::GammaOne,
            multiplicity: 1,
            continuum: false,
        };
        assert!(spectrum(&v, &bogus).is_err());
    }
}
