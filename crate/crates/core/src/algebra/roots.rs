use super::{cmp_complex, Complex};
use crate::error::{Error, Result};

/// Relative backward-error target for polished roots.
pub const ROOT_RESIDUAL: f64 = 1e-12;

const MAX_ABERTH_ITERATIONS: usize = 2_000;
const MAX_NEWTON_ITERATIONS: usize = 60;

/// Horner evaluation of `sum c_i z^i` (ascending coefficients).
pub fn eval_poly(coeffs: &[Complex], z: Complex) -> Complex {
    coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn eval_with_derivative(coeffs: &[Complex], z: Complex) -> (Complex, Complex) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `sum |c_i| |z|^i`, the natural scale for the residual at `z`.
fn residual_scale(coeffs: &[Complex], z: Complex) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn derivative(coeffs: &[Complex]) -> Vec<Complex> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

fn newton(coeffs: &[Complex], mut z: Complex, iterations: usize) -> Complex {
    for _ in 0..iterations {
        let (p, dp) = eval_with_derivative(coeffs, z);
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    z
}

/// All complex roots of `sum c_i z^i` with multiplicity, sorted by real part
/// then imaginary part.
///
/// Simultaneous Aberth iteration followed by Newton polishing. Clusters of
/// nearly equal roots that behave as a single multiple root are replaced by
/// the root of the `(m-1)`-th derivative near their mean.
pub fn roots_univariate(coeffs: &[Complex]) -> Result<Vec<Complex>> {
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::NonFinite("polynomial coefficient".into()));
    }
    let last = coeffs
        .iter()
        .rposition(|c| c.norm() != 0.0)
        .ok_or(Error::ZeroPolynomial)?;
    let coeffs = &coeffs[..=last];
    if coeffs.len() < 2 {
        return Err(Error::InvalidArgument(
            "polynomial must have degree at least 1".into(),
        ));
    }

    // Exact zero roots.
    let zeros = coeffs.iter().position(|c| c.norm() != 0.0).unwrap_or(0);
    let reduced = &coeffs[zeros..];
    let mut roots = vec![Complex::new(0.0, 0.0); zeros];

    if reduced.len() > 1 {
        let lead = reduced[reduced.len() - 1];
        let monic: Vec<Complex> = reduced.iter().map(|c| c / lead).collect();
        let mut found = aberth(&monic)?;
        for z in found.iter_mut() {
            *z = newton(&monic, *z, MAX_NEWTON_ITERATIONS);
        }
        merge_clusters(&monic, &mut found);

        let worst = found
            .iter()
            .map(|&z| eval_poly(&monic, z).norm() / residual_scale(&monic, z).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        if worst > ROOT_RESIDUAL || found.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::RootsNotConverged {
                iterations: MAX_ABERTH_ITERATIONS,
                residual: worst,
            });
        }
        roots.extend(found);
    }

    roots.sort_by(cmp_complex);
    Ok(roots)
}

fn aberth(monic: &[Complex]) -> Result<Vec<Complex>> {
    let n = monic.len() - 1;
    let center = -monic[n - 1] / n as f64;
    // Geometric mean of root moduli about the origin, bounded away from 0.
    let radius = monic[0].norm().powf(1.0 / n as f64).max(1e-3)
        + center.norm() * 0.5;
    let mut z: Vec<Complex> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4;
            center + Complex::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..MAX_ABERTH_ITERATIONS {
        let mut max_rel_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval_with_derivative(monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !dp.norm().is_normal() {
                // Nudge off a critical point.
                Complex::new(1e-8, 1e-8) * z[i].norm().max(1.0)
            } else {
                ratio / denom
            };
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_rel_step = max_rel_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_rel_step <= 4.0 * f64::EPSILON {
            break;
        }
    }
    Ok(z)
}

fn merge_clusters(monic: &[Complex], roots: &mut [Complex]) {
    let n = roots.len();
    let mut cluster_id: Vec<usize> = (0..n).collect();
    fn find(ids: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while ids[r] != r {
            r = ids[r];
        }
        ids[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let tol = 1e-4 * roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= tol {
                let (a, b) = (find(&mut cluster_id, i), find(&mut cluster_id, j));
                cluster_id[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut cluster_id, i);
        groups.entry(r).or_default().push(i);
    }
    for members in groups.values().filter(|m| m.len() > 1) {
        let m = members.len();
        let mean = members.iter().map(|&i| roots[i]).sum::<Complex>() / m as f64;
        let mut deriv = monic.to_vec();
        for _ in 0..m - 1 {
            deriv = derivative(&deriv);
        }
        let refined = newton(&deriv, mean, MAX_NEWTON_ITERATIONS);
        let tol = 1e-4 * refined.norm().max(1.0);
        let residual = eval_poly(monic, refined).norm() / residual_scale(monic, refined);
        let spread_ok = members.iter().all(|&i| (roots[i] - refined).norm() <= 2.0 * tol);
        if spread_ok && residual <= ROOT_RESIDUAL * 1e-2 {
            for &i in members {
                roots[i] = refined;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn close(a: &[Complex], b: &[Complex], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    /// Expands `prod (z - r_i)` into ascending coefficients.
    fn from_roots(roots: &[Complex]) -> Vec<Complex> {
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            coeffs = next;
        }
        coeffs
    }

    #[test]
    fn real_pair() {
        let r = roots_univariate(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(close(&r, &[c(-1.0, 0.0), c(1.0, 0.0)], 1e-14));
    }

    #[test]
    fn imaginary_pair() {
        let r = roots_univariate(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(close(&r, &[c(0.0, -1.0), c(0.0, 1.0)], 1e-14));
    }

    #[test]
    fn triple_root() {
        let r = roots_univariate(&[c(-1.0, 0.0), c(3.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(close(&r, &[c(1.0, 0.0); 3], 1e-10), "{r:?}");
    }

    #[test]
    fn zero_roots_are_exact() {
        // z^2 (z - 2)
        let r = roots_univariate(&[c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r[0], c(0.0, 0.0));
        assert_eq!(r[1], c(0.0, 0.0));
        assert!((r[2] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn errors() {
        assert!(matches!(roots_univariate(&[c(0.0, 0.0); 3]), Err(Error::ZeroPolynomial)));
        assert!(roots_univariate(&[c(2.0, 0.0)]).is_err());
        assert!(roots_univariate(&[c(f64::NAN, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn distinct_close_roots_are_not_merged() {
        let seeded = [c(0.5, 0.0), c(0.5 + 1e-5, 0.0)];
        let r = roots_univariate(&from_roots(&seeded)).unwrap();
        assert!(close(&r, &seeded, 1e-9), "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn recovers_seeded_roots(
            seeded in proptest::collection::vec((0.0f64..1.0, 0.0f64..std::f64::consts::TAU), 1..=12)
        ) {
            let seeded: Vec<Complex> = seeded
                .iter()
                .map(|&(r, t)| Complex::from_polar(r.sqrt(), t))
                .collect();
            let found = roots_univariate(&from_roots(&seeded)).unwrap();
            prop_assert_eq!(found.len(), seeded.len());
            // Greedy minimal-distance assignment.
            let mut unused: Vec<Complex> = found.clone();
            let min_sep = seeded.iter().enumerate().flat_map(|(i, a)| {
                seeded.iter().skip(i + 1).map(move |b| (a - b).norm())
            }).fold(f64::INFINITY, f64::min);
            // Root conditioning degrades with clustering; skip pathological draws.
            prop_assume!(min_sep > 1e-3);
            for s in &seeded {
                let (idx, dist) = unused
                    .iter()
                    .enumerate()
                    .map(|(i, z)| (i, (z - s).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                prop_assert!(dist <= 1e-8, "seed {:?} nearest {}", s, dist);
                unused.remove(idx);
            }
        }
    }
}
