//! Dense univariate polynomials over `Complex<f64>` and root finding.
//!
//! Coefficients are stored in ascending degree order. The representation is
//! canonical: trailing coefficients below `1e-12 * max|coeff|` are trimmed,
//! so the last stored coefficient is the (nonzero) leading one unless the
//! polynomial is zero.
//!
//! Root finding uses Aberth–Ehrlich simultaneous iteration (relative
//! threshold 1e-13, at most 200 iterations) with a companion-matrix QR
//! fallback. Degrees stay small here, so robustness wins over speed.

use crate::matrix::CMatrix;
use crate::{Complex64, Error, Result};
use alloc::vec;
use alloc::vec::Vec;

const TRIM_REL_TOL: f64 = 1e-12;
const ABERTH_REL_TOL: f64 = 1e-13;
const ABERTH_MAX_ITER: usize = 200;

/// A dense complex polynomial, coefficients ascending by degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Build from ascending coefficients, trimming near-zero leading terms.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = ComplexPolynomial { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        ComplexPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * z^n`.
    pub fn monomial(c: Complex64, n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    /// `leading * prod (z - r)` over the given roots.
    pub fn from_roots(leading: Complex64, roots: &[Complex64]) -> Self {
        let mut coeffs = vec![leading];
        for &r in roots {
            // multiply by (z - r)
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        let max_mod = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let tol = TRIM_REL_TOL * max_mod;
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= tol {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * (i as f64))
            .collect();
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::new(coeffs)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Multiplicity of the root 0, i.e. the number of leading near-zero
    /// low-order coefficients.
    pub fn valuation(&self) -> usize {
        let max_mod = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let tol = TRIM_REL_TOL * max_mod;
        self.coeffs.iter().take_while(|c| c.norm() <= tol).count()
    }

    /// All complex roots with multiplicity (degree of them in total).
    ///
    /// Aberth–Ehrlich first; if it fails to converge, eigenvalues of the
    /// companion matrix polished by Newton steps.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let deg = match self.degree() {
            None => return Err(Error::InvalidInput("roots of the zero polynomial")),
            Some(0) => return Ok(Vec::new()),
            Some(d) => d,
        };

        // Exact-root prefix: factor out z^p.
        let p = self.valuation().min(deg);
        let mut roots = vec![Complex64::new(0.0, 0.0); p];
        if p == deg {
            return Ok(roots);
        }
        let reduced: Vec<Complex64> = self.coeffs[p..].to_vec();
        let lead = *reduced.last().expect("nonzero by construction");
        let monic: Vec<Complex64> = reduced.iter().map(|&c| c / lead).collect();

        let rest = match monic.len() - 1 {
            1 => vec![-monic[0]],
            2 => quadratic_roots(monic[0], monic[1]),
            _ => match aberth(&monic) {
                Some(r) => r,
                None => companion_roots(&monic)?,
            },
        };
        roots.extend(rest);
        Ok(roots)
    }
}

/// Roots of `z^2 + b z + c` with cancellation-safe branching.
fn quadratic_roots(c: Complex64, b: Complex64) -> Vec<Complex64> {
    let disc = (b * b - c * 4.0).sqrt();
    // pick the sign that maximizes |b + disc|
    let s = if (b + disc).norm() >= (b - disc).norm() {
        disc
    } else {
        -disc
    };
    let q = -(b + s) * 0.5;
    if q.norm() == 0.0 {
        vec![Complex64::new(0.0, 0.0), -b]
    } else {
        vec![q, c / q]
    }
}

fn horner_with_scale(coeffs: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    let zn = z.norm();
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
        scale = scale * zn + c.norm();
    }
    (acc, scale)
}

/// Aberth–Ehrlich on a monic polynomial (coefficients ascending, last = 1).
/// Returns `None` on non-convergence.
fn aberth(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = monic.len() - 1;
    let deriv: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * (i as f64))
        .collect();

    // initial guesses on a circle inside the Cauchy root bound, with an
    // angular offset so axis-symmetric polynomials do not stagnate
    let bound = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = 0.5 * bound.min(4.0) + 0.1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| {
            let angle = 2.0 * core::f64::consts::PI * (i as f64) / (n as f64) + 0.41;
            Complex64::from_polar(radius * (1.0 + 0.05 * (i as f64) / (n as f64)), angle)
        })
        .collect();

    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step_rel = 0.0f64;
        let mut all_resid_small = true;
        for i in 0..n {
            let (pv, scale) = horner_with_scale(monic, z[i]);
            if pv.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                continue; // residual already at noise level
            }
            all_resid_small = false;
            let (dv, _) = horner_with_scale(&deriv, z[i]);
            let newton = if dv.norm() > 0.0 {
                pv / dv
            } else {
                // flat spot: nudge off it
                Complex64::new(1e-6, 1e-6)
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-300 {
                        sum += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * sum;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            if !z[i].re.is_finite() || !z[i].im.is_finite() {
                return None;
            }
            let rel = step.norm() / (1.0 + z[i].norm());
            max_step_rel = max_step_rel.max(rel);
        }
        if all_resid_small || max_step_rel <= ABERTH_REL_TOL {
            return Some(z);
        }
    }
    None
}

/// Companion-matrix eigenvalues of a monic polynomial, Newton-polished.
fn companion_roots(monic: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = monic.len() - 1;
    let mut c = CMatrix::zeros(n, n);
    for i in 0..n {
        c.set(i, n - 1, -monic[i]);
        if i + 1 < n {
            c.set(i + 1, i, Complex64::new(1.0, 0.0));
        }
    }
    let mut roots = c.hessenberg_eigenvalues()?;
    let deriv: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &cf)| cf * (i as f64))
        .collect();
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (pv, scale) = horner_with_scale(monic, *r);
            if pv.norm() <= 1e-15 * scale {
                break;
            }
            let (dv, _) = horner_with_scale(&deriv, *r);
            if dv.norm() == 0.0 {
                break;
            }
            *r -= pv / dv;
        }
    }
    Ok(roots)
}

/// Greedy minimal-distance matching of two root multisets.
///
/// Returns the maximum over matched pairs of the pair distance, or `None`
/// when the lengths differ. Numeric roots of multiple zeros split, so
/// callers compare against a tolerance appropriate for the multiplicity.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut remaining: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for &x in a {
        let (idx, dist) = remaining
            .iter()
            .enumerate()
            .map(|(i, &y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).expect("finite"))?;
        worst = worst.max(dist);
        remaining.swap_remove(idx);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trim_and_degree() {
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-15, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        assert!(ComplexPolynomial::new(vec![c(0.0, 0.0)]).is_zero());
        assert_eq!(ComplexPolynomial::zero().degree(), None);
    }

    #[test]
    fn eval_and_derivative() {
        // p(z) = 1 + 2z + 3z^2
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((p.eval(c(2.0, 0.0)) - c(17.0, 0.0)).norm() < 1e-14);
        let d = p.derivative();
        assert!((d.eval(c(2.0, 0.0)) - c(14.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn roots_round_trip_random() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(1..=8);
            let true_roots: Vec<Complex64> = (0..n)
                .map(|_| {
                    Complex64::from_polar(rng.gen_range(0.05..2.0), rng.gen_range(0.0..6.28))
                })
                .collect();
            let p = ComplexPolynomial::from_roots(c(1.0, 0.0), &true_roots);
            let found = p.roots().unwrap();
            let d = multiset_distance(&true_roots, &found).unwrap();
            assert!(d < 1e-8, "root mismatch {d:.3e}");
        }
    }

    #[test]
    fn multiple_root_at_zero() {
        // z^2 -> {0, 0}
        let p = ComplexPolynomial::monomial(c(1.0, 0.0), 2);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn double_root_off_origin() {
        let p = ComplexPolynomial::from_roots(c(1.0, 0.0), &[c(0.5, 0.2), c(0.5, 0.2)]);
        let r = p.roots().unwrap();
        let d = multiset_distance(&[c(0.5, 0.2), c(0.5, 0.2)], &r).unwrap();
        assert!(d < 1e-6, "cluster radius {d:.3e}");
    }

    #[test]
    fn quadratic_closed_form_cancellation() {
        // roots 1 and 1e-8: naive formula loses the small root
        let p = ComplexPolynomial::from_roots(c(1.0, 0.0), &[c(1.0, 0.0), c(1e-8, 0.0)]);
        let r = p.roots().unwrap();
        let d = multiset_distance(&[c(1.0, 0.0), c(1e-8, 0.0)], &r).unwrap();
        assert!(d < 1e-15);
    }

    #[test]
    fn companion_fallback_agrees() {
        let true_roots = [c(0.3, 0.1), c(-0.4, 0.2), c(0.0, -0.7), c(0.9, 0.0), c(-0.2, -0.2)];
        let p = ComplexPolynomial::from_roots(c(2.0, -1.0), &true_roots);
        let monic: Vec<Complex64> = {
            let lead = *p.coeffs().last().unwrap();
            p.coeffs().iter().map(|&x| x / lead).collect()
        };
        let r = companion_roots(&monic).unwrap();
        let d = multiset_distance(&true_roots, &r).unwrap();
        assert!(d < 1e-10, "companion mismatch {d:.3e}");
    }

    #[test]
    fn valuation_counts_zero_roots() {
        let p = ComplexPolynomial::monomial(c(2.0, 0.0), 3)
            .mul(&ComplexPolynomial::new(vec![c(1.0, 0.0), c(1.0, 0.0)]));
        assert_eq!(p.valuation(), 3);
    }
}
