//! The characteristic function of `A^theta_B`, evaluated as the truncated
//! Toeplitz operator
//!
//! ```text
//! Phi(lambda) = A^B_{ theta / (1 - lambda conj(B)) }   on K_B,
//! ```
//!
//! by quadrature for general `B` and in polyphase closed form for
//! `B = z^N`, where the matrix has entries `theta_{i-j}(lambda)` on and
//! below the diagonal and `lambda * theta_{N+i-j}(lambda)` above it.
//! Also: bi-inner (boundary unitarity) and purity diagnostics.

use crate::blaschke::{polyphase_eval, BlaschkeProduct, InnerFunction};
use crate::matrix::CMatrix;
use crate::modelspace::{check_kernel_condition, ModelSpaceBasis, QuadratureGrid};
use crate::tto::{assemble, OperatorMatrix};
use crate::{Complex64, Error, Result};
use alloc::vec::Vec;
#[allow(unused_imports)] // needed for the no_std build
use num_traits::Float;

/// Boundary margin for the quadrature method: the symbol
/// `1/(1 - lambda conj(B))` develops near-poles on the grid as
/// `|lambda| -> 1`.
pub const DELTA_BDRY: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharFnMethod {
    Quadrature,
    Polyphase,
}

/// One sample `Phi(lambda)`.
#[derive(Debug, Clone)]
pub struct CharFnSample {
    pub lam: Complex64,
    pub matrix: OperatorMatrix,
    pub method: CharFnMethod,
}

/// Sample the symbol `theta(z) / (1 - lambda conj(B(z)))` on the grid of
/// the given basis and assemble the compression.
pub fn charfn_quadrature_on(
    basis: &ModelSpaceBasis,
    theta: &InnerFunction,
    lam: Complex64,
) -> Result<CharFnSample> {
    if !check_kernel_condition(theta, basis.blaschke()) {
        return Err(Error::KernelConditionViolated {
            deg_theta: theta.degree(),
            deg_b: basis.blaschke().degree(),
        });
    }
    if lam.norm() > 1.0 - DELTA_BDRY + 1e-12 {
        return Err(Error::BoundaryProximity { modulus: lam.norm() });
    }
    let floor = 0.5 * (1.0 - lam.norm());
    let mut symbol = Vec::with_capacity(basis.grid().len());
    for &z in basis.grid().nodes() {
        let tv = theta.eval(z)?;
        let bv = basis.blaschke().eval(z)?;
        let denom = Complex64::new(1.0, 0.0) - lam * bv.conj();
        if denom.norm() < floor {
            return Err(Error::PoleProximity { z });
        }
        symbol.push(tv / denom);
    }
    let matrix = assemble(&symbol, basis)?;
    Ok(CharFnSample {
        lam,
        matrix,
        method: CharFnMethod::Quadrature,
    })
}

/// `Phi(lambda)` for general finite Blaschke `B`, on the default grid.
pub fn charfn_quadrature(
    theta: &InnerFunction,
    b: &BlaschkeProduct,
    lam: Complex64,
) -> Result<CharFnSample> {
    let basis = ModelSpaceBasis::build(b)?;
    charfn_quadrature_on(&basis, theta, lam)
}

/// `Phi(lambda)` for `B = z^N` in the monomial basis, via polyphase
/// components. Boundary points `|lambda| = 1` are allowed: the entries
/// are pole-free on the closed disc for finite Blaschke `theta`.
pub fn charfn_polyphase(theta: &InnerFunction, n: usize, lam: Complex64) -> Result<CharFnSample> {
    if theta.degree() < n {
        return Err(Error::KernelConditionViolated {
            deg_theta: theta.degree(),
            deg_b: n,
        });
    }
    if lam.norm() > 1.0 + 1e-12 {
        return Err(Error::BoundaryProximity { modulus: lam.norm() });
    }
    let comps: Vec<Complex64> = (0..n)
        .map(|j| polyphase_eval(theta, n, j, lam))
        .collect::<Result<_>>()?;
    let mut entries = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = if i >= j {
                comps[i - j]
            } else {
                lam * comps[n + i - j]
            };
            entries.set(i, j, v);
        }
    }
    Ok(CharFnSample {
        lam,
        matrix: OperatorMatrix {
            entries,
            basis_id: crate::tto::monomial_matrix_zn(n, 0).basis_id,
        },
        method: CharFnMethod::Polyphase,
    })
}

/// One row of a bi-inner diagnostic: the singular values of
/// `Phi(r e^{is})`.
#[derive(Debug, Clone)]
pub struct BiInnerSample {
    pub lam: Complex64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

#[derive(Debug, Clone)]
pub struct BiInnerReport {
    pub samples: Vec<BiInnerSample>,
    /// Max |sigma - 1| over the samples at the largest requested radius.
    pub max_unit_deviation: f64,
}

/// Singular values of `Phi` on a polar sampling grid.
///
/// For `B = z^N` the polyphase form is used and radii up to 1 are
/// evaluated directly. For general `B` the quadrature method runs with a
/// grid enlarged to resolve the symbol poles at distance `1 - r` from the
/// circle, and radii must stay below `1 - 1e-4`.
pub fn bi_inner_check(
    theta: &InnerFunction,
    b: &BlaschkeProduct,
    radii: &[f64],
    angles: &[f64],
) -> Result<BiInnerReport> {
    if !check_kernel_condition(theta, b) {
        return Err(Error::KernelConditionViolated {
            deg_theta: theta.degree(),
            deg_b: b.degree(),
        });
    }
    let monomial = b.is_monomial();
    let mut samples = Vec::with_capacity(radii.len() * angles.len());
    let largest = radii.iter().copied().fold(0.0f64, f64::max);
    let mut max_dev = 0.0f64;
    for &r in radii {
        let basis = if monomial {
            None
        } else {
            // pole distance of the symbol is 1 - r; scale the grid to it
            let scaled = ((32.0 / (1.0 - r).max(1e-5)) as usize).min(1 << 18);
            let m = QuadratureGrid::for_degree(b.degree() + theta.degree())
                .len()
                .max(scaled);
            Some(ModelSpaceBasis::build_on(b, QuadratureGrid::with_size(m))?)
        };
        for &s in angles {
            let lam = Complex64::from_polar(r, s);
            let sample = match &basis {
                Some(basis) => charfn_quadrature_on(basis, theta, lam)?,
                None => charfn_polyphase(theta, b.degree(), lam)?,
            };
            let sv = sample.matrix.entries.singular_values();
            let smax = sv.first().copied().unwrap_or(0.0);
            let smin = sv.last().copied().unwrap_or(0.0);
            if r == largest {
                max_dev = max_dev.max((smax - 1.0).abs()).max((smin - 1.0).abs());
            }
            samples.push(BiInnerSample {
                lam,
                sigma_min: smin,
                sigma_max: smax,
            });
        }
    }
    Ok(BiInnerReport {
        samples,
        max_unit_deviation: max_dev,
    })
}

/// Purity of the characteristic function: `sigma_max(Phi(0)) < 1 - 1e-8`,
/// with `Phi(0) = A^B_theta`.
pub fn purity_check(theta: &InnerFunction, b: &BlaschkeProduct) -> Result<bool> {
    let basis = ModelSpaceBasis::build(b)?;
    let sample = charfn_quadrature_on(&basis, theta, Complex64::new(0.0, 0.0))?;
    Ok(sample.matrix.entries.op_norm2() < 1.0 - 1e-8)
}

/// Taylor coefficients `Phi_0..Phi_{n_max}` of the characteristic
/// function at 0, extracted by trapezoid Cauchy integrals on the circle
/// of radius 0.8 with 256 points.
pub fn taylor_coefficients(
    theta: &InnerFunction,
    b: &BlaschkeProduct,
    n_max: usize,
) -> Result<Vec<CMatrix>> {
    let basis = ModelSpaceBasis::build(b)?;
    let k = basis.dim();
    let m = 256usize;
    let r = 0.8f64;
    let mut coeffs = alloc::vec![CMatrix::zeros(k, k); n_max + 1];
    for idx in 0..m {
        let w = Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * (idx as f64) / m as f64);
        let sample = charfn_quadrature_on(&basis, theta, w * r)?;
        for n in 0..=n_max {
            let factor = w.powu(n as u32).conj() / (m as f64 * r.powi(n as i32));
            coeffs[n] = coeffs[n].add(&sample.matrix.entries.scale(factor));
        }
    }
    Ok(coeffs)
}

/// `A^B_{theta conj(B)^n}` assembled by quadrature — the closed form the
/// n-th Taylor coefficient must reproduce.
pub fn assemble_theta_bbar_power(
    theta: &InnerFunction,
    basis: &ModelSpaceBasis,
    n: usize,
) -> Result<OperatorMatrix> {
    let mut symbol = Vec::with_capacity(basis.grid().len());
    for &z in basis.grid().nodes() {
        let tv = theta.eval(z)?;
        let bv = basis.blaschke().eval(z)?;
        symbol.push(tv * bv.conj().powu(n as u32));
    }
    assemble(&symbol, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::compose;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_blaschke(rng: &mut StdRng, deg: usize) -> BlaschkeProduct {
        let zeros: Vec<Complex64> = (0..deg)
            .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.85), rng.gen_range(0.0..6.28)))
            .collect();
        BlaschkeProduct::from_zeros(zeros).unwrap()
    }

    #[test]
    fn zn_over_zn_is_lambda_identity() {
        let n = 3usize;
        let theta = InnerFunction::atomic(BlaschkeProduct::monomial(n));
        let b = BlaschkeProduct::monomial(n);
        let lam = c(0.35, -0.2);
        for sample in [
            charfn_quadrature(&theta, &b, lam).unwrap(),
            charfn_polyphase(&theta, n, lam).unwrap(),
        ] {
            let expected = CMatrix::identity(n).scale(lam);
            assert!(sample.matrix.entries.sub(&expected).max_abs() < 1e-10);
        }
    }

    #[test]
    fn at_zero_equals_compression_of_theta() {
        let mut rng = StdRng::seed_from_u64(3);
        let theta_b = random_blaschke(&mut rng, 4);
        let theta = InnerFunction::atomic(theta_b.clone());
        let b = random_blaschke(&mut rng, 2);
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let sample = charfn_quadrature_on(&basis, &theta, c(0.0, 0.0)).unwrap();
        let direct = assemble_theta_bbar_power(&theta, &basis, 0).unwrap();
        assert!(sample.matrix.entries.sub(&direct.entries).max_abs() < 1e-12);
    }

    #[test]
    fn power_series_truncation_matches() {
        let mut rng = StdRng::seed_from_u64(5);
        let theta = InnerFunction::atomic(random_blaschke(&mut rng, 5));
        let b = random_blaschke(&mut rng, 3);
        let lam = c(0.3, 0.2);
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let direct = charfn_quadrature_on(&basis, &theta, lam).unwrap();
        let mut acc = CMatrix::zeros(3, 3);
        let mut lam_pow = c(1.0, 0.0);
        for n in 0..=40usize {
            let term = assemble_theta_bbar_power(&theta, &basis, n).unwrap();
            acc = acc.add(&term.entries.scale(lam_pow));
            lam_pow *= lam;
        }
        assert!(direct.matrix.entries.sub(&acc).max_abs() < 1e-8);
    }

    #[test]
    fn polyphase_split_by_inspection() {
        // theta = z * phi_c(z^2): theta_0 = 0, theta_1 = phi_c
        let cc = c(0.4, 0.3);
        let u = BlaschkeProduct::elementary(cc).unwrap();
        let inner =
            crate::blaschke::expand_composition(&compose(u, BlaschkeProduct::monomial(2))).unwrap();
        let theta = InnerFunction::atomic(BlaschkeProduct::monomial(1).multiply(&inner));
        let lam = c(0.2, -0.5);
        let sample = charfn_polyphase(&theta, 2, lam).unwrap();
        let phi_c = BlaschkeProduct::elementary(cc).unwrap().eval(lam).unwrap();
        assert!(sample.matrix.entries.get(0, 0).norm() < 1e-10);
        assert!(sample.matrix.entries.get(1, 1).norm() < 1e-10);
        assert!((sample.matrix.entries.get(0, 1) - lam * phi_c).norm() < 1e-10);
        assert!((sample.matrix.entries.get(1, 0) - phi_c).norm() < 1e-10);
    }

    #[test]
    fn cross_method_agreement() {
        let mut rng = StdRng::seed_from_u64(7);
        let theta = InnerFunction::atomic(random_blaschke(&mut rng, 6));
        let n = 3usize;
        let lam = c(0.0, 0.4);
        let quad = charfn_quadrature(&theta, &BlaschkeProduct::monomial(n), lam).unwrap();
        let poly = charfn_polyphase(&theta, n, lam).unwrap();
        let dev = quad.matrix.entries.sub(&poly.matrix.entries).max_abs();
        assert!(dev < 1e-8, "methods disagree by {dev:.3e}");
    }

    #[test]
    fn kernel_and_boundary_errors() {
        let theta = InnerFunction::atomic(BlaschkeProduct::monomial(1));
        let b = BlaschkeProduct::monomial(2);
        assert!(matches!(
            charfn_quadrature(&theta, &b, c(0.1, 0.0)).unwrap_err(),
            Error::KernelConditionViolated { .. }
        ));
        let theta = InnerFunction::atomic(BlaschkeProduct::monomial(2));
        assert!(matches!(
            charfn_quadrature(&theta, &b, c(0.99995, 0.0)).unwrap_err(),
            Error::BoundaryProximity { .. }
        ));
    }

    #[test]
    fn bi_inner_boundary_polyphase() {
        let mut rng = StdRng::seed_from_u64(11);
        let n = 3usize;
        let theta = InnerFunction::atomic(random_blaschke(&mut rng, 5));
        let report = bi_inner_check(
            &theta,
            &BlaschkeProduct::monomial(n),
            &[1.0],
            &[0.3, 1.9, 4.4],
        )
        .unwrap();
        for s in &report.samples {
            assert!((s.sigma_min - 1.0).abs() < 1e-8);
            assert!((s.sigma_max - 1.0).abs() < 1e-8);
        }
        assert!(report.max_unit_deviation < 1e-8);
    }

    #[test]
    fn bi_inner_radial_limit_general_b() {
        let mut rng = StdRng::seed_from_u64(13);
        let theta = InnerFunction::atomic(random_blaschke(&mut rng, 3));
        let b = random_blaschke(&mut rng, 2);
        let report = bi_inner_check(&theta, &b, &[0.9999], &[0.7]).unwrap();
        assert!(
            report.samples[0].sigma_min > 0.98,
            "sigma_min = {}",
            report.samples[0].sigma_min
        );
    }

    #[test]
    fn bi_inner_scalar_radius() {
        // theta = B = z^N: Phi = lambda I, all sigma = r
        let n = 2usize;
        let theta = InnerFunction::atomic(BlaschkeProduct::monomial(n));
        let report =
            bi_inner_check(&theta, &BlaschkeProduct::monomial(n), &[0.55], &[0.0, 2.0]).unwrap();
        for s in &report.samples {
            assert!((s.sigma_min - 0.55).abs() < 1e-10);
            assert!((s.sigma_max - 0.55).abs() < 1e-10);
        }
    }

    #[test]
    fn purity_examples() {
        let n = 3usize;
        let theta = InnerFunction::atomic(BlaschkeProduct::monomial(n));
        let b = BlaschkeProduct::monomial(n);
        assert!(purity_check(&theta, &b).unwrap());

        // B containing theta as a factor violates the kernel condition
        let mut rng = StdRng::seed_from_u64(17);
        let theta_small = random_blaschke(&mut rng, 2);
        let b_big = theta_small.multiply(&random_blaschke(&mut rng, 1));
        let err = purity_check(&InnerFunction::atomic(theta_small), &b_big).unwrap_err();
        assert!(matches!(err, Error::KernelConditionViolated { .. }));

        // random admissible pair is pure
        let theta = InnerFunction::atomic(random_blaschke(&mut rng, 4));
        let b = random_blaschke(&mut rng, 2);
        assert!(purity_check(&theta, &b).unwrap());
    }

    #[test]
    fn analyticity_cauchy_reconstruction() {
        let mut rng = StdRng::seed_from_u64(19);
        let theta = InnerFunction::atomic(random_blaschke(&mut rng, 3));
        let b = random_blaschke(&mut rng, 2);
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let m = 128usize;
        let r = 0.8f64;
        let ring: Vec<CMatrix> = (0..m)
            .map(|i| {
                let w = Complex64::from_polar(r, 2.0 * core::f64::consts::PI * i as f64 / m as f64);
                charfn_quadrature_on(&basis, &theta, w)
                    .unwrap()
                    .matrix
                    .entries
            })
            .collect();
        for t in 0..16 {
            let lam = Complex64::from_polar(0.5 * (t as f64 + 1.0) / 16.0, 0.7 * t as f64);
            // Cauchy: Phi(lam) = (1/M) sum Phi(w_i) w_i/(w_i - lam)
            let mut acc = CMatrix::zeros(basis.dim(), basis.dim());
            for (i, phi_w) in ring.iter().enumerate() {
                let w = Complex64::from_polar(r, 2.0 * core::f64::consts::PI * i as f64 / m as f64);
                acc = acc.add(&phi_w.scale(w / (w - lam) / m as f64));
            }
            let direct = charfn_quadrature_on(&basis, &theta, lam)
                .unwrap()
                .matrix
                .entries;
            assert!(acc.sub(&direct).max_abs() < 1e-7);
        }
    }

    #[test]
    fn coincidence_covariance_under_basis_permutation() {
        let mut rng = StdRng::seed_from_u64(23);
        let theta = InnerFunction::atomic(random_blaschke(&mut rng, 4));
        let b = random_blaschke(&mut rng, 3);
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let order = [2usize, 0, 1];
        let permuted = basis.permuted(&order).unwrap();
        let lam = c(0.25, 0.3);
        let a = charfn_quadrature_on(&basis, &theta, lam)
            .unwrap()
            .matrix
            .entries;
        let ap = charfn_quadrature_on(&permuted, &theta, lam)
            .unwrap()
            .matrix
            .entries;
        for m in 0..3 {
            for n in 0..3 {
                assert!((ap.get(m, n) - a.get(order[m], order[n])).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn taylor_coefficients_match_closed_form() {
        let mut rng = StdRng::seed_from_u64(29);
        let theta = InnerFunction::atomic(random_blaschke(&mut rng, 4));
        let b = random_blaschke(&mut rng, 2);
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let coeffs = taylor_coefficients(&theta, &b, 5).unwrap();
        for n in 0..=5usize {
            let closed = assemble_theta_bbar_power(&theta, &basis, n).unwrap();
            let dev = coeffs[n].sub(&closed.entries).max_abs();
            assert!(dev < 1e-7, "Taylor coefficient {n} off by {dev:.3e}");
        }
    }
}
