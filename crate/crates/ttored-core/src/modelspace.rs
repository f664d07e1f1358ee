//! Model spaces `K_B` for finite Blaschke products `B`: Takenaka–Malmquist
//! orthonormal bases, uniform circle quadrature, and projections.
//!
//! The basis attached to the ordered zeros `w_1..w_k` of `B` is
//!
//! ```text
//! e_n(z) = sqrt(1 - |w_n|^2) / (1 - conj(w_n) z) * prod_{i<n} phi_{w_i}(z)
//! ```
//!
//! which is orthonormal in closed form — no Gram–Schmidt needed. The zero
//! ordering is whatever the input multiset carries; reports record it.
//!
//! Inner products are uniform trapezoid sums on the circle, exact for
//! trigonometric polynomials of degree < M/2 and geometrically convergent
//! for rational functions with poles off the circle (the error scales like
//! `rho^M` with `rho` the largest pole-free radius ratio, so near-boundary
//! zeros need a larger grid).

use crate::blaschke::{BlaschkeProduct, InnerFunction};
use crate::{Complex64, Error, Result};
use alloc::vec::Vec;
#[allow(unused_imports)] // needed for the no_std build
use num_traits::Float;

/// Minimum quadrature size.
pub const MIN_GRID: usize = 4096;

/// Uniform quadrature grid on the unit circle: `M` nodes `exp(2 pi i m/M)`
/// with weights `1/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    m: usize,
    nodes: Vec<Complex64>,
}

impl QuadratureGrid {
    /// Default grid for computations involving the given total degree:
    /// `M = max(4096, next power of two >= 16 * total_degree)`.
    pub fn for_degree(total_degree: usize) -> Self {
        let target = 16usize.saturating_mul(total_degree.max(1));
        Self::with_size(target.max(MIN_GRID))
    }

    /// Grid with at least `m` nodes, rounded up to a power of two.
    pub fn with_size(m: usize) -> Self {
        let m = m.max(4).next_power_of_two();
        let nodes = (0..m)
            .map(|i| Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * (i as f64) / m as f64))
            .collect();
        QuadratureGrid { m, nodes }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// Sample a pointwise-evaluable function on all nodes.
    pub fn sample<F: FnMut(Complex64) -> Result<Complex64>>(
        &self,
        mut f: F,
    ) -> Result<Vec<Complex64>> {
        self.nodes.iter().map(|&z| f(z)).collect()
    }

    /// `(1/M) sum f(z_m) conj(g(z_m))`, the L2 pairing on the circle.
    pub fn inner_product(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
        if f.len() != self.m || g.len() != self.m {
            return Err(Error::GridMismatch);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in f.iter().zip(g.iter()) {
            acc += a * b.conj();
        }
        Ok(acc / self.m as f64)
    }
}

/// Orthonormal Takenaka–Malmquist basis of `K_B`, sampled on a grid.
#[derive(Debug, Clone)]
pub struct ModelSpaceBasis {
    b: BlaschkeProduct,
    grid: QuadratureGrid,
    /// `samples[n]` holds `e_{n+1}` on the grid nodes.
    samples: Vec<Vec<Complex64>>,
}

impl ModelSpaceBasis {
    /// Basis with the default grid for `deg B`.
    pub fn build(b: &BlaschkeProduct) -> Result<Self> {
        let grid = QuadratureGrid::for_degree(b.degree());
        Self::build_on(b, grid)
    }

    /// Basis sampled on a caller-chosen grid.
    pub fn build_on(b: &BlaschkeProduct, grid: QuadratureGrid) -> Result<Self> {
        if b.degree() == 0 {
            return Err(Error::DegenerateSpace);
        }
        let k = b.degree();
        let mut samples = Vec::with_capacity(k);
        for n in 0..k {
            let mut row = Vec::with_capacity(grid.len());
            for &z in grid.nodes() {
                row.push(tm_eval(b.zeros(), n, z)?);
            }
            samples.push(row);
        }
        Ok(ModelSpaceBasis {
            b: b.clone(),
            grid,
            samples,
        })
    }

    pub fn blaschke(&self) -> &BlaschkeProduct {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.samples.len()
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// The zero ordering defining the basis.
    pub fn ordered_zeros(&self) -> &[Complex64] {
        self.b.zeros()
    }

    /// Grid samples of `e_{n+1}`.
    pub fn basis_samples(&self, n: usize) -> &[Complex64] {
        &self.samples[n]
    }

    /// Evaluate `e_{n+1}` anywhere off the poles.
    pub fn eval_basis(&self, n: usize, z: Complex64) -> Result<Complex64> {
        tm_eval(self.b.zeros(), n, z)
    }

    /// Projection coefficients `c_n = <f, e_n>` of a grid-sampled function.
    pub fn project(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.samples
            .iter()
            .map(|e| self.grid.inner_product(f, e))
            .collect()
    }

    /// Grid samples of `sum c_n e_n`.
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch);
        }
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (c, e) in coeffs.iter().zip(self.samples.iter()) {
            for (o, v) in out.iter_mut().zip(e.iter()) {
                *o += c * v;
            }
        }
        Ok(out)
    }

    /// L2 distance (via quadrature) between `f` and its projection onto
    /// the basis span.
    pub fn projection_residual(&self, f: &[Complex64]) -> Result<f64> {
        let coeffs = self.project(f)?;
        let rec = self.reconstruct(&coeffs)?;
        let mut acc = 0.0f64;
        for (a, b) in f.iter().zip(rec.iter()) {
            acc += (a - b).norm_sqr();
        }
        Ok((acc / self.grid.len() as f64).sqrt())
    }

    /// Max deviation of the quadrature Gram matrix from the identity.
    pub fn gram_residual(&self) -> Result<f64> {
        let k = self.dim();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let g = self.grid.inner_product(&self.samples[i], &self.samples[j])?;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        Ok(worst)
    }

    /// The same basis functions in a permuted order. `order[m]` is the
    /// index of the function that becomes position `m`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.dim() {
            return Err(Error::DimensionMismatch);
        }
        let mut seen = alloc::vec![false; order.len()];
        for &i in order {
            if i >= order.len() || seen[i] {
                return Err(Error::InvalidInput("not a permutation"));
            }
            seen[i] = true;
        }
        // reorder samples only; the underlying zero list keeps its role as
        // the function definitions, so evaluation goes through samples here
        let samples = order.iter().map(|&i| self.samples[i].clone()).collect();
        Ok(ModelSpaceBasis {
            b: self.b.clone(),
            grid: self.grid.clone(),
            samples,
        })
    }

    /// Order-insensitive fingerprint of (zeros, grid size) identifying the
    /// basis a matrix was assembled in.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64; // FNV offset basis
        let mut mix = |bits: u64| {
            h ^= bits;
            h = h.wrapping_mul(0x100000001b3);
        };
        mix(self.grid.len() as u64);
        for z in self.b.zeros() {
            mix(z.re.to_bits());
            mix(z.im.to_bits());
        }
        h
    }
}

/// Takenaka–Malmquist function `e_{n+1}` for the ordered zero list.
fn tm_eval(zeros: &[Complex64], n: usize, z: Complex64) -> Result<Complex64> {
    let w = zeros[n];
    let denom = Complex64::new(1.0, 0.0) - w.conj() * z;
    if denom.norm() <= crate::blaschke::POLE_TOL {
        return Err(Error::PoleProximity { z });
    }
    let mut acc = Complex64::new((1.0 - w.norm_sqr()).sqrt(), 0.0) / denom;
    for &wi in &zeros[..n] {
        let d = Complex64::new(1.0, 0.0) - wi.conj() * z;
        if d.norm() <= crate::blaschke::POLE_TOL {
            return Err(Error::PoleProximity { z });
        }
        acc *= (z - wi) / d;
    }
    Ok(acc)
}

/// `deg theta >= deg B`, the finite-Blaschke form of the requirement that
/// `T_{theta conj(B)}` has trivial kernel.
pub fn check_kernel_condition(theta: &InnerFunction, b: &BlaschkeProduct) -> bool {
    theta.degree() >= b.degree()
}

/// Sample an inner function on a grid.
pub fn sample_inner(theta: &InnerFunction, grid: &QuadratureGrid) -> Result<Vec<Complex64>> {
    grid.sample(|z| theta.eval(z))
}

/// Sample a Blaschke product on a grid.
pub fn sample_blaschke(b: &BlaschkeProduct, grid: &QuadratureGrid) -> Result<Vec<Complex64>> {
    grid.sample(|z| b.eval(z))
}

/// Szegő kernel `k_w(z) = 1/(1 - conj(w) z)` sampled on a grid.
pub fn sample_szego(w: Complex64, grid: &QuadratureGrid) -> Vec<Complex64> {
    grid.nodes()
        .iter()
        .map(|&z| Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - w.conj() * z))
        .collect()
}

/// Pointwise product of two sampled functions.
pub fn pointwise_mul(f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    f.iter().zip(g.iter()).map(|(a, b)| a * b).collect()
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
    fn monomial_basis_is_monomials() {
        let basis = ModelSpaceBasis::build(&BlaschkeProduct::monomial(2)).unwrap();
        for (i, &z) in basis.grid().nodes().iter().enumerate().take(16) {
            assert!((basis.basis_samples(0)[i] - c(1.0, 0.0)).norm() < 1e-14);
            assert!((basis.basis_samples(1)[i] - z).norm() < 1e-14);
        }
    }

    #[test]
    fn elementary_basis_formula() {
        let b = BlaschkeProduct::elementary(c(0.5, 0.0)).unwrap();
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let z = c(0.2, 0.1);
        let expected = c(0.75f64.sqrt(), 0.0) / (c(1.0, 0.0) - c(0.5, 0.0) * z);
        assert!((basis.eval_basis(0, z).unwrap() - expected).norm() < 1e-14);
        assert!(basis.gram_residual().unwrap() < 1e-12);
    }

    #[test]
    fn gram_identity_random_degree_4() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..3 {
            let b = random_blaschke(&mut rng, 4);
            let basis = ModelSpaceBasis::build(&b).unwrap();
            assert!(basis.gram_residual().unwrap() < 1e-9);
        }
    }

    #[test]
    fn inner_product_trivials() {
        let grid = QuadratureGrid::with_size(4096);
        let z: Vec<Complex64> = grid.nodes().to_vec();
        let one: Vec<Complex64> = grid.sample(|_| Ok(c(1.0, 0.0))).unwrap();
        assert!((grid.inner_product(&z, &z).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        assert!(grid.inner_product(&z, &one).unwrap().norm() < 1e-14);
    }

    #[test]
    fn szego_kernel_pairing() {
        let grid = QuadratureGrid::with_size(4096);
        let w = c(0.3, 0.4);
        let v = c(-0.2, 0.6);
        let kw = sample_szego(w, &grid);
        let kv = sample_szego(v, &grid);
        let got = grid.inner_product(&kw, &kv).unwrap();
        let expected = c(1.0, 0.0) / (c(1.0, 0.0) - w.conj() * v);
        assert!((got - expected).norm() < 1e-10, "szego pairing {got} vs {expected}");
    }

    #[test]
    fn grid_mismatch_detected() {
        let grid = QuadratureGrid::with_size(4096);
        let f = alloc::vec![c(1.0, 0.0); 16];
        assert!(matches!(
            grid.inner_product(&f, &f).unwrap_err(),
            Error::GridMismatch
        ));
    }

    #[test]
    fn project_basis_vector_is_unit_coordinate() {
        let mut rng = StdRng::seed_from_u64(7);
        let b = random_blaschke(&mut rng, 3);
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let coeffs = basis.project(basis.basis_samples(1)).unwrap();
        for (i, cf) in coeffs.iter().enumerate() {
            let target = if i == 1 { 1.0 } else { 0.0 };
            assert!((cf - c(target, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn project_b_times_analytic_is_zero() {
        // B * g is in B H^2, orthogonal to K_B
        let mut rng = StdRng::seed_from_u64(13);
        let b = random_blaschke(&mut rng, 3);
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let bs = sample_blaschke(&b, basis.grid()).unwrap();
        let g: Vec<Complex64> = basis
            .grid()
            .nodes()
            .iter()
            .map(|&z| c(0.7, -0.2) + c(0.1, 0.4) * z + c(-0.3, 0.2) * z * z)
            .collect();
        let f = pointwise_mul(&bs, &g);
        let coeffs = basis.project(&f).unwrap();
        for cf in coeffs {
            assert!(cf.norm() < 1e-9);
        }
    }

    #[test]
    fn project_high_monomial_onto_small_space() {
        let basis = ModelSpaceBasis::build(&BlaschkeProduct::monomial(2)).unwrap();
        let f: Vec<Complex64> = basis.grid().nodes().iter().map(|&z| z * z * z).collect();
        let coeffs = basis.project(&f).unwrap();
        assert!(coeffs.iter().all(|cf| cf.norm() < 1e-12));
    }

    #[test]
    fn kernel_condition_examples() {
        let z3 = InnerFunction::atomic(BlaschkeProduct::monomial(3));
        let z2 = BlaschkeProduct::monomial(2);
        assert!(check_kernel_condition(&z3, &z2));
        let phi_a = InnerFunction::atomic(BlaschkeProduct::elementary(c(0.3, 0.0)).unwrap());
        assert!(!check_kernel_condition(&phi_a, &z2));
        // composed theta = u(B) with deg u >= 1 always passes against B
        let u = BlaschkeProduct::elementary(c(0.5, 0.1)).unwrap();
        let composed = compose(u, z2.clone());
        assert!(check_kernel_condition(&composed, &z2));
    }

    #[test]
    fn dilation_orthogonality() {
        // theta K_B ⟂ K_theta and B^n K_B ⟂ B^m K_B for n != m <= 3
        let mut rng = StdRng::seed_from_u64(19);
        let theta = random_blaschke(&mut rng, 3);
        let b = random_blaschke(&mut rng, 2);
        let grid = QuadratureGrid::for_degree(theta.degree() + 5 * b.degree());
        let basis_b = ModelSpaceBasis::build_on(&b, grid.clone()).unwrap();
        let basis_t = ModelSpaceBasis::build_on(&theta, grid.clone()).unwrap();
        let ts = sample_blaschke(&theta, &grid).unwrap();
        let bs = sample_blaschke(&b, &grid).unwrap();

        for i in 0..basis_b.dim() {
            let tf = pointwise_mul(&ts, basis_b.basis_samples(i));
            for j in 0..basis_t.dim() {
                let ip = grid.inner_product(&tf, basis_t.basis_samples(j)).unwrap();
                assert!(ip.norm() < 1e-9, "theta K_B not orthogonal to K_theta");
            }
        }

        let mut powers = alloc::vec![grid.sample(|_| Ok(c(1.0, 0.0))).unwrap()];
        for n in 1..=3usize {
            powers.push(pointwise_mul(&powers[n - 1], &bs));
        }
        for n in 0..=3usize {
            for m in 0..=3usize {
                if n == m {
                    continue;
                }
                for i in 0..basis_b.dim() {
                    for j in 0..basis_b.dim() {
                        let f = pointwise_mul(&powers[n], basis_b.basis_samples(i));
                        let g = pointwise_mul(&powers[m], basis_b.basis_samples(j));
                        let ip = grid.inner_product(&f, &g).unwrap();
                        assert!(ip.norm() < 1e-9, "B^n K_B not orthogonal to B^m K_B");
                    }
                }
            }
        }
    }

    #[test]
    fn quadrature_saturation() {
        // doubling M changes results by < 1e-10
        let mut rng = StdRng::seed_from_u64(23);
        let b = random_blaschke(&mut rng, 3);
        let g1 = QuadratureGrid::with_size(4096);
        let g2 = QuadratureGrid::with_size(8192);
        let b1 = ModelSpaceBasis::build_on(&b, g1).unwrap();
        let b2 = ModelSpaceBasis::build_on(&b, g2).unwrap();
        let ip1 = b1
            .grid()
            .inner_product(b1.basis_samples(0), b1.basis_samples(2))
            .unwrap();
        let ip2 = b2
            .grid()
            .inner_product(b2.basis_samples(0), b2.basis_samples(2))
            .unwrap();
        assert!((ip1 - ip2).norm() < 1e-10);
    }

    #[test]
    fn permuted_basis_roundtrip() {
        let mut rng = StdRng::seed_from_u64(29);
        let b = random_blaschke(&mut rng, 3);
        let basis = ModelSpaceBasis::build(&b).unwrap();
        let p = basis.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.basis_samples(0), basis.basis_samples(2));
        assert!(basis.permuted(&[0, 0, 1]).is_err());
    }
}
