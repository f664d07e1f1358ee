//! Finite Blaschke products and the exact-structure algebra around them:
//! evaluation, multiplication, composition, fiber solving, psi factors,
//! polyphase components, and the unimodular-quotient factorization of
//! circle-equimodular polynomials.
//!
//! A finite Blaschke product is `c * prod phi_a(z)` with `|c| = 1`,
//! `phi_a(z) = (z - a)/(1 - conj(a) z)` and all zeros `a` in the open disc.
//! Zeros within `1e-9` of the unit circle are rejected at construction;
//! quadrature and fiber solving degrade near the boundary.

use crate::poly::ComplexPolynomial;
use crate::{Complex64, Error, Result};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // needed for the no_std build
use num_traits::Float;

/// Margin keeping zeros away from the unit circle.
pub const BOUNDARY_MARGIN: f64 = 1e-9;
/// Evaluation points closer than this to a pole are rejected.
pub const POLE_TOL: f64 = 1e-12;
/// Greedy zero-multiset matching tolerance.
pub const ROOT_MATCH_TOL: f64 = 1e-8;
/// Roots closer than this are clustered as one multiple root.
pub const ROOT_CLUSTER_TOL: f64 = 1e-6;

fn one_c() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// The elementary factor `phi_a(z) = (z - a)/(1 - conj(a) z)`.
pub fn phi(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (one_c() - a.conj() * z)
}

/// A finite Blaschke product: unimodular constant and zero multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    constant: Complex64,
    zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    /// Validating constructor. The constant must be unimodular within
    /// 1e-12 and every zero must satisfy `|a| < 1 - 1e-9`.
    pub fn new(constant: Complex64, zeros: Vec<Complex64>) -> Result<Self> {
        Self::with_margin(constant, zeros, BOUNDARY_MARGIN)
    }

    /// Constructor with a configurable boundary margin.
    pub fn with_margin(constant: Complex64, zeros: Vec<Complex64>, margin: f64) -> Result<Self> {
        if !constant.re.is_finite() || !constant.im.is_finite() {
            return Err(Error::InvalidInput("non-finite constant"));
        }
        if (constant.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("constant is not unimodular"));
        }
        for z in &zeros {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidInput("non-finite zero"));
            }
            if z.norm() >= 1.0 - margin {
                return Err(Error::InvalidInput("zero too close to the unit circle"));
            }
        }
        Ok(BlaschkeProduct { constant, zeros })
    }

    /// The identity element: constant 1, no zeros.
    pub fn one() -> Self {
        BlaschkeProduct {
            constant: one_c(),
            zeros: Vec::new(),
        }
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        BlaschkeProduct {
            constant: one_c(),
            zeros: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// The elementary factor `phi_a`.
    pub fn elementary(a: Complex64) -> Result<Self> {
        Self::new(one_c(), vec![a])
    }

    /// Product of elementary factors over the given zeros, constant 1.
    pub fn from_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(one_c(), zeros)
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// True when every zero is (numerically) at the origin, i.e. the
    /// product is `c * z^N`.
    pub fn is_monomial(&self) -> bool {
        self.zeros.iter().all(|z| z.norm() < 1e-12)
    }

    /// Pointwise evaluation. Poles sit at `1/conj(a)` outside the closed
    /// disc, so evaluation anywhere in `|z| <= 1` never errors.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.constant;
        for &a in &self.zeros {
            let denom = one_c() - a.conj() * z;
            if denom.norm() <= POLE_TOL {
                return Err(Error::PoleProximity { z });
            }
            acc *= (z - a) / denom;
        }
        Ok(acc)
    }

    /// Product: union of zero multisets, product of constants.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        BlaschkeProduct {
            constant: self.constant * other.constant,
            zeros,
        }
    }

    /// Numerator polynomial `c * prod (z - a)`.
    pub fn numerator(&self) -> ComplexPolynomial {
        ComplexPolynomial::from_roots(self.constant, &self.zeros)
    }

    /// Denominator polynomial `prod (1 - conj(a) z)`.
    pub fn denominator(&self) -> ComplexPolynomial {
        let mut coeffs = vec![one_c()];
        for &a in &self.zeros {
            let ac = a.conj();
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * ac;
            }
            coeffs = next;
        }
        ComplexPolynomial::new(coeffs)
    }

    /// All solutions in the open disc (with multiplicity) of
    /// `B(z) = beta`, as roots of the numerator of `B(z) - beta`.
    pub fn fiber_roots(&self, beta: Complex64) -> Result<Vec<Complex64>> {
        if beta.norm() >= 1.0 {
            return Err(Error::InvalidInput("fiber value must be in the open disc"));
        }
        let k = self.degree();
        if k == 0 {
            return Ok(Vec::new());
        }
        // numerator of B(z) - beta; the leading coefficient has modulus
        // >= 1 - |beta| > 0, so the degree is exactly k
        let num = self.numerator();
        let den = self.denominator().scale(beta);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        for (i, &c) in num.coeffs().iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in den.coeffs().iter().enumerate() {
            coeffs[i] -= c;
        }
        let p = ComplexPolynomial::new(coeffs);
        if p.degree() != Some(k) {
            return Err(Error::RootSolveFailure);
        }
        let roots = p.roots()?;
        for &r in &roots {
            if r.norm() >= 1.0 {
                return Err(Error::RootSolveFailure);
            }
            let val = self.eval(r)?;
            if (val - beta).norm() >= 1e-8 {
                return Err(Error::RootSolveFailure);
            }
        }
        Ok(roots)
    }
}

/// An inner function: a finite Blaschke product or a composition
/// `u(B(z))` of two of them.
#[derive(Debug, Clone, PartialEq)]
pub enum InnerFunction {
    Atomic(BlaschkeProduct),
    Composed {
        outer: BlaschkeProduct,
        inner: BlaschkeProduct,
    },
}

/// Symbolic composition `u ∘ B`.
pub fn compose(u: BlaschkeProduct, b: BlaschkeProduct) -> InnerFunction {
    InnerFunction::Composed { outer: u, inner: b }
}

impl InnerFunction {
    pub fn atomic(b: BlaschkeProduct) -> Self {
        InnerFunction::Atomic(b)
    }

    pub fn degree(&self) -> usize {
        match self {
            InnerFunction::Atomic(b) => b.degree(),
            InnerFunction::Composed { outer, inner } => outer.degree() * inner.degree(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            InnerFunction::Atomic(b) => b.eval(z),
            InnerFunction::Composed { outer, inner } => outer.eval(inner.eval(z)?),
        }
    }

    /// The zeros (with multiplicity), expanding a composition when needed.
    pub fn zeros_expanded(&self) -> Result<Vec<Complex64>> {
        match self {
            InnerFunction::Atomic(b) => Ok(b.zeros().to_vec()),
            InnerFunction::Composed { .. } => Ok(expand_composition(self)?.zeros().to_vec()),
        }
    }
}

/// Expand a composition `u ∘ B` into a plain Blaschke product whose zeros
/// are the fibers `B^{-1}(zeros of u)`.
///
/// The result is verified pointwise on 128 disc-interior points within
/// 1e-9; a failure indicates the root solver did not converge.
pub fn expand_composition(f: &InnerFunction) -> Result<BlaschkeProduct> {
    let (outer, inner) = match f {
        InnerFunction::Atomic(b) => return Ok(b.clone()),
        InnerFunction::Composed { outer, inner } => (outer, inner),
    };
    let mut zeros = Vec::with_capacity(outer.degree() * inner.degree());
    for &beta in outer.zeros() {
        zeros.extend(inner.fiber_roots(beta)?);
    }
    let candidate = BlaschkeProduct::with_margin(one_c(), zeros, 0.0)?;
    // resolve the unimodular constant on the circle, where neither side
    // can vanish
    let z0 = Complex64::from_polar(1.0, 0.37);
    let c = f.eval(z0)? / candidate.eval(z0)?;
    let result = BlaschkeProduct {
        constant: c / c.norm(),
        zeros: candidate.zeros,
    };
    for i in 0..128 {
        let z = Complex64::from_polar(0.8, 2.0 * core::f64::consts::PI * (i as f64) / 128.0);
        if (result.eval(z)? - f.eval(z)?).norm() > 1e-9 {
            return Err(Error::RootSolveFailure);
        }
    }
    Ok(result)
}

/// Partial-orbit factor `psi_{alpha,J} = prod_{i in J} phi_{omega^i alpha}`
/// with `omega = exp(2 pi i / N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiFactor {
    pub alpha: Complex64,
    pub indices: Vec<usize>,
    pub n: usize,
}

impl PsiFactor {
    pub fn new(alpha: Complex64, mut indices: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("psi factor needs N >= 1"));
        }
        if alpha.norm() >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::InvalidInput("psi base too close to the unit circle"));
        }
        indices.sort_unstable();
        indices.dedup();
        if indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidInput("psi index outside 0..N"));
        }
        Ok(PsiFactor { alpha, indices, n })
    }

    pub fn expand(&self) -> BlaschkeProduct {
        let omega = Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI / self.n as f64);
        let zeros = self
            .indices
            .iter()
            .map(|&i| self.alpha * omega.powu(i as u32))
            .collect();
        BlaschkeProduct {
            constant: one_c(),
            zeros,
        }
    }
}

/// One polyphase component `theta_j(lam)` of the decomposition
/// `theta(z) = sum_j z^j theta_j(z^N)`.
///
/// Computed as `(1/N) * sum_k theta(w_k) / w_k^j` over the N-th roots
/// `w_k = omega^k zeta` of `lam` (principal root `zeta`); the value does
/// not depend on the branch. At `lam = 0` the component equals the j-th
/// Taylor coefficient of `theta`, extracted by a trapezoid Cauchy
/// integral on a small circle.
pub fn polyphase_eval(
    theta: &InnerFunction,
    n: usize,
    j: usize,
    lam: Complex64,
) -> Result<Complex64> {
    if n == 0 || j >= n {
        return Err(Error::InvalidInput("polyphase index out of range"));
    }
    if lam.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidInput(
            "polyphase point outside the closed disc",
        ));
    }
    if lam.norm() < 1e-14 {
        // j-th Taylor coefficient via Cauchy integral, radius 0.5
        let m = 256;
        let r = 0.5f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let w =
                Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * (k as f64) / m as f64);
            acc += theta.eval(w * r)? * w.powu(j as u32).conj();
        }
        return Ok(acc / (m as f64 * r.powi(j as i32)));
    }
    let zeta = lam.powf(1.0 / n as f64);
    let value = polyphase_sum(theta, n, j, zeta)?;
    #[cfg(debug_assertions)]
    {
        let omega = Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI / n as f64);
        let again = polyphase_sum(theta, n, j, zeta * omega)?;
        debug_assert!(
            (value - again).norm() <= 1e-10 * (1.0 + value.norm()),
            "polyphase value depends on the root branch"
        );
    }
    Ok(value)
}

pub(crate) fn polyphase_sum(
    theta: &InnerFunction,
    n: usize,
    j: usize,
    zeta: Complex64,
) -> Result<Complex64> {
    let omega = Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI / n as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let w = zeta * omega.powu(k as u32);
        acc += theta.eval(w)? / w.powu(j as u32);
    }
    Ok(acc / n as f64)
}

/// Factor a quotient of circle-equimodular polynomials as a unimodular
/// multiple of a quotient of Blaschke products:
/// `h2/h1 = c * B2/B1` with `|c| = 1` and `deg B1 + deg B2 <= k - 1`.
///
/// Construction: cancel common roots, then take `B_i` over the interior
/// roots of `h_i` (roots at 0 become `phi_0 = z` factors); the exterior
/// roots contribute only to the shared outer part. The result is
/// verified pointwise on the circle.
pub fn poly_unimodular_quotient(
    h1: &ComplexPolynomial,
    h2: &ComplexPolynomial,
    k: usize,
) -> Result<(BlaschkeProduct, BlaschkeProduct, Complex64)> {
    if h1.is_zero() || h2.is_zero() {
        return Err(Error::InvalidInput("quotient of a zero polynomial"));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive"));
    }
    let d1 = h1.degree().unwrap_or(0);
    let d2 = h2.degree().unwrap_or(0);
    if d1 > k - 1 || d2 > k - 1 {
        return Err(Error::DegreeViolation("polynomial degree exceeds k - 1"));
    }

    // |h1| = |h2| on 256 circle points
    let m = 256;
    let mut max_dev = 0.0f64;
    let mut max_mod = 0.0f64;
    for i in 0..m {
        let z = circle_point(i, m);
        let a = h1.eval(z).norm();
        let b = h2.eval(z).norm();
        max_dev = max_dev.max((a - b).abs());
        max_mod = max_mod.max(a.max(b));
    }
    if max_dev >= 1e-8 * max_mod {
        return Err(Error::ModulusMismatch {
            max_deviation: max_dev,
        });
    }

    let mut roots1 = h1.roots()?;
    let mut roots2 = h2.roots()?;
    cancel_common_roots(&mut roots1, &mut roots2, ROOT_MATCH_TOL);
    for &r in roots1.iter().chain(roots2.iter()) {
        if (r.norm() - 1.0).abs() < 1e-9 {
            return Err(Error::RootOnCircle { root: r });
        }
    }

    let interior = |roots: &[Complex64]| -> Vec<Complex64> {
        roots.iter().copied().filter(|r| r.norm() < 1.0).collect()
    };
    let b1 = BlaschkeProduct::with_margin(one_c(), interior(&roots1), 0.0)?;
    let b2 = BlaschkeProduct::with_margin(one_c(), interior(&roots2), 0.0)?;

    // resolve c from h2 * B1 = c * h1 * B2 at the circle point where the
    // right side is farthest from zero
    let mut best: Option<(f64, Complex64)> = None;
    for i in 0..m {
        let z = circle_point(i, m);
        let rhs = h1.eval(z) * b2.eval(z)?;
        let lhs = h2.eval(z) * b1.eval(z)?;
        let w = rhs.norm();
        if best.as_ref().map_or(true, |(bw, _)| w > *bw) {
            best = Some((w, lhs / rhs));
        }
    }
    let (_, c_raw) = best.expect("nonempty grid");
    if (c_raw.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::RootSolveFailure);
    }
    let c = c_raw / c_raw.norm();

    // pointwise verification of h2 * B1 = c * h1 * B2
    let mut resid = 0.0f64;
    for i in 0..m {
        let z = circle_point(i, m);
        let lhs = h2.eval(z) * b1.eval(z)?;
        let rhs = h1.eval(z) * b2.eval(z)? * c;
        resid = resid.max((lhs - rhs).norm());
    }
    if resid >= 1e-8 * max_mod.max(1.0) {
        return Err(Error::RootSolveFailure);
    }

    Ok((b1, b2, c))
}

fn circle_point(i: usize, m: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * (i as f64) / m as f64)
}

/// Remove greedily matched near-equal pairs from both root lists.
fn cancel_common_roots(a: &mut Vec<Complex64>, b: &mut Vec<Complex64>, tol: f64) {
    let mut i = 0;
    while i < a.len() {
        let mut matched = None;
        for (j, &y) in b.iter().enumerate() {
            if (a[i] - y).norm() < tol {
                matched = Some(j);
                break;
            }
        }
        if let Some(j) = matched {
            a.swap_remove(i);
            b.swap_remove(j);
        } else {
            i += 1;
        }
    }
}

/// Cluster a root list into `(representative, multiplicity)` pairs; roots
/// within `tol` of a cluster representative join that cluster, and the
/// representative is the running mean.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        let mut joined = false;
        for (rep, count) in clusters.iter_mut() {
            if (*rep - r).norm() < tol {
                let n = *count as f64;
                *rep = (*rep * n + r) / (n + 1.0);
                *count += 1;
                joined = true;
                break;
            }
        }
        if !joined {
            clusters.push((r, 1));
        }
    }
    clusters
}
