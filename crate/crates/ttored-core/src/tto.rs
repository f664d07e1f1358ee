//! Matrix assembly of truncated Toeplitz operators `A^B_phi` — the
//! compression of multiplication by a bounded symbol `phi` to the model
//! space `K_B` — in the Takenaka–Malmquist basis, plus the banded closed
//! form for `B = z^N` with a monomial symbol.

use crate::matrix::CMatrix;
use crate::modelspace::{pointwise_mul, ModelSpaceBasis};
use crate::{Complex64, Error, Result};

/// A dense operator matrix together with a fingerprint of the basis it
/// was assembled in.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    pub basis_id: u64,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.entries.rows()
    }
}

/// Assemble `A^B_phi` from a grid-sampled symbol:
/// `entries[m][n] = <phi * e_n, e_m>` by quadrature.
pub fn assemble(symbol: &[Complex64], basis: &ModelSpaceBasis) -> Result<OperatorMatrix> {
    if symbol.len() != basis.grid().len() {
        return Err(Error::GridMismatch);
    }
    let k = basis.dim();
    let mut entries = CMatrix::zeros(k, k);
    for n in 0..k {
        let fn_samples = pointwise_mul(symbol, basis.basis_samples(n));
        for m in 0..k {
            let v = basis
                .grid()
                .inner_product(&fn_samples, basis.basis_samples(m))?;
            entries.set(m, n, v);
        }
    }
    Ok(OperatorMatrix {
        entries,
        basis_id: basis.fingerprint(),
    })
}

/// Closed-form matrix of `A^{z^N}_{z^p}` in the monomial basis
/// `{1, z, ..., z^{N-1}}`: ones on the diagonal `i - j = p`, zero
/// elsewhere (the zero matrix when `|p| >= N`).
pub fn monomial_matrix_zn(n: usize, p: isize) -> OperatorMatrix {
    let mut entries = CMatrix::zeros(n, n);
    if p.unsigned_abs() < n {
        for i in 0..n {
            let j = i as isize - p;
            if j >= 0 && (j as usize) < n {
                entries.set(i, j as usize, Complex64::new(1.0, 0.0));
            }
        }
    }
    OperatorMatrix {
        entries,
        basis_id: monomial_basis_id(n),
    }
}

/// Fingerprint matching `ModelSpaceBasis::fingerprint` for the default
/// grid over `z^N` (all zeros at the origin).
fn monomial_basis_id(n: usize) -> u64 {
    let grid = crate::modelspace::QuadratureGrid::for_degree(n);
    let mut h = 0xcbf29ce484222325u64;
    let mut mix = |bits: u64| {
        h ^= bits;
        h = h.wrapping_mul(0x100000001b3);
    };
    mix(grid.len() as u64);
    for _ in 0..n {
        mix(0.0f64.to_bits());
        mix(0.0f64.to_bits());
    }
    h
}
