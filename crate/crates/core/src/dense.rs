//! Small dense complex-matrix helpers: ladder blocks, Kronecker products,
//! the matrix exponential and block-aware Hermitian eigendecomposition.
//!
//! Everything here works on the few-mode blocks (dimension ≤ a few hundred)
//! that get embedded into the global sparse operators of [`crate::fock`].

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Schur, SymmetricEigen};
// f64 math for no_std builds; redundant once std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::{CMatrix, Error, Result, C64};

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Single-mode annihilation operator with occupations `0..=truncation`.
pub fn annihilation(truncation: usize) -> CMatrix {
    let dim = truncation + 1;
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Single-mode creation operator; `a†|truncation⟩ = 0`.
pub fn creation(truncation: usize) -> CMatrix {
    annihilation(truncation).adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Annihilation operator of mode `which` inside a product of modes with the
/// given truncations (first mode slowest).
pub fn local_annihilation(truncations: &[usize], which: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for (k, &t) in truncations.iter().enumerate() {
        let factor = if k == which {
            annihilation(t)
        } else {
            CMatrix::identity(t + 1, t + 1)
        };
        out = kron(&out, &factor);
    }
    out
}

/// Infinity norm (maximum absolute row sum).
pub fn norm_inf(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |M†M − 1|` over all entries.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(n, n))
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// The argument is scaled by 2^-s until its infinity norm is below 1/4, the
/// series is summed until the next term is below 1e-18 relative to the
/// partial sum, and the result is squared back s times.
pub fn expm(m: &CMatrix) -> CMatrix {
    assert!(m.is_square(), "expm of a non-square matrix");
    let n = m.nrows();
    let norm = norm_inf(m);
    let mut squarings = 0u32;
    if norm > 0.25 {
        squarings = (norm / 0.25).log2().ceil() as u32;
    }
    let scaled = m * C64::new(0.5f64.powi(squarings as i32), 0.0);

    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=60 {
        term = &term * &scaled * C64::new(1.0 / k as f64, 0.0);
        result += &term;
        if norm_inf(&term) <= 1e-18 * norm_inf(&result).max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Eigendecomposition of a Hermitian matrix that respects its block
/// structure.
///
/// Indices are grouped into connected components of the nonzero pattern and
/// each block is diagonalized separately, so eigenvectors never mix sectors
/// of a conserved quantity even when eigenvalues are degenerate across them.
/// Returns `(values, vectors)` with eigenvectors as columns.
pub fn hermitian_eigen_blocks(h: &CMatrix, zero_tol: f64) -> (Vec<f64>, CMatrix) {
    assert!(h.is_square(), "eigendecomposition of a non-square matrix");
    let n = h.nrows();
    let blocks = connected_blocks(h, zero_tol);

    let mut values = vec![0.0; n];
    let mut vectors = CMatrix::zeros(n, n);
    let mut column = 0;
    for block in blocks {
        let size = block.len();
        let sub = CMatrix::from_fn(size, size, |i, j| h[(block[i], block[j])]);
        let eig = SymmetricEigen::new(sub);
        for k in 0..size {
            values[column] = eig.eigenvalues[k];
            for (i, &row) in block.iter().enumerate() {
                vectors[(row, column)] = eig.eigenvectors[(i, k)];
            }
            column += 1;
        }
    }
    (values, vectors)
}

fn connected_blocks(h: &CMatrix, zero_tol: f64) -> Vec<Vec<usize>> {
    let n = h.nrows();
    let mut label = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        label[start] = id;
        let mut cursor = 0;
        while cursor < members.len() {
            let i = members[cursor];
            cursor += 1;
            for j in 0..n {
                if label[j] == usize::MAX
                    && (h[(i, j)].norm() > zero_tol || h[(j, i)].norm() > zero_tol)
                {
                    label[j] = id;
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Anti-Hermitian logarithm `L` of a unitary `U`, with `exp(L) = U`.
///
/// Uses the complex Schur form; for a normal matrix the triangular factor is
/// diagonal and the logarithm acts on its phases.
pub fn unitary_log(u: &CMatrix) -> Result<CMatrix> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            found: u.ncols(),
        });
    }
    let defect = unitarity_defect(u);
    if defect > 1e-9 {
        return Err(Error::NonUnitary {
            gate: "matrix logarithm input".into(),
            defect,
        });
    }
    let n = u.nrows();
    let (q, t) = Schur::new(u.clone()).unpack();
    let mut off = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            off = off.max(t[(i, j)].norm());
        }
    }
    if off > 1e-8 {
        return Err(Error::NumericalFailure(alloc::format!(
            "Schur form of a unitary is not diagonal (off-diagonal {off:.3e})"
        )));
    }
    let mut phases = CMatrix::zeros(n, n);
    for i in 0..n {
        phases[(i, i)] = C64::new(0.0, t[(i, i)].arg());
    }
    Ok(&q * phases * q.adjoint())
}

/// Block-diagonal direct sum `a ⊕ b`.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_commutator_below_top_rung() {
        let t = 4;
        let a = annihilation(t);
        let ad = creation(t);
        let comm = &a * &ad - &ad * &a;
        for n in 0..t {
            assert!((comm[(n, n)] - ONE).norm() < 1e-15);
        }
        // top rung is clipped
        assert!((comm[(t, t)] - real(-(t as f64))).norm() < 1e-14);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let theta = 2.7;
        let mut g = CMatrix::zeros(2, 2);
        g[(0, 1)] = real(-theta);
        g[(1, 0)] = real(theta);
        let e = expm(&g);
        assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-14);
        assert!(unitarity_defect(&e) < 1e-14);
    }

    #[test]
    fn expm_of_large_norm_diagonal() {
        let mut d = CMatrix::zeros(3, 3);
        d[(0, 0)] = real(3.0);
        d[(1, 1)] = C64::new(0.0, 10.0);
        d[(2, 2)] = real(-5.0);
        let e = expm(&d);
        assert!((e[(0, 0)].re - 3.0f64.exp()).abs() < 1e-12 * 3.0f64.exp());
        assert!((e[(1, 1)] - C64::new(10.0f64.cos(), 10.0f64.sin())).norm() < 1e-12);
        assert!((e[(2, 2)].re - (-5.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn unitary_log_inverts_expm() {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                real(1.0 / 2f64.sqrt()),
                real(1.0 / 2f64.sqrt()),
                real(1.0 / 2f64.sqrt()),
                real(-1.0 / 2f64.sqrt()),
            ],
        );
        let l = unitary_log(&h).unwrap();
        assert!(max_abs_diff(&(&l + l.adjoint()), &CMatrix::zeros(2, 2)) < 1e-12);
        assert!(max_abs_diff(&expm(&l), &h) < 1e-12);
    }

    #[test]
    fn block_eigen_keeps_sectors_apart() {
        // two degenerate 1x1 blocks and one 2x2 block
        let mut h = CMatrix::zeros(4, 4);
        h[(0, 0)] = real(1.0);
        h[(3, 3)] = real(1.0);
        h[(1, 1)] = real(1.0);
        h[(1, 2)] = real(0.5);
        h[(2, 1)] = real(0.5);
        let (values, vectors) = hermitian_eigen_blocks(&h, 0.0);
        let recon = &vectors
            * CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                4,
                values.iter().map(|&v| real(v)),
            ))
            * vectors.adjoint();
        assert!(max_abs_diff(&recon, &h) < 1e-14);
        // vector for index 0 must not leak into index 3
        let col0 = (0..4).find(|&c| vectors[(0, c)].norm() > 0.5).unwrap();
        assert!(vectors[(3, col0)].norm() < 1e-15);
    }
}
