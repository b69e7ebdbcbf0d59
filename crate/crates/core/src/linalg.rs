//! Hermitian positive-definite block-tridiagonal systems.
//!
//! Used by the ZF fast path (normal matrix `Σ_m H_m^* R H_m`) and for the
//! diagonal of `R⁻¹` at sizes where the dense inverse is too expensive.

use nalgebra::{Cholesky, ComplexField, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Pivots below this fraction of the largest diagonal entry are treated as
/// numerical rank deficiency.
const PIVOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct BlockTridiagonal<T: ComplexField> {
    /// `A_ii`, Hermitian.
    pub diag: Vec<DMatrix<T>>,
    /// `A_{i+1,i}`; the upper blocks are their adjoints.
    pub lower: Vec<DMatrix<T>>,
}

impl<T: ComplexField<RealField = f64>> BlockTridiagonal<T> {
    pub fn new(diag: Vec<DMatrix<T>>, lower: Vec<DMatrix<T>>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(lower.len() + 1, diag.len());
        Self { diag, lower }
    }

    pub fn block_size(&self) -> usize {
        self.diag[0].nrows()
    }

    pub fn blocks(&self) -> usize {
        self.diag.len()
    }

    fn scale(&self) -> f64 {
        self.diag
            .iter()
            .flat_map(|d| d.diagonal().iter().map(|v| v.clone().modulus()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    fn factor(&self, block: DMatrix<T>, scale: f64) -> Result<Cholesky<T, Dyn>> {
        let chol = Cholesky::new(block).ok_or(Error::Singular)?;
        let min_pivot = chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|v| v.clone().modulus().powi(2))
            .fold(f64::INFINITY, f64::min);
        if !(min_pivot > PIVOT_TOL * scale) {
            return Err(Error::Singular);
        }
        Ok(chol)
    }

    /// Forward Schur complements `S_0 = A_0`,
    /// `S_i = A_i - A_{i,i-1} S_{i-1}⁻¹ A_{i-1,i}`, factorised.
    fn left_schur(&self) -> Result<Vec<(DMatrix<T>, Cholesky<T, Dyn>)>> {
        let scale = self.scale();
        let mut out: Vec<(DMatrix<T>, Cholesky<T, Dyn>)> = Vec::with_capacity(self.blocks());
        for i in 0..self.blocks() {
            let mut s = self.diag[i].clone();
            if i > 0 {
                let b = &self.lower[i - 1];
                let x = out[i - 1].1.solve(&b.adjoint());
                s -= b * x;
            }
            let chol = self.factor(s.clone(), scale)?;
            out.push((s, chol));
        }
        Ok(out)
    }

    /// Solves `A x = rhs`, `rhs` stacked block by block.
    pub fn solve(&self, rhs: &DVector<T>) -> Result<DVector<T>> {
        let k = self.block_size();
        let n = self.blocks();
        if rhs.len() != n * k {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, system has {}",
                rhs.len(),
                n * k
            )));
        }
        let schur = self.left_schur()?;
        let mut z: Vec<DVector<T>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut zi = rhs.rows(i * k, k).into_owned();
            if i > 0 {
                let w = schur[i - 1].1.solve(&z[i - 1]);
                zi -= &self.lower[i - 1] * w;
            }
            z.push(zi);
        }
        let mut x = DVector::zeros(n * k);
        for i in (0..n).rev() {
            let mut zi = z[i].clone();
            if i + 1 < n {
                let next = x.rows((i + 1) * k, k).into_owned();
                zi -= self.lower[i].adjoint() * next;
            }
            x.rows_mut(i * k, k).copy_from(&schur[i].1.solve(&zi));
        }
        Ok(x)
    }

    /// Diagonal blocks of `A⁻¹`.
    pub fn inverse_diagonal_blocks(&self) -> Result<Vec<DMatrix<T>>> {
        let n = self.blocks();
        let scale = self.scale();
        let left = self.left_schur()?;
        // right Schur complements T_i = A_i - A_{i,i+1} T_{i+1}⁻¹ A_{i+1,i}
        let mut right: Vec<Option<Cholesky<T, Dyn>>> = (0..n).map(|_| None).collect();
        for i in (0..n).rev() {
            let mut t = self.diag[i].clone();
            if i + 1 < n {
                let b = &self.lower[i];
                let x = right[i + 1].as_ref().unwrap().solve(b);
                t -= b.adjoint() * x;
            }
            right[i] = Some(self.factor(t, scale)?);
        }
        (0..n)
            .map(|i| {
                let mut s = left[i].0.clone();
                if i + 1 < n {
                    let b = &self.lower[i];
                    let x = right[i + 1].as_ref().unwrap().solve(b);
                    s -= b.adjoint() * x;
                }
                Ok(self.factor(s, scale)?.inverse())
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let k = self.block_size();
        let n = self.blocks();
        let mut a = DMatrix::zeros(n * k, n * k);
        for i in 0..n {
            a.view_mut((i * k, i * k), (k, k)).copy_from(&self.diag[i]);
            if i + 1 < n {
                a.view_mut(((i + 1) * k, i * k), (k, k)).copy_from(&self.lower[i]);
                a.view_mut((i * k, (i + 1) * k), (k, k))
                    .copy_from(&self.lower[i].adjoint());
            }
        }
        a
    }
}
