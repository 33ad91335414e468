//! Tridiagonal complex systems: LU factorization without pivoting, then
//! forward and backward substitution per right-hand side.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Row `i` reads `lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    lower: Vec<Complex64>,
    diag: Vec<Complex64>,
    upper: Vec<Complex64>,
}

impl TridiagonalSystem {
    pub fn new(lower: Vec<Complex64>, diag: Vec<Complex64>, upper: Vec<Complex64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(invalid("diag", "system size must be >= 1"));
        }
        if lower.len() != n - 1 {
            return Err(Error::LengthMismatch {
                expected: n - 1,
                actual: lower.len(),
            });
        }
        if upper.len() != n - 1 {
            return Err(Error::LengthMismatch {
                expected: n - 1,
                actual: upper.len(),
            });
        }
        Ok(Self { lower, diag, upper })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[Complex64] {
        &self.lower
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.size();
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        Ok((0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect())
    }

    pub fn factor(&self) -> Result<TridiagonalLu> {
        let n = self.size();
        let mut multipliers = Vec::with_capacity(n.saturating_sub(1));
        let mut inv_pivots = Vec::with_capacity(n);
        let mut pivot = self.diag[0];
        check_pivot(pivot, 0)?;
        inv_pivots.push(pivot.inv());
        for i in 1..n {
            let l = self.lower[i - 1] * inv_pivots[i - 1];
            pivot = self.diag[i] - l * self.upper[i - 1];
            check_pivot(pivot, i)?;
            multipliers.push(l);
            inv_pivots.push(pivot.inv());
        }
        let scaled_upper = self.upper.iter().zip(&inv_pivots).map(|(u, ip)| u * ip).collect();
        Ok(TridiagonalLu {
            multipliers,
            inv_pivots,
            scaled_upper,
        })
    }
}

fn check_pivot(p: Complex64, row: usize) -> Result<()> {
    if p.norm_sqr() == 0.0 || !p.is_finite() {
        Err(Error::ZeroPivot { row })
    } else {
        Ok(())
    }
}

/// `A = L U`: unit lower bidiagonal `L` (sub-diagonal `multipliers`) and upper
/// bidiagonal `U` (pivots on the diagonal, the original super-diagonal above).
/// `U` is stored row-scaled by the inverse pivots.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    multipliers: Vec<Complex64>,
    inv_pivots: Vec<Complex64>,
    scaled_upper: Vec<Complex64>,
}

impl TridiagonalLu {
    pub fn size(&self) -> usize {
        self.inv_pivots.len()
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) -> Result<()> {
        let n = self.size();
        if x.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        for i in 1..n {
            let prev = x[i - 1];
            x[i] -= self.multipliers[i - 1] * prev;
        }
        x[n - 1] *= self.inv_pivots[n - 1];
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] = x[i] * self.inv_pivots[i] - self.scaled_upper[i] * next;
        }
        Ok(())
    }

    pub(crate) fn multipliers(&self) -> &[Complex64] {
        &self.multipliers
    }

    pub(crate) fn inv_pivots(&self) -> &[Complex64] {
        &self.inv_pivots
    }

    /// `upper[i] / pivot[i]`.
    pub(crate) fn scaled_upper(&self) -> &[Complex64] {
        &self.scaled_upper
    }
}

/// Factor and solve in one call.
pub fn solve_tridiagonal(sys: &TridiagonalSystem, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    if rhs.len() != sys.size() {
        return Err(Error::LengthMismatch {
            expected: sys.size(),
            actual: rhs.len(),
        });
    }
    sys.factor()?.solve(rhs)
}
