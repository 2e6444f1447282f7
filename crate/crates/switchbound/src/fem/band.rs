//! Symmetric banded matrices with a banded Cholesky factorization.
//!
//! The P1 matrices on a lexicographically ordered grid have bandwidth
//! `n_x + 1` (full) or `n_x - 1` (interior), so a band factorization gives a
//! sparse direct solver that is factored once per instance and reused across
//! all time steps.

/// Symmetric matrix stored by its lower band.
///
/// Entry `(i, j)` with `i - bandwidth <= j <= i` lives at
/// `data[i * (bandwidth + 1) + (j + bandwidth - i)]`.
#[derive(Clone, Debug)]
pub struct SymBand {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        SymBand {
            n,
            bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        i * (self.bandwidth + 1) + (j + self.bandwidth - i)
    }

    /// Adds `v` to the symmetric entry `(a, b)` (stored once in the lower band).
    pub fn add(&mut self, a: usize, b: usize, v: f64) {
        let (i, j) = if a >= b { (a, b) } else { (b, a) };
        assert!(
            i - j <= self.bandwidth,
            "entry ({a},{b}) outside bandwidth {}",
            self.bandwidth
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        let (i, j) = if a >= b { (a, b) } else { (b, a) };
        if i - j > self.bandwidth {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Sum of all entries of the full symmetric matrix.
    pub fn total(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i.saturating_sub(self.bandwidth)..=i {
                let v = self.data[self.idx(i, j)];
                s += if i == j { v } else { 2.0 * v };
            }
        }
        s
    }

    /// `y = A x` for the full symmetric matrix.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.fill(0.0);
        for i in 0..self.n {
            let jmin = i.saturating_sub(self.bandwidth);
            let mut acc = 0.0;
            for j in jmin..i {
                let a = self.data[self.idx(i, j)];
                acc += a * x[j];
                y[j] += a * x[i];
            }
            acc += self.data[self.idx(i, i)] * x[i];
            y[i] += acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// `x^T A y` for the full symmetric matrix.
    pub fn quadratic(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.matvec_alloc(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    /// `alpha * A + beta * B`; both operands must share `n` and `bandwidth`.
    pub fn lin_comb(alpha: f64, a: &SymBand, beta: f64, b: &SymBand) -> SymBand {
        assert_eq!(a.n, b.n);
        assert_eq!(a.bandwidth, b.bandwidth);
        let data = a
            .data
            .iter()
            .zip(&b.data)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        SymBand {
            n: a.n,
            bandwidth: a.bandwidth,
            data,
        }
    }

    /// Banded Cholesky factorization `A = L L^T`; fails if a pivot is not
    /// strictly positive.
    pub fn cholesky(&self) -> Result<BandCholesky, f64> {
        let bw = self.bandwidth;
        let mut l = self.data.clone();
        let stride = bw + 1;
        for i in 0..self.n {
            let jmin = i.saturating_sub(bw);
            for j in jmin..=i {
                let kmin = jmin.max(j.saturating_sub(bw));
                let mut sum = l[i * stride + (j + bw - i)];
                for k in kmin..j {
                    sum -= l[i * stride + (k + bw - i)] * l[j * stride + (k + bw - j)];
                }
                if j == i {
                    if sum <= 0.0 {
                        return Err(sum);
                    }
                    l[i * stride + bw] = sum.sqrt();
                } else {
                    l[i * stride + (j + bw - i)] = sum / l[j * stride + bw];
                }
            }
        }
        Ok(BandCholesky {
            n: self.n,
            bandwidth: bw,
            l,
        })
    }
}

/// Lower-triangular band factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    bandwidth: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let bw = self.bandwidth;
        let stride = bw + 1;
        // L y = b
        for i in 0..self.n {
            let jmin = i.saturating_sub(bw);
            let mut sum = b[i];
            for j in jmin..i {
                sum -= self.l[i * stride + (j + bw - i)] * b[j];
            }
            b[i] = sum / self.l[i * stride + bw];
        }
        // L^T x = y
        for i in (0..self.n).rev() {
            let jmax = (i + bw).min(self.n - 1);
            let mut sum = b[i];
            for j in (i + 1)..=jmax {
                sum -= self.l[j * stride + (i + bw - j)] * b[j];
            }
            b[i] = sum / self.l[i * stride + bw];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_from(a: &SymBand) -> Vec<Vec<f64>> {
        (0..a.n())
            .map(|i| (0..a.n()).map(|j| a.get(i, j)).collect())
            .collect()
    }

    fn spd_test_matrix(n: usize, bw: usize) -> SymBand {
        // Diagonally dominant band matrix.
        let mut a = SymBand::zeros(n, bw);
        for i in 0..n {
            a.add(i, i, 4.0 + i as f64 * 0.1);
            for d in 1..=bw {
                if i >= d {
                    a.add(i, i - d, -1.0 / d as f64);
                }
            }
        }
        a
    }

    #[test]
    fn matvec_matches_dense() {
        let a = spd_test_matrix(9, 3);
        let d = dense_from(&a);
        let x: Vec<f64> = (0..9).map(|i| (i as f64).sin() + 0.5).collect();
        let y = a.matvec_alloc(&x);
        for i in 0..9 {
            let yi: f64 = (0..9).map(|j| d[i][j] * x[j]).sum();
            assert!((y[i] - yi).abs() < 1e-13);
        }
    }

    #[test]
    fn cholesky_solves_to_machine_precision() {
        let a = spd_test_matrix(40, 5);
        let chol = a.cholesky().unwrap();
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).cos()).collect();
        let x = chol.solve(&b);
        let r = a.matvec_alloc(&x);
        for i in 0..40 {
            assert!((r[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = SymBand::zeros(3, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, -2.0);
        a.add(2, 2, 1.0);
        assert!(a.cholesky().is_err());
    }
}
