use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Symmetric band matrix storing the lower band row by row:
/// entry `(i, j)` with `i - bw <= j <= i` sits at `i * (bw + 1) + (i - j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedSymMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            n,
            bw: bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), 0);
        m.data.copy_from_slice(diag);
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bw).then(|| i * (self.bw + 1) + (i - j))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)` (a single stored value).
    ///
    /// # Panics
    /// If `|i - j|` exceeds the bandwidth.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bw));
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let a = self.data[i * (self.bw + 1) + (i - j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Banded Cholesky `A = L Lᵀ`, with `L` stored in the same layout.
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let bw = self.bw;
        let mut l = self.data.clone();
        let at = |i: usize, j: usize| i * (bw + 1) + (i - j);
        for j in 0..self.n {
            let lo = j.saturating_sub(bw);
            let mut d = l[at(j, j)];
            for k in lo..j {
                d -= l[at(j, k)] * l[at(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let d = d.sqrt();
            l[at(j, j)] = d;
            for i in j + 1..(j + bw + 1).min(self.n) {
                let lo = i.saturating_sub(bw);
                let mut s = l[at(i, j)];
                for k in lo..j {
                    s -= l[at(i, k)] * l[at(j, k)];
                }
                l[at(i, j)] = s / d;
            }
        }
        Ok(BandedCholesky {
            n: self.n,
            bw,
            l,
        })
    }
}

/// Cholesky factor of a [`BandedSymMatrix`].
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.l[i * (self.bw + 1) + (i - j)]
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut y = rhs.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let mut s = y[i];
            for k in lo..i {
                s -= self.at(i, k) * y[k];
            }
            y[i] = s / self.at(i, i);
        }
        for i in (0..self.n).rev() {
            let hi = (i + self.bw + 1).min(self.n);
            let mut s = y[i];
            for k in i + 1..hi {
                s -= self.at(k, i) * y[k];
            }
            y[i] = s / self.at(i, i);
        }
        y
    }

    /// Cheap condition estimate `(max L_ii / min L_ii)^2`.
    pub fn condition_estimate(&self) -> f64 {
        let (lo, hi) = (0..self.n).map(|i| self.at(i, i)).fold(
            (f64::INFINITY, 0.0f64),
            |(lo, hi), d| (lo.min(d), hi.max(d)),
        );
        (hi / lo).powi(2)
    }
}

/// Solves `A x = rhs` for SPD banded `A`; also returns the condition estimate.
pub fn solve_spd(a: &BandedSymMatrix, rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
    if rhs.len() != a.order() {
        return Err(Error::DimensionMismatch {
            expected: a.order(),
            found: rhs.len(),
        });
    }
    if a.bandwidth() == 0 {
        // diagonal: divide directly, avoiding the sqrt round trip
        if let Some(pivot) = a.data.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::NotPositiveDefinite { pivot });
        }
        let (lo, hi) = a
            .data
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        let x = rhs.iter().zip(&a.data).map(|(b, d)| b / d).collect();
        return Ok((x, hi / lo));
    }
    let chol = a.cholesky()?;
    Ok((chol.solve(rhs), chol.condition_estimate()))
}

/// Solution of a bordered (saddle point) system together with diagnostics.
#[derive(Debug, Clone)]
pub struct KktSolution {
    pub x: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub constraint_residual: f64,
    /// Ratio of extreme singular values of the (scaled) bordered matrix.
    pub condition: f64,
}

/// Solves `A x + Cᵀ λ = rhs`, `C x = crhs` by a dense LU of the bordered
/// matrix. With no constraints this is [`solve_spd`].
pub fn solve_kkt(
    a: &BandedSymMatrix,
    c: &DMatrix<f64>,
    rhs: &[f64],
    crhs: &[f64],
) -> Result<KktSolution> {
    if rhs.len() != a.order() {
        return Err(Error::DimensionMismatch {
            expected: a.order(),
            found: rhs.len(),
        });
    }
    if c.nrows() == 0 {
        let (x, condition) = solve_spd(a, rhs)?;
        return Ok(KktSolution {
            x,
            multipliers: Vec::new(),
            constraint_residual: 0.0,
            condition,
        });
    }
    solve_dense_kkt(&a.to_dense(), c, rhs, crhs)
}

/// Dense variant of [`solve_kkt`]; `A` symmetric positive semidefinite.
pub fn solve_dense_kkt(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    rhs: &[f64],
    crhs: &[f64],
) -> Result<KktSolution> {
    let n = a.nrows();
    let m = c.nrows();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    if c.ncols() != n || crhs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.ncols(),
        });
    }
    // Scale the border to the size of A so the pivots are balanced.
    let scale = if m == 0 {
        1.0
    } else {
        a.amax().max(f64::MIN_POSITIVE) / c.amax().max(f64::MIN_POSITIVE)
    };
    let mut k = DMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(a);
    for i in 0..m {
        for j in 0..n {
            k[(n + i, j)] = scale * c[(i, j)];
            k[(j, n + i)] = scale * c[(i, j)];
        }
    }
    let mut b = DVector::zeros(n + m);
    b.rows_mut(0, n).copy_from_slice(rhs);
    for i in 0..m {
        b[n + i] = scale * crhs[i];
    }
    let sv = k.clone().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if !(smin > 1e-13 * smax) {
        return Err(Error::SingularSystem(format!(
            "bordered system of order {} is rank deficient",
            n + m
        )));
    }
    let sol = k
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SingularSystem("LU breakdown".into()))?;
    let x: Vec<f64> = sol.rows(0, n).iter().copied().collect();
    let multipliers = sol.rows(n, m).iter().map(|v| v * scale).collect();
    let cx = c * DVector::from_column_slice(&x);
    let constraint_residual = (0..m).map(|i| (cx[i] - crhs[i]).abs()).fold(0.0, f64::max);
    Ok(KktSolution {
        x,
        multipliers,
        constraint_residual,
        condition: smax / smin,
    })
}
