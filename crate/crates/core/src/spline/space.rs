use super::knots::KnotSequence;
use crate::error::{Error, Result};

/// Splines of degree `p` and smoothness `C^k` on a knot sequence, realized
/// by B-splines on an open extended knot vector (end multiplicity `p+1`,
/// interior multiplicity `p-k`).
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    knots: KnotSequence,
    degree: usize,
    smoothness: i32,
    vector: Vec<f64>,
}

impl SplineSpace {
    pub fn new(knots: KnotSequence, degree: usize, smoothness: i32) -> Result<Self> {
        if smoothness < -1 || smoothness > degree as i32 - 1 {
            return Err(Error::InvalidSmoothness {
                p: degree,
                k: smoothness,
            });
        }
        let mult = (degree as i32 - smoothness) as usize;
        let mut vector = Vec::with_capacity(2 * (degree + 1) + mult * knots.n_interior());
        vector.extend(std::iter::repeat_n(knots.a(), degree + 1));
        for &x in knots.interior() {
            vector.extend(std::iter::repeat_n(x, mult));
        }
        vector.extend(std::iter::repeat_n(knots.b(), degree + 1));
        Ok(Self {
            knots,
            degree,
            smoothness,
            vector,
        })
    }

    /// Maximal smoothness space `S_{p,Ξ}`.
    pub fn maximal(knots: KnotSequence, degree: usize) -> Result<Self> {
        Self::new(knots, degree, degree as i32 - 1)
    }

    pub fn knots(&self) -> &KnotSequence {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn smoothness(&self) -> i32 {
        self.smoothness
    }

    pub fn is_maximally_smooth(&self) -> bool {
        self.smoothness == self.degree as i32 - 1
    }

    /// Interior knot multiplicity `p - k`.
    pub fn multiplicity(&self) -> usize {
        (self.degree as i32 - self.smoothness) as usize
    }

    /// Extended (open) knot vector.
    pub fn knot_vector(&self) -> &[f64] {
        &self.vector
    }

    /// `N(p-k) + p + 1`.
    pub fn dim(&self) -> usize {
        self.knots.n_interior() * self.multiplicity() + self.degree + 1
    }

    pub fn a(&self) -> f64 {
        self.knots.a()
    }

    pub fn b(&self) -> f64 {
        self.knots.b()
    }

    /// Index of the first basis function active on element `j`.
    pub fn first_active(&self, element: usize) -> usize {
        element * self.multiplicity()
    }

    /// Greville abscissae (knot averages); the point itself for `p = 0`.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        if p == 0 {
            return self
                .vector
                .windows(2)
                .map(|w| 0.5 * (w[0] + w[1]))
                .collect();
        }
        (0..self.dim())
            .map(|i| self.vector[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    /// Space of derivatives: degree `p-1`, smoothness `k-1`.
    pub fn derivative_space(&self) -> Result<Self> {
        if self.degree == 0 || self.smoothness < 0 {
            return Err(Error::precondition(
                "continuous-space",
                "derivative space needs p >= 1 and k >= 0",
            ));
        }
        Self::new(self.knots.clone(), self.degree - 1, self.smoothness - 1)
    }

    pub fn with_break(&self, x: f64) -> Result<Self> {
        Self::new(self.knots.with_break(x)?, self.degree, self.smoothness)
    }

    /// Derivatives `0..=d` of the `p+1` basis functions active on `x`.
    ///
    /// Returns the index of the first active function and `ders[o][j]`, the
    /// `o`-th derivative of basis function `first + j`. Interior break points
    /// use the right limit, `b` uses the last element.
    pub fn eval_basis_derivs(&self, x: f64, d: usize) -> Result<(usize, Vec<Vec<f64>>)> {
        let elem = self.knots.element_of(x)?;
        self.eval_on_element(elem, x, d)
    }

    /// Basis derivatives of the polynomial pieces on element `elem`,
    /// evaluated at `x` (which may lie on the element boundary; this gives
    /// one-sided limits).
    pub fn eval_on_element(&self, elem: usize, x: f64, d: usize) -> Result<(usize, Vec<Vec<f64>>)> {
        if d > self.degree {
            return Err(Error::DerivativeOrder {
                order: d,
                max: self.degree,
            });
        }
        let span = self.degree + elem * self.multiplicity();
        Ok((
            span - self.degree,
            basis_derivatives(&self.vector, span, self.degree, x, d),
        ))
    }

    /// Values of the `d`-th derivative of the active basis functions at `x`.
    pub fn eval_basis(&self, x: f64, d: usize) -> Result<(usize, Vec<f64>)> {
        let (first, mut ders) = self.eval_basis_derivs(x, d)?;
        Ok((first, ders.swap_remove(d)))
    }

    /// Dense row of the `d`-th derivative of all basis functions at `x`.
    pub fn basis_row(&self, x: f64, d: usize) -> Result<Vec<f64>> {
        let (first, vals) = self.eval_basis(x, d)?;
        let mut row = vec![0.0; self.dim()];
        row[first..first + vals.len()].copy_from_slice(&vals);
        Ok(row)
    }
}

/// Cox–de Boor evaluation of all nonzero basis functions and their
/// derivatives up to `n` on knot span `span` (`t[span] <= x < t[span+1]`).
pub(crate) fn basis_derivatives(t: &[f64], span: usize, p: usize, x: f64, n: usize) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    let mut ders = vec![vec![0.0; p + 1]; n + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=n.min(p) {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                let rk = rk as usize;
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for (k, row) in ders.iter_mut().enumerate().skip(1) {
        if k > p {
            row.iter_mut().for_each(|v| *v = 0.0);
            continue;
        }
        row.iter_mut().for_each(|v| *v *= factor);
        factor *= (p - k) as f64;
    }
    ders
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize, p: usize, k: i32) -> SplineSpace {
        SplineSpace::new(KnotSequence::uniform(0.0, 1.0, n).unwrap(), p, k).unwrap()
    }

    /// Counts B-splines of an open knot vector as `len - p - 1`.
    fn brute_dimension(s: &SplineSpace) -> usize {
        s.knot_vector().len() - s.degree() - 1
    }

    #[test]
    fn dimension_examples() {
        let s = space(3, 2, 1);
        assert_eq!(s.dim(), 6);
        assert_eq!(brute_dimension(&s), 6);
        assert_eq!(space(3, 2, -1).dim(), 12);
        for p in 1..6 {
            assert_eq!(space(0, p, p as i32 - 1).dim(), p + 1);
        }
    }

    #[test]
    fn dimension_formula_grid() {
        for n in 0..=8 {
            for p in 0..=6usize {
                for k in -1..p as i32 {
                    let s = space(n, p, k);
                    let expected = n * (p as i32 - k) as usize + p + 1;
                    assert_eq!(s.dim(), expected, "N={n} p={p} k={k}");
                    assert_eq!(brute_dimension(&s), expected);
                }
            }
        }
    }

    #[test]
    fn invalid_smoothness() {
        let knots = KnotSequence::uniform(0.0, 1.0, 2).unwrap();
        assert!(matches!(
            SplineSpace::new(knots.clone(), 2, 2),
            Err(Error::InvalidSmoothness { p: 2, k: 2 })
        ));
        assert!(SplineSpace::new(knots, 2, -2).is_err());
    }

    #[test]
    fn endpoint_interpolation() {
        for (p, k) in [(0, -1), (1, 0), (3, 1), (4, 3)] {
            let s = space(3, p, k);
            let (first, v) = s.eval_basis(0.0, 0).unwrap();
            assert_eq!(first, 0);
            assert_eq!(v[0], 1.0);
            assert!(v[1..].iter().all(|&x| x == 0.0));
            let (first, v) = s.eval_basis(1.0, 0).unwrap();
            assert_eq!(first + v.len(), s.dim());
            assert!((v[v.len() - 1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_domain() {
        let s = space(2, 2, 1);
        assert!(matches!(
            s.eval_basis(1.5, 0),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(s.eval_basis(0.5, 3).is_err());
    }

    #[test]
    fn linear_hat_values() {
        let s = space(1, 1, 0);
        let (first, v) = s.eval_basis(0.25, 0).unwrap();
        assert_eq!(first, 0);
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);
        let (_, d) = s.eval_basis(0.25, 1).unwrap();
        assert!((d[0] + 2.0).abs() < 1e-14 && (d[1] - 2.0).abs() < 1e-14);
    }
}
