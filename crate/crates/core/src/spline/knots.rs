use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Strictly increasing break points `a = ξ_0 < ξ_1 < … < ξ_{N+1} = b`.
///
/// Elements are `[ξ_j, ξ_{j+1})` for `j < N` and the last one is closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct KnotSequence {
    breaks: Vec<f64>,
}

impl KnotSequence {
    pub fn new(breaks: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 || breaks.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBreakpoints);
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBreakpoints);
        }
        Ok(Self { breaks })
    }

    /// `n_interior + 2` equispaced break points on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n_interior: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidDomain { a, b });
        }
        let m = n_interior + 1;
        let breaks = (0..=m)
            .map(|j| {
                if j == m {
                    b
                } else {
                    a + (b - a) * j as f64 / m as f64
                }
            })
            .collect();
        Self::new(breaks)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn a(&self) -> f64 {
        self.breaks[0]
    }

    pub fn b(&self) -> f64 {
        self.breaks[self.breaks.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.b() - self.a()
    }

    /// Number of interior break points `N`.
    pub fn n_interior(&self) -> usize {
        self.breaks.len() - 2
    }

    pub fn n_elements(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn interior(&self) -> &[f64] {
        &self.breaks[1..self.breaks.len() - 1]
    }

    pub fn element(&self, j: usize) -> (f64, f64) {
        (self.breaks[j], self.breaks[j + 1])
    }

    pub fn elements(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breaks.windows(2).map(|w| (w[0], w[1]))
    }

    /// Maximal spacing `h`.
    pub fn h(&self) -> f64 {
        self.elements().map(|(l, r)| r - l).fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        self.elements().map(|(l, r)| r - l).fold(f64::INFINITY, f64::min)
    }

    /// Maximal spacing with the first and last intervals doubled.
    pub fn h_hat(&self) -> f64 {
        let last = self.n_elements() - 1;
        self.elements()
            .enumerate()
            .map(|(j, (l, r))| {
                if j == 0 || j == last {
                    2.0 * (r - l)
                } else {
                    r - l
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a() && x <= self.b()
    }

    /// Element index of `x` under the half-open convention.
    pub fn element_of(&self, x: f64) -> Result<usize> {
        if !self.contains(x) {
            return Err(Error::OutOfDomain {
                x,
                a: self.a(),
                b: self.b(),
            });
        }
        let j = self.breaks.partition_point(|&t| t <= x);
        Ok(j.saturating_sub(1).min(self.n_elements() - 1))
    }

    /// The same sequence with one additional break point.
    pub fn with_break(&self, x: f64) -> Result<Self> {
        let mut breaks = self.breaks.clone();
        let pos = breaks.partition_point(|&t| t < x);
        breaks.insert(pos, x);
        Self::new(breaks)
    }

    /// Sequence with `x ↦ a + b - x` applied (used for reversed edges).
    pub fn reversed(&self) -> Self {
        let (a, b) = (self.a(), self.b());
        let breaks = self.breaks.iter().rev().map(|&t| a + b - t).collect();
        Self { breaks }
    }
}

impl TryFrom<Vec<f64>> for KnotSequence {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<KnotSequence> for Vec<f64> {
    fn from(k: KnotSequence) -> Self {
        k.breaks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_examples() {
        let k = KnotSequence::uniform(0.0, 1.0, 3).unwrap();
        assert_eq!(k.breaks(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(k.h(), 0.25);

        let k = KnotSequence::uniform(0.0, 2.0, 0).unwrap();
        assert_eq!(k.breaks(), &[0.0, 2.0]);
        assert_eq!(k.h(), 2.0);
        assert_eq!(k.h_hat(), 4.0);

        let k = KnotSequence::uniform(0.0, 1.0, 1).unwrap();
        assert_eq!(k.h(), 0.5);
        assert_eq!(k.h_hat(), 1.0);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(matches!(
            KnotSequence::uniform(1.0, 1.0, 2),
            Err(Error::InvalidDomain { .. })
        ));
        assert!(KnotSequence::uniform(f64::NAN, 1.0, 2).is_err());
        assert!(KnotSequence::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
    }

    #[test]
    fn h_hat_on_nonuniform() {
        let k = KnotSequence::new(vec![0.0, 0.1, 0.5, 0.6, 1.0]).unwrap();
        assert!((k.h() - 0.4).abs() < 1e-15);
        assert!((k.h_min() - 0.1).abs() < 1e-15);
        // max{0.2, 0.4, 0.1, 0.8}
        assert!((k.h_hat() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn element_lookup_is_half_open() {
        let k = KnotSequence::uniform(0.0, 1.0, 3).unwrap();
        assert_eq!(k.element_of(0.0).unwrap(), 0);
        assert_eq!(k.element_of(0.25).unwrap(), 1);
        assert_eq!(k.element_of(0.2499).unwrap(), 0);
        assert_eq!(k.element_of(1.0).unwrap(), 3);
        assert!(k.element_of(1.0 + 1e-12).is_err());
    }
}
