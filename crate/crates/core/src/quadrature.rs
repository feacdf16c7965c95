use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights transplanted to `[l, r]`.
    pub fn mapped(&self, l: f64, r: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (r - l);
        let mid = 0.5 * (r + l);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    /// `∫_l^r f` by this rule.
    pub fn integrate(&self, l: f64, r: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(l, r).map(|(x, w)| w * f(x)).sum()
    }
}

/// Legendre polynomial `P_n(t)` and its derivative.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * t * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule, `1 <= n <= 64`, by Newton iteration on
/// `P_n` from Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if !(1..=64).contains(&n) {
        return Err(Error::QuadratureOrder(n));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, t);
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Value of the Legendre polynomial of degree `n` shifted to `[a, b]`.
pub fn shifted_legendre(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let t = (2.0 * x - a - b) / (b - a);
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return 1.0;
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * t * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules() {
        let g = gauss_legendre(1).unwrap();
        assert_eq!(g.nodes(), &[0.0]);
        assert_eq!(g.weights(), &[2.0]);

        let g = gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((g.nodes()[0] + s).abs() < 1e-15 && (g.nodes()[1] - s).abs() < 1e-15);
        assert!(g.weights().iter().all(|w| (w - 1.0).abs() < 1e-15));
        assert!((g.integrate(-1.0, 1.0, |x| x * x) - 2.0 / 3.0).abs() <= 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(gauss_legendre(0), Err(Error::QuadratureOrder(0)));
        assert!(gauss_legendre(65).is_err());
        assert!(gauss_legendre(64).is_ok());
    }

    #[test]
    fn monomial_exactness() {
        for n in 1..=16 {
            let g = gauss_legendre(n).unwrap();
            assert!((g.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
            assert!(g.weights().iter().all(|&w| w > 0.0));
            for deg in 0..2 * n {
                let approx = g.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg + 1) as f64 };
                assert!(
                    (approx - exact).abs() <= 1e-14 * exact.abs().max(1.0),
                    "n={n} deg={deg}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn large_rule_weights_sum() {
        let g = gauss_legendre(64).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn shifted_legendre_orthogonal() {
        let g = gauss_legendre(8).unwrap();
        let ip = g.integrate(0.2, 1.7, |x| {
            shifted_legendre(2, 0.2, 1.7, x) * shifted_legendre(3, 0.2, 1.7, x)
        });
        assert!(ip.abs() < 1e-15);
        assert_eq!(shifted_legendre(4, 0.0, 1.0, 1.0), 1.0);
    }
}
