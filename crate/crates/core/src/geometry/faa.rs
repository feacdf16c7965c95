use crate::error::{Error, Result};

/// Exponential partial Bell polynomial `B_{r,j}(x_1, …, x_{r-j+1})` by the
/// recurrence `B_{r,j} = (1/j) Σ_{i=j-1}^{r-1} C(r,i) x_{r-i} B_{i,j-1}`.
///
/// `x[m-1]` holds `x_m`; entries past `r-j+1` are ignored.
pub fn bell(r: usize, j: usize, x: &[f64]) -> Result<f64> {
    if j > r {
        return Err(Error::precondition("bell-index", format!("need j <= r, got r = {r}, j = {j}")));
    }
    if j > 0 && x.len() < r - j + 1 {
        return Err(Error::precondition(
            "bell-index",
            format!("B_{{{r},{j}}} needs {} arguments, got {}", r - j + 1, x.len()),
        ));
    }
    // table[i][l] = B_{i,l}
    let mut table = vec![vec![0.0; j + 1]; r + 1];
    table[0][0] = 1.0;
    for l in 1..=j {
        for i in l..=r {
            let mut binom = 1.0;
            let mut acc = 0.0;
            // binom runs through C(i, m) for m = 0..i
            for m in 0..i {
                if m >= l - 1 && i - m <= x.len() {
                    acc += binom * x[i - m - 1] * table[m][l - 1];
                }
                binom *= (i - m) as f64 / (m + 1) as f64;
            }
            table[i][l] = acc / l as f64;
        }
    }
    Ok(table[r][j])
}

/// All `r × d` arrays `k[m-1][c] >= 0` with column sums `j[c]` and
/// `Σ_m m (k[m-1][0] + ⋯ + k[m-1][d-1]) = r`.
///
/// Empty when `j` has the wrong length or `|j|` is not in `1..=r`.
pub fn faa_index_set(r: usize, j: &[usize], d: usize) -> Vec<Vec<Vec<usize>>> {
    let total: usize = j.iter().sum();
    if j.len() != d || total == 0 || total > r {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut k = vec![vec![0; d]; r];
    let mut rem = j.to_vec();
    fill(0, r, d, &mut rem, r, &mut k, &mut out);
    out
}

fn fill(
    cell: usize,
    r: usize,
    d: usize,
    rem: &mut [usize],
    weight: usize,
    k: &mut [Vec<usize>],
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    if cell == r * d {
        if weight == 0 && rem.iter().all(|&v| v == 0) {
            out.push(k.to_vec());
        }
        return;
    }
    let (m, c) = (cell / d + 1, cell % d);
    for v in 0..=rem[c].min(weight / m) {
        k[m - 1][c] = v;
        rem[c] -= v;
        fill(cell + 1, r, d, rem, weight - m * v, k, out);
        rem[c] += v;
    }
    k[m - 1][c] = 0;
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// The Faà di Bruno coefficient
/// `Σ_{k ∈ I(r,j)} r! Π_m Π_c (g[m-1][c])^{k_{m,c}} / (k_{m,c}! (m!)^{k_{m,c}})`,
/// where `g[m-1][c]` is the `m`-th derivative of component `c` along the
/// chosen direction.
pub fn faa_coefficient(set: &[Vec<Vec<usize>>], r: usize, g: &[Vec<f64>]) -> f64 {
    let rf = factorial(r);
    set.iter()
        .map(|k| {
            let mut term = rf;
            for (m, row) in k.iter().enumerate() {
                let mf = factorial(m + 1);
                for (c, &e) in row.iter().enumerate() {
                    if e > 0 {
                        term *= (g[m][c] / mf).powi(e as i32) / factorial(e);
                    }
                }
            }
            term
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_cases() {
        let x = [2.0, 3.0, 5.0];
        assert_eq!(bell(1, 1, &x).unwrap(), 2.0);
        assert_eq!(bell(2, 1, &x).unwrap(), 3.0);
        assert_eq!(bell(2, 2, &x).unwrap(), 4.0);
        assert_eq!(bell(3, 1, &x).unwrap(), 5.0);
        assert_eq!(bell(3, 2, &x).unwrap(), 18.0);
        assert_eq!(bell(3, 3, &x).unwrap(), 8.0);
        assert_eq!(bell(0, 0, &[]).unwrap(), 1.0);
        assert_eq!(bell(3, 0, &x).unwrap(), 0.0);
    }

    #[test]
    fn all_ones_gives_stirling_numbers() {
        // B_{r,j}(1, …, 1) = S(r, j)
        let ones = [1.0; 8];
        assert_eq!(bell(5, 2, &ones).unwrap(), 15.0);
        assert_eq!(bell(6, 3, &ones).unwrap(), 90.0);
        assert_eq!(bell(7, 4, &ones).unwrap(), 350.0);
    }

    #[test]
    fn index_errors() {
        assert!(bell(2, 3, &[1.0]).is_err());
        assert!(bell(4, 2, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn small_index_sets() {
        assert_eq!(faa_index_set(1, &[1, 0], 2), vec![vec![vec![1, 0]]]);
        assert_eq!(faa_index_set(2, &[1, 1], 2), vec![vec![vec![1, 1], vec![0, 0]]]);
        assert!(faa_index_set(2, &[0, 0], 2).is_empty());
        assert!(faa_index_set(2, &[2, 1], 2).is_empty());
        // d = 1, r = 3, j = 2: only k = (1, 1, 0)
        assert_eq!(faa_index_set(3, &[2], 1), vec![vec![vec![1], vec![1], vec![0]]]);
    }

    #[test]
    fn mixed_product_coefficient() {
        let set = faa_index_set(2, &[1, 1], 2);
        let g = vec![vec![3.0, 7.0], vec![0.0, 0.0]];
        assert_eq!(faa_coefficient(&set, 2, &g), 2.0 * 3.0 * 7.0);
    }

    #[test]
    fn d1_assembly_matches_recurrence() {
        let x = [0.7, -1.3, 2.1, 0.4, -0.9, 1.6];
        for r in 1..=6 {
            for j in 1..=r {
                let g: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
                let a = faa_coefficient(&faa_index_set(r, &[j], 1), r, &g);
                let b = bell(r, j, &x).unwrap();
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "r={r} j={j}: {a} vs {b}");
            }
        }
    }
}
