//! Gauss rules on intervals and collapsed (Duffy) rules on simplices.

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(points: usize) -> Vec<(f64, f64)> {
    assert!(points >= 1);
    let n = points;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out.push((0.5 * (1.0 - z), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Quadrature rule on the reference simplex `{y >= 0, sum y <= 1}` in `R^dim`,
/// exact for polynomials of total degree `<= degree`.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    pub fn new(dim: usize, degree: usize) -> Self {
        if dim == 0 {
            return SimplexRule { dim, nodes: vec![vec![]], weights: vec![1.0] };
        }
        // The Duffy map raises the per-variable degree by at most dim - 1.
        let per_axis = (degree + dim).div_ceil(2).max(1);
        let gl = gauss_legendre(per_axis);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut idx = vec![0usize; dim];
        loop {
            let mut y = vec![0.0; dim];
            let mut remaining = 1.0;
            let mut w = 1.0;
            for k in 0..dim {
                let (t, wt) = gl[idx[k]];
                y[k] = remaining * t;
                w *= wt * remaining;
                remaining *= 1.0 - t;
            }
            nodes.push(y);
            weights.push(w);
            let mut k = 0;
            loop {
                if k == dim {
                    return SimplexRule { dim, nodes, weights };
                }
                idx[k] += 1;
                if idx[k] < per_axis {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Integrates `f` over the simplex with the given `dim + 1` vertices.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, vertices: &[Vec<f64>], mut f: F) -> f64 {
        debug_assert_eq!(vertices.len(), self.dim + 1);
        let jac = simplex_volume(vertices) * factorial(self.dim);
        let origin = &vertices[0];
        let mut point = vec![0.0; origin.len()];
        let mut total = 0.0;
        for (y, w) in self.nodes.iter().zip(&self.weights) {
            point.copy_from_slice(origin);
            for (k, yk) in y.iter().enumerate() {
                for (pt, (a, b)) in point.iter_mut().zip(vertices[k + 1].iter().zip(origin)) {
                    *pt += yk * (a - b);
                }
            }
            total += w * f(&point);
        }
        total * jac
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Lebesgue volume of the simplex spanned by `dim + 1` vertices in `R^dim`.
pub fn simplex_volume(vertices: &[Vec<f64>]) -> f64 {
    let dim = vertices.len() - 1;
    let mut mat: Vec<Vec<f64>> = (1..=dim)
        .map(|k| vertices[k].iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
        .collect();
    determinant(&mut mat).abs() / factorial(dim)
}

/// Determinant by partial-pivot elimination; consumes the matrix.
pub fn determinant(mat: &mut [Vec<f64>]) -> f64 {
    let n = mat.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))
            .unwrap();
        if mat[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            mat.swap(pivot, col);
            det = -det;
        }
        det *= mat[col][col];
        for row in col + 1..n {
            let factor = mat[row][col] / mat[col][col];
            for k in col..n {
                mat[row][k] -= factor * mat[col][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_monomials() {
        let rule = gauss_legendre(4);
        for k in 0..8 {
            let q: f64 = rule.iter().map(|(x, w)| w * x.powi(k)).sum();
            assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn simplex_rule_monomials_2d() {
        // int over triangle of y1^a y2^b = a! b! / (a + b + 2)!
        let rule = SimplexRule::new(2, 6);
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        for a in 0..4 {
            for b in 0..(7 - a) {
                let q = rule.integrate(&tri, |y| y[0].powi(a as i32) * y[1].powi(b as i32));
                let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                assert!((q - exact).abs() < 1e-14, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn simplex_rule_affine_image_3d() {
        let rule = SimplexRule::new(3, 2);
        let tet = vec![
            vec![1.0, 0.0, 0.0],
            vec![3.0, 0.0, 0.0],
            vec![1.0, 2.0, 0.0],
            vec![1.0, 0.0, 2.0],
        ];
        let vol = rule.integrate(&tet, |_| 1.0);
        assert!((vol - 8.0 / 6.0).abs() < 1e-13);
        assert!((simplex_volume(&tet) - 8.0 / 6.0).abs() < 1e-13);
    }
}
