/// Householder QR of a tall matrix held as columns.
///
/// After [`Qr::decompose`], `r` holds the upper-triangular factor and the
/// reflectors have been applied to the right-hand side, so the least-squares
/// solution follows by back substitution.
pub(crate) struct Qr {
    /// R, row-major, `cols × cols`.
    pub r: Vec<Vec<f64>>,
    /// First `cols` entries of Qᵀy.
    pub qty: Vec<f64>,
}

impl Qr {
    pub fn decompose(columns: &[Vec<f64>], y: &[f64]) -> Qr {
        let m = columns.len();
        let n = y.len();
        let mut a: Vec<Vec<f64>> = columns.to_vec();
        let mut b = y.to_vec();

        for k in 0..m {
            let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let alpha = if a[k][k] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = a[k][k..].to_vec();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            for col in a.iter_mut().skip(k) {
                let dot: f64 = v.iter().zip(&col[k..]).map(|(p, q)| p * q).sum();
                let s = 2.0 * dot / vnorm2;
                for (x, vi) in col[k..].iter_mut().zip(&v) {
                    *x -= s * vi;
                }
            }
            let dot: f64 = v.iter().zip(&b[k..]).map(|(p, q)| p * q).sum();
            let s = 2.0 * dot / vnorm2;
            for (x, vi) in b[k..n].iter_mut().zip(&v) {
                *x -= s * vi;
            }
        }

        let r = (0..m)
            .map(|i| (0..m).map(|j| if j >= i { a[j][i] } else { 0.0 }).collect())
            .collect();
        Qr {
            r,
            qty: b[..m].to_vec(),
        }
    }

    /// Solves R x = rhs by back substitution.
    pub fn solve_upper(&self, rhs: &[f64]) -> Vec<f64> {
        let m = rhs.len();
        let mut x = vec![0.0; m];
        for i in (0..m).rev() {
            let s: f64 = (i + 1..m).map(|j| self.r[i][j] * x[j]).sum();
            x[i] = (rhs[i] - s) / self.r[i][i];
        }
        x
    }

    /// Rows of R⁻¹ (so `(XᵀX)⁻¹ = R⁻¹ R⁻ᵀ`).
    pub fn r_inverse(&self) -> Vec<Vec<f64>> {
        let m = self.r.len();
        let mut inv = vec![vec![0.0; m]; m];
        for (j, unit) in (0..m).map(|j| {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            (j, e)
        }) {
            let col = self.solve_upper(&unit);
            for i in 0..m {
                inv[i][j] = col[i];
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        // [[2,1],[1,3]] x = [3,5] → x = (0.8, 1.4)
        let cols = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let qr = Qr::decompose(&cols, &[3.0, 5.0]);
        let x = qr.solve_upper(&qr.qty);
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn r_inverse_times_r_is_identity() {
        let cols = vec![
            vec![1.0, 1.0, 1.0, 1.0],
            vec![0.0, 1.0, 2.0, 4.0],
            vec![1.0, 0.0, 3.0, 1.0],
        ];
        let qr = Qr::decompose(&cols, &[0.0; 4]);
        let inv = qr.r_inverse();
        for (i, row) in qr.r.iter().enumerate() {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| row[k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }
}
