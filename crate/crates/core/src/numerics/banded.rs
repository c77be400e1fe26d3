use super::Real;
use crate::error::{domain, Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals, solved by LU
/// with partial pivoting.
///
/// Row `i` stores columns `i - kl ..= i + kl + ku`; the extra `kl` columns
/// hold fill-in created by row exchanges.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![T::zero(); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.kl + self.ku {
            return None;
        }
        Some(i * self.width + (j + self.kl - i))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |k| self.data[k])
    }

    /// Adds `v` to entry `(i, j)`; fails if the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: T) -> Result<()> {
        if j > i + self.ku {
            return Err(domain(format!("entry ({i}, {j}) outside the declared band")));
        }
        let k = self.slot(i, j).ok_or_else(|| domain(format!("entry ({i}, {j}) outside the declared band")))?;
        self.data[k] += v;
        Ok(())
    }

    pub fn set_row_zero(&mut self, i: usize) {
        let start = i * self.width;
        self.data[start..start + self.width].iter_mut().for_each(|x| *x = T::zero());
    }

    pub fn mul_vec(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.kl + self.ku).min(self.n - 1);
            *yi = (lo..=hi).map(|j| self.get(i, j) * x[j]).fold(T::zero(), |a, b| a + b);
        }
    }

    /// Factorizes a copy and solves for each right-hand side.
    pub fn solve_many(&self, rhs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut b: Vec<Vec<T>> = rhs.to_vec();
        let w = self.width;
        let kl = self.kl;
        let idx = |i: usize, j: usize| i * w + (j + kl - i);
        let mut scale = T::zero();
        for v in &a {
            scale = scale.max(v.abs());
        }
        let tiny = scale * T::epsilon() * T::epsilon();
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a[idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = a[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            let last_col = (k + kl + self.ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    a.swap(idx(k, j), idx(p, j));
                }
                for bb in b.iter_mut() {
                    bb.swap(k, p);
                }
            }
            let piv = a[idx(k, k)];
            for i in k + 1..=last_row {
                let f = a[idx(i, k)] / piv;
                if f == T::zero() {
                    continue;
                }
                a[idx(i, k)] = T::zero();
                for j in k + 1..=last_col {
                    let u = a[idx(k, j)];
                    a[idx(i, j)] -= f * u;
                }
                for bb in b.iter_mut() {
                    let bk = bb[k];
                    bb[i] -= f * bk;
                }
            }
        }
        for bb in b.iter_mut() {
            for i in (0..n).rev() {
                let last_col = (i + kl + self.ku).min(n - 1);
                let mut acc = bb[i];
                for j in i + 1..=last_col {
                    acc -= a[idx(i, j)] * bb[j];
                }
                bb[i] = acc / a[idx(i, i)];
            }
        }
        Ok(b)
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        Ok(self.solve_many(&[rhs.to_vec()])?.remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_with_pivoting() {
        // A zero leading entry forces a row exchange.
        let mut m = BandedMatrix::<f64>::zeros(4, 1, 1);
        let entries = [
            (0, 0, 0.0),
            (0, 1, 2.0),
            (1, 0, 1.0),
            (1, 1, 1.0),
            (1, 2, 3.0),
            (2, 1, 4.0),
            (2, 2, 1.0),
            (2, 3, 1.0),
            (3, 2, 1.0),
            (3, 3, 5.0),
        ];
        for (i, j, v) in entries {
            m.add(i, j, v).unwrap();
        }
        let x = [1.0, -1.0, 2.0, 0.5];
        let mut b = [0.0; 4];
        m.mul_vec(&x, &mut b);
        let y = m.solve(&b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_detected() {
        let mut m = BandedMatrix::<f64>::zeros(2, 1, 1);
        m.add(0, 0, 1.0).unwrap();
        m.add(0, 1, 1.0).unwrap();
        m.add(1, 0, 1.0).unwrap();
        m.add(1, 1, 1.0).unwrap();
        assert!(m.solve(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn out_of_band_rejected() {
        let mut m = BandedMatrix::<f64>::zeros(5, 1, 1);
        assert!(m.add(0, 3, 1.0).is_err());
    }
}
