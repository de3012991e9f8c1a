//! Dense linear algebra on small row-major matrices (n <= 35).

use crate::scalar::Real;

#[inline]
fn at(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// Lower-triangular Cholesky factor, `None` unless `a` is symmetric positive definite.
pub fn cholesky<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![T::zero(); n * n];
    for j in 0..n {
        let mut diag = a[at(n, j, j)];
        for k in 0..j {
            diag -= l[at(n, j, k)] * l[at(n, j, k)];
        }
        if !(diag > T::zero()) || !diag.is_finite() {
            return None;
        }
        let d = diag.sqrt();
        l[at(n, j, j)] = d;
        for i in j + 1..n {
            let mut s = a[at(n, i, j)];
            for k in 0..j {
                s -= l[at(n, i, k)] * l[at(n, j, k)];
            }
            l[at(n, i, j)] = s / d;
        }
    }
    Some(l)
}

/// Determinant by LU with partial pivoting.
pub fn det<T: Real>(a: &[T], n: usize) -> T {
    let mut m = a.to_vec();
    let mut d = T::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[at(n, x, c)].abs().partial_cmp(&m[at(n, y, c)].abs()).unwrap())
            .unwrap();
        if m[at(n, p, c)] == T::zero() {
            return T::zero();
        }
        if p != c {
            for j in 0..n {
                m.swap(at(n, p, j), at(n, c, j));
            }
            d = -d;
        }
        let piv = m[at(n, c, c)];
        d *= piv;
        for i in c + 1..n {
            let f = m[at(n, i, c)] / piv;
            if f != T::zero() {
                for j in c..n {
                    let v = m[at(n, c, j)];
                    m[at(n, i, j)] -= f * v;
                }
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan elimination, `None` for a singular matrix.
pub fn inverse<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut m = a.to_vec();
    let mut inv = identity::<T>(n);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[at(n, x, c)].abs().partial_cmp(&m[at(n, y, c)].abs()).unwrap())
            .unwrap();
        if m[at(n, p, c)] == T::zero() {
            return None;
        }
        if p != c {
            for j in 0..n {
                m.swap(at(n, p, j), at(n, c, j));
                inv.swap(at(n, p, j), at(n, c, j));
            }
        }
        let piv = m[at(n, c, c)];
        for j in 0..n {
            m[at(n, c, j)] /= piv;
            inv[at(n, c, j)] /= piv;
        }
        for i in 0..n {
            if i == c {
                continue;
            }
            let f = m[at(n, i, c)];
            if f != T::zero() {
                for j in 0..n {
                    let (mv, iv) = (m[at(n, c, j)], inv[at(n, c, j)]);
                    m[at(n, i, j)] -= f * mv;
                    inv[at(n, i, j)] -= f * iv;
                }
            }
        }
    }
    Some(inv)
}

/// Solves `a x = b`.
pub fn solve<T: Real>(a: &[T], b: &[T], n: usize) -> Option<Vec<T>> {
    let inv = inverse(a, n)?;
    Some(mat_vec(&inv, b, n, n))
}

pub fn identity<T: Real>(n: usize) -> Vec<T> {
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        m[at(n, i, i)] = T::one();
    }
    m
}

pub fn mat_vec<T: Real>(a: &[T], x: &[T], rows: usize, cols: usize) -> Vec<T> {
    (0..rows)
        .map(|i| (0..cols).map(|j| a[i * cols + j] * x[j]).sum())
        .collect()
}

pub fn mat_mul<T: Real>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut c = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[at(n, i, k)];
            for j in 0..n {
                c[at(n, i, j)] += aik * b[at(n, k, j)];
            }
        }
    }
    c
}

pub fn transpose<T: Real>(a: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut t = vec![T::zero(); rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = a[i * cols + j];
        }
    }
    t
}

/// Numerical rank by Gaussian elimination with full pivoting; pivots below
/// `rel_tol * max|a|` count as zero.
pub fn rank<T: Real>(a: &[T], rows: usize, cols: usize, rel_tol: T) -> usize {
    let mut m = a.to_vec();
    let scale = m.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    if scale == T::zero() {
        return 0;
    }
    let tol = rel_tol * scale;
    let mut r = 0;
    let mut used_col = vec![false; cols];
    for _ in 0..rows.min(cols) {
        let mut best = (T::zero(), 0, 0);
        for i in r..rows {
            for j in 0..cols {
                if !used_col[j] && m[i * cols + j].abs() > best.0 {
                    best = (m[i * cols + j].abs(), i, j);
                }
            }
        }
        if best.0 <= tol {
            break;
        }
        let (_, pi, pj) = best;
        for j in 0..cols {
            m.swap(pi * cols + j, r * cols + j);
        }
        used_col[pj] = true;
        let piv = m[r * cols + pj];
        for i in r + 1..rows {
            let f = m[i * cols + pj] / piv;
            for j in 0..cols {
                let v = m[r * cols + j];
                m[i * cols + j] -= f * v;
            }
        }
        r += 1;
    }
    r
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &[T], n: usize) -> Vec<T> {
    let mut m = a.to_vec();
    let two = T::lit(2.0);
    for _sweep in 0..64 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[at(n, i, j)] * m[at(n, i, j)])
            .sum();
        if off.sqrt() <= T::tiny() * T::lit(1e-2) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[at(n, p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[at(n, q, q)] - m[at(n, p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[at(n, k, p)], m[at(n, k, q)]);
                    m[at(n, k, p)] = c * mkp - s * mkq;
                    m[at(n, k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[at(n, p, k)], m[at(n, q, k)]);
                    m[at(n, p, k)] = c * mpk - s * mqk;
                    m[at(n, q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[at(n, i, i)]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}
