use nalgebra::DMatrix;

use crate::scalar::Real;

/// b-norm of a covariant 2-tensor given the frame `f` (columns).
pub fn norm2<T: Real>(f: &DMatrix<T>, a: &DMatrix<T>) -> T {
    (f.transpose() * a * f).norm()
}

/// b-norm of `t[k][(i, j)]`.
pub fn norm3<T: Real>(f: &DMatrix<T>, t: &[DMatrix<T>]) -> T {
    let inner: Vec<DMatrix<T>> = t.iter().map(|m| f.transpose() * m * f).collect();
    let n = f.nrows();
    let mut s = T::zero();
    for a in 0..n {
        let mut acc = DMatrix::zeros(n, n);
        for k in 0..n {
            acc += &inner[k] * f[(k, a)];
        }
        s += acc.norm_squared();
    }
    s.sqrt()
}

/// b-norm of `t[m][k][(i, j)]`.
pub fn norm4<T: Real>(f: &DMatrix<T>, t: &[Vec<DMatrix<T>>]) -> T {
    let n = f.nrows();
    let mut s = T::zero();
    for a in 0..n {
        let mixed: Vec<DMatrix<T>> = (0..n)
            .map(|k| {
                let mut acc = DMatrix::zeros(n, n);
                for m in 0..n {
                    acc += &t[m][k] * f[(m, a)];
                }
                acc
            })
            .collect();
        let v = norm3(f, &mixed);
        s += v * v;
    }
    s.sqrt()
}
