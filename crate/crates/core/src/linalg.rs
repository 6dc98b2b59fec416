//! Dense exact linear algebra over any [`FieldCtx`].

use crate::field::FieldCtx;

pub type Matrix<E> = Vec<Vec<E>>;

/// Brings `rows` to reduced row echelon form in place and returns the pivot
/// columns. Pivots are the first nonzero entry scanning columns left to
/// right, so the result is deterministic.
pub fn rref<F: FieldCtx>(f: &F, rows: &mut Matrix<F::E>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| !f.is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(next, found);
        let inv = f.inv(&rows[next][col]);
        for v in rows[next].iter_mut().skip(col) {
            *v = f.mul(v, &inv);
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || f.is_zero(&row[col]) {
                continue;
            }
            let factor = row[col].clone();
            for c in col..ncols {
                if !f.is_zero(&pivot_row[c]) {
                    row[c] = f.sub(&row[c], &f.mul(&factor, &pivot_row[c]));
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// Row echelon form without back substitution; cheaper when only the rank
/// is needed.
fn echelon<F: FieldCtx>(f: &F, rows: &mut Matrix<F::E>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut next = 0;
    for col in 0..ncols {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| !f.is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(next, found);
        let inv = f.inv(&rows[next][col]);
        let (head, tail) = rows.split_at_mut(next + 1);
        let pivot_row = &head[next];
        for row in tail.iter_mut() {
            if f.is_zero(&row[col]) {
                continue;
            }
            let factor = f.mul(&row[col], &inv);
            for c in col..ncols {
                if !f.is_zero(&pivot_row[c]) {
                    row[c] = f.sub(&row[c], &f.mul(&factor, &pivot_row[c]));
                }
            }
        }
        next += 1;
    }
    next
}

pub fn rank<F: FieldCtx>(f: &F, mat: &Matrix<F::E>) -> usize {
    let mut rows = mat.clone();
    echelon(f, &mut rows)
}

/// Basis of `{v : mat * v = 0}`, one vector per free column, each with a 1
/// in its free column and 0 in the other free columns.
pub fn nullspace<F: FieldCtx>(f: &F, mat: &Matrix<F::E>, ncols: usize) -> Vec<Vec<F::E>> {
    let mut rows = mat.clone();
    let pivots = if rows.is_empty() {
        Vec::new()
    } else {
        rref(f, &mut rows)
    };
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![f.zero(); ncols];
        v[free] = f.one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(&rows[r][free]);
        }
        basis.push(v);
    }
    basis
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen
/// greedily in input order.
pub fn independent_subset<F: FieldCtx>(f: &F, vectors: &[Vec<F::E>]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    // echelon rows with their pivot column
    let mut basis: Vec<(usize, Vec<F::E>)> = Vec::new();
    for (n, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (col, row) in &basis {
            if f.is_zero(&w[*col]) {
                continue;
            }
            let factor = w[*col].clone();
            for (c, x) in row.iter().enumerate().skip(*col) {
                if !f.is_zero(x) {
                    w[c] = f.sub(&w[c], &f.mul(&factor, x));
                }
            }
        }
        if let Some(col) = w.iter().position(|x| !f.is_zero(x)) {
            let inv = f.inv(&w[col]);
            for x in w.iter_mut() {
                *x = f.mul(x, &inv);
            }
            basis.push((col, w));
            kept.push(n);
        }
    }
    kept
}

/// Determinant by elimination.
pub fn determinant<F: FieldCtx>(f: &F, mat: &Matrix<F::E>) -> F::E {
    let n = mat.len();
    let mut rows = mat.clone();
    let mut det = f.one();
    for col in 0..n {
        let Some(found) = (col..n).find(|&r| !f.is_zero(&rows[r][col])) else {
            return f.zero();
        };
        if found != col {
            rows.swap(col, found);
            det = f.neg(&det);
        }
        det = f.mul(&det, &rows[col][col]);
        let inv = f.inv(&rows[col][col]);
        let (head, tail) = rows.split_at_mut(col + 1);
        let pivot_row = &head[col];
        for row in tail.iter_mut() {
            if f.is_zero(&row[col]) {
                continue;
            }
            let factor = f.mul(&row[col], &inv);
            for c in col..n {
                row[c] = f.sub(&row[c], &f.mul(&factor, &pivot_row[c]));
            }
        }
    }
    det
}

/// Solves `mat * x = rhs` for a square nonsingular `mat`.
pub fn solve<F: FieldCtx>(f: &F, mat: &Matrix<F::E>, rhs: &[F::E]) -> Option<Vec<F::E>> {
    let n = mat.len();
    let mut aug: Matrix<F::E> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(r, &c)| r != c) {
        return None;
    }
    Some(
        aug.into_iter()
            .map(|mut r| r.pop().expect("augmented column"))
            .collect(),
    )
}

pub fn mat_vec<F: FieldCtx>(f: &F, mat: &Matrix<F::E>, v: &[F::E]) -> Vec<F::E> {
    mat.iter()
        .map(|row| {
            row.iter().zip(v).fold(f.zero(), |acc, (a, b)| {
                if f.is_zero(a) || f.is_zero(b) {
                    acc
                } else {
                    f.add(&acc, &f.mul(a, b))
                }
            })
        })
        .collect()
}
