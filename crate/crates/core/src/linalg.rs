//! Small dense helpers for subspaces of R³.

use nalgebra::{Matrix3, Vector3};

/// Absolute singular-value cutoff for numerical rank (order-1 inputs).
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis of the column space of `m`.
pub fn column_space(m: &Matrix3<f64>, tol: f64) -> Vec<Vector3<f64>> {
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let mut idx: Vec<usize> = (0..3).filter(|&i| svd.singular_values[i] > tol).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    idx.into_iter().map(|i| u.column(i).into_owned()).collect()
}

/// Orthonormal basis of the span of `vectors`.
pub fn span(vectors: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let mut m = Matrix3::zeros();
    for (j, v) in vectors.iter().take(3).enumerate() {
        m.set_column(j, v);
    }
    if vectors.len() > 3 {
        // Gram matrix route keeps the 3x3 shape: span(V) = colspace(V V^T).
        m = vectors.iter().map(|v| v * v.transpose()).sum();
    }
    column_space(&m, tol_for(vectors))
}

fn tol_for(vectors: &[Vector3<f64>]) -> f64 {
    let scale = vectors.iter().map(|v| v.amax()).fold(1.0_f64, f64::max);
    RANK_TOL * scale
}

/// Numerical rank of a family of vectors.
pub fn rank(vectors: &[Vector3<f64>]) -> usize {
    span(vectors).len()
}

/// Orthonormal basis of the orthogonal complement of an orthonormal family.
pub fn orthogonal_complement(basis: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let proj: Matrix3<f64> = basis.iter().map(|b| b * b.transpose()).sum();
    column_space(&(Matrix3::identity() - proj), 0.5)
}

/// Orthonormal basis of the kernel of `m`.
pub fn kernel(m: &Matrix3<f64>) -> Vec<Vector3<f64>> {
    let rows: Vec<Vector3<f64>> = (0..3).map(|i| m.row(i).transpose()).collect();
    orthogonal_complement(&span(&rows))
}

/// Any unit vector orthogonal to `v`.
pub fn any_orthogonal(v: &Vector3<f64>) -> Vector3<f64> {
    let axis = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        Vector3::x()
    } else if v[1].abs() <= v[2].abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    v.cross(&axis).normalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_dims() {
        let b = span(&[Vector3::new(1.0, 1.0, 0.0)]);
        assert_eq!(b.len(), 1);
        let c = orthogonal_complement(&b);
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!(v.dot(&b[0]).abs() < 1e-15);
        }
        assert_eq!(orthogonal_complement(&[]).len(), 3);
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let k = kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(v[2].abs() < 1e-15);
        }
    }

    #[test]
    fn rank_of_dependent_family() {
        let a = Vector3::new(1.0, 2.0, 3.0);
        assert_eq!(rank(&[a, 2.0 * a, Vector3::zeros()]), 1);
        assert_eq!(rank(&[a, Vector3::x(), a + Vector3::x()]), 2);
    }
}
