//! Dense tensor algebra: unfoldings and mode contractions.
//!
//! Index convention: within an unfolding, earlier modes in each ordered list
//! vary slowest, so unfoldings are bit-reproducible re-indexings.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{decode_index, row_major_strides, JointTensor, TensorKind};

/// Matricization of a tensor along an ordered bipartition of its modes.
#[derive(Debug, Clone)]
pub struct Unfolding {
    pub row_modes: Vec<usize>,
    pub col_modes: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

/// Reshapes `t` into a matrix whose rows enumerate `row_modes` and whose
/// columns enumerate `col_modes`. The two lists must partition the modes.
pub fn unfold(t: &JointTensor, row_modes: &[usize], col_modes: &[usize]) -> Result<Unfolding> {
    let d = t.order();
    let mut seen = vec![false; d];
    for &j in row_modes.iter().chain(col_modes) {
        if j >= d || seen[j] {
            return Err(Error::ModePartitionError(format!(
                "mode {j} repeated or out of range for order {d}"
            )));
        }
        seen[j] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::ModePartitionError(format!(
            "row modes {row_modes:?} and col modes {col_modes:?} do not cover all {d} modes"
        )));
    }
    let nrows: usize = row_modes.iter().map(|&j| t.shape[j]).product();
    let ncols: usize = col_modes.iter().map(|&j| t.shape[j]).product();
    let strides = row_major_strides(&t.shape);
    let mut matrix = DMatrix::zeros(nrows.max(1), ncols.max(1));
    let mut idx = vec![0usize; d];
    for (lin, &v) in t.values.iter().enumerate() {
        decode_index(lin, &strides, &mut idx);
        let mut r = 0usize;
        for &j in row_modes {
            r = r * t.shape[j] + idx[j];
        }
        let mut c = 0usize;
        for &j in col_modes {
            c = c * t.shape[j] + idx[j];
        }
        matrix[(r, c)] = v;
    }
    Ok(Unfolding {
        row_modes: row_modes.to_vec(),
        col_modes: col_modes.to_vec(),
        matrix,
    })
}

/// Contracts mode `mode` against the weight vector `w`, producing an
/// order `d - 1` tensor. With all-ones weights this is marginalization.
pub fn mode_contract(t: &JointTensor, mode: usize, w: &[f64]) -> Result<JointTensor> {
    let d = t.order();
    if mode >= d {
        return Err(Error::IndexOutOfRange(format!(
            "mode {mode} out of range for order {d}"
        )));
    }
    if w.len() != t.shape[mode] {
        return Err(Error::LengthMismatch(format!(
            "weight vector has {} entries, mode {mode} has support {}",
            w.len(),
            t.shape[mode]
        )));
    }
    let out_shape: Vec<usize> = t
        .shape
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != mode)
        .map(|(_, &n)| n)
        .collect();
    let strides = row_major_strides(&t.shape);
    let out_strides = row_major_strides(&out_shape);
    let mut values = vec![0.0; out_shape.iter().product::<usize>().max(1)];
    let mut idx = vec![0usize; d];
    for (lin, &v) in t.values.iter().enumerate() {
        decode_index(lin, &strides, &mut idx);
        let mut out = 0usize;
        let mut pos = 0usize;
        for (j, &x) in idx.iter().enumerate() {
            if j != mode {
                out += x * out_strides[pos];
                pos += 1;
            }
        }
        values[out] += w[idx[mode]] * v;
    }
    Ok(JointTensor {
        shape: out_shape,
        values,
        kind: t.kind,
        sample_size: t.sample_size,
    })
}

/// Flattens `t` into a vector enumerating `modes` with the unfolding's
/// ordering convention (earlier modes vary slowest).
pub fn vectorize(t: &JointTensor, modes: &[usize]) -> Result<Vec<f64>> {
    let cols: Vec<usize> = (0..t.order()).filter(|j| !modes.contains(j)).collect();
    if !cols.is_empty() {
        return Err(Error::ModePartitionError(
            "vectorize requires all modes".into(),
        ));
    }
    let unf = unfold(t, modes, &[])?;
    Ok(unf.matrix.column(0).iter().copied().collect())
}

/// Tensor L2 norm (Frobenius norm of any unfolding).
pub fn l2_norm(t: &JointTensor) -> f64 {
    t.values.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(shape: Vec<usize>, values: Vec<f64>) -> JointTensor {
        JointTensor {
            shape,
            values,
            kind: TensorKind::Exact,
            sample_size: None,
        }
    }

    fn t2x2() -> JointTensor {
        exact(vec![2, 2], vec![0.1, 0.2, 0.3, 0.4])
    }

    #[test]
    fn two_by_two_unfolds_to_itself() {
        let u = unfold(&t2x2(), &[0], &[1]).unwrap();
        assert_eq!(u.matrix.shape(), (2, 2));
        assert_eq!(u.matrix[(0, 0)], 0.1);
        assert_eq!(u.matrix[(0, 1)], 0.2);
        assert_eq!(u.matrix[(1, 0)], 0.3);
        assert_eq!(u.matrix[(1, 1)], 0.4);
        // transposed split
        let ut = unfold(&t2x2(), &[1], &[0]).unwrap();
        assert_eq!(ut.matrix[(1, 0)], 0.2);
    }

    #[test]
    fn unfold_requires_partition() {
        assert!(matches!(
            unfold(&t2x2(), &[0], &[0]),
            Err(Error::ModePartitionError(_))
        ));
        assert!(matches!(
            unfold(&t2x2(), &[0], &[]),
            Err(Error::ModePartitionError(_))
        ));
    }

    #[test]
    fn unfold_preserves_l2_norm() {
        let t = exact(vec![2, 3, 2], (1..=12).map(|x| x as f64 / 78.0).collect());
        for (rows, cols) in [
            (vec![0], vec![1, 2]),
            (vec![0, 1], vec![2]),
            (vec![2, 0], vec![1]),
        ] {
            let u = unfold(&t, &rows, &cols).unwrap();
            assert!((u.matrix.norm() - l2_norm(&t)).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_one_tensor_unfolds_to_rank_one() {
        let a = [0.2, 0.8];
        let b = [0.5, 0.25, 0.25];
        let c = [0.9, 0.1];
        let mut values = Vec::new();
        for &x in &a {
            for &y in &b {
                for &z in &c {
                    values.push(x * y * z);
                }
            }
        }
        let t = exact(vec![2, 3, 2], values);
        for (rows, cols) in [(vec![0], vec![1, 2]), (vec![1, 0], vec![2])] {
            let u = unfold(&t, &rows, &cols).unwrap();
            let svd = u.matrix.svd(false, false);
            assert!(svd.singular_values[1] < 1e-14);
        }
    }

    #[test]
    fn contraction_with_ones_is_marginalization() {
        let t = exact(vec![2, 3], vec![0.1, 0.05, 0.15, 0.3, 0.2, 0.2]);
        let c = mode_contract(&t, 1, &[1.0, 1.0, 1.0]).unwrap();
        let m = t.marginalize(&[0]).unwrap();
        assert_eq!(c.values, m.values);
    }

    #[test]
    fn contraction_is_linear_in_weights() {
        let t = exact(vec![2, 3], vec![0.1, 0.05, 0.15, 0.3, 0.2, 0.2]);
        let w1 = [0.3, 0.7, 0.1];
        let w2 = [0.2, 0.4, 0.9];
        let combo: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let lhs = mode_contract(&t, 1, &combo).unwrap();
        let c1 = mode_contract(&t, 1, &w1).unwrap();
        let c2 = mode_contract(&t, 1, &w2).unwrap();
        for i in 0..lhs.values.len() {
            let rhs = 2.0 * c1.values[i] - 0.5 * c2.values[i];
            assert!((lhs.values[i] - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weights_give_zero_tensor() {
        let t = exact(vec![2, 2], vec![0.1, 0.2, 0.3, 0.4]);
        let c = mode_contract(&t, 0, &[0.0, 0.0]).unwrap();
        assert!(c.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn weight_length_must_match_support() {
        let t = t2x2();
        assert!(matches!(
            mode_contract(&t, 0, &[1.0, 1.0, 1.0]),
            Err(Error::LengthMismatch(_))
        ));
    }
}
