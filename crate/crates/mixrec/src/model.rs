//! Finite-support mixtures of product measures.
//!
//! A model is a mixture of `m` product distributions over `d` finite supports:
//! the joint mass at `(x_1, ..., x_d)` is `sum_k pi_k * prod_j f_kj(x_j)`.
//! This module builds exact joint tensors, draws i.i.d. samples, and
//! constructs the standard example families plus the non-identifiable
//! binomial pair used as a negative control.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of dense tensor cells.
pub const DEFAULT_CELL_BUDGET: u128 = 100_000_000;

const SIMPLEX_TOL: f64 = 1e-12;

/// Ground-truth mixture model: mixing weights and per-coordinate component PMFs.
///
/// `components[j]` is an `m x N_j` matrix stored row-wise: row `k` is the PMF
/// of coordinate `j` conditional on latent component `k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub m: usize,
    pub d: usize,
    pub supports: Vec<usize>,
    pub pi: Vec<f64>,
    pub components: Vec<Vec<Vec<f64>>>,
}

/// Whether a tensor holds exact model probabilities or empirical frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    Exact,
    Empirical,
}

/// Dense nonnegative tensor over finite supports, total mass 1.
///
/// Values are stored row-major with coordinate 0 varying slowest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointTensor {
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    pub kind: TensorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<u64>,
}

/// An i.i.d. sample of support indices, one row per observation.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub n: u64,
    pub d: usize,
    pub supports: Vec<usize>,
    pub rows: Vec<u32>,
    pub seed: u64,
}

fn is_pmf(row: &[f64]) -> std::result::Result<(), String> {
    if let Some(x) = row.iter().find(|x| **x < 0.0 || !x.is_finite()) {
        return Err(format!("entry {x} is negative or not finite"));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(format!("sums to {sum}, expected 1"));
    }
    Ok(())
}

impl MixtureSpec {
    /// Checks all structural invariants: simplex weights, PMF rows, shapes.
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::ShapeMismatch(format!(
                "need at least 2 components, got {}",
                self.m
            )));
        }
        if self.d < 1 {
            return Err(Error::ShapeMismatch("need at least 1 coordinate".into()));
        }
        if self.supports.len() != self.d || self.components.len() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "d = {} but supports has {} entries and components {}",
                self.d,
                self.supports.len(),
                self.components.len()
            )));
        }
        if self.pi.len() != self.m {
            return Err(Error::ShapeMismatch(format!(
                "m = {} but pi has {} entries",
                self.m,
                self.pi.len()
            )));
        }
        is_pmf(&self.pi).map_err(Error::SimplexViolation)?;
        for (j, (rows, &n)) in self.components.iter().zip(&self.supports).enumerate() {
            if n < 2 {
                return Err(Error::ShapeMismatch(format!(
                    "support size at coordinate {j} must be >= 2, got {n}"
                )));
            }
            if rows.len() != self.m {
                return Err(Error::ShapeMismatch(format!(
                    "coordinate {j} has {} rows, expected m = {}",
                    rows.len(),
                    self.m
                )));
            }
            for (k, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::ShapeMismatch(format!(
                        "component {k} at coordinate {j} has {} entries, expected {n}",
                        row.len()
                    )));
                }
                is_pmf(row)
                    .map_err(|e| Error::PmfViolation(format!("component {k}, coordinate {j}: {e}")))?;
            }
        }
        Ok(())
    }

    /// Conditional i.i.d. model: every coordinate shares the same component PMFs.
    pub fn conditional_iid(base: &[Vec<f64>], pi: &[f64], d: usize) -> Result<Self> {
        let m = base.len();
        for (k, row) in base.iter().enumerate() {
            is_pmf(row).map_err(|e| Error::PmfViolation(format!("row {k}: {e}")))?;
        }
        let n = base.first().map(|r| r.len()).unwrap_or(0);
        let spec = MixtureSpec {
            m,
            d,
            supports: vec![n; d],
            pi: pi.to_vec(),
            components: vec![base.to_vec(); d],
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Bernoulli mixture: coordinate `j` of component `k` is `Bern(alpha[k][j])`.
    pub fn bernoulli(alpha: &[Vec<f64>], pi: &[f64]) -> Result<Self> {
        let m = alpha.len();
        let d = alpha.first().map(|r| r.len()).unwrap_or(0);
        let mut components = vec![Vec::with_capacity(m); d];
        for (k, row) in alpha.iter().enumerate() {
            if row.len() != d {
                return Err(Error::ShapeMismatch(format!(
                    "alpha row {k} has {} entries, expected {d}",
                    row.len()
                )));
            }
            for (j, &a) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::RangeViolation(format!(
                        "alpha[{k}][{j}] = {a} outside [0, 1]"
                    )));
                }
                components[j].push(vec![1.0 - a, a]);
            }
        }
        let spec = MixtureSpec {
            m,
            d,
            supports: vec![2; d],
            pi: pi.to_vec(),
            components,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Exact joint probability tensor under the default cell budget.
    pub fn joint_tensor(&self) -> Result<JointTensor> {
        self.joint_tensor_with_budget(DEFAULT_CELL_BUDGET)
    }

    /// Exact joint probability tensor; entry `(x_1, ..., x_d)` is
    /// `sum_k pi_k * prod_j f_kj(x_j)`.
    pub fn joint_tensor_with_budget(&self, budget: u128) -> Result<JointTensor> {
        self.validate()?;
        let cells: u128 = self.supports.iter().map(|&n| n as u128).product();
        if cells > budget {
            return Err(Error::CapacityExceeded { cells, budget });
        }
        let total = cells as usize;
        let mut values = vec![0.0; total];
        // accumulate pi_k * outer(f_k1, ..., f_kd) by repeated Kronecker expansion
        for k in 0..self.m {
            let mut acc = vec![self.pi[k]];
            for j in 0..self.d {
                let row = &self.components[j][k];
                let mut next = Vec::with_capacity(acc.len() * row.len());
                for &a in &acc {
                    for &b in row {
                        next.push(a * b);
                    }
                }
                acc = next;
            }
            for (v, a) in values.iter_mut().zip(&acc) {
                *v += a;
            }
        }
        Ok(JointTensor {
            shape: self.supports.clone(),
            values,
            kind: TensorKind::Exact,
            sample_size: None,
        })
    }

    /// Draws `n` i.i.d. rows: latent component by inverse CDF over `pi`, then
    /// each coordinate by inverse CDF over its component PMF. Deterministic
    /// given `seed`.
    pub fn sample(&self, n: u64, seed: u64) -> Result<Dataset> {
        self.validate()?;
        if n < 1 {
            return Err(Error::RangeViolation("need n >= 1 samples".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity((n as usize) * self.d);
        for _ in 0..n {
            let k = inverse_cdf(&self.pi, rng.random::<f64>());
            for j in 0..self.d {
                rows.push(inverse_cdf(&self.components[j][k], rng.random::<f64>()) as u32);
            }
        }
        Ok(Dataset {
            n,
            d: self.d,
            supports: self.supports.clone(),
            rows,
            seed,
        })
    }

    /// Streams the same draws as [`MixtureSpec::sample`] directly into an
    /// empirical tensor, without materializing the rows.
    pub fn sample_empirical(&self, n: u64, seed: u64) -> Result<JointTensor> {
        self.validate()?;
        if n < 1 {
            return Err(Error::RangeViolation("need n >= 1 samples".into()));
        }
        let cells: u128 = self.supports.iter().map(|&n| n as u128).product();
        if cells > DEFAULT_CELL_BUDGET {
            return Err(Error::CapacityExceeded {
                cells,
                budget: DEFAULT_CELL_BUDGET,
            });
        }
        let mut counts = vec![0u64; cells as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..n {
            let k = inverse_cdf(&self.pi, rng.random::<f64>());
            let mut lin = 0usize;
            for j in 0..self.d {
                let x = inverse_cdf(&self.components[j][k], rng.random::<f64>());
                lin = lin * self.supports[j] + x;
            }
            counts[lin] += 1;
        }
        Ok(JointTensor {
            shape: self.supports.clone(),
            values: counts.iter().map(|&c| c as f64 / n as f64).collect(),
            kind: TensorKind::Empirical,
            sample_size: Some(n),
        })
    }
}

fn inverse_cdf(pmf: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (i, &p) in pmf.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    pmf.len() - 1
}

/// Two distinct binomial-type mixtures with identical joint distributions.
///
/// For component count `m >= 3` and a scale `c` with `c * (2m - 1) <= 1`,
/// returns conditional-i.i.d. Bernoulli mixtures on `d = 2m - 2` coordinates
/// whose joint tensors agree entrywise while the component sets differ. The
/// mixing weights are even/odd binomial coefficient slices of `2^(2m-2)`.
pub fn binomial_counterexample(m: usize, c: f64) -> Result<(MixtureSpec, MixtureSpec)> {
    if m < 3 {
        return Err(Error::RangeViolation(format!("need m >= 3, got {m}")));
    }
    if !(c > 0.0) || c * (2 * m - 1) as f64 > 1.0 {
        return Err(Error::RangeViolation(format!(
            "need 0 < c with c*(2m-1) <= 1, got c = {c}"
        )));
    }
    let d = 2 * m - 2;
    let norm = 2f64.powi(2 * m as i32 - 2);
    let mut pi = Vec::with_capacity(m);
    let mut pi_tilde = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    for k in 1..=m {
        pi.push(binomial(2 * m - 1, 2 * k - 2) / norm);
        pi_tilde.push(binomial(2 * m - 1, 2 * k - 1) / norm);
        alpha.push(vec![c * (2 * k - 2) as f64; d]);
        beta.push(vec![c * (2 * k - 1) as f64; d]);
    }
    Ok((
        MixtureSpec::bernoulli(&alpha, &pi)?,
        MixtureSpec::bernoulli(&beta, &pi_tilde)?,
    ))
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

impl Dataset {
    /// Empirical joint tensor: cell value is `count / n`.
    pub fn empirical_tensor(&self, shape: &[usize]) -> Result<JointTensor> {
        if shape.len() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "dataset has {} coordinates, shape has {}",
                self.d,
                shape.len()
            )));
        }
        let cells: usize = shape.iter().product();
        let mut counts = vec![0u64; cells];
        for row in self.rows.chunks_exact(self.d) {
            let mut lin = 0usize;
            for (j, &x) in row.iter().enumerate() {
                if x as usize >= shape[j] {
                    return Err(Error::IndexOutOfRange(format!(
                        "index {x} at coordinate {j} with support {}",
                        shape[j]
                    )));
                }
                lin = lin * shape[j] + x as usize;
            }
            counts[lin] += 1;
        }
        Ok(JointTensor {
            shape: shape.to_vec(),
            values: counts.iter().map(|&c| c as f64 / self.n as f64).collect(),
            kind: TensorKind::Empirical,
            sample_size: Some(self.n),
        })
    }
}

impl JointTensor {
    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total mass.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Value at a multi-index.
    pub fn at(&self, idx: &[usize]) -> f64 {
        let mut lin = 0usize;
        for (j, &x) in idx.iter().enumerate() {
            lin = lin * self.shape[j] + x;
        }
        self.values[lin]
    }

    /// Sums out every coordinate not in `keep`; `keep` uses 0-based
    /// coordinate indices and the kept coordinates preserve their order.
    pub fn marginalize(&self, keep: &[usize]) -> Result<JointTensor> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let d = self.order();
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        if keep_sorted.len() != keep.len() || *keep_sorted.last().unwrap() >= d {
            return Err(Error::IndexOutOfRange(format!(
                "keep set {keep:?} invalid for a tensor of order {d}"
            )));
        }
        let out_shape: Vec<usize> = keep_sorted.iter().map(|&j| self.shape[j]).collect();
        let strides = row_major_strides(&self.shape);
        let out_strides = row_major_strides(&out_shape);
        let mut values = vec![0.0; out_shape.iter().product()];
        let mut idx = vec![0usize; d];
        for (lin, &v) in self.values.iter().enumerate() {
            decode_index(lin, &strides, &mut idx);
            let mut out = 0usize;
            for (pos, &j) in keep_sorted.iter().enumerate() {
                out += idx[j] * out_strides[pos];
            }
            values[out] += v;
        }
        Ok(JointTensor {
            shape: out_shape,
            values,
            kind: self.kind,
            sample_size: self.sample_size,
        })
    }
}

pub(crate) fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; shape.len()];
    for j in (0..shape.len().saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * shape[j + 1];
    }
    strides
}

pub(crate) fn decode_index(mut lin: usize, strides: &[usize], out: &mut [usize]) {
    for (o, &s) in out.iter_mut().zip(strides) {
        *o = lin / s;
        lin %= s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sim1_base() -> Vec<Vec<f64>> {
        vec![
            vec![0.25, 0.25, 0.25, 0.25],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![0.5, 0.5, 0.0, 0.0],
        ]
    }

    fn sim1() -> MixtureSpec {
        MixtureSpec::conditional_iid(&sim1_base(), &[0.2, 0.3, 0.5], 5).unwrap()
    }

    #[test]
    fn sim1_is_valid() {
        sim1().validate().unwrap();
    }

    #[test]
    fn bad_pi_is_simplex_violation() {
        let mut spec = sim1();
        spec.pi = vec![0.5, 0.6, -0.1];
        assert!(matches!(spec.validate(), Err(Error::SimplexViolation(_))));
        spec.pi = vec![0.5, 0.6];
        assert!(matches!(spec.validate(), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn bad_row_is_pmf_violation() {
        let mut spec = sim1();
        spec.components[2][1] = vec![0.5, 0.6, -0.1, 0.0];
        assert!(matches!(spec.validate(), Err(Error::PmfViolation(_))));
    }

    #[test]
    fn joint_entry_matches_hand_sum() {
        // 0.2*(1/4)^5 + 0.3*(1/2)^5 at the all-3 cell; f3 vanishes there
        let t = sim1().joint_tensor().unwrap();
        let expect = 0.2 * 0.25f64.powi(5) + 0.3 * 0.5f64.powi(5);
        assert!((t.at(&[3, 3, 3, 3, 3]) - expect).abs() < 1e-15);
        assert!((t.at(&[3, 3, 3, 3, 3]) - 0.0095703125).abs() < 1e-12);
        assert!((t.sum() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_component_joint_is_outer_product() {
        let spec = MixtureSpec {
            m: 2,
            d: 2,
            supports: vec![2, 3],
            pi: vec![1.0, 0.0],
            components: vec![
                vec![vec![0.3, 0.7], vec![0.5, 0.5]],
                vec![vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 0.0]],
            ],
        };
        let t = spec.joint_tensor().unwrap();
        for a in 0..2 {
            for b in 0..3 {
                let expect = spec.components[0][0][a] * spec.components[1][0][b];
                assert!((t.at(&[a, b]) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cell_budget_is_enforced() {
        let spec = sim1();
        assert!(matches!(
            spec.joint_tensor_with_budget(100),
            Err(Error::CapacityExceeded { cells: 1024, .. })
        ));
    }

    #[test]
    fn marginal_matches_mixture_of_rows() {
        let t = sim1().joint_tensor().unwrap();
        let marg = t.marginalize(&[0]).unwrap();
        let expect = [0.3, 0.3, 0.2, 0.2];
        for (got, want) in marg.values.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
        // keeping everything is the identity
        let id = t.marginalize(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(id.values, t.values);
        assert!(matches!(t.marginalize(&[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn counterexample_m3_matches_closed_form() {
        let (a, b) = binomial_counterexample(3, 0.1).unwrap();
        let expect_pi = [1.0 / 16.0, 10.0 / 16.0, 5.0 / 16.0];
        let expect_pi_tilde = [5.0 / 16.0, 10.0 / 16.0, 1.0 / 16.0];
        for k in 0..3 {
            assert!((a.pi[k] - expect_pi[k]).abs() < 1e-15);
            assert!((b.pi[k] - expect_pi_tilde[k]).abs() < 1e-15);
            assert!((a.components[0][k][1] - 0.2 * k as f64).abs() < 1e-15);
            assert!((b.components[0][k][1] - (0.1 + 0.2 * k as f64)).abs() < 1e-15);
        }
        assert_eq!(a.d, 4);
    }

    #[test]
    fn counterexample_joints_coincide() {
        for (m, c) in [(3, 0.1), (4, 0.05), (5, 0.05)] {
            let (a, b) = binomial_counterexample(m, c).unwrap();
            let ta = a.joint_tensor().unwrap();
            let tb = b.joint_tensor().unwrap();
            let max_diff = ta
                .values
                .iter()
                .zip(&tb.values)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(max_diff < 1e-12, "m = {m}: joints differ by {max_diff}");
        }
    }

    #[test]
    fn alternating_binomial_moment_sums_vanish() {
        // sum_k C(5,k) (-1)^k k^s = 0 for s = 0..=4, with 0^0 = 1
        for s in 0..=4u32 {
            let total: f64 = (0..=5u32)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let pow = if s == 0 { 1.0 } else { (k as f64).powi(s as i32) };
                    binomial(5, k as usize) * sign * pow
                })
                .sum();
            assert!(total.abs() < 1e-9, "s = {s}: sum = {total}");
        }
    }

    #[test]
    fn counterexample_rejects_infeasible_scale() {
        assert!(matches!(
            binomial_counterexample(3, 0.3),
            Err(Error::RangeViolation(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = sim1();
        let a = spec.sample(500, 9).unwrap();
        let b = spec.sample(500, 9).unwrap();
        assert_eq!(a.rows, b.rows);
        let c = spec.sample(500, 10).unwrap();
        assert_ne!(a.rows, c.rows);
    }

    #[test]
    fn point_mass_component_sampling() {
        let alpha = vec![vec![0.0; 3], vec![0.0; 3]];
        let spec = MixtureSpec::bernoulli(&alpha, &[0.5, 0.5]).unwrap();
        let data = spec.sample(10, 3).unwrap();
        assert!(data.rows.iter().all(|&x| x == 0));
        let t = spec.joint_tensor().unwrap();
        assert!((t.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_tensor_counts_cells() {
        let data = Dataset {
            n: 4,
            d: 2,
            supports: vec![2, 2],
            rows: vec![0, 0, 0, 0, 1, 1, 0, 1],
            seed: 0,
        };
        let t = data.empirical_tensor(&[2, 2]).unwrap();
        assert_eq!(t.values, vec![0.5, 0.25, 0.0, 0.25]);
        assert_eq!(t.sum(), 1.0);
        assert_eq!(t.sample_size, Some(4));
    }

    #[test]
    fn empirical_tensor_rejects_out_of_range() {
        let data = Dataset {
            n: 1,
            d: 2,
            supports: vec![2, 2],
            rows: vec![0, 5],
            seed: 0,
        };
        assert!(matches!(
            data.empirical_tensor(&[2, 2]),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn streamed_counts_match_materialized_sample() {
        let spec = sim1();
        let data = spec.sample(2000, 77).unwrap();
        let dense = data.empirical_tensor(&spec.supports).unwrap();
        let streamed = spec.sample_empirical(2000, 77).unwrap();
        assert_eq!(dense.values, streamed.values);
    }

    #[test]
    fn empirical_marginal_approaches_mixture() {
        // law of large numbers at n = 2^20, seed fixed: TV below 5e-3
        let spec = sim1();
        let t = spec.sample_empirical(1 << 20, 4242).unwrap();
        let marg = t.marginalize(&[0]).unwrap();
        let expect = [0.3, 0.3, 0.2, 0.2];
        let tv: f64 = marg
            .values
            .iter()
            .zip(expect)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 5e-3, "tv = {tv}");
    }

    #[test]
    fn bernoulli_alpha_out_of_range() {
        let alpha = vec![vec![0.5, 1.2], vec![0.1, 0.2]];
        assert!(matches!(
            MixtureSpec::bernoulli(&alpha, &[0.5, 0.5]),
            Err(Error::RangeViolation(_))
        ));
    }

    #[test]
    fn marginalizing_empirical_commutes_with_dataset_marginal() {
        let spec = sim1();
        let data = spec.sample(3000, 5).unwrap();
        let t = data.empirical_tensor(&spec.supports).unwrap();
        let marg = t.marginalize(&[1, 3]).unwrap();
        // count the projected dataset directly
        let proj = Dataset {
            n: data.n,
            d: 2,
            supports: vec![4, 4],
            rows: data
                .rows
                .chunks_exact(5)
                .flat_map(|r| [r[1], r[3]])
                .collect(),
            seed: data.seed,
        };
        let direct = proj.empirical_tensor(&[4, 4]).unwrap();
        for (a, b) in marg.values.iter().zip(&direct.values) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
