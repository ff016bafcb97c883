use crate::error::{Error, Result};
use crate::tensor::ClsSequence;

/// Temporally weighted cosine distances between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Cosine of two unit vectors, clamped to `[-1, 1]`.
pub(crate) fn unit_cosine(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0)
}

/// `W(i, j) = (1 - <v_i, v_j>) * |t_i - t_j| / N` off the diagonal, 1 on it.
pub fn temporal_distance_matrix(cls: &ClsSequence) -> Result<DistanceMatrix> {
    if cls.len() < 2 {
        return Err(Error::Input(format!(
            "need ≥ 2 frames to cluster, got {}",
            cls.len()
        )));
    }
    Ok(weighted_distances(
        cls.vectors(),
        cls.dim(),
        &cls.timestamps(),
        cls.len() as f64,
    ))
}

/// Distances between arbitrary unit-norm nodes with real-valued timestamps,
/// normalized by the original frame count `n_frames`.
pub(crate) fn weighted_distances(
    features: &[f64],
    dim: usize,
    timestamps: &[f64],
    n_frames: f64,
) -> DistanceMatrix {
    let n = timestamps.len();
    let mut values = vec![1.0; n * n];
    for i in 0..n {
        let vi = &features[i * dim..(i + 1) * dim];
        for j in (i + 1)..n {
            let vj = &features[j * dim..(j + 1) * dim];
            let w = (1.0 - unit_cosine(vi, vj)) * (timestamps[i] - timestamps[j]).abs() / n_frames;
            values[i * n + j] = w;
            values[j * n + i] = w;
        }
    }
    DistanceMatrix { n, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(rows: &[&[f64]]) -> ClsSequence {
        let dim = rows[0].len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        ClsSequence::from_rows(rows.len(), dim, &flat).unwrap()
    }

    #[test]
    fn diagonal_is_one() {
        let w = temporal_distance_matrix(&seq(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]])).unwrap();
        for i in 0..3 {
            assert_eq!(w.get(i, i), 1.0);
        }
    }

    #[test]
    fn identical_vectors_are_zero_apart() {
        let w = temporal_distance_matrix(&seq(&[&[0.3, 0.4], &[0.3, 0.4]])).unwrap();
        assert_eq!(w.get(0, 1), 0.0);
    }

    #[test]
    fn orthogonal_two_steps_apart() {
        // t = 1 and t = 3 of N = 4.
        let w = temporal_distance_matrix(&seq(&[&[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 1.0]]))
            .unwrap();
        assert!((w.get(0, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_frame_rejected() {
        assert!(matches!(
            temporal_distance_matrix(&seq(&[&[1.0]])),
            Err(Error::Input(_))
        ));
    }
}
