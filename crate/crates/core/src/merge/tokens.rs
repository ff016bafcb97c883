use crate::error::{Error, Result};

/// Live tokens of one frame during merging.
///
/// `sizes[i]` counts the source patches folded into token `i` and
/// `provenance[i]` lists them (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSet {
    dim: usize,
    values: Vec<f64>,
    sizes: Vec<usize>,
    provenance: Vec<Vec<usize>>,
}

impl TokenSet {
    /// Fresh set of unmerged tokens: size 1, provenance `{i}`.
    pub fn from_values(values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || !values.len().is_multiple_of(dim) {
            return Err(Error::Input(format!(
                "{} values do not split into tokens of dimension {dim}",
                values.len()
            )));
        }
        let n = values.len() / dim;
        Ok(Self {
            dim,
            values,
            sizes: vec![1; n],
            provenance: (0..n).map(|i| vec![i]).collect(),
        })
    }

    pub fn from_f32(values: &[f32], dim: usize) -> Result<Self> {
        Self::from_values(values.iter().map(|&v| v as f64).collect(), dim)
    }

    pub(crate) fn from_parts(dim: usize, values: Vec<f64>, sizes: Vec<usize>, provenance: Vec<Vec<usize>>) -> Self {
        debug_assert_eq!(values.len(), sizes.len() * dim);
        debug_assert_eq!(sizes.len(), provenance.len());
        Self {
            dim,
            values,
            sizes,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn token(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn provenance(&self) -> &[Vec<usize>] {
        &self.provenance
    }

    /// Values rounded to f32, row-major.
    pub fn to_f32(&self) -> Vec<f32> {
        self.values.iter().map(|&v| v as f32).collect()
    }

    /// Checks that provenance partitions `0..source_count` and agrees with sizes.
    pub fn check_provenance(&self, source_count: usize) -> Result<()> {
        let mut seen = vec![false; source_count];
        for (i, (set, &size)) in self.provenance.iter().zip(&self.sizes).enumerate() {
            if set.len() != size {
                return Err(Error::Validation(format!(
                    "token {i} has size {size} but {} provenance entries",
                    set.len()
                )));
            }
            for &src in set {
                match seen.get_mut(src) {
                    Some(slot) if !*slot => *slot = true,
                    Some(_) => return Err(Error::Validation(format!("source patch {src} appears twice"))),
                    None => return Err(Error::Validation(format!("source patch {src} out of range"))),
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Validation(format!("source patch {missing} is not covered")));
        }
        Ok(())
    }
}
