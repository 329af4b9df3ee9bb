use crate::error::{Error, Result};

/// Ordered tensor product of labelled factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    factors: Vec<(String, usize)>,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if factors.is_empty() {
            return Err(Error::invalid("factors", "at least one factor required"));
        }
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::invalid("factors", format!("factor `{label}` has dimension 0")));
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::invalid("factors", format!("duplicate label `{label}`")));
            }
        }
        Ok(Self { factors })
    }

    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new([(label, dim)])
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|(_, d)| d).product()
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|(l, _)| l == label)
    }

    /// Flat basis index of a product state given one index per factor.
    pub fn basis_index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                found: digits.len(),
            });
        }
        let mut idx = 0;
        for (d, (label, dim)) in digits.iter().zip(&self.factors) {
            if d >= dim {
                return Err(Error::invalid(
                    "digits",
                    format!("index {d} out of range for factor `{label}` (dim {dim})"),
                ));
            }
            idx = idx * dim + d;
        }
        Ok(idx)
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, (_, dim)) in out.iter_mut().zip(&self.factors).rev() {
            *slot = idx % dim;
            idx /= dim;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_dimension_and_indexing() {
        let s = HilbertSpace::new([("atom", 7), ("a", 2), ("b", 2), ("c", 2)]).unwrap();
        assert_eq!(s.dim(), 56);
        let i = s.basis_index(&[3, 1, 0, 1]).unwrap();
        assert_eq!(s.digits(i), vec![3, 1, 0, 1]);
        assert!(s.basis_index(&[7, 0, 0, 0]).is_err());
    }

    #[test]
    fn rejects_bad_factors() {
        assert!(HilbertSpace::new([("a", 2), ("a", 3)]).is_err());
        assert!(HilbertSpace::new([("a", 0)]).is_err());
    }
}
