use num_complex::Complex64 as C64;

use super::space::HilbertSpace;
use crate::error::{Error, Result};

/// Square sparse complex matrix (CSR) acting on a [`HilbertSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Operator {
    pub fn zeros(space: &HilbertSpace) -> Self {
        Self {
            space: space.clone(),
            row_ptr: vec![0; space.dim() + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let n = space.dim();
        Self::from_triplets(space, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))))
            .expect("identity indices are in range")
    }

    /// Build from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(
        space: &HilbertSpace,
        entries: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Result<Self> {
        let n = space.dim();
        let mut trip: Vec<(usize, usize, C64)> = entries.into_iter().collect();
        for &(r, c, v) in &trip {
            if r >= n || c >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.max(c) + 1,
                });
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("in operator entry ({r}, {c})"),
                });
            }
        }
        trip.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<C64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut op = Self {
            space: space.clone(),
            row_ptr,
            cols,
            vals,
        };
        op.prune();
        Ok(op)
    }

    /// Row-major dense input.
    pub fn from_dense(space: &HilbertSpace, dense: &[C64]) -> Result<Self> {
        let n = space.dim();
        if dense.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: dense.len(),
            });
        }
        Self::from_triplets(
            space,
            dense
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != C64::new(0.0, 0.0))
                .map(|(k, v)| (k / n, k % n, *v)),
        )
    }

    /// Embed a `d × d` row-major local matrix acting on factor `label`.
    pub fn local(space: &HilbertSpace, label: &str, local: &[C64]) -> Result<Self> {
        let which = space
            .index_of(label)
            .ok_or_else(|| Error::invalid("label", format!("no factor named `{label}`")))?;
        let d = space.factors()[which].1;
        if local.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: local.len(),
            });
        }
        let n = space.dim();
        let mut entries = Vec::new();
        for col in 0..n {
            let digits = space.digits(col);
            let j = digits[which];
            for i in 0..d {
                let v = local[i * d + j];
                if v != C64::new(0.0, 0.0) {
                    let mut out = digits.clone();
                    out[which] = i;
                    entries.push((space.basis_index(&out)?, col, v));
                }
            }
        }
        Self::from_triplets(space, entries)
    }

    /// `|i⟩⟨j|` on factor `label`.
    pub fn local_transition(space: &HilbertSpace, label: &str, i: usize, j: usize) -> Result<Self> {
        let which = space
            .index_of(label)
            .ok_or_else(|| Error::invalid("label", format!("no factor named `{label}`")))?;
        let d = space.factors()[which].1;
        if i >= d || j >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: i.max(j) + 1,
            });
        }
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        m[i * d + j] = C64::new(1.0, 0.0);
        Self::local(space, label, &m)
    }

    /// Truncated annihilation operator on factor `label`.
    pub fn annihilation(space: &HilbertSpace, label: &str) -> Result<Self> {
        let which = space
            .index_of(label)
            .ok_or_else(|| Error::invalid("label", format!("no factor named `{label}`")))?;
        let d = space.factors()[which].1;
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for k in 1..d {
            m[(k - 1) * d + k] = C64::new((k as f64).sqrt(), 0.0);
        }
        Self::local(space, label, &m)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[range.clone()]
            .iter()
            .position(|&cc| cc == c)
            .map(|k| self.vals[range.start + k])
            .unwrap_or_default()
    }

    /// Iterate `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn to_dense(&self) -> Vec<C64> {
        let n = self.dim();
        let mut d = vec![C64::new(0.0, 0.0); n * n];
        for (r, c, v) in self.entries() {
            d[r * n + c] = v;
        }
        d
    }

    fn check_same_space(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    fn prune(&mut self) {
        if self.vals.iter().all(|v| *v != C64::new(0.0, 0.0)) {
            return;
        }
        let entries: Vec<_> = self.entries().filter(|e| e.2 != C64::new(0.0, 0.0)).collect();
        let n = self.dim();
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out.prune();
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same_space(other)?;
        Self::from_triplets(&self.space, self.entries().chain(other.entries()))
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.add(&other.scale_re(-1.0))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(&self.space, self.entries().map(|(r, c, v)| (c, r, v.conj())))
            .expect("transpose of a valid operator is valid")
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Operator) -> Result<Self> {
        self.check_same_space(other)?;
        let n = self.dim();
        let mut entries = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); n];
        let mut touched = Vec::new();
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (mid, a) = (self.cols[k], self.vals[k]);
                for kk in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.cols[kk];
                    if acc[c] == C64::new(0.0, 0.0) {
                        touched.push(c);
                    }
                    acc[c] += a * other.vals[kk];
                }
            }
            for &c in &touched {
                entries.push((r, c, acc[c]));
                acc[c] = C64::new(0.0, 0.0);
            }
            touched.clear();
        }
        Self::from_triplets(&self.space, entries)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.entries().all(|(r, c, v)| (v - self.get(c, r).conj()).norm() <= tol)
            && self
                .adjoint()
                .entries()
                .all(|(r, c, v)| (v - self.get(r, c)).norm() <= tol)
    }

    /// `out += s · self · x`.
    #[inline]
    pub fn apply_add(&self, x: &[C64], s: C64, out: &mut [C64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o += s * acc;
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        self.apply_add(x, C64::new(1.0, 0.0), &mut out);
        out
    }

    /// `out += s · self · M` for row-major dense `M` (n × n).
    pub(crate) fn left_mul_dense_add(&self, m: &[C64], s: C64, out: &mut [C64]) {
        let n = self.dim();
        for r in 0..n {
            let orow = &mut out[r * n..(r + 1) * n];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = s * self.vals[k];
                let mrow = &m[self.cols[k] * n..(self.cols[k] + 1) * n];
                for (o, x) in orow.iter_mut().zip(mrow) {
                    *o += v * x;
                }
            }
        }
    }

    /// `out += M · self†` for row-major dense `M` (n × n).
    pub(crate) fn right_mul_adjoint_dense_add(&self, m: &[C64], out: &mut [C64]) {
        // (M A†)_{ij} = Σ_k M_{ik} conj(A_{jk})
        let n = self.dim();
        for j in 0..n {
            for k in self.row_ptr[j]..self.row_ptr[j + 1] {
                let v = self.vals[k].conj();
                let col = self.cols[k];
                for i in 0..n {
                    out[i * n + j] += m[i * n + col] * v;
                }
            }
        }
    }
}
