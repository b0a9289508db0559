use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::basis::FockBasis;
use crate::error::Result;
use crate::scalar::Real;

/// Compressed-row sparse complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<F> {
    dimension: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex<F>>,
    hermitian: bool,
}

impl<F: Real> SparseOperator<F> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        dimension: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex<F>)>,
        hermitian: bool,
    ) -> Self {
        let mut entries: Vec<_> = triplets.into_iter().collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dimension + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut values: Vec<Complex<F>> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            assert!(r < dimension && c < dimension, "entry ({r},{c}) outside dimension {dimension}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() = *values.last().unwrap() + v;
            } else {
                rows.push(r);
                cols.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_cols = Vec::with_capacity(rows.len());
        let mut keep_vals = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(values) {
            if !v.is_zero() {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..dimension {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator { dimension, row_ptr, cols: keep_cols, values: keep_vals, hermitian }
    }

    pub fn from_diagonal(diagonal: &[F]) -> Self {
        let n = diagonal.len();
        Self::from_triplets(n, diagonal.iter().enumerate().map(|(i, &d)| (i, i, Complex::new(d, F::zero()))), true)
    }

    pub fn identity(dimension: usize) -> Self {
        Self::from_triplets(dimension, (0..dimension).map(|i| (i, i, Complex::one())), true)
    }

    pub fn zero(dimension: usize) -> Self {
        Self::from_triplets(dimension, std::iter::empty(), true)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Whether the operator was constructed as Hermitian.
    pub fn flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex<F>)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<F>)> + '_ {
        (0..self.dimension).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<F> {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => Complex::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex<F>> {
        (0..self.dimension).map(|i| self.get(i, i)).collect()
    }

    /// `out = self · v`.
    pub fn apply_into(&self, v: &[Complex<F>], out: &mut [Complex<F>]) {
        assert_eq!(v.len(), self.dimension);
        assert_eq!(out.len(), self.dimension);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex::zero();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + self.values[k] * v[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, v: &[Complex<F>]) -> Vec<Complex<F>> {
        let mut out = vec![Complex::zero(); self.dimension];
        self.apply_into(v, &mut out);
        out
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &[Complex<F>]) -> Complex<F> {
        let av = self.apply(v);
        v.iter().zip(&av).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dimension, self.triplets().map(|(r, c, v)| (c, r, v.conj())), self.hermitian)
    }

    pub fn scale(&self, factor: Complex<F>) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = *v * factor);
        out.hermitian = self.hermitian && factor.im.is_zero();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dimension, other.dimension);
        Self::from_triplets(
            self.dimension,
            self.triplets().chain(other.triplets()),
            self.hermitian && other.hermitian,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Complex::one()))
    }

    /// Sparse product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dimension, other.dimension);
        let mut triplets = Vec::new();
        for r in 0..self.dimension {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        Self::from_triplets(self.dimension, triplets, false)
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.mul(b).sub(&b.mul(a))
    }

    pub fn max_abs(&self) -> F {
        self.values.iter().fold(F::zero(), |m, v| m.max(v.norm()))
    }

    /// Largest `|A_rc − conj(A_cr)|`.
    pub fn hermiticity_defect(&self) -> F {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(F::zero(), |m, d| m.max(d))
    }

    pub fn is_hermitian(&self, tol: F) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn dump(&self) -> OperatorDump {
        OperatorDump {
            dimension: self.dimension,
            hermitian: self.hermitian,
            entries: self
                .triplets()
                .map(|(r, c, v)| (r, c, v.re.as_f64(), v.im.as_f64()))
                .collect(),
        }
    }
}

/// JSON layout of an operator: `{"dimension": d, "hermitian": bool,
/// "entries": [[row, col, re, im], ..]}` in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDump {
    pub dimension: usize,
    pub hermitian: bool,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

/// Annihilation and creation operators of one mode.
pub fn ladder_operators<F: Real>(basis: &FockBasis, mode: usize) -> Result<(SparseOperator<F>, SparseOperator<F>)> {
    basis.check_mode(mode)?;
    let dim = basis.dimension();
    let mut triplets = Vec::new();
    for i in 0..dim {
        let y = basis.state(i)[mode];
        if y > 0 {
            let target = basis.shifted(i, mode, -1).expect("lowered state inside basis");
            triplets.push((target, i, Complex::new(F::of((y as f64).sqrt()), F::zero())));
        }
    }
    let annihilation = SparseOperator::from_triplets(dim, triplets, false);
    let creation = annihilation.adjoint();
    Ok((annihilation, creation))
}

/// Diagonal occupation operator of one mode.
pub fn number_operator<F: Real>(basis: &FockBasis, mode: usize) -> Result<SparseOperator<F>> {
    basis.check_mode(mode)?;
    let diag: Vec<F> = basis.states().map(|s| F::of(s[mode] as f64)).collect();
    Ok(SparseOperator::from_diagonal(&diag))
}
