//! Network Hamiltonian
//!
//! ```text
//! H = Σ_j ε_j Y_j − Σ_{j,k} W_jk Y_j Y_k
//!     + (q/2) Σ_j (b†_j a_j + a†_j b_j) + ε_x Σ_j X_j
//! ```
//!
//! The interaction is a double sum over ordered pairs: the uniform model
//! stores `W_jk = g/2` off the diagonal, so a pair of excited neurons costs
//! `−g y_j y_k` and an excitation `y` on one neuron lowers every other
//! threshold to `1 − g y`.
//!
//! The input coupling `q` is the on-resonance Rabi angular frequency of an
//! output/input pair: the hopping amplitude is `q/2`, which makes a gapless
//! output neuron follow `X sin²(qt/2)` and a unit-gap neuron respond with
//! amplitude `q²/(1+q²)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::fock::{FockBasis, SparseOperator};
use crate::scalar::{half, two, Real, Scalar};

/// Absolute tolerance on `|W_jk − W_kj|`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputLayer<T> {
    /// Output/input coupling `q`.
    pub coupling: T,
    /// Gap `ε_x` of every input neuron.
    pub input_gap: T,
}

/// Thresholds, synaptic weights and optional input layer.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel<T> {
    thresholds: Vec<T>,
    weights: Vec<T>,
    input_layer: Option<InputLayer<T>>,
    reduced: bool,
}

impl<T: Scalar> NetworkModel<T> {
    /// Validated model from thresholds and a dense weight matrix.
    pub fn new(thresholds: Vec<T>, weights: Vec<Vec<T>>) -> Result<Self> {
        Self::build(thresholds, weights, false)
    }

    /// A model produced by freezing modes; thresholds may be zero or negative.
    pub fn new_reduced(thresholds: Vec<T>, weights: Vec<Vec<T>>) -> Result<Self> {
        Self::build(thresholds, weights, true)
    }

    fn build(thresholds: Vec<T>, weights: Vec<Vec<T>>, reduced: bool) -> Result<Self> {
        let n = thresholds.len();
        if n == 0 {
            return Err(Error::invalid("model needs at least one neuron"));
        }
        check_len(n, weights.len(), "weight rows")?;
        let mut flat = Vec::with_capacity(n * n);
        for row in weights {
            check_len(n, row.len(), "weight columns")?;
            flat.extend(row);
        }
        let model = NetworkModel { thresholds, weights: flat, input_layer: None, reduced };
        model.validate()?;
        Ok(model)
    }

    /// `ε_j = 1`, `W_jk = g/2` for `j ≠ k`.
    pub fn uniform(n: usize, g: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("uniform model needs n >= 2, got {n}")));
        }
        if g <= T::zero() {
            return Err(Error::invalid(format!("coupling g must be positive, got {g}")));
        }
        let w = g * half::<T>();
        let weights = (0..n)
            .map(|j| (0..n).map(|k| if j == k { T::zero() } else { w.clone() }).collect())
            .collect();
        Self::new(vec![T::one(); n], weights)
    }

    /// Attaches an input layer (`q ≥ 0`, `ε_x ≥ 0`).
    pub fn with_input_layer(mut self, coupling: T, input_gap: T) -> Result<Self> {
        if coupling < T::zero() || input_gap < T::zero() {
            return Err(Error::invalid("input coupling and gap must be nonnegative"));
        }
        self.input_layer = Some(InputLayer { coupling, input_gap });
        Ok(self)
    }

    pub fn without_input_layer(mut self) -> Self {
        self.input_layer = None;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        let tol = T::of(SYMMETRY_TOLERANCE);
        for j in 0..n {
            if !self.weight(j, j).is_zero() {
                return Err(Error::invalid(format!("W[{j}][{j}] must be zero")));
            }
            for k in 0..n {
                let w = self.weight(j, k);
                if *w < T::zero() {
                    return Err(Error::invalid(format!("W[{j}][{k}] = {w} is negative")));
                }
                if (w.clone() - self.weight(k, j).clone()).abs() > tol {
                    return Err(Error::invalid(format!("W is not symmetric at ({j}, {k})")));
                }
            }
        }
        if !self.reduced {
            if let Some((j, e)) = self.thresholds.iter().enumerate().find(|(_, e)| **e <= T::zero()) {
                return Err(Error::invalid(format!("threshold ε[{j}] = {e} must be positive")));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.thresholds.len()
    }

    pub fn thresholds(&self) -> &[T] {
        &self.thresholds
    }

    pub fn weight(&self, j: usize, k: usize) -> &T {
        &self.weights[j * self.n() + k]
    }

    pub fn weight_row(&self, j: usize) -> &[T] {
        let n = self.n();
        &self.weights[j * n..(j + 1) * n]
    }

    pub fn weights(&self) -> Vec<Vec<T>> {
        (0..self.n()).map(|j| self.weight_row(j).to_vec()).collect()
    }

    pub fn input_layer(&self) -> Option<&InputLayer<T>> {
        self.input_layer.as_ref()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn max_threshold(&self) -> T {
        self.thresholds.iter().cloned().fold(T::zero(), T::max_of)
    }

    /// Converts through `f64` to another scalar type.
    pub fn convert<U: Scalar>(&self) -> NetworkModel<U> {
        NetworkModel {
            thresholds: self.thresholds.iter().map(|x| U::of(x.as_f64())).collect(),
            weights: self.weights.iter().map(|x| U::of(x.as_f64())).collect(),
            input_layer: self.input_layer.as_ref().map(|l| InputLayer {
                coupling: U::of(l.coupling.as_f64()),
                input_gap: U::of(l.input_gap.as_f64()),
            }),
            reduced: self.reduced,
        }
    }

    /// Classical energy `Σ ε_j y_j − Σ_{j,k} W_jk y_j y_k` of the output layer.
    pub fn energy(&self, y: &[T]) -> Result<T> {
        energy_of_number_state(self, y)
    }
}

/// Mean occupations of an input stimulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPattern<T> {
    x: Vec<T>,
}

impl<T: Scalar> InputPattern<T> {
    pub fn new(x: Vec<T>) -> Result<Self> {
        if let Some((j, v)) = x.iter().enumerate().find(|(_, v)| **v < T::zero()) {
            return Err(Error::invalid(format!("stimulus X[{j}] = {v} is negative")));
        }
        Ok(InputPattern { x })
    }

    pub fn for_model(model: &NetworkModel<T>, x: Vec<T>) -> Result<Self> {
        check_len(model.n(), x.len(), "stimulus length")?;
        Self::new(x)
    }

    pub fn values(&self) -> &[T] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// `Σ_j ε_j y_j − Σ_{j,k} W_jk y_j y_k` for integer or real occupations.
pub fn energy_of_number_state<T: Scalar>(model: &NetworkModel<T>, y: &[T]) -> Result<T> {
    check_len(model.n(), y.len(), "occupation vector")?;
    if y.iter().any(|v| *v < T::zero()) {
        return Err(Error::invalid("occupations must be nonnegative"));
    }
    let mut linear = T::zero();
    let mut quadratic = T::zero();
    for (j, yj) in y.iter().enumerate() {
        if yj.is_zero() {
            continue;
        }
        linear = linear + model.thresholds[j].clone() * yj.clone();
        let mut row = T::zero();
        for (w, yk) in model.weight_row(j).iter().zip(y) {
            if !w.is_zero() && !yk.is_zero() {
                row = row + w.clone() * yk.clone();
            }
        }
        quadratic = quadratic + row * yj.clone();
    }
    Ok(linear - quadratic)
}

/// Sparse Hamiltonian over `basis`; the first `n` modes are the output
/// neurons, the next `n` the input neurons when an input layer is present.
pub fn build_hamiltonian<F: Real>(model: &NetworkModel<F>, basis: &FockBasis) -> Result<SparseOperator<F>> {
    let n = model.n();
    let modes = if model.input_layer.is_some() { 2 * n } else { n };
    check_len(modes, basis.mode_count(), "basis modes for model layout")?;
    let dim = basis.dimension();
    let mut triplets = Vec::with_capacity(dim * (1 + if model.input_layer.is_some() { 2 * n } else { 0 }));
    let mut y = vec![F::zero(); n];
    for i in 0..dim {
        let s = basis.state(i);
        for (dst, &src) in y.iter_mut().zip(&s[..n]) {
            *dst = F::of(src as f64);
        }
        let mut diag = energy_of_number_state(model, &y)?;
        if let Some(layer) = &model.input_layer {
            let x_total = s[n..].iter().map(|&v| v as f64).sum::<f64>();
            diag = diag + layer.input_gap * F::of(x_total);
        }
        if diag != F::zero() {
            triplets.push((i, i, Complex::new(diag, F::zero())));
        }
        if let Some(layer) = &model.input_layer {
            let hop = layer.coupling * half::<F>();
            if hop == F::zero() {
                continue;
            }
            for j in 0..n {
                // b†_j a_j: one quantum from output j to input j
                let yj = s[j];
                let xj = s[n + j];
                if yj == 0 || xj >= basis.caps()[n + j] {
                    continue;
                }
                let t = basis
                    .shifted(i, j, -1)
                    .and_then(|t| basis.shifted(t, n + j, 1))
                    .expect("hopping target inside basis");
                let amp = hop * F::of((yj as f64 * (xj as f64 + 1.0)).sqrt());
                triplets.push((t, i, Complex::new(amp, F::zero())));
                triplets.push((i, t, Complex::new(amp, F::zero())));
            }
        }
    }
    Ok(SparseOperator::from_triplets(dim, triplets, true))
}

/// Model on the unfrozen modes after replacing frozen occupations by
/// c-numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<T> {
    pub model: NetworkModel<T>,
    /// Constant `Σ_f ε_f v_f − Σ_{f,f'} W_ff' v_f v_f'`.
    pub offset: T,
    /// Original indices of the kept modes, in order.
    pub kept: Vec<usize>,
}

impl<T: Scalar> Reduction<T> {
    /// Full-model occupation vector from reduced occupations and the frozen values.
    pub fn compose(&self, frozen: &[(usize, T)], reduced_y: &[T]) -> Result<Vec<T>> {
        check_len(self.kept.len(), reduced_y.len(), "reduced occupation vector")?;
        let n = self.kept.len() + frozen.len();
        let mut y = vec![T::zero(); n];
        for (m, v) in frozen {
            y[*m] = v.clone();
        }
        for (&m, v) in self.kept.iter().zip(reduced_y) {
            y[m] = v.clone();
        }
        Ok(y)
    }
}

/// Freezes the listed modes at the given occupations:
/// `ε'_j = ε_j − 2 Σ_f W_jf v_f` on the remaining modes.
pub fn frozen_reduction<T: Scalar>(model: &NetworkModel<T>, frozen: &[(usize, T)]) -> Result<Reduction<T>> {
    let n = model.n();
    let mut is_frozen = vec![false; n];
    for (m, v) in frozen {
        if *m >= n {
            return Err(Error::invalid(format!("unknown mode {m} (model has {n})")));
        }
        if is_frozen[*m] {
            return Err(Error::invalid(format!("mode {m} frozen twice")));
        }
        if *v < T::zero() {
            return Err(Error::invalid(format!("frozen value {v} on mode {m} is negative")));
        }
        is_frozen[*m] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&j| !is_frozen[j]).collect();
    if kept.is_empty() {
        return Err(Error::invalid("cannot freeze every mode"));
    }
    let thresholds = kept
        .iter()
        .map(|&j| {
            let pull = frozen
                .iter()
                .fold(T::zero(), |acc, (f, v)| acc + model.weight(j, *f).clone() * v.clone());
            model.thresholds[j].clone() - two::<T>() * pull
        })
        .collect();
    let weights = kept
        .iter()
        .map(|&j| kept.iter().map(|&k| model.weight(j, k).clone()).collect())
        .collect();
    let mut offset = T::zero();
    for (f, v) in frozen {
        offset = offset + model.thresholds[*f].clone() * v.clone();
        for (f2, v2) in frozen {
            offset = offset - model.weight(*f, *f2).clone() * v.clone() * v2.clone();
        }
    }
    let mut reduced = NetworkModel::new_reduced(thresholds, weights)?;
    reduced.input_layer = model.input_layer.clone();
    Ok(Reduction { model: reduced, offset, kept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn matrix_g() -> NetworkModel<BigRational> {
        crate::presets::matrix_g()
    }

    #[test]
    fn uniform_weights() {
        let m = NetworkModel::<f64>::uniform(3, 0.1).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(*m.weight(j, k), if j == k { 0.0 } else { 0.05 });
            }
        }
        assert!(NetworkModel::<f64>::uniform(2, 0.0).is_err());
        assert!(NetworkModel::<f64>::uniform(1, 0.1).is_err());
    }

    #[test]
    fn uniform_six_couplings() {
        let m = NetworkModel::<f64>::uniform(6, 1e-10).unwrap();
        let mut pairs = Vec::new();
        for j in 0..6 {
            for k in j + 1..6 {
                pairs.push(*m.weight(j, k));
            }
        }
        assert_eq!(pairs.len(), 15);
        assert!(pairs.iter().all(|&w| w == pairs[0]));
    }

    #[test]
    fn validation() {
        assert!(NetworkModel::new(vec![1.0, 1.0], vec![vec![0.0, 0.1], vec![0.2, 0.0]]).is_err());
        assert!(NetworkModel::new(vec![1.0, 1.0], vec![vec![0.1, 0.1], vec![0.1, 0.0]]).is_err());
        assert!(NetworkModel::new(vec![1.0, 1.0], vec![vec![0.0, -0.1], vec![-0.1, 0.0]]).is_err());
        assert!(NetworkModel::new(vec![1.0, 0.0], vec![vec![0.0, 0.1], vec![0.1, 0.0]]).is_err());
        assert!(NetworkModel::new_reduced(vec![1.0, 0.0], vec![vec![0.0, 0.1], vec![0.1, 0.0]]).is_ok());
        assert!(NetworkModel::new(vec![1.0], vec![vec![0.0, 0.0]]).is_err());
    }

    #[test]
    fn energies() {
        let m = NetworkModel::<f64>::uniform(2, 0.1).unwrap();
        assert!((energy_of_number_state(&m, &[1.0, 1.0]).unwrap() - 1.9).abs() < 1e-15);
        assert_eq!(energy_of_number_state(&m, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(energy_of_number_state(&m, &[1.0]).is_err());

        let g = BigRational::new(1.into(), 1000.into());
        let m = NetworkModel::uniform(6, g.clone()).unwrap();
        let mut y = vec![BigRational::from_integer(0.into()); 6];
        y[0] = BigRational::from_integer(1000.into());
        assert_eq!(energy_of_number_state(&m, &y).unwrap(), BigRational::from_integer(1000.into()));
    }

    #[test]
    fn hamiltonian_diagonal_matches_energy() {
        let m = NetworkModel::<f64>::uniform(2, 0.1).unwrap();
        let b = build_basis(2, &[2, 2]).unwrap();
        let h = build_hamiltonian(&m, &b).unwrap();
        assert_eq!(h.dimension(), 9);
        for i in 0..9 {
            for k in 0..9 {
                if i != k {
                    assert_eq!(h.get(i, k).norm(), 0.0);
                }
            }
            let y: Vec<f64> = b.state(i).iter().map(|&v| v as f64).collect();
            assert_eq!(h.get(i, i).re, energy_of_number_state(&m, &y).unwrap());
        }
    }

    #[test]
    fn hopping_element_and_hermiticity() {
        let m = NetworkModel::<f64>::uniform(3, 0.01).unwrap().with_input_layer(0.05, 0.0).unwrap();
        let b = build_basis(6, &[1; 6]).unwrap();
        let h = build_hamiltonian(&m, &b).unwrap();
        for j in 0..3 {
            let mut from = vec![0u32; 6];
            from[j] = 1;
            let mut to = vec![0u32; 6];
            to[3 + j] = 1;
            let (fi, ti) = (b.index(&from).unwrap(), b.index(&to).unwrap());
            assert!((h.get(ti, fi).re - 0.025).abs() < 1e-17);
            assert!((h.get(fi, ti).re - 0.025).abs() < 1e-17);
        }
        assert!(h.is_hermitian(1e-14));
        assert!(build_hamiltonian(&m, &build_basis(3, &[1; 3]).unwrap()).is_err());
    }

    #[test]
    fn hamiltonian_conserves_channel_numbers() {
        let m = NetworkModel::<f64>::uniform(2, 0.03).unwrap().with_input_layer(0.2, 0.1).unwrap();
        let b = build_basis(4, &[2, 3, 2, 2]).unwrap();
        let h = build_hamiltonian(&m, &b).unwrap();
        for j in 0..2 {
            let channel = crate::fock::number_operator::<f64>(&b, j)
                .unwrap()
                .add(&crate::fock::number_operator(&b, 2 + j).unwrap());
            let comm = SparseOperator::commutator(&h, &channel);
            assert!(comm.max_abs() < 1e-15, "channel {j}: {}", comm.max_abs());
        }
    }

    #[test]
    fn uniform_reduction() {
        let g = BigRational::new(1.into(), 500.into());
        let m = NetworkModel::uniform(5, g.clone()).unwrap();
        let v = BigRational::from_integer(500.into());
        let r = frozen_reduction(&m, &[(0, v.clone())]).unwrap();
        assert!(r.model.thresholds().iter().all(|t| t.is_zero()));
        assert_eq!(r.offset, v);
        assert_eq!(r.kept, vec![1, 2, 3, 4]);
        assert!(r.model.is_reduced());
    }

    #[test]
    fn reduction_at_zero_is_identity() {
        let m = NetworkModel::<f64>::uniform(3, 0.2).unwrap();
        let r = frozen_reduction(&m, &[(1, 0.0)]).unwrap();
        assert_eq!(r.offset, 0.0);
        assert_eq!(r.model.thresholds(), &[1.0, 1.0]);
        assert_eq!(r.model.weights(), vec![vec![0.0, 0.1], vec![0.1, 0.0]]);
        assert!(frozen_reduction(&m, &[(3, 0.0)]).is_err());
        assert!(frozen_reduction(&m, &[(0, 0.0), (0, 1.0)]).is_err());
    }

    #[test]
    fn matrix_g_reduction_gapless() {
        let m = matrix_g();
        let e10 = BigRational::from_integer(10_000_000_000i64.into());
        let frozen = [
            (0, e10.clone()),
            (1, e10.clone() * BigRational::from_integer(3.into())),
            (2, e10.clone() * BigRational::from_integer(2.into())),
        ];
        let r = frozen_reduction(&m, &frozen).unwrap();
        assert!(r.model.thresholds().iter().all(|t| t.is_zero()));
    }

    proptest! {
        #[test]
        fn reduction_reproduces_full_energy(
            w in proptest::collection::vec(0i64..20, 10),
            eps in proptest::collection::vec(1i64..50, 5),
            frozen_vals in proptest::collection::vec(0i64..100, 2),
            rest in proptest::collection::vec(0i64..6, 3),
        ) {
            let r = |x: i64| BigRational::new(x.into(), 7.into());
            let n = 5;
            let mut weights = vec![vec![r(0); n]; n];
            let mut it = w.into_iter();
            for j in 0..n {
                for k in j + 1..n {
                    let v = r(it.next().unwrap());
                    weights[j][k] = v.clone();
                    weights[k][j] = v;
                }
            }
            let m = NetworkModel::new(eps.into_iter().map(r).collect(), weights).unwrap();
            let frozen = vec![(3usize, r(frozen_vals[0])), (0usize, r(frozen_vals[1]))];
            let red = frozen_reduction(&m, &frozen).unwrap();
            let ry: Vec<_> = rest.into_iter().map(|v| BigRational::from_integer(v.into())).collect();
            let full_y = red.compose(&frozen, &ry).unwrap();
            let full = energy_of_number_state(&m, &full_y).unwrap();
            let reduced = energy_of_number_state(&red.model, &ry).unwrap() + red.offset.clone();
            prop_assert_eq!(full, reduced);
        }
    }
}
