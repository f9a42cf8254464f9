// Copyright 2026 The qsearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Complex state vectors, phase queries and dense unitaries.
//!
//! Indices are 0-based: item `α` of an `N`-item search space is axis `α` in
//! `0..N`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// A single complex amplitude `⟨α|ψ⟩`.
pub type Amplitude = Complex64;

/// Tolerance on `|ψ|² - 1` for a vector to be accepted as a state.
pub const NORM_TOL: f64 = 1e-9;

/// Tolerance on `|U†U - I|` for a matrix to be accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-9;

/// Per-operation norm drift allowed by the property tests.
pub const DRIFT_TOL: f64 = 1e-12;

/// Seeded random stream `stream` derived from `seed`.
///
/// Every consumer of randomness takes its own stream so that results do not
/// depend on the order in which workers draw numbers.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A unit-norm vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Validates finiteness and unit norm (within [`NORM_TOL`]).
    pub fn new(amps: Vec<Amplitude>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(i) = amps
            .iter()
            .position(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(StateVector { amps })
    }

    pub fn from_real(components: &[f64]) -> Result<Self> {
        Self::new(components.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Normalizes `amps` before validating; fails on the zero vector.
    pub fn normalized(amps: Vec<Amplitude>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized {
                norm_sq: norm * norm,
            });
        }
        Self::new(amps.into_iter().map(|a| a / norm).collect())
    }

    /// Standard basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if index >= dim {
            return Err(Error::TargetOutOfRange { target: index, dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps })
    }

    /// Haar-random unit vector (normalized standard complex Gaussian).
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        loop {
            let amps: Vec<Amplitude> = (0..dim).map(|_| complex_gaussian(rng)).collect();
            if let Ok(v) = Self::normalized(amps) {
                return Ok(v);
            }
        }
    }

    /// Wraps amplitudes produced by norm-preserving operations on a valid
    /// state; no re-validation.
    pub(crate) fn from_trusted(amps: Vec<Amplitude>) -> Self {
        debug_assert!(!amps.is_empty());
        StateVector { amps }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    #[inline]
    pub fn amp(&self, index: usize) -> Amplitude {
        self.amps[index]
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `-ψ`.
    pub fn negated(&self) -> Self {
        StateVector {
            amps: self.amps.iter().map(|a| -a).collect(),
        }
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Uniform superposition `|s⟩ = Σ_α |α⟩ / √N`.
pub fn uniform_state(dim: usize) -> Result<StateVector> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    Ok(StateVector { amps: vec![a; dim] })
}

/// `⟨u|v⟩ = Σ_α conj(u_α) v_α`.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Amplitude> {
    check_dims(u.dim(), v.dim())?;
    Ok(inner_unchecked(u.amps(), v.amps()))
}

pub(crate) fn inner_unchecked(u: &[Amplitude], v: &[Amplitude]) -> Amplitude {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `|u - v|²`, computed componentwise rather than from `2 - 2 Re⟨u|v⟩` so
/// that small distances keep full relative precision.
pub fn distance_sq(u: &StateVector, v: &StateVector) -> Result<f64> {
    check_dims(u.dim(), v.dim())?;
    Ok(distance_sq_unchecked(u.amps(), v.amps()))
}

pub(crate) fn distance_sq_unchecked(u: &[Amplitude], v: &[Amplitude]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum()
}

/// The oracle query: a selective phase rotation of one amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryOp {
    target: usize,
    phase: f64,
}

impl QueryOp {
    pub fn new(target: usize, phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::NonFinitePhase);
        }
        Ok(QueryOp { target, phase })
    }

    /// Sign flip of the target amplitude (phase `π`), Grover's oracle.
    pub fn flip(target: usize) -> Self {
        QueryOp { target, phase: PI }
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `e^{i·phase}`. Phase `π` maps to exactly `-1`.
    pub(crate) fn factor(&self) -> Complex64 {
        phase_factor(self.phase)
    }
}

/// `e^{iφ}` with the multiples of `π/2` returned exactly, so that sign-flip
/// queries do not pick up a `1e-16` imaginary residue.
pub(crate) fn phase_factor(phase: f64) -> Complex64 {
    let q = phase / (PI / 2.0);
    if q == q.round() && q.abs() < 1e15 {
        return match (q as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, phase)
}

/// Multiplies `v[target]` by `e^{i·phase}` and leaves every other amplitude
/// untouched.
pub fn apply_query(v: &StateVector, q: &QueryOp) -> Result<StateVector> {
    if q.target >= v.dim() {
        return Err(Error::TargetOutOfRange {
            target: q.target,
            dim: v.dim(),
        });
    }
    let mut out = v.clone();
    out.amps[q.target] *= q.factor();
    Ok(out)
}

/// A dense unitary stored row-major.
///
/// Unitarity is checked once, at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl Unitary {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        check_dims(dim * dim, data.len())?;
        if let Some(i) = data
            .iter()
            .position(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        let u = Unitary { dim, data };
        let deviation = u.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(Unitary { dim, data })
    }

    /// Permutation matrix exchanging axes `a` and `b`.
    pub fn swap(dim: usize, a: usize, b: usize) -> Result<Self> {
        let mut u = Self::identity(dim)?;
        for &i in &[a, b] {
            if i >= dim {
                return Err(Error::TargetOutOfRange { target: i, dim });
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        u.data[a * dim + a] = zero;
        u.data[b * dim + b] = zero;
        u.data[a * dim + b] = one;
        u.data[b * dim + a] = one;
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    /// Largest entry of `|U†U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Writes `U·src` into `dst`.
    pub(crate) fn apply_into(&self, src: &[Complex64], dst: &mut [Complex64]) {
        for (row, out) in self.data.chunks_exact(self.dim).zip(dst.iter_mut()) {
            *out = row.iter().zip(src).map(|(u, x)| u * x).sum();
        }
    }

    /// Haar-random unitary, deterministic in `seed`.
    pub fn haar(dim: usize, seed: u64) -> Result<Self> {
        haar_unitary(dim, seed)
    }
}

/// `U·v`.
pub fn apply_unitary(u: &Unitary, v: &StateVector) -> Result<StateVector> {
    check_dims(u.dim(), v.dim())?;
    let mut out = vec![Complex64::new(0.0, 0.0); v.dim()];
    u.apply_into(v.amps(), &mut out);
    Ok(StateVector::from_trusted(out))
}

/// Haar-random unitary of dimension `dim`, deterministic in `seed`.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<Unitary> {
    let mut rng = stream_rng(seed, 0);
    haar_unitary_with(dim, &mut rng)
}

/// Haar-random unitary drawn from `rng`.
///
/// Orthonormalizes the columns of a matrix of i.i.d. standard complex
/// Gaussians by Gram-Schmidt. That is the QR factorization whose `R` has a
/// positive real diagonal, which is the phase normalization needed for the
/// `Q` factor to be exactly Haar distributed. Each column is projected twice
/// to keep orthogonality at round-off level.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Unitary> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| (0..dim).map(|_| complex_gaussian(rng)).collect())
            .collect();
        if orthonormalize(&mut cols) {
            let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
            for (j, col) in cols.iter().enumerate() {
                for (i, &x) in col.iter().enumerate() {
                    data[i * dim + j] = x;
                }
            }
            return Ok(Unitary { dim, data });
        }
        // Rank-deficient draw (probability zero); resample.
    }
}

fn orthonormalize(cols: &mut [Vec<Complex64>]) -> bool {
    for j in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(j);
        let col = &mut rest[0];
        let scale = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for _ in 0..2 {
            for q in done.iter() {
                let proj = inner_unchecked(q, col);
                for (c, qi) in col.iter_mut().zip(q) {
                    *c -= proj * qi;
                }
            }
        }
        let norm = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 1e-10 * scale {
            return false;
        }
        for c in col.iter_mut() {
            *c /= norm;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn uniform_state_values() {
        assert_eq!(uniform_state(1).unwrap().amps(), &[c(1.0, 0.0)]);
        for a in uniform_state(4).unwrap().amps() {
            assert_eq!(*a, c(0.5, 0.0));
        }
        assert!((uniform_state(10).unwrap().norm_sq() - 1.0).abs() < 1e-12);
        assert_eq!(uniform_state(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn state_validation() {
        assert!(matches!(
            StateVector::from_real(&[1.0, 1.0]),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(
            StateVector::new(vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(0))
        );
        assert_eq!(StateVector::new(vec![]), Err(Error::InvalidDimension(0)));
        assert!(StateVector::from_real(&[0.6, 0.8]).is_ok());
    }

    #[test]
    fn inner_products() {
        let e0 = StateVector::basis(4, 0).unwrap();
        let e1 = StateVector::basis(4, 1).unwrap();
        assert_eq!(inner(&e0, &e0).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&e0, &e1).unwrap(), c(0.0, 0.0));
        assert_eq!(inner(&uniform_state(4).unwrap(), &e0).unwrap(), c(0.5, 0.0));
        assert_eq!(
            inner(&e0, &StateVector::basis(2, 0).unwrap()),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 2
            })
        );
    }

    #[test]
    fn distances() {
        let e0 = StateVector::basis(3, 0).unwrap();
        let e1 = StateVector::basis(3, 1).unwrap();
        assert_eq!(distance_sq(&e0, &e0).unwrap(), 0.0);
        assert_eq!(distance_sq(&e0, &e1).unwrap(), 2.0);
        assert_eq!(distance_sq(&e0, &e0.negated()).unwrap(), 4.0);
        assert!(distance_sq(&e0, &StateVector::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn queries() {
        let s = uniform_state(2).unwrap();
        assert_eq!(apply_query(&s, &QueryOp::new(1, 0.0).unwrap()).unwrap(), s);
        let flipped = apply_query(&s, &QueryOp::flip(0)).unwrap();
        let h = 1.0 / 2f64.sqrt();
        assert_eq!(flipped.amps(), &[c(-h, 0.0), c(h, 0.0)]);
        assert_eq!(
            apply_query(&s, &QueryOp::flip(2)),
            Err(Error::TargetOutOfRange { target: 2, dim: 2 })
        );
        assert_eq!(QueryOp::new(0, f64::INFINITY), Err(Error::NonFinitePhase));
    }

    #[test]
    fn exact_quarter_turn_factors() {
        assert_eq!(phase_factor(PI), c(-1.0, 0.0));
        assert_eq!(phase_factor(-PI / 2.0), c(0.0, -1.0));
        assert_eq!(phase_factor(3.0 * PI), c(-1.0, 0.0));
        assert_eq!(phase_factor(0.0), c(1.0, 0.0));
        let f = phase_factor(1.0);
        assert!((f - c(1f64.cos(), 1f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn unitary_construction() {
        let id = Unitary::identity(3).unwrap();
        let v = StateVector::random(3, &mut stream_rng(1, 0)).unwrap();
        assert_eq!(apply_unitary(&id, &v).unwrap(), v);

        let sw = Unitary::swap(2, 0, 1).unwrap();
        let e0 = StateVector::basis(2, 0).unwrap();
        assert_eq!(
            apply_unitary(&sw, &e0).unwrap(),
            StateVector::basis(2, 1).unwrap()
        );

        let bad = Unitary::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(bad, Err(Error::NotUnitary { .. })));
        assert!(apply_unitary(&id, &e0).is_err());
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for n in [1, 2, 5, 16, 64] {
            let u = haar_unitary(n, 7).unwrap();
            assert!(u.unitarity_deviation() < 1e-12, "n={n}");
            assert_eq!(u, haar_unitary(n, 7).unwrap());
            assert_ne!(u, haar_unitary(n, 8).unwrap());
            let v = StateVector::random(n, &mut stream_rng(3, n as u64)).unwrap();
            let w = apply_unitary(&u, &v).unwrap();
            assert!((w.norm_sq() - 1.0).abs() < DRIFT_TOL);
        }
        assert_eq!(haar_unitary(0, 0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn haar_trace_second_moment() {
        // E|tr U|² = 1 under the Haar measure.
        let mut rng = stream_rng(11, 0);
        let draws = 4000;
        let moment = (0..draws)
            .map(|_| {
                let u = haar_unitary_with(4, &mut rng).unwrap();
                (0..4).map(|i| u.get(i, i)).sum::<Complex64>().norm_sqr()
            })
            .sum::<f64>()
            / draws as f64;
        assert!((moment - 1.0).abs() < 0.1, "E|tr U|^2 = {moment}");
    }
}
