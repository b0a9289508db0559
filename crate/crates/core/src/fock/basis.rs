use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Default upper bound on `Π (cap_j + 1)`.
pub const DEFAULT_DIMENSION_LIMIT: u128 = 2_000_000;

/// Truncated occupation-number basis, enumerated lexicographically with the
/// first mode most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    caps: Vec<u32>,
    strides: Vec<usize>,
    occupations: Vec<u32>,
    dimension: usize,
}

impl FockBasis {
    pub fn new(caps: &[u32]) -> Result<Self> {
        Self::with_limit(caps, DEFAULT_DIMENSION_LIMIT)
    }

    pub fn with_limit(caps: &[u32], limit: u128) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::invalid("basis needs at least one mode"));
        }
        let product = caps.iter().try_fold(1u128, |acc, &c| acc.checked_mul(c as u128 + 1));
        let product = product.unwrap_or(u128::MAX);
        if product > limit {
            return Err(Error::Capacity { product, limit });
        }
        let dimension = product as usize;
        let modes = caps.len();
        let mut strides = vec![1usize; modes];
        for j in (0..modes - 1).rev() {
            strides[j] = strides[j + 1] * (caps[j + 1] as usize + 1);
        }
        let mut occupations = Vec::with_capacity(dimension * modes);
        let mut current = vec![0u32; modes];
        for _ in 0..dimension {
            occupations.extend_from_slice(&current);
            // odometer, last mode fastest
            for j in (0..modes).rev() {
                if current[j] < caps[j] {
                    current[j] += 1;
                    break;
                }
                current[j] = 0;
            }
        }
        Ok(FockBasis { caps: caps.to_vec(), strides, occupations, dimension })
    }

    pub fn mode_count(&self) -> usize {
        self.caps.len()
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Occupation vector of basis state `i`.
    pub fn state(&self, i: usize) -> &[u32] {
        let m = self.mode_count();
        &self.occupations[i * m..(i + 1) * m]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.occupations.chunks_exact(self.mode_count())
    }

    /// Index of an occupation vector, `None` when outside the caps.
    pub fn index(&self, occupation: &[u32]) -> Option<usize> {
        if occupation.len() != self.mode_count() {
            return None;
        }
        let mut idx = 0;
        for ((&y, &cap), &stride) in occupation.iter().zip(&self.caps).zip(&self.strides) {
            if y > cap {
                return None;
            }
            idx += y as usize * stride;
        }
        Some(idx)
    }

    /// Index of the state obtained from `i` by changing mode `j` by `delta`.
    pub fn shifted(&self, i: usize, mode: usize, delta: i64) -> Option<usize> {
        let y = self.state(i)[mode] as i64 + delta;
        if y < 0 || y > self.caps[mode] as i64 {
            return None;
        }
        Some((i as i64 + delta * self.strides[mode] as i64) as usize)
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.mode_count() {
            Ok(())
        } else {
            Err(Error::invalid(format!("mode {mode} out of range for {} modes", self.mode_count())))
        }
    }

    pub fn dump(&self) -> BasisDump {
        BasisDump {
            mode_count: self.mode_count(),
            caps: self.caps.clone(),
            states: self.states().map(|s| s.to_vec()).collect(),
        }
    }
}

/// Convenience constructor with an explicit mode count.
pub fn build_basis(mode_count: usize, caps: &[u32]) -> Result<FockBasis> {
    check_len(mode_count, caps.len(), "caps per mode")?;
    FockBasis::new(caps)
}

/// JSON layout of a basis: `{"mode_count": m, "caps": [..], "states": [[y_1..y_m], ..]}`,
/// states listed in index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDump {
    pub mode_count: usize,
    pub caps: Vec<u32>,
    pub states: Vec<Vec<u32>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_order() {
        let b = build_basis(2, &[1, 1]).unwrap();
        let states: Vec<_> = b.states().map(|s| s.to_vec()).collect();
        assert_eq!(states, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn single_mode() {
        let b = build_basis(1, &[3]).unwrap();
        assert_eq!(b.dimension(), 4);
        assert_eq!(b.state(2), &[2]);
    }

    #[test]
    fn lexicographic_against_brute_force() {
        let b = build_basis(3, &[2, 2, 2]).unwrap();
        let mut brute = Vec::new();
        for a in 0..=2u32 {
            for c in 0..=2u32 {
                for d in 0..=2u32 {
                    brute.push(vec![a, c, d]);
                }
            }
        }
        brute.sort();
        assert_eq!(b.dimension(), 27);
        let pos = brute.iter().position(|s| s == &vec![1, 2, 0]).unwrap();
        assert_eq!(b.index(&[1, 2, 0]), Some(pos));
        assert_eq!(pos, 15);
        for (i, s) in brute.iter().enumerate() {
            assert_eq!(b.state(i), s.as_slice());
            assert_eq!(b.index(s), Some(i));
        }
    }

    #[test]
    fn capacity_error_names_product() {
        let err = FockBasis::with_limit(&[9, 9, 9], 999).unwrap_err();
        assert_eq!(err, Error::Capacity { product: 1000, limit: 999 });
        assert!(err.to_string().contains("1000"));
    }

    #[test]
    fn rejects_bad_layout() {
        assert!(build_basis(0, &[]).is_err());
        assert!(build_basis(2, &[1]).is_err());
    }

    #[test]
    fn shifts_respect_caps() {
        let b = build_basis(2, &[2, 3]).unwrap();
        let i = b.index(&[1, 3]).unwrap();
        assert_eq!(b.shifted(i, 0, 1), b.index(&[2, 3]));
        assert_eq!(b.shifted(i, 1, 1), None);
        assert_eq!(b.shifted(i, 1, -3), b.index(&[1, 0]));
        assert_eq!(b.index(&[3, 0]), None);
    }

    #[test]
    fn dump_layout() {
        let b = build_basis(2, &[1, 0]).unwrap();
        let json = serde_json::to_string(&b.dump()).unwrap();
        assert_eq!(json, r#"{"mode_count":2,"caps":[1,0],"states":[[0,0],[1,0]]}"#);
    }
}
