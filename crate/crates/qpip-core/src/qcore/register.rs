//! Mixed-radix register layout. Wire 0 is the most significant digit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the total Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterShape {
    dims: Vec<usize>,
}

impl RegisterShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        let mut total: u128 = 1;
        for &d in &dims {
            if d < 2 {
                return Err(Error::ShapeMismatch(format!("wire dimension {d} below 2")));
            }
            total = total.saturating_mul(d as u128);
            if total > cap as u128 {
                return Err(Error::DimensionCap { requested: total, cap });
            }
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn qudits(n: usize, q: usize) -> Result<Self> {
        Self::new(vec![q; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_wires(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Stride of each wire in the flat index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for w in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[w] = strides[w + 1] * self.dims[w + 1];
        }
        strides
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for w in (0..self.dims.len()).rev() {
            out[w] = index % self.dims[w];
            index /= self.dims[w];
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} digits for {} wires",
                digits.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0;
        for (w, (&dg, &dm)) in digits.iter().zip(&self.dims).enumerate() {
            if dg >= dm {
                return Err(Error::ShapeMismatch(format!("digit {dg} on wire {w} of dimension {dm}")));
            }
            idx = idx * dm + dg;
        }
        Ok(idx)
    }

    /// Shape of `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    /// Checks a wire list for range and repetition; returns the sub-shape.
    pub fn select(&self, wires: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.dims.len()];
        for &w in wires {
            if w >= self.dims.len() {
                return Err(Error::WireOutOfRange(w));
            }
            if seen[w] {
                return Err(Error::RepeatedWire(w));
            }
            seen[w] = true;
        }
        Ok(Self {
            dims: wires.iter().map(|&w| self.dims[w]).collect(),
        })
    }

    /// Wires not listed, in increasing order.
    pub fn complement(&self, wires: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|w| !wires.contains(w)).collect()
    }

    /// Flat offsets of every local index over `wires` (local order follows `wires`).
    pub(crate) fn local_offsets(&self, wires: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offs = vec![0usize];
        for &w in wires {
            let mut next = Vec::with_capacity(offs.len() * self.dims[w]);
            for &o in &offs {
                for dg in 0..self.dims[w] {
                    next.push(o + dg * strides[w]);
                }
            }
            offs = next;
        }
        offs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let s = RegisterShape::new(vec![2, 3, 5]).unwrap();
        assert_eq!(s.total_dim(), 30);
        for i in 0..30 {
            assert_eq!(s.index(&s.digits(i)).unwrap(), i);
        }
        assert_eq!(s.digits(29), vec![1, 2, 4]);
        assert_eq!(s.strides(), vec![15, 5, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        let err = RegisterShape::with_cap(vec![5; 4], 600).unwrap_err();
        assert_eq!(err, Error::DimensionCap { requested: 625, cap: 600 });
        assert!(RegisterShape::qudits(11, 5).is_err());
    }

    #[test]
    fn select_rejects_bad_wires() {
        let s = RegisterShape::qubits(3).unwrap();
        assert_eq!(s.select(&[0, 0]), Err(Error::RepeatedWire(0)));
        assert_eq!(s.select(&[3]), Err(Error::WireOutOfRange(3)));
        assert_eq!(s.complement(&[1]), vec![0, 2]);
    }

    #[test]
    fn local_offsets_follow_wire_order() {
        let s = RegisterShape::new(vec![2, 3]).unwrap();
        assert_eq!(s.local_offsets(&[1, 0]), vec![0, 3, 1, 4, 2, 5]);
    }
}
