use alloc::vec::Vec;

use crate::econ::LatencyLookup;
use crate::{DomainError, LocationId, Result};

/// Symmetric region-to-region latency in whole milliseconds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatencyModel {
    regions: usize,
    ms: Vec<u32>,
}

impl LatencyModel {
    pub fn new(matrix: &[Vec<u32>]) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(DomainError::LatencyMatrix("no regions"));
        }
        if matrix.iter().any(|row| row.len() != n) {
            return Err(DomainError::LatencyMatrix("matrix is not square"));
        }
        for a in 0..n {
            if matrix[a][a] != 0 {
                return Err(DomainError::LatencyMatrix("non-zero diagonal"));
            }
            for b in 0..n {
                if matrix[a][b] != matrix[b][a] {
                    return Err(DomainError::LatencyMatrix("matrix is not symmetric"));
                }
                if a != b && matrix[a][b] == 0 {
                    return Err(DomainError::LatencyMatrix("zero latency between distinct regions"));
                }
            }
        }
        Ok(LatencyModel { regions: n, ms: matrix.iter().flatten().copied().collect() })
    }

    pub fn regions(&self) -> usize {
        self.regions
    }

    pub fn contains(&self, r: LocationId) -> bool {
        (r.0 as usize) < self.regions
    }

    pub fn get(&self, a: LocationId, b: LocationId) -> Option<u32> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        Some(self.ms[a.0 as usize * self.regions + b.0 as usize])
    }
}

impl LatencyLookup for LatencyModel {
    fn latency_ms(&self, a: LocationId, b: LocationId) -> Option<u32> {
        self.get(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validates_shape() {
        assert!(LatencyModel::new(&[vec![0, 10], vec![10, 0]]).is_ok());
        assert!(LatencyModel::new(&[vec![0, 10], vec![11, 0]]).is_err());
        assert!(LatencyModel::new(&[vec![1, 10], vec![10, 0]]).is_err());
        assert!(LatencyModel::new(&[vec![0, 0], vec![0, 0]]).is_err());
        assert!(LatencyModel::new(&[vec![0, 10]]).is_err());
    }

    #[test]
    fn lookup() {
        let m = LatencyModel::new(&[vec![0, 10, 30], vec![10, 0, 20], vec![30, 20, 0]]).unwrap();
        assert_eq!(m.get(LocationId(0), LocationId(2)), Some(30));
        assert_eq!(m.get(LocationId(2), LocationId(2)), Some(0));
        assert_eq!(m.get(LocationId(0), LocationId(3)), None);
    }
}
