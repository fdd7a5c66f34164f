use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continuous function on `[-r, 1]` stored as node values with linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    /// Index of the node at `t = 0`.
    zero: usize,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() || nodes.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs >= 2 nodes and matching values, got {} nodes and {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("grid nodes must be strictly increasing".into()));
        }
        if *nodes.last().unwrap() != 1.0 || nodes[0] > 0.0 {
            return Err(Error::InvalidArgument("grid must span [-r, 1]".into()));
        }
        let zero = nodes
            .iter()
            .position(|&t| t == 0.0)
            .ok_or_else(|| Error::InvalidArgument("grid must contain the node t = 0".into()))?;
        Ok(Self { nodes, values, zero })
    }

    /// Uniform nodes on `[0, 1]` (`n` of them) extended to `[-r, 0]` at the closest
    /// uniform spacing not exceeding `1 / (n - 1)`.
    pub fn uniform_nodes(r: f64, n: usize) -> Result<Vec<f64>> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("need at least 3 nodes on [0, 1], got {n}")));
        }
        let h = 1.0 / (n - 1) as f64;
        let hist = if r > 0.0 { (r / h - 1e-9).ceil().max(1.0) as usize } else { 0 };
        let mut nodes = Vec::with_capacity(hist + n);
        for i in 0..hist {
            nodes.push(-r + r * i as f64 / hist as f64);
        }
        for i in 0..n {
            nodes.push(if i + 1 == n { 1.0 } else { i as f64 * h });
        }
        Ok(nodes)
    }

    pub fn from_fn(nodes: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = nodes.iter().map(|&t| f(t)).collect();
        Self::new(nodes, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r(&self) -> f64 {
        -self.nodes[0]
    }

    pub fn zero_index(&self) -> usize {
        self.zero
    }

    /// Nodes in `[0, 1]`.
    pub fn positive_nodes(&self) -> &[f64] {
        &self.nodes[self.zero..]
    }

    pub fn positive_values(&self) -> &[f64] {
        &self.values[self.zero..]
    }

    /// Index `i` with `nodes[i] <= t <= nodes[i + 1]` (clamped to the ends).
    #[inline]
    pub fn interval_of(&self, t: f64) -> usize {
        let i = self.nodes.partition_point(|&x| x <= t);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }

    /// Linear interpolation; `t` outside `[-r, 1]` is clamped.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.interval_of(t);
        let (t0, t1) = (self.nodes[i], self.nodes[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        v0 + w * (v1 - v0)
    }

    /// Pointwise map over values, keeping nodes.
    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.nodes.iter().zip(&self.values).map(|(&t, &v)| f(t, v)).collect();
        Self {
            nodes: self.nodes.clone(),
            values,
            zero: self.zero,
        }
    }

    /// Sup-norm of the difference over nodes in `[0, 1]` (exact for piecewise linear data).
    pub fn sup_distance_positive(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.nodes, other.nodes);
        self.positive_values()
            .iter()
            .zip(other.positive_values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn sup_norm_positive(&self) -> f64 {
        self.positive_values().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_nodes_contain_zero_and_align_with_delay() {
        let nodes = GridFunction::uniform_nodes(0.5, 257).unwrap();
        assert_eq!(nodes.len(), 128 + 257);
        assert_eq!(nodes[0], -0.5);
        assert_eq!(nodes[128], 0.0);
        assert_eq!(*nodes.last().unwrap(), 1.0);
        // a node shifted by the delay lands on a node
        let h = 1.0 / 256.0;
        assert!((nodes[1] - (-0.5 + h)).abs() < 1e-15);
        let no_history = GridFunction::uniform_nodes(0.0, 5).unwrap();
        assert_eq!(no_history, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn interpolation_is_exact_at_nodes() {
        let nodes = GridFunction::uniform_nodes(0.3, 11).unwrap();
        let g = GridFunction::from_fn(nodes.clone(), |t| t * t).unwrap();
        for &t in &nodes {
            assert_eq!(g.eval(t), t * t);
        }
        assert!((g.eval(0.05) - 0.005).abs() < 1e-15);
        assert_eq!(g.eval(2.0), 1.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(vec![0.0, 0.5, 0.5, 1.0], vec![0.0; 4]).is_err());
        assert!(GridFunction::new(vec![0.1, 0.5, 1.0], vec![0.0; 3]).is_err());
        assert!(GridFunction::new(vec![-0.5, -0.1, 0.5, 1.0], vec![0.0; 4]).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0], vec![0.0]).is_err());
    }
}
