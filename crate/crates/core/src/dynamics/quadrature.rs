use serde::Serialize;

use crate::error::{Error, Result};

/// How a [`QuadratureGrid`] was built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum QuadratureRule {
    /// Composite Gauss-Legendre on equal panels.
    GaussLegendre { panels: usize, nodes_per_panel: usize },
    /// Left-endpoint sums on a partition of the interval.
    LeftRiemann,
}

/// Nodes and positive weights discretizing an integral over `[0, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    end: f64,
    rule: QuadratureRule,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and its derivative
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

impl QuadratureGrid {
    /// Composite Gauss-Legendre on `[0, end]`.
    pub fn gauss_legendre(end: f64, panels: usize, nodes_per_panel: usize) -> Result<Self> {
        if !(end.is_finite() && end > 0.0) {
            return Err(Error::Quadrature(format!("interval end must be positive, got {end}")));
        }
        if panels < 1 || nodes_per_panel < 2 {
            return Err(Error::Quadrature(format!(
                "need panels >= 1 and nodes_per_panel >= 2, got {panels} x {nodes_per_panel}"
            )));
        }
        let (x, w) = gauss_legendre(nodes_per_panel);
        let h = end / panels as f64;
        let mut nodes = Vec::with_capacity(panels * nodes_per_panel);
        let mut weights = Vec::with_capacity(panels * nodes_per_panel);
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Ok(QuadratureGrid { nodes, weights, end, rule: QuadratureRule::GaussLegendre { panels, nodes_per_panel } })
    }

    /// Left-endpoint rule on the partition `0 = p_0 < p_1 < ... < p_n = end`.
    pub fn left_riemann(partition: &[f64]) -> Result<Self> {
        if partition.len() < 2 || partition[0] != 0.0 {
            return Err(Error::Quadrature("partition must start at 0 and have two points".into()));
        }
        if partition.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
            || !partition.iter().all(|p| p.is_finite())
        {
            return Err(Error::Quadrature("partition must be strictly increasing".into()));
        }
        let nodes = partition[..partition.len() - 1].to_vec();
        let weights = partition.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(QuadratureGrid { nodes, weights, end: *partition.last().unwrap(), rule: QuadratureRule::LeftRiemann })
    }

    /// Nodes `{0, delta, 2 delta, ...}` below `end`, each weighted by `delta`.
    pub fn uniform_left(end: f64, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0 && end.is_finite() && end > 0.0) {
            return Err(Error::Quadrature(format!("bad uniform grid: end {end}, delta {delta}")));
        }
        let mut nodes = Vec::new();
        let mut j = 0usize;
        loop {
            let t = j as f64 * delta;
            if t >= end * (1.0 - 1e-12) {
                break;
            }
            nodes.push(t);
            j += 1;
        }
        let weights = vec![delta; nodes.len()];
        Ok(QuadratureGrid { nodes, weights, end, rule: QuadratureRule::LeftRiemann })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_j w_j f(t_j)` in node order.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    /// True when the nodes reflect onto themselves under `t -> end - t`.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|j| {
            let r = n - 1 - j;
            (self.nodes[j] - (self.end - self.nodes[r])).abs() <= 1e-13 * self.end
                && (self.weights[j] - self.weights[r]).abs() <= 1e-13 * self.weights[j]
        })
    }
}
