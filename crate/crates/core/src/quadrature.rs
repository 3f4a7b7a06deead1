//! Gauss-Legendre rules on arbitrary intervals.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let n = NonZeroUsize::new(n).expect("Gauss rule needs at least one node");
        let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(n).iter().map(|(x, w)| (*x, *w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 7, 33, 64] {
            let rule = GaussRule::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}: {s}");
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_to_degree_2n_minus_1() {
        let rule = GaussRule::new(12);
        for p in 0..24 {
            let got = rule.integrate(1.0, 2.0, |x| x.powi(p));
            let exact = (2f64.powi(p + 1) - 1.0) / (p as f64 + 1.0);
            assert!(((got - exact) / exact).abs() < 1e-14, "p={p}");
        }
    }
}
