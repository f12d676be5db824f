//! Gaussian quadrature rules generated on demand by Golub–Welsch.
//!
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix of
//! the weight's orthogonal-polynomial recurrence; weights come from the
//! first components of its eigenvectors. The Jacobi eigensolver from
//! [`crate::linalg`] does the work, so the rules need no tables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::linalg::{eig_sym_vectors, LinalgError, SymMatrix};
use crate::special::gamma;

/// One quadrature rule: `integral of f(x) w(x) dx ~= sum w_i f(x_i)`.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> Result<Rule, LinalgError> {
    let n = diag.len();
    let jacobi = SymMatrix::from_fn(n, |i, j| {
        if i == j {
            diag[i]
        } else if j == i + 1 {
            offdiag[i]
        } else if i == j + 1 {
            offdiag[j]
        } else {
            0.0
        }
    })?;
    let (values, vectors) = eig_sym_vectors(&jacobi)?;
    let weights = (0..n)
        .map(|k| {
            let v0 = vectors.get(0, k);
            mu0 * v0 * v0
        })
        .collect();
    Ok(Rule {
        nodes: values,
        weights,
    })
}

type Cache = Mutex<HashMap<(u8, usize, u64), Arc<Rule>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Hermite rule for the weight `exp(-x^2)` on the whole line.
pub fn gauss_hermite(n: usize) -> Arc<Rule> {
    assert!(n >= 1);
    let key = (0u8, n, 0u64);
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let rule = Arc::new(
        golub_welsch(&diag, &offdiag, std::f64::consts::PI.sqrt())
            .expect("Hermite Jacobi matrix is well conditioned"),
    );
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}

/// Generalized Gauss–Laguerre rule for the weight `x^alpha exp(-x)` on
/// `[0, inf)`; requires `alpha > -1`.
pub fn gauss_laguerre(n: usize, alpha: f64) -> Arc<Rule> {
    assert!(n >= 1);
    assert!(alpha > -1.0, "alpha must be > -1");
    let key = (1u8, n, alpha.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return rule.clone();
    }
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let offdiag: Vec<f64> = (1..n)
        .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
        .collect();
    let rule = Arc::new(
        golub_welsch(&diag, &offdiag, gamma(alpha + 1.0))
            .expect("Laguerre Jacobi matrix is well conditioned"),
    );
    cache().lock().unwrap().insert(key, rule.clone());
    rule
}
