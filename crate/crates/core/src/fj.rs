//! Friedkin-Johnsen dynamics and the opinion indices built on them.
//!
//! Every index matrix is a rational function of `A = I + L`, so products
//! with it reduce to one or two sparse solves against `A`:
//!
//! | index                      | `M x`                              |
//! |----------------------------|------------------------------------|
//! | disagreement-controversy   | `A⁻¹x`                             |
//! | controversy                | `A⁻¹A⁻¹x`                          |
//! | disagreement               | `A⁻¹x − A⁻¹A⁻¹x`                   |
//! | polarization               | `A⁻¹(A⁻¹x − mean(A⁻¹x))`           |
//! | internal conflict          | `r − A⁻¹r` with `r = x − A⁻¹x`     |
//!
//! No dense inverse is ever formed.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::Arc;

use lru::LruCache;
use parking_lot::Mutex;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::numeric::{compensated_sum, dot, norm2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexKind {
    Sum,
    Polarization,
    Disagreement,
    InternalConflict,
    Controversy,
    DisagreementControversy,
}

impl IndexKind {
    pub const ALL: [IndexKind; 6] = [
        IndexKind::Sum,
        IndexKind::Polarization,
        IndexKind::Disagreement,
        IndexKind::InternalConflict,
        IndexKind::Controversy,
        IndexKind::DisagreementControversy,
    ];

    pub const QUADRATIC: [IndexKind; 5] = [
        IndexKind::Polarization,
        IndexKind::Disagreement,
        IndexKind::InternalConflict,
        IndexKind::Controversy,
        IndexKind::DisagreementControversy,
    ];

    pub fn is_quadratic(self) -> bool {
        self != IndexKind::Sum
    }

    /// Whether every entry of the index matrix is non-negative.
    pub fn has_nonnegative_matrix(self) -> bool {
        matches!(
            self,
            IndexKind::Controversy | IndexKind::DisagreementControversy
        )
    }

    pub fn short_name(self) -> &'static str {
        match self {
            IndexKind::Sum => "sum",
            IndexKind::Polarization => "pol",
            IndexKind::Disagreement => "dis",
            IndexKind::InternalConflict => "int",
            IndexKind::Controversy => "con",
            IndexKind::DisagreementControversy => "discon",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IndexKind::ALL
            .into_iter()
            .find(|k| k.short_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation(format!("unknown index {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Stop once `‖b − Ax‖₂ ≤ tolerance · ‖b‖₂`.
    pub relative_residual_tolerance: f64,
    /// Defaults to `10 n` when unset.
    pub max_iterations: Option<usize>,
    pub jacobi_preconditioner: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            relative_residual_tolerance: 1e-10,
            max_iterations: None,
            jacobi_preconditioner: false,
        }
    }
}

impl SolverConfig {
    fn iteration_limit(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or(10 * n).max(1)
    }

    fn validate(&self) -> Result<()> {
        if !(self.relative_residual_tolerance > 0.0) {
            return Err(Error::validation("solver tolerance must be positive"));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::validation("solver needs at least one iteration"));
        }
        Ok(())
    }
}

/// Solves `(I + L) x = b` by (optionally Jacobi-preconditioned) conjugate
/// gradients.
pub fn solve_shifted_laplacian(graph: &Graph, b: &[f64], config: &SolverConfig) -> Result<Vec<f64>> {
    graph.check_len(b.len())?;
    config.validate()?;
    let n = b.len();
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let target = config.relative_residual_tolerance * b_norm;
    let inv_diag: Option<Vec<f64>> = config
        .jacobi_preconditioner
        .then(|| (0..n).map(|u| 1.0 / (1.0 + graph.weighted_degree(u))).collect());
    let precondition = |r: &[f64], z: &mut [f64]| match &inv_diag {
        Some(d) => z.iter_mut().zip(r).zip(d).for_each(|((z, r), d)| *z = r * d),
        None => z.copy_from_slice(r),
    };

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let limit = config.iteration_limit(n);
    let mut residual = b_norm;
    for _ in 0..limit {
        graph.shifted_laplacian_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = norm2(&r);
        if residual <= target {
            // confirm against the true residual; the recurrence drifts
            graph.shifted_laplacian_into(&x, &mut ap);
            let true_res = b.iter().zip(&ap).map(|(b, a)| (b - a) * (b - a)).sum::<f64>().sqrt();
            if true_res <= target {
                return Ok(x);
            }
            r.iter_mut().zip(b).zip(&ap).for_each(|((r, b), a)| *r = b - a);
            residual = true_res;
        }
        precondition(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver {
        iterations: limit,
        residual: residual / b_norm,
    })
}

/// One synchronous Friedkin-Johnsen update:
/// `z'_u = (sum_v w_uv z_v + s_u) / (1 + sum_v w_uv)`.
pub fn fj_step(graph: &Graph, z: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    graph.check_len(z.len())?;
    graph.check_len(s.len())?;
    let mut out = vec![0.0; z.len()];
    fj_step_into(graph, z, s, &mut out);
    Ok(out)
}

pub(crate) fn fj_step_into(graph: &Graph, z: &[f64], s: &[f64], out: &mut [f64]) {
    for (u, o) in out.iter_mut().enumerate() {
        let mut acc = s[u];
        for e in graph.out_edges(u) {
            acc += graph.weight(e) * z[graph.target(e)];
        }
        *o = acc / (1.0 + graph.weighted_degree(u));
    }
}

/// Equilibrium expressed opinions `z* = (I + L)⁻¹ s`.
pub fn fj_equilibrium(graph: &Graph, s: &[f64], config: &SolverConfig) -> Result<Vec<f64>> {
    let z = solve_shifted_laplacian(graph, s, config)?;
    if let Some(x) = z.iter().find(|x| !(-1e-9..=1.0 + 1e-9).contains(*x)) {
        log::debug!("equilibrium entry {x} is outside [0, 1]");
    }
    Ok(z)
}

fn mean(x: &[f64]) -> f64 {
    compensated_sum(x.iter().copied()) / x.len() as f64
}

/// Value of an index at innate opinions `s`.
pub fn index_value(graph: &Graph, s: &[f64], kind: IndexKind, config: &SolverConfig) -> Result<f64> {
    graph.check_len(s.len())?;
    if kind == IndexKind::Sum {
        return Ok(compensated_sum(s.iter().copied()));
    }
    let z = fj_equilibrium(graph, s, config)?;
    let value = match kind {
        IndexKind::Sum => unreachable!(),
        IndexKind::Polarization => {
            let m = mean(&z);
            compensated_sum(z.iter().map(|x| (x - m) * (x - m)))
        }
        IndexKind::Disagreement => compensated_sum(graph.edges().map(|(u, v, w)| {
            let d = z[u] - z[v];
            w * d * d
        })),
        IndexKind::InternalConflict => {
            compensated_sum(s.iter().zip(&z).map(|(s, z)| (s - z) * (s - z)))
        }
        IndexKind::Controversy => compensated_sum(z.iter().map(|x| x * x)),
        IndexKind::DisagreementControversy => {
            compensated_sum(s.iter().zip(&z).map(|(s, z)| s * z))
        }
    };
    Ok(value)
}

/// `M x` for a quadratic index matrix, computed with solves only.
pub fn index_matrix_apply(
    graph: &Graph,
    kind: IndexKind,
    x: &[f64],
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    if !kind.is_quadratic() {
        return Err(Error::contract("the sum index has no matrix form"));
    }
    let a = solve_shifted_laplacian(graph, x, config)?;
    let out = match kind {
        IndexKind::Sum => unreachable!(),
        IndexKind::DisagreementControversy => a,
        IndexKind::Controversy => solve_shifted_laplacian(graph, &a, config)?,
        IndexKind::Disagreement => {
            let aa = solve_shifted_laplacian(graph, &a, config)?;
            a.iter().zip(&aa).map(|(a, aa)| a - aa).collect()
        }
        IndexKind::Polarization => {
            let m = mean(&a);
            let centered: Vec<f64> = a.iter().map(|a| a - m).collect();
            solve_shifted_laplacian(graph, &centered, config)?
        }
        IndexKind::InternalConflict => {
            let r: Vec<f64> = x.iter().zip(&a).map(|(x, a)| x - a).collect();
            let ar = solve_shifted_laplacian(graph, &r, config)?;
            r.iter().zip(&ar).map(|(r, ar)| r - ar).collect()
        }
    };
    Ok(out)
}

/// Linear gains `w_u = (2 sᵀM)_u Δs_u` of a quadratic index.
pub fn linear_gain_vector(
    graph: &Graph,
    s: &[f64],
    delta: &[f64],
    kind: IndexKind,
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    if !kind.is_quadratic() {
        return Err(Error::contract(
            "the sum index uses the adjustment vector directly as its gains",
        ));
    }
    graph.check_len(s.len())?;
    graph.check_len(delta.len())?;
    let ms = index_matrix_apply(graph, kind, s, config)?;
    Ok(ms.iter().zip(delta).map(|(m, d)| 2.0 * m * d).collect())
}

/// Row sums `M ℓ` of a quadratic index matrix.
pub fn index_row_sums(graph: &Graph, kind: IndexKind, config: &SolverConfig) -> Result<Vec<f64>> {
    let ones = vec![1.0; graph.node_count()];
    index_matrix_apply(graph, kind, &ones, config)
}

/// `(ŝᵀMŝ − sᵀMs) / sᵀMs`, or the same ratio of sums for [`IndexKind::Sum`].
pub fn relative_increase(
    graph: &Graph,
    s: &[f64],
    s_adjusted: &[f64],
    kind: IndexKind,
    config: &SolverConfig,
) -> Result<f64> {
    let base = index_value(graph, s, kind, config)?;
    if base == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    let adjusted = index_value(graph, s_adjusted, kind, config)?;
    Ok((adjusted - base) / base)
}

/// Memoized matrix columns keyed by `(kind, column)`, least recently used
/// entries evicted first. Safe to share between threads; holds columns of a
/// single graph.
type ColumnKey = (IndexKind, NodeId);

pub struct ColumnCache {
    inner: Mutex<LruCache<ColumnKey, Arc<Vec<f64>>>>,
}

impl ColumnCache {
    pub const DEFAULT_CAPACITY: usize = 4096;

    pub fn new(capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        ColumnCache {
            inner: Mutex::new(LruCache::new(cap)),
        }
    }

    pub fn len(&self) -> usize {
        self.inner.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for ColumnCache {
    fn default() -> Self {
        Self::new(Self::DEFAULT_CAPACITY)
    }
}

/// Column `M e_v` of a quadratic index matrix.
pub fn index_matrix_column(
    graph: &Graph,
    kind: IndexKind,
    v: NodeId,
    config: &SolverConfig,
    cache: &ColumnCache,
) -> Result<Arc<Vec<f64>>> {
    if v >= graph.node_count() {
        return Err(Error::validation(format!("node {v} is out of range")));
    }
    if let Some(col) = cache.inner.lock().get(&(kind, v)) {
        return Ok(col.clone());
    }
    let mut e = vec![0.0; graph.node_count()];
    e[v] = 1.0;
    let col = Arc::new(index_matrix_apply(graph, kind, &e, config)?);
    cache.inner.lock().put((kind, v), col.clone());
    Ok(col)
}
