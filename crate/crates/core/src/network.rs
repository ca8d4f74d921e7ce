//! Feedback networks: channel partitions, the Möbius map, zero-delay and
//! finite-delay loop closure, and compilation of wired graphs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::component::LinearComponent;
use crate::doubled::DoubledMatrix;
use crate::error::{Error, Result};
use crate::generator::SpGenerator;
use crate::linalg::{self, CMatrix};
use crate::symplectic::SymplecticMatrix;
use crate::transfer::TransferFunction;

/// A component whose channels are split into external (port 1, first `n1`)
/// and internal (port 2, last `n2`) groups.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedComponent {
    base: LinearComponent,
    n1: usize,
    n2: usize,
}

/// Splits `g` so that `internal` (in the given order) forms port 2 and the
/// remaining channels, in ascending order, form port 1.
pub fn partition(g: &LinearComponent, internal: &[usize]) -> Result<PartitionedComponent> {
    let n = g.channels();
    let mut seen = alloc::vec![false; n];
    for &i in internal {
        if i >= n {
            return Err(Error::BadPartition(format!("channel {i} out of range for {n} channels")));
        }
        if seen[i] {
            return Err(Error::BadPartition(format!("channel {i} listed twice")));
        }
        seen[i] = true;
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
    if order.is_empty() {
        return Err(Error::BadPartition("no external channels left".into()));
    }
    let n1 = order.len();
    order.extend_from_slice(internal);
    Ok(PartitionedComponent {
        base: g.permute_channels(&order)?,
        n1,
        n2: internal.len(),
    })
}

impl PartitionedComponent {
    /// Uses the channel order of `base` as is: the first `n1` are external.
    pub fn from_ordered(base: LinearComponent, n1: usize) -> Result<Self> {
        let n = base.channels();
        if n1 == 0 || n1 > n {
            return Err(Error::BadPartition(format!("{n1} external channels out of {n}")));
        }
        Ok(Self { base, n1, n2: n - n1 })
    }

    /// Assembles the lumped component from its partitioned blocks.
    #[allow(clippy::too_many_arguments)]
    pub fn from_blocks(
        s11: &DoubledMatrix,
        s12: &DoubledMatrix,
        s21: &DoubledMatrix,
        s22: &DoubledMatrix,
        c1: &DoubledMatrix,
        c2: &DoubledMatrix,
        omega: SpGenerator,
        labels: Vec<String>,
        tol: f64,
    ) -> Result<Self> {
        let (n1, n2) = (s11.rows(), s22.rows());
        let n = n1 + n2;
        let assemble = |pick: fn(&DoubledMatrix) -> &CMatrix| {
            let mut out = CMatrix::zeros(n, n);
            out.view_mut((0, 0), (n1, n1)).copy_from(pick(s11));
            out.view_mut((0, n1), (n1, n2)).copy_from(pick(s12));
            out.view_mut((n1, 0), (n2, n1)).copy_from(pick(s21));
            out.view_mut((n1, n1), (n2, n2)).copy_from(pick(s22));
            out
        };
        let s = DoubledMatrix::from_blocks(assemble(DoubledMatrix::minus), assemble(DoubledMatrix::plus));
        let m = omega.modes();
        let stack = |pick: fn(&DoubledMatrix) -> &CMatrix| {
            let mut out = CMatrix::zeros(n, m);
            out.view_mut((0, 0), (n1, m)).copy_from(pick(c1));
            out.view_mut((n1, 0), (n2, m)).copy_from(pick(c2));
            out
        };
        let c = DoubledMatrix::from_blocks(stack(DoubledMatrix::minus), stack(DoubledMatrix::plus));
        let base = LinearComponent::new(SymplecticMatrix::new(s, tol)?, c, omega, labels)?;
        Self::from_ordered(base, n1)
    }

    pub fn base(&self) -> &LinearComponent {
        &self.base
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    fn range(&self, j: usize) -> Vec<usize> {
        match j {
            1 => (0..self.n1).collect(),
            2 => (self.n1..self.n1 + self.n2).collect(),
            _ => panic!("port index must be 1 or 2"),
        }
    }

    /// `Ŝ_jk` for `j, k ∈ {1, 2}`.
    pub fn s_hat(&self, j: usize, k: usize) -> DoubledMatrix {
        self.base.s_tilde().as_doubled().select(&self.range(j), &self.range(k))
    }

    /// `C̃_j` for `j ∈ {1, 2}`.
    pub fn c_block(&self, j: usize) -> DoubledMatrix {
        let cols: Vec<usize> = (0..self.base.modes()).collect();
        self.base.c_tilde().select(&self.range(j), &cols)
    }

    /// Largest residual of `Σ_k Ŝ_ki♭ Ŝ_kj = δ_ij` and
    /// `Σ_k Ŝ_ik Ŝ_jk♭ = δ_ij`.
    pub fn lemma1_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 1..=2 {
            for j in 1..=2 {
                let size = (self.range(i).len(), self.range(j).len());
                let mut left = DoubledMatrix::zeros(size.0, size.1);
                let mut right = DoubledMatrix::zeros(size.0, size.1);
                for k in 1..=2 {
                    left = &left + &(&self.s_hat(k, i).flat() * &self.s_hat(k, j));
                    right = &right + &(&self.s_hat(i, k) * &self.s_hat(j, k).flat());
                }
                let target = if i == j {
                    DoubledMatrix::identity(size.0)
                } else {
                    DoubledMatrix::zeros(size.0, size.1)
                };
                worst = worst.max(left.max_diff(&target)).max(right.max_diff(&target));
            }
        }
        worst
    }
}

fn well_posed_inverse(m: &DoubledMatrix, scale: f64) -> Result<DoubledMatrix> {
    let min_singular_value = linalg::min_singular_value(&m.embed())?;
    let threshold = 1e-10 * scale;
    if min_singular_value < threshold {
        return Err(Error::IllPosed {
            min_singular_value,
            threshold,
        });
    }
    m.inverse().ok_or(Error::IllPosed {
        min_singular_value,
        threshold,
    })
}

/// `Ψ(X) = Ŝ11 + Ŝ12 X (I − Ŝ22 X)⁻¹ Ŝ21`.
pub fn mobius(p: &PartitionedComponent, x: &DoubledMatrix) -> Result<DoubledMatrix> {
    if x.rows() != p.n2 || x.cols() != p.n2 {
        return Err(Error::Dimension(format!(
            "loop argument must be {0}x{0} blocks",
            p.n2
        )));
    }
    let s22 = p.s_hat(2, 2);
    let loop_inv = well_posed_inverse(
        &(&DoubledMatrix::identity(p.n2) - &(&s22 * x)),
        1.0 + s22.max_norm() * x.max_norm(),
    )?;
    Ok(&p.s_hat(1, 1) + &(&(&(&p.s_hat(1, 2) * x) * &loop_inv) * &p.s_hat(2, 1)))
}

/// Möbius map of a raw symplectic matrix whose first `n1` channels are
/// external.
pub fn mobius_raw(s: &SymplecticMatrix, n1: usize, x: &DoubledMatrix) -> Result<DoubledMatrix> {
    let p = PartitionedComponent::from_ordered(LinearComponent::static_component(s.clone()), n1)?;
    mobius(&p, x)
}

/// Residuals of the two Siegel-type identities
/// `Ψ(X)♭Ψ(Y) = I − Ŝ21♭(I − X♭Ŝ22♭)⁻¹(I − X♭Y)(I − Ŝ22Y)⁻¹Ŝ21` and
/// `Ψ(X)Ψ(Y)♭ = I − Ŝ12(I − XŜ22)⁻¹(I − XY♭)(I − Ŝ22♭Y♭)⁻¹Ŝ12♭`.
pub fn siegel_residuals(
    s: &SymplecticMatrix,
    n1: usize,
    x: &DoubledMatrix,
    y: &DoubledMatrix,
) -> Result<(f64, f64)> {
    let p = PartitionedComponent::from_ordered(LinearComponent::static_component(s.clone()), n1)?;
    let psi_x = mobius(&p, x)?;
    let psi_y = mobius(&p, y)?;
    let (s12, s21, s22) = (p.s_hat(1, 2), p.s_hat(2, 1), p.s_hat(2, 2));
    let id1 = DoubledMatrix::identity(n1);
    let id2 = DoubledMatrix::identity(p.n2);
    let inv = |m: &DoubledMatrix| {
        m.inverse().ok_or(Error::IllPosed {
            min_singular_value: 0.0,
            threshold: 0.0,
        })
    };
    let (xf, yf, s22f) = (x.flat(), y.flat(), s22.flat());

    let lhs1 = &psi_x.flat() * &psi_y;
    let mid1 = &(&inv(&(&id2 - &(&xf * &s22f)))? * &(&id2 - &(&xf * y))) * &inv(&(&id2 - &(&s22 * y)))?;
    let rhs1 = &id1 - &(&(&s21.flat() * &mid1) * &s21);

    let lhs2 = &psi_x * &psi_y.flat();
    let mid2 = &(&inv(&(&id2 - &(x * &s22)))? * &(&id2 - &(x * &yf))) * &inv(&(&id2 - &(&s22f * &yf)))?;
    let rhs2 = &id1 - &(&(&s12 * &mid2) * &s12.flat());

    Ok((lhs1.max_diff(&rhs1), lhs2.max_diff(&rhs2)))
}

/// Closes every internal channel with zero delay (`Θ → I`).
pub fn zero_delay_reduce(p: &PartitionedComponent) -> Result<LinearComponent> {
    let (s11, s12, s21, s22) = (p.s_hat(1, 1), p.s_hat(1, 2), p.s_hat(2, 1), p.s_hat(2, 2));
    let (c1, c2) = (p.c_block(1), p.c_block(2));
    let loop_inv = well_posed_inverse(
        &(&DoubledMatrix::identity(p.n2) - &s22),
        1.0 + s22.max_norm(),
    )?;
    let through = &loop_inv * &c2;
    let s0 = &s11 + &(&(&s12 * &loop_inv) * &s21);
    let c0 = &c1 + &(&s12 * &through);
    let cross = &(&(&c1.flat() * &s12) * &through) + &(&(&c2.flat() * &s22) * &through);
    let omega0 = p.base.omega().add(&SpGenerator::im_flat(&cross));
    let s0 = SymplecticMatrix::new(s0, 1e-6 * { let k = 1.0 + loop_inv.max_norm(); k * k })?;
    LinearComponent::new(s0, c0, omega0, p.base.mode_labels().to_vec())
}

/// Drift `Ã − Σ_j C̃_j♭ Ŝ_j2 (I − Ŝ22)⁻¹ C̃_2` of the zero-delay network,
/// computed directly from the partition.
pub fn zero_delay_drift(p: &PartitionedComponent) -> Result<DoubledMatrix> {
    let s22 = p.s_hat(2, 2);
    let (c1, c2) = (p.c_block(1), p.c_block(2));
    let loop_inv = well_posed_inverse(
        &(&DoubledMatrix::identity(p.n2) - &s22),
        1.0 + s22.max_norm(),
    )?;
    let through = &loop_inv * &c2;
    let cross = &(&(&c1.flat() * &p.s_hat(1, 2)) * &through) + &(&(&c2.flat() * &s22) * &through);
    let a = crate::state_space::realize(&p.base).a_tilde;
    Ok(&a - &cross)
}

/// Positive per-channel loop delays.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayVector {
    tau: Vec<f64>,
}

impl DelayVector {
    pub fn new(tau: Vec<f64>) -> Result<Self> {
        if let Some(bad) = tau.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::Parameter(format!("delays must be positive and finite, got {bad}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Full `2n2 × 2n2` value of `Θ(s)`. With `b#[s] = b[s*]#` the
    /// conjugate half carries the same factor `e^{−sτ}`.
    pub fn theta(&self, s: Complex64) -> CMatrix {
        let k = self.tau.len();
        CMatrix::from_fn(2 * k, 2 * k, |i, j| {
            if i == j {
                (-s * self.tau[i % k]).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// Rows/columns of a full `2n × 2n` value belonging to `idx` in both halves.
fn doubled_indices(idx: &[usize], n: usize) -> Vec<usize> {
    idx.iter().copied().chain(idx.iter().map(|i| i + n)).collect()
}

fn select_full(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// `Ξ11 + Ξ12 Θ (I − Ξ22 Θ)⁻¹ Ξ21` at `s`, from the lumped transfer
/// function. Returns the full `2n1 × 2n1` value.
pub fn finite_delay_response(p: &PartitionedComponent, d: &DelayVector, s: Complex64) -> Result<CMatrix> {
    let tf = TransferFunction::of(&p.base)?;
    finite_delay_response_with(&tf, p.n1, d, s)
}

pub(crate) fn finite_delay_response_with(
    tf: &TransferFunction,
    n1: usize,
    d: &DelayVector,
    s: Complex64,
) -> Result<CMatrix> {
    let n = tf.channels();
    let n2 = n - n1;
    if d.len() != n2 {
        return Err(Error::Dimension(format!("{} delays for {n2} internal channels", d.len())));
    }
    let xi = tf.eval(s)?;
    let ext: Vec<usize> = (0..n1).collect();
    let int: Vec<usize> = (n1..n).collect();
    let (e, i) = (doubled_indices(&ext, n), doubled_indices(&int, n));
    let (x11, x12, x21, x22) = (
        select_full(&xi, &e, &e),
        select_full(&xi, &e, &i),
        select_full(&xi, &i, &e),
        select_full(&xi, &i, &i),
    );
    let theta = d.theta(s);
    let loop_m = linalg::identity(2 * n2) - &x22 * &theta;
    let min_singular_value = linalg::min_singular_value(&loop_m)?;
    let threshold = 1e-10 * (1.0 + linalg::max_abs(&x22) * linalg::max_abs(&theta));
    if min_singular_value < threshold {
        return Err(Error::IllPosed {
            min_singular_value,
            threshold,
        });
    }
    let solved = linalg::solve(&loop_m, &x21).ok_or(Error::IllPosed {
        min_singular_value,
        threshold,
    })?;
    Ok(x11 + x12 * theta * solved)
}

/// An input or output port `node.port` (ports are 0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortRef {
    pub node: String,
    pub port: usize,
}

impl PortRef {
    pub fn new(node: impl Into<String>, port: usize) -> Self {
        Self {
            node: node.into(),
            port,
        }
    }
}

impl core::fmt::Display for PortRef {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}.{}", self.node, self.port)
    }
}

/// A wire from an output port to an input port, optionally delayed.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: PortRef,
    pub to: PortRef,
    pub delay: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    pub nodes: Vec<(String, LinearComponent)>,
    pub edges: Vec<Edge>,
    /// External inputs in declaration order.
    pub inputs: Vec<PortRef>,
    /// External outputs in declaration order.
    pub outputs: Vec<PortRef>,
}

/// A compiled network: the lumped component with external channels first
/// and one internal channel per edge, plus the per-edge delays.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledNetwork {
    pub partition: PartitionedComponent,
    /// Internal edges in channel order.
    pub edges: Vec<Edge>,
}

impl NetworkGraph {
    fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|(n, _)| n == name)
    }

    fn check_port(&self, p: &PortRef) -> Result<usize> {
        let i = self
            .node_index(&p.node)
            .ok_or_else(|| Error::UnknownPort(p.to_string()))?;
        if p.port >= self.nodes[i].1.channels() {
            return Err(Error::UnknownPort(p.to_string()));
        }
        Ok(i)
    }

    /// Checks port usage and looks for loops made of wires alone.
    pub fn validate(&self) -> Result<()> {
        for (i, (name, _)) in self.nodes.iter().enumerate() {
            if self.nodes[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::Parameter(format!("duplicate node name {name}")));
            }
        }
        let mut out_used: Vec<Vec<bool>> = self.nodes.iter().map(|(_, g)| alloc::vec![false; g.channels()]).collect();
        let mut in_used = out_used.clone();
        let mark = |used: &mut Vec<Vec<bool>>, p: &PortRef| -> Result<()> {
            let i = self.check_port(p)?;
            if used[i][p.port] {
                return Err(Error::PortReuse(p.to_string()));
            }
            used[i][p.port] = true;
            Ok(())
        };
        for e in &self.edges {
            mark(&mut out_used, &e.from)?;
            mark(&mut in_used, &e.to)?;
            if let Some(t) = e.delay {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::Parameter(format!("edge {} -> {} has delay {t}", e.from, e.to)));
                }
            }
        }
        for p in &self.outputs {
            mark(&mut out_used, p)?;
        }
        for p in &self.inputs {
            mark(&mut in_used, p)?;
        }
        for (i, (name, _)) in self.nodes.iter().enumerate() {
            if let Some(k) = out_used[i].iter().position(|u| !u) {
                return Err(Error::DanglingPort(format!("{name}.{k} (output)")));
            }
            if let Some(k) = in_used[i].iter().position(|u| !u) {
                return Err(Error::DanglingPort(format!("{name}.{k} (input)")));
            }
        }
        if self.inputs.len() != self.outputs.len() {
            return Err(Error::BadPartition(format!(
                "{} external inputs but {} external outputs",
                self.inputs.len(),
                self.outputs.len()
            )));
        }
        if self.inputs.is_empty() {
            return Err(Error::BadPartition("network has no external ports".into()));
        }
        self.find_wire_cycle()
    }

    fn is_wire(&self, node: &str) -> bool {
        self.node_index(node).is_some_and(|i| {
            let g = &self.nodes[i].1;
            g.is_static()
                && g.s_tilde()
                    .as_doubled()
                    .approx_eq(&DoubledMatrix::identity(g.channels()), 0.0)
        })
    }

    fn find_wire_cycle(&self) -> Result<()> {
        for (start, e) in self.edges.iter().enumerate() {
            let mut current = e;
            let mut steps = 0;
            while self.is_wire(&current.to.node) {
                let next = PortRef::new(current.to.node.clone(), current.to.port);
                match self.edges.iter().position(|x| x.from == next) {
                    Some(k) if k == start => {
                        return Err(Error::CycleWithoutComponent(current.to.node.clone()));
                    }
                    Some(k) => current = &self.edges[k],
                    None => break,
                }
                steps += 1;
                if steps > self.edges.len() {
                    break;
                }
            }
        }
        Ok(())
    }

    /// Lumps all nodes into one component and orders channels as
    /// `[external ports, internal edges]`. Internal edges are sorted by
    /// (source node, source port).
    pub fn compile(&self) -> Result<CompiledNetwork> {
        self.validate()?;
        let mut offsets = Vec::with_capacity(self.nodes.len());
        let mut lumped: Option<LinearComponent> = None;
        let mut total = 0;
        for (name, g) in &self.nodes {
            offsets.push(total);
            total += g.channels();
            let g = g.clone().prefixed(name);
            lumped = Some(match lumped {
                None => g,
                Some(acc) => acc.direct_sum(&g)?,
            });
        }
        let lumped = lumped.ok_or_else(|| Error::BadPartition("network has no nodes".into()))?;
        let global = |p: &PortRef| -> usize {
            let i = self.node_index(&p.node).expect("validated port");
            offsets[i] + p.port
        };
        let mut edges = self.edges.clone();
        edges.sort_by_key(|e| (self.node_index(&e.from.node), e.from.port));
        let mut out_order: Vec<usize> = self.outputs.iter().map(global).collect();
        let mut in_order: Vec<usize> = self.inputs.iter().map(global).collect();
        out_order.extend(edges.iter().map(|e| global(&e.from)));
        in_order.extend(edges.iter().map(|e| global(&e.to)));
        let base = lumped.reorder_ports(&out_order, &in_order)?;
        Ok(CompiledNetwork {
            partition: PartitionedComponent::from_ordered(base, self.inputs.len())?,
            edges,
        })
    }
}

impl CompiledNetwork {
    pub fn has_delays(&self) -> bool {
        self.edges.iter().any(|e| e.delay.is_some_and(|t| t > 0.0))
    }

    /// The zero-delay network, ignoring any delays on the edges.
    pub fn reduce_zero_delay(&self) -> Result<LinearComponent> {
        zero_delay_reduce(&self.partition)
    }

    /// Closes the undelayed edges with zero delay and returns the remaining
    /// partition over `[external, delayed]` channels with its delays.
    pub fn eliminate_undelayed(&self) -> Result<(PartitionedComponent, DelayVector)> {
        let n1 = self.partition.n1();
        let n = self.partition.base().channels();
        let delayed: Vec<usize> = (0..self.edges.len())
            .filter(|&k| self.edges[k].delay.is_some_and(|t| t > 0.0))
            .collect();
        let undelayed: Vec<usize> = (0..self.edges.len())
            .filter(|&k| !delayed.contains(&k))
            .collect();
        let mut order: Vec<usize> = (0..n1).collect();
        order.extend(delayed.iter().map(|k| n1 + k));
        order.extend(undelayed.iter().map(|k| n1 + k));
        debug_assert_eq!(order.len(), n);
        let base = self.partition.base().permute_channels(&order)?;
        let outer = n1 + delayed.len();
        let reduced = if undelayed.is_empty() {
            base
        } else {
            zero_delay_reduce(&PartitionedComponent::from_ordered(base, outer)?)?
        };
        let tau = delayed.iter().map(|&k| self.edges[k].delay.unwrap_or(0.0)).collect();
        Ok((PartitionedComponent::from_ordered(reduced, n1)?, DelayVector::new(tau)?))
    }

    /// Frequency response of the network at `s`, honouring delays.
    pub fn response(&self, s: Complex64) -> Result<CMatrix> {
        if !self.has_delays() {
            return TransferFunction::of(&self.reduce_zero_delay()?)?.eval(s);
        }
        let (p, d) = self.eliminate_undelayed()?;
        finite_delay_response(&p, &d, s)
    }

    /// Evaluator reusable across many frequencies.
    pub fn responder(&self) -> Result<NetworkResponder> {
        if !self.has_delays() {
            return Ok(NetworkResponder {
                tf: TransferFunction::of(&self.reduce_zero_delay()?)?,
                n1: self.partition.n1(),
                delays: None,
            });
        }
        let (p, d) = self.eliminate_undelayed()?;
        Ok(NetworkResponder {
            tf: TransferFunction::of(p.base())?,
            n1: p.n1(),
            delays: Some(d),
        })
    }
}

/// Precomputed evaluator for [`CompiledNetwork::response`].
#[derive(Debug, Clone)]
pub struct NetworkResponder {
    tf: TransferFunction,
    n1: usize,
    delays: Option<DelayVector>,
}

impl NetworkResponder {
    pub fn eval(&self, s: Complex64) -> Result<CMatrix> {
        match &self.delays {
            None => self.tf.eval(s),
            Some(d) => finite_delay_response_with(&self.tf, self.n1, d, s),
        }
    }

    pub fn channels(&self) -> usize {
        self.n1
    }
}
