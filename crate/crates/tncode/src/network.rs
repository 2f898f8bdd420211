//! Tensor-network graph model and contraction drivers.
//!
//! A network is a set of lego instances, edges between legs, and a role
//! (physical or logical) for every dangling leg. `build` contracts all edges
//! into one check matrix over the dangling legs, keeping provenance back to
//! the individual lego generators. `plan_contraction` searches for an
//! ordering in which every gluing step consumes a correctable erasure of the
//! partial network, which is what makes step-by-step construction an
//! isometry.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::time::Instant;

use crate::analysis::is_correctable_erasure;
use crate::duality::{extract, CodeReport};
use crate::fieldvec::{FieldMatrix, FieldModulus};
use crate::pushing::SymbolicUPS;
use crate::symplectic::CheckMatrix;
use crate::trace::conjoin_combined;
use crate::{Error, Result};

/// A reusable building block: a full-rank state matrix plus optional
/// symbolic operator entries.
#[derive(Debug, Clone)]
pub struct Lego {
    pub name: String,
    pub state_matrix: CheckMatrix,
    pub ups_catalog: Vec<SymbolicUPS>,
}

impl Lego {
    pub fn new(name: impl Into<String>, state_matrix: CheckMatrix) -> Result<Self> {
        if state_matrix.rank() != state_matrix.n_legs() {
            return Err(Error::Shape(format!(
                "lego state matrix must be full rank: {} rows on {} legs",
                state_matrix.rank(),
                state_matrix.n_legs()
            )));
        }
        Ok(Lego {
            name: name.into(),
            state_matrix,
            ups_catalog: Vec::new(),
        })
    }

    pub fn with_ups(mut self, ups: SymbolicUPS) -> Result<Self> {
        if ups.labels.len() != self.n_legs() {
            return Err(Error::Shape(format!(
                "symbolic entry {} has {} labels for {} legs",
                ups.name,
                ups.labels.len(),
                self.n_legs()
            )));
        }
        self.ups_catalog.push(ups);
        Ok(self)
    }

    pub fn n_legs(&self) -> usize {
        self.state_matrix.n_legs()
    }
}

/// One leg of one placed instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LegRef {
    pub instance: String,
    pub leg: usize,
}

impl LegRef {
    pub fn new(instance: impl Into<String>, leg: usize) -> Self {
        LegRef {
            instance: instance.into(),
            leg,
        }
    }
}

impl fmt::Display for LegRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.leg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Physical,
    Logical,
}

#[derive(Debug, Clone)]
pub struct TensorNetwork {
    pub dimension: FieldModulus,
    instances: Vec<(String, Lego)>,
    edges: Vec<(LegRef, LegRef)>,
    roles: BTreeMap<LegRef, Role>,
    default_role: Option<Role>,
}

impl TensorNetwork {
    pub fn new(dimension: FieldModulus) -> Self {
        TensorNetwork {
            dimension,
            instances: Vec::new(),
            edges: Vec::new(),
            roles: BTreeMap::new(),
            default_role: None,
        }
    }

    pub fn add_instance(&mut self, id: impl Into<String>, lego: Lego) -> Result<()> {
        let id = id.into();
        if self.instance_index(&id).is_some() {
            return Err(Error::Network(format!("duplicate instance id {}", id)));
        }
        if lego.state_matrix.modulus() != self.dimension {
            return Err(Error::ModulusMismatch(
                self.dimension.get(),
                lego.state_matrix.modulus().get(),
            ));
        }
        self.instances.push((id, lego));
        Ok(())
    }

    pub fn add_edge(&mut self, a: LegRef, b: LegRef) -> Result<()> {
        for r in [&a, &b] {
            let (_, lego) = self
                .instances
                .iter()
                .find(|(id, _)| *id == r.instance)
                .ok_or_else(|| Error::Network(format!("edge references unknown instance {}", r.instance)))?;
            if r.leg >= lego.n_legs() {
                return Err(Error::IndexOutOfBounds {
                    index: r.leg,
                    bound: lego.n_legs(),
                });
            }
        }
        if a == b {
            return Err(Error::Network(format!("edge connects {} to itself", a)));
        }
        for (x, y) in &self.edges {
            for r in [&a, &b] {
                if r == x || r == y {
                    return Err(Error::Network(format!("leg {} used by two edges", r)));
                }
            }
        }
        self.edges.push((a, b));
        Ok(())
    }

    pub fn set_role(&mut self, leg: LegRef, role: Role) {
        self.roles.insert(leg, role);
    }

    pub fn set_default_role(&mut self, role: Role) {
        self.default_role = Some(role);
    }

    pub fn instances(&self) -> impl Iterator<Item = (&str, &Lego)> {
        self.instances.iter().map(|(id, l)| (id.as_str(), l))
    }

    pub fn edges(&self) -> &[(LegRef, LegRef)] {
        &self.edges
    }

    fn instance_index(&self, id: &str) -> Option<usize> {
        self.instances.iter().position(|(i, _)| i == id)
    }

    fn leg_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.instances.len());
        let mut acc = 0;
        for (_, lego) in &self.instances {
            offsets.push(acc);
            acc += lego.n_legs();
        }
        offsets
    }

    fn total_legs(&self) -> usize {
        self.instances.iter().map(|(_, l)| l.n_legs()).sum()
    }

    /// Dangling legs in instance insertion order, legs ascending.
    pub fn dangling_legs(&self) -> Vec<LegRef> {
        let used: HashSet<&LegRef> = self
            .edges
            .iter()
            .flat_map(|(a, b)| [a, b])
            .collect();
        let mut out = Vec::new();
        for (id, lego) in &self.instances {
            for leg in 0..lego.n_legs() {
                let r = LegRef::new(id.clone(), leg);
                if !used.contains(&r) {
                    out.push(r);
                }
            }
        }
        out
    }

    /// Role of a dangling leg, considering the default.
    pub fn role_of(&self, leg: &LegRef) -> Result<Role> {
        self.roles
            .get(leg)
            .copied()
            .or(self.default_role)
            .ok_or_else(|| Error::MissingRole(leg.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let dangling: HashSet<LegRef> = self.dangling_legs().into_iter().collect();
        for leg in &dangling {
            self.role_of(leg)?;
        }
        for leg in self.roles.keys() {
            if self.instance_index(&leg.instance).is_none() {
                return Err(Error::Network(format!(
                    "role assigned to unknown instance {}",
                    leg.instance
                )));
            }
            if !dangling.contains(leg) {
                return Err(Error::Network(format!(
                    "role assigned to contracted leg {}",
                    leg
                )));
            }
        }
        Ok(())
    }

    /// Contract every edge, starting from the direct sum of all instances.
    pub fn build(&self) -> Result<BuiltState> {
        self.validate()?;
        let d = self.dimension;
        let total = self.total_legs();
        let offsets = self.leg_offsets();

        let mut raw = FieldMatrix::zeros(0, 2 * total, d);
        let mut origin = Vec::new();
        for (idx, (id, lego)) in self.instances.iter().enumerate() {
            let n = lego.n_legs();
            let m = lego.state_matrix.matrix();
            for r in 0..m.rows() {
                let row = m.row(r);
                let mut v = vec![0u32; 2 * total];
                for l in 0..n {
                    v[offsets[idx] + l] = row[l];
                    v[total + offsets[idx] + l] = row[n + l];
                }
                raw.push_row(&v);
                origin.push((id.clone(), r));
            }
        }
        let (red, to_canonical) = raw.rref_tracked();
        let combined = CheckMatrix::from_commuting_matrix(red.matrix, total);

        let global = |r: &LegRef| offsets[self.instance_index(&r.instance).unwrap()] + r.leg;
        let pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|(a, b)| (global(a), global(b)))
            .collect();
        let traced = conjoin_combined(&combined, &pairs)?;

        let consumed: HashSet<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        let mut legs = Vec::new();
        for (idx, (id, lego)) in self.instances.iter().enumerate() {
            for l in 0..lego.n_legs() {
                if !consumed.contains(&(offsets[idx] + l)) {
                    legs.push(LegRef::new(id.clone(), l));
                }
            }
        }
        debug_assert_eq!(legs.len(), traced.matrix.n_legs());
        if traced.matrix.rank() != legs.len() {
            return Err(Error::TraceRank {
                got: traced.matrix.rank(),
                expected: legs.len(),
            });
        }
        let provenance = traced.provenance.matmul(&to_canonical)?;
        Ok(BuiltState {
            network: self.clone(),
            matrix: traced.matrix,
            legs,
            provenance,
            generator_origin: origin,
        })
    }

    /// Search for an instance order where each placement consumes a
    /// correctable erasure of the partial network built so far. Greedy in
    /// input order with one level of backtracking; falls back to the input
    /// order with honest flags when the search fails.
    pub fn plan_contraction(&self, step_limit: Option<usize>) -> Result<PlanOutcome> {
        self.validate()?;
        let count = self.instances.len();
        let limit = step_limit.unwrap_or(count);
        if count == 0 {
            return Ok(PlanOutcome::Isometric(ContractionSchedule { steps: Vec::new() }));
        }

        if let Some(order) = self.greedy_order(limit)? {
            let steps = self.realize_schedule(&order)?;
            debug_assert!(steps.iter().all(|s| s.isometric));
            return Ok(PlanOutcome::Isometric(ContractionSchedule { steps }));
        }
        let fallback: Vec<usize> = (0..count).collect();
        let steps = self.realize_schedule(&fallback)?;
        let first_violation = steps
            .iter()
            .position(|s| !s.isometric)
            .unwrap_or(steps.len().saturating_sub(1));
        Ok(PlanOutcome::Fallback {
            schedule: ContractionSchedule { steps },
            first_violation,
        })
    }

    fn greedy_order(&self, limit: usize) -> Result<Option<Vec<usize>>> {
        let count = self.instances.len();
        let mut order: Vec<usize> = Vec::new();
        let mut level_start: Vec<usize> = vec![0];
        let mut backtracks = 0usize;
        while order.len() < count.min(limit) {
            let level = order.len();
            let from = level_start[level];
            let mut placed_one = false;
            for cand in from..count {
                if order.contains(&cand) {
                    continue;
                }
                if self.placement_is_isometric(&order, cand)? {
                    order.push(cand);
                    level_start[level] = cand + 1;
                    level_start.push(0);
                    placed_one = true;
                    break;
                }
            }
            if placed_one {
                continue;
            }
            // Depth-1 backtrack: undo the previous placement and resume the
            // candidate scan there. A second consecutive failure gives up.
            if order.is_empty() || backtracks > count {
                return Ok(None);
            }
            backtracks += 1;
            order.pop();
            level_start.pop();
        }
        if order.len() == count {
            Ok(Some(order))
        } else {
            Ok(None)
        }
    }

    /// Check that placing `candidate` after `placed` consumes a correctable
    /// erasure of the partial network.
    fn placement_is_isometric(&self, placed: &[usize], candidate: usize) -> Result<bool> {
        if placed.is_empty() {
            return Ok(true);
        }
        let partial = self.partial_network(placed)?;
        let built = partial.build()?;
        let report = built.report()?;
        let cand_id = &self.instances[candidate].0;
        let mut consumed = Vec::new();
        for (a, b) in &self.edges {
            for (mine, theirs) in [(a, b), (b, a)] {
                if theirs.instance == *cand_id
                    && placed
                        .iter()
                        .any(|&i| self.instances[i].0 == mine.instance)
                {
                    consumed.push(mine.clone());
                }
            }
        }
        let mut indices = Vec::new();
        for leg in &consumed {
            let col = built
                .legs
                .iter()
                .position(|l| l == leg)
                .expect("consumed leg dangles from the partial network");
            let phys_index = report
                .physical_legs
                .iter()
                .position(|&c| c == col)
                .expect("half-edge legs are physical in partial networks");
            indices.push(phys_index);
        }
        Ok(is_correctable_erasure(&report, &indices))
    }

    /// Sub-network of the given instances; half-edges become physical legs.
    fn partial_network(&self, placed: &[usize]) -> Result<TensorNetwork> {
        let ids: HashSet<&str> = placed
            .iter()
            .map(|&i| self.instances[i].0.as_str())
            .collect();
        let mut net = TensorNetwork::new(self.dimension);
        for &i in placed {
            let (id, lego) = &self.instances[i];
            net.add_instance(id.clone(), lego.clone())?;
        }
        for (a, b) in &self.edges {
            let a_in = ids.contains(a.instance.as_str());
            let b_in = ids.contains(b.instance.as_str());
            if a_in && b_in {
                net.add_edge(a.clone(), b.clone())?;
            }
        }
        for leg in net.dangling_legs() {
            let role = match self.role_of(&leg) {
                Ok(r) => r,
                // Half-edge toward an unplaced instance: physical for the check.
                Err(_) => Role::Physical,
            };
            let is_final_dangling = self
                .edges
                .iter()
                .all(|(a, b)| *a != leg && *b != leg);
            net.set_role(leg, if is_final_dangling { role } else { Role::Physical });
        }
        Ok(net)
    }

    fn realize_schedule(&self, order: &[usize]) -> Result<Vec<ScheduleStep>> {
        let mut steps = Vec::new();
        let mut placed: Vec<usize> = Vec::new();
        for &idx in order {
            let isometric = self.placement_is_isometric(&placed, idx)?;
            let id = self.instances[idx].0.clone();
            let mut contracted = Vec::new();
            for (a, b) in &self.edges {
                for (mine, theirs) in [(a, b), (b, a)] {
                    if mine.instance == id
                        && placed.iter().any(|&i| self.instances[i].0 == theirs.instance)
                    {
                        contracted.push(mine.clone());
                    }
                }
            }
            steps.push(ScheduleStep {
                instance: id,
                contracted_legs: contracted,
                isometric,
            });
            placed.push(idx);
        }
        Ok(steps)
    }
}

/// One planned placement: which instance joins and which of its legs glue to
/// the already-built part.
#[derive(Debug, Clone)]
pub struct ScheduleStep {
    pub instance: String,
    pub contracted_legs: Vec<LegRef>,
    pub isometric: bool,
}

#[derive(Debug, Clone)]
pub struct ContractionSchedule {
    pub steps: Vec<ScheduleStep>,
}

#[derive(Debug, Clone)]
pub enum PlanOutcome {
    /// Every step consumes a correctable erasure.
    Isometric(ContractionSchedule),
    /// No such order found; input order reported with honest flags.
    Fallback {
        schedule: ContractionSchedule,
        first_violation: usize,
    },
}

impl PlanOutcome {
    pub fn schedule(&self) -> &ContractionSchedule {
        match self {
            PlanOutcome::Isometric(s) => s,
            PlanOutcome::Fallback { schedule, .. } => schedule,
        }
    }

    pub fn is_isometric(&self) -> bool {
        matches!(self, PlanOutcome::Isometric(_))
    }
}

/// Fully contracted network: a state over the dangling legs.
#[derive(Debug, Clone)]
pub struct BuiltState {
    pub network: TensorNetwork,
    pub matrix: CheckMatrix,
    /// Column order of the matrix.
    pub legs: Vec<LegRef>,
    /// Output rows as combinations of the stacked per-lego generators.
    pub provenance: FieldMatrix,
    /// Stacked generator index -> (instance id, row within that lego).
    pub generator_origin: Vec<(String, usize)>,
}

impl BuiltState {
    pub fn column_of(&self, leg: &LegRef) -> Option<usize> {
        self.legs.iter().position(|l| l == leg)
    }

    pub fn logical_columns(&self) -> Result<Vec<usize>> {
        let mut cols = Vec::new();
        for (i, leg) in self.legs.iter().enumerate() {
            if self.network.role_of(leg)? == Role::Logical {
                cols.push(i);
            }
        }
        Ok(cols)
    }

    /// Extract stabilizers, constraints and logical pairs per the leg roles.
    pub fn report(&self) -> Result<CodeReport> {
        extract(&self.matrix, &self.logical_columns()?)
    }
}

#[derive(Debug, Clone)]
pub struct ProbeRow {
    pub instances: usize,
    pub dangling: usize,
    pub millis: f64,
}

/// Time `build` on chains of the given lego glued leg-to-leg, one row per
/// requested size. Leg 0 of each next instance attaches to leg 1 of the
/// previous one.
pub fn complexity_probe(lego: &Lego, sizes: &[usize]) -> Result<Vec<ProbeRow>> {
    let mut out = Vec::new();
    for &n in sizes {
        let mut net = TensorNetwork::new(lego.state_matrix.modulus());
        for i in 0..n {
            net.add_instance(format!("t{}", i), lego.clone())?;
        }
        for i in 1..n {
            net.add_edge(
                LegRef::new(format!("t{}", i - 1), 1),
                LegRef::new(format!("t{}", i), 0),
            )?;
        }
        net.set_default_role(Role::Physical);
        let start = Instant::now();
        let built = net.build()?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        out.push(ProbeRow {
            instances: n,
            dangling: built.legs.len(),
            millis: elapsed,
        });
    }
    Ok(out)
}
