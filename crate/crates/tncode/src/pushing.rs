//! Operator pushing: symbolic operator entries on legos and decomposition
//! of output-row operators into per-lego insertions.
//!
//! Two layers live here. The exact layer works on the built check matrix:
//! `find_representation` solves for a row-space element with prescribed
//! action on chosen legs, and `flow_decomposition` expands such an element
//! back into one local operator per lego instance, labeling every internal
//! edge with the matched pair it carries. The symbolic layer treats operator
//! names as opaque tokens: each lego may declare entries ("apply T on every
//! leg") and a matching table says which tokens may face each other across a
//! traced pair. Tokens are never interpreted, so non-Clifford gates ride
//! along; correctness of a declared entry is the caller's responsibility.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::fieldvec::FieldMatrix;
use crate::network::{BuiltState, LegRef, TensorNetwork};
use crate::symplectic::{print_pauli, PauliVector};
use crate::{Error, Result};

/// An opaque operator token with a repetition count, e.g. `T^3`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Label {
    pub name: String,
    pub power: u32,
}

impl Label {
    pub fn new(name: impl Into<String>, power: u32) -> Self {
        Label {
            name: name.into(),
            power,
        }
    }

    pub fn identity() -> Self {
        Label::new("I", 1)
    }

    pub fn is_identity(&self) -> bool {
        self.name == "I" || self.power == 0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.power == 1 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}^{}", self.name, self.power)
        }
    }
}

/// A symbolic operator entry for one lego: one label per leg. The entry
/// declares that the labeled product stabilizes the lego state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicUPS {
    pub name: String,
    pub labels: Vec<Label>,
}

impl SymbolicUPS {
    pub fn new(name: impl Into<String>, labels: Vec<Label>) -> Self {
        SymbolicUPS {
            name: name.into(),
            labels,
        }
    }

    /// The same label on every leg.
    pub fn uniform(name: impl Into<String>, label: Label, n_legs: usize) -> Self {
        SymbolicUPS::new(name, vec![label; n_legs])
    }

    /// Leg-wise composition. Identity absorbs; equal names accumulate
    /// powers; anything else is outside the supported rules.
    pub fn compose(&self, other: &SymbolicUPS) -> Result<SymbolicUPS> {
        if self.labels.len() != other.labels.len() {
            return Err(Error::Shape(format!(
                "cannot compose entries on {} and {} legs",
                self.labels.len(),
                other.labels.len()
            )));
        }
        let mut labels = Vec::with_capacity(self.labels.len());
        for (a, b) in self.labels.iter().zip(&other.labels) {
            let l = if a.is_identity() {
                b.clone()
            } else if b.is_identity() {
                a.clone()
            } else if a.name == b.name {
                Label::new(a.name.clone(), a.power + b.power)
            } else {
                return Err(Error::Unsupported(format!(
                    "composition of distinct labels {} and {}",
                    a, b
                )));
            };
            labels.push(l);
        }
        Ok(SymbolicUPS::new(
            format!("{}*{}", self.name, other.name),
            labels,
        ))
    }
}

/// Which token pairs may face each other across a traced pair of legs.
///
/// Pairs are unordered and powers must agree: if `(T, Tdag)` is listed then
/// `T^k` across from `Tdag^k` matches for any `k`. Identity matches only
/// identity. The table also remembers every name it has seen so that
/// verification can reject labels nobody declared.
#[derive(Debug, Clone)]
pub struct MatchingTable {
    pairs: BTreeSet<(String, String)>,
    known: BTreeSet<String>,
}

impl MatchingTable {
    /// Dimension-agnostic core table.
    pub fn builtin() -> Self {
        let mut t = MatchingTable {
            pairs: BTreeSet::new(),
            known: BTreeSet::new(),
        };
        for (a, b) in [
            ("I", "I"),
            ("X", "X"),
            ("Z", "Zdag"),
            ("Y", "Y"),
            ("H", "H"),
            ("T", "Tdag"),
            ("S", "Sdag"),
        ] {
            t.insert_pair(a, b);
        }
        t
    }

    /// Builtin table plus self-pairings that hold in the given dimension
    /// (for qubits `Z` is its own inverse).
    pub fn for_dimension(d: u32) -> Self {
        let mut t = Self::builtin();
        if d == 2 {
            t.insert_pair("Z", "Z");
            t.insert_pair("Zdag", "Zdag");
        }
        t
    }

    pub fn insert_pair(&mut self, a: impl Into<String>, b: impl Into<String>) {
        let (a, b) = (a.into(), b.into());
        self.known.insert(a.clone());
        self.known.insert(b.clone());
        let key = if a <= b { (a, b) } else { (b, a) };
        self.pairs.insert(key);
    }

    pub fn knows(&self, name: &str) -> bool {
        self.known.contains(name)
    }

    pub fn matches(&self, a: &Label, b: &Label) -> bool {
        if a.is_identity() || b.is_identity() {
            return a.is_identity() && b.is_identity();
        }
        if a.power != b.power {
            return false;
        }
        let key = if a.name <= b.name {
            (a.name.clone(), b.name.clone())
        } else {
            (b.name.clone(), a.name.clone())
        };
        self.pairs.contains(&key)
    }
}

/// Result of checking a symbolic assignment over a network.
#[derive(Debug, Clone)]
pub struct SymbolicCheck {
    pub ok: bool,
    /// Edges whose two labels are not a listed pair.
    pub mismatches: Vec<(LegRef, LegRef)>,
    /// Labels induced on the dangling legs, in dangling order.
    pub dangling: Vec<(LegRef, Label)>,
}

/// Check a per-instance symbolic assignment against the network's edges.
///
/// Every instance must receive an entry with one label per leg, and every
/// non-identity label must be known to the table. The assignment verifies
/// when each edge carries a matching pair; the labels left on dangling legs
/// are returned either way.
pub fn verify_symbolic(
    net: &TensorNetwork,
    assignment: &BTreeMap<String, SymbolicUPS>,
    table: &MatchingTable,
) -> Result<SymbolicCheck> {
    for (id, lego) in net.instances() {
        let ups = assignment
            .get(id)
            .ok_or_else(|| Error::UnknownName(format!("no symbolic entry for instance {}", id)))?;
        if ups.labels.len() != lego.n_legs() {
            return Err(Error::Shape(format!(
                "entry {} has {} labels, instance {} has {} legs",
                ups.name,
                ups.labels.len(),
                id,
                lego.n_legs()
            )));
        }
        for l in &ups.labels {
            if !l.is_identity() && !table.knows(&l.name) {
                return Err(Error::UnknownName(format!("label {}", l.name)));
            }
        }
    }
    let label_at = |r: &LegRef| assignment[&r.instance].labels[r.leg].clone();
    let mut mismatches = Vec::new();
    for (a, b) in net.edges() {
        if !table.matches(&label_at(a), &label_at(b)) {
            mismatches.push((a.clone(), b.clone()));
        }
    }
    let dangling = net
        .dangling_legs()
        .into_iter()
        .map(|r| {
            let l = label_at(&r);
            (r, l)
        })
        .collect();
    Ok(SymbolicCheck {
        ok: mismatches.is_empty(),
        mismatches,
        dangling,
    })
}

/// A row-space element together with its coefficients over the built rows.
#[derive(Debug, Clone)]
pub struct Representation {
    pub operator: PauliVector,
    pub coefficients: Vec<u32>,
}

/// Find a row-space element of the built state with the prescribed action
/// `(x, z)` on each listed leg; other legs are unconstrained. Returns `None`
/// when no such element exists.
pub fn find_representation(
    built: &BuiltState,
    prescription: &[(LegRef, u32, u32)],
) -> Result<Option<Representation>> {
    let n = built.legs.len();
    let d = built.matrix.modulus();
    let mut cols = Vec::with_capacity(2 * prescription.len());
    let mut target = Vec::with_capacity(2 * prescription.len());
    for (leg, x, z) in prescription {
        let c = built
            .column_of(leg)
            .ok_or_else(|| Error::UnknownName(format!("leg {} is not dangling", leg)))?;
        cols.push(c);
        cols.push(n + c);
        target.push(d.reduce(*x as i64));
        target.push(d.reduce(*z as i64));
    }
    let restricted = built.matrix.matrix().select_cols(&cols);
    let coefficients = match restricted.solve(&target) {
        Some(c) => c,
        None => return Ok(None),
    };
    let row = built.matrix.matrix().combine_rows(&coefficients);
    Ok(Some(Representation {
        operator: PauliVector::from_row(&row, d),
        coefficients,
    }))
}

/// One internal edge of a flow diagram with the operators facing each other.
#[derive(Debug, Clone)]
pub struct FlowEdge {
    pub a: LegRef,
    pub b: LegRef,
    pub label_a: String,
    pub label_b: String,
}

/// Per-lego decomposition of a row-space operator.
#[derive(Debug, Clone)]
pub struct FlowDiagram {
    /// Non-identity local operators on each instance's own legs.
    pub local_ops: BTreeMap<String, PauliVector>,
    /// Edges carrying non-identity matched pairs, in network edge order.
    pub edges: Vec<FlowEdge>,
    /// Non-identity actions left on dangling legs, in dangling order.
    pub dangling: Vec<(LegRef, String)>,
}

fn leg_label(p: &PauliVector, leg: usize) -> String {
    print_pauli(&p.restrict(&[leg]))
}

/// Expand a row-space operator of the built state into one local operator
/// per lego instance. Every internal edge then carries a matched pair
/// (equal x parts, opposite z parts); the identity operator expands to an
/// empty diagram.
pub fn flow_decomposition(built: &BuiltState, op: &PauliVector) -> Result<FlowDiagram> {
    if op.n_legs() != built.legs.len() {
        return Err(Error::Shape(format!(
            "operator has {} legs, state has {}",
            op.n_legs(),
            built.legs.len()
        )));
    }
    let d = built.matrix.modulus();
    if op.modulus() != d {
        return Err(Error::ModulusMismatch(d.get(), op.modulus().get()));
    }
    let coeffs = built
        .matrix
        .matrix()
        .solve(&op.to_row())
        .ok_or(Error::NotInRowSpace)?;
    let coeff_row = FieldMatrix::from_rows(&[coeffs], built.matrix.rank(), d)?;
    let over_generators = coeff_row.matmul(&built.provenance)?;

    let mut local: BTreeMap<String, PauliVector> = BTreeMap::new();
    for (id, lego) in built.network.instances() {
        local.insert(id.to_string(), PauliVector::identity(lego.n_legs(), d));
    }
    let legos: BTreeMap<String, _> = built
        .network
        .instances()
        .map(|(id, l)| (id.to_string(), l))
        .collect();
    for (g, (id, row)) in built.generator_origin.iter().enumerate() {
        let c = over_generators.get(0, g);
        if c == 0 {
            continue;
        }
        let piece = legos[id].state_matrix.row_pauli(*row).pow(c);
        let cur = local.remove(id).unwrap();
        local.insert(id.clone(), cur.mul(&piece)?);
    }

    let mut edges = Vec::new();
    for (a, b) in built.network.edges() {
        let pa = &local[&a.instance];
        let pb = &local[&b.instance];
        let nontrivial =
            pa.x(a.leg) != 0 || pa.z(a.leg) != 0 || pb.x(b.leg) != 0 || pb.z(b.leg) != 0;
        // The expansion matches on every traced pair by construction.
        debug_assert_eq!(pa.x(a.leg), pb.x(b.leg));
        debug_assert_eq!(pa.z(a.leg), d.neg(pb.z(b.leg)));
        if nontrivial {
            edges.push(FlowEdge {
                a: a.clone(),
                b: b.clone(),
                label_a: leg_label(pa, a.leg),
                label_b: leg_label(pb, b.leg),
            });
        }
    }
    let mut dangling = Vec::new();
    for leg in built.network.dangling_legs() {
        let p = &local[&leg.instance];
        if p.x(leg.leg) != 0 || p.z(leg.leg) != 0 {
            let s = leg_label(p, leg.leg);
            dangling.push((leg, s));
        }
    }
    local.retain(|_, p| !p.is_identity());
    Ok(FlowDiagram {
        local_ops: local,
        edges,
        dangling,
    })
}

impl FlowDiagram {
    /// Graphviz rendering: one node per instance carrying a non-identity
    /// local operator, solid edges for matched internal pairs, and point
    /// nodes for dangling actions.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph flow {\n");
        for (id, p) in &self.local_ops {
            out.push_str(&format!("  \"{}\" [label=\"{}: {}\"];\n", id, id, print_pauli(p)));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -- \"{}\" [label=\"{}|{}\"];\n",
                e.a.instance, e.b.instance, e.label_a, e.label_b
            ));
        }
        for (leg, label) in &self.dangling {
            out.push_str(&format!(
                "  \"{}\" [shape=point];\n  \"{}\" -- \"{}\" [label=\"{}\" style=dashed];\n",
                leg, leg.instance, leg, label
            ));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldvec::FieldModulus;
    use crate::network::{Lego, Role, TensorNetwork};
    use crate::symplectic::{parse_pauli, CheckMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(d: u32) -> FieldModulus {
        FieldModulus::new(d).unwrap()
    }

    fn lego(name: &str, rows: &[&str], n: usize) -> Lego {
        let m = f(2);
        let paulis: Vec<PauliVector> =
            rows.iter().map(|s| parse_pauli(s, m).unwrap()).collect();
        Lego::new(name, CheckMatrix::new(paulis, n, m).unwrap()).unwrap()
    }

    fn bell_lego() -> Lego {
        lego("bell", &["XX", "ZZ"], 2)
    }

    fn glued_bells() -> TensorNetwork {
        let mut net = TensorNetwork::new(f(2));
        net.add_instance("a", bell_lego()).unwrap();
        net.add_instance("b", bell_lego()).unwrap();
        net.add_edge(LegRef::new("a", 1), LegRef::new("b", 0)).unwrap();
        net.set_default_role(Role::Physical);
        net
    }

    #[test]
    fn table_is_symmetric_and_power_aware() {
        let t = MatchingTable::builtin();
        let tt = |a: &str, pa, b: &str, pb| t.matches(&Label::new(a, pa), &Label::new(b, pb));
        assert!(tt("T", 1, "Tdag", 1));
        assert!(tt("Tdag", 3, "T", 3));
        assert!(!tt("T", 1, "Tdag", 2));
        assert!(!tt("T", 1, "T", 1));
        assert!(tt("X", 1, "X", 1));
        assert!(tt("Z", 2, "Zdag", 2));
        assert!(!tt("Z", 1, "Z", 1));
        assert!(MatchingTable::for_dimension(2).matches(&Label::new("Z", 1), &Label::new("Z", 1)));
        assert!(tt("I", 1, "I", 5));
        assert!(!tt("I", 1, "X", 1));
        let mut t = MatchingTable::builtin();
        t.insert_pair("CustomU", "CustomUdag");
        assert!(t.matches(&Label::new("CustomUdag", 2), &Label::new("CustomU", 2)));
        assert!(t.knows("CustomU") && !t.knows("Elsewhere"));
    }

    #[test]
    fn composition_accumulates_powers() {
        let a = SymbolicUPS::new("t1", vec![Label::new("T", 1), Label::identity()]);
        let b = SymbolicUPS::new("t2", vec![Label::new("T", 2), Label::new("H", 1)]);
        let c = a.compose(&b).unwrap();
        assert_eq!(c.labels[0], Label::new("T", 3));
        assert_eq!(c.labels[1], Label::new("H", 1));
        let bad = SymbolicUPS::new("x", vec![Label::new("X", 1), Label::identity()]);
        assert!(matches!(b.compose(&bad), Err(Error::Unsupported(_))));
    }

    #[test]
    fn symbolic_verification_on_glued_bells() {
        let net = glued_bells();
        let mut assignment = BTreeMap::new();
        assignment.insert(
            "a".to_string(),
            SymbolicUPS::uniform("xx", Label::new("X", 1), 2),
        );
        assignment.insert(
            "b".to_string(),
            SymbolicUPS::uniform("xx", Label::new("X", 1), 2),
        );
        let table = MatchingTable::for_dimension(2);
        let check = verify_symbolic(&net, &assignment, &table).unwrap();
        assert!(check.ok);
        assert_eq!(check.dangling.len(), 2);
        assert_eq!(check.dangling[0], (LegRef::new("a", 0), Label::new("X", 1)));

        // H across from X is not a listed pair.
        assignment.insert(
            "b".to_string(),
            SymbolicUPS::uniform("hh", Label::new("H", 1), 2),
        );
        let check = verify_symbolic(&net, &assignment, &table).unwrap();
        assert!(!check.ok);
        assert_eq!(check.mismatches.len(), 1);

        // Unknown labels and missing instances are errors, not mismatches.
        assignment.insert(
            "b".to_string(),
            SymbolicUPS::uniform("ww", Label::new("Wurble", 1), 2),
        );
        assert!(verify_symbolic(&net, &assignment, &table).is_err());
        assignment.remove("b");
        assert!(verify_symbolic(&net, &assignment, &table).is_err());
    }

    #[test]
    fn all_identity_assignment_verifies() {
        let net = glued_bells();
        let mut assignment = BTreeMap::new();
        for id in ["a", "b"] {
            assignment.insert(
                id.to_string(),
                SymbolicUPS::uniform("id", Label::identity(), 2),
            );
        }
        let check =
            verify_symbolic(&net, &assignment, &MatchingTable::builtin()).unwrap();
        assert!(check.ok);
        assert!(check.dangling.iter().all(|(_, l)| l.is_identity()));
    }

    #[test]
    fn representation_solves_prescriptions() {
        let built = glued_bells().build().unwrap();
        let rep = find_representation(&built, &[(LegRef::new("a", 0), 1, 0)])
            .unwrap()
            .unwrap();
        assert_eq!(rep.operator.x(0), 1);
        assert_eq!(rep.operator.z(0), 0);
        assert!(built.matrix.contains(&rep.operator));
        // X on one end forces X on the other: prescribing identity there fails.
        let none = find_representation(
            &built,
            &[(LegRef::new("a", 0), 1, 0), (LegRef::new("b", 1), 0, 0)],
        )
        .unwrap();
        assert!(none.is_none());
        assert!(find_representation(&built, &[(LegRef::new("a", 1), 1, 0)]).is_err());
    }

    #[test]
    fn flow_reproduces_operator_and_labels_edges() {
        let built = glued_bells().build().unwrap();
        let op = parse_pauli("XX", f(2)).unwrap();
        let flow = flow_decomposition(&built, &op).unwrap();
        assert_eq!(flow.local_ops.len(), 2);
        assert_eq!(flow.edges.len(), 1);
        assert_eq!(flow.edges[0].label_a, "X");
        assert_eq!(flow.edges[0].label_b, "X");
        assert_eq!(flow.dangling.len(), 2);
        let dot = flow.to_dot();
        assert!(dot.contains("graph flow"));
        assert!(dot.contains("\"a\" -- \"b\""));

        let id = PauliVector::identity(2, f(2));
        let empty = flow_decomposition(&built, &id).unwrap();
        assert!(empty.local_ops.is_empty());
        assert!(empty.edges.is_empty());
        assert!(empty.dangling.is_empty());

        let op = parse_pauli("XI", f(2)).unwrap();
        assert!(matches!(
            flow_decomposition(&built, &op),
            Err(Error::NotInRowSpace)
        ));
    }

    #[test]
    fn pauli_specializations_agree_with_representation() {
        // Assign each instance a random element of its own stabilizer group,
        // written as Pauli labels. Symbolic verification must agree with the
        // exact matching rule, and accepted assignments must descend to a
        // findable representation on the dangling legs.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let table = MatchingTable::for_dimension(2);
        for _ in 0..100 {
            let net = glued_bells();
            let mut assignment = BTreeMap::new();
            let mut locals: BTreeMap<String, PauliVector> = BTreeMap::new();
            for (id, lego) in net.instances() {
                let m = lego.state_matrix.matrix();
                let coeffs: Vec<u32> = (0..m.rows()).map(|_| rng.gen_range(0..2)).collect();
                let p = PauliVector::from_row(&m.combine_rows(&coeffs), f(2));
                let labels = (0..lego.n_legs())
                    .map(|l| match (p.x(l), p.z(l)) {
                        (0, 0) => Label::identity(),
                        (1, 0) => Label::new("X", 1),
                        (0, 1) => Label::new("Z", 1),
                        _ => Label::new("Y", 1),
                    })
                    .collect();
                assignment.insert(id.to_string(), SymbolicUPS::new("rand", labels));
                locals.insert(id.to_string(), p);
            }
            let check = verify_symbolic(&net, &assignment, &table).unwrap();
            let exact = net.edges().iter().all(|(a, b)| {
                let pa = &locals[&a.instance];
                let pb = &locals[&b.instance];
                pa.x(a.leg) == pb.x(b.leg) && pa.z(a.leg) == f(2).neg(pb.z(b.leg))
            });
            assert_eq!(check.ok, exact);
            if check.ok {
                let built = net.build().unwrap();
                let prescription: Vec<(LegRef, u32, u32)> = check
                    .dangling
                    .iter()
                    .map(|(leg, label)| {
                        let (x, z) = match label.name.as_str() {
                            "I" => (0, 0),
                            "X" => (1, 0),
                            "Z" => (0, 1),
                            _ => (1, 1),
                        };
                        (leg.clone(), x, z)
                    })
                    .collect();
                assert!(find_representation(&built, &prescription)
                    .unwrap()
                    .is_some());
            }
        }
    }
}
