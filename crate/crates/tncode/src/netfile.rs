//! On-disk formats: network descriptions, code reports, symbolic
//! assignments, and operator prescriptions.
//!
//! Everything is JSON with sorted maps and insertion-ordered lists, so
//! emitting the same object twice gives identical bytes and fixtures diff
//! cleanly. A network file either names a catalog lego or spells out a
//! stabilizer matrix inline; both parse back through [`to_network`].

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::duality::CodeReport;
use crate::fieldvec::FieldModulus;
use crate::legos;
use crate::network::{LegRef, Lego, Role, TensorNetwork};
use crate::pushing::{Label, SymbolicUPS};
use crate::symplectic::{parse_pauli, print_pauli, CheckMatrix};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// How a file defines one lego: by catalog name or by inline matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LegoSpec {
    Builtin {
        builtin: String,
    },
    Explicit {
        n_legs: usize,
        stabilizers: Vec<String>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub id: String,
    pub lego: String,
}

/// Serialized tensor network.
///
/// Edge ends are `[id, leg]`; role keys are `"id.leg"`, with the special key
/// `"default"` giving the role of every leg not listed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    pub version: u32,
    pub dimension: u32,
    pub legos: BTreeMap<String, LegoSpec>,
    pub instances: Vec<InstanceSpec>,
    pub edges: Vec<((String, usize), (String, usize))>,
    #[serde(default)]
    pub roles: BTreeMap<String, String>,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn from_json(text: &str) -> Result<NetworkFile> {
    Ok(serde_json::from_str(text)?)
}

fn parse_role(s: &str) -> Result<Role> {
    match s {
        "physical" => Ok(Role::Physical),
        "logical" => Ok(Role::Logical),
        other => Err(Error::Network(format!(
            "role {:?} must be \"physical\" or \"logical\"",
            other
        ))),
    }
}

fn role_name(role: Role) -> &'static str {
    match role {
        Role::Physical => "physical",
        Role::Logical => "logical",
    }
}

fn parse_leg_key(key: &str) -> Result<LegRef> {
    let (id, leg) = key
        .rsplit_once('.')
        .ok_or_else(|| Error::Network(format!("leg key {:?} is not id.leg", key)))?;
    let leg: usize = leg
        .parse()
        .map_err(|_| Error::Network(format!("leg key {:?} has a non-numeric leg", key)))?;
    Ok(LegRef::new(id, leg))
}

/// Instantiate the network a file describes. Validation covers the same
/// ground as hand-built networks: known names, in-range legs, single-use
/// legs, and a role for every dangling leg.
pub fn to_network(file: &NetworkFile) -> Result<TensorNetwork> {
    if file.version != FORMAT_VERSION {
        return Err(Error::Network(format!(
            "file version {} is not supported (expected {})",
            file.version, FORMAT_VERSION
        )));
    }
    let d = FieldModulus::new(file.dimension)?;
    let mut blocks: BTreeMap<&str, Lego> = BTreeMap::new();
    for (name, spec) in &file.legos {
        let lego = match spec {
            LegoSpec::Builtin { builtin } => legos::builtin(builtin)?,
            LegoSpec::Explicit { n_legs, stabilizers } => {
                let rows = stabilizers
                    .iter()
                    .map(|s| parse_pauli(s, d))
                    .collect::<Result<Vec<_>>>()?;
                Lego::new(name.clone(), CheckMatrix::new(rows, *n_legs, d)?)?
            }
        };
        blocks.insert(name, lego);
    }
    let mut net = TensorNetwork::new(d);
    for inst in &file.instances {
        let lego = blocks
            .get(inst.lego.as_str())
            .ok_or_else(|| Error::UnknownName(format!("lego {}", inst.lego)))?;
        net.add_instance(&inst.id, lego.clone())?;
    }
    for (a, b) in &file.edges {
        net.add_edge(LegRef::new(&a.0, a.1), LegRef::new(&b.0, b.1))?;
    }
    for (key, value) in &file.roles {
        let role = parse_role(value)?;
        if key == "default" {
            net.set_default_role(role);
        } else {
            net.set_role(parse_leg_key(key)?, role);
        }
    }
    net.validate()?;
    Ok(net)
}

/// Serialize a network. Legos whose matrix matches their catalog namesake
/// are written as builtin references, everything else inline; roles are
/// written explicitly per dangling leg, so defaults never leak.
pub fn from_network(net: &TensorNetwork) -> Result<NetworkFile> {
    let mut legos_map = BTreeMap::new();
    let mut seen: BTreeMap<String, CheckMatrix> = BTreeMap::new();
    for (_, lego) in net.instances() {
        if let Some(prev) = seen.get(&lego.name) {
            if *prev != lego.state_matrix {
                return Err(Error::Network(format!(
                    "two different legos share the name {}",
                    lego.name
                )));
            }
            continue;
        }
        seen.insert(lego.name.clone(), lego.state_matrix.clone());
        let is_builtin = legos::builtin(&lego.name)
            .map(|b| b.state_matrix == lego.state_matrix)
            .unwrap_or(false);
        let spec = if is_builtin {
            LegoSpec::Builtin {
                builtin: lego.name.clone(),
            }
        } else {
            LegoSpec::Explicit {
                n_legs: lego.n_legs(),
                stabilizers: lego
                    .state_matrix
                    .rows_pauli()
                    .iter()
                    .map(print_pauli)
                    .collect(),
            }
        };
        legos_map.insert(lego.name.clone(), spec);
    }
    let instances = net
        .instances()
        .map(|(id, lego)| InstanceSpec {
            id: id.to_string(),
            lego: lego.name.clone(),
        })
        .collect();
    let edges = net
        .edges()
        .iter()
        .map(|(a, b)| {
            (
                (a.instance.clone(), a.leg),
                (b.instance.clone(), b.leg),
            )
        })
        .collect();
    let mut roles = BTreeMap::new();
    for leg in net.dangling_legs() {
        roles.insert(leg.to_string(), role_name(net.role_of(&leg)?).to_string());
    }
    Ok(NetworkFile {
        version: FORMAT_VERSION,
        dimension: net.dimension.get(),
        legos: legos_map,
        instances,
        edges,
        roles,
    })
}

pub fn load_network(path: impl AsRef<Path>) -> Result<TensorNetwork> {
    to_network(&from_json(&fs::read_to_string(path)?)?)
}

pub fn save_network(path: impl AsRef<Path>, net: &TensorNetwork) -> Result<()> {
    Ok(fs::write(path, to_json(&from_network(net)?)?)?)
}

/// Serialized code report; Paulis in text form, legs by dangling-leg name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogicalPairFile {
    pub x_action: String,
    pub x_representation: String,
    pub z_action: String,
    pub z_representation: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub dimension: u32,
    pub n: usize,
    pub apparent_k: usize,
    pub true_k: usize,
    pub css: bool,
    pub self_dual: bool,
    pub stabilizers: Vec<String>,
    pub constraints: Vec<String>,
    pub logicals: Vec<LogicalPairFile>,
    pub gauge: Vec<String>,
    pub physical_legs: Vec<String>,
    pub logical_legs: Vec<String>,
}

/// Flatten a report for serialization. `leg_names` gives the dangling-leg
/// order of the built state; without it, columns are named by index.
pub fn report_file(report: &CodeReport, leg_names: Option<&[LegRef]>) -> ReportFile {
    let name = |col: usize| match leg_names {
        Some(names) => names[col].to_string(),
        None => col.to_string(),
    };
    ReportFile {
        dimension: report.stabilizers.modulus().get(),
        n: report.n,
        apparent_k: report.apparent_k,
        true_k: report.true_k,
        css: report.css,
        self_dual: report.self_dual,
        stabilizers: report
            .stabilizers
            .rows_pauli()
            .iter()
            .map(print_pauli)
            .collect(),
        constraints: report
            .constraints
            .rows_pauli()
            .iter()
            .map(print_pauli)
            .collect(),
        logicals: report
            .logical_pairs
            .iter()
            .map(|pair| LogicalPairFile {
                x_action: print_pauli(&pair.x.action),
                x_representation: print_pauli(&pair.x.representation),
                z_action: print_pauli(&pair.z.action),
                z_representation: print_pauli(&pair.z.representation),
            })
            .collect(),
        gauge: report.gauge.iter().map(print_pauli).collect(),
        physical_legs: report.physical_legs.iter().map(|&c| name(c)).collect(),
        logical_legs: report.logical_legs.iter().map(|&c| name(c)).collect(),
    }
}

/// Human-readable rendering of a report file.
pub fn render_report(rf: &ReportFile) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "[[{}, {}]] over GF({})",
        rf.n, rf.true_k, rf.dimension
    ));
    if rf.apparent_k != rf.true_k {
        out.push_str(&format!(" ({} apparent logical legs)", rf.apparent_k));
    }
    out.push('\n');
    let mut flags = Vec::new();
    if rf.css {
        flags.push("css");
    }
    if rf.self_dual {
        flags.push("self-dual");
    }
    if !flags.is_empty() {
        out.push_str(&format!("flags: {}\n", flags.join(", ")));
    }
    let section = |out: &mut String, title: &str, rows: &[String]| {
        if rows.is_empty() {
            return;
        }
        out.push_str(&format!("{} ({}):\n", title, rows.len()));
        for r in rows {
            out.push_str(&format!("  {}\n", r));
        }
    };
    section(&mut out, "stabilizer generators", &rf.stabilizers);
    section(&mut out, "constraints", &rf.constraints);
    if !rf.logicals.is_empty() {
        out.push_str(&format!("logical pairs ({}):\n", rf.logicals.len()));
        for (i, pair) in rf.logicals.iter().enumerate() {
            out.push_str(&format!(
                "  {}: X {} -> {}\n     Z {} -> {}\n",
                i, pair.x_action, pair.x_representation, pair.z_action, pair.z_representation
            ));
        }
    }
    section(&mut out, "gauge generators", &rf.gauge);
    out.push_str(&format!("physical legs: {}\n", rf.physical_legs.join(" ")));
    if !rf.logical_legs.is_empty() {
        out.push_str(&format!("logical legs: {}\n", rf.logical_legs.join(" ")));
    }
    out
}

/// Symbolic assignment file: per-instance operator entries for `push`.
///
/// An entry either names one of the instance lego's declared operators or
/// lists labels leg by leg (`"I"`, `"T"`, `"T^3"`). With `default_identity`,
/// unlisted instances get the identity entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub assign: BTreeMap<String, AssignSpec>,
    #[serde(default)]
    pub default_identity: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AssignSpec {
    Catalog { catalog: String },
    Labels { labels: Vec<String> },
}

fn parse_label(s: &str) -> Result<Label> {
    let (name, power) = match s.split_once('^') {
        Some((name, pow)) => {
            let power: u32 = pow.parse().map_err(|_| {
                Error::Network(format!("label {:?} has a non-numeric power", s))
            })?;
            (name, power)
        }
        None => (s, 1),
    };
    if name.is_empty() {
        return Err(Error::Network(format!("empty label in {:?}", s)));
    }
    Ok(Label::new(name, power))
}

/// Resolve an assignment file against a network.
pub fn to_assignment(
    net: &TensorNetwork,
    file: &AssignmentFile,
) -> Result<BTreeMap<String, SymbolicUPS>> {
    let mut out = BTreeMap::new();
    for (id, lego) in net.instances() {
        let spec = match file.assign.get(id) {
            Some(spec) => spec,
            None if file.default_identity => {
                out.insert(
                    id.to_string(),
                    SymbolicUPS::uniform("identity", Label::identity(), lego.n_legs()),
                );
                continue;
            }
            None => continue,
        };
        let ups = match spec {
            AssignSpec::Catalog { catalog } => lego
                .ups_catalog
                .iter()
                .find(|u| u.name == *catalog)
                .cloned()
                .ok_or_else(|| {
                    Error::UnknownName(format!(
                        "operator {} on lego {}",
                        catalog, lego.name
                    ))
                })?,
            AssignSpec::Labels { labels } => SymbolicUPS::new(
                format!("{}-assignment", id),
                labels
                    .iter()
                    .map(|s| parse_label(s))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        out.insert(id.to_string(), ups);
    }
    for id in file.assign.keys() {
        if !out.contains_key(id) {
            return Err(Error::UnknownName(format!("instance {}", id)));
        }
    }
    Ok(out)
}

/// Prescription file for `represent`: the wanted action, leg by leg.
/// `pauli` is a one-leg Pauli in text form; `x`/`z` exponents are the
/// dimension-agnostic alternative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrescriptionFile {
    pub prescribe: Vec<PrescribeSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrescribeSpec {
    pub leg: String,
    #[serde(default)]
    pub pauli: Option<String>,
    #[serde(default)]
    pub x: u32,
    #[serde(default)]
    pub z: u32,
}

pub fn to_prescription(
    file: &PrescriptionFile,
    dimension: FieldModulus,
) -> Result<Vec<(LegRef, u32, u32)>> {
    file.prescribe
        .iter()
        .map(|spec| {
            let leg = parse_leg_key(&spec.leg)?;
            let (x, z) = match &spec.pauli {
                Some(text) => {
                    let p = parse_pauli(text, dimension)?;
                    if p.n_legs() != 1 {
                        return Err(Error::Network(format!(
                            "prescription pauli {:?} must act on one leg",
                            text
                        )));
                    }
                    (p.x(0), p.z(0))
                }
                None => (spec.x, spec.z),
            };
            Ok((leg, x, z))
        })
        .collect()
}
