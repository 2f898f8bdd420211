//! Block catalog and example-network builders.
//!
//! Leg conventions used by every lattice builder here:
//!
//! * The six-leg block `code_422` orders its legs as 0 = northeast,
//!   1 = northwest, 2 = southwest, 3 = southeast (the four in-plane legs),
//!   4 = up (logical by default), 5 = down (physical by default). Its row
//!   space contains weight-3 rows pairing an `XX` on the two north legs (or
//!   `ZZ` on the two east legs) with the matching Pauli on the down leg,
//!   which is what makes four of them close around a lattice face.
//! * Lattice sites live at integer points (a, b) with a + b even; diagonal
//!   neighbors are traced together. Sites with odd coordinates use the same
//!   block rotated a quarter turn, realized as a direction-to-leg relabeling
//!   rather than a distinct tensor.
//! * The eight-leg Steane block used by the 3d builder keeps qubit 0 and the
//!   logical leg at the vertex and sends qubits 1..=6 along the axes; the
//!   two vertex parities differ by swapping the two z-axis legs.

use std::collections::BTreeMap;

use crate::duality::{gauge_fix_pair, CodeReport};
use crate::fieldvec::FieldModulus;
use crate::network::{Lego, LegRef, Role, TensorNetwork};
use crate::pushing::{Label, SymbolicUPS};
use crate::symplectic::{parse_pauli, CheckMatrix, PauliVector};
use crate::trace::conjoin;
use crate::{Error, Result};

/// A named catalog block with a short functional description.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "code_422",
        summary: "six-leg block of the [[4,2,2]] code; weight-2 logicals on angle pairs",
    },
    CatalogEntry {
        name: "code_513_perfect",
        summary: "six-leg block of the [[5,1,3]] code; every leg pair is correctable",
    },
    CatalogEntry {
        name: "steane_713",
        summary: "eight-leg block of the [[7,1,3]] self-dual CSS code",
    },
    CatalogEntry {
        name: "reed_muller_15_1_3",
        summary: "sixteen-leg block of the [[15,1,3]] code; carries T-type symbolic entries",
    },
    CatalogEntry {
        name: "repetition_z_3",
        summary: "r-leg GHZ-type block (names repetition_{x|z}_{r}); all-X row plus Z pair rows",
    },
    CatalogEntry {
        name: "stopper_x",
        summary: "single-leg X eigenstate; terminates a leg in the X basis",
    },
    CatalogEntry {
        name: "stopper_z",
        summary: "single-leg Z eigenstate; terminates a leg in the Z basis",
    },
    CatalogEntry {
        name: "hadamard_rank2",
        summary: "two-leg block exchanging X and Z across the pair",
    },
    CatalogEntry {
        name: "zero_state_rank1",
        summary: "single-leg computational-basis state",
    },
    CatalogEntry {
        name: "rep2_encoder_rank3",
        summary: "three-leg GHZ block; the repetition-code encoder",
    },
    CatalogEntry {
        name: "twist_code_4qubit",
        summary: "five-leg block of a [[4,1,2]] code with a mixed-Pauli row (YYYI)",
    },
];

fn qubit_lego(name: &str, rows: &[&str], n_legs: usize) -> Lego {
    let d = FieldModulus::new(2).unwrap();
    let paulis: Vec<PauliVector> = rows
        .iter()
        .map(|s| parse_pauli(s, d).expect("catalog row parses"))
        .collect();
    let mat = CheckMatrix::new(paulis, n_legs, d).expect("catalog rows commute");
    Lego::new(name, mat).expect("catalog block is full rank")
}

/// r-leg GHZ-type block. The Z flavor is stabilized by the all-X row and
/// Z-pair rows; the X flavor swaps the two Pauli types.
fn repetition_lego(r: usize, z_type: bool, d: FieldModulus) -> Result<Lego> {
    if r < 1 {
        return Err(Error::Shape("repetition block needs at least one leg".into()));
    }
    let mut rows = Vec::with_capacity(r);
    let uniform = vec![1u32; r];
    let zero = vec![0u32; r];
    let all = if z_type {
        PauliVector::from_xz(uniform.clone(), zero.clone(), d)?
    } else {
        PauliVector::from_xz(zero.clone(), uniform.clone(), d)?
    };
    rows.push(all);
    for i in 0..r.saturating_sub(1) {
        let mut pair = vec![0u32; r];
        pair[i] = 1;
        pair[i + 1] = d.neg(1);
        let row = if z_type {
            PauliVector::from_xz(zero.clone(), pair, d)?
        } else {
            PauliVector::from_xz(pair, zero.clone(), d)?
        };
        rows.push(row);
    }
    let name = format!("repetition_{}_{}", if z_type { "z" } else { "x" }, r);
    Lego::new(name, CheckMatrix::new(rows, r, d)?)
}

fn hadamard_lego(d: FieldModulus) -> Lego {
    let rows = vec![
        PauliVector::from_xz(vec![1, 0], vec![0, 1], d).unwrap(),
        PauliVector::from_xz(vec![0, 1], vec![1, 0], d).unwrap(),
    ];
    Lego::new("hadamard_rank2", CheckMatrix::new(rows, 2, d).unwrap()).unwrap()
}

fn stopper_lego(name: &str, x_type: bool, d: FieldModulus) -> Lego {
    let row = if x_type {
        PauliVector::from_xz(vec![1], vec![0], d).unwrap()
    } else {
        PauliVector::from_xz(vec![0], vec![1], d).unwrap()
    };
    Lego::new(name, CheckMatrix::new(vec![row], 1, d).unwrap()).unwrap()
}

fn reed_muller_lego() -> Lego {
    let d = FieldModulus::new(2).unwrap();
    let n = 16;
    let mut rows = Vec::new();
    let mut push = |x: Vec<u32>, z: Vec<u32>| {
        rows.push(PauliVector::from_xz(x, z, d).unwrap());
    };
    // Physical qubit q carries the 4-bit label q + 1. X checks come from
    // the single-bit patterns; Z checks from single-bit and bit-pair
    // patterns (4 + 10 = 14 stabilizer generators).
    for bit in 0..4 {
        let x: Vec<u32> = (0..n).map(|q| ((q + 1) >> bit & 1) as u32).collect();
        push(x.clone(), vec![0; n]);
        push(vec![0; n], x);
    }
    for hi in 0..4 {
        for lo in 0..hi {
            let z: Vec<u32> = (0..n)
                .map(|q| {
                    let label = q + 1;
                    (label >> hi & 1 == 1 && label >> lo & 1 == 1) as u32
                })
                .collect();
            push(vec![0; n], z);
        }
    }
    push(vec![1; n], vec![0; n]);
    push(vec![0; n], vec![1; n]);
    let lego = Lego::new(
        "reed_muller_15_1_3",
        CheckMatrix::new(rows, n, d).unwrap(),
    )
    .unwrap();
    // Two symbolic entries: the all-T and all-Tdag transversal operators.
    // Which of the two implements which logical phase is a sign convention,
    // so both ship and callers pick.
    lego.with_ups(SymbolicUPS::uniform("t_bar", Label::new("T", 1), n))
        .unwrap()
        .with_ups(SymbolicUPS::uniform("tdag_bar", Label::new("Tdag", 1), n))
        .unwrap()
}

/// Look up a catalog block. Repetition blocks are named
/// `repetition_{x|z}_{r}`.
pub fn builtin(name: &str) -> Result<Lego> {
    let d2 = FieldModulus::new(2).unwrap();
    match name {
        "code_422" => Ok(qubit_lego(
            name,
            &["XXXXII", "ZZZZII", "XIIXXI", "ZZIIZI", "XXIIIX", "ZIIZIZ"],
            6,
        )),
        "code_513_perfect" => Ok(qubit_lego(
            name,
            &[
                "XZZXII", "IXZZXI", "XIXZZI", "ZXIXZI", "XXXXXX", "ZZZZZZ",
            ],
            6,
        )),
        "steane_713" => Ok(qubit_lego(
            name,
            &[
                "XIXIXIXI", "IXXIIXXI", "IIIXXXXI", "ZIZIZIZI", "IZZIIZZI",
                "IIIZZZZI", "XXXXXXXX", "ZZZZZZZZ",
            ],
            8,
        )),
        "reed_muller_15_1_3" => Ok(reed_muller_lego()),
        "stopper_x" => Ok(stopper_lego(name, true, d2)),
        "stopper_z" => Ok(stopper_lego(name, false, d2)),
        "hadamard_rank2" => Ok(hadamard_lego(d2)),
        "zero_state_rank1" => Ok(stopper_lego(name, false, d2)),
        "rep2_encoder_rank3" => repetition_lego(3, true, d2).map(|mut l| {
            l.name = name.into();
            l
        }),
        "twist_code_4qubit" => Ok(qubit_lego(
            name,
            &["XXIXI", "ZIZZI", "YYYII", "XIXIX", "ZZIIZ"],
            5,
        )),
        _ => {
            if let Some(rest) = name.strip_prefix("repetition_") {
                let (ty, r) = rest
                    .split_once('_')
                    .ok_or_else(|| Error::UnknownName(name.into()))?;
                let r: usize = r.parse().map_err(|_| Error::UnknownName(name.into()))?;
                return match ty {
                    "z" => repetition_lego(r, true, d2),
                    "x" => repetition_lego(r, false, d2),
                    _ => Err(Error::UnknownName(name.into())),
                };
            }
            Err(Error::UnknownName(name.into()))
        }
    }
}

/// Textbook generators of the [[7,1,3]] code on 7 legs, for comparisons.
pub fn steane_generators() -> CheckMatrix {
    let d = FieldModulus::new(2).unwrap();
    let rows: Vec<PauliVector> = [
        "XIXIXIX", "IXXIIXX", "IIIXXXX", "ZIZIZIZ", "IZZIIZZ", "IIIZZZZ",
    ]
    .iter()
    .map(|s| parse_pauli(s, d).unwrap())
    .collect();
    CheckMatrix::new(rows, 7, d).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Ne,
    Nw,
    Sw,
    Se,
}

impl Dir {
    fn delta(self) -> (i64, i64) {
        match self {
            Dir::Ne => (1, 1),
            Dir::Nw => (-1, 1),
            Dir::Sw => (-1, -1),
            Dir::Se => (1, -1),
        }
    }

    fn opposite(self) -> Dir {
        match self {
            Dir::Ne => Dir::Sw,
            Dir::Nw => Dir::Se,
            Dir::Sw => Dir::Ne,
            Dir::Se => Dir::Nw,
        }
    }

    /// In-plane leg index carrying this direction. Sites at odd coordinates
    /// are rotated a quarter turn counterclockwise.
    fn leg(self, rotated: bool) -> usize {
        let base = match self {
            Dir::Ne => 0,
            Dir::Nw => 1,
            Dir::Sw => 2,
            Dir::Se => 3,
        };
        if rotated {
            (base + 3) % 4
        } else {
            base
        }
    }
}

fn site_id(a: i64, b: i64) -> String {
    format!("t{}_{}", a, b)
}

/// Periodic lattice of four-qubit blocks: 2L^2 sites on the even
/// checkerboard of a 2L-by-2L torus, diagonal legs traced, one logical (up)
/// and one physical (down) leg per site.
pub fn build_toric(l: usize) -> Result<TensorNetwork> {
    if l < 2 {
        return Err(Error::Shape(format!("toric lattice needs L >= 2, got {}", l)));
    }
    let span = 2 * l as i64;
    let lego = builtin("code_422")?;
    let mut net = TensorNetwork::new(lego.state_matrix.modulus());
    let mut sites = Vec::new();
    for a in 0..span {
        for b in 0..span {
            if (a + b) % 2 == 0 {
                net.add_instance(site_id(a, b), lego.clone())?;
                sites.push((a, b));
            }
        }
    }
    for &(a, b) in &sites {
        let rotated = a % 2 == 1;
        for dir in [Dir::Ne, Dir::Se] {
            let (dx, dy) = dir.delta();
            let (na, nb) = ((a + dx).rem_euclid(span), (b + dy).rem_euclid(span));
            let n_rotated = na % 2 == 1;
            net.add_edge(
                LegRef::new(site_id(a, b), dir.leg(rotated)),
                LegRef::new(site_id(na, nb), dir.opposite().leg(n_rotated)),
            )?;
        }
        net.set_role(LegRef::new(site_id(a, b), 4), Role::Logical);
        net.set_role(LegRef::new(site_id(a, b), 5), Role::Physical);
    }
    Ok(net)
}

/// Weight-4 candidate stabilizers of the periodic lattice, one per face,
/// as operators over the built physical legs (site order = column order).
pub fn toric_face_operators(l: usize) -> Vec<PauliVector> {
    let d = FieldModulus::new(2).unwrap();
    let span = 2 * l as i64;
    let mut site_index = BTreeMap::new();
    let mut count = 0usize;
    for a in 0..span {
        for b in 0..span {
            if (a + b) % 2 == 0 {
                site_index.insert((a, b), count);
                count += 1;
            }
        }
    }
    let mut ops = Vec::new();
    for a in 0..span {
        for b in 0..span {
            if (a + b) % 2 == 1 {
                // X-type faces sit at even first coordinate.
                let x_type = a % 2 == 0;
                let mut p = PauliVector::identity(count, d);
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let s = ((a + dx).rem_euclid(span), (b + dy).rem_euclid(span));
                    let q = site_index[&s];
                    if x_type {
                        p.set_leg(q, 1, 0);
                    } else {
                        p.set_leg(q, 0, 1);
                    }
                }
                ops.push(p);
            }
        }
    }
    ops
}

/// Physical qubit column for a patch site, in build order: primaries
/// i-major, then secondaries.
fn patch_qubit(m: usize, n: usize, a: usize, b: usize) -> usize {
    if a.is_multiple_of(2) {
        (a / 2) * n + b / 2
    } else {
        m * n + (a / 2) * (n - 1) + b / 2
    }
}

/// Stabilizer generators of the stopper-bounded patch: one operator per
/// face, X-type on even columns, truncated at the boundary. Spans the full
/// stabilizer group of the [[MN + (M-1)(N-1), 1]] planar code.
pub fn surface_face_operators(m: usize, n: usize) -> Vec<PauliVector> {
    let d = FieldModulus::new(2).unwrap();
    let qubits = m * n + (m - 1) * (n - 1);
    let (amax, bmax) = (2 * m as i64 - 2, 2 * n as i64 - 2);
    let mut ops = Vec::new();
    for a in 0..=amax {
        for b in 0..=bmax {
            if (a + b) % 2 == 0 {
                continue;
            }
            let x_type = a % 2 == 0;
            let mut p = PauliVector::identity(qubits, d);
            for (ca, cb) in [(a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1)] {
                if ca < 0 || ca > amax || cb < 0 || cb > bmax {
                    continue;
                }
                let q = patch_qubit(m, n, ca as usize, cb as usize);
                if x_type {
                    p.set_leg(q, 1, 0);
                } else {
                    p.set_leg(q, 0, 1);
                }
            }
            ops.push(p);
        }
    }
    ops
}

/// Interior face operators of the XZZX patch: X on the north/south corners,
/// Z on the east/west corners, for every face whose four corners all exist.
pub fn xzzx_interior_operators(m: usize, n: usize) -> Vec<PauliVector> {
    let d = FieldModulus::new(2).unwrap();
    let qubits = m * n + (m - 1) * (n - 1);
    let (amax, bmax) = (2 * m - 2, 2 * n - 2);
    let mut ops = Vec::new();
    for a in 1..amax {
        for b in 1..bmax {
            if (a + b) % 2 == 0 {
                continue;
            }
            let mut p = PauliVector::identity(qubits, d);
            p.set_leg(patch_qubit(m, n, a, b + 1), 1, 0);
            p.set_leg(patch_qubit(m, n, a, b - 1), 1, 0);
            p.set_leg(patch_qubit(m, n, a + 1, b), 0, 1);
            p.set_leg(patch_qubit(m, n, a - 1, b), 0, 1);
            ops.push(p);
        }
    }
    ops
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceBoundary {
    /// Boundary legs stay dangling as physical qubits.
    Bare,
    /// Boundary legs terminate on single-leg eigenstates: X on the west and
    /// east sides, Z on the south and north sides.
    Stoppers,
    /// Boundary legs feed GHZ-type blocks covering runs of the given length
    /// along each side, one extra dangling physical leg per block.
    Repetition(usize),
}

struct Patch {
    net: TensorNetwork,
    m: usize,
    n: usize,
}

impl Patch {
    fn primary(i: usize, j: usize) -> String {
        site_id(2 * i as i64, 2 * j as i64)
    }

    fn secondary(i: usize, j: usize) -> String {
        site_id(2 * i as i64 + 1, 2 * j as i64 + 1)
    }

    /// Dangling in-plane boundary legs by side (west, east, south, north),
    /// grouped by the missing lattice corner they point at, in walk order.
    /// A truncated face's two uncancelled legs share a group. Corner
    /// positions (one leg each) belong to the west/east sides.
    fn boundary_legs(&self) -> [Vec<Vec<LegRef>>; 4] {
        let (m, n) = (self.m, self.n);
        let mut west = Vec::new();
        let mut east = Vec::new();
        for p in 0..=n {
            let mut w = Vec::new();
            let mut e = Vec::new();
            if p > 0 {
                w.push(LegRef::new(Patch::primary(0, p - 1), Dir::Nw.leg(false)));
                e.push(LegRef::new(Patch::primary(m - 1, p - 1), Dir::Ne.leg(false)));
            }
            if p < n {
                w.push(LegRef::new(Patch::primary(0, p), Dir::Sw.leg(false)));
                e.push(LegRef::new(Patch::primary(m - 1, p), Dir::Se.leg(false)));
            }
            west.push(w);
            east.push(e);
        }
        let mut south = Vec::new();
        let mut north = Vec::new();
        for p in 1..m {
            south.push(vec![
                LegRef::new(Patch::primary(p - 1, 0), Dir::Se.leg(false)),
                LegRef::new(Patch::primary(p, 0), Dir::Sw.leg(false)),
            ]);
            north.push(vec![
                LegRef::new(Patch::primary(p - 1, n - 1), Dir::Ne.leg(false)),
                LegRef::new(Patch::primary(p, n - 1), Dir::Nw.leg(false)),
            ]);
        }
        [west, east, south, north]
    }
}

/// Open patch with M-by-N primary sites and (M-1)-by-(N-1) secondary sites;
/// every site keeps an up (logical) and a down (physical) leg. The
/// `interior` block replaces the secondary sites.
fn build_patch(m: usize, n: usize, interior: &Lego) -> Result<Patch> {
    if m < 2 || n < 2 {
        return Err(Error::Shape(format!(
            "surface patch needs at least 2x2 primary sites, got {}x{}",
            m, n
        )));
    }
    let primary = builtin("code_422")?;
    let mut net = TensorNetwork::new(primary.state_matrix.modulus());
    for i in 0..m {
        for j in 0..n {
            net.add_instance(Patch::primary(i, j), primary.clone())?;
        }
    }
    for i in 0..m - 1 {
        for j in 0..n - 1 {
            let id = Patch::secondary(i, j);
            net.add_instance(id.clone(), interior.clone())?;
            // Secondary sites have odd coordinates, hence rotated legs.
            for (dir, pi, pj) in [
                (Dir::Ne, i + 1, j + 1),
                (Dir::Nw, i, j + 1),
                (Dir::Sw, i, j),
                (Dir::Se, i + 1, j),
            ] {
                net.add_edge(
                    LegRef::new(id.clone(), dir.leg(true)),
                    LegRef::new(Patch::primary(pi, pj), dir.opposite().leg(false)),
                )?;
            }
        }
    }
    for i in 0..m {
        for j in 0..n {
            net.set_role(LegRef::new(Patch::primary(i, j), 4), Role::Logical);
            net.set_role(LegRef::new(Patch::primary(i, j), 5), Role::Physical);
        }
    }
    for i in 0..m - 1 {
        for j in 0..n - 1 {
            net.set_role(LegRef::new(Patch::secondary(i, j), 4), Role::Logical);
            net.set_role(LegRef::new(Patch::secondary(i, j), 5), Role::Physical);
        }
    }
    Ok(Patch { net, m, n })
}

fn attach_boundary(patch: &mut Patch, boundary: &SurfaceBoundary) -> Result<()> {
    let sides = patch.boundary_legs();
    match boundary {
        SurfaceBoundary::Bare => {
            for side in &sides {
                for group in side {
                    for leg in group {
                        patch.net.set_role(leg.clone(), Role::Physical);
                    }
                }
            }
        }
        SurfaceBoundary::Stoppers => {
            for (s, side) in sides.iter().enumerate() {
                // Truncated X faces touch the west/east sides, so those
                // absorb with X stoppers; south/north absorb Z.
                let x_type = s < 2;
                let stopper = builtin(if x_type { "stopper_x" } else { "stopper_z" })?;
                for (k, leg) in side.iter().flatten().enumerate() {
                    let id = format!("stop{}_{}", s, k);
                    patch.net.add_instance(id.clone(), stopper.clone())?;
                    patch.net.add_edge(leg.clone(), LegRef::new(id, 0))?;
                }
            }
        }
        SurfaceBoundary::Repetition(r) => {
            if *r < 2 {
                return Err(Error::Shape("repetition boundary needs runs of >= 2".into()));
            }
            // A GHZ block of the side's absorbing flavor covers each run of
            // up to r corner positions, so truncated faces stay whole.
            for (s, side) in sides.iter().enumerate() {
                let x_flavor = s < 2;
                for (run, chunk) in side.chunks(*r).enumerate() {
                    let legs: Vec<&LegRef> = chunk.iter().flatten().collect();
                    let lego =
                        repetition_lego(legs.len() + 1, !x_flavor, FieldModulus::new(2).unwrap())?;
                    let id = format!("rep{}_{}", s, run);
                    patch.net.add_instance(id.clone(), lego)?;
                    for (k, leg) in legs.iter().enumerate() {
                        patch.net.add_edge((*leg).clone(), LegRef::new(id.clone(), k))?;
                    }
                    patch
                        .net
                        .set_role(LegRef::new(id, legs.len()), Role::Physical);
                }
            }
        }
    }
    Ok(())
}

/// Open surface-code patch. With stoppers this is the standard planar code
/// on MN + (M-1)(N-1) qubits.
pub fn build_surface(m: usize, n: usize, boundary: &SurfaceBoundary) -> Result<TensorNetwork> {
    let interior = builtin("code_422")?;
    let mut patch = build_patch(m, n, &interior)?;
    attach_boundary(&mut patch, boundary)?;
    Ok(patch.net)
}

/// Surface patch whose secondary sites carry an extra Hadamard on the down
/// leg, turning every face operator into the mixed XZZX pattern. Stoppers
/// terminate the boundary exactly as for the plain patch: the primary-site
/// legs they attach to are untouched by the Hadamard.
pub fn build_xzzx(m: usize, n: usize) -> Result<TensorNetwork> {
    let base = builtin("code_422")?;
    let had = hadamard_lego(FieldModulus::new(2).unwrap());
    // Leg 5 of the block meets leg 0 of the Hadamard; the survivor order
    // keeps legs 0..=4 and appends the Hadamard's free leg as the new down.
    let traced = conjoin(&base.state_matrix, Some(&had.state_matrix), &[(5, 0)])?;
    let modified = Lego::new("code_422_hadamard", traced.matrix)?;
    let mut patch = build_patch(m, n, &modified)?;
    attach_boundary(&mut patch, &SurfaceBoundary::Stoppers)?;
    Ok(patch.net)
}

/// Same network as `build_surface` with stoppers; only the roles differ.
/// Secondary sites donate both on-site legs as logical, so physical qubits
/// live on the M-by-N primary grid only.
pub fn build_bacon_shor(m: usize, n: usize) -> Result<TensorNetwork> {
    let mut net = build_surface(m, n, &SurfaceBoundary::Stoppers)?;
    for i in 0..m - 1 {
        for j in 0..n - 1 {
            net.set_role(LegRef::new(Patch::secondary(i, j), 5), Role::Logical);
        }
    }
    Ok(net)
}

/// Extract the gauge-fixed subsystem code: the kept logical pair is the
/// uniform X line against the uniform Z line on the primary grid (whichever
/// orientation the group supports); all other freedom becomes gauge.
///
/// Physical qubit i * n + j is the down leg of primary site (i, j).
pub fn bacon_shor_code(m: usize, n: usize) -> Result<CodeReport> {
    let report = build_bacon_shor(m, n)?.build()?.report()?;
    let d = report.stabilizers.modulus();
    let line = |fix_i: bool, x_type: bool| {
        let mut p = PauliVector::identity(report.n, d);
        for t in 0..(if fix_i { n } else { m }) {
            let q = if fix_i { t } else { t * n };
            if x_type {
                p.set_leg(q, 1, 0);
            } else {
                p.set_leg(q, 0, 1);
            }
        }
        p
    };
    // Row-X against column-Z, or the transpose.
    gauge_fix_pair(&report, &line(true, true), &line(false, false))
        .or_else(|_| gauge_fix_pair(&report, &line(false, true), &line(true, false)))
}

/// Bare-boundary patch re-read as a code on its one-dimensional boundary:
/// all on-site legs become logical, the dangling in-plane legs physical.
pub fn build_1d_dual(m: usize, n: usize) -> Result<TensorNetwork> {
    let mut net = build_surface(m, n, &SurfaceBoundary::Bare)?;
    for i in 0..m {
        for j in 0..n {
            net.set_role(LegRef::new(Patch::primary(i, j), 5), Role::Logical);
        }
    }
    for i in 0..m - 1 {
        for j in 0..n - 1 {
            net.set_role(LegRef::new(Patch::secondary(i, j), 5), Role::Logical);
        }
    }
    Ok(net)
}

/// Chain of m-1 four-qubit blocks traced corner to corner; all up and down
/// legs logical, the dangling in-plane legs physical. Yields [[2m, 2m-2, 2]].
pub fn build_chain(m: usize) -> Result<TensorNetwork> {
    if m < 2 {
        return Err(Error::Shape(format!("chain needs m >= 2, got {}", m)));
    }
    let lego = builtin("code_422")?;
    let mut net = TensorNetwork::new(lego.state_matrix.modulus());
    let count = m - 1;
    for t in 0..count {
        net.add_instance(format!("t{}", t), lego.clone())?;
    }
    for t in 1..count {
        net.add_edge(
            LegRef::new(format!("t{}", t - 1), 0),
            LegRef::new(format!("t{}", t), 2),
        )?;
    }
    for t in 0..count {
        net.set_role(LegRef::new(format!("t{}", t), 4), Role::Logical);
        net.set_role(LegRef::new(format!("t{}", t), 5), Role::Logical);
    }
    net.set_default_role(Role::Physical);
    Ok(net)
}

/// Two four-qubit blocks traced on both on-site leg pairs. The eight
/// in-plane legs form the [[7,1,3]] code; with the first block's northeast
/// leg declared logical the dangling order reproduces the textbook
/// generators exactly.
pub fn build_steane_from_422() -> Result<TensorNetwork> {
    let lego = builtin("code_422")?;
    let mut net = TensorNetwork::new(lego.state_matrix.modulus());
    net.add_instance("a", lego.clone())?;
    net.add_instance("b", lego)?;
    net.add_edge(LegRef::new("a", 4), LegRef::new("b", 4))?;
    net.add_edge(LegRef::new("a", 5), LegRef::new("b", 5))?;
    net.set_default_role(Role::Physical);
    net.set_role(LegRef::new("a", 0), Role::Logical);
    Ok(net)
}

/// Two four-qubit blocks traced on one in-plane leg pair: the [[6,4,2]]
/// code with stabilizers all-X and all-Z.
pub fn build_single_trace() -> Result<TensorNetwork> {
    build_chain(3)
}

/// Two four-qubit blocks traced on two in-plane pairs; the loop turns two
/// apparent logical pairs into constraints.
pub fn build_double_trace() -> Result<TensorNetwork> {
    let lego = builtin("code_422")?;
    let mut net = TensorNetwork::new(lego.state_matrix.modulus());
    net.add_instance("a", lego.clone())?;
    net.add_instance("b", lego)?;
    net.add_edge(LegRef::new("a", 0), LegRef::new("b", 2))?;
    net.add_edge(LegRef::new("a", 2), LegRef::new("b", 0))?;
    for inst in ["a", "b"] {
        net.set_role(LegRef::new(inst, 4), Role::Logical);
        net.set_role(LegRef::new(inst, 5), Role::Logical);
    }
    net.set_default_role(Role::Physical);
    Ok(net)
}

/// Open L-by-L grid of six-leg perfect-code blocks, bare boundary. The
/// logical legs are independent: extraction finds no constraints.
pub fn build_flat_perfect(l: usize) -> Result<TensorNetwork> {
    if l < 2 {
        return Err(Error::Shape(format!("flat grid needs L >= 2, got {}", l)));
    }
    let lego = builtin("code_513_perfect")?;
    let mut net = TensorNetwork::new(lego.state_matrix.modulus());
    let id = |i: usize, j: usize| format!("p{}_{}", i, j);
    for i in 0..l {
        for j in 0..l {
            net.add_instance(id(i, j), lego.clone())?;
        }
    }
    // In-plane legs 0..=3 as north, west, south, east.
    for i in 0..l {
        for j in 0..l {
            if j + 1 < l {
                net.add_edge(LegRef::new(id(i, j), 0), LegRef::new(id(i, j + 1), 2))?;
            }
            if i + 1 < l {
                net.add_edge(LegRef::new(id(i, j), 3), LegRef::new(id(i + 1, j), 1))?;
            }
            net.set_role(LegRef::new(id(i, j), 5), Role::Logical);
        }
    }
    net.set_default_role(Role::Physical);
    Ok(net)
}

/// Two [[15,1,3]] blocks traced on one physical leg each; the remaining
/// 14 + 14 physical legs carry the transversal T/Tdag pattern.
pub fn build_rm_pair() -> Result<TensorNetwork> {
    let lego = builtin("reed_muller_15_1_3")?;
    let mut net = TensorNetwork::new(lego.state_matrix.modulus());
    net.add_instance("a", lego.clone())?;
    net.add_instance("b", lego)?;
    net.add_edge(LegRef::new("a", 0), LegRef::new("b", 0))?;
    net.set_default_role(Role::Physical);
    net.set_role(LegRef::new("a", 15), Role::Logical);
    net.set_role(LegRef::new("b", 15), Role::Logical);
    Ok(net)
}

/// Distance-5 code with a twist defect: a five-qubit perfect block whose
/// first four legs are each encoded by the mixed-Pauli twist block and
/// whose fifth leg passes through an explicit two-leg Hadamard tensor.
pub fn build_triangle_twist() -> Result<TensorNetwork> {
    let outer = builtin("code_513_perfect")?;
    let twist = builtin("twist_code_4qubit")?;
    let had = builtin("hadamard_rank2")?;
    let mut net = TensorNetwork::new(outer.state_matrix.modulus());
    net.add_instance("core", outer)?;
    for leg in 0..4 {
        let id = format!("twist{}", leg);
        net.add_instance(id.clone(), twist.clone())?;
        net.add_edge(LegRef::new("core", leg), LegRef::new(id, 4))?;
    }
    net.add_instance("h", had)?;
    net.add_edge(LegRef::new("core", 4), LegRef::new("h", 0))?;
    net.set_default_role(Role::Physical);
    net.set_role(LegRef::new("core", 5), Role::Logical);
    Ok(net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
    Z,
}

fn vertex_id(x: usize, y: usize, z: usize) -> String {
    format!("v{}_{}_{}", x, y, z)
}

/// Directional leg of the eight-leg Steane block at a vertex of the given
/// parity. Qubit 0 and the logical leg stay at the vertex; the two parities
/// differ by swapping the +z and -z legs.
fn steane_leg(axis: Axis, positive: bool, odd_parity: bool) -> usize {
    match (axis, positive) {
        (Axis::X, true) => 1,
        (Axis::X, false) => 2,
        (Axis::Y, true) => 3,
        (Axis::Y, false) => 4,
        (Axis::Z, true) => {
            if odd_parity {
                5
            } else {
                6
            }
        }
        (Axis::Z, false) => {
            if odd_parity {
                6
            } else {
                5
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Boundary3d {
    /// Outward legs stay dangling as physical qubits.
    Bare,
    /// Like `Bare`, except the corner pair of outward legs shared by the
    /// origin vertex and its +x neighbor are traced together, producing a
    /// weight-2 edge stabilizer.
    Corner,
    /// Caller-provided contractions; remaining outward legs are left
    /// without roles, so the build fails unless the list covers them all.
    Pairs(Vec<(LegRef, LegRef)>),
}

/// Cubic lattice of Steane blocks. Every vertex keeps its qubit-0 leg
/// (physical) and logical leg dangling; directional legs trace to axis
/// neighbors; boundary legs are handled per the boundary choice.
pub fn build_3d_steane(
    lx: usize,
    ly: usize,
    lz: usize,
    boundary: &Boundary3d,
) -> Result<TensorNetwork> {
    if lx == 0 || ly == 0 || lz == 0 {
        return Err(Error::Shape("3d lattice needs positive extent".into()));
    }
    let lego = builtin("steane_713")?;
    let mut net = TensorNetwork::new(lego.state_matrix.modulus());
    let vertices: Vec<(usize, usize, usize)> = (0..lx)
        .flat_map(|x| (0..ly).flat_map(move |y| (0..lz).map(move |z| (x, y, z))))
        .collect();
    for &(x, y, z) in &vertices {
        net.add_instance(vertex_id(x, y, z), lego.clone())?;
    }
    for &(x, y, z) in &vertices {
        let odd = (x + y + z) % 2 == 1;
        let axes = [
            (Axis::X, x + 1 < lx, vertex_id(x + 1, y, z)),
            (Axis::Y, y + 1 < ly, vertex_id(x, y + 1, z)),
            (Axis::Z, z + 1 < lz, vertex_id(x, y, z + 1)),
        ];
        for (axis, exists, neighbor) in axes {
            if exists {
                net.add_edge(
                    LegRef::new(vertex_id(x, y, z), steane_leg(axis, true, odd)),
                    LegRef::new(neighbor, steane_leg(axis, false, !odd)),
                )?;
            }
        }
        net.set_role(LegRef::new(vertex_id(x, y, z), 0), Role::Physical);
        net.set_role(LegRef::new(vertex_id(x, y, z), 7), Role::Logical);
    }
    match boundary {
        Boundary3d::Bare => net.set_default_role(Role::Physical),
        Boundary3d::Corner => {
            if lx < 2 {
                return Err(Error::Shape("corner boundary needs lx >= 2".into()));
            }
            let u = vertex_id(0, 0, 0);
            let v = vertex_id(1, 0, 0);
            net.add_edge(
                LegRef::new(u.clone(), steane_leg(Axis::Y, false, false)),
                LegRef::new(v.clone(), steane_leg(Axis::Y, false, true)),
            )?;
            net.add_edge(
                LegRef::new(u, steane_leg(Axis::Z, false, false)),
                LegRef::new(v, steane_leg(Axis::Z, false, true)),
            )?;
            net.set_default_role(Role::Physical);
        }
        Boundary3d::Pairs(pairs) => {
            for (a, b) in pairs {
                net.add_edge(a.clone(), b.clone())?;
            }
        }
    }
    Ok(net)
}

/// All-same-Pauli candidate stabilizers on the eight vertex qubits of each
/// colored cube (even minimal corner), over the built physical legs.
pub fn cube_operators(
    built: &crate::network::BuiltState,
    lx: usize,
    ly: usize,
    lz: usize,
) -> Vec<PauliVector> {
    let d = built.matrix.modulus();
    let n = built.legs.len();
    let mut ops = Vec::new();
    for mx in 0..lx.saturating_sub(1) {
        for my in 0..ly.saturating_sub(1) {
            for mz in 0..lz.saturating_sub(1) {
                if (mx + my + mz) % 2 != 0 {
                    continue;
                }
                for x_type in [true, false] {
                    let mut p = PauliVector::identity(n, d);
                    for dx in 0..2 {
                        for dy in 0..2 {
                            for dz in 0..2 {
                                let leg = LegRef::new(vertex_id(mx + dx, my + dy, mz + dz), 0);
                                let col = built.column_of(&leg).expect("vertex qubit dangles");
                                if x_type {
                                    p.set_leg(col, 1, 0);
                                } else {
                                    p.set_leg(col, 0, 1);
                                }
                            }
                        }
                    }
                    ops.push(p);
                }
            }
        }
    }
    ops
}

/// Contract two three-leg GHZ encoders with the two-leg Hadamard block and
/// compare against the directly written dual state of the controlled-phase
/// gate.
pub fn verify_cz_synthesis(d: u32) -> Result<bool> {
    let modulus = FieldModulus::new(d)?;
    let ghz = repetition_lego(3, true, modulus)?;
    let had = hadamard_lego(modulus);
    let mut net = TensorNetwork::new(modulus);
    net.add_instance("enc1", ghz.clone())?;
    net.add_instance("enc2", ghz)?;
    net.add_instance("h", had)?;
    net.add_edge(LegRef::new("enc1", 2), LegRef::new("h", 0))?;
    net.add_edge(LegRef::new("enc2", 2), LegRef::new("h", 1))?;
    net.set_default_role(Role::Physical);
    let built = net.build()?;
    // Dangling order: enc1 out/in, enc2 out/in.
    let neg = modulus.neg(1);
    let rows = vec![
        PauliVector::from_xz(vec![1, 1, 0, 0], vec![0, 0, 1, 0], modulus)?,
        PauliVector::from_xz(vec![0, 0, 1, 1], vec![1, 0, 0, 0], modulus)?,
        PauliVector::from_xz(vec![0, 0, 0, 0], vec![1, neg, 0, 0], modulus)?,
        PauliVector::from_xz(vec![0, 0, 0, 0], vec![0, 0, 1, neg], modulus)?,
    ];
    let oracle = CheckMatrix::new(rows, 4, modulus)?;
    Ok(built.matrix.row_space_equal(&oracle))
}
