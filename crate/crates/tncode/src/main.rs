//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input problems, 2 mathematical
//! inconsistencies (failed traces, operators outside the row space),
//! 3 exceeded search budgets.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use tncode::analysis::{self, Distance, Method};
use tncode::decoder::{self, NoiseModel};
use tncode::duality::CodeReport;
use tncode::legos::{self, Boundary3d, SurfaceBoundary};
use tncode::netfile;
use tncode::network::{BuiltState, LegRef, TensorNetwork};
use tncode::pushing::{
    find_representation, flow_decomposition, verify_symbolic, MatchingTable, SymbolicCheck,
    SymbolicUPS,
};
use tncode::symplectic::parse_pauli;
use tncode::{Error, Result};

#[derive(Parser)]
#[command(
    name = "tncode",
    about = "Build and analyze stabilizer codes by gluing small code tensors",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Contract a network file and report the resulting code.
    Build {
        net: PathBuf,
        /// Also write the machine-readable report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Emit a ready-made network file.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Code metrics: distance, erasure correctability, CSS structure.
    Analyze {
        net: PathBuf,
        /// Search for the code distance.
        #[arg(long)]
        distance: bool,
        /// Cap the distance search at this weight; reports a floor when
        /// nothing smaller exists.
        #[arg(long)]
        max_weight: Option<usize>,
        /// Bare distance for subsystem codes (no gauge cleaning).
        #[arg(long)]
        bare: bool,
        /// Comma-separated dangling legs (id.leg) to test as an erasure.
        #[arg(long)]
        erasure: Option<String>,
        /// Print the CSS and self-duality flags.
        #[arg(long)]
        css: bool,
    },
    /// Check a symbolic operator assignment over the network's edges.
    Push {
        net: PathBuf,
        /// Assignment file (per-instance operator entries).
        #[arg(long)]
        assign: PathBuf,
        /// Write the labeled network as Graphviz.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Find a network operator with a prescribed action on chosen legs.
    Represent {
        net: PathBuf,
        /// Prescription file (wanted action, leg by leg).
        #[arg(long)]
        prescribe: PathBuf,
        /// Write the per-lego flow of the found operator as Graphviz.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Estimate the maximum-likelihood decoder's failure rate.
    Decode {
        net: PathBuf,
        /// Depolarizing noise strength.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the sparse indicator tensor of a logical operator.
    #[command(name = "export-tl")]
    ExportTl {
        net: PathBuf,
        /// Logical action as a Pauli string over the logical legs.
        #[arg(long)]
        logical: Option<String>,
        /// Export all logical labels with per-tensor headers.
        #[arg(long)]
        family: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DemoCommon {
    /// Write the network file here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also build the network and print its report.
    #[arg(long)]
    build: bool,
}

#[derive(Subcommand)]
enum Demo {
    /// Torus of four-leg blocks; two encoded qudits.
    Toric {
        #[arg(long, default_value_t = 3)]
        l: usize,
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Planar patch with a choice of boundary.
    Surface {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// bare | stoppers | repetition-<r>
        #[arg(long, default_value = "stoppers")]
        boundary: String,
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Surface patch with alternating conjugation: XZZX-type checks.
    Xzzx {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Five-qubit core with twist tiles; distance-five code.
    Twist {
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Surface network re-roled into a subsystem code.
    #[command(name = "bacon-shor")]
    BaconShor {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Chain of four-leg blocks: a [[2m, 2m-2, 2]] code.
    Chain {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[command(flatten)]
        common: DemoCommon,
    },
    /// One-dimensional strip whose logical legs outnumber its checks.
    #[command(name = "1d-dual")]
    OneDDual {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Three-dimensional lattice of eight-leg blocks.
    #[command(name = "3d")]
    ThreeD {
        #[arg(long, default_value_t = 2)]
        lx: usize,
        #[arg(long, default_value_t = 2)]
        ly: usize,
        #[arg(long, default_value_t = 2)]
        lz: usize,
        /// bare | corner
        #[arg(long, default_value = "corner")]
        boundary: String,
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Two fifteen-qubit tiles glued on one leg; transversal-gate fixture.
    #[command(name = "rm-pair")]
    RmPair {
        #[command(flatten)]
        common: DemoCommon,
    },
    /// L x L grid of five-qubit blocks; every grid site keeps its logical leg.
    #[command(name = "flat-perfect")]
    FlatPerfect {
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Verify the two-block controlled-Z synthesis against its Choi state.
    #[command(name = "cz-check")]
    CzCheck {
        #[arg(long, default_value_t = 2)]
        d: u32,
    },
    /// Two four-leg blocks glued into the seven-qubit code.
    #[command(name = "steane-from-422")]
    SteaneFrom422 {
        #[command(flatten)]
        common: DemoCommon,
    },
    /// Two legs traced between two blocks; constrained logical legs.
    #[command(name = "double-trace")]
    DoubleTrace {
        #[command(flatten)]
        common: DemoCommon,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_) => 3,
        Error::TraceRank { .. }
        | Error::NonCommuting(..)
        | Error::NotInRowSpace
        | Error::LabelMismatch(..) => 2,
        _ => 1,
    }
}

fn main() {
    // Die quietly when a downstream pipe closes instead of panicking on
    // the next print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e);
        exit(exit_code(&e));
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Build { net, report } => build_cmd(&net, report.as_deref()),
        Cmd::Demo { which } => demo_cmd(which),
        Cmd::Analyze {
            net,
            distance,
            max_weight,
            bare,
            erasure,
            css,
        } => analyze_cmd(&net, distance, max_weight, bare, erasure.as_deref(), css),
        Cmd::Push { net, assign, dot } => push_cmd(&net, &assign, dot.as_deref()),
        Cmd::Represent {
            net,
            prescribe,
            dot,
        } => represent_cmd(&net, &prescribe, dot.as_deref()),
        Cmd::Decode {
            net,
            p,
            trials,
            seed,
            out,
        } => decode_cmd(&net, p, trials, seed, out.as_deref()),
        Cmd::ExportTl {
            net,
            logical,
            family,
            out,
        } => export_tl_cmd(&net, logical.as_deref(), family, out.as_deref()),
    }
}

fn built_report(net: &TensorNetwork) -> Result<(BuiltState, CodeReport)> {
    let built = net.build()?;
    let report = built.report()?;
    Ok((built, report))
}

fn print_report(built: &BuiltState, report: &CodeReport) {
    let rf = netfile::report_file(report, Some(&built.legs));
    print!("{}", netfile::render_report(&rf));
}

fn build_cmd(net: &std::path::Path, report_out: Option<&std::path::Path>) -> Result<()> {
    let net = netfile::load_network(net)?;
    let (built, report) = built_report(&net)?;
    print_report(&built, &report);
    if let Some(path) = report_out {
        let rf = netfile::report_file(&report, Some(&built.legs));
        fs::write(path, netfile::to_json(&rf)?)?;
    }
    Ok(())
}

fn parse_surface_boundary(s: &str) -> Result<SurfaceBoundary> {
    match s {
        "bare" => Ok(SurfaceBoundary::Bare),
        "stoppers" => Ok(SurfaceBoundary::Stoppers),
        other => match other.strip_prefix("repetition-") {
            Some(r) => {
                let runs: usize = r.parse().map_err(|_| {
                    Error::Network(format!("bad repetition run length in {:?}", other))
                })?;
                Ok(SurfaceBoundary::Repetition(runs))
            }
            None => Err(Error::Network(format!(
                "boundary {:?} is not bare, stoppers, or repetition-<r>",
                other
            ))),
        },
    }
}

fn parse_3d_boundary(s: &str) -> Result<Boundary3d> {
    match s {
        "bare" => Ok(Boundary3d::Bare),
        "corner" => Ok(Boundary3d::Corner),
        other => Err(Error::Network(format!(
            "boundary {:?} is not bare or corner",
            other
        ))),
    }
}

fn emit_demo(net: &TensorNetwork, common: &DemoCommon) -> Result<()> {
    let text = netfile::to_json(&netfile::from_network(net)?)?;
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{}", text),
    }
    if common.build {
        let (built, report) = built_report(net)?;
        print_report(&built, &report);
    }
    Ok(())
}

fn demo_cmd(which: Demo) -> Result<()> {
    match which {
        Demo::Toric { l, common } => emit_demo(&legos::build_toric(l)?, &common),
        Demo::Surface {
            m,
            n,
            boundary,
            common,
        } => emit_demo(
            &legos::build_surface(m, n, &parse_surface_boundary(&boundary)?)?,
            &common,
        ),
        Demo::Xzzx { m, n, common } => emit_demo(&legos::build_xzzx(m, n)?, &common),
        Demo::Twist { common } => emit_demo(&legos::build_triangle_twist()?, &common),
        Demo::BaconShor { m, n, common } => emit_demo(&legos::build_bacon_shor(m, n)?, &common),
        Demo::Chain { m, common } => emit_demo(&legos::build_chain(m)?, &common),
        Demo::OneDDual { m, n, common } => emit_demo(&legos::build_1d_dual(m, n)?, &common),
        Demo::ThreeD {
            lx,
            ly,
            lz,
            boundary,
            common,
        } => emit_demo(
            &legos::build_3d_steane(lx, ly, lz, &parse_3d_boundary(&boundary)?)?,
            &common,
        ),
        Demo::RmPair { common } => emit_demo(&legos::build_rm_pair()?, &common),
        Demo::FlatPerfect { l, common } => emit_demo(&legos::build_flat_perfect(l)?, &common),
        Demo::CzCheck { d } => {
            if legos::verify_cz_synthesis(d)? {
                println!("PASS: two-block synthesis matches the controlled-Z Choi state (d={})", d);
                Ok(())
            } else {
                println!("FAIL: synthesis does not match the controlled-Z Choi state (d={})", d);
                Err(Error::NotInRowSpace)
            }
        }
        Demo::SteaneFrom422 { common } => emit_demo(&legos::build_steane_from_422()?, &common),
        Demo::DoubleTrace { common } => emit_demo(&legos::build_double_trace()?, &common),
    }
}

fn parse_erasure_legs(spec: &str, built: &BuiltState, report: &CodeReport) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let key = part.trim();
        let (id, leg) = key
            .rsplit_once('.')
            .ok_or_else(|| Error::Network(format!("erasure leg {:?} is not id.leg", key)))?;
        let leg: usize = leg
            .parse()
            .map_err(|_| Error::Network(format!("erasure leg {:?} is not id.leg", key)))?;
        let col = built
            .column_of(&LegRef::new(id, leg))
            .ok_or_else(|| Error::UnknownName(format!("dangling leg {}", key)))?;
        let phys = report
            .physical_legs
            .iter()
            .position(|&c| c == col)
            .ok_or_else(|| Error::Network(format!("leg {} is not physical", key)))?;
        out.push(phys);
    }
    Ok(out)
}

fn analyze_cmd(
    net: &std::path::Path,
    distance: bool,
    max_weight: Option<usize>,
    bare: bool,
    erasure: Option<&str>,
    css: bool,
) -> Result<()> {
    let net = netfile::load_network(net)?;
    let (built, report) = built_report(&net)?;
    print_report(&built, &report);
    if css {
        println!("css: {}", if report.css { "yes" } else { "no" });
        println!("self-dual: {}", if report.self_dual { "yes" } else { "no" });
    }
    if distance {
        let run = |cap: Option<usize>| {
            if bare {
                analysis::distance_bare(&report, cap)
            } else {
                analysis::distance(&report, cap)
            }
        };
        let result = match run(max_weight) {
            Err(Error::BudgetExceeded(_)) if max_weight.is_none() => {
                // Too big to enumerate outright; a capped sweep still gives
                // an honest floor or a small exact answer.
                println!("enumeration budget exceeded; falling back to a capped search");
                run(Some(3))
            }
            other => other,
        }?;
        let method = match result.method {
            Method::Exhaustive => "exhaustive",
            Method::WeightCapped => "weight-capped",
        };
        match result.distance {
            Distance::Exact(v) => println!("distance: {} (exact, {})", v, method),
            Distance::AtLeast(v) => println!("distance: >= {} ({})", v, method),
        }
        if let Some(w) = &result.witness {
            println!("witness: {}", tncode::symplectic::print_pauli(w));
        }
    }
    if let Some(spec) = erasure {
        let legs = parse_erasure_legs(spec, &built, &report)?;
        let verdict = analysis::is_correctable_erasure(&report, &legs);
        println!(
            "erasure [{}]: {}",
            spec.trim(),
            if verdict { "correctable" } else { "not correctable" }
        );
    }
    Ok(())
}

fn symbolic_dot(
    net: &TensorNetwork,
    assignment: &BTreeMap<String, SymbolicUPS>,
    check: &SymbolicCheck,
) -> String {
    let mut out = String::from("graph push {\n");
    for (id, _) in net.instances() {
        out.push_str(&format!(
            "  \"{}\" [label=\"{}: {}\"];\n",
            id, id, assignment[id].name
        ));
    }
    for (a, b) in net.edges() {
        let la = &assignment[&a.instance].labels[a.leg];
        let lb = &assignment[&b.instance].labels[b.leg];
        let bad = check.mismatches.iter().any(|(x, y)| x == a && y == b);
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [label=\"{}|{}\"{}];\n",
            a.instance,
            b.instance,
            la,
            lb,
            if bad { " color=red" } else { "" }
        ));
    }
    for (leg, label) in &check.dangling {
        if label.is_identity() {
            continue;
        }
        out.push_str(&format!(
            "  \"{}\" [shape=point];\n  \"{}\" -- \"{}\" [label=\"{}\" style=dashed];\n",
            leg, leg.instance, leg, label
        ));
    }
    out.push_str("}\n");
    out
}

fn push_cmd(
    net: &std::path::Path,
    assign: &std::path::Path,
    dot: Option<&std::path::Path>,
) -> Result<()> {
    let net = netfile::load_network(net)?;
    let file: netfile::AssignmentFile = serde_json::from_str(&fs::read_to_string(assign)?)?;
    let assignment = netfile::to_assignment(&net, &file)?;
    let table = MatchingTable::for_dimension(net.dimension.get());
    let check = verify_symbolic(&net, &assignment, &table)?;
    if check.ok {
        println!("ok: every edge carries a matched pair");
        for (leg, label) in &check.dangling {
            if !label.is_identity() {
                println!("dangling {}: {}", leg, label);
            }
        }
    } else {
        for (a, b) in &check.mismatches {
            println!("mismatch on edge {} -- {}", a, b);
        }
    }
    if let Some(path) = dot {
        fs::write(path, symbolic_dot(&net, &assignment, &check))?;
    }
    if check.ok {
        Ok(())
    } else {
        Err(Error::LabelMismatch(
            "assignment".into(),
            "edge labels".into(),
        ))
    }
}

fn represent_cmd(
    net: &std::path::Path,
    prescribe: &std::path::Path,
    dot: Option<&std::path::Path>,
) -> Result<()> {
    let net = netfile::load_network(net)?;
    let built = net.build()?;
    let file: netfile::PrescriptionFile = serde_json::from_str(&fs::read_to_string(prescribe)?)?;
    let prescription = netfile::to_prescription(&file, net.dimension)?;
    match find_representation(&built, &prescription)? {
        Some(rep) => {
            println!(
                "representation: {}",
                tncode::symplectic::print_pauli(&rep.operator)
            );
            for (leg, col) in built.legs.iter().zip(0..) {
                let (x, z) = (rep.operator.x(col), rep.operator.z(col));
                if x != 0 || z != 0 {
                    println!("  {}: x{}z{}", leg, x, z);
                }
            }
            if let Some(path) = dot {
                let flow = flow_decomposition(&built, &rep.operator)?;
                fs::write(path, flow.to_dot())?;
            }
            Ok(())
        }
        None => {
            println!("no representation: the prescription is not realizable");
            Err(Error::NotInRowSpace)
        }
    }
}

fn decode_cmd(
    net: &std::path::Path,
    p: f64,
    trials: u64,
    seed: u64,
    out: Option<&std::path::Path>,
) -> Result<()> {
    let net = netfile::load_network(net)?;
    let (_, report) = built_report(&net)?;
    let noise = NoiseModel::depolarizing(net.dimension.get(), p)?;
    let mc = decoder::monte_carlo(&report, &noise, trials, seed)?;
    let text = format!(
        "{}\n{}\n",
        decoder::MonteCarloReport::csv_header(),
        mc.csv_line()
    );
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

fn export_tl_cmd(
    net: &std::path::Path,
    logical: Option<&str>,
    family: bool,
    out: Option<&std::path::Path>,
) -> Result<()> {
    let net = netfile::load_network(net)?;
    let (_, report) = built_report(&net)?;
    let text = if family {
        let tensors = decoder::export_tl_family(&report)?;
        let mut text = String::new();
        let mut total = 0usize;
        for tl in &tensors {
            total += tl.len();
            let label: String = tl.label.iter().map(|c| c.to_string()).collect();
            text.push_str(&format!("# L={} entries={}\n", label, tl.len()));
            text.push_str(&tl.to_text());
        }
        text.push_str(&format!(
            "# tensors={} total_entries={}\n",
            tensors.len(),
            total
        ));
        text
    } else {
        let spec = logical.ok_or_else(|| {
            Error::Network("pass --logical <pauli> or --family".into())
        })?;
        let action = parse_pauli(spec, report.stabilizers.modulus())?;
        let tl = decoder::export_tl(&report, &action)?;
        tl.to_text()
    };
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(())
}
