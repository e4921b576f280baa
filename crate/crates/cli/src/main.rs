//! Command-line front end: measure complexes, build subdivisions and
//! retractions, verify the sandwich inclusions, run the squeeze pipeline,
//! check triangularity, and render subdivision figures.
//!
//! Exit codes: 0 on success/pass, 1 on verification failure, 2 on input
//! errors. The `SQUEEZE_SAMPLES` environment variable overrides the default
//! per-simplex random sample count wherever `--samples` is not given.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use squeeze_core::complex::Simplex;
use squeeze_core::document::{parse_document, serialize_document, BuiltMap, ComplexDocument};
use squeeze_core::error::{Error, Result};
use squeeze_core::exec::ExecMode;
use squeeze_core::metric::{comesh, diam_measured, mesh, rad_measured, MeasuredComplex};
use squeeze_core::render::{auto_layout, render_svg, subdivision_panels};
use squeeze_core::report::VerificationReport;
use squeeze_core::retraction::{build_retraction, dual_cell_in, verify_retraction, VerifyOptions};
use squeeze_core::sample::SampleSpec;
use squeeze_core::squeeze::{
    conjecture_probe, is_triangular, squeeze, squeeze_constants, verify_sandwich, SandwichOptions,
    SqueezeOptions, TriControl,
};
use squeeze_core::subdivision::{SubdivisionTower, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(
    name = "squeeze",
    version,
    about = "Metric geometry of finite simplicial complexes: subdivisions, retractions, and triangular equivalences"
)]
struct Cli {
    /// Emit machine-readable JSON instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    /// Force sequential sampling and measurement.
    #[arg(long, global = true)]
    sequential: bool,
    /// Base seed folded into every sampling stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate barycentric subdivision and write the resulting complex.
    Subdivide {
        input: PathBuf,
        /// Number of subdivision iterations.
        #[arg(short, long, default_value_t = 1)]
        iterations: usize,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print mesh, comesh, and per-simplex diameter/radius.
    Measure {
        input: PathBuf,
        /// Measure through this named map of the document instead of the
        /// complex's own charts.
        #[arg(long)]
        control: Option<String>,
    },
    /// List the dual cell of a simplex inside an iterated subdivision.
    Dualcell {
        input: PathBuf,
        /// Base simplex as comma-separated vertex ids, e.g. "0,1".
        #[arg(long)]
        simplex: String,
        /// Subdivision level of the dual cell.
        #[arg(short, long, default_value_t = 1)]
        iterations: usize,
    },
    /// Build (and optionally verify) a retraction to the identity.
    Retraction {
        input: PathBuf,
        /// Control bound for the retraction.
        #[arg(long)]
        epsilon: f64,
        /// Force this subdivision depth instead of the computed one.
        #[arg(short, long)]
        iterations: Option<usize>,
        /// Run the sampled verification suite.
        #[arg(long)]
        verify: bool,
        /// Random samples per simplex for --verify.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Print the squeezing constants k, K, eps(X,Y) and the depth for X, Y.
    Constants {
        x: PathBuf,
        y: PathBuf,
        /// Claimed control bound (defaults to eps(X,Y)/2).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Verify the sandwich inclusions for a stored surjective map.
    LemmaCheck {
        input: PathBuf,
        /// Name of the map in the document (defaults to its only map).
        #[arg(long)]
        map: Option<String>,
        /// Proper face of the codomain as comma-separated vertex ids.
        #[arg(long)]
        rho: String,
        #[arg(long)]
        epsilon: f64,
        /// Random samples per simplex.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run the squeeze pipeline on a stored equivalence instance.
    Squeeze {
        input: PathBuf,
        /// Random samples per simplex for certification.
        #[arg(long)]
        samples: Option<usize>,
        /// Write the certificate report to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check exact triangularity of a stored map against a control map.
    CheckTriangular {
        input: PathBuf,
        /// Document holding the control map (may be the same file).
        #[arg(long)]
        control: PathBuf,
        /// Map name in the input document (defaults to its only map).
        #[arg(long)]
        map: Option<String>,
        /// Map name in the control document (defaults to its only map).
        #[arg(long)]
        control_map: Option<String>,
    },
    /// Render an iterated subdivision (optionally with retraction stages).
    Render {
        input: PathBuf,
        /// Subdivision level to draw.
        #[arg(short, long, default_value_t = 2)]
        iterations: usize,
        /// Draw one panel per stage with retraction fills and vertex arrows.
        #[arg(long)]
        stages: bool,
        /// Output SVG file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Experimental: re-check a squeezed instance against one more level of
    /// subdivision control. Failures are expected and informative.
    ConjectureProbe {
        input: PathBuf,
        /// Random samples per simplex for the underlying squeeze.
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                // A refused precondition is a verification failure, not bad
                // input: the instance was well-formed but its claim failed.
                Error::PreconditionFailed(_) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn mode_of(cli: &Cli) -> ExecMode {
    if cli.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::default()
    }
}

/// Per-simplex random sample count: flag, then SQUEEZE_SAMPLES, then default.
fn effective_samples(flag: Option<usize>, default: usize) -> usize {
    flag.or_else(|| {
        std::env::var("SQUEEZE_SAMPLES")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(default)
}

fn read_doc(path: &Path) -> Result<ComplexDocument> {
    let text = fs::read_to_string(path)?;
    parse_document(&text)
}

fn emit(path: Option<&PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn parse_simplex(text: &str) -> Result<Simplex> {
    let vertices = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidDocument(format!("bad vertex id {part:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    Simplex::new(vertices)
}

/// Resolve a named map, defaulting to the document's only map.
fn resolve_map(doc: &ComplexDocument, name: Option<&str>) -> Result<BuiltMap> {
    match name {
        Some(n) => doc.build_map(n),
        None => {
            let mut names = doc.maps.keys();
            match (names.next(), names.next()) {
                (Some(only), None) => doc.build_map(only),
                (None, _) => Err(Error::InvalidDocument(
                    "document stores no maps; add one or pass --map".into(),
                )),
                (Some(_), Some(_)) => Err(Error::InvalidDocument(
                    "document stores several maps; pick one with --map".into(),
                )),
            }
        }
    }
}

fn print_report(report: &VerificationReport, json: bool) -> Result<()> {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report)
                .map_err(|e| Error::InvalidDocument(e.to_string()))?
        );
    } else {
        println!("{report}");
    }
    Ok(())
}

fn exit_for(report: &VerificationReport) -> u8 {
    if report.checks.iter().any(|c| c.fail > 0) {
        1
    } else {
        0
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let mode = mode_of(cli);
    match &cli.command {
        Command::Subdivide {
            input,
            iterations,
            output,
        } => {
            let doc = read_doc(input)?;
            let base = doc.complex()?;
            let mut tower = SubdivisionTower::new(base.clone());
            tower.set_mode(mode);
            tower.ensure_depth(*iterations)?;
            let subdivided = tower.complex(*iterations)?.clone();
            let mut layout = BTreeMap::new();
            if let Some(base_layout) = doc.layout() {
                for v in subdivided.vertex_ids() {
                    let point = tower.base_pos(*iterations, v)?;
                    let mut pos = vec![0.0_f64; 2];
                    for (b, w) in point.support().iter().zip(point.coords()) {
                        let coords = &base_layout[b];
                        pos[0] += w * coords[0];
                        pos[1] += w * coords.get(1).copied().unwrap_or(0.0);
                    }
                    layout.insert(v, pos);
                }
            }
            let out = ComplexDocument::from_complex(&subdivided, &layout);
            emit(output.as_ref(), &serialize_document(&out))?;
            Ok(0)
        }
        Command::Measure { input, control } => {
            let doc = read_doc(input)?;
            let base = doc.complex()?;
            let built;
            let measured = match control {
                Some(name) => {
                    built = doc.build_map(name)?;
                    MeasuredComplex::Mapped(&built.map)
                }
                None => MeasuredComplex::IdentityOn(base.as_ref()),
            };
            let mesh_v = mesh(&measured, mode)?;
            let comesh_v = comesh(&measured, mode)?;
            let mut tops = measured.complex().maximal_simplices();
            tops.sort();
            if cli.json {
                let rows: Vec<serde_json::Value> = tops
                    .iter()
                    .map(|s| {
                        Ok(serde_json::json!({
                            "simplex": s.to_string(),
                            "diam": diam_measured(&measured, s)?,
                            "rad": rad_measured(&measured, s)?,
                        }))
                    })
                    .collect::<Result<_>>()?;
                println!(
                    "{}",
                    serde_json::json!({
                        "mesh": mesh_v,
                        "comesh": comesh_v,
                        "maximal_simplices": rows,
                    })
                );
            } else {
                println!("mesh    {mesh_v:.9}");
                println!("comesh  {comesh_v:.9}");
                println!("simplex  diam  rad");
                for s in &tops {
                    println!(
                        "{s}  {:.9}  {:.9}",
                        diam_measured(&measured, s)?,
                        rad_measured(&measured, s)?
                    );
                }
            }
            Ok(0)
        }
        Command::Dualcell {
            input,
            simplex,
            iterations,
        } => {
            let doc = read_doc(input)?;
            let base = doc.complex()?;
            let sigma = parse_simplex(simplex)?;
            let mut tower = SubdivisionTower::new(base);
            tower.set_mode(mode);
            tower.ensure_depth(*iterations)?;
            let cell = dual_cell_in(&tower, *iterations, &sigma)?;
            if cli.json {
                let rows: Vec<String> = cell.iter().map(|s| s.to_string()).collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "simplex": sigma.to_string(),
                        "level": iterations,
                        "dual_cell": rows,
                    })
                );
            } else {
                println!("dual cell of {sigma} at level {iterations}:");
                for s in &cell {
                    println!("  {s}");
                }
            }
            Ok(0)
        }
        Command::Retraction {
            input,
            epsilon,
            iterations,
            verify,
            samples,
        } => {
            let doc = read_doc(input)?;
            let base = doc.complex()?;
            let bundle = build_retraction(base, *epsilon, *iterations, DEFAULT_BUDGET, mode)?;
            if !cli.json {
                println!(
                    "retraction: depth={} epsilon={:.9}",
                    bundle.depth(),
                    bundle.epsilon()
                );
                for j in 1..=bundle.depth() {
                    println!(
                        "  stage {j}: {} simplices -> {}",
                        bundle.space(j)?.complex().simplices().count(),
                        bundle.space(j - 1)?.complex().simplices().count(),
                    );
                }
            }
            if *verify {
                let random = effective_samples(*samples, 100);
                let opts = VerifyOptions {
                    samples: SampleSpec::new(6, random, cli.seed),
                    mode,
                    ..VerifyOptions::default()
                };
                let report = verify_retraction(&bundle, &opts)?;
                print_report(&report, cli.json)?;
                return Ok(exit_for(&report));
            } else if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "depth": bundle.depth(),
                        "epsilon": bundle.epsilon(),
                    })
                );
            }
            Ok(0)
        }
        Command::Constants { x, y, epsilon } => {
            let doc_x = read_doc(x)?;
            let doc_y = read_doc(y)?;
            let cx = doc_x.complex()?;
            let cy = doc_y.complex()?;
            let mx = MeasuredComplex::IdentityOn(cx.as_ref());
            let my = MeasuredComplex::IdentityOn(cy.as_ref());
            // Same arithmetic squeeze_constants validates against; computed
            // here first so the default claim can sit strictly inside range.
            let k = mesh(&my, mode)? / (2.0 * comesh(&mx, mode)?);
            let cap_k = 2.0 * comesh(&my, mode)? / mesh(&mx, mode)?;
            let eps_xy = (k * comesh(&mx, mode)?).min(k * comesh(&my, mode)? / cap_k);
            let eps = epsilon.unwrap_or(eps_xy / 2.0);
            let constants = squeeze_constants(&mx, &my, eps, mode)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&constants)
                        .map_err(|e| Error::InvalidDocument(e.to_string()))?
                );
            } else {
                println!("{constants}");
            }
            Ok(0)
        }
        Command::LemmaCheck {
            input,
            map,
            rho,
            epsilon,
            samples,
        } => {
            let doc = read_doc(input)?;
            let built = resolve_map(&doc, map.as_deref())?;
            let rho = parse_simplex(rho)?;
            let random = effective_samples(*samples, 100);
            let opts = SandwichOptions {
                samples: SampleSpec::new(6, random, cli.seed),
                ..SandwichOptions::default()
            };
            let report = verify_sandwich(&built.map, &rho, *epsilon, &opts)?;
            print_report(&report, cli.json)?;
            Ok(exit_for(&report))
        }
        Command::Squeeze {
            input,
            samples,
            output,
        } => {
            let doc = read_doc(input)?;
            let data = doc.equivalence_data()?;
            let random = effective_samples(*samples, 100);
            let opts = SqueezeOptions {
                samples: SampleSpec::new(6, random, cli.seed),
                mode,
                ..SqueezeOptions::default()
            };
            let t = squeeze(&data, &opts)?;
            let rendered = if cli.json {
                let mut text = serde_json::to_string_pretty(t.certificate())
                    .map_err(|e| Error::InvalidDocument(e.to_string()))?;
                text.push('\n');
                text
            } else {
                format!("{}\n", t.certificate())
            };
            if output.is_some() {
                emit(output.as_ref(), &rendered)?;
                println!("certified: {}", t.certified());
            } else {
                print!("{rendered}");
                println!("certified: {}", t.certified());
            }
            Ok(if t.certified() { 0 } else { 1 })
        }
        Command::CheckTriangular {
            input,
            control,
            map,
            control_map,
        } => {
            let doc = read_doc(input)?;
            let built = resolve_map(&doc, map.as_deref())?;
            let control_doc = read_doc(control)?;
            let control_built = resolve_map(&control_doc, control_map.as_deref())?;
            let same = built.map.domain() == control_built.map.domain()
                && built.map.codomain() == control_built.map.codomain()
                && built.map.vertex_images() == control_built.map.vertex_images();
            let summary = if same {
                is_triangular(&built.map, &TriControl::SelfMap)?
            } else {
                is_triangular(&built.map, &TriControl::Map(&control_built.map))?
            };
            let mut report = VerificationReport::new("check-triangular");
            report.push(summary);
            print_report(&report, cli.json)?;
            Ok(exit_for(&report))
        }
        Command::Render {
            input,
            iterations,
            stages,
            output,
        } => {
            let doc = read_doc(input)?;
            let base = doc.complex()?;
            let layout = match doc.layout() {
                Some(l) => l,
                None => auto_layout(base.as_ref())?,
            };
            let panels = subdivision_panels(base, &layout, *iterations, *stages)?;
            let svg = render_svg(&panels)?;
            fs::write(output, svg)?;
            Ok(0)
        }
        Command::ConjectureProbe { input, samples } => {
            let doc = read_doc(input)?;
            let data = doc.equivalence_data()?;
            let random = effective_samples(*samples, 100);
            let opts = SqueezeOptions {
                samples: SampleSpec::new(6, random, cli.seed),
                mode,
                ..SqueezeOptions::default()
            };
            let t = squeeze(&data, &opts)?;
            let report = conjecture_probe(&t)?;
            if !cli.json {
                println!(
                    "experimental probe: failures below are expected and \
                     informative, not errors"
                );
            }
            print_report(&report, cli.json)?;
            Ok(0)
        }
    }
}

