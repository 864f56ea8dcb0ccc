use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use hierlat::graph::{generators, MarkedGraph};
use hierlat::poly::json::{bivar_to_json, trivar_to_json, uni_to_json};
use hierlat::poly::IntPoly;
use hierlat::potts::{chromatic, partition_fk, tutte};
use hierlat::render::{classify_grid, overlay_zeros, PixelClass, RenderConfig};
use hierlat::renorm::{derive_template, reduce_map, RecursionTemplate};
use hierlat::verify::run_verify;
use hierlat::zeros::{empirical_measure, exact_iterate, level_chromatic_poly, level_zeros, measure_summary};
use hierlat::{graph, Budgets, Error, Result};

/// Chromatic zeros of hierarchical lattices.
#[derive(Parser, Debug)]
#[command(name = "hierlat", version)]
struct Cli {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    budgets: BudgetArgs,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Source {
    /// Generator graph file (JSON).
    #[arg(long, global = true, conflicts_with = "generator")]
    graph: Option<PathBuf>,
    /// Built-in generator: dhl, kfold:<k>, triangle, tripod, linear, split-diamond.
    #[arg(long, global = true)]
    generator: Option<String>,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Largest edge count for subset enumeration.
    #[arg(long, global = true)]
    budget_edges: Option<usize>,
    /// Largest edge count of a substituted lattice.
    #[arg(long, global = true)]
    budget_lattice_edges: Option<u64>,
    /// Total decimal digits allowed in one exact level.
    #[arg(long, global = true)]
    budget_digits: Option<u64>,
    /// Largest number of rendered pixels.
    #[arg(long, global = true)]
    budget_pixels: Option<u64>,
    /// Largest degree handed to the root finder.
    #[arg(long, global = true)]
    budget_degree: Option<usize>,
    /// Largest number of spin configurations.
    #[arg(long, global = true)]
    budget_spins: Option<u64>,
    /// Largest deletion-contraction memo table.
    #[arg(long, global = true)]
    budget_memo: Option<usize>,
}

impl BudgetArgs {
    fn budgets(&self) -> Result<Budgets> {
        let mut b = Budgets::default();
        let positive = |name: &str, v: u64| {
            if v == 0 {
                Err(Error::InvalidArgument(format!("--budget-{name} must be positive")))
            } else {
                Ok(())
            }
        };
        if let Some(v) = self.budget_edges {
            positive("edges", v as u64)?;
            b.subset_edges = v;
        }
        if let Some(v) = self.budget_lattice_edges {
            positive("lattice-edges", v)?;
            b.lattice_edges = v;
        }
        if let Some(v) = self.budget_digits {
            positive("digits", v)?;
            b.coefficient_digits = v;
        }
        if let Some(v) = self.budget_pixels {
            positive("pixels", v)?;
            b.pixels = v;
        }
        if let Some(v) = self.budget_degree {
            positive("degree", v as u64)?;
            b.root_degree = v;
        }
        if let Some(v) = self.budget_spins {
            positive("spins", v)?;
            b.spin_configs = v;
        }
        if let Some(v) = self.budget_memo {
            positive("memo", v as u64)?;
            b.deletion_contraction_memo = v;
        }
        Ok(b)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recursion template, reduced map, degree and degree-drop set.
    Derive,
    /// Level-n chromatic polynomial.
    Chromatic {
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, value_enum, default_value_t = Method::Recursion)]
        method: Method,
    },
    /// Tutte polynomial of the level-n lattice.
    Tutte {
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Chromatic zeros of level n and their empirical measure.
    Zeros {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// CSV with columns re, im, multiplicity (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        /// JSON file for the empirical measure.
        #[arg(long)]
        measure: Option<PathBuf>,
        /// Disk centre `re,im` for the measure summary.
        #[arg(long, default_value = "0,0")]
        center: String,
        /// Disk radius for the measure summary.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Parameter-plane classification image (binary PPM).
    Render {
        /// re_min,re_max,im_min,im_max
        #[arg(long, default_value = "-2,4,-3,3", allow_hyphen_values = true)]
        region: String,
        /// WxH
        #[arg(long, default_value = "256x256")]
        size: String,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
        /// Stamp the chromatic zeros of this level.
        #[arg(long)]
        overlay_zeros: Option<usize>,
        #[arg(long, default_value_t = 1e-3)]
        basin_radius: f64,
        #[arg(long, default_value_t = 1e6)]
        escape_radius: f64,
        #[arg(long, default_value_t = 5)]
        persistence: usize,
    },
    /// Runs the verification suite.
    Verify {
        #[arg(long, default_value_t = 2)]
        level_max: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Recursion,
    DeletionContraction,
    Fk,
}

fn load_generator(src: &Source) -> Result<MarkedGraph> {
    match (&src.graph, &src.generator) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)?;
            MarkedGraph::from_json(&text)
        }
        (None, Some(name)) => generators::by_name(name),
        (None, None) => Err(Error::InvalidArgument("one of --graph or --generator is required".into())),
    }
}

fn parse_reals<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Parse {
        location: what.to_string(),
        message: format!("expected {N} comma-separated reals, got `{s}`"),
    };
    if parts.len() != N {
        return Err(bad());
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|_| bad())?;
    }
    Ok(out)
}

fn parse_size(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse {
        location: "--size".into(),
        message: format!("expected WxH, got `{s}`"),
    };
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?))
}

fn emit(out: &mut impl Write, json_mode: bool, value: &Value, text: &str) -> Result<()> {
    if json_mode {
        writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable"))?;
    } else {
        write!(out, "{text}")?;
    }
    Ok(())
}

fn level_poly(t: &RecursionTemplate, level: usize, b: &Budgets) -> Result<IntPoly> {
    level_chromatic_poly(&exact_iterate(t, level, b)?)
}

/// Refuses levels whose root count exceeds the root-finding budget before
/// any exact iteration is attempted.
fn check_root_degree(g: &MarkedGraph, level: usize, b: &Budgets) -> Result<()> {
    let needed = graph::level_counts(g, level).map(|(v, _)| v.saturating_sub(1));
    match needed {
        Some(d) if d <= b.root_degree as u128 => Ok(()),
        Some(d) => Err(Error::budget("root-finding degree", d, b.root_degree)),
        None => Err(Error::budget("root-finding degree", "overflow", b.root_degree)),
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Result<bool> {
    let b = cli.budgets.budgets()?;
    let g = load_generator(&cli.source)?;
    match &cli.command {
        Command::Derive => {
            let t = derive_template(&g, &b)?;
            let m = reduce_map(&t)?;
            let value = json!({
                "template": {
                    "u_next": trivar_to_json(&t.u_next),
                    "v_next": trivar_to_json(&t.v_next),
                },
                "reduced_map": {
                    "numerator": bivar_to_json(&m.numerator, ["q", "y"]),
                    "denominator": bivar_to_json(&m.denominator, ["q", "y"]),
                    "common_factor": bivar_to_json(&m.common_factor, ["q", "y"]),
                },
                "generic_degree": m.generic_degree,
                "template_degree": m.template_degree,
                "degree_dropped": m.degree_dropped,
                "v_deg": {
                    "finite": m.v_deg_finite.iter().map(|f| uni_to_json(f, "q")).collect::<Vec<_>>(),
                    "infinity": m.v_deg_contains_infinity,
                },
            });
            let vdeg: Vec<String> = m.v_deg_finite.iter().map(|f| format!("({})", f.display_in("q"))).collect();
            let text = format!(
                "U' = {}\nV' = {}\nN = {}\nD = {}\ncommon factor = {}\ngeneric degree = {} (template degree {}{})\nV_deg: roots of {}{}\n",
                t.u_next,
                t.v_next,
                m.numerator,
                m.denominator,
                m.common_factor,
                m.generic_degree,
                m.template_degree,
                if m.degree_dropped { ", dropped" } else { "" },
                if vdeg.is_empty() { "1".to_string() } else { vdeg.join(" ") },
                if m.v_deg_contains_infinity { ", and infinity" } else { "" },
            );
            emit(out, cli.json, &value, &text)?;
            Ok(true)
        }
        Command::Chromatic { level, method } => {
            let p = match method {
                Method::Recursion => level_poly(&derive_template(&g, &b)?, *level, &b)?,
                Method::DeletionContraction => chromatic(&graph::substitute(&g, *level, &b)?, &b)?,
                Method::Fk => partition_fk(&graph::substitute(&g, *level, &b)?, &b)?.substitute_y(&IntPoly::zero()),
            };
            let value = serde_json::to_value(uni_to_json(&p, "q")).expect("serializable");
            emit(out, cli.json, &value, &format!("{}\n", p.display_in("q")))?;
            Ok(true)
        }
        Command::Tutte { level } => {
            let p = tutte(&graph::substitute(&g, *level, &b)?, &b)?;
            let value = serde_json::to_value(bivar_to_json(&p, ["x", "y"])).expect("serializable");
            emit(out, cli.json, &value, &format!("{}\n", p.display().replace('q', "x")))?;
            Ok(true)
        }
        Command::Zeros {
            level,
            tol,
            output,
            measure,
            center,
            radius,
        } => {
            check_root_degree(&g, *level, &b)?;
            let t = derive_template(&g, &b)?;
            let s = exact_iterate(&t, *level, &b)?;
            let degree = level_chromatic_poly(&s)?.degree().unwrap_or(0);
            let z = level_zeros(&t, &s, *tol, &b)?;
            let mut csv_bytes = Vec::new();
            {
                let mut w = csv::Writer::from_writer(&mut csv_bytes);
                w.write_record(["re", "im", "multiplicity"]).map_err(csv_error)?;
                for (r, m) in &z.roots {
                    w.write_record([format!("{:.17e}", r.re), format!("{:.17e}", r.im), m.to_string()])
                        .map_err(csv_error)?;
                }
                w.flush()?;
            }
            let mu = empirical_measure(&z, s.vertex_count, true);
            let [cre, cim] = parse_reals::<2>(center, "--center")?;
            let summary = radius.map(|r| measure_summary(&mu, Complex64::new(cre, cim), r));
            let measure_value = json!({
                "level": level,
                "vertex_count": s.vertex_count.to_string(),
                "degree": degree,
                "distinct_roots": z.roots.len(),
                "total_mass": mu.total_mass(),
                "atoms": mu.atoms.iter().map(|(q, w)| [q.re, q.im, *w]).collect::<Vec<_>>(),
                "summary": summary.map(|s| json!({
                    "center": [cre, cim],
                    "radius": radius,
                    "mass_within": s.mass_within,
                    "mean": [s.mean_re, s.mean_im],
                    "max_distance": s.max_distance,
                })),
            });
            if let Some(path) = measure {
                fs::write(path, serde_json::to_string_pretty(&measure_value).expect("serializable") + "\n")?;
            }
            match output {
                Some(path) => {
                    fs::write(path, &csv_bytes)?;
                    let value = json!({
                        "level": level,
                        "degree": degree,
                        "distinct_roots": z.roots.len(),
                        "output": path,
                    });
                    let text = format!("level {level}: degree {degree}, {} distinct roots\n", z.roots.len());
                    emit(out, cli.json, &value, &text)?;
                }
                None if cli.json => emit(out, true, &measure_value, "")?,
                None => out.write_all(&csv_bytes)?,
            }
            Ok(true)
        }
        Command::Render {
            region,
            size,
            iters,
            out: path,
            overlay_zeros: overlay,
            basin_radius,
            escape_radius,
            persistence,
        } => {
            let (w, h) = parse_size(size)?;
            let cfg = RenderConfig {
                max_iters: *iters,
                basin_radius_one: *basin_radius,
                escape_radius: *escape_radius,
                persistence_steps: *persistence,
                ..RenderConfig::default()
            }
            .with_region(parse_reals::<4>(region, "--region")?)
            .with_size(w, h);
            let t = derive_template(&g, &b)?;
            let m = reduce_map(&t)?;
            let grid = classify_grid(&m, &cfg, &b)?;
            let mut image = grid.to_image();
            let mut boundary = None;
            if let Some(level) = overlay {
                check_root_degree(&g, *level, &b)?;
                let s = exact_iterate(&t, *level, &b)?;
                let z = level_zeros(&t, &s, 1e-12, &b)?;
                boundary = grid.boundary_fraction(&z, &cfg, 2);
                overlay_zeros(&mut image, &z, &cfg)?;
            }
            image.write_ppm(path)?;
            let count = |c: PixelClass| grid.classes.iter().filter(|&&x| x == c).count();
            let value = json!({
                "out": path,
                "width": w,
                "height": h,
                "to_one": count(PixelClass::ToOne),
                "to_infinity": count(PixelClass::ToInfinity),
                "bounded": count(PixelClass::Bounded),
                "degenerate": count(PixelClass::Degenerate),
                "zeros_near_boundary": boundary,
            });
            let mut text = format!(
                "wrote {}x{} image to {}: {} to one, {} to infinity, {} bounded, {} degenerate\n",
                w,
                h,
                path.display(),
                count(PixelClass::ToOne),
                count(PixelClass::ToInfinity),
                count(PixelClass::Bounded),
                count(PixelClass::Degenerate),
            );
            if let Some(f) = boundary {
                text.push_str(&format!("zeros within 2 px of a boundary: {:.1}%\n", 100.0 * f));
            }
            emit(out, cli.json, &value, &text)?;
            Ok(true)
        }
        Command::Verify { level_max } => {
            let report = run_verify(&g, *level_max, &b)?;
            let value = serde_json::to_value(&report).expect("serializable");
            let mut text = String::new();
            for c in &report.checks {
                text.push_str(&format!(
                    "{} {}: {}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.check_name,
                    c.details
                ));
            }
            text.push_str(&format!(
                "in scope: {}; exceptional: {}; overall: {}\n",
                report.in_scope,
                report.exceptional,
                if report.all_pass { "PASS" } else { "FAIL" }
            ));
            emit(out, cli.json, &value, &text)?;
            Ok(report.all_pass)
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Io(_) => 3,
        e if e.is_budget() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
