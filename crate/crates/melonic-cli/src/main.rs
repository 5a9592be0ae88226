//! `melonic`: compute Grothendieck classes of melonic graph hypersurface
//! complements, enumerate them, tabulate the closed-form families, verify
//! their structural properties, and cross-check everything against a
//! brute-force finite-field oracle.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use melonic::construction::{enumerate_reduced, MelonicConstruction};
use melonic::families;
use melonic::motive::{distinct_classes, ClassEngine, GrothendieckClass};
use melonic::oracle;
use melonic::polyring::{Basis, IntPoly};

#[derive(Parser)]
#[command(name = "melonic", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    L,
    T,
    S,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Basis {
        match b {
            BasisArg::L => Basis::L,
            BasisArg::T => Basis::T,
            BasisArg::S => Basis::S,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
    Csv,
}

/// How a construction is supplied on the command line.
#[derive(Args)]
struct InputArgs {
    /// Inline DSL, e.g. "(4)@0.1; (1,3,1)@1.1"
    #[arg(long)]
    dsl: Option<String>,
    /// Valence-4 shorthand, e.g. "0,1+,2+,3-"
    #[arg(long)]
    shorthand: Option<String>,
    /// Path to a JSON file {"stages":[{"banana":[...],"parent":p,"slot":k},...]}
    #[arg(long)]
    file: Option<String>,
}

impl InputArgs {
    fn construction(&self) -> Result<MelonicConstruction> {
        let sources = [
            self.dsl.is_some(),
            self.shorthand.is_some(),
            self.file.is_some(),
        ];
        if sources.iter().filter(|&&b| b).count() != 1 {
            bail!("provide exactly one of --dsl, --shorthand, --file");
        }
        if let Some(dsl) = &self.dsl {
            return Ok(MelonicConstruction::parse_dsl(dsl)?);
        }
        if let Some(sh) = &self.shorthand {
            return Ok(MelonicConstruction::parse_valence4_shorthand(sh)?);
        }
        let path = self.file.as_ref().unwrap();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {path} as a construction"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Grothendieck class of a construction
    Class {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "t")]
        basis: BasisArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Distinct classes per edge count, up to an edge budget
    Enumerate {
        #[arg(long)]
        edges: usize,
        /// Print only the per-edge-count class counts
        #[arg(long)]
        count_only: bool,
        #[arg(long, value_enum, default_value = "t")]
        basis: BasisArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Closed-form family classes
    Family {
        #[command(subcommand)]
        family: FamilyCmd,
    },
    /// Property sweeps over all enumerated classes
    Verify {
        #[arg(long)]
        edges: usize,
        /// Nonnegativity of the S-basis coefficients
        #[arg(long)]
        positivity: bool,
        /// Log-concavity of the S-basis coefficient sequence
        #[arg(long)]
        log_concavity: bool,
        /// Degree/monicity and invariance under reduction and sibling order
        #[arg(long)]
        structural: bool,
        /// Compare class evaluations with brute-force point counts
        #[arg(long)]
        oracle: bool,
        /// Fields for --oracle, comma separated
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        q: Vec<u64>,
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Motivic measures of a construction's class
    Measure {
        #[command(flatten)]
        input: InputArgs,
        /// Topological Euler characteristic (L -> 1)
        #[arg(long)]
        euler: bool,
        /// Predicted point count over F_q (L -> q)
        #[arg(long)]
        point: Option<u64>,
        /// Hodge-Deligne polynomial (L -> uv)
        #[arg(long)]
        hodge_deligne: bool,
    },
    /// Brute-force point counts of the Kirchhoff hypersurface complement
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        /// Raw graph JSON {"vertices":N,"edges":[[0,1],...]} (file path)
        #[arg(long)]
        graph_file: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        q: Vec<u64>,
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Open chains of n circles
    Gamma {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opts: FamilyOpts,
    },
    /// Closed chains of n circles (n >= 2)
    Gammaprime {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opts: FamilyOpts,
    },
    /// Valence-3 chains
    Gamma3 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opts: FamilyOpts,
    },
    /// Valence-v chains (v >= 4)
    Gammav {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opts: FamilyOpts,
    },
    /// Vacuum stars with s rays of n circles
    Sigma {
        #[arg(long)]
        rays: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        opts: FamilyOpts,
    },
    /// Bananification-tower series over a base class
    Tower {
        /// Coefficients of rho^0..rho^n are printed
        #[arg(long)]
        n: usize,
        /// Base class U(G) as JSON {"basis":...,"coeffs":[...],"edges":...}
        #[arg(long)]
        class_json: Option<String>,
        /// Base construction (its class is computed by the recursion)
        #[arg(long)]
        base_dsl: Option<String>,
        /// The chained edge is a bridge of the base graph
        #[arg(long)]
        bridge: bool,
        /// Deletion class U(G \ e) as JSON, required when not a bridge
        #[arg(long)]
        deleted_json: Option<String>,
        #[arg(long, value_enum, default_value = "t")]
        basis: BasisArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct FamilyOpts {
    /// Cross-validate the closed form against the generic recursion
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value = "t")]
    basis: BasisArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn render_poly(p: &IntPoly, basis: Basis, format: Format) -> String {
    let p = p.change_basis(basis);
    match format {
        Format::Text => format!("{} = {}", p.render_factored(), p.render_expanded()),
        Format::Json => serde_json::to_string(&p).unwrap(),
        Format::Latex => p.render_latex(),
        Format::Csv => p.render_expanded(),
    }
}

fn print_class(u: &GrothendieckClass, basis: Basis, format: Format) {
    match format {
        Format::Json => {
            let converted = GrothendieckClass {
                poly: u.poly.change_basis(basis),
                edges: u.edges,
            };
            println!("{}", serde_json::to_string(&converted).unwrap());
        }
        _ => {
            println!("{}", render_poly(&u.poly, basis, format));
        }
    }
}

fn family_row(
    name: &str,
    params: &[(&str, String)],
    u: &GrothendieckClass,
    opts: &FamilyOpts,
    check: Option<bool>,
) {
    let basis: Basis = opts.basis.into();
    let poly = u.poly.change_basis(basis);
    match opts.format {
        Format::Csv => {
            let params_str = params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            println!("{name},{params_str},{},{}", u.edges, poly.render_expanded());
        }
        Format::Json => {
            let mut obj = serde_json::json!({
                "family": name,
                "edges": u.edges,
                "class": serde_json::to_value(&poly).unwrap(),
            });
            for (k, v) in params {
                obj[k] = serde_json::Value::String(v.clone());
            }
            if let Some(ok) = check {
                obj["check"] = serde_json::Value::String(if ok { "PASS" } else { "FAIL" }.into());
            }
            println!("{obj}");
        }
        Format::Latex => {
            let params_str = params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(", ");
            println!("{name} ({params_str}) & {} \\\\", poly.render_latex());
        }
        Format::Text => {
            let params_str = params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            let mut line = format!(
                "{name} {params_str}: edges={} class={}",
                u.edges,
                poly.render_factored()
            );
            if let Some(ok) = check {
                let _ = write!(line, " check={}", if ok { "PASS" } else { "FAIL" });
            }
            println!("{line}");
        }
    }
}

fn parse_class_json(text: &str) -> Result<GrothendieckClass> {
    serde_json::from_str(text).map_err(|e| anyhow!("bad class JSON: {e}"))
}

/// Returns false if any check failed (exit code 1).
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Class {
            input,
            basis,
            format,
        } => {
            let c = input.construction()?;
            let u = melonic::motive::class_of(&c)?;
            print_class(&u, basis.into(), format);
            Ok(true)
        }
        Command::Enumerate {
            edges,
            count_only,
            basis,
            format,
        } => {
            require(edges >= 1, "enumerate needs --edges >= 1")?;
            let classes = distinct_classes(edges);
            let counts: Vec<usize> = {
                let mut v = vec![0usize; edges];
                for (e, set) in &classes {
                    if *e >= 1 && *e <= edges {
                        v[e - 1] = set.len();
                    }
                }
                v
            };
            match format {
                Format::Json => {
                    let mut obj = serde_json::json!({ "counts": counts });
                    if !count_only {
                        let mut map = serde_json::Map::new();
                        for (e, set) in &classes {
                            let polys: Vec<serde_json::Value> = set
                                .iter()
                                .map(|p| {
                                    serde_json::to_value(p.change_basis(basis.into())).unwrap()
                                })
                                .collect();
                            map.insert(e.to_string(), serde_json::Value::Array(polys));
                        }
                        obj["classes"] = serde_json::Value::Object(map);
                    }
                    println!("{obj}");
                }
                _ => {
                    println!(
                        "{}",
                        counts
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    );
                    if !count_only {
                        for (e, set) in &classes {
                            for p in set {
                                println!("{e}: {}", p.change_basis(basis.into()).render_expanded());
                            }
                        }
                    }
                }
            }
            Ok(true)
        }
        Command::Family { family } => run_family(family),
        Command::Verify {
            edges,
            positivity,
            log_concavity,
            structural,
            oracle: run_oracle,
            q,
            budget,
        } => run_verify(
            edges,
            positivity,
            log_concavity,
            structural,
            run_oracle,
            &q,
            budget,
        ),
        Command::Measure {
            input,
            euler,
            point,
            hodge_deligne,
        } => {
            let c = input.construction()?;
            let u = melonic::motive::class_of(&c)?;
            let mut printed = false;
            if euler {
                println!("euler: {}", u.poly.euler_characteristic());
                printed = true;
            }
            if let Some(q) = point {
                println!("points(q={q}): {}", u.poly.eval_at_l(&BigInt::from(q)));
                printed = true;
            }
            if hodge_deligne {
                println!("hodge-deligne: {}", u.poly.specialize_hodge_deligne());
                printed = true;
            }
            if !printed {
                bail!("choose at least one of --euler, --point, --hodge-deligne");
            }
            Ok(true)
        }
        Command::Oracle {
            input,
            graph_file,
            q,
            budget,
        } => {
            let from_construction =
                input.dsl.is_some() || input.shorthand.is_some() || input.file.is_some();
            if from_construction == graph_file.is_some() {
                bail!("provide either a construction input or --graph-file");
            }
            if let Some(path) = graph_file {
                let text =
                    std::fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
                let g: melonic::Graph = serde_json::from_str(&text)?;
                let psi = oracle::kirchhoff(&g)?;
                println!(
                    "edges={} loops={} spanning_trees={}",
                    g.edges.len(),
                    g.loop_number(),
                    psi.monomials.len()
                );
                for &qi in &q {
                    println!("q={qi}: {}", oracle::point_count_psi(&psi, qi, budget)?);
                }
                Ok(true)
            } else {
                let c = input.construction()?;
                let u = melonic::motive::class_of(&c)?;
                let report = oracle::verify_class(&c, &u, &q, budget)?;
                println!("{report}");
                if !report.is_ok() {
                    println!(
                        "{}",
                        serde_json::json!({
                            "verify": "oracle",
                            "construction": c.to_dsl(),
                            "ok": false,
                        })
                    );
                }
                Ok(report.is_ok())
            }
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        bail!("{msg}");
    }
}

fn run_family(cmd: FamilyCmd) -> Result<bool> {
    let engine = ClassEngine::new();
    match cmd {
        FamilyCmd::Gamma { n, opts } => {
            require(n >= 1, "gamma needs --n >= 1")?;
            let u = families::gamma_class(n);
            let check = opts.check.then(|| {
                engine
                    .class_of(&families::gamma_construction(n))
                    .map(|r| r == u)
                    .unwrap_or(false)
            });
            family_row("gamma", &[("n", n.to_string())], &u, &opts, check);
            Ok(check != Some(false))
        }
        FamilyCmd::Gammaprime { n, opts } => {
            require(n >= 2, "gammaprime needs --n >= 2")?;
            let u = families::gammaprime_class(n);
            let check = opts.check.then(|| {
                engine
                    .class_of(&families::gammaprime_construction(n))
                    .map(|r| r == u)
                    .unwrap_or(false)
            });
            family_row("gammaprime", &[("n", n.to_string())], &u, &opts, check);
            Ok(check != Some(false))
        }
        FamilyCmd::Gamma3 { n, opts } => {
            require(n >= 1, "gamma3 needs --n >= 1")?;
            let u = families::gamma3_class(n);
            let check = opts.check.then(|| {
                engine
                    .class_of(&families::gammav_construction(3, n))
                    .map(|r| r == u)
                    .unwrap_or(false)
            });
            family_row("gamma3", &[("n", n.to_string())], &u, &opts, check);
            Ok(check != Some(false))
        }
        FamilyCmd::Gammav { v, n, opts } => {
            require(v >= 4, "gammav needs --v >= 4 (use gamma3 for valence 3)")?;
            require(n >= 1, "gammav needs --n >= 1")?;
            let u = families::gammav_class(v, n);
            let check = opts.check.then(|| {
                engine
                    .class_of(&families::gammav_construction(v, n))
                    .map(|r| r == u)
                    .unwrap_or(false)
            });
            family_row(
                "gammav",
                &[("v", v.to_string()), ("n", n.to_string())],
                &u,
                &opts,
                check,
            );
            Ok(check != Some(false))
        }
        FamilyCmd::Sigma { rays, n, opts } => {
            require(rays >= 1 && n >= 1, "sigma needs --rays >= 1 and --n >= 1")?;
            let u = families::sigma_class(rays, n);
            let sigma = families::sigma_poly(rays, n);
            let check = opts.check.then(|| {
                let (c, corr) = families::sigma_construction(rays, n);
                match engine.class_of(&c) {
                    Ok(covering) => {
                        let divisor = IntPoly::linear(Basis::T, 1).pow(corr as u32);
                        covering
                            .poly
                            .exact_div(&divisor)
                            .map(|p| p == u.poly)
                            .unwrap_or(false)
                    }
                    Err(_) => false,
                }
            });
            let basis: Basis = opts.basis.into();
            if opts.format == Format::Text {
                println!(
                    "sigma polynomial: {}",
                    sigma.change_basis(basis).render_expanded()
                );
            }
            family_row(
                "sigma",
                &[("rays", rays.to_string()), ("n", n.to_string())],
                &u,
                &opts,
                check,
            );
            Ok(check != Some(false))
        }
        FamilyCmd::Tower {
            n,
            class_json,
            base_dsl,
            bridge,
            deleted_json,
            basis,
            format,
        } => {
            let base = match (&class_json, &base_dsl) {
                (Some(json), None) => parse_class_json(json)?,
                (None, Some(dsl)) => {
                    melonic::motive::class_of(&MelonicConstruction::parse_dsl(dsl)?)?
                }
                _ => bail!("provide exactly one of --class-json, --base-dsl"),
            };
            let deleted = deleted_json.as_deref().map(parse_class_json).transpose()?;
            let series = families::tower_series(&base, bridge, deleted.as_ref(), n)?;
            for (k, coeff) in series.coeffs().iter().enumerate() {
                match format {
                    Format::Json => println!(
                        "{}",
                        serde_json::json!({
                            "rho_power": k,
                            "class": serde_json::to_value(coeff.change_basis(basis.into())).unwrap(),
                        })
                    ),
                    _ => println!("rho^{k}: {}", render_poly(coeff, basis.into(), format)),
                }
            }
            Ok(true)
        }
    }
}

fn run_verify(
    edges: usize,
    positivity: bool,
    log_concavity: bool,
    structural: bool,
    run_oracle: bool,
    qs: &[u64],
    budget: u64,
) -> Result<bool> {
    if !(positivity || log_concavity || structural || run_oracle) {
        bail!("choose at least one of --positivity, --log-concavity, --structural, --oracle");
    }
    require(edges >= 1, "verify needs --edges >= 1")?;
    let engine = ClassEngine::new();
    let trees = enumerate_reduced(edges);
    let mut all_ok = true;
    let fail = |record: serde_json::Value| {
        println!("{record}");
    };
    if structural {
        let mut ok = true;
        for tree in &trees {
            let u = engine.class_of_tree(tree);
            if !u.invariants_hold() {
                ok = false;
                fail(serde_json::json!({
                    "verify": "structural", "construction": tree.to_construction().to_dsl(),
                    "reason": "degree or leading coefficient mismatch",
                }));
            }
            let c = tree.to_construction();
            let reduced = c.reduce()?;
            if engine.class_of(&reduced)? != u {
                ok = false;
                fail(serde_json::json!({
                    "verify": "structural", "construction": c.to_dsl(),
                    "reason": "class not invariant under reduce",
                }));
            }
        }
        println!(
            "structural: {} constructions <= {edges} edges: {}",
            trees.len(),
            if ok { "PASS" } else { "FAIL" }
        );
        all_ok &= ok;
    }
    if positivity || log_concavity {
        let mut pos_ok = true;
        let mut lc_ok = true;
        for tree in &trees {
            let u = engine.class_of_tree(tree);
            let s = u.poly.change_basis(Basis::S);
            if positivity && !s.is_nonneg_coeffs() {
                pos_ok = false;
                fail(serde_json::json!({
                    "verify": "positivity", "construction": tree.to_construction().to_dsl(),
                    "class_s": s.render_expanded(),
                }));
            }
            if log_concavity && !s.is_log_concave() {
                lc_ok = false;
                fail(serde_json::json!({
                    "verify": "log-concavity", "construction": tree.to_construction().to_dsl(),
                    "class_s": s.render_expanded(),
                }));
            }
        }
        if positivity {
            println!(
                "positivity: {} constructions <= {edges} edges: {}",
                trees.len(),
                if pos_ok { "PASS" } else { "FAIL" }
            );
            all_ok &= pos_ok;
        }
        if log_concavity {
            println!(
                "log-concavity: {} constructions <= {edges} edges: {}",
                trees.len(),
                if lc_ok { "PASS" } else { "FAIL" }
            );
            all_ok &= lc_ok;
        }
    }
    if run_oracle {
        let mut ok = true;
        for tree in &trees {
            let c = tree.to_construction();
            let u = engine.class_of_tree(tree);
            let report = oracle::verify_class(&c, &u, qs, budget)?;
            if !report.is_ok() {
                ok = false;
                fail(serde_json::json!({
                    "verify": "oracle", "construction": c.to_dsl(),
                    "report": report.to_string(),
                }));
            }
        }
        println!(
            "oracle (q={qs:?}): {} constructions <= {edges} edges: {}",
            trees.len(),
            if ok { "PASS" } else { "FAIL" }
        );
        all_ok &= ok;
    }
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            // distinguish verification failures (exit 1) from usage and
            // parse errors (exit 2)
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
