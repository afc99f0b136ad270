use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use podlab::congr::{
    corollary2_family, corollary3_example_candidates, corollary3_family, gireesh_families, theorem2_deltas,
    theorem2_family, veena_family, verify_batch, verify_pod5, verify_pod7, verify_podp, CongruenceFamily,
    FamilyReport, IdentityReport,
};
use podlab::density::density_curve;
use podlab::etaquot::{build_b, holomorphy_report, CertificationReport};
use podlab::hecke::{eigen_ratio, eigenform_eta, hecke_apply, MIN_OVERLAP};
use podlab::partitions::pod_series;
use podlab::{EtaQuotient, Modulus};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "podlab", version, about = "Partitions with distinct odd parts: series, certificates, congruence scans")]
struct Cli {
    #[command(flatten)]
    out: OutputOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct OutputOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Omit the version/timestamp block from JSON output.
    #[arg(long, global = true)]
    no_meta: bool,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand pod_ℓ(0..terms), optionally modulo m.
    Series {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        ell: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        terms: u64,
        #[arg(long = "mod", value_parser = clap::value_parser!(u64).range(2..))]
        modulus: Option<u64>,
    },
    /// Certify an eta-quotient: conditions, character, cusp orders.
    EtaCheck(EtaCheckArgs),
    /// Scan congruence families or identities.
    Verify(VerifyArgs),
    /// Density of n < X with pod_ℓ(n) ≡ r (mod M).
    Density {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        ell: u64,
        #[arg(long = "mod", value_parser = clap::value_parser!(u64).range(1..))]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        residue: u64,
        /// Comma-separated ascending cutoffs.
        #[arg(long, value_delimiter = ',', required = true)]
        cutoffs: Vec<u64>,
    },
    /// Apply T_m to η(4z)²η(16z)²/η(8z)² and look for an eigenvalue.
    Hecke {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, default_value_t = 2000)]
        terms: usize,
    },
}

#[derive(Args)]
struct EtaCheckArgs {
    /// Quotient as `delta:exp,...@level`, e.g. `4:2,16:2,8:-2@64`.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    spec: Option<String>,
    /// Named family; only `B` is known.
    #[arg(long, requires_all = ["ell", "p", "k"])]
    family: Option<String>,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    /// Attach the quotient to this level instead.
    #[arg(long)]
    level: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builtin {
    Gireesh,
    Veena,
    Thm2,
    Cor2,
    Cor3,
    /// Both readings of the 343n+B instance.
    Cor3Example,
    Pod5,
    Pod7,
    Podp,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<Builtin>,
    /// JSON file holding one family or an array of families.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Largest n scanned.
    #[arg(long = "n", default_value_t = 200)]
    n_test: u64,
    /// Prime for `podp` (default: 3, 5, 7 and 11).
    #[arg(long)]
    p: Option<u64>,
}

struct Rendered {
    kind: &'static str,
    json: Value,
    text: String,
    ok: bool,
}

fn builtin_families(b: Builtin) -> Result<Vec<CongruenceFamily>> {
    let mut out = Vec::new();
    match b {
        Builtin::Gireesh => out = gireesh_families(),
        Builtin::Veena => {
            for k in 1..=3 {
                out.push(veena_family(k)?);
            }
        }
        Builtin::Thm2 => {
            for p in [3, 7, 11, 19] {
                for k in 1..=2 {
                    for d in theorem2_deltas(p, 2) {
                        out.push(theorem2_family(p, k, d)?);
                    }
                }
            }
        }
        Builtin::Cor2 | Builtin::Cor3 => {
            for p in [3, 7, 11] {
                for k in 1..=2 {
                    out.push(if b == Builtin::Cor2 { corollary2_family(p, k)? } else { corollary3_family(p, k)? });
                }
            }
        }
        Builtin::Cor3Example => out = corollary3_example_candidates().to_vec(),
        Builtin::Pod5 | Builtin::Pod7 | Builtin::Podp => unreachable!("identities are not families"),
    }
    Ok(out)
}

fn read_families(path: &PathBuf) -> Result<Vec<CongruenceFamily>> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
    let fams: Vec<CongruenceFamily> = match value {
        Value::Array(_) => serde_json::from_value(value)?,
        other => vec![serde_json::from_value(other)?],
    };
    for f in &fams {
        f.validate()?;
    }
    Ok(fams)
}

fn family_line(r: &FamilyReport) -> String {
    let head = format!("{} {}  [{}] {}", if r.passed { "PASS" } else { "FAIL" }, r.family, r.family.tag, scan_note(r));
    match &r.counterexample {
        None => head,
        Some(c) => format!(
            "{head}\n     counterexample n={}: pod_{}({}) ≡ {}, pod_{}({}) ≡ {} (mod {})",
            c.n, r.family.ell, c.lhs_index, c.lhs_residue, r.family.ell, c.rhs_index, c.rhs_residue, r.family.modulus
        ),
    }
}

fn scan_note(r: &FamilyReport) -> String {
    format!("n ≤ {}, {}", r.n_test, serde_json::to_value(r.method).unwrap().as_str().unwrap_or(""))
}

fn identity_line(r: &IdentityReport) -> String {
    match r.counterexample {
        None => format!("PASS {}  n ≤ {}", r.name, r.n_test),
        Some(n) => format!("FAIL {}  counterexample n={n}", r.name),
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<Rendered> {
    let identity = |reports: Vec<IdentityReport>| Rendered {
        kind: "verify",
        ok: reports.iter().all(|r| r.passed),
        text: reports.iter().map(identity_line).collect::<Vec<_>>().join("\n"),
        json: json!({ "identities": reports }),
    };
    match a.builtin {
        Some(Builtin::Pod5) => return Ok(identity(vec![verify_pod5(a.n_test)?])),
        Some(Builtin::Pod7) => return Ok(identity(vec![verify_pod7(a.n_test)?])),
        Some(Builtin::Podp) => {
            let primes = a.p.map_or(vec![3, 5, 7, 11], |p| vec![p]);
            let reports = primes.into_iter().map(|p| verify_podp(p, a.n_test)).collect::<podlab::Result<Vec<_>>>()?;
            return Ok(identity(reports));
        }
        _ => {}
    }
    let fams = match (&a.builtin, &a.file) {
        (Some(b), _) => builtin_families(*b)?,
        (None, Some(path)) => read_families(path)?,
        (None, None) => bail!("either --builtin or --file is required"),
    };
    let reports = verify_batch(&fams, a.n_test)?;
    let passed = reports.iter().filter(|r| r.passed).count();
    let mut text: Vec<String> = reports.iter().map(family_line).collect();
    text.push(format!("{passed}/{} families pass", reports.len()));
    Ok(Rendered { kind: "verify", ok: passed == reports.len(), text: text.join("\n"), json: json!({ "families": reports }) })
}

fn cmd_series(ell: u64, terms: u64, modulus: Option<u64>) -> Result<Rendered> {
    let m = modulus.map_or(Modulus::Integers, Modulus::Residues);
    let table = pod_series(ell, terms as usize, m)?;
    let coeffs: Vec<String> = (0..table.order()).map(|n| table.value(n).to_string()).collect();
    Ok(Rendered {
        kind: "series",
        ok: true,
        text: table.series().to_text().trim_end().to_string(),
        json: json!({ "ell": ell, "modulus": m.to_string(), "order": table.order(), "coeffs": coeffs }),
    })
}

fn plain(q: podlab::Rational) -> String {
    if q.is_integer() { q.numer().to_string() } else { q.to_string() }
}

fn report_text(r: &CertificationReport) -> String {
    let c = &r.conditions;
    let mut lines = vec![
        format!("quotient          {}", c.quotient),
        format!("level             {}", c.level),
        format!("weight            {}", plain(c.weight)),
        format!("Σ δr ≡ 0 (24)     {}", c.condition24_up),
        format!("Σ (N/δ)r ≡ 0 (24) {}", c.condition24_down),
    ];
    if let Some(d) = c.character_discriminant {
        lines.push(format!("character         ({d}/·)"));
    }
    let negative: Vec<String> =
        r.cusp_orders.iter().filter(|x| x.order.is_negative()).map(|x| format!("d={} ({})", x.d, plain(x.order))).collect();
    let min = r.cusp_orders.iter().map(|x| x.order).min();
    lines.push(format!("cusps             {} divisors, min order {}", r.cusp_orders.len(), min.map_or("-".into(), plain)));
    if !negative.is_empty() {
        lines.push(format!("negative at       {}", negative.join(", ")));
    }
    lines.push(format!("holomorphic       {}", r.holomorphic));
    lines.push(format!("modular form      {}", r.modular_form));
    lines.join("\n")
}

fn cmd_eta_check(a: &EtaCheckArgs) -> Result<Rendered> {
    let mut extra = json!({});
    let quotient = match (&a.spec, &a.family) {
        (Some(spec), _) => spec.parse::<EtaQuotient>()?,
        (None, Some(name)) if name == "B" => {
            let b = build_b(a.ell.unwrap(), a.p.unwrap(), a.k.unwrap())?;
            extra = json!({ "family": { "ell": b.ell, "p": b.p, "a": b.a, "k": b.k, "expectedWeight": b.expected_weight() } });
            b.quotient
        }
        (None, Some(name)) => bail!("unknown family `{name}` (known: B)"),
        (None, None) => bail!("either --spec or --family is required"),
    };
    let quotient = match a.level {
        Some(l) => quotient.with_level(l)?,
        None => quotient,
    };
    let rep = holomorphy_report(&quotient);
    let mut body = serde_json::to_value(&rep)?;
    if let (Value::Object(map), Value::Object(more)) = (&mut body, extra) {
        map.extend(more);
    }
    Ok(Rendered { kind: "eta-check", ok: rep.modular_form, text: report_text(&rep), json: body })
}

#[derive(Serialize)]
struct HeckeReport {
    m: u64,
    terms: usize,
    image_order: usize,
    min_overlap: usize,
    eigenvalue: Option<i64>,
}

fn cmd_hecke(m: u64, terms: usize) -> Result<Rendered> {
    let f = eigenform_eta(terms);
    let image = hecke_apply(&f, m)?;
    let eigenvalue = eigen_ratio(&f, m, terms)?;
    let rep = HeckeReport { m, terms, image_order: image.order(), min_overlap: MIN_OVERLAP, eigenvalue };
    let text = match eigenvalue {
        Some(l) => format!("T_{m} f = {l}·f (eigenvalue {l}) on {} coefficients", image.order()),
        None if image.order() < MIN_OVERLAP => {
            format!("T_{m} f: only {} coefficients available, {MIN_OVERLAP} needed; no eigenvalue reported", image.order())
        }
        None => format!("T_{m} f is not a multiple of f on {} coefficients", image.order()),
    };
    Ok(Rendered { kind: "hecke", ok: eigenvalue.is_some(), text, json: serde_json::to_value(&rep)? })
}

fn cmd_density(ell: u64, m: u64, r: u64, cutoffs: &[u64]) -> Result<Rendered> {
    let rep = density_curve(ell, m, r, cutoffs)?;
    Ok(Rendered { kind: "density", ok: true, text: rep.render_table().trim_end().to_string(), json: serde_json::to_value(&rep)? })
}

fn envelope(r: &Rendered, meta: bool) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": r.kind, "ok": r.ok, "result": r.json });
    if meta {
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        v["meta"] = json!({ "version": env!("CARGO_PKG_VERSION"), "timestamp": ts });
    }
    v
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("PODLAB_THREADS") {
        let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).with_context(|| format!("PODLAB_THREADS must be a positive integer, got `{raw}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let rendered = match &cli.cmd {
        Cmd::Series { ell, terms, modulus } => cmd_series(*ell, *terms, *modulus)?,
        Cmd::EtaCheck(a) => cmd_eta_check(a)?,
        Cmd::Verify(a) => cmd_verify(a)?,
        Cmd::Density { ell, modulus, residue, cutoffs } => cmd_density(*ell, *modulus, *residue, cutoffs)?,
        Cmd::Hecke { m, terms } => cmd_hecke(*m, *terms)?,
    };
    let mut body = match cli.out.format {
        Format::Json => serde_json::to_string_pretty(&envelope(&rendered, !cli.out.no_meta))?,
        Format::Text => rendered.text.clone(),
    };
    body.push('\n');
    match &cli.out.output {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(rendered.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
