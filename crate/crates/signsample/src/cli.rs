//! Command-line front end and the certificate document format.
//!
//! The output document is plain structured text with exact rational
//! coefficients (decimal integer strings, `p/q` for fractions): the change
//! of variables, the base point, every geometric resolution with its
//! provenance, and the sign-condition list with witness references. Field
//! order is fixed, so identical seeds and inputs produce byte-identical
//! documents.

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::Rat;
use crate::resolution::GeometricResolution;
use crate::sampler::{self, Mode, ProvKind, Provenance, SamplePointSet, SamplerConfig, SigmaEntry};
use crate::signs::{expand_equalities, list_conditions, render_signs, SignCondition, SignKind};
use crate::slp::{parse, Slp};
use clap::{Parser, ValueEnum};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Regular,
    Closed,
    Bivariate,
    Single,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Regular => Mode::Regular,
            ModeArg::Closed => Mode::Closed,
            ModeArg::Bivariate => Mode::Bivariate,
            ModeArg::Single => Mode::Single,
        }
    }
}

/// Sample points meeting every feasible sign condition of a family of
/// rational polynomials, with exact certificates.
#[derive(Parser, Debug)]
#[command(name = "signsample", version, about)]
struct Args {
    /// Polynomial expressions over +, -, *, ^ and rational literals
    #[arg(required = true)]
    polynomials: Vec<String>,

    /// Sampling mode
    #[arg(long, value_enum, default_value = "regular")]
    mode: ModeArg,

    /// Seed for all random choices; identical seeds reproduce the output
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Comma-separated variable names (default: order of first appearance)
    #[arg(long)]
    vars: Option<String>,

    /// Comma-separated degree bounds (default: exact degrees)
    #[arg(long)]
    degrees: Option<String>,

    /// Print the realized sign conditions to stdout
    #[arg(long)]
    list_conditions: bool,

    /// Restrict to one target condition: a pattern over <, =, >, * with one
    /// entry per polynomial (closed mode reads < as <= and > as >=)
    #[arg(long)]
    sigma: Option<String>,

    /// Re-verify every sign along the independent interval-refinement path
    #[arg(long)]
    verify: bool,

    /// Write the certificate document here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// The sampler output together with the condition list it induces.
pub struct PipelineResult {
    pub set: SamplePointSet,
    pub conditions: Vec<SignCondition>,
    pub kind: SignKind,
}

/// Runs the sampler for a mode and lists the realized conditions: strict
/// with equality expansion in the regular and bivariate modes, closed
/// otherwise.
pub fn sample_and_list(
    fs: &[Slp],
    degree_bounds: &[usize],
    cfg: &SamplerConfig,
) -> Result<PipelineResult> {
    let set = sampler::run(fs, degree_bounds, cfg)?;
    let resolutions: Vec<GeometricResolution> =
        set.resolutions.iter().map(|(r, _)| r.clone()).collect();
    let kind = match cfg.mode {
        Mode::Regular | Mode::Bivariate => SignKind::Strict,
        Mode::Closed | Mode::Single => SignKind::Closed,
    };
    let (conds, _) = list_conditions(&resolutions, fs, kind)?;
    let conditions = match kind {
        SignKind::Strict => expand_equalities(&conds),
        SignKind::Closed => conds,
    };
    Ok(PipelineResult {
        set,
        conditions,
        kind,
    })
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Regular => "regular",
        Mode::Closed => "closed",
        Mode::Bivariate => "bivariate",
        Mode::Single => "single",
    }
}

fn write_poly(out: &mut String, label: &str, p: &Poly<Rat>) {
    write!(out, "{label}").unwrap();
    for c in p.coeffs() {
        write!(out, " {c}").unwrap();
    }
    if p.is_zero_poly() {
        write!(out, " 0").unwrap();
    }
    out.push('\n');
}

/// Serializes the full certificate.
pub fn write_document(
    result: &PipelineResult,
    mode: Mode,
    seed: u64,
    vars: &[String],
    poly_texts: &[String],
    degrees: &[usize],
) -> String {
    let mut out = String::new();
    let set = &result.set;
    writeln!(out, "signsample-certificate v1").unwrap();
    writeln!(out, "mode {}", mode_name(mode)).unwrap();
    writeln!(out, "seed {seed}").unwrap();
    writeln!(out, "nvars {}", set.nvars).unwrap();
    writeln!(out, "vars {}", vars.join(" ")).unwrap();
    writeln!(out, "npolys {}", poly_texts.len()).unwrap();
    for (i, t) in poly_texts.iter().enumerate() {
        writeln!(out, "poly {} {}", i + 1, t).unwrap();
    }
    writeln!(
        out,
        "degrees {}",
        degrees
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    )
    .unwrap();
    writeln!(out, "matrix {}", set.nvars).unwrap();
    for row in &set.matrix.matrix {
        let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        writeln!(out, "row {}", cells.join(" ")).unwrap();
    }
    let pt: Vec<String> = set.point.iter().map(|c| c.to_string()).collect();
    writeln!(out, "point {}", pt.join(" ")).unwrap();
    writeln!(out, "resolutions {}", set.resolutions.len()).unwrap();
    for (i, (res, prov)) in set.resolutions.iter().enumerate() {
        writeln!(out, "resolution {}", i + 1).unwrap();
        match &prov.kind {
            ProvKind::Deformation { subset, tau } => {
                let s: Vec<String> = subset.iter().map(|x| x.to_string()).collect();
                write!(out, "level {} deformation subset {}", prov.level, s.join(",")).unwrap();
                if let Some(t) = tau {
                    let tt: String = t.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect();
                    write!(out, " tau {tt}").unwrap();
                }
                out.push('\n');
            }
            ProvKind::Univariate { poly } => {
                writeln!(out, "level {} univariate poly {}", prov.level, poly).unwrap();
            }
            ProvKind::BasePoint => {
                writeln!(out, "level {} basepoint", prov.level).unwrap();
            }
        }
        write_poly(&mut out, "q", &res.q);
        write_poly(&mut out, "qtilde", &res.qtilde);
        for (k, w) in res.w.iter().enumerate() {
            write_poly(&mut out, &format!("w{}", k + 1), w);
        }
        writeln!(out, "end").unwrap();
    }
    writeln!(
        out,
        "conditions {} {}",
        match result.kind {
            SignKind::Strict => "strict",
            SignKind::Closed => "closed",
        },
        result.conditions.len()
    )
    .unwrap();
    for c in &result.conditions {
        write!(
            out,
            "condition {} {}",
            render_signs(&c.signs, c.kind),
            if c.derived { "derived" } else { "witnessed" }
        )
        .unwrap();
        if !c.witnesses.is_empty() {
            write!(out, " witnesses").unwrap();
            for (ri, root) in &c.witnesses {
                write!(out, " {}:{}", ri + 1, root).unwrap();
            }
        }
        out.push('\n');
    }
    writeln!(out, "warnings {}", set.warnings.len()).unwrap();
    for w in &set.warnings {
        writeln!(out, "warning {w}").unwrap();
    }
    out
}

/// A parsed certificate, for round-trips and tooling.
#[derive(Debug)]
pub struct ParsedDocument {
    pub mode: String,
    pub seed: u64,
    pub nvars: usize,
    pub matrix: Vec<Vec<Rat>>,
    pub point: Vec<Rat>,
    pub resolutions: Vec<(GeometricResolution, Provenance)>,
    pub conditions: Vec<SignCondition>,
    pub kind: SignKind,
}

fn parse_rats(parts: &[&str]) -> Result<Vec<Rat>> {
    parts
        .iter()
        .map(|s| {
            Rat::from_str(s).map_err(|e| Error::Invalid(format!("bad rational `{s}`: {e}")))
        })
        .collect()
}

fn parse_poly_line(line: &str, label: &str) -> Result<Poly<Rat>> {
    let rest = line
        .strip_prefix(label)
        .ok_or_else(|| Error::Invalid(format!("expected `{label}` line, got `{line}`")))?;
    let parts: Vec<&str> = rest.split_whitespace().collect();
    Ok(Poly::from_rats(parse_rats(&parts)?))
}

struct LineReader<'a> {
    lines: std::str::Lines<'a>,
}

impl<'a> LineReader<'a> {
    fn next(&mut self) -> Option<&'a str> {
        self.lines.next()
    }
    fn expect(&mut self, prefix: &str) -> Result<String> {
        let l = self
            .lines
            .next()
            .ok_or_else(|| Error::Invalid(format!("unexpected end before `{prefix}`")))?;
        l.strip_prefix(prefix)
            .map(|s| s.trim().to_string())
            .ok_or_else(|| Error::Invalid(format!("expected `{prefix}`, got `{l}`")))
    }
}

/// Parses a certificate document back; lossless on all rational data.
pub fn parse_document(text: &str) -> Result<ParsedDocument> {
    let mut lines = LineReader { lines: text.lines() };
    lines.expect("signsample-certificate v1")?;
    let mode = lines.expect("mode ")?;
    let seed: u64 = lines.expect("seed ")?.parse().map_err(|_| Error::Invalid("bad seed".into()))?;
    let nvars: usize = lines.expect("nvars ")?.parse().map_err(|_| Error::Invalid("bad nvars".into()))?;
    lines.expect("vars ")?;
    let npolys: usize = lines.expect("npolys ")?.parse().map_err(|_| Error::Invalid("bad npolys".into()))?;
    for _ in 0..npolys {
        lines.expect("poly ")?;
    }
    lines.expect("degrees ")?;
    lines.expect("matrix ")?;
    let mut matrix = Vec::with_capacity(nvars);
    for _ in 0..nvars {
        let row = lines.expect("row ")?;
        matrix.push(parse_rats(&row.split_whitespace().collect::<Vec<_>>())?);
    }
    let point = parse_rats(&lines.expect("point ")?.split_whitespace().collect::<Vec<_>>())?;
    let nres: usize = lines.expect("resolutions ")?
        .parse()
        .map_err(|_| Error::Invalid("bad resolution count".into()))?;
    let mut resolutions = Vec::with_capacity(nres);
    for _ in 0..nres {
        lines.expect("resolution ")?;
        let header = lines.expect("level ")?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let level: usize = parts[0].parse().map_err(|_| Error::Invalid("bad level".into()))?;
        let kind = match parts.get(1) {
            Some(&"deformation") => {
                let subset: Vec<usize> = parts[3]
                    .split(',')
                    .map(|s| s.parse().map_err(|_| Error::Invalid("bad subset".into())))
                    .collect::<Result<_>>()?;
                let tau = if parts.len() > 5 && parts[4] == "tau" {
                    Some(parts[5].chars().map(|c| if c == '+' { 1i8 } else { -1 }).collect())
                } else {
                    None
                };
                ProvKind::Deformation { subset, tau }
            }
            Some(&"univariate") => ProvKind::Univariate {
                poly: parts[3].parse().map_err(|_| Error::Invalid("bad poly index".into()))?,
            },
            Some(&"basepoint") => ProvKind::BasePoint,
            _ => return Err(Error::Invalid(format!("bad provenance `{header}`"))),
        };
        let q = parse_poly_line(
            lines.next().ok_or_else(|| Error::Invalid("missing q".into()))?,
            "q",
        )?;
        let qtilde = parse_poly_line(
            lines.next().ok_or_else(|| Error::Invalid("missing qtilde".into()))?,
            "qtilde",
        )?;
        let mut w = Vec::with_capacity(nvars);
        for k in 0..nvars {
            w.push(parse_poly_line(
                lines.next().ok_or_else(|| Error::Invalid("missing w".into()))?,
                &format!("w{}", k + 1),
            )?);
        }
        let endl = lines.next();
        if endl != Some("end") {
            return Err(Error::Invalid("expected `end`".into()));
        }
        resolutions.push((GeometricResolution { q, qtilde, w }, Provenance { level, kind }));
    }
    let cond_header = lines.expect("conditions ")?;
    let hp: Vec<&str> = cond_header.split_whitespace().collect();
    let kind = match hp[0] {
        "strict" => SignKind::Strict,
        "closed" => SignKind::Closed,
        other => return Err(Error::Invalid(format!("bad condition kind `{other}`"))),
    };
    let ncond: usize = hp[1].parse().map_err(|_| Error::Invalid("bad condition count".into()))?;
    let mut conditions = Vec::with_capacity(ncond);
    for _ in 0..ncond {
        let l = lines.expect("condition ")?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        let signs: Vec<i8> = parts[0]
            .chars()
            .map(|c| match c {
                '<' | '≤' => -1,
                '>' | '≥' => 1,
                _ => 0,
            })
            .collect();
        let derived = parts[1] == "derived";
        let mut witnesses = Vec::new();
        if parts.get(2) == Some(&"witnesses") {
            for wtok in &parts[3..] {
                let (a, b) = wtok
                    .split_once(':')
                    .ok_or_else(|| Error::Invalid("bad witness token".into()))?;
                let ri: usize = a.parse().map_err(|_| Error::Invalid("bad witness".into()))?;
                let root: usize = b.parse().map_err(|_| Error::Invalid("bad witness".into()))?;
                witnesses.push((ri - 1, root));
            }
        }
        conditions.push(SignCondition {
            kind,
            signs,
            witnesses,
            derived,
        });
    }
    Ok(ParsedDocument {
        mode,
        seed,
        nvars,
        matrix,
        point,
        resolutions,
        conditions,
        kind,
    })
}

fn collect_vars(texts: &[String]) -> Vec<String> {
    let mut vars: Vec<String> = Vec::new();
    for t in texts {
        let bytes = t.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i].is_ascii_alphabetic() || bytes[i] == b'_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let name = &t[start..i];
                if !vars.iter().any(|v| v == name) {
                    vars.push(name.to_string());
                }
            } else {
                i += 1;
            }
        }
    }
    vars
}

fn parse_sigma(s: &str, m: usize) -> Result<Vec<SigmaEntry>> {
    let entries: Vec<SigmaEntry> = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '<' => Ok(SigmaEntry::Lt),
            '=' => Ok(SigmaEntry::Eq),
            '>' => Ok(SigmaEntry::Gt),
            '*' => Ok(SigmaEntry::Any),
            other => Err(Error::Invalid(format!("bad sigma entry `{other}`"))),
        })
        .collect::<Result<_>>()?;
    if entries.len() != m {
        return Err(Error::Invalid(format!(
            "sigma pattern has {} entries for {} polynomials",
            entries.len(),
            m
        )));
    }
    Ok(entries)
}

/// CLI driver; returns the process exit code.
pub fn cli_main() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(args) {
        Ok(code) => code,
        Err(Error::Parse { pos, msg }) => {
            eprintln!("error: syntax error at byte {pos}: {msg}");
            1
        }
        Err(Error::UnknownVariable { name, pos }) => {
            eprintln!("error: unknown variable `{name}` at byte {pos}");
            1
        }
        Err(Error::BadRandomness { attempts, seed, context }) => {
            eprintln!("error: random choices exhausted after {attempts} attempts (seed {seed}): {context}");
            2
        }
        Err(Error::Disagreement(msg)) => {
            eprintln!("error: verification disagreement: {msg}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run_cli(args: Args) -> Result<i32> {
    let vars: Vec<String> = match &args.vars {
        Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
        None => collect_vars(&args.polynomials),
    };
    if vars.is_empty() {
        return Err(Error::Invalid("no variables found".into()));
    }
    let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let fs: Vec<Slp> = args
        .polynomials
        .iter()
        .map(|t| parse(t, &var_refs))
        .collect::<Result<_>>()?;
    let degrees: Vec<usize> = match &args.degrees {
        Some(d) => d
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad degree `{s}`")))
            })
            .collect::<Result<_>>()?,
        None => fs
            .iter()
            .map(|f| Ok(crate::multipoly::densify(f)?.total_degree().unwrap_or(0).max(1)))
            .collect::<Result<_>>()?,
    };
    if degrees.len() != fs.len() {
        return Err(Error::Invalid("one degree bound per polynomial required".into()));
    }
    let mode: Mode = args.mode.into();
    let mut cfg = SamplerConfig::new(mode, args.seed);
    if let Some(s) = &args.sigma {
        cfg.sigma = Some(parse_sigma(s, fs.len())?);
    }
    let result = sample_and_list(&fs, &degrees, &cfg)?;

    if args.verify {
        for (res, _) in &result.set.resolutions {
            crate::oracle::verify_point_signs(res, &fs)?;
        }
    }

    let doc = write_document(&result, mode, args.seed, &vars, &args.polynomials, &degrees);
    match &args.out {
        Some(path) => std::fs::write(path, &doc)?,
        None => print!("{doc}"),
    }
    if args.list_conditions {
        for c in &result.conditions {
            println!(
                "{} {}",
                render_signs(&c.signs, c.kind),
                if c.derived { "derived" } else { "witnessed" }
            );
        }
    }
    for w in &result.set.warnings {
        eprintln!("warning: {w}");
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn vars_in_order_of_first_appearance() {
        let texts = vec!["x2 + y".to_string(), "x1*x2".to_string()];
        assert_eq!(collect_vars(&texts), vec!["x2", "y", "x1"]);
    }

    #[test]
    fn document_roundtrip_small() {
        let fs = vec![parse("x1^2 + x2^2 - 1", &["x1", "x2"]).unwrap()];
        let cfg = SamplerConfig::new(Mode::Regular, 9);
        let result = sample_and_list(&fs, &[2], &cfg).unwrap();
        let doc = write_document(
            &result,
            Mode::Regular,
            9,
            &["x1".into(), "x2".into()],
            &["x1^2 + x2^2 - 1".into()],
            &[2],
        );
        let parsed = parse_document(&doc).unwrap();
        assert_eq!(parsed.seed, 9);
        assert_eq!(parsed.nvars, 2);
        assert_eq!(parsed.matrix, result.set.matrix.matrix);
        assert_eq!(parsed.point, result.set.point);
        assert_eq!(parsed.resolutions.len(), result.set.resolutions.len());
        for ((a, pa), (b, pb)) in parsed.resolutions.iter().zip(&result.set.resolutions) {
            assert_eq!(a, b);
            assert_eq!(pa, pb);
        }
        assert_eq!(parsed.conditions, result.conditions);
    }

    #[test]
    fn document_roundtrip_big_rationals() {
        // lossless round-trip of large coefficients
        let q = Poly::from_rats(vec![
            Rat::new(
                num::BigInt::parse_bytes(b"123456789012345678901234567890123", 10).unwrap(),
                num::BigInt::parse_bytes(b"98765432109876543210987654321", 10).unwrap(),
            ),
            rat(1),
        ]);
        let res = GeometricResolution::from_v_form(q, &[crate::poly::monomial_u()]);
        let mut s = String::new();
        write_poly(&mut s, "q", &res.q);
        let back = parse_poly_line(s.trim_end(), "q").unwrap();
        assert_eq!(back, res.q);
    }

    #[test]
    fn sigma_parse() {
        let s = parse_sigma("<=*>", 4).unwrap();
        assert_eq!(
            s,
            vec![SigmaEntry::Lt, SigmaEntry::Eq, SigmaEntry::Any, SigmaEntry::Gt]
        );
        assert!(parse_sigma("<<", 3).is_err());
        assert!(parse_sigma("x", 1).is_err());
    }
}
