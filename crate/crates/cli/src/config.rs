//! Run configuration: a `key = value` file overlaid by environment budget
//! overrides and command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ffbt_core::algebra::field::prime_power;
use ffbt_core::algebra::{Fq, Poly, RatK};
use ffbt_core::congruence::{Budgets, Level, SubspaceK};
use ffbt_core::lattice::{LatticeClass, LatticeClassRepr};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Dot,
}

/// Flags shared by every command. Each overrides the matching config key.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// Field order q = p^n
    #[arg(long, global = true)]
    pub q: Option<u32>,
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Coefficients of the defining polynomial of F_q over F_p, constant term first
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Rank of the building
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Level generator, e.g. `t^2+t+1` or a coefficient list `1,1,1`
    #[arg(long, global = true)]
    pub ideal: Option<String>,
    /// Ball radius N
    #[arg(long, global = true)]
    pub radius: Option<u32>,
    /// Center class as JSON (default: the standard lattice)
    #[arg(long, global = true)]
    pub center: Option<String>,
    /// Spanning vectors of W_1, `;`-separated, entries `,`-separated polynomials
    #[arg(long, global = true)]
    pub w1: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Config file of `key = value` lines
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "FFBT_ENUM_CAP")]
    pub enum_cap: Option<u32>,
    #[arg(long, global = true, env = "FFBT_SOLUTION_CAP")]
    pub solution_cap: Option<u64>,
    #[arg(long, global = true, env = "FFBT_VERTEX_BUDGET")]
    pub vertex_budget: Option<usize>,
    #[arg(long, global = true, env = "FFBT_BRUTE_BUDGET")]
    pub brute_budget: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include wall-clock timing in the report
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub field: Fq,
    pub r: usize,
    pub ideal: Option<Poly>,
    pub radius: u32,
    pub center: Option<LatticeClass>,
    pub w1: Option<SubspaceK>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub budgets: Budgets,
    pub seed: u64,
    pub threads: Option<usize>,
    pub timing: bool,
    raw: BTreeMap<&'static str, String>,
}

const KEYS: &[&str] = &[
    "q",
    "p",
    "n",
    "modulus",
    "r",
    "ideal",
    "radius",
    "center",
    "w1",
    "format",
    "output",
    "enum_cap",
    "solution_cap",
    "vertex_budget",
    "brute_budget",
    "seed",
    "threads",
];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<&'static str, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", no + 1)))?;
        let k = k.trim();
        let key = KEYS
            .iter()
            .find(|&&x| x == k)
            .ok_or_else(|| usage(format!("config line {}: unknown key `{k}`", no + 1)))?;
        out.insert(*key, v.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim()
        .parse()
        .map_err(|_| usage(format!("--{}: cannot parse `{v}`", key.replace('_', "-"))))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<u32>, CliError> {
    let v = v.trim().trim_start_matches('[').trim_end_matches(']');
    v.split(',').map(|x| parse_num(key, x)).collect()
}

/// Parses a polynomial in `t`: a sum of terms `c`, `c*t`, `ct^k`, `t^k`, with
/// coefficients given as field element indices, or a bare coefficient list.
pub fn parse_poly(s: &str, f: &Fq, key: &str) -> Result<Poly, CliError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(usage(format!("--{key}: empty polynomial")));
    }
    if !s.contains('t') && (s.contains(',') || s.starts_with('[')) {
        let idx = parse_list(key, &s)?;
        return Poly::from_indices(&idx, f)
            .ok_or_else(|| usage(format!("--{key}: coefficient out of range for F_{}", f.q())));
    }
    let bad = || usage(format!("--{key}: cannot parse polynomial `{s}`"));
    let mut acc = Poly::zero();
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in s.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            terms.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.is_empty() {
            if ch == '-' {
                neg = !neg;
            }
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(bad());
    }
    terms.push((neg, cur));
    for (neg, term) in terms {
        let (coef, power) = match term.find('t') {
            None => (term.as_str(), 0usize),
            Some(i) => {
                let c = term[..i].trim_end_matches('*');
                let rest = &term[i + 1..];
                let k = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(bad)?
                        .parse()
                        .map_err(|_| bad())?
                };
                (c, k)
            }
        };
        let c: u32 = if coef.is_empty() {
            1
        } else {
            coef.parse().map_err(|_| bad())?
        };
        let mut a = f.elem(c).ok_or_else(|| {
            usage(format!(
                "--{key}: coefficient {c} is not below q = {}",
                f.q()
            ))
        })?;
        if neg {
            a = f.neg(a);
        }
        acc = acc.add(&Poly::monomial(a, power), f);
    }
    Ok(acc)
}

fn parse_w1(s: &str, r: usize, f: &Fq) -> Result<SubspaceK, CliError> {
    let mut vecs = Vec::new();
    for part in s.split(';') {
        let v: Vec<RatK> = part
            .split(',')
            .map(|x| parse_poly(x, f, "w1").map(RatK::from_poly))
            .collect::<Result<_, _>>()?;
        if v.len() != r {
            return Err(usage(format!(
                "--w1: vector `{part}` must have {r} entries"
            )));
        }
        vecs.push(v);
    }
    let w = SubspaceK::span(r, &vecs, f);
    if w.dim() == 0 || w.dim() >= r {
        return Err(usage(format!(
            "--w1: span has dimension {}, need 0 < dim < {r}",
            w.dim()
        )));
    }
    Ok(w)
}

fn field_from(get: &impl Fn(&str) -> Option<String>) -> Result<Fq, CliError> {
    let (p, n) = match (get("q"), get("p"), get("n")) {
        (Some(q), None, None) => {
            let q: u32 = parse_num("q", &q)?;
            prime_power(q).ok_or_else(|| usage(format!("--q: {q} is not a prime power")))?
        }
        (None, Some(p), n) => {
            let p: u32 = parse_num("p", &p)?;
            let n: u32 = n.map_or(Ok(1), |n| parse_num("n", &n))?;
            (p, n)
        }
        (Some(q), Some(p), n) => {
            let q: u32 = parse_num("q", &q)?;
            let p: u32 = parse_num("p", &p)?;
            let n: u32 = n.map_or(Ok(1), |n| parse_num("n", &n))?;
            if prime_power(q) != Some((p, n)) {
                return Err(usage(format!("--q: {q} is not {p}^{n}")));
            }
            (p, n)
        }
        (_, None, Some(_)) => return Err(usage("--n: requires --p")),
        (None, None, None) => return Err(usage("--q: field not specified (use --q or --p/--n)")),
    };
    let f = match get("modulus") {
        Some(m) => Fq::with_modulus(p, &parse_list("modulus", &m)?),
        None => Fq::new(p, n),
    };
    let f = f.map_err(|e| usage(format!("--q: {e}")))?;
    if f.n() != n {
        return Err(usage(format!("--modulus: degree does not match n = {n}")));
    }
    Ok(f)
}

/// Combines the config file (if any) with flags; flags win.
pub fn parse_config(flags: &Flags) -> Result<Config, CliError> {
    let mut raw = match &flags.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let mut set = |k: &'static str, v: Option<String>| {
        if let Some(v) = v {
            raw.insert(k, v);
        }
    };
    set("q", flags.q.map(|x| x.to_string()));
    set("p", flags.p.map(|x| x.to_string()));
    set("n", flags.n.map(|x| x.to_string()));
    set("modulus", flags.modulus.clone());
    set("r", flags.r.map(|x| x.to_string()));
    set("ideal", flags.ideal.clone());
    set("radius", flags.radius.map(|x| x.to_string()));
    set("center", flags.center.clone());
    set("w1", flags.w1.clone());
    set(
        "format",
        flags.format.map(|x| format!("{x:?}").to_lowercase()),
    );
    set(
        "output",
        flags.output.as_ref().map(|x| x.display().to_string()),
    );
    set("enum_cap", flags.enum_cap.map(|x| x.to_string()));
    set("solution_cap", flags.solution_cap.map(|x| x.to_string()));
    set("vertex_budget", flags.vertex_budget.map(|x| x.to_string()));
    set("brute_budget", flags.brute_budget.map(|x| x.to_string()));
    set("seed", flags.seed.map(|x| x.to_string()));
    set("threads", flags.threads.map(|x| x.to_string()));
    build(raw, flags.timing)
}

fn parse_config_file(path: &Path) -> Result<BTreeMap<&'static str, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("--config: cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn build(raw: BTreeMap<&'static str, String>, timing: bool) -> Result<Config, CliError> {
    let get = |k: &str| raw.get(k).cloned();
    let field = field_from(&get)?;
    let r: usize = get("r").map_or(Ok(2), |v| parse_num("r", &v))?;
    if r < 2 {
        return Err(usage("--r: rank must be at least 2"));
    }
    let ideal = match get("ideal") {
        None => None,
        Some(s) => {
            let p = parse_poly(&s, &field, "ideal")?;
            if p.is_constant() {
                return Err(usage("--ideal: the level must be a proper nonzero ideal"));
            }
            Some(p.monic(&field))
        }
    };
    let radius = get("radius").map_or(Ok(1), |v| parse_num("radius", &v))?;
    let center = match get("center") {
        None => None,
        Some(s) => {
            let repr: LatticeClassRepr =
                serde_json::from_str(&s).map_err(|e| usage(format!("--center: {e}")))?;
            let c = LatticeClass::from_repr(&repr, &field)
                .map_err(|e| usage(format!("--center: {e}")))?;
            if c.rank() != r {
                return Err(usage(format!(
                    "--center: class has rank {}, expected {r}",
                    c.rank()
                )));
            }
            Some(c)
        }
    };
    let w1 = get("w1").map(|s| parse_w1(&s, r, &field)).transpose()?;
    let format = match get("format").as_deref() {
        None | Some("json") => Format::Json,
        Some("dot") => Format::Dot,
        Some(other) => return Err(usage(format!("--format: unknown format `{other}`"))),
    };
    let mut budgets = Budgets::default();
    if let Some(v) = get("enum_cap") {
        budgets.enum_cap = parse_num("enum_cap", &v)?;
    }
    if let Some(v) = get("solution_cap") {
        budgets.solution_cap = parse_num("solution_cap", &v)?;
    }
    if let Some(v) = get("vertex_budget") {
        budgets.vertex_budget = parse_num("vertex_budget", &v)?;
    }
    if let Some(v) = get("brute_budget") {
        budgets.brute_budget = parse_num("brute_budget", &v)?;
    }
    let seed = get("seed").map_or(Ok(ffbt_core::verify::DEFAULT_SEED), |v| {
        parse_num("seed", &v)
    })?;
    let threads = get("threads")
        .map(|v| parse_num("threads", &v))
        .transpose()?;
    if threads == Some(0) {
        return Err(usage("--threads: must be positive"));
    }
    Ok(Config {
        field,
        r,
        ideal,
        radius,
        center,
        w1,
        format,
        output: get("output").map(PathBuf::from),
        budgets,
        seed,
        threads,
        timing,
        raw,
    })
}

impl Config {
    pub fn level(&self) -> Result<Level, CliError> {
        let ideal = self
            .ideal
            .clone()
            .ok_or_else(|| usage("--ideal: this command needs a level"))?;
        Level::new(ideal, self.r, &self.field).map_err(|e| usage(format!("--ideal: {e}")))
    }

    pub fn center(&self) -> LatticeClass {
        self.center
            .clone()
            .unwrap_or_else(|| LatticeClass::standard(self.r))
    }

    /// The effective configuration, for echoing in reports.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.field.p(),
            "n": self.field.n(),
            "modulus": self.field.modulus(),
            "r": self.r,
            "ideal": self.ideal.as_ref().map(Poly::to_indices),
            "radius": self.radius,
            "center": self.center().to_repr(&self.field),
            "w1": self.raw.get("w1"),
            "budgets": self.budgets,
            "seed": self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_expressions() {
        let f = Fq::of_order(3).unwrap();
        let p = parse_poly("t^2 + 2t + 1", &f, "ideal").unwrap();
        assert_eq!(p.to_indices(), vec![1, 2, 1]);
        assert_eq!(parse_poly("1,2,1", &f, "ideal").unwrap(), p);
        assert_eq!(parse_poly("t^2 - t + 1", &f, "ideal").unwrap(), p);
        assert_eq!(
            parse_poly("2*t", &f, "ideal").unwrap().to_indices(),
            vec![0, 2]
        );
        assert!(parse_poly("t^", &f, "ideal").is_err());
        assert!(parse_poly("3t", &f, "ideal").is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        let e = parse_config_text("q = 2\ncolour = red\n").unwrap_err();
        assert!(e.to_string().contains("colour"));
        let m = parse_config_text("# comment\nq = 2  # trailing\nradius=3").unwrap();
        assert_eq!(m["q"], "2");
        assert_eq!(m["radius"], "3");
    }
}
