use std::collections::BTreeSet;
use std::time::Instant;

use ffbt_core::algebra::KMat;
use ffbt_core::building::Ball;
use ffbt_core::congruence::sigma::sigma_stab_space;
use ffbt_core::congruence::{
    brute_stab, fixed_space, in_b_sigma, stab_order, stab_space, Level, SigmaData,
};
use ffbt_core::homology::{
    components, full_complex, homology, restriction_map, stable_complex, unstable_complex,
    LevelData, TRUNCATION_CAPTION,
};
use ffbt_core::verify::{criteria, run_suite, Status, VerifyOptions};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{parse_poly, Config, Format};
use crate::{CliError, Command};

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub warnings: Vec<String>,
    /// Wall-clock milliseconds, only with `--timing`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    /// `pass`, `fail` or `budget`.
    pub status: &'static str,
    #[serde(skip)]
    pub dot: Option<String>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            "pass" => 0,
            "budget" => 3,
            _ => 1,
        }
    }

    /// The text written to the output: DOT for `ball --format dot`, else JSON.
    pub fn render(&self) -> String {
        match &self.dot {
            Some(d) => d.clone(),
            None => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

pub fn run(cmd: &Command, cfg: &Config) -> Result<RunReport, CliError> {
    if cfg.format == Format::Dot && !matches!(cmd, Command::Ball) {
        return Err(CliError::Usage(
            "--format: dot output is only available for `ball`".into(),
        ));
    }
    let start = Instant::now();
    let mut report = RunReport {
        command: cmd.name(),
        config: cfg.echo(),
        result: Value::Null,
        warnings: vec![TRUNCATION_CAPTION.to_string()],
        timing_ms: None,
        status: "pass",
        dot: None,
    };
    match cmd {
        Command::Ball => run_ball(cfg, &mut report)?,
        Command::Stabilizer { simplex, brute } => {
            run_stabilizer(cfg, simplex.as_deref(), *brute, &mut report)?
        }
        Command::UnstableMap => run_unstable_map(cfg, &mut report)?,
        Command::Homology => run_homology(cfg, &mut report)?,
        Command::Components => {
            let (b, lv) = (ball(cfg)?, cfg.level()?);
            let data = LevelData::compute(&b, &lv, &cfg.field)?;
            report.result = components(&b, &data, &cfg.field)?.to_json();
        }
        Command::Restrict { coarse } => run_restrict(cfg, coarse, &mut report)?,
        Command::Verify { only } => run_verify(cfg, only, &mut report)?,
    }
    if cfg.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

fn ball(cfg: &Config) -> Result<Ball, CliError> {
    Ok(Ball::build(
        &cfg.center(),
        cfg.radius,
        &cfg.field,
        cfg.budgets.vertex_budget,
    )?)
}

fn ideal_indices(cfg: &Config) -> Option<Vec<u32>> {
    cfg.ideal.as_ref().map(|p| p.to_indices())
}

fn counts(b: &Ball) -> Value {
    (0..b.rank())
        .map(|d| (d.to_string(), json!(b.simplices(d).len())))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn run_ball(cfg: &Config, report: &mut RunReport) -> Result<(), CliError> {
    let b = ball(cfg)?;
    if cfg.format == Format::Dot {
        report.dot = Some(format!("// {TRUNCATION_CAPTION}\n{}", b.to_dot()));
    }
    report.result = json!({
        "vertices": b.len(),
        "counts": counts(&b),
        "ball": b.to_json(&cfg.field, ideal_indices(cfg)),
    });
    Ok(())
}

fn parse_simplex(s: &str, b: &Ball) -> Result<ffbt_core::building::Simplex, CliError> {
    let ids: Vec<usize> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--simplex: bad vertex id `{x}`")))
        })
        .collect::<Result<_, _>>()?;
    if let Some(&v) = ids.iter().find(|&&v| v >= b.len()) {
        return Err(CliError::Usage(format!(
            "--simplex: vertex {v} is not in the ball ({} vertices)",
            b.len()
        )));
    }
    let classes: Vec<_> = ids.iter().map(|&v| b.class(v).clone()).collect();
    b.find_simplex(&classes)
        .ok_or_else(|| CliError::Usage(format!("--simplex: {s} is not a simplex of the ball")))
}

fn run_stabilizer(
    cfg: &Config,
    simplex: Option<&str>,
    brute: bool,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let f = &cfg.field;
    let (b, lv) = (ball(cfg)?, cfg.level()?);
    let sd = cfg.w1.clone().map(|w| SigmaData::new(w, f)).transpose()?;
    let Some(s) = simplex else {
        let mut rows = Vec::new();
        for d in 0..b.rank() {
            for s in b.simplices(d) {
                let h = stab_space(&b.simplex_classes(s), &lv, f);
                rows.push(json!({ "simplex": s, "dim": h.dim() }));
            }
        }
        report.result = json!({ "simplices": rows });
        return Ok(());
    };
    let s = parse_simplex(s, &b)?;
    let cls = b.simplex_classes(&s);
    let h = stab_space(&cls, &lv, f);
    let mut result = json!({
        "simplex": s,
        "classes": cls.iter().map(|c| c.to_repr(f)).collect::<Vec<_>>(),
        "stabilizer": h.to_json(),
        "unstable": h.dim() > 0,
        "fixed_space": fixed_space(&h, f).to_json(),
    });
    if brute {
        let found: BTreeSet<KMat> =
            brute_stab(&cls, &lv, h.max_degree_bound(), f, cfg.budgets.brute_budget)?
                .into_iter()
                .map(|g| g.matrix().clone())
                .collect();
        if found.len() as u128 != stab_order(&h) {
            return Err(CliError::Assertion(format!(
                "exhaustive search found {} elements, the solver predicts {}",
                found.len(),
                stab_order(&h)
            )));
        }
        result["brute"] =
            json!({ "deg_bound": h.max_degree_bound(), "count": found.len(), "agrees": true });
    }
    if let Some(sd) = &sd {
        result["sigma"] = json!({
            "dim": sigma_stab_space(&cls, sd, &lv, f).dim(),
            "in_b_sigma": in_b_sigma(&cls, sd, &lv, f),
        });
    }
    report.result = result;
    Ok(())
}

fn run_unstable_map(cfg: &Config, report: &mut RunReport) -> Result<(), CliError> {
    let (b, lv) = (ball(cfg)?, cfg.level()?);
    let data = LevelData::compute(&b, &lv, &cfg.field)?;
    let mut unstable = serde_json::Map::new();
    let mut tally = serde_json::Map::new();
    for d in 0..b.rank() {
        let list: Vec<_> = b
            .simplices(d)
            .iter()
            .enumerate()
            .filter(|(k, _)| data.is_unstable(d, *k))
            .map(|(_, s)| s)
            .collect();
        tally.insert(
            d.to_string(),
            json!({ "unstable": list.len(), "total": b.simplices(d).len() }),
        );
        unstable.insert(d.to_string(), json!(list));
    }
    report.result = json!({ "unstable": unstable, "counts": tally });
    Ok(())
}

fn run_homology(cfg: &Config, report: &mut RunReport) -> Result<(), CliError> {
    let b = ball(cfg)?;
    let full = full_complex(&b, true)?;
    let mut result = json!({ "full": homology(&full)? });
    if cfg.ideal.is_some() {
        let lv = cfg.level()?;
        let data = LevelData::compute(&b, &lv, &cfg.field)?;
        let un = unstable_complex(&b, &data, true)?;
        let st = stable_complex(&b, &data)?;
        // unaugmented counts for the additivity check
        let chi_full = full.euler_characteristic() + 1;
        let chi_un = un.euler_characteristic() + 1;
        let chi_st = st.complex.euler_characteristic();
        if chi_full != chi_un + chi_st {
            return Err(CliError::Assertion(format!(
                "chi(full) = {chi_full} but chi(unstable) + chi(stable) = {}",
                chi_un + chi_st
            )));
        }
        result["unstable"] = serde_json::to_value(homology(&un)?).expect("serializable");
        result["stable"] = serde_json::to_value(homology(&st.complex)?).expect("serializable");
        result["euler"] =
            json!({ "full": chi_full, "unstable": chi_un, "stable": chi_st, "additive": true });
        result["top_cycle_rank"] = json!(top_cycle_rank(&st.complex)?);
    }
    report.result = result;
    Ok(())
}

/// Rank of the degree-(r-1) cycles of the truncated stable complex.
fn top_cycle_rank(c: &ffbt_core::homology::ChainComplex) -> Result<usize, CliError> {
    let top = c.generators.len() - 1;
    let rank = ffbt_core::algebra::snf(&c.boundaries[top])?.rank;
    Ok(c.rank(top) - rank)
}

fn run_restrict(cfg: &Config, coarse: &str, report: &mut RunReport) -> Result<(), CliError> {
    let f = &cfg.field;
    let (b, fine_lv) = (ball(cfg)?, cfg.level()?);
    let coarse_poly = parse_poly(coarse, f, "coarse")?;
    if coarse_poly.is_constant() {
        return Err(CliError::Usage(
            "--coarse: the level must be a proper nonzero ideal".into(),
        ));
    }
    let coarse_lv = Level::new(coarse_poly.monic(f), cfg.r, f)?;
    let fine = stable_complex(&b, &LevelData::compute(&b, &fine_lv, f)?)?;
    let coarse_c = stable_complex(&b, &LevelData::compute(&b, &coarse_lv, f)?)?;
    let map = match restriction_map(&fine, &fine_lv, &coarse_c, &coarse_lv, f) {
        Err(e @ ffbt_core::Error::LevelContainment(_)) => {
            return Err(CliError::Usage(format!("--coarse: {e}")))
        }
        r => r?,
    };
    let degrees: Vec<Value> = map
        .matrices
        .iter()
        .enumerate()
        .map(|(d, m)| {
            let kept = (0..m.cols()).filter(|&j| !m.column(j).is_empty()).count();
            json!({ "degree": d, "fine": m.cols(), "coarse": m.rows(), "kept": kept, "killed": m.cols() - kept })
        })
        .collect();
    report.result = json!({
        "fine": fine_lv.ideal().to_indices(),
        "coarse": coarse_lv.ideal().to_indices(),
        "degrees": degrees,
        "commutes": true,
    });
    Ok(())
}

fn run_verify(cfg: &Config, only: &[String], report: &mut RunReport) -> Result<(), CliError> {
    let known = criteria();
    if let Some(bad) = only.iter().find(|o| {
        !known
            .iter()
            .any(|c| c.name == o.as_str() || c.id.to_string() == **o)
    }) {
        return Err(CliError::Usage(format!("--only: unknown check `{bad}`")));
    }
    let opts = VerifyOptions {
        seed: cfg.seed,
        budgets: cfg.budgets,
    };
    let outcomes = run_suite(&opts, only);
    for o in &outcomes {
        eprintln!("{o}");
    }
    report.status = if outcomes.iter().any(|o| o.status == Status::Fail) {
        "fail"
    } else if outcomes.iter().any(|o| o.status == Status::Budget) {
        "budget"
    } else {
        "pass"
    };
    // elapsed times are left out so the report is reproducible
    report.result = json!({ "checks": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>() });
    Ok(())
}
