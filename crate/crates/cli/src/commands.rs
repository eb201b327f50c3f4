//! Subcommand implementations. Each returns its full stdout text.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use wittforms_core::diagform::DiagonalForm;
use wittforms_core::equivalence::multisets;
use wittforms_core::literal::parse_form;
use wittforms_core::pointwise;
use wittforms_core::sepform::{SepContext, SeparableForm};
use wittforms_core::verify::{replay, write_replay, CheckRegistry, CheckReport};

use crate::config::{CliError, Config};
use crate::{Cli, Command};

pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn emit(cli: &Cli, doc: Value, lines: Vec<String>) -> Output {
    if cli.json {
        Output::ok(format!("{doc}\n"))
    } else {
        Output::ok(lines.into_iter().map(|l| l + "\n").collect())
    }
}

fn is_separable(text: &str) -> bool {
    text.contains("tr[")
}

fn form(cfg: &Config, text: &str) -> Result<DiagonalForm, CliError> {
    if is_separable(text) {
        return Err(CliError::Usage("separable literals are accepted by `reduce` and `invariants` only".into()));
    }
    Ok(parse_form(&cfg.ctx, text)?)
}

fn separable(cfg: &Config, text: &str) -> Result<SeparableForm, CliError> {
    if cfg.eq.name() != "H" {
        return Err(CliError::Usage("separable forms support --kind H only".into()));
    }
    let field = cfg.ctx.require_field()?;
    Ok(SeparableForm::parse(SepContext::new(field.clone()), text)?)
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    if let Command::Verify { id, params, replay, replay_dir, list } = &cli.command {
        return verify(cli, id, params, replay.as_deref(), replay_dir, *list);
    }
    let cfg = Config::from_cli(cli)?;
    match &cli.command {
        Command::Classes => classes(cli, &cfg),
        Command::Reduce { form } => reduce(cli, &cfg, form),
        Command::Equiv { a, b } => equiv(cli, &cfg, a, b),
        Command::Invariants { form } => invariants(cli, &cfg, form),
        Command::Isotropy { form } => isotropy(cli, &cfg, form),
        Command::Classify { form } => classify(cli, &cfg, form),
        Command::Neg { form } => neg(cli, &cfg, form),
        Command::Table { op, max_dim } => table(cli, &cfg, op, *max_dim),
        Command::Verify { .. } => unreachable!("handled above"),
    }
}

fn classes(cli: &Cli, cfg: &Config) -> Result<Output, CliError> {
    let group = cfg.ctx.group();
    let mut rows = Vec::new();
    let mut lines = vec![format!("# {}; H = {:?}", cfg.ctx.describe(), cfg.h.members())];
    for c in group.elements() {
        let label = group.format_element(c);
        let in_h = cfg.h.contains(c);
        let mark = if in_h { " [H]" } else { "" };
        match cfg.ctx.field() {
            Some(f) => {
                let members = f.class_members(c);
                let shown: Vec<String> = members.iter().map(u32::to_string).collect();
                lines.push(format!("class {label}: {{{}}}{mark}", shown.join(",")));
                rows.push(json!({"class": c, "label": label, "in_h": in_h, "members": members}));
            }
            None => {
                lines.push(format!("class {label}{mark}"));
                rows.push(json!({"class": c, "label": label, "in_h": in_h}));
            }
        }
    }
    let doc = json!({
        "context": cfg.ctx.describe(),
        "field": cfg.ctx.field().map(|f| f.descriptor()),
        "h": cfg.h.members(),
        "classes": rows,
    });
    Ok(emit(cli, doc, lines))
}

fn invariants_json(cfg: &Config, f: &DiagonalForm) -> Result<Value, CliError> {
    let witt_permanent = match wittforms_core::equivalence::WittClass::new(cfg.eq.clone(), f)?.permanent() {
        Ok(p) => Some(p),
        Err(wittforms_core::Error::NotInvariant) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "dim_index": f.dim_index(&cfg.h)?,
        "permanent": f.permanent(),
        "permanent_is_witt_invariant": witt_permanent.is_some(),
    }))
}

fn reduce(cli: &Cli, cfg: &Config, text: &str) -> Result<Output, CliError> {
    if is_separable(text) {
        let g = separable(cfg, text)?;
        let a = g.h_analyze_sep(cfg.h.members())?;
        let doc = json!({
            "kind": "H",
            "dim": g.dim(),
            "reduced": a.reduced.to_string(),
            "h_part": a.h_part.to_string(),
            "is_h_form": a.is_h_form,
        });
        return Ok(emit(cli, doc, vec![a.reduced.to_string()]));
    }
    let f = form(cfg, text)?;
    let reduced = cfg.eq.reduce(&f)?;
    let doc = json!({
        "kind": cfg.eq.name(),
        "dim": f.dim(),
        "mult": f.mult(),
        "reduced": reduced.to_string(),
        "reduced_mult": reduced.mult(),
        "invariants": invariants_json(cfg, &f)?,
    });
    Ok(emit(cli, doc, vec![reduced.to_string()]))
}

fn equiv(cli: &Cli, cfg: &Config, a: &str, b: &str) -> Result<Output, CliError> {
    let (fa, fb) = (form(cfg, a)?, form(cfg, b)?);
    let result = cfg.eq.equivalent(&fa, &fb)?;
    let doc = json!({
        "kind": cfg.eq.name(),
        "equivalent": result,
        "a_reduced": cfg.eq.reduce(&fa)?.to_string(),
        "b_reduced": cfg.eq.reduce(&fb)?.to_string(),
    });
    Ok(emit(cli, doc, vec![result.to_string()]))
}

fn invariants(cli: &Cli, cfg: &Config, text: &str) -> Result<Output, CliError> {
    if is_separable(text) {
        let g = separable(cfg, text)?;
        let inv = g.sep_invariants()?;
        let doc = json!({"dim": inv.dim, "permanent": inv.permanent, "form": g.to_json()});
        let lines = vec![format!("dim {}", inv.dim), format!("permanent {}", inv.permanent)];
        return Ok(emit(cli, doc, lines));
    }
    let f = form(cfg, text)?;
    let inv = invariants_json(cfg, &f)?;
    let lines = vec![
        format!("dim {}", f.dim()),
        format!("dim_index {}", inv["dim_index"]),
        format!("permanent {}", inv["permanent"]),
        format!("permanent_is_witt_invariant {}", inv["permanent_is_witt_invariant"]),
    ];
    let doc = json!({"dim": f.dim(), "mult": f.mult(), "invariants": inv});
    Ok(emit(cli, doc, lines))
}

fn isotropy(cli: &Cli, cfg: &Config, text: &str) -> Result<Output, CliError> {
    let f = form(cfg, text)?;
    let field = cfg.ctx.require_field()?.clone();
    let r = pointwise::is_isotropic(&f, cfg.budget)?;
    let digits: Option<Vec<Vec<u64>>> = r.witness.as_ref().map(|w| w.iter().map(|&x| field.digits(x)).collect());
    let mut lines = vec![format!("isotropic {}", r.isotropic)];
    if let Some(w) = &r.witness {
        let shown: Vec<String> = w.iter().map(u32::to_string).collect();
        lines.push(format!("witness {}", shown.join(",")));
    }
    let doc = json!({
        "form": f.to_string(),
        "isotropic": r.isotropic,
        "witness": r.witness,
        "witness_digits": digits,
        "method": r.method,
    });
    Ok(emit(cli, doc, lines))
}

fn classify(cli: &Cli, cfg: &Config, text: &str) -> Result<Output, CliError> {
    let f = form(cfg, text)?;
    let c = pointwise::classify(&f, cfg.budget)?;
    let profile = pointwise::represented_classes(&f)?;
    let lines = vec![
        format!("round {}", c.round),
        format!("universal {}", c.universal),
        format!("h_max_form {}", c.h_max_form),
        format!("isotropic {}", c.isotropic),
        format!("i_form {}", c.i_form),
        format!("represented {:?}", profile.represented),
    ];
    let doc = json!({"form": f.to_string(), "flags": c, "represented": profile.represented});
    Ok(emit(cli, doc, lines))
}

fn neg(cli: &Cli, cfg: &Config, text: &str) -> Result<Output, CliError> {
    let f = form(cfg, text)?;
    let n = cfg.eq.negate(&f)?;
    let doc = json!({"kind": cfg.eq.name(), "form": f.to_string(), "neg": n.to_string(), "neg_mult": n.mult()});
    Ok(emit(cli, doc, vec![n.to_string()]))
}

fn table(cli: &Cli, cfg: &Config, op: &str, max_dim: u64) -> Result<Output, CliError> {
    let mut seen = BTreeSet::new();
    let mut classes = Vec::new();
    for mult in multisets(cfg.ctx.order(), max_dim) {
        let f = DiagonalForm::from_mult(cfg.ctx.clone(), mult)?;
        let r = cfg.eq.reduce(&f)?;
        if seen.insert(r.mult().to_vec()) {
            classes.push(r);
        }
    }
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let sym = if op == "add" { "+" } else { "*" };
    for a in &classes {
        let mut row = Vec::new();
        for b in &classes {
            let c = if op == "add" { a.osum(b)? } else { a.tensor(b)? };
            let r = cfg.eq.reduce(&c)?;
            lines.push(format!("{a} {sym} {b} = {r}"));
            row.push(r.to_string());
        }
        rows.push(row);
    }
    let names: Vec<String> = classes.iter().map(|c| c.to_string()).collect();
    let doc = json!({"kind": cfg.eq.name(), "op": op, "classes": names, "table": rows});
    Ok(emit(cli, doc, lines))
}

fn parse_param(raw: &str) -> Result<(String, Value), CliError> {
    let (k, v) = raw.split_once('=').ok_or_else(|| CliError::Usage(format!("--param expects key=value, got `{raw}`")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

fn report_lines(r: &CheckReport) -> Vec<String> {
    let verdict = if r.passed() { "pass" } else { "FAIL" };
    let mut lines = vec![format!(
        "{verdict} {} cases={} elapsed_ms={} seed={}",
        r.check_id, r.cases_run, r.elapsed_ms, r.seed
    )];
    if let Some(c) = &r.counterexample {
        lines.push(format!("  counterexample {c}"));
    }
    lines
}

fn verify(
    cli: &Cli,
    id: &str,
    params: &[String],
    replay_file: Option<&std::path::Path>,
    replay_dir: &std::path::Path,
    list: bool,
) -> Result<Output, CliError> {
    let registry = CheckRegistry::default();
    if list {
        let mut lines = Vec::new();
        let mut docs = Vec::new();
        for id in registry.ids() {
            let check = registry.get(id)?;
            lines.push(format!("{id}  {}", check.claim()));
            docs.push(json!({"check_id": id, "claim": check.claim(), "defaults": check.defaults()}));
        }
        return Ok(emit(cli, Value::Array(docs), lines));
    }
    let reports = if let Some(path) = replay_file {
        vec![replay(path)?]
    } else if id == "all" {
        if !params.is_empty() {
            return Err(CliError::Usage("--param needs a single check id".into()));
        }
        registry.run_all(cli.seed)?
    } else {
        let mut overrides = serde_json::Map::new();
        for raw in params {
            let (k, v) = parse_param(raw)?;
            overrides.insert(k, v);
        }
        vec![registry.run(id, &Value::Object(overrides), cli.seed)?]
    };
    let mut lines = Vec::new();
    for r in &reports {
        lines.extend(report_lines(r));
        if replay_file.is_none() {
            if let Some(path) = write_replay(r, replay_dir)? {
                lines.push(format!("  replay {}", path.display()));
            }
        }
    }
    let failed = reports.iter().any(|r| !r.passed());
    let doc = if reports.len() == 1 {
        serde_json::to_value(&reports[0]).expect("reports serialize")
    } else {
        serde_json::to_value(&reports).expect("reports serialize")
    };
    let mut out = emit(cli, doc, lines);
    if failed {
        out.code = 1;
    }
    Ok(out)
}
