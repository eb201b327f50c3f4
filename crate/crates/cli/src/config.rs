//! Validated run configuration built from the command line.

use std::sync::Arc;

use wittforms_core::equivalence::{Equivalence, EquivalenceRegistry};
use wittforms_core::ffield::make_field;
use wittforms_core::group::{AbGroup, Subgroup};
use wittforms_core::pointwise::SearchBudget;
use wittforms_core::powerclass::PowerClassGroup;
use wittforms_core::Error;

use crate::Cli;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

/// Context, subgroup, and equivalence selected by the global flags.
pub struct Config {
    pub ctx: Arc<PowerClassGroup>,
    pub h: Subgroup,
    pub eq: Arc<dyn Equivalence>,
    pub budget: SearchBudget,
}

/// Splits a prime power into `(p, t)`.
fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut t = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        t += 1;
    }
    (r == 1).then_some((p, t))
}

impl Config {
    pub fn from_cli(cli: &Cli) -> Result<Config, CliError> {
        let field = cli.q.is_some() || cli.p.is_some();
        let ctx = match (&cli.group, field) {
            (Some(_), true) => return Err(CliError::Usage("give either a field (--q or --p) or --group, not both".into())),
            (None, false) => return Err(CliError::Usage("a field (--q or --p/--t) or --group is required".into())),
            (Some(g), false) => {
                if cli.t.is_some() {
                    return Err(CliError::Usage("--t applies to fields only".into()));
                }
                let group = AbGroup::parse(g).map_err(|e| CliError::Usage(e.to_string()))?;
                PowerClassGroup::abstract_group(group, cli.d)
            }
            (None, true) => {
                let (p, t) = match (cli.q, cli.p) {
                    (Some(_), Some(_)) => return Err(CliError::Usage("give --q or --p, not both".into())),
                    (Some(q), None) => {
                        if cli.t.is_some() {
                            return Err(CliError::Usage("--t is implied by --q".into()));
                        }
                        prime_power(q).ok_or_else(|| CliError::Usage(format!("{q} is not a prime power")))?
                    }
                    (None, Some(p)) => (p, cli.t.unwrap_or(1)),
                    (None, None) => unreachable!("field mode needs --q or --p"),
                };
                PowerClassGroup::of_field(make_field(p, t, cli.d)?)
            }
        };
        if cli.d < 3 {
            return Err(Error::DegreeTooSmall(cli.d).into());
        }
        let h = ctx.subgroup(&cli.h).map_err(|e| CliError::Usage(e.to_string()))?;
        let registry = EquivalenceRegistry::default();
        if !registry.names().contains(&cli.kind.as_str()) {
            return Err(CliError::Usage(format!("unknown kind `{}`; expected one of {:?}", cli.kind, registry.names())));
        }
        if cli.kind == "I" {
            if ctx.field().is_none() {
                return Err(CliError::Usage("--kind I needs a concrete field".into()));
            }
            if !h.is_whole() {
                return Err(CliError::Usage("--kind I is defined for --H max only".into()));
            }
        }
        let mut budget = SearchBudget::default();
        if let Some(cap) = cli.budget {
            budget.hard_cap = cap;
            budget.cross_check = budget.cross_check.min(cap);
        }
        let eq = registry.build(&cli.kind, &ctx, h.clone(), budget)?;
        Ok(Config { ctx, h, eq, budget })
    }
}
