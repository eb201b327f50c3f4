//! Form literals.
//!
//! Field mode: `1,2,4` (integers in `F_p`, or polynomial-basis encodings when
//! `t > 1`). Abstract mode: `@0,1,2` (class list) or `@{0:2,1:1}`
//! (multiplicities). Classes of product groups may be written as tuples,
//! `@{(0,1):2}`. The empty form is `<>`.

use std::sync::Arc;

use crate::diagform::DiagonalForm;
use crate::error::{Error, Result};
use crate::powerclass::PowerClassGroup;

/// Splits on commas that are not inside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter().map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn parse_class(ctx: &PowerClassGroup, tok: &str) -> Result<usize> {
    let tok = tok.trim();
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        let parts = inner
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad tuple `{tok}`"))))
            .collect::<Result<Vec<_>>>()?;
        return ctx.group().from_tuple(&parts);
    }
    let c: usize = tok.parse().map_err(|_| Error::Parse(format!("bad class `{tok}`")))?;
    ctx.group().check(c)
}

pub fn parse_form(ctx: &Arc<PowerClassGroup>, text: &str) -> Result<DiagonalForm> {
    let text = text.trim();
    if text == "<>" || text.is_empty() || text == "@{}" || text == "@" {
        return DiagonalForm::zero(ctx.clone());
    }
    if let Some(body) = text.strip_prefix("@{") {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| Error::Parse("unterminated multiplicity map".into()))?;
        let mut mult = vec![0u64; ctx.order()];
        for entry in split_top(body) {
            let (k, v) = entry
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("expected class:mult, got `{entry}`")))?;
            let m: u64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity `{v}`")))?;
            mult[parse_class(ctx, k)?] += m;
        }
        return DiagonalForm::from_mult(ctx.clone(), mult);
    }
    if let Some(body) = text.strip_prefix('@') {
        let classes = split_top(body)
            .into_iter()
            .map(|t| parse_class(ctx, t))
            .collect::<Result<Vec<_>>>()?;
        return DiagonalForm::from_classes(ctx.clone(), &classes);
    }
    let field = ctx.require_field()?;
    let coeffs = split_top(text)
        .into_iter()
        .map(|t| {
            let n: i64 = t.parse().map_err(|_| Error::Parse(format!("bad coefficient `{t}`")))?;
            field.from_int(n)
        })
        .collect::<Result<Vec<_>>>()?;
    DiagonalForm::from_coeffs(ctx.clone(), &coeffs)
}
