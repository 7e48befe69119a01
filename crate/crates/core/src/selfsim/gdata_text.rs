//! A line-based text format for G-data.
//!
//! ```text
//! # comments run to the end of the line
//! [part]
//! map a^2 -> a^2
//! map b -> b*[a,b]
//! [part]
//! map a -> 1
//! ```
//!
//! Each `[part]` block is one virtual endomorphism. Its domain is generated
//! by the left-hand words and each `map` line fixes one image; the pairs
//! must extend to a homomorphism on that subgroup.

use std::sync::Arc;

use super::rep::GData;
use super::vendo::VirtualEndomorphism;
use crate::error::{Error, Result};
use crate::pcgroup::{parse_expr, GroupElement, PcPresentation};

fn line_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos: line, msg: format!("line {line}: {}", msg.into()) }
}

fn word(pres: &Arc<PcPresentation>, s: &str, line: usize) -> Result<GroupElement> {
    parse_expr(s, pres)
        .and_then(|e| e.eval(pres))
        .map_err(|e| line_error(line, format!("`{}`: {e}", s.trim())))
}

pub fn parse_gdata(text: &str, pres: &Arc<PcPresentation>) -> Result<GData> {
    let mut blocks: Vec<(usize, Vec<GroupElement>, Vec<GroupElement>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "[part]" {
            blocks.push((n, Vec::new(), Vec::new()));
            continue;
        }
        let rest = line.strip_prefix("map ").ok_or_else(|| line_error(n, format!("expected `[part]` or `map`, got `{line}`")))?;
        let (l, r) = rest.split_once("->").ok_or_else(|| line_error(n, "expected `map <word> -> <word>`"))?;
        let (_, sources, images) = blocks.last_mut().ok_or_else(|| line_error(n, "`map` before the first `[part]`"))?;
        sources.push(word(pres, l, n)?);
        images.push(word(pres, r, n)?);
    }
    if blocks.is_empty() {
        return Err(line_error(0, "no `[part]` blocks"));
    }
    let parts = blocks
        .into_iter()
        .map(|(n, s, t)| {
            if s.is_empty() {
                return Err(line_error(n, "part without `map` lines"));
            }
            VirtualEndomorphism::from_pairs(pres, &s, &t).map_err(|e| line_error(n, format!("part: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    GData::new(parts)
}
