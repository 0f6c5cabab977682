//! The `name(k1=v1, k2=v2)` text form shared by distribution and weight specs.

use crate::error::{Error, Result};

use super::{make_catalog, DistributionHandle};

/// A parsed `name(key=value, ...)` call.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCall {
    pub name: String,
    pub params: Vec<(String, f64)>,
}

impl ParsedCall {
    pub fn param_refs(&self) -> Vec<(&str, f64)> {
        self.params.iter().map(|(k, v)| (k.as_str(), *v)).collect()
    }
}

fn parse_error(text: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        text: text.to_string(),
        reason: reason.into(),
    }
}

pub fn parse_call(text: &str) -> Result<ParsedCall> {
    let trimmed = text.trim();
    let (name, rest) = match trimmed.find('(') {
        Some(open) => {
            if !trimmed.ends_with(')') {
                return Err(parse_error(text, "missing closing parenthesis"));
            }
            (&trimmed[..open], &trimmed[open + 1..trimmed.len() - 1])
        }
        None => (trimmed, ""),
    };
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(parse_error(text, "expected an identifier before '('"));
    }
    let mut params = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| parse_error(text, format!("parameter '{item}' is not key=value")))?;
        let key = key.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse_error(text, format!("value of '{key}' is not a number")))?;
        if params.iter().any(|(k, _): &(String, f64)| k == key) {
            return Err(parse_error(text, format!("parameter '{key}' given twice")));
        }
        params.push((key.to_string(), value));
    }
    Ok(ParsedCall {
        name: name.to_string(),
        params,
    })
}

/// Parse and build a catalog distribution, e.g. `"weibull(alpha=2, beta=1)"`.
pub fn parse_distribution(text: &str) -> Result<DistributionHandle> {
    let call = parse_call(text)?;
    make_catalog(&call.name, &call.param_refs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_calls() {
        let c = parse_call(" kumaraswamy(a=2, b = 3.5) ").unwrap();
        assert_eq!(c.name, "kumaraswamy");
        assert_eq!(c.params, vec![("a".into(), 2.0), ("b".into(), 3.5)]);
        assert!(parse_call("linear").unwrap().params.is_empty());
        assert!(parse_call("linear()").unwrap().params.is_empty());
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["power(c=2", "power(c)", "power(c=x)", "(c=1)", "power(c=1,c=2)"] {
            assert!(matches!(parse_call(bad), Err(Error::Parse { .. })), "{bad}");
        }
    }
}
