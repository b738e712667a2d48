//! Text and JSON file formats for boxes and measure vectors.
//!
//! Box files hold one probability per line:
//!
//! ```text
//! # comment
//! a1 + b1 + 0.42677669529663687
//! ```
//!
//! Measure files hold one weight per strategy pattern, in `(a1, b1, a2, b2)`
//! order:
//!
//! ```text
//! +++- 0.0625
//! ```
//!
//! Both also accept a JSON object, `{"probabilities": {"a1+b1+": ...}}` or
//! `{"measures": {"+++-": ...}}`. Labels are case-insensitive on read and
//! lowercase on write; ASCII `-` is written, the Unicode minus is accepted.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::{MeasureVector, Outcome, ProbabilitySet, Setting, SettingPair, Strategy};

/// Formats `x` with 17 significant digits in positional notation, dropping
/// trailing zeros. Parsing the result gives back `x` exactly.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    let mut out = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    if out.contains('.') {
        out = out.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if x < 0.0 {
        out.insert(0, '-');
    }
    out
}

fn box_label(pair: SettingPair, a: Outcome, b: Outcome) -> String {
    format!("{}{}{}{}", pair.a(), a, pair.b(), b)
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("`{token}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("`{token}` is not finite")));
    }
    Ok(v)
}

fn json_document<'a>(text: &str, key: &str, value: &'a mut Value) -> Result<&'a Map<String, Value>> {
    *value = serde_json::from_str(text)
        .map_err(|e| Error::parse(e.line(), format!("invalid JSON: {e}")))?;
    value
        .get(key)
        .and_then(Value::as_object)
        .ok_or_else(|| Error::parse(0, format!("missing object \"{key}\"")))
}

fn json_number(v: &Value, label: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::parse(0, format!("\"{label}\" is not a finite number")))
}

fn parse_box_label(label: &str) -> Option<(SettingPair, Outcome, Outcome)> {
    let chars: Vec<char> = label.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.len() != 6 {
        return None;
    }
    let sa: String = chars[..2].iter().collect();
    let sb: String = chars[3..5].iter().collect();
    let (sa, sb) = (Setting::parse(&sa)?, Setting::parse(&sb)?);
    let pair = pair_of(sa, sb)?;
    Some((pair, Outcome::from_symbol(chars[2])?, Outcome::from_symbol(chars[5])?))
}

fn pair_of(a: Setting, b: Setting) -> Option<SettingPair> {
    use crate::model::Party;
    if a.party() != Party::A || b.party() != Party::B {
        return None;
    }
    SettingPair::new(a.index(), b.index())
}

/// Parses a box from either the line format or JSON.
pub fn parse_box(text: &str) -> Result<ProbabilitySet> {
    let mut values: [Option<f64>; 16] = [None; 16];
    let mut store = |idx: usize, v: f64, line: usize, label: String| -> Result<()> {
        if values[idx].replace(v).is_some() {
            return Err(Error::parse(line, format!("duplicate entry {label}")));
        }
        Ok(())
    };

    if is_json(text) {
        let mut doc = Value::Null;
        let map = json_document(text, "probabilities", &mut doc)?;
        for (label, v) in map {
            let (pair, a, b) = parse_box_label(label)
                .ok_or_else(|| Error::parse(0, format!("unknown label \"{label}\"")))?;
            store(ProbabilitySet::index_of(pair, a, b), json_number(v, label)?, 0, label.clone())?;
        }
    } else {
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let [sa, oa, sb, ob, value] = tokens[..] else {
                return Err(Error::parse(
                    line,
                    format!("expected `<a-setting> <a-outcome> <b-setting> <b-outcome> <probability>`, got `{content}`"),
                ));
            };
            let setting = |s: &str| {
                Setting::parse(s).ok_or_else(|| Error::parse(line, format!("unknown setting `{s}`")))
            };
            let outcome = |s: &str| {
                let mut chars = s.chars();
                match (chars.next().and_then(Outcome::from_symbol), chars.next()) {
                    (Some(o), None) => Ok(o),
                    _ => Err(Error::parse(line, format!("unknown outcome `{s}`"))),
                }
            };
            let (sa, sb) = (setting(sa)?, setting(sb)?);
            let pair = pair_of(sa, sb).ok_or_else(|| {
                Error::parse(line, format!("`{sa} {sb}` is not an (a, b) setting pair"))
            })?;
            let (a, b) = (outcome(oa)?, outcome(ob)?);
            let v = parse_number(value, line)?;
            store(ProbabilitySet::index_of(pair, a, b), v, line, box_label(pair, a, b))?;
        }
    }

    let mut entries = [0.0; 16];
    let mut missing = Vec::new();
    for pair in SettingPair::ALL {
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                let idx = ProbabilitySet::index_of(pair, a, b);
                match values[idx] {
                    Some(v) => entries[idx] = v,
                    None => missing.push(box_label(pair, a, b)),
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::parse(0, format!("missing entries: {}", missing.join(", "))));
    }
    Ok(ProbabilitySet::new(entries))
}

/// Line-format box, preceded by `comments` as `#` lines.
pub fn write_box(p: &ProbabilitySet, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    for pair in SettingPair::ALL {
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                out.push_str(&format!(
                    "{} {} {} {} {}\n",
                    pair.a(),
                    a,
                    pair.b(),
                    b,
                    format_value(p.get(pair, a, b))
                ));
            }
        }
    }
    out
}

pub fn box_to_json(p: &ProbabilitySet) -> Value {
    let mut map = Map::new();
    for pair in SettingPair::ALL {
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                map.insert(box_label(pair, a, b), Value::from(p.get(pair, a, b)));
            }
        }
    }
    let mut doc = Map::new();
    doc.insert("probabilities".into(), Value::Object(map));
    Value::Object(doc)
}

/// Parses a measure vector from either the line format or JSON.
pub fn parse_measures(text: &str) -> Result<MeasureVector> {
    let mut values: [Option<f64>; 16] = [None; 16];
    let mut store = |s: Strategy, v: f64, line: usize| -> Result<()> {
        if values[s.index()].replace(v).is_some() {
            return Err(Error::parse(line, format!("duplicate pattern {s}")));
        }
        Ok(())
    };

    if is_json(text) {
        let mut doc = Value::Null;
        let map = json_document(text, "measures", &mut doc)?;
        for (label, v) in map {
            let s = Strategy::parse_pattern(label.trim())
                .ok_or_else(|| Error::parse(0, format!("unknown pattern \"{label}\"")))?;
            store(s, json_number(v, label)?, 0)?;
        }
    } else {
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let [pattern, value] = tokens[..] else {
                return Err(Error::parse(
                    line,
                    format!("expected `<pattern> <weight>`, got `{content}`"),
                ));
            };
            let s = Strategy::parse_pattern(pattern)
                .ok_or_else(|| Error::parse(line, format!("unknown pattern `{pattern}`")))?;
            store(s, parse_number(value, line)?, line)?;
        }
    }

    let missing: Vec<String> = Strategy::all()
        .filter(|s| values[s.index()].is_none())
        .map(|s| s.pattern())
        .collect();
    if !missing.is_empty() {
        return Err(Error::parse(0, format!("missing patterns: {}", missing.join(", "))));
    }
    Ok(MeasureVector::new(values.map(|v| v.unwrap_or_default())))
}

/// Line-format measure vector, preceded by `comments` as `#` lines.
pub fn write_measures(m: &MeasureVector, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    for (s, w) in m.iter() {
        out.push_str(&format!("{} {}\n", s.pattern(), format_value(w)));
    }
    out
}

pub fn measures_to_json(m: &MeasureVector) -> Value {
    let map: Map<String, Value> = m.iter().map(|(s, w)| (s.pattern(), Value::from(w))).collect();
    let mut doc = Map::new();
    doc.insert("measures".into(), Value::Object(map));
    Value::Object(doc)
}
