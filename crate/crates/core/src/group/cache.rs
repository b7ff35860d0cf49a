//! Spectrum cache file: `#key=value` metadata lines, then
//! `trace,length,norm,multiplicity,word` rows sorted by length.

use std::io::{BufRead, BufReader, Read, Write};

use super::{EnumerationOptions, LengthSpectrum, Model, PrimitiveClass};
use crate::error::{Error, Result};
use crate::TOOL_VERSION;

/// Metadata describing how a spectrum was produced, in file order.
pub fn spectrum_metadata(spec: &LengthSpectrum) -> Vec<(String, String)> {
    let o = &spec.options;
    vec![
        ("model".into(), spec.model.to_string()),
        ("norm_bound".into(), spec.norm_bound.to_string()),
        ("certified_bound".into(), spec.certified_bound.to_string()),
        ("complete".into(), spec.complete.to_string()),
        ("word_cap".into(), o.word_cap_for(spec.model).to_string()),
        ("max_elements".into(), o.max_elements.to_string()),
        ("length_tol".into(), o.length_tol.to_string()),
        ("tool_version".into(), TOOL_VERSION.to_string()),
    ]
}

pub fn write_spectrum_csv<W: Write>(mut out: W, spec: &LengthSpectrum) -> Result<()> {
    for (k, v) in spectrum_metadata(spec) {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trace", "length", "norm", "multiplicity", "word"])?;
    for c in &spec.classes {
        w.write_record([
            c.trace.to_string(),
            c.length.to_string(),
            c.norm.to_string(),
            c.multiplicity.to_string(),
            c.word.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn meta<'a>(pairs: &'a [(String, String)], key: &str) -> Result<&'a str> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::Parse { line: 0, message: format!("missing metadata '{key}'") })
}

fn parse<T: std::str::FromStr>(s: &str, line: u64, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bad {what} '{s}'") })
}

pub fn read_spectrum_csv<R: Read>(input: R) -> Result<LengthSpectrum> {
    let mut reader = BufReader::new(input);
    let mut pairs = Vec::new();
    let mut body = String::new();
    let mut line = String::new();
    let mut lineno = 0u64;
    while reader.read_line(&mut line)? > 0 {
        lineno += 1;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                pairs.push((k.trim().to_string(), v.trim().to_string()));
            }
        } else {
            body.push_str(&line);
            reader.read_to_string(&mut body)?;
            break;
        }
        line.clear();
    }
    let model: Model = meta(&pairs, "model")?.parse()?;
    let options = EnumerationOptions {
        word_cap: Some(parse(meta(&pairs, "word_cap")?, 0, "word_cap")?),
        max_elements: parse(meta(&pairs, "max_elements")?, 0, "max_elements")?,
        length_tol: parse(meta(&pairs, "length_tol")?, 0, "length_tol")?,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let mut classes = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let ln = lineno + rec.position().map_or(0, |p| p.line()) - 1;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let word = field(4);
        classes.push(PrimitiveClass {
            trace: parse(field(0), ln, "trace")?,
            length: parse(field(1), ln, "length")?,
            norm: parse(field(2), ln, "norm")?,
            multiplicity: parse(field(3), ln, "multiplicity")?,
            word: (!word.is_empty()).then(|| word.to_string()),
        });
    }
    Ok(LengthSpectrum::new(
        model,
        classes,
        parse(meta(&pairs, "norm_bound")?, 0, "norm_bound")?,
        parse(meta(&pairs, "certified_bound")?, 0, "certified_bound")?,
        parse(meta(&pairs, "complete")?, 0, "complete")?,
        options,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::modular_necklace_spectrum;

    #[test]
    fn roundtrip() {
        let spec = modular_necklace_spectrum(20);
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &spec).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# model=modular\n"));
        assert!(text.contains("\ntrace,length,norm,multiplicity,word\n"));
        let back = read_spectrum_csv(buf.as_slice()).unwrap();
        assert_eq!(back.classes, spec.classes);
        assert_eq!(back.norm_bound, spec.norm_bound);
        assert!(back.complete);
    }
}
