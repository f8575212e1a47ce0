//! Codebook files: a header line `n M |X|`, then `M` lines of `n`
//! space-separated symbol indices. Blank lines and `#` comments are skipped.

use zerorate_core::codebook::Codebook;

use crate::error::{CliError, Result};

fn numbers(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| CliError::Document(format!("line {lineno}: `{t}` is not a symbol index")))
        })
        .collect()
}

pub fn parse_codebook(text: &str) -> Result<Codebook> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| CliError::Document("empty codebook file".into()))?;
    let header = numbers(header, hline)?;
    let [n, m, k] = header[..] else {
        return Err(CliError::Document(format!("line {hline}: header must be `n M |X|`")));
    };
    let mut words = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let word = numbers(line, lineno)?;
        if word.len() != n {
            return Err(CliError::Document(format!(
                "line {lineno}: expected {n} symbols, found {}",
                word.len()
            )));
        }
        words.push(word);
    }
    if words.len() != m {
        return Err(CliError::Document(format!(
            "header announces {m} codewords, found {}",
            words.len()
        )));
    }
    Ok(Codebook::new(k, words)?)
}

pub fn format_codebook(code: &Codebook) -> String {
    let mut out = format!("{} {} {}\n", code.blocklength(), code.len(), code.num_inputs());
    for w in code.words() {
        let line: Vec<String> = w.iter().map(|s| s.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
