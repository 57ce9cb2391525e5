//! Reading and writing symbol sequences as text.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::combinatorics::Symbol;
use crate::error::{Error, Result};

/// How text is split into symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    /// `Chars` when the text is a single whitespace-free word, else `Tokens`.
    #[default]
    Auto,
    /// Whitespace-separated tokens.
    Tokens,
    /// Unicode characters, whitespace skipped.
    Chars,
    /// Raw bytes.
    Bytes,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "tokens" => Ok(Self::Tokens),
            "chars" => Ok(Self::Chars),
            "bytes" => Ok(Self::Bytes),
            _ => Err(Error::InvalidArgument(format!(
                "unknown input format {s:?}"
            ))),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Tokens => "tokens",
            Self::Chars => "chars",
            Self::Bytes => "bytes",
        })
    }
}

/// A sequence together with the token each symbol stands for.
///
/// Symbols are numbered in sorted token order: numerically when every token
/// is an integer, lexicographically otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub symbols: Vec<Symbol>,
    pub vocabulary: Vec<String>,
}

impl Encoded {
    pub fn token(&self, s: Symbol) -> Result<&str> {
        self.vocabulary
            .get(s as usize)
            .map(String::as_str)
            .ok_or(Error::UnknownSymbol(s))
    }
}

pub fn encode_bytes(data: &[u8], format: InputFormat) -> Encoded {
    match format {
        InputFormat::Bytes => {
            let tokens: Vec<String> = data.iter().map(u8::to_string).collect();
            build(tokens)
        }
        _ => encode_text(&String::from_utf8_lossy(data), format),
    }
}

pub fn encode_text(text: &str, format: InputFormat) -> Encoded {
    let format = match format {
        InputFormat::Auto if text.split_whitespace().nth(1).is_none() => InputFormat::Chars,
        InputFormat::Auto => InputFormat::Tokens,
        other => other,
    };
    let tokens: Vec<String> = match format {
        InputFormat::Chars => text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect(),
        InputFormat::Bytes => text.bytes().map(|b| b.to_string()).collect(),
        _ => text.split_whitespace().map(str::to_owned).collect(),
    };
    build(tokens)
}

fn build(tokens: Vec<String>) -> Encoded {
    let numeric: Option<Vec<i64>> = tokens.iter().map(|t| t.parse().ok()).collect();
    let mut order: Vec<&String> = tokens.iter().collect();
    match &numeric {
        Some(values) => {
            let mut pairs: Vec<(i64, &String)> =
                values.iter().copied().zip(tokens.iter()).collect();
            pairs.sort();
            pairs.dedup_by(|a, b| a.1 == b.1);
            order = pairs.into_iter().map(|(_, t)| t).collect();
        }
        None => {
            order.sort();
            order.dedup();
        }
    }
    let index: BTreeMap<&String, Symbol> = order
        .iter()
        .enumerate()
        .map(|(i, &t)| (t, i as Symbol))
        .collect();
    Encoded {
        symbols: tokens.iter().map(|t| index[t]).collect(),
        vocabulary: order.into_iter().cloned().collect(),
    }
}

/// Space-separated symbol ids, newline-terminated.
pub fn format_symbols(symbols: &[Symbol]) -> String {
    let mut out = symbols
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_word_reads_as_characters() {
        let e = encode_text("committee\n", InputFormat::Auto);
        assert_eq!(e.symbols.len(), 9);
        assert_eq!(e.vocabulary, vec!["c", "e", "i", "m", "o", "t"]);
        assert_eq!(e.token(e.symbols[0]).unwrap(), "c");
    }

    #[test]
    fn numeric_tokens_keep_numeric_order() {
        let e = encode_text("10 2 2 7\n10", InputFormat::Auto);
        assert_eq!(e.vocabulary, vec!["2", "7", "10"]);
        assert_eq!(e.symbols, vec![2, 0, 0, 1, 2]);
        let text = format_symbols(&e.symbols);
        assert_eq!(text, "2 0 0 1 2\n");
    }

    #[test]
    fn explicit_formats() {
        assert_eq!(
            encode_text("ab ba", InputFormat::Chars).symbols,
            vec![0, 1, 1, 0]
        );
        assert_eq!(
            encode_text("ab ba", InputFormat::Tokens).symbols,
            vec![0, 1]
        );
        let e = encode_bytes(b"aba", InputFormat::Bytes);
        assert_eq!(e.vocabulary, vec!["97", "98"]);
        assert!(encode_text("", InputFormat::Auto).symbols.is_empty());
        assert!("words".parse::<InputFormat>().is_err());
    }
}
