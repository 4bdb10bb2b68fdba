//! Coefficient lists in descending powers: `1 0 -1` is `z² - 1`, and a token
//! `re,im` is a complex coefficient. `#` starts a comment to end of line.

use polyroots::{Complex64, Poly};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("no coefficients given")]
    Empty,
    #[error("bad coefficient {0:?}")]
    BadToken(String),
}

fn number(s: &str, token: &str) -> Result<f64, ParseError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ParseError::BadToken(token.to_string()))
}

fn coefficient(token: &str) -> Result<Complex64, ParseError> {
    match token.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(number(re, token)?, number(im, token)?)),
        None => Ok(Complex64::new(number(token, token)?, 0.0)),
    }
}

pub fn parse_poly(text: &str) -> Result<Poly, ParseError> {
    let mut descending = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            descending.push(coefficient(token)?);
        }
    }
    if descending.is_empty() {
        return Err(ParseError::Empty);
    }
    descending.reverse();
    Ok(Poly::new(descending))
}
