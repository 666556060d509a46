use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::LtlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<")]
    Lt,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Gt => ">",
            Comparator::Lt => "<",
        })
    }
}

/// Comparison-form atomic proposition `signal > threshold` or `signal < threshold`.
///
/// `name` is the quoted text exactly as written, which is also its identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicProp {
    pub name: String,
    pub signal: String,
    pub comparator: Comparator,
    pub threshold: f64,
}

impl AtomicProp {
    /// Parse the contents of a quoted AP, e.g. `torso_height>-11.0`.
    pub fn parse(text: &str) -> Result<Self, LtlError> {
        let bad = |reason: &str| LtlError::MalformedAp {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let at = text
            .find(['>', '<'])
            .ok_or_else(|| bad("missing comparator '>' or '<'"))?;
        let signal = text[..at].trim();
        let comparator = if text.as_bytes()[at] == b'>' {
            Comparator::Gt
        } else {
            Comparator::Lt
        };
        let number = text[at + 1..].trim();
        let mut chars = signal.chars();
        let ident_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ident_ok {
            return Err(bad("signal is not an identifier"));
        }
        if number.contains(['>', '<']) {
            return Err(bad("more than one comparator"));
        }
        let threshold: f64 = number
            .parse()
            .map_err(|_| bad("threshold is not a decimal number"))?;
        if !threshold.is_finite() {
            return Err(bad("threshold must be finite"));
        }
        Ok(Self {
            name: text.to_string(),
            signal: signal.to_string(),
            comparator,
            threshold,
        })
    }

    /// Signed margin `g`: positive exactly when the proposition holds.
    pub fn margin<R: Real>(&self, signal_value: R) -> R {
        match self.comparator {
            Comparator::Gt => signal_value - R::cst(self.threshold),
            Comparator::Lt => R::cst(self.threshold) - signal_value,
        }
    }

    pub fn holds(&self, signal_value: f64) -> bool {
        self.margin(signal_value) > 0.0
    }
}

impl fmt::Display for AtomicProp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_negative_threshold() {
        let ap = AtomicProp::parse("torso_height>-11.0").unwrap();
        assert_eq!(ap.signal, "torso_height");
        assert_eq!(ap.comparator, Comparator::Gt);
        assert_eq!(ap.threshold, -11.0);
        assert_eq!(ap.margin(-10.0), 1.0);
    }

    #[test]
    fn less_than_margin_flips_sign() {
        let ap = AtomicProp::parse("x<20").unwrap();
        assert_eq!(ap.margin(15.0), 5.0);
        assert!(ap.holds(19.9));
        assert!(!ap.holds(20.0));
    }

    #[test]
    fn rejects_malformed() {
        for text in ["x", "1x>0", "x>abc", "x>0<1", ">3", "x>inf"] {
            assert!(AtomicProp::parse(text).is_err(), "{text}");
        }
    }
}
