use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Settings read from a `key = value` file. Unset keys stay `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub gmax: Option<usize>,
    /// Target dimension of the field, carried through but not integrated.
    pub dimension: Option<usize>,
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
    pub workers: Option<usize>,
    /// `lambda1 = 1.0`, `lambda2 = 0.5`, ...
    pub weights: BTreeMap<usize, f64>,
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidConfig(format!("line {line}: bad value {v:?} for {key}")))
}

impl FileConfig {
    /// Blank lines and `#` comments are skipped; keys are case-sensitive
    /// except for the aliases `G`/`gmax` and `n`/`n_samples`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {line}: expected key = value")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "alpha" => c.alpha = Some(parse_value(line, k, v)?),
                "G" | "gmax" => c.gmax = Some(parse_value(line, k, v)?),
                "N" => c.dimension = Some(parse_value(line, k, v)?),
                "seed" => c.seed = Some(parse_value(line, k, v)?),
                "n" | "n_samples" => c.n_samples = Some(parse_value(line, k, v)?),
                "workers" => c.workers = Some(parse_value(line, k, v)?),
                _ => match k.strip_prefix("lambda").map(str::parse::<usize>) {
                    Some(Ok(g)) => {
                        let w: f64 = parse_value(line, k, v)?;
                        if !(w.is_finite() && w > 0.0) {
                            return Err(Error::InvalidConfig(format!(
                                "line {line}: weight {k} = {w} is not positive"
                            )));
                        }
                        c.weights.insert(g, w);
                    }
                    _ => return Err(Error::InvalidConfig(format!("line {line}: unknown key {k:?}"))),
                },
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_aliases() {
        let c =
            FileConfig::parse("# run\nalpha = 1.5\nG=2\nN = 26\nseed = 7 # fixed\nn = 1000\nlambda1 = 1\n").unwrap();
        assert_eq!(c.alpha, Some(1.5));
        assert_eq!(c.gmax, Some(2));
        assert_eq!(c.dimension, Some(26));
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.n_samples, Some(1000));
        assert_eq!(c.weights, BTreeMap::from([(1, 1.0)]));
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "alpha",
            "beta = 1",
            "seed = -3",
            "lambda2 = 0",
            "lambda1 = -1.0",
            "n = x",
        ] {
            assert_eq!(FileConfig::parse(bad).unwrap_err().kind(), "InvalidConfig", "{bad}");
        }
    }
}
