//! Resolved run configuration: command-line flags over a `key = value` file over defaults.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::str::FromStr;

use diracwell::emission::Occupation;
use serde::{Deserialize, Serialize};

use crate::Flags;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub m: f64,
    pub a: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub points: usize,
    pub eps_max: f64,
    pub e_lo: f64,
    pub e_hi: f64,
    pub n: u32,
    pub draws: usize,
    pub seed: u64,
    pub tol: f64,
    pub band: f64,
    #[serde(rename = "L")]
    pub half_length: f64,
    pub occupation: Occupation,
    pub lambdas: Vec<f64>,
    pub criteria: Vec<u32>,
    pub format: Format,
    pub output: Option<String>,
    pub gnuplot: bool,
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

const KEYS: &[&str] = &[
    "m", "a", "V", "v_min", "v_max", "points", "eps_max", "e_lo", "e_hi", "n", "draws", "seed", "tol", "band", "L",
    "occupation", "lambdas", "criteria", "format", "output", "gnuplot",
];

struct Layer<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Layer<'_> {
    fn get<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            Some(s) => s.parse().map_err(|_| format!("config key {key}: cannot parse {s:?}")),
            None => Ok(default),
        }
    }

    fn list<T: FromStr>(&self, key: &str, flag: Option<&str>, default: Vec<T>) -> Result<Vec<T>, String> {
        let Some(s) = flag.or(self.file.get(key).map(String::as_str)) else {
            return Ok(default);
        };
        s.split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| x.trim().parse().map_err(|_| format!("{key}: cannot parse {x:?}")))
            .collect()
    }
}

fn default_lambdas() -> Vec<f64> {
    vec![0.3, 1.0, 2.0, FRAC_PI_4, 3.0 * FRAC_PI_4, FRAC_PI_2 - 0.01, FRAC_PI_2 + 0.01, 1.5 * PI]
}

impl RunConfig {
    pub fn resolve(subcommand: &str, flags: &Flags, file: &BTreeMap<String, String>) -> Result<Self, String> {
        if let Some(bad) = file.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(format!("unknown config key {bad:?}"));
        }
        let l = Layer { file };
        let occupation = match l.get("occupation", flags.occupation.clone(), "vacant".to_string())?.as_str() {
            "vacant" => Occupation::Vacant,
            "filled" => Occupation::Filled,
            other => return Err(format!("occupation must be vacant or filled, got {other:?}")),
        };
        let default_format = if matches!(subcommand, "critical" | "delay" | "verify") { "json" } else { "csv" };
        let format = match l.get("format", flags.format.clone(), default_format.to_string())?.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(format!("format must be csv or json, got {other:?}")),
        };
        let cfg = RunConfig {
            subcommand: subcommand.to_string(),
            m: l.get("m", flags.m, 1.0)?,
            a: l.get("a", flags.a, 0.7)?,
            v: l.get("V", flags.v, 0.0)?,
            v_min: l.get("v_min", flags.v_min, 0.0)?,
            v_max: l.get("v_max", flags.v_max, 6.0)?,
            points: l.get("points", flags.points, 200)?,
            eps_max: l.get("eps_max", flags.eps_max, 10.0)?,
            e_lo: l.get("e_lo", flags.e_lo, -20.0)?,
            e_hi: l.get("e_hi", flags.e_hi, 20.0)?,
            n: l.get("n", flags.n, 1)?,
            draws: l.get("draws", flags.draws, 200)?,
            seed: l.get("seed", flags.seed, 20_241)?,
            tol: l.get("tol", flags.tol, 1e-6)?,
            band: l.get("band", flags.band, 0.01)?,
            half_length: l.get("L", flags.half_length, 400.0)?,
            occupation,
            lambdas: l.list("lambdas", flags.lambdas.as_deref(), default_lambdas())?,
            criteria: l.list("criteria", flags.criteria.as_deref(), (1..=11).collect())?,
            format,
            output: flags.output.clone().or_else(|| file.get("output").cloned()),
            gnuplot: flags.gnuplot || l.get("gnuplot", None, false)?,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), String> {
        let finite = [self.m, self.a, self.v, self.v_min, self.v_max, self.eps_max, self.e_lo, self.e_hi, self.tol, self.band];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err("numeric parameters must be finite".into());
        }
        if self.m <= 0.0 || self.a <= 0.0 || self.v < 0.0 {
            return Err("need m > 0, a > 0 and V >= 0".into());
        }
        if self.v_min < 0.0 || self.v_max < self.v_min {
            return Err("need 0 <= v_min <= v_max".into());
        }
        if self.points < 2 {
            return Err("points must be at least 2".into());
        }
        if self.eps_max <= self.m {
            return Err("eps_max must exceed m".into());
        }
        if self.e_hi <= self.e_lo {
            return Err("e_hi must exceed e_lo".into());
        }
        if self.n == 0 {
            return Err("resonance index n starts at 1".into());
        }
        if !(self.band >= 0.0 && self.band < 1.0) {
            return Err("band must lie in [0, 1)".into());
        }
        if self.half_length <= self.a {
            return Err("L must exceed a".into());
        }
        if self.tol <= 0.0 {
            return Err("tol must be positive".into());
        }
        if self.lambdas.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err("lambdas must be non-negative".into());
        }
        if self.criteria.iter().any(|&c| !(1..=11).contains(&c)) {
            return Err("criteria are numbered 1 to 11".into());
        }
        if self.gnuplot && self.output.is_none() {
            return Err("--gnuplot needs --output".into());
        }
        Ok(())
    }

    /// `(key, value)` pairs for output headers.
    pub fn header(&self) -> Vec<(String, String)> {
        let v = serde_json::to_value(self).expect("config serializes");
        v.as_object()
            .expect("config is an object")
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let f = parse_file("# well\nm = 1\n\na=0.5 # half width\n").unwrap();
        assert_eq!(f["m"], "1");
        assert_eq!(f["a"], "0.5");
        assert!(parse_file("nonsense").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_file("a = 0.5\nV = 2").unwrap();
        let flags = Flags { a: Some(0.9), ..Flags::default() };
        let c = RunConfig::resolve("phase", &flags, &file).unwrap();
        assert_eq!((c.a, c.v), (0.9, 2.0));
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn rejects_bad_values() {
        let file = parse_file("a = -1").unwrap();
        assert!(RunConfig::resolve("phase", &Flags::default(), &file).is_err());
        let file = parse_file("colour = red").unwrap();
        assert!(RunConfig::resolve("phase", &Flags::default(), &file).is_err());
    }
}
