//! Run configuration files (TOML). A `[solver]` section holds the
//! iteration parameters shared by every solving subcommand; each subcommand
//! has its own section for model parameters and paths. Unknown keys are
//! rejected everywhere.
//!
//! ```toml
//! [solver]
//! max_iter = 5000
//! tol = 1e-8
//! trace = "trace.csv"
//!
//! [tv]
//! input = "noisy.pgm"
//! mu = 0.1
//! p = "inf"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{io_err, CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub tv: TvSection,
    #[serde(default)]
    pub dict: DictSection,
    #[serde(default)]
    pub bestapprox: ApproxSection,
    #[serde(default)]
    pub softapprox: ApproxSection,
    #[serde(default, rename = "potter-arun")]
    pub potter_arun: PotterArunSection,
    #[serde(default)]
    pub verify: VerifySection,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub suite: Option<String>,
    pub cases: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub tol_gap: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub trace: Option<PathBuf>,
}

/// `p` is a number (1 or 2) or the string `"inf"`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PValue {
    Num(f64),
    Text(String),
}

impl PValue {
    pub fn to_f64(&self) -> CliResult<f64> {
        match self {
            PValue::Num(v) => Ok(*v),
            PValue::Text(s) => parse_p(s).map_err(CliError::Usage),
        }
    }
}

pub fn parse_p(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t
            .parse()
            .map_err(|_| format!("p must be 1, 2 or inf, got {s:?}")),
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TvSection {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub mu: Option<f64>,
    pub p: Option<PValue>,
    pub clamp: Option<bool>,
    pub maxval: Option<u16>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DictSection {
    pub input: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub phi: Option<String>,
    pub delta: Option<f64>,
    pub set: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ApproxSection {
    pub z: Option<PathBuf>,
    pub l: Option<PathBuf>,
    pub r: Option<PathBuf>,
    pub c: Option<String>,
    pub d: Option<String>,
    pub phi: Option<String>,
    pub psi: Option<String>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PotterArunSection {
    pub s: Option<PathBuf>,
    pub rho: Option<PathBuf>,
    pub c: Option<String>,
    pub output: Option<PathBuf>,
}

pub fn parse_config(path: &Path, text: &str) -> CliResult<RunConfig> {
    toml::from_str(text).map_err(|e| CliError::Config {
        path: path.to_path_buf(),
        msg: e.message().to_string(),
    })
}

pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut cfg = parse_config(path, &text)?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new("")));
    Ok(cfg)
}

impl RunConfig {
    /// Relative paths in a config file are taken relative to the file.
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        fix(&mut self.solver.trace);
        for p in [&mut self.tv.input, &mut self.tv.output] {
            fix(p);
        }
        for p in [
            &mut self.dict.input,
            &mut self.dict.dictionary,
            &mut self.dict.output,
        ] {
            fix(p);
        }
        for s in [&mut self.bestapprox, &mut self.softapprox] {
            for p in [&mut s.z, &mut s.l, &mut s.r, &mut s.output] {
                fix(p);
            }
        }
        for p in [
            &mut self.potter_arun.s,
            &mut self.potter_arun.rho,
            &mut self.potter_arun.output,
        ] {
            fix(p);
        }
    }
}

/// Flag, then config value, then default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<RunConfig> {
        parse_config(Path::new("run.toml"), text)
    }

    #[test]
    fn sections_parse() {
        let c = parse("[solver]\nmax_iter = 7\ntol = 1e-3\n[tv]\nmu = 0.2\np = \"inf\"\n[potter-arun]\nc = \"orthant\"\n")
            .unwrap();
        assert_eq!(c.solver.max_iter, Some(7));
        assert_eq!(c.tv.p.unwrap().to_f64().unwrap(), f64::INFINITY);
        assert_eq!(c.potter_arun.c.as_deref(), Some("orthant"));
        let c = parse("[tv]\np = 1\n").unwrap();
        assert_eq!(c.tv.p.unwrap().to_f64().unwrap(), 1.0);
        assert_eq!(parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [
            "[solver]\nmax_iters = 3\n",
            "[tv]\nsigma = 1\n",
            "[extra]\n",
            "top = 1\n",
        ] {
            assert!(
                matches!(parse(text), Err(CliError::Config { .. })),
                "{text}"
            );
        }
        assert!(parse("[solver]\nmax_iter = \"many\"\n").is_err());
    }

    #[test]
    fn precedence_matrix() {
        for (flag, cfg, want) in [
            (None, None, 1),
            (None, Some(2), 2),
            (Some(3), None, 3),
            (Some(3), Some(2), 3),
        ] {
            assert_eq!(pick(flag, cfg, 1), want);
        }
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let mut c = parse("[tv]\ninput = \"a.pgm\"\noutput = \"/abs/b.pgm\"\n").unwrap();
        c.resolve_paths(Path::new("/cfg"));
        assert_eq!(c.tv.input.unwrap(), PathBuf::from("/cfg/a.pgm"));
        assert_eq!(c.tv.output.unwrap(), PathBuf::from("/abs/b.pgm"));
    }
}
