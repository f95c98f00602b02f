//! Line-oriented `key = value` configuration with `#` comments.

use crate::error::{Error, Result};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Example1,
    Example2,
    Custom,
}

impl Experiment {
    pub fn id(&self) -> u32 {
        match self {
            Experiment::Example1 => 1,
            Experiment::Example2 => 2,
            Experiment::Custom => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Example1 => "example1",
            Experiment::Example2 => "example2",
            Experiment::Custom => "custom",
        }
    }
}

/// Validated simulation parameters with per-experiment defaults applied.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub experiment: Experiment,
    /// spectral truncation of the solve
    pub n: usize,
    /// diagnostic cutoff N1 (default 3N/4)
    pub n1: usize,
    /// exact-solution top degree for the manufactured run (default N)
    pub n0: usize,
    pub nu: f64,
    pub omega: f64,
    pub t_end: f64,
    pub rtol: f64,
    pub atol: f64,
    pub seed: u64,
    /// scheduled output times (default: just t_end)
    pub output_times: Vec<f64>,
    pub output_dir: PathBuf,
    /// also write pointwise field dumps at output times
    pub dump_fields: bool,
    /// resume from a snapshot file
    pub restart: Option<PathBuf>,
}

/// FNV-1a over the raw config text; stamped into snapshot headers.
pub fn config_hash(text: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let mut experiment: Option<Experiment> = None;
    let mut n: Option<usize> = None;
    let mut n1: Option<usize> = None;
    let mut n0: Option<usize> = None;
    let mut nu: Option<f64> = None;
    let mut omega: Option<f64> = None;
    let mut t_end: Option<f64> = None;
    let mut rtol: Option<f64> = None;
    let mut atol: Option<f64> = None;
    let mut seed: Option<u64> = None;
    let mut output_times: Option<Vec<f64>> = None;
    let mut output_dir: Option<PathBuf> = None;
    let mut dump_fields: Option<bool> = None;
    let mut restart: Option<PathBuf> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stripped = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or(Error::Config {
            line,
            msg: format!("expected `key = value`, got `{stripped}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |msg: String| Error::Config { line, msg };
        match key {
            "experiment" => {
                experiment = Some(match value {
                    "example1" => Experiment::Example1,
                    "example2" => Experiment::Example2,
                    "custom" => Experiment::Custom,
                    other => {
                        return Err(bad(format!(
                            "unknown experiment `{other}` (example1 | example2 | custom)"
                        )))
                    }
                })
            }
            "N" => n = Some(parse_num(value, line, "N")?),
            "N1" => n1 = Some(parse_num(value, line, "N1")?),
            "N0" => n0 = Some(parse_num(value, line, "N0")?),
            "nu" => nu = Some(parse_num(value, line, "nu")?),
            "omega" => omega = Some(parse_num(value, line, "omega")?),
            "t_end" => t_end = Some(parse_num(value, line, "t_end")?),
            "rtol" => rtol = Some(parse_num(value, line, "rtol")?),
            "atol" => atol = Some(parse_num(value, line, "atol")?),
            "seed" => seed = Some(parse_num(value, line, "seed")?),
            "output_times" => {
                let mut times = Vec::new();
                for part in value.split(',') {
                    times.push(parse_num::<f64>(part.trim(), line, "output_times")?);
                }
                output_times = Some(times);
            }
            "output_dir" => output_dir = Some(PathBuf::from(value)),
            "dump_fields" => {
                dump_fields = Some(match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(bad(format!("dump_fields must be true/false, got `{other}`"))),
                })
            }
            "restart" => restart = Some(PathBuf::from(value)),
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }

    let experiment = experiment.ok_or_else(|| Error::ConfigGeneral("experiment required".into()))?;
    let n = n.ok_or_else(|| Error::ConfigGeneral("N required".into()))?;
    if n < 1 {
        return Err(Error::ConfigGeneral("N must be >= 1".into()));
    }
    let n1 = n1.unwrap_or_else(|| (3 * n / 4).max(1));
    if n1 < 1 || n1 > n {
        return Err(Error::ConfigGeneral(format!("N1 = {n1} outside 1..=N")));
    }
    let n0 = n0.unwrap_or(n);
    if experiment == Experiment::Example1 && n0 < 2 {
        return Err(Error::ConfigGeneral("N0 must be >= 2 for example1".into()));
    }
    let nu = nu.unwrap_or(match experiment {
        Experiment::Example1 => 1.0,
        _ => 1e-4,
    });
    if nu <= 0.0 {
        return Err(Error::ConfigGeneral("nu must be positive".into()));
    }
    let t_end = t_end.unwrap_or(2.0);
    if t_end <= 0.0 {
        return Err(Error::ConfigGeneral("t_end must be positive".into()));
    }
    let rtol = rtol.unwrap_or(match experiment {
        Experiment::Example1 => 1e-6,
        _ => 1e-3,
    });
    let atol = atol.unwrap_or(1e-10);
    if rtol <= 0.0 || atol <= 0.0 {
        return Err(Error::ConfigGeneral("tolerances must be positive".into()));
    }
    if experiment == Experiment::Custom && restart.is_none() {
        return Err(Error::ConfigGeneral(
            "custom experiment needs a restart snapshot".into(),
        ));
    }
    Ok(SimulationConfig {
        experiment,
        n,
        n1,
        n0,
        nu,
        omega: omega.unwrap_or(1.0),
        t_end,
        rtol,
        atol,
        seed: seed.unwrap_or(0),
        output_times: output_times.unwrap_or_else(|| vec![t_end]),
        output_dir: output_dir.unwrap_or_else(|| PathBuf::from("out")),
        dump_fields: dump_fields.unwrap_or(false),
        restart,
    })
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config {
        line,
        msg: format!("cannot parse `{value}` for {key}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example2_defaults() {
        let cfg = parse_config("experiment = example2\nN = 16").unwrap();
        assert_eq!(cfg.experiment, Experiment::Example2);
        assert_eq!(cfg.n, 16);
        assert_eq!(cfg.n1, 12);
        assert_eq!(cfg.nu, 1e-4);
        assert_eq!(cfg.omega, 1.0);
        assert_eq!(cfg.rtol, 1e-3);
        assert_eq!(cfg.output_times, vec![2.0]);
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let cfg = parse_config(
            "# benchmark\nexperiment = example1 # manufactured\n\nN = 8\nnu = 0.5\noutput_times = 0.5, 1.0",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::Example1);
        assert_eq!(cfg.nu, 0.5);
        assert_eq!(cfg.rtol, 1e-6);
        assert_eq!(cfg.output_times, vec![0.5, 1.0]);
    }

    #[test]
    fn range_violations_are_named() {
        assert!(matches!(
            parse_config("experiment = example2\nN = 0"),
            Err(Error::ConfigGeneral(msg)) if msg.contains("N")
        ));
        assert!(parse_config("experiment = example2\nN = 8\nN1 = 9").is_err());
        assert!(parse_config("experiment = example2\nN = 8\nrtol = -1.0").is_err());
    }

    #[test]
    fn empty_file_requires_experiment() {
        assert!(matches!(
            parse_config(""),
            Err(Error::ConfigGeneral(msg)) if msg.contains("experiment")
        ));
    }

    #[test]
    fn unknown_keys_are_errors_with_line_numbers() {
        let err = parse_config("experiment = example2\nN = 8\nbogus = 3").unwrap_err();
        match err {
            Error::Config { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("bogus"));
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn hash_is_stable() {
        let h1 = config_hash("experiment = example2\nN = 16");
        let h2 = config_hash("experiment = example2\nN = 16");
        let h3 = config_hash("experiment = example2\nN = 17");
        assert_eq!(h1, h2);
        assert_ne!(h1, h3);
    }
}
