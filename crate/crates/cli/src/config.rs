//! Run configuration: command-line flags, an optional `key = value` file,
//! and built-in defaults, resolved in that order of precedence.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use leocov::{
    dbm_to_watts, deg, ConstellationConfig, EarthModel, GainNormalization, GeneratorKind, LinkBudget, MonteCarloSpec,
    NMode, ScenarioF64, UserLocation,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NModeSetting {
    Actual,
    Effective,
    Explicit(f64),
}

impl FromStr for NModeSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "actual" => Ok(Self::Actual),
            "effective" => Ok(Self::Effective),
            other => match other.strip_prefix("explicit:") {
                Some(v) => v
                    .trim()
                    .parse()
                    .map(Self::Explicit)
                    .map_err(|_| format!("bad explicit count `{v}`")),
                None => Err(format!("expected actual, effective or explicit:<real>, got `{other}`")),
            },
        }
    }
}

impl fmt::Display for NModeSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Actual => f.write_str("actual"),
            Self::Effective => f.write_str("effective"),
            Self::Explicit(n) => write!(f, "explicit:{n}"),
        }
    }
}

impl From<NModeSetting> for NMode<f64> {
    fn from(m: NModeSetting) -> Self {
        match m {
            NModeSetting::Actual => NMode::Actual,
            NModeSetting::Effective => NMode::Effective,
            NModeSetting::Explicit(n) => NMode::Explicit(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSetting(pub GeneratorKind);

impl FromStr for GeneratorSetting {
    type Err = String;

    /// `uniform_shell`, `random_inclined` or `walker:<planes>/<sats_per_plane>/<phasing>`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "uniform_shell" => Ok(Self(GeneratorKind::UniformShell)),
            "random_inclined" => Ok(Self(GeneratorKind::RandomInclined)),
            other => {
                let spec = other
                    .strip_prefix("walker:")
                    .ok_or_else(|| format!("unknown generator `{other}`"))?;
                let parts: Vec<usize> = spec
                    .split('/')
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| format!("bad walker pattern `{spec}`"))?;
                match parts[..] {
                    [planes, sats_per_plane, phasing] => Ok(Self(GeneratorKind::WalkerDelta {
                        planes,
                        sats_per_plane,
                        phasing,
                    })),
                    _ => Err(format!(
                        "walker pattern needs planes/sats_per_plane/phasing, got `{spec}`"
                    )),
                }
            }
        }
    }
}

impl fmt::Display for GeneratorSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            GeneratorKind::UniformShell => f.write_str("uniform_shell"),
            GeneratorKind::RandomInclined => f.write_str("random_inclined"),
            GeneratorKind::WalkerDelta {
                planes,
                sats_per_plane,
                phasing,
            } => write!(f, "walker:{planes}/{sats_per_plane}/{phasing}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizationSetting(pub GainNormalization);

impl FromStr for NormalizationSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "unit_mean" => Ok(Self(GainNormalization::UnitMean)),
            "raw" => Ok(Self(GainNormalization::Raw)),
            other => Err(format!("expected unit_mean or raw, got `{other}`")),
        }
    }
}

impl fmt::Display for NormalizationSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            GainNormalization::UnitMean => "unit_mean",
            GainNormalization::Raw => "raw",
        })
    }
}

/// Scenario and Monte Carlo flags shared by every command.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// `key = value` file supplying defaults; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration to stderr.
    #[arg(long, global = true)]
    pub show_config: bool,

    #[arg(long, global = true)]
    pub n_act: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub altitude_km: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub inclination_deg: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub min_elevation_deg: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub user_lat_deg: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tx_power_w: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub noise_dbm: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rician_k: Option<f64>,
    /// actual, effective or explicit:<real>.
    #[arg(long, global = true)]
    pub n_mode: Option<NModeSetting>,
    /// unit_mean (default) or raw.
    #[arg(long, global = true)]
    pub gain_normalization: Option<NormalizationSetting>,
    /// uniform_shell, random_inclined (default) or walker:<P>/<S>/<F>.
    #[arg(long, global = true)]
    pub generator: Option<GeneratorSetting>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output CSV path; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Fully resolved configuration in CLI units (km, degrees, dBm).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_act: usize,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    pub min_elevation_deg: f64,
    pub user_lat_deg: f64,
    pub tx_power_w: f64,
    pub noise_dbm: f64,
    pub alpha: f64,
    pub rician_k: f64,
    pub n_mode: NModeSetting,
    pub gain_normalization: NormalizationSetting,
    pub generator: GeneratorSetting,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_act: 648,
            altitude_km: 500.0,
            inclination_deg: 70.0,
            min_elevation_deg: 10.0,
            user_lat_deg: 0.0,
            tx_power_w: 10.0,
            noise_dbm: -93.0,
            alpha: 2.0,
            rician_k: 100.0,
            n_mode: NModeSetting::Effective,
            gain_normalization: NormalizationSetting(GainNormalization::UnitMean),
            generator: GeneratorSetting(GeneratorKind::RandomInclined),
            trials: 100_000,
            seed: 1,
            workers: 8,
            out: None,
        }
    }
}

fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

/// Flag value if given, else the file value, else the default.
fn pick<T: FromStr>(flag: Option<T>, file: &mut BTreeMap<String, String>, key: &str, default: T) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    let from_file = file.remove(key);
    if let Some(v) = flag {
        return Ok(v);
    }
    match from_file {
        Some(s) => s
            .parse()
            .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))),
        None => Ok(default),
    }
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let mut file = match &args.config {
            Some(p) => parse_file(p)?,
            None => BTreeMap::new(),
        };
        let d = RunConfig::default();
        let a = args.clone();
        let f = &mut file;
        let cfg = RunConfig {
            n_act: pick(a.n_act, f, "n_act", d.n_act)?,
            altitude_km: pick(a.altitude_km, f, "altitude_km", d.altitude_km)?,
            inclination_deg: pick(a.inclination_deg, f, "inclination_deg", d.inclination_deg)?,
            min_elevation_deg: pick(a.min_elevation_deg, f, "min_elevation_deg", d.min_elevation_deg)?,
            user_lat_deg: pick(a.user_lat_deg, f, "user_lat_deg", d.user_lat_deg)?,
            tx_power_w: pick(a.tx_power_w, f, "tx_power_w", d.tx_power_w)?,
            noise_dbm: pick(a.noise_dbm, f, "noise_dbm", d.noise_dbm)?,
            alpha: pick(a.alpha, f, "alpha", d.alpha)?,
            rician_k: pick(a.rician_k, f, "rician_k", d.rician_k)?,
            n_mode: pick(a.n_mode, f, "n_mode", d.n_mode)?,
            gain_normalization: pick(a.gain_normalization, f, "gain_normalization", d.gain_normalization)?,
            generator: pick(a.generator, f, "generator", d.generator)?,
            trials: pick(a.trials, f, "trials", d.trials)?,
            seed: pick(a.seed, f, "seed", d.seed)?,
            workers: pick(a.workers, f, "workers", d.workers)?,
            out: match a.out {
                Some(p) => Some(p),
                None => f.remove("out").map(PathBuf::from),
            },
        };
        if let Some(k) = file.keys().next() {
            return Err(CliError::Usage(format!("unknown config key `{k}`")));
        }
        if cfg.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if cfg.workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        // Fail fast on domain errors before any computation.
        cfg.scenario()?;
        Ok(cfg)
    }

    /// `key = value` lines in the config-file format.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        put("n_act", self.n_act.to_string());
        put("altitude_km", self.altitude_km.to_string());
        put("inclination_deg", self.inclination_deg.to_string());
        put("min_elevation_deg", self.min_elevation_deg.to_string());
        put("user_lat_deg", self.user_lat_deg.to_string());
        put("tx_power_w", self.tx_power_w.to_string());
        put("noise_dbm", self.noise_dbm.to_string());
        put("alpha", self.alpha.to_string());
        put("rician_k", self.rician_k.to_string());
        put("n_mode", self.n_mode.to_string());
        put("gain_normalization", self.gain_normalization.to_string());
        put("generator", self.generator.to_string());
        put("trials", self.trials.to_string());
        put("seed", self.seed.to_string());
        put("workers", self.workers.to_string());
        if let Some(p) = &self.out {
            put("out", p.display().to_string());
        }
        s
    }

    pub fn constellation(&self) -> Result<ConstellationConfig<f64>, leocov::Error> {
        ConstellationConfig::new(
            self.n_act,
            self.altitude_km * 1e3,
            deg(self.inclination_deg),
            deg(self.min_elevation_deg),
        )
    }

    pub fn link(&self) -> Result<LinkBudget<f64>, leocov::Error> {
        let lb = LinkBudget {
            tx_power_w: self.tx_power_w,
            noise_power_w: dbm_to_watts(self.noise_dbm),
            path_loss_exponent: self.alpha,
            rician_k: self.rician_k,
            normalization: self.gain_normalization.0,
        };
        lb.validate()?;
        Ok(lb)
    }

    /// Scenario in internal units with the configured count mode.
    pub fn scenario(&self) -> Result<ScenarioF64, leocov::Error> {
        let s = ScenarioF64 {
            cfg: self.constellation()?,
            earth: EarthModel::default(),
            link: self.link()?,
            user: UserLocation::new(deg(self.user_lat_deg))?,
            n_mode: self.n_mode.into(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn monte_carlo(&self) -> MonteCarloSpec {
        MonteCarloSpec {
            trials: self.trials,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_settings() {
        assert_eq!(
            "explicit:81.3".parse::<NModeSetting>().unwrap(),
            NModeSetting::Explicit(81.3)
        );
        assert!("explicit:x".parse::<NModeSetting>().is_err());
        assert_eq!(
            "walker:12/54/1".parse::<GeneratorSetting>().unwrap().0,
            GeneratorKind::WalkerDelta {
                planes: 12,
                sats_per_plane: 54,
                phasing: 1
            }
        );
        assert!("walker:12/54".parse::<GeneratorSetting>().is_err());
    }

    #[test]
    fn defaults_and_text_round_trip() {
        let cfg = RunConfig::resolve(&CommonArgs::default()).unwrap();
        assert_eq!(cfg, RunConfig::default());
        let path = std::env::temp_dir().join(format!("leocov-cfg-{}.conf", std::process::id()));
        let mut changed = cfg.clone();
        changed.altitude_km = 1234.5;
        changed.n_mode = NModeSetting::Explicit(81.3);
        changed.generator = GeneratorSetting(GeneratorKind::UniformShell);
        std::fs::write(&path, changed.to_config_text()).unwrap();
        let args = CommonArgs {
            config: Some(path.clone()),
            n_act: Some(120),
            ..CommonArgs::default()
        };
        let back = RunConfig::resolve(&args).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(back, RunConfig { n_act: 120, ..changed });
    }

    #[test]
    fn unknown_key_is_usage_error() {
        let path = std::env::temp_dir().join(format!("leocov-bad-{}.conf", std::process::id()));
        std::fs::write(&path, "altitude = 3\n").unwrap();
        let r = RunConfig::resolve(&CommonArgs {
            config: Some(path.clone()),
            ..CommonArgs::default()
        });
        std::fs::remove_file(&path).ok();
        assert!(matches!(r, Err(CliError::Usage(_))));
    }
}
