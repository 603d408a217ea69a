//! Key=value configuration files and flag/file resolution.
//!
//! A config file holds one `key=value` pair per line; lines may carry the
//! `# ` prefix used by CSV report headers, so a previously written report
//! works directly as a config file. Unknown keys are ignored, which lets
//! result-bearing headers (`theta_hat=…`) ride along harmlessly. Flags
//! always win over file values.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use perc3::Site;

/// Failure modes mapped to the process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad or missing parameter values — exit code 2.
    Validation(String),
    /// Filesystem trouble — exit code 4.
    Io(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

#[derive(Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(ConfigFile::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = HashMap::new();
        for line in text.lines() {
            let line = line.strip_prefix("# ").unwrap_or(line).trim();
            if line.is_empty() {
                continue;
            }
            // Past the headers, a report file contains data rows; accept and
            // skip anything that is not a key=value pair.
            if let Some((key, value)) = line.split_once('=') {
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(ConfigFile { values })
    }

    /// First value found under any of the given key aliases.
    fn raw(&self, keys: &[&str]) -> Option<&str> {
        keys.iter().find_map(|k| self.values.get(*k)).map(String::as_str)
    }

    /// Flag value if present, else the parsed config value, else `None`.
    pub fn resolve<T>(&self, flag: Option<T>, keys: &[&str]) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(keys) {
            None => Ok(None),
            Some(text) => text.parse::<T>().map(Some).map_err(|e| {
                CliError::Validation(format!("config value {}={text:?}: {e}", keys[0]))
            }),
        }
    }
}

pub fn need<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("missing required parameter --{flag}")))
}

pub fn check_probability(p: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(CliError::Validation(format!("p must lie in [0,1], got {p}")))
    }
}

pub fn check_half_side(n: i32) -> Result<i32, CliError> {
    if n >= 1 {
        Ok(n)
    } else {
        Err(CliError::Validation(format!("n must be at least 1, got {n}")))
    }
}

/// `"a,b,c"` → a site; used for flag values and config entries alike.
#[derive(Clone, Copy, Debug)]
pub struct SiteArg(pub Site);

impl FromStr for SiteArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("expected x,y,z, got {s:?}"));
        }
        let mut c = [0i32; 3];
        for (slot, part) in c.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse::<i32>()
                .map_err(|e| format!("bad coordinate {part:?}: {e}"))?;
        }
        Ok(SiteArg(Site::new(c[0], c[1], c[2])))
    }
}

impl Display for SiteArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.0.x, self.0.y, self.0.z)
    }
}

/// `"16,32,64"` → integers; used for radii and size lists.
#[derive(Clone, Debug)]
pub struct IntListArg(pub Vec<i32>);

impl FromStr for IntListArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let items: Result<Vec<i32>, _> = s
            .split(',')
            .map(|part| part.trim().parse::<i32>().map_err(|e| format!("{part:?}: {e}")))
            .collect();
        Ok(IntListArg(items?))
    }
}
