use std::path::Path;

use annulus_div::{AnnulusDomain, Resolution, SourceSpec, VerifyConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Where and how densely `solve` writes field samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// CSV file name inside the output directory.
    pub csv: String,
    /// Report file name inside the output directory.
    pub report: String,
    /// Radii sampled between `r1` and `r2` inclusive.
    pub sample_radii: usize,
    pub sample_directions: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: "field.csv".into(), report: "report.json".into(), sample_radii: 5, sample_directions: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub source: SourceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Resolution>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let domain = self.domain()?;
        self.source.build(&domain)?;
        self.resolution().validate()?;
        self.verify.validate()?;
        let out = &self.output;
        if out.sample_radii < 2 || out.sample_directions == 0 {
            return Err(CliError::Config("output needs at least 2 radii and 1 direction".into()));
        }
        for name in [&out.csv, &out.report] {
            if name.is_empty() || Path::new(name).components().count() != 1 {
                return Err(CliError::Config(format!("output name {name:?} must be a plain file name")));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<AnnulusDomain, CliError> {
        Ok(AnnulusDomain::new(self.n, self.r1, self.r2)?)
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution.unwrap_or_else(|| Resolution::default_for(self.n))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
