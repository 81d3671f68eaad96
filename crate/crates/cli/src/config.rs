//! `--config` files: `{command, params, output_path, format}` where `params`
//! uses the flag names of the subcommand. Flags given on the command line
//! win over the file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    PairGen,
    Tunnel,
    Range,
    Verify,
    Hermite,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::PairGen => "pair-gen",
            CommandName::Tunnel => "tunnel",
            CommandName::Range => "range",
            CommandName::Verify => "verify",
            CommandName::Hermite => "hermite",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(default)]
    pub params: Map<String, Value>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Subcommand arguments that can be layered under command-line flags.
pub trait Layered: Sized + for<'de> Deserialize<'de> {
    /// Fills every field left unset on the command line from `base`.
    fn overlay(self, base: Self) -> Self;
    fn output_slot(&mut self) -> (&mut Option<PathBuf>, &mut Option<Format>);

    fn from_config(cfg: RunConfig, cli: Option<Self>) -> Result<Self, CliError> {
        let mut base: Self = serde_json::from_value(Value::Object(cfg.params)).map_err(|e| {
            CliError::usage(format!("config params for {}: {e}", cfg.command.as_str()))
        })?;
        let (out, fmt) = base.output_slot();
        if out.is_none() {
            *out = cfg.output_path;
        }
        if fmt.is_none() {
            *fmt = cfg.format;
        }
        Ok(match cli {
            Some(c) => c.overlay(base),
            None => base,
        })
    }
}

/// Implements [`Layered`] for a struct of `Option` fields plus boolean
/// switches, which combine by `or`.
#[macro_export]
macro_rules! layered {
    ($ty:ty; options: [$($opt:ident),* $(,)?]; switches: [$($sw:ident),* $(,)?]) => {
        impl $crate::config::Layered for $ty {
            fn overlay(mut self, base: Self) -> Self {
                $( if self.$opt.is_none() { self.$opt = base.$opt; } )*
                $( self.$sw |= base.$sw; )*
                self
            }
            fn output_slot(
                &mut self,
            ) -> (&mut Option<std::path::PathBuf>, &mut Option<$crate::config::Format>) {
                (&mut self.output, &mut self.format)
            }
        }
    };
}

/// Output path, defaulting to `<stem>.<format extension>`.
pub fn output_path(output: &Option<PathBuf>, format: Format, stem: &str) -> PathBuf {
    output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", format.extension())))
}
