//! Settings read from the environment.

use std::net::SocketAddr;
use std::path::PathBuf;

use thiserror::Error;

pub const DATA_DIR_VAR: &str = "MICROAR_DATA_DIR";
pub const BIND_VAR: &str = "MICROAR_BIND";
pub const PAGE_SIZE_CAP_VAR: &str = "MICROAR_PAGE_SIZE_CAP";
pub const REQUEST_LOG_VAR: &str = "MICROAR_REQUEST_LOG";

pub const DEFAULT_DATA_DIR: &str = "microar-data";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const DEFAULT_PAGE_SIZE_CAP: usize = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{var} is invalid: {detail}")]
    Invalid { var: &'static str, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub data_dir: PathBuf,
    pub bind: SocketAddr,
    pub page_size_cap: usize,
    /// One JSON line per request on stdout.
    pub request_log: bool,
}

impl Config {
    /// Builds a config from a variable lookup, so tests need not touch the
    /// process environment.
    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let data_dir = PathBuf::from(get(DATA_DIR_VAR).unwrap_or_else(|| DEFAULT_DATA_DIR.into()));
        let bind_raw = get(BIND_VAR).unwrap_or_else(|| DEFAULT_BIND.into());
        let bind =
            bind_raw
                .parse()
                .map_err(|e: std::net::AddrParseError| ConfigError::Invalid {
                    var: BIND_VAR,
                    detail: e.to_string(),
                })?;
        let page_size_cap = match get(PAGE_SIZE_CAP_VAR) {
            None => DEFAULT_PAGE_SIZE_CAP,
            Some(raw) => match raw.parse::<usize>() {
                Ok(n) if n >= 1 => n,
                _ => {
                    return Err(ConfigError::Invalid {
                        var: PAGE_SIZE_CAP_VAR,
                        detail: format!("{raw:?} is not a positive integer"),
                    })
                }
            },
        };
        let request_log = match get(REQUEST_LOG_VAR).as_deref() {
            None | Some("1" | "true" | "on") => true,
            Some("0" | "false" | "off") => false,
            Some(raw) => {
                return Err(ConfigError::Invalid {
                    var: REQUEST_LOG_VAR,
                    detail: format!("{raw:?} is not one of 1, true, on, 0, false, off"),
                })
            }
        };
        Ok(Self {
            data_dir,
            bind,
            page_size_cap,
            request_log,
        })
    }

    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }
}
