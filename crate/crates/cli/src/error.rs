use repeater_core::dlcz::DlczError;
use repeater_core::ParamError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("invalid parameters: {0}")]
    Param(#[from] ParamError),
    #[error("invalid physical parameters: {0}")]
    Dlcz(#[from] DlczError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write output: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write output: {0}")]
    Json(#[from] serde_json::Error),
}
