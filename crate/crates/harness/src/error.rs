use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("numeric abort: {0}")]
    Numeric(lfsgd::Error),

    #[error(transparent)]
    Optimizer(lfsgd::Error),

    #[error("monitor `{name}` failed: {note}")]
    MonitorFailed { name: String, note: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit code: 2 config, 3 numeric abort, 4 monitor failure, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            Self::Optimizer(e) => match e {
                lfsgd::Error::Config { .. }
                | lfsgd::Error::DimensionMismatch { .. }
                | lfsgd::Error::Unsupported { .. }
                | lfsgd::Error::Contract(_)
                | lfsgd::Error::IndexOutOfRange { .. } => 2,
                lfsgd::Error::NonFinite { .. } => 3,
            },
            Self::Numeric(_) => 3,
            Self::MonitorFailed { .. } => 4,
            Self::Io { .. } | Self::Csv(_) | Self::Json(_) => 1,
        }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            Self::Config { field, .. } => Some(field),
            Self::Optimizer(lfsgd::Error::Config { field, .. }) => Some(field),
            _ => None,
        }
    }

    /// One-line JSON description for stderr.
    pub fn to_json(&self) -> String {
        let kind = match self.exit_code() {
            2 => "config",
            3 => "numeric",
            4 => "monitor",
            _ => "io",
        };
        json!({
            "error": kind,
            "field": self.field(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl From<lfsgd::Error> for HarnessError {
    fn from(e: lfsgd::Error) -> Self {
        match e {
            lfsgd::Error::NonFinite { .. } => Self::Numeric(e),
            other => Self::Optimizer(other),
        }
    }
}
