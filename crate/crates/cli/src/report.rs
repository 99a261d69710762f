use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Definite,
    /// Budgets ran out or a required oracle is missing.
    Unknown,
    /// A certificate failed to replay.
    Rejected,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Definite => 0,
            Status::Unknown | Status::Rejected => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Definite => "definite",
            Status::Unknown => "unknown",
            Status::Rejected => "rejected",
        }
    }
}

/// Outcome of one command. The text rendering is a pure function of the
/// serialised fields, so a JSON round trip re-renders byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub status: Status,
    pub lines: Vec<String>,
    /// Where each claim comes from: a certificate, a BY-RULE flag, or UNVERIFIED input.
    pub provenance: Vec<String>,
    pub data: Value,
}

impl Report {
    pub fn new<T: Serialize>(command: &str, status: Status, body: &str, data: &T) -> Self {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            status,
            lines: body.lines().map(str::to_string).collect(),
            provenance: Vec::new(),
            data: serde_json::to_value(data).expect("report data serialises"),
        }
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.provenance.push(line.into());
        self
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.status.label());
        for l in &self.lines {
            out += l;
            out.push('\n');
        }
        if !self.provenance.is_empty() {
            out += "provenance:\n";
            for p in &self.provenance {
                out += &format!("  - {p}\n");
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("report JSON at line {}, column {}: {e}", e.line(), e.column()))
    }
}
