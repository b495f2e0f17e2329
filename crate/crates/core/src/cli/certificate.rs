//! Line-oriented verification certificates.
//!
//! Output is a pure function of the inputs: sections and entries keep their
//! insertion order and every exact value is rendered in canonical scalar form.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported but not asserted.
    Info,
    /// Not run because a prerequisite failed.
    Skipped,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub status: Status,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        Self {
            name: name.into(),
            status,
            entries: Vec::new(),
        }
    }

    pub fn entry(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.push(key, value);
        self
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Keyvalue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub tool: String,
    pub version: String,
    pub subject: String,
    pub timestamp: Option<u64>,
    pub sections: Vec<Section>,
}

impl Certificate {
    pub fn new(subject: impl Into<String>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subject: subject.into(),
            timestamp: None,
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, section: Section) {
        self.sections.push(section);
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// True iff no asserted check failed.
    pub fn verified(&self) -> bool {
        self.sections.iter().all(|s| s.status != Status::Fail)
    }

    pub fn failed_sections(&self) -> Vec<&str> {
        self.sections
            .iter()
            .filter(|s| s.status == Status::Fail)
            .map(|s| s.name.as_str())
            .collect()
    }

    fn result_label(&self) -> &'static str {
        if self.verified() {
            "verified"
        } else {
            "failed"
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Keyvalue => self.render_keyvalue(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "certificate {} {}", self.tool, self.version).unwrap();
        writeln!(out, "subject {}", self.subject).unwrap();
        if let Some(ts) = self.timestamp {
            writeln!(out, "timestamp {ts}").unwrap();
        }
        for s in &self.sections {
            writeln!(out, "[{}] {}", s.name, s.status.label().to_uppercase()).unwrap();
            for (k, v) in &s.entries {
                writeln!(out, "  {k}: {v}").unwrap();
            }
        }
        writeln!(out, "result {}", self.result_label().to_uppercase()).unwrap();
        out
    }

    fn render_keyvalue(&self) -> String {
        let mut out = String::new();
        writeln!(out, "certificate.tool={}", self.tool).unwrap();
        writeln!(out, "certificate.version={}", self.version).unwrap();
        writeln!(out, "certificate.subject={}", self.subject).unwrap();
        if let Some(ts) = self.timestamp {
            writeln!(out, "certificate.timestamp={ts}").unwrap();
        }
        for s in &self.sections {
            writeln!(out, "{}.status={}", s.name, s.status.label()).unwrap();
            for (k, v) in &s.entries {
                writeln!(out, "{}.{}={}", s.name, k, v).unwrap();
            }
        }
        writeln!(out, "certificate.result={}", self.result_label()).unwrap();
        out
    }
}
