//! Diagnostic records and their two renderings.

use std::io::Write;

use ptsdk::syntax::Pos;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Warning,
    Error,
    /// A failure that a correct kernel cannot produce on checked input.
    Violation,
}

impl Status {
    fn word(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Warning => "warning",
            Status::Error => "error",
            Status::Violation => "violation",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    MachineReadable,
}

#[derive(Clone, Debug)]
pub struct Record {
    pub kind: &'static str,
    pub status: Status,
    pub file: Option<String>,
    pub pos: Option<Pos>,
    pub subject: Option<String>,
    pub message: String,
    pub details: Vec<(&'static str, Value)>,
    /// Extra lines shown under the record in text mode.
    pub notes: Vec<String>,
}

impl Record {
    pub fn new(kind: &'static str, status: Status, message: impl Into<String>) -> Self {
        Record {
            kind,
            status,
            file: None,
            pos: None,
            subject: None,
            message: message.into(),
            details: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn ok(kind: &'static str, message: impl Into<String>) -> Self {
        Record::new(kind, Status::Ok, message)
    }

    pub fn error(kind: &'static str, message: impl Into<String>) -> Self {
        Record::new(kind, Status::Error, message)
    }

    pub fn at(mut self, file: &str, pos: Option<Pos>) -> Self {
        self.file = Some(file.to_string());
        self.pos = pos;
        self
    }

    pub fn subject(mut self, s: impl Into<String>) -> Self {
        self.subject = Some(s.into());
        self
    }

    pub fn detail(mut self, key: &'static str, v: impl Into<Value>) -> Self {
        self.details.push((key, v.into()));
        self
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }

    fn text(&self) -> String {
        let mut out = String::new();
        if let Some(f) = &self.file {
            out.push_str(f);
            if let Some(p) = self.pos {
                out.push_str(&format!(":{p}"));
            }
            out.push_str(": ");
        }
        if self.status != Status::Ok {
            out.push_str(self.status.word());
            out.push_str(": ");
        }
        out.push_str(self.kind);
        if let Some(s) = &self.subject {
            out.push(' ');
            out.push_str(s);
        }
        out.push_str(": ");
        out.push_str(&self.message);
        for n in &self.notes {
            out.push_str("\n    ");
            out.push_str(n);
        }
        out
    }

    fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("kind".into(), self.kind.into());
        m.insert("status".into(), self.status.word().into());
        if let Some(f) = &self.file {
            m.insert("file".into(), f.as_str().into());
        }
        if let Some(p) = self.pos {
            m.insert("line".into(), p.line.into());
            m.insert("col".into(), p.col.into());
        }
        if let Some(s) = &self.subject {
            m.insert("subject".into(), s.as_str().into());
        }
        m.insert("message".into(), self.message.as_str().into());
        for (k, v) in &self.details {
            m.insert((*k).into(), v.clone());
        }
        Value::Object(m)
    }
}

pub struct Reporter {
    pub format: Format,
    /// Text-mode records go to stderr while stdout carries a document.
    pub to_stderr: bool,
    worst: Status,
}

impl Reporter {
    pub fn new(format: Format) -> Self {
        Reporter { format, to_stderr: false, worst: Status::Ok }
    }

    pub fn emit(&mut self, r: Record) {
        self.worst = self.worst.max(r.status);
        let line = match self.format {
            Format::Text => r.text(),
            Format::MachineReadable => r.json().to_string(),
        };
        if self.to_stderr && self.format == Format::Text {
            eprintln!("{line}");
        } else {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{line}");
        }
    }

    /// Like `emit`, but a successful item stays out of text output, where a
    /// document or summary shows it.
    pub fn emit_item(&mut self, r: Record) {
        if self.format == Format::Text && r.status == Status::Ok {
            return;
        }
        self.emit(r);
    }

    /// Prints a document on stdout (text mode only).
    pub fn document(&mut self, text: &str) {
        if self.format == Format::Text {
            print!("{text}");
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.worst {
            Status::Ok | Status::Warning => 0,
            Status::Error => 1,
            Status::Violation => 2,
        }
    }
}
