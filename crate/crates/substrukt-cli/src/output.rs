//! Command results and their rendering.

use serde_json::Value;
use substrukt::calculus::ProofTree;

use crate::Format;

/// What a command established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Proved, valid, or accepted.
    Valid,
    /// Refuted, invalid, or rejected.
    Invalid,
    /// No definitive answer within the bounds.
    Unknown,
}

impl Status {
    /// The process exit status: 0, 1 or 2.
    pub fn code(self) -> u8 {
        match self {
            Status::Valid => 0,
            Status::Invalid => 1,
            Status::Unknown => 2,
        }
    }

    /// `valid` if the flag holds, `invalid` otherwise.
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Valid
        } else {
            Status::Invalid
        }
    }
}

/// The result of a command in every output format.
#[derive(Clone, Debug)]
pub struct Report {
    /// Exit status.
    pub status: Status,
    /// Text rendering.
    pub text: String,
    /// JSON rendering.
    pub json: Value,
    /// S-expression rendering, when the command produced a proof.
    pub sexp: Option<String>,
}

impl Report {
    /// Writes the report to standard output.
    pub fn emit(&self, format: Format) {
        match format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&self.json).expect("serializable")),
            Format::Sexp if self.sexp.is_some() => println!("{}", self.sexp.as_deref().unwrap_or_default()),
            _ => print!("{}", self.text),
        }
    }
}

/// Renders a proof as an indented tree, conclusion first.
pub fn proof_text(t: &ProofTree) -> String {
    fn go(t: &ProofTree, depth: usize, out: &mut String) {
        out.push_str(&format!("{}{}   [{}]\n", "  ".repeat(depth), t.conclusion, t.rule));
        for p in &t.premises {
            go(p, depth + 1, out);
        }
    }
    let mut out = String::new();
    go(t, 0, &mut out);
    out
}
