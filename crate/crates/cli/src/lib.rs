//! JSON front end for `mvlab-core`: one request in, one versioned JSON document out.

pub mod codec;
mod commands;

use clap::ValueEnum;
use mvlab_core::GeomError;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "mvlab/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Fundamental,
    SevenPoint,
    Triangulate,
    Resect,
    Membership,
    Equivalence,
    Constraints,
    Decompose,
    Iac,
    Essential,
    IsEssential,
    ClassifyCones,
    Fiber,
    Residual,
    Twist,
    Simulate,
}

impl Command {
    pub fn name(&self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

#[derive(Clone, Debug)]
pub struct Request {
    pub command: Command,
    /// Parsed input document; `simulate` takes none.
    pub input: Option<Value>,
    pub mode: Mode,
    pub tol: Option<f64>,
    pub seed: u64,
    pub views: usize,
    pub points: usize,
}

impl Request {
    pub fn new(command: Command) -> Self {
        Self { command, input: None, mode: Mode::Exact, tol: None, seed: 0, views: 2, points: 7 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Geom(GeomError::Parse(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Response {
    pub status: i32,
    pub body: Value,
}

impl Response {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

pub fn error_response(command: Option<Command>, err: &CliError) -> Response {
    let mut body = Map::new();
    body.insert("schema".into(), json!(SCHEMA));
    if let Some(c) = command {
        body.insert("command".into(), json!(c.name()));
    }
    body.insert("status".into(), json!("error"));
    body.insert("error".into(), json!(err.to_string()));
    Response { status: err.exit_code(), body: Value::Object(body) }
}

pub fn execute(req: &Request) -> Response {
    match commands::run(req) {
        Ok(result) => Response {
            status: 0,
            body: json!({ "schema": SCHEMA, "command": req.command.name(), "status": "ok", "result": result }),
        },
        Err(e) => error_response(Some(req.command), &e),
    }
}
