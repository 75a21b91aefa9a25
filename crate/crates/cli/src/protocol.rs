//! The JSON-lines event protocol: one object per line, tagged by `type`.
//! Values travel as decimal strings.

use pind_core::{Event, Status, Term};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolEvent {
    InputRequest { var: String, prompt: String },
    InputResponse { value: String },
    Output { var: String, value: String },
    ProofDone { nodes: String },
    Result { status: String },
    Error { code: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("bad protocol line {line:?}: {reason}")]
pub struct ProtocolError {
    pub line: String,
    pub reason: String,
}

/// Renders one event as a single JSON line, without the trailing newline.
pub fn encode_event(event: &ProtocolEvent) -> String {
    serde_json::to_string(event).expect("protocol events always serialize")
}

/// Parses one line. Unknown `type` values, unknown or missing fields, and counts
/// that are not decimal strings are rejected.
pub fn decode_event(line: &str) -> Result<ProtocolEvent, ProtocolError> {
    let fail = |reason: String| ProtocolError {
        line: line.to_string(),
        reason,
    };
    let event: ProtocolEvent = serde_json::from_str(line).map_err(|e| fail(e.to_string()))?;
    if let ProtocolEvent::ProofDone { nodes } = &event {
        if !is_decimal(nodes) {
            return Err(fail("nodes must be a decimal string".into()));
        }
    }
    if let ProtocolEvent::Result { status } = &event {
        if !matches!(status.as_str(), "success" | "failed" | "error") {
            return Err(fail(format!("unknown status {status:?}")));
        }
    }
    Ok(event)
}

fn is_decimal(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Protocol name of a transcript status.
pub fn status_name(status: &Status) -> &'static str {
    match status {
        Status::Success => "success",
        Status::Failed => "failed",
        Status::Error(_) => "error",
    }
}

fn value(t: &Term) -> String {
    t.to_string()
}

/// The protocol form of an executor event. A status maps to its `result`.
pub fn from_event(event: &Event) -> ProtocolEvent {
    match event {
        Event::ChoiceRequested { var, prompt } => ProtocolEvent::InputRequest {
            var: var.clone(),
            prompt: prompt.clone(),
        },
        Event::ChoiceMade { value: v, .. } => ProtocolEvent::InputResponse { value: value(v) },
        Event::WitnessPrinted { var, value: v } => ProtocolEvent::Output {
            var: var.clone(),
            value: value(v),
        },
        Event::Status(s) => ProtocolEvent::Result {
            status: status_name(s).into(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_round_trips() {
        let e = ProtocolEvent::InputRequest {
            var: "X".into(),
            prompt: "choose X".into(),
        };
        let line = encode_event(&e);
        assert_eq!(
            line,
            r#"{"type":"input_request","var":"X","prompt":"choose X"}"#
        );
        assert_eq!(decode_event(&line), Ok(e));
    }

    #[test]
    fn output_schema_instance() {
        assert_eq!(
            decode_event(r#"{"type":"output","var":"Y","value":"120"}"#),
            Ok(ProtocolEvent::Output {
                var: "Y".into(),
                value: "120".into()
            })
        );
    }

    #[test]
    fn malformed_lines_are_rejected() {
        for line in [
            r#"{"type":"mystery"}"#,
            r#"{"type":"input_response","value":5}"#,
            r#"{"type":"input_response"}"#,
            r#"{"type":"input_response","value":"5","extra":1}"#,
            r#"{"type":"proof_done","nodes":"ten"}"#,
            r#"{"type":"result","status":"maybe"}"#,
            r#"{"var":"X"}"#,
            "not json",
        ] {
            let err = decode_event(line).unwrap_err();
            assert_eq!(err.line, line);
        }
    }
}
