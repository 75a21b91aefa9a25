//! Command-line sessions, the REPL and the JSON-lines protocol for `pind`.

pub mod protocol;
pub mod repl;
pub mod session;

pub use protocol::{decode_event, encode_event, ProtocolError, ProtocolEvent};
pub use repl::run_repl;
pub use session::{
    resolve_depth_limit, run_script, ExitStatus, OutputMode, SessionConfig, SessionError,
    SessionIo, SessionReport,
};
