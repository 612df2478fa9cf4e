use std::io::Write;
use std::process::ExitCode;

use routley::cli::{dispatch, report, Status};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let (result, format) = dispatch(&argv);
    let out = report(&result, format);
    let written = match result.status {
        Status::Ok | Status::FailedCheck => std::io::stdout().write_all(out.as_bytes()),
        Status::UserError | Status::InternalError => std::io::stderr().write_all(out.as_bytes()),
    };
    if written.is_err() {
        return ExitCode::from(3);
    }
    ExitCode::from(result.status.exit_code() as u8)
}
