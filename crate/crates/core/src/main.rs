use std::io;
use std::process::ExitCode;

use engage::cli::{main_with, Console};

fn main() -> ExitCode {
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = main_with(
        std::env::args_os(),
        &mut Console {
            out: &mut out,
            err: &mut err,
        },
    );
    ExitCode::from(code as u8)
}
