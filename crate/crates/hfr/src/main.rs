use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let mut out = std::io::stdout().lock();
    let code = hfr::cli::run(&argv, &mut out);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
