use std::io::IsTerminal;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let color = std::io::stdout().is_terminal() && std::env::var_os("CDAIMO_NO_COLOR").is_none();
    let code = cdaimo_cli::cli_main(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock(), color);
    ExitCode::from(code as u8)
}
