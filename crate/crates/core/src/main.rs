use std::process::ExitCode;

fn main() -> ExitCode {
    weierkern::cli::configure_threads();
    let (code, text) = weierkern::cli::run(std::env::args_os());
    if code == 0 {
        if !text.is_empty() {
            println!("{text}");
        }
    } else {
        eprintln!("{text}");
    }
    ExitCode::from(code as u8)
}
