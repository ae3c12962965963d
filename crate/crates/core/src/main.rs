use std::process::ExitCode;

fn main() -> ExitCode {
    polydisc::cli::init_threads();
    let out = polydisc::cli::run(std::env::args_os());
    println!("{}", out.stdout);
    ExitCode::from(out.code as u8)
}
