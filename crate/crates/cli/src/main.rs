use std::io::{self, BufReader};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let stdin = io::stdin();
    let mut input = BufReader::new(stdin.lock());
    let code = vigil_cli::run(std::env::args_os(), &mut input, &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
