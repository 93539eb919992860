use std::process::exit;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let result = chronoglass_cli::run(&argv);
    println!("{}", result.render());
    exit(result.status.exit_code());
}
