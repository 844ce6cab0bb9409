use std::io::Read;
use std::io::Write;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    // Read stdin only when some flag asks for it.
    let stdin: Vec<u8> = if argv.iter().any(|a| a == "-") {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).ok();
        buf
    } else {
        Vec::new()
    };
    let outcome = dmw::cli::run_command(&argv, &stdin);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    std::io::stdout().flush().ok();
    std::process::exit(outcome.exit_code);
}
