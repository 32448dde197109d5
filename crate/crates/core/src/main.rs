use std::io;

fn main() {
    let code = radar_mi::experiments::cli_main(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr());
    std::process::exit(code);
}
