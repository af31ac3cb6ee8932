fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = siegel_moduli::cli::main_with_args(&args);
    std::process::exit(code);
}
