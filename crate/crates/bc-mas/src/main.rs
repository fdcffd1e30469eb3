fn main() {
    let code = bc_mas::cli::run(std::env::args_os());
    std::process::exit(code);
}
