fn main() {
    std::process::exit(narxcomp::cli::main_with(std::env::args_os()));
}
