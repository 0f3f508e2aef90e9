fn main() {
    std::process::exit(qcluster::cli::main_with(std::env::args_os()));
}
