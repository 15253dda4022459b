fn main() {
    std::process::exit(mtrnn::cli::main_with(std::env::args_os()));
}
