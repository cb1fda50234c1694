fn main() {
    std::process::exit(zeno::cli::main_with_args(std::env::args_os()));
}
