fn main() {
    std::process::exit(cuspsum_tool::main_with(std::env::args_os()));
}
