fn main() {
    std::process::exit(hammock::cli::main_entry());
}
