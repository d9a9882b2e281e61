fn main() {
    std::process::exit(invit_core::cli::run_from_env());
}
