fn main() {
    std::process::exit(vocab_graft_cli::run(std::env::args_os()));
}
