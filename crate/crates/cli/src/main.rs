fn main() {
    std::process::exit(conelcp_cli::run(std::env::args_os()));
}
