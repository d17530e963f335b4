fn main() {
    env_logger::init();
    std::process::exit(tide_cli::main_with(std::env::args_os()));
}
