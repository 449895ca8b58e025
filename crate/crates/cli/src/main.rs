fn main() {
    std::process::exit(nlslab_cli::run::dispatch(std::env::args_os()));
}
