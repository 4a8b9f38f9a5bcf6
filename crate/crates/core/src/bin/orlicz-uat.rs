fn main() {
    std::process::exit(orlicz_uat::cli::dispatch(std::env::args_os()));
}
