fn main() {
    std::process::exit(stormcast::cli::dispatch(std::env::args_os()));
}
