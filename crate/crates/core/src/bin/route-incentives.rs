fn main() {
    std::process::exit(route_incentives::cli::run(std::env::args_os()));
}
