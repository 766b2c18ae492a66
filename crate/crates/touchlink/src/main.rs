fn main() { std::process::exit(touchlink::cli::dispatch(std::env::args_os())) }
