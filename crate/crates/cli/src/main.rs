fn main() {
    std::process::exit(mixforge::commands::cli_main(std::env::args_os()));
}
