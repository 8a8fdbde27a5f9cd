fn main() {
    std::process::exit(balflow::commands::run(std::env::args_os()));
}
