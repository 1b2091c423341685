fn main() {
    std::process::exit(skyrmion_string::cli::main_with_std());
}
