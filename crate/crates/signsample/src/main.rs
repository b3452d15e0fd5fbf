fn main() {
    std::process::exit(signsample::cli_main());
}
