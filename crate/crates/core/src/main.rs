fn main() {
    std::process::exit(mdx_core::cli::run(std::env::args_os()));
}
