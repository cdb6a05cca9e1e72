fn main() {
    std::process::exit(tree_route::cli::run(std::env::args_os()));
}
