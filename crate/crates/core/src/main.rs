fn main() {
    std::process::exit(bosonic_geom::cli::run(std::env::args_os()));
}
