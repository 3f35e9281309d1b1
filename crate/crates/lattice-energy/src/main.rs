fn main() {
    std::process::exit(lattice_energy::cli::run());
}
