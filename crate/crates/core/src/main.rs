fn main() {
    std::process::exit(convexity_testbed::harness::cli::main());
}
