//! Thin entry point; all behaviour lives in `pharm::harness::cli`.

fn main() {
    std::process::exit(pharm::harness::cli::run());
}
