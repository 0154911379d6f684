use resonant_nf::cli;

fn main() {
    std::process::exit(cli::main_entry());
}
