use env_logger::Env;

fn main() {
    env_logger::Builder::from_env(Env::new().filter_or("SIM_LOG", "warn")).init();
    std::process::exit(lindblad_z2::cli::main_with_args(std::env::args_os()));
}
