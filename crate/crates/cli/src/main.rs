use clap::Parser;
use gtbezier_cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("GTB_LOG")).init();
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gtbezier: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
