use gaitnl::cli;
use gaitnl::Registry;

fn main() {
    let code = cli::main_with_args(std::env::args_os(), &Registry::with_builtins());
    std::process::exit(code);
}
