use clap::Parser;

fn main() {
    // Die quietly when the output pipe closes (e.g. `carmichael ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = carmichael_cli::Cli::parse();
    std::process::exit(carmichael_cli::run(cli));
}
