use std::process::ExitCode;

mod cli;

fn main() -> ExitCode {
    // die quietly on a closed pipe (`hhbounds sweep ... | head`) the
    // way other line-oriented tools do, instead of panicking mid-print
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    ExitCode::from(cli::run(std::env::args_os()))
}
