mod cli;

fn main() {
    // Behave like a standard Unix filter when the read end of a pipe closes
    // (e.g. `tadeval analytic ... | head`): die on SIGPIPE instead of
    // panicking on the EPIPE write error.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(cli::run());
}
