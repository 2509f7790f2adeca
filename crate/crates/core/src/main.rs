fn main() {
    let out = kcurv::cli::run(std::env::args_os(), &mut std::io::stdin().lock());
    print!("{}", out.stdout);
    std::process::exit(out.code);
}
