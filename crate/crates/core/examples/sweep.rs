// A parameter sweep driven through the command-line entry point in-process.

use std::error::Error;

use skyrmion_string::cli;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for args in [
        vec!["skyrmion-string", "sweep", "--n", "1,2,3"],
        vec!["skyrmion-string", "sweep", "--mk", "0:1:3"],
        vec![
            "skyrmion-string",
            "sweep",
            "--mode",
            "shoot",
            "--kappa",
            "0.1",
            "--mk",
            "0,0.5",
        ],
    ] {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli::run(args.clone(), &mut out, &mut err);
        println!("$ {}  (exit {code})", args[1..].join(" "));
        print!("{}", String::from_utf8(out)?);
        if code != 0 {
            return Err(String::from_utf8(err)?.into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
