use std::process::Command;

fn main() {
    println!("cargo:rerun-if-env-changed=ITLINQ_GIT_REV");
    if std::env::var_os("ITLINQ_GIT_REV").is_some() {
        return;
    }
    let rev = Command::new("git")
        .args(["rev-parse", "--short=12", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok());
    if let Some(rev) = rev {
        println!("cargo:rustc-env=ITLINQ_GIT_REV={}", rev.trim());
    }
}
