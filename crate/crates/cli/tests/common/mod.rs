use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

pub const BIN: &str = env!("CARGO_BIN_EXE_liemorph");

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

/// Runs the real binary, feeding `stdin` when given.
pub fn liemorph(args: &[&str], stdin: Option<&[u8]>) -> Run {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(if stdin.is_some() { Stdio::piped() } else { Stdio::null() })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn liemorph");
    if let Some(input) = stdin {
        child.stdin.take().unwrap().write_all(input).unwrap();
    }
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Fresh scratch directory under the target dir.
pub fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Writes `catalog instantiate` output for `args` into `dir/name`.
pub fn instantiate(dir: &Path, name: &str, args: &[&str]) -> String {
    let mut full = vec!["catalog", "instantiate"];
    full.extend_from_slice(args);
    let r = liemorph(&full, None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let path = dir.join(name);
    std::fs::write(&path, &r.stdout).unwrap();
    path.to_string_lossy().into_owned()
}

/// Writes a raw document produced by `args` into `dir/name`.
pub fn emit(dir: &Path, name: &str, args: &[&str]) -> String {
    let r = liemorph(args, None);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let path = dir.join(name);
    std::fs::write(&path, &r.stdout).unwrap();
    path.to_string_lossy().into_owned()
}

pub fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}
