//! Adapter for external embedding programs.
//!
//! The train graph is emitted as an internal-id edge list, a shell command
//! built from a template is run, and its output file is parsed back as an
//! [`Embedding`]. The template must contain the `{input}`, `{output}` and
//! `{dim}` placeholders, which are substituted literally. Failure modes are
//! reported distinctly: nonzero exit (with captured stderr), timeout,
//! malformed rows, wrong dimensionality, missing nodes.

use std::io::Read;
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::Embedding;
use crate::graph::Graph;
use crate::{Error, Result};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(3600);
const POLL_INTERVAL: Duration = Duration::from_millis(25);
const STDERR_KEEP: usize = 2000;

/// Run `template` in `workdir` and parse the embedding it writes.
pub fn run_external_method(
    template: &str,
    g_train: &Graph,
    d: usize,
    workdir: &Path,
    timeout: Duration,
) -> Result<Embedding> {
    for placeholder in ["{input}", "{output}", "{dim}"] {
        if !template.contains(placeholder) {
            return Err(Error::TemplateMissing(placeholder));
        }
    }
    std::fs::create_dir_all(workdir)?;
    let input = workdir.join("train_edges.txt");
    let output = workdir.join("embedding.txt");
    g_train.write_edge_list_path(&input)?;
    // A stale output from an earlier attempt must not mask a failure.
    match std::fs::remove_file(&output) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => return Err(e.into()),
        _ => {}
    }
    let command = template
        .replace("{input}", &input.display().to_string())
        .replace("{output}", &output.display().to_string())
        .replace("{dim}", &d.to_string());
    // The child gets its own process group so a timeout can kill the whole
    // tree (the shell plus anything it spawned), not just the shell.
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .current_dir(workdir)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .process_group(0)
        .spawn()?;
    // Drain stderr on a thread so a chatty child cannot fill the pipe and
    // deadlock against our wait loop.
    let mut stderr_pipe = child.stderr.take().expect("stderr was piped");
    let reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr_pipe.read_to_end(&mut buf);
        buf
    });
    let started = Instant::now();
    let status = loop {
        match child.try_wait()? {
            Some(status) => break status,
            None => {
                if started.elapsed() >= timeout {
                    unsafe {
                        libc::killpg(child.id() as libc::pid_t, libc::SIGKILL);
                    }
                    let _ = child.wait();
                    let _ = reader.join();
                    return Err(Error::ExternalTimeout { secs: timeout.as_secs() });
                }
                std::thread::sleep(POLL_INTERVAL);
            }
        }
    };
    let stderr_bytes = reader.join().unwrap_or_default();
    if !status.success() {
        let text = String::from_utf8_lossy(&stderr_bytes);
        let text = text.trim();
        let tail: String = if text.len() > STDERR_KEEP {
            format!("... {}", &text[text.len() - STDERR_KEEP..])
        } else {
            text.to_string()
        };
        return Err(Error::ExternalFailed { status: status.to_string(), stderr: tail });
    }
    if !output.exists() {
        return Err(Error::ExternalFailed {
            status: status.to_string(),
            stderr: format!("command succeeded but wrote no file at {}", output.display()),
        });
    }
    Embedding::read_path(&output, g_train.n(), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn workdir() -> tempfile::TempDir {
        tempfile::tempdir().expect("create temp dir")
    }

    #[test]
    fn rejects_template_without_placeholders() {
        let g = gen::path_graph(2);
        let dir = workdir();
        let err = run_external_method("embed {input} {dim}", &g, 2, dir.path(), DEFAULT_TIMEOUT);
        assert!(matches!(err, Err(Error::TemplateMissing("{output}"))));
    }

    #[test]
    fn identity_stub_roundtrips() {
        let g = gen::path_graph(3);
        let dir = workdir();
        let pre = dir.path().join("precomputed.txt");
        let expected = Embedding::new(2, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        expected.write_path(&pre).unwrap();
        let template = format!("test {{dim}} -eq 2 && test -s {{input}} && cp {} {{output}}", pre.display());
        let got = run_external_method(&template, &g, 2, dir.path(), DEFAULT_TIMEOUT).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn input_file_lists_train_edges() {
        let g = gen::cycle(4);
        let dir = workdir();
        // The stub copies its input into the output position; parsing then
        // fails, but the input file must exist with one line per edge.
        let _ = run_external_method("cp {input} {output} # {dim}", &g, 2, dir.path(), DEFAULT_TIMEOUT);
        let input = std::fs::read_to_string(dir.path().join("train_edges.txt")).unwrap();
        assert_eq!(input.lines().count(), 4);
        assert!(input.lines().next().unwrap().split_whitespace().count() == 2);
    }

    #[test]
    fn wrong_dimensionality_reported() {
        let g = gen::path_graph(2);
        let dir = workdir();
        let template = "printf '0 1.0\\n1 2.0\\n' > {output} # {input} {dim}";
        let err = run_external_method(template, &g, 2, dir.path(), DEFAULT_TIMEOUT);
        assert!(matches!(err, Err(Error::ExternalDim { node: 0, got: 1, want: 2 })));
    }

    #[test]
    fn missing_node_reported() {
        let g = gen::path_graph(3);
        let dir = workdir();
        let template = "printf '0 1.0 2.0\\n2 3.0 4.0\\n' > {output} # {input} {dim}";
        let err = run_external_method(template, &g, 2, dir.path(), DEFAULT_TIMEOUT);
        assert!(matches!(err, Err(Error::ExternalMissingNode { node: 1, n: 3 })));
    }

    #[test]
    fn nonzero_exit_carries_stderr() {
        let g = gen::path_graph(2);
        let dir = workdir();
        let template = "echo model exploded >&2; false # {input} {output} {dim}";
        match run_external_method(template, &g, 2, dir.path(), DEFAULT_TIMEOUT) {
            Err(Error::ExternalFailed { stderr, .. }) => {
                assert!(stderr.contains("model exploded"), "stderr was {stderr:?}");
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn success_without_output_file_reported() {
        let g = gen::path_graph(2);
        let dir = workdir();
        let template = "true # {input} {output} {dim}";
        match run_external_method(template, &g, 2, dir.path(), DEFAULT_TIMEOUT) {
            Err(Error::ExternalFailed { stderr, .. }) => {
                assert!(stderr.contains("no file"), "stderr was {stderr:?}");
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn timeout_kills_the_child() {
        let g = gen::path_graph(2);
        let dir = workdir();
        let template = "sleep 30 # {input} {output} {dim}";
        let started = Instant::now();
        let err =
            run_external_method(template, &g, 2, dir.path(), Duration::from_millis(200));
        assert!(matches!(err, Err(Error::ExternalTimeout { secs: 0 })));
        assert!(started.elapsed() < Duration::from_secs(5), "kill was not prompt");
    }
}
