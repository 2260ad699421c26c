//! Running an external QBF solver on a QDIMACS file.

use std::io::Write;
use std::process::Command;

use crate::error::{Error, Result};

use super::encode::QbfProblem;
use super::expand::Verdict;
use super::qdimacs::emit_qdimacs;

/// Runs `command` on the problem. The file path replaces a `{}` argument or
/// is appended. The verdict is read from `s cnf 1|0`, a SAT/UNSAT word or
/// the exit codes 10/20; `V` lines, when present, give the model.
pub fn solve_external(p: &QbfProblem, command: &str) -> Result<Verdict> {
    let mut words = command.split_whitespace();
    let program = words
        .next()
        .ok_or_else(|| Error::Input("empty solver command".into()))?;
    let mut file = tempfile::Builder::new()
        .suffix(".qdimacs")
        .tempfile()
        .map_err(|e| Error::Solver(format!("cannot create temporary file: {e}")))?;
    file.write_all(emit_qdimacs(p).as_bytes())
        .map_err(|e| Error::Solver(format!("cannot write temporary file: {e}")))?;
    let path = file.path().to_string_lossy().into_owned();
    let mut args: Vec<String> = words.map(str::to_string).collect();
    match args.iter_mut().find(|a| a.as_str() == "{}") {
        Some(a) => *a = path,
        None => args.push(path),
    }
    let out = Command::new(program)
        .args(&args)
        .output()
        .map_err(|e| Error::Solver(format!("cannot run {program}: {e}")))?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    parse_output(&stdout, out.status.code(), p.num_vars())
}

/// Interprets solver output for a problem with `num_vars` named variables.
pub fn parse_output(stdout: &str, code: Option<i32>, num_vars: usize) -> Result<Verdict> {
    let mut sat = None;
    let mut model: Option<Vec<bool>> = None;
    for line in stdout.lines() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("s") => {
                let rest: Vec<&str> = toks.collect();
                match rest.as_slice() {
                    ["cnf", "1", ..] | ["SATISFIABLE"] => sat = Some(true),
                    ["cnf", "0", ..] | ["UNSATISFIABLE"] => sat = Some(false),
                    _ => {}
                }
            }
            Some("V") | Some("v") => {
                let m = model.get_or_insert_with(|| vec![false; num_vars]);
                for t in toks {
                    let lit: i64 = t.parse().map_err(|_| {
                        Error::Solver(format!("bad literal {t:?} in solver output"))
                    })?;
                    let v = lit.unsigned_abs() as usize;
                    if v >= 1 && v <= num_vars {
                        m[v - 1] = lit > 0;
                    }
                }
            }
            Some("UNSAT") | Some("UNSATISFIABLE") => sat = Some(false),
            Some("SAT") | Some("SATISFIABLE") => sat = Some(true),
            _ => {}
        }
    }
    let sat = match (sat, code) {
        (Some(s), _) => s,
        (None, Some(10)) => true,
        (None, Some(20)) => false,
        _ => {
            return Err(Error::Solver(format!(
                "no verdict in solver output (exit code {code:?})"
            )))
        }
    };
    Ok(if sat {
        Verdict::Sat(model)
    } else {
        Verdict::Unsat
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert_eq!(
            parse_output("s cnf 0 3 4\n", Some(0), 2).unwrap(),
            Verdict::Unsat
        );
        assert_eq!(parse_output("", Some(10), 2).unwrap(), Verdict::Sat(None));
        assert_eq!(parse_output("UNSAT\n", None, 2).unwrap(), Verdict::Unsat);
        assert_eq!(
            parse_output("s cnf 1\nV 1 0\nV -2 0\n", Some(10), 2).unwrap(),
            Verdict::Sat(Some(vec![true, false]))
        );
        assert!(parse_output("hello", Some(0), 2).is_err());
    }
}
