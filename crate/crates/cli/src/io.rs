use std::fs;
use std::io::Write;
use std::path::Path;

use omega_approx::hoa::{ap_names, parse_hoa, write_hoa};
use omega_approx::ltl::{parse_ltl, ApLetterMap, LtlFormula};
use omega_approx::ParityAutomaton;

use crate::CliError;

/// Writes through a temporary file in the target directory and renames it,
/// so a failed command never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_automaton(path: &Path) -> Result<ParityAutomaton, CliError> {
    Ok(parse_hoa(&read_text(path)?)?)
}

pub fn write_automaton(
    path: &Path,
    a: &ParityAutomaton,
    name: &str,
    meta: &[(String, String)],
) -> Result<(), CliError> {
    write_atomic(path, &write_hoa(a, Some(name), meta))
}

/// Formula text from the inline flag or the file flag.
pub fn formula_text(
    inline: &Option<String>,
    file: &Option<std::path::PathBuf>,
) -> Result<Option<String>, CliError> {
    match (inline, file) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --ltl or --ltl-file, not both".into(),
        )),
        (Some(t), None) => Ok(Some(t.clone())),
        (None, Some(p)) => Ok(Some(read_text(p)?.trim().to_string())),
        (None, None) => Ok(None),
    }
}

/// Parses a formula over the alphabet of `a`, which must consist of AP sets
/// written `{p,q}`.
pub fn formula_for(text: &str, a: &ParityAutomaton) -> Result<(LtlFormula, ApLetterMap), CliError> {
    let alphabet = a.alphabet();
    let map = match ap_names(alphabet) {
        Some(aps) => ApLetterMap::new(aps)?,
        None => {
            let mut aps = Vec::new();
            for letter in alphabet.letters() {
                let inner = letter
                    .strip_prefix('{')
                    .and_then(|l| l.strip_suffix('}'))
                    .ok_or_else(|| {
                        CliError::Usage(format!("letter {letter:?} is not a set of propositions"))
                    })?;
                aps.extend(
                    inner
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from),
                );
            }
            ApLetterMap::lexicographic(aps)?.restrict(alphabet.letters())?
        }
    };
    if map.alphabet() != alphabet {
        return Err(CliError::Usage(
            "the automaton alphabet does not match the formula's propositions".into(),
        ));
    }
    let f = parse_ltl(text, map.aps())?;
    Ok((f, map))
}
