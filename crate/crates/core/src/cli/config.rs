use std::fs;

/// Reads `key = value` lines. Blank lines and `#` comments are skipped; a
/// bare `key` is a switch.
pub fn parse_config(text: &str) -> Result<Vec<(String, Option<String>)>, String> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), Some(v.trim().to_string())),
            None => (line, None),
        };
        let key = key.trim_start_matches("--");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(format!("config line {}: bad key '{key}'", k + 1));
        }
        out.push((key.replace('_', "-"), value));
    }
    Ok(out)
}

/// Removes `--config FILE` from argv and splices the file's settings in
/// right after the subcommand, so explicit flags (which come later) win.
pub fn expand_config(argv: &[String]) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a file")?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a.clone());
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let settings = parse_config(&text)?;
    // The subcommand is the first bare word after the program name,
    // skipping the value of a leading `--out`.
    let mut at = None;
    let mut k = 1;
    while k < rest.len() {
        if rest[k] == "--out" {
            k += 2;
            continue;
        }
        if !rest[k].starts_with('-') {
            at = Some(k + 1);
            break;
        }
        k += 1;
    }
    let at = at.ok_or("no subcommand given")?;
    let flags = settings.into_iter().map(|(k, v)| match v {
        Some(v) => format!("--{k}={v}"),
        None => format!("--{k}"),
    });
    let mut out: Vec<String> = rest[..at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&rest[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let c = parse_config("# run\nmap = sine-drift\nparam = b=0.8\n\nj_max=12\n").unwrap();
        assert_eq!(
            c,
            vec![
                ("map".into(), Some("sine-drift".into())),
                ("param".into(), Some("b=0.8".into())),
                ("j-max".into(), Some("12".into())),
            ]
        );
        assert!(parse_config("bad key = 1").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        fs::write(&p, "a = 0.5\nn = 10\n").unwrap();
        let argv: Vec<String> = ["helixlab", "--out", "o", "iterate", "--config", p.to_str().unwrap(), "--n", "20"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let got = expand_config(&argv).unwrap();
        assert_eq!(got, ["helixlab", "--out", "o", "iterate", "--a=0.5", "--n=10", "--n", "20"]);
    }
}
