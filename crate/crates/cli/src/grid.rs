//! Parsing of `--n` and `--eta` value lists.

/// Comma-separated items, each either an integer or an inclusive range
/// `start..end` / `start..end..step`.
pub fn parse_n_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(format!("empty item in {s:?}"));
        }
        let parts: Vec<&str> = item.split("..").collect();
        let num = |p: &str| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| format!("{p:?} is not a non-negative integer"))
        };
        match parts.as_slice() {
            [single] => out.push(num(single)?),
            [start, end] | [start, end, _] => {
                let (start, end) = (num(start)?, num(end)?);
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                if step == 0 {
                    return Err(format!("zero step in {item:?}"));
                }
                if start > end {
                    return Err(format!("empty range {item:?}"));
                }
                out.extend((start..=end).step_by(step as usize));
            }
            _ => return Err(format!("malformed range {item:?}")),
        }
    }
    Ok(out)
}

/// Comma-separated floats in `[0, 1)`.
pub fn parse_eta_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .map(|item| {
            let eta: f64 = item
                .parse()
                .map_err(|_| format!("{item:?} is not a number"))?;
            if !(0.0..1.0).contains(&eta) {
                return Err(format!("eta {eta} outside [0, 1)"));
            }
            Ok(eta)
        })
        .collect()
}
