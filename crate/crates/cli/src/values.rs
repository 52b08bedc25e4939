/// Parses exactly `N` comma-separated numbers, as in `--extents 10,20,30`.
pub fn floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.parse().map_err(|_| format!("'{part}' is not a number"))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_parses() {
        assert_eq!(floats::<3>("1, -2,3.5"), Ok([1.0, -2.0, 3.5]));
        assert!(floats::<3>("1,2").is_err());
        assert!(floats::<2>("1,x").is_err());
    }
}
