//! Locale-free number formatting shared by the CSV writers and the
//! expression printer.

/// Shortest decimal string that parses back to exactly `v`.
///
/// Plain notation in `[1e-5, 1e16)`, scientific outside it. `inf`, `-inf`
/// and `NaN` are spelled the way Rust parses them.
pub fn shortest(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_owned();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".to_owned() } else { "-inf".to_owned() };
    }
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
