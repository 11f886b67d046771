//! Number formatting for the text exports. Every value is printed with the
//! shortest digit string that parses back to the same `f64`, so exports are
//! byte-stable and lossless.

/// Shortest round-trip representation; scientific notation outside
/// `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Join values with commas.
pub fn csv_row(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&fmt_f64(*v));
    }
    s
}
