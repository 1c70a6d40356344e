//! Deterministic number formatting for report files.

/// Formats a value at 6 significant digits.
///
/// Values in a moderate range use plain decimal notation, everything else
/// scientific; infinities and NaN get fixed spellings. The output depends
/// only on the value, never on locale or platform, which is what makes the
/// emitted CSV files byte-reproducible.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-3..7).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}
