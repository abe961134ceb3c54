/// `x` with six significant digits; scientific notation outside `[1e-4, 1e6)`.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let s = format!("{:.*}", (5 - mag).max(0) as usize, x);
    // Rounding can carry into a new digit, e.g. 9.999996.
    if s.trim_start_matches('-')
        .replace('.', "")
        .trim_start_matches('0')
        .len()
        > 6
        && s.contains('.')
    {
        return format!("{:.*}", (4 - mag).max(0) as usize, x);
    }
    s
}
