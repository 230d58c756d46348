/// Parses `start:stop:step` (inclusive) or a comma-separated list into a
/// non-empty, strictly increasing sequence.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let number = |s: &str| -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{s}` is not finite"))
        }
    };
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("range `{spec}` must be start:stop:step"));
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if step <= 0.0 {
            return Err(format!("step must be positive in `{spec}`"));
        }
        if stop < start {
            return Err(format!("range `{spec}` is empty"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // Round away accumulated binary noise such as 0.30000000000000004.
        (0..count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err("grid is empty".into());
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("grid `{spec}` is not strictly increasing"));
    }
    Ok(values)
}
