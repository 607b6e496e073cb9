use super::{GridError, NetworkCase};
use ndarray::Array2;

/// Assembles the bus admittance matrix Y = G + jB from series admittances,
/// line charging (half at each end), off-nominal taps on the from side, and
/// bus shunts.
pub fn build_admittance(case: &NetworkCase) -> Result<(Array2<f64>, Array2<f64>), GridError> {
    let n = case.n_buses();
    let mut g = Array2::zeros((n, n));
    let mut b = Array2::zeros((n, n));
    for line in &case.lines {
        if line.r == 0.0 && line.x == 0.0 {
            return Err(GridError::Invalid(format!(
                "line {}-{}: zero impedance",
                line.from, line.to
            )));
        }
        let f = case.bus_index(line.from).expect("validated");
        let t = case.bus_index(line.to).expect("validated");
        let d = line.r * line.r + line.x * line.x;
        let (ys_g, ys_b) = (line.r / d, -line.x / d);
        let bc = 0.5 * line.b_sh;
        let tap = if line.tap == 0.0 { 1.0 } else { line.tap };
        let t2 = tap * tap;

        g[[f, f]] += ys_g / t2;
        b[[f, f]] += (ys_b + bc) / t2;
        g[[t, t]] += ys_g;
        b[[t, t]] += ys_b + bc;
        g[[f, t]] += -ys_g / tap;
        b[[f, t]] += -ys_b / tap;
        g[[t, f]] += -ys_g / tap;
        b[[t, f]] += -ys_b / tap;
    }
    for (i, bus) in case.buses.iter().enumerate() {
        g[[i, i]] += bus.g_sh;
        b[[i, i]] += bus.b_sh;
    }
    Ok((g, b))
}
