//! Central finite differences: the independent oracle against which all jet
//! derivatives are checked.

use crate::error::Result;

/// Default step for coordinate `xk`, scaled to its magnitude.
pub fn default_step(xk: f64) -> f64 {
    1e-4 * (1.0 + xk.abs())
}

fn shifted(x: &[f64], k: usize, delta: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += delta;
    y
}

/// Central first difference (f(x + h e_k) - f(x - h e_k)) / 2h.
pub fn first<F>(f: F, x: &[f64], k: usize, h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let fp = f(&shifted(x, k, h))?;
    let fm = f(&shifted(x, k, -h))?;
    Ok((fp - fm) / (2.0 * h))
}

/// Central second difference; for `k == l` the three-point stencil, otherwise
/// the four-point cross stencil.
pub fn second<F>(f: F, x: &[f64], k: usize, l: usize, hk: f64, hl: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if k == l {
        let fp = f(&shifted(x, k, hk))?;
        let f0 = f(x)?;
        let fm = f(&shifted(x, k, -hk))?;
        Ok((fp - 2.0 * f0 + fm) / (hk * hk))
    } else {
        let mut pp = x.to_vec();
        pp[k] += hk;
        pp[l] += hl;
        let mut pm = x.to_vec();
        pm[k] += hk;
        pm[l] -= hl;
        let mut mp = x.to_vec();
        mp[k] -= hk;
        mp[l] += hl;
        let mut mm = x.to_vec();
        mm[k] -= hk;
        mm[l] -= hl;
        Ok((f(&pp)? - f(&pm)? - f(&mp)? + f(&mm)?) / (4.0 * hk * hl))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_difference_of_square() {
        let f = |x: &[f64]| Ok(x[0] * x[0]);
        let d = first(f, &[3.0], 0, 1e-4).unwrap();
        assert!((d - 6.0).abs() <= 1e-7);
    }

    #[test]
    fn first_difference_of_reciprocal() {
        let f = |x: &[f64]| Ok(1.0 / x[0]);
        let d = first(f, &[2.0], 0, 1e-4).unwrap();
        assert!((d + 0.25).abs() <= 1e-7);
    }

    #[test]
    fn second_difference_pure_and_mixed() {
        let f = |x: &[f64]| Ok(x[0] * x[0] * x[1]);
        let d2 = second(&f, &[1.5, 2.0], 0, 0, 1e-4, 1e-4).unwrap();
        assert!((d2 - 4.0).abs() <= 1e-5);
        let dm = second(&f, &[1.5, 2.0], 0, 1, 1e-4, 1e-4).unwrap();
        assert!((dm - 3.0).abs() <= 1e-6);
    }
}
