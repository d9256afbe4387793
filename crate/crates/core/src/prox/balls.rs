use crate::error::{Error, Result};
use crate::numerics::C64;

/// Entrywise phase-preserving clip to magnitude `r`.
pub fn proj_linf_ball(x: &[C64], r: f64) -> Vec<C64> {
    let mut out = x.to_vec();
    proj_linf_ball_in_place(&mut out, r);
    out
}

pub fn proj_linf_ball_in_place(x: &mut [C64], r: f64) {
    let r2 = r * r;
    for z in x.iter_mut() {
        let m2 = z.norm_sqr();
        if m2 > r2 {
            *z *= r / m2.sqrt();
        }
    }
}

/// Projection onto `{y : ||y - c|| <= r}`.
pub fn proj_l2_ball(x: &[C64], c: &[C64], r: f64) -> Result<Vec<C64>> {
    if x.len() != c.len() {
        return Err(Error::Sizing(format!(
            "point of length {} and centre of length {} differ",
            x.len(),
            c.len()
        )));
    }
    let d: f64 = x.iter().zip(c).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    if d <= r {
        return Ok(x.to_vec());
    }
    let s = r / d;
    Ok(x.iter().zip(c).map(|(a, b)| b + (a - b) * s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linf_examples() {
        let x = vec![C64::new(0.1, 0.2), C64::new(-0.3, 0.0)];
        assert_eq!(proj_linf_ball(&x, 1.0), x);
        let y = proj_linf_ball(&[C64::new(3.0, 4.0), C64::default()], 2.5);
        assert!((y[0] - C64::new(1.5, 2.0)).norm() < 1e-15);
        assert_eq!(y[1], C64::default());
    }

    #[test]
    fn l2_examples() {
        let c = vec![C64::default(); 2];
        let x = vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)];
        let y = proj_l2_ball(&x, &c, 2.5).unwrap();
        assert!((y[0] - C64::new(1.5, 0.0)).norm() < 1e-15);
        assert!((y[1] - C64::new(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(proj_l2_ball(&x, &c, 6.0).unwrap(), x);
        assert!(proj_l2_ball(&x, &c[..1], 1.0).is_err());
    }
}
