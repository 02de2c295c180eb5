//! The smooth step `S(t) = f(t) / (f(t) + f(1 - t))` with `f(t) = exp(-1/t)`.

fn bump(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn bump_prime(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        bump(t) / (t * t)
    }
}

/// `0` for `t <= 0`, `1` for `t >= 1`, `C^inf` in between.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = bump(t);
        a / (a + bump(1.0 - t))
    }
}

pub fn smoothstep_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let (a, b) = (bump(t), bump(1.0 - t));
    let (da, db) = (bump_prime(t), -bump_prime(1.0 - t));
    (da * b - a * db) / ((a + b) * (a + b))
}

/// Cutoff equal to one on `|x| <= 1` and zero on `|x| >= 2`.
pub fn cutoff(x: f64) -> f64 {
    smoothstep(2.0 - x.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_symmetry() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        for i in 1..20 {
            let t = i as f64 / 20.0;
            assert!((smoothstep(t) + smoothstep(1.0 - t) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_differences() {
        assert!((smoothstep_prime(0.5) - 2.0).abs() < 1e-12);
        let h = 1e-6;
        for i in 1..50 {
            let t = i as f64 / 50.0;
            let fd = (smoothstep(t + h) - smoothstep(t - h)) / (2.0 * h);
            assert!((fd - smoothstep_prime(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff(0.3), 1.0);
        assert_eq!(cutoff(-1.0), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
        assert_eq!(cutoff(-7.0), 0.0);
        let max_slope = (0..1000)
            .map(|i| smoothstep_prime(i as f64 / 1000.0))
            .fold(0.0, f64::max);
        assert!(max_slope <= 2.0 + 1e-12);
    }
}
