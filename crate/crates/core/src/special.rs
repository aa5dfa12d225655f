//! Special functions used by the L-value routes and the Euler-product tails.

use num_complex::Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `(e^y − 1)/y`, continuous at 0.
pub fn exprel(y: f64) -> f64 {
    if y.abs() < 1e-5 {
        1.0 + y / 2.0 + y * y / 6.0
    } else {
        y.exp_m1() / y
    }
}

/// `e^{ia} − 1` without cancellation for small `a`.
#[inline]
pub fn expm1_i(a: f64) -> Complex64 {
    let (s, c) = (a / 2.0).sin_cos();
    Complex64::new(-2.0 * s * s, 2.0 * s * c)
}

/// Principal `log(1 + z)`, accurate for small `|z|`.
#[inline]
pub fn clog1p(z: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex64::new(re, im)
}

// B_2, B_4, …, B_20
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const EM_SHIFT: usize = 20;

/// Regularized Hurwitz zeta `ζ(s, a) − 1/(s − 1)` for real `s > 0`, `a > 0`.
///
/// Finite at `s = 1`, where it equals `−ψ(a)`. Euler–Maclaurin after
/// shifting the argument by 20.
pub fn hurwitz_zeta_reg(s: f64, a: f64) -> f64 {
    let mut head = crate::summation::NeumaierSum::new();
    for k in 0..EM_SHIFT {
        head.add((a + k as f64).powf(-s));
    }
    let m = a + EM_SHIFT as f64;
    let lm = m.ln();
    head.add(-lm * exprel((1.0 - s) * lm));
    let ms = m.powf(-s);
    head.add(ms / 2.0);
    // Σ B_2j/(2j)! · s(s+1)…(s+2j−2) · m^{−s−2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut pw = ms / m;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let jj = j + 1;
        head.add(b / fact * rising * pw);
        let k = 2 * jj;
        rising *= (s + k as f64 - 1.0) * (s + k as f64);
        fact *= (k + 1) as f64 * (k + 2) as f64;
        pw /= m * m;
    }
    head.total()
}

pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    hurwitz_zeta_reg(s, a) + 1.0 / (s - 1.0)
}

pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

fn zeta_int_table() -> &'static [f64; 41] {
    static T: std::sync::OnceLock<[f64; 41]> = std::sync::OnceLock::new();
    T.get_or_init(|| {
        let mut t = [0.0; 41];
        for (k, v) in t.iter_mut().enumerate().skip(2) {
            *v = zeta(k as f64);
        }
        t
    })
}

/// `(Γ(1+w) − 1)/w` for `|w| ≤ 1/4`, from the Taylor series of `log Γ(1+w)`.
fn gamma1p_m1_over_w(w: f64) -> f64 {
    let z = zeta_int_table();
    // log Γ(1+w)/w = −γ + Σ_{k≥2} (−1)^k ζ(k) w^{k−1}/k
    let mut acc = -EULER_GAMMA;
    let mut pw = 1.0;
    for (k, zk) in z.iter().enumerate().skip(2) {
        pw *= -w;
        acc += -(zk * pw) / k as f64;
    }
    let lg = acc * w;
    acc * exprel(lg)
}

/// Upper incomplete gamma `Γ(w, c)` for real `w > −1` and `c > 0`.
pub fn upper_gamma(w: f64, c: f64) -> f64 {
    assert!(c > 0.0, "upper_gamma needs c > 0");
    if c >= 2.0 {
        upper_gamma_cf(w, c)
    } else {
        upper_gamma_series(w, c)
    }
}

fn upper_gamma_cf(w: f64, c: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = c + 1.0 - w;
    let mut cc = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - w);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        cc = b + an / cc;
        if cc.abs() < TINY {
            cc = TINY;
        }
        d = 1.0 / d;
        let del = d * cc;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-c + w * c.ln()).exp() * h
}

fn upper_gamma_series(w: f64, c: f64) -> f64 {
    let lc = c.ln();
    let cw = (w * lc).exp();
    // Σ_{n≥1} (−c)^n / (n! (w+n))
    let mut tail = 0.0;
    let mut term = 1.0;
    for n in 1..200 {
        term *= -c / n as f64;
        let t = term / (w + n as f64);
        tail += t;
        if t.abs() < 1e-18 * tail.abs().max(1e-300) {
            break;
        }
    }
    if w.abs() <= 0.25 {
        // Γ(w) − c^w/w = (Γ(1+w) − 1)/w − (c^w − 1)/w
        gamma1p_m1_over_w(w) - lc * exprel(w * lc) - cw * tail
    } else {
        gamma(w) - cw * (1.0 / w + tail)
    }
}

/// Nodes and weights of `n`-point Gauss–Laguerre quadrature for `∫₀^∞ f(s) e^{−s} ds`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n {
        if i == 0 {
            z = 3.0 / (1.0 + 2.4 * nf);
        } else if i == 1 {
            z += 15.0 / (1.0 + 2.5 * nf);
        } else {
            let ai = (i - 1) as f64;
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2]);
        }
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 - 1.0 - z) * p2 - (j as f64 - 1.0) * p3) / j as f64;
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // reference values from an arbitrary-precision library, frozen
    #[test]
    fn hurwitz_reference_values() {
        assert_relative_eq!(zeta(2.0), std::f64::consts::PI.powi(2) / 6.0, max_relative = 1e-15);
        assert_relative_eq!(zeta(0.75), -3.441285386945223, max_relative = 1e-13);
        assert_relative_eq!(hurwitz_zeta(1.5, 0.25), 10.213055360466601, max_relative = 1e-13);
        assert_relative_eq!(hurwitz_zeta(3.0, 1.0 / 7.0), 343.84076103432916, max_relative = 1e-13);
        // ψ(1) = −γ, ψ(1/2) = −γ − 2 ln 2
        assert_relative_eq!(hurwitz_zeta_reg(1.0, 1.0), EULER_GAMMA, max_relative = 1e-14);
        assert_relative_eq!(
            hurwitz_zeta_reg(1.0, 0.5),
            EULER_GAMMA + 2.0 * std::f64::consts::LN_2,
            max_relative = 1e-14
        );
    }

    #[test]
    fn regularized_zeta_is_continuous_at_one() {
        let a = 0.3;
        let l = hurwitz_zeta_reg(1.0 - 1e-7, a);
        let r = hurwitz_zeta_reg(1.0 + 1e-7, a);
        let m = hurwitz_zeta_reg(1.0, a);
        assert!((l - m).abs() < 1e-5 && (r - m).abs() < 1e-5);
    }

    #[test]
    fn incomplete_gamma_reference_values() {
        let cases = [
            (0.5, 0.1, 1.1604624847937442),
            (0.5, 3.0, 0.025356509323463443),
            (0.0, 0.01, 4.037929576538114),
            (0.0, 2.5, 0.024914917870269735),
            (1e-4, 0.3, 0.9056405779130802),
            (-1e-4, 0.3, 0.9057127300047336),
            (-0.4, 0.05, 4.836795825789786),
            (-0.55, 1.9, 0.033755136627128177),
            (1.5, 0.001, 0.8862058562462845),
            (1.5, 40.0, 2.720_076_349_931_951e-17),
            (0.75, 1.99, 0.10537290478125514),
            (0.75, 2.01, 0.10309679530865137),
        ];
        for (w, c, want) in cases {
            let got = upper_gamma(w, c);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn laguerre_integrates_polynomials() {
        let (x, w) = gauss_laguerre(32);
        let moment = |k: i32| x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum::<f64>();
        assert_relative_eq!(moment(0), 1.0, max_relative = 1e-13);
        assert_relative_eq!(moment(1), 1.0, max_relative = 1e-13);
        assert_relative_eq!(moment(6), 720.0, max_relative = 1e-12);
        assert_relative_eq!(moment(20), 2.43290200817664e18, max_relative = 1e-10);
    }

    #[test]
    fn complex_helpers() {
        let z = Complex64::new(1e-12, -3e-13);
        assert_relative_eq!(clog1p(z).re, (Complex64::new(1.0, 0.0) + z).ln().re, max_relative = 1e-3);
        assert_relative_eq!(clog1p(z).im, -3e-13, max_relative = 1e-10);
        let e = expm1_i(1e-9);
        assert_relative_eq!(e.re, -5e-19, max_relative = 1e-9);
        assert_relative_eq!(e.im, 1e-9, max_relative = 1e-12);
        assert!((expm1_i(2.0) - (Complex64::new(0.0, 2.0).exp() - 1.0)).norm() < 1e-15);
    }
}
