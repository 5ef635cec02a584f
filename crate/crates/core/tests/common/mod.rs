use halfstokes::quad::{
    convolve_tangential, integrate, integrate_breaks, integrate_nd, integrate_singular_1d,
    Endpoint, QuadResult, QuadSpec,
};
use statrs::function::beta::beta;

const PI: f64 = std::f64::consts::PI;

// Transcendental truths are closed forms evaluated to 17 digits in extended precision.
pub type Case = (&'static str, Box<dyn Fn(&QuadSpec) -> QuadResult>, f64);

pub fn library() -> Vec<Case> {
    let sing = |p: f64, at: Endpoint, f: fn(f64, f64) -> f64| {
        move |s: &QuadSpec| integrate_singular_1d(f, 0.0, 1.0, p, at, s).unwrap()
    };
    vec![
        (
            "x^3",
            Box::new(|s| integrate(|x| x * x * x, 0.0, 1.0, s).unwrap()),
            0.25,
        ),
        (
            "sin",
            Box::new(|s| integrate(f64::sin, 0.0, PI, s).unwrap()),
            2.0,
        ),
        (
            "gaussian",
            Box::new(|s| integrate(|x| (-x * x).exp(), -5.0, 5.0, s).unwrap()),
            1.772_453_850_902_791,
        ),
        (
            "exp",
            Box::new(|s| integrate(f64::exp, 0.0, 1.0, s).unwrap()),
            std::f64::consts::E - 1.0,
        ),
        (
            "lorentzian",
            Box::new(|s| integrate(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, s).unwrap()),
            PI / 4.0,
        ),
        (
            "x^-0.5",
            Box::new(sing(-0.5, Endpoint::Lower, |_, d| d.powf(-0.5))),
            2.0,
        ),
        (
            "x^-0.9",
            Box::new(sing(-0.9, Endpoint::Lower, |_, d| d.powf(-0.9))),
            10.0,
        ),
        (
            "x^-0.1",
            Box::new(sing(-0.1, Endpoint::Lower, |_, d| d.powf(-0.1))),
            1.0 / 0.9,
        ),
        (
            "(1-x)^-0.5",
            Box::new(sing(-0.5, Endpoint::Upper, |_, d| d.powf(-0.5))),
            2.0,
        ),
        (
            "x^-0.5 e^-x",
            Box::new(sing(-0.5, Endpoint::Lower, |s, d| {
                d.powf(-0.5) * (-s).exp()
            })),
            1.493_648_265_624_854,
        ),
        (
            "x^-0.9 e^-x on [0,2]",
            Box::new(|s| {
                integrate_singular_1d(
                    |x, d| d.powf(-0.9) * (-x).exp(),
                    0.0,
                    2.0,
                    -0.9,
                    Endpoint::Lower,
                    s,
                )
                .unwrap()
            }),
            9.459_529_730_555_903,
        ),
        (
            "x^-0.4 (1-x)^2",
            Box::new(sing(-0.4, Endpoint::Lower, |x, d| {
                d.powf(-0.4) * (1.0 - x).powi(2)
            })),
            beta(0.6, 3.0),
        ),
        (
            "x^2 e^-x on [0,20]",
            Box::new(|s| integrate(|x| x * x * (-x).exp(), 0.0, 20.0, s).unwrap()),
            2.0 - (-20f64).exp() * 442.0,
        ),
        (
            "x^-0.5 e^-x²/0.04",
            Box::new(sing(-0.5, Endpoint::Lower, |x, d| {
                d.powf(-0.5) * (-x * x / 0.04).exp()
            })),
            0.810_711_021_467_826_1,
        ),
        (
            "|x|",
            Box::new(|s| integrate_breaks(f64::abs, -1.0, 1.0, &[0.0], s).unwrap()),
            1.0,
        ),
        (
            "xy",
            Box::new(|s| integrate_nd(|x| x[0] * x[1], &[(0.0, 1.0); 2], s).unwrap()),
            0.25,
        ),
        (
            "2-D gaussian",
            Box::new(|s| {
                integrate_nd(
                    |x| (-(x[0] * x[0] + x[1] * x[1])).exp(),
                    &[(-6.0, 6.0); 2],
                    s,
                )
                .unwrap()
            }),
            std::f64::consts::PI,
        ),
        (
            "(x+y+z)^2",
            Box::new(|s| {
                integrate_nd(|x| (x[0] + x[1] + x[2]).powi(2), &[(0.0, 1.0); 3], s).unwrap()
            }),
            2.5,
        ),
        (
            "sin x sin y sin z",
            Box::new(|s| {
                integrate_nd(|x| x[0].sin() * x[1].sin() * x[2].sin(), &[(0.0, PI); 3], s).unwrap()
            }),
            8.0,
        ),
        (
            "heat convolution of z₁²",
            Box::new(|s| convolve_tangential(&[0.7, -0.3], 0.2, |z| z[0] * z[0], s).unwrap()),
            0.49 + 0.4,
        ),
    ]
}
