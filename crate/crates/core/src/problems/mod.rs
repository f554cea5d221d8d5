//! Seeded problem generators.
//!
//! Every generator is a pure function of its seed and parameters: the same
//! [`ProblemSpec`] and seed always rebuild a bit-identical instance, so an
//! instance is stored as its [`InstanceDescriptor`] rather than its arrays.

pub mod basic;
pub mod counterexample;
pub mod curve;
pub mod dual_entropy;
pub mod lrmc;
pub mod mle;
pub mod nmf;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{
    evaluate_composite, matrix_to_vec, CompositeProblem, CostModel, EssentialMetric, Layout, Point, ProxCost,
    ReferenceSolution,
};
use crate::prox::{AffineProjector, ProxOperator};
use crate::sampling::{gaussian_matrix, gaussian_vector, rng, simplex_vector};

pub use basic::{LeastSquares, Logistic, Quadratic, Quartic, ScaledSquare};
pub use counterexample::{counterexample_f, Counterexample};
pub use curve::CurveLength;
pub use dual_entropy::EntropyDual;
pub use lrmc::MaskedSquares;
pub use mle::LogDetMle;
pub use nmf::FactorizationLoss;

/// Generator parameters for every shipped problem family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `1/2 x^T Q x - b^T x` with spectrum spread geometrically over `[1, condition]`.
    Quadratic { n: usize, condition: f64 },
    /// `1/2 ||Ax - b||^2` with `A` of size `rows x dim`.
    LeastSquares { rows: usize, dim: usize },
    Logistic { dim: usize, samples: usize },
    Quartic { start: f64 },
    Counterexample { start: f64 },
    Mle { n: usize, lower: f64, upper: f64, samples: usize },
    /// `radius` defaults to `rank`.
    Lrmc {
        n: usize,
        rank: usize,
        fraction: f64,
        #[serde(default)]
        radius: Option<f64>,
    },
    MinCurve { m: usize, n: usize },
    Nmf { n: usize, rank: usize },
    DualEntropy { m: usize, n: usize },
}

/// The five benchmark families of the experiment suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Mle,
    Lrmc,
    MinCurve,
    Nmf,
    DualEntropy,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] = [
        Benchmark::Mle,
        Benchmark::Lrmc,
        Benchmark::MinCurve,
        Benchmark::Nmf,
        Benchmark::DualEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Mle => "mle",
            Benchmark::Lrmc => "lrmc",
            Benchmark::MinCurve => "min_curve",
            Benchmark::Nmf => "nmf",
            Benchmark::DualEntropy => "dual_entropy",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Benchmark::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown benchmark '{s}'")))
    }
}

/// Problem sizes: small enough for a laptop, or the larger published ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl ProblemSpec {
    pub fn benchmark(b: Benchmark, scale: Scale) -> ProblemSpec {
        match (b, scale) {
            (Benchmark::Mle, Scale::Desk) => ProblemSpec::Mle {
                n: 50,
                lower: 0.1,
                upper: 10.0,
                samples: 50,
            },
            (Benchmark::Mle, Scale::Paper) => ProblemSpec::Mle {
                n: 100,
                lower: 0.1,
                upper: 10.0,
                samples: 50,
            },
            (Benchmark::Lrmc, Scale::Desk) => ProblemSpec::Lrmc {
                n: 60,
                rank: 10,
                fraction: 0.2,
                radius: None,
            },
            (Benchmark::Lrmc, Scale::Paper) => ProblemSpec::Lrmc {
                n: 100,
                rank: 20,
                fraction: 0.2,
                radius: None,
            },
            (Benchmark::MinCurve, Scale::Desk) => ProblemSpec::MinCurve { m: 20, n: 100 },
            (Benchmark::MinCurve, Scale::Paper) => ProblemSpec::MinCurve { m: 50, n: 200 },
            (Benchmark::Nmf, Scale::Desk) => ProblemSpec::Nmf { n: 60, rank: 10 },
            (Benchmark::Nmf, Scale::Paper) => ProblemSpec::Nmf { n: 100, rank: 20 },
            (Benchmark::DualEntropy, Scale::Desk) => ProblemSpec::DualEntropy { m: 100, n: 50 },
            (Benchmark::DualEntropy, Scale::Paper) => ProblemSpec::DualEntropy { m: 500, n: 100 },
        }
    }

    /// Short identifier used in file names.
    pub fn slug(&self) -> String {
        match self {
            ProblemSpec::Quadratic { n, condition } => format!("quadratic_n{n}_k{condition}"),
            ProblemSpec::LeastSquares { rows, dim } => format!("least_squares_{rows}x{dim}"),
            ProblemSpec::Logistic { dim, samples } => format!("logistic_d{dim}_s{samples}"),
            ProblemSpec::Quartic { start } => format!("quartic_x{start}"),
            ProblemSpec::Counterexample { start } => format!("counterexample_x{start}"),
            ProblemSpec::Mle {
                n,
                lower,
                upper,
                samples,
            } => format!("mle_n{n}_l{lower}_u{upper}_m{samples}"),
            ProblemSpec::Lrmc {
                n,
                rank,
                fraction,
                radius,
            } => match radius {
                Some(r) => format!("lrmc_n{n}_r{rank}_f{fraction}_rad{r}"),
                None => format!("lrmc_n{n}_r{rank}_f{fraction}"),
            },
            ProblemSpec::MinCurve { m, n } => format!("min_curve_m{m}_n{n}"),
            ProblemSpec::Nmf { n, rank } => format!("nmf_n{n}_r{rank}"),
            ProblemSpec::DualEntropy { m, n } => format!("dual_entropy_m{m}_n{n}"),
        }
    }

    pub fn build(&self, seed: u64) -> Result<ProblemInstance> {
        match *self {
            ProblemSpec::Quadratic { n, condition } => make_quadratic(seed, n, condition),
            ProblemSpec::LeastSquares { rows, dim } => make_least_squares(seed, rows, dim),
            ProblemSpec::Logistic { dim, samples } => make_logistic(seed, dim, samples),
            ProblemSpec::Quartic { start } => Ok(make_quartic_from(start)),
            ProblemSpec::Counterexample { start } => Ok(make_counterexample(start)),
            ProblemSpec::Mle {
                n,
                lower,
                upper,
                samples,
            } => make_mle(seed, n, lower, upper, samples),
            ProblemSpec::Lrmc {
                n,
                rank,
                fraction,
                radius,
            } => make_lrmc_with_radius(seed, n, rank, fraction, radius.unwrap_or(rank as f64)),
            ProblemSpec::MinCurve { m, n } => make_min_curve(seed, m, n),
            ProblemSpec::Nmf { n, rank } => make_nmf(seed, n, rank),
            ProblemSpec::DualEntropy { m, n } => make_dual_entropy(seed, m, n),
        }
    }
}

/// What is needed to regenerate an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub seed: u64,
    pub spec: ProblemSpec,
}

impl InstanceDescriptor {
    pub fn build(&self) -> Result<ProblemInstance> {
        self.spec.build(self.seed)
    }
}

/// A generated problem with its starting point and known facts.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub problem: CompositeProblem,
    pub spec: ProblemSpec,
    pub seed: u64,
    pub x0: Point,
    /// Global Lipschitz constant of the gradient (on the feasible set), when known.
    pub lipschitz: Option<f64>,
    pub convex: bool,
    pub globally_smooth: bool,
    /// Closed-form solution, when one exists.
    pub reference: Option<ReferenceSolution>,
}

impl ProblemInstance {
    pub fn descriptor(&self) -> InstanceDescriptor {
        InstanceDescriptor {
            seed: self.seed,
            spec: self.spec.clone(),
        }
    }
}

fn check_positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
    }
    Ok(())
}

fn closed_form(p: &CompositeProblem, x: Point, provenance: &str) -> Result<ReferenceSolution> {
    let f_star = evaluate_composite(p, &x)?;
    Ok(ReferenceSolution {
        x_star: x.as_slice().to_vec(),
        f_star,
        tolerance: 1e-12 * (1.0 + f_star.abs()),
        provenance: provenance.into(),
        low_confidence: false,
    })
}

fn smooth_instance(
    spec: ProblemSpec,
    seed: u64,
    f: Arc<dyn crate::problem::SmoothFunction>,
    x0: Point,
    lipschitz: Option<f64>,
) -> ProblemInstance {
    let label = spec.slug();
    ProblemInstance {
        problem: CompositeProblem::smooth(f, label),
        spec,
        seed,
        x0,
        lipschitz,
        convex: true,
        globally_smooth: true,
        reference: None,
    }
}

pub fn make_quadratic(seed: u64, n: usize, condition: f64) -> Result<ProblemInstance> {
    check_positive("n", n)?;
    if !(condition >= 1.0) {
        return Err(Error::InvalidParameter(format!("condition number {condition} < 1")));
    }
    let mut r = rng(seed);
    let basis = gaussian_matrix(&mut r, n, n).qr().q();
    let b = gaussian_vector(&mut r, n);
    let spectrum = DVector::from_fn(n, |i, _| {
        if n == 1 {
            condition
        } else {
            condition.powf(i as f64 / (n - 1) as f64)
        }
    });
    let q = &basis * DMatrix::from_diagonal(&spectrum) * basis.transpose();
    let q = (&q + q.transpose()) * 0.5;
    let solution = q
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Generation("quadratic is not positive definite".into()))?
        .solve(&b);
    let spec = ProblemSpec::Quadratic { n, condition };
    let mut inst = smooth_instance(spec, seed, Arc::new(Quadratic { q, b }), Point::zeros(n), Some(condition));
    inst.reference = Some(closed_form(&inst.problem, solution, "closed form: Cholesky solve")?);
    Ok(inst)
}

pub fn make_least_squares(seed: u64, rows: usize, dim: usize) -> Result<ProblemInstance> {
    check_positive("rows", rows)?;
    check_positive("dim", dim)?;
    let mut r = rng(seed);
    let a = gaussian_matrix(&mut r, rows, dim);
    let b = gaussian_vector(&mut r, rows);
    let sigma = crate::prox::singular_values(&a)?;
    let lipschitz = sigma[0] * sigma[0];
    let solution = if rows >= dim {
        a.tr_mul(&a).cholesky().map(|c| c.solve(&a.tr_mul(&b)))
    } else {
        None
    };
    let spec = ProblemSpec::LeastSquares { rows, dim };
    let mut inst = smooth_instance(spec, seed, Arc::new(LeastSquares { a, b }), Point::zeros(dim), Some(lipschitz));
    if let Some(x) = solution {
        inst.reference = Some(closed_form(&inst.problem, x, "closed form: normal equations")?);
    }
    Ok(inst)
}

/// Mean logistic loss over `samples` Gaussian feature vectors with random
/// `+-1` labels; `L = ||A||_2^2 / (4 samples)`.
pub fn make_logistic(seed: u64, dim: usize, samples: usize) -> Result<ProblemInstance> {
    check_positive("dim", dim)?;
    check_positive("samples", samples)?;
    let mut r = rng(seed);
    let a = gaussian_matrix(&mut r, samples, dim);
    let labels = DVector::from_fn(samples, |_, _| if rand::Rng::random_bool(&mut r, 0.5) { 1.0 } else { -1.0 });
    let sigma = crate::prox::singular_values(&a)?;
    let lipschitz = sigma[0] * sigma[0] / (4.0 * samples as f64);
    let spec = ProblemSpec::Logistic { dim, samples };
    Ok(smooth_instance(spec, seed, Arc::new(Logistic { a, labels }), Point::zeros(dim), Some(lipschitz)))
}

pub fn make_quartic() -> ProblemInstance {
    make_quartic_from(1.0)
}

/// `x^4` from `start`; smooth only on bounded sets.
pub fn make_quartic_from(start: f64) -> ProblemInstance {
    let mut inst = smooth_instance(
        ProblemSpec::Quartic { start },
        0,
        Arc::new(Quartic),
        Point::from_element(1, start),
        None,
    );
    inst.globally_smooth = false;
    inst.reference = Some(ReferenceSolution {
        x_star: vec![0.0],
        f_star: 0.0,
        tolerance: 0.0,
        provenance: "closed form".into(),
        low_confidence: false,
    });
    inst
}

pub fn make_counterexample(start: f64) -> ProblemInstance {
    let mut inst = smooth_instance(
        ProblemSpec::Counterexample { start },
        0,
        Arc::new(Counterexample),
        Point::from_element(1, start),
        Some(1.0),
    );
    inst.reference = Some(ReferenceSolution {
        x_star: vec![0.0],
        f_star: 0.0,
        tolerance: 0.0,
        provenance: "closed form".into(),
        low_confidence: false,
    });
    inst
}

pub fn make_mle(seed: u64, n: usize, lower: f64, upper: f64, samples: usize) -> Result<ProblemInstance> {
    check_positive("n", n)?;
    check_positive("samples", samples)?;
    if !(lower > 0.0 && lower < upper) {
        return Err(Error::InvalidParameter(format!("need 0 < l < u, got l={lower}, u={upper}")));
    }
    let mut r = rng(seed);
    let y = mle::sample_covariance(&mut r, n, samples);
    let x0 = DMatrix::<f64>::identity(n, n) * (0.5 * (lower + upper));
    let spec = ProblemSpec::Mle {
        n,
        lower,
        upper,
        samples,
    };
    let problem = CompositeProblem::new(
        Arc::new(LogDetMle { n, y }),
        Arc::new(ProxOperator::SpectralBox { n, lower, upper }),
        CostModel {
            prox: ProxCost::Eigendecomposition,
            essential: EssentialMetric::Eigendecompositions,
        },
        Layout::Matrix { rows: n, cols: n },
        spec.slug(),
    );
    Ok(ProblemInstance {
        problem,
        spec,
        seed,
        x0: Point::from_vec(matrix_to_vec(&x0)),
        lipschitz: Some(1.0 / (lower * lower)),
        convex: true,
        globally_smooth: false,
        reference: None,
    })
}

/// Matrix completion with nuclear-norm radius equal to `rank`.
pub fn make_lrmc(seed: u64, n: usize, rank: usize, fraction: f64) -> Result<ProblemInstance> {
    make_lrmc_with_radius(seed, n, rank, fraction, rank as f64)
}

pub fn make_lrmc_with_radius(seed: u64, n: usize, rank: usize, fraction: f64, radius: f64) -> Result<ProblemInstance> {
    check_positive("n", n)?;
    check_positive("rank", rank)?;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("fraction {fraction} outside (0, 1]")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius {radius} must be positive")));
    }
    let mut r = rng(seed);
    let u = gaussian_matrix(&mut r, n, rank);
    let v = gaussian_matrix(&mut r, n, rank);
    let truth = matrix_to_vec(&(u * v.transpose()));
    let observed = lrmc::sample_mask(&mut r, n * n, fraction);
    let spec = ProblemSpec::Lrmc {
        n,
        rank,
        fraction,
        radius: (radius != rank as f64).then_some(radius),
    };
    let problem = CompositeProblem::new(
        Arc::new(MaskedSquares::new(n, n, &truth, observed)),
        Arc::new(ProxOperator::NuclearBall {
            rows: n,
            cols: n,
            radius,
        }),
        CostModel {
            prox: ProxCost::Svd,
            essential: EssentialMetric::Svds,
        },
        Layout::Matrix { rows: n, cols: n },
        spec.slug(),
    );
    Ok(ProblemInstance {
        problem,
        spec,
        seed,
        x0: Point::zeros(n * n),
        lipschitz: Some(1.0),
        convex: true,
        globally_smooth: true,
        reference: None,
    })
}

/// Ground truth `A = U V^T` of a matrix-completion instance, for tests.
pub fn lrmc_truth(seed: u64, n: usize, rank: usize) -> DMatrix<f64> {
    let mut r = rng(seed);
    let u = gaussian_matrix(&mut r, n, rank);
    let v = gaussian_matrix(&mut r, n, rank);
    u * v.transpose()
}

const RANK_RETRIES: usize = 10;

pub fn make_min_curve(seed: u64, m: usize, n: usize) -> Result<ProblemInstance> {
    check_positive("m", m)?;
    check_positive("n", n)?;
    if m > n {
        return Err(Error::InvalidParameter(format!("need m <= n, got m={m}, n={n}")));
    }
    let mut r = rng(seed);
    let mut projector = None;
    for _ in 0..RANK_RETRIES {
        let a = gaussian_matrix(&mut r, m, n);
        let w = gaussian_vector(&mut r, n);
        let b = &a * w;
        if let Ok(p) = AffineProjector::new(a, b) {
            projector = Some(p);
            break;
        }
    }
    let projector = projector
        .ok_or_else(|| Error::Generation(format!("no full row rank matrix after {RANK_RETRIES} draws")))?;
    let x0 = projector.project(&Point::zeros(n));
    let spec = ProblemSpec::MinCurve { m, n };
    let problem = CompositeProblem::new(
        Arc::new(CurveLength { n }),
        Arc::new(ProxOperator::Affine(projector)),
        CostModel {
            prox: ProxCost::Projection,
            essential: EssentialMetric::Projections,
        },
        Layout::Vector,
        spec.slug(),
    );
    Ok(ProblemInstance {
        problem,
        spec,
        seed,
        x0,
        lipschitz: Some(5.0),
        convex: true,
        globally_smooth: true,
        reference: None,
    })
}

pub fn make_nmf(seed: u64, n: usize, rank: usize) -> Result<ProblemInstance> {
    check_positive("n", n)?;
    check_positive("rank", rank)?;
    let mut r = rng(seed);
    let b = gaussian_matrix(&mut r, n, rank).map(|v| v.max(0.0));
    let c = gaussian_matrix(&mut r, n, rank).map(|v| v.max(0.0));
    let a = &b * c.transpose();
    let u0 = gaussian_matrix(&mut r, n, rank).map(f64::abs);
    let v0 = gaussian_matrix(&mut r, n, rank).map(f64::abs);
    let spec = ProblemSpec::Nmf { n, rank };
    let problem = CompositeProblem::new(
        Arc::new(FactorizationLoss { a, rank }),
        Arc::new(ProxOperator::NonNegative),
        CostModel {
            prox: ProxCost::Projection,
            essential: EssentialMetric::Products {
                grad_units: 3,
                value_units: 1,
            },
        },
        Layout::Factors { rows: n, rank },
        spec.slug(),
    );
    Ok(ProblemInstance {
        problem,
        spec,
        seed,
        x0: FactorizationLoss::join(&u0, &v0),
        lipschitz: None,
        convex: false,
        globally_smooth: false,
        reference: None,
    })
}

/// Nonnegative factors `(B, C)` with `A = B C^T` of a factorization instance, for tests.
pub fn nmf_truth(seed: u64, n: usize, rank: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut r = rng(seed);
    let b = gaussian_matrix(&mut r, n, rank).map(|v| v.max(0.0));
    let c = gaussian_matrix(&mut r, n, rank).map(|v| v.max(0.0));
    (b, c)
}

pub fn make_dual_entropy(seed: u64, m: usize, n: usize) -> Result<ProblemInstance> {
    check_positive("m", m)?;
    check_positive("n", n)?;
    let mut r = rng(seed);
    let a = gaussian_matrix(&mut r, m, n);
    let w = simplex_vector(&mut r, n);
    let b = &a * w;
    let spec = ProblemSpec::DualEntropy { m, n };
    let problem = CompositeProblem::new(
        Arc::new(EntropyDual { a, b }),
        Arc::new(ProxOperator::DualEntropyDomain { m }),
        CostModel {
            prox: ProxCost::Projection,
            essential: EssentialMetric::Products {
                grad_units: 2,
                value_units: 1,
            },
        },
        Layout::MultipliersAndScalar { m },
        spec.slug(),
    );
    Ok(ProblemInstance {
        problem,
        spec,
        seed,
        x0: Point::zeros(m + 1),
        lipschitz: None,
        convex: true,
        globally_smooth: false,
        reference: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{finite_difference_gradient, FdStep, SmoothFunction};

    #[test]
    fn quartic_gradient_at_two() {
        let g = Quartic.gradient(&Point::from_element(1, 2.0));
        assert_eq!(g[0], 32.0);
        assert!(!make_quartic().globally_smooth);
    }

    #[test]
    fn logistic_at_origin_is_log_two() {
        let inst = make_logistic(3, 5, 40).unwrap();
        let v = inst.problem.f.value(&Point::zeros(5));
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn single_sample_logistic_lipschitz_is_quarter_norm_squared() {
        let inst = make_logistic(9, 4, 1).unwrap();
        let Some(l) = inst.lipschitz else { panic!() };
        let f = inst.problem.f.clone();
        let probe = Point::from_element(4, 1.0);
        // the single row a: gradient at 0 is -y a / 2, so ||a|| = 2 ||grad||
        let a_norm = 2.0 * f.gradient(&Point::zeros(4)).norm();
        assert!((l - 0.25 * a_norm * a_norm).abs() < 1e-12 * l.max(1.0), "{l}");
        assert!(f.value(&probe).is_finite());
    }

    #[test]
    fn least_squares_gradient_is_normal_residual() {
        let inst = make_least_squares(1, 8, 3).unwrap();
        let x = Point::from_vec(vec![0.5, -1.0, 2.0]);
        let g = inst.problem.f.gradient(&x);
        let fd = finite_difference_gradient(inst.problem.f.as_ref(), &x, FdStep::default()).unwrap();
        assert!((g - fd).norm() < 1e-6);
    }

    #[test]
    fn quadratic_reference_is_stationary() {
        let inst = make_quadratic(5, 20, 100.0).unwrap();
        let x = inst.reference.as_ref().unwrap().point();
        assert!(inst.problem.f.gradient(&x).norm() < 1e-10);
    }

    #[test]
    fn regeneration_is_bit_identical() {
        for b in Benchmark::ALL {
            let spec = ProblemSpec::benchmark(b, Scale::Desk);
            let one = spec.build(11).unwrap();
            let two = spec.build(11).unwrap();
            let x = &one.x0;
            assert_eq!(one.x0, two.x0);
            assert_eq!(one.problem.f.value(x).to_bits(), two.problem.f.value(x).to_bits());
            assert_eq!(one.problem.f.gradient(x), two.problem.f.gradient(x));
        }
    }

    #[test]
    fn descriptor_round_trips_through_json() {
        let spec = ProblemSpec::benchmark(Benchmark::Lrmc, Scale::Desk);
        let inst = spec.build(4).unwrap();
        let text = serde_json::to_string(&inst.descriptor()).unwrap();
        let back: InstanceDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, inst.descriptor());
        let rebuilt = back.build().unwrap();
        assert_eq!(rebuilt.problem.f.value(&inst.x0), inst.problem.f.value(&inst.x0));
    }

    #[test]
    fn benchmark_names_parse() {
        for b in Benchmark::ALL {
            assert_eq!(b.name().parse::<Benchmark>().unwrap(), b);
        }
        assert!("nope".parse::<Benchmark>().is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(make_mle(0, 4, 1.0, 0.5, 3).is_err());
        assert!(make_lrmc(0, 4, 1, 0.0).is_err());
        assert!(make_min_curve(0, 5, 4).is_err());
        assert!(make_quadratic(0, 0, 2.0).is_err());
    }
}
