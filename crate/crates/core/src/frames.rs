//! Finite frames and their canonical operators.
//!
//! A [`Frame`] holds its vectors as the columns of an `n x K` matrix `V`, so
//! analysis is `V^H f`, synthesis is `V c`, the frame operator is `V V^H` and
//! the cross-Gram `G_{L,R}` is `L^H R`, i.e. `(G)_{k,l} = <r_l, l_k>`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::{hermitian_eigen, numerical_rank, random_cmat, seeded};
use crate::linalg::IndexSet;
use crate::{CMat, CVec, C64, RANK_TOL};

/// Condition number above which the frame operator is inverted through its
/// eigendecomposition instead of a Cholesky factor.
pub const CHOLESKY_COND_CAP: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn is_tight(&self) -> bool {
        (self.lower - self.upper).abs() <= 1e-10 * self.upper
    }
}

/// Riesz bounds, or the spectrum edges of a singular Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszBounds {
    pub lower: f64,
    pub upper: f64,
    pub riesz: bool,
}

/// Window of a Gabor system on `Z_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "window", rename_all = "snake_case")]
pub enum WindowSpec {
    /// `exp(-pi ((x + 1/2) / sqrt(N))^2)` on the circle, unit norm.
    ///
    /// Sampled between grid points: an even window has a Zak-transform zero
    /// on the grid and never gives a frame at critical density `ab = N`.
    Gaussian,
    /// `exp(-pi (x / sqrt(N))^2)` on the circle, unit norm. Even.
    CenteredGaussian,
    /// `(1 + |x|)^{-decay}` on the circle, unit norm.
    Polynomial { decay: f64 },
    /// The unit impulse at 0.
    Delta,
    Explicit { values: Vec<f64> },
}

/// Generator of a translates system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Delta,
    /// `g[0] = 1`, `g[x] = (1 + |x|)^{-decay} / 4` elsewhere.
    Localized { decay: f64 },
    /// `g[0] = 1`, `g[1] = -1`.
    ZeroMean,
    Explicit { values: Vec<f64> },
}

/// Constructor description; every frame built from a spec is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameSpec {
    Onb { n: usize },
    DuplicatedOnb { n: usize, copies: usize },
    Mercedes,
    Gabor { n: usize, a: usize, b: usize, #[serde(flatten)] window: WindowSpec },
    Translates { n: usize, step: usize, #[serde(flatten)] generator: GeneratorSpec },
    PerturbedOnb { n: usize, decay: f64, seed: u64 },
    /// Unit-norm random columns without any decay structure.
    Random { n: usize, k: usize, seed: u64 },
    CanonicalDual { of: Box<FrameSpec> },
}

impl FrameSpec {
    pub fn gabor(n: usize, a: usize, b: usize, window: WindowSpec) -> Self {
        FrameSpec::Gabor { n, a, b, window }
    }

    pub fn translates(n: usize, step: usize, generator: GeneratorSpec) -> Self {
        FrameSpec::Translates { n, step, generator }
    }

    pub fn build(&self) -> Result<Frame> {
        let (vectors, index) = match self {
            FrameSpec::Onb { n } => {
                nonzero(*n, "n")?;
                (CMat::identity(*n, *n), IndexSet::cycle(*n))
            }
            FrameSpec::DuplicatedOnb { n, copies } => {
                nonzero(*n, "n")?;
                nonzero(*copies, "copies")?;
                let mut v = CMat::zeros(*n, n * copies);
                for c in 0..*copies {
                    v.view_mut((0, c * n), (*n, *n)).fill_with_identity();
                }
                (v, IndexSet::cycle(*n).repeated(*copies))
            }
            FrameSpec::Mercedes => {
                let h = 3f64.sqrt() / 2.0;
                let v = CMat::from_row_slice(
                    2,
                    3,
                    &[0.0, -h, h, 1.0, -0.5, -0.5].map(|x| C64::new(x, 0.0)),
                );
                (v, IndexSet::line(3))
            }
            FrameSpec::Gabor { n, a, b, window } => gabor(*n, *a, *b, window)?,
            FrameSpec::Translates { n, step, generator } => translates(*n, *step, generator)?,
            FrameSpec::PerturbedOnb { n, decay, seed } => perturbed_onb(*n, *decay, *seed)?,
            FrameSpec::Random { n, k, seed } => {
                nonzero(*n, "n")?;
                nonzero(*k, "k")?;
                let mut v = random_cmat(*n, *k, &mut seeded(*seed));
                for mut col in v.column_iter_mut() {
                    let norm = col.norm();
                    col /= C64::new(norm, 0.0);
                }
                (v, IndexSet::line(*k))
            }
            FrameSpec::CanonicalDual { of } => {
                let primal = of.build()?;
                let dual = primal.canonical_dual()?;
                return Ok(Frame { spec: Some(self.clone()), ..dual });
            }
        };
        let frame = Frame::new(vectors, index, self.id())?;
        let frame = Frame { spec: Some(self.clone()), ..frame };
        if let FrameSpec::PerturbedOnb { .. } = self {
            frame.frame_bounds()?;
        }
        Ok(frame)
    }

    /// Short identifier used in reports and sidecars.
    pub fn id(&self) -> String {
        match self {
            FrameSpec::Onb { n } => format!("onb(n={n})"),
            FrameSpec::DuplicatedOnb { n, copies } => format!("onb(n={n})x{copies}"),
            FrameSpec::Mercedes => "mercedes".into(),
            FrameSpec::Gabor { n, a, b, window } => {
                let w = match window {
                    WindowSpec::Gaussian => "gaussian".to_string(),
                    WindowSpec::CenteredGaussian => "centered_gaussian".into(),
                    WindowSpec::Polynomial { decay } => format!("poly{decay}"),
                    WindowSpec::Delta => "delta".into(),
                    WindowSpec::Explicit { .. } => "explicit".into(),
                };
                format!("gabor(N={n},a={a},b={b},{w})")
            }
            FrameSpec::Translates { n, step, generator } => {
                let g = match generator {
                    GeneratorSpec::Delta => "delta".to_string(),
                    GeneratorSpec::Localized { decay } => format!("loc{decay}"),
                    GeneratorSpec::ZeroMean => "zero_mean".into(),
                    GeneratorSpec::Explicit { .. } => "explicit".into(),
                };
                format!("translates(N={n},step={step},{g})")
            }
            FrameSpec::PerturbedOnb { n, decay, seed } => {
                format!("perturbed_onb(n={n},s={decay},seed={seed})")
            }
            FrameSpec::Random { n, k, seed } => format!("random(n={n},K={k},seed={seed})"),
            FrameSpec::CanonicalDual { of } => format!("dual({})", of.id()),
        }
    }

    /// The same family at ambient dimension `n`, keeping redundancy fixed.
    ///
    /// Gabor systems are resized with time step 4 and 8 frequency channels.
    pub fn resized(&self, n: usize) -> Option<FrameSpec> {
        match self {
            FrameSpec::Onb { .. } => Some(FrameSpec::Onb { n }),
            FrameSpec::DuplicatedOnb { copies, .. } => Some(FrameSpec::DuplicatedOnb { n, copies: *copies }),
            FrameSpec::Mercedes => None,
            FrameSpec::Gabor { window, .. } => {
                let window = match window {
                    WindowSpec::Explicit { .. } => return None,
                    w => w.clone(),
                };
                (n % 8 == 0).then(|| FrameSpec::Gabor { n, a: 4, b: n / 8, window })
            }
            FrameSpec::Translates { step, generator, .. } => {
                if matches!(generator, GeneratorSpec::Explicit { .. }) || n % step != 0 {
                    return None;
                }
                Some(FrameSpec::Translates { n, step: *step, generator: generator.clone() })
            }
            FrameSpec::PerturbedOnb { decay, seed, .. } => {
                Some(FrameSpec::PerturbedOnb { n, decay: *decay, seed: *seed })
            }
            FrameSpec::Random { n: n0, k, seed } => Some(FrameSpec::Random {
                n,
                k: (k * n).div_ceil(*n0),
                seed: *seed,
            }),
            FrameSpec::CanonicalDual { of } => of
                .resized(n)
                .map(|of| FrameSpec::CanonicalDual { of: Box::new(of) }),
        }
    }
}

fn nonzero(v: usize, what: &str) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidParameter(format!("{what} must be positive")))
    } else {
        Ok(())
    }
}

fn circ(x: usize, n: usize) -> f64 {
    x.min(n - x) as f64
}

fn window_values(n: usize, window: &WindowSpec) -> Result<Vec<f64>> {
    let mut g: Vec<f64> = match window {
        WindowSpec::Gaussian => {
            let sn = (n as f64).sqrt();
            (0..n)
                .map(|x| {
                    let t = (x as f64 + 0.5).rem_euclid(n as f64);
                    let d = t.min(n as f64 - t);
                    (-PI * (d / sn).powi(2)).exp()
                })
                .collect()
        }
        WindowSpec::CenteredGaussian => {
            let sn = (n as f64).sqrt();
            (0..n).map(|x| (-PI * (circ(x, n) / sn).powi(2)).exp()).collect()
        }
        WindowSpec::Polynomial { decay } => {
            (0..n).map(|x| (1.0 + circ(x, n)).powf(-decay)).collect()
        }
        WindowSpec::Delta => (0..n).map(|x| if x == 0 { 1.0 } else { 0.0 }).collect(),
        WindowSpec::Explicit { values } => {
            if values.len() != n {
                return Err(Error::dim(n, values.len()));
            }
            values.clone()
        }
    };
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter("window must be nonzero".into()));
    }
    if !matches!(window, WindowSpec::Explicit { .. }) {
        g.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(g)
}

fn gabor(n: usize, a: usize, b: usize, window: &WindowSpec) -> Result<(CMat, IndexSet)> {
    nonzero(n, "N")?;
    nonzero(a, "a")?;
    nonzero(b, "b")?;
    if n % a != 0 || n % b != 0 {
        return Err(Error::InvalidParameter(format!(
            "Gabor steps must divide N: N={n}, a={a}, b={b}"
        )));
    }
    let (times, freqs) = (n / a, n / b);
    let k = times * freqs;
    if k < n {
        return Err(Error::NotAFrame { rank: k, dim: n });
    }
    let g = window_values(n, window)?;
    let mut v = CMat::zeros(n, k);
    for m in 0..times {
        for j in 0..freqs {
            let col = m * freqs + j;
            for x in 0..n {
                let phase = 2.0 * PI * ((j * b * x) % n) as f64 / n as f64;
                v[(x, col)] = C64::from_polar(g[(x + n - (m * a) % n) % n], phase);
            }
        }
    }
    Ok((v, IndexSet::torus(times, freqs, (a as f64, b as f64))))
}

fn translates(n: usize, step: usize, generator: &GeneratorSpec) -> Result<(CMat, IndexSet)> {
    nonzero(n, "N")?;
    nonzero(step, "step")?;
    if n % step != 0 {
        return Err(Error::InvalidParameter(format!(
            "translation step {step} must divide N={n}"
        )));
    }
    let g: Vec<f64> = match generator {
        GeneratorSpec::Delta => (0..n).map(|x| if x == 0 { 1.0 } else { 0.0 }).collect(),
        GeneratorSpec::Localized { decay } => (0..n)
            .map(|x| if x == 0 { 1.0 } else { 0.25 * (1.0 + circ(x, n)).powf(-decay) })
            .collect(),
        GeneratorSpec::ZeroMean => {
            let mut g = vec![0.0; n];
            g[0] = 1.0;
            if n > 1 {
                g[1] = -1.0;
            }
            g
        }
        GeneratorSpec::Explicit { values } => {
            if values.len() != n {
                return Err(Error::dim(n, values.len()));
            }
            values.clone()
        }
    };
    let k = n / step;
    let v = CMat::from_fn(n, k, |x, l| C64::new(g[(x + n - (l * step) % n) % n], 0.0));
    Ok((v, IndexSet::cycle_with_spacing(k, step as f64)))
}

/// Largest entry magnitude of the perturbation, relative to the envelope.
const PERTURBATION_SCALE: f64 = 0.2;

fn perturbed_onb(n: usize, decay: f64, seed: u64) -> Result<(CMat, IndexSet)> {
    nonzero(n, "n")?;
    if !(decay > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "perturbation decay must exceed 1, got {decay}"
        )));
    }
    let mut rng = seeded(seed);
    let mut v = CMat::identity(n, n);
    // column-major draw order keeps the stream stable under refactors
    for l in 0..n {
        for k in 0..n {
            let bound = PERTURBATION_SCALE * (1.0 + circ((k + n - l) % n, n)).powf(-decay);
            let mag = bound * rng.gen_range(0.5..=1.0);
            let phase = rng.gen_range(0.0..2.0 * PI);
            v[(k, l)] += C64::from_polar(mag, phase);
        }
    }
    Ok((v, IndexSet::cycle(n)))
}

#[derive(Debug, Clone)]
struct Canonical {
    frame_op: CMat,
    inverse: CMat,
    bounds: FrameBounds,
}

/// Finite frame: columns of an `n x K` matrix indexed by an [`IndexSet`].
///
/// Canonical data (frame operator, its inverse, bounds) is computed once on
/// first use and frozen; a `Frame` is safe to share across threads.
#[derive(Debug, Clone)]
pub struct Frame {
    id: String,
    spec: Option<FrameSpec>,
    vectors: CMat,
    index: IndexSet,
    frame_op: OnceLock<CMat>,
    canonical: OnceLock<std::result::Result<Canonical, Error>>,
}

impl Frame {
    pub fn new(vectors: CMat, index: IndexSet, id: impl Into<String>) -> Result<Self> {
        if vectors.ncols() != index.len() {
            return Err(Error::dim(index.len(), vectors.ncols()));
        }
        if vectors.nrows() == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        Ok(Self {
            id: id.into(),
            spec: None,
            vectors,
            index,
            frame_op: OnceLock::new(),
            canonical: OnceLock::new(),
        })
    }

    pub fn from_spec(spec: &FrameSpec) -> Result<Self> {
        spec.build()
    }

    /// Attaches the constructor that produced these vectors.
    pub(crate) fn with_spec(self, spec: Option<FrameSpec>) -> Self {
        Frame { spec, ..self }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spec(&self) -> Option<&FrameSpec> {
        self.spec.as_ref()
    }

    /// Columns `psi_k`.
    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Number of frame elements `K`.
    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn redundancy(&self) -> f64 {
        self.len() as f64 / self.dim() as f64
    }

    pub fn vector(&self, k: usize) -> CVec {
        self.vectors.column(k).into_owned()
    }

    /// `inf_k ||psi_k||`.
    pub fn min_vector_norm(&self) -> f64 {
        self.vectors
            .column_iter()
            .map(|c| c.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `(C f)_k = <f, psi_k>`.
    pub fn analysis(&self, f: &CVec) -> Result<CVec> {
        if f.len() != self.dim() {
            return Err(Error::dim(self.dim(), f.len()));
        }
        Ok(self.vectors.ad_mul(f))
    }

    /// `D c = sum_k c_k psi_k`.
    pub fn synthesis(&self, c: &CVec) -> Result<CVec> {
        if c.len() != self.len() {
            return Err(Error::dim(self.len(), c.len()));
        }
        Ok(&self.vectors * c)
    }

    /// Matrix of the analysis operator, `V^H`.
    pub fn analysis_matrix(&self) -> CMat {
        self.vectors.adjoint()
    }

    /// `S = V V^H`.
    pub fn frame_operator(&self) -> &CMat {
        self.frame_op.get_or_init(|| &self.vectors * self.vectors.adjoint())
    }

    fn canonical(&self) -> Result<&Canonical> {
        self.canonical
            .get_or_init(|| {
                let s = self.frame_operator().clone();
                let (eigs, vecs) = hermitian_eigen(&s);
                let n = self.dim();
                let upper = eigs[n - 1].max(0.0);
                let mut desc: Vec<f64> = eigs.iter().rev().cloned().collect();
                desc.iter_mut().for_each(|v| *v = v.max(0.0));
                let rank = numerical_rank(&desc, RANK_TOL);
                if rank < n {
                    return Err(Error::NotAFrame { rank, dim: n });
                }
                let lower = eigs[0];
                let inverse = if upper / lower <= CHOLESKY_COND_CAP {
                    match s.clone().cholesky() {
                        Some(ch) => ch.inverse(),
                        None => eigen_inverse(&eigs, &vecs),
                    }
                } else {
                    eigen_inverse(&eigs, &vecs)
                };
                Ok(Canonical {
                    frame_op: s,
                    inverse,
                    bounds: FrameBounds { lower, upper },
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Optimal bounds `A = lambda_min(S)`, `B = lambda_max(S)`.
    pub fn frame_bounds(&self) -> Result<FrameBounds> {
        self.canonical().map(|c| c.bounds)
    }

    /// `S^{-1}`.
    pub fn frame_operator_inverse(&self) -> Result<&CMat> {
        self.canonical().map(|c| &c.inverse)
    }

    /// Frame with vectors `S^{-1} psi_k` over the same index set.
    pub fn canonical_dual(&self) -> Result<Frame> {
        let c = self.canonical()?;
        let mut dual = Frame::new(&c.inverse * &self.vectors, self.index.clone(), format!("dual({})", self.id))?;
        dual.spec = self
            .spec
            .as_ref()
            .map(|s| FrameSpec::CanonicalDual { of: Box::new(s.clone()) });
        // the dual's frame operator is S^{-1}, its inverse is S
        let inv = c.inverse.clone();
        let b = c.bounds;
        let _ = dual.frame_op.set(inv.clone());
        let _ = dual.canonical.set(Ok(Canonical {
            frame_op: inv,
            inverse: c.frame_op.clone(),
            bounds: FrameBounds { lower: 1.0 / b.upper, upper: 1.0 / b.lower },
        }));
        Ok(dual)
    }

    /// `lambda_min`, `lambda_max` of `gram(self, self)`.
    pub fn riesz_bounds(&self) -> RieszBounds {
        let g = gram_unchecked(self, self);
        let (eigs, _) = hermitian_eigen(&g);
        let upper = eigs.last().cloned().unwrap_or(0.0).max(0.0);
        let lower = eigs.first().cloned().unwrap_or(0.0).max(0.0);
        RieszBounds {
            lower,
            upper,
            riesz: lower > RANK_TOL * upper,
        }
    }

    /// Frame with every vector multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Frame {
        Frame::new(
            self.vectors.map(|z| z * alpha),
            self.index.clone(),
            format!("{alpha}*{}", self.id),
        )
        .expect("same shape")
    }

    /// Members `indices` in the given order.
    pub fn subframe(&self, indices: &[usize]) -> Result<Frame> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("empty index subset".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&k| k >= self.len()) {
            return Err(Error::InvalidParameter(format!("index {bad} out of range")));
        }
        let v = CMat::from_fn(self.dim(), indices.len(), |r, c| self.vectors[(r, indices[c])]);
        Frame::new(v, self.index.subset(indices), format!("{}[sub]", self.id))
    }
}

fn eigen_inverse(eigs: &[f64], vecs: &CMat) -> CMat {
    let inv = CVec::from_iterator(eigs.len(), eigs.iter().map(|&l| C64::new(1.0 / l, 0.0)));
    vecs * CMat::from_diagonal(&inv) * vecs.adjoint()
}

fn gram_unchecked(left: &Frame, right: &Frame) -> CMat {
    left.vectors.ad_mul(&right.vectors)
}

/// Cross-Gram `G_{L,R} = C_L D_R`, entries `<r_l, l_k>`.
pub fn gram(left: &Frame, right: &Frame) -> Result<CMat> {
    if left.dim() != right.dim() {
        return Err(Error::dim(left.dim(), right.dim()));
    }
    Ok(gram_unchecked(left, right))
}
