use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::frames::FrameSpec;
use crate::galerkin::BoundCase;
use crate::linalg::algebra::MatrixAlgebraSpec;
use crate::linalg::dense::{random_cvec, seeded};
use crate::linalg::{Exponent, SpaceFamily, WeightFamily};
use crate::solver::{ScheduleSpec, SolveOptions, TestOperator};
use crate::{CVec, C64};

/// Which frame sits on the right of a Galerkin pair `(Φ, ·)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    /// `(Φ, Φ)`.
    #[default]
    Primal,
    /// `(Φ, Φ~)`.
    Dual,
}

/// Right-hand side of a solve.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhsSpec {
    /// Seeded uniform entries.
    #[default]
    Random,
    Ones,
    Explicit { re: Vec<f64> },
}

impl RhsSpec {
    pub fn build(&self, n: usize, seed: u64) -> Result<CVec> {
        match self {
            RhsSpec::Random => Ok(random_cvec(n, &mut seeded(seed))),
            RhsSpec::Ones => Ok(CVec::from_element(n, C64::new(1.0, 0.0))),
            RhsSpec::Explicit { re } => {
                if re.len() != n {
                    return Err(Error::dim(n, re.len()));
                }
                Ok(CVec::from_iterator(n, re.iter().map(|&v| C64::new(v, 0.0))))
            }
        }
    }
}

/// Complete description of one CLI run; flags override fields read from `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub frame: Option<FrameSpec>,
    /// Base path of a frame container; wins over `frame`.
    pub frame_file: Option<PathBuf>,
    pub pair: PairKind,
    pub operator: Option<TestOperator>,
    pub algebra: MatrixAlgebraSpec,
    pub spaces: Vec<SpaceFamily>,
    pub cases: Vec<BoundCase>,
    pub schedule: ScheduleSpec,
    pub solve: SolveOptions,
    pub rhs: RhsSpec,
    pub pseudo_inverse: bool,
    pub probes: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            frame: None,
            frame_file: None,
            pair: PairKind::Primal,
            operator: None,
            algebra: MatrixAlgebraSpec::jaffard(3.0),
            spaces: Vec::new(),
            cases: Vec::new(),
            schedule: ScheduleSpec::default(),
            solve: SolveOptions::default(),
            rhs: RhsSpec::Random,
            pseudo_inverse: false,
            probes: 64,
            seed: 0,
            out_dir: PathBuf::from("out"),
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Space grid for reports: the configured list or `p in {1, 2, inf}` x `t in {0, 1}`.
    pub fn space_grid(&self) -> Vec<SpaceFamily> {
        if !self.spaces.is_empty() {
            return self.spaces.clone();
        }
        let mut out = Vec::new();
        for p in [Exponent::One, Exponent::Two, Exponent::Inf] {
            out.push(SpaceFamily::unweighted(p));
            out.push(SpaceFamily::polynomial(p, 1.0));
        }
        out
    }

    pub fn case_list(&self) -> Vec<BoundCase> {
        if !self.cases.is_empty() {
            return self.cases.clone();
        }
        vec![BoundCase::InfInf, BoundCase::OneInf, BoundCase::OneP { p: Exponent::Two }, BoundCase::TwoTwo]
    }
}

fn scalar(v: &str) -> Value {
    if v.starts_with('[') {
        if let Ok(list) = serde_json::from_str(v) {
            return list;
        }
    }
    if let Ok(i) = v.parse::<i64>() {
        return Value::from(i);
    }
    if let Ok(x) = v.parse::<f64>() {
        if x.is_finite() {
            return Value::from(x);
        }
    }
    match v {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(v.to_string()),
    }
}

/// Splits on commas outside square brackets.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// `name(key=value,...)` or a JSON object, into a value tagged with `tag`.
pub fn parse_tagged(text: &str, tag: &str) -> Result<Value> {
    let text = text.trim();
    if text.starts_with('{') {
        return Ok(serde_json::from_str(text)?);
    }
    let (name, args) = match text.split_once('(') {
        Some((name, rest)) => {
            let args = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidParameter(format!("unbalanced parentheses in '{text}'")))?;
            (name.trim(), args)
        }
        None => (text, ""),
    };
    let mut obj = Map::new();
    obj.insert(tag.to_string(), Value::String(name.to_string()));
    for part in split_top_level(args).into_iter().map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got '{part}'")))?;
        obj.insert(k.trim().to_string(), scalar(v.trim()));
    }
    Ok(Value::Object(obj))
}

pub fn parse_frame(text: &str) -> Result<FrameSpec> {
    let mut v = parse_tagged(text, "kind")?;
    // accept N= as an alias for n=
    if let Value::Object(m) = &mut v {
        if let Some(n) = m.remove("N") {
            m.insert("n".into(), n);
        }
        if m.get("kind").and_then(Value::as_str) == Some("gabor") && !m.contains_key("window") {
            m.insert("window".into(), Value::from("gaussian"));
        }
    }
    serde_json::from_value(v).map_err(|e| Error::InvalidParameter(format!("frame '{text}': {e}")))
}

pub fn parse_operator(text: &str) -> Result<TestOperator> {
    let v = parse_tagged(text, "kind")?;
    serde_json::from_value(v).map_err(|e| Error::InvalidParameter(format!("operator '{text}': {e}")))
}

/// `p:t` with polynomial weight `(1+|k|)^t`; `t = 0` is unweighted. A bare `p` means `t = 0`.
pub fn parse_space(text: &str) -> Result<SpaceFamily> {
    let (p, t) = match text.split_once(':') {
        Some((p, t)) => (p, t.trim().parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad weight in '{text}'")))?),
        None => (text, 0.0),
    };
    let p: Exponent = p.parse()?;
    Ok(if t == 0.0 {
        SpaceFamily::unweighted(p)
    } else {
        SpaceFamily::new(p, WeightFamily::Polynomial { t })
    })
}

/// `jaffard:<s>` or `schur:<s>`.
pub fn parse_algebra(text: &str) -> Result<MatrixAlgebraSpec> {
    let (kind, s) = text
        .split_once(':')
        .ok_or_else(|| Error::InvalidParameter(format!("expected kind:s, got '{text}'")))?;
    let s: f64 = s.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad exponent in '{text}'")))?;
    match kind.trim() {
        "jaffard" => Ok(MatrixAlgebraSpec::jaffard(s)),
        "schur" | "schur_weighted" => Ok(MatrixAlgebraSpec::schur_weighted(s)),
        other => Err(Error::InvalidParameter(format!("unknown algebra '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::WindowSpec;

    #[test]
    fn compact_frame_syntax() {
        assert_eq!(parse_frame("onb(n=8)").unwrap(), FrameSpec::Onb { n: 8 });
        assert_eq!(parse_frame("mercedes").unwrap(), FrameSpec::Mercedes);
        assert_eq!(parse_frame("gabor(n=16,a=4,b=4)").unwrap(), FrameSpec::gabor(16, 4, 4, WindowSpec::Gaussian));
        assert_eq!(
            parse_frame("gabor(N=16, a=4, b=4, window=gaussian)").unwrap(),
            FrameSpec::gabor(16, 4, 4, WindowSpec::Gaussian)
        );
        assert_eq!(
            parse_frame("gabor(n=16,a=4,b=4,window=polynomial,decay=3)").unwrap(),
            FrameSpec::gabor(16, 4, 4, WindowSpec::Polynomial { decay: 3.0 })
        );
        assert_eq!(parse_frame(r#"{"kind":"onb","n":3}"#).unwrap(), FrameSpec::Onb { n: 3 });
        assert!(parse_frame("gabor(n=16").is_err());
        assert!(parse_frame("nonsense(n=1)").is_err());
    }

    #[test]
    fn operator_space_algebra_syntax() {
        assert_eq!(
            parse_operator("identity_minus_kernel(theta=0.5,exponent=3)").unwrap(),
            TestOperator::IdentityMinusKernel { theta: 0.5, exponent: 3.0 }
        );
        assert_eq!(
            parse_operator("diagonal(values=[1,2,0.5])").unwrap(),
            TestOperator::Diagonal { values: vec![1.0, 2.0, 0.5] }
        );
        assert_eq!(parse_space("inf:1").unwrap(), SpaceFamily::polynomial(Exponent::Inf, 1.0));
        assert_eq!(parse_space("2").unwrap(), SpaceFamily::unweighted(Exponent::Two));
        assert_eq!(parse_algebra("schur:2.5").unwrap(), MatrixAlgebraSpec::schur_weighted(2.5));
        assert!(parse_algebra("jaffard").is_err());
    }

    #[test]
    fn config_roundtrip_and_defaults() {
        let c = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let partial: RunConfig = serde_json::from_str(r#"{"seed": 7, "frame": {"kind": "onb", "n": 4}}"#).unwrap();
        assert_eq!(partial.seed, 7);
        assert_eq!(partial.probes, 64);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 7}"#).is_err());
    }
}
