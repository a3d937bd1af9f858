//! Observed samples, permutation assignments and the test statistics.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// Group structure of an observed sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Design {
    /// Sign-flip permutations of a single (or paired-difference) sample.
    OneGroup,
    /// Two unpaired groups; the first `group1` values carry the Group-1 labels.
    TwoGroup { group1: usize, group2: usize },
}

/// The observed data `x` together with its design.
///
/// For two-group data Group 1 is always the smaller group. If the caller
/// supplies a larger first group the value blocks are swapped and every
/// two-group statistic is negated, so the tested hypothesis is unchanged;
/// [`ObservedData::groups_swapped`] records that this happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedData {
    values: Vec<f64>,
    design: Design,
    swapped: bool,
}

impl ObservedData {
    pub fn one_group(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(contract("one-group data needs at least one value"));
        }
        check_finite(&values)?;
        Ok(Self {
            values,
            design: Design::OneGroup,
            swapped: false,
        })
    }

    pub fn two_group(values: Vec<f64>, group1: usize, group2: usize) -> Result<Self> {
        if group1 == 0 || group2 == 0 {
            return Err(contract("both groups must be non-empty"));
        }
        if group1 + group2 != values.len() {
            return Err(contract(format!(
                "group sizes {group1}+{group2} do not match {} values",
                values.len()
            )));
        }
        check_finite(&values)?;
        if group1 <= group2 {
            return Ok(Self {
                values,
                design: Design::TwoGroup { group1, group2 },
                swapped: false,
            });
        }
        let mut reordered = values[group1..].to_vec();
        reordered.extend_from_slice(&values[..group1]);
        Ok(Self {
            values: reordered,
            design: Design::TwoGroup {
                group1: group2,
                group2: group1,
            },
            swapped: true,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn design(&self) -> Design {
        self.design
    }

    /// Group-1 size `k` (two-group data only).
    pub fn group1_size(&self) -> Option<usize> {
        match self.design {
            Design::OneGroup => None,
            Design::TwoGroup { group1, .. } => Some(group1),
        }
    }

    pub fn groups_swapped(&self) -> bool {
        self.swapped
    }

    /// 64-bit FNV-1a checksum of the design and the value bit patterns.
    pub fn digest(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut hash = OFFSET;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= u64::from(b);
                hash = hash.wrapping_mul(PRIME);
            }
        };
        match self.design {
            Design::OneGroup => feed(&[1]),
            Design::TwoGroup { group1, group2 } => {
                feed(&[2]);
                feed(&(group1 as u64).to_le_bytes());
                feed(&(group2 as u64).to_le_bytes());
            }
        }
        feed(&[u8::from(self.swapped)]);
        for v in &self.values {
            feed(&v.to_bits().to_le_bytes());
        }
        hash
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(contract(format!("value {i} is not finite"))),
        None => Ok(()),
    }
}

/// Sign assignment for a one-group permutation: `true` puts a `+` on `x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector(pub Vec<bool>);

impl SignVector {
    pub fn identity(n: usize) -> Self {
        Self(vec![true; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Group-1 membership indicators with exactly `k` ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionVector {
    d: Vec<bool>,
    k: usize,
}

impl PartitionVector {
    pub fn new(d: Vec<bool>) -> Self {
        let k = d.iter().filter(|&&b| b).count();
        Self { d, k }
    }

    /// The observed labelling: the first `k` of `n` positions in Group 1.
    pub fn identity(n: usize, k: usize) -> Self {
        let d = (0..n).map(|i| i < k).collect();
        Self { d, k }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut d = vec![false; n];
        for &i in indices {
            d[i] = true;
        }
        Self::new(d)
    }

    pub fn indicators(&self) -> &[bool] {
        &self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self::new(self.d.iter().map(|b| !b).collect())
    }
}

/// A permutation of the observed data, in whichever parameterization the
/// design uses.
#[derive(Debug, Clone, Copy)]
pub enum Assignment<'a> {
    Signs(&'a SignVector),
    Partition(&'a PartitionVector),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticKind {
    /// `(1/n) Σ ±x_i`.
    OneGroupMean,
    /// Group-1 mean minus Group-2 mean.
    DiffMeans,
    /// Pooled two-sample t.
    StudentT,
    /// `(x̄₁ − x̄₂) / (s_pooled + s0)`.
    ModeratedT,
}

/// Which statistic to compute. All tests are upper-tailed (`T ≥ γ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticSpec {
    kind: StatisticKind,
    s0: f64,
}

impl StatisticSpec {
    pub fn new(kind: StatisticKind, s0: f64) -> Result<Self> {
        if !(s0.is_finite() && s0 >= 0.0) {
            return Err(contract(format!("s0 must be finite and nonnegative, got {s0}")));
        }
        Ok(Self { kind, s0 })
    }

    pub fn one_group_mean() -> Self {
        Self {
            kind: StatisticKind::OneGroupMean,
            s0: 0.0,
        }
    }

    pub fn diff_means() -> Self {
        Self {
            kind: StatisticKind::DiffMeans,
            s0: 0.0,
        }
    }

    pub fn student_t() -> Self {
        Self {
            kind: StatisticKind::StudentT,
            s0: 0.0,
        }
    }

    pub fn moderated_t(s0: f64) -> Result<Self> {
        Self::new(StatisticKind::ModeratedT, s0)
    }

    pub fn kind(&self) -> StatisticKind {
        self.kind
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    /// Checks that the statistic is defined for the design.
    pub fn check(&self, data: &ObservedData) -> Result<()> {
        match (self.kind, data.design()) {
            (StatisticKind::OneGroupMean, Design::OneGroup) => Ok(()),
            (StatisticKind::OneGroupMean, _) => {
                Err(contract("one-group-mean requires one-group data"))
            }
            (_, Design::TwoGroup { .. }) => Ok(()),
            (kind, Design::OneGroup) => Err(contract(format!(
                "{kind:?} requires two-group data"
            ))),
        }
    }
}

/// Evaluates `T(z)` for the permuted sample induced by `assignment`.
pub fn statistic_eval(
    spec: &StatisticSpec,
    data: &ObservedData,
    assignment: Assignment<'_>,
) -> Result<f64> {
    spec.check(data)?;
    match assignment {
        Assignment::Signs(s) => {
            if data.design() != Design::OneGroup {
                return Err(contract("sign vector for two-group data"));
            }
            if s.len() != data.len() {
                return Err(contract(format!(
                    "sign vector has length {}, data has {}",
                    s.len(),
                    data.len()
                )));
            }
            Ok(eval_signs(data.values(), &s.0))
        }
        Assignment::Partition(d) => {
            let k = data.group1_size().ok_or_else(|| contract("partition for one-group data"))?;
            if d.len() != data.len() || d.k() != k {
                return Err(contract(format!(
                    "partition has length {} with {} ones, data needs length {} with {k}",
                    d.len(),
                    d.k(),
                    data.len()
                )));
            }
            eval_partition(spec, data, d.indicators())
        }
    }
}

/// `T` at the identity assignment, i.e. the observed statistic `γ`.
pub fn observed_statistic(spec: &StatisticSpec, data: &ObservedData) -> Result<f64> {
    match data.design() {
        Design::OneGroup => statistic_eval(
            spec,
            data,
            Assignment::Signs(&SignVector::identity(data.len())),
        ),
        Design::TwoGroup { group1, .. } => statistic_eval(
            spec,
            data,
            Assignment::Partition(&PartitionVector::identity(data.len(), group1)),
        ),
    }
}

// Unchecked kernels shared by every estimator so that ties with the observed
// statistic are reproduced bit for bit.

pub(crate) fn eval_signs(values: &[f64], signs: &[bool]) -> f64 {
    let sum: f64 = values
        .iter()
        .zip(signs)
        .map(|(&x, &plus)| if plus { x } else { -x })
        .sum();
    sum / values.len() as f64
}

pub(crate) fn eval_partition(spec: &StatisticSpec, data: &ObservedData, d: &[bool]) -> Result<f64> {
    let values = data.values();
    let n = values.len();
    let k = d.iter().filter(|&&b| b).count();
    let m = n - k;
    let (mut sum1, mut sum2) = (0.0, 0.0);
    for (&x, &g1) in values.iter().zip(d) {
        if g1 {
            sum1 += x;
        } else {
            sum2 += x;
        }
    }
    let mean1 = sum1 / k as f64;
    let mean2 = sum2 / m as f64;
    let diff = mean1 - mean2;
    let raw = match spec.kind {
        StatisticKind::DiffMeans => diff,
        StatisticKind::StudentT | StatisticKind::ModeratedT => {
            let s0 = if spec.kind == StatisticKind::StudentT { 0.0 } else { spec.s0 };
            let se = pooled_se(values, d, mean1, mean2, k, m)?;
            let denom = se + s0;
            if !(denom > 0.0 && denom.is_finite()) {
                return Err(Error::DegenerateStatistic(format!(
                    "pooled standard error {se} plus s0 {s0} is not positive"
                )));
            }
            diff / denom
        }
        StatisticKind::OneGroupMean => unreachable!("checked by StatisticSpec::check"),
    };
    Ok(if data.swapped { -raw } else { raw })
}

fn pooled_se(values: &[f64], d: &[bool], mean1: f64, mean2: f64, k: usize, m: usize) -> Result<f64> {
    let n = k + m;
    if n <= 2 {
        return Err(Error::DegenerateStatistic(
            "pooled standard error needs at least three values".into(),
        ));
    }
    let ss: f64 = values
        .iter()
        .zip(d)
        .map(|(&x, &g1)| {
            let dev = if g1 { x - mean1 } else { x - mean2 };
            dev * dev
        })
        .sum();
    let var = ss / (n - 2) as f64;
    Ok((var * (1.0 / k as f64 + 1.0 / m as f64)).sqrt())
}
