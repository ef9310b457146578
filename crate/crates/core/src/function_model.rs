//! Function specifications, the spec DSL, and localization to `{1..n}`.
//!
//! Grammar accepted by [`parse_spec`]:
//!
//! ```text
//! spec   := "shift:t=" INT | "nextprime" | "collatz" | "chapman"
//!         | "rcwa:mod=" UINT ";" branch (";" branch)* [";cut=" UINT]
//!         | "table:" pair ("," pair)*
//! branch := RESIDUE ":" INT "," INT
//! pair   := UINT ">" UINT
//! ```
//!
//! A branch `j:a,b` maps `x = j (mod d)` to `(a*x + b)/d`. Inputs at or below
//! the cut and branch values `<= 0` map to 0.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::primes;

/// Residue-class-wise affine map `x -> (a_j*x + b_j)/d` for `x = j (mod d)`,
/// sending every `x <= cut` to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcwaMap {
    modulus: u64,
    branches: Vec<(i64, i64)>,
    cut: u64,
}

impl RcwaMap {
    /// Validates integrality, identity branches and fixed points, in that
    /// order. `branches[j]` is the `(a, b)` pair for residue `j`.
    pub fn new(modulus: u64, branches: Vec<(i64, i64)>, cut: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Syntax(format!(
                "modulus must be at least 2, got {modulus}"
            )));
        }
        if branches.len() as u64 != modulus {
            return Err(Error::Syntax(format!(
                "expected {modulus} branches, got {}",
                branches.len()
            )));
        }
        if let Some(j) = branches.iter().position(|&(a, _)| a < 0) {
            return Err(Error::Syntax(format!(
                "negative multiplier for residue {j}"
            )));
        }
        let d = modulus as i128;
        for (j, &(a, b)) in branches.iter().enumerate() {
            if (a as i128 * j as i128 + b as i128).rem_euclid(d) != 0 {
                return Err(Error::Integrality {
                    residue: j as u64,
                    a,
                    b,
                    modulus,
                });
            }
        }
        for (j, &(a, b)) in branches.iter().enumerate() {
            if a as i128 == d && b == 0 {
                return Err(Error::EmptyBranch { residue: j as u64 });
            }
        }
        // A fixed point of branch j solves (d - a) x = b.
        for (j, &(a, b)) in branches.iter().enumerate() {
            let slope = d - a as i128;
            if slope == 0 {
                continue;
            }
            let b = b as i128;
            if b % slope != 0 {
                continue;
            }
            let x = b / slope;
            if x > cut as i128 && x.rem_euclid(d) == j as i128 {
                return Err(Error::FixedPoint { x: x as u64 });
            }
        }
        Ok(RcwaMap {
            modulus,
            branches,
            cut,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn branches(&self) -> &[(i64, i64)] {
        &self.branches
    }

    pub fn cut(&self) -> u64 {
        self.cut
    }

    fn eval(&self, x: u64) -> Result<u64> {
        if x == 0 || x <= self.cut {
            return Ok(0);
        }
        let (a, b) = self.branches[(x % self.modulus) as usize];
        let overflow = Error::Overflow { x };
        let xi = i64::try_from(x).map_err(|_| overflow.clone())?;
        let numerator = a
            .checked_mul(xi)
            .and_then(|v| v.checked_add(b))
            .ok_or(overflow)?;
        let value = numerator / self.modulus as i64;
        Ok(if value <= 0 { 0 } else { value as u64 })
    }
}

impl fmt::Display for RcwaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rcwa:mod={}", self.modulus)?;
        for (j, (a, b)) in self.branches.iter().enumerate() {
            write!(f, ";{j}:{a},{b}")?;
        }
        write!(f, ";cut={}", self.cut)
    }
}

/// A validated member of the class of functions with `phi(0) = 0` and no
/// positive fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionSpec {
    /// `x -> x + t`, defined for `x > |t|` when `t < 0`.
    Shift {
        t: i64,
    },
    /// Maps each prime to the next prime; non-primes map to 0.
    NextPrime,
    /// `x/2` on evens, `(3x+1)/2` on odds, 0 for `x <= 2`.
    CollatzVariant(RcwaMap),
    /// `(x-1)/2` on odds, `(3x+2)/2` on evens.
    ChapmanPsi(RcwaMap),
    Rcwa(RcwaMap),
    /// Finite table; unlisted inputs map to 0.
    Table(BTreeMap<u64, u64>),
}

impl FunctionSpec {
    pub fn shift(t: i64) -> Result<Self> {
        if t == 0 {
            return Err(Error::FixedPoint { x: 1 });
        }
        Ok(FunctionSpec::Shift { t })
    }

    pub fn collatz() -> Self {
        FunctionSpec::CollatzVariant(
            RcwaMap::new(2, vec![(1, 0), (3, 1)], 2).expect("collatz variant is valid"),
        )
    }

    pub fn chapman() -> Self {
        FunctionSpec::ChapmanPsi(
            RcwaMap::new(2, vec![(3, 2), (1, -1)], 0).expect("chapman psi is valid"),
        )
    }

    pub fn table(entries: BTreeMap<u64, u64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (&x, &y) in &entries {
            if x == 0 || y == 0 {
                return Err(Error::Syntax(format!(
                    "table entries must be positive, got {x}>{y}"
                )));
            }
            if x == y {
                return Err(Error::FixedPoint { x });
            }
        }
        Ok(FunctionSpec::Table(entries))
    }

    /// `phi(x)`, with 0 outside the effective domain and for non-positive
    /// branch values.
    pub fn eval(&self, x: u64) -> Result<u64> {
        if x == 0 {
            return Ok(0);
        }
        match self {
            FunctionSpec::Shift { t } => {
                if *t > 0 {
                    x.checked_add(*t as u64).ok_or(Error::Overflow { x })
                } else {
                    Ok(x.saturating_sub(t.unsigned_abs()))
                }
            }
            FunctionSpec::NextPrime => {
                if primes::is_prime(x) {
                    primes::next_prime(x).ok_or(Error::Overflow { x })
                } else {
                    Ok(0)
                }
            }
            FunctionSpec::CollatzVariant(map)
            | FunctionSpec::ChapmanPsi(map)
            | FunctionSpec::Rcwa(map) => map.eval(x),
            FunctionSpec::Table(entries) => Ok(entries.get(&x).copied().unwrap_or(0)),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Shift { t } => write!(f, "shift:t={t}"),
            FunctionSpec::NextPrime => f.write_str("nextprime"),
            FunctionSpec::CollatzVariant(_) => f.write_str("collatz"),
            FunctionSpec::ChapmanPsi(_) => f.write_str("chapman"),
            FunctionSpec::Rcwa(map) => map.fmt(f),
            FunctionSpec::Table(entries) => {
                f.write_str("table:")?;
                for (i, (x, y)) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}>{y}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec(s)
    }
}

fn parse_int<T: FromStr>(token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::Syntax(format!("invalid {what}: {token:?}")))
}

fn parse_uint(token: &str, what: &str) -> Result<u64> {
    // u64::from_str accepts a leading '+', the grammar does not.
    if token.starts_with('+') {
        return Err(Error::Syntax(format!("invalid {what}: {token:?}")));
    }
    parse_int(token, what)
}

fn parse_rcwa(body: &str) -> Result<RcwaMap> {
    let mut parts = body.split(';');
    let modulus = parse_uint(parts.next().unwrap_or_default(), "modulus")?;
    let mut slots: Vec<Option<(i64, i64)>> = vec![None; modulus.min(1 << 16) as usize];
    let mut cut = None;
    let mut count = 0usize;
    for part in parts {
        if cut.is_some() {
            return Err(Error::Syntax("cut must be the last field".into()));
        }
        if let Some(value) = part.strip_prefix("cut=") {
            cut = Some(parse_uint(value, "cut")?);
            continue;
        }
        let (residue, coeffs) = part
            .split_once(':')
            .ok_or_else(|| Error::Syntax(format!("malformed branch {part:?}")))?;
        let (a, b) = coeffs
            .split_once(',')
            .ok_or_else(|| Error::Syntax(format!("malformed branch {part:?}")))?;
        let residue = parse_uint(residue, "residue")?;
        let slot = slots
            .get_mut(residue as usize)
            .filter(|_| residue < modulus)
            .ok_or_else(|| {
                Error::Syntax(format!("residue {residue} out of range mod {modulus}"))
            })?;
        if slot.is_some() {
            return Err(Error::Syntax(format!("duplicate residue {residue}")));
        }
        *slot = Some((parse_int(a, "multiplier")?, parse_int(b, "offset")?));
        count += 1;
    }
    if count == 0 {
        return Err(Error::Syntax("rcwa needs at least one branch".into()));
    }
    if modulus < 2 {
        return Err(Error::Syntax(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    let branches = slots
        .into_iter()
        .enumerate()
        .map(|(j, slot)| {
            slot.ok_or_else(|| Error::Syntax(format!("missing branch for residue {j}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if branches.len() as u64 != modulus {
        return Err(Error::Syntax(format!("modulus {modulus} is too large")));
    }
    RcwaMap::new(modulus, branches, cut.unwrap_or(0))
}

fn parse_table(body: &str) -> Result<FunctionSpec> {
    let mut entries = BTreeMap::new();
    for pair in body.split(',') {
        let (x, y) = pair
            .split_once('>')
            .ok_or_else(|| Error::Syntax(format!("malformed pair {pair:?}")))?;
        let x = parse_uint(x, "table key")?;
        let y = parse_uint(y, "table value")?;
        if entries.insert(x, y).is_some() {
            return Err(Error::Syntax(format!("duplicate table key {x}")));
        }
    }
    FunctionSpec::table(entries)
}

/// Parses and validates a spec DSL string.
pub fn parse_spec(text: &str) -> Result<FunctionSpec> {
    let text = text.trim();
    match text {
        "nextprime" => return Ok(FunctionSpec::NextPrime),
        "collatz" => return Ok(FunctionSpec::collatz()),
        "chapman" => return Ok(FunctionSpec::chapman()),
        _ => {}
    }
    if let Some(t) = text.strip_prefix("shift:t=") {
        return FunctionSpec::shift(parse_int(t, "shift")?);
    }
    if let Some(body) = text.strip_prefix("rcwa:mod=") {
        return parse_rcwa(body).map(FunctionSpec::Rcwa);
    }
    if let Some(body) = text.strip_prefix("table:") {
        return parse_table(body);
    }
    Err(Error::Syntax(format!("unrecognized spec {text:?}")))
}

/// `phi` restricted to `{1..n}`: `table[x] = phi(x)` when it lands in
/// `{1..n}`, else 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFunction {
    // Index 0 is the absorbing state and always holds 0.
    table: Vec<usize>,
}

impl LocalFunction {
    /// Builds from the images of `1..=n`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        for (i, &y) in images.iter().enumerate() {
            let x = i + 1;
            if y > n {
                return Err(Error::IndexOutOfRange { index: y, n });
            }
            if y == x {
                return Err(Error::FixedPoint { x: x as u64 });
            }
        }
        let mut table = Vec::with_capacity(n + 1);
        table.push(0);
        table.extend_from_slice(images);
        Ok(LocalFunction { table })
    }

    pub fn n(&self) -> usize {
        self.table.len() - 1
    }

    /// `phi_n(x)` for `x` in `0..=n`.
    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.table[x]
    }

    /// Images of `1..=n`.
    pub fn images(&self) -> &[usize] {
        &self.table[1..]
    }

    /// `phi_m` for `m <= n`, derived from this table without re-evaluating.
    pub fn restrict(&self, m: usize) -> Result<LocalFunction> {
        if m == 0 {
            return Err(Error::EmptyInput);
        }
        if m > self.n() {
            return Err(Error::InvalidArgument(format!(
                "cannot restrict n = {} to {m}",
                self.n()
            )));
        }
        Ok(LocalFunction {
            table: self.table[..=m]
                .iter()
                .map(|&y| if y <= m { y } else { 0 })
                .collect(),
        })
    }

    /// Full table including the absorbing slot at index 0.
    pub(crate) fn raw(&self) -> &[usize] {
        &self.table
    }
}

/// Restricts `spec` to `{1..n}`.
pub fn localize(spec: &FunctionSpec, n: usize) -> Result<LocalFunction> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut table = vec![0usize; n + 1];
    if let FunctionSpec::NextPrime = spec {
        let flags = primes::sieve(n);
        let mut previous: Option<usize> = None;
        for (p, _) in flags.iter().enumerate().filter(|(_, &f)| f) {
            if let Some(q) = previous {
                table[q] = p;
            }
            previous = Some(p);
        }
    } else {
        for (x, slot) in table.iter_mut().enumerate().skip(1) {
            let y = spec.eval(x as u64)?;
            if y <= n as u64 {
                *slot = y as usize;
            }
        }
    }
    debug_assert!(table.iter().enumerate().skip(1).all(|(x, &y)| x != y));
    Ok(LocalFunction { table })
}

/// Smallest `n` for which a cycle of `phi` survives localization: its maximum.
pub fn cycle_threshold(cycle: &[u64]) -> Result<u64> {
    cycle.iter().copied().max().ok_or(Error::EmptyInput)
}
