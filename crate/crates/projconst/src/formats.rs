//! Text formats: index-set files, frequency files and support specifications.
//!
//! An index-set file has a header `# dim=<n> family=<tag> params=<...>` and
//! one element per line as whitespace-separated integers. A frequency file
//! has a header `# frequency explicit [qindependent] [b2]` and one real per
//! line. Blank lines and further `#` lines are ignored in both.

use projconst_core::dirichlet::Frequency;
use projconst_core::indexsets::{self, Family, GenerateOptions, IndexSet, MultiIndex};
use projconst_core::numtheory::Sieve;
use projconst_core::Backend;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] projconst_core::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

fn open(path: &Path) -> Result<BufReader<std::fs::File>, FormatError> {
    std::fs::File::open(path)
        .map(BufReader::new)
        .map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn write_index_set<W: Write>(set: &IndexSet, mut w: W) -> io::Result<()> {
    writeln!(w, "# dim={} family={} params={}", set.dim(), set.family().tag(), set.family().params())?;
    let mut line = String::new();
    for a in set {
        line.clear();
        for (j, v) in a.to_dense().iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads an index-set file. The declared family is kept as a tag; elements
/// are validated against its membership predicate.
pub fn read_index_set<R: BufRead>(r: R) -> Result<IndexSet, FormatError> {
    let mut header: Option<(usize, Family)> = None;
    let mut elements = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|source| FormatError::Io { path: "<input>".into(), source })?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if header.is_none() {
                header = Some(parse_header(rest, lineno)?);
            }
            continue;
        }
        let Some((dim, _)) = &header else {
            return Err(parse_err(lineno, "missing `# dim=<n> family=<tag> params=<...>` header"));
        };
        let entries = t
            .split_whitespace()
            .map(|v| v.parse::<i64>().map_err(|_| parse_err(lineno, format!("`{v}` is not an integer"))))
            .collect::<Result<Vec<_>, _>>()?;
        if entries.len() != *dim {
            return Err(parse_err(lineno, format!("expected {dim} entries, found {}", entries.len())));
        }
        elements.push(MultiIndex::from_dense(&entries));
    }
    let (dim, family) = header.ok_or_else(|| parse_err(0, "empty index-set file"))?;
    if family != Family::Custom {
        let need = match family {
            Family::DeltaX { x } | Family::N1Lift { x, .. } => x.max(2),
            _ => 2,
        };
        let sieve = Sieve::new(need);
        for (k, a) in elements.iter().enumerate() {
            if !family.admits(a, &sieve)? {
                return Err(parse_err(0, format!("element {} ({a:?}) is not in {}", k + 1, family.tag())));
            }
        }
    }
    Ok(IndexSet::new(dim, elements, family)?)
}

fn parse_header(rest: &str, lineno: usize) -> Result<(usize, Family), FormatError> {
    let mut dim = None;
    let mut tag = "custom";
    let mut params = "";
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("dim", v)) => dim = Some(v.parse().map_err(|_| parse_err(lineno, format!("bad dim `{v}`")))?),
            Some(("family", v)) => tag = v,
            Some(("params", v)) => params = v,
            _ => return Err(parse_err(lineno, format!("unexpected header field `{field}`"))),
        }
    }
    let dim = dim.ok_or_else(|| parse_err(lineno, "header lacks dim=<n>"))?;
    Ok((dim, Family::parse(tag, params)?))
}

pub fn read_index_set_file(path: &Path) -> Result<IndexSet, FormatError> {
    read_index_set(open(path)?)
}

/// Reads a frequency file.
pub fn read_frequency<R: BufRead>(r: R) -> Result<Frequency, FormatError> {
    let mut header: Option<(bool, bool)> = None;
    let mut values = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|source| FormatError::Io { path: "<input>".into(), source })?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if header.is_none() {
                let mut words = rest.split_whitespace();
                if words.next() != Some("frequency") || words.next() != Some("explicit") {
                    return Err(parse_err(lineno, "expected header `# frequency explicit [qindependent] [b2]`"));
                }
                let (mut q, mut b2) = (false, false);
                for w in words {
                    match w {
                        "qindependent" => q = true,
                        "b2" => b2 = true,
                        _ => return Err(parse_err(lineno, format!("unknown frequency flag `{w}`"))),
                    }
                }
                header = Some((q, b2));
            }
            continue;
        }
        if header.is_none() {
            return Err(parse_err(lineno, "missing `# frequency explicit` header"));
        }
        let v: f64 = t.parse().map_err(|_| parse_err(lineno, format!("`{t}` is not a number")))?;
        values.push(v);
    }
    let (q, b2) = header.ok_or_else(|| parse_err(0, "empty frequency file"))?;
    let f = if q { Frequency::q_independent(values)? } else { Frequency::explicit(values)? };
    Ok(f.with_b2(b2))
}

pub fn read_frequency_file(path: &Path) -> Result<Frequency, FormatError> {
    read_frequency(open(path)?)
}

/// The `--frequency` argument.
#[derive(Clone, Debug, PartialEq)]
pub enum FrequencySpec {
    Natural,
    LogIntegers,
    LogPrimes,
    /// `ℚ`-independent values `ω_n = log 𝔭_n` declared as such, so the
    /// closed form applies.
    QIndependent,
    File(PathBuf),
}

impl FromStr for FrequencySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "natural" => FrequencySpec::Natural,
            "logn" => FrequencySpec::LogIntegers,
            "logp" => FrequencySpec::LogPrimes,
            "qindep" => FrequencySpec::QIndependent,
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => FrequencySpec::File(PathBuf::from(p)),
                _ => return Err(format!("unknown frequency `{s}` (natural, logn, logp, qindep, file:PATH)")),
            },
        })
    }
}

impl FrequencySpec {
    /// Builds the frequency; `max_n` bounds the indices that need values.
    pub fn build<B: Backend>(&self, max_n: u64, b2: bool, backend: &B) -> Result<Frequency, FormatError> {
        let f = match self {
            FrequencySpec::Natural => Frequency::natural(),
            FrequencySpec::LogIntegers => Frequency::log_integers(),
            FrequencySpec::LogPrimes => Frequency::log_primes(),
            FrequencySpec::QIndependent => {
                let logp = Frequency::log_primes();
                let idx: Vec<u64> = (1..=max_n.max(1)).collect();
                Frequency::q_independent(logp.values_at(&idx, backend)?)?
            }
            FrequencySpec::File(p) => read_frequency_file(p)?,
        };
        let declared = f.is_b2();
        Ok(f.with_b2(b2 || declared))
    }
}

/// The `--support` argument.
#[derive(Clone, Debug, PartialEq)]
pub enum SupportSpec {
    /// `upto:x`: `{0..x}` for the natural frequency, `{1..x}` otherwise.
    UpTo(u64),
    /// `range:a,b`: `{a..b}`.
    Range(u64, u64),
    /// `list:n1,n2,...`.
    List(Vec<u64>),
    /// `n1:m,x`: `{n ≤ x : Ω(n) = m}`.
    N1 { m: u32, x: u64 },
    /// `ninf:m,n`: `{𝔭^α : α ∈ ℕ₀ⁿ, ‖α‖_∞ ≤ m}`.
    Ninf { m: u64, n: usize },
    /// `family:<tag>:<params>`: a generated multi-index family.
    Family(Family),
    /// `file:PATH`: an index-set file.
    File(PathBuf),
}

fn ints(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<u64>().map_err(|_| format!("`{v}` is not a non-negative integer")))
        .collect()
}

fn pair(s: &str, what: &str) -> Result<(u64, u64), String> {
    match ints(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(format!("{what} takes two comma-separated integers")),
    }
}

impl FromStr for SupportSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("malformed support `{s}`"))?;
        Ok(match kind {
            "upto" => match ints(rest)?.as_slice() {
                &[x] => SupportSpec::UpTo(x),
                _ => return Err("upto takes one integer".into()),
            },
            "range" => {
                let (a, b) = pair(rest, "range")?;
                if a > b {
                    return Err(format!("empty range {a}..{b}"));
                }
                SupportSpec::Range(a, b)
            }
            "list" => SupportSpec::List(ints(rest)?),
            "n1" => {
                let (m, x) = pair(rest, "n1")?;
                SupportSpec::N1 { m: u32::try_from(m).map_err(|_| "m too large")?, x }
            }
            "ninf" => {
                let (m, n) = pair(rest, "ninf")?;
                SupportSpec::Ninf { m, n: n as usize }
            }
            "family" => {
                let (tag, params) = rest.split_once(':').unwrap_or((rest, ""));
                SupportSpec::Family(Family::parse(tag, params).map_err(|e| e.to_string())?)
            }
            "file" if !rest.is_empty() => SupportSpec::File(PathBuf::from(rest)),
            _ => return Err(format!("unknown support `{s}` (upto, range, list, n1, ninf, family, file)")),
        })
    }
}

impl SupportSpec {
    /// The indices `n` of a Dirichlet support.
    pub fn integers<B: Backend>(&self, natural: bool, backend: &B) -> Result<Vec<u64>, FormatError> {
        Ok(match self {
            SupportSpec::UpTo(x) => ((if natural { 0 } else { 1 })..=*x).collect(),
            SupportSpec::Range(a, b) => (*a..=*b).collect(),
            SupportSpec::List(v) => v.clone(),
            SupportSpec::N1 { m, x } => backend.sieve((*x).max(2)).n1_numbers(*m, *x)?,
            SupportSpec::Ninf { m, n } => {
                let sieve = backend.sieve(1 << 16);
                indexsets::ninf_numbers(*m, *n, &sieve)?
            }
            SupportSpec::Family(_) => {
                return Err(parse_err(0, "family supports are multi-index sets; use them with `sidon` or `count`"))
            }
            SupportSpec::File(p) => {
                let set = read_index_set_file(p)?;
                if set.dim() != 1 {
                    return Err(parse_err(0, format!("a Dirichlet support file must have dim=1, found {}", set.dim())));
                }
                set.iter()
                    .map(|a| u64::try_from(a.get(0)).map_err(|_| parse_err(0, "negative index in support file")))
                    .collect::<Result<_, _>>()?
            }
        })
    }

    /// A multi-index set; integer specs become one-variable sets.
    pub fn index_set<B: Backend>(&self, cap: u128, backend: &B) -> Result<IndexSet, FormatError> {
        match self {
            SupportSpec::Family(f) => {
                let need = match f {
                    Family::DeltaX { x } | Family::N1Lift { x, .. } => (*x).max(2),
                    _ => 2,
                };
                let sieve = backend.sieve(need);
                Ok(indexsets::generate_with(f, &GenerateOptions { cap, sieve: Some(&sieve) })?)
            }
            SupportSpec::File(p) => read_index_set_file(p),
            _ => {
                let v = self.integers(true, backend)?;
                Ok(IndexSet::from_integers(v.into_iter().map(|n| n as i64))?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use projconst_core::indexsets::{generate, PNorm};
    use projconst_core::Sequential;

    #[test]
    fn index_set_round_trip() {
        for f in [
            Family::LambdaLe { p: PNorm::One, m: 2, n: 3 },
            Family::Box { d: vec![1, 2], analytic: false },
            Family::DeltaX { x: 30 },
            Family::Sphere { m: 2, n: 2 },
        ] {
            let set = generate(&f).unwrap();
            let mut buf = Vec::new();
            write_index_set(&set, &mut buf).unwrap();
            let back = read_index_set(buf.as_slice()).unwrap();
            assert_eq!(back, set);
        }
    }

    #[test]
    fn index_set_errors() {
        assert!(read_index_set("1 2\n".as_bytes()).is_err());
        assert!(read_index_set("# dim=2 family=custom params=\n1\n".as_bytes()).is_err());
        let bad = "# dim=2 family=lambda_exact params=p=1,m=2,n=2\n1 0\n";
        assert!(read_index_set(bad.as_bytes()).is_err());
        let dup = "# dim=1\n3\n3\n";
        assert!(read_index_set(dup.as_bytes()).is_err());
        let ok = read_index_set("# dim=1\n\n5\n-2\n".as_bytes()).unwrap();
        assert_eq!(ok.len(), 2);
    }

    #[test]
    fn frequency_files() {
        let f = read_frequency("# frequency explicit\n0.5\n1.25\n".as_bytes()).unwrap();
        assert_eq!(f.explicit_values(), &[0.5, 1.25]);
        let f = read_frequency("# frequency explicit qindependent b2\n1\n2\n".as_bytes()).unwrap();
        assert_eq!(f.label(), "qindep");
        assert!(f.is_b2());
        assert!(read_frequency("# frequency explicit\n1\nnan\n".as_bytes()).is_err());
        assert!(read_frequency("# frequency\n1\n".as_bytes()).is_err());
        assert!(read_frequency("1\n".as_bytes()).is_err());
    }

    #[test]
    fn supports() {
        let s: SupportSpec = "upto:4".parse().unwrap();
        assert_eq!(s.integers(true, &Sequential).unwrap(), [0, 1, 2, 3, 4]);
        assert_eq!(s.integers(false, &Sequential).unwrap(), [1, 2, 3, 4]);
        let s: SupportSpec = "n1:2,30".parse().unwrap();
        assert_eq!(s.integers(false, &Sequential).unwrap(), [4, 6, 9, 10, 14, 15, 21, 22, 25, 26]);
        let s: SupportSpec = "ninf:2,2".parse().unwrap();
        assert_eq!(s.integers(false, &Sequential).unwrap(), [1, 2, 3, 4, 6, 9, 12, 18, 36]);
        let s: SupportSpec = "family:box:d=1:1".parse().unwrap();
        assert_eq!(s.index_set(1000, &Sequential).unwrap().len(), 9);
        assert!("range:5,2".parse::<SupportSpec>().is_err());
        assert!("bogus:1".parse::<SupportSpec>().is_err());
        assert!("list:1,x".parse::<SupportSpec>().is_err());
    }

    #[test]
    fn frequency_specs() {
        assert_eq!("logp".parse::<FrequencySpec>().unwrap(), FrequencySpec::LogPrimes);
        assert!("file:".parse::<FrequencySpec>().is_err());
        let f = FrequencySpec::QIndependent.build(3, false, &Sequential).unwrap();
        assert_eq!(f.explicit_values().len(), 3);
        assert!((f.explicit_values()[2] - 5f64.ln()).abs() < 1e-15);
    }
}
