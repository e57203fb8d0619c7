//! Built-in curvature data for standard compact symmetric spaces, and the
//! JSON space-file format for user data.

use std::fs;
use std::path::Path;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::curvature::{derive_holonomy, validate_symmetric_space, SpaceSpec};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, QMatrix, Rational};

pub const SCHEMA_VERSION: u32 = 1;

/// Names accepted by [`builtin`]; `flat(n)` is also accepted for any `n ≥ 1`.
pub const BUILTIN_NAMES: &[&str] = &["S2", "S3", "S4", "S5", "S6", "S2xS2", "S2xS3", "flat(n)"];

pub fn builtin(name: &str) -> Result<SpaceSpec> {
    if let Some(n) = parse_flat(name) {
        return flat(n);
    }
    let factors: Vec<&str> = name.split('x').collect();
    let spheres: Option<Vec<usize>> = factors
        .iter()
        .map(|f| f.strip_prefix('S').and_then(|d| d.parse().ok()))
        .collect();
    match spheres.as_deref() {
        Some([d]) if (2..=6).contains(d) => sphere(*d),
        Some([2, 2]) | Some([2, 3]) => {
            let parts = spheres.unwrap();
            let mut spec = product(&sphere(parts[0])?, &sphere(parts[1])?)?;
            spec.name = name.to_string();
            Ok(spec)
        }
        _ => Err(Error::UnknownSpace(name.to_string())),
    }
}

fn parse_flat(name: &str) -> Option<usize> {
    let rest = name.strip_prefix("flat")?;
    let digits = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(rest);
    digits.parse().ok().filter(|&n| n >= 1)
}

pub fn flat(n: usize) -> Result<SpaceSpec> {
    SpaceSpec::new(
        format!("flat{n}"),
        QMatrix::identity(n),
        QMatrix::zeros(0, 0),
        vec![],
    )
}

/// Unit-radius round sphere: one generator per pair `c < d`,
/// `E^(cd)_ab = δ^c_a δ^d_b − δ^d_a δ^c_b`, with `β = g = I`.
pub fn sphere(n: usize) -> Result<SpaceSpec> {
    let mut e = Vec::new();
    for c in 0..n {
        for d in (c + 1)..n {
            let mut m = QMatrix::zeros(n, n);
            m[(c, d)] = Rational::one();
            m[(d, c)] = -Rational::one();
            e.push(m);
        }
    }
    let p = e.len();
    SpaceSpec::new(
        format!("S{n}"),
        QMatrix::identity(n),
        QMatrix::identity(p),
        e,
    )
}

/// Block-direct sum of two data.
pub fn product(a: &SpaceSpec, b: &SpaceSpec) -> Result<SpaceSpec> {
    let (n, p) = (a.n + b.n, a.p + b.p);
    let mut g = QMatrix::zeros(n, n);
    g.set_block(0, 0, &a.g);
    g.set_block(a.n, a.n, &b.g);
    let mut beta = QMatrix::zeros(p, p);
    beta.set_block(0, 0, &a.beta);
    beta.set_block(a.p, a.p, &b.beta);
    let e =
        a.e.iter()
            .map(|m| m.embed(n, n, 0, 0))
            .chain(b.e.iter().map(|m| m.embed(n, n, a.n, a.n)))
            .collect();
    SpaceSpec::new(format!("{}x{}", a.name, b.name), g, beta, e)
}

/// Splits a datum into independent factors when its tangent space, metrics
/// and generators decompose block-wise. Flat directions are grouped into a
/// single flat factor. Returns a single element when the space is irreducible
/// under this coordinate splitting.
pub fn decompose(spec: &SpaceSpec) -> Vec<SpaceSpec> {
    let (n, p) = (spec.n, spec.p);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let union = |parent: &mut Vec<usize>, x: usize, y: usize| {
        let (rx, ry) = (find(parent, x), find(parent, y));
        if rx != ry {
            parent[rx.max(ry)] = rx.min(ry);
        }
    };
    for a in 0..n {
        for b in 0..n {
            if a != b && !spec.g[(a, b)].is_zero() {
                union(&mut parent, a, b);
            }
        }
    }
    let support = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&a| (0..n).any(|b| !spec.e[i][(a, b)].is_zero()))
            .collect()
    };
    let supports: Vec<Vec<usize>> = (0..p).map(support).collect();
    for s in &supports {
        for w in s.windows(2) {
            union(&mut parent, w[0], w[1]);
        }
    }
    for i in 0..p {
        for k in 0..p {
            if i != k && !spec.beta[(i, k)].is_zero() {
                if let (Some(&x), Some(&y)) = (supports[i].first(), supports[k].first()) {
                    union(&mut parent, x, y);
                }
            }
        }
    }

    let roots: Vec<usize> = (0..n).map(|a| find(&mut parent, a)).collect();
    let mut curved: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut flat_dirs = Vec::new();
    let mut seen = Vec::new();
    for a in 0..n {
        let r = roots[a];
        if seen.contains(&r) {
            continue;
        }
        seen.push(r);
        let dirs: Vec<usize> = (0..n).filter(|&b| roots[b] == r).collect();
        let gens: Vec<usize> = (0..p)
            .filter(|&i| supports[i].first().is_some_and(|&x| roots[x] == r))
            .collect();
        if gens.is_empty() {
            flat_dirs.extend(dirs);
        } else {
            curved.push((dirs, gens));
        }
    }
    if !flat_dirs.is_empty() {
        flat_dirs.sort_unstable();
        curved.push((flat_dirs, Vec::new()));
    }
    if curved.len() <= 1 {
        return vec![spec.clone()];
    }
    curved
        .into_iter()
        .enumerate()
        .map(|(idx, (dirs, gens))| {
            let g = QMatrix::from_fn(dirs.len(), dirs.len(), |r, c| {
                spec.g[(dirs[r], dirs[c])].clone()
            });
            let beta = QMatrix::from_fn(gens.len(), gens.len(), |r, c| {
                spec.beta[(gens[r], gens[c])].clone()
            });
            let e = gens
                .iter()
                .map(|&i| {
                    QMatrix::from_fn(dirs.len(), dirs.len(), |r, c| {
                        spec.e[i][(dirs[r], dirs[c])].clone()
                    })
                })
                .collect();
            SpaceSpec {
                name: format!("{}[{idx}]", spec.name),
                n: dirs.len(),
                p: gens.len(),
                g,
                beta,
                e,
            }
        })
        .collect()
}

/// On-disk representation; rationals are `"p/q"` strings.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub schema_version: u32,
    pub name: String,
    pub n: usize,
    pub p: usize,
    pub g: Vec<Vec<String>>,
    pub beta: Vec<Vec<String>>,
    #[serde(rename = "E")]
    pub e: Vec<Vec<Vec<String>>>,
}

impl SpaceFile {
    pub fn from_spec(spec: &SpaceSpec) -> Self {
        let strings = |m: &QMatrix| -> Vec<Vec<String>> {
            m.row_vecs()
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect()
        };
        SpaceFile {
            schema_version: SCHEMA_VERSION,
            name: spec.name.clone(),
            n: spec.n,
            p: spec.p,
            g: strings(&spec.g),
            beta: strings(&spec.beta),
            e: spec.e.iter().map(strings).collect(),
        }
    }

    pub fn to_spec(&self) -> Result<SpaceSpec> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(parse_err(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        let g = parse_matrix("g", &self.g, self.n, self.n)?;
        let beta = parse_matrix("beta", &self.beta, self.p, self.p)?;
        if self.e.len() != self.p {
            return Err(parse_err(
                "E",
                format!("expected {} generators, found {}", self.p, self.e.len()),
            ));
        }
        let e = self
            .e
            .iter()
            .enumerate()
            .map(|(i, m)| parse_matrix(&format!("E[{i}]"), m, self.n, self.n))
            .collect::<Result<Vec<_>>>()?;
        for (i, m) in e.iter().enumerate() {
            if let Some((a, b)) = m.antisymmetry_violation() {
                return Err(parse_err(
                    &format!("E[{i}]"),
                    format!("generator E[{i}] is not antisymmetric at ({a},{b})"),
                ));
            }
        }
        SpaceSpec::new(self.name.clone(), g, beta, e).map_err(|err| match err {
            Error::InvalidSpec(msg) => parse_err("space", msg),
            other => other,
        })
    }
}

fn parse_err(field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_matrix(field: &str, rows: &[Vec<String>], nr: usize, nc: usize) -> Result<QMatrix> {
    if rows.len() != nr {
        return Err(parse_err(
            field,
            format!("expected {nr} rows, found {}", rows.len()),
        ));
    }
    let mut out = QMatrix::zeros(nr, nc);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != nc {
            return Err(parse_err(
                &format!("{field}[{r}]"),
                format!("expected {nc} entries, found {}", row.len()),
            ));
        }
        for (c, s) in row.iter().enumerate() {
            out[(r, c)] =
                parse_rational(s).map_err(|m| parse_err(&format!("{field}[{r}][{c}]"), m))?;
        }
    }
    Ok(out)
}

pub fn to_json(spec: &SpaceSpec) -> String {
    serde_json::to_string_pretty(&SpaceFile::from_spec(spec)).expect("space file serializes") + "\n"
}

/// Parses a space document. With `validate`, the datum must also pass every
/// symmetric-space identity.
pub fn from_json(text: &str, validate: bool) -> Result<SpaceSpec> {
    let file: SpaceFile = serde_json::from_str(text).map_err(|e| {
        parse_err(
            &format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let spec = file.to_spec()?;
    if validate {
        let hol = derive_holonomy(&spec).map_err(|e| Error::Validation(e.to_string()))?;
        let report = validate_symmetric_space(&spec, &hol);
        if !report.passed() {
            let msg = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::Validation(msg));
        }
    }
    Ok(spec)
}

pub fn load(path: impl AsRef<Path>, validate: bool) -> Result<SpaceSpec> {
    let text = fs::read_to_string(path)?;
    from_json(&text, validate)
}

pub fn save(spec: &SpaceSpec, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(spec))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::Riemann;
    use crate::rational::int;

    #[test]
    fn names() {
        assert_eq!(builtin("flat(3)").unwrap().n, 3);
        assert_eq!(builtin("flat3").unwrap().p, 0);
        assert_eq!(builtin("S4").unwrap().p, 6);
        assert_eq!(builtin("S2xS3").unwrap().n, 5);
        assert!(matches!(builtin("S7"), Err(Error::UnknownSpace(_))));
        assert!(matches!(builtin("CP2"), Err(Error::UnknownSpace(_))));
        assert!(matches!(builtin("flat0"), Err(Error::UnknownSpace(_))));
    }

    #[test]
    fn s2_matches_reference_datum() {
        let s = builtin("S2").unwrap();
        assert_eq!(s.e, vec![QMatrix::from_i64(&[&[0, 1], &[-1, 0]])]);
        assert_eq!(s.beta, QMatrix::identity(1));
    }

    #[test]
    fn sphere_riemann_is_constant_curvature() {
        for n in 2..=6 {
            let s = sphere(n).unwrap();
            let r = Riemann::reconstruct(&s);
            let delta = |a: usize, b: usize| if a == b { int(1) } else { int(0) };
            let expected = Riemann::from_fn(n, |a, b, c, d| {
                delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c)
            });
            assert_eq!(r, expected, "S{n}");
        }
    }

    #[test]
    fn product_mixed_blocks_vanish() {
        let s = builtin("S2xS2").unwrap();
        assert_eq!((s.n, s.p), (4, 2));
        let r = Riemann::reconstruct(&s);
        let block = |a: usize| a / 2;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let same =
                            block(a) == block(b) && block(b) == block(c) && block(c) == block(d);
                        if !same {
                            assert!(r.get(a, b, c, d).is_zero());
                        }
                    }
                }
            }
        }
        assert_eq!(r.get(0, 1, 0, 1), &int(1));
        assert_eq!(r.get(2, 3, 2, 3), &int(1));
    }

    #[test]
    fn decompose_products() {
        let parts = decompose(&builtin("S2xS3").unwrap());
        assert_eq!(parts.len(), 2);
        assert_eq!((parts[0].n, parts[0].p), (2, 1));
        assert_eq!((parts[1].n, parts[1].p), (3, 3));
        assert_eq!(decompose(&builtin("S4").unwrap()).len(), 1);
        assert_eq!(decompose(&builtin("flat3").unwrap()).len(), 1);
        let m = product(&builtin("S2").unwrap(), &flat(2).unwrap()).unwrap();
        let parts = decompose(&m);
        assert_eq!(parts.len(), 2);
        assert_eq!((parts[1].n, parts[1].p), (2, 0));
    }

    #[test]
    fn file_round_trip_and_errors() {
        let s3 = builtin("S3").unwrap();
        let text = to_json(&s3);
        assert_eq!(from_json(&text, true).unwrap(), s3);

        let bad = text.replacen(
            "\"schema_version\": 1",
            "\"schema_version\": 1, \"extra\": 0",
            1,
        );
        assert!(matches!(from_json(&bad, true), Err(Error::Parse { .. })));

        let mut file = SpaceFile::from_spec(&s3);
        file.e[2][0][1] = "1".into();
        let err = from_json(&serde_json::to_string(&file).unwrap(), true).unwrap_err();
        assert!(err.to_string().contains("E[2]"), "{err}");

        let mut file = SpaceFile::from_spec(&s3);
        file.beta[0][0] = "1/0".into();
        let err = from_json(&serde_json::to_string(&file).unwrap(), true).unwrap_err();
        assert!(err.to_string().contains("beta[0][0]"), "{err}");

        let err = from_json("{\n  \"schema_version\": 1,\n  \"name\": 3\n}", true).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
