//! Plain-text formats: frozen-set files, Eb/N0 grids, bit strings and LLR lists.

use crate::error::{Error, Result};
use crate::gf2::BitWord;

/// Upper bound on the number of points a grid expression may expand to.
pub const MAX_GRID_POINTS: usize = 10_000;

/// Tolerance for including `stop` in a `start:step:stop` grid.
pub const GRID_TOL: f64 = 1e-9;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads one decimal index per line, strictly ascending. Blank lines and
/// surrounding whitespace are ignored; an empty file is the empty set.
pub fn parse_frozen_set(text: &str) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !line.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(
                no + 1,
                format!("expected a decimal index, got {line:?}"),
            ));
        }
        let idx: usize = line
            .parse()
            .map_err(|e| parse_err(no + 1, format!("bad index {line:?}: {e}")))?;
        if out.last().is_some_and(|&prev| idx <= prev) {
            return Err(parse_err(no + 1, format!("index {idx} is not ascending")));
        }
        out.push(idx);
    }
    Ok(out)
}

pub fn format_frozen_set(frozen: &[usize]) -> String {
    let mut s = String::with_capacity(frozen.len() * 6);
    for i in frozen {
        s.push_str(&i.to_string());
        s.push('\n');
    }
    s
}

/// Parses `start:step:stop` (inclusive of `stop` within [`GRID_TOL`]), a
/// comma-separated list, or a single value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| parse_err(1, format!("bad number {s:?}")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(parse_err(1, format!("{s:?} is not finite")))
        }
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, step, stop] = parts[..] else {
            return Err(parse_err(1, "range must be start:step:stop"));
        };
        let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
        if step <= 0.0 {
            return Err(parse_err(1, "grid step must be positive"));
        }
        if stop < start - GRID_TOL {
            return Err(parse_err(1, "grid stop lies below start"));
        }
        let count = ((stop - start) / step + GRID_TOL).floor();
        if count.is_nan() || count >= MAX_GRID_POINTS as f64 {
            return Err(parse_err(
                1,
                format!("grid expands to more than {MAX_GRID_POINTS} points"),
            ));
        }
        return Ok((0..=count as usize)
            .map(|i| start + i as f64 * step)
            .collect());
    }
    let values = spec.split(',').map(num).collect::<Result<Vec<_>>>()?;
    if values.len() > MAX_GRID_POINTS {
        return Err(parse_err(
            1,
            format!("grid has more than {MAX_GRID_POINTS} points"),
        ));
    }
    Ok(values)
}

/// Reads a string of `0`/`1` characters; whitespace is ignored.
pub fn parse_bits(text: &str) -> Result<BitWord> {
    let mut bits = Vec::new();
    for (no, line) in text.lines().enumerate() {
        for c in line.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => {
                    return Err(parse_err(
                        no + 1,
                        format!("unexpected character {c:?} in bit string"),
                    ))
                }
            }
        }
    }
    Ok(BitWord::from_bools(bits))
}

pub fn format_bits(w: &BitWord) -> String {
    w.to_string()
}

/// Reads whitespace- or comma-separated real LLRs. `inf`/`-inf` are accepted;
/// NaN is not.
pub fn parse_llrs(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        for tok in line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(no + 1, format!("bad LLR {tok:?}")))?;
            if v.is_nan() {
                return Err(parse_err(no + 1, "NaN LLR"));
            }
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_set_round_trip() {
        let f = vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 12];
        let text = format_frozen_set(&f);
        assert_eq!(text, "0\n1\n2\n3\n4\n5\n6\n7\n8\n12\n");
        assert_eq!(parse_frozen_set(&text).unwrap(), f);
        assert!(parse_frozen_set("").unwrap().is_empty());
        assert_eq!(parse_frozen_set(" 3 \r\n\n7\n").unwrap(), vec![3, 7]);
    }

    #[test]
    fn frozen_set_rejects_garbage() {
        for bad in [
            "1\n1\n",
            "3\n2\n",
            "a\n",
            "-1\n",
            "+4\n",
            "1 2\n",
            "99999999999999999999999\n",
        ] {
            assert!(
                matches!(parse_frozen_set(bad), Err(Error::Parse { .. })),
                "{bad:?}"
            );
        }
        assert!(matches!(
            parse_frozen_set("0\n5\nx"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn grid_forms() {
        assert_eq!(
            parse_grid("3.0:0.5:5.0").unwrap(),
            vec![3.0, 3.5, 4.0, 4.5, 5.0]
        );
        let g = parse_grid("0:0.1:0.3").unwrap();
        assert_eq!(g.len(), 4);
        assert!((g[3] - 0.3).abs() < 1e-12);
        assert_eq!(parse_grid("1:1:1").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("4,4.5, 5").unwrap(), vec![4.0, 4.5, 5.0]);
        assert_eq!(parse_grid("2.5").unwrap(), vec![2.5]);
        assert_eq!(parse_grid("1:0.4:2").unwrap().len(), 3);
    }

    #[test]
    fn grid_errors() {
        for bad in [
            "",
            "1:0:2",
            "1:-1:2",
            "3:1:2",
            "1:2",
            "1:1:2:3",
            "a",
            "1,,2",
            "nan",
            "inf",
            "0:1e-12:1",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn bits_and_llrs() {
        assert_eq!(parse_bits("01 1\n0").unwrap().to_bits(), vec![0, 1, 1, 0]);
        assert!(parse_bits("012").is_err());
        assert_eq!(format_bits(&BitWord::from_bits(&[1, 0, 1])), "101");
        assert_eq!(
            parse_llrs("1.5 -2\n3e2,inf").unwrap(),
            vec![1.5, -2.0, 300.0, f64::INFINITY]
        );
        assert!(parse_llrs("1 nan").is_err());
        assert!(parse_llrs("1 x").is_err());
    }
}
