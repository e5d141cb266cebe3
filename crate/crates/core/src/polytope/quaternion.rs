use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Quaternion with integer coordinates `w + x i + y j + z k`.
///
/// Used as a label set: `Q8` is `{±1, ±i, ±j, ±k}` and the remaining labels
/// `±1±i±j±k` are the elements `½(±1±i±j±k)` of the binary tetrahedral group
/// with the factor ½ dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quaternion {
    pub w: i32,
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1, 0, 0, 0);
    pub const I: Quaternion = Quaternion::new(0, 1, 0, 0);
    pub const J: Quaternion = Quaternion::new(0, 0, 1, 0);
    pub const K: Quaternion = Quaternion::new(0, 0, 0, 1);

    pub const fn new(w: i32, x: i32, y: i32, z: i32) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn coords(&self) -> [i32; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Quaternion) -> i32 {
        self.coords().iter().zip(other.coords()).map(|(a, b)| a * b).sum()
    }

    pub fn is_q8(&self) -> bool {
        self.coords().iter().map(|c| c.abs()).sum::<i32>() == 1
    }

    /// `±1±i±j±k`.
    pub fn is_tetrahedral(&self) -> bool {
        self.coords().iter().all(|c| c.abs() == 1)
    }

    /// The involution `(x₁, x₂, x₃, x₄) ↦ (x₁, −x₂, −x₄, −x₃)`.
    pub fn iota(&self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.z, -self.y)
    }

    pub fn q8() -> [Quaternion; 8] {
        let (one, i, j, k) = (Self::ONE, Self::I, Self::J, Self::K);
        [one, -one, i, -i, j, -j, k, -k]
    }

    pub fn minus_signs(&self) -> usize {
        self.coords().iter().filter(|&&c| c < 0).count()
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, o: Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (c, unit) in self.coords().iter().zip(["1", "i", "j", "k"]) {
            if *c == 0 {
                continue;
            }
            if *c < 0 {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if c.abs() != 1 {
                out.push_str(&c.abs().to_string());
                if unit == "1" {
                    continue;
                }
            }
            out.push_str(unit);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl FromStr for Quaternion {
    type Err = Error;

    /// Parses sums of signed unit terms such as `1-i+j-k` or `-j`. Both ASCII
    /// `-` and the Unicode minus sign are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).map(|c| if c == '−' { '-' } else { c }).collect();
        if s.is_empty() {
            return Err(Error::input("empty quaternion label"));
        }
        let mut coords = [0i32; 4];
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let sign = match rest.as_bytes()[0] {
                b'-' => {
                    rest = &rest[1..];
                    -1
                }
                b'+' => {
                    rest = &rest[1..];
                    1
                }
                _ => 1,
            };
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            let (digits, unit) = match term.char_indices().find(|(_, c)| !c.is_ascii_digit()) {
                Some((p, _)) => (&term[..p], &term[p..]),
                None => (term, ""),
            };
            let slot = match unit {
                "" => 0,
                "i" => 1,
                "j" => 2,
                "k" => 3,
                _ => return Err(Error::input(format!("bad quaternion label {s:?}"))),
            };
            let mag: i32 = if digits.is_empty() {
                if unit.is_empty() {
                    return Err(Error::input(format!("bad quaternion label {s:?}")));
                }
                1
            } else {
                digits
                    .parse()
                    .map_err(|_| Error::input(format!("bad quaternion label {s:?}")))?
            };
            coords[slot] += sign * mag;
        }
        Ok(Quaternion::new(coords[0], coords[1], coords[2], coords[3]))
    }
}

/// Base points of the three `Q8`-orbits on `±1±i±j±k ∪ Q8`.
pub const R_BASE_POINTS: [Quaternion; 3] = [
    Quaternion::ONE,
    Quaternion::new(1, -1, 1, -1),
    Quaternion::new(1, 1, 1, -1),
];

/// `r(t) = q` where `t = q·t'` for a base point `t'`. `None` outside the 24
/// labels.
pub fn r_value(t: Quaternion) -> Option<Quaternion> {
    Quaternion::q8()
        .into_iter()
        .find(|&q| R_BASE_POINTS.iter().any(|&b| q * b == t))
}

/// The table of `r`, one row per value of `r`: `[q, q·t'₂, q·t'₃]`, written
/// out literally so it can be checked against the multiplication rule.
pub fn r_table() -> Vec<(Quaternion, [&'static str; 3])> {
    let rows: [(&str, [&str; 3]); 8] = [
        ("1", ["1", "1-i+j-k", "1+i+j-k"]),
        ("-1", ["-1", "-1+i-j+k", "-1-i-j+k"]),
        ("i", ["i", "1+i+j+k", "-1+i+j+k"]),
        ("-i", ["-i", "-1-i-j-k", "1-i-j-k"]),
        ("j", ["j", "-1-i+j+k", "-1-i+j-k"]),
        ("-j", ["-j", "1+i-j-k", "1+i-j+k"]),
        ("k", ["k", "1-i-j+k", "1-i+j+k"]),
        ("-k", ["-k", "-1+i+j-k", "-1+i-j-k"]),
    ];
    rows.iter()
        .map(|(q, row)| (q.parse().expect("static label"), *row))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Quaternion {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["1", "-1", "i", "-k", "1+i+j+k", "-1-i+j-k", "1-i-j+k"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("−1+i"), Quaternion::new(-1, 1, 0, 0));
        assert!("".parse::<Quaternion>().is_err());
        assert!("1+x".parse::<Quaternion>().is_err());
    }

    #[test]
    fn hamilton_rules() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(i * j * k, -Quaternion::ONE);
    }

    #[test]
    fn r_table_matches_multiplication() {
        for (value, row) in r_table() {
            for (t, base) in row.iter().zip(R_BASE_POINTS) {
                assert_eq!(value * base, q(t));
                assert_eq!(r_value(q(t)), Some(value));
            }
        }
        assert_eq!(r_value(q("1+i+j+k")), Some(Quaternion::I));
        assert_eq!(r_value(Quaternion::new(2, 0, 0, 0)), None);
    }

    #[test]
    fn iota_is_an_automorphism_fixing_base_points() {
        let all: Vec<Quaternion> = r_table()
            .iter()
            .flat_map(|(_, row)| row.iter().map(|s| q(s)))
            .collect();
        for &a in &all {
            for &b in &all {
                assert_eq!((a * b).iota(), a.iota() * b.iota());
            }
        }
        let mut base: Vec<_> = R_BASE_POINTS.to_vec();
        let mut image: Vec<_> = R_BASE_POINTS.iter().map(|b| b.iota()).collect();
        base.sort();
        image.sort();
        assert_eq!(base, image);
        assert_eq!(Quaternion::J.iota(), -Quaternion::K);
    }
}
