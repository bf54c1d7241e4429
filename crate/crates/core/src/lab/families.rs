use crate::foliation::{FieldPreset, PolyVectorField};
use crate::geometry::{DomainExpr, DomainSequence, FSet, Point};
use crate::{Complex64, Error, Result};

/// A foliated domain sequence `W_n → W` inside an ambient `U`.
#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub field: PolyVectorField,
    pub w: DomainExpr,
    pub ambient: DomainExpr,
    pub sequence: DomainSequence,
}

fn polydisc(r: &[f64]) -> DomainExpr {
    DomainExpr::centered_polydisc(r).expect("positive radii")
}

/// `W_n = P(1,1) ∪ P(2, 1/n)` with the radial field in `P(5,5)`.
pub fn arm_bidisc() -> Family {
    let w = polydisc(&[1.0, 1.0]);
    let w2 = w.clone();
    let seq = DomainSequence::new("arm_bidisc", Point::origin(2), move |n| {
        DomainExpr::union(vec![w2.clone(), polydisc(&[2.0, 1.0 / n as f64])])
    })
    .with_kernel(w.clone())
    .with_f(FSet::line_annulus(Point::real(&[1.0, 0.0]), 1.0, 2.0).expect("valid"));
    Family {
        name: "arm_bidisc".into(),
        field: PolyVectorField::preset(FieldPreset::Radial(2)),
        w,
        ambient: polydisc(&[5.0, 5.0]),
        sequence: seq,
    }
}

/// `W_n = P(1,1,1) ∪ P(1/n, 2, 1/n)` in `P(5,5,5)`.
pub fn arm_tridisc(field: FieldPreset) -> Result<Family> {
    if field.dim() != 3 {
        return Err(Error::InvalidInput("arm_tridisc needs a field on C^3".into()));
    }
    let w = polydisc(&[1.0, 1.0, 1.0]);
    let w2 = w.clone();
    let seq = DomainSequence::new("arm_tridisc", Point::origin(3), move |n| {
        let s = 1.0 / n as f64;
        DomainExpr::union(vec![w2.clone(), polydisc(&[s, 2.0, s])])
    })
    .with_kernel(w.clone())
    .with_f(FSet::line_annulus(Point::real(&[0.0, 1.0, 0.0]), 1.0, 2.0)?);
    Ok(Family {
        name: "arm_tridisc".into(),
        field: PolyVectorField::preset(field),
        w,
        ambient: polydisc(&[5.0, 5.0, 5.0]),
        sequence: seq,
    })
}

/// `W_n = P(1,1) ∪ V_n`, `V_n` the `1/n`-neighbourhood of the segment
/// `{y = x, |x| < 3}`, with `x∂x + 2y∂y` in `P(5,5)`.
pub fn diagonal_tube() -> Family {
    let w = polydisc(&[1.0, 1.0]);
    let w2 = w.clone();
    let diag = Point::real(&[1.0, 1.0]);
    let extent = 3.0 * 2f64.sqrt();
    let d2 = diag.clone();
    let seq = DomainSequence::new("diagonal_tube", Point::origin(2), move |n| {
        let tube = DomainExpr::line_neighborhood(Point::origin(2), d2.clone(), extent, 1.0 / n as f64)?;
        DomainExpr::union(vec![w2.clone(), tube])
    })
    .with_kernel(w.clone())
    .with_f(FSet::line_annulus(diag, 2f64.sqrt(), extent).expect("valid"));
    Family {
        name: "diagonal_tube".into(),
        field: PolyVectorField::preset(FieldPreset::Weighted12),
        w,
        ambient: polydisc(&[5.0, 5.0]),
        sequence: seq,
    }
}

/// `W_n = P(1+1/n, 1+1/n) → P(1,1)` in the Hausdorff sense.
pub fn shrinking_shell() -> Family {
    let w = polydisc(&[1.0, 1.0]);
    let seq = DomainSequence::new("shrinking_shell", Point::origin(2), |n| {
        let r = 1.0 + 1.0 / n as f64;
        DomainExpr::centered_polydisc(&[r, r])
    })
    .with_kernel(w.clone())
    .with_f(FSet::Empty);
    Family {
        name: "shrinking_shell".into(),
        field: PolyVectorField::preset(FieldPreset::Radial(2)),
        w,
        ambient: polydisc(&[5.0, 5.0]),
        sequence: seq,
    }
}

/// `W_n = P(r_n, r_n)`, `r_n = 1 − 1/(n+2)`, increasing to `P(1,1)`.
pub fn exhaustion() -> Family {
    let w = polydisc(&[1.0, 1.0]);
    let seq = DomainSequence::new("exhaustion", Point::origin(2), |n| {
        let r = 1.0 - 1.0 / (n as f64 + 2.0);
        DomainExpr::centered_polydisc(&[r, r])
    })
    .with_kernel(w.clone())
    .with_f(FSet::Empty);
    Family {
        name: "exhaustion".into(),
        field: PolyVectorField::preset(FieldPreset::Radial(2)),
        w,
        ambient: polydisc(&[5.0, 5.0]),
        sequence: seq,
    }
}

/// Odd terms `P(1,1)`, even terms `P(1,1) ∪ P(2,1)`: no kernel limit.
pub fn alternating() -> Family {
    let w = polydisc(&[1.0, 1.0]);
    let w2 = w.clone();
    let seq = DomainSequence::new("alternating", Point::origin(2), move |n| {
        if n % 2 == 1 {
            Ok(w2.clone())
        } else {
            DomainExpr::union(vec![w2.clone(), polydisc(&[2.0, 1.0])])
        }
    });
    Family {
        name: "alternating".into(),
        field: PolyVectorField::preset(FieldPreset::Radial(2)),
        w,
        ambient: polydisc(&[5.0, 5.0]),
        sequence: seq,
    }
}

/// Radical inverse of `k` in base `b`.
pub fn van_der_corput(mut k: u64, b: u64) -> f64 {
    let mut x = 0.0;
    let mut scale = 1.0 / b as f64;
    while k > 0 {
        x += (k % b) as f64 * scale;
        k /= b;
        scale /= b as f64;
    }
    x
}

/// `j`-th boundary point of `P(1,1)` (1-based). Block `b = ⌊(j−1)/8⌋`
/// holds eight equally spaced phases offset by a Halton triple, which also
/// fixes the modulus `1 − v₃(b)` of the free coordinate and which
/// coordinate is free; block 0 lies on the torus `|x| = |y| = 1`.
pub fn dense_direction(j: usize) -> Result<Point> {
    if j == 0 {
        return Err(Error::InvalidInput("directions are indexed from 1".into()));
    }
    let b = ((j - 1) / 8) as u64;
    let k = ((j - 1) % 8) as f64;
    let theta = std::f64::consts::TAU * (k + van_der_corput(b, 2)) / 8.0;
    let free = Complex64::from_polar(1.0 - van_der_corput(b, 3), theta);
    let one = Complex64::new(1.0, 0.0);
    Point::new(if van_der_corput(b, 5) < 0.5 {
        vec![one, free]
    } else {
        vec![free, one]
    })
}

/// The enumeration `(1,1), (1,2), (2,1), (3,1), (2,2), (1,3), …` of pairs
/// `(j, m)` along alternating anti-diagonals, keeping `j ≤ j_max`.
pub fn diagonal_pairs(j_max: usize, count: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(count);
    let mut d = 1;
    while out.len() < count {
        let mut diag: Vec<(usize, usize)> = (1..=d).map(|j| (j, d + 1 - j)).collect();
        if d % 2 == 1 {
            diag.reverse();
        }
        out.extend(diag.into_iter().filter(|(j, _)| *j <= j_max));
        d += 1;
    }
    out.truncate(count);
    out
}

/// Index `n` at which every `j ≤ j_max` has reached `m ≥ m_max`.
pub fn dense_n_max(j_max: usize, m_max: usize) -> usize {
    let mut pairs = diagonal_pairs(j_max, 1);
    let mut count = 1;
    loop {
        if (1..=j_max).all(|j| pairs.iter().any(|&(a, m)| a == j && m >= m_max)) {
            return count;
        }
        count += 1;
        pairs = diagonal_pairs(j_max, count);
    }
}

/// `W_{j,m} = P(1,1) ∪ R_{j,m}` with `R_{j,m}` the `1/m`-neighbourhood of
/// the complex line through 0 and `q_j`, radial field in `P(5,5)`. Each
/// `{W_{j,m}}_m` is registered as a subsequence.
pub fn dense_lines(j_max: usize) -> Result<Family> {
    if j_max == 0 {
        return Err(Error::InvalidInput("j_max must be at least 1".into()));
    }
    let w = polydisc(&[1.0, 1.0]);
    let dirs: Vec<Point> = (1..=j_max).map(dense_direction).collect::<Result<_>>()?;
    let w2 = w.clone();
    let d2 = dirs.clone();
    let seq = DomainSequence::new("dense_lines", Point::origin(2), move |n| {
        let (j, m) = *diagonal_pairs(j_max, n).last().expect("n ≥ 1");
        let line = DomainExpr::line_neighborhood(Point::origin(2), d2[j - 1].clone(), 5.0, 1.0 / m as f64)?;
        DomainExpr::union(vec![w2.clone(), line])
    })
    .with_kernel(w.clone());
    let fs = dirs
        .iter()
        .map(|d| {
            // |t| past which t·d leaves the closed bidisc.
            let inner = 1.0 / d.coords().iter().map(|c| c.norm() / d.norm()).fold(0.0, f64::max);
            FSet::line_annulus(d.clone(), inner, 5.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut seq = seq.with_f(FSet::Union(fs));
    for j in 1..=j_max {
        seq = seq.with_subsequence(format!("line{j}"), move |n| {
            diagonal_pairs(j_max, n).last().is_some_and(|&(a, _)| a == j)
        });
    }
    Ok(Family {
        name: "dense_lines".into(),
        field: PolyVectorField::preset(FieldPreset::Radial(2)),
        w,
        ambient: polydisc(&[5.0, 5.0]),
        sequence: seq,
    })
}

/// Family by configuration name.
pub fn family_by_name(name: &str, field: Option<FieldPreset>, j_max: usize) -> Result<Family> {
    let mut fam = match name {
        "arm_bidisc" => arm_bidisc(),
        "arm_tridisc" => arm_tridisc(field.unwrap_or(FieldPreset::XZyZy))?,
        "diagonal_tube" => diagonal_tube(),
        "shrinking_shell" => shrinking_shell(),
        "exhaustion" => exhaustion(),
        "alternating" => alternating(),
        "dense_lines" => dense_lines(j_max)?,
        other => return Err(Error::Config(format!("unknown family `{other}`"))),
    };
    if let Some(f) = field {
        if f.dim() != fam.w.dim() {
            return Err(Error::Config(format!("field dimension does not match family `{name}`")));
        }
        fam.field = PolyVectorField::preset(f);
    }
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_enumeration_order() {
        assert_eq!(
            diagonal_pairs(10, 6),
            vec![(1, 1), (1, 2), (2, 1), (3, 1), (2, 2), (1, 3)]
        );
        assert!(diagonal_pairs(2, 20).iter().all(|(j, _)| *j <= 2));
    }

    #[test]
    fn first_block_is_equally_spaced_on_the_torus() {
        for j in 1..=8 {
            let d = dense_direction(j).unwrap();
            assert!((d.coords()[0].norm() - 1.0).abs() < 1e-15);
            assert!((d.coords()[1].norm() - 1.0).abs() < 1e-15);
        }
        let d9 = dense_direction(9).unwrap();
        let m = d9.coords().iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert_eq!(m, 1.0);
    }

    #[test]
    fn families_keep_the_base_point() {
        for fam in [arm_bidisc(), diagonal_tube(), shrinking_shell(), exhaustion(), alternating()] {
            for n in 1..20 {
                fam.sequence.term(n).unwrap();
            }
        }
        let dense = dense_lines(3).unwrap();
        assert!(dense.sequence.term(dense_n_max(3, 4)).is_ok());
    }
}
