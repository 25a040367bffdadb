use rayon::prelude::*;

use super::KhError;
use crate::diagram::Diagram;

/// |V(-1)| from the Kauffman bracket at A = e^{iπ/4}. There the loop value
/// vanishes, so only one-circle states count, each with weight (-i)^{|I|}.
pub fn state_sum_det(d: &Diagram, max_crossings: usize) -> Result<u64, KhError> {
    let n = d.crossing_count();
    if n > max_crossings {
        return Err(KhError::SizeBudgetExceeded { crossings: n, cap: max_crossings });
    }
    if n == 0 {
        return Ok(u64::from(d.free_loops() <= 1));
    }
    // counts of one-circle states by |I| mod 4
    let by_residue = (0..1u64 << n)
        .into_par_iter()
        .filter(|&s| d.resolve_unchecked(s, None).circle_count == 1)
        .fold(
            || [0i128; 4],
            |mut acc, s| {
                acc[(s.count_ones() % 4) as usize] += 1;
                acc
            },
        )
        .reduce(|| [0i128; 4], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]);
    let re = by_residue[0] - by_residue[2];
    let im = by_residue[3] - by_residue[1];
    let sq = re * re + im * im;
    let root = (sq as f64).sqrt().round() as i128;
    let root = (root - 2..=root + 2).find(|r| *r >= 0 && r * r == sq).ok_or_else(|| {
        KhError::Mismatch(format!("state sum {re} + {im}i does not have integral modulus"))
    })?;
    Ok(root as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    #[test]
    fn small_determinants() {
        assert_eq!(state_sum_det(&Diagram::unknot(), 14).unwrap(), 1);
        let t = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        assert_eq!(state_sum_det(&t, 14).unwrap(), 3);
        let f8 = parse_pd("[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]", 0).unwrap();
        assert_eq!(state_sum_det(&f8, 14).unwrap(), 5);
        let h = parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap();
        assert_eq!(state_sum_det(&h, 14).unwrap(), 2);
        assert_eq!(state_sum_det(&Diagram::unlink(2), 14).unwrap(), 0);
    }
}
