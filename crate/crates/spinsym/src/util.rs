//! Small combinatorial helpers.

/// Binomial coefficient as i64 (arguments stay tiny here).
pub fn binom(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: i64 = 1;
    let mut den: i64 = 1;
    for i in 0..k {
        num *= (n - i) as i64;
        den *= (i + 1) as i64;
    }
    num / den
}

/// Factorial as i64.
pub fn factorial(n: usize) -> i64 {
    (1..=n as i64).product::<i64>().max(1)
}

/// Enumerate all exponent multi-indices of the given length with total degree
/// exactly `degree`, in lexicographic order.
pub fn homogeneous_exponents(len: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; len];
    fn rec(pos: usize, remaining: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == current.len() {
            current[pos] = remaining;
            out.push(current.clone());
            return;
        }
        for d in 0..=remaining {
            current[pos] = d;
            rec(pos + 1, remaining - d, current, out);
        }
    }
    if len == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, degree, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), 6);
        assert_eq!(binom(6, 0), 1);
        assert_eq!(binom(3, 5), 0);
    }

    #[test]
    fn homogeneous_count() {
        // degree-3 monomials in 4 variables: C(6,3) = 20
        assert_eq!(homogeneous_exponents(4, 3).len(), 20);
    }
}
