//! Lexicographic k-subset enumeration with ranking, used to split the
//! root-of-unity sums into contiguous ranges.

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// The `rank`-th k-subset of `0..n` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u64) -> Option<Vec<usize>> {
    if rank >= binomial(n as u64, k as u64) {
        return None;
    }
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    for slot in 0..k {
        let remaining = (k - slot - 1) as u64;
        loop {
            let with_next = binomial((n - next - 1) as u64, remaining);
            if rank < with_next {
                out.push(next);
                next += 1;
                break;
            }
            rank -= with_next;
            next += 1;
        }
    }
    Some(out)
}

/// Advances `subset` to its lexicographic successor; returns false at the end.
pub fn next_subset(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Iterator over the k-subsets of `0..n` with ranks in `start..end`.
#[derive(Debug, Clone)]
pub struct SubsetRange {
    n: usize,
    current: Option<Vec<usize>>,
    remaining: u64,
}

impl SubsetRange {
    pub fn new(n: usize, k: usize, start: u64, end: u64) -> Self {
        let end = end.min(binomial(n as u64, k as u64));
        let current = if start < end {
            unrank(n, k, start)
        } else {
            None
        };
        SubsetRange {
            n,
            current,
            remaining: end.saturating_sub(start),
        }
    }

    pub fn all(n: usize, k: usize) -> Self {
        Self::new(n, k, 0, u64::MAX)
    }
}

impl Iterator for SubsetRange {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.remaining == 0 {
            return None;
        }
        let cur = self.current.take()?;
        self.remaining -= 1;
        if self.remaining > 0 {
            let mut succ = cur.clone();
            if next_subset(&mut succ, self.n) {
                self.current = Some(succ);
            }
        }
        Some(cur)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// Splits `0..total` into at most `parts` contiguous, nonempty ranges.
pub fn split_ranges(total: u64, parts: u64) -> Vec<(u64, u64)> {
    let parts = parts.clamp(1, total.max(1));
    let base = total / parts;
    let extra = total % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for i in 0..parts {
        let len = base + u64::from(i < extra);
        if len > 0 {
            out.push((start, start + len));
        }
        start += len;
    }
    out
}
