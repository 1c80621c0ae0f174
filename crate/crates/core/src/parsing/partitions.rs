//! Set-partition enumeration via restricted growth strings, plus Bell
//! numbers for budget reporting.

/// Bell number B(n), or None on u128 overflow.
pub fn bell_number(n: usize) -> Option<u128> {
    // Bell triangle; row starts with the last element of the previous row.
    let mut row: Vec<u128> = vec![1];
    for _ in 1..=n {
        let mut next: Vec<u128> = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            let prev = *next.last().unwrap();
            next.push(prev.checked_add(v)?);
        }
        row = next;
    }
    Some(row[0])
}

/// Iterator over all set partitions of `{0, .., n-1}`, represented as
/// restricted growth strings: `assignment[i]` is the block index of element
/// `i`, with `assignment[i] <= 1 + max(assignment[..i])` and
/// `assignment[0] = 0`. Yields in lexicographic order of the string.
pub struct SetPartitions {
    assignment: Vec<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            started: false,
            done: n == 0,
        }
    }

    /// Converts the current growth string into explicit member lists.
    pub fn blocks(assignment: &[usize]) -> Vec<Vec<usize>> {
        let nblocks = assignment.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (elem, &b) in assignment.iter().enumerate() {
            blocks[b].push(elem);
        }
        blocks
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.assignment.clone());
        }
        let n = self.assignment.len();
        // Find the rightmost position that can still grow.
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                return None;
            }
            i -= 1;
            let prefix_max = self.assignment[..i].iter().copied().max().unwrap();
            if self.assignment[i] <= prefix_max {
                self.assignment[i] += 1;
                for j in i + 1..n {
                    self.assignment[j] = 0;
                }
                return Some(self.assignment.clone());
            }
        }
    }
}
