use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// A program variable.
///
/// Variables compare in natural order, so `x2 < x10`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Var {
    name: Arc<str>,
    split: usize,
    index: Option<u64>,
}

impl Var {
    pub fn new(name: &str) -> Var {
        let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let index = name[split..].parse::<u64>().ok();
        Var { name: Arc::from(name), split, index }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn prefix(&self) -> &str {
        &self.name[..self.split]
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.name, &other.name) {
            return Ordering::Equal;
        }
        self.prefix()
            .cmp(other.prefix())
            .then_with(|| self.index.cmp(&other.index))
            .then_with(|| self.name.cmp(&other.name))
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Var {
        Var::new(s)
    }
}
