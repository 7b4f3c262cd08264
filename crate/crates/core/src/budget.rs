/// Resource limits shared by every engine operation.
///
/// Exceeding any of them produces [`crate::Error::Budget`] (or an
/// `ExceededBudget` order result), never a truncated answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budgets {
    /// Maximum support size of a single vector.
    pub support: usize,
    /// Maximum recursion depth (tree levels) for the word problem and orders.
    pub recursion: usize,
    /// Maximum number of elements in an enumerated ball.
    pub ball: usize,
    /// Maximum number of first-layer vertices enumerated explicitly.
    pub vertices: u64,
    /// Maximum bit length of exact integers (enumeration indices, tower values).
    pub bits: u64,
    /// Maximum letter count of an intermediate word (powers grow quickly).
    pub word_letters: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            support: 4096,
            recursion: 64,
            ball: 5_000_000,
            vertices: 1 << 16,
            bits: 1 << 20,
            word_letters: 1 << 16,
        }
    }
}
