use serde::{Deserialize, Serialize};

/// Start-of-text sentinel; never predicted.
pub const BOS: char = '\u{2}';
/// End-of-text sentinel; predicted like any other character.
pub const EOS: char = '\u{3}';

/// One conditioning context. The root is the empty context; a child of a
/// node extends its context by one more character to the left.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
struct Node {
    #[serde(rename = "x")]
    longer: Vec<(char, u32)>,
    /// Counts of the characters that followed this context, sorted.
    #[serde(rename = "n")]
    next: Vec<(char, u64)>,
    #[serde(rename = "t")]
    total: u64,
}

impl Node {
    fn count(&self, c: char) -> u64 {
        self.next
            .binary_search_by_key(&c, |e| e.0)
            .map_or(0, |i| self.next[i].1)
    }

    fn longer(&self, c: char) -> Option<u32> {
        self.longer
            .binary_search_by_key(&c, |e| e.0)
            .ok()
            .map(|i| self.longer[i].1)
    }

    fn bump(&mut self, c: char) {
        match self.next.binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.next[i].1 += 1,
            Err(i) => self.next.insert(i, (c, 1)),
        }
        self.total += 1;
    }

    /// Witten–Bell interpolation of this context's counts with `lower`, the
    /// estimate from the next-shorter context.
    fn interpolate(&self, c: Option<char>, lower: f64) -> f64 {
        if self.total == 0 {
            return lower;
        }
        let seen = c.map_or(0, |c| self.count(c)) as f64;
        let distinct = self.next.len() as f64;
        (seen + distinct * lower) / (self.total as f64 + distinct)
    }
}

/// Character n-gram model with Witten–Bell interpolated backoff.
///
/// Each training text is framed as `BOS text EOS`; every character after
/// `BOS` is counted under all of its preceding contexts of length
/// `0..order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharLm {
    order: usize,
    sequences: u64,
    nodes: Vec<Node>,
}

impl CharLm {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "n-gram order must be at least 1");
        CharLm {
            order,
            sequences: 0,
            nodes: vec![Node::default()],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of training texts seen.
    pub fn sequences(&self) -> u64 {
        self.sequences
    }

    pub fn frame(text: &str) -> Vec<char> {
        let mut framed = Vec::with_capacity(text.len() + 2);
        framed.push(BOS);
        framed.extend(text.chars());
        framed.push(EOS);
        framed
    }

    fn longer_or_insert(&mut self, node: usize, c: char) -> usize {
        let pos = self.nodes[node].longer.binary_search_by_key(&c, |e| e.0);
        match pos {
            Ok(i) => self.nodes[node].longer[i].1 as usize,
            Err(i) => {
                let id = self.nodes.len();
                self.nodes.push(Node::default());
                self.nodes[node].longer.insert(i, (c, id as u32));
                id
            }
        }
    }

    pub fn train(&mut self, text: &str) {
        let framed = Self::frame(text);
        self.sequences += 1;
        for i in 1..framed.len() {
            let c = framed[i];
            let mut node = 0;
            self.nodes[node].bump(c);
            for j in 1..self.order.min(i + 1) {
                node = self.longer_or_insert(node, framed[i - j]);
                self.nodes[node].bump(c);
            }
        }
    }

    /// Probability of `c` after `history`; `None` stands for any character
    /// never seen in training. `floor` is the uniform base distribution.
    pub fn prob(&self, history: &[char], c: Option<char>, floor: f64) -> f64 {
        let mut node = &self.nodes[0];
        let mut p = node.interpolate(c, floor);
        for &h in history.iter().rev().take(self.order - 1) {
            match node.longer(h) {
                Some(id) => {
                    node = &self.nodes[id as usize];
                    p = node.interpolate(c, p);
                }
                None => break,
            }
        }
        p
    }

    /// Σ ln P over the characters of `text`, each conditioned on the framed
    /// history. The end sentinel is not scored, so an empty text scores 0.
    pub fn log_prob(&self, text: &str, is_known: impl Fn(char) -> bool, floor: f64) -> f64 {
        let framed = Self::frame(text);
        let mut total = 0.0;
        for i in 1..framed.len() - 1 {
            let c = framed[i];
            let known = is_known(c).then_some(c);
            total += self.prob(&framed[..i], known, floor).ln();
        }
        total
    }

    /// Characters this model has seen as predictions, sorted.
    pub fn alphabet(&self) -> impl Iterator<Item = char> + '_ {
        self.nodes[0].next.iter().map(|e| e.0)
    }

    /// Occurrence count of a k-gram (k ≤ order) in the framed training texts.
    pub fn ngram_count(&self, gram: &[char]) -> u64 {
        match gram {
            [] => 0,
            [BOS] => self.sequences,
            [context @ .., last] => {
                if context.len() >= self.order {
                    return 0;
                }
                let mut node = &self.nodes[0];
                for &h in context.iter().rev() {
                    match node.longer(h) {
                        Some(id) => node = &self.nodes[id as usize],
                        None => return 0,
                    }
                }
                node.count(*last)
            }
        }
    }

    /// Every stored k-gram with its count, including the lone `BOS` unigram.
    pub fn ngrams(&self) -> Vec<(Vec<char>, u64)> {
        let mut out = vec![(vec![BOS], self.sequences)];
        // (node, context characters nearest-first)
        let mut stack: Vec<(usize, Vec<char>)> = vec![(0, Vec::new())];
        while let Some((id, rev_ctx)) = stack.pop() {
            let node = &self.nodes[id];
            let ctx: Vec<char> = rev_ctx.iter().rev().copied().collect();
            for &(c, n) in &node.next {
                let mut gram = ctx.clone();
                gram.push(c);
                out.push((gram, n));
            }
            for &(h, child) in &node.longer {
                let mut longer = rev_ctx.clone();
                longer.push(h);
                stack.push((child as usize, longer));
            }
        }
        out
    }
}
