//! Complexity and diversity measures for code-like symbol streams.
//!
//! Algorithmic complexity is estimated with the coding theorem on a toy
//! program space: every elementary cellular automaton rule, run from every
//! `w`-bit seed for `1..=T` steps on a ring. Longer streams are scored by
//! block decomposition over that table.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenMode {
    Bytes,
    Words,
    Bits,
}

impl std::str::FromStr for TokenMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bytes" => Ok(Self::Bytes),
            "words" => Ok(Self::Words),
            "bits" => Ok(Self::Bits),
            other => Err(invalid(format!("unknown token mode {other:?}"))),
        }
    }
}

/// Symbols as dense ids; `vocab[id]` is the printable symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub mode: TokenMode,
    pub tokens: Vec<u32>,
    pub vocab: Vec<String>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn symbol(&self, token: u32) -> &str {
        &self.vocab[token as usize]
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens.iter().map(|&t| self.symbol(t))
    }

    /// Bits of a `Bits` stream, in order.
    pub fn bits(&self) -> Result<Vec<bool>> {
        if self.mode != TokenMode::Bits {
            return Err(invalid("stream is not in bits mode"));
        }
        Ok(self.tokens.iter().map(|&t| t == 1).collect())
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Self {
            mode: TokenMode::Bits,
            tokens: bits.iter().map(|&b| b as u32).collect(),
            vocab: vec!["0".into(), "1".into()],
        }
    }
}

pub fn tokenize(input: &[u8], mode: TokenMode) -> Result<TokenStream> {
    if input.is_empty() {
        return Err(Error::InsufficientData("empty input".into()));
    }
    let ts = match mode {
        TokenMode::Bytes => TokenStream {
            mode,
            tokens: input.iter().map(|&b| b as u32).collect(),
            vocab: (0..=255u8).map(|b| format!("{b:02x}")).collect(),
        },
        TokenMode::Bits => {
            let bits: Vec<bool> = input.iter().flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1)).collect();
            TokenStream::from_bits(&bits)
        }
        TokenMode::Words => {
            let text = String::from_utf8_lossy(input);
            let mut ids: HashMap<String, u32> = HashMap::new();
            let mut vocab = Vec::new();
            let mut tokens = Vec::new();
            for w in text.split_whitespace() {
                let w = w.to_lowercase();
                let id = *ids.entry(w.clone()).or_insert_with(|| {
                    vocab.push(w);
                    vocab.len() as u32 - 1
                });
                tokens.push(id);
            }
            TokenStream { mode, tokens, vocab }
        }
    };
    if ts.is_empty() {
        return Err(Error::InsufficientData("input holds no tokens".into()));
    }
    Ok(ts)
}

pub fn type_token_ratio(ts: &TokenStream) -> Result<f64> {
    if ts.is_empty() {
        return Err(Error::InsufficientData("empty stream".into()));
    }
    let mut seen = ts.tokens.clone();
    seen.sort_unstable();
    seen.dedup();
    Ok(seen.len() as f64 / ts.len() as f64)
}

/// Phrases in the LZ78 incremental parse; an unfinished trailing phrase
/// counts once.
pub fn lz78_phrase_count(ts: &TokenStream) -> usize {
    let mut trie: HashMap<(u32, u32), u32> = HashMap::new();
    let mut next_node = 1u32;
    let mut node = 0u32;
    let mut phrases = 0;
    for &t in &ts.tokens {
        match trie.get(&(node, t)) {
            Some(&child) => node = child,
            None => {
                trie.insert((node, t), next_node);
                next_node += 1;
                phrases += 1;
                node = 0;
            }
        }
    }
    if node != 0 {
        phrases += 1;
    }
    phrases
}

/// Output frequencies of the cellular-automaton program space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtmTable {
    width: u32,
    max_steps: u32,
    hits: Vec<u64>,
    total_programs: u64,
}

pub fn eca_step(rule: u8, tape: u32, width: u32) -> u32 {
    let mask = (1u32 << width) - 1;
    // cell i lives at bit width-1-i, so its left neighbour is one bit higher
    let left = ((tape >> 1) | (tape << (width - 1))) & mask;
    let right = ((tape << 1) | (tape >> (width - 1))) & mask;
    let mut out = 0;
    for pos in 0..width {
        let idx = (((left >> pos) & 1) << 2) | (((tape >> pos) & 1) << 1) | ((right >> pos) & 1);
        out |= ((rule as u32 >> idx) & 1) << pos;
    }
    out
}

impl CtmTable {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn max_steps(&self) -> u32 {
        self.max_steps
    }

    pub fn total_programs(&self) -> u64 {
        self.total_programs
    }

    pub fn hits(&self, block: u32) -> u64 {
        self.hits.get(block as usize).copied().unwrap_or(0)
    }

    /// `m̂(block)`.
    pub fn probability(&self, block: u32) -> f64 {
        self.hits(block) as f64 / self.total_programs as f64
    }

    /// `K̂(block) = −log2 m̂(block)`, or one bit above the largest attainable
    /// value for blocks no program produces.
    pub fn k_bits(&self, block: u32) -> f64 {
        match self.hits(block) {
            0 => self.unseen_k(),
            h => (self.total_programs as f64).log2() - (h as f64).log2(),
        }
    }

    pub fn unseen_k(&self) -> f64 {
        (self.total_programs as f64).log2() + 1.0
    }

    /// Blocks with at least one hit, ascending.
    pub fn produced(&self) -> impl Iterator<Item = u32> + '_ {
        self.hits.iter().enumerate().filter(|(_, &h)| h > 0).map(|(b, _)| b as u32)
    }

    pub fn to_csv(&self) -> String {
        let digits = self.width.div_ceil(4) as usize;
        let mut s = String::from("block_hex,k_bits\n");
        for b in self.produced() {
            s.push_str(&format!("{b:0digits$x},{:?}\n", self.k_bits(b)));
        }
        s
    }

    /// Reads a table written by [`CtmTable::to_csv`]. Hit counts are recovered
    /// from `K̂`, which is exact for the power-of-two totals used here.
    pub fn from_csv(width: u32, max_steps: u32, text: &str) -> Result<Self> {
        check_ctm_params(width, max_steps)?;
        let total = ctm_total_programs(width, max_steps);
        let mut hits = vec![0u64; 1 << width];
        let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            let parse_err = |msg: &str| Error::Parse { line, msg: msg.into() };
            let block = u32::from_str_radix(rec.get(0).unwrap_or(""), 16).map_err(|_| parse_err("bad block_hex"))?;
            if block as usize >= hits.len() {
                return Err(parse_err("block wider than the table"));
            }
            let k: f64 = rec.get(1).unwrap_or("").parse().map_err(|_| parse_err("bad k_bits"))?;
            let h = (total as f64 * (-k).exp2()).round();
            if !(h >= 1.0) {
                return Err(parse_err("k_bits out of range"));
            }
            hits[block as usize] = h as u64;
        }
        let sum: u64 = hits.iter().sum();
        if sum != total {
            return Err(Error::Parse { line: 0, msg: format!("hit counts sum to {sum}, expected {total}") });
        }
        Ok(Self { width, max_steps, hits, total_programs: total })
    }
}

fn check_ctm_params(width: u32, max_steps: u32) -> Result<()> {
    if !(4..=12).contains(&width) {
        return Err(invalid("block width must lie in 4..=12"));
    }
    if !(1..=16).contains(&max_steps) {
        return Err(invalid("max steps must lie in 1..=16"));
    }
    Ok(())
}

fn ctm_total_programs(width: u32, max_steps: u32) -> u64 {
    256 * (1u64 << width) * max_steps as u64
}

/// Exhaustive table over `256 · 2^w · T` programs.
pub fn build_ctm_table(width: u32, max_steps: u32) -> Result<CtmTable> {
    check_ctm_params(width, max_steps)?;
    let size = 1usize << width;
    let hits = (0..=255u8)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, rule| {
                for seed in 0..size as u32 {
                    let mut tape = seed;
                    for _ in 0..max_steps {
                        tape = eca_step(rule, tape, width);
                        acc[tape as usize] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(CtmTable { width, max_steps, hits, total_programs: ctm_total_programs(width, max_steps) })
}

/// Non-overlapping `w`-bit blocks, most significant bit first; a trailing
/// partial block is dropped.
pub fn blocks(bits: &[bool], width: u32) -> Vec<u32> {
    bits.chunks_exact(width as usize)
        .map(|c| c.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32))
        .collect()
}

/// Block decomposition: `Σ_b K̂(b) + log2(multiplicity of b)` over distinct blocks.
pub fn bdm(ts: &TokenStream, width: u32, table: &CtmTable) -> Result<f64> {
    if table.width != width {
        return Err(invalid(format!("table width {} differs from block width {width}", table.width)));
    }
    let bits = ts.bits()?;
    if bits.len() < width as usize {
        return Err(Error::InsufficientData("stream shorter than one block".into()));
    }
    let mut mult: HashMap<u32, u64> = HashMap::new();
    for b in blocks(&bits, width) {
        *mult.entry(b).or_insert(0) += 1;
    }
    let mut distinct: Vec<(u32, u64)> = mult.into_iter().collect();
    distinct.sort_unstable();
    Ok(distinct.iter().map(|&(b, n)| table.k_bits(b) + (n as f64).log2()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub bdm_bits: f64,
    pub lz78_phrases: usize,
    pub ttr: f64,
}

impl ComplexityReport {
    /// BDM over the bit expansion of `input`; LZ78 and type-token ratio over
    /// `mode` tokens.
    pub fn compute(input: &[u8], mode: TokenMode, table: &CtmTable) -> Result<Self> {
        let bits = tokenize(input, TokenMode::Bits)?;
        let ts = tokenize(input, mode)?;
        Ok(Self {
            bdm_bits: bdm(&bits, table.width, table)?,
            lz78_phrases: lz78_phrase_count(&ts),
            ttr: type_token_ratio(&ts)?,
        })
    }
}

/// Line × symbol incidence; columns in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incidence {
    pub columns: Vec<String>,
    /// Column indices present in each line, ascending.
    pub rows: Vec<Vec<usize>>,
}

impl Incidence {
    pub fn dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row = vec![0u8; self.columns.len()];
                r.iter().for_each(|&c| row[c] = 1);
                row
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("line,symbol\n");
        for (i, r) in self.rows.iter().enumerate() {
            for &c in r {
                s.push_str(&format!("{i},{}\n", csv_field(&self.columns[c])));
            }
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn bipartite_incidence(lines: &[TokenStream]) -> Result<Incidence> {
    if lines.iter().all(|l| l.is_empty()) {
        return Err(Error::InsufficientData("all lines are empty".into()));
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut columns = Vec::new();
    let mut rows = Vec::with_capacity(lines.len());
    for line in lines {
        let mut row = Vec::new();
        for sym in line.symbols() {
            let c = *index.entry(sym).or_insert_with(|| {
                columns.push(sym.to_string());
                columns.len() - 1
            });
            row.push(c);
        }
        row.sort_unstable();
        row.dedup();
        rows.push(row);
    }
    Ok(Incidence { columns, rows })
}
