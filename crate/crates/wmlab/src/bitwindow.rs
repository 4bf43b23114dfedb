//! Dense 0/1 characteristic vectors of integer sets restricted to a window.
//!
//! A `BitWindow` stands in for a subset of the naturals intersected with
//! `[lo, hi)`; bit `i` of the storage represents the integer `lo + i`.
//! Membership queries outside the window are an explicit error or a
//! tri-state [`Membership`], never a silent `false`: the window is a finite
//! truncation of an infinite set and callers must account for what lies
//! beyond it.

use std::io::{Read, Write};

use crate::error::{Error, Result};

const WORD_BITS: u64 = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct BitWindow {
    lo: u64,
    hi: u64,
    words: Vec<u64>,
}

/// Result of a membership query that is allowed to leave the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    NotIn,
    /// The index is a natural number but lies outside `[lo, hi)`; the window
    /// carries no information about it.
    Outside,
}

impl std::fmt::Debug for BitWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BitWindow[{}, {}) popcount={}",
            self.lo,
            self.hi,
            self.count_ones()
        )
    }
}

fn words_for(len: u64) -> usize {
    len.div_ceil(WORD_BITS) as usize
}

impl BitWindow {
    pub fn empty(lo: u64, hi: u64) -> Result<Self> {
        if lo >= hi {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(BitWindow {
            lo,
            hi,
            words: vec![0u64; words_for(hi - lo)],
        })
    }

    pub fn full(lo: u64, hi: u64) -> Result<Self> {
        let mut w = Self::empty(lo, hi)?;
        for word in w.words.iter_mut() {
            *word = u64::MAX;
        }
        w.mask_tail();
        Ok(w)
    }

    pub fn from_members<I: IntoIterator<Item = u64>>(lo: u64, hi: u64, members: I) -> Result<Self> {
        let mut w = Self::empty(lo, hi)?;
        for m in members {
            w.set(m)?;
        }
        Ok(w)
    }

    /// Zeroes storage bits at or beyond `len`; every mutating path calls this
    /// so `count_ones` can trust whole-word popcounts.
    fn mask_tail(&mut self) {
        let len = self.len();
        let tail = (len % WORD_BITS) as u32;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    #[inline]
    pub fn lo(&self) -> u64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Window length `hi - lo`; always >= 1 by construction.
    #[allow(clippy::len_without_is_empty)]
    #[inline]
    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    #[inline]
    fn rel(&self, n: u64) -> Result<u64> {
        if n < self.lo || n >= self.hi {
            return Err(Error::OutOfWindow {
                n: n as i128,
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(n - self.lo)
    }

    #[inline]
    fn bit_rel(&self, rel: u64) -> bool {
        let w = (rel / WORD_BITS) as usize;
        let b = rel % WORD_BITS;
        (self.words[w] >> b) & 1 == 1
    }

    pub fn set(&mut self, n: u64) -> Result<()> {
        let rel = self.rel(n)?;
        let w = (rel / WORD_BITS) as usize;
        self.words[w] |= 1u64 << (rel % WORD_BITS);
        Ok(())
    }

    pub fn unset(&mut self, n: u64) -> Result<()> {
        let rel = self.rel(n)?;
        let w = (rel / WORD_BITS) as usize;
        self.words[w] &= !(1u64 << (rel % WORD_BITS));
        Ok(())
    }

    /// Strict membership: indices outside the window are an error.
    pub fn contains(&self, n: u64) -> Result<bool> {
        Ok(self.bit_rel(self.rel(n)?))
    }

    /// Tri-state membership for signed indices. Negative indices are
    /// `Outside` as well (the represented sets live in the naturals).
    #[inline]
    pub fn query(&self, n: i128) -> Membership {
        if n < self.lo as i128 || n >= self.hi as i128 {
            Membership::Outside
        } else {
            if self.bit_rel((n - self.lo as i128) as u64) {
                Membership::In
            } else {
                Membership::NotIn
            }
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Popcount over `[from, to)`, which must lie inside the window.
    pub fn count_in(&self, from: u64, to: u64) -> Result<u64> {
        if from >= to {
            return Ok(0);
        }
        self.rel(from)?;
        self.rel(to - 1)?;
        let (a, b) = (from - self.lo, to - self.lo);
        let (wa, wb) = ((a / WORD_BITS) as usize, ((b - 1) / WORD_BITS) as usize);
        let lo_mask = u64::MAX << (a % WORD_BITS);
        let hi_off = ((b - 1) % WORD_BITS) as u32;
        let hi_mask = if hi_off == 63 {
            u64::MAX
        } else {
            (1u64 << (hi_off + 1)) - 1
        };
        if wa == wb {
            return Ok((self.words[wa] & lo_mask & hi_mask).count_ones() as u64);
        }
        let mut total = (self.words[wa] & lo_mask).count_ones() as u64;
        for w in &self.words[wa + 1..wb] {
            total += w.count_ones() as u64;
        }
        total += (self.words[wb] & hi_mask).count_ones() as u64;
        Ok(total)
    }

    /// Iterates members in increasing order.
    pub fn members(&self) -> Members<'_> {
        Members {
            win: self,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Copies the sub-range `[lo, hi)` out as its own window.
    pub fn slice(&self, lo: u64, hi: u64) -> Result<BitWindow> {
        if lo < self.lo || hi > self.hi {
            return Err(Error::OutOfWindow {
                n: if lo < self.lo { lo as i128 } else { hi as i128 },
                lo: self.lo,
                hi: self.hi,
            });
        }
        let mut out = BitWindow::empty(lo, hi)?;
        let nwords = out.words.len();
        for w in 0..nwords {
            out.words[w] = self.extract64(lo as i128 + (w as i128) * 64);
        }
        out.mask_tail();
        Ok(out)
    }

    /// 64 membership bits starting at absolute index `start`: output bit `i`
    /// is 1 iff `start + i` is a member. Indices outside the window
    /// contribute 0 (callers that must distinguish truncation handle the
    /// window bounds themselves).
    #[inline]
    pub fn extract64(&self, start: i128) -> u64 {
        let rel = start - self.lo as i128;
        let len = self.len() as i128;
        if rel <= -64 || rel >= len {
            return 0;
        }
        if rel < 0 {
            // bits [0, -rel) fall before the window
            return self.extract64(self.lo as i128) << (-rel) as u32;
        }
        let rel = rel as u64;
        let w = (rel / WORD_BITS) as usize;
        let off = (rel % WORD_BITS) as u32;
        let lo_part = self.words[w] >> off;
        if off == 0 {
            lo_part
        } else {
            let hi_part = self.words.get(w + 1).copied().unwrap_or(0);
            lo_part | (hi_part << (64 - off))
        }
    }

    /// 64 membership bits going downward from absolute index `top`:
    /// output bit `j` is 1 iff `top - j` is a member.
    #[inline]
    pub fn extract64_rev(&self, top: i128) -> u64 {
        self.extract64(top - 63).reverse_bits()
    }

    /// OR of `other` shifted by `+shift`, restricted to this window.
    pub fn or_shifted(&mut self, other: &BitWindow, shift: u64) {
        let lo = self.lo as i128;
        // blocked so the destination stays cache-resident per pass
        const BLOCK: usize = 4096;
        let nwords = self.words.len();
        let mut w = 0;
        while w < nwords {
            let end = (w + BLOCK).min(nwords);
            for i in w..end {
                self.words[i] |= other.extract64(lo + (i as i128) * 64 - shift as i128);
            }
            w = end;
        }
        self.mask_tail();
    }

    /// Clears `[from, to]` (inclusive) clamped to the window; returns the
    /// number of set bits that were cleared.
    pub fn clear_range_inclusive(&mut self, from: i128, to: i128) -> u64 {
        let lo = self.lo as i128;
        let hi = self.hi as i128;
        let a = from.max(lo);
        let b = to.min(hi - 1);
        if a > b {
            return 0;
        }
        let (a, b) = ((a - lo) as u64, (b - lo) as u64);
        let (wa, wb) = ((a / WORD_BITS) as usize, (b / WORD_BITS) as usize);
        let lo_mask = u64::MAX << (a % WORD_BITS);
        let hi_off = (b % WORD_BITS) as u32;
        let hi_mask = if hi_off == 63 {
            u64::MAX
        } else {
            (1u64 << (hi_off + 1)) - 1
        };
        let mut removed = 0u64;
        if wa == wb {
            let m = lo_mask & hi_mask;
            removed += (self.words[wa] & m).count_ones() as u64;
            self.words[wa] &= !m;
        } else {
            removed += (self.words[wa] & lo_mask).count_ones() as u64;
            self.words[wa] &= !lo_mask;
            for w in &mut self.words[wa + 1..wb] {
                removed += w.count_ones() as u64;
                *w = 0;
            }
            removed += (self.words[wb] & hi_mask).count_ones() as u64;
            self.words[wb] &= !hi_mask;
        }
        removed
    }

    /// True iff every member of `self` is a member of `other` (windows must
    /// coincide).
    pub fn is_subset_of(&self, other: &BitWindow) -> Result<bool> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(Error::LengthMismatch {
                left: self.len() as usize,
                right: other.len() as usize,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    pub fn union(&self, other: &BitWindow) -> Result<BitWindow> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(Error::LengthMismatch {
                left: self.len() as usize,
                right: other.len() as usize,
            });
        }
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
        Ok(out)
    }

    pub fn intersect(&self, other: &BitWindow) -> Result<BitWindow> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(Error::LengthMismatch {
                left: self.len() as usize,
                right: other.len() as usize,
            });
        }
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
        Ok(out)
    }

    /// Members of `self` that are not members of `other`.
    pub fn difference(&self, other: &BitWindow) -> Result<BitWindow> {
        if self.lo != other.lo || self.hi != other.hi {
            return Err(Error::LengthMismatch {
                left: self.len() as usize,
                right: other.len() as usize,
            });
        }
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        Ok(out)
    }

    /// Sets `[from, to]` (inclusive) clamped to the window.
    pub fn set_range_inclusive(&mut self, from: i128, to: i128) {
        let lo = self.lo as i128;
        let hi = self.hi as i128;
        let a = from.max(lo);
        let b = to.min(hi - 1);
        if a > b {
            return;
        }
        let (a, b) = ((a - lo) as u64, (b - lo) as u64);
        let (wa, wb) = ((a / WORD_BITS) as usize, (b / WORD_BITS) as usize);
        let lo_mask = u64::MAX << (a % WORD_BITS);
        let hi_off = (b % WORD_BITS) as u32;
        let hi_mask = if hi_off == 63 {
            u64::MAX
        } else {
            (1u64 << (hi_off + 1)) - 1
        };
        if wa == wb {
            self.words[wa] |= lo_mask & hi_mask;
        } else {
            self.words[wa] |= lo_mask;
            for w in &mut self.words[wa + 1..wb] {
                *w = u64::MAX;
            }
            self.words[wb] |= hi_mask;
        }
        self.mask_tail();
    }

    // --- BW1 serialization ------------------------------------------------
    //
    // ASCII header line "BW1 <lo> <hi>\n" followed by ceil((hi-lo)/8) raw
    // bytes, little-endian bit order within a byte.

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len().div_ceil(8) as usize + 32);
        self.encode_to(&mut out).expect("vec write cannot fail");
        out
    }

    pub fn encode_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "BW1 {} {}", self.lo, self.hi)?;
        let nbytes = self.len().div_ceil(8) as usize;
        let mut written = 0usize;
        for word in &self.words {
            let bytes = word.to_le_bytes();
            let take = (nbytes - written).min(8);
            w.write_all(&bytes[..take])?;
            written += take;
            if written == nbytes {
                break;
            }
        }
        Ok(())
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = bytes;
        Self::decode_from(&mut r)
    }

    pub fn decode_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut header = Vec::new();
        let mut byte = [0u8; 1];
        loop {
            let n = r.read(&mut byte)?;
            if n == 0 {
                return Err(Error::MalformedHeader("unterminated header line".into()));
            }
            if byte[0] == b'\n' {
                break;
            }
            if header.len() > 64 {
                return Err(Error::MalformedHeader("header line too long".into()));
            }
            header.push(byte[0]);
        }
        let text = std::str::from_utf8(&header)
            .map_err(|_| Error::MalformedHeader("non-UTF8 header".into()))?;
        let mut parts = text.split_whitespace();
        match parts.next() {
            Some("BW1") => {}
            other => {
                return Err(Error::MalformedHeader(format!(
                    "expected magic BW1, got {:?}",
                    other
                )))
            }
        }
        let lo: u64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedHeader("missing or invalid lo".into()))?;
        let hi: u64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedHeader("missing or invalid hi".into()))?;
        if parts.next().is_some() {
            return Err(Error::MalformedHeader("trailing tokens in header".into()));
        }
        let mut win = BitWindow::empty(lo, hi)?;
        let nbytes = win.len().div_ceil(8) as usize;
        let mut buf = vec![0u8; nbytes];
        let mut got = 0usize;
        while got < nbytes {
            let n = r.read(&mut buf[got..])?;
            if n == 0 {
                return Err(Error::ByteLengthMismatch {
                    expected: nbytes,
                    got,
                });
            }
            got += n;
        }
        for (i, chunk) in buf.chunks(8).enumerate() {
            let mut word = [0u8; 8];
            word[..chunk.len()].copy_from_slice(chunk);
            win.words[i] = u64::from_le_bytes(word);
        }
        // bits past hi-lo in the final byte must be zero
        let tail = (win.len() % 8) as u32;
        if tail != 0 {
            let last = *buf.last().unwrap();
            if last >> tail != 0 {
                return Err(Error::InvalidInput {
                    what: "bit stream",
                    detail: "set bits beyond the declared window length".into(),
                });
            }
        }
        Ok(win)
    }
}

pub struct Members<'a> {
    win: &'a BitWindow,
    word_idx: usize,
    current: u64,
}

impl Iterator for Members<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.current != 0 {
                let b = self.current.trailing_zeros() as u64;
                self.current &= self.current - 1;
                return Some(self.win.lo + self.word_idx as u64 * WORD_BITS + b);
            }
            self.word_idx += 1;
            if self.word_idx >= self.win.words.len() {
                return None;
            }
            self.current = self.win.words[self.word_idx];
        }
    }
}
