//! Append-only protocol transcripts and the synchronous message channel.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    VerifierToProver,
    ProverToVerifier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolVerdict {
    Accept,
    Reject,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    /// Authenticated blocks changing hands, by block index.
    Quantum { blocks: Vec<usize> },
    /// Field digits (measurement strings or decoded values).
    Classical { digits: Vec<u32> },
    Verdict { verdict: ProtocolVerdict },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub seq: usize,
    pub round: usize,
    pub direction: Direction,
    pub payload: Payload,
}

/// Outcome of one protocol run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub verdict: ProtocolVerdict,
    /// Decoded output digits; `None` on abort.
    pub output: Option<Vec<u32>>,
    /// Rounds whose check failed.
    pub invalid_rounds: Vec<usize>,
    pub transcript: Transcript,
}

impl VerdictRecord {
    pub fn accepted(&self) -> bool {
        self.verdict == ProtocolVerdict::Accept
    }

    pub fn aborted(&self) -> bool {
        self.verdict == ProtocolVerdict::Abort
    }
}

/// Ordered record of everything that crossed the channel. Sequence numbers
/// strictly increase; rounds never decrease (a round holds several messages).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, round: usize, direction: Direction, payload: Payload) -> Result<()> {
        if let Some(last) = self.entries.last() {
            if round < last.round {
                return Err(Error::Transcript(format!("round {round} after round {}", last.round)));
            }
            if matches!(last.payload, Payload::Verdict { .. }) {
                return Err(Error::Transcript("message after the verdict".into()));
            }
        }
        self.entries.push(TranscriptEntry {
            seq: self.entries.len(),
            round,
            direction,
            payload,
        });
        Ok(())
    }

    pub fn verdict(&self) -> Option<ProtocolVerdict> {
        self.entries.iter().rev().find_map(|e| match e.payload {
            Payload::Verdict { verdict } => Some(verdict),
            _ => None,
        })
    }

    /// Classical messages in order, with their direction.
    pub fn classical(&self) -> impl Iterator<Item = (&TranscriptEntry, &[u32])> {
        self.entries.iter().filter_map(|e| match &e.payload {
            Payload::Classical { digits } => Some((e, digits.as_slice())),
            _ => None,
        })
    }

    /// Checks the ordering invariants of a transcript read from outside.
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.seq != i {
                return Err(Error::Transcript(format!("entry {i} has sequence number {}", e.seq)));
            }
            if i > 0 && e.round < self.entries[i - 1].round {
                return Err(Error::Transcript(format!("entry {i} goes back in rounds")));
            }
            if i + 1 < self.entries.len() && matches!(e.payload, Payload::Verdict { .. }) {
                return Err(Error::Transcript("verdict before the last entry".into()));
            }
        }
        Ok(())
    }

    /// One tab-separated line per entry: `seq round direction kind payload`,
    /// where the payload is comma-separated digits or block indices.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let dir = match e.direction {
                Direction::VerifierToProver => "V>P",
                Direction::ProverToVerifier => "P>V",
            };
            let (kind, body) = match &e.payload {
                Payload::Quantum { blocks } => ("quantum", join(blocks.iter())),
                Payload::Classical { digits } => ("classical", join(digits.iter())),
                Payload::Verdict { verdict } => (
                    "verdict",
                    String::from(match verdict {
                        ProtocolVerdict::Accept => "accept",
                        ProtocolVerdict::Reject => "reject",
                        ProtocolVerdict::Abort => "abort",
                    }),
                ),
            };
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", e.seq, e.round, dir, kind, body);
        }
        out
    }

    pub fn from_lines(text: &str) -> Result<Self> {
        let mut t = Transcript::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = || Error::Transcript(format!("line {}: malformed entry", n + 1));
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(bad());
            }
            let round: usize = cols[1].parse().map_err(|_| bad())?;
            let direction = match cols[2] {
                "V>P" => Direction::VerifierToProver,
                "P>V" => Direction::ProverToVerifier,
                _ => return Err(bad()),
            };
            let nums = |s: &str| -> Result<Vec<u64>> {
                if s.is_empty() {
                    return Ok(Vec::new());
                }
                s.split(',').map(|v| v.parse::<u64>().map_err(|_| bad())).collect()
            };
            let payload = match cols[3] {
                "quantum" => Payload::Quantum {
                    blocks: nums(cols[4])?.into_iter().map(|v| v as usize).collect(),
                },
                "classical" => Payload::Classical {
                    digits: nums(cols[4])?.into_iter().map(|v| v as u32).collect(),
                },
                "verdict" => Payload::Verdict {
                    verdict: match cols[4] {
                        "accept" => ProtocolVerdict::Accept,
                        "reject" => ProtocolVerdict::Reject,
                        "abort" => ProtocolVerdict::Abort,
                        _ => return Err(bad()),
                    },
                },
                _ => return Err(bad()),
            };
            if cols[0].parse::<usize>().map_err(|_| bad())? != t.len() {
                return Err(Error::Transcript(format!("line {}: sequence gap", n + 1)));
            }
            t.push(round, direction, payload)?;
        }
        Ok(t)
    }
}

fn join<T: core::fmt::Display>(it: impl Iterator<Item = T>) -> String {
    let mut s = String::new();
    for (i, v) in it.enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v}");
    }
    s
}

/// Byte encoding of a classical payload: a varint length, then varint digits.
pub fn encode_digits(digits: &[u32]) -> Vec<u8> {
    let mut out = Vec::new();
    put_varint(&mut out, digits.len() as u64);
    for &d in digits {
        put_varint(&mut out, d as u64);
    }
    out
}

pub fn decode_digits(bytes: &[u8]) -> Result<Vec<u32>> {
    let mut pos = 0;
    let n = get_varint(bytes, &mut pos)? as usize;
    let mut out = Vec::with_capacity(n.min(bytes.len()));
    for _ in 0..n {
        let v = get_varint(bytes, &mut pos)?;
        out.push(u32::try_from(v).map_err(|_| Error::Transcript("digit overflows u32".into()))?);
    }
    if pos != bytes.len() {
        return Err(Error::Transcript("trailing bytes in classical message".into()));
    }
    Ok(out)
}

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let b = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

fn get_varint(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    let mut v = 0u64;
    for shift in (0..64).step_by(7) {
        let b = *bytes
            .get(*pos)
            .ok_or_else(|| Error::Transcript("truncated classical message".into()))?;
        *pos += 1;
        v |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            return Ok(v);
        }
    }
    Err(Error::Transcript("varint too long".into()))
}

/// A message in flight. Quantum payloads travel as block handles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Wire {
    Quantum(Vec<usize>),
    Classical(Vec<u8>),
}

/// In-process synchronous channel that records every message in the transcript.
#[derive(Debug, Default)]
pub struct Channel {
    queue: VecDeque<(Direction, Wire)>,
    transcript: Transcript,
    round: usize,
}

impl Channel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_round(&mut self, round: usize) {
        self.round = round;
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    pub fn send_blocks(&mut self, direction: Direction, blocks: Vec<usize>) -> Result<()> {
        self.transcript.push(self.round, direction, Payload::Quantum { blocks: blocks.clone() })?;
        self.queue.push_back((direction, Wire::Quantum(blocks)));
        Ok(())
    }

    pub fn send_digits(&mut self, direction: Direction, digits: &[u32]) -> Result<()> {
        self.transcript.push(self.round, direction, Payload::Classical { digits: digits.to_vec() })?;
        self.queue.push_back((direction, Wire::Classical(encode_digits(digits))));
        Ok(())
    }

    pub fn finish(&mut self, verdict: ProtocolVerdict) -> Result<()> {
        self.transcript
            .push(self.round, Direction::VerifierToProver, Payload::Verdict { verdict })
    }

    /// Next message addressed in `direction`.
    pub fn recv(&mut self, direction: Direction) -> Result<Wire> {
        match self.queue.pop_front() {
            Some((d, w)) if d == direction => Ok(w),
            Some(_) => Err(Error::Transcript("message delivered to the wrong party".into())),
            None => Err(Error::Transcript("no message pending".into())),
        }
    }

    pub fn recv_digits(&mut self, direction: Direction) -> Result<Vec<u32>> {
        match self.recv(direction)? {
            Wire::Classical(bytes) => decode_digits(&bytes),
            Wire::Quantum(_) => Err(Error::Transcript("expected a classical message".into())),
        }
    }

    pub fn recv_blocks(&mut self, direction: Direction) -> Result<Vec<usize>> {
        match self.recv(direction)? {
            Wire::Quantum(b) => Ok(b),
            Wire::Classical(_) => Err(Error::Transcript("expected quantum blocks".into())),
        }
    }
}
