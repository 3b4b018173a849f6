//! Parser for operation scripts: one operation per line, run by the `run`
//! subcommand.
//!
//! ```text
//! learn 0 0,1,8,9 @0
//! rcue 0
//! rcont 4,5 @50
//! ```
//!
//! `learn` takes a cue and a comma-separated content pattern, `rcue` a
//! cue, `rcont` a content fragment. A trailing `@<step>` pins the
//! operation's start; without it the operation starts as early as the
//! timing contract allows. `#` starts a comment.

use ca3_cam::{ContentSet, MemoryPattern, OpRequest, Operation};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("line {0}: expected `learn <cue> <bits>`, `rcue <cue>` or `rcont <bits>`")]
    UnknownDirective(usize),
    #[error("line {0}: wrong number of arguments")]
    WrongArity(usize),
    #[error("line {0}: `{1}` is not a number")]
    BadNumber(usize, String),
    #[error("line {0}: `{1}` is not a comma-separated bit list")]
    BadBitList(usize, String),
}

/// Parsed requests plus the source line of each, so contract violations
/// found at compile time can point back at the script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub requests: Vec<OpRequest>,
    pub lines: Vec<usize>,
}

fn parse_num(lineno: usize, word: &str) -> Result<usize, ScriptError> {
    word.parse()
        .map_err(|_| ScriptError::BadNumber(lineno, word.to_string()))
}

fn parse_bits(lineno: usize, word: &str) -> Result<ContentSet, ScriptError> {
    word.split(',')
        .map(|piece| {
            piece
                .parse()
                .map_err(|_| ScriptError::BadBitList(lineno, word.to_string()))
        })
        .collect()
}

pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut script = Script {
        requests: Vec::new(),
        lines: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words: Vec<&str> = line.split_whitespace().collect();
        let start = match words.last() {
            Some(word) if word.starts_with('@') => {
                let word = words.pop().expect("checked nonempty");
                Some(parse_num(lineno, &word[1..])?)
            }
            _ => None,
        };
        let op = match words.as_slice() {
            ["learn", cue, bits] => Operation::Learn(MemoryPattern {
                cue: parse_num(lineno, cue)?,
                content: parse_bits(lineno, bits)?,
            }),
            ["rcue", cue] => Operation::RecallByCue(parse_num(lineno, cue)?),
            ["rcont", bits] => Operation::RecallByContent(parse_bits(lineno, bits)?),
            ["learn", ..] | ["rcue", ..] | ["rcont", ..] => {
                return Err(ScriptError::WrongArity(lineno))
            }
            _ => return Err(ScriptError::UnknownDirective(lineno)),
        };
        script.requests.push(match start {
            Some(step) => OpRequest::at(op, step),
            None => OpRequest::auto(op),
        });
        script.lines.push(lineno);
    }
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operations_and_starts_parse() {
        let script = parse_script("learn 0 0,1,8,9 @0\nrcue 0\nrcont 4,5 @50\n").unwrap();
        assert_eq!(script.lines, vec![1, 2, 3]);
        assert_eq!(script.requests[0].start, Some(0));
        assert_eq!(script.requests[1].start, None);
        assert_eq!(script.requests[2].start, Some(50));
        assert!(matches!(
            &script.requests[0].op,
            Operation::Learn(p) if p.cue == 0 && p.content.len() == 4
        ));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let script = parse_script("# intro\n\nrcue 2 # inline\n").unwrap();
        assert_eq!(script.lines, vec![3]);
    }

    #[test]
    fn errors_name_the_offending_line() {
        assert_eq!(
            parse_script("rcue 0\nstore 1 2\n"),
            Err(ScriptError::UnknownDirective(2))
        );
        assert_eq!(
            parse_script("learn 0\n"),
            Err(ScriptError::WrongArity(1))
        );
        assert_eq!(
            parse_script("rcue x\n"),
            Err(ScriptError::BadNumber(1, "x".to_string()))
        );
        assert_eq!(
            parse_script("rcont 1,,2\n"),
            Err(ScriptError::BadBitList(1, "1,,2".to_string()))
        );
        assert_eq!(
            parse_script("rcue 0 @soon\n"),
            Err(ScriptError::BadNumber(1, "soon".to_string()))
        );
    }
}
