//! Line-oriented readers for the two accepted input formats.
//!
//! N-Triples subset: `<s> <p> <o> .` where the object may instead be a
//! literal `"..."` with an optional `^^<datatype>` or `@lang` suffix. Blank
//! nodes (`_:x`) are accepted anywhere an IRI is and kept verbatim.
//!
//! TSV: `subject TAB relation TAB object`; an object starting with `"` is a
//! literal in N-Triples literal syntax.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::store::{Literal, RawTriple, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    NTriples,
    Tsv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ntriples" | "nt" => Ok(Format::NTriples),
            "tsv" => Ok(Format::Tsv),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Count and skip malformed lines instead of failing on the first one.
    pub skip_malformed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub triples: usize,
    pub skipped: usize,
    /// Line number of the first skipped line, if any.
    pub first_skipped_line: Option<usize>,
}

pub fn parse_ntriples<R: BufRead>(
    reader: R,
    opts: LoadOptions,
) -> Result<(Vec<RawTriple>, LoadReport)> {
    parse_lines(reader, opts, parse_ntriples_line)
}

pub fn parse_tsv<R: BufRead>(reader: R, opts: LoadOptions) -> Result<(Vec<RawTriple>, LoadReport)> {
    parse_lines(reader, opts, parse_tsv_line)
}

pub fn parse(
    reader: impl BufRead,
    format: Format,
    opts: LoadOptions,
) -> Result<(Vec<RawTriple>, LoadReport)> {
    match format {
        Format::NTriples => parse_ntriples(reader, opts),
        Format::Tsv => parse_tsv(reader, opts),
    }
}

pub fn parse_str(input: &str, format: Format) -> Result<Vec<RawTriple>> {
    parse(input.as_bytes(), format, LoadOptions::default()).map(|(t, _)| t)
}

/// Opens a file, transparently decompressing gzip input (detected by magic bytes).
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = BufReader::new(File::open(path)?);
    let is_gzip = file.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    if is_gzip {
        #[cfg(feature = "gzip")]
        {
            let decoder = flate2::bufread::MultiGzDecoder::new(file);
            return Ok(Box::new(BufReader::new(decoder)));
        }
        #[cfg(not(feature = "gzip"))]
        return Err(Error::Config(
            "gzip input requires the `gzip` feature".into(),
        ));
    }
    Ok(Box::new(file))
}

pub fn load_path(
    path: &Path,
    format: Format,
    opts: LoadOptions,
) -> Result<(Vec<RawTriple>, LoadReport)> {
    parse(open_input(path)?, format, opts)
}

fn parse_lines<R, F>(
    reader: R,
    opts: LoadOptions,
    parse_line: F,
) -> Result<(Vec<RawTriple>, LoadReport)>
where
    R: BufRead,
    F: Fn(&str) -> std::result::Result<RawTriple, String>,
{
    let mut triples = Vec::new();
    let mut report = LoadReport::default();
    let mut buf = Vec::new();
    let mut reader = reader;
    let mut lineno = 0;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        lineno += 1;
        let text = match std::str::from_utf8(&buf) {
            Ok(t) => t,
            Err(_) => {
                skip_or_fail(&mut report, opts, lineno, "invalid UTF-8".into())?;
                continue;
            }
        };
        let line = text.trim_end_matches(['\n', '\r']);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_line(line) {
            Ok(t) => triples.push(t),
            Err(msg) => skip_or_fail(&mut report, opts, lineno, msg)?,
        }
    }
    report.triples = triples.len();
    Ok((triples, report))
}

fn skip_or_fail(
    report: &mut LoadReport,
    opts: LoadOptions,
    line: usize,
    msg: String,
) -> Result<()> {
    if !opts.skip_malformed {
        return Err(Error::parse(line, msg));
    }
    report.skipped += 1;
    report.first_skipped_line.get_or_insert(line);
    Ok(())
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor { s, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start_matches([' ', '\t']).len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn resource(&mut self) -> std::result::Result<String, String> {
        self.skip_ws();
        match self.peek() {
            Some('<') => {
                let rest = &self.rest()[1..];
                let end = rest.find('>').ok_or("unterminated IRI")?;
                let iri = &rest[..end];
                if iri.contains(char::is_whitespace) {
                    return Err("whitespace inside IRI".into());
                }
                self.pos += end + 2;
                Ok(iri.to_string())
            }
            Some('_') if self.rest().starts_with("_:") => {
                let rest = self.rest();
                let end = rest.find([' ', '\t']).unwrap_or(rest.len());
                let label = &rest[..end];
                if label.len() <= 2 {
                    return Err("empty blank node label".into());
                }
                self.pos += end;
                Ok(label.to_string())
            }
            Some(c) => Err(format!("expected IRI or blank node, found `{c}`")),
            None => Err("unexpected end of line".into()),
        }
    }

    fn object(&mut self) -> std::result::Result<Term, String> {
        self.skip_ws();
        if self.peek() == Some('"') {
            self.literal().map(Term::Literal)
        } else {
            self.resource().map(Term::Iri)
        }
    }

    fn literal(&mut self) -> std::result::Result<Literal, String> {
        if !self.eat('"') {
            return Err("expected literal".into());
        }
        let mut lexical = String::new();
        let mut chars = self.rest().char_indices();
        let consumed = loop {
            let (i, c) = chars.next().ok_or("unterminated literal")?;
            match c {
                '"' => break i + 1,
                '\\' => {
                    let (_, esc) = chars.next().ok_or("dangling escape")?;
                    match esc {
                        't' => lexical.push('\t'),
                        'n' => lexical.push('\n'),
                        'r' => lexical.push('\r'),
                        'b' => lexical.push('\u{8}'),
                        'f' => lexical.push('\u{c}'),
                        '"' => lexical.push('"'),
                        '\'' => lexical.push('\''),
                        '\\' => lexical.push('\\'),
                        'u' | 'U' => {
                            let width = if esc == 'u' { 4 } else { 8 };
                            let mut hex = String::with_capacity(width);
                            for _ in 0..width {
                                hex.push(chars.next().ok_or("short unicode escape")?.1);
                            }
                            let code =
                                u32::from_str_radix(&hex, 16).map_err(|_| "bad unicode escape")?;
                            lexical.push(char::from_u32(code).ok_or("bad unicode scalar")?);
                        }
                        other => return Err(format!("unknown escape `\\{other}`")),
                    }
                }
                c => lexical.push(c),
            }
        };
        self.pos += consumed;
        let tag = if self.rest().starts_with("^^") {
            self.pos += 2;
            Some(self.resource()?)
        } else if self.eat('@') {
            let rest = self.rest();
            let end = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(rest.len());
            if end == 0 {
                return Err("empty language tag".into());
            }
            self.pos += end;
            Some(format!("@{}", &rest[..end]))
        } else {
            None
        };
        Ok(Literal { lexical, tag })
    }
}

fn parse_ntriples_line(line: &str) -> std::result::Result<RawTriple, String> {
    let mut cur = Cursor::new(line);
    let subject = cur.resource()?;
    let predicate = cur.resource()?;
    let object = cur.object()?;
    cur.skip_ws();
    if !cur.eat('.') {
        return Err("missing terminating `.`".into());
    }
    let tail = cur.rest().trim();
    if !(tail.is_empty() || tail.starts_with('#')) {
        return Err(format!("trailing content `{tail}`"));
    }
    Ok(RawTriple {
        subject,
        predicate,
        object,
    })
}

fn parse_tsv_line(line: &str) -> std::result::Result<RawTriple, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 3 {
        return Err(format!(
            "expected 3 tab-separated columns, found {}",
            cols.len()
        ));
    }
    let (subject, predicate, object) = (cols[0].trim(), cols[1].trim(), cols[2].trim());
    if subject.is_empty() || predicate.is_empty() || object.is_empty() {
        return Err("empty column".into());
    }
    let object = if object.starts_with('"') {
        let mut cur = Cursor::new(object);
        let lit = cur.literal()?;
        if !cur.rest().trim().is_empty() {
            return Err(format!("trailing content after literal `{}`", cur.rest()));
        }
        Term::Literal(lit)
    } else {
        Term::Iri(object.to_string())
    };
    Ok(RawTriple::new(subject, predicate, object))
}
