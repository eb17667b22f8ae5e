// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Minimal 2D WKT reader for POINT, LINESTRING and POLYGON.

use super::{Coordinate, Geometry};
use crate::error::{GlinError, Result};

/// Parses a single 2D WKT geometry. Coordinates are read as `lon lat`.
pub fn parse_wkt(text: &str) -> Result<Geometry> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let geom = p.geometry()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing characters after geometry"));
    }
    Ok(geom)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> GlinError {
        GlinError::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        match self.peek() {
            Some(c) if c == b => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{}`, found `{}`", b as char, c as char))),
            None => Err(self.error(format!("expected `{}`, found end of input", b as char))),
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        // ASCII letters only, always valid UTF-8
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default()
    }

    fn geometry(&mut self) -> Result<Geometry> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let tag = self.word().to_ascii_uppercase();
        if tag.is_empty() {
            return Err(self.error("expected geometry type"));
        }
        let kind = match tag.as_str() {
            "POINT" | "LINESTRING" | "POLYGON" => tag,
            _ => return Err(GlinError::UnsupportedType(tag)),
        };
        let after_tag = self.pos;
        let modifier = self.word().to_ascii_uppercase();
        match modifier.as_str() {
            "" => {}
            "Z" | "M" | "ZM" => {
                self.pos = after_tag;
                self.skip_ws();
                return Err(self.error(format!("{modifier} coordinates are not supported, only 2D geometries")));
            }
            "EMPTY" => {
                self.pos = after_tag;
                self.skip_ws();
                return Err(self.error("empty geometries are not supported"));
            }
            _ => {
                self.pos = after_tag;
                self.skip_ws();
                return Err(self.error(format!("unexpected token `{modifier}`")));
            }
        }
        let wrap = |e: GlinError| match e {
            GlinError::InvalidGeometry(msg) => GlinError::Parse {
                offset: start,
                message: msg,
            },
            other => other,
        };
        match kind.as_str() {
            "POINT" => {
                self.expect(b'(')?;
                let c = self.coordinate()?;
                self.expect(b')')?;
                Geometry::point(c.lon, c.lat).map_err(wrap)
            }
            "LINESTRING" => {
                let cs = self.coord_seq()?;
                Geometry::line_string(cs).map_err(wrap)
            }
            _ => {
                self.expect(b'(')?;
                let mut rings = vec![self.coord_seq()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    rings.push(self.coord_seq()?);
                }
                self.expect(b')')?;
                let exterior = rings.remove(0);
                Geometry::polygon(exterior, rings).map_err(wrap)
            }
        }
    }

    fn coord_seq(&mut self) -> Result<Vec<Coordinate>> {
        self.expect(b'(')?;
        let mut cs = vec![self.coordinate()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            cs.push(self.coordinate()?);
        }
        self.expect(b')')?;
        Ok(cs)
    }

    fn coordinate(&mut self) -> Result<Coordinate> {
        let lon = self.number()?;
        let lat = self.number()?;
        match self.peek() {
            Some(b',') | Some(b')') => Ok(Coordinate::new(lon, lat)),
            Some(c) if c == b'-' || c == b'+' || c == b'.' || c.is_ascii_digit() => {
                Err(self.error("only 2D coordinates are supported"))
            }
            Some(c) => Err(self.error(format!("unexpected `{}` after coordinate", c as char))),
            None => Err(self.error("unexpected end of input after coordinate")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b'0'..=b'9' | b'+' | b'-' | b'.' | b'e' | b'E' => self.pos += 1,
                _ => break,
            }
        }
        if start == self.pos {
            return Err(self.error("expected number"));
        }
        let tok = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        tok.parse::<f64>().map_err(|_| GlinError::Parse {
            offset: start,
            message: format!("invalid number `{tok}`"),
        })
    }
}
