use std::collections::btree_map::Entry;

use super::{Entity, ExchangeStructure, Header, Parameter, Record, Section, StepError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Keyword(String),
    Instance(u64),
    Integer(i64),
    Real(f64),
    Str(String),
    Binary(String),
    Enum(String),
    Dollar,
    Star,
    LParen,
    RParen,
    Comma,
    Semi,
    Equals,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Keyword(k) => format!("keyword {k}"),
            Tok::Instance(n) => format!("#{n}"),
            Tok::Integer(_) | Tok::Real(_) => "number".into(),
            Tok::Str(_) => "string".into(),
            Tok::Binary(_) => "binary".into(),
            Tok::Enum(e) => format!(".{e}."),
            Tok::Dollar => "'$'".into(),
            Tok::Star => "'*'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Equals => "'='".into(),
            Tok::Eof => "end of file".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { src: text.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn peek_byte(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn error(&self, line: usize, col: usize, expected: impl Into<String>) -> StepError {
        StepError::SyntaxError { line, column: col, expected: expected.into() }
    }

    fn skip_trivia(&mut self) -> Result<(), StepError> {
        loop {
            match self.peek_byte() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some(b'*') if self.peek_byte() == Some(b'/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(self.error(line, col, "end of comment '*/'")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next(&mut self) -> Result<Spanned, StepError> {
        self.skip_trivia()?;
        let (line, col) = (self.line, self.col);
        let Some(b) = self.peek_byte() else {
            return Ok(Spanned { tok: Tok::Eof, line, col });
        };
        let tok = match b {
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b';' => {
                self.bump();
                Tok::Semi
            }
            b'=' => {
                self.bump();
                Tok::Equals
            }
            b'$' => {
                self.bump();
                Tok::Dollar
            }
            b'*' => {
                self.bump();
                Tok::Star
            }
            b'#' => {
                self.bump();
                let digits = self.take_while(|c| c.is_ascii_digit());
                match digits.parse::<u64>() {
                    Ok(n) if n > 0 => Tok::Instance(n),
                    _ => return Err(self.error(line, col, "positive instance number after '#'")),
                }
            }
            b'\'' => {
                self.bump();
                let start = self.pos;
                loop {
                    match self.bump() {
                        Some(b'\'') if self.peek_byte() == Some(b'\'') => {
                            self.bump();
                        }
                        Some(b'\'') => break,
                        Some(_) => {}
                        None => return Err(self.error(line, col, "closing quote of string")),
                    }
                }
                Tok::Str(String::from_utf8_lossy(&self.src[start..self.pos - 1]).into_owned())
            }
            b'"' => {
                self.bump();
                let hex = self.take_while(|c| c.is_ascii_hexdigit());
                if self.bump() != Some(b'"') {
                    return Err(self.error(self.line, self.col, "closing '\"' of binary"));
                }
                Tok::Binary(hex)
            }
            b'.' => {
                self.bump();
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_');
                if name.is_empty() || self.bump() != Some(b'.') {
                    return Err(self.error(line, col, "enumeration of the form .NAME."));
                }
                Tok::Enum(name.to_ascii_uppercase())
            }
            b'+' | b'-' | b'0'..=b'9' => self.number(line, col)?,
            b'!' | b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                for special in ["END-ISO-10303-21", "ISO-10303-21"] {
                    if self.src[self.pos..].starts_with(special.as_bytes()) {
                        for _ in 0..special.len() {
                            self.bump();
                        }
                        return Ok(Spanned { tok: Tok::Keyword(special.to_string()), line, col });
                    }
                }
                let mut kw = String::new();
                if b == b'!' {
                    self.bump();
                    kw.push('!');
                }
                kw.push_str(&self.take_while(|c| c.is_ascii_alphanumeric() || c == b'_'));
                if kw == "!" {
                    return Err(self.error(line, col, "user-defined keyword after '!'"));
                }
                Tok::Keyword(kw.to_ascii_uppercase())
            }
            other => {
                return Err(self.error(line, col, format!("a token (found {:?})", other as char)));
            }
        };
        Ok(Spanned { tok, line, col })
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> String {
        let start = self.pos;
        while let Some(b) = self.peek_byte() {
            if !f(b) {
                break;
            }
            self.bump();
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn number(&mut self, line: usize, col: usize) -> Result<Tok, StepError> {
        let mut text = String::new();
        if let Some(sign @ (b'+' | b'-')) = self.peek_byte() {
            self.bump();
            text.push(sign as char);
        }
        let int_part = self.take_while(|c| c.is_ascii_digit());
        if int_part.is_empty() {
            return Err(self.error(line, col, "digits"));
        }
        text.push_str(&int_part);
        let mut real = false;
        if self.peek_byte() == Some(b'.') {
            self.bump();
            real = true;
            let frac = self.take_while(|c| c.is_ascii_digit());
            text.push('.');
            text.push_str(if frac.is_empty() { "0" } else { &frac });
        }
        if matches!(self.peek_byte(), Some(b'E' | b'e')) {
            self.bump();
            real = true;
            text.push('E');
            if let Some(sign @ (b'+' | b'-')) = self.peek_byte() {
                self.bump();
                text.push(sign as char);
            }
            let exp = self.take_while(|c| c.is_ascii_digit());
            if exp.is_empty() {
                return Err(self.error(self.line, self.col, "exponent digits"));
            }
            text.push_str(&exp);
        }
        if real {
            text.parse::<f64>().map(Tok::Real).map_err(|_| self.error(line, col, "a real number"))
        } else {
            text.parse::<i64>().map(Tok::Integer).map_err(|_| self.error(line, col, "an integer in range"))
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: Spanned,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, StepError> {
        let mut lexer = Lexer::new(text);
        let current = lexer.next()?;
        Ok(Parser { lexer, current })
    }

    fn advance(&mut self) -> Result<Spanned, StepError> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.current, next))
    }

    fn fail<T>(&self, expected: impl Into<String>) -> Result<T, StepError> {
        Err(StepError::SyntaxError {
            line: self.current.line,
            column: self.current.col,
            expected: format!("{} (found {})", expected.into(), self.current.tok.describe()),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), StepError> {
        if self.current.tok == tok {
            self.advance()?;
            Ok(())
        } else {
            self.fail(tok.describe())
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.current.tok, Tok::Keyword(k) if k == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), StepError> {
        if self.at_keyword(kw) {
            self.advance()?;
            Ok(())
        } else {
            self.fail(format!("keyword {kw}"))
        }
    }

    fn keyword(&mut self) -> Result<String, StepError> {
        match &self.current.tok {
            Tok::Keyword(k) => {
                let k = k.clone();
                self.advance()?;
                Ok(k)
            }
            _ => self.fail("an entity keyword"),
        }
    }

    // '(' [param {',' param}] ')'
    fn param_list(&mut self) -> Result<Vec<Parameter>, StepError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.current.tok == Tok::RParen {
            self.advance()?;
            return Ok(out);
        }
        loop {
            out.push(self.parameter()?);
            match self.current.tok {
                Tok::Comma => {
                    self.advance()?;
                }
                Tok::RParen => {
                    self.advance()?;
                    return Ok(out);
                }
                _ => return self.fail("',' or ')'"),
            }
        }
    }

    fn parameter(&mut self) -> Result<Parameter, StepError> {
        let p = match self.current.tok.clone() {
            Tok::Integer(v) => Parameter::Integer(v),
            Tok::Real(v) => Parameter::Real(v),
            Tok::Str(s) => Parameter::String(s),
            Tok::Binary(s) => Parameter::Binary(s),
            Tok::Enum(e) => Parameter::Enumeration(e),
            Tok::Instance(n) => Parameter::Reference(n),
            Tok::Dollar => Parameter::Unset,
            Tok::Star => Parameter::Derived,
            Tok::LParen => return Ok(Parameter::List(self.param_list()?)),
            Tok::Keyword(k) => {
                self.advance()?;
                self.expect(Tok::LParen)?;
                let value = self.parameter()?;
                self.expect(Tok::RParen)?;
                return Ok(Parameter::Typed { keyword: k, value: Box::new(value) });
            }
            _ => return self.fail("a parameter"),
        };
        self.advance()?;
        Ok(p)
    }

    fn record(&mut self) -> Result<Record, StepError> {
        let keyword = self.keyword()?;
        let params = self.param_list()?;
        Ok(Record { keyword, params })
    }

    fn header(&mut self) -> Result<Header, StepError> {
        if self.at_keyword("DATA") || self.at_keyword("END-ISO-10303-21") || self.current.tok == Tok::Eof {
            return Err(StepError::MissingSection(Section::Header));
        }
        self.expect_keyword("HEADER")?;
        self.expect(Tok::Semi)?;
        let mut header = Header::default();
        while !self.at_keyword("ENDSEC") {
            if self.current.tok == Tok::Eof {
                return self.fail("ENDSEC");
            }
            let r = self.record()?;
            self.expect(Tok::Semi)?;
            let strings = |p: Option<&Parameter>| -> Vec<String> {
                match p {
                    Some(Parameter::List(items)) => items.iter().filter_map(|i| i.as_str().map(str::to_string)).collect(),
                    Some(Parameter::String(s)) => vec![s.clone()],
                    _ => Vec::new(),
                }
            };
            match r.keyword.as_str() {
                "FILE_DESCRIPTION" => header.description = strings(r.params.first()),
                "FILE_NAME" => header.file_name = r.params.first().and_then(Parameter::as_str).unwrap_or_default().to_string(),
                "FILE_SCHEMA" => header.schema = strings(r.params.first()),
                _ => {}
            }
            header.records.push(r);
        }
        self.advance()?;
        self.expect(Tok::Semi)?;
        Ok(header)
    }

    fn data(&mut self, xs: &mut ExchangeStructure) -> Result<(), StepError> {
        self.expect_keyword("DATA")?;
        if self.current.tok == Tok::LParen {
            self.param_list()?;
        }
        self.expect(Tok::Semi)?;
        loop {
            let line = self.current.line;
            let id = match self.current.tok {
                Tok::Instance(id) => id,
                Tok::Keyword(ref k) if k == "ENDSEC" => break,
                _ => return self.fail("an instance '#n=' or ENDSEC"),
            };
            self.advance()?;
            self.expect(Tok::Equals)?;
            let entity = if self.current.tok == Tok::LParen {
                self.advance()?;
                let mut parts = Vec::new();
                while self.current.tok != Tok::RParen {
                    parts.push(self.record()?);
                }
                if parts.is_empty() {
                    return self.fail("at least one record in a complex instance");
                }
                self.advance()?;
                Entity::Complex(parts)
            } else {
                Entity::Simple(self.record()?)
            };
            self.expect(Tok::Semi)?;
            match xs.entities.entry(id) {
                Entry::Vacant(v) => {
                    v.insert(entity);
                }
                Entry::Occupied(_) => return Err(StepError::DuplicateInstance { id, line }),
            }
        }
        self.advance()?;
        self.expect(Tok::Semi)?;
        Ok(())
    }
}

/// Parses a Part-21 file into its header and entity map.
pub fn parse_exchange(text: &str) -> Result<ExchangeStructure, StepError> {
    let mut p = Parser::new(text)?;
    p.expect_keyword("ISO-10303-21")?;
    p.expect(Tok::Semi)?;
    let header = p.header()?;
    let mut xs = ExchangeStructure { header, entities: Default::default() };
    if !p.at_keyword("DATA") {
        if p.at_keyword("END-ISO-10303-21") || p.current.tok == Tok::Eof {
            return Err(StepError::MissingSection(Section::Data));
        }
        return p.fail("DATA");
    }
    while p.at_keyword("DATA") {
        p.data(&mut xs)?;
    }
    p.expect_keyword("END-ISO-10303-21")?;
    p.expect(Tok::Semi)?;
    Ok(xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wrap(data: &str) -> String {
        format!(
            "ISO-10303-21;\nHEADER;\nFILE_DESCRIPTION(('test'),'2;1');\nFILE_NAME('t.stp','2024-01-01',(''),(''),'','','');\nFILE_SCHEMA(('CONFIG_CONTROL_DESIGN'));\nENDSEC;\nDATA;\n{data}\nENDSEC;\nEND-ISO-10303-21;\n"
        )
    }

    #[test]
    fn single_point() {
        let xs = parse_exchange(&wrap("#10=CARTESIAN_POINT('',(0.,0.,0.));")).unwrap();
        assert_eq!(xs.entities.len(), 1);
        let Entity::Simple(r) = &xs.entities[&10] else { panic!() };
        assert_eq!(r.keyword, "CARTESIAN_POINT");
        assert_eq!(
            r.params,
            vec![
                Parameter::String(String::new()),
                Parameter::List(vec![Parameter::Real(0.0), Parameter::Real(0.0), Parameter::Real(0.0)])
            ]
        );
        assert_eq!(xs.header.schema, vec!["CONFIG_CONTROL_DESIGN".to_string()]);
        assert_eq!(xs.header.file_name, "t.stp");
        assert_eq!(xs.header.description, vec!["test".to_string()]);
    }

    #[test]
    fn edge_curve_references_and_enum() {
        let xs = parse_exchange(&wrap("#5=EDGE_CURVE('',#1,#2,#3,.T.);")).unwrap();
        let Entity::Simple(r) = &xs.entities[&5] else { panic!() };
        assert_eq!(r.params[1..4].iter().filter_map(Parameter::as_reference).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(r.params[4].as_bool(), Some(true));
    }

    #[test]
    fn missing_data_section() {
        let text = "ISO-10303-21;\nHEADER;\nFILE_SCHEMA(('X'));\nENDSEC;\nEND-ISO-10303-21;\n";
        assert_eq!(parse_exchange(text), Err(StepError::MissingSection(Section::Data)));
    }

    #[test]
    fn missing_header_section() {
        let text = "ISO-10303-21;\nDATA;\n#1=A();\nENDSEC;\nEND-ISO-10303-21;\n";
        assert_eq!(parse_exchange(text), Err(StepError::MissingSection(Section::Header)));
    }

    #[test]
    fn comments_and_escapes() {
        let xs = parse_exchange(&wrap("/* a comment\n spanning lines */ #1=PRODUCT('it''s',$,*,(#2),1.5E-3,-7,\"0FF\");\n#2=X();")).unwrap();
        let Entity::Simple(r) = &xs.entities[&1] else { panic!() };
        assert_eq!(r.params[0], Parameter::String("it''s".into()));
        assert_eq!(r.params[1], Parameter::Unset);
        assert_eq!(r.params[2], Parameter::Derived);
        assert_eq!(r.params[4], Parameter::Real(1.5e-3));
        assert_eq!(r.params[5], Parameter::Integer(-7));
        assert_eq!(r.params[6], Parameter::Binary("0FF".into()));
    }

    #[test]
    fn typed_and_complex() {
        let xs = parse_exchange(&wrap(
            "#1=MEASURE_WITH_UNIT(LENGTH_MEASURE(25.4),#2);\n#2=(LENGTH_UNIT()NAMED_UNIT(*)SI_UNIT(.MILLI.,.METRE.));",
        ))
        .unwrap();
        let Entity::Simple(r) = &xs.entities[&1] else { panic!() };
        assert_eq!(r.params[0].as_f64(), Some(25.4));
        let Entity::Complex(parts) = &xs.entities[&2] else { panic!() };
        assert_eq!(parts.len(), 3);
        assert_eq!(xs.entities[&2].keyword(), "LENGTH_UNIT+NAMED_UNIT+SI_UNIT");
    }

    #[test]
    fn syntax_error_position() {
        let text = wrap("#1=CARTESIAN_POINT('',(0.,0.,0.);");
        match parse_exchange(&text) {
            Err(StepError::SyntaxError { line, column, .. }) => {
                assert_eq!(line, 8);
                assert_eq!(column, 33);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncated_file() {
        let text = wrap("#1=CARTESIAN_POINT('',(0.,0.,0.));");
        let cut = &text[..text.len() / 2];
        assert!(matches!(parse_exchange(cut), Err(StepError::SyntaxError { .. })));
    }

    #[test]
    fn duplicate_instance_is_rejected() {
        let err = parse_exchange(&wrap("#1=A();\n#1=B();")).unwrap_err();
        assert_eq!(err, StepError::DuplicateInstance { id: 1, line: 9 });
    }

    #[test]
    fn not_a_part21_file() {
        assert!(matches!(parse_exchange("solid foo\nendsolid"), Err(StepError::SyntaxError { line: 1, column: 1, .. })));
    }
}
