use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v, _) => Some(v),
            Sexp::Atom(..) => None,
        }
    }

    /// The leading symbol of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|v| v.first()).and_then(Sexp::atom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

/// Reads every top-level form. `;` starts a comment that runs to the end
/// of the line.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = vec![(Vec::new(), Pos { line: 1, col: 1 })];
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        let step = |line: &mut usize, col: &mut usize, c: char| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        step(&mut line, &mut col, c);
        match c {
            '(' => stack.push((Vec::new(), here)),
            ')' => {
                if stack.len() == 1 {
                    return Err(SyntaxError {
                        pos: here,
                        message: "unexpected `)`".into(),
                    });
                }
                let (items, start) = stack.pop().expect("open list");
                stack
                    .last_mut()
                    .expect("outer list")
                    .0
                    .push(Sexp::List(items, start));
            }
            ';' => {
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                    step(&mut line, &mut col, n);
                }
            }
            c if c.is_whitespace() => {}
            c => {
                let mut tok = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    tok.push(n);
                    chars.next();
                    step(&mut line, &mut col, n);
                }
                stack
                    .last_mut()
                    .expect("open list")
                    .0
                    .push(Sexp::Atom(tok, here));
            }
        }
    }
    if stack.len() > 1 {
        let (_, start) = stack.pop().expect("open list");
        return Err(SyntaxError {
            pos: start,
            message: "unclosed `(`".into(),
        });
    }
    Ok(stack.pop().expect("top level").0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let forms = read_all("; header\n(a (b c'))\n  d").unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0].pos(), Pos { line: 2, col: 1 });
        assert_eq!(
            forms[0].list().unwrap()[1].list().unwrap()[1].atom(),
            Some("c'")
        );
        assert_eq!(forms[1].pos(), Pos { line: 3, col: 3 });
    }

    #[test]
    fn unbalanced_parentheses() {
        assert_eq!(
            read_all("(a\n (b)").unwrap_err().pos,
            Pos { line: 1, col: 1 }
        );
        assert_eq!(read_all("a)").unwrap_err().pos, Pos { line: 1, col: 2 });
    }
}
