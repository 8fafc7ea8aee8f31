//! Concrete-syntax printing. The output re-parses to the same term.

use std::fmt::{self, Display, Formatter, Write};

use super::{Atom, Generator, Object, Term, TupleSpec};
use crate::ratio;

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Bool => f.write_str("B"),
            Atom::Star(inner) => {
                if inner.len() == 1 {
                    write!(f, "{inner}^*")
                } else {
                    write!(f, "({inner})^*")
                }
            }
        }
    }
}

impl Display for Object {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let word = self.atoms();
        if word.is_empty() {
            return f.write_str("I");
        }
        let mut i = 0;
        let mut first = true;
        while i < word.len() {
            let mut j = i + 1;
            while j < word.len() && word[j] == word[i] {
                j += 1;
            }
            if !first {
                f.write_str(" x ")?;
            }
            first = false;
            if j - i > 1 {
                write!(f, "{}^{}", word[i], j - i)?;
            } else {
                write!(f, "{}", word[i])?;
            }
            i = j;
        }
        Ok(())
    }
}

fn write_list(out: &mut String, objs: &[Object]) {
    out.push('(');
    for (i, o) in objs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{o}");
    }
    out.push(')');
}

impl Display for TupleSpec {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let _ = write!(s, "{}; ", self.state);
        write_list(&mut s, &self.inputs);
        s.push_str("; ");
        write_list(&mut s, &self.outputs);
        f.write_str(&s)
    }
}

fn write_term(out: &mut String, t: &Term, level: u8) {
    match t {
        Term::Seq(a, b) => {
            if level > 0 {
                out.push('(');
            }
            write_term(out, a, 0);
            out.push_str(" ; ");
            write_term(out, b, 1);
            if level > 0 {
                out.push(')');
            }
        }
        Term::Par(a, b) => {
            if level > 1 {
                out.push('(');
            }
            write_term(out, a, 1);
            out.push_str(" x ");
            write_term(out, b, 2);
            if level > 1 {
                out.push(')');
            }
        }
        Term::Id(o) => {
            let _ = write!(out, "id<{o}>");
        }
        Term::Swap(a, b) => {
            let _ = write!(out, "swap<{a}, {b}>");
        }
        Term::Gen(g) => {
            let _ = match g {
                Generator::Copy(o) => write!(out, "copy<{o}>"),
                Generator::Discard(o) => write!(out, "del<{o}>"),
                Generator::Coin(p) => write!(out, "coin({})", ratio::fmt_short(p)),
                Generator::Phi(o) => write!(out, "if<{o}>"),
            };
        }
        Term::TauStar { spec, body } => {
            let _ = write!(out, "iter[{spec}](");
            write_term(out, body, 0);
            out.push(')');
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, 0);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::ratio;

    #[test]
    fn objects_compress_runs() {
        let b = Object::bool();
        assert_eq!(Object::unit().to_string(), "I");
        assert_eq!(Object::bools(3).to_string(), "B^3");
        assert_eq!(b.star().tensor(&b).to_string(), "B^* x B");
        assert_eq!(Object::bools(2).star().to_string(), "(B^2)^*");
        assert_eq!(b.star().pow(2).to_string(), "B^*^2");
    }

    #[test]
    fn seq_nesting_is_preserved() {
        let b = Object::bool();
        let t = Term::id(b.clone()).seq(Term::id(b.clone()).seq(Term::id(b.clone())));
        assert_eq!(t.to_string(), "id<B> ; (id<B> ; id<B>)");
        let u = Term::coin(ratio(1, 2)).par(Term::bit(true)).seq(Term::phi(Object::unit()));
        assert_eq!(u.to_string(), "coin(1/2) x coin(1) ; if<I>");
    }
}
