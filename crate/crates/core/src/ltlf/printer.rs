use std::fmt;

use super::Formula;

// Binding strength, loosest first.
const OR: u8 = 1;
const AND: u8 = 2;
const UNTIL: u8 = 3;
const UNARY: u8 = 4;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Until(..) => UNTIL,
        _ => UNARY,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &Formula, min: u8) -> fmt::Result {
    if level(child) < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

fn write_binary(
    f: &mut fmt::Formatter<'_>,
    lhs: &Formula,
    op: &str,
    rhs: &Formula,
    own: u8,
) -> fmt::Result {
    // operators parse left-associatively, so a right operand at the same
    // level needs parentheses to keep its shape
    write_operand(f, lhs, own)?;
    write!(f, " {op} ")?;
    write_operand(f, rhs, own + 1)
}

fn write_temporal(f: &mut fmt::Formatter<'_>, op: &str, child: &Formula) -> fmt::Result {
    write!(f, "{op}({child})")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Not(g) => {
                f.write_str("!")?;
                write_operand(f, g, UNARY)
            }
            Formula::And(a, b) => write_binary(f, a, "&", b, AND),
            Formula::Or(a, b) => write_binary(f, a, "|", b, OR),
            Formula::Until(a, b) => write_binary(f, a, "U", b, UNTIL),
            Formula::Next(g) => write_temporal(f, "X", g),
            Formula::Eventually(g) => write_temporal(f, "F", g),
            Formula::Globally(g) => write_temporal(f, "G", g),
        }
    }
}
