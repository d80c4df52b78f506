use super::{BinaryOp, UnaryOp};

/// Runtime error with defined semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trap {
    DivisionByZero,
}

impl std::fmt::Display for Trap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Trap::DivisionByZero => f.write_str("division by zero"),
        }
    }
}

#[inline]
pub fn truthy(v: i32) -> bool {
    v != 0
}

#[inline]
pub fn apply_unary(op: UnaryOp, v: i32) -> i32 {
    match op {
        UnaryOp::Neg => v.wrapping_neg(),
        UnaryOp::Not => (v == 0) as i32,
    }
}

/// Strict binary operators. `&&` and `||` short-circuit in the evaluators; here they
/// only normalise both already-evaluated operands.
#[inline]
pub fn apply_binary(op: BinaryOp, a: i32, b: i32) -> Result<i32, Trap> {
    Ok(match op {
        BinaryOp::Add => a.wrapping_add(b),
        BinaryOp::Sub => a.wrapping_sub(b),
        BinaryOp::Mul => a.wrapping_mul(b),
        BinaryOp::Div => {
            if b == 0 {
                return Err(Trap::DivisionByZero);
            }
            a.wrapping_div(b)
        }
        BinaryOp::Rem => {
            if b == 0 {
                return Err(Trap::DivisionByZero);
            }
            a.wrapping_rem(b)
        }
        BinaryOp::Lt => (a < b) as i32,
        BinaryOp::Le => (a <= b) as i32,
        BinaryOp::Gt => (a > b) as i32,
        BinaryOp::Ge => (a >= b) as i32,
        BinaryOp::Eq => (a == b) as i32,
        BinaryOp::Ne => (a != b) as i32,
        BinaryOp::And => (truthy(a) && truthy(b)) as i32,
        BinaryOp::Or => (truthy(a) || truthy(b)) as i32,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_wraps() {
        assert_eq!(apply_binary(BinaryOp::Add, i32::MAX, 1), Ok(i32::MIN));
        assert_eq!(apply_binary(BinaryOp::Div, i32::MIN, -1), Ok(i32::MIN));
        assert_eq!(apply_binary(BinaryOp::Rem, i32::MIN, -1), Ok(0));
        assert_eq!(apply_unary(UnaryOp::Neg, i32::MIN), i32::MIN);
    }

    #[test]
    fn division_by_zero_traps() {
        assert_eq!(apply_binary(BinaryOp::Div, 3, 0), Err(Trap::DivisionByZero));
        assert_eq!(apply_binary(BinaryOp::Rem, 3, 0), Err(Trap::DivisionByZero));
    }

    #[test]
    fn flipped_bools_are_truthy() {
        assert_eq!(apply_unary(UnaryOp::Not, 8), 0);
        assert_eq!(apply_binary(BinaryOp::And, 8, 1), Ok(1));
        // raw payload comparison, as C compares the stored word
        assert_eq!(apply_binary(BinaryOp::Eq, 8, 1), Ok(0));
    }
}
