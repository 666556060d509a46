use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{sigmoid_with_slope, FloatBase, Real};

use super::DiffError;

/// Operation recorded for a tape node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Exp,
    Ln,
    Tanh,
    Sigmoid,
    Relu,
    Sin,
    Cos,
    Sqrt,
    Min,
    Max,
    Clamp,
    Dot,
    Sum,
    Softmax,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = format!("{self:?}").to_lowercase();
        f.write_str(&name)
    }
}

struct Nodes<F> {
    values: Vec<F>,
    ops: Vec<OpKind>,
    // offsets[i]..offsets[i + 1] indexes into parents/partials for node i
    offsets: Vec<u32>,
    parents: Vec<u32>,
    partials: Vec<F>,
    first_nonfinite: Option<u32>,
    min_kink_margin: f64,
}

/// Append-only record of a computation, differentiated in reverse.
///
/// Nodes are pushed in evaluation order, so parents always precede
/// children. A tape belongs to one thread; independent rollouts use
/// independent tapes.
pub struct Tape<F> {
    nodes: RefCell<Nodes<F>>,
}

impl<F: FloatBase> Default for Tape<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: FloatBase> Tape<F> {
    pub fn new() -> Self {
        Self::with_capacity(0)
    }

    pub fn with_capacity(nodes: usize) -> Self {
        Self {
            nodes: RefCell::new(Nodes {
                values: Vec::with_capacity(nodes),
                ops: Vec::with_capacity(nodes),
                offsets: {
                    let mut v = Vec::with_capacity(nodes + 1);
                    v.push(0);
                    v
                },
                parents: Vec::with_capacity(nodes * 2),
                partials: Vec::with_capacity(nodes * 2),
                first_nonfinite: None,
                min_kink_margin: f64::INFINITY,
            }),
        }
    }

    /// Independent variable (a leaf that gradients can be taken against).
    pub fn var(&self, value: F) -> Var<'_, F> {
        self.push(OpKind::Var, value, &[])
    }

    pub fn vars(&self, values: &[F]) -> Vec<Var<'_, F>> {
        values.iter().map(|&v| self.var(v)).collect()
    }

    /// Constant that does not occupy a tape node.
    pub fn constant(&self, value: F) -> Var<'_, F> {
        Var::constant(value)
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest distance to a relu/min/max/clamp kink seen so far.
    pub fn min_kink_margin(&self) -> f64 {
        self.nodes.borrow().min_kink_margin
    }

    pub fn op(&self, index: usize) -> OpKind {
        self.nodes.borrow().ops[index]
    }

    fn push(&self, op: OpKind, value: F, parents: &[(u32, F)]) -> Var<'_, F> {
        let mut n = self.nodes.borrow_mut();
        let index = n.values.len() as u32;
        n.values.push(value);
        n.ops.push(op);
        for &(p, w) in parents {
            n.parents.push(p);
            n.partials.push(w);
        }
        let end = n.parents.len() as u32;
        n.offsets.push(end);
        if !value.is_finite() && n.first_nonfinite.is_none() {
            n.first_nonfinite = Some(index);
        }
        Var {
            tape: Some(self),
            index,
            value,
        }
    }

    fn note_kink(&self, margin: F) {
        let m = margin.abs().to_f64().unwrap_or(0.0);
        let mut n = self.nodes.borrow_mut();
        if m < n.min_kink_margin {
            n.min_kink_margin = m;
        }
    }

    /// Full reverse sweep from `y`, returning the adjoint of every node.
    pub fn gradients(&self, y: Var<'_, F>) -> Result<Gradients<F>, DiffError> {
        let n = self.nodes.borrow();
        let mut adjoint = vec![F::zero(); n.values.len()];
        let Some(tape) = y.tape else {
            return Ok(Gradients { adjoint });
        };
        assert!(
            std::ptr::eq(tape, self),
            "output variable belongs to a different tape"
        );
        if let Some(bad) = n.first_nonfinite {
            if bad <= y.index {
                return Err(DiffError::NonFinite {
                    node: bad as usize,
                    op: n.ops[bad as usize].to_string(),
                });
            }
        }
        adjoint[y.index as usize] = F::one();
        for i in (0..=y.index as usize).rev() {
            let a = adjoint[i];
            if a == F::zero() {
                continue;
            }
            if !a.is_finite() {
                return Err(DiffError::NonFinite {
                    node: i,
                    op: n.ops[i].to_string(),
                });
            }
            let (lo, hi) = (n.offsets[i] as usize, n.offsets[i + 1] as usize);
            for k in lo..hi {
                let p = n.parents[k] as usize;
                adjoint[p] = adjoint[p] + a * n.partials[k];
            }
        }
        Ok(Gradients { adjoint })
    }

    /// Gradient of scalar `y` with respect to each entry of `wrt`.
    pub fn backward(&self, y: Var<'_, F>, wrt: &[Var<'_, F>]) -> Result<Vec<F>, DiffError> {
        let g = self.gradients(y)?;
        let out: Vec<F> = wrt.iter().map(|v| g.get(*v)).collect();
        if let Some((i, _)) = out.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            let node = wrt[i].index as usize;
            return Err(DiffError::NonFinite {
                node,
                op: self.op(node).to_string(),
            });
        }
        Ok(out)
    }
}

/// Adjoints produced by a reverse sweep.
pub struct Gradients<F> {
    adjoint: Vec<F>,
}

impl<F: FloatBase> Gradients<F> {
    pub fn get(&self, v: Var<'_, F>) -> F {
        if v.tape.is_none() {
            return F::zero();
        }
        self.adjoint
            .get(v.index as usize)
            .copied()
            .unwrap_or_else(F::zero)
    }
}

/// Scalar handle into a [`Tape`]; constants carry no tape reference.
#[derive(Clone, Copy)]
pub struct Var<'t, F> {
    tape: Option<&'t Tape<F>>,
    index: u32,
    value: F,
}

impl<F: fmt::Debug> fmt::Debug for Var<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tape {
            Some(_) => write!(f, "Var#{}({:?})", self.index, self.value),
            None => write!(f, "Const({:?})", self.value),
        }
    }
}

impl<'t, F: FloatBase> Var<'t, F> {
    pub fn constant(value: F) -> Self {
        Self {
            tape: None,
            index: u32::MAX,
            value,
        }
    }

    pub fn val(self) -> F {
        self.value
    }

    pub fn index(self) -> Option<usize> {
        self.tape.map(|_| self.index as usize)
    }

    pub fn is_constant(self) -> bool {
        self.tape.is_none()
    }

    fn unary(self, op: OpKind, value: F, partial: F) -> Self {
        match self.tape {
            None => Self::constant(value),
            Some(t) => t.push(op, value, &[(self.index, partial)]),
        }
    }

    fn binary(self, other: Self, op: OpKind, value: F, da: F, db: F) -> Self {
        match (self.tape, other.tape) {
            (None, None) => Self::constant(value),
            (Some(t), None) => t.push(op, value, &[(self.index, da)]),
            (None, Some(t)) => t.push(op, value, &[(other.index, db)]),
            (Some(t), Some(u)) => {
                debug_assert!(std::ptr::eq(t, u), "mixing variables of different tapes");
                t.push(op, value, &[(self.index, da), (other.index, db)])
            }
        }
    }

    fn tape_of(xs: &[Self]) -> Option<&'t Tape<F>> {
        xs.iter().find_map(|x| x.tape)
    }

    /// Division that rejects a zero divisor instead of producing inf.
    pub fn checked_div(self, other: Self) -> Result<Self, DiffError> {
        if other.value == F::zero() {
            return Err(DiffError::DivisionByZero);
        }
        Ok(self / other)
    }

    /// Natural log restricted to positive arguments.
    pub fn checked_ln(self) -> Result<Self, DiffError> {
        if self.value <= F::zero() {
            return Err(DiffError::NonPositiveLog(self.value.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Real::ln(self))
    }
}

impl<'t, F: FloatBase> Add for Var<'t, F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.binary(rhs, OpKind::Add, self.value + rhs.value, F::one(), F::one())
    }
}

impl<'t, F: FloatBase> Sub for Var<'t, F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.binary(rhs, OpKind::Sub, self.value - rhs.value, F::one(), -F::one())
    }
}

impl<'t, F: FloatBase> Mul for Var<'t, F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.binary(rhs, OpKind::Mul, self.value * rhs.value, rhs.value, self.value)
    }
}

impl<'t, F: FloatBase> Div for Var<'t, F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        self.binary(rhs, OpKind::Div, q, F::one() / rhs.value, -q / rhs.value)
    }
}

impl<'t, F: FloatBase> Neg for Var<'t, F> {
    type Output = Self;
    fn neg(self) -> Self {
        self.unary(OpKind::Neg, -self.value, -F::one())
    }
}

impl<'t, F: FloatBase> Real for Var<'t, F> {
    type Base = F;

    fn cst(x: f64) -> Self {
        Self::constant(F::lit(x))
    }

    fn from_base(x: F) -> Self {
        Self::constant(x)
    }

    fn base(self) -> F {
        self.value
    }

    fn exp(self) -> Self {
        let e = self.value.exp();
        self.unary(OpKind::Exp, e, e)
    }

    fn ln(self) -> Self {
        self.unary(OpKind::Ln, self.value.ln(), F::one() / self.value)
    }

    fn tanh(self) -> Self {
        let t = self.value.tanh();
        self.unary(OpKind::Tanh, t, F::one() - t * t)
    }

    fn sigmoid(self) -> Self {
        let (s, ds) = sigmoid_with_slope(self.value);
        self.unary(OpKind::Sigmoid, s, ds)
    }

    fn relu(self) -> Self {
        if let Some(t) = self.tape {
            t.note_kink(self.value);
        }
        if self.value > F::zero() {
            self.unary(OpKind::Relu, self.value, F::one())
        } else {
            self.unary(OpKind::Relu, F::zero(), F::zero())
        }
    }

    fn sin(self) -> Self {
        self.unary(OpKind::Sin, self.value.sin(), self.value.cos())
    }

    fn cos(self) -> Self {
        self.unary(OpKind::Cos, self.value.cos(), -self.value.sin())
    }

    fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.unary(OpKind::Sqrt, r, F::lit(0.5) / r)
    }

    fn min(self, other: Self) -> Self {
        if let Some(t) = self.tape.or(other.tape) {
            t.note_kink(self.value - other.value);
        }
        if self.value <= other.value {
            self.binary(other, OpKind::Min, self.value, F::one(), F::zero())
        } else {
            self.binary(other, OpKind::Min, other.value, F::zero(), F::one())
        }
    }

    fn max(self, other: Self) -> Self {
        if let Some(t) = self.tape.or(other.tape) {
            t.note_kink(self.value - other.value);
        }
        if self.value >= other.value {
            self.binary(other, OpKind::Max, self.value, F::one(), F::zero())
        } else {
            self.binary(other, OpKind::Max, other.value, F::zero(), F::one())
        }
    }

    fn clamp(self, lo: f64, hi: f64) -> Self {
        let (lo, hi) = (F::lit(lo), F::lit(hi));
        if let Some(t) = self.tape {
            t.note_kink((self.value - lo).abs().min((self.value - hi).abs()));
        }
        if self.value < lo {
            self.unary(OpKind::Clamp, lo, F::zero())
        } else if self.value > hi {
            self.unary(OpKind::Clamp, hi, F::zero())
        } else {
            self.unary(OpKind::Clamp, self.value, F::one())
        }
    }

    fn sum(xs: &[Self]) -> Self {
        let value = xs.iter().fold(F::zero(), |acc, x| acc + x.value);
        let Some(t) = Self::tape_of(xs) else {
            return Self::constant(value);
        };
        let parents: Vec<(u32, F)> = xs
            .iter()
            .filter(|x| x.tape.is_some())
            .map(|x| (x.index, F::one()))
            .collect();
        t.push(OpKind::Sum, value, &parents)
    }

    fn dot(a: &[Self], b: &[Self]) -> Self {
        let value = a
            .iter()
            .zip(b)
            .fold(F::zero(), |acc, (x, y)| acc + x.value * y.value);
        let Some(t) = Self::tape_of(a).or_else(|| Self::tape_of(b)) else {
            return Self::constant(value);
        };
        let mut parents = Vec::with_capacity(a.len() * 2);
        for (x, y) in a.iter().zip(b) {
            if x.tape.is_some() {
                parents.push((x.index, y.value));
            }
            if y.tape.is_some() {
                parents.push((y.index, x.value));
            }
        }
        t.push(OpKind::Dot, value, &parents)
    }

    fn softmax(xs: &[Self]) -> Vec<Self> {
        let peak = xs.iter().fold(F::neg_infinity(), |m, x| m.max(x.value));
        let exps: Vec<F> = xs.iter().map(|x| (x.value - peak).exp()).collect();
        let total = exps.iter().fold(F::zero(), |acc, &e| acc + e);
        let probs: Vec<F> = exps.iter().map(|&e| e / total).collect();
        let Some(t) = Self::tape_of(xs) else {
            return probs.into_iter().map(Self::constant).collect();
        };
        (0..xs.len())
            .map(|i| {
                let parents: Vec<(u32, F)> = xs
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| x.tape.is_some())
                    .map(|(j, x)| {
                        let delta = if i == j { F::one() } else { F::zero() };
                        (x.index, probs[i] * (delta - probs[j]))
                    })
                    .collect();
                t.push(OpKind::Softmax, probs[i], &parents)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let tape = Tape::<f64>::new();
        let x = tape.var(2.0);
        let z = tape.var(3.0);
        let y = x * z;
        let g = tape.backward(y, &[x, z]).unwrap();
        assert_eq!(g, vec![3.0, 2.0]);
    }

    #[test]
    fn sigmoid_of_weighted_input() {
        let tape = Tape::<f64>::new();
        let w = tape.var(0.0);
        let x = Var::cst(1.0);
        let y = (w * x).sigmoid();
        assert_eq!(y.val(), 0.5);
        assert_eq!(tape.backward(y, &[w]).unwrap(), vec![0.25]);
    }

    #[test]
    fn relu_kink_convention() {
        let tape = Tape::<f64>::new();
        let a = tape.var(-1.0);
        let b = tape.var(0.0);
        let ra = a.relu();
        let rb = b.relu();
        assert_eq!(ra.val(), 0.0);
        assert_eq!(tape.backward(ra, &[a]).unwrap(), vec![0.0]);
        assert_eq!(tape.backward(rb, &[b]).unwrap(), vec![0.0]);
        assert_eq!(tape.min_kink_margin(), 0.0);
    }

    #[test]
    fn ties_route_to_first_argument() {
        let tape = Tape::<f64>::new();
        let a = tape.var(1.0);
        let b = tape.var(1.0);
        assert_eq!(tape.backward(a.max(b), &[a, b]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(tape.backward(a.min(b), &[a, b]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn clamp_outside_bounds_has_zero_gradient() {
        let tape = Tape::<f64>::new();
        let a = tape.var(12.0);
        let b = tape.var(5.0);
        assert_eq!(tape.backward(a.clamp(0.0, 10.0), &[a]).unwrap(), vec![0.0]);
        assert_eq!(tape.backward(b.clamp(0.0, 10.0), &[b]).unwrap(), vec![1.0]);
    }

    #[test]
    fn constants_stay_off_tape() {
        let tape = Tape::<f64>::new();
        let c = Var::<f64>::cst(2.0) * Var::cst(3.0);
        assert!(c.is_constant());
        assert_eq!(tape.len(), 0);
        let x = tape.var(1.0);
        let y = x * c;
        assert_eq!(tape.len(), 2);
        assert_eq!(tape.backward(y, &[x]).unwrap(), vec![6.0]);
    }

    #[test]
    fn nonfinite_value_reported_with_node() {
        let tape = Tape::<f64>::new();
        let x = tape.var(0.0);
        let y = x.ln() * tape.var(2.0);
        match tape.backward(y, &[x]) {
            Err(DiffError::NonFinite { node, op }) => {
                assert_eq!(node, 1);
                assert_eq!(op, "ln");
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn checked_ops_reject_bad_domains() {
        let tape = Tape::<f64>::new();
        let x = tape.var(1.0);
        assert!(matches!(
            x.checked_div(Var::cst(0.0)),
            Err(DiffError::DivisionByZero)
        ));
        assert!(matches!(
            (-x).checked_ln(),
            Err(DiffError::NonPositiveLog(_))
        ));
    }

    #[test]
    fn softmax_jacobian_rows_sum_to_zero() {
        let tape = Tape::<f64>::new();
        let xs = tape.vars(&[0.3, -1.0, 2.0]);
        let p = Var::softmax(&xs);
        let total: f64 = p.iter().map(|v| v.val()).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let g = tape.backward(p[0], &xs).unwrap();
        assert!(g.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn works_over_f32() {
        let tape = Tape::<f32>::new();
        let x = tape.var(2.0f32);
        let y = x * x * x;
        assert_eq!(tape.backward(y, &[x]).unwrap(), vec![12.0f32]);
    }
}
