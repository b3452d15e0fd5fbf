//! Straight-line programs: branch-free arithmetic circuits over ℚ.
//!
//! Programs are division-free (Const / Input / Add / Sub / Mul only), so they
//! evaluate verbatim over every commutative ring used by the pipeline:
//! rationals, truncated series, dual numbers and quotient rings. Reverse-mode
//! differentiation (Baur–Strassen) turns a program of length L into one of
//! length O(L) emitting all first-order partial derivatives.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::Rat;
use crate::ring::{Rationals, Ring};
use num::Zero;

#[derive(Clone, Debug, PartialEq)]
pub enum Instr {
    Const(Rat),
    Input(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Slp {
    pub num_inputs: usize,
    /// Instructions reference strictly earlier nodes, so the graph is acyclic
    /// by construction.
    pub instrs: Vec<Instr>,
    pub outputs: Vec<usize>,
}

impl Slp {
    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Evaluates all outputs at a point of the given ring.
    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::El]) -> Result<Vec<R::El>> {
        if point.len() != self.num_inputs {
            return Err(Error::Arity {
                expected: self.num_inputs,
                got: point.len(),
            });
        }
        let mut vals: Vec<R::El> = Vec::with_capacity(self.instrs.len());
        for ins in &self.instrs {
            let v = match ins {
                Instr::Const(c) => ring.from_rat(c),
                Instr::Input(i) => point[*i].clone(),
                Instr::Add(a, b) => ring.add(&vals[*a], &vals[*b]),
                Instr::Sub(a, b) => ring.sub(&vals[*a], &vals[*b]),
                Instr::Mul(a, b) => ring.mul(&vals[*a], &vals[*b]),
            };
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|&o| vals[o].clone()).collect())
    }

    /// Evaluates a single output over ℚ.
    pub fn eval_qq(&self, point: &[Rat]) -> Result<Vec<Rat>> {
        self.eval(&Rationals, point)
    }

    /// Appends a reverse (adjoint) pass for one output to a builder holding
    /// this program's forward nodes; returns the n input adjoints.
    fn reverse_pass(&self, b: &mut SlpBuilder, fwd: &[usize], out_node: usize) -> Vec<usize> {
        let mut adj: Vec<Option<usize>> = vec![None; self.instrs.len()];
        let one = b.constant(Rat::from(num::BigInt::from(1)));
        adj[out_node] = Some(one);
        let mut input_adj: Vec<Option<usize>> = vec![None; self.num_inputs];
        for idx in (0..self.instrs.len()).rev() {
            let a = match adj[idx] {
                Some(a) => a,
                None => continue,
            };
            match &self.instrs[idx] {
                Instr::Const(_) => {}
                Instr::Input(i) => {
                    input_adj[*i] = Some(match input_adj[*i] {
                        None => a,
                        Some(prev) => b.add(prev, a),
                    });
                }
                Instr::Add(x, y) => {
                    for &c in &[*x, *y] {
                        adj[c] = Some(match adj[c] {
                            None => a,
                            Some(prev) => b.add(prev, a),
                        });
                    }
                }
                Instr::Sub(x, y) => {
                    adj[*x] = Some(match adj[*x] {
                        None => a,
                        Some(prev) => b.add(prev, a),
                    });
                    let na = b.neg(a);
                    adj[*y] = Some(match adj[*y] {
                        None => na,
                        Some(prev) => b.add(prev, na),
                    });
                }
                Instr::Mul(x, y) => {
                    let ax = b.mul(a, fwd[*y]);
                    adj[*x] = Some(match adj[*x] {
                        None => ax,
                        Some(prev) => b.add(prev, ax),
                    });
                    let ay = b.mul(a, fwd[*x]);
                    adj[*y] = Some(match adj[*y] {
                        None => ay,
                        Some(prev) => b.add(prev, ay),
                    });
                }
            }
        }
        let zero = b.constant(Rat::zero());
        input_adj.into_iter().map(|o| o.unwrap_or(zero)).collect()
    }

    /// Reverse-mode gradient of one output: returns a program with the same
    /// inputs emitting the n partial derivatives of `self.outputs[which]`.
    pub fn gradient(&self, which: usize) -> Slp {
        let mut b = SlpBuilder::new(self.num_inputs);
        let fwd: Vec<usize> = self.import_into(&mut b, None);
        let outputs = self.reverse_pass(&mut b, &fwd, self.outputs[which]);
        b.finish(outputs)
    }

    /// Jacobian program: emits all partials d out_i / d x_j, row-major,
    /// sharing a single forward sweep across the reverse passes.
    pub fn jacobian(&self) -> Slp {
        let n = self.num_inputs;
        let mut b = SlpBuilder::new(n);
        let fwd = self.import_into(&mut b, None);
        let mut outputs = Vec::with_capacity(self.outputs.len() * n);
        for which in 0..self.outputs.len() {
            outputs.extend(self.reverse_pass(&mut b, &fwd, self.outputs[which]));
        }
        b.finish(outputs)
    }

    /// Program emitting the outputs followed by the full Jacobian, sharing
    /// one forward sweep: values and derivatives from a single evaluation.
    pub fn with_jacobian(&self) -> Slp {
        let n = self.num_inputs;
        let mut b = SlpBuilder::new(n);
        let fwd = self.import_into(&mut b, None);
        let mut outputs: Vec<usize> = self.outputs.iter().map(|&o| fwd[o]).collect();
        for which in 0..self.outputs.len() {
            outputs.extend(self.reverse_pass(&mut b, &fwd, self.outputs[which]));
        }
        b.finish(outputs)
    }

    /// Program computing x ↦ self(M x).
    pub fn compose_linear(&self, m: &ChangeOfVariables) -> Slp {
        let n = self.num_inputs;
        assert_eq!(m.matrix.len(), n);
        let mut b = SlpBuilder::new(n);
        let inputs: Vec<usize> = (0..n).map(|i| b.input(i)).collect();
        let mut new_inputs = Vec::with_capacity(n);
        for row in &m.matrix {
            let mut acc: Option<usize> = None;
            for (j, coef) in row.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let c = b.constant(coef.clone());
                let term = b.mul(c, inputs[j]);
                acc = Some(match acc {
                    None => term,
                    Some(prev) => b.add(prev, term),
                });
            }
            new_inputs.push(acc.unwrap_or_else(|| b.constant(Rat::zero())));
        }
        let mapped = self.import_into(&mut b, Some(&new_inputs));
        let outputs = self.outputs.iter().map(|&o| mapped[o]).collect();
        b.finish(outputs)
    }

    /// Fixes the first k inputs to constants, producing a program in the
    /// remaining n-k variables.
    pub fn substitute_prefix(&self, values: &[Rat]) -> Slp {
        let k = values.len();
        assert!(k <= self.num_inputs);
        let rest = self.num_inputs - k;
        let mut b = SlpBuilder::new(rest);
        let mut new_inputs = Vec::with_capacity(self.num_inputs);
        for v in values {
            new_inputs.push(b.constant(v.clone()));
        }
        for i in 0..rest {
            new_inputs.push(b.input(i));
        }
        let mapped = self.import_into(&mut b, Some(&new_inputs));
        let outputs = self.outputs.iter().map(|&o| mapped[o]).collect();
        b.finish(outputs)
    }

    /// Copies this program's instructions into a builder, remapping inputs
    /// either to fresh input nodes or to the provided replacement nodes.
    /// Returns the node map.
    pub fn import_into(&self, b: &mut SlpBuilder, inputs: Option<&[usize]>) -> Vec<usize> {
        let mut map = Vec::with_capacity(self.instrs.len());
        for ins in &self.instrs {
            let node = match ins {
                Instr::Const(c) => b.constant(c.clone()),
                Instr::Input(i) => match inputs {
                    Some(nodes) => nodes[*i],
                    None => b.input(*i),
                },
                Instr::Add(x, y) => b.add(map[*x], map[*y]),
                Instr::Sub(x, y) => b.sub(map[*x], map[*y]),
                Instr::Mul(x, y) => b.mul(map[*x], map[*y]),
            };
            map.push(node);
        }
        map
    }
}

/// Incremental program builder.
pub struct SlpBuilder {
    num_inputs: usize,
    instrs: Vec<Instr>,
}

impl SlpBuilder {
    pub fn new(num_inputs: usize) -> Self {
        SlpBuilder {
            num_inputs,
            instrs: Vec::new(),
        }
    }

    fn push(&mut self, ins: Instr) -> usize {
        self.instrs.push(ins);
        self.instrs.len() - 1
    }

    pub fn input(&mut self, i: usize) -> usize {
        assert!(i < self.num_inputs);
        self.push(Instr::Input(i))
    }

    pub fn constant(&mut self, c: Rat) -> usize {
        self.push(Instr::Const(c))
    }

    pub fn add(&mut self, a: usize, b: usize) -> usize {
        self.push(Instr::Add(a, b))
    }

    pub fn sub(&mut self, a: usize, b: usize) -> usize {
        self.push(Instr::Sub(a, b))
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.push(Instr::Mul(a, b))
    }

    pub fn neg(&mut self, a: usize) -> usize {
        let z = self.constant(Rat::zero());
        self.push(Instr::Sub(z, a))
    }

    /// Square-and-multiply power.
    pub fn pow(&mut self, a: usize, e: u32) -> usize {
        if e == 0 {
            return self.constant(Rat::from(num::BigInt::from(1)));
        }
        let mut result: Option<usize> = None;
        let mut base = a;
        let mut k = e;
        loop {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base,
                    Some(r) => self.mul(r, base),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = self.mul(base, base);
        }
        result.unwrap()
    }

    pub fn finish(self, outputs: Vec<usize>) -> Slp {
        for &o in &outputs {
            assert!(o < self.instrs.len());
        }
        Slp {
            num_inputs: self.num_inputs,
            instrs: self.instrs,
            outputs,
        }
    }
}

/// An exact linear change of variables with its cached inverse.
#[derive(Clone, Debug)]
pub struct ChangeOfVariables {
    pub matrix: Matrix<Rat>,
    pub inverse: Matrix<Rat>,
}

impl ChangeOfVariables {
    pub fn new(matrix: Matrix<Rat>) -> Result<Self> {
        let inverse = linalg::invert_matrix(&Rationals, &matrix)?;
        Ok(ChangeOfVariables { matrix, inverse })
    }

    pub fn identity(n: usize) -> Self {
        ChangeOfVariables {
            matrix: linalg::identity(&Rationals, n),
            inverse: linalg::identity(&Rationals, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        linalg::mat_vec(&Rationals, &self.matrix, v)
    }
}

// ---- expression parsing ----

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Vec<String>,
    builder: SlpBuilder,
    var_nodes: Vec<Option<usize>>,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<usize> {
        let mut node = if self.peek() == Some(b'-') {
            self.pos += 1;
            let t = self.term()?;
            self.builder.neg(t)
        } else {
            if self.peek() == Some(b'+') {
                self.pos += 1;
            }
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    node = self.builder.add(node, t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    node = self.builder.sub(node, t);
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<usize> {
        let mut node = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            node = self.builder.mul(node, f);
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<usize> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected a nonnegative integer exponent");
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse {
                    pos: start,
                    msg: "exponent too large".into(),
                })?;
            return Ok(self.builder.pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<usize> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                let a = self.factor()?;
                Ok(self.builder.neg(a))
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.variable(),
            _ => self.err("expected a number, variable or `(`"),
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let numer: num::BigInt = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .unwrap();
        // a rational literal a/b binds tighter than any operator
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let dstart = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if dstart == self.pos {
                return self.err("expected denominator digits");
            }
            let denom: num::BigInt = std::str::from_utf8(&self.src[dstart..self.pos])
                .unwrap()
                .parse()
                .unwrap();
            if denom.is_zero() {
                return Err(Error::Parse {
                    pos: dstart,
                    msg: "zero denominator".into(),
                });
            }
            return Ok(self.builder.constant(Rat::new(numer, denom)));
        }
        Ok(self.builder.constant(Rat::from(numer)))
    }

    fn variable(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match self.vars.iter().position(|v| v == name) {
            Some(i) => {
                if self.var_nodes[i].is_none() {
                    self.var_nodes[i] = Some(self.builder.input(i));
                }
                Ok(self.var_nodes[i].unwrap())
            }
            None => Err(Error::UnknownVariable {
                name: name.into(),
                pos: start,
            }),
        }
    }
}

/// Parses an expression over +, -, *, ^ (nonnegative integer powers),
/// integer/rational literals and the declared variables into a single-output
/// program. Powers expand by square-and-multiply.
pub fn parse(text: &str, vars: &[&str]) -> Result<Slp> {
    let n = vars.len();
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars: vars.iter().map(|s| s.to_string()).collect(),
        builder: SlpBuilder::new(n),
        var_nodes: vec![None; n],
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("unexpected trailing input");
    }
    Ok(p.builder.finish(vec![out]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipoly::{MultiPoly, MultiPolyRing};
    use crate::quotient::PolyModRing;
    use crate::rational::{rat, ratio};
    use crate::series::{SeriesRing, TruncSeries};

    fn circle() -> Slp {
        parse("x1^2 + x2^2 - 1", &["x1", "x2"]).unwrap()
    }

    #[test]
    fn parse_and_eval() {
        let p = parse("x1^2 + x2 - 1", &["x1", "x2"]).unwrap();
        assert_eq!(p.eval_qq(&[rat(2), rat(3)]).unwrap(), vec![rat(6)]);
        let z = parse("0", &["x1"]).unwrap();
        assert_eq!(z.eval_qq(&[rat(17)]).unwrap(), vec![rat(0)]);
        let cube = parse("(x1+x2)^3", &["x1", "x2"]).unwrap();
        assert_eq!(cube.eval_qq(&[rat(1), rat(1)]).unwrap(), vec![rat(8)]);
        assert_eq!(circle().eval_qq(&[rat(1), rat(0)]).unwrap(), vec![rat(0)]);
    }

    #[test]
    fn parse_rational_literals_and_errors() {
        let p = parse("1/2 * x1 - 3/4", &["x1"]).unwrap();
        assert_eq!(p.eval_qq(&[ratio(3, 2)]).unwrap(), vec![rat(0)]);
        assert!(matches!(
            parse("x1 + ", &["x1"]),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse("x1 + y", &["x1"]),
            Err(Error::UnknownVariable { .. })
        ));
    }

    #[test]
    fn eval_over_series() {
        // x1^2 - 2 at the series 1 + (t-1): (1+z)^2 - 2 = -1 + 2z + z^2
        let p = parse("x1^2 - 2", &["x1"]).unwrap();
        let ring = SeriesRing::new(4);
        let x = TruncSeries::t_series(4);
        let out = p.eval(&ring, &[x]).unwrap();
        assert_eq!(
            out[0].to_rats(),
            vec![rat(-1), rat(2), rat(1), rat(0)]
        );
    }

    #[test]
    fn eval_over_quotient_matches_eval_then_reduce() {
        // two-path equality: evaluate over R[U]/(m) directly vs. evaluate the
        // polynomial over ℚ[U] (via the multivariate ring) and reduce.
        let p = parse("x1^3 - 2*x1 + 5", &["x1"]).unwrap();
        let m = crate::poly::qpoly(&[-2, 0, 1]);
        let ring = PolyModRing::new_rational(m.clone());
        let u = ring.generator();
        let direct = p.eval(&ring, &[u]).unwrap().pop().unwrap();
        let mring = MultiPolyRing::new(1);
        let dense = p.eval(&mring, &[MultiPoly::var(&mring, 0)]).unwrap().pop().unwrap();
        let uni = dense.to_univariate().unwrap();
        let reduced = ring.reduce(&uni);
        assert_eq!(direct, reduced);
    }

    #[test]
    fn gradient_matches_hand_values() {
        let g = circle().gradient(0);
        assert_eq!(g.eval_qq(&[rat(3), rat(4)]).unwrap(), vec![rat(6), rat(8)]);
        let c = parse("7", &["x1", "x2"]).unwrap().gradient(0);
        assert_eq!(c.eval_qq(&[rat(1), rat(2)]).unwrap(), vec![rat(0), rat(0)]);
    }

    #[test]
    fn gradient_matches_dense_symbolic_derivative() {
        // random-ish degree-3 trivariate, checked coefficientwise against the
        // dense symbolic derivative.
        let f = parse(
            "2*x1^3 - x1*x2*x3 + 5*x2^2 - 7*x3 + 1/3*x1^2*x3",
            &["x1", "x2", "x3"],
        )
        .unwrap();
        let g = f.gradient(0);
        let mring = MultiPolyRing::new(3);
        let xs: Vec<MultiPoly> = (0..3).map(|i| MultiPoly::var(&mring, i)).collect();
        let dense = f.eval(&mring, &xs).unwrap().pop().unwrap();
        let grads = g.eval(&mring, &xs).unwrap();
        for k in 0..3 {
            assert_eq!(grads[k], dense.derivative(k), "partial {k}");
        }
    }

    #[test]
    fn compose_linear_identity_and_swap() {
        let f = circle();
        let id = ChangeOfVariables::identity(2);
        let fi = f.compose_linear(&id);
        for (a, b) in [(rat(1), rat(2)), (ratio(1, 3), rat(-5))] {
            assert_eq!(
                fi.eval_qq(&[a.clone(), b.clone()]).unwrap(),
                f.eval_qq(&[a, b]).unwrap()
            );
        }
        // p = x1 under a swap becomes x2
        let p = parse("x1", &["x1", "x2"]).unwrap();
        let swap = ChangeOfVariables::new(vec![
            vec![rat(0), rat(1)],
            vec![rat(1), rat(0)],
        ])
        .unwrap();
        let q = p.compose_linear(&swap);
        assert_eq!(q.eval_qq(&[rat(9), rat(4)]).unwrap(), vec![rat(4)]);
    }

    #[test]
    fn compose_linear_roundtrip_and_associativity() {
        let f = parse("x1^2*x2 - 3*x2^2 + x1 - 4", &["x1", "x2"]).unwrap();
        let m = ChangeOfVariables::new(vec![
            vec![rat(2), rat(1)],
            vec![rat(1), rat(1)],
        ])
        .unwrap();
        let minv = ChangeOfVariables::new(m.inverse.clone()).unwrap();
        let fm = f.compose_linear(&m);
        let back = fm.compose_linear(&minv);
        // 20 sample points
        for i in 0..20i64 {
            let pt = [ratio(i, 7), ratio(3 - i, 5)];
            assert_eq!(back.eval_qq(&pt).unwrap(), f.eval_qq(&pt).unwrap());
        }
        // compose_linear(p, M∘N) == compose_linear(compose_linear(p,N), M)... as functions
        let n_mat = ChangeOfVariables::new(vec![
            vec![rat(1), rat(-1)],
            vec![rat(0), rat(2)],
        ])
        .unwrap();
        let mn = ChangeOfVariables::new(linalg::mat_mul(&Rationals, &m.matrix, &n_mat.matrix))
            .unwrap();
        let lhs = f.compose_linear(&mn);
        let rhs = f.compose_linear(&m).compose_linear(&n_mat);
        for i in 0..10i64 {
            let pt = [rat(i), ratio(i + 1, 3)];
            assert_eq!(lhs.eval_qq(&pt).unwrap(), rhs.eval_qq(&pt).unwrap());
        }
    }

    #[test]
    fn substitute_prefix_cases() {
        let f = parse("x1*x2 + x3^2", &["x1", "x2", "x3"]).unwrap();
        // k=1: identity
        let same = f.substitute_prefix(&[]);
        assert_eq!(
            same.eval_qq(&[rat(1), rat(2), rat(3)]).unwrap(),
            vec![rat(11)]
        );
        // partial substitution, spot equality at points
        let sub = f.substitute_prefix(&[rat(5)]);
        assert_eq!(sub.num_inputs, 2);
        for (a, b) in [(rat(2), rat(3)), (ratio(1, 2), rat(-1))] {
            assert_eq!(
                sub.eval_qq(&[a.clone(), b.clone()]).unwrap(),
                f.eval_qq(&[rat(5), a, b]).unwrap()
            );
        }
        // full substitution yields a constant program
        let full = f.substitute_prefix(&[rat(2), rat(3), rat(4)]);
        assert_eq!(full.num_inputs, 0);
        assert_eq!(full.eval_qq(&[]).unwrap(), vec![rat(22)]);
    }

    #[test]
    fn arity_mismatch_rejected() {
        assert!(matches!(
            circle().eval_qq(&[rat(1)]),
            Err(Error::Arity { .. })
        ));
    }
}
