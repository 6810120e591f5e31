//! Stabilizer tableau with symbolic signs.
//!
//! Each row sign is an affine function over F₂ of the random measurement
//! outcomes seen so far (bit 0 is the constant term). A measurement record
//! is therefore either a constant or depends on some coin flip, which is
//! exactly what determinism checks of detectors need.

use crate::circuits::{Circuit, InstructionKind};
use crate::f2la::words_for;

/// Outcome of a noiseless tableau run; `None` marks a non-deterministic value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauOutcome {
    pub detectors: Vec<Option<bool>>,
    pub observables: Vec<Option<bool>>,
}

impl TableauOutcome {
    pub fn is_deterministic(&self) -> bool {
        self.detectors.iter().chain(&self.observables).all(Option::is_some)
    }

    pub fn nondeterministic_detectors(&self) -> Vec<usize> {
        (0..self.detectors.len())
            .filter(|&i| self.detectors[i].is_none())
            .collect()
    }
}

type Expr = Vec<u64>;

fn expr_value(e: &[u64]) -> Option<bool> {
    let rest = e[0] & !1 != 0 || e[1..].iter().any(|&w| w != 0);
    (!rest).then_some(e[0] & 1 == 1)
}

pub(crate) struct SymTableau {
    n: usize,
    stride: usize,
    ew: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<u64>,
    next_var: usize,
}

impl SymTableau {
    /// All qubits in |0⟩; room for `vars` random outcomes.
    pub(crate) fn new(n: usize, vars: usize) -> Self {
        let stride = words_for(n).max(1);
        let ew = words_for(vars + 1);
        let mut t = Self {
            n,
            stride,
            ew,
            xs: vec![0; 2 * n * stride],
            zs: vec![0; 2 * n * stride],
            signs: vec![0; 2 * n * ew],
            next_var: 1,
        };
        for q in 0..n {
            t.xs[q * stride + q / 64] |= 1 << (q % 64);
            t.zs[(n + q) * stride + q / 64] |= 1 << (q % 64);
        }
        t
    }

    #[inline]
    fn bit(v: &[u64], row: usize, stride: usize, q: usize) -> bool {
        v[row * stride + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn x(&self, r: usize, q: usize) -> bool {
        Self::bit(&self.xs, r, self.stride, q)
    }

    #[inline]
    fn z(&self, r: usize, q: usize) -> bool {
        Self::bit(&self.zs, r, self.stride, q)
    }

    #[inline]
    fn flip_sign(&mut self, r: usize) {
        self.signs[r * self.ew] ^= 1;
    }

    fn xor_sign_expr(&mut self, r: usize, e: &[u64]) {
        for (s, v) in self.signs[r * self.ew..(r + 1) * self.ew].iter_mut().zip(e) {
            *s ^= v;
        }
    }

    fn toggle(v: &mut [u64], row: usize, stride: usize, q: usize, on: bool) {
        if on {
            v[row * stride + q / 64] ^= 1 << (q % 64);
        }
    }

    pub(crate) fn h(&mut self, q: usize) {
        for r in 0..2 * self.n {
            let (x, z) = (self.x(r, q), self.z(r, q));
            if x && z {
                self.flip_sign(r);
            }
            if x != z {
                Self::toggle(&mut self.xs, r, self.stride, q, true);
                Self::toggle(&mut self.zs, r, self.stride, q, true);
            }
        }
    }

    pub(crate) fn cx(&mut self, c: usize, t: usize) {
        for r in 0..2 * self.n {
            let (xc, zc, xt, zt) = (self.x(r, c), self.z(r, c), self.x(r, t), self.z(r, t));
            if xc && zt && (xt == zc) {
                self.flip_sign(r);
            }
            Self::toggle(&mut self.xs, r, self.stride, t, xc);
            Self::toggle(&mut self.zs, r, self.stride, c, zt);
        }
    }

    pub(crate) fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cx(a, b);
        self.h(b);
    }

    /// Applies `X^x Z^z` on `q` when the expression `cond` is 1.
    fn pauli_if(&mut self, q: usize, x: bool, z: bool, cond: &[u64]) {
        for r in 0..2 * self.n {
            let anti = (x && self.z(r, q)) ^ (z && self.x(r, q));
            if anti {
                self.xor_sign_expr(r, cond);
            }
        }
    }

    pub(crate) fn pauli(&mut self, q: usize, x: bool, z: bool) {
        let mut one = vec![0u64; self.ew];
        one[0] = 1;
        self.pauli_if(q, x, z, &one);
    }

    /// Row `h` ← row `h` · row `i`, signs combined symbolically.
    fn rowmul(&mut self, h: usize, i: usize) {
        let s = self.stride;
        let mut e: i64 = 0;
        for w in 0..s {
            let (x1, z1) = (self.xs[h * s + w], self.zs[h * s + w]);
            let (x2, z2) = (self.xs[i * s + w], self.zs[i * s + w]);
            e += (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64;
            e += 2 * (z1 & x2).count_ones() as i64;
            e -= ((x1 ^ x2) & (z1 ^ z2)).count_ones() as i64;
        }
        for w in 0..s {
            let (xv, zv) = (self.xs[i * s + w], self.zs[i * s + w]);
            self.xs[h * s + w] ^= xv;
            self.zs[h * s + w] ^= zv;
        }
        let ew = self.ew;
        for w in 0..ew {
            let v = self.signs[i * ew + w];
            self.signs[h * ew + w] ^= v;
        }
        if e.rem_euclid(4) >= 2 {
            self.flip_sign(h);
        }
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let s = self.stride;
        self.xs.copy_within(src * s..(src + 1) * s, dst * s);
        self.zs.copy_within(src * s..(src + 1) * s, dst * s);
        let ew = self.ew;
        self.signs.copy_within(src * ew..(src + 1) * ew, dst * ew);
    }

    /// Z measurement; returns the outcome expression.
    pub(crate) fn measure(&mut self, a: usize) -> Expr {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&r| self.x(r, a)) {
            for r in 0..2 * n {
                if r != p && self.x(r, a) {
                    self.rowmul(r, p);
                }
            }
            self.copy_row(p - n, p);
            let s = self.stride;
            self.xs[p * s..(p + 1) * s].fill(0);
            self.zs[p * s..(p + 1) * s].fill(0);
            self.zs[p * s + a / 64] |= 1 << (a % 64);
            let ew = self.ew;
            self.signs[p * ew..(p + 1) * ew].fill(0);
            let v = self.next_var;
            assert!(v < ew * 64, "variable budget exceeded");
            self.next_var += 1;
            self.signs[p * ew + v / 64] |= 1 << (v % 64);
            self.signs[p * ew..(p + 1) * ew].to_vec()
        } else {
            // Scratch row 2n is emulated by accumulating into a temporary tableau row.
            let s = self.stride;
            let ew = self.ew;
            self.xs.extend(std::iter::repeat_n(0, s));
            self.zs.extend(std::iter::repeat_n(0, s));
            self.signs.extend(std::iter::repeat_n(0, ew));
            let scratch = 2 * n;
            for i in 0..n {
                if self.x(i, a) {
                    self.rowmul(scratch, i + n);
                }
            }
            let out = self.signs[scratch * ew..(scratch + 1) * ew].to_vec();
            self.xs.truncate(2 * n * s);
            self.zs.truncate(2 * n * s);
            self.signs.truncate(2 * n * ew);
            out
        }
    }

    pub(crate) fn reset(&mut self, a: usize) {
        let m = self.measure(a);
        self.pauli_if(a, true, false, &m);
    }
}

/// Noiseless reference run: noise channels and ticks are ignored.
pub fn simulate_tableau(c: &Circuit) -> TableauOutcome {
    let vars = c.count_targets(|k| {
        matches!(
            k,
            InstructionKind::MeasureZ
                | InstructionKind::MeasureX
                | InstructionKind::ResetZ
                | InstructionKind::ResetX
        )
    });
    let mut t = SymTableau::new(c.num_qubits, vars);
    let mut records: Vec<Expr> = Vec::with_capacity(c.num_measurements());
    let mut detectors = Vec::with_capacity(c.num_detectors());
    let mut observables: Vec<Expr> = vec![vec![0; t.ew]; c.num_observables()];
    let combine = |recs: &[usize], records: &[Expr], ew: usize| {
        let mut e = vec![0u64; ew];
        for &r in recs {
            for (a, b) in e.iter_mut().zip(&records[r]) {
                *a ^= b;
            }
        }
        e
    };
    for ins in c.instructions() {
        let ts = &ins.targets;
        match &ins.kind {
            InstructionKind::ResetZ => ts.iter().for_each(|&q| t.reset(q)),
            InstructionKind::ResetX => ts.iter().for_each(|&q| {
                t.reset(q);
                t.h(q);
            }),
            InstructionKind::H => ts.iter().for_each(|&q| t.h(q)),
            InstructionKind::X => ts.iter().for_each(|&q| t.pauli(q, true, false)),
            InstructionKind::Y => ts.iter().for_each(|&q| t.pauli(q, true, true)),
            InstructionKind::Z => ts.iter().for_each(|&q| t.pauli(q, false, true)),
            InstructionKind::CNOT => ts.chunks(2).for_each(|p| t.cx(p[0], p[1])),
            InstructionKind::CZ => ts.chunks(2).for_each(|p| t.cz(p[0], p[1])),
            InstructionKind::MeasureZ => {
                for &q in ts {
                    records.push(t.measure(q));
                }
            }
            InstructionKind::MeasureX => {
                for &q in ts {
                    t.h(q);
                    records.push(t.measure(q));
                    t.h(q);
                }
            }
            InstructionKind::Detector(_) => {
                detectors.push(expr_value(&combine(ts, &records, t.ew)));
            }
            InstructionKind::Observable(j) => {
                let e = combine(ts, &records, t.ew);
                for (a, b) in observables[*j].iter_mut().zip(&e) {
                    *a ^= b;
                }
            }
            InstructionKind::Tick
            | InstructionKind::Depolarize1(_)
            | InstructionKind::Depolarize2(_)
            | InstructionKind::XError(_)
            | InstructionKind::ZError(_) => {}
        }
    }
    TableauOutcome {
        detectors,
        observables: observables.iter().map(|e| expr_value(e)).collect(),
    }
}
