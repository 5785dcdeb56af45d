//! Seeded generator of assertions inside the bounded fragment.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SIGNALS: [&str; 3] = ["a", "b", "c"];
pub const LIVENESS: [&str; 7] = ["s_eventually", "eventually", "s_always", "until", "s_until", "until_with", "s_until_with"];

pub struct Gen {
    rng: ChaCha8Rng,
    /// Second stream that occasionally overrides a choice.
    noise: Option<(ChaCha8Rng, f64)>,
    /// Emit operands of commutative operators in reverse order.
    pub flip_commutative: bool,
    pub signals: usize,
}

impl Gen {
    pub fn new(seed: u64, signals: usize) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            noise: None,
            flip_commutative: false,
            signals: signals.clamp(1, SIGNALS.len()),
        }
    }

    /// Same draws as `new(seed, ..)` except that each choice is redrawn
    /// from an independent stream with probability `p`.
    pub fn perturbed(seed: u64, signals: usize, noise_seed: u64, p: f64) -> Self {
        let mut g = Gen::new(seed, signals);
        g.noise = Some((ChaCha8Rng::seed_from_u64(noise_seed), p));
        g
    }

    pub fn pick(&mut self, n: usize) -> usize {
        let v = self.rng.gen_range(0..n);
        if let Some((alt, p)) = &mut self.noise {
            if alt.gen_bool(*p) {
                return alt.gen_range(0..n);
            }
        }
        v
    }

    fn pair(&mut self, op: &str, l: String, r: String, commutative: bool) -> String {
        if commutative && self.flip_commutative {
            format!("({r} {op} {l})")
        } else {
            format!("({l} {op} {r})")
        }
    }

    pub fn signal(&mut self) -> String {
        let i = self.pick(self.signals);
        SIGNALS[i].to_string()
    }

    pub fn boolean(&mut self, depth: usize) -> String {
        if depth == 0 {
            return match self.pick(12) {
                0 => "1'b1".into(),
                1 => "1'b0".into(),
                _ => self.signal(),
            };
        }
        match self.pick(10) {
            0 | 1 => self.signal(),
            2 => format!("!{}", self.boolean(depth - 1)),
            3 => {
                let (l, r) = (self.boolean(depth - 1), self.boolean(depth - 1));
                self.pair("&&", l, r, true)
            }
            4 => {
                let (l, r) = (self.boolean(depth - 1), self.boolean(depth - 1));
                self.pair("||", l, r, true)
            }
            5 => {
                let (l, r) = (self.boolean(depth - 1), self.boolean(depth - 1));
                self.pair("^", l, r, true)
            }
            6 => format!("$rose({})", self.signal()),
            7 => format!("$fell({})", self.signal()),
            8 => format!("$stable({})", self.signal()),
            _ => format!("$past({})", self.signal()),
        }
    }

    pub fn sequence(&mut self, depth: usize) -> String {
        if depth == 0 {
            return self.boolean(1);
        }
        match self.pick(11) {
            0 | 1 => self.boolean(2),
            2 => {
                let k = self.pick(3);
                format!("({} ##{k} {})", self.sequence(depth - 1), self.sequence(depth - 1))
            }
            3 => {
                let k = 1 + self.pick(2);
                format!("(##{k} {})", self.sequence(depth - 1))
            }
            4 => {
                let lo = self.pick(3);
                let hi = lo + self.pick(2) + usize::from(lo == 0);
                format!("{}[*{lo}:{hi}]", self.boolean(1))
            }
            5 => {
                let lo = self.pick(2);
                let hi = lo + self.pick(3);
                format!("({} ##[{lo}:{hi}] {})", self.sequence(depth - 1), self.sequence(depth - 1))
            }
            6 => {
                let (l, r) = (self.sequence(depth - 1), self.sequence(depth - 1));
                self.pair("or", l, r, true)
            }
            7 => {
                let (l, r) = (self.sequence(depth - 1), self.sequence(depth - 1));
                self.pair("and", l, r, true)
            }
            8 => {
                let (l, r) = (self.sequence(depth - 1), self.sequence(depth - 1));
                self.pair("intersect", l, r, true)
            }
            9 => format!("({} throughout {})", self.boolean(1), self.sequence(depth - 1)),
            _ => format!("({} within {})", self.sequence(depth - 1), self.sequence(depth - 1)),
        }
    }

    pub fn property(&mut self, depth: usize) -> String {
        if depth == 0 {
            return self.sequence(1);
        }
        match self.pick(8) {
            0 => self.sequence(2),
            1 | 2 => format!("{} |-> {}", self.sequence(depth - 1), self.property_operand(depth - 1)),
            3 | 4 => format!("{} |=> {}", self.sequence(depth - 1), self.property_operand(depth - 1)),
            5 => format!("not {}", self.property_operand(depth - 1)),
            6 => {
                let (l, r) = (self.property_operand(depth - 1), self.property_operand(depth - 1));
                self.pair("and", l, r, true)
            }
            _ => {
                let (l, r) = (self.property_operand(depth - 1), self.property_operand(depth - 1));
                self.pair("or", l, r, true)
            }
        }
    }

    fn property_operand(&mut self, depth: usize) -> String {
        format!("({})", self.property(depth))
    }

    /// A full assertion body, sometimes clocked or guarded by `disable iff`.
    pub fn assertion(&mut self) -> String {
        let body = self.property(2);
        let body = match self.pick(8) {
            0 => format!("disable iff ({}) {body}", self.signal()),
            _ => body,
        };
        match self.pick(5) {
            0 => format!("@(posedge clk) {body}"),
            _ => body,
        }
    }

    /// Wraps one operand of a random liveness operator around `base`.
    pub fn inject_liveness(&mut self, base: &str) -> String {
        let op = LIVENESS[self.pick(LIVENESS.len())];
        let s = self.signal();
        match op {
            "s_eventually" | "eventually" | "s_always" => format!("{s} |-> {op} ({base})"),
            _ => format!("({base}) {op} {s}"),
        }
    }
}

/// Pairs with a spread of relationships: identical, operand-flipped,
/// lightly perturbed, and unrelated.
pub fn pair(seed: u64, signals: usize) -> (String, String) {
    let p = Gen::new(seed, signals).assertion();
    let q = match seed % 4 {
        0 => p.clone(),
        1 => {
            let mut g = Gen::new(seed, signals);
            g.flip_commutative = true;
            g.assertion()
        }
        2 => Gen::perturbed(seed, signals, seed ^ 0x9e37_79b9, 0.15).assertion(),
        _ => Gen::new(seed.wrapping_mul(31).wrapping_add(7), signals).assertion(),
    };
    (p, q)
}
