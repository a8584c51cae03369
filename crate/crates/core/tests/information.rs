//! Entropy and mutual information against direct summation.

use binforward::probability::{entropy, mutual_information, Alphabet, JointPmf};
use binforward::rng::{substream, Purpose};
use rand::Rng;

fn random_joint(rng: &mut impl Rng) -> JointPmf {
    let sizes: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=4)).collect();
    let cells: usize = sizes.iter().product();
    let mut w: Vec<f64> = (0..cells).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() }).collect();
    w[0] += 1e-3;
    let t: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= t);
    let axes = ["A", "B", "C"].iter().zip(&sizes).map(|(n, &k)| Alphabet::new(*n, k).unwrap()).collect();
    JointPmf::new(axes, w).unwrap()
}

/// sum p(a,b,c) log p(...) over explicit loops, with marginals built by hand.
struct Oracle {
    p: Vec<Vec<Vec<f64>>>,
}

impl Oracle {
    fn new(j: &JointPmf) -> Self {
        let s = j.sizes();
        let p =
            (0..s[0]).map(|a| (0..s[1]).map(|b| (0..s[2]).map(|c| j.weight(&[a, b, c])).collect()).collect()).collect();
        Oracle { p }
    }

    /// Entropy of the variables flagged in `keep`.
    fn h(&self, keep: [bool; 3]) -> f64 {
        let mut m = std::collections::HashMap::new();
        for (a, pa) in self.p.iter().enumerate() {
            for (b, pb) in pa.iter().enumerate() {
                for (c, &w) in pb.iter().enumerate() {
                    let key = (keep[0].then_some(a), keep[1].then_some(b), keep[2].then_some(c));
                    *m.entry(key).or_insert(0.0) += w;
                }
            }
        }
        m.values().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
    }
}

#[test]
fn measures_match_direct_summation() {
    let mut rng = substream(100, Purpose::Sampling, &[]);
    for _ in 0..100 {
        let j = random_joint(&mut rng);
        let o = Oracle::new(&j);
        let (a, b, c) = ([true, false, false], [false, true, false], [false, false, true]);
        let or = |x: [bool; 3], y: [bool; 3]| [x[0] | y[0], x[1] | y[1], x[2] | y[2]];
        let h_abc = o.h([true; 3]);
        assert!((entropy(&j, &[0, 1, 2], &[]).unwrap() - h_abc).abs() < 1e-9);
        assert!((entropy(&j, &[0], &[1]).unwrap() - (o.h(or(a, b)) - o.h(b))).abs() < 1e-9);
        let i_ab = o.h(a) + o.h(b) - o.h(or(a, b));
        assert!((mutual_information(&j, &[0], &[1], &[]).unwrap() - i_ab).abs() < 1e-9);
        let i_ab_c = o.h(or(a, c)) + o.h(or(b, c)) - h_abc - o.h(c);
        let mi = mutual_information(&j, &[0], &[1], &[2]).unwrap();
        assert!((mi - i_ab_c).abs() < 1e-9);
        assert!(mi >= 0.0);
        // Chain rule: H(A,B,C) = H(A) + H(B|A) + H(C|A,B).
        let chain =
            entropy(&j, &[0], &[]).unwrap() + entropy(&j, &[1], &[0]).unwrap() + entropy(&j, &[2], &[0, 1]).unwrap();
        assert!((chain - h_abc).abs() < 1e-9);
        // I(A;B,C) = I(A;C) + I(A;B|C).
        let lhs = mutual_information(&j, &[0], &[1, 2], &[]).unwrap();
        let rhs = mutual_information(&j, &[0], &[2], &[]).unwrap() + mi;
        assert!((lhs - rhs).abs() < 1e-9);
    }
}
