#![allow(dead_code)]

use causal_metrics::extreal::ExtReal;
use causal_metrics::finspace::CostMatrix;
use causal_metrics::lorentz::LorentzVector;
use causal_metrics::pathval::PolylinePath;
use causal_metrics::spacetime::Event;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const ALPHABET: [ExtReal; 7] = [
    ExtReal::Finite(-2.0),
    ExtReal::Finite(-1.0),
    ExtReal::Finite(0.0),
    ExtReal::Finite(0.5),
    ExtReal::Finite(1.0),
    ExtReal::PosInf,
    ExtReal::NegInf,
];

pub fn random_matrix(rng: &mut impl Rng, n: usize, alphabet: &[ExtReal]) -> CostMatrix {
    CostMatrix::from_fn(n, |_, _| alphabet[rng.gen_range(0..alphabet.len())])
}

/// Entries in `[0, inf]` with a zero diagonal.
pub fn random_delta_matrix(rng: &mut impl Rng, n: usize) -> CostMatrix {
    let pos: Vec<ExtReal> = ALPHABET.iter().copied().filter(|v| *v >= ExtReal::ZERO).collect();
    CostMatrix::from_fn(n, |i, j| {
        if i == j {
            ExtReal::ZERO
        } else {
            pos[rng.gen_range(0..pos.len())]
        }
    })
}

/// Least cost from `i` to `j` by explicit enumeration of simple paths and
/// simple cycles. A pair that can route through a node on a negative cycle
/// costs `-inf`.
pub fn brute_force_closure(m: &CostMatrix) -> Vec<Vec<ExtReal>> {
    let n = m.n();
    let edge = |a: usize, b: usize| -> Option<ExtReal> {
        let w = m.get(a, b);
        (w != ExtReal::PosInf).then_some(w)
    };

    // reach[a][b]: b reachable from a by zero or more edges
    let mut reach = vec![vec![false; n]; n];
    for (a, row) in reach.iter_mut().enumerate() {
        let mut stack = vec![a];
        row[a] = true;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                if !row[y] && edge(x, y).is_some() {
                    row[y] = true;
                    stack.push(y);
                }
            }
        }
    }

    // every simple path from a to b (a != b), or simple cycle if a == b
    fn walk(
        n: usize,
        edge: &dyn Fn(usize, usize) -> Option<ExtReal>,
        target: usize,
        at: usize,
        cost: ExtReal,
        visited: &mut Vec<bool>,
        out: &mut Vec<ExtReal>,
    ) {
        for next in 0..n {
            let Some(w) = edge(at, next) else { continue };
            let c = cost.add_cost(w);
            if next == target {
                out.push(c);
            } else if !visited[next] {
                visited[next] = true;
                walk(n, edge, target, next, c, visited, out);
                visited[next] = false;
            }
        }
    }

    let mut on_negative_cycle = vec![false; n];
    for (c, flag) in on_negative_cycle.iter_mut().enumerate() {
        let mut visited = vec![false; n];
        visited[c] = true;
        let mut cycles = Vec::new();
        walk(n, &edge, c, c, ExtReal::ZERO, &mut visited, &mut cycles);
        *flag = cycles.iter().any(|&w| w < ExtReal::ZERO);
    }

    let mut out = vec![vec![ExtReal::PosInf; n]; n];
    for a in 0..n {
        for b in 0..n {
            let poisoned = (0..n).any(|c| on_negative_cycle[c] && reach[a][c] && reach[c][b]);
            out[a][b] = if poisoned {
                ExtReal::NegInf
            } else if a == b {
                ExtReal::ZERO
            } else {
                let mut visited = vec![false; n];
                visited[a] = true;
                let mut paths = Vec::new();
                walk(n, &edge, b, a, ExtReal::ZERO, &mut visited, &mut paths);
                paths.into_iter().min().unwrap_or(ExtReal::PosInf)
            };
        }
    }
    out
}

pub fn random_vector(rng: &mut impl Rng, n: usize, scale: f64) -> LorentzVector {
    LorentzVector((0..n).map(|_| rng.gen_range(-scale..scale)).collect())
}

/// A future-directed vector of the standard cone; `boundary` puts it on the
/// lightcone.
pub fn random_cone_vector(rng: &mut impl Rng, n: usize, boundary: bool) -> LorentzVector {
    let mut dir: Vec<f64> = (1..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    let t = rng.gen_range(0.1..5.0);
    let r = if boundary { t } else { t * rng.gen_range(0.0..0.999) };
    dir.iter_mut().for_each(|x| *x *= r / len);
    let mut v = vec![t];
    v.extend(dir);
    LorentzVector(v)
}

/// A future cone vector with coordinates on the grid `2^-8 Z`, so sums and
/// products of a few of them are exact in `f64`. Lightlike ones are scaled
/// Pythagorean tuples.
pub fn grid_cone_vector(rng: &mut impl Rng, n: usize, lightlike: bool) -> LorentzVector {
    const STEP: f64 = 1.0 / 256.0;
    if lightlike {
        let tuples: &[&[f64]] = match n {
            2 => &[&[1.0, 1.0]],
            3 => &[&[5.0, 3.0, 4.0], &[13.0, 5.0, 12.0], &[17.0, 8.0, 15.0], &[25.0, 7.0, 24.0]],
            4 => &[&[3.0, 1.0, 2.0, 2.0], &[7.0, 2.0, 3.0, 6.0], &[9.0, 1.0, 4.0, 8.0], &[9.0, 4.0, 4.0, 7.0]],
            _ => panic!("no lightlike tuples for n = {n}"),
        };
        let tuple = tuples[rng.gen_range(0..tuples.len())];
        let scale = rng.gen_range(1..=64) as f64 / 64.0;
        let mut space: Vec<f64> = tuple[1..].to_vec();
        for i in (1..space.len()).rev() {
            space.swap(i, rng.gen_range(0..=i));
        }
        let mut v = vec![tuple[0] * scale];
        v.extend(space.iter().map(|x| if rng.gen_bool(0.5) { x * scale } else { -x * scale }));
        return LorentzVector(v);
    }
    loop {
        let t = rng.gen_range(26..=1280) as f64 * STEP;
        let k = (t / STEP) as i64;
        let space: Vec<f64> = (1..n).map(|_| rng.gen_range(-k..=k) as f64 * STEP).collect();
        if space.iter().map(|x| x * x).sum::<f64>() < t * t {
            let mut v = vec![t];
            v.extend(space);
            return LorentzVector(v);
        }
    }
}

/// A Minkowski polyline whose steps lie in the closed future cone; each step
/// is lightlike with probability `lightlike`.
pub fn random_causal_polyline(
    rng: &mut impl Rng,
    n: usize,
    segments: usize,
    lightlike: f64,
) -> PolylinePath<Event> {
    let mut pts = vec![Event((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())];
    for _ in 0..segments {
        let boundary = rng.gen_bool(lightlike);
        let step = random_cone_vector(rng, n, boundary);
        let next = pts.last().unwrap().offset(&step);
        pts.push(next);
    }
    PolylinePath::uniform(pts).unwrap()
}

/// Proper time of `t -> (1 + t, 0.3 t)` for `t` in `[0, 1]` under
/// `diag(-1, x1^2)`: the integrand is `sqrt(1 - u^2)` with `u = 0.3 (1 + t)`.
pub fn power_one_reference() -> f64 {
    let f = |u: f64| 0.5 * (u * (1.0 - u * u).sqrt() + u.asin());
    (f(0.6) - f(0.3)) / 0.3
}
