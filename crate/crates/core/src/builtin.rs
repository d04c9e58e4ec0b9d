//! Canonical test diagrams.

use crate::diagram::{DiagramSpec, Level, OrderedDiagram};
use crate::error::{Error, Result};

pub const NAMES: [&str; 4] = ["odo2", "odo3", "fib", "pisot31"];

fn odometer(base: usize) -> OrderedDiagram {
    let level = Level {
        num_sources: 1,
        num_ranges: 1,
        edges: vec![(0, 0); base],
        in_order: vec![(0..base).collect()],
    };
    OrderedDiagram::new(DiagramSpec { stationary: true, period: 1, levels: vec![level] })
        .expect("odometer is valid")
}

/// Dyadic odometer.
pub fn odo2() -> OrderedDiagram {
    odometer(2)
}

/// Triadic odometer.
pub fn odo3() -> OrderedDiagram {
    odometer(3)
}

/// Fibonacci diagram, `A = [[1,1],[1,0]]` at every level.
///
/// Edges are `0: a->a`, `1: b->a`, `2: a->b`. No single order on this level
/// is proper when repeated, so the order into `a` alternates: `0 < 1` on odd
/// levels and `1 < 0` on even levels.
pub fn fib() -> OrderedDiagram {
    let edges = vec![(0, 0), (1, 0), (0, 1)];
    let odd = Level { num_sources: 2, num_ranges: 2, edges: edges.clone(), in_order: vec![vec![0, 1], vec![2]] };
    let even = Level { num_sources: 2, num_ranges: 2, edges, in_order: vec![vec![1, 0], vec![2]] };
    OrderedDiagram::new(DiagramSpec { stationary: true, period: 2, levels: vec![odd, even] })
        .expect("fib is valid")
}

/// `A = [[3,1],[1,3]]`. Edges `0..3: 0->0`, `3: 1->0`, `4: 0->1`, `5..8: 1->1`;
/// orders put the cross edge last into 0 and first into 1.
pub fn pisot31() -> OrderedDiagram {
    let level = Level {
        num_sources: 2,
        num_ranges: 2,
        edges: vec![(0, 0), (0, 0), (0, 0), (1, 0), (0, 1), (1, 1), (1, 1), (1, 1)],
        in_order: vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]],
    };
    OrderedDiagram::new(DiagramSpec { stationary: true, period: 1, levels: vec![level] })
        .expect("pisot31 is valid")
}

pub fn by_name(name: &str) -> Result<OrderedDiagram> {
    match name {
        "odo2" => Ok(odo2()),
        "odo3" => Ok(odo3()),
        "fib" => Ok(fib()),
        "pisot31" => Ok(pisot31()),
        other => Err(Error::Invalid(format!("unknown builtin diagram '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_are_proper_and_strongly_minimal() {
        for name in NAMES {
            let d = by_name(name).unwrap();
            assert!(d.is_properly_ordered(), "{name}");
            assert!(d.is_strongly_minimal(8), "{name}");
        }
        assert!(by_name("nope").is_err());
    }

    #[test]
    fn fib_matrix() {
        let d = fib();
        assert_eq!(d.level(1).unwrap().matrix(), vec![vec![1, 1], vec![1, 0]]);
        assert_eq!(d.level(2).unwrap().matrix(), vec![vec![1, 1], vec![1, 0]]);
    }
}
