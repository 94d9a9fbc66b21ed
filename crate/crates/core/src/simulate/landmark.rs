use alloc::format;
use alloc::vec::Vec;

use crate::model::{Landmark, SamplePath, StateSpace};

/// How the landmark variable is computed from the path up to time `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandmarkRule {
    /// Every individual in one class.
    Universal,
    /// The state occupied at `s`.
    AsIfMarkov,
    /// The state at `s` together with whether a `from -> to` jump happened in `(0, s]`.
    StateAndVisited { from: usize, to: usize },
}

impl LandmarkRule {
    pub fn landmark(&self, path: &SamplePath, s: f64, states: &StateSpace) -> Landmark {
        let label = |i: usize| states.label(i).unwrap_or("?");
        match *self {
            LandmarkRule::Universal => Landmark::universal(),
            LandmarkRule::AsIfMarkov => Landmark::new(label(path.state_at(s))),
            LandmarkRule::StateAndVisited { from, to } => {
                let visited = path.count(from, to, s) > 0;
                Landmark::new(format!("{}|{}", label(path.state_at(s)), u8::from(visited)))
            }
        }
    }

    /// Whether every class of this rule pins down the state at `s`.
    pub fn determines_state(&self) -> bool {
        !matches!(self, LandmarkRule::Universal)
    }
}

pub fn assign_landmarks(paths: Vec<SamplePath>, rule: LandmarkRule, s: f64, states: &StateSpace) -> Vec<SamplePath> {
    paths
        .into_iter()
        .map(|p| {
            let z = rule.landmark(&p, s, states);
            p.with_landmark(z)
        })
        .collect()
}

/// Sets each landmark to the state occupied at `s`.
pub fn landmark_as_if_markov(paths: Vec<SamplePath>, s: f64, states: &StateSpace) -> Vec<SamplePath> {
    assign_landmarks(paths, LandmarkRule::AsIfMarkov, s, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Jump;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn paths() -> Vec<SamplePath> {
        vec![
            SamplePath::uncensored(0, 0, vec![]).unwrap(),
            SamplePath::uncensored(1, 0, vec![Jump::new(1.0, 0, 1)]).unwrap(),
            SamplePath::uncensored(2, 0, vec![Jump::new(1.0, 0, 1), Jump::new(2.0, 1, 0)]).unwrap(),
            SamplePath::uncensored(3, 0, vec![Jump::new(3.0, 0, 1)]).unwrap(),
        ]
    }

    fn classes(paths: &[SamplePath]) -> BTreeMap<Landmark, Vec<u64>> {
        let mut out: BTreeMap<Landmark, Vec<u64>> = BTreeMap::new();
        for p in paths {
            out.entry(p.landmark().clone()).or_default().push(p.id());
        }
        out
    }

    #[test]
    fn single_class_when_all_share_the_state() {
        let states = StateSpace::new(&["healthy", "ill"]).unwrap();
        let marked = landmark_as_if_markov(paths(), 0.5, &states);
        assert_eq!(classes(&marked).len(), 1);
    }

    #[test]
    fn split_by_state() {
        let states = StateSpace::new(&["healthy", "ill"]).unwrap();
        let marked = landmark_as_if_markov(paths(), 1.5, &states);
        let c = classes(&marked);
        assert_eq!(c[&Landmark::new("healthy")], vec![0, 3]);
        assert_eq!(c[&Landmark::new("ill")], vec![1, 2]);
    }

    #[test]
    fn enriched_landmark_refines_the_partition() {
        let states = StateSpace::new(&["healthy", "ill"]).unwrap();
        let coarse = classes(&landmark_as_if_markov(paths(), 2.5, &states));
        let rule = LandmarkRule::StateAndVisited { from: 0, to: 1 };
        let fine = classes(&assign_landmarks(paths(), rule, 2.5, &states));
        assert!(fine.len() > coarse.len());
        // every fine class sits inside one coarse class
        for members in fine.values() {
            assert!(coarse.values().any(|c| members.iter().all(|m| c.contains(m))));
        }
    }
}
