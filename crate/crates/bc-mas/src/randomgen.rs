//! Seeded random instances for property testing: small action descriptions
//! (inertia always included) and raw logic programs for enumerator
//! cross-checks. Everything is a pure function of the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    expand_abbreviations, ActionDescription, ActionInfo, Atom, FluentClass, FluentInfo,
    FluentKind, LawInput, Literal, Signature,
};
use crate::translate::{LogicProgram, Rule, TimedLit};

#[derive(Clone, Copy, Debug)]
pub struct DescConfig {
    pub max_fluents: usize,
    pub max_actions: usize,
    pub max_extra_laws: usize,
}

impl Default for DescConfig {
    fn default() -> Self {
        DescConfig {
            max_fluents: 3,
            max_actions: 2,
            max_extra_laws: 6,
        }
    }
}

/// A small random description over regular fluents `f1..` and actions
/// `a1..`, with inertia for every fluent plus a few random laws.
pub fn random_description(seed: u64, cfg: &DescConfig) -> ActionDescription {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = rng.gen_range(1..=cfg.max_fluents);
    let na = rng.gen_range(1..=cfg.max_actions.max(1));
    let fluents: Vec<Atom> = (1..=nf).map(|i| Atom::constant(format!("f{}", i))).collect();
    let actions: Vec<Atom> = (1..=na).map(|i| Atom::constant(format!("a{}", i))).collect();

    let mut sig = Signature::new();
    for f in &fluents {
        sig.declare_fluent(
            f.clone(),
            FluentInfo {
                kind: FluentKind::Regular,
                class: FluentClass::User,
                provisional: false,
            },
        )
        .unwrap();
    }
    for (i, a) in actions.iter().enumerate() {
        sig.declare_action(
            a.clone(),
            ActionInfo {
                agent: Some(format!("g{}", i + 1)),
            },
        )
        .unwrap();
    }

    let mut laws = Vec::new();
    let mut group = 0usize;
    let next_group = |prefix: &str, group: &mut usize| {
        *group += 1;
        Atom::constant(format!("{}{}", prefix, group))
    };
    for f in &fluents {
        laws.push(LawInput::Inertial {
            group: next_group("gin", &mut group),
            fluent: f.clone(),
        });
    }

    let rand_fluent_lit = |rng: &mut ChaCha8Rng| Literal {
        atom: fluents[rng.gen_range(0..fluents.len())].clone(),
        positive: rng.gen_bool(0.5),
    };
    let rand_action_lit = |rng: &mut ChaCha8Rng| Literal {
        atom: actions[rng.gen_range(0..actions.len())].clone(),
        positive: rng.gen_bool(0.7),
    };

    let extra = rng.gen_range(0..=cfg.max_extra_laws);
    for _ in 0..extra {
        match rng.gen_range(0..10) {
            0..=2 => {
                let head = rand_fluent_lit(&mut rng);
                let nif = rng.gen_range(0..=2);
                let if_part: Vec<Literal> = (0..nif).map(|_| rand_fluent_lit(&mut rng)).collect();
                let ifcons = if rng.gen_bool(0.3) {
                    vec![rand_fluent_lit(&mut rng)]
                } else {
                    Vec::new()
                };
                laws.push(LawInput::Static {
                    group: next_group("gs", &mut group),
                    head,
                    if_part,
                    ifcons,
                });
            }
            3..=6 => {
                let head = rand_fluent_lit(&mut rng);
                let mut after = Vec::new();
                for _ in 0..rng.gen_range(1..=2) {
                    after.push(rand_action_lit(&mut rng));
                }
                for _ in 0..rng.gen_range(0..=1) {
                    after.push(rand_fluent_lit(&mut rng));
                }
                let ifcons = if rng.gen_bool(0.3) {
                    vec![rand_fluent_lit(&mut rng)]
                } else {
                    Vec::new()
                };
                laws.push(LawInput::Dynamic {
                    group: next_group("gd", &mut group),
                    head,
                    after,
                    ifcons,
                });
            }
            7 => {
                laws.push(LawInput::Default {
                    group: next_group("gdf", &mut group),
                    literal: rand_fluent_lit(&mut rng),
                });
            }
            8 => {
                let acts: Vec<Literal> = (0..rng.gen_range(1..=na))
                    .map(|_| Literal::pos(actions[rng.gen_range(0..actions.len())].clone()))
                    .collect();
                let condition = if rng.gen_bool(0.6) {
                    vec![rand_fluent_lit(&mut rng)]
                } else {
                    Vec::new()
                };
                laws.push(LawInput::Nonexecutable {
                    group: next_group("gn", &mut group),
                    actions: acts,
                    condition,
                });
            }
            _ => {
                let condition: Vec<Literal> =
                    (0..rng.gen_range(1..=2)).map(|_| rand_fluent_lit(&mut rng)).collect();
                laws.push(LawInput::Impossible {
                    group: next_group("gim", &mut group),
                    condition,
                });
            }
        }
    }
    expand_abbreviations(&sig, &laws).expect("generated descriptions are well-formed")
}

/// A raw random program over at most `max_atoms` atoms: normal rules,
/// choice-shaped rules, a few constraints, and sometimes exactly-one pairs
/// with their compiled constraints.
pub fn random_program(seed: u64, max_atoms: usize) -> LogicProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_atoms.max(2));
    let atoms: Vec<TimedLit> = (0..n)
        .map(|i| TimedLit {
            time: 0,
            lit: Literal::pos(Atom::constant(format!("p{}", i))),
        })
        .collect();
    let mut rules = Vec::new();
    let nrules = rng.gen_range(1..=2 * n);
    let rand_atoms = |rng: &mut ChaCha8Rng, max: usize| -> Vec<u32> {
        let k = rng.gen_range(0..=max);
        let mut out = Vec::new();
        for _ in 0..k {
            let a = rng.gen_range(0..n) as u32;
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    };
    for _ in 0..nrules {
        let constraint = rng.gen_bool(0.15);
        let head = if constraint {
            None
        } else {
            Some(rng.gen_range(0..n) as u32)
        };
        let mut rule = Rule {
            head,
            pos: rand_atoms(&mut rng, 2),
            naf: rand_atoms(&mut rng, 2),
            nnaf: rand_atoms(&mut rng, 1),
        };
        // choice-shaped rules are common in translated programs
        if !constraint && rng.gen_bool(0.4) {
            rule.nnaf = vec![rule.head.unwrap()];
        }
        rules.push(rule);
    }
    let mut p = LogicProgram::new_raw(atoms, rules, 0);
    // occasionally pair up atoms exactly-one style
    if n >= 2 && rng.gen_bool(0.3) {
        let a = rng.gen_range(0..n - 1) as u32;
        let b = a + 1;
        p.exactly_one.push((a, b));
        p.rules.push(Rule {
            head: None,
            pos: vec![a, b],
            ..Rule::default()
        });
        p.rules.push(Rule {
            head: None,
            naf: vec![a, b],
            ..Rule::default()
        });
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptions_are_reproducible() {
        let cfg = DescConfig::default();
        for seed in 0..20 {
            let a = random_description(seed, &cfg);
            let b = random_description(seed, &cfg);
            assert_eq!(a, b);
            assert!(!a.signature.fluents.is_empty());
            assert!(!a.dynamics.is_empty()); // inertia is always there
        }
    }

    #[test]
    fn programs_are_reproducible_and_bounded() {
        for seed in 0..20 {
            let a = random_program(seed, 16);
            let b = random_program(seed, 16);
            assert_eq!(a.rules, b.rules);
            assert!(a.atom_count() <= 16);
        }
    }
}
