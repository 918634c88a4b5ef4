use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::absorber::Absorber;
use crate::error::{Error, Result};

/// An absorber embedded in a host: host ids of its spine, of its augmented
/// path, and of the absorption vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedAbsorber {
    pub v: usize,
    pub spine: Vec<usize>,
    pub augmented: Vec<usize>,
}

impl PlacedAbsorber {
    /// `map[x]` is the host vertex carrying template vertex `x`.
    pub fn from_mapping(template: &Absorber, map: &[usize]) -> Self {
        PlacedAbsorber {
            v: map[template.v],
            spine: template.spine.order().iter().map(|&x| map[x]).collect(),
            augmented: template.augmented_order.iter().map(|&x| map[x]).collect(),
        }
    }

    /// Host ids indexed by template vertex.
    pub fn mapping(&self) -> Vec<usize> {
        let mut m = self.spine.clone();
        m.push(self.v);
        m
    }
}

fn absorption_error(msg: String) -> Error {
    Error::Absorption(msg)
}

/// Replace `seg` (found contiguously, forwards or backwards) by `with`.
fn splice_cyclic(cycle: &mut Vec<usize>, seg: &[usize], with: &[usize]) -> Result<()> {
    let n = cycle.len();
    let len = seg.len();
    let start = cycle
        .iter()
        .position(|&x| x == seg[0])
        .ok_or_else(|| absorption_error(format!("spine vertex {} is not on the cycle", seg[0])))?;
    let forward = (0..len).all(|t| cycle[(start + t) % n] == seg[t]);
    let backward = !forward && (0..len).all(|t| cycle[(start + n - t) % n] == seg[t]);
    let (from, insert): (usize, Vec<usize>) = if forward {
        (start, with.to_vec())
    } else if backward {
        ((start + n + 1 - len) % n, with.iter().rev().copied().collect())
    } else {
        return Err(absorption_error(format!(
            "spine starting at {} is not contiguous on the cycle",
            seg[0]
        )));
    };
    if from + len > n {
        cycle.rotate_left(from);
        cycle.splice(0..len, insert);
    } else {
        cycle.splice(from..from + len, insert);
    }
    Ok(())
}

/// Insert every leftover vertex by swapping its absorber's spine for the
/// augmented path.
pub fn absorb_leftovers(cycle_order: &[usize], absorbers: &[PlacedAbsorber], leftover: &[usize]) -> Result<Vec<usize>> {
    let owner: HashMap<usize, usize> = absorbers.iter().enumerate().map(|(i, a)| (a.v, i)).collect();
    let mut cycle = cycle_order.to_vec();
    let mut on_cycle: std::collections::HashSet<usize> = cycle.iter().copied().collect();
    for &v in leftover {
        let a = owner
            .get(&v)
            .map(|&i| &absorbers[i])
            .ok_or_else(|| absorption_error(format!("vertex {v} is not the absorption vertex of a placed absorber")))?;
        if !on_cycle.insert(v) {
            return Err(absorption_error(format!("vertex {v} is already on the cycle")));
        }
        splice_cyclic(&mut cycle, &a.spine, &a.augmented)?;
    }
    Ok(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorber::{build_absorber, AbsorberParams};

    fn placed(offset: usize) -> PlacedAbsorber {
        let t = build_absorber(AbsorberParams::new(3, 4, 2).unwrap()).unwrap();
        let map: Vec<usize> = (0..t.params.vertex_count()).map(|x| x + offset).collect();
        PlacedAbsorber::from_mapping(&t, &map)
    }

    #[test]
    fn empty_leftover_is_identity() {
        let a = placed(0);
        let cyc: Vec<usize> = a.spine.clone();
        assert_eq!(absorb_leftovers(&cyc, &[a], &[]).unwrap(), cyc);
    }

    #[test]
    fn wrapped_and_reversed_spines() {
        let a = placed(0);
        let mut cyc: Vec<usize> = a.spine.clone();
        cyc.extend(100..105);
        cyc.rotate_left(30);
        let out = absorb_leftovers(&cyc, std::slice::from_ref(&a), &[a.v]).unwrap();
        assert_eq!(out.len(), cyc.len() + 1);
        let mut rev = cyc.clone();
        rev.reverse();
        let out2 = absorb_leftovers(&rev, std::slice::from_ref(&a), &[a.v]).unwrap();
        assert_eq!(out2.len(), rev.len() + 1);
        assert!(absorb_leftovers(&cyc, std::slice::from_ref(&a), &[7]).is_err());
        let mut broken = cyc.clone();
        broken.swap(0, 5);
        assert!(absorb_leftovers(&broken, std::slice::from_ref(&a), &[a.v]).is_err());
    }
}
