//! Experience storage and Monte-Carlo return/advantage computation.

use crate::engagement::OBS_DIM;
use crate::side::Side;

use super::policy::CONTROL_DIM;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub observation: [f32; OBS_DIM],
    pub raw_action: [f32; CONTROL_DIM],
    pub fire: bool,
    pub fire_available: bool,
    pub log_prob: f32,
    pub value: f32,
    /// −1, 0 or +1.
    pub reward: f32,
    pub done: bool,
    pub side: Side,
    pub episode: usize,
}

/// Transitions stored trajectory by trajectory: each (episode, side) pair is
/// contiguous and ends with `done = true`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RolloutBuffer {
    pub transitions: Vec<Transition>,
    pub returns: Vec<f32>,
    pub advantages: Vec<f32>,
}

impl RolloutBuffer {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn count_side(&self, side: Side) -> usize {
        self.transitions.iter().filter(|t| t.side == side).count()
    }

    /// Appends one complete trajectory.
    pub fn push_trajectory(&mut self, trajectory: impl IntoIterator<Item = Transition>) {
        self.transitions.extend(trajectory);
    }

    /// Discounted returns `G_t = r_t + γ G_{t+1}` within each trajectory,
    /// advantages `G_t − V(s_t)`, then (optionally) normalised over the buffer.
    pub fn compute_returns_and_advantages(&mut self, gamma: f32, normalize: bool) {
        let n = self.transitions.len();
        self.returns = vec![0.0; n];
        let mut g = 0.0f32;
        for i in (0..n).rev() {
            let t = &self.transitions[i];
            if t.done {
                g = 0.0;
            }
            g = t.reward + gamma * g;
            self.returns[i] = g;
        }
        self.advantages = self.transitions.iter().zip(&self.returns).map(|(t, g)| g - t.value).collect();
        if normalize {
            normalize_in_place(&mut self.advantages);
        }
    }

    /// Checks that every return equals its trajectory's terminal reward and
    /// that the two sides of every episode sum to zero.
    pub fn verify_return_identity(&self) -> Result<(), String> {
        if self.returns.len() != self.transitions.len() {
            return Err("returns not computed".into());
        }
        let mut start = 0;
        let mut terminal_by_episode: std::collections::BTreeMap<usize, [Option<f32>; 2]> = Default::default();
        for (i, t) in self.transitions.iter().enumerate() {
            if !t.done {
                if t.reward != 0.0 {
                    return Err(format!("non-terminal transition {i} has reward {}", t.reward));
                }
                continue;
            }
            if !matches!(t.reward, -1.0 | 0.0 | 1.0) {
                return Err(format!("terminal reward {} at {i} not in {{-1, 0, 1}}", t.reward));
            }
            for j in start..=i {
                if self.returns[j] != t.reward {
                    return Err(format!("return {} at {j} differs from terminal reward {}", self.returns[j], t.reward));
                }
            }
            terminal_by_episode.entry(t.episode).or_default()[t.side.index()] = Some(t.reward);
            start = i + 1;
        }
        if start != self.transitions.len() {
            return Err("buffer ends with an incomplete trajectory".into());
        }
        for (ep, [red, blue]) in terminal_by_episode {
            if let (Some(r), Some(b)) = (red, blue) {
                if r + b != 0.0 {
                    return Err(format!("episode {ep} rewards {r} and {b} are not zero-sum"));
                }
            }
        }
        Ok(())
    }
}

/// Shifts and scales to zero mean, unit (population) standard deviation.
/// A constant input is only centred.
pub fn normalize_in_place(values: &mut [f32]) {
    if values.is_empty() {
        return;
    }
    let n = values.len() as f64;
    let mean = values.iter().map(|v| *v as f64).sum::<f64>() / n;
    let var = values.iter().map(|v| (*v as f64 - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    let scale = if std > 1e-8 { 1.0 / std } else { 1.0 };
    for v in values.iter_mut() {
        *v = ((*v as f64 - mean) * scale) as f32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(episode: usize, side: Side, len: usize, terminal: f32, value: f32) -> Vec<Transition> {
        (0..len)
            .map(|i| Transition {
                observation: [0.0; OBS_DIM],
                raw_action: [0.0; CONTROL_DIM],
                fire: false,
                fire_available: false,
                log_prob: -1.0,
                value,
                reward: if i + 1 == len { terminal } else { 0.0 },
                done: i + 1 == len,
                side,
                episode,
            })
            .collect()
    }

    #[test]
    fn win_episode_returns_are_one() {
        let mut b = RolloutBuffer::default();
        b.push_trajectory(traj(0, Side::Red, 5, 1.0, 0.2));
        b.push_trajectory(traj(0, Side::Blue, 5, -1.0, 0.2));
        b.compute_returns_and_advantages(1.0, false);
        assert!(b.returns[..5].iter().all(|g| *g == 1.0));
        assert!(b.returns[5..].iter().all(|g| *g == -1.0));
        assert!((b.advantages[0] - 0.8).abs() < 1e-7);
        b.verify_return_identity().unwrap();
    }

    #[test]
    fn draw_returns_are_zero() {
        let mut b = RolloutBuffer::default();
        b.push_trajectory(traj(0, Side::Red, 4, 0.0, 0.3));
        b.compute_returns_and_advantages(1.0, false);
        assert!(b.returns.iter().all(|g| *g == 0.0));
        for (a, t) in b.advantages.iter().zip(&b.transitions) {
            assert_eq!(a + t.value, 0.0);
        }
    }

    #[test]
    fn normalised_advantages_have_unit_moments() {
        let mut b = RolloutBuffer::default();
        b.push_trajectory(traj(0, Side::Red, 7, 1.0, 0.1));
        b.push_trajectory(traj(0, Side::Blue, 7, -1.0, -0.3));
        b.push_trajectory(traj(1, Side::Red, 3, 0.0, 0.5));
        b.push_trajectory(traj(1, Side::Blue, 3, 0.0, 0.0));
        b.compute_returns_and_advantages(1.0, true);
        let n = b.advantages.len() as f64;
        let mean = b.advantages.iter().map(|a| *a as f64).sum::<f64>() / n;
        let std = (b.advantages.iter().map(|a| (*a as f64 - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-6);
        assert!((std - 1.0).abs() < 1e-6);
    }

    #[test]
    fn identity_check_flags_violations() {
        let mut b = RolloutBuffer::default();
        b.push_trajectory(traj(0, Side::Red, 3, 1.0, 0.0));
        b.push_trajectory(traj(0, Side::Blue, 3, 1.0, 0.0));
        b.compute_returns_and_advantages(1.0, false);
        assert!(b.verify_return_identity().unwrap_err().contains("zero-sum"));
        let mut c = RolloutBuffer::default();
        c.push_trajectory(traj(0, Side::Red, 3, 1.0, 0.0));
        c.compute_returns_and_advantages(0.5, false);
        assert!(c.verify_return_identity().is_err());
    }
}
