//! Actor/critic parameter bundle and its binary model format.
//!
//! Layout (all integers u32 little-endian, all parameters f32 little-endian):
//!
//! ```text
//! magic "BVRP" | version | hidden activation (0 = tanh, 1 = identity)
//! actor layer count | actor layer sizes...
//! critic layer count | critic layer sizes...
//! log-spread count
//! actor params   (per layer: weights row-major [out][in], then biases)
//! critic params  (same)
//! log-spread values
//! ```

use std::io::Read;
use std::path::Path;

use rand::Rng;

use super::{Activation, Mlp, NetworkSpec, NnError};
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 4] = b"BVRP";
pub const FORMAT_VERSION: u32 = 1;
pub const LOG_SPREAD_MIN: f64 = -5.0;
pub const LOG_SPREAD_MAX: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParameters<T> {
    pub actor: Mlp<T>,
    pub critic: Mlp<T>,
    /// Log standard deviation of each continuous action, state independent.
    pub action_log_spread: Vec<T>,
}

impl<T: Scalar> PolicyParameters<T> {
    pub fn init<R: Rng + ?Sized>(
        actor: &NetworkSpec,
        critic: &NetworkSpec,
        continuous_actions: usize,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        Ok(Self {
            actor: Mlp::init(actor, rng)?,
            critic: Mlp::init(critic, rng)?,
            action_log_spread: vec![T::zero(); continuous_actions],
        })
    }

    pub fn clamp_log_spread(&mut self) {
        for s in &mut self.action_log_spread {
            *s = s.max(T::lit(LOG_SPREAD_MIN)).min(T::lit(LOG_SPREAD_MAX));
        }
    }

    pub fn is_finite(&self) -> bool {
        self.actor.is_finite() && self.critic.is_finite() && self.action_log_spread.iter().all(|v| v.is_finite())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let put_u32 = |out: &mut Vec<u8>, v: u32| out.extend_from_slice(&v.to_le_bytes());
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, FORMAT_VERSION);
        let hidden = match self.actor.spec().hidden {
            Activation::Tanh => 0,
            Activation::Identity => 1,
        };
        put_u32(&mut out, hidden);
        for net in [&self.actor, &self.critic] {
            let sizes = net.spec().layer_sizes;
            put_u32(&mut out, sizes.len() as u32);
            for s in sizes {
                put_u32(&mut out, s as u32);
            }
        }
        put_u32(&mut out, self.action_log_spread.len() as u32);
        for net in [&self.actor, &self.critic] {
            for slice in net.param_slices() {
                for v in slice {
                    out.extend_from_slice(&v.as_f32().to_le_bytes());
                }
            }
        }
        for v in &self.action_log_spread {
            out.extend_from_slice(&v.as_f32().to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NnError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(NnError::Format("bad magic tag (not a policy model file)".into()));
        }
        let version = r.u32("version")?;
        if version != FORMAT_VERSION {
            return Err(NnError::Format(format!("unsupported format version {version}, expected {FORMAT_VERSION}")));
        }
        let hidden = match r.u32("activation")? {
            0 => Activation::Tanh,
            1 => Activation::Identity,
            other => return Err(NnError::Format(format!("unknown activation code {other}"))),
        };
        let mut specs = Vec::with_capacity(2);
        for name in ["actor", "critic"] {
            let n = r.u32("layer count")? as usize;
            if !(2..=64).contains(&n) {
                return Err(NnError::Format(format!("{name} layer count {n} out of range")));
            }
            let sizes = (0..n).map(|_| r.u32("layer size").map(|s| s as usize)).collect::<Result<Vec<_>, _>>()?;
            let spec = NetworkSpec { layer_sizes: sizes, hidden };
            spec.validate().map_err(|e| NnError::Format(format!("{name}: {e}")))?;
            specs.push(spec);
        }
        let spread_len = r.u32("log-spread count")? as usize;
        let expected = 4 * (specs[0].parameter_count() + specs[1].parameter_count() + spread_len);
        if r.remaining() != expected {
            return Err(NnError::Format(format!(
                "parameter block is {} bytes at offset {}, header implies {expected}",
                r.remaining(),
                r.pos
            )));
        }
        let mut nets = Vec::with_capacity(2);
        for spec in &specs {
            let mut net = Mlp::zeros(spec)?;
            for slice in net.param_slices_mut() {
                for v in slice.iter_mut() {
                    *v = T::lit(r.f32()? as f64);
                }
            }
            nets.push(net);
        }
        let action_log_spread = (0..spread_len).map(|_| r.f32().map(|v| T::lit(v as f64))).collect::<Result<_, _>>()?;
        let critic = nets.pop().expect("two nets");
        let actor = nets.pop().expect("two nets");
        Ok(Self { actor, critic, action_log_spread })
    }

    pub fn save(&self, path: &Path) -> Result<(), NnError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes).map_err(|e| match e {
            NnError::Format(m) => NnError::Format(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], NnError> {
        if self.remaining() < n {
            return Err(NnError::Format(format!("truncated at offset {} (needed {n} more bytes)", self.pos)));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, NnError> {
        let b = self.take(4).map_err(|e| NnError::Format(format!("{what}: {e}")))?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }

    fn f32(&mut self) -> Result<f32, NnError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}
