//! Versioned binary checkpoints.
//!
//! Layout: the magic `MTRNNCKP`, a little-endian `u32` format version, then a
//! fixed sequence of fields. Integers are `u64` LE, floats their IEEE-754 bits
//! LE, sequences carry a `u64` length prefix and strings are UTF-8 byte
//! sequences. Floats are stored bit-exactly, so save, load and save again gives
//! the same bytes.

use std::path::Path;

use crate::assembly::{Associator, AssociatorState, ModelSpec, MultiModalModel, OptimizerStates};
use crate::net::{CscKind, CscStore, Direction, IoActivation, Params, Topology};
use crate::train::{Network, OptimizerState};
use crate::{Error, Matrix, Result};

pub const MAGIC: &[u8; 8] = b"MTRNNCKP";
pub const VERSION: u32 = 1;

/// Everything needed to resume work on a trained model.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    /// Config snapshot the model was trained with.
    pub config: String,
    pub seed: u64,
    pub model: MultiModalModel,
    pub optimizers: OptimizerStates,
    /// Epochs run by the auditory, somatosensory, visual and associator stages.
    pub epochs: [usize; 4],
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        self.usize(v.len());
        v.iter().for_each(|x| self.f64(*x));
    }
    fn i8s(&mut self, v: &[i8]) {
        self.usize(v.len());
        self.0.extend(v.iter().map(|x| *x as u8));
    }
    fn usizes(&mut self, v: &[usize]) {
        self.usize(v.len());
        v.iter().for_each(|x| self.usize(*x));
    }
    fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }

    fn topology(&mut self, t: &Topology) {
        for v in [t.io_count, t.cf_count, t.cs_count, t.csc_count] {
            self.usize(v);
        }
        for v in [t.tau_io, t.tau_cf, t.tau_cs] {
            self.f64(v);
        }
        self.u8(match t.direction {
            Direction::ContextBias => 0,
            Direction::ContextAbstraction => 1,
        });
        self.u8(match t.io_activation {
            IoActivation::DecisiveNormalisation => 0,
            IoActivation::Sigmoid => 1,
        });
    }

    fn network(&mut self, n: &Network) {
        self.topology(&n.topology);
        self.f64s(n.params.weights());
        self.f64s(n.params.biases());
    }

    fn csc(&mut self, c: &CscStore) {
        self.u8(match c.kind {
            CscKind::Initial => 0,
            CscKind::Final => 1,
        });
        self.usize(c.values.len());
        c.values.iter().for_each(|v| self.f64s(v));
    }

    fn optimizer(&mut self, o: &OptimizerState) {
        self.f64s(&o.weight_rates);
        self.f64s(&o.bias_rates);
        self.i8s(&o.weight_signs);
        self.i8s(&o.bias_signs);
        self.f64s(&o.zeta);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Checkpoint { offset: self.pos, message: message.into() })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return self.fail(format!("truncated: need {n} more bytes, {} left", self.buf.len() - self.pos));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).or_else(|_| self.fail(format!("value {v} does not fit in usize")))
    }
    /// A length prefix, checked against the bytes left so a corrupt length
    /// cannot trigger a huge allocation.
    fn len(&mut self, item: usize) -> Result<usize> {
        let n = self.usize()?;
        if n.saturating_mul(item) > self.buf.len() - self.pos {
            self.pos -= 8;
            return self.fail(format!("length {n} exceeds the remaining data"));
        }
        Ok(n)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.f64()).collect()
    }
    fn i8s(&mut self) -> Result<Vec<i8>> {
        let n = self.len(1)?;
        Ok(self.take(n)?.iter().map(|b| *b as i8).collect())
    }
    fn usizes(&mut self) -> Result<Vec<usize>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.usize()).collect()
    }
    fn str(&mut self) -> Result<String> {
        let n = self.len(1)?;
        let at = self.pos;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| Error::Checkpoint { offset: at, message: "invalid UTF-8".into() })
    }

    fn topology(&mut self) -> Result<Topology> {
        let at = self.pos;
        let (io, cf, cs, csc) = (self.usize()?, self.usize()?, self.usize()?, self.usize()?);
        let taus = [self.f64()?, self.f64()?, self.f64()?];
        let direction = match self.u8()? {
            0 => Direction::ContextBias,
            1 => Direction::ContextAbstraction,
            d => return self.fail(format!("unknown direction tag {d}")),
        };
        let act = match self.u8()? {
            0 => IoActivation::DecisiveNormalisation,
            1 => IoActivation::Sigmoid,
            a => return self.fail(format!("unknown activation tag {a}")),
        };
        Topology::new(io, cf, cs, taus, direction, act)
            .and_then(|t| t.with_csc_count(csc))
            .map_err(|e| Error::Checkpoint { offset: at, message: format!("bad topology: {e}") })
    }

    fn network(&mut self) -> Result<Network> {
        let topology = self.topology()?;
        let at = self.pos;
        let weights = self.f64s()?;
        let biases = self.f64s()?;
        let params = Params::from_parts(&topology, weights, biases)
            .map_err(|e| Error::Checkpoint { offset: at, message: e.to_string() })?;
        Ok(Network { topology, params })
    }

    fn csc(&mut self) -> Result<CscStore> {
        let kind = match self.u8()? {
            0 => CscKind::Initial,
            1 => CscKind::Final,
            k => return self.fail(format!("unknown Csc kind tag {k}")),
        };
        let n = self.len(8)?;
        let values = (0..n).map(|_| self.f64s()).collect::<Result<_>>()?;
        Ok(CscStore { kind, values })
    }

    fn optimizer(&mut self) -> Result<OptimizerState> {
        Ok(OptimizerState {
            weight_rates: self.f64s()?,
            bias_rates: self.f64s()?,
            weight_signs: self.i8s()?,
            bias_signs: self.i8s()?,
            zeta: self.f64s()?,
        })
    }
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let m = &self.model;
        let spec = toml::to_string(&m.spec).map_err(|e| Error::Serde(e.to_string()))?;
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.0.extend_from_slice(&VERSION.to_le_bytes());
        w.str(&self.config);
        w.u64(self.seed);
        w.str(&spec);
        for n in [&m.auditory, &m.somatosensory, &m.visual] {
            w.network(n);
        }
        for c in [&m.auditory_csc, &m.somatosensory_csc, &m.visual_csc] {
            w.csc(c);
        }
        let o = &self.optimizers;
        for s in [&o.auditory, &o.somatosensory, &o.visual] {
            w.optimizer(s);
        }
        w.usize(m.associator.weights.rows());
        w.usize(m.associator.weights.cols());
        w.f64s(m.associator.weights.as_slice());
        w.f64s(&m.associator.biases);
        w.f64s(&o.associator.weight_rates);
        w.f64s(&o.associator.bias_rates);
        w.i8s(&o.associator.weight_signs);
        w.i8s(&o.associator.bias_signs);
        self.epochs.iter().for_each(|e| w.usize(*e));
        w.usize(m.utterances.len());
        m.utterances.iter().for_each(|u| w.str(u));
        w.usizes(&m.scene_ids);
        w.usizes(&m.scene_utterance);
        w.usize(m.generation_steps);
        Ok(w.0)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            r.pos = 0;
            return r.fail("not a checkpoint (bad magic)");
        }
        let version = r.u32()?;
        if version != VERSION {
            r.pos -= 4;
            return r.fail(format!("format version {version}, this build reads version {VERSION}"));
        }
        let config = r.str()?;
        let seed = r.u64()?;
        let at = r.pos;
        let spec: ModelSpec = toml::from_str(&r.str()?)
            .map_err(|e| Error::Checkpoint { offset: at, message: format!("model spec: {e}") })?;
        let auditory = r.network()?;
        let somatosensory = r.network()?;
        let visual = r.network()?;
        let auditory_csc = r.csc()?;
        let somatosensory_csc = r.csc()?;
        let visual_csc = r.csc()?;
        let opt_a = r.optimizer()?;
        let opt_s = r.optimizer()?;
        let opt_v = r.optimizer()?;
        let at = r.pos;
        let (rows, cols) = (r.usize()?, r.usize()?);
        let weights = Matrix::from_vec(rows, cols, r.f64s()?)
            .map_err(|e| Error::Checkpoint { offset: at, message: format!("associator: {e}") })?;
        let associator = Associator { weights, biases: r.f64s()? };
        let assoc_state = AssociatorState {
            weight_rates: r.f64s()?,
            bias_rates: r.f64s()?,
            weight_signs: r.i8s()?,
            bias_signs: r.i8s()?,
        };
        let epochs = [r.usize()?, r.usize()?, r.usize()?, r.usize()?];
        let n = r.len(8)?;
        let utterances = (0..n).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let scene_ids = r.usizes()?;
        let scene_utterance = r.usizes()?;
        let generation_steps = r.usize()?;
        if r.pos != buf.len() {
            return r.fail(format!("{} trailing bytes", buf.len() - r.pos));
        }
        let ck = Checkpoint {
            config,
            seed,
            model: MultiModalModel {
                spec,
                auditory,
                somatosensory,
                visual,
                utterances,
                auditory_csc,
                scene_ids,
                scene_utterance,
                somatosensory_csc,
                visual_csc,
                associator,
                generation_steps,
            },
            optimizers: OptimizerStates {
                auditory: opt_a,
                somatosensory: opt_s,
                visual: opt_v,
                associator: assoc_state,
            },
            epochs,
        };
        ck.check().map_err(|e| Error::Checkpoint { offset: buf.len(), message: e.to_string() })?;
        Ok(ck)
    }

    /// Cross-field consistency: store sizes against topologies and maps.
    fn check(&self) -> Result<()> {
        let m = &self.model;
        let bad = |what: &str| Err(Error::Data(format!("inconsistent checkpoint: {what}")));
        let dims = |c: &CscStore, n: &Network| c.values.iter().all(|v| v.len() == n.topology.csc_count);
        if !dims(&m.auditory_csc, &m.auditory)
            || !dims(&m.somatosensory_csc, &m.somatosensory)
            || !dims(&m.visual_csc, &m.visual)
        {
            return bad("Csc dimensions");
        }
        if m.auditory_csc.len() != m.utterances.len() {
            return bad("auditory Csc count");
        }
        let scenes = m.scene_ids.len();
        if m.somatosensory_csc.len() != scenes || m.visual_csc.len() != scenes || m.scene_utterance.len() != scenes {
            return bad("scene counts");
        }
        if m.scene_utterance.iter().any(|&u| u >= m.utterances.len()) {
            return bad("scene utterance index");
        }
        let a = &m.associator;
        if a.weights.rows() != m.auditory.topology.csc_count
            || a.weights.cols() != m.somatosensory.topology.csc_count + m.visual.topology.csc_count
            || a.biases.len() != a.weights.rows()
        {
            return bad("associator dimensions");
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let buf = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&buf)
    }
}
