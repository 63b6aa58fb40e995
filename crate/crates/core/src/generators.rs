//! Synthetic disease-transmission sequences.
//!
//! [`generate_pa_transmission`] grows a directed citation-like graph by
//! time-decayed preferential attachment. [`generate_sir_transmission`] runs an
//! SIR epidemic over a preferential-attachment contact network and records
//! who infected whom.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Batch, GraphSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}

fn invalid(msg: &str) -> GeneratorError {
    GeneratorError::InvalidParams(msg.to_string())
}

fn check_probability(p: f64, name: &str) -> Result<(), GeneratorError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(&format!("{name} must lie in [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaTransmissionParams {
    pub m0: usize,
    pub per_year: usize,
    pub years: usize,
    pub k: usize,
    pub p_isolated: f64,
    pub decay: f64,
    pub seed: u64,
}

impl Default for PaTransmissionParams {
    fn default() -> Self {
        PaTransmissionParams {
            m0: 500,
            per_year: 70,
            years: 20,
            k: 1,
            p_isolated: 0.5,
            decay: 1.0,
            seed: 0,
        }
    }
}

impl PaTransmissionParams {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.m0 == 0 || self.per_year == 0 || self.years == 0 || self.k == 0 {
            return Err(invalid("m0, per_year, years and k must be at least 1"));
        }
        check_probability(self.p_isolated, "p_isolated")?;
        if !(self.decay >= 0.0 && self.decay.is_finite()) {
            return Err(invalid("decay must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// Time-decayed preferential attachment.
///
/// The `m0` founders belong to year 0 and are emitted in step 1 together
/// with the year-1 arrivals, so the horizon is `years`. A non-isolated
/// arrival picks `k` distinct earlier-year nodes with probability
/// proportional to `(outdeg(v) + 1) · (year - v.year + 1)^(-decay)` and
/// receives one edge from each.
pub fn generate_pa_transmission(p: &PaTransmissionParams) -> Result<GraphSequence, GeneratorError> {
    p.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(p.seed);
    let total = p.m0 + p.per_year * p.years;
    let mut year = Vec::with_capacity(total);
    let mut out_deg = vec![0usize; total];
    let mut batches = vec![Batch::default(); p.years];
    let name = |i: usize| format!("p{i}");

    for i in 0..p.m0 {
        year.push(0usize);
        batches[0].nodes.push(name(i));
    }
    let mut weights = Vec::with_capacity(total);
    for y in 1..=p.years {
        // nodes from earlier years are the only candidates this year
        let candidates = year.len();
        for _ in 0..p.per_year {
            let id = year.len();
            year.push(y);
            let batch = &mut batches[y - 1];
            batch.nodes.push(name(id));
            if rng.gen::<f64>() < p.p_isolated {
                continue;
            }
            weights.clear();
            weights
                .extend((0..candidates).map(|v| (out_deg[v] + 1) as f64 * ((y - year[v] + 1) as f64).powf(-p.decay)));
            for _ in 0..p.k.min(candidates) {
                let sum: f64 = weights.iter().sum();
                if sum <= 0.0 {
                    break;
                }
                let mut r = rng.gen::<f64>() * sum;
                let mut pick = candidates - 1;
                for (v, &w) in weights.iter().enumerate() {
                    if w > 0.0 && r < w {
                        pick = v;
                        break;
                    }
                    r -= w;
                }
                // guard against rounding leaving pick on a used slot
                if weights[pick] == 0.0 {
                    pick = weights.iter().rposition(|&w| w > 0.0).expect("positive mass remains");
                }
                weights[pick] = 0.0;
                out_deg[pick] += 1;
                batch.edges.push((name(pick), name(id)));
            }
        }
    }
    Ok(GraphSequence::from_batches(true, &batches).expect("generator emits a valid sequence"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SirParams {
    pub population: usize,
    pub attach: usize,
    pub p_recover: f64,
    pub p_infect: f64,
    pub initial_infected: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for SirParams {
    fn default() -> Self {
        SirParams {
            population: 10_000,
            attach: 2,
            p_recover: 0.1,
            p_infect: 0.18,
            initial_infected: 1,
            max_steps: 20,
            seed: 0,
        }
    }
}

impl SirParams {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        check_probability(self.p_recover, "p_recover")?;
        check_probability(self.p_infect, "p_infect")?;
        if self.attach == 0 || self.population <= self.attach {
            return Err(invalid("population must exceed attach, and attach must be at least 1"));
        }
        if self.initial_infected == 0 || self.initial_infected > self.population {
            return Err(invalid("initial_infected must lie in 1..=population"));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps must be at least 1"));
        }
        Ok(())
    }
}

/// Undirected preferential-attachment graph grown from a `(k+1)`-clique;
/// every later node links to `k` distinct existing nodes chosen with
/// probability proportional to degree.
pub fn preferential_attachment<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    let mut endpoints = Vec::with_capacity(2 * n * k);
    let seed_size = (k + 1).min(n);
    for u in 0..seed_size {
        for v in (u + 1)..seed_size {
            adj[u].push(v);
            adj[v].push(u);
            endpoints.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(k);
    for v in seed_size..n {
        targets.clear();
        while targets.len() < k {
            let u = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&u) {
                targets.push(u);
            }
        }
        for &u in &targets {
            adj[u].push(v);
            adj[v].push(u);
            endpoints.extend([u, v]);
        }
    }
    adj
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Susceptible,
    Infectious,
    Recovered,
}

/// SIR transmission tree. Seeds arrive at step 1; a node infected during
/// step `t` arrives at step `t` with one edge from its infector. Each step
/// resolves recoveries first, then lets every still-infectious node `u`
/// infect each susceptible neighbour with probability `p_infect / deg(u)`.
/// A node reached by several infectors picks one uniformly. The horizon is
/// always `max_steps`; steps after extinction are empty.
pub fn generate_sir_transmission(p: &SirParams) -> Result<GraphSequence, GeneratorError> {
    p.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(p.seed);
    let contact = preferential_attachment(p.population, p.attach, &mut rng);
    let mut status = vec![Status::Susceptible; p.population];
    let mut batches = vec![Batch::default(); p.max_steps];
    let name = |i: usize| format!("s{i}");

    let mut seeds: Vec<usize> = sample(&mut rng, p.population, p.initial_infected).into_vec();
    seeds.sort_unstable();
    for &s in &seeds {
        status[s] = Status::Infectious;
        batches[0].nodes.push(name(s));
    }
    let mut infectious = seeds;

    let mut exposures: Vec<Vec<usize>> = vec![Vec::new(); p.population];
    for t in 2..=p.max_steps {
        if infectious.is_empty() {
            break;
        }
        infectious.retain(|&u| {
            if rng.gen::<f64>() < p.p_recover {
                status[u] = Status::Recovered;
                false
            } else {
                true
            }
        });
        let mut exposed = Vec::new();
        for &u in &infectious {
            let prob = p.p_infect / contact[u].len() as f64;
            for &w in &contact[u] {
                if status[w] == Status::Susceptible && rng.gen::<f64>() < prob {
                    if exposures[w].is_empty() {
                        exposed.push(w);
                    }
                    exposures[w].push(u);
                }
            }
        }
        exposed.sort_unstable();
        for &w in &exposed {
            let from = &exposures[w];
            let infector = from[rng.gen_range(0..from.len())];
            status[w] = Status::Infectious;
            batches[t - 1].nodes.push(name(w));
            batches[t - 1].edges.push((name(infector), name(w)));
            exposures[w].clear();
        }
        infectious.extend(exposed);
    }
    Ok(GraphSequence::from_batches(true, &batches).expect("generator emits a valid sequence"))
}
